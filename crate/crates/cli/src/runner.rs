//! Executes compiled tasks and assembles reports.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use starmod_core::bundle::{all_pass, bimodule_suite, deform_projection, metric_suite, ClassicalProjection};
use starmod_core::cocycle::{solve_two_chart_cocycle, verify_cocycle};
use starmod_core::matrix::StarMatrix;
use starmod_core::picard::{
    kernel_description, morita_check, outequiv_compose, outequiv_normal_form, OutEquivElement,
    COMPOSITION_CONVENTION, SIDEDNESS,
};
use starmod_core::star::{check_star_axioms, StarProduct, CONVENTION};
use starmod_core::trace::{index, index_invariance_check, NORMALIZATION};
use starmod_core::wire::{
    sparse_matrix, AlgebraDto, CheckDto, CocycleReportDto, KernelDto, MoritaReportDto, OutEquivDto, StarReportDto,
};
use starmod_core::Result;

use crate::scenario::{CocycleJob, Job, OutEquivOp, Scenario, Task};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Computed,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Computed => "computed",
            Status::Error => "error",
        }
    }

    fn of(pass: bool) -> Status {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskReport {
    pub id: String,
    pub kind: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub computed: usize,
    pub error: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conventions {
    pub star: &'static str,
    pub trace: &'static str,
    pub morita_sidedness: &'static str,
    pub witness_composition: &'static str,
    pub prng: &'static str,
}

pub const CONVENTIONS: Conventions = Conventions {
    star: CONVENTION,
    trace: NORMALIZATION,
    morita_sidedness: SIDEDNESS,
    witness_composition: COMPOSITION_CONVENTION,
    prng: "xoshiro256** seeded with seed_from_u64 (splitmix64 expansion)",
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub algebra: AlgebraDto,
    #[serde(rename = "K")]
    pub truncation: usize,
    pub seed: u64,
    pub conventions: Conventions,
    pub tasks: Vec<TaskReport>,
    pub summary: Summary,
}

impl Report {
    /// Exit status 0 iff no task failed or errored.
    pub fn success(&self) -> bool {
        self.summary.fail == 0 && self.summary.error == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "scenario: K = {}, seed = {}, {} task(s)\n",
            self.truncation, self.seed, self.summary.total
        );
        for t in &self.tasks {
            out.push_str(&format!("{:<8} {} ({})", t.status.as_str(), t.id, t.kind));
            if let Some(order) = t.details.as_ref().and_then(|d| d.get("first_failing_order")).and_then(Value::as_u64) {
                out.push_str(&format!(" first_failing_order={order}"));
            }
            if let Some(e) = &t.error {
                out.push_str(&format!(": {e}"));
            }
            if let Some(ms) = t.runtime_ms {
                out.push_str(&format!(" [{ms} ms]"));
            }
            out.push('\n');
        }
        let s = &self.summary;
        out.push_str(&format!(
            "summary: {} pass, {} fail, {} computed, {} error\n",
            s.pass, s.fail, s.computed, s.error
        ));
        out
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub timings: bool,
    /// Worker threads; 0 or 1 runs sequentially.
    pub jobs: usize,
}

fn lowest(orders: impl IntoIterator<Item = Option<usize>>) -> Option<usize> {
    orders.into_iter().flatten().min()
}

fn checks_details(checks: &[starmod_core::bundle::IdentityCheck]) -> (Status, Value) {
    let dto: Vec<CheckDto> = checks.iter().map(CheckDto::from_core).collect();
    let first = lowest(checks.iter().map(|c| c.first_failing_order));
    (Status::of(all_pass(checks)), json!({"checks": dto, "first_failing_order": first}))
}

fn deform_details(p0: &ClassicalProjection, star: &std::sync::Arc<StarProduct>, emit: bool) -> Result<(Status, Value)> {
    let d = deform_projection(p0, star)?;
    let defect = d.idempotency_defect()?;
    let classical = d.matrix().classical_limit() == *p0.matrix();
    let self_adjoint = p0.is_hermitian().then(|| d.is_self_adjoint());
    let equals_classical = StarMatrix::from_classical(p0.matrix(), star)?.first_difference(d.matrix()).is_none();
    let pass = defect.is_none() && classical && self_adjoint.unwrap_or(true);
    let mut details = json!({
        "size": d.size(),
        "hermitian": p0.is_hermitian(),
        "idempotent": defect.is_none(),
        "first_failing_order": defect,
        "classical_limit": classical,
        "self_adjoint": self_adjoint,
        "equals_classical": equals_classical,
    });
    if emit {
        details["matrix"] = serde_json::to_value(sparse_matrix(d.matrix())).expect("serializable");
    }
    Ok((Status::of(pass), details))
}

fn execute(job: &Job, star: &std::sync::Arc<StarProduct>) -> Result<(Status, Value)> {
    match job {
        Job::CheckStar { star, samples, seed } => {
            let report = check_star_axioms(star, *samples, *seed)?;
            let first = lowest(report.checks.iter().map(|c| c.first_failing_order));
            let mut details = serde_json::to_value(StarReportDto::from_core(&report)).expect("serializable");
            details["first_failing_order"] = json!(first);
            Ok((Status::of(report.all_pass()), details))
        }
        Job::DeformProjection { projection, emit } => deform_details(projection, star, *emit),
        Job::BimoduleSuite { projection, samples, seed } => {
            let d = deform_projection(projection, star)?;
            Ok(checks_details(&bimodule_suite(&d, *samples, *seed)?))
        }
        Job::MetricSuite { projection, samples, seed } => {
            let d = deform_projection(projection, star)?;
            Ok(checks_details(&metric_suite(&d, *samples, *seed)?))
        }
        Job::Cocycle(c) => {
            let data = match c {
                CocycleJob::Verify(data) => data.clone(),
                CocycleJob::Solve { transition, classical_inverse } => {
                    solve_two_chart_cocycle(transition, classical_inverse.as_ref())?
                }
            };
            let report = verify_cocycle(&data)?;
            let details = serde_json::to_value(CocycleReportDto::from_core(&report)).expect("serializable");
            Ok((Status::of(report.pass()), details))
        }
        Job::Index { projection } => {
            let d = deform_projection(projection, star)?;
            Ok((Status::Computed, json!({"index": index(&d)?.to_strings()})))
        }
        Job::IndexInvariance { projection, conjugator } => {
            let d = deform_projection(projection, star)?;
            let r = index_invariance_check(&d, conjugator)?;
            let details = json!({
                "index": r.index.to_strings(),
                "conjugated": r.conjugated.to_strings(),
                "first_failing_order": r.first_difference,
            });
            Ok((Status::of(r.equal()), details))
        }
        Job::Morita { model, a, b } => {
            let report = morita_check(a, b, model)?;
            let details = serde_json::to_value(MoritaReportDto::from_core(&report)?).expect("serializable");
            Ok((Status::Computed, details))
        }
        Job::OutEquiv { model, op, a, b, order } => {
            let value = match op {
                OutEquivOp::Identity => OutEquivElement::identity(model.d1(), *order),
                OutEquivOp::NormalForm => outequiv_normal_form(a.as_ref().expect("compiled")),
                OutEquivOp::Inverse => {
                    let a = a.as_ref().expect("compiled");
                    outequiv_compose(model, a, &OutEquivElement::identity(a.dim(), a.order()))?.inverse()
                }
                OutEquivOp::Compose => outequiv_compose(model, a.as_ref().expect("compiled"), b.as_ref().expect("compiled"))?,
            };
            Ok((Status::Computed, json!({"value": OutEquivDto::from_core(&value)})))
        }
        Job::Kernel { model, order } => {
            let k = kernel_description(model, *order)?;
            Ok((Status::Computed, serde_json::to_value(KernelDto::from_core(&k)).expect("serializable")))
        }
    }
}

fn run_task(task: &Task, star: &std::sync::Arc<StarProduct>, timings: bool) -> TaskReport {
    let start = Instant::now();
    let outcome = execute(&task.job, star);
    let runtime_ms = timings.then(|| start.elapsed().as_millis() as u64);
    let (status, details, error) = match outcome {
        Ok((status, details)) => (status, Some(details), None),
        Err(e) => (Status::Error, None, Some(e.to_string())),
    };
    TaskReport { id: task.id.clone(), kind: task.kind.clone(), status, details, error, runtime_ms }
}

/// Runs every task; task order is preserved whatever the worker count.
pub fn run(scenario: &Scenario, options: RunOptions) -> Report {
    let n = scenario.tasks.len();
    let workers = options.jobs.clamp(1, n.max(1));
    let reports: Vec<TaskReport> = if workers <= 1 {
        scenario.tasks.iter().map(|t| run_task(t, &scenario.star, options.timings)).collect()
    } else {
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<TaskReport>>> = Mutex::new(vec![None; n]);
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    if i >= n {
                        break;
                    }
                    let r = run_task(&scenario.tasks[i], &scenario.star, options.timings);
                    slots.lock().expect("no poisoned workers")[i] = Some(r);
                });
            }
        });
        slots.into_inner().expect("workers joined").into_iter().map(|r| r.expect("every task ran")).collect()
    };
    let mut summary = Summary { total: n, ..Summary::default() };
    for r in &reports {
        match r.status {
            Status::Pass => summary.pass += 1,
            Status::Fail => summary.fail += 1,
            Status::Computed => summary.computed += 1,
            Status::Error => summary.error += 1,
        }
    }
    Report {
        algebra: scenario.algebra_descriptor.clone(),
        truncation: scenario.truncation,
        seed: scenario.seed,
        conventions: CONVENTIONS,
        tasks: reports,
        summary,
    }
}
