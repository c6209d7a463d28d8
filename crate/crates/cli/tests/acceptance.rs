//! Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic throughout.
//! Runs without the libtest harness so the lines always reach the test output.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;

use starmod_core::algebra::{Algebra, Element};
use starmod_core::bundle::{
    bimodule_suite, check_fullness, deform_projection, metric_suite, module_equivalence, ClassicalProjection,
    DeformedProjection, BIMODULE_LAWS, METRIC_LAWS,
};
use starmod_core::cocycle::{solve_two_chart_cocycle, verify_cocycle};
use starmod_core::corpus;
use starmod_core::matrix::StarMatrix;
use starmod_core::picard::{
    morita_check, outequiv_compose, outequiv_normal_form, CharacteristicClass, CohomologyModel, LatticeAction,
    OutEquivElement,
};
use starmod_core::sample::Sampler;
use starmod_core::scalar::{rational, GaussianRational};
use starmod_core::star::{check_star_axioms, Axiom, StarProduct};
use starmod_core::trace::{cyclicity_check, index, index_invariance_check};
use starmod_core::FormalSeries;
use starmod_cli::{run_path, RunOptions};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn core<T>(r: starmod_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

const K: usize = 4;

fn torus(theta: (i64, i64)) -> Arc<Algebra> {
    Algebra::torus(rational(theta.0, theta.1))
}

fn thetas() -> [(i64, i64); 3] {
    [(0, 1), (1, 1), (1, 2)]
}

fn corpus_on(alg: &Arc<Algebra>) -> Result<Vec<(&'static str, ClassicalProjection)>, String> {
    core(corpus::all(alg))
}

fn series(e: Element) -> FormalSeries {
    FormalSeries::constant(e, K)
}

/// `I + λE₁₂`.
fn unipotent(star: &Arc<StarProduct>, n: usize) -> StarMatrix {
    let mut entries = StarMatrix::identity(star, n).entries().to_vec();
    entries[1] = FormalSeries::lambda_power(Element::one(star.algebra()), 1, K);
    StarMatrix::new(star, n, n, entries).unwrap()
}

/// `diag(e₁₀, e₀₁, 1, …)`.
fn monomial_diag(star: &Arc<StarProduct>, n: usize) -> StarMatrix {
    let t = star.algebra();
    let one = GaussianRational::from_ints(1, 0);
    let mut entries = StarMatrix::identity(star, n).entries().to_vec();
    entries[0] = series(Element::torus_mode(t, [1, 0], one.clone()));
    if n > 1 {
        entries[n + 1] = series(Element::torus_mode(t, [0, 1], one));
    }
    StarMatrix::new(star, n, n, entries).unwrap()
}

fn timed(limit: Duration, start: Instant) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    ensure!(elapsed <= limit, "took {:.1}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs());
    Ok(elapsed)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let samples = 50;
    let algebras = [
        ("plane dim 2", Algebra::canonical_plane(1)),
        ("plane dim 4", Algebra::canonical_plane(2)),
        ("torus θ=1", torus((1, 1))),
        ("torus θ=1/2", torus((1, 2))),
    ];
    for (i, (name, alg)) in algebras.iter().enumerate() {
        let report = core(check_star_axioms(&StarProduct::moyal(alg, K), samples, 100 + i as u64))?;
        for c in &report.checks {
            ensure!(c.pass, "{name}: {} fails at order {:?}", c.axiom.name(), c.first_failing_order);
        }
        let bad = core(check_star_axioms(&StarProduct::corrupted(alg, K), samples, 100 + i as u64))?;
        let assoc = bad.check(Axiom::Associativity);
        ensure!(
            !assoc.pass && assoc.first_failing_order == Some(2),
            "{name}: corrupted associativity reported {:?}",
            assoc.first_failing_order
        );
    }
    // oracle: e₁₀ ⋆ e₀₁ = Σ_r (−iθ/2)^r/r! λ^r e₁₁
    let t = torus((1, 1));
    let star = StarProduct::moyal(&t, K);
    let one = GaussianRational::from_ints(1, 0);
    let prod = core(star.multiply(
        &series(Element::torus_mode(&t, [1, 0], one.clone())),
        &series(Element::torus_mode(&t, [0, 1], one)),
    ))?;
    let mut c = GaussianRational::from_ints(1, 0);
    for r in 0..=K {
        ensure!(prod.coeff(r) == &Element::torus_mode(&t, [1, 1], c.clone()), "Weyl phase wrong at order {r}");
        c = (&c * &(&GaussianRational::ratio(-1, 2) * &GaussianRational::i())).scale(&rational(1, (r + 1) as i64));
    }
    let elapsed = timed(Duration::from_secs(30), start)?;
    Ok(format!(
        "{samples} triples on 4 algebras, corrupted fails associativity at order 2, {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for theta in thetas() {
        let t = torus(theta);
        let star = StarProduct::moyal(&t, K);
        let list = corpus_on(&t)?;
        ensure!(list.len() >= 5, "corpus too small");
        for (name, p0) in &list {
            let d = core(deform_projection(p0, &star))?;
            ensure!(core(d.idempotency_defect())?.is_none(), "{name} θ={theta:?}: P⋆P ≠ P");
            ensure!(d.matrix().classical_limit() == *p0.matrix(), "{name} θ={theta:?}: cl(P) ≠ P₀");
            if p0.is_hermitian() {
                ensure!(d.is_self_adjoint(), "{name} θ={theta:?}: P* ≠ P");
            }
            if theta.0 == 0 {
                let lifted = core(StarMatrix::from_classical(p0.matrix(), &star))?;
                ensure!(d.matrix().first_difference(&lifted).is_none(), "{name}: θ=0 deformation differs from P₀");
            }
            count += 1;
        }
        let block = list.iter().find(|(n, _)| *n == "block").expect("corpus has a block");
        ensure!(block.1.size() == 4, "block projection is not 4×4");
    }
    let elapsed = timed(Duration::from_secs(60), start)?;
    Ok(format!("{count} deformations over θ ∈ {{0, 1, 1/2}}, {:.1}s", elapsed.as_secs_f64()))
}

fn criterion_3() -> Outcome {
    let samples = 20;
    let t = torus((1, 1));
    let star = StarProduct::moyal(&t, K);
    let mut skipped = Vec::new();
    let list = corpus_on(&t)?;
    for (i, (name, p0)) in list.iter().enumerate() {
        let d = core(deform_projection(p0, &star))?;
        let checks = core(bimodule_suite(&d, samples, 300 + i as u64))?;
        ensure!(checks.len() == BIMODULE_LAWS.len(), "missing bimodule laws");
        for c in &checks {
            ensure!(c.pass, "{name}: {} fails at order {:?}", c.name, c.first_failing_order);
        }
        if d.is_self_adjoint() {
            let checks = core(metric_suite(&d, samples, 400 + i as u64))?;
            ensure!(checks.len() == METRIC_LAWS.len(), "missing metric laws");
            for c in &checks {
                ensure!(c.pass, "{name}: {} fails at order {:?}", c.name, c.first_failing_order);
            }
        } else {
            skipped.push(*name);
        }
    }
    Ok(format!(
        "{} bimodule laws on {} projections and {} metric laws on the Hermitian ones, {samples} tuples each (metric n/a: {})",
        BIMODULE_LAWS.len(),
        list.len(),
        METRIC_LAWS.len(),
        skipped.join(", ")
    ))
}

fn equivalence_holds(d: &DeformedProjection, d2: &DeformedProjection, seed: u64) -> Result<(), String> {
    let eq = core(module_equivalence(d, d2))?;
    let n = d.size();
    let star = d.star();
    ensure!(
        eq.v.classical_limit() == StarMatrix::identity(star, n).classical_limit(),
        "order-0 part of V is not I"
    );
    let left = core(eq.v.mul(d.matrix()))?;
    let right = core(d2.matrix().mul(&eq.v))?;
    ensure!(left.first_difference(&right).is_none(), "V⋆P ≠ P′⋆V");
    let mut sampler = Sampler::new(seed);
    for _ in 0..3 {
        let phi = core(d.sample_element(&mut sampler))?;
        let f = sampler.sparse_series(star.algebra(), K);
        let lhs = core(eq.apply(d2, &core(d.right_act(&phi, &f))?))?;
        let rhs = core(d2.right_act(&core(eq.apply(d2, &phi))?, &f))?;
        ensure!(lhs.first_difference(&rhs).is_none(), "T(φ•f) ≠ T(φ)•f");
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let t = torus((1, 1));
    let star = StarProduct::moyal(&t, K);
    let mut pairs = 0;
    for (i, (name, p0)) in corpus_on(&t)?.iter().enumerate() {
        let d = core(deform_projection(p0, &star))?;
        let n = p0.size();
        for (label, u) in [("I+λE₁₂", unipotent(&star, n)), ("monomial diag", monomial_diag(&star, n))] {
            let conj = core(d.conjugate(&u))?;
            // the direct deformation of the conjugated classical projection
            let direct = core(deform_projection(conj.classical(), &star))?;
            equivalence_holds(&direct, &conj, 500 + i as u64).map_err(|e| format!("{name}, {label}: {e}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} direct/conjugated pairs intertwined with V₀ = I and T(φ•f) = T(φ)•f"))
}

fn criterion_5() -> Outcome {
    let t = torus((1, 1));
    let star = StarProduct::moyal(&t, K);
    let cyc = core(cyclicity_check(&star, 2, 50, 600))?;
    ensure!(cyc.pass, "cyclicity fails at order {:?}", cyc.first_failing_order);
    let mut deformed = Vec::new();
    for (name, p0) in corpus_on(&t)? {
        let d = core(deform_projection(&p0, &star))?;
        let ind = core(index(&d))?;
        let rank = core(check_fullness(&p0))?.rank;
        ensure!(ind.coeff(0) == &GaussianRational::from_ints(rank as i64, 0), "{name}: index₀ ≠ rank {rank}");
        deformed.push((name, p0, d, ind));
    }
    let mut conjugations = 0;
    for (name, _, d, _) in &deformed {
        let n = d.size();
        let mut s = Sampler::new(601);
        let mut random = StarMatrix::identity(&star, n).entries().to_vec();
        for e in random.iter_mut() {
            let mut r = s.sparse_series(&t, K);
            *r.coeff_mut(0) = Element::zero(&t);
            *e = &*e + &r;
        }
        let random = core(StarMatrix::new(&star, n, n, random))?;
        let us = [unipotent(&star, n), monomial_diag(&star, n), random];
        for u in &us {
            let report = core(index_invariance_check(d, u))?;
            ensure!(report.equal(), "{name}: index changes under conjugation at order {:?}", report.first_difference);
        }
        conjugations = us.len();
    }
    let find = |n: &str| deformed.iter().find(|x| x.0 == n).expect("corpus name");
    for (a, b) in [("one-angle", "constant"), ("two-angle", "constant"), ("two-angle", "block")] {
        let (da, db) = (&find(a).2, &find(b).2);
        let sum = core(index(&core(da.direct_sum(db))?))?;
        ensure!(sum == &find(a).3 + &find(b).3, "index of {a} ⊕ {b} is not additive");
        let p_sum = core(find(a).1.direct_sum(&find(b).1))?;
        let redeformed = core(index(&core(deform_projection(&p_sum, &star))?))?;
        ensure!(redeformed == sum, "deformation of {a} ⊕ {b} has a different index");
    }
    Ok(format!(
        "cyclicity on 50 pairs, index₀ = rank on {} projections, invariant under {conjugations} conjugations, additive",
        deformed.len()
    ))
}

fn criterion_6() -> Outcome {
    let t = torus((1, 1));
    let star = StarProduct::moyal(&t, K);
    let seeds = [11u64, 12, 13, 14];
    let mut detections = 0;
    for &seed in &seeds {
        let mut s = Sampler::new(seed);
        let mut phi = monomial_diag(&star, 2).entries().to_vec();
        for e in phi.iter_mut() {
            let mut r = s.series(&t, K);
            *r.coeff_mut(0) = Element::zero(&t);
            *e = &*e + &r;
        }
        let phi = core(StarMatrix::new(&star, 2, 2, phi))?;
        let data = core(solve_two_chart_cocycle(&phi, None))?;
        let report = core(verify_cocycle(&data))?;
        ensure!(report.pass(), "seed {seed}: solved cocycle fails at order {:?}", report.first_failing_order());
        for order in 0..=K {
            let (i, j) = ((s.below(2)) as usize, (s.below(2)) as usize);
            let pair = if s.below(2) == 0 { ("a", "b") } else { ("b", "a") };
            let bump = s.sparse_element(&t);
            let bump = if bump.is_zero() { Element::one(&t) } else { bump };
            let bad = core(data.perturbed(pair.0, pair.1, i, j, order, bump))?;
            let report = core(verify_cocycle(&bad))?;
            ensure!(
                report.first_failing_order() == Some(order),
                "seed {seed}: perturbation at order {order} reported {:?}",
                report.first_failing_order()
            );
            detections += 1;
        }
    }
    Ok(format!("{} seeds pass, {detections} single-entry perturbations caught at their order", seeds.len()))
}

fn criterion_7() -> Outcome {
    let g = |s: &str| s.parse::<GaussianRational>().unwrap();
    let line = CohomologyModel::new(2, 1, vec![rational(1, 1)], vec![], true).map_err(|e| e.to_string())?;
    let base = CharacteristicClass::from_model(&line, vec![vec![g("1/3")], vec![g("2")], vec![g("0")]]).unwrap();
    for (diff, integral) in [("-2", true), ("-1/2", false), ("0", true), ("1/2", false), ("3", true)] {
        let mut orders = base.orders.clone();
        orders[0][0] = &orders[0][0] + &g(diff);
        let other = CharacteristicClass::new(base.leading.clone(), orders).unwrap();
        let r = core(morita_check(&base, &other, &line))?;
        ensure!(r.equivalent == integral, "difference {diff}: equivalent = {}", r.equivalent);
        if integral {
            let w = r.witness.expect("accepted classes carry a witness");
            ensure!(w.action == "id" && w.class == vec![diff.parse::<BigInt>().unwrap()], "difference {diff}: witness {w:?}");
        }
    }

    let swap = LatticeAction { name: "swap".into(), a1: vec![vec![0, 1], vec![1, 0]], a2: vec![vec![0, 1], vec![1, 0]] };
    let with_swap = core(CohomologyModel::new(2, 2, vec![rational(1, 1), rational(2, 1)], vec![swap], true))?;
    let without = core(CohomologyModel::new(2, 2, vec![rational(1, 1), rational(2, 1)], vec![], true))?;
    let c = CharacteristicClass::from_model(&with_swap, vec![vec![g("1/2"), g("1/3")]]).unwrap();
    let c_swapped = CharacteristicClass::new(vec![g("-2 i"), g("-i")], vec![vec![g("7/3"), g("-1/2")]]).unwrap();
    let r = core(morita_check(&c, &c_swapped, &with_swap))?;
    ensure!(r.witness.as_ref().map(|w| w.action.as_str()) == Some("swap"), "swap example: {r:?}");
    ensure!(!core(morita_check(&c, &c_swapped, &without))?.equivalent, "swap example accepted without the swap");

    let mut checked = 0;
    let mut s = Sampler::new(700);
    let coord = |s: &mut Sampler| {
        let n = s.below(13) as i64 - 6;
        let d = 1 + s.below(6) as i64;
        let m = s.below(5) as i64 - 2;
        GaussianRational::new(rational(n, d), rational(m, 1 + s.below(3) as i64))
    };
    for d1 in 0..=3 {
        let model = core(CohomologyModel::new(d1, 1, vec![rational(1, 1)], vec![], true))?;
        for k in 0..=K {
            let draw = |s: &mut Sampler| {
                outequiv_normal_form(&OutEquivElement {
                    v0: (0..d1).map(|_| coord(s)).collect(),
                    higher: (0..k).map(|_| (0..d1).map(|_| coord(s)).collect()).collect(),
                })
            };
            let id = OutEquivElement::identity(d1, k);
            for _ in 0..10 {
                let (a, b, c) = (draw(&mut s), draw(&mut s), draw(&mut s));
                let op = |x: &OutEquivElement, y: &OutEquivElement| outequiv_compose(&model, x, y).unwrap();
                ensure!(op(&op(&a, &b), &c) == op(&a, &op(&b, &c)), "associativity fails at d1={d1}, K={k}");
                ensure!(op(&a, &b) == op(&b, &a), "commutativity fails at d1={d1}, K={k}");
                ensure!(op(&a, &id) == a && op(&id, &a) == a, "identity fails at d1={d1}, K={k}");
                ensure!(op(&a, &a.inverse()) == id, "inverse fails at d1={d1}, K={k}");
                checked += 1;
            }
            if d1 > 0 {
                let mut half = id.clone();
                half.v0[0] = GaussianRational::ratio(1, 2);
                ensure!(outequiv_compose(&model, &half, &half).unwrap() == id, "2-torsion fails at d1={d1}, K={k}");
            }
        }
    }
    Ok(format!("line-bundle shifts and swap witness decided exactly, OutEquiv axioms on {checked} triples"))
}

fn criterion_8() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut bytes = 0;
    for f in &files {
        let first = run_path(f, RunOptions { timings: false, jobs: 1 }).map_err(|e| e.to_string())?.to_json();
        let second = run_path(f, RunOptions { timings: false, jobs: 2 }).map_err(|e| e.to_string())?.to_json();
        ensure!(first == second, "{} differs between runs", f.display());
        bytes += first.len();
    }
    Ok(format!("{} scenario files, {bytes} report bytes identical across two runs", files.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 star-product axioms", criterion_1),
        ("2 projection deformation", criterion_2),
        ("3 bimodule and metric laws", criterion_3),
        ("4 uniqueness up to equivalence", criterion_4),
        ("5 trace and index", criterion_5),
        ("6 cocycle suite", criterion_6),
        ("7 Morita criterion and OutEquiv", criterion_7),
        ("8 deterministic reports", criterion_8),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| name.contains(x.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} [{secs:.1}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
