//! JSON encodings of the engine's objects.
//!
//! Scalars are strings such as `"3/2"` or `"-1/4 i"`; elements are term lists
//! `[{"mode":[m1,m2],"coeff":..}]` on the torus and `[{"exp":[..],"coeff":..}]`
//! on the plane. Each DTO converts to and from its engine type.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, AlgebraKind, Element};
use crate::bundle::{ClassicalProjection, IdentityCheck};
use crate::cocycle::{CocycleData, CocycleReport};
use crate::error::{Error, Result};
use crate::matrix::{ClassicalMatrix, StarMatrix};
use crate::picard::{
    CharacteristicClass, CohomologyModel, KernelDescription, LatticeAction, MoritaReport, MoritaWitness,
    OutEquivElement,
};
use crate::scalar::{rational_serde, GaussianRational};
use crate::series::{FormalSeries, ScalarSeries};
use crate::star::{AxiomCheck, StarAxiomReport, StarProduct};
use crate::transform::{DifferentialOperator, EquivalenceTransform};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AlgebraDto {
    Torus {
        #[serde(with = "rational_serde")]
        theta: BigRational,
    },
    Plane {
        dim: usize,
        /// Canonical tensor when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        poisson: Option<Vec<Vec<GaussianRational>>>,
    },
}

impl AlgebraDto {
    pub fn from_core(alg: &Algebra) -> Self {
        match alg.kind() {
            AlgebraKind::Torus => AlgebraDto::Torus { theta: alg.theta().expect("torus").clone() },
            AlgebraKind::Plane => AlgebraDto::Plane {
                dim: alg.dim(),
                poisson: Some(
                    alg.poisson_matrix()
                        .into_iter()
                        .map(|row| row.into_iter().map(GaussianRational::real).collect())
                        .collect(),
                ),
            },
        }
    }

    pub fn to_core(&self) -> Result<Arc<Algebra>> {
        match self {
            AlgebraDto::Torus { theta } => Ok(Algebra::torus(theta.clone())),
            AlgebraDto::Plane { dim, poisson } => {
                if *dim == 0 || dim % 2 != 0 {
                    return Err(Error::InvalidDescriptor(format!("dim must be even, got {dim}")));
                }
                match poisson {
                    None => Ok(Algebra::canonical_plane(dim / 2)),
                    Some(rows) => {
                        if rows.len() != *dim {
                            return Err(Error::InvalidDescriptor(format!(
                                "poisson matrix has {} rows for dim {dim}",
                                rows.len()
                            )));
                        }
                        let real = rows
                            .iter()
                            .map(|row| {
                                row.iter()
                                    .map(|c| {
                                        if c.is_real() {
                                            Ok(c.re())
                                        } else {
                                            Err(Error::InvalidDescriptor("poisson entries must be real".into()))
                                        }
                                    })
                                    .collect::<Result<Vec<_>>>()
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Algebra::plane(real)
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp: Option<Vec<i64>>,
    pub coeff: GaussianRational,
}

pub type ElementDto = Vec<TermDto>;

pub fn element_to_wire(e: &Element) -> ElementDto {
    let torus = e.algebra().kind() == AlgebraKind::Torus;
    e.terms()
        .map(|(k, c)| {
            let key = Some(k.to_vec());
            let (mode, exp) = if torus { (key, None) } else { (None, key) };
            TermDto { mode, exp, coeff: c.clone() }
        })
        .collect()
}

pub fn element_from_wire(alg: &Arc<Algebra>, terms: &[TermDto]) -> Result<Element> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let key = match (alg.kind(), &t.mode, &t.exp) {
            (AlgebraKind::Torus, Some(m), None) => m,
            (AlgebraKind::Plane, None, Some(a)) => a,
            (AlgebraKind::Torus, _, _) => {
                return Err(Error::InvalidDescriptor("torus terms need exactly a \"mode\" field".into()))
            }
            (AlgebraKind::Plane, _, _) => {
                return Err(Error::InvalidDescriptor("plane terms need exactly an \"exp\" field".into()))
            }
        };
        out.push((key.clone(), t.coeff.clone()));
    }
    Element::from_terms(alg, out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDto {
    #[serde(rename = "K")]
    pub k: usize,
    pub coeffs: Vec<ElementDto>,
}

impl SeriesDto {
    pub fn from_core(f: &FormalSeries) -> Self {
        SeriesDto { k: f.order(), coeffs: f.coeffs().iter().map(element_to_wire).collect() }
    }

    /// Missing trailing coefficients are zero.
    pub fn to_core(&self, alg: &Arc<Algebra>) -> Result<FormalSeries> {
        if self.coeffs.len() > self.k + 1 {
            return Err(Error::InvalidDescriptor(format!(
                "{} coefficients for K = {}",
                self.coeffs.len(),
                self.k
            )));
        }
        let mut coeffs = self.coeffs.iter().map(|c| element_from_wire(alg, c)).collect::<Result<Vec<_>>>()?;
        coeffs.resize(self.k + 1, Element::zero(alg));
        FormalSeries::from_coeffs(coeffs)
    }
}

pub fn scalar_series_to_wire(s: &ScalarSeries) -> Vec<String> {
    s.to_strings()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDto {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<SeriesDto>>,
}

impl MatrixDto {
    pub fn from_core(m: &StarMatrix) -> Self {
        let entries = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| SeriesDto::from_core(m.get(i, j))).collect())
            .collect();
        MatrixDto { rows: m.rows(), cols: m.cols(), entries }
    }

    pub fn to_core(&self, star: &Arc<StarProduct>) -> Result<StarMatrix> {
        check_shape(&self.entries, self.rows, self.cols)?;
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for s in self.entries.iter().flatten() {
            if s.k != star.order() {
                return Err(Error::TruncationMismatch { left: star.order(), right: s.k });
            }
            entries.push(s.to_core(star.algebra())?);
        }
        StarMatrix::new(star, self.rows, self.cols, entries)
    }
}

fn check_shape<T>(rows: &[Vec<T>], r: usize, c: usize) -> Result<()> {
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(Error::DimensionMismatch(format!("entries do not form a {r}×{c} array")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionMatrixDto {
    #[serde(rename = "N")]
    pub n: usize,
    pub entries: Vec<Vec<ElementDto>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionDto {
    pub projection: ProjectionMatrixDto,
    /// Detected from the matrix when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hermitian: Option<bool>,
}

impl ProjectionDto {
    pub fn from_core(p: &ClassicalProjection) -> Self {
        let m = p.matrix();
        let entries =
            (0..m.rows()).map(|i| (0..m.cols()).map(|j| element_to_wire(m.get(i, j))).collect()).collect();
        ProjectionDto { projection: ProjectionMatrixDto { n: m.rows(), entries }, hermitian: Some(p.is_hermitian()) }
    }

    pub fn to_core(&self, alg: &Arc<Algebra>) -> Result<ClassicalProjection> {
        let n = self.projection.n;
        check_shape(&self.projection.entries, n, n)?;
        let rows = self
            .projection
            .entries
            .iter()
            .map(|row| row.iter().map(|e| element_from_wire(alg, e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let m = if n == 0 { ClassicalMatrix::zeros(alg, 0, 0) } else { ClassicalMatrix::from_rows(rows)? };
        match self.hermitian {
            Some(h) => ClassicalProjection::new(m, h),
            None => ClassicalProjection::detect(m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapDto {
    pub pair: [String; 2],
    pub matrix: MatrixDto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleDto {
    pub charts: Vec<String>,
    pub overlaps: Vec<OverlapDto>,
    #[serde(default)]
    pub triples: Vec<[String; 3]>,
}

impl CocycleDto {
    pub fn from_core(c: &CocycleData) -> Self {
        CocycleDto {
            charts: c.charts().to_vec(),
            overlaps: c
                .overlaps()
                .map(|((a, b), m)| OverlapDto { pair: [a.clone(), b.clone()], matrix: MatrixDto::from_core(m) })
                .collect(),
            triples: c.triples().iter().map(|(a, b, t)| [a.clone(), b.clone(), t.clone()]).collect(),
        }
    }

    pub fn to_core(&self, star: &Arc<StarProduct>) -> Result<CocycleData> {
        let overlaps = self
            .overlaps
            .iter()
            .map(|o| Ok(((o.pair[0].clone(), o.pair[1].clone()), o.matrix.to_core(star)?)))
            .collect::<Result<Vec<_>>>()?;
        let triples = self.triples.iter().map(|[a, b, c]| (a.clone(), b.clone(), c.clone())).collect();
        CocycleData::new(self.charts.clone(), overlaps, triples)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorTermDto {
    pub coeff: ElementDto,
    pub alpha: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDto {
    pub order: usize,
    pub terms: Vec<OperatorTermDto>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformDto {
    pub ops: Vec<OperatorDto>,
}

impl TransformDto {
    pub fn from_core(t: &EquivalenceTransform) -> Self {
        let ops = t
            .ops()
            .iter()
            .enumerate()
            .filter(|(_, op)| !op.is_zero())
            .map(|(i, op)| OperatorDto {
                order: i + 1,
                terms: op
                    .terms()
                    .map(|(alpha, c)| OperatorTermDto { coeff: element_to_wire(c), alpha: alpha.clone() })
                    .collect(),
            })
            .collect();
        TransformDto { ops }
    }

    pub fn to_core(&self, alg: &Arc<Algebra>, order: usize) -> Result<EquivalenceTransform> {
        let mut ops = vec![DifferentialOperator::zero(); order];
        for op in &self.ops {
            if op.order == 0 || op.order > order {
                return Err(Error::InvalidDescriptor(format!("operator order {} outside 1..={order}", op.order)));
            }
            let terms = op
                .terms
                .iter()
                .map(|t| Ok((element_from_wire(alg, &t.coeff)?, t.alpha.clone())))
                .collect::<Result<Vec<_>>>()?;
            ops[op.order - 1] = ops[op.order - 1].add(&DifferentialOperator::new(terms)?)?;
        }
        Ok(EquivalenceTransform::new(order, ops))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDto {
    pub name: String,
    #[serde(rename = "A1")]
    pub a1: Vec<Vec<i64>>,
    #[serde(rename = "A2")]
    pub a2: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDto {
    pub d1: usize,
    pub d2: usize,
    pub omega: Vec<GaussianRational>,
    #[serde(default)]
    pub actions: Vec<ActionDto>,
    #[serde(default = "default_true")]
    pub symplectic: bool,
}

fn default_true() -> bool {
    true
}

impl ModelDto {
    pub fn from_core(m: &CohomologyModel) -> Self {
        ModelDto {
            d1: m.d1(),
            d2: m.d2(),
            omega: m.omega().iter().cloned().map(GaussianRational::real).collect(),
            actions: m
                .actions()
                .iter()
                .map(|a| ActionDto { name: a.name.clone(), a1: a.a1.clone(), a2: a.a2.clone() })
                .collect(),
            symplectic: m.is_symplectic(),
        }
    }

    pub fn to_core(&self) -> Result<CohomologyModel> {
        let omega = self
            .omega
            .iter()
            .map(|w| {
                if w.is_real() {
                    Ok(w.re())
                } else {
                    Err(Error::InvalidDescriptor(format!("omega component {w} is not real")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let actions = self
            .actions
            .iter()
            .map(|a| LatticeAction { name: a.name.clone(), a1: a.a1.clone(), a2: a.a2.clone() })
            .collect();
        CohomologyModel::new(self.d1, self.d2, omega, actions, self.symplectic)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassDto {
    pub leading: Vec<GaussianRational>,
    pub orders: Vec<Vec<GaussianRational>>,
}

impl ClassDto {
    pub fn from_core(c: &CharacteristicClass) -> Self {
        ClassDto { leading: c.leading.clone(), orders: c.orders.clone() }
    }

    pub fn to_core(&self) -> Result<CharacteristicClass> {
        CharacteristicClass::new(self.leading.clone(), self.orders.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDto {
    pub action: String,
    pub class: Vec<i64>,
}

impl WitnessDto {
    pub fn from_core(w: &MoritaWitness) -> Result<Self> {
        let class = w
            .class
            .iter()
            .map(|d| d.to_i64().ok_or_else(|| Error::Unsupported(format!("witness component {d} exceeds i64"))))
            .collect::<Result<_>>()?;
        Ok(WitnessDto { action: w.action.clone(), class })
    }

    pub fn to_core(&self) -> MoritaWitness {
        MoritaWitness { action: self.action.clone(), class: self.class.iter().map(|&d| d.into()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoritaReportDto {
    pub equivalent: bool,
    pub witness: Option<WitnessDto>,
}

impl MoritaReportDto {
    pub fn from_core(r: &MoritaReport) -> Result<Self> {
        Ok(MoritaReportDto { equivalent: r.equivalent, witness: r.witness.as_ref().map(WitnessDto::from_core).transpose()? })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutEquivDto {
    pub v0: Vec<GaussianRational>,
    #[serde(default)]
    pub higher: Vec<Vec<GaussianRational>>,
}

impl OutEquivDto {
    pub fn from_core(e: &OutEquivElement) -> Self {
        OutEquivDto { v0: e.v0.clone(), higher: e.higher.clone() }
    }

    pub fn to_core(&self) -> Result<OutEquivElement> {
        if self.higher.iter().any(|h| h.len() != self.v0.len()) {
            return Err(Error::DimensionMismatch("higher components must match v0 in length".into()));
        }
        Ok(OutEquivElement { v0: self.v0.clone(), higher: self.higher.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelDto {
    pub d1: usize,
    #[serde(rename = "K")]
    pub order: usize,
    pub torus_dimension: usize,
    pub free_layers: Vec<usize>,
    pub generator_count: usize,
    pub torsion: String,
    pub trivial: bool,
}

impl KernelDto {
    pub fn from_core(k: &KernelDescription) -> Self {
        KernelDto {
            d1: k.d1,
            order: k.order,
            torus_dimension: k.torus_dimension,
            free_layers: k.free_layers.clone(),
            generator_count: k.generator_count,
            torsion: k.torsion.clone(),
            trivial: k.trivial,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckDto {
    pub name: String,
    pub pass: bool,
    pub first_failing_order: Option<usize>,
}

impl CheckDto {
    pub fn from_core(c: &IdentityCheck) -> Self {
        CheckDto { name: c.name.clone(), pass: c.pass, first_failing_order: c.first_failing_order }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheckDto {
    pub axiom: String,
    pub pass: bool,
    pub first_failing_order: Option<usize>,
    pub witness: Vec<ElementDto>,
}

impl AxiomCheckDto {
    pub fn from_core(c: &AxiomCheck) -> Self {
        AxiomCheckDto {
            axiom: c.axiom.name().to_string(),
            pass: c.pass,
            first_failing_order: c.first_failing_order,
            witness: c.witness.iter().map(element_to_wire).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarReportDto {
    pub convention: String,
    #[serde(rename = "K")]
    pub order: usize,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<AxiomCheckDto>,
}

impl StarReportDto {
    pub fn from_core(r: &StarAxiomReport) -> Self {
        StarReportDto {
            convention: r.convention.to_string(),
            order: r.order,
            samples: r.samples,
            seed: r.seed,
            checks: r.checks.iter().map(AxiomCheckDto::from_core).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleReportDto {
    pub pairs: Vec<CheckDto>,
    pub triples: Vec<CheckDto>,
    pub first_failing_order: Option<usize>,
}

impl CocycleReportDto {
    pub fn from_core(r: &CocycleReport) -> Self {
        CocycleReportDto {
            pairs: r.pairs.iter().map(CheckDto::from_core).collect(),
            triples: r.triples.iter().map(CheckDto::from_core).collect(),
            first_failing_order: r.first_failing_order(),
        }
    }
}

/// Sparse view of a matrix of series, keyed `"i,j"`, nonzero entries only.
pub fn sparse_matrix(m: &StarMatrix) -> BTreeMap<String, SeriesDto> {
    let mut out = BTreeMap::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let s = m.get(i, j);
            if !s.is_zero() {
                out.insert(format!("{i},{j}"), SeriesDto::from_core(s));
            }
        }
    }
    out
}
