//! Deformed projections and the bimodule they define: the right module
//! `P⋆𝒜^N`, the corner algebra `P⋆M_N(𝒜)⋆P` acting from the left, the
//! induced Hermitian metric, and equivalences between deformations.

use std::sync::Arc;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::matrix::{ClassicalMatrix, StarMatrix};
use crate::sample::Sampler;
use crate::scalar::GaussianRational;
use crate::series::FormalSeries;
use crate::star::StarProduct;

/// Idempotent over the undeformed algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalProjection {
    matrix: ClassicalMatrix,
    hermitian: bool,
}

impl ClassicalProjection {
    /// Checks `P₀·P₀ = P₀`, and `P₀* = P₀` when `hermitian` is set.
    pub fn new(matrix: ClassicalMatrix, hermitian: bool) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("projection must be square".into()));
        }
        if matrix.mul(&matrix)? != matrix {
            return Err(Error::Precondition("matrix is not classically idempotent".into()));
        }
        if hermitian && matrix.adjoint() != matrix {
            return Err(Error::Precondition("projection flagged hermitian but P* != P".into()));
        }
        Ok(ClassicalProjection { matrix, hermitian })
    }

    /// Like [`ClassicalProjection::new`], with the flag set iff `P₀* = P₀`.
    pub fn detect(matrix: ClassicalMatrix) -> Result<Self> {
        let hermitian = matrix.is_square() && matrix.adjoint() == matrix;
        ClassicalProjection::new(matrix, hermitian)
    }

    pub fn matrix(&self) -> &ClassicalMatrix {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn direct_sum(&self, other: &ClassicalProjection) -> Result<ClassicalProjection> {
        Ok(ClassicalProjection {
            matrix: self.matrix.direct_sum(&other.matrix)?,
            hermitian: self.hermitian && other.hermitian,
        })
    }
}

/// `P` with `P⋆P = P` and classical limit `P₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformedProjection {
    p: StarMatrix,
    classical: ClassicalProjection,
}

/// `P = 1/2 + (P₀ − 1/2) ⋆ (1 + 4(P₀⋆P₀ − P₀))^{−1/2}`.
pub fn deform_projection(p0: &ClassicalProjection, star: &Arc<StarProduct>) -> Result<DeformedProjection> {
    let n = p0.size();
    let base = StarMatrix::from_classical(&p0.matrix, star)?;
    let id = StarMatrix::identity(star, n);
    let delta = base.mul(&base)?.sub(&base)?.scale(&GaussianRational::from_ints(4, 0));
    let root = id.add(&delta)?.inv_sqrt()?;
    let half = id.scale(&GaussianRational::ratio(1, 2));
    let p = half.add(&base.sub(&half)?.mul(&root)?)?;
    Ok(DeformedProjection { p, classical: p0.clone() })
}

/// Column vector with `P⋆φ = φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleElement {
    column: StarMatrix,
}

impl ModuleElement {
    pub fn column(&self) -> &StarMatrix {
        &self.column
    }

    pub fn entry(&self, i: usize) -> &FormalSeries {
        self.column.get(i, 0)
    }

    /// Lowest order at which two module elements differ.
    pub fn first_difference(&self, other: &ModuleElement) -> Option<usize> {
        self.column.first_difference(&other.column)
    }
}

/// Element `A` of the corner algebra, `P⋆A⋆P = A`.
#[derive(Clone, Debug, PartialEq)]
pub struct CornerElement {
    matrix: StarMatrix,
}

impl CornerElement {
    pub fn matrix(&self) -> &StarMatrix {
        &self.matrix
    }
}

impl DeformedProjection {
    /// Wraps an explicitly given deformation after checking `P⋆P = P` and `cl(P) = P₀`.
    pub fn from_parts(p: StarMatrix, classical: ClassicalProjection) -> Result<Self> {
        if p.classical_limit() != classical.matrix {
            return Err(Error::Precondition("classical limit of P differs from P0".into()));
        }
        if let Some(r) = p.mul(&p)?.first_difference(&p) {
            return Err(Error::Precondition(format!("P*P != P at order {r}")));
        }
        Ok(DeformedProjection { p, classical })
    }

    pub fn matrix(&self) -> &StarMatrix {
        &self.p
    }

    pub fn classical(&self) -> &ClassicalProjection {
        &self.classical
    }

    pub fn star(&self) -> &Arc<StarProduct> {
        self.p.star()
    }

    pub fn size(&self) -> usize {
        self.p.rows()
    }

    /// Lowest order at which `P⋆P − P` is nonzero.
    pub fn idempotency_defect(&self) -> Result<Option<usize>> {
        Ok(self.p.mul(&self.p)?.first_difference(&self.p))
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.p.adjoint() == self.p
    }

    /// `U⋆P⋆U⁻¹`, a deformation of `U₀P₀U₀⁻¹`.
    pub fn conjugate(&self, u: &StarMatrix) -> Result<DeformedProjection> {
        let u_inv = u.star_inverse(None)?;
        let p = u.mul(&self.p)?.mul(&u_inv)?;
        let classical = ClassicalProjection::detect(p.classical_limit())?;
        Ok(DeformedProjection { p, classical })
    }

    pub fn direct_sum(&self, other: &DeformedProjection) -> Result<DeformedProjection> {
        Ok(DeformedProjection {
            p: self.p.direct_sum(&other.p)?,
            classical: self.classical.direct_sum(&other.classical)?,
        })
    }

    fn check_column(&self, column: &StarMatrix) -> Result<()> {
        if column.rows() != self.size() || column.cols() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "module element must be {}x1, got {}x{}",
                self.size(),
                column.rows(),
                column.cols()
            )));
        }
        Ok(())
    }

    /// Checks `P⋆φ = φ`.
    pub fn element(&self, column: StarMatrix) -> Result<ModuleElement> {
        self.check_column(&column)?;
        if let Some(r) = self.p.mul(&column)?.first_difference(&column) {
            return Err(Error::Membership(format!("P*phi != phi at order {r}")));
        }
        Ok(ModuleElement { column })
    }

    /// `P⋆v`, always a module element.
    pub fn project(&self, column: &StarMatrix) -> Result<ModuleElement> {
        self.check_column(column)?;
        Ok(ModuleElement { column: self.p.mul(column)? })
    }

    /// Checks `P⋆A⋆P = A`.
    pub fn corner(&self, a: StarMatrix) -> Result<CornerElement> {
        let sandwiched = self.p.mul(&a)?.mul(&self.p)?;
        if let Some(r) = sandwiched.first_difference(&a) {
            return Err(Error::Membership(format!("P*A*P != A at order {r}")));
        }
        Ok(CornerElement { matrix: a })
    }

    /// `P⋆M⋆P`, always a corner element.
    pub fn compress(&self, m: &StarMatrix) -> Result<CornerElement> {
        Ok(CornerElement { matrix: self.p.mul(m)?.mul(&self.p)? })
    }

    /// `P` as the unit of the corner algebra.
    pub fn corner_unit(&self) -> CornerElement {
        CornerElement { matrix: self.p.clone() }
    }

    /// `φ • f`, componentwise `φ_i ⋆ f`.
    pub fn right_act(&self, phi: &ModuleElement, f: &FormalSeries) -> Result<ModuleElement> {
        let star = self.star();
        let entries = phi.column.entries().iter().map(|e| star.multiply(e, f)).collect::<Result<Vec<_>>>()?;
        Ok(ModuleElement { column: StarMatrix::new(star, self.size(), 1, entries)? })
    }

    /// `A ⋆′ B` in the corner algebra.
    pub fn endo_product(&self, a: &CornerElement, b: &CornerElement) -> Result<CornerElement> {
        Ok(CornerElement { matrix: a.matrix.mul(&b.matrix)? })
    }

    /// `A •′ φ`.
    pub fn left_act(&self, a: &CornerElement, phi: &ModuleElement) -> Result<ModuleElement> {
        Ok(ModuleElement { column: a.matrix.mul(&phi.column)? })
    }

    /// `A*`, again in the corner when `P* = P`.
    pub fn corner_adjoint(&self, a: &CornerElement) -> Result<CornerElement> {
        if !self.is_self_adjoint() {
            return Err(Error::Unsupported("adjoint in the corner needs P* = P".into()));
        }
        Ok(CornerElement { matrix: a.matrix.adjoint() })
    }

    /// `h(φ, ψ) = Σ_i conj(φ_i) ⋆ ψ_i`.
    pub fn hermitian_metric(&self, phi: &ModuleElement, psi: &ModuleElement) -> Result<FormalSeries> {
        if !self.is_self_adjoint() {
            return Err(Error::Unsupported("hermitian metric needs a self-adjoint projection".into()));
        }
        let star = self.star();
        let mut acc = FormalSeries::zero(star.algebra(), star.order());
        for i in 0..self.size() {
            acc.add_assign(&star.multiply(&phi.entry(i).conj(), psi.entry(i))?);
        }
        Ok(acc)
    }

    /// Sample module element `P⋆v` for a sparse random column `v`.
    pub fn sample_element(&self, sampler: &mut Sampler) -> Result<ModuleElement> {
        let star = self.star();
        let entries = (0..self.size()).map(|_| sampler.sparse_series(star.algebra(), star.order())).collect();
        self.project(&StarMatrix::new(star, self.size(), 1, entries)?)
    }

    /// Sample corner element `P⋆M⋆P` for a sparse random matrix `M`.
    pub fn sample_corner(&self, sampler: &mut Sampler) -> Result<CornerElement> {
        let star = self.star();
        let n = self.size();
        let entries = (0..n * n).map(|_| sampler.sparse_series(star.algebra(), star.order())).collect();
        self.compress(&StarMatrix::new(star, n, n, entries)?)
    }
}

/// `V = P′⋆P + (I−P′)⋆(I−P)` intertwining two deformations of the same `P₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleEquivalence {
    pub v: StarMatrix,
    pub v_inverse: StarMatrix,
}

impl ModuleEquivalence {
    /// `T(φ) = V⋆φ`, landing in the target module.
    pub fn apply(&self, target: &DeformedProjection, phi: &ModuleElement) -> Result<ModuleElement> {
        target.element(self.v.mul(&phi.column)?)
    }
}

pub fn module_equivalence(d: &DeformedProjection, d_prime: &DeformedProjection) -> Result<ModuleEquivalence> {
    if !StarProduct::same(d.star(), d_prime.star()) {
        return Err(Error::DescriptorMismatch("deformations use different star products".into()));
    }
    if d.size() != d_prime.size() {
        return Err(Error::DimensionMismatch(format!("sizes {} and {}", d.size(), d_prime.size())));
    }
    if d.classical.matrix != d_prime.classical.matrix {
        return Err(Error::NoEquivalence("classical projections differ".into()));
    }
    let id = StarMatrix::identity(d.star(), d.size());
    let (p, q) = (&d.p, &d_prime.p);
    let v = q.mul(p)?.add(&id.sub(q)?.mul(&id.sub(p)?)?)?;
    let v_inverse = v.star_inverse(Some(&ClassicalMatrix::identity(d.star().algebra(), d.size())))?;
    Ok(ModuleEquivalence { v, v_inverse })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullnessReport {
    pub full: bool,
    pub rank: u64,
}

/// Full iff `tr P₀` is a constant positive integer (the rank).
pub fn check_fullness(p0: &ClassicalProjection) -> Result<FullnessReport> {
    let tr = p0.matrix.trace()?;
    let rank = tr
        .as_constant()
        .and_then(|c| c.as_integer())
        .filter(|r| !r.is_negative())
        .ok_or_else(|| Error::Indeterminate(format!("trace {tr:?} is not a constant non-negative integer")))?;
    let rank = u64::try_from(rank).unwrap_or(u64::MAX);
    Ok(FullnessReport { full: rank > 0, rank })
}

/// Outcome of checking one identity on sampled data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    pub pass: bool,
    pub first_failing_order: Option<usize>,
}

impl IdentityCheck {
    pub fn new(name: impl Into<String>) -> Self {
        IdentityCheck { name: name.into(), pass: true, first_failing_order: None }
    }

    pub fn record(&mut self, failing: Option<usize>) {
        if let Some(order) = failing {
            self.pass = false;
            self.first_failing_order = Some(self.first_failing_order.map_or(order, |o| o.min(order)));
        }
    }
}

pub fn all_pass(checks: &[IdentityCheck]) -> bool {
    checks.iter().all(|c| c.pass)
}

pub const BIMODULE_LAWS: [&str; 5] =
    ["right-associativity", "right-unit", "left-associativity", "left-unit", "bimodule-compatibility"];

pub const METRIC_LAWS: [&str; 3] = ["right-linearity", "conjugate-symmetry", "adjointness"];

/// The five bimodule laws on `samples` random tuples `(φ, f, g, A, B)`.
pub fn bimodule_suite(d: &DeformedProjection, samples: usize, seed: u64) -> Result<Vec<IdentityCheck>> {
    let mut checks: Vec<IdentityCheck> = BIMODULE_LAWS.iter().map(|n| IdentityCheck::new(*n)).collect();
    let mut sampler = Sampler::new(seed);
    let star = d.star().clone();
    let one = FormalSeries::one(star.algebra(), star.order());
    let unit = d.corner_unit();
    for _ in 0..samples {
        let phi = d.sample_element(&mut sampler)?;
        let f = sampler.series(star.algebra(), star.order());
        let g = sampler.series(star.algebra(), star.order());
        let a = d.sample_corner(&mut sampler)?;
        let b = d.sample_corner(&mut sampler)?;

        let phi_f = d.right_act(&phi, &f)?;
        let lhs = d.right_act(&phi_f, &g)?;
        let rhs = d.right_act(&phi, &star.multiply(&f, &g)?)?;
        checks[0].record(lhs.first_difference(&rhs));

        checks[1].record(d.right_act(&phi, &one)?.first_difference(&phi));

        let lhs = d.left_act(&d.endo_product(&a, &b)?, &phi)?;
        let rhs = d.left_act(&a, &d.left_act(&b, &phi)?)?;
        checks[2].record(lhs.first_difference(&rhs));

        checks[3].record(d.left_act(&unit, &phi)?.first_difference(&phi));

        let lhs = d.left_act(&a, &phi_f)?;
        let rhs = d.right_act(&d.left_act(&a, &phi)?, &f)?;
        checks[4].record(lhs.first_difference(&rhs));
    }
    Ok(checks)
}

/// The three Hermitian-metric laws on `samples` random tuples `(φ, ψ, f, A)`.
pub fn metric_suite(d: &DeformedProjection, samples: usize, seed: u64) -> Result<Vec<IdentityCheck>> {
    if !d.is_self_adjoint() {
        return Err(Error::Unsupported("hermitian metric needs a self-adjoint projection".into()));
    }
    let mut checks: Vec<IdentityCheck> = METRIC_LAWS.iter().map(|n| IdentityCheck::new(*n)).collect();
    let mut sampler = Sampler::new(seed);
    let star = d.star().clone();
    for _ in 0..samples {
        let phi = d.sample_element(&mut sampler)?;
        let psi = d.sample_element(&mut sampler)?;
        let f = sampler.series(star.algebra(), star.order());
        let a = d.sample_corner(&mut sampler)?;

        let h = d.hermitian_metric(&phi, &psi)?;
        let lhs = d.hermitian_metric(&phi, &d.right_act(&psi, &f)?)?;
        checks[0].record(lhs.first_difference(&star.multiply(&h, &f)?));

        checks[1].record(h.first_difference(&d.hermitian_metric(&psi, &phi)?.conj()));

        let lhs = d.hermitian_metric(&d.left_act(&a, &phi)?, &psi)?;
        let rhs = d.hermitian_metric(&phi, &d.left_act(&d.corner_adjoint(&a)?, &psi)?)?;
        checks[2].record(lhs.first_difference(&rhs));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Algebra, Element};
    use crate::corpus;
    use crate::scalar::rational;

    fn star(theta: (i64, i64), k: usize) -> Arc<StarProduct> {
        StarProduct::moyal(&Algebra::torus(rational(theta.0, theta.1)), k)
    }

    #[test]
    fn constant_projection_is_a_fixed_point() {
        let s = star((1, 1), 4);
        let p0 = corpus::constant(s.algebra()).unwrap();
        let d = deform_projection(&p0, &s).unwrap();
        assert_eq!(d.matrix(), &StarMatrix::from_classical(p0.matrix(), &s).unwrap());
    }

    #[test]
    fn one_angle_projection_is_undeformed() {
        let s = star((1, 1), 4);
        let p0 = corpus::one_angle(s.algebra(), 0).unwrap();
        let base = StarMatrix::from_classical(p0.matrix(), &s).unwrap();
        assert_eq!(base.mul(&base).unwrap(), base, "delta vanishes");
        assert_eq!(deform_projection(&p0, &s).unwrap().matrix(), &base);
    }

    #[test]
    fn two_angle_projection_gets_a_first_order_correction() {
        let s = star((1, 1), 4);
        let p0 = corpus::two_angle(s.algebra()).unwrap();
        let d = deform_projection(&p0, &s).unwrap();
        assert_eq!(d.idempotency_defect().unwrap(), None);
        assert_eq!(d.matrix().classical_limit(), *p0.matrix());
        assert!(!d.matrix().order_part(1).is_zero());
        assert!(d.is_self_adjoint());
        let id = StarMatrix::identity(&s, 3);
        let base = StarMatrix::from_classical(p0.matrix(), &s).unwrap();
        let a = id.add(&base.mul(&base).unwrap().sub(&base).unwrap().scale(&GaussianRational::from_ints(4, 0))).unwrap();
        let root = a.inv_sqrt().unwrap();
        assert_eq!(root.mul(&root).unwrap().mul(&a).unwrap(), id);
    }

    #[test]
    fn theta_zero_leaves_the_corpus_alone() {
        let s = star((0, 1), 3);
        for (name, p0) in corpus::all(s.algebra()).unwrap() {
            let d = deform_projection(&p0, &s).unwrap();
            assert_eq!(d.matrix(), &StarMatrix::from_classical(p0.matrix(), &s).unwrap(), "{name}");
        }
    }

    #[test]
    fn non_idempotent_input_is_rejected() {
        let t = Algebra::torus(rational(1, 1));
        let m = ClassicalMatrix::identity(&t, 2).scale(&GaussianRational::from_ints(2, 0));
        assert!(matches!(ClassicalProjection::new(m, true), Err(Error::Precondition(_))));
    }

    #[test]
    fn module_laws_on_two_angle() {
        let s = star((1, 1), 2);
        let d = deform_projection(&corpus::two_angle(s.algebra()).unwrap(), &s).unwrap();
        assert!(all_pass(&bimodule_suite(&d, 3, 5).unwrap()));
        assert!(all_pass(&metric_suite(&d, 3, 6).unwrap()));
    }

    #[test]
    fn metric_of_constant_columns() {
        let s = star((1, 1), 3);
        let d = deform_projection(&corpus::constant(s.algebra()).unwrap(), &s).unwrap();
        let phi = d.element(d.matrix().column(0)).unwrap();
        assert_eq!(d.hermitian_metric(&phi, &phi).unwrap(), FormalSeries::one(s.algebra(), 3));
        let skew = deform_projection(&corpus::skew(s.algebra()).unwrap(), &s).unwrap();
        let psi = skew.element(skew.matrix().column(0)).unwrap();
        assert!(matches!(skew.hermitian_metric(&psi, &psi), Err(Error::Unsupported(_))));
        assert!(all_pass(&bimodule_suite(&skew, 2, 1).unwrap()));
    }

    #[test]
    fn membership_is_enforced() {
        let s = star((1, 1), 2);
        let d = deform_projection(&corpus::constant(s.algebra()).unwrap(), &s).unwrap();
        let e2 = d.matrix().column(1);
        let id = StarMatrix::identity(&s, 2);
        assert!(matches!(d.element(id.column(1)), Err(Error::Membership(_))));
        assert!(d.element(e2).is_ok());
        assert!(matches!(d.corner(id), Err(Error::Membership(_))));
    }

    #[test]
    fn equivalence_with_a_conjugate() {
        let s = star((1, 1), 3);
        let alg = s.algebra().clone();
        let d = deform_projection(&corpus::two_angle(&alg).unwrap(), &s).unwrap();
        let mut u = StarMatrix::identity(&s, 3);
        let mut lambda_e12 = StarMatrix::zeros(&s, 3, 3);
        lambda_e12 = {
            let mut entries = lambda_e12.entries().to_vec();
            entries[1] = FormalSeries::lambda_power(Element::one(&alg), 1, 3);
            StarMatrix::new(&s, 3, 3, entries).unwrap()
        };
        u = u.add(&lambda_e12).unwrap();
        let d2 = d.conjugate(&u).unwrap();
        assert_eq!(d2.idempotency_defect().unwrap(), None);
        let eq = module_equivalence(&d, &d2).unwrap();
        assert_eq!(eq.v.mul(d.matrix()).unwrap(), d2.matrix().mul(&eq.v).unwrap());
        assert_eq!(eq.v.classical_limit(), ClassicalMatrix::identity(&alg, 3));
        assert_eq!(eq.v.mul(&eq.v_inverse).unwrap(), StarMatrix::identity(&s, 3));
        let mut sampler = Sampler::new(2);
        let phi = d.sample_element(&mut sampler).unwrap();
        let f = sampler.series(&alg, 3);
        let lhs = eq.apply(&d2, &d.right_act(&phi, &f).unwrap()).unwrap();
        let rhs = d2.right_act(&eq.apply(&d2, &phi).unwrap(), &f).unwrap();
        assert_eq!(lhs, rhs);
        let same = module_equivalence(&d, &d).unwrap();
        assert_eq!(same.apply(&d, &phi).unwrap(), phi);
    }

    #[test]
    fn different_classical_limits_are_not_equivalent() {
        let s = star((1, 1), 2);
        let a = deform_projection(&corpus::constant(s.algebra()).unwrap(), &s).unwrap();
        let b = deform_projection(&corpus::one_angle(s.algebra(), 0).unwrap(), &s).unwrap();
        assert!(matches!(module_equivalence(&a, &b), Err(Error::NoEquivalence(_))));
    }

    #[test]
    fn fullness() {
        let t = Algebra::torus(rational(1, 1));
        assert_eq!(check_fullness(&corpus::constant(&t).unwrap()).unwrap(), FullnessReport { full: true, rank: 1 });
        assert_eq!(check_fullness(&corpus::two_angle(&t).unwrap()).unwrap(), FullnessReport { full: true, rank: 1 });
        assert_eq!(check_fullness(&corpus::block(&t).unwrap()).unwrap(), FullnessReport { full: true, rank: 2 });
        let zero = ClassicalProjection::new(ClassicalMatrix::zeros(&t, 2, 2), true).unwrap();
        assert_eq!(check_fullness(&zero).unwrap(), FullnessReport { full: false, rank: 0 });
    }
}
