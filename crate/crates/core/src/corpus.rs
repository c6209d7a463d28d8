//! Named classically idempotent matrices on the torus used by the checks
//! and the scenario runner.

use std::sync::Arc;

use crate::algebra::{Algebra, AlgebraKind, Element};
use crate::bundle::ClassicalProjection;
use crate::error::{Error, Result};
use crate::matrix::ClassicalMatrix;
use crate::scalar::{rational, GaussianRational};

pub const NAMES: [&str; 7] =
    ["constant", "one-angle", "two-angle", "block", "sum-one-angle-constant", "sum-two-angle-constant", "skew"];

fn require_torus(alg: &Arc<Algebra>) -> Result<()> {
    match alg.kind() {
        AlgebraKind::Torus => Ok(()),
        AlgebraKind::Plane => Err(Error::Unsupported("projection corpus lives on the torus".into())),
    }
}

fn mode(alg: &Arc<Algebra>, m: [i64; 2], c: GaussianRational) -> Element {
    Element::torus_mode(alg, m, c)
}

/// `cos q_j` for `j ∈ {0, 1}`.
pub fn cos(alg: &Arc<Algebra>, j: usize) -> Element {
    let mut m = [0, 0];
    m[j] = 1;
    let half = GaussianRational::ratio(1, 2);
    &mode(alg, m, half.clone()) + &mode(alg, [-m[0], -m[1]], half)
}

/// `sin q_j` for `j ∈ {0, 1}`.
pub fn sin(alg: &Arc<Algebra>, j: usize) -> Element {
    let mut m = [0, 0];
    m[j] = 1;
    let c = GaussianRational::new(rational(0, 1), rational(1, 2));
    &mode(alg, m, -&c) + &mode(alg, [-m[0], -m[1]], c)
}

fn outer(w: &[Element]) -> Result<ClassicalMatrix> {
    let rows = w.iter().map(|a| w.iter().map(|b| a * &b.conj()).collect()).collect();
    ClassicalMatrix::from_rows(rows)
}

/// `diag(1, 0)`.
pub fn constant(alg: &Arc<Algebra>) -> Result<ClassicalProjection> {
    ClassicalProjection::new(ClassicalMatrix::diagonal(vec![Element::one(alg), Element::zero(alg)])?, true)
}

/// `R(q_j)·diag(1,0)·R(q_j)ᵀ` for the rotation by the angle `q_j`.
pub fn one_angle(alg: &Arc<Algebra>, j: usize) -> Result<ClassicalProjection> {
    require_torus(alg)?;
    ClassicalProjection::new(outer(&[cos(alg, j), sin(alg, j)])?, true)
}

/// `V(q₂)R(q₁)·diag(1,0,0)·R(q₁)ᵀV(q₂)ᵀ`, with `R` rotating the (1,3)-plane
/// and `V` the (1,2)-plane: the rank-one projection onto the unit vector
/// `(cos q₁ cos q₂, cos q₁ sin q₂, sin q₁)`.
pub fn two_angle(alg: &Arc<Algebra>) -> Result<ClassicalProjection> {
    require_torus(alg)?;
    let (c1, s1, c2, s2) = (cos(alg, 0), sin(alg, 0), cos(alg, 1), sin(alg, 1));
    ClassicalProjection::new(outer(&[&c1 * &c2, &c1 * &s2, s1])?, true)
}

/// `diag(one_angle(q₁), one_angle(q₂))`, rank 2.
pub fn block(alg: &Arc<Algebra>) -> Result<ClassicalProjection> {
    one_angle(alg, 0)?.direct_sum(&one_angle(alg, 1)?)
}

/// The idempotent `u·vᵀ` with `u = (1, e₁₀)`, `v = (1 − e₁₁, e₀₁)`, so `vᵀu = 1`; not self-adjoint.
pub fn skew(alg: &Arc<Algebra>) -> Result<ClassicalProjection> {
    require_torus(alg)?;
    let one = GaussianRational::from_ints(1, 0);
    let u = [Element::one(alg), mode(alg, [1, 0], one.clone())];
    let v = [&Element::one(alg) - &mode(alg, [1, 1], one.clone()), mode(alg, [0, 1], one)];
    let rows = u.iter().map(|a| v.iter().map(|b| a * b).collect()).collect();
    ClassicalProjection::new(ClassicalMatrix::from_rows(rows)?, false)
}

pub fn by_name(alg: &Arc<Algebra>, name: &str) -> Result<ClassicalProjection> {
    match name {
        "constant" => constant(alg),
        "one-angle" => one_angle(alg, 0),
        "two-angle" => two_angle(alg),
        "block" => block(alg),
        "sum-one-angle-constant" => one_angle(alg, 0)?.direct_sum(&constant(alg)?),
        "sum-two-angle-constant" => two_angle(alg)?.direct_sum(&constant(alg)?),
        "skew" => skew(alg),
        other => Err(Error::InvalidDescriptor(format!("unknown corpus projection {other:?}"))),
    }
}

/// Every named projection, in [`NAMES`] order.
pub fn all(alg: &Arc<Algebra>) -> Result<Vec<(&'static str, ClassicalProjection)>> {
    NAMES.iter().map(|n| Ok((*n, by_name(alg, n)?))).collect()
}
