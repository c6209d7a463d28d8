//! The normalized trace `∫` on the torus (`∫1 = 1`) and the index `∫tr(P)`.

use std::sync::Arc;

use crate::bundle::{DeformedProjection, IdentityCheck};
use crate::error::Result;
use crate::matrix::StarMatrix;
use crate::sample::Sampler;
use crate::series::{FormalSeries, ScalarSeries};
use crate::star::StarProduct;

pub const NORMALIZATION: &str = "integral of 1 is 1";

/// `∫` applied order by order; unsupported on the plane.
pub fn trace_functional(f: &FormalSeries) -> Result<ScalarSeries> {
    Ok(ScalarSeries(f.coeffs().iter().map(|c| c.integrate()).collect::<Result<_>>()?))
}

/// `∫tr(A)`.
pub fn matrix_trace_integral(a: &StarMatrix) -> Result<ScalarSeries> {
    trace_functional(&a.trace()?)
}

/// `∫tr(P)`.
pub fn index(d: &DeformedProjection) -> Result<ScalarSeries> {
    matrix_trace_integral(d.matrix())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceReport {
    pub index: ScalarSeries,
    pub conjugated: ScalarSeries,
    pub first_difference: Option<usize>,
}

impl InvarianceReport {
    pub fn equal(&self) -> bool {
        self.first_difference.is_none()
    }
}

/// Compares `ind(P)` with `ind(U⋆P⋆U⁻¹)`.
pub fn index_invariance_check(d: &DeformedProjection, u: &StarMatrix) -> Result<InvarianceReport> {
    let index = index(d)?;
    let conjugated = self::index(&d.conjugate(u)?)?;
    let first_difference = index.first_difference(&conjugated);
    Ok(InvarianceReport { index, conjugated, first_difference })
}

/// `∫tr(A⋆B) = ∫tr(B⋆A)` on `samples` random `n×n` pairs.
pub fn cyclicity_check(star: &Arc<StarProduct>, n: usize, samples: usize, seed: u64) -> Result<IdentityCheck> {
    let mut check = IdentityCheck::new("trace-cyclicity");
    let mut sampler = Sampler::new(seed);
    let draw = |sampler: &mut Sampler| {
        let entries = (0..n * n).map(|_| sampler.series(star.algebra(), star.order())).collect();
        StarMatrix::new(star, n, n, entries)
    };
    for _ in 0..samples {
        let a = draw(&mut sampler)?;
        let b = draw(&mut sampler)?;
        let ab = matrix_trace_integral(&a.mul(&b)?)?;
        let ba = matrix_trace_integral(&b.mul(&a)?)?;
        check.record(ab.first_difference(&ba));
    }
    Ok(check)
}
