//! Truncated power series `Σ_{r=0}^{K} λ^r a_r` over a coefficient algebra.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::scalar::GaussianRational;

/// A formal series understood modulo `λ^{K+1}`; `coeffs.len() == K + 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct FormalSeries {
    coeffs: Vec<Element>,
}

impl fmt::Debug for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(r, c)| format!("λ^{r}[{c:?}]"))
            .collect();
        if parts.is_empty() {
            write!(f, "0 mod λ^{}", self.coeffs.len())
        } else {
            write!(f, "{} mod λ^{}", parts.join(" + "), self.coeffs.len())
        }
    }
}

impl FormalSeries {
    pub fn zero(algebra: &Arc<Algebra>, order: usize) -> Self {
        FormalSeries { coeffs: vec![Element::zero(algebra); order + 1] }
    }

    pub fn one(algebra: &Arc<Algebra>, order: usize) -> Self {
        FormalSeries::constant(Element::one(algebra), order)
    }

    /// The λ-independent series `e + 0λ + …`.
    pub fn constant(e: Element, order: usize) -> Self {
        let mut s = FormalSeries::zero(e.algebra(), order);
        s.coeffs[0] = e;
        s
    }

    /// `λ^r · e`, truncated.
    pub fn lambda_power(e: Element, r: usize, order: usize) -> Self {
        let mut s = FormalSeries::zero(e.algebra(), order);
        if r <= order {
            s.coeffs[r] = e;
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<Element>) -> Result<Self> {
        let first = coeffs.first().ok_or_else(|| Error::Precondition("series needs at least one coefficient".into()))?;
        for c in &coeffs[1..] {
            first.check_same(c)?;
        }
        Ok(FormalSeries { coeffs })
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.coeffs[0].algebra()
    }

    pub fn coeff(&self, r: usize) -> &Element {
        &self.coeffs[r]
    }

    pub fn coeffs(&self) -> &[Element] {
        &self.coeffs
    }

    pub fn coeff_mut(&mut self, r: usize) -> &mut Element {
        &mut self.coeffs[r]
    }

    /// Order-0 part (the classical limit).
    pub fn classical(&self) -> &Element {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Element::is_zero)
    }

    pub fn is_classical(&self) -> bool {
        self.coeffs[1..].iter().all(Element::is_zero)
    }

    pub fn lowest_nonzero_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Lowest λ-order at which the two series differ.
    pub fn first_difference(&self, other: &FormalSeries) -> Option<usize> {
        self.coeffs.iter().zip(other.coeffs.iter()).position(|(a, b)| a != b)
    }

    pub fn check_compatible(&self, other: &FormalSeries) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::TruncationMismatch { left: self.order(), right: other.order() });
        }
        self.coeffs[0].check_same(&other.coeffs[0])
    }

    pub fn scale(&self, c: &GaussianRational) -> FormalSeries {
        FormalSeries { coeffs: self.coeffs.iter().map(|e| e.scale(c)).collect() }
    }

    pub fn conj(&self) -> FormalSeries {
        FormalSeries { coeffs: self.coeffs.iter().map(Element::conj).collect() }
    }

    /// Applies a λ-independent linear map to every coefficient.
    pub fn map(&self, f: impl Fn(&Element) -> Element) -> FormalSeries {
        FormalSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&Element) -> Result<Element>) -> Result<FormalSeries> {
        Ok(FormalSeries { coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()? })
    }

    /// Undeformed Cauchy product (pointwise multiplication order by order).
    pub fn pointwise_mul(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.check_compatible(other)?;
        let k = self.order();
        let mut out = FormalSeries::zero(self.algebra(), k);
        for (a, fa) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (b, gb) in other.coeffs[..=k - a].iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                out.coeffs[a + b] = &out.coeffs[a + b] + &(fa * gb);
            }
        }
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &FormalSeries) {
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            if !b.is_zero() {
                *a = &*a + b;
            }
        }
    }
}

impl Add for &FormalSeries {
    type Output = FormalSeries;
    fn add(self, rhs: &FormalSeries) -> FormalSeries {
        self.check_compatible(rhs).expect("series addition");
        FormalSeries { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &FormalSeries {
    type Output = FormalSeries;
    fn sub(self, rhs: &FormalSeries) -> FormalSeries {
        self.check_compatible(rhs).expect("series subtraction");
        FormalSeries { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &FormalSeries {
    type Output = FormalSeries;
    fn neg(self) -> FormalSeries {
        FormalSeries { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

/// A λ-series of scalars, e.g. the value of a trace or an index.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScalarSeries(pub Vec<GaussianRational>);

impl ScalarSeries {
    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn coeff(&self, r: usize) -> &GaussianRational {
        &self.0[r]
    }

    /// Lowest order at which the two series differ.
    pub fn first_difference(&self, other: &ScalarSeries) -> Option<usize> {
        if self.0.len() != other.0.len() {
            return Some(0);
        }
        self.0.iter().zip(&other.0).position(|(a, b)| a != b)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(ToString::to_string).collect()
    }
}

impl Add for &ScalarSeries {
    type Output = ScalarSeries;
    fn add(self, rhs: &ScalarSeries) -> ScalarSeries {
        ScalarSeries(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}
