//! Differential operators with algebra coefficients and the formal
//! equivalence transformations `T = id + Σ_{r≥1} λ^r T_r` built from them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::scalar::GaussianRational;
use crate::series::FormalSeries;

/// `f ↦ Σ_α a_α ∂^α f`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DifferentialOperator {
    terms: BTreeMap<Vec<u32>, Element>,
}

impl DifferentialOperator {
    pub fn zero() -> Self {
        DifferentialOperator::default()
    }

    pub fn new(terms: impl IntoIterator<Item = (Element, Vec<u32>)>) -> Result<Self> {
        let mut op = DifferentialOperator::zero();
        for (coeff, alpha) in terms {
            if alpha.len() != coeff.algebra().dim() {
                return Err(Error::DimensionMismatch(format!(
                    "multi-index of length {} for dim {}",
                    alpha.len(),
                    coeff.algebra().dim()
                )));
            }
            op.add_term(alpha, coeff)?;
        }
        Ok(op)
    }

    fn add_term(&mut self, alpha: Vec<u32>, coeff: Element) -> Result<()> {
        if coeff.is_zero() {
            return Ok(());
        }
        if let Some((_, existing)) = self.terms.iter().next() {
            existing.check_same(&coeff)?;
        }
        let merged = match self.terms.remove(&alpha) {
            Some(prev) => &prev + &coeff,
            None => coeff,
        };
        if !merged.is_zero() {
            self.terms.insert(alpha, merged);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Element)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when there is no zeroth-order term, so constants are annihilated.
    pub fn kills_constants(&self) -> bool {
        self.terms.keys().all(|a| a.iter().any(|&n| n > 0))
    }

    pub fn apply(&self, f: &Element) -> Result<Element> {
        let mut out = Element::zero(f.algebra());
        for (alpha, coeff) in &self.terms {
            let d = f.derive_multi(alpha)?;
            if !d.is_zero() {
                out = &out + &coeff.try_mul(&d)?;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &DifferentialOperator) -> Result<DifferentialOperator> {
        let mut out = self.clone();
        for (alpha, c) in &other.terms {
            out.add_term(alpha.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> DifferentialOperator {
        let terms = self
            .terms
            .iter()
            .map(|(a, e)| (a.clone(), e.scale(c)))
            .filter(|(_, e)| !e.is_zero())
            .collect();
        DifferentialOperator { terms }
    }

    /// `self ∘ other`, expanded with the Leibniz rule:
    /// `a∂^α ∘ b∂^β = Σ_{γ≤α} C(α,γ) a (∂^γ b) ∂^{α−γ+β}`.
    pub fn compose(&self, other: &DifferentialOperator) -> Result<DifferentialOperator> {
        let mut out = DifferentialOperator::zero();
        for (alpha, a) in &self.terms {
            for (beta, b) in &other.terms {
                for gamma in sub_indices(alpha) {
                    let db = b.derive_multi(&gamma)?;
                    if db.is_zero() {
                        continue;
                    }
                    let weight: BigInt = alpha
                        .iter()
                        .zip(&gamma)
                        .map(|(&n, &k)| binomial(BigInt::from(n), BigInt::from(k)))
                        .product();
                    let coeff = a.try_mul(&db)?.scale(&GaussianRational::real(BigRational::from_integer(weight)));
                    let order: Vec<u32> =
                        alpha.iter().zip(&gamma).zip(beta).map(|((&n, &k), &m)| n - k + m).collect();
                    out.add_term(order, coeff)?;
                }
            }
        }
        Ok(out)
    }
}

fn sub_indices(alpha: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &n in alpha {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=n).map(move |k| {
                    let mut p = prefix.clone();
                    p.push(k);
                    p
                })
            })
            .collect();
    }
    out
}

/// `T = id + Σ_{r=1}^{K} λ^r T_r`; `ops[r - 1]` holds `T_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceTransform {
    order: usize,
    ops: Vec<DifferentialOperator>,
}

impl EquivalenceTransform {
    pub fn identity(order: usize) -> Self {
        EquivalenceTransform { order, ops: vec![DifferentialOperator::zero(); order] }
    }

    /// Operators for orders `1..=ops.len()`; missing higher orders are zero and
    /// operators beyond `K` are dropped.
    pub fn new(order: usize, mut ops: Vec<DifferentialOperator>) -> Self {
        ops.resize(order, DifferentialOperator::zero());
        EquivalenceTransform { order, ops }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `T_r` for `1 ≤ r ≤ K`.
    pub fn op(&self, r: usize) -> &DifferentialOperator {
        &self.ops[r - 1]
    }

    pub fn ops(&self) -> &[DifferentialOperator] {
        &self.ops
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(DifferentialOperator::is_zero)
    }

    /// `(Tf)_r = f_r + Σ_{s=1}^{r} T_s(f_{r−s})`.
    pub fn apply(&self, f: &FormalSeries) -> Result<FormalSeries> {
        if f.order() != self.order {
            return Err(Error::TruncationMismatch { left: self.order, right: f.order() });
        }
        let mut out = f.clone();
        for r in 1..=self.order {
            for s in 1..=r {
                let op = &self.ops[s - 1];
                let src = f.coeff(r - s);
                if op.is_zero() || src.is_zero() {
                    continue;
                }
                let term = op.apply(src)?;
                *out.coeff_mut(r) = out.coeff(r) + &term;
            }
        }
        Ok(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &EquivalenceTransform) -> Result<EquivalenceTransform> {
        if self.order != other.order {
            return Err(Error::TruncationMismatch { left: self.order, right: other.order });
        }
        let mut ops = Vec::with_capacity(self.order);
        for r in 1..=self.order {
            let mut op = self.ops[r - 1].add(&other.ops[r - 1])?;
            for a in 1..r {
                let (left, right) = (&self.ops[a - 1], &other.ops[r - a - 1]);
                if !left.is_zero() && !right.is_zero() {
                    op = op.add(&left.compose(right)?)?;
                }
            }
            ops.push(op);
        }
        Ok(EquivalenceTransform { order: self.order, ops })
    }

    /// `T^{-1} = Σ_{k=0}^{K} (−D)^k` with `D = T − id`; the sum is finite because `D^k = O(λ^k)`.
    pub fn invert(&self) -> Result<EquivalenceTransform> {
        let minus_d = EquivalenceTransform {
            order: self.order,
            ops: self.ops.iter().map(|op| op.scale(&-GaussianRational::from_ints(1, 0))).collect(),
        };
        // power = (−D)^k as a pure λ-series of operators (no identity part)
        let mut power = minus_d.ops.clone();
        let mut sum = power.clone();
        for _ in 2..=self.order {
            let mut next = vec![DifferentialOperator::zero(); self.order];
            for (i, p) in power.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
                for (j, d) in minus_d.ops.iter().enumerate().filter(|(_, d)| !d.is_zero()) {
                    let r = (i + 1) + (j + 1);
                    if r <= self.order {
                        next[r - 1] = next[r - 1].add(&p.compose(d)?)?;
                    }
                }
            }
            for (s, n) in sum.iter_mut().zip(&next) {
                *s = s.add(n)?;
            }
            power = next;
        }
        Ok(EquivalenceTransform { order: self.order, ops: sum })
    }
}
