//! Seeded sampling of random algebra data for the property checkers.
//!
//! All randomness comes from xoshiro256** seeded through SplitMix64 (the
//! reference seeding of the xoshiro authors). Draws are reduced with a plain
//! `next_u64() % n` so that ports in other languages reproduce the same
//! samples from the same seed:
//!
//! * coefficient: index into `[0, 1, -1, i, -i, 1/2, -1/2]`
//! * element: `1 + below(3)` terms
//! * torus term: each mode coordinate is `below(7) - 3`
//! * plane term: total degree `below(4)`, each unit of degree assigned to coordinate `below(dim)`
//! * sparse element: one term, torus mode coordinates `below(3) - 1`, plane degree `below(2)`

use std::sync::Arc;

use num_traits::Zero;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::algebra::{Algebra, AlgebraKind, Element};
use crate::scalar::GaussianRational;
use crate::series::FormalSeries;

pub struct Sampler {
    rng: Xoshiro256StarStar,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: Xoshiro256StarStar::seed_from_u64(seed) }
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.rng.next_u64() % n
    }

    pub fn coefficient(&mut self) -> GaussianRational {
        match self.below(7) {
            0 => GaussianRational::zero(),
            1 => GaussianRational::from_ints(1, 0),
            2 => GaussianRational::from_ints(-1, 0),
            3 => GaussianRational::from_ints(0, 1),
            4 => GaussianRational::from_ints(0, -1),
            5 => GaussianRational::ratio(1, 2),
            _ => GaussianRational::ratio(-1, 2),
        }
    }

    fn key(&mut self, algebra: &Algebra, spread: u64) -> Vec<i64> {
        match algebra.kind() {
            AlgebraKind::Torus => (0..algebra.dim()).map(|_| self.below(2 * spread + 1) as i64 - spread as i64).collect(),
            AlgebraKind::Plane => {
                let mut exp = vec![0i64; algebra.dim()];
                let degree = self.below(spread + 1);
                for _ in 0..degree {
                    exp[self.below(algebra.dim() as u64) as usize] += 1;
                }
                exp
            }
        }
    }

    pub fn element(&mut self, algebra: &Arc<Algebra>) -> Element {
        let count = 1 + self.below(3);
        let terms: Vec<_> = (0..count)
            .map(|_| {
                let k = self.key(algebra, 3);
                (k, self.coefficient())
            })
            .collect();
        Element::from_terms(algebra, terms).expect("sampled keys are valid")
    }

    /// A single term with small modes or degree; keeps products of many factors cheap.
    pub fn sparse_element(&mut self, algebra: &Arc<Algebra>) -> Element {
        let k = self.key(algebra, 1);
        let c = self.coefficient();
        Element::from_terms(algebra, [(k, c)]).expect("sampled keys are valid")
    }

    /// A sparse element at order 0 plus, for `order > 0`, one at order `1 + below(order)`.
    pub fn sparse_series(&mut self, algebra: &Arc<Algebra>, order: usize) -> FormalSeries {
        let mut coeffs = vec![Element::zero(algebra); order + 1];
        coeffs[0] = self.sparse_element(algebra);
        if order > 0 {
            let r = 1 + self.below(order as u64) as usize;
            coeffs[r] = self.sparse_element(algebra);
        }
        FormalSeries::from_coeffs(coeffs).expect("uniform algebra")
    }

    /// A real-valued element `f + conj(f)`.
    pub fn real_element(&mut self, algebra: &Arc<Algebra>) -> Element {
        let f = self.element(algebra);
        &f + &f.conj()
    }

    /// Random series: an element at order 0 and, with probability 1/2 each, at higher orders.
    pub fn series(&mut self, algebra: &Arc<Algebra>, order: usize) -> FormalSeries {
        let coeffs = (0..=order)
            .map(|r| if r == 0 || self.below(2) == 0 { self.element(algebra) } else { Element::zero(algebra) })
            .collect();
        FormalSeries::from_coeffs(coeffs).expect("uniform algebra")
    }
}
