//! Automorphisms of the undeformed torus algebra that stay inside exact arithmetic.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::algebra::{AlgebraKind, Element, Key};
use crate::error::{Error, Result};
use crate::scalar::GaussianRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Automorphism {
    Identity,
    /// `q ↦ q + a` with `a_j = quarter_turns[j]·π/2`, acting as `e_m ↦ i^{Σ m_j k_j} e_m`.
    Translation { quarter_turns: [u8; 2] },
    /// `e_m ↦ e_{Am}` for `A ∈ GL(2, ℤ)`.
    Lattice { matrix: [[i64; 2]; 2] },
}

impl Automorphism {
    /// Translation by `shift_j · 2π`; only multiples of a quarter period are exact.
    pub fn translation(shift: [BigRational; 2]) -> Result<Self> {
        let mut quarter_turns = [0u8; 2];
        for (j, s) in shift.iter().enumerate() {
            let four_s = s * BigRational::from_integer(4.into());
            if !four_s.is_integer() {
                return Err(Error::Unsupported(format!(
                    "translation by {s}·2π is not a quarter period; exp(i m·a) leaves ℚ(i)"
                )));
            }
            let turns = four_s.to_integer().mod_floor(&4.into());
            quarter_turns[j] = turns.to_u8().expect("reduced mod 4");
        }
        Ok(Automorphism::Translation { quarter_turns })
    }

    pub fn lattice(matrix: [[i64; 2]; 2]) -> Result<Self> {
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        if det.abs() != 1 {
            return Err(Error::Unsupported(format!("lattice map with determinant {det} is not in GL(2, Z)")));
        }
        Ok(Automorphism::Lattice { matrix })
    }

    pub fn inverse(&self) -> Automorphism {
        match self {
            Automorphism::Identity => Automorphism::Identity,
            Automorphism::Translation { quarter_turns } => Automorphism::Translation {
                quarter_turns: [(4 - quarter_turns[0]) % 4, (4 - quarter_turns[1]) % 4],
            },
            Automorphism::Lattice { matrix: [[a, b], [c, d]] } => {
                let det = a * d - b * c;
                Automorphism::Lattice { matrix: [[d * det, -b * det], [-c * det, a * det]] }
            }
        }
    }

    pub fn apply(&self, f: &Element) -> Result<Element> {
        if f.algebra().kind() != AlgebraKind::Torus {
            return Err(Error::Unsupported("automorphisms are only provided on the torus".into()));
        }
        Ok(match self {
            Automorphism::Identity => f.clone(),
            Automorphism::Translation { quarter_turns } => f.map_terms(|k| {
                let phase = (k[0] * quarter_turns[0] as i64 + k[1] * quarter_turns[1] as i64).mod_floor(&4);
                let factor = match phase {
                    0 => GaussianRational::from_ints(1, 0),
                    1 => GaussianRational::from_ints(0, 1),
                    2 => GaussianRational::from_ints(-1, 0),
                    _ => GaussianRational::from_ints(0, -1),
                };
                (k.clone(), factor)
            }),
            Automorphism::Lattice { matrix } => f.map_terms(|k| {
                let image: Key = (0..2).map(|r| matrix[r][0] * k[0] + matrix[r][1] * k[1]).collect();
                (image, GaussianRational::from_ints(1, 0))
            }),
        })
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Automorphism::Identity => true,
            Automorphism::Translation { quarter_turns } => quarter_turns.iter().all(|&t| t == 0),
            Automorphism::Lattice { matrix } => *matrix == [[1, 0], [0, 1]],
        }
    }
}

impl Default for Automorphism {
    fn default() -> Self {
        Automorphism::Identity
    }
}
