//! Exact computer algebra for formal deformation quantization.
//!
//! Star products on the 2-torus and on symplectic vector spaces, deformed
//! projections and the bimodules they define, Hermitian metrics, Čech
//! cocycles, traces and indices, and the lattice arithmetic deciding Morita
//! equivalence of symplectic star products. All arithmetic is exact over ℚ(i).

pub mod algebra;
pub mod automorphism;
pub mod bundle;
pub mod cocycle;
pub mod corpus;
pub mod error;
mod kernel;
pub mod matrix;
pub mod picard;
pub mod sample;
pub mod scalar;
pub mod series;
pub mod star;
pub mod trace;
pub mod transform;
pub mod wire;

pub use algebra::{Algebra, AlgebraKind, Element};
pub use automorphism::Automorphism;
pub use error::{Error, Result};
pub use scalar::GaussianRational;
pub use series::{FormalSeries, ScalarSeries};
pub use star::{check_star_axioms, twist_by_automorphism, twist_star, StarProduct};
pub use transform::{DifferentialOperator, EquivalenceTransform};
