//! The two coefficient algebras: trigonometric polynomials on the 2-torus and
//! polynomials on ℝ^{2n}, each with a constant Poisson tensor.
//!
//! Torus elements are finite sums `Σ c_m e_m` with `e_m(q) = exp(i m·q)` on
//! `[0, 2π)²`, so `∂_j e_m = i m_j e_m` and every derivative stays in ℚ(i).
//! Plane elements are finite sums `Σ c_α x^α`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::GaussianRational;

/// Mode vector (torus) or exponent multi-index (plane).
pub type Key = SmallVec<[i64; 4]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    Torus,
    Plane,
}

/// Algebra descriptor: kind, dimension and the constant Poisson tensor `π^{jk}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    kind: AlgebraKind,
    dim: usize,
    poisson: Vec<BigRational>,
}

impl Algebra {
    /// The 2-torus with Poisson tensor `θ ∂₁∧∂₂`.
    pub fn torus(theta: BigRational) -> Arc<Algebra> {
        let z = BigRational::zero();
        Arc::new(Algebra {
            kind: AlgebraKind::Torus,
            dim: 2,
            poisson: vec![z.clone(), theta.clone(), -theta, z],
        })
    }

    /// ℝ^{dim} with the given constant antisymmetric Poisson matrix.
    pub fn plane(poisson: Vec<Vec<BigRational>>) -> Result<Arc<Algebra>> {
        let dim = poisson.len();
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::InvalidDescriptor(format!("dim must be even and positive, got {dim}")));
        }
        if poisson.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidDescriptor("poisson matrix must be square".into()));
        }
        for j in 0..dim {
            for k in 0..dim {
                if poisson[j][k] != -&poisson[k][j] {
                    return Err(Error::InvalidDescriptor(format!(
                        "poisson matrix not antisymmetric at ({j}, {k})"
                    )));
                }
            }
        }
        Ok(Arc::new(Algebra { kind: AlgebraKind::Plane, dim, poisson: poisson.into_iter().flatten().collect() }))
    }

    /// Canonical symplectic plane of dimension `2n`: `π^{j, j+n} = 1`.
    pub fn canonical_plane(n: usize) -> Arc<Algebra> {
        let dim = 2 * n;
        let mut m = vec![vec![BigRational::zero(); dim]; dim];
        for j in 0..n {
            m[j][j + n] = BigRational::one();
            m[j + n][j] = -BigRational::one();
        }
        Algebra::plane(m).expect("canonical tensor is antisymmetric")
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self) -> Option<&BigRational> {
        (self.kind == AlgebraKind::Torus).then(|| &self.poisson[1])
    }

    pub fn poisson(&self, j: usize, k: usize) -> &BigRational {
        &self.poisson[j * self.dim + k]
    }

    pub fn poisson_matrix(&self) -> Vec<Vec<BigRational>> {
        self.poisson.chunks(self.dim).map(|row| row.to_vec()).collect()
    }

    /// Nonzero entries `(j, k, π^{jk})`.
    pub fn poisson_entries(&self) -> Vec<(usize, usize, BigRational)> {
        let mut out = Vec::new();
        for j in 0..self.dim {
            for k in 0..self.dim {
                let v = self.poisson(j, k);
                if !v.is_zero() {
                    out.push((j, k, v.clone()));
                }
            }
        }
        out
    }

    pub fn validate_key(&self, key: &[i64]) -> Result<()> {
        if key.len() != self.dim {
            return Err(Error::DimensionMismatch(format!("key length {} for dim {}", key.len(), self.dim)));
        }
        if self.kind == AlgebraKind::Plane && key.iter().any(|&e| e < 0) {
            return Err(Error::InvalidDescriptor("negative exponent in plane monomial".into()));
        }
        Ok(())
    }

    /// `∂_j` of a single basis monomial: the scalar factor and the new key.
    pub(crate) fn derive_key(&self, key: &Key, j: usize) -> Option<(GaussianRational, Key)> {
        let m = key[j];
        if m == 0 {
            return None;
        }
        match self.kind {
            AlgebraKind::Torus => Some((GaussianRational::from_ints(0, m), key.clone())),
            AlgebraKind::Plane => {
                let mut k = key.clone();
                k[j] -= 1;
                Some((GaussianRational::from_ints(m, 0), k))
            }
        }
    }

    pub(crate) fn zero_key(&self) -> Key {
        SmallVec::from_elem(0, self.dim)
    }

    /// Same algebra, either by pointer or by value.
    pub fn same(a: &Arc<Algebra>, b: &Arc<Algebra>) -> bool {
        Arc::ptr_eq(a, b) || a == b
    }
}

pub(crate) fn add_keys(a: &Key, b: &Key) -> Key {
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}

/// An element of one of the coefficient algebras; zero coefficients are never stored.
#[derive(Clone)]
pub struct Element {
    algebra: Arc<Algebra>,
    terms: BTreeMap<Key, GaussianRational>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        Algebra::same(&self.algebra, &other.algebra) && self.terms == other.terms
    }
}

impl Eq for Element {}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let sym = match self.algebra.kind {
            AlgebraKind::Torus => "e",
            AlgebraKind::Plane => "x^",
        };
        let parts: Vec<String> =
            self.terms.iter().map(|(k, c)| format!("({c}){sym}{:?}", k.as_slice())).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Element {
    pub fn zero(algebra: &Arc<Algebra>) -> Self {
        Element { algebra: algebra.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(algebra: &Arc<Algebra>, c: GaussianRational) -> Self {
        let mut e = Element::zero(algebra);
        e.add_term(algebra.zero_key(), c);
        e
    }

    pub fn one(algebra: &Arc<Algebra>) -> Self {
        Element::constant(algebra, GaussianRational::one())
    }

    pub fn monomial(algebra: &Arc<Algebra>, key: &[i64], c: GaussianRational) -> Result<Self> {
        algebra.validate_key(key)?;
        let mut e = Element::zero(algebra);
        e.add_term(Key::from_slice(key), c);
        Ok(e)
    }

    /// Builds an element from `(key, coefficient)` pairs, summing repeated keys.
    pub fn from_terms<I>(algebra: &Arc<Algebra>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, GaussianRational)>,
    {
        let mut e = Element::zero(algebra);
        for (k, c) in terms {
            algebra.validate_key(&k)?;
            e.add_term(Key::from_vec(k), c);
        }
        Ok(e)
    }

    /// Torus basis function `c·e_m`. Panics if the algebra is not a torus.
    pub fn torus_mode(algebra: &Arc<Algebra>, m: [i64; 2], c: GaussianRational) -> Self {
        assert_eq!(algebra.kind, AlgebraKind::Torus, "torus_mode on a plane algebra");
        let mut e = Element::zero(algebra);
        e.add_term(Key::from_slice(&m), c);
        e
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, key: &[i64]) -> GaussianRational {
        self.terms.get(key).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the element is the constant function `c`.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                k.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Inverse in the undeformed algebra when the element is a unit: a nonzero
    /// constant, or on the torus a single mode `c·e_m`.
    pub fn unit_inverse(&self) -> Option<Element> {
        if self.terms.len() != 1 {
            return None;
        }
        let (k, c) = self.terms.iter().next().unwrap();
        let inv = c.inv()?;
        match self.algebra.kind {
            AlgebraKind::Torus => {
                let mut out = Element::zero(&self.algebra);
                out.add_term(k.iter().map(|x| -x).collect(), inv);
                Some(out)
            }
            AlgebraKind::Plane => k.iter().all(|&x| x == 0).then(|| Element::constant(&self.algebra, inv)),
        }
    }

    /// Builds an element from a key map, dropping zero coefficients.
    pub(crate) fn from_key_map(algebra: &Arc<Algebra>, mut terms: BTreeMap<Key, GaussianRational>) -> Element {
        terms.retain(|_, c| !c.is_zero());
        Element { algebra: algebra.clone(), terms }
    }

    pub(crate) fn add_term(&mut self, key: Key, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn check_same(&self, other: &Element) -> Result<()> {
        if Algebra::same(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch(format!("{:?} vs {:?}", self.algebra, other.algebra)))
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Element {
        if c.is_zero() {
            return Element::zero(&self.algebra);
        }
        Element {
            algebra: self.algebra.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Element, c: &GaussianRational) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    /// Undeformed (pointwise) product.
    pub fn try_mul(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let mut out = Element::zero(&self.algebra);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(add_keys(ka, kb), ca * cb);
            }
        }
        Ok(out)
    }

    /// Partial derivative `∂_j`, `j` zero-based.
    pub fn derive(&self, j: usize) -> Result<Element> {
        if j >= self.algebra.dim {
            return Err(Error::IndexOutOfRange { index: j, dim: self.algebra.dim });
        }
        let mut out = Element::zero(&self.algebra);
        for (k, c) in &self.terms {
            if let Some((factor, nk)) = self.algebra.derive_key(k, j) {
                out.add_term(nk, c * &factor);
            }
        }
        Ok(out)
    }

    /// `∂^α` for a multi-index of the algebra's dimension.
    pub fn derive_multi(&self, alpha: &[u32]) -> Result<Element> {
        if alpha.len() != self.algebra.dim {
            return Err(Error::DimensionMismatch(format!("multi-index of length {}", alpha.len())));
        }
        let mut cur = self.clone();
        for (j, &n) in alpha.iter().enumerate() {
            for _ in 0..n {
                if cur.is_zero() {
                    return Ok(cur);
                }
                cur = cur.derive(j)?;
            }
        }
        Ok(cur)
    }

    /// Complex conjugation of functions.
    pub fn conj(&self) -> Element {
        let terms = match self.algebra.kind {
            AlgebraKind::Torus => {
                self.terms.iter().map(|(k, c)| (k.iter().map(|x| -x).collect(), c.conj())).collect()
            }
            AlgebraKind::Plane => self.terms.iter().map(|(k, c)| (k.clone(), c.conj())).collect(),
        };
        Element { algebra: self.algebra.clone(), terms }
    }

    /// Normalized integral over the torus (`∫ 1 = 1`).
    pub fn integrate(&self) -> Result<GaussianRational> {
        match self.algebra.kind {
            AlgebraKind::Torus => Ok(self.coeff(&[0, 0])),
            AlgebraKind::Plane => {
                Err(Error::Unsupported("no normalized trace on the polynomial algebra".into()))
            }
        }
    }

    /// `{f, g} = Σ π^{jk} ∂_j f ∂_k g`.
    pub fn poisson_bracket(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let mut out = Element::zero(&self.algebra);
        for (j, k, v) in self.algebra.poisson_entries() {
            let term = self.derive(j)?.try_mul(&other.derive(k)?)?;
            out.add_assign_scaled(&term, &GaussianRational::real(v));
        }
        Ok(out)
    }

    /// Relabels basis keys through `f`, multiplying each coefficient by the returned factor.
    pub(crate) fn map_terms(&self, f: impl Fn(&Key) -> (Key, GaussianRational)) -> Element {
        let mut out = Element::zero(&self.algebra);
        for (k, c) in &self.terms {
            let (nk, factor) = f(k);
            out.add_term(nk, c * &factor);
        }
        out
    }
}

// Operator forms panic on descriptor mismatch; public entry points check first.
impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.check_same(rhs).expect("element addition");
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.check_same(rhs).expect("element subtraction");
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&-GaussianRational::one())
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.try_mul(rhs).expect("element product")
    }
}
