//! Dense matrices over the undeformed algebra and over its star deformation.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::scalar::GaussianRational;
use crate::series::FormalSeries;
use crate::star::StarProduct;

/// Matrix with entries in the commutative (undeformed) algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Element>,
}

impl ClassicalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Element>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        for e in &entries[1..] {
            entries[0].check_same(e)?;
        }
        Ok(ClassicalMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Element>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        ClassicalMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn identity(algebra: &Arc<Algebra>, n: usize) -> Self {
        let entries =
            (0..n * n).map(|idx| if idx / n == idx % n { Element::one(algebra) } else { Element::zero(algebra) }).collect();
        ClassicalMatrix { rows: n, cols: n, entries }
    }

    pub fn zeros(algebra: &Arc<Algebra>, rows: usize, cols: usize) -> Self {
        ClassicalMatrix { rows, cols, entries: vec![Element::zero(algebra); rows * cols] }
    }

    /// `diag(d_0, …, d_{n−1})`.
    pub fn diagonal(diag: Vec<Element>) -> Result<Self> {
        let n = diag.len();
        let alg = diag.first().ok_or_else(|| Error::DimensionMismatch("empty diagonal".into()))?.algebra().clone();
        let mut m = ClassicalMatrix::zeros(&alg, n, n);
        for (i, d) in diag.into_iter().enumerate() {
            d.check_same(&m.entries[0])?;
            m.entries[i * n + i] = d;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.entries[0].algebra()
    }

    pub fn get(&self, i: usize, j: usize) -> &Element {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Element] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &ClassicalMatrix) -> Result<ClassicalMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        self.entries[0].check_same(&other.entries[0])?;
        let mut out = ClassicalMatrix::zeros(self.algebra(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..other.cols {
                let mut acc = Element::zero(self.algebra());
                for j in 0..self.cols {
                    let (a, b) = (self.get(i, j), other.get(j, k));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.entries[i * other.cols + k] = acc;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ClassicalMatrix) -> Result<ClassicalMatrix> {
        self.check_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(ClassicalMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &ClassicalMatrix) -> Result<ClassicalMatrix> {
        self.check_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(ClassicalMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, c: &GaussianRational) -> ClassicalMatrix {
        ClassicalMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|e| e.scale(c)).collect() }
    }

    fn check_shape(&self, other: &ClassicalMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("shapes differ".into()));
        }
        self.entries[0].check_same(&other.entries[0])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ClassicalMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).conj());
            }
        }
        ClassicalMatrix { rows: self.cols, cols: self.rows, entries }
    }

    pub fn trace(&self) -> Result<Element> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("trace of a non-square matrix".into()));
        }
        let mut acc = Element::zero(self.algebra());
        for i in 0..self.rows {
            acc = &acc + self.get(i, i);
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Element::is_zero)
    }

    pub fn direct_sum(&self, other: &ClassicalMatrix) -> Result<ClassicalMatrix> {
        self.entries[0].check_same(&other.entries[0])?;
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        let mut out = ClassicalMatrix::zeros(self.algebra(), r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[i * c + j] = self.get(i, j).clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.entries[(self.rows + i) * c + self.cols + j] = other.get(i, j).clone();
            }
        }
        Ok(out)
    }

    /// Inverse over the commutative algebra.
    ///
    /// Uses the Faddeev–LeVerrier recursion (division only by integers), so the
    /// adjugate is always computable; the inverse exists exactly when the
    /// determinant is a unit of the algebra.
    pub fn inverse(&self) -> Result<ClassicalMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let alg = self.algebra().clone();
        let id = ClassicalMatrix::identity(&alg, n);
        let mut m = ClassicalMatrix::zeros(&alg, n, n);
        let mut c = Element::one(&alg);
        for k in 1..=n {
            m = self.mul(&m)?.add(&id.scale_element(&c))?;
            let am = self.mul(&m)?;
            let factor = GaussianRational::real(-BigRational::new(1.into(), (k as i64).into()));
            c = am.trace()?.scale(&factor);
        }
        // now c = c_0 and m = M_n, with A·M_n = −c_0·I
        let det = if n % 2 == 0 { c.clone() } else { -&c };
        let c_inv = c.unit_inverse().ok_or_else(|| {
            Error::Singular(format!("determinant {det:?} is not a unit of the algebra"))
        })?;
        Ok(m.scale_element(&-&c_inv))
    }

    pub fn scale_element(&self, e: &Element) -> ClassicalMatrix {
        ClassicalMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|x| x * e).collect() }
    }
}

/// `N×M` matrix of formal series multiplied with a fixed star product.
#[derive(Clone, Debug, PartialEq)]
pub struct StarMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<FormalSeries>,
    star: Arc<StarProduct>,
}

impl StarMatrix {
    pub fn new(star: &Arc<StarProduct>, rows: usize, cols: usize, entries: Vec<FormalSeries>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        for e in &entries {
            if e.order() != star.order() {
                return Err(Error::TruncationMismatch { left: star.order(), right: e.order() });
            }
            if !Algebra::same(e.algebra(), star.algebra()) {
                return Err(Error::DescriptorMismatch("matrix entry on another algebra".into()));
            }
        }
        Ok(StarMatrix { rows, cols, entries, star: star.clone() })
    }

    pub fn from_classical(m: &ClassicalMatrix, star: &Arc<StarProduct>) -> Result<Self> {
        let k = star.order();
        let entries = m.entries.iter().map(|e| FormalSeries::constant(e.clone(), k)).collect();
        StarMatrix::new(star, m.rows, m.cols, entries)
    }

    pub fn identity(star: &Arc<StarProduct>, n: usize) -> Self {
        StarMatrix::from_classical(&ClassicalMatrix::identity(star.algebra(), n), star).expect("square identity")
    }

    pub fn zeros(star: &Arc<StarProduct>, rows: usize, cols: usize) -> Self {
        let z = FormalSeries::zero(star.algebra(), star.order());
        StarMatrix { rows, cols, entries: vec![z; rows * cols], star: star.clone() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn star(&self) -> &Arc<StarProduct> {
        &self.star
    }

    pub fn order(&self) -> usize {
        self.star.order()
    }

    pub fn get(&self, i: usize, j: usize) -> &FormalSeries {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[FormalSeries] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Order-0 part.
    pub fn classical_limit(&self) -> ClassicalMatrix {
        ClassicalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|s| s.classical().clone()).collect(),
        }
    }

    /// The order-`r` coefficient matrix.
    pub fn order_part(&self, r: usize) -> ClassicalMatrix {
        ClassicalMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|s| s.coeff(r).clone()).collect() }
    }

    fn check_star(&self, other: &StarMatrix) -> Result<()> {
        if StarProduct::same(&self.star, &other.star) {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch("matrices use different star products".into()))
        }
    }

    fn check_shape(&self, other: &StarMatrix) -> Result<()> {
        self.check_star(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// `(A ⋆ B)_{ik} = Σ_j A_{ij} ⋆ B_{jk}`.
    pub fn mul(&self, other: &StarMatrix) -> Result<StarMatrix> {
        self.check_star(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = StarMatrix::zeros(&self.star, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..other.cols {
                let pairs: Vec<_> = (0..self.cols)
                    .map(|j| (self.get(i, j), other.get(j, k)))
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .collect();
                if !pairs.is_empty() {
                    out.entries[i * other.cols + k] = self.star.multiply_sum(&pairs)?;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &StarMatrix) -> Result<StarMatrix> {
        self.check_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &StarMatrix) -> Result<StarMatrix> {
        self.check_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &StarMatrix, f: impl Fn(&FormalSeries, &FormalSeries) -> FormalSeries) -> StarMatrix {
        StarMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
            star: self.star.clone(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> StarMatrix {
        StarMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
            star: self.star.clone(),
        }
    }

    /// Entrywise conjugate transpose.
    pub fn adjoint(&self) -> StarMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).conj());
            }
        }
        StarMatrix { rows: self.cols, cols: self.rows, entries, star: self.star.clone() }
    }

    pub fn trace(&self) -> Result<FormalSeries> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("trace of a non-square matrix".into()));
        }
        let mut acc = FormalSeries::zero(self.star.algebra(), self.order());
        for i in 0..self.rows {
            acc.add_assign(self.get(i, i));
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(FormalSeries::is_zero)
    }

    /// Lowest λ-order at which any entry differs.
    pub fn first_difference(&self, other: &StarMatrix) -> Option<usize> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some(0);
        }
        self.entries.iter().zip(&other.entries).filter_map(|(a, b)| a.first_difference(b)).min()
    }

    pub fn direct_sum(&self, other: &StarMatrix) -> Result<StarMatrix> {
        self.check_star(other)?;
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        let mut out = StarMatrix::zeros(&self.star, r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[i * c + j] = self.get(i, j).clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.entries[(self.rows + i) * c + self.cols + j] = other.get(i, j).clone();
            }
        }
        Ok(out)
    }

    /// Column `j` as an `N×1` matrix.
    pub fn column(&self, j: usize) -> StarMatrix {
        let entries = (0..self.rows).map(|i| self.get(i, j).clone()).collect();
        StarMatrix { rows: self.rows, cols: 1, entries, star: self.star.clone() }
    }

    /// Star inverse, solved order by order: `B₀ = A₀⁻¹`, `B_r = −B₀·(A⋆B)_r`.
    ///
    /// The classical inverse may be supplied; it is verified before use.
    /// Otherwise it is computed and must exist in the algebra.
    pub fn star_inverse(&self, classical_inverse: Option<&ClassicalMatrix>) -> Result<StarMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let a0 = self.classical_limit();
        let b0 = match classical_inverse {
            Some(b) => {
                let id = ClassicalMatrix::identity(a0.algebra(), self.rows);
                if a0.mul(b)? != id || b.mul(&a0)? != id {
                    return Err(Error::Singular("supplied classical inverse does not invert the order-0 matrix".into()));
                }
                b.clone()
            }
            None => a0.inverse()?,
        };
        let mut inv = StarMatrix::from_classical(&b0, &self.star)?;
        for r in 1..=self.order() {
            let defect = self.mul(&inv)?.order_part(r);
            if defect.is_zero() {
                continue;
            }
            let correction = b0.mul(&defect)?;
            for (entry, c) in inv.entries.iter_mut().zip(correction.entries) {
                *entry.coeff_mut(r) = entry.coeff(r) - &c;
            }
        }
        Ok(inv)
    }

    /// `(I + Δ)^{-1/2} = Σ_k binom(−1/2, k) Δ^{⋆k}` for `Δ = self − I` vanishing at order 0.
    pub fn inv_sqrt(&self) -> Result<StarMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse square root of a non-square matrix".into()));
        }
        let id = StarMatrix::identity(&self.star, self.rows);
        let delta = self.sub(&id)?;
        if !delta.classical_limit().is_zero() {
            return Err(Error::Precondition("inverse square root needs I + Δ with Δ = O(λ)".into()));
        }
        let mut sum = id.clone();
        let mut power = id;
        let mut binom = BigRational::one();
        for k in 1..=self.order() {
            power = power.mul(&delta)?;
            if power.is_zero() {
                break;
            }
            binom = binom * (BigRational::new((-1).into(), 2.into()) - BigRational::from_integer((k as i64 - 1).into()))
                / BigRational::from_integer((k as i64).into());
            sum = sum.add(&power.scale(&GaussianRational::real(binom.clone())))?;
        }
        Ok(sum)
    }
}
