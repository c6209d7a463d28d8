//! Star products on the coefficient algebras and their axiom checker.
//!
//! The built-in product is the Weyl–Moyal product
//! `C_r(f, g) = (1/r!) (i/2)^r π^{j₁k₁}…π^{j_r k_r} ∂_{j₁…j_r} f ∂_{k₁…k_r} g`.
//! On the torus it is evaluated through the closed form
//! `e_m ⋆ e_n = exp(−iλθ(m₁n₂ − m₂n₁)/2) e_{m+n}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{add_keys, Algebra, AlgebraKind, Element, Key};
use crate::automorphism::Automorphism;
use crate::error::{Error, Result};
use crate::kernel;
use crate::sample::Sampler;
use crate::scalar::GaussianRational;
use crate::series::FormalSeries;
use crate::transform::EquivalenceTransform;

/// Ordering convention of every built-in product.
pub const CONVENTION: &str = "weyl";

/// Constant-coefficient bidifferential operator `Σ c ∂^α f · ∂^β g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bidifferential {
    terms: Vec<(GaussianRational, Vec<u32>, Vec<u32>)>,
}

impl Bidifferential {
    pub fn new(terms: Vec<(GaussianRational, Vec<u32>, Vec<u32>)>) -> Self {
        Bidifferential { terms }
    }

    /// `scale · Σ π^{jk} ∂_j ⊗ ∂_k`.
    pub fn poisson(algebra: &Algebra, scale: &GaussianRational) -> Self {
        let dim = algebra.dim();
        let unit = |j: usize| {
            let mut a = vec![0u32; dim];
            a[j] = 1;
            a
        };
        let terms = algebra
            .poisson_entries()
            .into_iter()
            .map(|(j, k, v)| (scale.scale(&v), unit(j), unit(k)))
            .collect();
        Bidifferential { terms }
    }

    pub fn plus(mut self, other: Bidifferential) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn apply(&self, f: &Element, g: &Element) -> Result<Element> {
        f.check_same(g)?;
        let mut out = Element::zero(f.algebra());
        for (c, alpha, beta) in &self.terms {
            let df = f.derive_multi(alpha)?;
            if df.is_zero() {
                continue;
            }
            let dg = g.derive_multi(beta)?;
            out.add_assign_scaled(&df.try_mul(&dg)?, c);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StarKind {
    /// Weyl–Moyal product of the algebra's Poisson tensor.
    Moyal,
    /// `C_0 = pointwise`, `C_r = cochains[r - 1]`, zero beyond.
    Cochains(Vec<Bidifferential>),
    /// `f ⋆′ g = T(T⁻¹f ⋆ T⁻¹g)`.
    Twisted { base: Arc<StarProduct>, transform: EquivalenceTransform, inverse: EquivalenceTransform },
    /// `f ⋆^Φ g = Φ(Φ⁻¹f ⋆ Φ⁻¹g)`.
    Automorphism { base: Arc<StarProduct>, phi: Automorphism },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StarProduct {
    algebra: Arc<Algebra>,
    order: usize,
    kind: StarKind,
}

impl StarProduct {
    pub fn moyal(algebra: &Arc<Algebra>, order: usize) -> Arc<StarProduct> {
        Arc::new(StarProduct { algebra: algebra.clone(), order, kind: StarKind::Moyal })
    }

    pub fn from_cochains(algebra: &Arc<Algebra>, order: usize, cochains: Vec<Bidifferential>) -> Result<Arc<Self>> {
        let dim = algebra.dim();
        for op in &cochains {
            if op.terms.iter().any(|(_, a, b)| a.len() != dim || b.len() != dim) {
                return Err(Error::DimensionMismatch("cochain multi-index length".into()));
            }
        }
        Ok(Arc::new(StarProduct { algebra: algebra.clone(), order, kind: StarKind::Cochains(cochains) }))
    }

    /// Moyal's first cochain plus the symmetric biderivation `∂₁f ∂₁g`, with
    /// every higher cochain dropped. Its `C₁` still antisymmetrizes to `i{·,·}`
    /// but associativity breaks at order 2.
    pub fn corrupted(algebra: &Arc<Algebra>, order: usize) -> Arc<StarProduct> {
        let dim = algebra.dim();
        let mut d1 = vec![0u32; dim];
        d1[0] = 1;
        let half_i = GaussianRational::new(BigRational::zero(), BigRational::new(1.into(), 2.into()));
        let c1 = Bidifferential::poisson(algebra, &half_i)
            .plus(Bidifferential::new(vec![(GaussianRational::one(), d1.clone(), d1)]));
        StarProduct::from_cochains(algebra, order, vec![c1]).expect("well-formed cochain")
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn kind(&self) -> &StarKind {
        &self.kind
    }

    pub fn same(a: &Arc<StarProduct>, b: &Arc<StarProduct>) -> bool {
        Arc::ptr_eq(a, b) || a == b
    }

    fn check_series(&self, f: &FormalSeries) -> Result<()> {
        if f.order() != self.order {
            return Err(Error::TruncationMismatch { left: self.order, right: f.order() });
        }
        if !Algebra::same(f.algebra(), &self.algebra) {
            return Err(Error::DescriptorMismatch("series and star product live on different algebras".into()));
        }
        Ok(())
    }

    /// `f ⋆ g mod λ^{K+1}`.
    pub fn multiply(&self, f: &FormalSeries, g: &FormalSeries) -> Result<FormalSeries> {
        self.check_series(f)?;
        self.check_series(g)?;
        match &self.kind {
            StarKind::Moyal | StarKind::Cochains(_) => self.multiply_by_cochains(f, g),
            StarKind::Twisted { base, transform, inverse } => {
                let prod = base.multiply(&inverse.apply(f)?, &inverse.apply(g)?)?;
                transform.apply(&prod)
            }
            StarKind::Automorphism { base, phi } => {
                let inv = phi.inverse();
                let prod = base.multiply(&f.try_map(|e| inv.apply(e))?, &g.try_map(|e| inv.apply(e))?)?;
                prod.try_map(|e| phi.apply(e))
            }
        }
    }

    /// `Σ_j f_j ⋆ g_j`.
    pub fn multiply_sum(&self, pairs: &[(&FormalSeries, &FormalSeries)]) -> Result<FormalSeries> {
        for (f, g) in pairs {
            self.check_series(f)?;
            self.check_series(g)?;
        }
        if self.is_torus_moyal() && !pairs.is_empty() {
            let theta = self.algebra.theta().expect("torus algebra");
            if let Some(coeffs) = kernel::torus_sum_of_products(theta, pairs, self.order) {
                return FormalSeries::from_coeffs(coeffs);
            }
        }
        let mut acc = FormalSeries::zero(&self.algebra, self.order);
        for (f, g) in pairs {
            acc.add_assign(&self.multiply(f, g)?);
        }
        Ok(acc)
    }

    fn is_torus_moyal(&self) -> bool {
        matches!(self.kind, StarKind::Moyal) && self.algebra.kind() == AlgebraKind::Torus
    }

    fn multiply_by_cochains(&self, f: &FormalSeries, g: &FormalSeries) -> Result<FormalSeries> {
        if self.is_torus_moyal() {
            let theta = self.algebra.theta().expect("torus algebra");
            if let Some(coeffs) = kernel::torus_sum_of_products(theta, &[(f, g)], self.order) {
                return FormalSeries::from_coeffs(coeffs);
            }
            return Ok(torus_series_product(f, g));
        }
        let k = self.order;
        let mut out = FormalSeries::zero(&self.algebra, k);
        for a in 0..=k {
            let fa = f.coeff(a);
            if fa.is_zero() {
                continue;
            }
            for b in 0..=k - a {
                let gb = g.coeff(b);
                if gb.is_zero() {
                    continue;
                }
                for (s, c) in self.element_cochains(fa, gb, k - a - b)?.into_iter().enumerate() {
                    if !c.is_zero() {
                        *out.coeff_mut(a + b + s) = out.coeff(a + b + s) + &c;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[C_0(f,g), …, C_max(f,g)]` for λ-independent `f`, `g`.
    fn element_cochains(&self, f: &Element, g: &Element, max: usize) -> Result<Vec<Element>> {
        match &self.kind {
            StarKind::Moyal => match self.algebra.kind() {
                AlgebraKind::Torus => unreachable!("torus products take the series path"),
                AlgebraKind::Plane => moyal_bidifferential(f, g, max),
            },
            StarKind::Cochains(ops) => {
                let mut out = vec![f.try_mul(g)?];
                for r in 1..=max {
                    out.push(match ops.get(r - 1) {
                        Some(op) => op.apply(f, g)?,
                        None => Element::zero(&self.algebra),
                    });
                }
                Ok(out)
            }
            _ => unreachable!("series-level kinds do not expose element cochains"),
        }
    }

    /// The cochain `C_r(f, g)` read off from `f ⋆ g`.
    pub fn cochain(&self, r: usize, f: &Element, g: &Element) -> Result<Element> {
        let fs = FormalSeries::constant(f.clone(), self.order);
        let gs = FormalSeries::constant(g.clone(), self.order);
        Ok(self.multiply(&fs, &gs)?.coeff(r).clone())
    }
}

/// `(−iθw/2)^r / r!` for `r = 0..=max`.
fn torus_phase(theta: &BigRational, wedge: i64, max: usize) -> Vec<GaussianRational> {
    let step = GaussianRational::new(BigRational::zero(), BigRational::new((-wedge).into(), 2.into()) * theta);
    let mut v = vec![GaussianRational::one()];
    for r in 1..=max {
        let next = &v[r - 1] * &step;
        v.push(next.scale(&BigRational::new(1.into(), (r as i64).into())));
    }
    v
}

/// Closed-form torus product `e_m ⋆ e_n = Σ_r (1/r!)(−iθ(m∧n)/2)^r λ^r e_{m+n}` on series.
///
/// Term pairs are first bucketed by `(λ-order, m+n, m∧n)` so the phase is
/// applied once per bucket rather than once per pair.
fn torus_series_product(f: &FormalSeries, g: &FormalSeries) -> FormalSeries {
    let alg = f.algebra();
    let k = f.order();
    let theta = alg.theta().expect("torus algebra").clone();
    let mut buckets: Vec<HashMap<(Key, i64), GaussianRational>> = vec![HashMap::new(); k + 1];
    for a in 0..=k {
        let fa = f.coeff(a);
        if fa.is_zero() {
            continue;
        }
        for b in 0..=k - a {
            let gb = g.coeff(b);
            let bucket = &mut buckets[a + b];
            for (m, cm) in fa.terms() {
                for (n, cn) in gb.terms() {
                    let wedge = if theta.is_zero() { 0 } else { m[0] * n[1] - m[1] * n[0] };
                    let slot = bucket.entry((add_keys(m, n), wedge)).or_insert_with(GaussianRational::zero);
                    *slot += &(cm * cn);
                }
            }
        }
    }
    let mut phases: HashMap<i64, Vec<GaussianRational>> = HashMap::new();
    let mut out: Vec<BTreeMap<Key, GaussianRational>> = vec![BTreeMap::new(); k + 1];
    for (s, bucket) in buckets.into_iter().enumerate() {
        for ((key, wedge), c) in bucket {
            if c.is_zero() {
                continue;
            }
            if wedge == 0 {
                *out[s].entry(key).or_insert_with(GaussianRational::zero) += &c;
                continue;
            }
            let phase = phases.entry(wedge).or_insert_with(|| torus_phase(&theta, wedge, k));
            for r in 0..=k - s {
                *out[s + r].entry(key.clone()).or_insert_with(GaussianRational::zero) += &(&c * &phase[r]);
            }
        }
    }
    let coeffs = out
        .into_iter()
        .map(|terms| Element::from_key_map(alg, terms))
        .collect();
    FormalSeries::from_coeffs(coeffs).expect("uniform algebra")
}

/// Rational-arithmetic reference for the integer kernel.
#[cfg(test)]
fn torus_weyl(f: &Element, g: &Element, max: usize) -> Vec<Element> {
    let prod = torus_series_product(&FormalSeries::constant(f.clone(), max), &FormalSeries::constant(g.clone(), max));
    prod.coeffs().to_vec()
}

/// Weyl–Moyal cochains from the bidifferential formula, valid on either algebra.
///
/// Works on the tensor `Σ c (∂…f)⊗(∂…g)`, applying `Π = Σ π^{jk} ∂_j⊗∂_k`
/// once per order and multiplying out at the end.
pub fn moyal_bidifferential(f: &Element, g: &Element, max: usize) -> Result<Vec<Element>> {
    f.check_same(g)?;
    let alg = f.algebra().clone();
    let entries: Vec<(usize, usize, GaussianRational)> =
        alg.poisson_entries().into_iter().map(|(j, k, v)| (j, k, GaussianRational::real(v))).collect();
    let mut tensor: BTreeMap<(Key, Key), GaussianRational> = BTreeMap::new();
    for (a, ca) in f.terms() {
        for (b, cb) in g.terms() {
            tensor.insert((a.clone(), b.clone()), ca * cb);
        }
    }
    let collapse = |t: &BTreeMap<(Key, Key), GaussianRational>, weight: &GaussianRational| {
        let mut e = Element::zero(&alg);
        for ((a, b), c) in t {
            e.add_term(add_keys(a, b), c * weight);
        }
        e
    };
    let half_i = GaussianRational::new(BigRational::zero(), BigRational::new(1.into(), 2.into()));
    let mut weight = GaussianRational::one();
    let mut out = vec![collapse(&tensor, &weight)];
    for r in 1..=max {
        let mut next: BTreeMap<(Key, Key), GaussianRational> = BTreeMap::new();
        for ((a, b), c) in &tensor {
            for (j, k, pi) in &entries {
                let (Some((fa, da)), Some((fb, db))) = (alg.derive_key(a, *j), alg.derive_key(b, *k)) else {
                    continue;
                };
                let v = &(c * pi) * &(&fa * &fb);
                let slot = next.entry((da, db)).or_insert_with(GaussianRational::zero);
                *slot += &v;
            }
        }
        next.retain(|_, c| !c.is_zero());
        tensor = next;
        weight = (&weight * &half_i).scale(&BigRational::new(1.into(), (r as i64).into()));
        out.push(collapse(&tensor, &weight));
    }
    Ok(out)
}

/// `⋆′` with `f ⋆′ g = T(T⁻¹f ⋆ T⁻¹g)`, so that `T(f ⋆ g) = Tf ⋆′ Tg`.
pub fn twist_star(transform: &EquivalenceTransform, star: &Arc<StarProduct>) -> Result<Arc<StarProduct>> {
    if transform.order() != star.order {
        return Err(Error::TruncationMismatch { left: transform.order(), right: star.order });
    }
    for op in transform.ops() {
        if let Some((_, c)) = op.terms().next() {
            if !Algebra::same(c.algebra(), &star.algebra) {
                return Err(Error::DescriptorMismatch("transform coefficients on another algebra".into()));
            }
        }
    }
    let inverse = transform.invert()?;
    Ok(Arc::new(StarProduct {
        algebra: star.algebra.clone(),
        order: star.order,
        kind: StarKind::Twisted { base: star.clone(), transform: transform.clone(), inverse },
    }))
}

/// `⋆^Φ` with `f ⋆^Φ g = Φ(Φ⁻¹f ⋆ Φ⁻¹g)`.
pub fn twist_by_automorphism(phi: &Automorphism, star: &Arc<StarProduct>) -> Result<Arc<StarProduct>> {
    if star.algebra.kind() != AlgebraKind::Torus {
        return Err(Error::Unsupported("automorphism twists are only provided on the torus".into()));
    }
    if phi.is_identity() {
        return Ok(star.clone());
    }
    Ok(Arc::new(StarProduct {
        algebra: star.algebra.clone(),
        order: star.order,
        kind: StarKind::Automorphism { base: star.clone(), phi: phi.clone() },
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    Product,
    PoissonBracket,
    Unit,
    Hermitian,
    Associativity,
}

impl Axiom {
    pub const ALL: [Axiom; 5] =
        [Axiom::Product, Axiom::PoissonBracket, Axiom::Unit, Axiom::Hermitian, Axiom::Associativity];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Product => "c0-product",
            Axiom::PoissonBracket => "c1-antisymmetry",
            Axiom::Unit => "unit",
            Axiom::Hermitian => "hermitian",
            Axiom::Associativity => "associativity",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub pass: bool,
    pub first_failing_order: Option<usize>,
    /// Sample elements exhibiting the lowest failing order; empty on pass.
    pub witness: Vec<Element>,
}

impl AxiomCheck {
    fn new(axiom: Axiom) -> Self {
        AxiomCheck { axiom, pass: true, first_failing_order: None, witness: Vec::new() }
    }

    fn record(&mut self, failing: Option<usize>, witness: &[&Element]) {
        if let Some(order) = failing {
            if self.first_failing_order.map_or(true, |o| order < o) {
                self.pass = false;
                self.first_failing_order = Some(order);
                self.witness = witness.iter().map(|e| (*e).clone()).collect();
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StarAxiomReport {
    pub convention: &'static str,
    pub order: usize,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<AxiomCheck>,
}

impl StarAxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks.iter().find(|c| c.axiom == axiom).expect("every axiom is checked")
    }
}

/// Tests the star-product axioms on `sample_count` seeded random triples.
pub fn check_star_axioms(star: &StarProduct, sample_count: usize, seed: u64) -> Result<StarAxiomReport> {
    if sample_count == 0 {
        return Err(Error::Precondition("sample_count must be at least 1".into()));
    }
    let alg = star.algebra.clone();
    let k = star.order;
    let lift = |e: &Element| FormalSeries::constant(e.clone(), k);
    let one = FormalSeries::one(&alg, k);
    let mut sampler = Sampler::new(seed);
    let mut checks: Vec<AxiomCheck> = Axiom::ALL.iter().map(|&a| AxiomCheck::new(a)).collect();
    for _ in 0..sample_count {
        let f = sampler.element(&alg);
        let g = sampler.element(&alg);
        let h = sampler.element(&alg);
        let (fs, gs, hs) = (lift(&f), lift(&g), lift(&h));
        let fg = star.multiply(&fs, &gs)?;
        let gf = star.multiply(&gs, &fs)?;

        let c0_ok = fg.coeff(0) == &f.try_mul(&g)?;
        checks[0].record((!c0_ok).then_some(0), &[&f, &g]);

        if k >= 1 {
            let anti = fg.coeff(1) - gf.coeff(1);
            let bracket = f.poisson_bracket(&g)?.scale(&GaussianRational::i());
            checks[1].record((anti != bracket).then_some(1), &[&f, &g]);
        }

        let left_unit = star.multiply(&one, &fs)?.first_difference(&fs);
        let right_unit = star.multiply(&fs, &one)?.first_difference(&fs);
        let unit_fail = match (left_unit, right_unit) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        checks[2].record(unit_fail, &[&f]);

        let herm = fg.conj().first_difference(&star.multiply(&gs.conj(), &fs.conj())?);
        checks[3].record(herm, &[&f, &g]);

        let left = star.multiply(&fg, &hs)?;
        let right = star.multiply(&fs, &star.multiply(&gs, &hs)?)?;
        checks[4].record(left.first_difference(&right), &[&f, &g, &h]);
    }
    Ok(StarAxiomReport { convention: CONVENTION, order: k, samples: sample_count, seed, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use crate::transform::DifferentialOperator;
    use num_bigint::BigInt;
    use num_traits::Pow;

    fn q(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn factorial(n: i64) -> i64 {
        (1..=n).product()
    }

    #[test]
    fn plane_x_star_y() {
        let p = Algebra::canonical_plane(1);
        let star = StarProduct::moyal(&p, 2);
        let x = FormalSeries::constant(Element::monomial(&p, &[1, 0], q("1")).unwrap(), 2);
        let y = FormalSeries::constant(Element::monomial(&p, &[0, 1], q("1")).unwrap(), 2);
        let xy = star.multiply(&x, &y).unwrap();
        assert_eq!(xy.coeff(0), &Element::monomial(&p, &[1, 1], q("1")).unwrap());
        assert_eq!(xy.coeff(1), &Element::constant(&p, q("1/2 i")));
        assert!(xy.coeff(2).is_zero());
        let xx = star.multiply(&x, &x).unwrap();
        assert_eq!(xx, FormalSeries::constant(Element::monomial(&p, &[2, 0], q("1")).unwrap(), 2));
    }

    #[test]
    fn torus_modes_pick_up_the_weyl_phase() {
        let t = Algebra::torus(rational(1, 1));
        let star = StarProduct::moyal(&t, 3);
        let e10 = FormalSeries::constant(Element::torus_mode(&t, [1, 0], q("1")), 3);
        let e01 = FormalSeries::constant(Element::torus_mode(&t, [0, 1], q("1")), 3);
        let prod = star.multiply(&e10, &e01).unwrap();
        // oracle: Taylor coefficients of exp(-iλ/2)
        let minus_half_i = q("-1/2 i");
        for r in 0..=3 {
            let c = minus_half_i.pow(r as u32).scale(&rational(1, factorial(r)));
            assert_eq!(prod.coeff(r as usize), &Element::torus_mode(&t, [1, 1], c));
        }
    }

    #[test]
    fn closed_form_matches_bidifferential_formula_on_torus() {
        let mut s = Sampler::new(17);
        for theta in [rational(1, 1), rational(1, 2), rational(-3, 5)] {
            let t = Algebra::torus(theta);
            for _ in 0..10 {
                let f = s.element(&t);
                let g = s.element(&t);
                assert_eq!(torus_weyl(&f, &g, 5), moyal_bidifferential(&f, &g, 5).unwrap());
            }
        }
    }

    #[test]
    fn integer_kernel_matches_rational_path() {
        for theta in [rational(1, 1), rational(-3, 5), rational(0, 1), rational(7, 2)] {
            let t = Algebra::torus(theta.clone());
            let mut s = Sampler::new(31);
            for _ in 0..10 {
                let pairs: Vec<_> = (0..3).map(|_| (s.series(&t, 4), s.series(&t, 4))).collect();
                let refs: Vec<_> = pairs.iter().map(|(f, g)| (f, g)).collect();
                let fast = FormalSeries::from_coeffs(kernel::torus_sum_of_products(&theta, &refs, 4).unwrap()).unwrap();
                let mut slow = FormalSeries::zero(&t, 4);
                for (f, g) in &pairs {
                    slow.add_assign(&torus_series_product(f, g));
                }
                assert_eq!(fast, slow);
            }
        }
    }

    #[test]
    fn integer_kernel_declines_huge_coefficients() {
        let theta = rational(1, 1);
        let t = Algebra::torus(theta.clone());
        let big = GaussianRational::new(BigRational::new(BigInt::from(3).pow(80u32), 1.into()), BigRational::zero());
        let f = FormalSeries::constant(Element::torus_mode(&t, [1, 0], big), 2);
        let g = FormalSeries::constant(Element::torus_mode(&t, [0, 1], GaussianRational::one()), 2);
        assert!(kernel::torus_sum_of_products(&theta, &[(&f, &g)], 2).is_none());
        let star = StarProduct::moyal(&t, 2);
        assert_eq!(star.multiply(&f, &g).unwrap(), torus_series_product(&f, &g));
    }

    #[test]
    fn unit_law() {
        let t = Algebra::torus(rational(1, 1));
        let star = StarProduct::moyal(&t, 4);
        let mut s = Sampler::new(2);
        let f = s.series(&t, 4);
        let one = FormalSeries::one(&t, 4);
        assert_eq!(star.multiply(&one, &f).unwrap(), f);
        assert_eq!(star.multiply(&f, &one).unwrap(), f);
    }

    #[test]
    fn builtin_products_satisfy_all_axioms() {
        for alg in [Algebra::canonical_plane(1), Algebra::canonical_plane(2), Algebra::torus(rational(1, 1))] {
            let report = check_star_axioms(&StarProduct::moyal(&alg, 3), 8, 5).unwrap();
            assert!(report.all_pass(), "{report:?}");
        }
    }

    #[test]
    fn corrupted_product_breaks_associativity_at_second_order() {
        for alg in [Algebra::canonical_plane(1), Algebra::torus(rational(1, 1))] {
            let report = check_star_axioms(&StarProduct::corrupted(&alg, 3), 20, 1).unwrap();
            assert!(report.check(Axiom::PoissonBracket).pass);
            assert!(report.check(Axiom::Product).pass);
            let assoc = report.check(Axiom::Associativity);
            assert!(!assoc.pass);
            assert_eq!(assoc.first_failing_order, Some(2));
            assert_eq!(assoc.witness.len(), 3);
        }
    }

    #[test]
    fn twist_intertwines() {
        let t = Algebra::torus(rational(1, 1));
        let star = StarProduct::moyal(&t, 3);
        let d1 = DifferentialOperator::new([(Element::one(&t), vec![1, 0])]).unwrap();
        let tr = EquivalenceTransform::new(3, vec![d1]);
        let twisted = twist_star(&tr, &star).unwrap();
        let mut s = Sampler::new(8);
        for _ in 0..5 {
            let f = s.series(&t, 3);
            let g = s.series(&t, 3);
            let lhs = tr.apply(&star.multiply(&f, &g).unwrap()).unwrap();
            let rhs = twisted.multiply(&tr.apply(&f).unwrap(), &tr.apply(&g).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
        assert!(check_star_axioms(&twisted, 6, 3).unwrap().all_pass());
        let same = twist_star(&EquivalenceTransform::identity(3), &star).unwrap();
        let f = s.series(&t, 3);
        let g = s.series(&t, 3);
        assert_eq!(same.multiply(&f, &g).unwrap(), star.multiply(&f, &g).unwrap());
    }

    #[test]
    fn lattice_swap_flips_the_phase() {
        let t = Algebra::torus(rational(1, 1));
        let star = StarProduct::moyal(&t, 3);
        let swap = Automorphism::lattice([[0, 1], [1, 0]]).unwrap();
        let twisted = twist_by_automorphism(&swap, &star).unwrap();
        let flipped = StarProduct::moyal(&Algebra::torus(rational(-1, 1)), 3);
        let e10 = Element::torus_mode(&t, [1, 0], q("1"));
        let e01 = Element::torus_mode(&t, [0, 1], q("1"));
        for r in 0..=3 {
            let via_phi = twisted.cochain(r, &e10, &e01).unwrap();
            let t2 = flipped.algebra().clone();
            let expected = flipped
                .cochain(r, &Element::torus_mode(&t2, [1, 0], q("1")), &Element::torus_mode(&t2, [0, 1], q("1")))
                .unwrap();
            assert_eq!(via_phi.num_terms(), expected.num_terms());
            assert_eq!(via_phi.coeff(&[1, 1]), expected.coeff(&[1, 1]));
        }
        // ⋆^Φ quantizes Φ_*π = −π: everything but the bracket axiom survives
        let report = check_star_axioms(&twisted, 6, 2).unwrap();
        for axiom in [Axiom::Product, Axiom::Unit, Axiom::Hermitian, Axiom::Associativity] {
            assert!(report.check(axiom).pass, "{axiom:?}");
        }
        assert!(!report.check(Axiom::PoissonBracket).pass);
    }

    #[test]
    fn translation_twist_keeps_the_product() {
        let t = Algebra::torus(rational(1, 1));
        let star = StarProduct::moyal(&t, 3);
        let phi = Automorphism::translation([rational(1, 2), rational(0, 1)]).unwrap();
        let twisted = twist_by_automorphism(&phi, &star).unwrap();
        let mut s = Sampler::new(6);
        for _ in 0..5 {
            let f = s.series(&t, 3);
            let g = s.series(&t, 3);
            assert_eq!(twisted.multiply(&f, &g).unwrap(), star.multiply(&f, &g).unwrap());
        }
        let plane = Algebra::canonical_plane(1);
        assert!(twist_by_automorphism(&phi, &StarProduct::moyal(&plane, 2)).is_err());
    }

    #[test]
    fn mismatched_truncation_is_an_error() {
        let t = Algebra::torus(rational(1, 1));
        let star = StarProduct::moyal(&t, 3);
        let f = FormalSeries::one(&t, 2);
        assert!(matches!(star.multiply(&f, &f), Err(Error::TruncationMismatch { .. })));
    }
}
