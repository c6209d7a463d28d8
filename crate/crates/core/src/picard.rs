//! Class-level Picard data for symplectic star products: the
//! characteristic-class Morita criterion, outer self-equivalences and the
//! kernel of the classical limit.
//!
//! Order-0 class components and `OutEquiv` classes are stored in units of
//! `2πi`, so integrality is plain lattice membership.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::GaussianRational;

/// `(ψ₁, d₁) ∘ (ψ₂, d₂)`, chosen so that the result satisfies the criterion for the chained pair.
pub const COMPOSITION_CONVENTION: &str = "(psi1, d1) o (psi2, d2) = (psi1 psi2, d1 + A2(psi1) d2)";

/// Which class the diffeomorphism acts on in `ψ*c(⋆′) − c(⋆)`.
pub const SIDEDNESS: &str = "psi acts on the second class";

pub type IntMatrix = Vec<Vec<i64>>;

fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn is_square(m: &IntMatrix, n: usize) -> bool {
    m.len() == n && m.iter().all(|row| row.len() == n)
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    let n = a.len();
    let mut out = vec![vec![0i64; b.first().map_or(0, Vec::len)]; n];
    for i in 0..n {
        for (j, slot) in out[i].iter_mut().enumerate() {
            let mut acc: i64 = 0;
            for (k, row) in b.iter().enumerate() {
                acc = a[i][k]
                    .checked_mul(row[j])
                    .and_then(|p| acc.checked_add(p))
                    .ok_or_else(|| Error::Unsupported("integer overflow in action product".into()))?;
            }
            *slot = acc;
        }
    }
    Ok(out)
}

fn act(a: &IntMatrix, v: &[GaussianRational]) -> Vec<GaussianRational> {
    a.iter()
        .map(|row| {
            let mut acc = GaussianRational::zero();
            for (&x, c) in row.iter().zip(v) {
                if x != 0 && !c.is_zero() {
                    acc += &c.scale(&BigRational::from_integer(x.into()));
                }
            }
            acc
        })
        .collect()
}

fn act_int(a: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|row| row.iter().zip(v).map(|(&x, d)| BigInt::from(x) * d).sum()).collect()
}

/// A diffeomorphism seen through its action on `H¹` (`a1`) and `H²` (`a2`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeAction {
    pub name: String,
    pub a1: IntMatrix,
    pub a2: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyModel {
    d1: usize,
    d2: usize,
    omega: Vec<BigRational>,
    actions: Vec<LatticeAction>,
    symplectic: bool,
}

impl CohomologyModel {
    /// Validates shapes and unimodularity; an identity action named `id` is
    /// prepended when none of the given actions is the identity.
    pub fn new(
        d1: usize,
        d2: usize,
        omega: Vec<BigRational>,
        actions: Vec<LatticeAction>,
        symplectic: bool,
    ) -> Result<Self> {
        if omega.len() != d2 {
            return Err(Error::DimensionMismatch(format!("omega has {} components, d2 = {d2}", omega.len())));
        }
        for a in &actions {
            if !is_square(&a.a1, d1) || !is_square(&a.a2, d2) {
                return Err(Error::DimensionMismatch(format!("action {:?} has the wrong shape", a.name)));
            }
            for (label, m) in [("A1", &a.a1), ("A2", &a.a2)] {
                let det = determinant(m);
                if det != BigInt::one() && det != -BigInt::one() {
                    return Err(Error::InvalidDescriptor(format!(
                        "{label} of action {:?} has determinant {det}, not ±1",
                        a.name
                    )));
                }
            }
        }
        let mut names: Vec<&str> = actions.iter().map(|a| a.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidDescriptor("action names must be unique".into()));
        }
        let mut actions = actions;
        let (i1, i2) = (identity(d1), identity(d2));
        if !actions.iter().any(|a| a.a1 == i1 && a.a2 == i2) {
            if actions.iter().any(|a| a.name == "id") {
                return Err(Error::InvalidDescriptor("action \"id\" is not the identity".into()));
            }
            actions.insert(0, LatticeAction { name: "id".into(), a1: i1, a2: i2 });
        }
        Ok(CohomologyModel { d1, d2, omega, actions, symplectic })
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn omega(&self) -> &[BigRational] {
        &self.omega
    }

    pub fn actions(&self) -> &[LatticeAction] {
        &self.actions
    }

    pub fn is_symplectic(&self) -> bool {
        self.symplectic
    }

    pub fn action(&self, name: &str) -> Option<&LatticeAction> {
        self.actions.iter().find(|a| a.name == name)
    }

    /// `[ω]/i`, the `λ^{-1}` coefficient of every class of the model.
    pub fn leading(&self) -> Vec<GaussianRational> {
        self.omega.iter().map(|w| GaussianRational::new(BigRational::zero(), -w)).collect()
    }
}

/// `c = leading/λ + Σ_r λ^r orders[r]`, with `orders[0]` in units of `2πi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacteristicClass {
    pub leading: Vec<GaussianRational>,
    pub orders: Vec<Vec<GaussianRational>>,
}

impl CharacteristicClass {
    pub fn new(leading: Vec<GaussianRational>, orders: Vec<Vec<GaussianRational>>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::Precondition("a class needs at least the order-0 component".into()));
        }
        if orders.iter().any(|o| o.len() != leading.len()) {
            return Err(Error::DimensionMismatch("class components of different lengths".into()));
        }
        Ok(CharacteristicClass { leading, orders })
    }

    /// A class with the model's leading term.
    pub fn from_model(model: &CohomologyModel, orders: Vec<Vec<GaussianRational>>) -> Result<Self> {
        CharacteristicClass::new(model.leading(), orders)
    }

    pub fn dim(&self) -> usize {
        self.leading.len()
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.orders.len() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoritaWitness {
    pub action: String,
    pub class: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoritaReport {
    pub equivalent: bool,
    pub witness: Option<MoritaWitness>,
}

fn check_classes(c: &CharacteristicClass, c_prime: &CharacteristicClass, model: &CohomologyModel) -> Result<()> {
    if c.dim() != model.d2 || c_prime.dim() != model.d2 {
        return Err(Error::DimensionMismatch(format!(
            "classes of dimension {} and {} for d2 = {}",
            c.dim(),
            c_prime.dim(),
            model.d2
        )));
    }
    if c.order() != c_prime.order() {
        return Err(Error::TruncationMismatch { left: c.order(), right: c_prime.order() });
    }
    Ok(())
}

/// The integer vector `A2·c′₀ − c₀` when `action` witnesses the criterion.
fn witness_for(action: &LatticeAction, c: &CharacteristicClass, c_prime: &CharacteristicClass) -> Option<Vec<BigInt>> {
    if act(&action.a2, &c_prime.leading) != c.leading {
        return None;
    }
    for r in 1..=c.order() {
        if act(&action.a2, &c_prime.orders[r]) != c.orders[r] {
            return None;
        }
    }
    act(&action.a2, &c_prime.orders[0]).iter().zip(&c.orders[0]).map(|(a, b)| (a - b).as_integer()).collect()
}

/// Searches the model's actions, in order, for `ψ` with `ψ*c′ − c ∈ 2πi H²(M, ℤ)`.
pub fn morita_check(
    c: &CharacteristicClass,
    c_prime: &CharacteristicClass,
    model: &CohomologyModel,
) -> Result<MoritaReport> {
    check_classes(c, c_prime, model)?;
    for action in &model.actions {
        if let Some(class) = witness_for(action, c, c_prime) {
            return Ok(MoritaReport {
                equivalent: true,
                witness: Some(MoritaWitness { action: action.name.clone(), class }),
            });
        }
    }
    Ok(MoritaReport { equivalent: false, witness: None })
}

/// Whether `w` witnesses the criterion for `(c, c′)`.
pub fn verify_witness(
    w: &MoritaWitness,
    c: &CharacteristicClass,
    c_prime: &CharacteristicClass,
    model: &CohomologyModel,
) -> Result<bool> {
    check_classes(c, c_prime, model)?;
    let action = model
        .action(&w.action)
        .ok_or_else(|| Error::InvalidDescriptor(format!("unknown action {:?}", w.action)))?;
    Ok(witness_for(action, c, c_prime).as_ref() == Some(&w.class))
}

/// Composes witnesses for `(c, c′)` and `(c′, c″)` into one for `(c, c″)`,
/// following [`COMPOSITION_CONVENTION`], and re-verifies the result.
pub fn compose_witnesses(
    model: &CohomologyModel,
    w1: &MoritaWitness,
    w2: &MoritaWitness,
    classes: [&CharacteristicClass; 3],
) -> Result<MoritaWitness> {
    let [c, c1, c2] = classes;
    if !verify_witness(w1, c, c1, model)? || !verify_witness(w2, c1, c2, model)? {
        return Err(Error::Precondition("input witnesses do not witness the chained classes".into()));
    }
    let psi1 = model.action(&w1.action).expect("verified");
    let psi2 = model.action(&w2.action).expect("verified");
    let a1 = mat_mul(&psi1.a1, &psi2.a1)?;
    let a2 = mat_mul(&psi1.a2, &psi2.a2)?;
    let composed = model.actions.iter().find(|a| a.a1 == a1 && a.a2 == a2).ok_or_else(|| {
        Error::Inconsistency(format!("composite of {:?} and {:?} is not in the action list", w1.action, w2.action))
    })?;
    let class: Vec<BigInt> = w1.class.iter().zip(act_int(&psi1.a2, &w2.class)).map(|(a, b)| a + b).collect();
    let out = MoritaWitness { action: composed.name.clone(), class };
    if !verify_witness(&out, c, c2, model)? {
        return Err(Error::Inconsistency(format!("composed witness {out:?} fails the criterion")));
    }
    Ok(out)
}

/// Class of an outer self-equivalence: `v0 ∈ H¹(ℂ)/H¹(ℤ)` in units of `2πi`, plus order-`r` components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutEquivElement {
    pub v0: Vec<GaussianRational>,
    /// `higher[r - 1]` is the order-`r` component.
    pub higher: Vec<Vec<GaussianRational>>,
}

impl OutEquivElement {
    pub fn identity(d1: usize, order: usize) -> Self {
        OutEquivElement { v0: vec![GaussianRational::zero(); d1], higher: vec![vec![GaussianRational::zero(); d1]; order] }
    }

    pub fn dim(&self) -> usize {
        self.v0.len()
    }

    pub fn order(&self) -> usize {
        self.higher.len()
    }

    pub fn inverse(&self) -> Self {
        outequiv_normal_form(&OutEquivElement {
            v0: self.v0.iter().map(|x| -x).collect(),
            higher: self.higher.iter().map(|v| v.iter().map(|x| -x).collect()).collect(),
        })
    }
}

/// Reduces the real part of each `v0` coordinate into `[0, 1)`.
pub fn outequiv_normal_form(e: &OutEquivElement) -> OutEquivElement {
    let v0 = e
        .v0
        .iter()
        .map(|x| {
            let re = x.re();
            GaussianRational::new(&re - re.floor(), x.im())
        })
        .collect();
    OutEquivElement { v0, higher: e.higher.clone() }
}

pub fn outequiv_compose(model: &CohomologyModel, e1: &OutEquivElement, e2: &OutEquivElement) -> Result<OutEquivElement> {
    if !model.symplectic {
        return Err(Error::Unsupported("OutEquiv composition is only defined for symplectic models".into()));
    }
    if e1.dim() != model.d1 || e2.dim() != model.d1 {
        return Err(Error::DimensionMismatch(format!("elements of dimension {} and {} for d1 = {}", e1.dim(), e2.dim(), model.d1)));
    }
    if e1.order() != e2.order() {
        return Err(Error::TruncationMismatch { left: e1.order(), right: e2.order() });
    }
    let add = |a: &[GaussianRational], b: &[GaussianRational]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>();
    Ok(outequiv_normal_form(&OutEquivElement {
        v0: add(&e1.v0, &e2.v0),
        higher: e1.higher.iter().zip(&e2.higher).map(|(a, b)| add(a, b)).collect(),
    }))
}

/// `ker cl_* ≅ (ℂ/ℤ)^{d1} × (ℂ^{d1})^K` in units of `2πi` at order 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelDescription {
    pub d1: usize,
    pub order: usize,
    /// Dimension of the order-0 quotient torus.
    pub torus_dimension: usize,
    /// Dimension of the free factor at each order `1..=K`.
    pub free_layers: Vec<usize>,
    pub generator_count: usize,
    pub torsion: String,
    pub trivial: bool,
}

pub fn kernel_description(model: &CohomologyModel, order: usize) -> Result<KernelDescription> {
    if !model.symplectic {
        return Err(Error::Unsupported("kernel description is only available for symplectic models".into()));
    }
    let d1 = model.d1;
    let torsion = if d1 == 0 { "trivial".to_string() } else { format!("(Q/Z)^{d1}") };
    Ok(KernelDescription {
        d1,
        order,
        torus_dimension: d1,
        free_layers: vec![d1; order],
        generator_count: d1 * (order + 1),
        torsion,
        trivial: d1 == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn torus_model() -> CohomologyModel {
        CohomologyModel::new(2, 1, vec![rational(1, 1)], vec![], true).unwrap()
    }

    fn swap_model() -> CohomologyModel {
        let swap = LatticeAction { name: "swap".into(), a1: vec![vec![0, 1], vec![1, 0]], a2: vec![vec![0, 1], vec![1, 0]] };
        CohomologyModel::new(2, 2, vec![rational(1, 1), rational(2, 1)], vec![swap], true).unwrap()
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&vec![vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(determinant(&vec![vec![2, 3, 1], vec![4, 1, 0], vec![0, 5, 3]]), BigInt::from(-10));
        assert_eq!(determinant(&vec![vec![1, 2], vec![2, 4]]), BigInt::zero());
        assert_eq!(determinant(&identity(4)), BigInt::one());
    }

    #[test]
    fn identity_action_is_inserted() {
        let m = torus_model();
        assert_eq!(m.actions()[0].name, "id");
        let bad = LatticeAction { name: "b".into(), a1: vec![vec![2, 0], vec![0, 1]], a2: vec![vec![1]] };
        assert!(CohomologyModel::new(2, 1, vec![rational(1, 1)], vec![bad], true).is_err());
    }

    #[test]
    fn line_bundle_shifts() {
        let m = torus_model();
        let c = CharacteristicClass::from_model(&m, vec![vec![g("1/3")], vec![g("2")]]).unwrap();
        let same = morita_check(&c, &c, &m).unwrap();
        assert_eq!(same.witness, Some(MoritaWitness { action: "id".into(), class: vec![BigInt::zero()] }));
        for (shift, ok) in [("-2", true), ("-1/2", false), ("0", true), ("1/2", false), ("3", true)] {
            let c2 = CharacteristicClass::from_model(&m, vec![vec![&g("1/3") + &g(shift)], vec![g("2")]]).unwrap();
            let report = morita_check(&c, &c2, &m).unwrap();
            assert_eq!(report.equivalent, ok, "shift {shift}");
            if ok {
                assert_eq!(report.witness.unwrap().class[0].to_string(), shift);
            }
        }
        let imaginary = CharacteristicClass::from_model(&m, vec![vec![&g("1/3") + &g("i")], vec![g("2")]]).unwrap();
        assert!(!morita_check(&c, &imaginary, &m).unwrap().equivalent);
        let higher = CharacteristicClass::from_model(&m, vec![vec![g("1/3")], vec![g("5/2")]]).unwrap();
        assert!(!morita_check(&c, &higher, &m).unwrap().equivalent);
    }

    #[test]
    fn swap_witness() {
        let m = swap_model();
        let c = CharacteristicClass::new(vec![g("-i"), g("-2 i")], vec![vec![g("0"), g("0")]]).unwrap();
        let c2 = CharacteristicClass::new(vec![g("-2 i"), g("-i")], vec![vec![g("0"), g("0")]]).unwrap();
        let report = morita_check(&c, &c2, &m).unwrap();
        assert_eq!(report.witness.unwrap().action, "swap");
        let w = MoritaWitness { action: "swap".into(), class: vec![BigInt::zero(), BigInt::zero()] };
        let composed = compose_witnesses(&m, &w, &w, [&c, &c2, &c]).unwrap();
        assert_eq!(composed, MoritaWitness { action: "id".into(), class: vec![BigInt::zero(), BigInt::zero()] });
    }

    #[test]
    fn witness_composition_on_the_line() {
        let m = torus_model();
        let class = |x: &str| CharacteristicClass::from_model(&m, vec![vec![g(x)]]).unwrap();
        let (a, b, c) = (class("0"), class("3"), class("0"));
        let w1 = morita_check(&a, &b, &m).unwrap().witness.unwrap();
        let w2 = morita_check(&b, &c, &m).unwrap().witness.unwrap();
        assert_eq!(w1.class, vec![BigInt::from(3)]);
        let composed = compose_witnesses(&m, &w1, &w2, [&a, &b, &c]).unwrap();
        assert_eq!(composed, MoritaWitness { action: "id".into(), class: vec![BigInt::zero()] });
        assert!(compose_witnesses(&m, &w2, &w1, [&a, &b, &c]).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let m = swap_model();
        let c = CharacteristicClass::new(vec![g("1")], vec![vec![g("0")]]).unwrap();
        assert!(matches!(morita_check(&c, &c, &m), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn outequiv_arithmetic() {
        let m = torus_model();
        let e = OutEquivElement { v0: vec![g("5/2"), g("-1/3")], higher: vec![] };
        assert_eq!(outequiv_normal_form(&e).v0, vec![g("1/2"), g("2/3")]);
        let half = OutEquivElement { v0: vec![g("1/2"), g("0")], higher: vec![] };
        assert_eq!(outequiv_compose(&m, &half, &half).unwrap(), OutEquivElement::identity(2, 0));
        let e = outequiv_normal_form(&OutEquivElement { v0: vec![g("1/3+i"), g("7/4")], higher: vec![vec![g("i"), g("2")]] });
        assert_eq!(outequiv_compose(&m, &e, &OutEquivElement::identity(2, 1)).unwrap(), e);
        assert_eq!(outequiv_compose(&m, &e, &e.inverse()).unwrap(), OutEquivElement::identity(2, 1));
        let poisson = CohomologyModel::new(2, 1, vec![rational(1, 1)], vec![], false).unwrap();
        assert!(matches!(outequiv_compose(&poisson, &e, &e), Err(Error::Unsupported(_))));
    }

    #[test]
    fn kernels() {
        let k = kernel_description(&torus_model(), 3).unwrap();
        assert_eq!((k.torus_dimension, k.free_layers.clone(), k.generator_count), (2, vec![2, 2, 2], 8));
        let zero = CohomologyModel::new(0, 1, vec![rational(1, 1)], vec![], true).unwrap();
        assert!(kernel_description(&zero, 2).unwrap().trivial);
        let circle = CohomologyModel::new(1, 0, vec![], vec![], true).unwrap();
        let k = kernel_description(&circle, 0).unwrap();
        assert_eq!((k.torus_dimension, k.free_layers.len()), (1, 0));
        let poisson = CohomologyModel::new(1, 0, vec![], vec![], false).unwrap();
        assert!(kernel_description(&poisson, 1).is_err());
    }
}
