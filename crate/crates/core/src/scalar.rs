//! Exact Gaussian rationals, the scalar ring of every computation.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A rational kept as `Ratio<i64>` while it fits and promoted to a
/// `BigRational` only on overflow. Values that fit are never stored big, so
/// derived equality and hashing are exact.
#[derive(Clone, PartialEq, Eq, Hash)]
enum Q {
    Small(Ratio<i64>),
    Big(BigRational),
}

impl Q {
    const ZERO: Q = Q::Small(Ratio::new_raw(0, 1));

    fn from_big(r: BigRational) -> Q {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Q::Small(Ratio::new_raw(n, d)),
            _ => Q::Big(r),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Q::Small(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Q::Big(r) => r.clone(),
        }
    }

    fn small(r: Option<Ratio<i64>>) -> Option<Q> {
        r.filter(|r| *r.numer() != i64::MIN).map(Q::Small)
    }

    fn is_zero(&self) -> bool {
        matches!(self, Q::Small(r) if r.is_zero())
    }

    fn is_negative(&self) -> bool {
        match self {
            Q::Small(r) => r.is_negative(),
            Q::Big(r) => r.is_negative(),
        }
    }

    fn add(&self, rhs: &Q) -> Q {
        if let (Q::Small(a), Q::Small(b)) = (self, rhs) {
            if let Some(q) = Q::small(a.checked_add(b)) {
                return q;
            }
        }
        Q::from_big(self.to_big() + rhs.to_big())
    }

    fn sub(&self, rhs: &Q) -> Q {
        if let (Q::Small(a), Q::Small(b)) = (self, rhs) {
            if let Some(q) = Q::small(a.checked_sub(b)) {
                return q;
            }
        }
        Q::from_big(self.to_big() - rhs.to_big())
    }

    fn mul(&self, rhs: &Q) -> Q {
        if self.is_zero() || rhs.is_zero() {
            return Q::ZERO;
        }
        if let (Q::Small(a), Q::Small(b)) = (self, rhs) {
            if let Some(q) = Q::small(a.checked_mul(b)) {
                return q;
            }
        }
        Q::from_big(self.to_big() * rhs.to_big())
    }

    fn neg(&self) -> Q {
        match self {
            Q::Small(r) => Q::Small(-r),
            Q::Big(r) => Q::from_big(-r),
        }
    }
}

/// An element `re + im·i` of ℚ(i).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    re: Q,
    im: Q,
}

impl Default for GaussianRational {
    fn default() -> Self {
        GaussianRational::zero()
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re: Q::from_big(re), im: Q::from_big(im) }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussianRational::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn real(re: BigRational) -> Self {
        GaussianRational { re: Q::from_big(re), im: Q::ZERO }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        GaussianRational::real(rational(num, den))
    }

    pub fn i() -> Self {
        GaussianRational::from_ints(0, 1)
    }

    pub fn re(&self) -> BigRational {
        self.re.to_big()
    }

    pub fn im(&self) -> BigRational {
        self.im.to_big()
    }

    /// `[(re_num, re_den), (im_num, im_den)]` when both parts fit in `i64`.
    pub(crate) fn small_parts(&self) -> Option<[(i64, i64); 2]> {
        match (&self.re, &self.im) {
            (Q::Small(a), Q::Small(b)) => Some([(*a.numer(), *a.denom()), (*b.numer(), *b.denom())]),
            _ => None,
        }
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `Some(n)` when the value is a rational integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        let re = self.re();
        (self.im.is_zero() && re.is_integer()).then(|| re.to_integer())
    }

    pub fn inv(&self) -> Option<Self> {
        let norm = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        if norm.is_zero() {
            return None;
        }
        let norm = norm.to_big();
        Some(GaussianRational::new(self.re() / &norm, -self.im() / &norm))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let r = Q::from_big(r.clone());
        GaussianRational { re: self.re.mul(&r), im: self.im.mul(&r) }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = GaussianRational::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational { re: Q::ZERO, im: Q::ZERO }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational { re: Q::Small(Ratio::new_raw(1, 1)), im: Q::ZERO }
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: self.re.add(&rhs.re), im: self.im.add(&rhs.im) }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: self.re.sub(&rhs.re), im: self.im.sub(&rhs.im) }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        match (self.im.is_zero(), rhs.im.is_zero()) {
            (true, true) => GaussianRational { re: self.re.mul(&rhs.re), im: Q::ZERO },
            (true, false) => GaussianRational { re: self.re.mul(&rhs.re), im: self.re.mul(&rhs.im) },
            (false, true) => GaussianRational { re: self.re.mul(&rhs.re), im: self.im.mul(&rhs.re) },
            (false, false) => GaussianRational {
                re: self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im)),
                im: self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re)),
            },
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: self.re.neg(), im: self.im.neg() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        if !rhs.re.is_zero() {
            self.re = self.re.add(&rhs.re);
        }
        if !rhs.im.is_zero() {
            self.im = self.im.add(&rhs.im);
        }
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        if !rhs.re.is_zero() {
            self.re = self.re.sub(&rhs.re);
        }
        if !rhs.im.is_zero() {
            self.im = self.im.sub(&rhs.im);
        }
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical form: `"a/b+c/d i"`, zero parts omitted, `"0"` for zero and a
/// bare `i` for unit imaginary parts.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = (self.re(), self.im());
        let im_part = |lead_sign: bool| -> String {
            let abs = im.abs();
            let body = if abs.is_one() { "i".to_string() } else { format!("{} i", fmt_rational(&abs)) };
            match (self.im.is_negative(), lead_sign) {
                (true, _) => format!("-{body}"),
                (false, true) => format!("+{body}"),
                (false, false) => body,
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", fmt_rational(&re)),
            (true, false) => write!(f, "{}", im_part(false)),
            (false, false) => write!(f, "{}{}", fmt_rational(&re), im_part(true)),
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let r = BigRational::from_str(s).map_err(|_| bad())?;
    Ok(r)
}

impl FromStr for GaussianRational {
    type Err = Error;

    /// Accepts `"3/2"`, `"-1/4 i"`, `"i"`, `"-i"`, `"1/2+3 i"`, `"2-i"`; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let Some(body) = compact.strip_suffix('i') else {
            return Ok(GaussianRational::real(parse_rational(&compact)?));
        };
        // split off the real part at the last sign that is not leading
        let split = body
            .char_indices()
            .filter(|&(idx, c)| idx > 0 && (c == '+' || c == '-'))
            .map(|(idx, _)| idx)
            .last();
        let (re_str, im_str) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("", body),
        };
        let im = match im_str {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other.strip_prefix('+').unwrap_or(other))?,
        };
        let re = if re_str.is_empty() { BigRational::zero() } else { parse_rational(re_str)? };
        Ok(GaussianRational::new(re, im))
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(GaussianRational::from_ints(n, 0)),
        }
    }
}

/// Real rationals on the wire (Poisson entries, θ, ω), as strings or integers.
pub mod rational_serde {
    use super::*;

    pub fn parse(value: &str) -> Result<BigRational> {
        let g: GaussianRational = value.parse()?;
        if !g.is_real() {
            return Err(Error::Parse(format!("expected a real rational, got {value:?}")));
        }
        Ok(g.re())
    }

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let g = GaussianRational::deserialize(d)?;
        if !g.is_real() {
            return Err(serde::de::Error::custom("expected a real rational"));
        }
        Ok(g.re())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(GaussianRational::ratio(3, 2).to_string(), "3/2");
        assert_eq!(GaussianRational::new(rational(0, 1), rational(-1, 4)).to_string(), "-1/4 i");
        assert_eq!(GaussianRational::new(rational(1, 2), rational(3, 4)).to_string(), "1/2+3/4 i");
        assert_eq!(GaussianRational::from_ints(0, -1).to_string(), "-i");
        assert_eq!(GaussianRational::zero().to_string(), "0");
    }

    #[test]
    fn parses_all_forms() {
        assert_eq!(q("1/1"), GaussianRational::one());
        assert_eq!(q("-1/4 i"), GaussianRational::new(rational(0, 1), rational(-1, 4)));
        assert_eq!(q("1/2+3/4 i"), GaussianRational::new(rational(1, 2), rational(3, 4)));
        assert_eq!(q("2 - i"), GaussianRational::from_ints(2, -1));
        assert_eq!(q("-i"), GaussianRational::from_ints(0, -1));
        assert_eq!(q("i"), GaussianRational::i());
        assert!("x".parse::<GaussianRational>().is_err());
        assert!("1/0".parse::<GaussianRational>().is_err());
    }

    #[test]
    fn field_arithmetic() {
        let a = q("1/2+i");
        let b = q("-3+2/3 i");
        let prod = &a * &b;
        assert_eq!(prod, q("-13/6-8/3 i"));
        assert_eq!(&(&a * &a.inv().unwrap()), &GaussianRational::one());
        assert_eq!(a.conj().conj(), a);
        assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        assert_eq!(&GaussianRational::i() * &GaussianRational::i(), -GaussianRational::one());
        assert!(GaussianRational::zero().inv().is_none());
    }

    #[test]
    fn display_parse_roundtrip() {
        for s in ["0", "7", "-5/3", "i", "-2 i", "1/3-1/7 i", "-4+i"] {
            let g = q(s);
            assert_eq!(q(&g.to_string()), g);
        }
    }
}
