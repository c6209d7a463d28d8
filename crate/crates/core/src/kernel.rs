//! Integer kernel for sums of torus Weyl products.
//!
//! Every series is rescaled to Gaussian integers over a common denominator,
//! pair products are accumulated in checked `i128`, and the phase
//! `(−iθw/2)^r / r!` is applied as an integer numerator over `(2q)^K K!`
//! for `θ = p/q`. Any overflow returns `None` and the caller falls back to
//! rational arithmetic, so results are always exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rustc_hash::FxHashMap;
use smallvec::smallvec;

use crate::algebra::{Element, Key};
use crate::scalar::GaussianRational;
use crate::series::FormalSeries;

type Mode = (i64, i64);
type GaussInt = (i128, i128);

struct Scaled {
    den: i128,
    orders: Vec<Vec<(Mode, i128, i128)>>,
}

fn checked_lcm(a: i128, b: i128) -> Option<i128> {
    (a / a.gcd(&b)).checked_mul(b)
}

fn scale(f: &FormalSeries) -> Option<Scaled> {
    let mut den: i128 = 1;
    for c in f.coeffs() {
        for (_, v) in c.terms() {
            let [(_, rd), (_, id)] = v.small_parts()?;
            den = checked_lcm(den, rd as i128)?;
            den = checked_lcm(den, id as i128)?;
        }
    }
    let mut orders = Vec::with_capacity(f.coeffs().len());
    for c in f.coeffs() {
        let mut terms = Vec::with_capacity(c.num_terms());
        for (k, v) in c.terms() {
            let [(rn, rd), (inum, id)] = v.small_parts()?;
            let re = (rn as i128).checked_mul(den / rd as i128)?;
            let im = (inum as i128).checked_mul(den / id as i128)?;
            terms.push(((k[0], k[1]), re, im));
        }
        orders.push(terms);
    }
    Some(Scaled { den, orders })
}

fn mul_add(acc: &mut GaussInt, (ar, ai): GaussInt, (br, bi): GaussInt) -> Option<()> {
    let re = ar.checked_mul(br)?.checked_sub(ai.checked_mul(bi)?)?;
    let im = ar.checked_mul(bi)?.checked_add(ai.checked_mul(br)?)?;
    acc.0 = acc.0.checked_add(re)?;
    acc.1 = acc.1.checked_add(im)?;
    Some(())
}

/// `Σ_j f_j ⋆ g_j` for the Weyl product with parameter `θ` on the torus, truncated at `k`.
pub(crate) fn torus_sum_of_products(
    theta: &BigRational,
    pairs: &[(&FormalSeries, &FormalSeries)],
    k: usize,
) -> Option<Vec<Element>> {
    let alg = pairs.first()?.0.algebra().clone();
    let p = theta.numer().to_i128()?;
    let q = theta.denom().to_i128()?;
    let scaled: Vec<(Scaled, Scaled)> =
        pairs.iter().map(|(f, g)| Some((scale(f)?, scale(g)?))).collect::<Option<_>>()?;
    let mut den: i128 = 1;
    for (f, g) in &scaled {
        den = checked_lcm(den, f.den.checked_mul(g.den)?)?;
    }

    let mut buckets: FxHashMap<(usize, Mode, i64), GaussInt> = FxHashMap::default();
    for (f, g) in &scaled {
        let factor = den / (f.den * g.den);
        for a in 0..=k {
            for (m, fr, fi) in &f.orders[a] {
                let (fr, fi) = (fr.checked_mul(factor)?, fi.checked_mul(factor)?);
                for b in 0..=k - a {
                    for (n, gr, gi) in &g.orders[b] {
                        let wedge = if p == 0 { 0 } else { m.0.checked_mul(n.1)?.checked_sub(m.1.checked_mul(n.0)?)? };
                        let key = (a + b, (m.0 + n.0, m.1 + n.1), wedge);
                        mul_add(buckets.entry(key).or_insert((0, 0)), (fr, fi), (*gr, *gi))?;
                    }
                }
            }
        }
    }

    // phase numerator for order r: (−i)^r (p w)^r (2q)^{k−r} k!/r!, over (2q)^k k!
    let two_q = q.checked_mul(2)?;
    let mut tail = vec![1i128; k + 1];
    for r in (0..k).rev() {
        tail[r] = tail[r + 1].checked_mul(two_q)?.checked_mul((r + 1) as i128)?;
    }
    let total_den = den.checked_mul(tail[0])?;

    let mut out: Vec<FxHashMap<Mode, GaussInt>> = vec![FxHashMap::default(); k + 1];
    for ((s, mode, wedge), (re, im)) in buckets {
        if re == 0 && im == 0 {
            continue;
        }
        let pw = p.checked_mul(wedge as i128)?;
        let mut power: i128 = 1;
        for r in 0..=k - s {
            if r > 0 {
                if pw == 0 {
                    break;
                }
                power = power.checked_mul(pw)?;
            }
            let mag = power.checked_mul(tail[r])?;
            let (ur, ui) = match r % 4 {
                0 => (re, im),
                1 => (im, -re),
                2 => (-re, -im),
                _ => (-im, re),
            };
            let slot = out[s + r].entry(mode).or_insert((0, 0));
            slot.0 = slot.0.checked_add(ur.checked_mul(mag)?)?;
            slot.1 = slot.1.checked_add(ui.checked_mul(mag)?)?;
        }
    }

    let big_den = BigInt::from(total_den);
    let coeffs = out
        .into_iter()
        .map(|terms| {
            let map: BTreeMap<Key, GaussianRational> = terms
                .into_iter()
                .filter(|(_, (re, im))| *re != 0 || *im != 0)
                .map(|((m0, m1), (re, im))| {
                    let c = GaussianRational::new(
                        BigRational::new(BigInt::from(re), big_den.clone()),
                        BigRational::new(BigInt::from(im), big_den.clone()),
                    );
                    (smallvec![m0, m1], c)
                })
                .collect();
            Element::from_key_map(&alg, map)
        })
        .collect();
    Some(coeffs)
}
