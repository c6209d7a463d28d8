//! Deformed transition matrices `Φ_{αβ}` and the identities
//! `Φ_{αβ}⋆Φ_{βα} = 𝟙`, `Φ_{αβ}⋆Φ_{βγ}⋆Φ_{γα} = 𝟙`.

use std::collections::BTreeMap;

use crate::algebra::Element;
use crate::bundle::IdentityCheck;
use crate::error::{Error, Result};
use crate::matrix::{ClassicalMatrix, StarMatrix};
use crate::series::FormalSeries;

#[derive(Clone, Debug, PartialEq)]
pub struct CocycleData {
    charts: Vec<String>,
    overlaps: BTreeMap<(String, String), StarMatrix>,
    triples: Vec<(String, String, String)>,
}

impl CocycleData {
    /// Checks that every overlap and triple refers to known charts, that the
    /// reverse of each overlap is present, and that all matrices share size and star.
    pub fn new(
        charts: Vec<String>,
        overlaps: Vec<((String, String), StarMatrix)>,
        triples: Vec<(String, String, String)>,
    ) -> Result<Self> {
        let known = |c: &String| charts.contains(c);
        let mut map = BTreeMap::new();
        let mut shape: Option<(usize, StarMatrix)> = None;
        for ((a, b), m) in overlaps {
            if !known(&a) || !known(&b) {
                return Err(Error::InvalidDescriptor(format!("overlap ({a},{b}) names an unknown chart")));
            }
            if !m.is_square() {
                return Err(Error::DimensionMismatch(format!("transition ({a},{b}) is not square")));
            }
            match &shape {
                Some((n, first)) => {
                    if m.rows() != *n {
                        return Err(Error::DimensionMismatch(format!("transition ({a},{b}) has size {}", m.rows())));
                    }
                    first.mul(&m)?;
                }
                None => shape = Some((m.rows(), m.clone())),
            }
            if map.insert((a.clone(), b.clone()), m).is_some() {
                return Err(Error::InvalidDescriptor(format!("overlap ({a},{b}) listed twice")));
            }
        }
        for (a, b) in map.keys() {
            if !map.contains_key(&(b.clone(), a.clone())) {
                return Err(Error::InvalidDescriptor(format!("overlap ({b},{a}) missing")));
            }
        }
        for (a, b, c) in &triples {
            for pair in [(a, b), (b, c), (c, a)] {
                if !map.contains_key(&(pair.0.clone(), pair.1.clone())) {
                    return Err(Error::InvalidDescriptor(format!(
                        "triple ({a},{b},{c}) needs overlap ({},{})",
                        pair.0, pair.1
                    )));
                }
            }
        }
        Ok(CocycleData { charts, overlaps: map, triples })
    }

    pub fn charts(&self) -> &[String] {
        &self.charts
    }

    pub fn transition(&self, a: &str, b: &str) -> Option<&StarMatrix> {
        self.overlaps.get(&(a.to_string(), b.to_string()))
    }

    pub fn overlaps(&self) -> impl Iterator<Item = (&(String, String), &StarMatrix)> {
        self.overlaps.iter()
    }

    pub fn triples(&self) -> &[(String, String, String)] {
        &self.triples
    }

    /// Adds `λ^order · c` to entry `(i, j)` of `Φ_{ab}`.
    pub fn perturbed(&self, a: &str, b: &str, i: usize, j: usize, order: usize, c: Element) -> Result<CocycleData> {
        let key = (a.to_string(), b.to_string());
        let m = self.overlaps.get(&key).ok_or_else(|| Error::InvalidDescriptor(format!("no overlap ({a},{b})")))?;
        if i >= m.rows() || j >= m.cols() {
            return Err(Error::IndexOutOfRange { index: i.max(j), dim: m.rows() });
        }
        let mut entries = m.entries().to_vec();
        let bump = FormalSeries::lambda_power(c, order, m.order());
        entries[i * m.cols() + j] = &entries[i * m.cols() + j] + &bump;
        let mut out = self.clone();
        out.overlaps.insert(key, StarMatrix::new(m.star(), m.rows(), m.cols(), entries)?);
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleReport {
    pub pairs: Vec<IdentityCheck>,
    pub triples: Vec<IdentityCheck>,
}

impl CocycleReport {
    pub fn pass(&self) -> bool {
        self.pairs.iter().chain(&self.triples).all(|c| c.pass)
    }

    /// Lowest failing order over all identities.
    pub fn first_failing_order(&self) -> Option<usize> {
        self.pairs.iter().chain(&self.triples).filter_map(|c| c.first_failing_order).min()
    }
}

pub fn verify_cocycle(data: &CocycleData) -> Result<CocycleReport> {
    let mut pairs = Vec::new();
    for ((a, b), m) in &data.overlaps {
        let back = &data.overlaps[&(b.clone(), a.clone())];
        let id = StarMatrix::identity(m.star(), m.rows());
        let mut check = IdentityCheck::new(format!("pair {a},{b}"));
        check.record(m.mul(back)?.first_difference(&id));
        pairs.push(check);
    }
    let mut triples = Vec::new();
    for (a, b, c) in &data.triples {
        let get = |x: &String, y: &String| &data.overlaps[&(x.clone(), y.clone())];
        let ab = get(a, b);
        let id = StarMatrix::identity(ab.star(), ab.rows());
        let mut check = IdentityCheck::new(format!("triple {a},{b},{c}"));
        check.record(ab.mul(get(b, c))?.mul(get(c, a))?.first_difference(&id));
        triples.push(check);
    }
    Ok(CocycleReport { pairs, triples })
}

/// Two charts `a`, `b` with `Φ_{ba} = Φ_{ab}^{⋆−1}`.
pub fn solve_two_chart_cocycle(
    phi_ab: &StarMatrix,
    classical_inverse: Option<&ClassicalMatrix>,
) -> Result<CocycleData> {
    let phi_ba = phi_ab.star_inverse(classical_inverse)?;
    let (a, b) = ("a".to_string(), "b".to_string());
    CocycleData::new(
        vec![a.clone(), b.clone()],
        vec![((a.clone(), b.clone()), phi_ab.clone()), ((b, a), phi_ba)],
        Vec::new(),
    )
}
