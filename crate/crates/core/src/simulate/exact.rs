use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::ratlinalg::{format_rational, int, Rational};
use crate::{Error, Result};

use super::tree::{MSTree, Statistic};

/// Largest `n` for exhaustive enumeration (`9! = 362880` gap sequences).
pub const EXACT_N_MAX: u64 = 9;

/// Exact law of a statistic after `n` insertions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDist {
    pub n: u64,
    pub pmf: BTreeMap<u64, Rational>,
}

impl ExactDist {
    pub fn mean(&self) -> Rational {
        self.pmf.iter().map(|(&v, p)| p * int(v as i64)).sum()
    }

    pub fn prob(&self, v: u64) -> Rational {
        self.pmf.get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.pmf.values().sum()
    }
}

impl Serialize for ExactDist {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Pmf<'a>(&'a BTreeMap<u64, Rational>);
        impl Serialize for Pmf<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (v, p) in self.0 {
                    m.serialize_entry(&v.to_string(), &format_rational(p))?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("n", &self.n)?;
        m.serialize_entry("pmf", &Pmf(&self.pmf))?;
        m.end()
    }
}

/// Enumerates every gap sequence of length `n_max`; each prefix of length
/// `n` has probability `1/n!`. Returns the laws for `n = 0..=n_max`.
pub fn exact_small_n(m: usize, n_max: u64, stat: Statistic) -> Result<Vec<ExactDist>> {
    if n_max > EXACT_N_MAX {
        return Err(Error::Size(format!(
            "exhaustive enumeration is capped at n <= {EXACT_N_MAX}, got {n_max}"
        )));
    }
    let mut counts: Vec<BTreeMap<u64, u64>> = vec![BTreeMap::new(); n_max as usize + 1];
    let tree = MSTree::new(m)?;
    walk(&tree, n_max, stat, &mut counts);
    let mut fact = Rational::one();
    let mut out = Vec::with_capacity(counts.len());
    for (n, c) in counts.into_iter().enumerate() {
        if n > 0 {
            fact *= int(n as i64);
        }
        let pmf = c
            .into_iter()
            .map(|(v, k)| (v, int(k as i64) / &fact))
            .collect();
        out.push(ExactDist { n: n as u64, pmf });
    }
    Ok(out)
}

fn walk(t: &MSTree, n_max: u64, stat: Statistic, counts: &mut [BTreeMap<u64, u64>]) {
    let n = t.n();
    *counts[n as usize]
        .entry(t.count_stats().get(stat))
        .or_insert(0) += 1;
    if n == n_max {
        return;
    }
    for r in 0..=n {
        let mut c = t.clone();
        c.insert_key(r).expect("rank in range");
        walk(&c, n_max, stat, counts);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::rat;

    #[test]
    fn binary_three_keys() {
        let d = exact_small_n(2, 3, Statistic::TwoProtected).unwrap();
        assert_eq!(d[3].prob(1), rat(2, 3));
        assert_eq!(d[3].prob(0), rat(1, 3));
        assert_eq!(d[3].mean(), rat(2, 3));
        let l = exact_small_n(2, 3, Statistic::Leaves).unwrap();
        assert_eq!(l[3].mean(), rat(4, 3));
        for x in &d {
            assert_eq!(x.total(), Rational::one());
        }
    }

    #[test]
    fn ternary_two_keys() {
        let d = exact_small_n(3, 2, Statistic::TwoProtected).unwrap();
        assert_eq!(d[2].prob(0), Rational::one());
    }

    #[test]
    fn cap() {
        assert!(matches!(
            exact_small_n(2, 10, Statistic::Leaves),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn json_shape() {
        let d = exact_small_n(2, 3, Statistic::TwoProtected).unwrap();
        let v = serde_json::to_value(&d[3]).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"n": 3, "pmf": {"0": "1/3", "1": "2/3"}})
        );
    }
}
