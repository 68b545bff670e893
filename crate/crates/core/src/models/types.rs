use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A small tree: the root's children hold `k[i]` external nodes (`i = 0`) or
/// leaves with `i` keys. Children that are non-leaves are cut away.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SmallTreeType {
    pub k: Vec<u32>,
}

impl SmallTreeType {
    pub fn m(&self) -> usize {
        self.k.len()
    }

    /// Number of gaps, `Σ (i+1) k_i`.
    pub fn activity(&self) -> u64 {
        self.k
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u64 + 1) * c as u64)
            .sum()
    }

    /// No leaf children.
    pub fn protected(&self) -> bool {
        self.k[1..].iter().all(|&c| c == 0)
    }

    pub fn leaf_count(&self) -> u64 {
        self.k[1..].iter().map(|&c| c as u64).sum()
    }

    /// `(m-1, 1, 0, ..., 0)`: a root that has just become full.
    pub fn fresh(m: usize) -> Self {
        let mut k = vec![0; m];
        k[0] = m as u32 - 1;
        k[1] += 1;
        Self { k }
    }
}

impl fmt::Display for SmallTreeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.k.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `C(2m, m)`, the number of compositions of at most `m` into `m` parts.
pub fn composition_count(m: usize) -> u128 {
    let mut c: u128 = 1;
    for i in 0..m as u128 {
        c = c * (2 * m as u128 - i) / (i + 1);
    }
    c
}

/// All types for arity `m`, lexicographically descending, without
/// `(m, 0, ..., 0)`.
pub fn enumerate_types(m: usize) -> Result<Vec<SmallTreeType>> {
    if m < 2 {
        return Err(Error::Domain(format!("arity m = {m}, need m >= 2")));
    }
    let mut out = Vec::with_capacity(composition_count(m) as usize - 1);
    let mut cur = vec![0u32; m];
    fill(&mut cur, 0, m as u32, &mut out);
    out.retain(|t| t.k[0] as usize != m);
    Ok(out)
}

fn fill(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<SmallTreeType>) {
    if pos == cur.len() {
        out.push(SmallTreeType { k: cur.clone() });
        return;
    }
    for c in (0..=left).rev() {
        cur[pos] = c;
        fill(cur, pos + 1, left - c, out);
    }
    cur[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_types() {
        let t = enumerate_types(2).unwrap();
        let ks: Vec<Vec<u32>> = t.iter().map(|t| t.k.clone()).collect();
        assert_eq!(
            ks,
            vec![vec![1, 1], vec![1, 0], vec![0, 2], vec![0, 1], vec![0, 0]]
        );
        assert_eq!(
            t.iter().map(SmallTreeType::activity).collect::<Vec<_>>(),
            vec![3, 1, 4, 2, 0]
        );
    }

    #[test]
    fn counts() {
        for (m, n) in [(2, 5), (3, 19), (4, 69), (5, 251), (6, 923)] {
            assert_eq!(enumerate_types(m).unwrap().len(), n);
            assert_eq!(composition_count(m) - 1, n as u128);
        }
        assert!(enumerate_types(1).is_err());
    }

    #[test]
    fn exactly_m_protected() {
        for m in 2..=6 {
            let t = enumerate_types(m).unwrap();
            assert_eq!(t.iter().filter(|t| t.protected()).count(), m);
        }
    }
}
