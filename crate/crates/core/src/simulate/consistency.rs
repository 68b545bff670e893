use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

use crate::models::{protected_urn, SmallTreeType};
use crate::urn::Delta;
use crate::Result;

use super::mc::trial_rng;
use super::tree::{MSTree, TypeIndex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub m: usize,
    pub n: u64,
    pub seed: u64,
    pub steps: u64,
    pub violations: u64,
    pub first_violation: Option<String>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Grows a random tree to `n` keys and checks after every key from `n = m`
/// on that the forest decomposition moved by a legal outcome of the type
/// that owned the chosen gap, and that the urn functionals match the tree
/// counts.
pub fn urn_tree_consistency(m: usize, n: u64, seed: u64) -> Result<ConsistencyReport> {
    let bundle = protected_urn(m)?;
    let index = TypeIndex::new(m)?;
    let protected = bundle.functional("protected")?.to_vec();
    let leaves = bundle.functional("leaves")?.to_vec();
    let act: Vec<u64> = index.types.iter().map(SmallTreeType::activity).collect();
    let mut report = ConsistencyReport {
        m,
        n,
        seed,
        steps: 0,
        violations: 0,
        first_violation: None,
    };
    let flag = |report: &mut ConsistencyReport, msg: String| {
        report.violations += 1;
        report.first_violation.get_or_insert(msg);
    };

    let mut rng = trial_rng(seed, 0);
    let mut tree = MSTree::with_capacity(m, n as usize)?;
    while tree.n() < (m as u64).min(n) {
        let r = rng.random_range(0..=tree.n());
        tree.insert_key(r)?;
    }
    if n < m as u64 {
        return Ok(report);
    }
    let mut x = tree.forest_decompose(&index)?;
    if x != bundle.start {
        flag(
            &mut report,
            format!("n = {m}: decomposition {x:?} is not the start state"),
        );
    }
    loop {
        let s = tree.count_stats();
        let dot = |c: &[crate::Rational]| -> u64 {
            c.iter()
                .zip(&x)
                .map(|(a, &b)| a.to_integer().to_u64().unwrap_or(0) * b)
                .sum()
        };
        let gaps: u64 = act.iter().zip(&x).map(|(a, b)| a * b).sum();
        if dot(&protected) != s.two_protected || dot(&leaves) != s.leaves || gaps != tree.n() + 1 {
            flag(
                &mut report,
                format!(
                    "n = {}: functionals disagree with the tree counts {s:?}",
                    tree.n()
                ),
            );
        }
        if tree.n() >= n {
            break;
        }
        let r = rng.random_range(0..=tree.n());
        let drawn = tree.gap_owner(r, &index)?;
        tree.insert_key(r)?;
        let y = tree.forest_decompose(&index)?;
        let delta = Delta::from_dense(
            &y.iter()
                .zip(&x)
                .map(|(&a, &b)| a as i64 - b as i64)
                .collect::<Vec<_>>(),
        );
        let legal = bundle
            .spec
            .rule(drawn)
            .is_some_and(|rule| rule.outcomes.iter().any(|o| o.delta == delta));
        if !legal {
            flag(
                &mut report,
                format!(
                    "n = {}: drawn type {} moved by an illegal delta",
                    tree.n(),
                    index.types[drawn]
                ),
            );
        }
        report.steps += 1;
        x = y;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_are_consistent() {
        for (m, n) in [(2, 60), (3, 80), (4, 80)] {
            let r = urn_tree_consistency(m, n, 3).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.steps, n - m as u64);
        }
    }
}
