use std::collections::{BTreeMap, HashMap};

use crate::ratlinalg::{int, rat, Rational};
use crate::urn::{Delta, Outcome, Rule, UrnSpec};
use crate::{Error, Result};

use super::{enumerate_types, ModelBundle, ModelKind, SmallTreeType};

/// Largest arity for which the protected urn's covariance is computed by
/// default (923 types).
pub const DEFAULT_SIGMA_CAP: usize = 6;
/// Largest arity for which the protected urn is built by default.
pub const DEFAULT_SPECTRUM_CAP: usize = 8;

pub fn protected_urn(m: usize) -> Result<ModelBundle> {
    protected_urn_capped(m, DEFAULT_SPECTRUM_CAP)
}

/// The composition-typed urn. A draw picks a gap uniformly; a gap in a child
/// with `i < m-1` keys moves that child from `k_i` to `k_{i+1}`, while a gap
/// in a full leaf (`m-1` keys) turns it into a non-leaf, which is cut off
/// and starts a new small tree of type `(m-1, 1, 0, ..., 0)`.
pub fn protected_urn_capped(m: usize, cap: usize) -> Result<ModelBundle> {
    if m < 2 {
        return Err(Error::Domain(format!("arity m = {m}, need m >= 2")));
    }
    if m > cap {
        return Err(Error::Size(format!(
            "protected urn for m = {m} has {} types; cap is m <= {cap}",
            super::composition_count(m) - 1
        )));
    }
    let types = enumerate_types(m)?;
    let q = types.len();
    let index: HashMap<&[u32], usize> = types
        .iter()
        .enumerate()
        .map(|(i, t)| (t.k.as_slice(), i))
        .collect();
    let fresh = index[SmallTreeType::fresh(m).k.as_slice()];

    let mut rules = Vec::new();
    for (j, t) in types.iter().enumerate() {
        let w = t.activity();
        if w == 0 {
            continue;
        }
        let mut outcomes = Vec::new();
        for i in 0..m {
            let c = t.k[i];
            if c == 0 {
                continue;
            }
            let mut next = t.k.clone();
            next[i] -= 1;
            let mut delta = vec![(j, -1)];
            if i + 1 < m {
                next[i + 1] += 1;
            } else {
                delta.push((fresh, 1));
            }
            delta.push((index[next.as_slice()], 1));
            let p = rat((i as i64 + 1) * c as i64, w as i64);
            outcomes.push(Outcome {
                p,
                delta: Delta::from_pairs(q, delta),
            });
        }
        rules.push(Rule { drawn: j, outcomes });
    }

    let activities: Vec<Rational> = types.iter().map(|t| int(t.activity() as i64)).collect();
    let labels = types.iter().map(ToString::to_string).collect();
    let mut start = vec![0u64; q];
    start[fresh] = 1;
    let spec = UrnSpec::new(activities, labels, rules, None, Some(start.clone()))?;

    let mut functionals = BTreeMap::new();
    functionals.insert(
        "protected".to_string(),
        types.iter().map(|t| int(t.protected() as i64)).collect(),
    );
    functionals.insert(
        "leaves".to_string(),
        types.iter().map(|t| int(t.leaf_count() as i64)).collect(),
    );
    Ok(ModelBundle {
        model: ModelKind::Protected,
        m,
        spec,
        types: Some(types),
        functionals,
        start,
        n0: m as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::dot;

    #[test]
    fn every_outcome_adds_one_gap() {
        for m in 2..=5 {
            let b = protected_urn(m).unwrap();
            let a = b.spec.activities();
            for r in b.spec.rules() {
                for o in &r.outcomes {
                    let d: Vec<Rational> = o.delta.to_dense().into_iter().map(int).collect();
                    assert_eq!(dot(a, &d), int(1), "m={m} type {}", r.drawn);
                }
            }
            assert_eq!(b.spec.step_increment(), Some(&int(1)));
        }
    }

    #[test]
    fn cap_is_a_size_error() {
        assert!(matches!(protected_urn_capped(4, 3), Err(Error::Size(_))));
    }
}
