use std::collections::BTreeMap;

use num_traits::Zero;

use crate::ratlinalg::{int, rat, Rational};
use crate::urn::{Outcome, Rule, UrnSpec};
use crate::{Error, Result};

use super::{ModelBundle, ModelKind};

fn unit(q: usize, i: usize) -> Vec<u64> {
    let mut e = vec![0; q];
    e[i] = 1;
    e
}

fn det_rule(drawn: usize, q: usize, changes: &[(usize, i64)]) -> Rule {
    let mut delta = vec![0i64; q];
    for &(j, d) in changes {
        delta[j] += d;
    }
    Rule {
        drawn,
        outcomes: vec![Outcome {
            p: int(1),
            delta: delta.into(),
        }],
    }
}

/// Gap urn for nodes by key count: type `i` (1-based) are the gaps of nodes
/// with `i-1` keys, `m-1` types, all activities 1.
pub fn node_urn(m: usize) -> Result<ModelBundle> {
    if m < 2 {
        return Err(Error::Domain(format!("arity m = {m}, need m >= 2")));
    }
    let q = m - 1;
    let rules = (0..q)
        .map(|i| {
            let g = i as i64 + 1;
            if i + 1 < q {
                det_rule(i, q, &[(i, -g), (i + 1, g + 1)])
            } else {
                det_rule(i, q, &[(i, -g), (0, m as i64)])
            }
        })
        .collect();
    let labels = (0..q).map(|i| format!("gaps-{i}-keys")).collect();
    let start = unit(q, 0);
    let spec = UrnSpec::new(
        vec![int(1); q],
        labels,
        rules,
        Some((1..=q as u64).collect()),
        Some(start.clone()),
    )?;
    let mut functionals = BTreeMap::new();
    functionals.insert(
        "external".to_string(),
        (0..q).map(|i| int((i == 0) as i64)).collect(),
    );
    for j in 1..q {
        functionals.insert(
            format!("nodes_with_{j}_keys"),
            (0..q)
                .map(|i| {
                    if i == j {
                        rat(1, j as i64 + 1)
                    } else {
                        Rational::zero()
                    }
                })
                .collect(),
        );
    }
    Ok(ModelBundle {
        model: ModelKind::Nodes,
        m,
        spec,
        types: None,
        functionals,
        start,
        n0: 0,
    })
}

/// Gap urn for leaves, `m` types: external gaps not below a leaf, gaps of
/// leaves with `1..m-2` keys, and the `m` gaps below a full leaf.
pub fn leaves_gap_urn(m: usize) -> Result<ModelBundle> {
    if m < 3 {
        return Err(Error::Domain(format!(
            "leaves gap urn needs m >= 3, got {m}"
        )));
    }
    let q = m;
    let rules = (0..q)
        .map(|i| {
            let g = i as i64 + 1;
            if i + 1 < q {
                det_rule(i, q, &[(i, -g), (i + 1, g + 1)])
            } else {
                det_rule(i, q, &[(i, -g), (0, m as i64 - 1), (1, 2)])
            }
        })
        .collect();
    let mut labels: Vec<String> = vec!["external".into()];
    labels.extend((1..m - 1).map(|k| format!("leaf-{k}-keys")));
    labels.push("full-leaf".into());
    let start = unit(q, 0);
    let spec = UrnSpec::new(
        vec![int(1); q],
        labels,
        rules,
        Some((1..=q as u64).collect()),
        Some(start.clone()),
    )?;
    let mut functionals = BTreeMap::new();
    functionals.insert(
        "leaves".to_string(),
        (0..q)
            .map(|i| {
                if i == 0 {
                    Rational::zero()
                } else {
                    rat(1, i as i64 + 1)
                }
            })
            .collect(),
    );
    Ok(ModelBundle {
        model: ModelKind::Leaves,
        m,
        spec,
        types: None,
        functionals,
        start,
        n0: 0,
    })
}

/// Node-typed urn with `m+1` types: external nodes not below a leaf
/// (activity 1), leaves with `i-1` keys (activity `i`), full leaves with
/// their external children (activity `m`) and inert non-leaves.
pub fn oneprotected_urn(m: usize) -> Result<ModelBundle> {
    if m < 2 {
        return Err(Error::Domain(format!("arity m = {m}, need m >= 2")));
    }
    let q = m + 1;
    let mut rules = Vec::with_capacity(m);
    for i in 0..m {
        rules.push(if i + 1 < m {
            det_rule(i, q, &[(i, -1), (i + 1, 1)])
        } else {
            det_rule(i, q, &[(i, -1), (1, 1), (0, m as i64 - 1), (m, 1)])
        });
    }
    let mut activities: Vec<Rational> = (1..=m as i64).map(int).collect();
    activities.push(Rational::zero());
    let mut labels: Vec<String> = vec!["external".into()];
    labels.extend((1..m - 1).map(|k| format!("leaf-{k}-keys")));
    labels.push("full-leaf".into());
    labels.push("non-leaf".into());
    let start = unit(q, 0);
    let spec = UrnSpec::new(activities, labels, rules, None, Some(start.clone()))?;

    let leaves: Vec<Rational> = (0..q).map(|i| int((1..m).contains(&i) as i64)).collect();
    let q_vec: Vec<Rational> = (0..q).map(|i| int((i == m) as i64)).collect();
    let internal: Vec<Rational> = leaves.iter().zip(&q_vec).map(|(a, b)| a + b).collect();
    let mut functionals = BTreeMap::new();
    functionals.insert("leaves".to_string(), leaves);
    functionals.insert("one_protected".to_string(), q_vec);
    functionals.insert("internal".to_string(), internal);
    Ok(ModelBundle {
        model: ModelKind::OneProtected,
        m,
        spec,
        types: None,
        functionals,
        start,
        n0: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::RatMatrix;
    use crate::urn::build_matrix_a;

    #[test]
    fn node_matrix_small() {
        assert_eq!(
            build_matrix_a(&node_urn(3).unwrap().spec),
            RatMatrix::from_i64(&[&[-1, 3], &[2, -2]])
        );
        assert_eq!(
            build_matrix_a(&node_urn(2).unwrap().spec),
            RatMatrix::from_i64(&[&[1]])
        );
    }

    #[test]
    fn leaves_matrix_ternary() {
        let a = build_matrix_a(&leaves_gap_urn(3).unwrap().spec);
        assert_eq!(
            a,
            RatMatrix::from_i64(&[&[-1, 0, 2], &[2, -2, 2], &[0, 3, -3]])
        );
        assert!(leaves_gap_urn(2).is_err());
    }

    #[test]
    fn oneprotected_full_leaf_rule() {
        let b = oneprotected_urn(3).unwrap();
        assert_eq!(
            b.spec.rule(2).unwrap().outcomes[0].delta.to_dense(),
            vec![2, 1, -1, 1]
        );
        assert_eq!(
            b.functionals["leaves"],
            vec![int(0), int(1), int(1), int(0)]
        );
        assert!(b.spec.rule(3).is_none());
    }
}
