use std::collections::VecDeque;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::spectral::{eigen_data, EXACT_SPECTRUM_CAP};
use super::{build_matrix_a, UrnSpec};
use crate::ratlinalg::{format_rational, numeric_eigen, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionCheck {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub checks: Vec<AssumptionCheck>,
    /// Types from which every type can appear.
    pub dominating: Vec<usize>,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, id: &str) -> Option<&AssumptionCheck> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AssumptionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(id: &str, passed: bool, detail: impl Into<String>) -> AssumptionCheck {
    AssumptionCheck {
        id: id.into(),
        passed,
        detail: detail.into(),
    }
}

/// Checks (A1)-(A7). Violations carry a witness in `detail`.
pub fn check_assumptions(spec: &UrnSpec) -> AssumptionReport {
    let mut checks = Vec::with_capacity(7);

    // (A1)
    let mut witness = None;
    'outer: for rule in spec.rules() {
        let i = rule.drawn;
        let floor = -(spec.group_size(i) as i64);
        for (k, o) in rule.outcomes.iter().enumerate() {
            for &(j, d) in o.delta.nonzero() {
                let bad = if j == i { d < floor } else { d < 0 };
                if bad {
                    witness = Some(format!("type {i} outcome {k}: delta[{j}] = {d}"));
                    break 'outer;
                }
            }
        }
    }
    checks.push(match witness {
        Some(w) => check("A1", false, w),
        None => check("A1", true, "no outcome removes balls of other types"),
    });

    checks.push(check("A2", true, "replacement laws have finite support"));

    let a = build_matrix_a(spec);
    let (lambda1, a3, a4) = match eigen_data(&a) {
        Ok((eig, cp)) => {
            let top = &eig[0];
            let real = top.value.im().abs() <= 1e-9;
            let positive = real && top.re() > 0.0;
            let a3 = if positive {
                check("A3", true, format!("largest eigenvalue {top}"))
            } else {
                check(
                    "A3",
                    false,
                    format!("largest eigenvalue {top} is not real and positive"),
                )
            };
            let simple = match (&cp, &top.exact) {
                (Some(_), Some(r)) => eig[1..].iter().all(|e| e.exact.as_ref() != Some(r)),
                _ => eig
                    .get(1)
                    .is_none_or(|e| e.value.abs_diff(&top.value) > 1e-6 * top.re().abs().max(1.0)),
            };
            let a4 = if simple {
                check("A4", true, format!("{top} is simple"))
            } else {
                check("A4", false, format!("{top} is repeated"))
            };
            let l1 = top.exact.clone().or_else(|| {
                spec.step_increment()
                    .filter(|s| (to_f64(s) - top.re()).abs() <= 1e-6 * top.re().abs().max(1.0))
                    .cloned()
            });
            (positive.then_some((l1, top.re())), a3, a4)
        }
        Err(e) => (
            None,
            check("A3", false, e.to_string()),
            check("A4", false, e.to_string()),
        ),
    };
    checks.push(a3);
    checks.push(a4);

    let dominating = dominating_types(spec);
    let a5 = match spec.start() {
        Some(x0) => match dominating.iter().find(|&&i| x0[i] > 0) {
            Some(i) => check("A5", true, format!("start contains dominating type {i}")),
            None => check("A5", false, "start contains no dominating type"),
        },
        None if dominating.is_empty() => check("A5", false, "no dominating type exists"),
        None => check(
            "A5",
            true,
            format!("no start given; type {} is dominating", dominating[0]),
        ),
    };
    checks.push(a5);

    let a6 = match &lambda1 {
        None => check("A6", false, "largest eigenvalue unavailable"),
        Some((exact, approx)) => a6_check(spec, &a, &dominating, exact.as_ref(), *approx),
    };
    checks.push(a6);

    checks.push(match spec.step_increment() {
        Some(s) => check(
            "A7",
            true,
            format!(
                "a·E(ξ_i) = {} > 0 for every type, so total activity grows",
                format_rational(s)
            ),
        ),
        None => check(
            "A7",
            false,
            "no constant positive a·E(ξ_i); essential extinction not excluded",
        ),
    });

    AssumptionReport { checks, dominating }
}

fn a6_check(
    spec: &UrnSpec,
    a: &crate::ratlinalg::RatMatrix,
    dominating: &[usize],
    exact: Option<&Rational>,
    approx: f64,
) -> AssumptionCheck {
    if dominating.is_empty() {
        return check("A6", false, "no dominating types");
    }
    let inert_rest = (0..spec.q())
        .filter(|i| !dominating.contains(i))
        .all(|i| spec.activities()[i].is_zero());
    if inert_rest && (exact.is_some_and(|r| !r.is_zero()) || approx != 0.0) {
        return check(
            "A6",
            true,
            "non-dominating types are inert, so their columns of A vanish",
        );
    }
    let sub = a.submatrix(dominating, dominating);
    match exact {
        Some(r) if dominating.len() <= EXACT_SPECTRUM_CAP => {
            let det = sub
                .shift_diag(r)
                .determinant()
                .unwrap_or_else(|_| Rational::zero());
            if det.is_zero() {
                check("A6", true, "λ1 is an eigenvalue of the dominating block")
            } else {
                check(
                    "A6",
                    false,
                    format!("det(A_D - λ1 I) = {}", format_rational(&det)),
                )
            }
        }
        _ => match numeric_eigen(&sub.to_float()) {
            Ok(eig)
                if eig
                    .iter()
                    .any(|e| (e.re() - approx).abs() <= 1e-7 && e.im().abs() <= 1e-7) =>
            {
                check(
                    "A6",
                    true,
                    "λ1 is numerically an eigenvalue of the dominating block",
                )
            }
            Ok(_) => check(
                "A6",
                false,
                "λ1 is not an eigenvalue of the dominating block",
            ),
            Err(e) => check("A6", false, e.to_string()),
        },
    }
}

/// Types from which every other type can be produced: reachability over the
/// edges `i -> j` whenever a drawable type `i` has an outcome adding `j`.
pub(crate) fn dominating_types(spec: &UrnSpec) -> Vec<usize> {
    let q = spec.q();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); q];
    for rule in spec.rules() {
        if !spec.activities()[rule.drawn].is_positive() {
            continue;
        }
        let mut targets: Vec<usize> = rule
            .outcomes
            .iter()
            .flat_map(|o| {
                o.delta
                    .nonzero()
                    .iter()
                    .filter(|&&(_, d)| d > 0)
                    .map(|&(j, _)| j)
            })
            .collect();
        targets.sort_unstable();
        targets.dedup();
        adj[rule.drawn] = targets;
    }
    let mut out = Vec::new();
    let mut seen = vec![usize::MAX; q];
    for start in 0..q {
        let mut count = 0;
        let mut queue = VecDeque::from([start]);
        seen[start] = start;
        while let Some(i) = queue.pop_front() {
            count += 1;
            for &j in &adj[i] {
                if seen[j] != start {
                    seen[j] = start;
                    queue.push_back(j);
                }
            }
        }
        if count == q {
            out.push(start);
        }
    }
    out
}
