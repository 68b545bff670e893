//! Generalized Pólya urns: specification, the matrices `A` and `B`, the
//! assumption checks, spectral data and the limit law.

mod assumptions;
mod law;
mod spectral;

pub use assumptions::{check_assumptions, AssumptionCheck, AssumptionReport};
pub use law::{
    asymptotics_dual_basis, asymptotics_integral, exact_dual_bases, functional_law, mean_vector,
    projection, AsymptoticLaw, FunctionalLaw, Method,
};
pub use spectral::{
    classify_regime, eigen_data, spectral, Eigenvalue, Regime, SpectralData, EXACT_SPECTRUM_CAP,
};

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::ratlinalg::{
    format_rational, int, parse_rational, to_f64, FloatMatrix, RatMatrix, Rational,
};
use crate::{Error, Result};

/// One support point of a replacement law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub p: Rational,
    pub delta: Delta,
}

/// A replacement vector of length `dim`, stored as its nonzero entries in
/// type order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Delta {
    dim: usize,
    entries: Vec<(usize, i64)>,
}

impl Delta {
    /// Sums repeated indices and drops zeros. Panics on an index `>= dim`.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut entries: Vec<(usize, i64)> = pairs.into_iter().collect();
        assert!(
            entries.iter().all(|&(j, _)| j < dim),
            "delta index out of range"
        );
        entries.sort_unstable_by_key(|&(j, _)| j);
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(entries.len());
        for (j, d) in entries {
            match out.last_mut() {
                Some((k, e)) if *k == j => *e += d,
                _ => out.push((j, d)),
            }
        }
        out.retain(|&(_, d)| d != 0);
        Self { dim, entries: out }
    }

    pub fn from_dense(d: &[i64]) -> Self {
        Self::from_pairs(d.len(), d.iter().copied().enumerate())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nonzero(&self) -> &[(usize, i64)] {
        &self.entries
    }

    pub fn get(&self, j: usize) -> i64 {
        self.entries
            .binary_search_by_key(&j, |&(k, _)| k)
            .map_or(0, |i| self.entries[i].1)
    }

    pub fn to_dense(&self) -> Vec<i64> {
        let mut d = vec![0; self.dim];
        for &(j, x) in &self.entries {
            d[j] = x;
        }
        d
    }
}

impl From<Vec<i64>> for Delta {
    fn from(d: Vec<i64>) -> Self {
        Self::from_dense(&d)
    }
}

/// The law of the replacement vector for one drawn type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub drawn: usize,
    pub outcomes: Vec<Outcome>,
}

/// A validated urn. Types with activity zero have no rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct UrnSpec {
    activities: Vec<Rational>,
    labels: Vec<String>,
    /// `rules[i]` is the rule of type `i`, `None` for inert types.
    rules: Vec<Option<Rule>>,
    group_sizes: Option<Vec<u64>>,
    start: Option<Vec<u64>>,
    step: Option<Rational>,
}

impl UrnSpec {
    /// Validates and builds a spec. `group_sizes[i] = g` declares that balls
    /// of type `i` come in indivisible groups of `g` (a gap-typed urn removes
    /// all gaps of a node at once); it only relaxes the sign check of the
    /// assumption report.
    pub fn new(
        activities: Vec<Rational>,
        labels: Vec<String>,
        rules: Vec<Rule>,
        group_sizes: Option<Vec<u64>>,
        start: Option<Vec<u64>>,
    ) -> Result<Self> {
        let q = activities.len();
        if q == 0 {
            return Err(Error::Spec("urn needs at least one type".into()));
        }
        if labels.len() != q {
            return Err(Error::Spec(format!(
                "{} labels for {q} types",
                labels.len()
            )));
        }
        if let Some((i, a)) = activities.iter().enumerate().find(|(_, a)| a.is_negative()) {
            return Err(Error::Spec(format!(
                "type {i} has negative activity {}",
                format_rational(a)
            )));
        }
        if let Some(g) = &group_sizes {
            if g.len() != q || g.contains(&0) {
                return Err(Error::Spec(
                    "group_sizes must have one positive entry per type".into(),
                ));
            }
        }
        if let Some(s) = &start {
            if s.len() != q {
                return Err(Error::Spec(format!(
                    "start vector has length {}, expected {q}",
                    s.len()
                )));
            }
        }
        let mut slots: Vec<Option<Rule>> = vec![None; q];
        for rule in rules {
            let i = rule.drawn;
            if i >= q {
                return Err(Error::Spec(format!("rule for type {i} but q = {q}")));
            }
            if activities[i].is_zero() {
                return Err(Error::Spec(format!(
                    "type {i} has activity 0 and must not carry a rule"
                )));
            }
            if slots[i].is_some() {
                return Err(Error::Spec(format!("duplicate rule for type {i}")));
            }
            if rule.outcomes.is_empty() {
                return Err(Error::Spec(format!("rule for type {i} has no outcomes")));
            }
            let mut total = Rational::zero();
            for (k, o) in rule.outcomes.iter().enumerate() {
                if !o.p.is_positive() || o.p > Rational::one() {
                    return Err(Error::Spec(format!(
                        "type {i} outcome {k} has probability {} outside (0,1]",
                        format_rational(&o.p)
                    )));
                }
                if o.delta.dim() != q {
                    return Err(Error::Spec(format!(
                        "type {i} outcome {k} has delta of length {}",
                        o.delta.dim()
                    )));
                }
                total += &o.p;
            }
            if !total.is_one() {
                return Err(Error::Spec(format!(
                    "probabilities for type {i} sum to {}",
                    format_rational(&total)
                )));
            }
            slots[i] = Some(rule);
        }
        if let Some(i) = (0..q).find(|&i| activities[i].is_positive() && slots[i].is_none()) {
            return Err(Error::Spec(format!(
                "type {i} has positive activity but no rule"
            )));
        }
        let mut spec = Self {
            activities,
            labels,
            rules: slots,
            group_sizes,
            start,
            step: None,
        };
        spec.step = spec.compute_step();
        Ok(spec)
    }

    pub fn q(&self) -> usize {
        self.activities.len()
    }

    pub fn activities(&self) -> &[Rational] {
        &self.activities
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rule(&self, i: usize) -> Option<&Rule> {
        self.rules.get(i).and_then(Option::as_ref)
    }

    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().flatten()
    }

    /// Group size of each type, 1 unless declared.
    pub fn group_size(&self, i: usize) -> u64 {
        self.group_sizes.as_ref().map_or(1, |g| g[i])
    }

    pub fn start(&self) -> Option<&[u64]> {
        self.start.as_deref()
    }

    /// The constant `s = a·E(ξ_i)` shared by all drawable types, if any.
    pub fn step_increment(&self) -> Option<&Rational> {
        self.step.as_ref()
    }

    /// `E(ξ_i)`; zero for inert types.
    pub fn mean_delta(&self, i: usize) -> Vec<Rational> {
        let mut m = vec![Rational::zero(); self.q()];
        for (j, x) in self.mean_delta_sparse(i) {
            m[j] = x;
        }
        m
    }

    /// Nonzero entries of `E(ξ_i)` in type order.
    pub fn mean_delta_sparse(&self, i: usize) -> Vec<(usize, Rational)> {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        if let Some(rule) = self.rule(i) {
            for o in &rule.outcomes {
                for &(j, d) in o.delta.nonzero() {
                    *acc.entry(j).or_insert_with(Rational::zero) += &o.p * int(d);
                }
            }
        }
        acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
    }

    fn compute_step(&self) -> Option<Rational> {
        let mut step: Option<Rational> = None;
        for rule in self.rules() {
            let s: Rational = self
                .mean_delta_sparse(rule.drawn)
                .iter()
                .map(|(j, x)| x * &self.activities[*j])
                .sum();
            match &step {
                None => step = Some(s),
                Some(t) if *t == s => {}
                Some(_) => return None,
            }
        }
        step.filter(|s| s.is_positive())
    }
}

/// `A = (a_j E ξ_ji)`: column `j` is `a_j E(ξ_j)`.
pub fn build_matrix_a(spec: &UrnSpec) -> RatMatrix {
    let q = spec.q();
    let mut a = RatMatrix::zeros(q, q);
    for j in 0..q {
        if spec.activities[j].is_zero() {
            continue;
        }
        for (i, m) in spec.mean_delta_sparse(j) {
            a.set(i, j, m * &spec.activities[j]);
        }
    }
    a
}

/// `A` in double precision, without forming the rational matrix.
pub fn build_matrix_a_float(spec: &UrnSpec) -> FloatMatrix {
    let q = spec.q();
    let mut a = FloatMatrix::zeros(q, q);
    for j in 0..q {
        for (i, m) in spec.mean_delta_sparse(j) {
            a[(i, j)] = to_f64(&(m * &spec.activities[j]));
        }
    }
    a
}

/// `B_i = E(ξ_i ξ_i')`; zero for inert types.
pub fn compute_bi(spec: &UrnSpec, i: usize) -> RatMatrix {
    let q = spec.q();
    let mut bi = RatMatrix::zeros(q, q);
    if let Some(rule) = spec.rule(i) {
        add_second_moment(&mut bi, rule, &Rational::one());
    }
    bi
}

/// `B = Σ v_1i a_i B_i`.
pub fn compute_b(spec: &UrnSpec, v1: &[Rational]) -> Result<RatMatrix> {
    let q = spec.q();
    if v1.len() != q {
        return Err(Error::Domain(format!(
            "v1 has length {}, expected {q}",
            v1.len()
        )));
    }
    let mut b = RatMatrix::zeros(q, q);
    for rule in spec.rules() {
        let w = &v1[rule.drawn] * &spec.activities[rule.drawn];
        if !w.is_zero() {
            add_second_moment(&mut b, rule, &w);
        }
    }
    Ok(b)
}

fn add_second_moment(m: &mut RatMatrix, rule: &Rule, w: &Rational) {
    for o in &rule.outcomes {
        let wp = w * &o.p;
        for &(r, dr) in o.delta.nonzero() {
            for &(c, dc) in o.delta.nonzero() {
                m.add_at(r, c, &(&wp * int(dr * dc)));
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawOutcome {
    p: String,
    delta: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct RawRule {
    drawn: usize,
    outcomes: Vec<RawOutcome>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    q: usize,
    activities: Vec<String>,
    labels: Vec<String>,
    rules: Vec<RawRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    group_sizes: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    step_increment: Option<String>,
}

impl TryFrom<RawSpec> for UrnSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let activities = raw
            .activities
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::Spec(e.to_string()))?;
        if activities.len() != raw.q {
            return Err(Error::Spec(format!(
                "q = {} but {} activities",
                raw.q,
                activities.len()
            )));
        }
        let mut rules = Vec::with_capacity(raw.rules.len());
        for r in raw.rules {
            let mut outcomes = Vec::with_capacity(r.outcomes.len());
            for o in r.outcomes {
                let p = parse_rational(&o.p).map_err(|e| Error::Spec(e.to_string()))?;
                outcomes.push(Outcome {
                    p,
                    delta: Delta::from_dense(&o.delta),
                });
            }
            rules.push(Rule {
                drawn: r.drawn,
                outcomes,
            });
        }
        let spec = UrnSpec::new(activities, raw.labels, rules, raw.group_sizes, raw.start)?;
        if let Some(s) = raw.step_increment {
            let s = parse_rational(&s).map_err(|e| Error::Spec(e.to_string()))?;
            if spec.step_increment() != Some(&s) {
                return Err(Error::Spec(format!(
                    "declared step_increment {} does not equal a·E(ξ_i) for every drawable type",
                    format_rational(&s)
                )));
            }
        }
        Ok(spec)
    }
}

impl From<UrnSpec> for RawSpec {
    fn from(spec: UrnSpec) -> Self {
        RawSpec {
            q: spec.q(),
            activities: spec.activities.iter().map(format_rational).collect(),
            rules: spec
                .rules
                .iter()
                .flatten()
                .map(|r| RawRule {
                    drawn: r.drawn,
                    outcomes: r
                        .outcomes
                        .iter()
                        .map(|o| RawOutcome {
                            p: format_rational(&o.p),
                            delta: o.delta.to_dense(),
                        })
                        .collect(),
                })
                .collect(),
            step_increment: spec.step.as_ref().map(format_rational),
            labels: spec.labels,
            group_sizes: spec.group_sizes,
            start: spec.start,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::rat;

    fn single() -> UrnSpec {
        UrnSpec::new(
            vec![int(1)],
            vec!["x".into()],
            vec![Rule {
                drawn: 0,
                outcomes: vec![Outcome {
                    p: int(1),
                    delta: vec![1].into(),
                }],
            }],
            None,
            Some(vec![1]),
        )
        .unwrap()
    }

    #[test]
    fn single_type_matrix() {
        let spec = single();
        assert_eq!(build_matrix_a(&spec), RatMatrix::from_i64(&[&[1]]));
        assert_eq!(spec.step_increment(), Some(&int(1)));
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let r = UrnSpec::new(
            vec![int(1)],
            vec!["x".into()],
            vec![Rule {
                drawn: 0,
                outcomes: vec![Outcome {
                    p: rat(1, 2),
                    delta: vec![1].into(),
                }],
            }],
            None,
            None,
        );
        assert!(matches!(r, Err(Error::Spec(_))));
    }

    #[test]
    fn inert_type_must_not_have_rule() {
        let r = UrnSpec::new(
            vec![int(0)],
            vec!["x".into()],
            vec![Rule {
                drawn: 0,
                outcomes: vec![Outcome {
                    p: int(1),
                    delta: vec![1].into(),
                }],
            }],
            None,
            None,
        );
        assert!(matches!(r, Err(Error::Spec(_))));
    }

    #[test]
    fn json_round_trip() {
        let spec = single();
        let s = serde_json::to_string(&spec).unwrap();
        assert!(s.contains("\"activities\":[\"1\"]"));
        let back: UrnSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn json_rejects_wrong_step() {
        let s = r#"{"q":1,"activities":["1"],"labels":["x"],"rules":[{"drawn":0,"outcomes":[{"p":"1","delta":[1]}]}],"step_increment":"2"}"#;
        assert!(serde_json::from_str::<UrnSpec>(s).is_err());
    }
}
