//! The exact-value ledger: published constants recomputed from scratch and
//! compared bit-exactly.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::models::{leaves_gap_urn, oneprotected_urn, paper_order, protected_urn, ModelBundle};
use crate::ratlinalg::{format_rational, int, parse_rational, MatrixValue, RatMatrix, Rational};
use crate::urn::{
    asymptotics_dual_basis, asymptotics_integral, compute_b, compute_bi, functional_law,
    projection, spectral, AsymptoticLaw, SpectralData,
};
use crate::{Error, Result};

const FIXTURES: &str = include_str!("../../fixtures/ledger.json");

#[derive(Clone, Debug, PartialEq)]
pub enum Expected {
    Scalar(Rational),
    Vector(Vec<Rational>),
    Matrix(RatMatrix),
    /// Eigenvalues with multiplicity, any order.
    Spectrum(Vec<Rational>),
    /// Principal submatrix on `rows`.
    Block {
        rows: Vec<usize>,
        value: RatMatrix,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixtureEntry {
    pub id: String,
    pub location: String,
    pub expected: Expected,
}

#[derive(Deserialize)]
struct RawFile {
    entries: Vec<RawEntry>,
}

#[derive(Deserialize)]
struct RawEntry {
    id: String,
    location: String,
    kind: String,
    scale: String,
    value: serde_json::Value,
}

fn parse_vec(v: &serde_json::Value, scale: &Rational) -> Result<Vec<Rational>> {
    let raw: Vec<String> = serde_json::from_value(v.clone())?;
    raw.iter().map(|s| Ok(parse_rational(s)? * scale)).collect()
}

fn parse_mat(v: &serde_json::Value, scale: &Rational) -> Result<RatMatrix> {
    let raw: Vec<serde_json::Value> = serde_json::from_value(v.clone())?;
    let rows = raw
        .iter()
        .map(|r| parse_vec(r, scale))
        .collect::<Result<Vec<_>>>()?;
    Ok(RatMatrix::from_rows(rows)?)
}

/// The embedded fixture file, with scale factors multiplied out.
pub fn load_fixtures() -> Result<Vec<FixtureEntry>> {
    let raw: RawFile = serde_json::from_str(FIXTURES)?;
    raw.entries
        .into_iter()
        .map(|e| {
            let scale = parse_rational(&e.scale)?;
            let expected = match e.kind.as_str() {
                "scalar" => {
                    let s: String = serde_json::from_value(e.value)?;
                    Expected::Scalar(parse_rational(&s)? * &scale)
                }
                "vector" => Expected::Vector(parse_vec(&e.value, &scale)?),
                "spectrum" => Expected::Spectrum(parse_vec(&e.value, &scale)?),
                "matrix" => Expected::Matrix(parse_mat(&e.value, &scale)?),
                "block" => Expected::Block {
                    rows: serde_json::from_value(e.value["rows"].clone())?,
                    value: parse_mat(&e.value["value"], &scale)?,
                },
                k => return Err(Error::Spec(format!("fixture {}: unknown kind '{k}'", e.id))),
            };
            Ok(FixtureEntry {
                id: e.id,
                location: e.location,
                expected,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub id: String,
    pub description: String,
    pub computed_by: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerReport {
    pub entries: Vec<LedgerEntry>,
}

impl LedgerReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    pub fn get(&self, id: &str) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

struct Solved {
    bundle: ModelBundle,
    sd: SpectralData,
    law: AsymptoticLaw,
    /// Canonical index of each published type.
    perm: Vec<usize>,
}

impl Solved {
    fn new(bundle: ModelBundle, published: Option<&[usize]>) -> Result<Self> {
        let sd = spectral(&bundle.spec)?;
        let law = asymptotics_integral(&bundle.spec, &sd)?;
        let perm = published.map_or_else(|| (0..bundle.q()).collect(), <[usize]>::to_vec);
        Ok(Self {
            bundle,
            sd,
            law,
            perm,
        })
    }

    fn mat(&self, m: &RatMatrix) -> RatMatrix {
        m.permuted(&self.perm)
    }

    fn vec(&self, v: &[Rational]) -> Vec<Rational> {
        paper_order::reorder(v, &self.perm)
    }

    fn sigma(&self) -> Result<RatMatrix> {
        match &self.law.sigma {
            MatrixValue::Exact(s) => Ok(self.mat(s)),
            MatrixValue::Float(_) => Err(Error::Verification("covariance is not exact".into())),
        }
    }

    fn spectrum(&self) -> Result<Vec<Rational>> {
        self.sd
            .eigenvalues
            .iter()
            .map(|e| {
                e.exact
                    .clone()
                    .ok_or_else(|| Error::Verification(format!("eigenvalue {e} is not rational")))
            })
            .collect()
    }

    fn var(&self, f: &str) -> Result<Rational> {
        self.cov(f, f)
    }

    fn cov(&self, f: &str, g: &str) -> Result<Rational> {
        let c = self
            .law
            .covariance(self.bundle.functional(f)?, self.bundle.functional(g)?)?;
        c.exact()
            .cloned()
            .ok_or_else(|| Error::Verification("covariance is not exact".into()))
    }

    fn mean(&self, f: &str) -> Result<Rational> {
        Ok(functional_law(&self.law, self.bundle.functional(f)?)?.mean)
    }
}

/// Which value each fixture is compared against and how it was obtained.
fn compute(id: &str, s: &mut HashMap<&'static str, Solved>) -> Result<(Expected, String)> {
    let (urn, key) = id
        .split_once('.')
        .ok_or_else(|| Error::Spec(format!("fixture id '{id}'")))?;
    let slot: &'static str = match urn {
        "binary" => "binary",
        "ternary" => "ternary",
        "leaves3" => "leaves3",
        "oneprot2" => "oneprot2",
        "oneprot3" => "oneprot3",
        _ => return Err(Error::Spec(format!("fixture id '{id}' names no known urn"))),
    };
    if !s.contains_key(slot) {
        let solved = match slot {
            "binary" => Solved::new(protected_urn(2)?, paper_order::permutation(2))?,
            "ternary" => Solved::new(protected_urn(3)?, paper_order::permutation(3))?,
            "leaves3" => Solved::new(leaves_gap_urn(3)?, None)?,
            "oneprot2" => Solved::new(oneprotected_urn(2)?, None)?,
            _ => Solved::new(oneprotected_urn(3)?, None)?,
        };
        s.insert(slot, solved);
    }
    let u = &s[slot];
    let model = format!("{}(m={})", u.bundle.model, u.bundle.m);
    let chain = |ops: &str| format!("{model} -> {ops}");
    Ok(match key {
        "A" => (Expected::Matrix(u.mat(&u.sd.a)), chain("build_matrix_a")),
        "eigenvalues" => (
            Expected::Spectrum(u.spectrum()?),
            chain("char_poly -> rational_roots"),
        ),
        "activities" => (
            Expected::Vector(u.vec(u.bundle.spec.activities())),
            chain("activities"),
        ),
        "v1" => (Expected::Vector(u.vec(&u.sd.v1)), chain("spectral -> v1")),
        "u1" => (Expected::Vector(u.vec(&u.sd.u1)), chain("spectral -> u1")),
        "P" => (
            Expected::Matrix(u.mat(&projection(&u.sd))),
            chain("spectral -> projection"),
        ),
        "B" => (
            Expected::Matrix(u.mat(&compute_b(&u.bundle.spec, &u.sd.v1)?)),
            chain("spectral -> compute_b"),
        ),
        "B2" => (
            Expected::Matrix(u.mat(&compute_bi(&u.bundle.spec, u.perm[1]))),
            chain("compute_b (type 2)"),
        ),
        "Sigma" => (
            Expected::Matrix(u.sigma()?),
            chain("spectral -> asymptotics_integral"),
        ),
        "Sigma_p" => {
            let sig = u.sigma()?;
            let rows = vec![16, 17, 18];
            (
                Expected::Block {
                    value: sig.submatrix(&rows, &rows),
                    rows,
                },
                chain("spectral -> asymptotics_integral -> block"),
            )
        }
        "leaf_vector" => (
            Expected::Vector(u.vec(u.bundle.functional("leaves")?)),
            chain("functional leaves"),
        ),
        "mu_protected" => (
            Expected::Scalar(u.mean("protected")?),
            chain("functional_law(protected).mean"),
        ),
        "var_protected" => (
            Expected::Scalar(u.var("protected")?),
            chain("functional_law(protected).variance"),
        ),
        "mu_leaves" => (
            Expected::Scalar(u.mean("leaves")?),
            chain("functional_law(leaves).mean"),
        ),
        "var_leaves" => (
            Expected::Scalar(u.var("leaves")?),
            chain("functional_law(leaves).variance"),
        ),
        "mu_one_protected" => (
            Expected::Scalar(u.mean("one_protected")?),
            chain("functional_law(one_protected).mean"),
        ),
        "var_one_protected" => (
            Expected::Scalar(u.var("one_protected")?),
            chain("functional_law(one_protected).variance"),
        ),
        "var_internal" => (
            Expected::Scalar(u.var("internal")?),
            chain("functional_law(internal).variance"),
        ),
        "cov_leaves_one_protected" => (
            Expected::Scalar(u.cov("leaves", "one_protected")?),
            chain("covariance(leaves, one_protected)"),
        ),
        _ => return Err(Error::Spec(format!("fixture id '{id}' has no computation"))),
    })
}

fn show(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

fn compare(expected: &Expected, actual: &Expected) -> std::result::Result<(), String> {
    match (expected, actual) {
        (Expected::Scalar(e), Expected::Scalar(a)) => (e == a).then_some(()).ok_or_else(|| {
            format!(
                "expected {}, got {}",
                format_rational(e),
                format_rational(a)
            )
        }),
        (Expected::Vector(e), Expected::Vector(a)) => (e == a)
            .then_some(())
            .ok_or_else(|| format!("expected {}, got {}", show(e), show(a))),
        (Expected::Spectrum(e), Expected::Spectrum(a)) => {
            let (mut e, mut a) = (e.clone(), a.clone());
            e.sort();
            a.sort();
            (e == a)
                .then_some(())
                .ok_or_else(|| format!("expected {}, got {}", show(&e), show(&a)))
        }
        (Expected::Matrix(e), Expected::Matrix(a))
        | (Expected::Block { value: e, .. }, Expected::Block { value: a, .. }) => {
            if e.rows() != a.rows() || e.cols() != a.cols() {
                return Err(format!(
                    "shape {}x{} vs {}x{}",
                    e.rows(),
                    e.cols(),
                    a.rows(),
                    a.cols()
                ));
            }
            for i in 0..e.rows() {
                for j in 0..e.cols() {
                    if e.get(i, j) != a.get(i, j) {
                        return Err(format!(
                            "entry ({}, {}): expected {}, got {}",
                            i + 1,
                            j + 1,
                            format_rational(e.get(i, j)),
                            format_rational(a.get(i, j))
                        ));
                    }
                }
            }
            Ok(())
        }
        _ => Err("fixture kind does not match the computed value".into()),
    }
}

fn entry(
    id: String,
    description: String,
    computed_by: String,
    r: std::result::Result<(), String>,
) -> LedgerEntry {
    let (status, detail) = match r {
        Ok(()) => (Status::Pass, "exact match".to_string()),
        Err(d) => (Status::Fail, d),
    };
    LedgerEntry {
        id,
        description,
        computed_by,
        status,
        detail,
    }
}

/// Runs every fixture plus the cross-checks between independent sources.
pub fn run_ledger() -> Result<LedgerReport> {
    let fixtures = load_fixtures()?;
    let mut solved = HashMap::new();
    let mut entries = Vec::with_capacity(fixtures.len() + 4);
    for f in &fixtures {
        let (r, by) = match compute(&f.id, &mut solved) {
            Ok((actual, by)) => (compare(&f.expected, &actual), by),
            Err(e) => (Err(e.to_string()), "error".to_string()),
        };
        entries.push(entry(f.id.clone(), f.location.clone(), by, r));
    }

    let find = |id: &str| fixtures.iter().find(|f| f.id == id).map(|f| &f.expected);
    // The full covariance fixture and the separately published block agree.
    if let (Some(Expected::Matrix(full)), Some(Expected::Block { rows, value })) =
        (find("ternary.Sigma"), find("ternary.Sigma_p"))
    {
        let r = compare(
            &Expected::Matrix(value.clone()),
            &Expected::Matrix(full.submatrix(rows, rows)),
        );
        entries.push(entry(
            "ternary.Sigma_p.fixtures_agree".into(),
            "ternary search trees: covariance block of the full matrix equals the published block"
                .into(),
            "fixture ternary.Sigma -> block".into(),
            r,
        ));
        let ones = vec![int(1); rows.len()];
        let sum = value.bilinear(&ones, &ones)?;
        let r = match find("ternary.var_protected") {
            Some(Expected::Scalar(v)) => {
                compare(&Expected::Scalar(v.clone()), &Expected::Scalar(sum))
            }
            _ => Err("missing variance fixture".into()),
        };
        entries.push(entry(
            "ternary.var_protected.block_sum".into(),
            "ternary search trees: the published block sums to the published variance".into(),
            "fixture ternary.Sigma_p -> (1,1,1) S (1,1,1)'".into(),
            r,
        ));
    }

    // Both covariance routes where both apply.
    for (id, bundle) in [
        ("binary", protected_urn(2)?),
        ("leaves3", leaves_gap_urn(3)?),
        ("oneprot3", oneprotected_urn(3)?),
    ] {
        let sd = spectral(&bundle.spec)?;
        let r = match (
            asymptotics_dual_basis(&bundle.spec, &sd),
            asymptotics_integral(&bundle.spec, &sd),
        ) {
            (Ok(d), Ok(i)) if d.sigma == i.sigma => Ok(()),
            (Ok(_), Ok(_)) => Err("dual-basis and Lyapunov covariances differ".into()),
            (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
        };
        entries.push(entry(
            format!("{id}.routes_agree"),
            format!(
                "{}: dual-basis and Lyapunov covariances coincide",
                bundle.model
            ),
            "asymptotics_dual_basis == asymptotics_integral".into(),
            r,
        ));
    }

    // Leaves of ternary trees by two urns.
    let via_types = solved
        .get("ternary")
        .map(|t| (t.mean("leaves"), t.var("leaves")));
    let gap = Solved::new(leaves_gap_urn(3)?, None)?;
    let r = match via_types {
        Some((Ok(m), Ok(v))) if m == gap.mean("leaves")? && v == gap.var("leaves")? => Ok(()),
        Some((Ok(m), Ok(v))) => Err(format!(
            "19-type urn gives ({}, {})",
            format_rational(&m),
            format_rational(&v)
        )),
        _ => Err("19-type law unavailable".into()),
    };
    entries.push(entry(
        "leaves3.two_urns_agree".into(),
        "ternary leaves: 19-type urn and 3-type gap urn give the same law".into(),
        "functional_law(protected m=3, leaves) == functional_law(leaves m=3, leaves)".into(),
        r,
    ));
    Ok(LedgerReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        let f = load_fixtures().unwrap();
        assert!(f.len() > 30);
        let v1 = f.iter().find(|e| e.id == "binary.v1").unwrap();
        assert_eq!(
            v1.expected,
            Expected::Vector(vec![
                Rational::new(1.into(), 30.into()),
                Rational::new(1.into(), 6.into()),
                Rational::new(1.into(), 10.into()),
                Rational::new(1.into(), 6.into()),
                Rational::new(1.into(), 5.into())
            ])
        );
    }

    #[test]
    fn mismatch_names_entry() {
        let e = Expected::Matrix(RatMatrix::from_i64(&[&[1, 2]]));
        let a = Expected::Matrix(RatMatrix::from_i64(&[&[1, 3]]));
        assert_eq!(
            compare(&e, &a).unwrap_err(),
            "entry (1, 2): expected 2, got 3"
        );
    }
}
