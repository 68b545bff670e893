use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::{build_matrix_a, UrnSpec};
use crate::ratlinalg::{
    char_poly, dot, format_rational, numeric_eigen, rational_roots, sort_eigenvalues, to_f64,
    ComplexVal, Poly, RatMatrix, Rational, EXACT_LYAPUNOV_CAP,
};
use crate::{Error, Result};

/// Largest `q` for which the characteristic polynomial is computed exactly.
pub const EXACT_SPECTRUM_CAP: usize = EXACT_LYAPUNOV_CAP;

/// Numeric margin used for the regime and simplicity tests.
const MARGIN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenvalue {
    pub value: ComplexVal,
    /// Set when the eigenvalue is rational and was confirmed exactly.
    pub exact: Option<Rational>,
}

impl Eigenvalue {
    fn from_exact(r: Rational) -> Self {
        Self {
            value: ComplexVal::real(to_f64(&r)).expect("finite rational"),
            exact: Some(r),
        }
    }

    pub fn re(&self) -> f64 {
        self.value.re()
    }
}

impl Serialize for Eigenvalue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Eigenvalue", 3)?;
        st.serialize_field("re", &self.value.re())?;
        st.serialize_field("im", &self.value.im())?;
        st.serialize_field("exact", &self.exact.as_ref().map(format_rational))?;
        st.end()
    }
}

impl fmt::Display for Eigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) => write!(f, "{}", format_rational(r)),
            None => write!(f, "{}", self.value),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Normal,
    NotNormal,
    Boundary,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Normal => "normal",
            Regime::NotNormal => "not-normal",
            Regime::Boundary => "boundary",
        })
    }
}

/// Spectrum of `A` with the normalized Perron pair: `a·v1 = 1`, `u1·v1 = 1`.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub a: RatMatrix,
    /// All `q` eigenvalues with multiplicity, sorted by descending real part
    /// and then descending imaginary part.
    pub eigenvalues: Vec<Eigenvalue>,
    pub char_poly: Option<Poly>,
    pub lambda1: Rational,
    pub v1: Vec<Rational>,
    pub u1: Vec<Rational>,
    pub diagonalizable: bool,
}

impl SpectralData {
    /// True when every eigenvalue is rational.
    pub fn exact_spectrum(&self) -> bool {
        self.eigenvalues.iter().all(|e| e.exact.is_some())
    }

    /// Eigenvalues other than one copy of `λ1`.
    pub fn non_perron(&self) -> &[Eigenvalue] {
        &self.eigenvalues[1..]
    }

    /// Real part of the largest non-Perron eigenvalue.
    pub fn lambda2_re(&self) -> Option<f64> {
        self.non_perron().first().map(Eigenvalue::re)
    }
}

/// Eigenvalues of `a`, exact where rational, with the characteristic
/// polynomial when `a` is small enough to compute it.
pub fn eigen_data(a: &RatMatrix) -> Result<(Vec<Eigenvalue>, Option<Poly>)> {
    let q = a.rows();
    let (eigenvalues, cp) = if q <= EXACT_SPECTRUM_CAP {
        let p = char_poly(a)?;
        let rr = rational_roots(&p)?;
        let mut eig: Vec<Eigenvalue> = Vec::with_capacity(q);
        for (r, k) in &rr.roots {
            for _ in 0..*k {
                eig.push(Eigenvalue::from_exact(r.clone()));
            }
        }
        let mut irr: Vec<ComplexVal> = crate::ratlinalg::roots::approximate_roots(&rr.remainder)
            .into_iter()
            .map(|z| crate::ratlinalg::roots::polish_root(&rr.remainder, z))
            .map(ComplexVal::try_from)
            .collect::<Result<_, _>>()?;
        sort_eigenvalues(&mut irr);
        eig.extend(
            irr.into_iter()
                .map(|value| Eigenvalue { value, exact: None }),
        );
        eig.sort_by(|x, y| ComplexVal::spectral_order(&x.value, &y.value));
        (eig, Some(p))
    } else {
        let eig = numeric_eigen(&a.to_float())?;
        (
            eig.into_iter()
                .map(|value| Eigenvalue { value, exact: None })
                .collect(),
            None,
        )
    };
    if eigenvalues.len() != q {
        return Err(Error::Linalg(crate::LinalgError::NoConvergence { size: q }));
    }
    Ok((eigenvalues, cp))
}

pub fn spectral(spec: &UrnSpec) -> Result<SpectralData> {
    let a = build_matrix_a(spec);
    let (eigenvalues, cp) = eigen_data(&a)?;

    // (A3): the eigenvalue of largest real part must be real and positive.
    let top = &eigenvalues[0];
    if top.value.im().abs() > MARGIN {
        return Err(Error::Assumption(format!(
            "largest eigenvalue {} is not real",
            top.value
        )));
    }
    let lambda1 = match &top.exact {
        Some(r) => r.clone(),
        None => perron_from_activities(spec, &a, top.re()).ok_or_else(|| {
            Error::Assumption(format!("largest eigenvalue {} is not rational", top.value))
        })?,
    };
    if !lambda1.is_positive() {
        return Err(Error::Assumption(format!(
            "largest eigenvalue {} is not positive",
            format_rational(&lambda1)
        )));
    }
    // (A4): simplicity.
    let simple = match &cp {
        Some(_) => eigenvalues[1..]
            .iter()
            .all(|e| e.exact.as_ref() != Some(&lambda1)),
        None => eigenvalues
            .get(1)
            .is_none_or(|e| e.value.abs_diff(&top.value) > 1e-6 * top.re().abs().max(1.0)),
    };
    if !simple {
        return Err(Error::Assumption(format!(
            "largest eigenvalue {} is not simple",
            format_rational(&lambda1)
        )));
    }

    let shifted = a.shift_diag(&lambda1);
    let mut right = shifted.nullspace();
    if right.len() != 1 {
        return Err(Error::Assumption(format!(
            "eigenspace of {} has dimension {}",
            format_rational(&lambda1),
            right.len()
        )));
    }
    let mut v1 = right.pop().expect("one vector");
    let act = spec.activities();
    let av = dot(act, &v1);
    if av.is_zero() {
        return Err(Error::Assumption("a·v1 = 0; cannot normalize".into()));
    }
    for x in &mut v1 {
        *x /= &av;
    }

    let mut u1 = if a.vec_mul(act)? == act.iter().map(|x| x * &lambda1).collect::<Vec<_>>() {
        act.to_vec()
    } else {
        let mut left = shifted.transpose().nullspace();
        if left.len() != 1 {
            return Err(Error::Assumption(
                "left Perron eigenspace is not one-dimensional".into(),
            ));
        }
        left.pop().expect("one vector")
    };
    let uv = dot(&u1, &v1);
    if uv.is_zero() {
        return Err(Error::Assumption("u1·v1 = 0; cannot normalize".into()));
    }
    for x in &mut u1 {
        *x /= &uv;
    }

    let diagonalizable = match &cp {
        Some(p) => {
            let sf = p.div_rem(&p.gcd(&p.derivative()))?.0;
            sf.eval_matrix(&a)?.is_zero()
        }
        None => numerically_simple(&eigenvalues),
    };

    Ok(SpectralData {
        a,
        eigenvalues,
        char_poly: cp,
        lambda1,
        v1,
        u1,
        diagonalizable,
    })
}

/// When the activities are a left eigenvector for the constant step `s` and
/// `s` matches the numerical top eigenvalue, `λ1 = s` exactly.
fn perron_from_activities(spec: &UrnSpec, a: &RatMatrix, approx: f64) -> Option<Rational> {
    let s = spec.step_increment()?;
    if (to_f64(s) - approx).abs() > 1e-6 * approx.abs().max(1.0) {
        return None;
    }
    let act = spec.activities();
    let left = a.vec_mul(act).ok()?;
    (left == act.iter().map(|x| x * s).collect::<Vec<_>>()).then(|| s.clone())
}

/// Numerically distinct eigenvalues imply diagonalizability; any cluster is
/// reported as not diagonalizable.
fn numerically_simple(eig: &[Eigenvalue]) -> bool {
    let scale = eig
        .iter()
        .map(|e| e.value.as_complex().norm())
        .fold(1.0, f64::max);
    for (i, x) in eig.iter().enumerate() {
        for y in &eig[i + 1..] {
            if x.value.abs_diff(&y.value) <= 1e-6 * scale {
                return false;
            }
        }
    }
    true
}

/// Normal iff every non-Perron eigenvalue has real part below `λ1/2`.
/// Eigenvalues within `1e-9` of the line are `Boundary`; rational ones are
/// compared exactly.
pub fn classify_regime(sd: &SpectralData) -> Regime {
    let half = &sd.lambda1 / Rational::from_integer(2.into());
    let half_f = to_f64(&half);
    let mut boundary = false;
    for e in sd.non_perron() {
        match &e.exact {
            Some(r) => {
                if *r > half {
                    return Regime::NotNormal;
                }
                if *r == half {
                    boundary = true;
                }
            }
            None => {
                let d = e.re() - half_f;
                if d > MARGIN {
                    return Regime::NotNormal;
                }
                if d.abs() <= MARGIN {
                    boundary = true;
                }
            }
        }
    }
    if boundary {
        Regime::Boundary
    } else {
        Regime::Normal
    }
}
