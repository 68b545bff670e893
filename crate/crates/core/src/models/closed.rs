use num_traits::One;
use serde::Serialize;

use crate::ratlinalg::{
    char_poly, format_rational, int, numeric_eigen, rat, rational_roots, ComplexVal, Poly,
    RatMatrix, Rational,
};
use crate::urn::build_matrix_a;
use crate::{Error, Result};

use super::{node_urn, ModelBundle, ModelKind, SmallTreeType};

/// `φ_m(λ) = ∏_{i=1}^{m-1} (λ + i) - m!`, the characteristic polynomial of
/// the node urn.
pub fn phi(m: usize) -> Poly {
    let mut p = Poly::one();
    let mut fact = Rational::one();
    for i in 1..m as i64 {
        p = p.mul(&Poly::from_i64(&[i, 1]));
    }
    for i in 1..=m as i64 {
        fact *= int(i);
    }
    p.sub(&Poly::constant(fact))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedForms {
    pub m: usize,
    #[serde(serialize_with = "crate::ratlinalg::serde_rational::serialize")]
    pub harmonic: Rational,
    #[serde(serialize_with = "crate::ratlinalg::serde_rational::serialize")]
    pub mu_leaves: Rational,
    #[serde(serialize_with = "crate::ratlinalg::serde_rational::serialize")]
    pub mu_one_protected: Rational,
    /// `Σ_{k=2}^m 1/(k(k+1)) = (m-1)/(2(m+1))`.
    pub sum_identity: bool,
}

pub fn closed_forms(m: usize) -> Result<ClosedForms> {
    if m < 3 {
        return Err(Error::Domain(format!("closed forms need m >= 3, got {m}")));
    }
    let mi = m as i64;
    let h: Rational = (1..=mi).map(|k| rat(1, k)).sum();
    let hm1 = &h - Rational::one();
    let sum: Rational = (2..=mi).map(|k| rat(1, k * (k + 1))).sum();
    let target = rat(mi - 1, 2 * (mi + 1));
    Ok(ClosedForms {
        m,
        mu_leaves: &target / &hm1,
        mu_one_protected: Rational::one() / (&hm1 * int(mi + 1)),
        sum_identity: sum == target,
        harmonic: h,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralCondition {
    pub m: usize,
    pub holds: bool,
    /// `None` when `φ_m` has no root besides 1.
    pub lambda2: Option<ComplexVal>,
    pub lambda2_re: Option<f64>,
    pub roots: Vec<ComplexVal>,
}

/// Whether every root of `φ_m` other than 1 has real part below 1/2.
/// The roots are the eigenvalues of the node urn matrix.
pub fn spectral_condition(m: usize) -> Result<SpectralCondition> {
    let a = build_matrix_a(&node_urn(m)?.spec);
    let roots = numeric_eigen(&a.to_float())?;
    let lambda2 = roots.get(1).copied();
    Ok(SpectralCondition {
        m,
        holds: lambda2.is_none_or(|l| l.re() < 0.5),
        lambda2_re: lambda2.map(|l| l.re()),
        lambda2,
        roots,
    })
}

/// The map `W = T X` from protected-urn counts to node-urn gap counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TMap {
    pub m: usize,
    /// `(m-1) x q`.
    pub t: Vec<Vec<i64>>,
}

impl TMap {
    pub fn new(m: usize, types: &[SmallTreeType]) -> Self {
        let mut t = vec![vec![0i64; types.len()]; m - 1];
        for (c, ty) in types.iter().enumerate() {
            let k = &ty.k;
            t[0][c] = k[0] as i64 + m as i64 * k[m - 1] as i64;
            for j in 2..m {
                t[j - 1][c] = j as i64 * k[j - 1] as i64;
            }
        }
        Self { m, t }
    }

    pub fn matrix(&self) -> RatMatrix {
        RatMatrix::from_fn(self.t.len(), self.t[0].len(), |i, j| int(self.t[i][j]))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorContainment {
    /// A factor of `φ_m`: a linear factor per rational root, plus the
    /// product of the remaining irreducible factors.
    pub factor: String,
    pub degree: usize,
    pub contained: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub m: usize,
    pub identity_holds: bool,
    /// First entry `(i, j)` where `TA` and `A_W T` differ.
    pub first_mismatch: Option<(usize, usize)>,
    pub factors: Vec<FactorContainment>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.identity_holds && self.factors.iter().all(|f| f.contained)
    }
}

/// Checks `TA = A_W T` and that every root of `φ_m` is an eigenvalue of the
/// protected urn matrix `A`, exactly: for each factor `f` of `φ_m`, the left
/// kernel `K` of `f(A_W)` is carried by `T'` to a subspace on which `A'`
/// acts with characteristic polynomial `f`.
pub fn lemma_root_check(bundle: &ModelBundle) -> Result<LemmaReport> {
    if bundle.model != ModelKind::Protected {
        return Err(Error::Domain(
            "the root check applies to the protected urn".into(),
        ));
    }
    let m = bundle.m;
    let types = bundle.types.as_ref().expect("protected model has types");
    let t = TMap::new(m, types).matrix();
    let a = build_matrix_a(&bundle.spec);
    let aw = build_matrix_a(&node_urn(m)?.spec);
    let lhs = t.mul(&a)?;
    let rhs = aw.mul(&t)?;
    let mut first_mismatch = None;
    'outer: for i in 0..lhs.rows() {
        for j in 0..lhs.cols() {
            if lhs.get(i, j) != rhs.get(i, j) {
                first_mismatch = Some((i, j));
                break 'outer;
            }
        }
    }

    let p = phi(m);
    let rr = rational_roots(&p)?;
    let mut factors: Vec<Poly> = rr.roots.iter().map(|(r, _)| Poly::linear_root(r)).collect();
    if rr.remainder.degree().unwrap_or(0) > 0 {
        factors.push(rr.remainder.monic());
    }
    let awt = aw.transpose();
    let tt = t.transpose();
    let at = a.transpose();
    let mut out = Vec::new();
    for f in factors {
        out.push(factor_containment(&f, &awt, &tt, &at)?);
    }
    Ok(LemmaReport {
        m,
        identity_holds: first_mismatch.is_none(),
        first_mismatch,
        factors: out,
    })
}

fn factor_containment(
    f: &Poly,
    awt: &RatMatrix,
    tt: &RatMatrix,
    at: &RatMatrix,
) -> Result<FactorContainment> {
    let deg = f.degree().unwrap_or(0);
    let name = f.to_string();
    let fail = |detail: String| {
        Ok(FactorContainment {
            factor: name.clone(),
            degree: deg,
            contained: false,
            detail,
        })
    };
    let kernel = f.eval_matrix(awt)?.nullspace();
    if kernel.len() != deg {
        return fail(format!(
            "kernel of f(A_W') has dimension {}, expected {deg}",
            kernel.len()
        ));
    }
    let q = awt.rows();
    let k = RatMatrix::from_fn(q, deg, |i, j| kernel[j][i].clone());
    // A_W' K = K C
    let ktk = k.transpose().mul(&k)?;
    let c = ktk.inverse()?.mul(&k.transpose())?.mul(&awt.mul(&k)?)?;
    if awt.mul(&k)? != k.mul(&c)? {
        return fail("kernel is not invariant".into());
    }
    let w = tt.mul(&k)?;
    if w.rank() != deg {
        return fail("T' K is rank deficient".into());
    }
    if at.mul(&w)? != w.mul(&c)? {
        return fail("A' does not preserve T' K".into());
    }
    let cp = char_poly(&c)?;
    if cp != *f {
        return fail(format!("restricted characteristic polynomial is {cp}"));
    }
    let detail = if deg == 1 {
        format!(
            "root {} is an eigenvalue of A",
            format_rational(&-f.coeffs()[0].clone())
        )
    } else {
        format!("all {deg} roots are eigenvalues of A")
    };
    Ok(FactorContainment {
        factor: name,
        degree: deg,
        contained: true,
        detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::protected_urn;

    #[test]
    fn phi_small() {
        assert_eq!(phi(3), Poly::from_i64(&[-4, 3, 1]));
        assert_eq!(phi(2), Poly::from_i64(&[-1, 1]));
    }

    #[test]
    fn closed_forms_ternary() {
        let c = closed_forms(3).unwrap();
        assert_eq!(c.mu_leaves, rat(3, 10));
        assert_eq!(c.mu_one_protected, rat(3, 10));
        assert!(c.sum_identity);
        assert_eq!(closed_forms(4).unwrap().mu_leaves, rat(18, 65));
        assert!(closed_forms(2).is_err());
    }

    #[test]
    fn condition_small() {
        let c = spectral_condition(3).unwrap();
        assert!(c.holds);
        assert!((c.lambda2_re.unwrap() + 4.0).abs() < 1e-12);
        assert!(spectral_condition(2).unwrap().lambda2.is_none());
    }

    #[test]
    fn lemma_small() {
        for m in 2..=4 {
            let r = lemma_root_check(&protected_urn(m).unwrap()).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }
}
