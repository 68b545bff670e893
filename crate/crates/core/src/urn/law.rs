use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::spectral::{classify_regime, Regime, SpectralData};
use super::{compute_b, UrnSpec};
use crate::ratlinalg::{
    solve_lyapunov_exact, solve_lyapunov_float, to_f64, FloatMatrix, MatrixValue, RatMatrix,
    Rational, Scalar, EXACT_LYAPUNOV_CAP,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DualBasis,
    Lyapunov,
}

/// Limit law `n^{-1/2}(X_n - nμ) -> N(0, Σ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticLaw {
    #[serde(with = "crate::ratlinalg::serde_rational::vec")]
    pub mu: Vec<Rational>,
    pub sigma: MatrixValue,
    pub regime: Regime,
    pub method: Method,
}

/// `(c·μ, c'Σc)` for a linear functional `c·X_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalLaw {
    #[serde(with = "crate::ratlinalg::serde_rational")]
    pub mean: Rational,
    pub variance: Scalar,
}

impl AsymptoticLaw {
    pub fn q(&self) -> usize {
        self.mu.len()
    }

    /// Asymptotic covariance of `c·X_n` and `d·X_n`.
    pub fn covariance(&self, c: &[Rational], d: &[Rational]) -> Result<Scalar> {
        if c.len() != self.q() || d.len() != self.q() {
            return Err(Error::Domain(format!(
                "functional of length {}/{} for a {}-type urn",
                c.len(),
                d.len(),
                self.q()
            )));
        }
        Ok(self.sigma.bilinear(c, d))
    }
}

pub fn functional_law(law: &AsymptoticLaw, c: &[Rational]) -> Result<FunctionalLaw> {
    let variance = law.covariance(c, c)?;
    Ok(FunctionalLaw {
        mean: crate::ratlinalg::dot(c, &law.mu),
        variance,
    })
}

fn require_normal(sd: &SpectralData) -> Result<Regime> {
    let regime = classify_regime(sd);
    if regime != Regime::Normal {
        let worst = sd
            .non_perron()
            .first()
            .map_or_else(String::new, |e| e.to_string());
        return Err(Error::Regime {
            regime: regime.to_string(),
            detail: format!(
                "largest non-Perron eigenvalue {worst} does not satisfy Re λ < λ1/2 = {}",
                to_f64(&sd.lambda1) / 2.0
            ),
        });
    }
    Ok(regime)
}

/// First-order limit `μ = λ1 v1` of `X_n / n`.
pub fn mean_vector(sd: &SpectralData) -> Vec<Rational> {
    sd.v1.iter().map(|x| x * &sd.lambda1).collect()
}

/// `P_I = I - v1 u1'`.
pub fn projection(sd: &SpectralData) -> RatMatrix {
    let q = sd.v1.len();
    RatMatrix::identity(q)
        .sub(&RatMatrix::outer(&sd.v1, &sd.u1))
        .expect("square")
}

/// Integral route: with `M = A - λ1 v1 u1'` the covariance is `s X` where
/// `(M - λ1/2 I)X + X(M - λ1/2 I)' = -P_I B P_I'`.
pub fn asymptotics_integral(spec: &UrnSpec, sd: &SpectralData) -> Result<AsymptoticLaw> {
    let regime = require_normal(sd)?;
    let s = spec
        .step_increment()
        .ok_or_else(|| {
            Error::NotApplicable("a·E(ξ_i) is not the same positive constant for every type".into())
        })?
        .clone();
    let q = spec.q();
    let b = compute_b(spec, &sd.v1)?;
    let half = &sd.lambda1 / Rational::from_integer(2.into());

    let sigma = if q <= EXACT_LYAPUNOV_CAP {
        let p = projection(sd);
        let c = p.mul(&b)?.mul(&p.transpose())?;
        let m =
            sd.a.sub(&RatMatrix::outer(&sd.v1, &sd.u1).scale(&sd.lambda1))?;
        let f = m.shift_diag(&half);
        MatrixValue::Exact(solve_lyapunov_exact(&f, &c)?.scale(&s))
    } else {
        let v1: Vec<f64> = sd.v1.iter().map(to_f64).collect();
        let u1: Vec<f64> = sd.u1.iter().map(to_f64).collect();
        let l1 = to_f64(&sd.lambda1);
        let outer = FloatMatrix::from_fn(q, q, |i, j| v1[i] * u1[j]);
        let p = FloatMatrix::identity(q).sub(&outer)?;
        let c = p.mul(&b.to_float())?.mul(&p.transpose())?;
        let f =
            sd.a.to_float()
                .sub(&outer.scale(l1))?
                .sub(&FloatMatrix::identity(q).scale(l1 / 2.0))?;
        MatrixValue::Float(solve_lyapunov_float(&f, &c)?.scale(to_f64(&s)))
    };
    Ok(AsymptoticLaw {
        mu: mean_vector(sd),
        sigma,
        regime,
        method: Method::Lyapunov,
    })
}

/// Dual-basis route:
/// `Σ = Σ_{j,k>=2} u_j'Bu_k / (λ1 - λj - λk) v_j v_k'`.
pub fn asymptotics_dual_basis(spec: &UrnSpec, sd: &SpectralData) -> Result<AsymptoticLaw> {
    let regime = require_normal(sd)?;
    if !sd.diagonalizable {
        return Err(Error::NotApplicable(
            "A is not diagonalizable; use the Lyapunov (integral) route".into(),
        ));
    }
    let b = compute_b(spec, &sd.v1)?;
    let sigma = if sd.exact_spectrum() && spec.q() <= EXACT_LYAPUNOV_CAP {
        MatrixValue::Exact(exact_dual_sigma(sd, &b)?)
    } else {
        MatrixValue::Float(float_dual_sigma(sd, &b)?)
    };
    Ok(AsymptoticLaw {
        mu: mean_vector(sd),
        sigma,
        regime,
        method: Method::DualBasis,
    })
}

/// Exact dual bases `(λ_j, u_j, v_j)` with `u_i·v_j = δ_ij`, Perron pair
/// excluded. Requires a rational, diagonalizable spectrum.
pub fn exact_dual_bases(
    sd: &SpectralData,
) -> Result<Vec<(Rational, Vec<Rational>, Vec<Rational>)>> {
    let mut distinct: Vec<Rational> = Vec::new();
    for e in sd.non_perron() {
        let r = e
            .exact
            .clone()
            .ok_or_else(|| Error::NotApplicable("spectrum is not rational".into()))?;
        if !distinct.contains(&r) {
            distinct.push(r);
        }
    }
    let mut out = Vec::new();
    for lam in distinct {
        let shifted = sd.a.shift_diag(&lam);
        let right = shifted.nullspace();
        let left = shifted.transpose().nullspace();
        if right.len() != left.len() {
            return Err(Error::NotApplicable(
                "eigenspace dimensions disagree".into(),
            ));
        }
        if lam == sd.lambda1 {
            continue;
        }
        let k = right.len();
        let gram = RatMatrix::from_fn(k, k, |i, j| crate::ratlinalg::dot(&left[i], &right[j]));
        let ginv = gram.inverse()?;
        for (a, u) in left.iter().enumerate() {
            // v_a = Σ_b right_b (G^{-1})_{b a}
            let mut v = vec![Rational::zero(); sd.v1.len()];
            for (bi, r) in right.iter().enumerate() {
                let g = ginv.get(bi, a);
                if g.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(r) {
                    *x += g * y;
                }
            }
            out.push((lam.clone(), u.clone(), v));
        }
    }
    Ok(out)
}

fn exact_dual_sigma(sd: &SpectralData, b: &RatMatrix) -> Result<RatMatrix> {
    let bases = exact_dual_bases(sd)?;
    let q = sd.v1.len();
    let n = bases.len();
    let u = RatMatrix::from_fn(n, q, |j, i| bases[j].1[i].clone());
    let ubu = u.mul(b)?.mul(&u.transpose())?;
    let k = RatMatrix::from_fn(n, n, |j, l| {
        let den = &sd.lambda1 - &bases[j].0 - &bases[l].0;
        ubu.get(j, l) / den
    });
    let v = RatMatrix::from_fn(q, n, |i, j| bases[j].2[i].clone());
    Ok(v.mul(&k)?.mul(&v.transpose())?)
}

/// Complex dual bases by inverse iteration; the spectrum must be numerically
/// simple. The imaginary residue of the result must not exceed 1e-9.
fn float_dual_sigma(sd: &SpectralData, b: &RatMatrix) -> Result<FloatMatrix> {
    let q = sd.v1.len();
    let a = sd.a.to_float();
    let l1 = to_f64(&sd.lambda1);
    let lams: Vec<Complex64> = sd
        .non_perron()
        .iter()
        .map(|e| e.value.as_complex())
        .collect();
    let scale = a.norm_inf().max(1.0);
    let mut us = Vec::with_capacity(lams.len());
    let mut vs = Vec::with_capacity(lams.len());
    for &lam in &lams {
        let v = inverse_iteration(&a, lam, scale, false)?;
        let u = inverse_iteration(&a, lam, scale, true)?;
        let d: Complex64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
        if d.norm() < 1e-12 {
            return Err(Error::NotApplicable(format!(
                "eigenvalue {lam} is numerically defective"
            )));
        }
        us.push(u.into_iter().map(|x| x / d).collect::<Vec<_>>());
        vs.push(v);
    }
    let bf = b.to_float();
    let n = lams.len();
    // W[j][k] = u_j' B u_k / (λ1 - λj - λk)
    let bu: Vec<Vec<Complex64>> = us
        .iter()
        .map(|u| {
            (0..q)
                .map(|i| (0..q).map(|k| bf[(i, k)] * u[k]).sum())
                .collect()
        })
        .collect();
    let mut w = vec![vec![Complex64::zero(); n]; n];
    for j in 0..n {
        for k in 0..n {
            let num: Complex64 = us[j].iter().zip(&bu[k]).map(|(x, y)| x * y).sum();
            w[j][k] = num / (Complex64::new(l1, 0.0) - lams[j] - lams[k]);
        }
    }
    let mut sigma = vec![vec![Complex64::zero(); q]; q];
    for j in 0..n {
        for k in 0..n {
            let c = w[j][k];
            if c == Complex64::zero() {
                continue;
            }
            for (r, row) in sigma.iter_mut().enumerate() {
                let vr = c * vs[j][r];
                for (x, vk) in row.iter_mut().zip(&vs[k]) {
                    *x += vr * vk;
                }
            }
        }
    }
    let size = sigma
        .iter()
        .flatten()
        .map(|z| z.re.abs())
        .fold(1.0, f64::max);
    let imag = sigma
        .iter()
        .flatten()
        .map(|z| z.im.abs())
        .fold(0.0, f64::max);
    if imag > 1e-9 * size {
        return Err(Error::NotApplicable(format!(
            "dual-basis sum has imaginary residue {imag:e}"
        )));
    }
    Ok(FloatMatrix::from_fn(q, q, |i, j| sigma[i][j].re).symmetrized())
}

/// Eigenvector of `a` (or of `a'` when `left`) for the eigenvalue near `lam`.
fn inverse_iteration(
    a: &FloatMatrix,
    lam: Complex64,
    scale: f64,
    left: bool,
) -> Result<Vec<Complex64>> {
    let q = a.rows();
    let shift = lam + Complex64::new(1e-10 * scale, 1e-10 * scale);
    let m: Vec<Vec<Complex64>> = (0..q)
        .map(|i| {
            (0..q)
                .map(|j| {
                    let x = if left { a[(j, i)] } else { a[(i, j)] };
                    Complex64::new(x, 0.0) - if i == j { shift } else { Complex64::zero() }
                })
                .collect()
        })
        .collect();
    let lu = ComplexLu::new(m)
        .ok_or_else(|| Error::NotApplicable("inverse iteration breakdown".into()))?;
    let mut x: Vec<Complex64> = (0..q)
        .map(|i| Complex64::new(1.0 + (i as f64) * 0.1, 0.3))
        .collect();
    for _ in 0..3 {
        x = lu.solve(&x);
        let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::NotApplicable("inverse iteration breakdown".into()));
        }
        for z in &mut x {
            *z /= n;
        }
    }
    Ok(x)
}

struct ComplexLu {
    lu: Vec<Vec<Complex64>>,
    perm: Vec<usize>,
}

impl ComplexLu {
    fn new(mut a: Vec<Vec<Complex64>>) -> Option<Self> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        for c in 0..n {
            let p = (c..n).max_by(|&x, &y| a[x][c].norm().total_cmp(&a[y][c].norm()))?;
            if a[p][c].norm() == 0.0 {
                return None;
            }
            a.swap(p, c);
            perm.swap(p, c);
            for r in c + 1..n {
                let f = a[r][c] / a[c][c];
                a[r][c] = f;
                for k in c + 1..n {
                    let t = a[c][k];
                    a[r][k] -= f * t;
                }
            }
        }
        Some(Self { lu: a, perm })
    }

    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = b.len();
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let t = self.lu[i][k] * y[k];
                y[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.lu[i][k] * y[k];
                y[i] -= t;
            }
            y[i] /= self.lu[i][i];
        }
        y
    }
}
