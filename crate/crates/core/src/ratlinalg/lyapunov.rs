use num_traits::Zero;

use super::matrix::rref_in_place;
use super::{
    numeric_eigen, real_schur, ComplexVal, FloatMatrix, LinalgError, MatrixValue, RatMatrix,
    Rational,
};

/// Largest dimension solved over the rationals.
pub const EXACT_LYAPUNOV_CAP: usize = 40;

/// Solves `FX + XF' = -C` for symmetric `X`, exactly when `F` has at most
/// [`EXACT_LYAPUNOV_CAP`] rows and in double precision otherwise.
pub fn solve_lyapunov(f: &RatMatrix, c: &RatMatrix) -> Result<MatrixValue, LinalgError> {
    if f.rows() <= EXACT_LYAPUNOV_CAP {
        solve_lyapunov_exact(f, c).map(MatrixValue::Exact)
    } else {
        solve_lyapunov_float(&f.to_float(), &c.to_float()).map(MatrixValue::Float)
    }
}

fn check_shapes(fr: usize, fc: usize, cr: usize, cc: usize) -> Result<(), LinalgError> {
    if fr != fc || cr != cc || fr != cr {
        return Err(LinalgError::Dimension(format!(
            "Lyapunov equation with F {fr}x{fc} and C {cr}x{cc}"
        )));
    }
    Ok(())
}

/// Names the eigenvalue pair of `f` whose sum is closest to zero.
fn offending_pair(f: &FloatMatrix) -> LinalgError {
    let eig = numeric_eigen(f).unwrap_or_default();
    let mut best: Option<(f64, ComplexVal, ComplexVal)> = None;
    for (i, a) in eig.iter().enumerate() {
        for b in &eig[i..] {
            let s = (a.as_complex() + b.as_complex()).norm();
            if best.as_ref().is_none_or(|(d, _, _)| s < *d) {
                best = Some((s, *a, *b));
            }
        }
    }
    match best {
        Some((_, a, b)) => LinalgError::SingularLyapunov {
            first: a.to_string(),
            second: b.to_string(),
        },
        None => LinalgError::SingularLyapunov {
            first: "?".into(),
            second: "?".into(),
        },
    }
}

/// Exact solve of the symmetric part of the vectorised equation,
/// `q(q+1)/2` unknowns.
pub fn solve_lyapunov_exact(f: &RatMatrix, c: &RatMatrix) -> Result<RatMatrix, LinalgError> {
    check_shapes(f.rows(), f.cols(), c.rows(), c.cols())?;
    if !c.is_symmetric() {
        return Err(LinalgError::Dimension(
            "right-hand side is not symmetric".into(),
        ));
    }
    let q = f.rows();
    let idx = |a: usize, b: usize| {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        a * q - a * (a + 1) / 2 + b
    };
    let n = q * (q + 1) / 2;
    let mut sys: Vec<Vec<Rational>> = Vec::with_capacity(n);
    for i in 0..q {
        for j in i..q {
            let mut row = vec![Rational::zero(); n + 1];
            for k in 0..q {
                let fik = f.get(i, k);
                if !fik.is_zero() {
                    row[idx(k, j)] += fik;
                }
                let fjk = f.get(j, k);
                if !fjk.is_zero() {
                    row[idx(i, k)] += fjk;
                }
            }
            row[n] = -c.get(i, j).clone();
            sys.push(row);
        }
    }
    let pivots = rref_in_place(&mut sys, n);
    if pivots.len() < n {
        return Err(offending_pair(&f.to_float()));
    }
    Ok(RatMatrix::from_fn(q, q, |i, j| sys[idx(i, j)][n].clone()))
}

/// Bartels-Stewart: with `F = Q T Q'` in real Schur form, `Y = Q'XQ` solves
/// `TY + YT' = -Q'CQ`, which is back-substituted block by block.
pub fn solve_lyapunov_float(f: &FloatMatrix, c: &FloatMatrix) -> Result<FloatMatrix, LinalgError> {
    check_shapes(f.rows(), f.cols(), c.rows(), c.cols())?;
    let q = f.rows();
    if q == 0 {
        return Ok(FloatMatrix::zeros(0, 0));
    }
    let schur = real_schur(f)?;
    let t = &schur.t;
    let qm = &schur.q;
    let r = qm.transpose().mul(&c.scale(-1.0))?.mul(qm)?;
    let scale = f.norm_inf().max(f64::MIN_POSITIVE);

    let mut y = FloatMatrix::zeros(q, q);
    for &(j0, nj) in schur.blocks.iter().rev() {
        for &(i0, ni) in schur.blocks.iter().rev() {
            // Right-hand side for block (I, J).
            let mut rhs = [0.0f64; 4];
            for jj in 0..nj {
                for ii in 0..ni {
                    let (i, j) = (i0 + ii, j0 + jj);
                    let mut v = r[(i, j)];
                    for k in i0 + ni..q {
                        v -= t[(i, k)] * y[(k, j)];
                    }
                    for k in j0 + nj..q {
                        v -= y[(i, k)] * t[(j, k)];
                    }
                    rhs[jj * ni + ii] = v;
                }
            }
            // (I (x) T_II + T_JJ (x) I) vec(Y_IJ), column-major.
            let dim = ni * nj;
            let mut a = [[0.0f64; 4]; 4];
            for jj in 0..nj {
                for ii in 0..ni {
                    let row = jj * ni + ii;
                    for kk in 0..ni {
                        a[row][jj * ni + kk] += t[(i0 + ii, i0 + kk)];
                    }
                    for ll in 0..nj {
                        a[row][ll * ni + ii] += t[(j0 + jj, j0 + ll)];
                    }
                }
            }
            let sol = solve_small(&mut a, &mut rhs, dim, scale).ok_or_else(|| {
                let ev = |s: usize| {
                    schur
                        .eigenvalues
                        .get(s)
                        .map_or_else(|| "?".to_string(), ComplexVal::to_string)
                };
                LinalgError::SingularLyapunov {
                    first: ev(i0),
                    second: ev(j0),
                }
            })?;
            for jj in 0..nj {
                for ii in 0..ni {
                    y[(i0 + ii, j0 + jj)] = sol[jj * ni + ii];
                }
            }
        }
    }
    let x = qm.mul(&y)?.mul(&qm.transpose())?.symmetrized();
    if !x.is_finite() {
        return Err(LinalgError::NonFinite("Lyapunov solution".into()));
    }
    Ok(x)
}

/// Gaussian elimination with partial pivoting on a system of size <= 4.
fn solve_small(a: &mut [[f64; 4]; 4], b: &mut [f64; 4], n: usize, scale: f64) -> Option<[f64; 4]> {
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[p][c].abs() <= 1e-14 * scale {
            return None;
        }
        a.swap(p, c);
        b.swap(p, c);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0f64; 4];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::{int, rat};

    fn residual(f: &FloatMatrix, x: &FloatMatrix, c: &FloatMatrix) -> f64 {
        f.mul(x)
            .unwrap()
            .add(&x.mul(&f.transpose()).unwrap())
            .unwrap()
            .add(c)
            .unwrap()
            .norm_inf()
    }

    #[test]
    fn scalar() {
        let x = solve_lyapunov_exact(&RatMatrix::diag(&[rat(-3, 2)]), &RatMatrix::diag(&[int(3)]))
            .unwrap();
        assert_eq!(x, RatMatrix::diag(&[int(1)]));
    }

    #[test]
    fn decoupled() {
        let f = RatMatrix::diag(&[int(-1), int(-2)]);
        let x = solve_lyapunov_exact(&f, &RatMatrix::identity(2)).unwrap();
        assert_eq!(x, RatMatrix::diag(&[rat(1, 2), rat(1, 4)]));
        let xf = solve_lyapunov_float(&f.to_float(), &FloatMatrix::identity(2)).unwrap();
        assert!((xf[(0, 0)] - 0.5).abs() < 1e-14 && (xf[(1, 1)] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn exact_residual_vanishes() {
        let f = RatMatrix::from_i64(&[&[-3, 1, 0], &[2, -4, 1], &[0, 5, -6]]);
        let c = RatMatrix::from_i64(&[&[2, 1, 0], &[1, 3, -1], &[0, -1, 4]]);
        let x = solve_lyapunov_exact(&f, &c).unwrap();
        let res = f
            .mul(&x)
            .unwrap()
            .add(&x.mul(&f.transpose()).unwrap())
            .unwrap()
            .add(&c)
            .unwrap();
        assert!(res.is_zero());
        assert!(x.is_symmetric());
        let xf = solve_lyapunov_float(&f.to_float(), &c.to_float()).unwrap();
        assert!(xf.sub(&x.to_float()).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn complex_pair_block() {
        // Eigenvalues -1 +- 2i and -3.
        let f = FloatMatrix::from_rows(&[
            vec![-1.0, 2.0, 0.5],
            vec![-2.0, -1.0, 0.0],
            vec![0.0, 0.3, -3.0],
        ])
        .unwrap();
        let c = FloatMatrix::from_rows(&[
            vec![1.0, 0.2, 0.0],
            vec![0.2, 2.0, 0.1],
            vec![0.0, 0.1, 1.0],
        ])
        .unwrap();
        let x = solve_lyapunov_float(&f, &c).unwrap();
        assert!(residual(&f, &x, &c) <= 1e-12 * c.norm_inf());
    }

    #[test]
    fn singular_operator_names_pair() {
        let f = RatMatrix::diag(&[int(1), int(-1)]);
        let err = solve_lyapunov_exact(&f, &RatMatrix::from_i64(&[&[0, 1], &[1, 0]])).unwrap_err();
        assert!(matches!(err, LinalgError::SingularLyapunov { .. }));
        let err = solve_lyapunov_float(&f.to_float(), &FloatMatrix::identity(2)).unwrap_err();
        assert!(matches!(err, LinalgError::SingularLyapunov { .. }));
    }
}
