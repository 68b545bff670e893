//! Householder reduction to Hessenberg form followed by Francis double-shift
//! QR iteration. The iteration follows the classic EISPACK `orthes`/`hqr2`
//! pair and stops at the real Schur form; eigenvectors are not computed.

use super::{ComplexVal, FloatMatrix, LinalgError};

/// `A = Q T Q'` with `T` quasi upper triangular and `Q` orthogonal.
#[derive(Clone, Debug)]
pub struct RealSchur {
    pub t: FloatMatrix,
    pub q: FloatMatrix,
    /// Diagonal blocks as `(start, size)` with size 1 or 2.
    pub blocks: Vec<(usize, usize)>,
    /// Eigenvalues in diagonal order (not sorted).
    pub eigenvalues: Vec<ComplexVal>,
}

const ITER_PER_EIGENVALUE: usize = 60;

/// All eigenvalues of a real square matrix, sorted by descending real part
/// and then descending imaginary part. Balancing is applied first.
pub fn numeric_eigen(m: &FloatMatrix) -> Result<Vec<ComplexVal>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Dimension(
            "eigenvalues of a non-square matrix".into(),
        ));
    }
    if !m.is_finite() {
        return Err(LinalgError::NonFinite("matrix entry".into()));
    }
    let n = m.rows();
    let mut h: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    balance(&mut h);
    let _ = orthes(&mut h, false);
    let mut eig = hqr2(&mut h, None)?;
    sort_eigenvalues(&mut eig);
    Ok(eig)
}

/// Real Schur decomposition without balancing, so that `Q` is orthogonal.
pub fn real_schur(m: &FloatMatrix) -> Result<RealSchur, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Dimension(
            "Schur form of a non-square matrix".into(),
        ));
    }
    if !m.is_finite() {
        return Err(LinalgError::NonFinite("matrix entry".into()));
    }
    let n = m.rows();
    let mut h: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut v = orthes(&mut h, true).expect("accumulation requested");
    let eigenvalues = hqr2(&mut h, Some(&mut v))?;

    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && h[i + 1][i] != 0.0 {
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    Ok(RealSchur {
        t: FloatMatrix::from_fn(n, n, |i, j| h[i][j]),
        q: FloatMatrix::from_fn(n, n, |i, j| v[i][j]),
        blocks,
        eigenvalues,
    })
}

pub fn sort_eigenvalues(v: &mut [ComplexVal]) {
    v.sort_by(ComplexVal::spectral_order);
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable.
fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for x in a[i].iter_mut() {
                    *x *= g;
                }
                for row in a.iter_mut() {
                    row[i] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form. Returns the accumulated
/// orthogonal transform when `accumulate` is set.
fn orthes(h: &mut [Vec<f64>], accumulate: bool) -> Option<Vec<Vec<f64>>> {
    let n = h.len();
    let mut ort = vec![0.0; n];
    if n > 2 {
        let high = n - 1;
        for m in 1..high {
            let scale: f64 = (m..=high).map(|i| h[i][m - 1].abs()).sum();
            if scale == 0.0 {
                continue;
            }
            let mut hh = 0.0;
            for i in (m..=high).rev() {
                ort[i] = h[i][m - 1] / scale;
                hh += ort[i] * ort[i];
            }
            let mut g = hh.sqrt();
            if ort[m] > 0.0 {
                g = -g;
            }
            hh -= ort[m] * g;
            ort[m] -= g;
            for j in m..n {
                let f: f64 = (m..=high).rev().map(|i| ort[i] * h[i][j]).sum::<f64>() / hh;
                for i in m..=high {
                    h[i][j] -= f * ort[i];
                }
            }
            for row in h.iter_mut() {
                let f: f64 = (m..=high).rev().map(|j| ort[j] * row[j]).sum::<f64>() / hh;
                for j in m..=high {
                    row[j] -= f * ort[j];
                }
            }
            ort[m] *= scale;
            h[m][m - 1] = scale * g;
        }
    }

    let v = accumulate.then(|| {
        let mut v: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
            .collect();
        if n > 2 {
            let high = n - 1;
            for m in (1..high).rev() {
                if h[m][m - 1] == 0.0 {
                    continue;
                }
                for i in m + 1..=high {
                    ort[i] = h[i][m - 1];
                }
                for j in m..=high {
                    let g: f64 = (m..=high).map(|i| ort[i] * v[i][j]).sum();
                    let g = (g / ort[m]) / h[m][m - 1];
                    for i in m..=high {
                        v[i][j] += g * ort[i];
                    }
                }
            }
        }
        v
    });

    for (i, row) in h.iter_mut().enumerate() {
        for x in row.iter_mut().take(i.saturating_sub(1)) {
            *x = 0.0;
        }
    }
    v
}

/// Francis double-shift QR on an upper Hessenberg matrix, reducing it in
/// place to real Schur form. Transformations are applied to `v` if given.
#[allow(clippy::many_single_char_names)]
fn hqr2(
    h: &mut [Vec<f64>],
    mut v: Option<&mut Vec<Vec<f64>>>,
) -> Result<Vec<ComplexVal>, LinalgError> {
    let nn = h.len();
    let mut d = vec![0.0; nn];
    let mut e = vec![0.0; nn];
    if nn == 0 {
        return Ok(Vec::new());
    }
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z): (f64, f64, f64, f64, f64);
    let (mut w, mut x, mut y): (f64, f64, f64);

    let mut norm = 0.0;
    for (i, row) in h.iter().enumerate() {
        for val in row.iter().skip(i.saturating_sub(1)) {
            norm += val.abs();
        }
    }

    let mut n = nn as isize - 1;
    let mut iter = 0usize;
    while n >= 0 {
        let nu = n as usize;
        let mut l = nu;
        while l > 0 {
            s = h[l - 1][l - 1].abs() + h[l][l].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[l][l - 1].abs() < eps * s {
                h[l][l - 1] = 0.0;
                break;
            }
            l -= 1;
        }

        if l == nu {
            h[nu][nu] += exshift;
            d[nu] = h[nu][nu];
            e[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            w = h[nu][nu - 1] * h[nu - 1][nu];
            p = (h[nu - 1][nu - 1] - h[nu][nu]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[nu][nu] += exshift;
            h[nu - 1][nu - 1] += exshift;
            x = h[nu][nu];

            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = d[nu - 1];
                if z != 0.0 {
                    d[nu] = x - w / z;
                }
                e[nu - 1] = 0.0;
                e[nu] = 0.0;
                x = h[nu][nu - 1];
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;

                for j in nu - 1..nn {
                    z = h[nu - 1][j];
                    h[nu - 1][j] = q * z + p * h[nu][j];
                    h[nu][j] = q * h[nu][j] - p * z;
                }
                for row in h.iter_mut().take(nu + 1) {
                    z = row[nu - 1];
                    row[nu - 1] = q * z + p * row[nu];
                    row[nu] = q * row[nu] - p * z;
                }
                if let Some(v) = v.as_deref_mut() {
                    for row in v.iter_mut() {
                        z = row[nu - 1];
                        row[nu - 1] = q * z + p * row[nu];
                        row[nu] = q * row[nu] - p * z;
                    }
                }
                h[nu][nu - 1] = 0.0;
            } else {
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[nu][nu];
            y = 0.0;
            w = 0.0;
            if l < nu {
                y = h[nu - 1][nu - 1];
                w = h[nu][nu - 1] * h[nu - 1][nu];
            }

            // Exceptional shifts.
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[i][i] -= x;
                }
                s = h[nu][nu - 1].abs() + h[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nu {
                        h[i][i] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            if iter > ITER_PER_EIGENVALUE {
                return Err(LinalgError::NoConvergence { size: nn });
            }

            // Look for two consecutive small sub-diagonal elements.
            let mut m = nu - 2;
            loop {
                z = h[m][m];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[m + 1][m] + h[m][m + 1];
                q = h[m + 1][m + 1] - z - r - s;
                r = h[m + 2][m + 1];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[m][m - 1].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[m - 1][m - 1].abs() + z.abs() + h[m + 1][m + 1].abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in m + 2..=nu {
                h[i][i - 2] = 0.0;
                if i > m + 2 {
                    h[i][i - 3] = 0.0;
                }
            }

            // Double QR step on rows l..=n and columns m..=n.
            let mut k = m;
            while k < nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if notlast { h[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[k][k - 1] = -s * x;
                        // The reflector annihilates the bulge below it.
                        h[k + 1][k - 1] = 0.0;
                        if notlast {
                            h[k + 2][k - 1] = 0.0;
                        }
                    } else if l != m {
                        h[k][k - 1] = -h[k][k - 1];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = h[k][j] + q * h[k + 1][j];
                        if notlast {
                            p += r * h[k + 2][j];
                            h[k + 2][j] -= p * z;
                        }
                        h[k][j] -= p * x;
                        h[k + 1][j] -= p * y;
                    }
                    for row in h.iter_mut().take(nu.min(k + 3) + 1) {
                        p = x * row[k] + y * row[k + 1];
                        if notlast {
                            p += z * row[k + 2];
                            row[k + 2] -= p * r;
                        }
                        row[k] -= p;
                        row[k + 1] -= p * q;
                    }
                    if let Some(v) = v.as_deref_mut() {
                        for row in v.iter_mut() {
                            p = x * row[k] + y * row[k + 1];
                            if notlast {
                                p += z * row[k + 2];
                                row[k + 2] -= p * r;
                            }
                            row[k] -= p;
                            row[k + 1] -= p * q;
                        }
                    }
                }
                k += 1;
            }
        }
    }

    d.iter()
        .zip(&e)
        .map(|(&re, &im)| ComplexVal::new(re, im))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn identity_spectrum() {
        let ev = numeric_eigen(&FloatMatrix::identity(3)).unwrap();
        assert!(ev
            .iter()
            .all(|z| close(z.re(), 1.0, 1e-14) && z.im() == 0.0));
    }

    #[test]
    fn rotation_has_conjugate_pair() {
        let m = FloatMatrix::from_rows(&[vec![0.0, -2.0], vec![2.0, 0.0]]).unwrap();
        let ev = numeric_eigen(&m).unwrap();
        assert!(close(ev[0].im(), 2.0, 1e-12) && close(ev[1].im(), -2.0, 1e-12));
        assert!(close(ev[0].re(), 0.0, 1e-12));
    }

    #[test]
    fn schur_reconstructs() {
        let m = FloatMatrix::from_fn(7, 7, |i, j| {
            ((i * 7 + j * 3) % 11) as f64 - 5.0 + if i == j { 0.5 } else { 0.0 }
        });
        let s = real_schur(&m).unwrap();
        let back = s.q.mul(&s.t).unwrap().mul(&s.q.transpose()).unwrap();
        assert!(back.sub(&m).unwrap().max_abs() < 1e-10);
        let qtq = s.q.transpose().mul(&s.q).unwrap();
        assert!(qtq.sub(&FloatMatrix::identity(7)).unwrap().max_abs() < 1e-12);
        for i in 0..7usize {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(s.t[(i, j)], 0.0);
            }
        }
        let covered: usize = s.blocks.iter().map(|b| b.1).sum();
        assert_eq!(covered, 7);
    }

    #[test]
    fn non_square_rejected() {
        assert!(numeric_eigen(&FloatMatrix::zeros(2, 3)).is_err());
    }
}
