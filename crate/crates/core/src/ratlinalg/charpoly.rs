use num_traits::{One, Zero};

use super::{dot, LinalgError, Poly, RatMatrix, Rational};

/// `det(xI - M)` by Berkowitz's division-free recurrence, O(n^4).
pub fn char_poly(m: &RatMatrix) -> Result<Poly, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Dimension(format!(
            "characteristic polynomial of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Poly::one());
    }
    // Coefficients, highest degree first, of the trailing principal block.
    let mut v = vec![Rational::one(), -m.get(n - 1, n - 1).clone()];
    for k in (0..n - 1).rev() {
        let s = n - k - 1;
        let row: Vec<Rational> = m.row(k)[k + 1..].to_vec();
        let mut w: Vec<Rational> = (k + 1..n).map(|i| m.get(i, k).clone()).collect();

        let mut toeplitz = Vec::with_capacity(s + 2);
        toeplitz.push(Rational::one());
        toeplitz.push(-m.get(k, k).clone());
        for _ in 0..s {
            toeplitz.push(-dot(&row, &w));
            w = (k + 1..n).map(|i| dot(&m.row(i)[k + 1..], &w)).collect();
        }

        let mut next = vec![Rational::zero(); s + 2];
        for (i, out) in next.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate().take(i + 1) {
                let t = &toeplitz[i - j];
                if !t.is_zero() && !vj.is_zero() {
                    *out += t * vj;
                }
            }
        }
        v = next;
    }
    v.reverse();
    Ok(Poly::new(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlinalg::int;

    #[test]
    fn node_urn_m3() {
        let m = RatMatrix::from_i64(&[&[-1, 3], &[2, -2]]);
        assert_eq!(char_poly(&m).unwrap(), Poly::from_i64(&[-4, 3, 1]));
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(
            char_poly(&RatMatrix::zeros(2, 2)).unwrap(),
            Poly::from_i64(&[0, 0, 1])
        );
    }

    #[test]
    fn non_square_rejected() {
        assert!(matches!(
            char_poly(&RatMatrix::zeros(2, 3)),
            Err(LinalgError::Dimension(_))
        ));
    }

    #[test]
    fn matches_determinant_definition() {
        let m = RatMatrix::from_i64(&[
            &[2, -1, 0, 3],
            &[1, 0, 4, -2],
            &[0, 5, -3, 1],
            &[7, 1, 1, 1],
        ]);
        let p = char_poly(&m).unwrap();
        for x in -3..=3 {
            let shifted = RatMatrix::identity(4).scale(&int(x)).sub(&m).unwrap();
            assert_eq!(p.eval(&int(x)), shifted.determinant().unwrap());
        }
    }
}
