use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use super::{numeric_eigen, FloatMatrix, LinalgError, Poly, Rational};

/// Rational roots with multiplicities (sorted descending) and the deflated
/// remainder, which has no rational roots.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalRoots {
    pub roots: Vec<(Rational, usize)>,
    pub remainder: Poly,
}

impl RationalRoots {
    /// Multiplicity of `r`, zero if absent.
    pub fn multiplicity(&self, r: &Rational) -> usize {
        self.roots
            .iter()
            .find(|(x, _)| x == r)
            .map_or(0, |(_, k)| *k)
    }
}

const ENUMERATION_LIMIT: u64 = 1_000_000_000_000;

/// Finds every rational root of `p` exactly. Candidates are `a/b` with `a`
/// dividing the constant term and `b` the leading coefficient of the
/// primitive integer form; they come from full divisor enumeration when the
/// coefficients are small enough, and otherwise from rounding numerical root
/// approximations onto that lattice. Every candidate is confirmed by exact
/// evaluation before deflation.
pub fn rational_roots(p: &Poly) -> Result<RationalRoots, LinalgError> {
    if p.is_zero() {
        return Err(LinalgError::ZeroPolynomial);
    }
    let mut rem = p.clone();
    let mut roots: Vec<(Rational, usize)> = Vec::new();

    let x = Poly::from_i64(&[0, 1]);
    let mut zeros = 0;
    while rem.degree().unwrap_or(0) > 0 && rem.coeffs()[0].is_zero() {
        rem = rem.div_rem(&x)?.0;
        zeros += 1;
    }
    if zeros > 0 {
        roots.push((Rational::zero(), zeros));
    }

    loop {
        let mut found = false;
        for cand in candidates(&rem) {
            let mut mult = 0;
            while rem.degree().unwrap_or(0) > 0 && rem.eval(&cand).is_zero() {
                rem = rem.div_rem(&Poly::linear_root(&cand))?.0;
                mult += 1;
            }
            if mult > 0 {
                found = true;
                match roots.iter_mut().find(|(r, _)| *r == cand) {
                    Some(entry) => entry.1 += mult,
                    None => roots.push((cand, mult)),
                }
            }
        }
        if !found || rem.degree().unwrap_or(0) == 0 {
            break;
        }
    }
    roots.sort_by(|a, b| b.0.cmp(&a.0));
    Ok(RationalRoots {
        roots,
        remainder: rem,
    })
}

fn candidates(p: &Poly) -> Vec<Rational> {
    let Some(deg) = p.degree() else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }
    let ints = p.primitive_integer();
    let a0 = ints[0].abs();
    let lead = ints[deg].abs();
    let mut out: Vec<Rational> = Vec::new();
    let push = |r: Rational, out: &mut Vec<Rational>| {
        if !out.contains(&r) {
            out.push(r);
        }
    };

    if deg == 1 {
        push(Rational::new(-ints[0].clone(), ints[1].clone()), &mut out);
        return out;
    }

    let small = |b: &BigInt| b.to_u64().is_some_and(|v| v <= ENUMERATION_LIMIT);
    let lead_divs = if small(&lead) {
        divisors(lead.to_u64().unwrap_or(1))
    } else {
        vec![1]
    };

    if small(&a0) && small(&lead) {
        let a_divs = divisors(a0.to_u64().unwrap_or(1));
        if a_divs.len() * lead_divs.len() <= 200_000 {
            for &a in &a_divs {
                for &b in &lead_divs {
                    for sign in [1i64, -1] {
                        push(
                            Rational::new(BigInt::from(a) * sign, BigInt::from(b)),
                            &mut out,
                        );
                    }
                }
            }
            return out;
        }
    }

    for z in approximate_roots(p) {
        if z.im.abs() > 0.5 + 1e-3 * z.re.abs() {
            continue;
        }
        for &b in &lead_divs {
            let center = (z.re * b as f64).round();
            if !center.is_finite() {
                continue;
            }
            for delta in [-1.0, 0.0, 1.0] {
                let Some(a) = BigInt::from_f64(center + delta) else {
                    continue;
                };
                if a.is_zero() || !(&a0 % a.abs()).is_zero() {
                    continue;
                }
                push(Rational::new(a, BigInt::from(b)), &mut out);
            }
        }
    }
    out
}

fn divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return vec![1];
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Numerical roots from the balanced companion matrix.
pub(crate) fn approximate_roots(p: &Poly) -> Vec<Complex64> {
    let Some(deg) = p.degree() else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }
    let monic = p.monic();
    let c: Vec<f64> = monic.coeffs().iter().map(super::to_f64).collect();
    if c.iter().any(|x| !x.is_finite()) {
        return Vec::new();
    }
    let comp = FloatMatrix::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -c[i]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    numeric_eigen(&comp)
        .map(|v| v.iter().map(|z| z.as_complex()).collect())
        .unwrap_or_default()
}

/// One Newton step on `p`, kept only if it reduces `|p(z)|`.
pub(crate) fn polish_root(p: &Poly, z: Complex64) -> Complex64 {
    let dp = p.derivative();
    let fz = p.eval_f64(z);
    let dz = dp.eval_f64(z);
    if dz.norm() == 0.0 || !fz.is_finite() {
        return z;
    }
    let next = z - fz / dz;
    if next.is_finite() && p.eval_f64(next).norm() < fz.norm() {
        next
    } else {
        z
    }
}
