use proptest::prelude::*;

use polya_mst::ratlinalg::{
    char_poly, int, numeric_eigen, rat, rational_roots, solve_lyapunov_exact, solve_lyapunov_float,
    LinalgError, Poly, RatMatrix, Rational,
};

fn int_matrix(max: usize, range: i64) -> impl Strategy<Value = RatMatrix> {
    (1..=max).prop_flat_map(move |n| {
        prop::collection::vec(-range..=range, n * n)
            .prop_map(move |v| RatMatrix::from_fn(n, n, |i, j| int(v[i * n + j])))
    })
}

fn pair(max: usize, range: i64) -> impl Strategy<Value = (RatMatrix, RatMatrix)> {
    (1..=max).prop_flat_map(move |n| {
        let gen = move || {
            prop::collection::vec(-range..=range, n * n)
                .prop_map(move |v| RatMatrix::from_fn(n, n, |i, j| int(v[i * n + j])))
        };
        (gen(), gen())
    })
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cayley_hamilton(m in int_matrix(6, 4)) {
        let p = char_poly(&m).unwrap();
        prop_assert_eq!(p.degree(), Some(m.rows()));
        prop_assert!(p.eval_matrix(&m).unwrap().is_zero());
    }

    #[test]
    fn deflation_reassembles(
        roots in prop::collection::vec(small_rational(), 0..5),
        tail in prop::collection::vec(-5i64..=5, 1..4),
        lead in 1i64..=3,
    ) {
        // Known rational roots times an arbitrary integer cofactor.
        let mut cof = tail.clone();
        cof.push(lead);
        let p = Poly::from_roots(&roots).mul(&Poly::from_i64(&cof));
        prop_assume!(!p.is_zero());
        let rr = rational_roots(&p).unwrap();
        let mut back = rr.remainder.clone();
        for (r, k) in &rr.roots {
            back = back.mul(&Poly::linear_root(r).pow(*k as u32));
        }
        prop_assert_eq!(&back, &p);
        for r in &roots {
            prop_assert!(rr.roots.iter().any(|(x, _)| x == r), "root {} missed", r);
        }
    }

    #[test]
    fn lyapunov_exact_residual((f, c) in pair(5, 3)) {
        let f = f.shift_diag(&int(8));
        let c = c.add(&c.transpose()).unwrap();
        match solve_lyapunov_exact(&f, &c) {
            Ok(x) => {
                let r = f.mul(&x).unwrap().add(&x.mul(&f.transpose()).unwrap()).unwrap().add(&c).unwrap();
                prop_assert!(r.is_zero());
                prop_assert!(x.is_symmetric());
            }
            Err(e) => prop_assert!(matches!(e, LinalgError::SingularLyapunov { .. }), "{}", e),
        }
    }

    #[test]
    fn lyapunov_float_residual((f, c) in pair(8, 3)) {
        let f = f.shift_diag(&int(10)).to_float();
        let c = c.add(&c.transpose()).unwrap().to_float();
        let x = solve_lyapunov_float(&f, &c).unwrap();
        let r = f.mul(&x).unwrap().add(&x.mul(&f.transpose()).unwrap()).unwrap().add(&c).unwrap();
        prop_assert!(r.norm_inf() <= 1e-9 * c.norm_inf().max(1.0), "residual {}", r.norm_inf());
    }

    #[test]
    fn numeric_matches_rational_spectrum(
        n in 1usize..=6,
        seed_eigs in prop::collection::vec(-8i64..=8, 6),
        lower in prop::collection::vec(-2i64..=2, 36),
        upper in prop::collection::vec(-2i64..=2, 36),
    ) {
        // Unimodular P = L U, so P D P^{-1} has the integer spectrum D.
        let l = RatMatrix::from_fn(n, n, |i, j| if i == j { int(1) } else if i > j { int(lower[i * 6 + j]) } else { int(0) });
        let u = RatMatrix::from_fn(n, n, |i, j| if i == j { int(1) } else if i < j { int(upper[i * 6 + j]) } else { int(0) });
        let p = l.mul(&u).unwrap();
        let d: Vec<Rational> = seed_eigs[..n].iter().map(|&x| int(x)).collect();
        let m = p.mul(&RatMatrix::diag(&d)).unwrap().mul(&p.inverse().unwrap()).unwrap();

        let rr = rational_roots(&char_poly(&m).unwrap()).unwrap();
        let mut exact: Vec<f64> = Vec::new();
        for (r, k) in &rr.roots {
            exact.extend(std::iter::repeat_n(polya_mst::ratlinalg::to_f64(r), *k));
        }
        exact.sort_by(f64::total_cmp);
        let mut num = numeric_eigen(&m.to_float()).unwrap();
        num.sort_by(|a, b| a.re().total_cmp(&b.re()));
        prop_assert_eq!(num.len(), exact.len());
        let tol = 1e-8;
        for (z, e) in num.iter().zip(&exact) {
            prop_assert!((z.re() - e).abs() <= tol * e.abs().max(1.0), "{} vs {}", z, e);
            prop_assert!(z.im().abs() <= tol * e.abs().max(1.0));
        }
    }
}
