use num_traits::{One, Zero};

use polya_mst::models::{
    build_model, closed_forms, leaves_gap_urn, oneprotected_urn, paper_order, protected_urn,
    ModelBundle, ModelKind, Sidecar,
};
use polya_mst::ratlinalg::{dot, int, MatrixValue, Rational};
use polya_mst::urn::{
    asymptotics_dual_basis, asymptotics_integral, build_matrix_a, check_assumptions,
    functional_law, spectral, AsymptoticLaw, FunctionalLaw, UrnSpec,
};

/// Every urn small enough for an exact covariance.
fn exact_urns() -> Vec<ModelBundle> {
    let mut v = Vec::new();
    for m in 2..=6 {
        for kind in [ModelKind::Nodes, ModelKind::Leaves, ModelKind::OneProtected] {
            if let Ok(b) = build_model(kind, m) {
                v.push(b);
            }
        }
    }
    v.push(protected_urn(2).unwrap());
    v.push(protected_urn(3).unwrap());
    v
}

#[test]
fn activity_is_a_left_eigenvector() {
    for b in exact_urns().into_iter().chain([protected_urn(4).unwrap()]) {
        assert_eq!(b.spec.step_increment(), Some(&int(1)));
        let a = b.spec.activities();
        assert_eq!(
            build_matrix_a(&b.spec).vec_mul(a).unwrap(),
            a,
            "{} m={}",
            b.model,
            b.m
        );
    }
}

#[test]
fn normalization_and_covariance_kernel() {
    for b in exact_urns() {
        let sd = spectral(&b.spec).unwrap();
        assert_eq!(dot(b.spec.activities(), &sd.v1), Rational::one());
        assert_eq!(dot(&sd.u1, &sd.v1), Rational::one());
        let law = asymptotics_integral(&b.spec, &sd).unwrap();
        let MatrixValue::Exact(s) = &law.sigma else {
            panic!("{} m={} not exact", b.model, b.m)
        };
        assert!(
            s.vec_mul(&sd.u1).unwrap().iter().all(Zero::is_zero),
            "u1'Σ, {} m={}",
            b.model,
            b.m
        );
        assert!(
            s.mul_vec(&sd.u1).unwrap().iter().all(Zero::is_zero),
            "Σu1, {} m={}",
            b.model,
            b.m
        );
        assert!(s.is_symmetric());
        assert!((0..s.rows()).all(|i| *s.get(i, i) >= Rational::zero()));
    }
}

#[test]
fn routes_agree_where_both_apply() {
    let mut compared = 0;
    for b in exact_urns() {
        let sd = spectral(&b.spec).unwrap();
        if !sd.diagonalizable || !sd.exact_spectrum() {
            continue;
        }
        let d = asymptotics_dual_basis(&b.spec, &sd).unwrap();
        let i = asymptotics_integral(&b.spec, &sd).unwrap();
        assert!(d.sigma.exact().is_some());
        assert_eq!(d.sigma, i.sigma, "{} m={}", b.model, b.m);
        compared += 1;
    }
    assert!(compared >= 4, "only {compared} urns compared");
}

#[test]
fn dual_basis_refuses_defective_matrix() {
    let b = protected_urn(3).unwrap();
    let sd = spectral(&b.spec).unwrap();
    assert!(!sd.diagonalizable);
    assert!(asymptotics_dual_basis(&b.spec, &sd).is_err());
}

#[test]
fn assumptions_hold_for_all_models() {
    for m in 2..=6 {
        for kind in [
            ModelKind::Protected,
            ModelKind::Nodes,
            ModelKind::Leaves,
            ModelKind::OneProtected,
        ] {
            let Ok(b) = build_model(kind, m) else {
                assert!(kind == ModelKind::Leaves && m == 2);
                continue;
            };
            let r = check_assumptions(&b.spec);
            assert!(
                r.passed(),
                "{kind} m={m}: {:?}",
                r.failures().collect::<Vec<_>>()
            );
        }
    }
}

fn leaves_law(b: &ModelBundle) -> FunctionalLaw {
    let sd = spectral(&b.spec).unwrap();
    functional_law(
        &asymptotics_integral(&b.spec, &sd).unwrap(),
        b.functional("leaves").unwrap(),
    )
    .unwrap()
}

#[test]
fn two_urns_give_the_leaves_law() {
    for m in 3..=6 {
        let g = leaves_law(&leaves_gap_urn(m).unwrap());
        let o = leaves_law(&oneprotected_urn(m).unwrap());
        assert_eq!(g, o, "m={m}");
        assert_eq!(g.mean, closed_forms(m).unwrap().mu_leaves);
    }
    assert_eq!(
        leaves_law(&protected_urn(3).unwrap()),
        leaves_law(&leaves_gap_urn(3).unwrap())
    );
}

#[test]
fn ternary_leaf_vector_in_published_order() {
    let b = protected_urn(3).unwrap();
    let l = paper_order::reorder(
        b.functional("leaves").unwrap(),
        paper_order::permutation(3).unwrap(),
    );
    let want: Vec<Rational> = [3, 3, 3, 2, 3, 2, 2, 2, 2, 1, 2, 1, 1, 1, 1, 1, 0, 0, 0]
        .iter()
        .map(|&x| int(x))
        .collect();
    assert_eq!(l, want);
}

#[test]
fn outcomes_conserve_keys() {
    for m in 2..=5 {
        let b = protected_urn(m).unwrap();
        let a = b.spec.activities();
        for r in b.spec.rules() {
            for o in &r.outcomes {
                let gain: Rational = o.delta.nonzero().iter().map(|&(j, d)| &a[j] * int(d)).sum();
                assert_eq!(gain, int(1));
            }
        }
        let protected = b
            .types
            .as_ref()
            .unwrap()
            .iter()
            .filter(|t| t.protected())
            .count();
        assert_eq!(protected, m);
    }
}

#[test]
fn laws_round_trip_through_json() {
    for b in [
        protected_urn(2).unwrap(),
        oneprotected_urn(3).unwrap(),
        protected_urn(4).unwrap(),
    ] {
        let sd = spectral(&b.spec).unwrap();
        let law = asymptotics_integral(&b.spec, &sd).unwrap();
        let back: AsymptoticLaw =
            serde_json::from_str(&serde_json::to_string(&law).unwrap()).unwrap();
        assert_eq!(back, law);
        for c in b.functionals.values() {
            let fl = functional_law(&law, c).unwrap();
            let back: FunctionalLaw =
                serde_json::from_str(&serde_json::to_string(&fl).unwrap()).unwrap();
            assert_eq!(back, fl);
        }
    }
    // The 69-type law is floating point; it still round-trips bit for bit.
    let b = protected_urn(4).unwrap();
    let law = asymptotics_integral(&b.spec, &spectral(&b.spec).unwrap()).unwrap();
    assert!(law.sigma.exact().is_none());
}

#[test]
fn specs_and_sidecars_round_trip() {
    for b in exact_urns() {
        let spec: UrnSpec = serde_json::from_str(&serde_json::to_string(&b.spec).unwrap()).unwrap();
        assert_eq!(spec, b.spec);
        let s = b.sidecar();
        let back: Sidecar = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}

#[test]
fn not_normal_urn_reports_regime() {
    let b = build_model(ModelKind::Nodes, 27).unwrap();
    let sd = spectral(&b.spec).unwrap();
    let e = asymptotics_integral(&b.spec, &sd).unwrap_err();
    assert!(matches!(e, polya_mst::Error::Regime { .. }));
    assert_eq!(e.exit_code(), 2);
}
