//! Property-based invariants of the closed-form transforms and the
//! criteria, over randomized valid parameter sets.

use num_complex::Complex64;
use proptest::prelude::*;
use spinwave::{
    duan_v, evolve_moments, initial_moments, oscillation_period, tripartite_verdict,
    vlf_correlations, vlf_gains, BogoliubovTransform, CouplingParams, SpinConvention,
};

fn bi_params() -> impl Strategy<Value = CouplingParams> {
    (0.5f64..2.0, 0.0f64..3.0, 5.0f64..50.0)
        .prop_filter("nondegenerate", |(k1, k2, _)| {
            (k1 * k1 - k2 * k2).abs() > 1e-3
        })
        .prop_map(|(k1, k2, c)| CouplingParams::bipartite(k1, k2, c).unwrap())
}

fn tri_params() -> impl Strategy<Value = CouplingParams> {
    (0.5f64..2.0, 0.0f64..3.0, 0.0f64..3.0, 5.0f64..50.0)
        .prop_filter("nondegenerate", |(k1, k2, k3, _)| {
            (k1 * k1 + k3 * k3 - k2 * k2).abs() > 1e-3
        })
        .prop_map(|(k1, k2, k3, c)| CouplingParams::tripartite(k1, k2, k3, c).unwrap())
}

fn any_params() -> impl Strategy<Value = CouplingParams> {
    prop_oneof![bi_params(), tri_params()]
}

proptest! {
    /// The closed-form transform is symplectic at every time.
    #[test]
    fn transform_is_symplectic(p in any_params(), frac in 0.0f64..1.0) {
        let t = frac * 2.0 * oscillation_period(&p).unwrap().exact;
        let defect = BogoliubovTransform::for_params(&p, t).symplectic_defect();
        prop_assert!(defect < 1e-9, "defect {defect:.3e} at t={t}");
    }

    /// At t = 0 the transform is the identity.
    #[test]
    fn transform_starts_at_identity(p in any_params()) {
        let m = BogoliubovTransform::for_params(&p, 0.0);
        let id = BogoliubovTransform::identity(p.n_modes());
        let diff = (m.matrix() - id.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        prop_assert!(diff < 1e-14, "t=0 deviation from identity {diff:.3e}");
    }

    /// Conjugation closure of the moment table survives evolution under
    /// both spin conventions.
    #[test]
    fn moment_structure_is_preserved(
        p in any_params(),
        frac in 0.0f64..1.0,
        product in proptest::bool::ANY,
    ) {
        let conv = if product {
            SpinConvention::ProductState
        } else {
            SpinConvention::BosonicVacuum
        };
        let t = frac * oscillation_period(&p).unwrap().exact;
        let m = BogoliubovTransform::for_params(&p, t);
        let t0 = initial_moments(conv, p.n_modes(), 1_000_000).unwrap();
        let t1 = evolve_moments(&m, &t0).unwrap();
        prop_assert!(t1.structure_defect() < 1e-12);
    }

    /// The criteria are displacement-invariant: only centered moments
    /// enter, so shifting every mean leaves all values unchanged.
    #[test]
    fn criteria_are_displacement_invariant(
        p in any_params(),
        frac in 0.0f64..1.0,
        res in proptest::collection::vec(-3.0f64..3.0, 8),
    ) {
        let t = frac * oscillation_period(&p).unwrap().exact;
        let m = BogoliubovTransform::for_params(&p, t);
        let t0 = initial_moments(SpinConvention::BosonicVacuum, p.n_modes(), 1).unwrap();
        let t1 = evolve_moments(&m, &t0).unwrap();
        let shifts: Vec<Complex64> = (0..p.n_modes())
            .map(|i| Complex64::new(res[i], res[i + 4]))
            .collect();
        let t2 = t1.displaced(&shifts).unwrap();
        if p.is_tripartite() {
            let g1 = vlf_gains(&t1).unwrap();
            let g2 = vlf_gains(&t2).unwrap();
            let v1 = vlf_correlations(&t1, &g1).unwrap();
            let v2 = vlf_correlations(&t2, &g2).unwrap();
            prop_assert!((v1.0 - v2.0).abs() < 1e-9);
            prop_assert!((v1.1 - v2.1).abs() < 1e-9);
            prop_assert!((v1.2 - v2.2).abs() < 1e-9);
            prop_assert_eq!(tripartite_verdict(v1), tripartite_verdict(v2));
        } else {
            let v1 = duan_v(&t1).unwrap();
            let v2 = duan_v(&t2).unwrap();
            prop_assert!((v1 - v2).abs() < 1e-9, "duan {v1} vs displaced {v2}");
        }
    }

    /// Evolved bosonic-vacuum states respect the uncertainty relation
    /// mode by mode (vacuum variance 1 in this convention).
    #[test]
    fn photonic_uncertainty_holds(p in any_params(), frac in 0.0f64..1.0) {
        let t = frac * oscillation_period(&p).unwrap().exact;
        let m = BogoliubovTransform::for_params(&p, t);
        let t0 = initial_moments(SpinConvention::BosonicVacuum, p.n_modes(), 1).unwrap();
        let t1 = evolve_moments(&m, &t0).unwrap();
        let aa = t1.cov_aa();
        let nn = t1.cov_nn();
        for mode in 1..p.n_modes() {
            let var_x = 2.0 * aa[(mode, mode)].re + 2.0 * nn[(mode, mode)].re + 1.0;
            let var_p = -2.0 * aa[(mode, mode)].re + 2.0 * nn[(mode, mode)].re + 1.0;
            prop_assert!(
                var_x * var_p >= 1.0 - 1e-9,
                "mode {mode}: Var(x)={var_x}, Var(p)={var_p}"
            );
        }
    }

    /// Duan V starts exactly at the separability bound 4 for every valid
    /// parameter set and either spin convention.
    #[test]
    fn duan_starts_at_bound(p in bi_params(), product in proptest::bool::ANY) {
        let conv = if product {
            SpinConvention::ProductState
        } else {
            SpinConvention::BosonicVacuum
        };
        let t0 = initial_moments(conv, 3, 1_000_000).unwrap();
        let m = BogoliubovTransform::for_params(&p, 0.0);
        let v = duan_v(&evolve_moments(&m, &t0).unwrap()).unwrap();
        prop_assert!((v - 4.0).abs() < 1e-12);
    }

    /// Setting k3 = 0 reduces the three-field transform to the two-field
    /// one on the shared modes, and leaves a3 untouched.
    #[test]
    fn tripartite_reduces_to_bipartite_at_zero_k3(
        (k1, k2, c) in (0.5f64..2.0, 0.0f64..3.0, 5.0f64..50.0)
            .prop_filter("nondegenerate", |(k1, k2, _)| (k1 * k1 - k2 * k2).abs() > 1e-3),
        frac in 0.0f64..1.0,
    ) {
        let bi = CouplingParams::bipartite(k1, k2, c).unwrap();
        let tri = CouplingParams::tripartite(k1, k2, 0.0, c).unwrap();
        let t = frac * oscillation_period(&bi).unwrap().exact;
        let mb = BogoliubovTransform::bipartite(&bi, t).unwrap();
        let mt = BogoliubovTransform::tripartite(&tri, t).unwrap();
        // bipartite stacked index -> tripartite stacked index
        let map = |i: usize| if i < 3 { i } else { i + 1 };
        for i in 0..6 {
            for j in 0..6 {
                let d = (mb.coefficient(i, j) - mt.coefficient(map(i), map(j))).norm();
                prop_assert!(d < 1e-12, "entry ({i},{j}) differs by {d:.3e}");
            }
        }
        // a3 row is the identity row
        for j in 0..8 {
            let expect = if j == 3 { 1.0 } else { 0.0 };
            prop_assert!((mt.coefficient(3, j).norm() - expect).abs() < 1e-12);
        }
    }

    /// The exact period formula and its large-c approximation agree to
    /// first order in 1/c (within 5% across the sampled range).
    #[test]
    fn period_approximation_is_close_at_large_c(
        (k1, k2) in (0.5f64..2.0, 0.0f64..3.0)
            .prop_filter("nondegenerate", |(k1, k2)| (k1 * k1 - k2 * k2).abs() > 0.05),
    ) {
        let p = CouplingParams::bipartite(k1, k2, 200.0).unwrap();
        let period = oscillation_period(&p).unwrap();
        prop_assert!(period.exact > 0.0 && period.approx > 0.0);
        let rel = (period.approx / period.exact - 1.0).abs();
        prop_assert!(rel < 0.05, "approx off by {:.2}% at c=200", 100.0 * rel);
    }
}
