mod common;

use common::{hs_sq, product_matrix, purity, x_matrix, x_state};
use geocorr::closest::{
    closest_classical_for_case, closest_product_x, k_eigenvalues_x, product_distance,
    reduced_residual, stationarity_residual, CaseId,
};
use geocorr::dynamics::{damp, p_t};
use geocorr::quantifiers::{
    bell_diagonal_quantifiers, discord_measurement_oracle, geometric_discord_general, quantifiers_x,
};
use geocorr::state::{
    bloch_compose, bloch_decompose, x_params_to_bloch, DensityMatrix4, Matrix4c, C64,
};
use geocorr::Tolerances;
use nalgebra::Matrix4;
use proptest::prelude::*;

fn min_eigenvalue(m: &Matrix4c) -> f64 {
    m.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Random full-rank density matrices `A A† / Tr(A A†)`.
fn dense_state() -> impl Strategy<Value = DensityMatrix4> {
    prop::array::uniform32(-1.0f64..1.0)
        .prop_map(|v| {
            let a = Matrix4::from_fn(|r, c| C64::new(v[4 * r + c], v[16 + 4 * r + c]));
            let m = a * a.adjoint();
            let tr = m.trace().re;
            DensityMatrix4::from_matrix(m / C64::new(tr, 0.0))
        })
        .prop_filter("valid", |d| d.is_valid())
}

/// Bell-diagonal correlations as mixtures of the four Bell states.
fn bell_diagonal() -> impl Strategy<Value = (f64, f64, f64)> {
    prop::array::uniform4(0.0f64..1.0)
        .prop_filter("nonzero", |w| w.iter().sum::<f64>() > 1e-6)
        .prop_map(|w| {
            let s: f64 = w.iter().sum();
            let p = w.map(|x| x / s);
            let corners = [
                (1.0, -1.0, 1.0),
                (-1.0, 1.0, 1.0),
                (1.0, 1.0, -1.0),
                (-1.0, -1.0, -1.0),
            ];
            corners.iter().zip(p).fold((0.0, 0.0, 0.0), |acc, (c, q)| {
                (acc.0 + q * c.0, acc.1 + q * c.1, acc.2 + q * c.2)
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn composed_x_states_are_density_matrices(p in x_state()) {
        let rho = bloch_compose(&x_params_to_bloch(&p).unwrap());
        let m = rho.matrix();
        prop_assert!((m - m.adjoint()).iter().all(|z| z.norm() <= 1e-12));
        prop_assert!((m.trace() - C64::new(1.0, 0.0)).norm() <= 1e-10);
        prop_assert!(min_eigenvalue(m) >= -1e-10);
        prop_assert!(hs_sq(m, &x_matrix(&p)) <= 1e-24);
    }

    #[test]
    fn correlation_tensor_entries_are_bounded(p in x_state()) {
        let b = p.bloch();
        prop_assert!(b.t.iter().all(|t| t.abs() <= 1.0 + 1e-12));
    }

    #[test]
    fn bell_diagonal_states_close_additively((t11, t22, t33) in bell_diagonal()) {
        let r = bell_diagonal_quantifiers(t11, t22, t33).unwrap();
        prop_assert!(r.residual_closure.abs() <= 1e-12);
        prop_assert!(r.l_g.abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bloch_round_trips(p in x_state(), rho in dense_state()) {
        let b = p.bloch();
        let back = bloch_decompose(&bloch_compose(&b)).unwrap();
        prop_assert!(back.max_abs_diff(&b) <= 1e-12);
        let again = bloch_compose(&rho.to_bloch());
        prop_assert!(hs_sq(again.matrix(), rho.matrix()).sqrt() <= 1e-12);
    }

    #[test]
    fn closest_product_is_stationary(p in x_state()) {
        let pair = closest_product_x(&p).unwrap();
        let b = p.bloch();
        prop_assert!(reduced_residual(p.x3(), p.y3(), p.t33(), pair.a[2], pair.b[2]) <= 1e-10);
        prop_assert!(stationarity_residual(&b, &pair) <= 1e-10);
        prop_assert!((p.t33() - pair.a[2] * pair.b[2]).abs() <= 1.0 + 1e-10);
    }

    #[test]
    fn case_labels_are_consistent(p in x_state()) {
        let k = k_eigenvalues_x(&p);
        prop_assert!(k.k1 >= k.k2);
        prop_assert_eq!(k.case_id == CaseId::Case1, k.k1 <= k.k3);
    }

    #[test]
    fn classical_state_has_no_discord_and_is_closest(p in x_state()) {
        let case = k_eigenvalues_x(&p).case_id;
        let chi = closest_classical_for_case(&p, case);
        prop_assert!(geometric_discord_general(&chi.bloch()) <= 1e-10);
        let other = closest_classical_for_case(&p, case.other());
        let rho = x_matrix(&p);
        prop_assert!(hs_sq(&rho, &x_matrix(&chi)) <= hs_sq(&rho, &x_matrix(&other)) + 1e-15);
    }

    #[test]
    fn quantifiers_match_dense_distances(p in x_state()) {
        let r = quantifiers_x(&p).unwrap();
        let rho = x_matrix(&p);
        let chi = x_matrix(&r.classical_state);
        let pi_rho = product_matrix(&r.product_pair);
        let pi_chi = product_matrix(&r.classical_product_pair);
        prop_assert!((r.t_g - hs_sq(&rho, &pi_rho)).abs() <= 1e-10);
        prop_assert!((r.d_g - hs_sq(&rho, &chi)).abs() <= 1e-10);
        prop_assert!((r.c_g - hs_sq(&chi, &pi_chi)).abs() <= 1e-10);
        prop_assert!((r.l_g - hs_sq(&pi_rho, &pi_chi)).abs() <= 1e-10);
        prop_assert!((r.d_g - (purity(&rho) - purity(&chi))).abs() <= 1e-10);
        prop_assert!((r.t_g - product_distance(&p.bloch(), &r.product_pair)).abs() <= 1e-12);
    }

    #[test]
    fn case_two_sign_law_and_defect_identity(p in x_state().prop_filter("case 2", |p| k_eigenvalues_x(p).case_id == CaseId::Case2)) {
        let r = quantifiers_x(&p).unwrap();
        let (a3, b3) = (r.product_pair.a[2], r.product_pair.b[2]);
        prop_assert!(r.residual_closure <= 1e-10);
        let expected = a3 * a3 * (p.t33() - a3 * b3).powi(2) / 2.0;
        prop_assert!((r.residual_with_l - expected).abs() <= 1e-10);
    }

    #[test]
    fn damping_preserves_x_state_validity(p in x_state(), lambda in 0.01f64..6.0, t in 0.0f64..50.0) {
        let pt = p_t(t, 1.0, lambda);
        prop_assert!((0.0..=1.0).contains(&pt));
        let s = damp(&p, pt);
        let tol = Tolerances { trace: 1e-10, x_block: 1e-10, ..Tolerances::default() };
        prop_assert!(s.validate(&tol).is_ok(), "{:?}", s);
        prop_assert!((s.diagonal().iter().sum::<f64>() - 1.0).abs() <= 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn discord_of_general_states_matches_measurement(rho in dense_state()) {
        let closed = geometric_discord_general(&rho.to_bloch());
        let measured = discord_measurement_oracle(&rho, 64);
        prop_assert!((closed - measured).abs() <= 1e-6, "{} vs {}", closed, measured);
    }
}
