use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gauss_renyi::sample::{random_state, random_symplectic, StateRanges};
use gauss_renyi::{
    d_to_t, e2_to_state, gamma_sandwich, m_matrix, sandwiched_renyi, sandwiched_renyi_sweep, state_to_e2,
    symplectic_eigenvalues, symplectic_form, t_to_d, tensor, thermal_state, trace_positive_e2, validate_state,
    williamson_decompose, ASign, DiagonalContraction, GaussianState, ThermalSpec,
};

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.amax()
}

fn max_abs_c(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn state(seed: u64, n: usize, pure_probability: f64) -> GaussianState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ranges = StateRanges {
        pure_probability,
        ..StateRanges::default()
    };
    random_state(n, &ranges, &mut rng)
}

fn thermal_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![4 => 0.05f64..8.0, 1 => Just(f64::INFINITY)], 1..=4)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn thermal_states_are_physical_with_expected_spectrum(t in thermal_values()) {
        let spec = ThermalSpec::from_unsorted(t.clone()).unwrap();
        let s = thermal_state(&spec);
        prop_assert!(validate_state(&s).is_empty());
        prop_assert_eq!(max_abs(&(s.cov() - s.cov().transpose())), 0.0);
        let mut d = symplectic_eigenvalues(s.cov()).unwrap();
        let mut want: Vec<f64> = t.iter().map(|&x| t_to_d(x)).collect();
        d.sort_by(|a, b| a.total_cmp(b));
        want.sort_by(|a, b| a.total_cmp(b));
        for (x, y) in d.iter().zip(&want) {
            prop_assert!((x - y).abs() <= 1e-10 * y.max(1.0));
        }
    }

    #[test]
    fn thermal_spec_is_sorted(t in thermal_values()) {
        let spec = ThermalSpec::from_unsorted(t).unwrap();
        prop_assert!(spec.values().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(spec.values().iter().all(|&x| x > 0.0));
    }

    // Beyond t ≈ 16 the excess d - ½ = 1/(eᵗ - 1) sits below 1e-7 and its
    // rounding in d alone exceeds the 1e-10 relative budget.
    #[test]
    fn d_to_t_inverts_half_coth(t in 1e-3f64..15.0) {
        let back = d_to_t(t_to_d(t)).unwrap();
        prop_assert!((back - t).abs() <= 1e-10 * t);
    }

    #[test]
    fn tensor_is_associative(a in 0u64..1000, b in 0u64..1000, c in 0u64..1000) {
        let (x, y, z) = (state(a, 1, 0.2), state(b, 2, 0.2), state(c, 1, 0.2));
        let left = tensor(&tensor(&x, &y), &z);
        let right = tensor(&x, &tensor(&y, &z));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn tensor_spectrum_is_union(a in 0u64..1000, b in 0u64..1000) {
        let (x, y) = (state(a, 1, 0.0), state(b, 2, 0.0));
        let mut joint = symplectic_eigenvalues(tensor(&x, &y).cov()).unwrap();
        let mut parts = symplectic_eigenvalues(x.cov()).unwrap();
        parts.extend(symplectic_eigenvalues(y.cov()).unwrap());
        joint.sort_by(|p, q| p.total_cmp(q));
        parts.sort_by(|p, q| p.total_cmp(q));
        for (p, q) in joint.iter().zip(&parts) {
            prop_assert!((p - q).abs() <= 1e-9 * q);
        }
    }

    #[test]
    fn e2_round_trip_and_normalization(seed in any::<u64>(), n in 1usize..=4) {
        let s = state(seed, n, 0.25);
        let q = state_to_e2(&s).unwrap();
        prop_assert!(max_abs_c(&(q.a() - q.a().transpose())) <= 1e-12);
        prop_assert!(max_abs_c(&(q.lambda() - q.lambda().adjoint())) <= 1e-12);
        prop_assert!((trace_positive_e2(&q).unwrap() - 1.0).abs() <= 1e-10);
        let back = e2_to_state(&q).unwrap();
        prop_assert!(max_abs(&(back.cov() - s.cov())) <= 1e-10);
        prop_assert!((back.mean() - s.mean()).amax() <= 1e-10);
    }

    #[test]
    fn covariance_from_quadruple_is_physical(seed in any::<u64>(), n in 1usize..=3) {
        let q = state_to_e2(&state(seed, n, 0.25)).unwrap();
        let m = m_matrix(q.a(), q.lambda(), ASign::Minus).unwrap();
        prop_assert!(m.asymmetry() <= 1e-12);
        let cov = m.matrix().clone().try_inverse().unwrap() - DMatrix::identity(2 * n, 2 * n) * 0.5;
        prop_assert!(max_abs(&(&cov - cov.transpose())) <= 1e-10);
        let s = GaussianState::new(DVector::zeros(2 * n), (&cov + cov.transpose()) * 0.5).unwrap();
        prop_assert!(s.is_physical());
    }

    #[test]
    fn sandwich_keeps_symmetry(seed in any::<u64>(), k in prop::collection::vec(0.0f64..=1.0, 2)) {
        let q = state_to_e2(&state(seed, 2, 0.0)).unwrap();
        let z = gamma_sandwich(&q, &DiagonalContraction::new(k).unwrap()).unwrap();
        prop_assert!(max_abs_c(&(z.a() - z.a().transpose())) <= 1e-12);
        prop_assert!(max_abs_c(&(z.lambda() - z.lambda().adjoint())) <= 1e-12);
    }

    #[test]
    fn williamson_invariants(seed in any::<u64>(), n in 1usize..=4) {
        let s = state(seed, n, 0.2);
        let w = williamson_decompose(s.cov()).unwrap();
        let l = w.l.matrix();
        let j = symplectic_form(n);
        prop_assert!(max_abs(&(l.transpose() * &j * l - &j)) <= 1e-10);
        prop_assert!(max_abs(&(l.transpose() * s.cov() * l - w.normal_form())) <= 1e-8);
        prop_assert!(w.d.windows(2).all(|x| x[0] >= x[1]));
        prop_assert!(w.t.values().windows(2).all(|x| x[0] <= x[1]));
    }

    #[test]
    fn symplectic_spectrum_is_congruence_invariant(seed in any::<u64>(), n in 1usize..=3) {
        let s = state(seed, n, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let g = random_symplectic(n, 0.7, &mut rng);
        let moved = g.matrix().transpose() * s.cov() * g.matrix();
        let a = symplectic_eigenvalues(s.cov()).unwrap();
        let b = symplectic_eigenvalues(&((&moved + moved.transpose()) * 0.5)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-8 * x.max(1.0));
        }
    }

    #[test]
    fn divergence_is_nonnegative(a in any::<u64>(), b in any::<u64>(), n in 1usize..=3, alpha in 0.05f64..0.95) {
        let rho = state(a, n, 0.3);
        let sigma = state(b, n, 0.0);
        let r = sandwiched_renyi(&rho, &sigma, alpha).unwrap();
        prop_assert!(r.divergence >= -1e-9);
    }

    #[test]
    fn divergence_vanishes_on_the_diagonal(seed in any::<u64>(), n in 1usize..=3, alpha in 0.05f64..0.95) {
        let rho = state(seed, n, 0.0);
        prop_assert!(sandwiched_renyi(&rho, &rho, alpha).unwrap().divergence.abs() <= 1e-9);
    }

    #[test]
    fn divergence_is_unitarily_invariant(a in any::<u64>(), b in any::<u64>(), n in 1usize..=3, alpha in 0.1f64..0.9) {
        let rho = state(a, n, 0.3);
        let sigma = state(b, n, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(a ^ b);
        let g = random_symplectic(n, 0.5, &mut rng);
        let shift = DVector::from_fn(2 * n, |i, _| 0.3 * (i as f64) - 0.4);
        let before = sandwiched_renyi(&rho, &sigma, alpha).unwrap().divergence;
        let after = sandwiched_renyi(
            &rho.symplectic_congruence(&g, &shift).unwrap(),
            &sigma.symplectic_congruence(&g, &shift).unwrap(),
            alpha,
        ).unwrap().divergence;
        prop_assert!((before - after).abs() <= 1e-8);
    }

    #[test]
    fn divergence_is_monotone_in_alpha(a in any::<u64>(), b in any::<u64>(), n in 1usize..=3) {
        let grid: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        let reports = sandwiched_renyi_sweep(&state(a, n, 0.3), &state(b, n, 0.0), &grid).unwrap();
        for w in reports.windows(2) {
            prop_assert!(w[1].divergence >= w[0].divergence - 1e-9);
        }
    }

    #[test]
    fn report_is_internally_consistent(a in any::<u64>(), b in any::<u64>(), n in 1usize..=3, alpha in 0.05f64..0.95) {
        let r = sandwiched_renyi(&state(a, n, 0.3), &state(b, n, 0.0), alpha).unwrap();
        prop_assert!((r.divergence - r.t_alpha.ln() / (alpha - 1.0)).abs() <= 1e-12 * r.divergence.abs().max(1.0));
        let product = r.p_s.powf(1.0 - alpha) * r.p_tz.powf(alpha) / r.p_alpha_tz * r.trace_z.powf(alpha);
        prop_assert!((product - r.t_alpha).abs() <= 1e-12 * r.t_alpha);
    }
}
