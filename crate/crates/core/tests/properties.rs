//! Property-based checks of the algebraic identities: recurrences,
//! frame-map group structure, tomogram homogeneity, canonicalization,
//! and serialization round trips.

use proptest::prelude::*;
use tomokit::num_complex::Complex64;
use tomokit::states::{fock_wavefunction, hermite, negativity};
use tomokit::tomography::CmEvaluator;
use tomokit::{
    evolve_frame, make_state, scale_frame, CatalogState, EvolutionKind, FockSuperposition,
    FockTerm, TomographyFrame,
};

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// A two-mode frame with entries in [-2, 2] and a spread floor.
fn frame_strategy() -> impl Strategy<Value = TomographyFrame> {
    (
        -2.0f64..2.0,
        -2.0f64..2.0,
        -2.0f64..2.0,
        -2.0f64..2.0,
    )
        .prop_filter_map("frame too degenerate", |(m1, m2, n1, n2)| {
            let sigma1 = m1 * m1 + n1 * n1;
            let sigma2 = m2 * m2 + n2 * n2;
            if sigma1 < 0.05 || sigma2 < 0.05 {
                return None;
            }
            TomographyFrame::new(vec![m1, m2], vec![n1, n2]).ok()
        })
}

/// Distinct-occupation term sets, normalized into a valid superposition.
fn state_strategy() -> impl Strategy<Value = FockSuperposition> {
    proptest::collection::btree_map(
        (0usize..4, 0usize..4),
        (-1.0f64..1.0, -1.0f64..1.0),
        1..5,
    )
    .prop_filter_map("norm too small to normalize stably", |entries| {
        let norm_sqr: f64 = entries.values().map(|(re, im)| re * re + im * im).sum();
        if norm_sqr < 0.01 {
            return None;
        }
        let scale = norm_sqr.sqrt().recip();
        let terms: Vec<FockTerm> = entries
            .iter()
            .map(|(&(o1, o2), &(re, im))| {
                FockTerm::new(Complex64::new(re * scale, im * scale), vec![o1, o2])
            })
            .collect();
        FockSuperposition::new(2, terms).ok()
    })
}

proptest! {
    #[test]
    fn hermite_satisfies_its_recurrence(n in 1usize..40, x in -6.0f64..6.0) {
        let lhs = hermite(n + 1, x);
        let rhs = 2.0 * x * hermite(n, x) - 2.0 * n as f64 * hermite(n - 1, x);
        let scale = lhs.abs().max(1.0);
        prop_assert!((lhs - rhs).abs() < 1e-9 * scale);
    }

    #[test]
    fn fock_wavefunction_matches_the_explicit_formula(n in 0usize..=10, q in -4.0f64..4.0) {
        let explicit = hermite(n, q) * (-0.5 * q * q).exp()
            / (2.0f64.powi(n as i32) * factorial(n) * std::f64::consts::PI.sqrt()).sqrt();
        let value = fock_wavefunction(n, q);
        prop_assert!((value - explicit).abs() < 1e-10 * explicit.abs().max(1.0));
    }

    #[test]
    fn frame_maps_compose_as_groups(
        frame in frame_strategy(),
        s in -2.0f64..2.0,
        t in -2.0f64..2.0,
    ) {
        for kind in [EvolutionKind::Harmonic, EvolutionKind::Inverted] {
            let two = evolve_frame(&evolve_frame(&frame, kind, s), kind, t);
            let one = evolve_frame(&frame, kind, s + t);
            for mode in 0..2 {
                let (m2, n2) = two.pair(mode);
                let (m1, n1) = one.pair(mode);
                prop_assert!((m2 - m1).abs() < 1e-12 && (n2 - n1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn frame_maps_conserve_their_invariants(frame in frame_strategy(), t in -2.0f64..2.0) {
        let harmonic = evolve_frame(&frame, EvolutionKind::Harmonic, t);
        for mode in 0..2 {
            prop_assert!((harmonic.sigma(mode) - frame.sigma(mode)).abs() < 1e-12);
        }
        let cross = |f: &TomographyFrame| f.mu()[0] * f.mu()[1] + f.nu()[0] * f.nu()[1];
        prop_assert!((cross(&harmonic) - cross(&frame)).abs() < 1e-12);

        let inverted = evolve_frame(&frame, EvolutionKind::Inverted, t);
        for mode in 0..2 {
            let (mu0, nu0) = frame.pair(mode);
            let (mu1, nu1) = inverted.pair(mode);
            // Hyperbolic rotations preserve mu^2 - nu^2.
            prop_assert!(
                ((mu1 * mu1 - nu1 * nu1) - (mu0 * mu0 - nu0 * nu0)).abs() < 1e-10
            );
        }
    }

    #[test]
    fn negativity_ignores_local_phases(
        phi1 in 0.0f64..std::f64::consts::TAU,
        phi2 in 0.0f64..std::f64::consts::TAU,
    ) {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let state = FockSuperposition::new(
            2,
            vec![
                FockTerm::new(Complex64::from_polar(inv, phi1), vec![0, 1]),
                FockTerm::new(Complex64::from_polar(inv, phi2), vec![1, 0]),
            ],
        )
        .unwrap();
        let value = negativity(&state.density_matrix(), &[1]).unwrap();
        prop_assert!((value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn canonical_form_is_order_independent(state in state_strategy()) {
        let mut reversed: Vec<FockTerm> = state.terms().to_vec();
        reversed.reverse();
        let rebuilt = FockSuperposition::new(2, reversed).unwrap();
        prop_assert_eq!(state.to_json(), rebuilt.to_json());
    }

    #[test]
    fn json_round_trip_preserves_states(state in state_strategy()) {
        let back = FockSuperposition::from_json(&state.to_json()).unwrap();
        prop_assert_eq!(back.num_modes(), state.num_modes());
        prop_assert_eq!(back.terms().len(), state.terms().len());
        for (a, b) in back.terms().iter().zip(state.terms()) {
            prop_assert_eq!(&a.occupations, &b.occupations);
            prop_assert!((a.amplitude - b.amplitude).norm() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cm_tomograms_scale_homogeneously(
        frame in frame_strategy(),
        lambda_mag in 0.3f64..3.0,
        negate in any::<bool>(),
        x in -3.0f64..3.0,
    ) {
        let lambda = if negate { -lambda_mag } else { lambda_mag };
        let ent = make_state(CatalogState::Ent);
        let base = CmEvaluator::new(&ent, &frame).unwrap();
        let scaled_frame = scale_frame(&frame, lambda).unwrap();
        let scaled = CmEvaluator::new(&ent, &scaled_frame).unwrap();
        prop_assert!(
            (lambda.abs() * scaled.eval(lambda * x) - base.eval(x)).abs() < 1e-8
        );
    }

    #[test]
    fn random_superpositions_have_normalized_cm_tomograms(
        state in state_strategy(),
        frame in frame_strategy(),
    ) {
        let evaluator = CmEvaluator::new(&state, &frame).unwrap();
        // Occupations reach 3, so the spread grows by up to n + 1/2
        // per mode; widen the window accordingly.
        let half = 10.0 * (3.5 * frame.sigma_total() / 2.0).sqrt();
        let rule = tomokit::quadrature::gauss_legendre(301, -half, half).unwrap();
        let total = rule.integrate(|x| evaluator.eval(x));
        prop_assert!((total - 1.0).abs() < 1e-6, "integral = {}", total);
    }
}
