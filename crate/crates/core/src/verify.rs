//! Seeded self-check suites covering every library-level invariant:
//! oracle equivalence for all tomogram kinds, normalization, homogeneity,
//! dynamics, separability composition, negativity, and reconstruction
//! round trips. The CLI `verify` command serializes the report as JSON.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closed_forms::{
    cluster_w, cm_ent, cm_ent_evolved, cm_sep, make_state, marg_ent, marg_sep, sympl_ent,
    sympl_sep, CatalogState,
};
use crate::error::Result;
use crate::frames::{evolve_frame, scale_frame, EvolutionKind, TomographyFrame};
use crate::quadrature::par_tabulate;
use crate::reconstruction::{fidelity, reconstruct_single_mode};
use crate::separable::{separable_cm, separable_symplectic, SeparableDecomposition};
use crate::states::{negativity, FockSuperposition, FockTerm};
use crate::tomography::{
    cluster_grid, cluster_tomogram, cm_grid, cm_tomogram, linear_axis, subsystem_tomogram,
    symplectic_tomogram, ClusterPartition, CmEvaluator,
};

const TOL_CM_ORACLE: f64 = 1e-8;
const TOL_SYMPLECTIC: f64 = 1e-10;
const TOL_MARGINAL_CLOSED: f64 = 1e-10;
const TOL_MARGINAL_CM: f64 = 1e-8;
const TOL_NORMALIZATION: f64 = 5e-4;
const TOL_HOMOGENEITY: f64 = 1e-8;
const TOL_DYNAMICS: f64 = 1e-10;
const TOL_GROUP: f64 = 1e-12;
const TOL_CLUSTER: f64 = 1e-7;
const TOL_SEPARABLE: f64 = 1e-6;
const TOL_SEPARABLE_SYMPL: f64 = 1e-10;
const TOL_NEGATIVITY: f64 = 1e-10;
const TOL_RECONSTRUCTION: f64 = 1e-3;

/// Outcome of one invariant suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
    pub detail: String,
}

/// Outcome of the whole verification run.
#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub all_passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Runs all ten invariant suites with streams derived from `seed`.
pub fn run_all(seed: u64) -> VerifyReport {
    let suites = vec![
        suite_cm_oracle(seed),
        suite_symplectic_oracle(seed),
        suite_marginals(seed),
        suite_normalization(seed),
        suite_homogeneity(seed),
        suite_dynamics(seed),
        suite_cluster_oracle(seed),
        suite_separable_composition(seed),
        suite_negativity(seed),
        suite_reconstruction(seed),
    ];
    let all_passed = suites.iter().all(|s| s.passed);
    VerifyReport {
        seed,
        all_passed,
        suites,
    }
}

/// Decorrelates the per-suite random streams so reordering one suite
/// never perturbs another.
fn salted(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Draws a frame with entries uniform in [-2, 2], redrawing until the
/// requested spread floors hold (degenerate frames make the closed
/// forms ill-conditioned without testing anything new).
fn sample_frame(
    rng: &mut ChaCha8Rng,
    modes: usize,
    min_sigma_total: f64,
    min_sigma_mode: Option<f64>,
) -> TomographyFrame {
    loop {
        let mu: Vec<f64> = (0..modes).map(|_| rng.random_range(-2.0..2.0)).collect();
        let nu: Vec<f64> = (0..modes).map(|_| rng.random_range(-2.0..2.0)).collect();
        let sigma_total: f64 = mu.iter().zip(&nu).map(|(m, n)| m * m + n * n).sum();
        if sigma_total < min_sigma_total {
            continue;
        }
        if let Some(floor) = min_sigma_mode {
            let ok = mu
                .iter()
                .zip(&nu)
                .all(|(m, n)| m * m + n * n >= floor);
            if !ok {
                continue;
            }
        }
        if let Ok(frame) = TomographyFrame::new(mu, nu) {
            return frame;
        }
    }
}

fn run_suite<F>(name: &str, tolerance: f64, body: F) -> SuiteReport
where
    F: FnOnce() -> Result<(f64, bool, String)>,
{
    match body() {
        Ok((max_error, extra_ok, detail)) => SuiteReport {
            name: name.to_string(),
            passed: max_error <= tolerance && extra_ok,
            max_error,
            tolerance,
            detail,
        },
        Err(err) => SuiteReport {
            name: name.to_string(),
            passed: false,
            max_error: f64::INFINITY,
            tolerance,
            detail: format!("suite aborted: {err}"),
        },
    }
}

/// Center-of-mass tomograms against their two-mode closed forms.
fn suite_cm_oracle(seed: u64) -> SuiteReport {
    run_suite("cm_oracle", TOL_CM_ORACLE, || {
        let mut rng = salted(seed, 1);
        let ent = make_state(CatalogState::Ent);
        let sep = make_state(CatalogState::Sep);
        let xs = linear_axis(-5.0, 5.0, 51)?;
        let mut max_err: f64 = 0.0;
        for _ in 0..20 {
            let frame = sample_frame(&mut rng, 2, 0.1, None);
            let ev_ent = CmEvaluator::new(&ent, &frame)?;
            let ev_sep = CmEvaluator::new(&sep, &frame)?;
            for &x in &xs {
                max_err = max_err.max((ev_ent.eval(x) - cm_ent(x, &frame)?).abs());
                max_err = max_err.max((ev_sep.eval(x) - cm_sep(x, &frame)?).abs());
            }
        }
        Ok((
            max_err,
            true,
            "entangled and product states, 20 frames, 51 points each".into(),
        ))
    })
}

/// Symplectic tomograms against their closed forms; the cross term pins
/// the relative phase convention of the amplitudes.
fn suite_symplectic_oracle(seed: u64) -> SuiteReport {
    run_suite("symplectic_oracle", TOL_SYMPLECTIC, || {
        let mut rng = salted(seed, 2);
        let ent = make_state(CatalogState::Ent);
        let sep = make_state(CatalogState::Sep);
        let axis = linear_axis(-4.0, 4.0, 21)?;
        let mut max_err: f64 = 0.0;
        for _ in 0..10 {
            let frame = sample_frame(&mut rng, 2, 0.0, Some(0.1));
            for &x1 in &axis {
                for &x2 in &axis {
                    let num_ent = symplectic_tomogram(&ent, &[x1, x2], &frame)?;
                    let num_sep = symplectic_tomogram(&sep, &[x1, x2], &frame)?;
                    max_err = max_err.max((num_ent - sympl_ent(x1, x2, &frame)?).abs());
                    max_err = max_err.max((num_sep - sympl_sep(x1, x2, &frame)?).abs());
                }
            }
        }
        Ok((max_err, true, "10 frames on a 21x21 grid".into()))
    })
}

/// Single-mode marginals against the closed forms and against the
/// center-of-mass route with the partner mode's parameters zeroed.
fn suite_marginals(seed: u64) -> SuiteReport {
    run_suite("marginals", TOL_MARGINAL_CM, || {
        let mut rng = salted(seed, 3);
        let ent = make_state(CatalogState::Ent);
        let sep = make_state(CatalogState::Sep);
        let xs = linear_axis(-4.0, 4.0, 21)?;
        let mut closed_err: f64 = 0.0;
        let mut route_err: f64 = 0.0;
        for _ in 0..20 {
            let (mu1, nu1) = loop {
                let m = rng.random_range(-2.0..2.0);
                let n = rng.random_range(-2.0..2.0);
                if m * m + n * n >= 0.1 {
                    break (m, n);
                }
            };
            let zeroed = TomographyFrame::new(vec![mu1, 0.0], vec![nu1, 0.0])?;
            for &x in &xs {
                let via_subsystem_ent = subsystem_tomogram(&ent, 0, x, mu1, nu1)?;
                let via_subsystem_sep = subsystem_tomogram(&sep, 0, x, mu1, nu1)?;
                closed_err = closed_err.max((via_subsystem_ent - marg_ent(x, mu1, nu1)).abs());
                closed_err = closed_err.max((via_subsystem_sep - marg_sep(x, mu1, nu1)).abs());
                let via_cm = cm_tomogram(&ent, x, &zeroed)?;
                route_err = route_err.max((via_cm - via_subsystem_ent).abs());
            }
        }
        let detail = format!(
            "closed-form max error {closed_err:.3e} (tolerance {TOL_MARGINAL_CLOSED:.0e}); \
             zeroed-frame route max error {route_err:.3e}"
        );
        Ok((route_err, closed_err <= TOL_MARGINAL_CLOSED, detail))
    })
}

/// Unit normalization of every catalog tomogram over random frames,
/// plus the cluster tomogram of the W state.
fn suite_normalization(seed: u64) -> SuiteReport {
    run_suite("normalization", TOL_NORMALIZATION, || {
        let mut rng = salted(seed, 4);
        let mut max_err: f64 = 0.0;
        for which in CatalogState::ALL {
            let state = make_state(which);
            let modes = state.num_modes();
            let frames: Vec<TomographyFrame> = (0..200)
                .map(|_| sample_frame(&mut rng, modes, 0.05, None))
                .collect();
            let errs = par_tabulate(frames.len(), |i| -> Result<f64> {
                let frame = &frames[i];
                let half = 8.0 * (frame.sigma_total() / 2.0).sqrt();
                let axis = linear_axis(-half, half, 101)?;
                let grid = cm_grid(&state, frame, &axis)?;
                Ok((grid.trapezoid_integral() - 1.0).abs())
            });
            for err in errs {
                max_err = max_err.max(err?);
            }
        }

        // Cluster normalization over the joint (X, X3) plane.
        let w_state = make_state(CatalogState::W);
        for _ in 0..3 {
            let frame = sample_frame(&mut rng, 3, 0.0, Some(0.05));
            let sigma12 = frame.sigma(0) + frame.sigma(1);
            let half_x = 8.0 * (sigma12 / 2.0).sqrt();
            let half_x3 = 8.0 * (frame.sigma(2) / 2.0).sqrt();
            let x_axis = linear_axis(-half_x, half_x, 121)?;
            let x3_axis = linear_axis(-half_x3, half_x3, 121)?;
            let grid = cluster_grid(
                &w_state,
                ClusterPartition::pair_and_single(),
                &frame,
                &x_axis,
                &x3_axis,
            )?;
            max_err = max_err.max((grid.trapezoid_integral() - 1.0).abs());
        }
        Ok((
            max_err,
            true,
            "200 frames per catalog state plus 3 cluster frames".into(),
        ))
    })
}

/// Scaling identity |lambda| w(lambda X | lambda frame) = w(X | frame).
fn suite_homogeneity(seed: u64) -> SuiteReport {
    run_suite("homogeneity", TOL_HOMOGENEITY, || {
        let mut rng = salted(seed, 5);
        let xs = linear_axis(-4.0, 4.0, 21)?;
        let mut max_err: f64 = 0.0;
        for which in CatalogState::ALL {
            let state = make_state(which);
            let modes = state.num_modes();
            for _ in 0..10 {
                let frame = sample_frame(&mut rng, modes, 0.1, None);
                let base = CmEvaluator::new(&state, &frame)?;
                for lambda in [-2.0, 0.5, 3.0] {
                    let scaled = scale_frame(&frame, lambda)?;
                    let ev = CmEvaluator::new(&state, &scaled)?;
                    for &x in &xs {
                        let err =
                            (lambda.abs() * ev.eval(lambda * x) - base.eval(x)).abs();
                        max_err = max_err.max(err);
                    }
                }
            }
        }
        Ok((
            max_err,
            true,
            "lambda in {-2, 0.5, 3} on all catalog states, 10 frames each".into(),
        ))
    })
}

/// Frame-map dynamics: evaluate-after-map equals the evolved closed
/// form, harmonic evolution leaves the catalog tomograms stationary,
/// and both maps compose as one-parameter groups.
fn suite_dynamics(seed: u64) -> SuiteReport {
    run_suite("dynamics", TOL_DYNAMICS, || {
        let mut rng = salted(seed, 6);
        let ent = make_state(CatalogState::Ent);
        let xs = linear_axis(-4.0, 4.0, 21)?;
        let mut frames = vec![TomographyFrame::new(vec![1.0, 1.0], vec![0.0, 0.0])?];
        for _ in 0..5 {
            frames.push(sample_frame(&mut rng, 2, 0.1, None));
        }

        let mut oracle_err: f64 = 0.0;
        let mut stationary_err: f64 = 0.0;
        for frame in &frames {
            let base = CmEvaluator::new(&ent, frame)?;
            for t in [0.3, 1.0, 2.0] {
                for kind in [EvolutionKind::Harmonic, EvolutionKind::Inverted] {
                    let mapped = evolve_frame(frame, kind, t);
                    let ev = CmEvaluator::new(&ent, &mapped)?;
                    for &x in &xs {
                        let expected = cm_ent_evolved(x, frame, kind, t)?;
                        oracle_err = oracle_err.max((ev.eval(x) - expected).abs());
                        if kind == EvolutionKind::Harmonic {
                            stationary_err = stationary_err.max((ev.eval(x) - base.eval(x)).abs());
                        }
                    }
                }
            }
        }

        let mut group_err: f64 = 0.0;
        for _ in 0..20 {
            let frame = sample_frame(&mut rng, 2, 0.0, None);
            let s = rng.random_range(-1.5..1.5);
            let t = rng.random_range(-1.5..1.5);
            for kind in [EvolutionKind::Harmonic, EvolutionKind::Inverted] {
                let two_step = evolve_frame(&evolve_frame(&frame, kind, s), kind, t);
                let one_step = evolve_frame(&frame, kind, s + t);
                for mode in 0..2 {
                    let (m2, n2) = two_step.pair(mode);
                    let (m1, n1) = one_step.pair(mode);
                    group_err = group_err.max((m2 - m1).abs().max((n2 - n1).abs()));
                }
            }
        }

        let detail = format!(
            "oracle max error {oracle_err:.3e}; harmonic stationarity {stationary_err:.3e}; \
             group property {group_err:.3e} (tolerance {TOL_GROUP:.0e})"
        );
        Ok((
            oracle_err.max(stationary_err),
            group_err <= TOL_GROUP,
            detail,
        ))
    })
}

/// Cluster tomogram of the W state against its closed form.
fn suite_cluster_oracle(seed: u64) -> SuiteReport {
    run_suite("cluster_oracle", TOL_CLUSTER, || {
        let mut rng = salted(seed, 7);
        let w_state = make_state(CatalogState::W);
        let axis = linear_axis(-4.0, 4.0, 21)?;
        let mut max_err: f64 = 0.0;
        for _ in 0..5 {
            let frame = sample_frame(&mut rng, 3, 0.0, Some(0.1));
            for &x in &axis {
                for &x3 in &axis {
                    let num = cluster_tomogram(
                        &w_state,
                        ClusterPartition::pair_and_single(),
                        x,
                        x3,
                        &frame,
                    )?;
                    max_err = max_err.max((num - cluster_w(x, x3, &frame)?).abs());
                }
            }
        }
        Ok((max_err, true, "5 frames on a 21x21 (X, X3) grid".into()))
    })
}

/// Convex separable construction against direct tomograms of product
/// states, including a three-mode split and the symplectic variant.
fn suite_separable_composition(seed: u64) -> SuiteReport {
    run_suite("separable_composition", TOL_SEPARABLE, || {
        let mut rng = salted(seed, 8);
        let fock0 = FockSuperposition::new(1, vec![FockTerm::new(Complex64::ONE, vec![0])])?;
        let fock1 = FockSuperposition::new(1, vec![FockTerm::new(Complex64::ONE, vec![1])])?;
        let xs = linear_axis(-4.0, 4.0, 11)?;

        // Single product part: must reproduce the |0>|1> tomogram.
        let single = SeparableDecomposition::new(
            vec![1.0],
            vec![(fock0.clone(), fock1.clone())],
        )?;
        let sep_state = make_state(CatalogState::Sep);
        let mut cm_err: f64 = 0.0;
        for _ in 0..5 {
            let frame = sample_frame(&mut rng, 2, 0.0, Some(0.1));
            let ev = CmEvaluator::new(&sep_state, &frame)?;
            for &x in &xs {
                cm_err = cm_err.max((separable_cm(&single, x, &frame)? - ev.eval(x)).abs());
            }
        }

        // Two-part mixture: convex combination of the part tomograms.
        let mixture = SeparableDecomposition::new(
            vec![0.3, 0.7],
            vec![
                (fock0.clone(), fock1.clone()),
                (fock1.clone(), fock0.clone()),
            ],
        )?;
        let sep01 = make_state(CatalogState::Sep);
        let sep10 = FockSuperposition::new(
            2,
            vec![FockTerm::new(Complex64::ONE, vec![1, 0])],
        )?;
        for _ in 0..3 {
            let frame = sample_frame(&mut rng, 2, 0.0, Some(0.1));
            let ev01 = CmEvaluator::new(&sep01, &frame)?;
            let ev10 = CmEvaluator::new(&sep10, &frame)?;
            for &x in &xs {
                let expected = 0.3 * ev01.eval(x) + 0.7 * ev10.eval(x);
                cm_err = cm_err.max((separable_cm(&mixture, x, &frame)? - expected).abs());
            }
        }

        // Three-mode split: a two-mode entangled block times a Fock state.
        let ent = make_state(CatalogState::Ent);
        let triple = FockSuperposition::tensor(&ent, &fock1)?;
        let split = SeparableDecomposition::new(vec![1.0], vec![(ent.clone(), fock1.clone())])?;
        for _ in 0..2 {
            let frame = sample_frame(&mut rng, 3, 0.0, Some(0.1));
            let ev = CmEvaluator::new(&triple, &frame)?;
            for &x in &xs {
                cm_err = cm_err.max((separable_cm(&split, x, &frame)? - ev.eval(x)).abs());
            }
        }

        // Symplectic variant is a pure product: machine-precision check.
        let mut sympl_err: f64 = 0.0;
        for _ in 0..3 {
            let frame = sample_frame(&mut rng, 3, 0.0, Some(0.1));
            for _ in 0..5 {
                let x: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
                let direct = symplectic_tomogram(&triple, &x, &frame)?;
                let composed = separable_symplectic(&split, &x, &frame)?;
                sympl_err = sympl_err.max((composed - direct).abs());
            }
        }

        let detail = format!(
            "center-of-mass composition max error {cm_err:.3e}; \
             symplectic composition {sympl_err:.3e} (tolerance {TOL_SEPARABLE_SYMPL:.0e})"
        );
        Ok((cm_err, sympl_err <= TOL_SEPARABLE_SYMPL, detail))
    })
}

/// Negativity values of the catalog states.
fn suite_negativity(seed: u64) -> SuiteReport {
    run_suite("negativity", TOL_NEGATIVITY, || {
        let mut rng = salted(seed, 9);
        let mut max_err: f64 = 0.0;

        let ent_rho = make_state(CatalogState::Ent).density_matrix();
        max_err = max_err.max((negativity(&ent_rho, &[1])? - 0.5).abs());
        let sep_rho = make_state(CatalogState::Sep).density_matrix();
        max_err = max_err.max(negativity(&sep_rho, &[1])?.abs());
        let ground_rho = make_state(CatalogState::Ground).density_matrix();
        max_err = max_err.max(negativity(&ground_rho, &[1])?.abs());
        let w_rho = make_state(CatalogState::W).density_matrix();
        let w_expected = std::f64::consts::SQRT_2 / 3.0;
        max_err = max_err.max((negativity(&w_rho, &[0])? - w_expected).abs());

        // The witness entry point reports the same gap for any frame set.
        let frames: Vec<TomographyFrame> = (0..2)
            .map(|_| sample_frame(&mut rng, 2, 0.1, None))
            .collect();
        let gap = crate::separable::entanglement_witness_gap(
            &make_state(CatalogState::Ent),
            &frames,
        )?;
        max_err = max_err.max((gap - 0.5).abs());

        Ok((
            max_err,
            true,
            "catalog negativities and the witness gap entry point".into(),
        ))
    })
}

/// Reconstruction round trips from closed-form tomogram callables.
fn suite_reconstruction(seed: u64) -> SuiteReport {
    run_suite("reconstruction", TOL_RECONSTRUCTION, || {
        let _ = seed; // deterministic inputs; kept for signature symmetry
        let cutoff = 6;

        let w_fock0 = |x: f64, mu: f64, nu: f64| -> Result<f64> {
            let s = mu * mu + nu * nu;
            Ok((-x * x / s).exp() / (std::f64::consts::PI * s).sqrt())
        };
        let w_fock1 = |x: f64, mu: f64, nu: f64| -> Result<f64> {
            let s = mu * mu + nu * nu;
            Ok(2.0 * x * x * (-x * x / s).exp() / (s * (std::f64::consts::PI * s).sqrt()))
        };
        let w_mixed = |x: f64, mu: f64, nu: f64| -> Result<f64> {
            Ok(0.5 * w_fock0(x, mu, nu)? + 0.5 * w_fock1(x, mu, nu)?)
        };

        let mut truth0 = DMatrix::<Complex64>::zeros(cutoff, cutoff);
        truth0[(0, 0)] = Complex64::ONE;
        let mut truth1 = DMatrix::<Complex64>::zeros(cutoff, cutoff);
        truth1[(1, 1)] = Complex64::ONE;
        let mut truth_mixed = DMatrix::<Complex64>::zeros(cutoff, cutoff);
        truth_mixed[(0, 0)] = Complex64::new(0.5, 0.0);
        truth_mixed[(1, 1)] = Complex64::new(0.5, 0.0);

        let mut max_err: f64 = 0.0;
        let mut min_fidelity: f64 = 1.0;
        type Tomogram<'a> = &'a (dyn Fn(f64, f64, f64) -> Result<f64> + Sync);
        let cases: Vec<(&str, Tomogram, &DMatrix<Complex64>)> = vec![
            ("fock0", &w_fock0, &truth0),
            ("fock1", &w_fock1, &truth1),
            ("mixed", &w_mixed, &truth_mixed),
        ];
        for (_, tomogram, truth) in cases {
            let recon = reconstruct_single_mode(&tomogram, cutoff)?;
            let rho = recon.psd_matrix()?;
            let f = fidelity(&rho, truth)?;
            min_fidelity = min_fidelity.min(f);
            max_err = max_err.max(1.0 - f).max(recon.trace_error());
        }

        let detail = format!("minimum fidelity {min_fidelity:.9} over three states at cutoff 6");
        Ok((max_err, min_fidelity >= 0.999, detail))
    })
}
