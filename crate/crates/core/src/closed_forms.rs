//! Closed-form tomograms for the built-in state catalog.
//!
//! These are the analytic benchmarks the numerical engine is tested
//! against: center-of-mass, symplectic, marginal, and cluster tomograms
//! of four fixed states, each an explicit elementary function of the
//! frame parameters.

use num_complex::Complex64;

use crate::error::{Result, TomoError};
use crate::frames::{evolve_frame, EvolutionKind, TomographyFrame};
use crate::states::{FockSuperposition, FockTerm};

/// The built-in catalog: a two-mode ground state, the product state
/// `|0>|1>`, the symmetric entangled superposition `(|01> + |10>)/sqrt(2)`,
/// and the three-mode W state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogState {
    Ground,
    Sep,
    Ent,
    W,
}

impl CatalogState {
    pub const ALL: [CatalogState; 4] = [
        CatalogState::Ground,
        CatalogState::Sep,
        CatalogState::Ent,
        CatalogState::W,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CatalogState::Ground => "ground",
            CatalogState::Sep => "sep",
            CatalogState::Ent => "ent",
            CatalogState::W => "w",
        }
    }
}

/// Builds a catalog state.
pub fn make_state(which: CatalogState) -> FockSuperposition {
    let state = match which {
        CatalogState::Ground => {
            FockSuperposition::new(2, vec![FockTerm::new(Complex64::ONE, vec![0, 0])])
        }
        CatalogState::Sep => {
            FockSuperposition::new(2, vec![FockTerm::new(Complex64::ONE, vec![0, 1])])
        }
        CatalogState::Ent => {
            let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            FockSuperposition::new(
                2,
                vec![FockTerm::new(c, vec![0, 1]), FockTerm::new(c, vec![1, 0])],
            )
        }
        CatalogState::W => {
            let c = Complex64::new(1.0 / 3.0f64.sqrt(), 0.0);
            FockSuperposition::new(
                3,
                vec![
                    FockTerm::new(c, vec![0, 0, 1]),
                    FockTerm::new(c, vec![0, 1, 0]),
                    FockTerm::new(c, vec![1, 0, 0]),
                ],
            )
        }
    };
    state.expect("catalog states are valid by construction")
}

/// The two scalars every two-mode closed form depends on:
/// `sigma = sigma_1 + sigma_2` and `cross = mu_1 mu_2 + nu_1 nu_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaParams {
    pub sigma: f64,
    pub cross: f64,
}

impl SigmaParams {
    pub fn two_mode(frame: &TomographyFrame) -> Result<Self> {
        if frame.num_modes() != 2 {
            return Err(TomoError::DimensionMismatch(format!(
                "closed form needs a two-mode frame, got {} modes",
                frame.num_modes()
            )));
        }
        Ok(Self {
            sigma: frame.sigma_total(),
            cross: frame.mu()[0] * frame.mu()[1] + frame.nu()[0] * frame.nu()[1],
        })
    }
}

/// Center-of-mass tomogram of the entangled state:
/// `w(X) = e^{-X^2/sigma} / sqrt(pi sigma)
///         * (1/2 - cross/sigma + (X^2/sigma)(1 + 2 cross/sigma))`.
pub fn cm_ent(x: f64, frame: &TomographyFrame) -> Result<f64> {
    let p = SigmaParams::two_mode(frame)?;
    let gauss = (-x * x / p.sigma).exp() / (std::f64::consts::PI * p.sigma).sqrt();
    let ratio = p.cross / p.sigma;
    Ok(gauss * (0.5 - ratio + (x * x / p.sigma) * (1.0 + 2.0 * ratio)))
}

/// Center-of-mass tomogram of the product state `|0>|1>`:
/// `w(X) = e^{-X^2/sigma} / (sigma sqrt(pi sigma))
///         * (sigma_1 + 2 X^2 sigma_2 / sigma)`.
pub fn cm_sep(x: f64, frame: &TomographyFrame) -> Result<f64> {
    let p = SigmaParams::two_mode(frame)?;
    let s1 = frame.sigma(0);
    let s2 = frame.sigma(1);
    let gauss = (-x * x / p.sigma).exp() / (std::f64::consts::PI * p.sigma).sqrt();
    Ok(gauss / p.sigma * (s1 + 2.0 * x * x * s2 / p.sigma))
}

/// Marginal tomogram of mode 1 of the product state (a ground-state
/// mode): `w(X1) = e^{-X1^2/sigma_1} / sqrt(pi sigma_1)`.
pub fn marg_sep(x1: f64, mu1: f64, nu1: f64) -> f64 {
    let s1 = mu1 * mu1 + nu1 * nu1;
    (-x1 * x1 / s1).exp() / (std::f64::consts::PI * s1).sqrt()
}

/// Marginal tomogram of mode 1 of the entangled state:
/// `w(X1) = e^{-X1^2/sigma_1} / sqrt(pi sigma_1) * (1/2 + X1^2/sigma_1)`.
pub fn marg_ent(x1: f64, mu1: f64, nu1: f64) -> f64 {
    let s1 = mu1 * mu1 + nu1 * nu1;
    marg_sep(x1, mu1, nu1) * (0.5 + x1 * x1 / s1)
}

/// Symplectic tomogram of the product state `|0>|1>`:
/// `w(X1, X2) = 2 X2^2 e^{-X1^2/sigma_1 - X2^2/sigma_2}
///              / (pi sqrt(sigma_1) sigma_2^{3/2})`.
pub fn sympl_sep(x1: f64, x2: f64, frame: &TomographyFrame) -> Result<f64> {
    SigmaParams::two_mode(frame)?;
    let s1 = frame.sigma(0);
    let s2 = frame.sigma(1);
    let gauss = (-x1 * x1 / s1 - x2 * x2 / s2).exp();
    Ok(2.0 * x2 * x2 * gauss / (std::f64::consts::PI * s1.sqrt() * s2.powf(1.5)))
}

/// Symplectic tomogram of the entangled state:
/// `w(X1, X2) = e^{-X1^2/sigma_1 - X2^2/sigma_2} / (pi sqrt(sigma_1 sigma_2))
///   * (X1^2/sigma_1 + X2^2/sigma_2 + 2 X1 X2 cross / (sigma_1 sigma_2))`.
pub fn sympl_ent(x1: f64, x2: f64, frame: &TomographyFrame) -> Result<f64> {
    let p = SigmaParams::two_mode(frame)?;
    let s1 = frame.sigma(0);
    let s2 = frame.sigma(1);
    let gauss = (-x1 * x1 / s1 - x2 * x2 / s2).exp() / (std::f64::consts::PI * (s1 * s2).sqrt());
    let bracket = x1 * x1 / s1 + x2 * x2 / s2 + 2.0 * x1 * x2 * p.cross / (s1 * s2);
    Ok(gauss * bracket)
}

/// Center-of-mass tomogram of the entangled state after evolving the
/// frame for time `t`: the dynamics only substitutes the mapped frame
/// parameters into [`cm_ent`].
pub fn cm_ent_evolved(x: f64, frame: &TomographyFrame, kind: EvolutionKind, t: f64) -> Result<f64> {
    cm_ent(x, &evolve_frame(frame, kind, t))
}

/// Cluster tomogram of the W state for the `{1,2} | {3}` split. With
/// `sigma_12 = sigma_1 + sigma_2`, `sigma_3 = mu_3^2 + nu_3^2`,
/// `s_plus = (mu_1+mu_2)^2 + (nu_1+nu_2)^2`,
/// `s_minus = (mu_1-mu_2)^2 + (nu_1-nu_2)^2`, and
/// `c_3 = (mu_1+mu_2) mu_3 + (nu_1+nu_2) nu_3`:
///
/// ```text
/// w(X, X3) = (2 / (3 pi)) e^{-X3^2/sigma_3 - X^2/sigma_12}
///            / sqrt(sigma_3 sigma_12)
///   * ( X3^2/sigma_3 + X^2 s_plus / sigma_12^2
///       + 2 X X3 c_3 / (sigma_3 sigma_12) + s_minus / (2 sigma_12) )
/// ```
pub fn cluster_w(x: f64, x3: f64, frame: &TomographyFrame) -> Result<f64> {
    if frame.num_modes() != 3 {
        return Err(TomoError::DimensionMismatch(format!(
            "cluster closed form needs a three-mode frame, got {} modes",
            frame.num_modes()
        )));
    }
    let (m1, n1) = frame.pair(0);
    let (m2, n2) = frame.pair(1);
    let (m3, n3) = frame.pair(2);
    let s12 = frame.sigma(0) + frame.sigma(1);
    let s3 = frame.sigma(2);
    let s_plus = (m1 + m2) * (m1 + m2) + (n1 + n2) * (n1 + n2);
    let s_minus = (m1 - m2) * (m1 - m2) + (n1 - n2) * (n1 - n2);
    let c3 = (m1 + m2) * m3 + (n1 + n2) * n3;
    let gauss = (-x3 * x3 / s3 - x * x / s12).exp() / (s3 * s12).sqrt();
    let bracket = x3 * x3 / s3
        + x * x * s_plus / (s12 * s12)
        + 2.0 * x * x3 * c3 / (s3 * s12)
        + s_minus / (2.0 * s12);
    Ok(2.0 / (3.0 * std::f64::consts::PI) * gauss * bracket)
}
