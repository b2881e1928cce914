//! Tomographic frames and their evolution under quadratic dynamics.
//!
//! A frame assigns each mode a pair `(mu_j, nu_j)` selecting which
//! quadrature combination `mu_j q_j + nu_j p_j` is observed. Time
//! evolution under quadratic Hamiltonians never touches the state in
//! this representation; it only maps the frame parameters, which is what
//! [`evolve_frame`] implements.

use serde::Serialize;

use crate::error::{Result, TomoError};

/// Per-mode quadrature-selection parameters `(mu_j, nu_j)`.
///
/// Pairs equal to `(0, 0)` mark modes the center-of-mass tomogram
/// ignores; a frame where every pair vanishes is rejected.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TomographyFrame {
    mu: Vec<f64>,
    nu: Vec<f64>,
}

impl TomographyFrame {
    pub fn new(mu: Vec<f64>, nu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() || mu.len() != nu.len() {
            return Err(TomoError::DimensionMismatch(format!(
                "frame needs matching nonempty mu/nu lists, got {} and {}",
                mu.len(),
                nu.len()
            )));
        }
        if mu.iter().chain(&nu).any(|v| !v.is_finite()) {
            return Err(TomoError::InvalidInput(
                "frame parameters must be finite".into(),
            ));
        }
        if mu.iter().zip(&nu).all(|(&m, &n)| m == 0.0 && n == 0.0) {
            return Err(TomoError::DegenerateFrame(
                "every (mu_j, nu_j) pair is zero".into(),
            ));
        }
        Ok(Self { mu, nu })
    }

    pub fn num_modes(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn pair(&self, mode: usize) -> (f64, f64) {
        (self.mu[mode], self.nu[mode])
    }

    /// Per-mode Gaussian width parameter `sigma_j = mu_j^2 + nu_j^2`.
    pub fn sigma(&self, mode: usize) -> f64 {
        self.mu[mode] * self.mu[mode] + self.nu[mode] * self.nu[mode]
    }

    /// Sum of `sigma_j` over all modes.
    pub fn sigma_total(&self) -> f64 {
        (0..self.num_modes()).map(|j| self.sigma(j)).sum()
    }

    /// Whether mode `j` participates, i.e. `(mu_j, nu_j) != (0, 0)`.
    pub fn is_active(&self, mode: usize) -> bool {
        self.mu[mode] != 0.0 || self.nu[mode] != 0.0
    }

    pub fn active_modes(&self) -> Vec<usize> {
        (0..self.num_modes())
            .filter(|&j| self.is_active(j))
            .collect()
    }
}

/// Which quadratic Hamiltonian drives the frame evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionKind {
    /// `H = sum_j (p_j^2 + q_j^2) / 2`: frame parameters rotate.
    Harmonic,
    /// `H = sum_j (p_j^2 - q_j^2) / 2`: frame parameters shear
    /// hyperbolically.
    Inverted,
}

impl std::str::FromStr for EvolutionKind {
    type Err = TomoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harmonic" => Ok(Self::Harmonic),
            "inverted" => Ok(Self::Inverted),
            other => Err(TomoError::InvalidInput(format!(
                "unknown evolution kind '{other}', expected 'harmonic' or 'inverted'"
            ))),
        }
    }
}

/// Maps frame parameters forward by time `t`.
///
/// Harmonic: `mu' = mu cos t - nu sin t`, `nu' = mu sin t + nu cos t`.
/// Inverted: `mu' = mu cosh t + nu sinh t`, `nu' = mu sinh t + nu cosh t`.
/// Both maps form one-parameter groups and preserve frame validity.
pub fn evolve_frame(frame: &TomographyFrame, kind: EvolutionKind, t: f64) -> TomographyFrame {
    let (a, b) = match kind {
        EvolutionKind::Harmonic => (t.cos(), t.sin()),
        EvolutionKind::Inverted => (t.cosh(), t.sinh()),
    };
    let sign = match kind {
        EvolutionKind::Harmonic => -1.0,
        EvolutionKind::Inverted => 1.0,
    };
    let mu: Vec<f64> = frame
        .mu
        .iter()
        .zip(&frame.nu)
        .map(|(&m, &n)| m * a + sign * n * b)
        .collect();
    let nu: Vec<f64> = frame
        .mu
        .iter()
        .zip(&frame.nu)
        .map(|(&m, &n)| m * b + n * a)
        .collect();
    TomographyFrame::new(mu, nu).expect("evolution preserves frame validity")
}

/// Inverted-oscillator map exactly as some catalogs print it, where the
/// `mu` update of every mode after the first reads
/// `mu' = mu cosh t + nu cosh t` instead of the symmetric
/// `mu' = mu cosh t + nu sinh t`.
///
/// Kept for cross-checking against sources that use this variant; the
/// physically consistent map is [`evolve_frame`] with
/// [`EvolutionKind::Inverted`].
pub fn evolve_frame_inverted_literal(frame: &TomographyFrame, t: f64) -> TomographyFrame {
    let (c, s) = (t.cosh(), t.sinh());
    let mu: Vec<f64> = frame
        .mu
        .iter()
        .zip(&frame.nu)
        .enumerate()
        .map(|(j, (&m, &n))| if j == 0 { m * c + n * s } else { m * c + n * c })
        .collect();
    let nu: Vec<f64> = frame
        .mu
        .iter()
        .zip(&frame.nu)
        .map(|(&m, &n)| m * s + n * c)
        .collect();
    TomographyFrame::new(mu, nu).expect("literal map preserves frame validity")
}

/// Scales every frame parameter by `lambda != 0`.
///
/// Useful for homogeneity checks: tomograms satisfy
/// `w(lambda X | lambda mu, lambda nu) = |lambda|^{-1} w(X | mu, nu)`.
pub fn scale_frame(frame: &TomographyFrame, lambda: f64) -> Result<TomographyFrame> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(TomoError::InvalidInput(
            "frame scale factor must be finite and nonzero".into(),
        ));
    }
    TomographyFrame::new(
        frame.mu.iter().map(|&m| lambda * m).collect(),
        frame.nu.iter().map(|&n| lambda * n).collect(),
    )
}
