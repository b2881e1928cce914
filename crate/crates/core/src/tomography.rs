//! Tomogram evaluation: per-mode amplitudes, symplectic and
//! center-of-mass tomograms, subsystem marginals, and cluster tomograms.
//!
//! The per-mode amplitude has a closed form: writing `sigma = mu^2 +
//! nu^2` and `theta = atan2(nu, mu)`, the Gaussian-Hermite integral
//! collapses to
//!
//! ```text
//! a_n(Y|mu,nu) = sigma^(-1/4) psi_n(Y/sqrt(sigma))
//!                  * exp(-i mu Y^2 / (2 sigma nu)) * exp(-i n theta)
//! ```
//!
//! which the oracle tests pin against adaptive quadrature of the
//! defining integral. The chirp factor `exp(-i mu Y^2 / (2 sigma nu))`
//! does not depend on `n`, so it cancels inside every squared modulus;
//! the internal evaluation paths therefore drop it and work with the
//! chirp-free amplitude, which is also the exact `nu = 0` limit.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, TomoError};
use crate::frames::TomographyFrame;
use crate::quadrature::{gauss_legendre, par_tabulate};
use crate::states::{fock_wavefunction, fock_wavefunction_ladder, FockSuperposition};

/// Below this threshold negative grid values are treated as round-off
/// and clipped to zero; anything more negative is a defect and errors.
pub const NEGATIVE_CLIP: f64 = 1e-12;

/// Node counts for the delta-constrained convolution, by number of
/// integrated axes.
const NODES_1D: usize = 257;
const NODES_2D: usize = 129;
const NODES_3D: usize = 65;

/// Per-mode tomographic amplitude `a_n(Y|mu,nu)`.
///
/// `|a_n|^2` is the single-mode symplectic tomogram of the Fock state
/// `|n>`; relative phases across `n` at fixed `(mu, nu)` match the
/// defining integral, with the global phase fixed so `a_0(0|mu,nu)` is
/// real positive. The `nu = 0` branch is `|mu|^(-1/2) psi_n(Y/mu)`.
pub fn tomographic_amplitude(n: usize, y: f64, mu: f64, nu: f64) -> Result<Complex64> {
    if mu == 0.0 && nu == 0.0 {
        return Err(TomoError::DegenerateFrame(
            "tomographic amplitude needs (mu, nu) != (0, 0)".into(),
        ));
    }
    let base = chirp_free_amplitude(n, y, mu, nu);
    if nu == 0.0 {
        return Ok(base);
    }
    let sigma = mu * mu + nu * nu;
    let chirp = Complex64::from_polar(1.0, -mu * y * y / (2.0 * sigma * nu));
    Ok(base * chirp)
}

/// The amplitude without its chirp factor:
/// `sigma^(-1/4) psi_n(Y/sqrt(sigma)) exp(-i n theta)`.
///
/// At `nu = 0` this equals `|mu|^(-1/2) psi_n(Y/mu)` exactly, because
/// `theta` becomes 0 or pi and `exp(-i n pi) psi_n(|x|) = psi_n(-|x|)`
/// by parity.
fn chirp_free_amplitude(n: usize, y: f64, mu: f64, nu: f64) -> Complex64 {
    let sigma = mu * mu + nu * nu;
    let theta = nu.atan2(mu);
    let radial = sigma.powf(-0.25) * fock_wavefunction(n, y / sigma.sqrt());
    Complex64::from_polar(radial, -(n as f64) * theta)
}

/// Multimode symplectic tomogram
/// `w(X|frame) = |sum_k c_k prod_j a_{n_kj}(X_j|mu_j,nu_j)|^2`.
pub fn symplectic_tomogram(
    state: &FockSuperposition,
    x: &[f64],
    frame: &TomographyFrame,
) -> Result<f64> {
    check_mode_counts(state, frame)?;
    if x.len() != state.num_modes() {
        return Err(TomoError::DimensionMismatch(format!(
            "state has {} modes but got {} quadrature values",
            state.num_modes(),
            x.len()
        )));
    }
    if let Some(j) = (0..frame.num_modes()).find(|&j| !frame.is_active(j)) {
        return Err(TomoError::DegenerateFrame(format!(
            "symplectic tomogram needs (mu_j, nu_j) != (0, 0) for every mode, mode {j} is zero"
        )));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for term in state.terms() {
        let mut product = term.amplitude;
        for (j, &n) in term.occupations.iter().enumerate() {
            let (mu, nu) = frame.pair(j);
            product *= chirp_free_amplitude(n, x[j], mu, nu);
        }
        total += product;
    }
    Ok(total.norm_sqr())
}

/// Center-of-mass tomogram `w(X|frame)`, the distribution of
/// `sum_j (mu_j q_j + nu_j p_j)`.
///
/// Modes with `(mu_j, nu_j) = (0, 0)` contribute nothing to the observed
/// sum and are traced out. At most four modes may be active.
pub fn cm_tomogram(state: &FockSuperposition, x: f64, frame: &TomographyFrame) -> Result<f64> {
    Ok(CmEvaluator::new(state, frame)?.eval(x))
}

/// Reusable center-of-mass evaluator: builds the integration plan once
/// for a fixed state and frame, then evaluates at any `X`.
///
/// Prefer this over repeated [`cm_tomogram`] calls inside inner loops.
pub struct CmEvaluator {
    plan: ConstrainedPlan,
}

impl CmEvaluator {
    pub fn new(state: &FockSuperposition, frame: &TomographyFrame) -> Result<Self> {
        check_mode_counts(state, frame)?;
        let merged = frame.active_modes();
        Ok(Self {
            plan: ConstrainedPlan::new(state, frame, &merged, &[])?,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.plan.eval(x)
    }
}

/// Tomogram of one mode's reduced state: the distribution of
/// `mu1 q + nu1 p` on the selected mode after tracing out the rest.
pub fn subsystem_tomogram(
    state: &FockSuperposition,
    mode: usize,
    x1: f64,
    mu1: f64,
    nu1: f64,
) -> Result<f64> {
    if mode >= state.num_modes() {
        return Err(TomoError::InvalidInput(format!(
            "mode {mode} out of range for a {}-mode state",
            state.num_modes()
        )));
    }
    if mu1 == 0.0 && nu1 == 0.0 {
        return Err(TomoError::DegenerateFrame(
            "subsystem tomogram needs (mu1, nu1) != (0, 0)".into(),
        ));
    }
    let mut mu = vec![0.0; state.num_modes()];
    let mut nu = vec![0.0; state.num_modes()];
    mu[mode] = mu1;
    nu[mode] = nu1;
    let frame = TomographyFrame::new(mu, nu)?;
    cm_tomogram(state, x1, &frame)
}

/// The supported three-mode cluster split: modes 1 and 2 merged into the
/// collective variable, mode 3 observed separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterPartition(());

impl ClusterPartition {
    /// The `{1,2} | {3}` split (modes 0 and 1 merged, mode 2 alone in
    /// zero-based labels).
    pub fn pair_and_single() -> Self {
        Self(())
    }

    /// Validates an explicit split against the supported one.
    pub fn new(merged: &[usize], lone: &[usize]) -> Result<Self> {
        if merged == [0, 1] && lone == [2] {
            Ok(Self(()))
        } else {
            Err(TomoError::InvalidInput(format!(
                "unsupported cluster partition {merged:?} | {lone:?}; only modes {{0,1}} merged with mode 2 separate is available"
            )))
        }
    }
}

/// Cluster tomogram of a three-mode state:
/// `w(X, X3|frame) = integral w_sympl(Y, X - Y, X3) dY`,
/// the joint distribution of `mu1 q1 + nu1 p1 + mu2 q2 + nu2 p2` and
/// `mu3 q3 + nu3 p3`.
pub fn cluster_tomogram(
    state: &FockSuperposition,
    _partition: ClusterPartition,
    x: f64,
    x3: f64,
    frame: &TomographyFrame,
) -> Result<f64> {
    let plan = ClusterPlan::new(state, frame, x3)?;
    Ok(plan.eval(x))
}

struct ClusterPlan(ConstrainedPlan);

impl ClusterPlan {
    fn new(state: &FockSuperposition, frame: &TomographyFrame, x3: f64) -> Result<Self> {
        check_mode_counts(state, frame)?;
        if state.num_modes() != 3 {
            return Err(TomoError::DimensionMismatch(format!(
                "cluster tomogram needs a 3-mode state, got {} modes",
                state.num_modes()
            )));
        }
        if let Some(j) = (0..3).find(|&j| !frame.is_active(j)) {
            return Err(TomoError::DegenerateFrame(format!(
                "cluster tomogram needs every mode active, mode {j} is zero"
            )));
        }
        Ok(Self(ConstrainedPlan::new(
            state,
            frame,
            &[0, 1],
            &[(2, x3)],
        )?))
    }

    fn eval(&self, x: f64) -> f64 {
        self.0.eval(x)
    }
}

fn check_mode_counts(state: &FockSuperposition, frame: &TomographyFrame) -> Result<()> {
    if state.num_modes() != frame.num_modes() {
        return Err(TomoError::DimensionMismatch(format!(
            "state has {} modes but frame has {}",
            state.num_modes(),
            frame.num_modes()
        )));
    }
    Ok(())
}

/// Precomputed evaluation plan for tomograms of the form
/// `w(x) = Tr(rho delta(x - sum_{j in merged} O_j))` with some modes
/// pinned at fixed quadrature values and the rest traced out.
///
/// The merged modes' joint distribution is a convolution of per-mode
/// amplitude products; all but the last merged mode are integrated on
/// fixed Gauss-Legendre panels and the last takes the remainder
/// coordinate. Traced-out modes split the terms into groups by their
/// occupations: coherent within a group, incoherent across groups.
struct ConstrainedPlan {
    /// Per independent axis: integration nodes and weights.
    axes: Vec<PlanAxis>,
    /// Dependent (remainder) mode data.
    dep: ModeBasis,
    /// Distinct occupations appearing on the dependent mode.
    dep_occs: Vec<usize>,
    /// Unit phasors `exp(-i n theta)` matching `dep_occs`; hoisted out
    /// of the inner loop because they do not depend on the coordinate.
    dep_phases: Vec<Complex64>,
    /// One entry per state term.
    terms: Vec<PlanTerm>,
    /// Number of trace groups.
    n_groups: usize,
}

struct PlanAxis {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Amplitude tables indexed `[occupation][node]`; only occupations
    /// present in the state are filled.
    tables: Vec<Vec<Complex64>>,
}

/// Chirp-free amplitude ingredients for one mode.
struct ModeBasis {
    inv_quartic: f64,
    inv_sqrt_sigma: f64,
    theta: f64,
}

impl ModeBasis {
    fn new(mu: f64, nu: f64) -> Self {
        let sigma = mu * mu + nu * nu;
        Self {
            inv_quartic: sigma.powf(-0.25),
            inv_sqrt_sigma: 1.0 / sigma.sqrt(),
            theta: nu.atan2(mu),
        }
    }

    fn amplitude(&self, n: usize, y: f64) -> Complex64 {
        let radial = self.inv_quartic * fock_wavefunction(n, y * self.inv_sqrt_sigma);
        Complex64::from_polar(radial, -(n as f64) * self.theta)
    }
}

struct PlanTerm {
    group: usize,
    /// Term amplitude times the pinned modes' amplitudes.
    coef: Complex64,
    /// Occupation per independent axis, in axis order.
    indep_occ: Vec<usize>,
    /// Index into `dep_occs`.
    dep_slot: usize,
}

impl ConstrainedPlan {
    fn new(
        state: &FockSuperposition,
        frame: &TomographyFrame,
        merged: &[usize],
        pinned: &[(usize, f64)],
    ) -> Result<Self> {
        if merged.is_empty() {
            return Err(TomoError::DegenerateFrame(
                "no active modes left to observe".into(),
            ));
        }
        if merged.len() > 4 {
            return Err(TomoError::InvalidInput(format!(
                "{} active modes exceed the supported maximum of 4",
                merged.len()
            )));
        }
        // The dependent slot absorbs the widest mode: every integrated
        // axis then resolves its own scale while the dependent factor
        // varies slowly. With the narrowest mode dependent instead, its
        // amplitude turns into a spike the axis rules cannot resolve.
        let mut merged: Vec<usize> = merged.to_vec();
        if merged.len() > 1 {
            let widest = (0..merged.len())
                .max_by(|&a, &b| frame.sigma(merged[a]).total_cmp(&frame.sigma(merged[b])))
                .expect("merged is nonempty");
            let dep = merged.remove(widest);
            merged.push(dep);
        }
        let merged = merged.as_slice();

        let n_axes = merged.len() - 1;
        let nodes_per_axis = match n_axes {
            0 => 0,
            1 => NODES_1D,
            2 => NODES_2D,
            _ => NODES_3D,
        };

        // Traced-out modes: everything neither merged nor pinned.
        let special: Vec<usize> = merged
            .iter()
            .chain(pinned.iter().map(|(m, _)| m))
            .copied()
            .collect();
        let dropped: Vec<usize> = (0..state.num_modes())
            .filter(|m| !special.contains(m))
            .collect();

        let pinned_bases: Vec<(usize, f64, ModeBasis)> = pinned
            .iter()
            .map(|&(m, x)| {
                let (mu, nu) = frame.pair(m);
                (m, x, ModeBasis::new(mu, nu))
            })
            .collect();

        let dep_mode = *merged.last().expect("merged is nonempty");
        let (dep_mu, dep_nu) = frame.pair(dep_mode);
        let dep = ModeBasis::new(dep_mu, dep_nu);

        // Group terms by their occupations on the traced-out modes.
        let mut group_keys: Vec<Vec<usize>> = Vec::new();
        let mut dep_occs: Vec<usize> = Vec::new();
        let mut terms = Vec::with_capacity(state.terms().len());
        for term in state.terms() {
            let key: Vec<usize> = dropped.iter().map(|&m| term.occupations[m]).collect();
            let group = match group_keys.iter().position(|k| *k == key) {
                Some(g) => g,
                None => {
                    group_keys.push(key);
                    group_keys.len() - 1
                }
            };
            let mut coef = term.amplitude;
            for (m, x, basis) in &pinned_bases {
                coef *= basis.amplitude(term.occupations[*m], *x);
            }
            let dep_n = term.occupations[dep_mode];
            let dep_slot = match dep_occs.iter().position(|&n| n == dep_n) {
                Some(s) => s,
                None => {
                    dep_occs.push(dep_n);
                    dep_occs.len() - 1
                }
            };
            terms.push(PlanTerm {
                group,
                coef,
                indep_occ: merged[..n_axes]
                    .iter()
                    .map(|&m| term.occupations[m])
                    .collect(),
                dep_slot,
            });
        }

        // Integration panel and amplitude tables per independent axis.
        let mut axes = Vec::with_capacity(n_axes);
        for (axis_idx, &mode) in merged[..n_axes].iter().enumerate() {
            let half_width = 8.0 * (frame.sigma(mode) / 2.0).sqrt();
            let rule = gauss_legendre(nodes_per_axis, -half_width, half_width)?;
            let (mu, nu) = frame.pair(mode);
            let basis = ModeBasis::new(mu, nu);
            let max_occ = terms
                .iter()
                .map(|t| t.indep_occ[axis_idx])
                .max()
                .unwrap_or(0);
            let mut tables = vec![Vec::new(); max_occ + 1];
            for n in 0..=max_occ {
                if terms.iter().any(|t| t.indep_occ[axis_idx] == n) {
                    tables[n] = rule.nodes.iter().map(|&y| basis.amplitude(n, y)).collect();
                }
            }
            axes.push(PlanAxis {
                nodes: rule.nodes,
                weights: rule.weights,
                tables,
            });
        }

        let dep_phases = dep_occs
            .iter()
            .map(|&n| Complex64::from_polar(1.0, -(n as f64) * dep.theta))
            .collect();

        Ok(Self {
            axes,
            dep,
            dep_occs,
            dep_phases,
            terms,
            n_groups: group_keys.len(),
        })
    }

    /// Fills the per-slot dependent-mode amplitudes at coordinate `y`,
    /// sharing one Gaussian and recurrence sweep across occupations.
    fn dep_amplitudes(&self, y: f64, psi: &mut [f64], out: &mut [Complex64]) {
        fock_wavefunction_ladder(y * self.dep.inv_sqrt_sigma, psi);
        for (slot, &n) in self.dep_occs.iter().enumerate() {
            out[slot] = self.dep_phases[slot].scale(self.dep.inv_quartic * psi[n]);
        }
    }

    /// Evaluates the tomogram at collective coordinate `x`.
    fn eval(&self, x: f64) -> f64 {
        let mut group_sums = vec![Complex64::new(0.0, 0.0); self.n_groups];
        let mut dep_amps = vec![Complex64::new(0.0, 0.0); self.dep_occs.len()];
        let max_dep = self.dep_occs.iter().copied().max().unwrap_or(0);
        let mut psi = vec![0.0; max_dep + 1];

        if self.axes.is_empty() {
            self.dep_amplitudes(x, &mut psi, &mut dep_amps);
            for term in &self.terms {
                group_sums[term.group] += term.coef * dep_amps[term.dep_slot];
            }
            return group_sums.iter().map(|z| z.norm_sqr()).sum();
        }

        let counts: Vec<usize> = self.axes.iter().map(|a| a.nodes.len()).collect();
        let total: usize = counts.iter().product();
        let mut idx = vec![0usize; self.axes.len()];
        let mut result = 0.0;

        for _ in 0..total {
            let mut weight = 1.0;
            let mut y_sum = 0.0;
            for (axis, &i) in self.axes.iter().zip(&idx) {
                weight *= axis.weights[i];
                y_sum += axis.nodes[i];
            }
            self.dep_amplitudes(x - y_sum, &mut psi, &mut dep_amps);
            for s in group_sums.iter_mut() {
                *s = Complex64::new(0.0, 0.0);
            }
            for term in &self.terms {
                let mut product = term.coef * dep_amps[term.dep_slot];
                for ((axis, &occ_i), &node_i) in
                    self.axes.iter().zip(&term.indep_occ).zip(&idx)
                {
                    product *= axis.tables[occ_i][node_i];
                }
                group_sums[term.group] += product;
            }
            result += weight * group_sums.iter().map(|z| z.norm_sqr()).sum::<f64>();

            // Odometer increment over the node tuple.
            for d in (0..idx.len()).rev() {
                idx[d] += 1;
                if idx[d] < counts[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        result
    }
}

/// Which tomogram family a grid holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TomogramKind {
    CenterOfMass,
    Symplectic,
    Cluster,
    Marginal,
}

/// A tomogram sampled on a rectangular grid.
///
/// `values` is row-major over the axes (last axis fastest); every value
/// is non-negative after round-off clipping at [`NEGATIVE_CLIP`].
#[derive(Debug, Clone, Serialize)]
pub struct TomogramGrid {
    pub kind: TomogramKind,
    pub axes: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub frame: TomographyFrame,
}

impl TomogramGrid {
    /// Trapezoid-rule integral over all axes.
    pub fn trapezoid_integral(&self) -> f64 {
        match self.axes.len() {
            1 => trapezoid(&self.axes[0], &self.values),
            2 => {
                let inner = self.axes[1].len();
                let rows: Vec<f64> = self
                    .values
                    .chunks(inner)
                    .map(|row| trapezoid(&self.axes[1], row))
                    .collect();
                trapezoid(&self.axes[0], &rows)
            }
            _ => unreachable!("grids have one or two axes"),
        }
    }
}

fn trapezoid(axis: &[f64], values: &[f64]) -> f64 {
    axis.windows(2)
        .zip(values.windows(2))
        .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
        .sum()
}

/// Uniform grid of `count` points from `min` to `max` inclusive.
pub fn linear_axis(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite()) || min >= max {
        return Err(TomoError::InvalidInput(format!(
            "axis needs finite min < max, got [{min}, {max}]"
        )));
    }
    if !(2..=100_000).contains(&count) {
        return Err(TomoError::InvalidInput(format!(
            "axis point count {count} outside the supported range 2..=100000"
        )));
    }
    let step = (max - min) / (count - 1) as f64;
    Ok((0..count).map(|i| min + step * i as f64).collect())
}

fn clip_values(values: Vec<f64>) -> Result<Vec<f64>> {
    if let Some(&bad) = values.iter().find(|&&v| v < -NEGATIVE_CLIP || !v.is_finite()) {
        return Err(TomoError::NonConvergent(format!(
            "tomogram value {bad:.6e} violates non-negativity beyond round-off"
        )));
    }
    Ok(values
        .into_iter()
        .map(|v| if v < 0.0 { 0.0 } else { v })
        .collect())
}

/// Center-of-mass tomogram sampled on `axis`.
pub fn cm_grid(
    state: &FockSuperposition,
    frame: &TomographyFrame,
    axis: &[f64],
) -> Result<TomogramGrid> {
    let evaluator = CmEvaluator::new(state, frame)?;
    let values = par_tabulate(axis.len(), |i| evaluator.eval(axis[i]));
    Ok(TomogramGrid {
        kind: TomogramKind::CenterOfMass,
        axes: vec![axis.to_vec()],
        values: clip_values(values)?,
        frame: frame.clone(),
    })
}

/// Two-mode symplectic tomogram sampled on `axis1 x axis2`.
pub fn symplectic_grid(
    state: &FockSuperposition,
    frame: &TomographyFrame,
    axis1: &[f64],
    axis2: &[f64],
) -> Result<TomogramGrid> {
    if state.num_modes() != 2 {
        return Err(TomoError::DimensionMismatch(format!(
            "symplectic grids are two-dimensional; the state has {} modes",
            state.num_modes()
        )));
    }
    check_mode_counts(state, frame)?;
    let inner = axis2.len();
    let values = par_tabulate(axis1.len() * inner, |flat| {
        let x = [axis1[flat / inner], axis2[flat % inner]];
        symplectic_tomogram(state, &x, frame)
    });
    let values = values.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(TomogramGrid {
        kind: TomogramKind::Symplectic,
        axes: vec![axis1.to_vec(), axis2.to_vec()],
        values: clip_values(values)?,
        frame: frame.clone(),
    })
}

/// Cluster tomogram sampled on `x_axis x x3_axis`.
pub fn cluster_grid(
    state: &FockSuperposition,
    partition: ClusterPartition,
    frame: &TomographyFrame,
    x_axis: &[f64],
    x3_axis: &[f64],
) -> Result<TomogramGrid> {
    let _ = partition;
    // One plan per X3 value; the collective-coordinate sweep reuses it.
    let plans = x3_axis
        .iter()
        .map(|&x3| ClusterPlan::new(state, frame, x3))
        .collect::<Result<Vec<_>>>()?;
    let inner = x3_axis.len();
    let values = par_tabulate(x_axis.len() * inner, |flat| {
        plans[flat % inner].eval(x_axis[flat / inner])
    });
    Ok(TomogramGrid {
        kind: TomogramKind::Cluster,
        axes: vec![x_axis.to_vec(), x3_axis.to_vec()],
        values: clip_values(values)?,
        frame: frame.clone(),
    })
}

/// Single-mode marginal tomogram sampled on `axis`.
pub fn marginal_grid(
    state: &FockSuperposition,
    mode: usize,
    mu1: f64,
    nu1: f64,
    axis: &[f64],
) -> Result<TomogramGrid> {
    if mode >= state.num_modes() {
        return Err(TomoError::InvalidInput(format!(
            "mode {mode} out of range for a {}-mode state",
            state.num_modes()
        )));
    }
    if mu1 == 0.0 && nu1 == 0.0 {
        return Err(TomoError::DegenerateFrame(
            "marginal tomogram needs (mu1, nu1) != (0, 0)".into(),
        ));
    }
    let mut mu = vec![0.0; state.num_modes()];
    let mut nu = vec![0.0; state.num_modes()];
    mu[mode] = mu1;
    nu[mode] = nu1;
    let frame = TomographyFrame::new(mu, nu)?;
    let plan = ConstrainedPlan::new(state, &frame, &[mode], &[])?;
    let values = par_tabulate(axis.len(), |i| plan.eval(axis[i]));
    Ok(TomogramGrid {
        kind: TomogramKind::Marginal,
        axes: vec![axis.to_vec()],
        values: clip_values(values)?,
        frame,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::FockTerm;
    use approx::assert_abs_diff_eq;

    fn ent_state() -> FockSuperposition {
        let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        FockSuperposition::new(
            2,
            vec![FockTerm::new(c, vec![0, 1]), FockTerm::new(c, vec![1, 0])],
        )
        .unwrap()
    }

    fn sep_state() -> FockSuperposition {
        FockSuperposition::new(2, vec![FockTerm::new(Complex64::ONE, vec![0, 1])]).unwrap()
    }

    fn ground_state() -> FockSuperposition {
        FockSuperposition::new(2, vec![FockTerm::new(Complex64::ONE, vec![0, 0])]).unwrap()
    }

    fn w_state() -> FockSuperposition {
        let c = Complex64::new(1.0 / 3.0f64.sqrt(), 0.0);
        FockSuperposition::new(
            3,
            vec![
                FockTerm::new(c, vec![0, 0, 1]),
                FockTerm::new(c, vec![0, 1, 0]),
                FockTerm::new(c, vec![1, 0, 0]),
            ],
        )
        .unwrap()
    }

    fn standard_frame() -> TomographyFrame {
        TomographyFrame::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn amplitude_moduli_match_single_mode_tomograms() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        for y in [-1.4, 0.0, 0.7, 2.1] {
            let pos = tomographic_amplitude(0, y, 1.0, 0.0).unwrap();
            assert_abs_diff_eq!(pos.norm_sqr(), (-y * y).exp() / sqrt_pi, epsilon = 1e-14);
            let mom = tomographic_amplitude(0, y, 0.0, 1.0).unwrap();
            assert_abs_diff_eq!(mom.norm_sqr(), (-y * y).exp() / sqrt_pi, epsilon = 1e-14);
            // sigma = 1 frame away from the axes.
            let gen = tomographic_amplitude(1, y, 0.6, 0.8).unwrap();
            assert_abs_diff_eq!(
                gen.norm_sqr(),
                2.0 * y * y * (-y * y).exp() / sqrt_pi,
                epsilon = 1e-14
            );
        }
        assert!(tomographic_amplitude(0, 0.3, 0.0, 0.0).is_err());
    }

    #[test]
    fn amplitude_phase_convention() {
        for (mu, nu) in [(0.6, 0.8), (-1.2, 0.7), (0.5, -1.3), (-0.9, -0.4)] {
            let a0 = tomographic_amplitude(0, 0.0, mu, nu).unwrap();
            assert!(a0.re > 0.0);
            assert_abs_diff_eq!(a0.im, 0.0, epsilon = 1e-16);
        }
    }

    #[test]
    fn symplectic_matches_closed_values() {
        let sep = sep_state();
        let frame = standard_frame();
        for x2 in [-1.5, 0.4, 2.0] {
            let w = symplectic_tomogram(&sep, &[0.0, x2], &frame).unwrap();
            let expect = 2.0 * x2 * x2 * (-x2 * x2).exp() / std::f64::consts::PI;
            assert_abs_diff_eq!(w, expect, epsilon = 1e-14);
        }
        let ent = ent_state();
        let w = symplectic_tomogram(&ent, &[1.0, 1.0], &frame).unwrap();
        assert_abs_diff_eq!(w, 0.17231423441478904, epsilon = 1e-15);
    }

    #[test]
    fn symplectic_of_ground_state_is_a_gaussian_product() {
        let ground = ground_state();
        let frame = TomographyFrame::new(vec![0.8, -0.5], vec![0.3, 1.1]).unwrap();
        for (x1, x2) in [(0.0, 0.0), (1.2, -0.6), (-2.0, 1.4)] {
            let w = symplectic_tomogram(&ground, &[x1, x2], &frame).unwrap();
            let g = |x: f64, s: f64| (-x * x / s).exp() / (std::f64::consts::PI * s).sqrt();
            assert_abs_diff_eq!(
                w,
                g(x1, frame.sigma(0)) * g(x2, frame.sigma(1)),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn symplectic_equals_product_of_public_amplitudes() {
        let ent = ent_state();
        let frame = TomographyFrame::new(vec![0.7, -1.2], vec![0.4, 0.9]).unwrap();
        for (x1, x2) in [(0.3, -0.8), (1.7, 0.2), (-0.5, -1.1)] {
            let engine = symplectic_tomogram(&ent, &[x1, x2], &frame).unwrap();
            let mut total = Complex64::new(0.0, 0.0);
            for term in ent.terms() {
                let a1 = tomographic_amplitude(
                    term.occupations[0],
                    x1,
                    frame.mu()[0],
                    frame.nu()[0],
                )
                .unwrap();
                let a2 = tomographic_amplitude(
                    term.occupations[1],
                    x2,
                    frame.mu()[1],
                    frame.nu()[1],
                )
                .unwrap();
                total += term.amplitude * a1 * a2;
            }
            assert_abs_diff_eq!(engine, total.norm_sqr(), epsilon = 1e-14);
        }
    }

    #[test]
    fn symplectic_rejects_bad_input() {
        let ent = ent_state();
        let inactive = TomographyFrame::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        assert!(symplectic_tomogram(&ent, &[0.0, 0.0], &inactive).is_err());
        let frame = standard_frame();
        assert!(symplectic_tomogram(&ent, &[0.0], &frame).is_err());
        let three = TomographyFrame::new(vec![1.0; 3], vec![0.0; 3]).unwrap();
        assert!(symplectic_tomogram(&ent, &[0.0, 0.0], &three).is_err());
    }

    #[test]
    fn cm_matches_closed_values() {
        let frame = standard_frame();
        let w = cm_tomogram(&ent_state(), 1.0, &frame).unwrap();
        assert_abs_diff_eq!(w, 0.24197072451914335, epsilon = 1e-12);
        let w = cm_tomogram(&sep_state(), 0.0, &frame).unwrap();
        assert_abs_diff_eq!(w, 0.19947114020071634, epsilon = 1e-12);
        let w = cm_tomogram(&ground_state(), 0.0, &frame).unwrap();
        assert_abs_diff_eq!(w, 0.39894228040143268, epsilon = 1e-12);
    }

    #[test]
    fn cm_with_zeroed_mode_equals_subsystem_marginal() {
        let ent = ent_state();
        let frame = TomographyFrame::new(vec![0.9, 0.0], vec![-0.4, 0.0]).unwrap();
        for x in [-2.5, -0.3, 0.0, 1.1, 3.0] {
            let via_cm = cm_tomogram(&ent, x, &frame).unwrap();
            let via_sub = subsystem_tomogram(&ent, 0, x, 0.9, -0.4).unwrap();
            assert_abs_diff_eq!(via_cm, via_sub, epsilon = 1e-15);
        }
    }

    #[test]
    fn subsystem_matches_closed_values() {
        let w = subsystem_tomogram(&sep_state(), 0, 0.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(w, 0.56418958354775629, epsilon = 1e-14);
        let w = subsystem_tomogram(&ent_state(), 0, 0.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(w, 0.28209479177387814, epsilon = 1e-14);
        assert!(subsystem_tomogram(&sep_state(), 0, 0.0, 0.0, 0.0).is_err());
        assert!(subsystem_tomogram(&sep_state(), 5, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn subsystem_marginal_depends_only_on_sigma() {
        let ent = ent_state();
        let reference = subsystem_tomogram(&ent, 0, 0.8, 1.0, 0.0).unwrap();
        for t in [0.3f64, 1.0, 2.4] {
            let rotated = subsystem_tomogram(&ent, 0, 0.8, t.cos(), t.sin()).unwrap();
            assert_abs_diff_eq!(rotated, reference, epsilon = 1e-14);
        }
    }

    #[test]
    fn subsystem_marginal_traces_out_w_state_partners() {
        // Reduced mode 3 of the W state is diag(2/3, 1/3), so its
        // marginal mixes the |0> and |1> tomograms incoherently.
        let w = w_state();
        let (mu, nu) = (0.8, -0.6);
        for x in [-1.3, 0.0, 0.9] {
            let got = subsystem_tomogram(&w, 2, x, mu, nu).unwrap();
            let a0 = tomographic_amplitude(0, x, mu, nu).unwrap().norm_sqr();
            let a1 = tomographic_amplitude(1, x, mu, nu).unwrap().norm_sqr();
            assert_abs_diff_eq!(got, (2.0 * a0 + a1) / 3.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn cm_homogeneity_at_a_point() {
        let ent = ent_state();
        let frame = TomographyFrame::new(vec![0.7, -1.2], vec![0.4, 0.9]).unwrap();
        let x = 0.85;
        let base = cm_tomogram(&ent, x, &frame).unwrap();
        for lambda in [-2.0, 0.5, 3.0] {
            let scaled = crate::frames::scale_frame(&frame, lambda).unwrap();
            let w = cm_tomogram(&ent, lambda * x, &scaled).unwrap();
            assert_abs_diff_eq!(w * lambda.abs(), base, epsilon = 1e-10);
        }
    }

    #[test]
    fn cm_rejects_too_many_active_modes() {
        let five = FockSuperposition::new(
            5,
            vec![FockTerm::new(Complex64::ONE, vec![0, 0, 0, 0, 0])],
        )
        .unwrap();
        let frame = TomographyFrame::new(vec![1.0; 5], vec![0.0; 5]).unwrap();
        assert!(cm_tomogram(&five, 0.0, &frame).is_err());
    }

    #[test]
    fn cluster_matches_closed_values() {
        let w = w_state();
        let frame = TomographyFrame::new(vec![1.0; 3], vec![0.0; 3]).unwrap();
        let part = ClusterPartition::pair_and_single();
        let at_origin = cluster_tomogram(&w, part, 0.0, 0.0, &frame).unwrap();
        assert_abs_diff_eq!(at_origin, 0.0, epsilon = 1e-12);
        let off = cluster_tomogram(&w, part, 1.0, 0.0, &frame).unwrap();
        assert_abs_diff_eq!(off, 0.091011574864802898, epsilon = 1e-12);
    }

    #[test]
    fn cluster_validates_input() {
        assert!(ClusterPartition::new(&[0, 1], &[2]).is_ok());
        assert!(ClusterPartition::new(&[0, 2], &[1]).is_err());
        assert!(ClusterPartition::new(&[0], &[1]).is_err());

        let part = ClusterPartition::pair_and_single();
        let frame2 = standard_frame();
        assert!(cluster_tomogram(&ent_state(), part, 0.0, 0.0, &frame2).is_err());
        let w = w_state();
        let degenerate = TomographyFrame::new(vec![1.0, 1.0, 0.0], vec![0.0; 3]).unwrap();
        assert!(cluster_tomogram(&w, part, 0.0, 0.0, &degenerate).is_err());
    }

    #[test]
    fn linear_axis_validates() {
        let axis = linear_axis(-1.0, 1.0, 5).unwrap();
        assert_eq!(axis, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(linear_axis(1.0, -1.0, 5).is_err());
        assert!(linear_axis(-1.0, 1.0, 1).is_err());
        assert!(linear_axis(-1.0, 1.0, 100_001).is_err());
        assert!(linear_axis(f64::NEG_INFINITY, 1.0, 5).is_err());
    }

    #[test]
    fn cm_grid_is_normalized_on_wide_axis() {
        let frame = TomographyFrame::new(vec![0.7, -1.2], vec![0.4, 0.9]).unwrap();
        let half = 8.0 * (frame.sigma_total() / 2.0).sqrt();
        let axis = linear_axis(-half, half, 161).unwrap();
        for state in [ent_state(), sep_state(), ground_state()] {
            let grid = cm_grid(&state, &frame, &axis).unwrap();
            assert_abs_diff_eq!(grid.trapezoid_integral(), 1.0, epsilon = 5e-4);
            assert!(grid.values.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn symplectic_grid_layout_is_row_major() {
        let ent = ent_state();
        let frame = standard_frame();
        let a1 = vec![-1.0, 0.5];
        let a2 = vec![0.0, 1.0, 2.0];
        let grid = symplectic_grid(&ent, &frame, &a1, &a2).unwrap();
        assert_eq!(grid.values.len(), 6);
        for (i, &x1) in a1.iter().enumerate() {
            for (j, &x2) in a2.iter().enumerate() {
                let direct = symplectic_tomogram(&ent, &[x1, x2], &frame).unwrap();
                assert_abs_diff_eq!(grid.values[i * 3 + j], direct, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn cluster_grid_is_normalized() {
        let w = w_state();
        let frame = TomographyFrame::new(vec![1.0, 0.5, -0.8], vec![0.2, 1.0, 0.6]).unwrap();
        let s12 = frame.sigma(0) + frame.sigma(1);
        let ax = linear_axis(
            -8.0 * (s12 / 2.0).sqrt(),
            8.0 * (s12 / 2.0).sqrt(),
            121,
        )
        .unwrap();
        let s3 = frame.sigma(2);
        let ax3 = linear_axis(-8.0 * (s3 / 2.0).sqrt(), 8.0 * (s3 / 2.0).sqrt(), 121).unwrap();
        let grid = cluster_grid(&w, ClusterPartition::pair_and_single(), &frame, &ax, &ax3)
            .unwrap();
        assert_abs_diff_eq!(grid.trapezoid_integral(), 1.0, epsilon = 5e-4);
    }

    #[test]
    fn marginal_grid_matches_pointwise_calls() {
        let ent = ent_state();
        let axis = linear_axis(-3.0, 3.0, 7).unwrap();
        let grid = marginal_grid(&ent, 1, 0.6, -1.1, &axis).unwrap();
        for (i, &x) in axis.iter().enumerate() {
            let direct = subsystem_tomogram(&ent, 1, x, 0.6, -1.1).unwrap();
            assert_abs_diff_eq!(grid.values[i], direct, epsilon = 1e-15);
        }
        assert!(marginal_grid(&ent, 1, 0.0, 0.0, &axis).is_err());
        assert!(marginal_grid(&ent, 7, 1.0, 0.0, &axis).is_err());
    }
}
