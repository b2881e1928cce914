//! Multimode oscillator states in the Fock basis.
//!
//! A pure state is a finite superposition of number-basis products
//! `|n_1 ... n_N>`. Units are dimensionless throughout: `hbar = m = omega
//! = 1`, so the mode-`n` wavefunction is the Hermite-Gaussian
//! `psi_n(q) = pi^(-1/4) (2^n n!)^(-1/2) H_n(q) exp(-q^2/2)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TomoError};

/// Default per-mode Fock cutoff. Catalog states only need occupation 1;
/// the headroom exists for reconstruction experiments.
pub const DEFAULT_CUTOFF: usize = 8;

/// Tolerance on the squared norm of a superposition.
pub const NORM_TOL: f64 = 1e-12;

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence
/// `H_{n+1} = 2 x H_n - 2 n H_{n-1}`.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// L2-normalized harmonic-oscillator eigenfunction `psi_n(q)`.
///
/// Uses the normalized recurrence directly so large `n` neither
/// overflows the polynomial nor underflows the factorial.
pub fn fock_wavefunction(n: usize, q: f64) -> f64 {
    let gauss = std::f64::consts::PI.powf(-0.25) * (-0.5 * q * q).exp();
    if n == 0 {
        return gauss;
    }
    let mut prev = gauss;
    let mut cur = std::f64::consts::SQRT_2 * q * gauss;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * q * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[n] = psi_n(q)` for every order below `out.len()` in one
/// recurrence sweep, sharing the Gaussian prefactor across orders.
/// Matches [`fock_wavefunction`] value for value; inner evaluation loops
/// use it to avoid recomputing the exponential per order.
pub(crate) fn fock_wavefunction_ladder(q: f64, out: &mut [f64]) {
    let Some(first) = out.first_mut() else {
        return;
    };
    let gauss = std::f64::consts::PI.powf(-0.25) * (-0.5 * q * q).exp();
    *first = gauss;
    if out.len() == 1 {
        return;
    }
    out[1] = std::f64::consts::SQRT_2 * q * gauss;
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * q * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// One component of a Fock superposition: a complex amplitude attached
/// to an occupation vector with one entry per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FockTerm {
    pub amplitude: Complex64,
    pub occupations: Vec<usize>,
}

impl FockTerm {
    pub fn new(amplitude: Complex64, occupations: Vec<usize>) -> Self {
        Self {
            amplitude,
            occupations,
        }
    }
}

/// A normalized pure state `sum_k c_k |n_k1 ... n_kN>`.
///
/// Construction canonicalizes the term list: terms are sorted by
/// occupation vector and duplicates are merged by amplitude addition.
/// The squared norm must equal 1 within [`NORM_TOL`] after merging;
/// nothing is renormalized silently.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSuperposition {
    num_modes: usize,
    terms: Vec<FockTerm>,
    cutoff: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateJson {
    modes: usize,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    re: f64,
    im: f64,
    occ: Vec<usize>,
}

impl FockSuperposition {
    /// Builds a state with the default Fock cutoff.
    pub fn new(num_modes: usize, terms: Vec<FockTerm>) -> Result<Self> {
        Self::with_cutoff(num_modes, terms, DEFAULT_CUTOFF)
    }

    /// Builds a state with an explicit per-mode occupation cutoff.
    pub fn with_cutoff(num_modes: usize, terms: Vec<FockTerm>, cutoff: usize) -> Result<Self> {
        if num_modes == 0 {
            return Err(TomoError::InvalidInput(
                "a state needs at least one mode".into(),
            ));
        }
        if terms.is_empty() {
            return Err(TomoError::InvalidInput(
                "a state needs at least one term".into(),
            ));
        }
        for term in &terms {
            if term.occupations.len() != num_modes {
                return Err(TomoError::DimensionMismatch(format!(
                    "occupation vector {:?} does not match {} modes",
                    term.occupations, num_modes
                )));
            }
            if let Some(&n) = term.occupations.iter().find(|&&n| n > cutoff) {
                return Err(TomoError::InvalidInput(format!(
                    "occupation {n} exceeds the Fock cutoff {cutoff}"
                )));
            }
            if !term.amplitude.re.is_finite() || !term.amplitude.im.is_finite() {
                return Err(TomoError::InvalidInput(
                    "term amplitudes must be finite".into(),
                ));
            }
        }

        let mut terms = terms;
        terms.sort_by(|a, b| a.occupations.cmp(&b.occupations));
        let mut merged: Vec<FockTerm> = Vec::with_capacity(terms.len());
        for term in terms {
            match merged.last_mut() {
                Some(last) if last.occupations == term.occupations => {
                    last.amplitude += term.amplitude;
                }
                _ => merged.push(term),
            }
        }
        merged.retain(|t| t.amplitude.norm_sqr() > 1e-30);
        if merged.is_empty() {
            return Err(TomoError::InvalidInput(
                "all terms cancelled during canonicalization".into(),
            ));
        }

        let norm_sqr: f64 = merged.iter().map(|t| t.amplitude.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(TomoError::InvalidInput(format!(
                "state norm squared is {norm_sqr:.15}, expected 1 within {NORM_TOL:.0e}"
            )));
        }

        Ok(Self {
            num_modes,
            terms: merged,
            cutoff,
        })
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn terms(&self) -> &[FockTerm] {
        &self.terms
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Evaluates the position-representation wavefunction at `q`.
    pub fn wavefunction_value(&self, q: &[f64]) -> Result<Complex64> {
        if q.len() != self.num_modes {
            return Err(TomoError::DimensionMismatch(format!(
                "state has {} modes but got {} coordinates",
                self.num_modes,
                q.len()
            )));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let product: f64 = term
                .occupations
                .iter()
                .zip(q)
                .map(|(&n, &qj)| fock_wavefunction(n, qj))
                .product();
            total += term.amplitude * product;
        }
        Ok(total)
    }

    /// Outer product `|psi><psi|` over the smallest product basis that
    /// holds every term.
    pub fn density_matrix(&self) -> DensityMatrix {
        let mut dims = vec![1usize; self.num_modes];
        for term in &self.terms {
            for (d, &n) in dims.iter_mut().zip(&term.occupations) {
                *d = (*d).max(n + 1);
            }
        }
        let dim: usize = dims.iter().product();
        let mut vector = DMatrix::<Complex64>::zeros(dim, 1);
        for term in &self.terms {
            vector[(flatten(&term.occupations, &dims), 0)] = term.amplitude;
        }
        let entries = &vector * vector.adjoint();
        DensityMatrix {
            mode_dims: dims,
            entries,
        }
    }

    /// Tensor product of two states, modes of `a` first.
    pub fn tensor(a: &Self, b: &Self) -> Result<Self> {
        let mut terms = Vec::with_capacity(a.terms.len() * b.terms.len());
        for ta in &a.terms {
            for tb in &b.terms {
                let mut occ = ta.occupations.clone();
                occ.extend_from_slice(&tb.occupations);
                terms.push(FockTerm::new(ta.amplitude * tb.amplitude, occ));
            }
        }
        Self::with_cutoff(
            a.num_modes + b.num_modes,
            terms,
            a.cutoff.max(b.cutoff),
        )
    }

    /// Parses the JSON schema
    /// `{"modes": N, "terms": [{"re": _, "im": _, "occ": [..]}, ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: StateJson = serde_json::from_str(text)?;
        let terms = raw
            .terms
            .into_iter()
            .map(|t| FockTerm::new(Complex64::new(t.re, t.im), t.occ))
            .collect();
        Self::new(raw.modes, terms)
    }

    /// Serializes back to the JSON schema accepted by [`Self::from_json`].
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.schema()).expect("state serialization cannot fail")
    }

    pub(crate) fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let raw: StateJson = serde_json::from_value(value)?;
        let terms = raw
            .terms
            .into_iter()
            .map(|t| FockTerm::new(Complex64::new(t.re, t.im), t.occ))
            .collect();
        Self::new(raw.modes, terms)
    }

    pub(crate) fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.schema()).expect("state serialization cannot fail")
    }

    fn schema(&self) -> StateJson {
        StateJson {
            modes: self.num_modes,
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    re: t.amplitude.re,
                    im: t.amplitude.im,
                    occ: t.occupations.clone(),
                })
                .collect(),
        }
    }
}

/// Row-major flattening of a multi-index; the last mode varies fastest.
fn flatten(occ: &[usize], dims: &[usize]) -> usize {
    occ.iter().zip(dims).fold(0, |acc, (&n, &d)| acc * d + n)
}

fn unflatten(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut occ = vec![0usize; dims.len()];
    for j in (0..dims.len()).rev() {
        occ[j] = index % dims[j];
        index /= dims[j];
    }
    occ
}

/// A density matrix over a truncated product Fock basis.
///
/// Validated on construction: Hermitian within 1e-12, unit trace within
/// 1e-10, and eigenvalues above -1e-10.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mode_dims: Vec<usize>,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(mode_dims: Vec<usize>, entries: DMatrix<Complex64>) -> Result<Self> {
        let dim: usize = mode_dims.iter().product();
        if mode_dims.is_empty() || mode_dims.iter().any(|&d| d == 0) {
            return Err(TomoError::InvalidInput(
                "mode dimensions must be positive".into(),
            ));
        }
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(TomoError::DimensionMismatch(format!(
                "matrix is {}x{} but mode dims {:?} give {}",
                entries.nrows(),
                entries.ncols(),
                mode_dims,
                dim
            )));
        }
        let hermiticity = (&entries - entries.adjoint()).norm() / (entries.norm().max(1.0));
        if hermiticity > HERMITICITY_TOL {
            return Err(TomoError::InvalidInput(format!(
                "matrix is not Hermitian (relative deviation {hermiticity:.3e})"
            )));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(TomoError::InvalidInput(format!(
                "trace is {trace}, expected 1 within {TRACE_TOL:.0e}"
            )));
        }
        let min_eig = hermitian_eigenvalues(&entries)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < EIGENVALUE_FLOOR {
            return Err(TomoError::InvalidInput(format!(
                "matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self {
            mode_dims,
            entries,
        })
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Purity `Tr rho^2`, real for Hermitian input.
    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    /// Traces out every mode not listed in `keep`.
    ///
    /// `keep` must be strictly increasing, nonempty, and a proper subset
    /// of the modes unless it lists all of them (which is a copy).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n_modes = self.mode_dims.len();
        if keep.is_empty() {
            return Err(TomoError::InvalidInput(
                "partial trace must keep at least one mode".into(),
            ));
        }
        if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&m| m >= n_modes) {
            return Err(TomoError::InvalidInput(format!(
                "keep list {keep:?} is not a strictly increasing subset of 0..{n_modes}"
            )));
        }

        let traced: Vec<usize> = (0..n_modes).filter(|m| !keep.contains(m)).collect();
        let kept_dims: Vec<usize> = keep.iter().map(|&m| self.mode_dims[m]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&m| self.mode_dims[m]).collect();
        let kept_dim: usize = kept_dims.iter().product();
        let traced_dim: usize = traced_dims.iter().product();

        let mut reduced = DMatrix::<Complex64>::zeros(kept_dim, kept_dim);
        let mut full_row = vec![0usize; n_modes];
        let mut full_col = vec![0usize; n_modes];
        for a in 0..kept_dim {
            let occ_a = unflatten(a, &kept_dims);
            for b in 0..kept_dim {
                let occ_b = unflatten(b, &kept_dims);
                let mut sum = Complex64::new(0.0, 0.0);
                for t in 0..traced_dim {
                    let occ_t = unflatten(t, &traced_dims);
                    for (slot, &m) in keep.iter().enumerate() {
                        full_row[m] = occ_a[slot];
                        full_col[m] = occ_b[slot];
                    }
                    for (slot, &m) in traced.iter().enumerate() {
                        full_row[m] = occ_t[slot];
                        full_col[m] = occ_t[slot];
                    }
                    sum += self.entries[(
                        flatten(&full_row, &self.mode_dims),
                        flatten(&full_col, &self.mode_dims),
                    )];
                }
                reduced[(a, b)] = sum;
            }
        }
        DensityMatrix::new(kept_dims, reduced)
    }
}

fn hermitian_eigenvalues(matrix: &DMatrix<Complex64>) -> Vec<f64> {
    // SymmetricEigen on a complex matrix treats it as Hermitian; the
    // spectrum comes back real.
    let symmetrized = (matrix + matrix.adjoint()).scale(0.5);
    nalgebra::SymmetricEigen::new(symmetrized)
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

/// Entanglement negativity `N = (||rho^{T_B}||_1 - 1) / 2` for the
/// bipartition that groups the modes in `transposed` on one side.
///
/// Zero for every separable state; positive values certify entanglement.
pub fn negativity(rho: &DensityMatrix, transposed: &[usize]) -> Result<f64> {
    let n_modes = rho.mode_dims().len();
    if transposed.is_empty() || transposed.len() >= n_modes {
        return Err(TomoError::InvalidInput(
            "bipartition must be a nonempty proper subset of the modes".into(),
        ));
    }
    if transposed.windows(2).any(|w| w[0] >= w[1]) || transposed.iter().any(|&m| m >= n_modes) {
        return Err(TomoError::InvalidInput(format!(
            "bipartition {transposed:?} is not a strictly increasing subset of 0..{n_modes}"
        )));
    }

    let dims = rho.mode_dims();
    let dim = rho.dim();
    let mut pt = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        let occ_i = unflatten(i, dims);
        for j in 0..dim {
            let occ_j = unflatten(j, dims);
            let mut row = occ_i.clone();
            let mut col = occ_j.clone();
            for &m in transposed {
                row[m] = occ_j[m];
                col[m] = occ_i[m];
            }
            pt[(flatten(&row, dims), flatten(&col, dims))] = rho.entries()[(i, j)];
        }
    }

    let abs_sum: f64 = hermitian_eigenvalues(&pt).iter().map(|l| l.abs()).sum();
    Ok(((abs_sum - 1.0) / 2.0).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ent_state() -> FockSuperposition {
        let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        FockSuperposition::new(
            2,
            vec![
                FockTerm::new(c, vec![0, 1]),
                FockTerm::new(c, vec![1, 0]),
            ],
        )
        .unwrap()
    }

    fn sep_state() -> FockSuperposition {
        FockSuperposition::new(2, vec![FockTerm::new(Complex64::ONE, vec![0, 1])]).unwrap()
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

    #[test]
    fn hermite_small_orders() {
        assert_eq!(hermite(0, 1.7), 1.0);
        assert_eq!(hermite(1, 0.5), 1.0);
        assert_eq!(hermite(2, 3.0), 34.0);
        assert_eq!(hermite(3, 2.0), 8.0 * 8.0 - 12.0 * 2.0);
    }

    #[test]
    fn fock_wavefunction_reference_values() {
        assert_abs_diff_eq!(
            fock_wavefunction(0, 0.0),
            0.75112554446494248,
            epsilon = 1e-15
        );
        assert_eq!(fock_wavefunction(1, 0.0), 0.0);
        assert_abs_diff_eq!(
            fock_wavefunction(1, 1.0),
            0.64428836511347518,
            epsilon = 1e-15
        );
    }

    #[test]
    fn fock_wavefunction_is_normalized() {
        let rule = crate::quadrature::gauss_hermite(40).unwrap();
        for n in [0usize, 1, 3, 8] {
            // Fold exp(-x^2) back out of the Hermite weight.
            let norm = rule.integrate(|x| {
                let psi = fock_wavefunction(n, x);
                psi * psi * (x * x).exp()
            });
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn wavefunction_values_of_catalog_states() {
        let ent = ent_state();
        assert_abs_diff_eq!(
            ent.wavefunction_value(&[1.0, 1.0]).unwrap().re,
            0.4151074974205947,
            epsilon = 1e-15
        );
        let sep = sep_state();
        for q1 in [-2.0, 0.0, 1.3] {
            assert_abs_diff_eq!(
                sep.wavefunction_value(&[q1, 0.0]).unwrap().norm(),
                0.0,
                epsilon = 1e-15
            );
        }
        let w = w_state();
        assert_abs_diff_eq!(
            w.wavefunction_value(&[0.0, 0.0, 0.0]).unwrap().norm(),
            0.0,
            epsilon = 1e-15
        );
        assert!(ent.wavefunction_value(&[1.0]).is_err());
    }

    #[test]
    fn density_matrix_of_basis_state_is_a_single_entry() {
        let rho = sep_state().density_matrix();
        assert_eq!(rho.mode_dims(), &[1, 2]);
        assert_eq!(rho.dim(), 2);
        assert_abs_diff_eq!(rho.entries()[(1, 1)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn density_matrix_of_ent_state_has_four_halves() {
        let rho = ent_state().density_matrix();
        assert_eq!(rho.dim(), 4);
        let nonzero: Vec<(usize, usize)> = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|&(i, j)| rho.entries()[(i, j)].norm() > 1e-14)
            .collect();
        assert_eq!(nonzero, vec![(1, 1), (1, 2), (2, 1), (2, 2)]);
        for (i, j) in nonzero {
            assert_abs_diff_eq!(rho.entries()[(i, j)].re, 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn partial_traces_of_catalog_states() {
        let ent_red = ent_state().density_matrix().partial_trace(&[0]).unwrap();
        assert_abs_diff_eq!(ent_red.entries()[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(ent_red.entries()[(1, 1)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(ent_red.entries()[(0, 1)].norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ent_red.purity(), 0.5, epsilon = 1e-13);

        let sep_red = sep_state().density_matrix().partial_trace(&[0]).unwrap();
        assert_abs_diff_eq!(sep_red.purity(), 1.0, epsilon = 1e-13);

        let w_red = w_state().density_matrix().partial_trace(&[2]).unwrap();
        assert_abs_diff_eq!(w_red.entries()[(0, 0)].re, 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w_red.entries()[(1, 1)].re, 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w_red.purity(), 5.0 / 9.0, epsilon = 1e-13);

        assert!(ent_state().density_matrix().partial_trace(&[]).is_err());
        assert!(ent_state().density_matrix().partial_trace(&[2]).is_err());
    }

    #[test]
    fn negativity_of_catalog_states() {
        let ent = ent_state().density_matrix();
        assert_abs_diff_eq!(negativity(&ent, &[1]).unwrap(), 0.5, epsilon = 1e-12);
        let sep = sep_state().density_matrix();
        assert_abs_diff_eq!(negativity(&sep, &[1]).unwrap(), 0.0, epsilon = 1e-12);
        let w = w_state().density_matrix();
        assert_abs_diff_eq!(
            negativity(&w, &[0]).unwrap(),
            0.47140452079103168,
            epsilon = 1e-12
        );
        assert!(negativity(&ent, &[]).is_err());
        assert!(negativity(&ent, &[0, 1]).is_err());
    }

    #[test]
    fn canonicalization_merges_and_sorts() {
        // |0> amplitude arrives split across two terms; the merged state
        // is normalized, so construction succeeds with sorted terms.
        let state = FockSuperposition::new(
            1,
            vec![
                FockTerm::new(Complex64::new(0.8, 0.0), vec![1]),
                FockTerm::new(Complex64::new(0.35, 0.0), vec![0]),
                FockTerm::new(Complex64::new(0.25, 0.0), vec![0]),
            ],
        )
        .unwrap();
        assert_eq!(state.terms().len(), 2);
        assert_eq!(state.terms()[0].occupations, vec![0]);
        assert_abs_diff_eq!(state.terms()[0].amplitude.re, 0.6, epsilon = 1e-15);

        // A merge that inflates the norm is an error, not a silent
        // renormalization.
        let bad = FockSuperposition::new(
            1,
            vec![
                FockTerm::new(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0), vec![1]),
                FockTerm::new(Complex64::new(0.5, 0.0), vec![0]),
                FockTerm::new(Complex64::new(0.5, 0.0), vec![0]),
            ],
        );
        assert!(bad.is_err());

        // Terms that cancel exactly drop out; the rest must still be
        // normalized.
        let cancelled = FockSuperposition::new(
            1,
            vec![
                FockTerm::new(Complex64::ONE, vec![0]),
                FockTerm::new(Complex64::new(0.7, 0.0), vec![1]),
                FockTerm::new(Complex64::new(-0.7, 0.0), vec![1]),
            ],
        )
        .unwrap();
        assert_eq!(cancelled.terms().len(), 1);
    }

    #[test]
    fn construction_rejects_invalid_states() {
        let c = Complex64::new(1.0, 0.0);
        assert!(FockSuperposition::new(0, vec![FockTerm::new(c, vec![])]).is_err());
        assert!(FockSuperposition::new(1, vec![]).is_err());
        assert!(FockSuperposition::new(2, vec![FockTerm::new(c, vec![0])]).is_err());
        assert!(FockSuperposition::new(1, vec![FockTerm::new(c, vec![9])]).is_err());
        assert!(
            FockSuperposition::new(1, vec![FockTerm::new(Complex64::new(0.9, 0.0), vec![0])])
                .is_err()
        );
        assert!(FockSuperposition::with_cutoff(1, vec![FockTerm::new(c, vec![9])], 9).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let w = w_state();
        let text = w.to_json();
        let back = FockSuperposition::from_json(&text).unwrap();
        assert_eq!(back, w);

        let err = FockSuperposition::from_json(r#"{"modes": 1, "terms": [], "extra": 1}"#);
        assert!(err.is_err());
        let err = FockSuperposition::from_json(
            r#"{"modes": 2, "terms": [{"re": 1.0, "im": 0.0, "occ": [0]}]}"#,
        );
        assert!(err.is_err());
        let err = FockSuperposition::from_json(
            r#"{"modes": 1, "terms": [{"re": 0.5, "im": 0.0, "occ": [0]}]}"#,
        );
        assert!(err.is_err());
    }

    #[test]
    fn tensor_product_concatenates_modes() {
        let ent = ent_state();
        let one = FockSuperposition::new(1, vec![FockTerm::new(Complex64::ONE, vec![1])]).unwrap();
        let joined = FockSuperposition::tensor(&ent, &one).unwrap();
        assert_eq!(joined.num_modes(), 3);
        assert_eq!(joined.terms().len(), 2);
        assert!(joined
            .terms()
            .iter()
            .all(|t| *t.occupations.last().unwrap() == 1));
    }
}
