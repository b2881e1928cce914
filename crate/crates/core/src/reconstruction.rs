//! Single-mode density-matrix reconstruction from tomogram data.
//!
//! The route is the characteristic-function inverse: for each frame
//! `(mu, nu)` the tomogram's Fourier coefficient
//! `chi(mu, nu) = integral w(X|mu,nu) e^{iX} dX` equals
//! `Tr(rho e^{i(mu q + nu p)})`, so projecting onto Fock operators gives
//!
//! ```text
//! rho_mn = (1/2pi) integral chi(mu, nu) <m| e^{-i(mu q + nu p)} |n> dmu dnu
//! ```
//!
//! The displacement matrix element has an associated-Laguerre closed
//! form, and both factors decay like `exp(-(mu^2+nu^2)/4)`, so a polar
//! quadrature with radius 8 captures the integral to machine-level
//! accuracy at desk scale.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, TomoError};
use crate::quadrature::{gauss_legendre, par_tabulate};

/// Radial extent of the (mu, nu) quadrature; both integrand factors
/// carry `exp(-r^2/4)`, so the tail beyond 8 is below 1e-14.
const RADIAL_LIMIT: f64 = 8.0;
const RADIAL_NODES: usize = 96;
const ANGULAR_NODES: usize = 64;

/// X-quadrature node count inside [`characteristic_function`].
const CHI_NODES: usize = 257;

/// Tail-mass threshold above which the tomogram is judged not to decay
/// inside the integration window.
const TAIL_TOL: f64 = 1e-10;

const TRACE_ABORT: f64 = 1e-2;

/// One evaluated Fourier coefficient of a tomogram.
///
/// `value` is `chi(mu, nu)`; it equals 1 at the origin and never
/// exceeds 1 in modulus for normalized input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicSample {
    pub mu: f64,
    pub nu: f64,
    pub value: Complex64,
}

/// Computes `chi(mu, nu) = integral w(X|mu,nu) e^{iX} dX` by
/// Gauss-Legendre quadrature over `|X| <= 8 sqrt(mu^2 + nu^2)`.
///
/// The callable is the tomogram `w(X, mu, nu)`. At the origin the
/// normalization fixes `chi = 1` with no quadrature. Reports
/// [`TomoError::NonConvergent`] when the tomogram has not decayed at the
/// window edge.
pub fn characteristic_function<F>(tomogram: &F, mu: f64, nu: f64) -> Result<Complex64>
where
    F: Fn(f64, f64, f64) -> Result<f64>,
{
    if mu == 0.0 && nu == 0.0 {
        return Ok(Complex64::ONE);
    }
    let sigma = mu * mu + nu * nu;
    let half = 8.0 * sigma.sqrt();
    let tail = (tomogram(-half, mu, nu)? + tomogram(half, mu, nu)?) * sigma.sqrt();
    if !tail.is_finite() || tail.abs() > TAIL_TOL {
        return Err(TomoError::NonConvergent(format!(
            "tomogram tail mass {tail:.3e} at |X| = {half:.3} exceeds {TAIL_TOL:.0e}"
        )));
    }
    let rule = gauss_legendre(CHI_NODES, -half, half)?;
    let mut total = Complex64::new(0.0, 0.0);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        total += Complex64::from_polar(w * tomogram(x, mu, nu)?, x);
    }
    Ok(total)
}

/// Matrix element `<m| e^{-i(mu q + nu p)} |n>` of the displacement
/// operator in the Fock basis, via the associated-Laguerre closed form
/// with `gamma = -i (mu + i nu) / sqrt(2)` and `s = (mu^2 + nu^2) / 2`.
pub fn displacement_matrix_element(m: usize, n: usize, mu: f64, nu: f64) -> Complex64 {
    let gamma = Complex64::new(0.0, -1.0) * Complex64::new(mu, nu) / std::f64::consts::SQRT_2;
    let s = 0.5 * (mu * mu + nu * nu);
    let (lo, hi, base) = if m >= n { (n, m, gamma) } else { (m, n, -gamma.conj()) };
    let k = hi - lo;
    // sqrt(lo! / hi!) without forming factorials.
    let mut ratio = 1.0;
    for j in (lo + 1)..=hi {
        ratio /= j as f64;
    }
    let laguerre = associated_laguerre(lo, k, s);
    ratio.sqrt() * base.powu(k as u32) * (-0.5 * s).exp() * laguerre
}

/// Associated Laguerre polynomial `L_n^{(k)}(x)` by the stable upward
/// recurrence.
fn associated_laguerre(n: usize, k: usize, x: f64) -> f64 {
    let kf = k as f64;
    let mut prev = 0.0;
    let mut cur = 1.0;
    for i in 0..n {
        let i_f = i as f64;
        let next = ((2.0 * i_f + 1.0 + kf - x) * cur - (i_f + kf) * prev) / (i_f + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Raw output of the inverse map, kept unsymmetrized so the numerical
/// quality of the reconstruction stays inspectable.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    raw: DMatrix<Complex64>,
}

impl Reconstruction {
    pub fn raw(&self) -> &DMatrix<Complex64> {
        &self.raw
    }

    pub fn dim(&self) -> usize {
        self.raw.nrows()
    }

    /// Largest deviation `|rho_mn - conj(rho_nm)|` of the raw matrix.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.raw.nrows() {
            for j in 0..self.raw.ncols() {
                worst = worst.max((self.raw[(i, j)] - self.raw[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace_error(&self) -> f64 {
        (self.raw.trace() - Complex64::ONE).norm()
    }

    /// The symmetrized matrix `(R + R^dagger) / 2`.
    pub fn hermitized(&self) -> DMatrix<Complex64> {
        (&self.raw + self.raw.adjoint()).scale(0.5)
    }

    /// Projects onto the physical cone: eigenvalues of the hermitized
    /// matrix are clipped at zero and the trace renormalized to 1.
    pub fn psd_matrix(&self) -> Result<DMatrix<Complex64>> {
        let eig = nalgebra::SymmetricEigen::new(self.hermitized());
        let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(TomoError::NonConvergent(
                "reconstruction has no positive spectral weight".into(),
            ));
        }
        let dim = self.raw.nrows();
        let diag = DMatrix::<Complex64>::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(clipped[i] / total, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(&eig.eigenvectors * diag * eig.eigenvectors.adjoint())
    }
}

/// Reconstructs a single-mode density matrix of dimension `cutoff` from
/// a tomogram callable `w(X, mu, nu)`.
///
/// The `(mu, nu)` plane is integrated in polar coordinates: 96 radial
/// Gauss-Legendre nodes on `[0, 8]` times 64 uniform angles. The
/// summation order is fixed, so results do not depend on the worker
/// thread count. Errors if the raw trace deviates from 1 by more than
/// 1e-2, which signals a cutoff too low for the state.
pub fn reconstruct_single_mode<F>(tomogram: &F, cutoff: usize) -> Result<Reconstruction>
where
    F: Fn(f64, f64, f64) -> Result<f64> + Sync,
{
    if cutoff == 0 {
        return Err(TomoError::InvalidInput(
            "reconstruction dimension must be positive".into(),
        ));
    }
    let radial = gauss_legendre(RADIAL_NODES, 0.0, RADIAL_LIMIT)?;
    let angular_weight = 2.0 * std::f64::consts::PI / ANGULAR_NODES as f64;

    // One radial shell per task; the final reduction is a serial sum in
    // index order.
    let shells = par_tabulate(RADIAL_NODES, |ri| -> Result<DMatrix<Complex64>> {
        let r = radial.nodes[ri];
        let wr = radial.weights[ri] * r * angular_weight;
        let mut shell = DMatrix::<Complex64>::zeros(cutoff, cutoff);
        for ai in 0..ANGULAR_NODES {
            let phi = 2.0 * std::f64::consts::PI * ai as f64 / ANGULAR_NODES as f64;
            let (mu, nu) = (r * phi.cos(), r * phi.sin());
            let chi = characteristic_function(tomogram, mu, nu)?;
            let scaled = chi * wr;
            for m in 0..cutoff {
                for n in 0..cutoff {
                    shell[(m, n)] += scaled * displacement_matrix_element(m, n, mu, nu);
                }
            }
        }
        Ok(shell)
    });

    let mut raw = DMatrix::<Complex64>::zeros(cutoff, cutoff);
    for shell in shells {
        raw += shell?;
    }
    raw /= Complex64::new(2.0 * std::f64::consts::PI, 0.0);

    let recon = Reconstruction { raw };
    let trace_err = recon.trace_error();
    if trace_err > TRACE_ABORT {
        return Err(TomoError::NonConvergent(format!(
            "reconstructed trace deviates by {trace_err:.3e}; raise the cutoff"
        )));
    }
    Ok(recon)
}

/// One row of the sampled-tomogram CSV format.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRow {
    pub mu: f64,
    pub nu: f64,
    pub x: f64,
    pub w: f64,
}

/// Parses the CSV sample format: header exactly `mu,nu,X,w`, one sample
/// per line, comma-separated floats.
pub fn parse_samples_csv(text: &str) -> Result<Vec<SampleRow>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| TomoError::InvalidInput("empty sample file".into()))?;
    if header.trim_end() != "mu,nu,X,w" {
        return Err(TomoError::InvalidInput(format!(
            "expected header 'mu,nu,X,w', got '{header}'"
        )));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(TomoError::InvalidInput(format!(
                "line {}: expected 4 fields, got {}",
                idx + 2,
                fields.len()
            )));
        }
        let parse = |s: &str, name: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| {
                TomoError::InvalidInput(format!("line {}: bad {name} value '{s}'", idx + 2))
            })
        };
        let row = SampleRow {
            mu: parse(fields[0], "mu")?,
            nu: parse(fields[1], "nu")?,
            x: parse(fields[2], "X")?,
            w: parse(fields[3], "w")?,
        };
        if !(row.mu.is_finite() && row.nu.is_finite() && row.x.is_finite() && row.w.is_finite()) {
            return Err(TomoError::InvalidInput(format!(
                "line {}: non-finite sample",
                idx + 2
            )));
        }
        if row.mu == 0.0 && row.nu == 0.0 {
            return Err(TomoError::InvalidInput(format!(
                "line {}: the frame (0, 0) carries no information and is rejected",
                idx + 2
            )));
        }
        if row.w < -1e-12 {
            return Err(TomoError::InvalidInput(format!(
                "line {}: negative tomogram value {}",
                idx + 2,
                row.w
            )));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(TomoError::InvalidInput("no samples in file".into()));
    }
    Ok(rows)
}

/// Integrates each frame's X-samples into a characteristic-function
/// value by the trapezoid rule.
pub fn characteristic_samples(rows: &[SampleRow]) -> Result<Vec<CharacteristicSample>> {
    // Group rows by exact (mu, nu) pair, preserving first appearance.
    let mut keys: Vec<(u64, u64)> = Vec::new();
    let mut groups: Vec<Vec<(f64, f64)>> = Vec::new();
    for row in rows {
        let key = (row.mu.to_bits(), row.nu.to_bits());
        match keys.iter().position(|&k| k == key) {
            Some(g) => groups[g].push((row.x, row.w)),
            None => {
                keys.push(key);
                groups.push(vec![(row.x, row.w)]);
            }
        }
    }
    let mut samples = Vec::with_capacity(groups.len());
    for (key, mut group) in keys.into_iter().zip(groups) {
        let (mu, nu) = (f64::from_bits(key.0), f64::from_bits(key.1));
        if group.len() < 2 {
            return Err(TomoError::InvalidInput(format!(
                "frame ({mu}, {nu}) has fewer than 2 X-samples"
            )));
        }
        group.sort_by(|a, b| a.0.total_cmp(&b.0));
        if group.windows(2).any(|p| p[0].0 == p[1].0) {
            return Err(TomoError::InvalidInput(format!(
                "frame ({mu}, {nu}) has duplicate X-samples"
            )));
        }
        let mut value = Complex64::new(0.0, 0.0);
        for pair in group.windows(2) {
            let (x0, w0) = pair[0];
            let (x1, w1) = pair[1];
            let f0 = Complex64::from_polar(w0.max(0.0), x0);
            let f1 = Complex64::from_polar(w1.max(0.0), x1);
            value += (f0 + f1) * 0.5 * (x1 - x0);
        }
        if value.norm() > 1.0 + 1e-3 {
            return Err(TomoError::InvalidInput(format!(
                "characteristic value {:.6} at ({mu}, {nu}) exceeds 1; samples are not a normalized tomogram",
                value.norm()
            )));
        }
        samples.push(CharacteristicSample { mu, nu, value });
    }
    Ok(samples)
}

/// Reconstructs from characteristic samples given on a full cartesian
/// `(mu, nu)` grid, using trapezoid weights along each axis.
pub fn reconstruct_from_characteristic(
    samples: &[CharacteristicSample],
    cutoff: usize,
) -> Result<Reconstruction> {
    if cutoff == 0 {
        return Err(TomoError::InvalidInput(
            "reconstruction dimension must be positive".into(),
        ));
    }
    let mut mus: Vec<f64> = samples.iter().map(|s| s.mu).collect();
    let mut nus: Vec<f64> = samples.iter().map(|s| s.nu).collect();
    mus.sort_by(f64::total_cmp);
    mus.dedup();
    nus.sort_by(f64::total_cmp);
    nus.dedup();
    if mus.len() < 2 || nus.len() < 2 {
        return Err(TomoError::InvalidInput(
            "reconstruction needs at least a 2x2 grid of frames".into(),
        ));
    }
    if samples.len() != mus.len() * nus.len() {
        return Err(TomoError::InvalidInput(format!(
            "{} frames do not form the {}x{} product grid of their coordinates",
            samples.len(),
            mus.len(),
            nus.len()
        )));
    }
    let mut chi = vec![None::<Complex64>; mus.len() * nus.len()];
    for s in samples {
        let i = mus.binary_search_by(|v| v.total_cmp(&s.mu)).unwrap();
        let j = nus.binary_search_by(|v| v.total_cmp(&s.nu)).unwrap();
        if chi[i * nus.len() + j].replace(s.value).is_some() {
            return Err(TomoError::InvalidInput(format!(
                "duplicate frame ({}, {})",
                s.mu, s.nu
            )));
        }
    }

    let trapezoid_weights = |axis: &[f64]| -> Vec<f64> {
        let n = axis.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { axis[i] - axis[i - 1] } else { 0.0 };
                let right = if i + 1 < n { axis[i + 1] - axis[i] } else { 0.0 };
                0.5 * (left + right)
            })
            .collect()
    };
    let wm = trapezoid_weights(&mus);
    let wn = trapezoid_weights(&nus);

    let shells = par_tabulate(mus.len(), |i| {
        let mut shell = DMatrix::<Complex64>::zeros(cutoff, cutoff);
        for (j, &nu) in nus.iter().enumerate() {
            let value = chi[i * nus.len() + j].expect("grid filled above");
            let scaled = value * (wm[i] * wn[j]);
            for m in 0..cutoff {
                for n in 0..cutoff {
                    shell[(m, n)] += scaled * displacement_matrix_element(m, n, mus[i], nu);
                }
            }
        }
        shell
    });
    let mut raw = DMatrix::<Complex64>::zeros(cutoff, cutoff);
    for shell in shells {
        raw += shell;
    }
    raw /= Complex64::new(2.0 * std::f64::consts::PI, 0.0);

    let recon = Reconstruction { raw };
    if recon.trace_error() > TRACE_ABORT {
        return Err(TomoError::NonConvergent(format!(
            "reconstructed trace deviates by {:.3e}; widen the frame grid or raise the cutoff",
            recon.trace_error()
        )));
    }
    Ok(recon)
}

/// Convenience wrapper: parse CSV rows and reconstruct.
pub fn reconstruct_from_samples(rows: &[SampleRow], cutoff: usize) -> Result<Reconstruction> {
    let samples = characteristic_samples(rows)?;
    reconstruct_from_characteristic(&samples, cutoff)
}

/// Uhlmann fidelity `F(a, b) = (Tr sqrt(sqrt(a) b sqrt(a)))^2` of two
/// density matrices given by their entries.
pub fn fidelity(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Result<f64> {
    if a.nrows() != a.ncols() || a.shape() != b.shape() {
        return Err(TomoError::DimensionMismatch(format!(
            "fidelity needs equal square matrices, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let sqrt_a = hermitian_sqrt(a);
    let middle = &sqrt_a * b * &sqrt_a;
    let symmetrized = (&middle + middle.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(symmetrized);
    let root_sum: f64 = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok(root_sum * root_sum)
}

fn hermitian_sqrt(matrix: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let symmetrized = (matrix + matrix.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(symmetrized);
    let dim = matrix.nrows();
    let diag = DMatrix::<Complex64>::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(eig.eigenvalues[i].max(0.0).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    &eig.eigenvectors * diag * eig.eigenvectors.adjoint()
}
