//! Gaussian quadrature rules and a small adaptive integrator.
//!
//! Everything here works on plain `f64` and stays allocation-light: rules
//! are built once with Newton iteration on the orthogonal-polynomial
//! recurrences and then reused. The adaptive integrator drives a
//! fixed-order Gauss panel with an embedded lower-order estimate, which is
//! enough for the smooth, rapidly decaying integrands this crate meets.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, TomoError};

/// Integration domain a rule was constructed for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Finite interval `[a, b]`.
    Interval(f64, f64),
    /// The whole real line with weight `exp(-x^2)` folded into the
    /// weights, i.e. nodes and weights for integrals of the form
    /// `integral f(x) exp(-x^2) dx`.
    HermiteWeight,
}

/// A fixed quadrature rule: paired nodes and weights.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: Domain,
}

impl QuadratureRule {
    /// Applies the rule to `f`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Applies the rule to a complex-valued integrand.
    pub fn integrate_complex<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }
}

const NEWTON_EPS: f64 = 1e-15;
const NEWTON_MAX_ITERS: usize = 100;

/// Gauss-Legendre rule with `n` points on `[a, b]`.
///
/// Nodes are the roots of the Legendre polynomial `P_n`, found by Newton
/// iteration from the Chebyshev angle guesses; weights follow from the
/// derivative at the root. Exact for polynomials of degree `2n - 1`.
///
/// The reference rule on `[-1, 1]` is computed once per order and cached;
/// every call only pays for the affine map onto `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(TomoError::InvalidInput(format!(
            "invalid interval [{a}, {b}] for Gauss-Legendre rule"
        )));
    }
    let unit = unit_legendre(n)?;

    let xm = 0.5 * (b + a);
    let xl = 0.5 * (b - a);
    Ok(QuadratureRule {
        nodes: unit.0.iter().map(|&z| xm + xl * z).collect(),
        weights: unit.1.iter().map(|&w| xl * w).collect(),
        domain: Domain::Interval(a, b),
    })
}

/// Cached Gauss-Legendre nodes and weights on `[-1, 1]`.
fn unit_legendre(n: usize) -> Result<Arc<(Vec<f64>, Vec<f64>)>> {
    if n == 0 {
        return Err(TomoError::InvalidInput(
            "quadrature order must be positive".into(),
        ));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().expect("quadrature cache poisoned").get(&n) {
        return Ok(hit.clone());
    }

    let m = n.div_ceil(2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITERS {
            // Evaluate P_n(z) by the three-term recurrence.
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 + 1.0) * z * p2 - j as f64 * p3) / (j as f64 + 1.0);
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z_old = z;
            z -= p1 / pp;
            if (z - z_old).abs() <= NEWTON_EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(TomoError::NonConvergent(format!(
                "Legendre root {i} of order {n} did not converge"
            )));
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }

    let entry = Arc::new((nodes, weights));
    cache
        .lock()
        .expect("quadrature cache poisoned")
        .insert(n, entry.clone());
    Ok(entry)
}

/// Gauss-Hermite rule with `n` points for integrals weighted by
/// `exp(-x^2)` over the real line.
///
/// The recurrence is run in its orthonormal form so the weight
/// computation stays well-conditioned at high order.
pub fn gauss_hermite(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(TomoError::InvalidInput(
            "quadrature order must be positive".into(),
        ));
    }

    // Orthonormal Hermite functions w.r.t. exp(-x^2) dx:
    //   h_0 = pi^(-1/4),
    //   h_{k+1} = x sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1},
    //   h_n' = sqrt(2 n) h_{n-1}.
    let eval = |z: f64| -> (f64, f64) {
        let mut hkm1 = 0.0;
        let mut hk = std::f64::consts::PI.powf(-0.25);
        for k in 0..n {
            let kf = k as f64;
            let next = z * (2.0 / (kf + 1.0)).sqrt() * hk - (kf / (kf + 1.0)).sqrt() * hkm1;
            hkm1 = hk;
            hk = next;
        }
        ((2.0 * n as f64).sqrt() * hkm1, hk)
    };

    let m = n.div_ceil(2);
    let mut roots = vec![0.0; m];
    for i in 0..m {
        // Initial guesses: asymptotic largest root, then empirical steps
        // inward, then linear extrapolation from previous roots.
        let mut z = match i {
            0 => {
                let nf = 2.0 * n as f64 + 1.0;
                nf.sqrt() - 1.85575 * nf.powf(-1.0 / 6.0)
            }
            1 => roots[0] - 1.14 * (n as f64).powf(0.426) / roots[0],
            2 => 1.86 * roots[1] - 0.86 * roots[0],
            3 => 1.91 * roots[2] - 0.91 * roots[1],
            _ => 2.0 * roots[i - 1] - roots[i - 2],
        };
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITERS {
            let (dh, h) = eval(z);
            let z_old = z;
            z -= h / dh;
            // Relative step criterion: large-order roots sit beyond 10,
            // where an absolute 1e-15 is below one ulp.
            if (z - z_old).abs() <= NEWTON_EPS * (1.0 + z.abs()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(TomoError::NonConvergent(format!(
                "Hermite root {i} of order {n} did not converge"
            )));
        }
        roots[i] = z;
    }

    // Christoffel weights: w_i = 1 / sum_{k<n} h_k(x_i)^2.
    let weight_at = |z: f64| -> f64 {
        let mut sum = 0.0;
        let mut hkm1 = 0.0;
        let mut hk = std::f64::consts::PI.powf(-0.25);
        for k in 0..n {
            sum += hk * hk;
            let kf = k as f64;
            let next = z * (2.0 / (kf + 1.0)).sqrt() * hk - (kf / (kf + 1.0)).sqrt() * hkm1;
            hkm1 = hk;
            hk = next;
        }
        1.0 / sum
    };

    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..m {
        // roots[] holds the positive half in descending magnitude order;
        // mirror them onto the negative axis.
        let z = roots[i];
        let w = weight_at(z);
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }

    Ok(QuadratureRule {
        nodes,
        weights,
        domain: Domain::HermiteWeight,
    })
}

fn panel_rules() -> &'static (QuadratureRule, QuadratureRule) {
    static RULES: OnceLock<(QuadratureRule, QuadratureRule)> = OnceLock::new();
    RULES.get_or_init(|| {
        let fine = gauss_legendre(15, -1.0, 1.0).expect("fixed-order rule");
        let coarse = gauss_legendre(7, -1.0, 1.0).expect("fixed-order rule");
        (fine, coarse)
    })
}

fn panel_estimates<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (fine, coarse) = panel_rules();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fine_val: f64 = fine
        .nodes
        .iter()
        .zip(&fine.weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half;
    let coarse_val: f64 = coarse
        .nodes
        .iter()
        .zip(&coarse.weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half;
    (fine_val, (fine_val - coarse_val).abs())
}

const MAX_BISECTION_DEPTH: usize = 30;

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> Result<(f64, f64)> {
    let (value, err) = panel_estimates(f, a, b);
    let floor = 40.0 * f64::EPSILON * value.abs();
    if err.is_finite() && value.is_finite() && err <= tol.max(floor) {
        return Ok((value, err));
    }
    if depth >= MAX_BISECTION_DEPTH {
        return Err(TomoError::NonConvergent(format!(
            "adaptive quadrature stalled on [{a}, {b}] with error estimate {err:.3e}"
        )));
    }
    let mid = 0.5 * (a + b);
    let (left, el) = adapt(f, a, mid, 0.5 * tol, depth + 1)?;
    let (right, er) = adapt(f, mid, b, 0.5 * tol, depth + 1)?;
    Ok((left + right, el + er))
}

/// Adaptively integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Returns the value together with an error estimate. Panels whose
/// embedded error estimate exceeds the local tolerance are bisected, down
/// to a fixed maximum depth; running out of depth reports
/// [`TomoError::NonConvergent`] rather than a silently inaccurate value.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(TomoError::InvalidInput(format!(
            "invalid interval [{a}, {b}] for adaptive quadrature"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(TomoError::InvalidInput(
            "adaptive quadrature tolerance must be positive".into(),
        ));
    }
    adapt(&f, a, b, tol, 0)
}

/// Complex-valued counterpart of [`integrate_adaptive`]; real and
/// imaginary parts are integrated independently to the same tolerance.
pub fn integrate_adaptive_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(Complex64, f64)> {
    let (re, ere) = integrate_adaptive(|x| f(x).re, a, b, tol)?;
    let (im, eim) = integrate_adaptive(|x| f(x).im, a, b, tol)?;
    Ok((Complex64::new(re, im), ere + eim))
}

/// Evaluates `f` at `0..n` in parallel, preserving index order.
///
/// The reduction into the output vector is a serial collect of the
/// per-index values, so results are bitwise independent of the worker
/// thread count.
pub fn par_tabulate<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}
