//! Tomograms of separable states built from convex decompositions.
//!
//! A separable bipartite state is a convex mixture of product states.
//! Its symplectic tomogram is the matching convex sum of products, and
//! its center-of-mass tomogram is the convex sum of convolutions of the
//! subsystem tomograms. Computing both from a decomposition and
//! comparing against the direct engine exercises the composition laws.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TomoError};
use crate::frames::TomographyFrame;
use crate::quadrature::gauss_legendre;
use crate::states::{negativity, FockSuperposition};
use crate::tomography::{symplectic_tomogram, CmEvaluator};

const WEIGHT_TOL: f64 = 1e-12;

/// A convex decomposition `sum_k p_k rho_1k (x) rho_2k` with pure
/// subsystem states.
#[derive(Debug, Clone)]
pub struct SeparableDecomposition {
    weights: Vec<f64>,
    parts: Vec<(FockSuperposition, FockSuperposition)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecompJson {
    weights: Vec<f64>,
    parts: Vec<(serde_json::Value, serde_json::Value)>,
}

impl SeparableDecomposition {
    pub fn new(
        weights: Vec<f64>,
        parts: Vec<(FockSuperposition, FockSuperposition)>,
    ) -> Result<Self> {
        if weights.is_empty() || weights.len() != parts.len() {
            return Err(TomoError::DimensionMismatch(format!(
                "{} weights for {} parts",
                weights.len(),
                parts.len()
            )));
        }
        if weights.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(TomoError::InvalidInput(
                "weights must be non-negative and finite".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(TomoError::InvalidInput(format!(
                "weights sum to {total:.15}, expected 1 within {WEIGHT_TOL:.0e}"
            )));
        }
        let (n1, n2) = (parts[0].0.num_modes(), parts[0].1.num_modes());
        for (s1, s2) in &parts {
            if s1.num_modes() != n1 || s2.num_modes() != n2 {
                return Err(TomoError::DimensionMismatch(
                    "all parts must share the same subsystem mode counts".into(),
                ));
            }
        }
        Ok(Self { weights, parts })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn parts(&self) -> &[(FockSuperposition, FockSuperposition)] {
        &self.parts
    }

    /// Mode counts `(N1, N2)` of the two subsystems.
    pub fn subsystem_modes(&self) -> (usize, usize) {
        (self.parts[0].0.num_modes(), self.parts[0].1.num_modes())
    }

    /// Parses `{"weights": [...], "parts": [[state1, state2], ...]}`
    /// where each state uses the state JSON schema.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DecompJson = serde_json::from_str(text)?;
        let parts = raw
            .parts
            .into_iter()
            .map(|(v1, v2)| {
                Ok((
                    FockSuperposition::from_json_value(v1)?,
                    FockSuperposition::from_json_value(v2)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(raw.weights, parts)
    }

    pub fn to_json(&self) -> String {
        let raw = DecompJson {
            weights: self.weights.clone(),
            parts: self
                .parts
                .iter()
                .map(|(s1, s2)| (s1.to_json_value(), s2.to_json_value()))
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("decomposition serialization cannot fail")
    }
}

fn split_frame(
    frame: &TomographyFrame,
    n1: usize,
    n2: usize,
) -> Result<(TomographyFrame, TomographyFrame)> {
    if frame.num_modes() != n1 + n2 {
        return Err(TomoError::DimensionMismatch(format!(
            "frame has {} modes but the decomposition needs {}",
            frame.num_modes(),
            n1 + n2
        )));
    }
    if let Some(j) = (0..frame.num_modes()).find(|&j| !frame.is_active(j)) {
        return Err(TomoError::DegenerateFrame(format!(
            "separable tomograms need every mode active, mode {j} is zero"
        )));
    }
    let f1 = TomographyFrame::new(frame.mu()[..n1].to_vec(), frame.nu()[..n1].to_vec())?;
    let f2 = TomographyFrame::new(frame.mu()[n1..].to_vec(), frame.nu()[n1..].to_vec())?;
    Ok((f1, f2))
}

/// Symplectic tomogram of the separable state:
/// `w(X|frame) = sum_k p_k w_1k(X_1|frame_1) w_2k(X_2|frame_2)`.
pub fn separable_symplectic(
    decomp: &SeparableDecomposition,
    x: &[f64],
    frame: &TomographyFrame,
) -> Result<f64> {
    let (n1, n2) = decomp.subsystem_modes();
    let (f1, f2) = split_frame(frame, n1, n2)?;
    if x.len() != n1 + n2 {
        return Err(TomoError::DimensionMismatch(format!(
            "expected {} quadrature values, got {}",
            n1 + n2,
            x.len()
        )));
    }
    let mut total = 0.0;
    for (p, (s1, s2)) in decomp.weights().iter().zip(decomp.parts()) {
        total += p
            * symplectic_tomogram(s1, &x[..n1], &f1)?
            * symplectic_tomogram(s2, &x[n1..], &f2)?;
    }
    Ok(total)
}

/// Center-of-mass tomogram of the separable state: the convex sum of
/// convolutions
/// `w(X|frame) = sum_k p_k integral w_1k(Y|frame_1) w_2k(X - Y|frame_2) dY`.
pub fn separable_cm(
    decomp: &SeparableDecomposition,
    x: f64,
    frame: &TomographyFrame,
) -> Result<f64> {
    let (n1, n2) = decomp.subsystem_modes();
    let (f1, f2) = split_frame(frame, n1, n2)?;
    let half = 8.0 * (f1.sigma_total() / 2.0).sqrt();
    let rule = gauss_legendre(257, -half, half)?;
    let mut total = 0.0;
    for (p, (s1, s2)) in decomp.weights().iter().zip(decomp.parts()) {
        let e1 = CmEvaluator::new(s1, &f1)?;
        let e2 = CmEvaluator::new(s2, &f2)?;
        let conv: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&y, &w)| w * e1.eval(y) * e2.eval(x - y))
            .sum();
        total += p * conv;
    }
    Ok(total)
}

/// Entanglement certificate for a two-mode pure state: the negativity
/// of its exact density matrix across the mode bipartition.
///
/// The frame set is validated for shape but does not affect the value;
/// the certificate is frame-independent, which is exactly what makes it
/// a witness for tomograms measured in any frame of the set.
pub fn entanglement_witness_gap(
    state: &FockSuperposition,
    frames: &[TomographyFrame],
) -> Result<f64> {
    if state.num_modes() != 2 {
        return Err(TomoError::DimensionMismatch(format!(
            "witness gap needs a two-mode state, got {} modes",
            state.num_modes()
        )));
    }
    for frame in frames {
        if frame.num_modes() != 2 {
            return Err(TomoError::DimensionMismatch(
                "witness frames must be two-mode".into(),
            ));
        }
    }
    let rho = state.density_matrix();
    if rho.mode_dims().len() != 2 {
        return Err(TomoError::DimensionMismatch(
            "density matrix did not preserve the mode split".into(),
        ));
    }
    negativity(&rho, &[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{make_state, CatalogState};
    use crate::states::FockTerm;
    use crate::tomography::cm_tomogram;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn fock1(n: usize) -> FockSuperposition {
        FockSuperposition::new(1, vec![FockTerm::new(Complex64::ONE, vec![n])]).unwrap()
    }

    fn standard() -> TomographyFrame {
        TomographyFrame::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn single_term_symplectic_matches_product_state() {
        let decomp = SeparableDecomposition::new(vec![1.0], vec![(fock1(0), fock1(1))]).unwrap();
        let sep = make_state(CatalogState::Sep);
        let frame = TomographyFrame::new(vec![0.7, -1.2], vec![0.4, 0.9]).unwrap();
        for (x1, x2) in [(0.0, 0.0), (1.1, -0.4), (-2.0, 0.8)] {
            let via_decomp = separable_symplectic(&decomp, &[x1, x2], &frame).unwrap();
            let direct = symplectic_tomogram(&sep, &[x1, x2], &frame).unwrap();
            assert_abs_diff_eq!(via_decomp, direct, epsilon = 1e-15);
        }
    }

    #[test]
    fn balanced_mixture_vanishes_at_origin() {
        let decomp = SeparableDecomposition::new(
            vec![0.5, 0.5],
            vec![(fock1(0), fock1(1)), (fock1(1), fock1(0))],
        )
        .unwrap();
        let w = separable_symplectic(&decomp, &[0.0, 0.0], &standard()).unwrap();
        assert_abs_diff_eq!(w, 0.0, epsilon = 1e-300);
    }

    #[test]
    fn mixture_symplectic_is_normalized() {
        let decomp = SeparableDecomposition::new(
            vec![0.3, 0.7],
            vec![(fock1(0), fock1(1)), (fock1(1), fock1(0))],
        )
        .unwrap();
        let frame = standard();
        let rule = gauss_legendre(97, -8.0, 8.0).unwrap();
        let mut total = 0.0;
        for (&y1, &w1) in rule.nodes.iter().zip(&rule.weights) {
            for (&y2, &w2) in rule.nodes.iter().zip(&rule.weights) {
                total += w1 * w2 * separable_symplectic(&decomp, &[y1, y2], &frame).unwrap();
            }
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn single_term_cm_matches_reference_values() {
        let frame = standard();
        let ground = SeparableDecomposition::new(vec![1.0], vec![(fock1(0), fock1(0))]).unwrap();
        assert_abs_diff_eq!(
            separable_cm(&ground, 0.0, &frame).unwrap(),
            0.39894228040143268,
            epsilon = 1e-9
        );
        let sep = SeparableDecomposition::new(vec![1.0], vec![(fock1(0), fock1(1))]).unwrap();
        assert_abs_diff_eq!(
            separable_cm(&sep, 0.0, &frame).unwrap(),
            0.19947114020071634,
            epsilon = 1e-9
        );
    }

    #[test]
    fn single_term_cm_matches_direct_engine() {
        let frame = TomographyFrame::new(vec![0.7, -1.2], vec![0.4, 0.9]).unwrap();
        let decomp = SeparableDecomposition::new(vec![1.0], vec![(fock1(0), fock1(1))]).unwrap();
        let product = make_state(CatalogState::Sep);
        for x in [-3.0, -0.7, 0.0, 1.4, 4.2] {
            let via_decomp = separable_cm(&decomp, x, &frame).unwrap();
            let direct = cm_tomogram(&product, x, &frame).unwrap();
            assert_abs_diff_eq!(via_decomp, direct, epsilon = 1e-8);
        }
    }

    #[test]
    fn mixture_cm_is_convex_in_its_parts() {
        let frame = TomographyFrame::new(vec![1.0, 0.5], vec![-0.3, 0.8]).unwrap();
        let part_a = SeparableDecomposition::new(vec![1.0], vec![(fock1(0), fock1(1))]).unwrap();
        let part_b = SeparableDecomposition::new(vec![1.0], vec![(fock1(1), fock1(0))]).unwrap();
        let mixed = SeparableDecomposition::new(
            vec![0.3, 0.7],
            vec![(fock1(0), fock1(1)), (fock1(1), fock1(0))],
        )
        .unwrap();
        for x in [-1.0, 0.2, 2.5] {
            let lhs = separable_cm(&mixed, x, &frame).unwrap();
            let rhs = 0.3 * separable_cm(&part_a, x, &frame).unwrap()
                + 0.7 * separable_cm(&part_b, x, &frame).unwrap();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-14);
        }
    }

    #[test]
    fn mixture_cm_is_symmetric_under_subsystem_swap() {
        let mixed = SeparableDecomposition::new(
            vec![0.4, 0.6],
            vec![(fock1(0), fock1(1)), (fock1(1), fock1(0))],
        )
        .unwrap();
        let swapped = SeparableDecomposition::new(
            vec![0.4, 0.6],
            vec![(fock1(1), fock1(0)), (fock1(0), fock1(1))],
        )
        .unwrap();
        let frame = TomographyFrame::new(vec![0.9, -0.6], vec![0.2, 1.1]).unwrap();
        let frame_swapped = TomographyFrame::new(vec![-0.6, 0.9], vec![1.1, 0.2]).unwrap();
        for x in [-1.3, 0.0, 2.1] {
            let a = separable_cm(&mixed, x, &frame).unwrap();
            let b = separable_cm(&swapped, x, &frame_swapped).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn witness_gap_certifies_catalog_states() {
        let frames = vec![standard()];
        assert_abs_diff_eq!(
            entanglement_witness_gap(&make_state(CatalogState::Ent), &frames).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            entanglement_witness_gap(&make_state(CatalogState::Sep), &frames).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            entanglement_witness_gap(&make_state(CatalogState::Ground), &frames).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert!(entanglement_witness_gap(&make_state(CatalogState::W), &frames).is_err());
    }

    #[test]
    fn decomposition_validation_and_json() {
        assert!(SeparableDecomposition::new(vec![], vec![]).is_err());
        assert!(
            SeparableDecomposition::new(vec![0.5, 0.6], vec![(fock1(0), fock1(1)); 2]).is_err()
        );
        assert!(SeparableDecomposition::new(vec![-0.1, 1.1], vec![(fock1(0), fock1(1)); 2])
            .is_err());
        assert!(SeparableDecomposition::new(
            vec![0.5, 0.5],
            vec![
                (fock1(0), fock1(1)),
                (make_state(CatalogState::Ent), fock1(0)),
            ],
        )
        .is_err());

        let decomp = SeparableDecomposition::new(
            vec![0.25, 0.75],
            vec![(fock1(0), fock1(1)), (fock1(1), fock1(0))],
        )
        .unwrap();
        let text = decomp.to_json();
        let back = SeparableDecomposition::from_json(&text).unwrap();
        assert_eq!(back.weights(), decomp.weights());
        assert_eq!(back.subsystem_modes(), (1, 1));

        assert!(SeparableDecomposition::from_json(r#"{"weights": [1.0]}"#).is_err());
    }
}
