//! Probability representation of multimode oscillator states.
//!
//! A quantum state of `N` oscillator modes is encoded here as a genuine
//! probability distribution of homodyne-style quadrature variables
//! `X_j = mu_j q_j + nu_j p_j`, parametrized by the reference-frame pair
//! `(mu, nu)`. The crate evaluates three flavors of these tomograms for
//! superpositions of Fock states:
//!
//! * **center of mass** - the distribution of the single collective
//!   variable `X = sum_j X_j`,
//! * **symplectic** - the joint distribution of all per-mode `X_j`,
//! * **cluster** - one collective variable for a merged pair of modes
//!   alongside an individual variable for the remaining mode.
//!
//! On top of evaluation the crate provides harmonic and inverted
//! oscillator dynamics as frame-parameter maps ([`frames`]), convex
//! separable constructions and an entanglement witness ([`separable`]),
//! closed-form reference tomograms for a small state catalog
//! ([`closed_forms`]), density-matrix reconstruction from tomogram data
//! ([`reconstruction`]), and a seeded invariant checker ([`verify`]).
//!
//! ```
//! use tomokit::{cm_tomogram, make_state, CatalogState, TomographyFrame};
//!
//! let state = make_state(CatalogState::Ent);
//! let frame = TomographyFrame::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
//! let w = cm_tomogram(&state, 1.0, &frame).unwrap();
//! assert!((w - 0.24197072451914335).abs() < 1e-12);
//! ```

pub use nalgebra;
pub use num_complex;

pub mod closed_forms;
pub mod error;
pub mod frames;
pub mod quadrature;
pub mod reconstruction;
pub mod separable;
pub mod states;
pub mod tomography;
pub mod verify;

pub use closed_forms::{make_state, CatalogState};
pub use error::{Result, TomoError};
pub use frames::{evolve_frame, scale_frame, EvolutionKind, TomographyFrame};
pub use reconstruction::{
    fidelity, parse_samples_csv, reconstruct_from_samples, reconstruct_single_mode, Reconstruction,
};
pub use separable::{
    entanglement_witness_gap, separable_cm, separable_symplectic, SeparableDecomposition,
};
pub use states::{negativity, DensityMatrix, FockSuperposition, FockTerm};
pub use tomography::{
    cluster_grid, cluster_tomogram, cm_grid, cm_tomogram, linear_axis, marginal_grid,
    subsystem_tomogram, symplectic_grid, symplectic_tomogram, tomographic_amplitude,
    ClusterPartition, CmEvaluator, TomogramGrid, TomogramKind,
};
pub use verify::{run_all, SuiteReport, VerifyReport};
