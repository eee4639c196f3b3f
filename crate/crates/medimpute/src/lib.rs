//! Imputation of missing continuous and categorical values in longitudinal
//! (panel) data.
//!
//! The core algorithm fills each incomplete observation by minimizing a K-NN
//! objective in which rows belonging to the same individual are additionally
//! coupled with exponentially time-decayed weights. Setting all per-feature
//! time weights to zero recovers the plain K-NN imputation objective, and a
//! column mean/mode baseline is included for comparison.
//!
//! Modules:
//! - [`panel`] — data model, CSV/schema ingestion, standardization, MCAR
//!   amputation, synthetic panel generation.
//! - [`knn`] — distance metric, decay coefficients, neighbor assignment,
//!   closed-form per-cell updates, objective evaluation.
//! - [`solver`] — warm starts, block coordinate descent with random restarts,
//!   and the mean/mode baseline.
//! - [`model_selection`] — cross-validation over the time-weight grid.
//! - [`eval`] — imputation error metrics, ROC AUC, and the downstream
//!   L1-regularized logistic regression task.
//! - [`bench`] — experiment orchestration (missing-fraction sweeps,
//!   observations-per-individual sweeps) and report emission.

pub mod bench;
pub mod error;
pub mod eval;
pub mod knn;
pub mod model_selection;
pub mod panel;
pub mod seed;
pub mod solver;

pub use error::{Error, Result};
pub use knn::{CompletedMatrix, DecayTable, Hyperparams, NeighborAssignment};
pub use panel::{MaskRecord, PanelDataset, Schema, StandardizationParams, SynthConfig};
pub use solver::{ImputationResult, SolverConfig};
