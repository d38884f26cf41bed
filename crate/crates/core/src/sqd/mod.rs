//! Sample-based quantum diagonalization.
//!
//! Iteration 0 post-selects the raw rows directly. Each later iteration
//! repairs non-compliant rows against the mean occupancy of the previous
//! iteration's batches, post-selects, subsamples ε_s rows per batch,
//! pools their α and β halves into a product space and diagonalizes H
//! there. The reported energy is the minimum over all iterations and
//! batches, so it is variational.
//!
//! Dimensions: |S_samp| counts unique raw bitstrings, |S_post-cr| unique
//! compliant bitstrings after recovery and |S_sub| the batch dimension.
//! The ratios divide the last two by the sector size |S|.

pub mod config;
pub mod recovery;
pub mod run;
pub mod subsample;

pub use config::{SQDConfig, SamplesPerBatch};
pub use recovery::{flip_weights, recover_configurations, FLIP_FLOOR};
pub use run::{run_sqd, run_sqd_with_state, solve_fermion, space_metrics, IterationRecord, SQDResult, SpaceDims, SpaceRatios, SqdState};
pub use subsample::{postselect, postselect_and_subsample, proliferate, Batch};
