//! Certificate-selection instances and the deceptive prover/verifier problems.
//!
//! An instance is a tripartite graph of in-class datapoints, certificates and
//! out-class datapoints. This crate computes the exact metrics of a
//! prover/verifier pair (completeness, soundness, precision, AFC), solves the
//! two deceptive-selection problems exactly or greedily, and builds the
//! reductions from Densest-k-Subgraph and Min-k-Union together with the lifts
//! back to the source problems.
//!
//! Every metric is an [`ExactRatio`]; nothing in the public API uses floats.

mod bits;
pub mod error;
pub mod generators;
pub mod io;
pub mod metrics;
pub mod model;
pub mod ratio;
pub mod reductions;
pub mod solvers;

pub use error::{Error, Result};
pub use model::{CsInstance, ProverAssignment, RawInstance, ValidationReport, VerifierAcceptance};
pub use ratio::ExactRatio;
pub use solvers::{DcsSolution, Problem};
