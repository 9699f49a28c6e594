//! Determinantal random fields on the two-dimensional lattice whose kernels
//! extend the discrete sine kernel by per-column weight factors.
//!
//! The crate evaluates the contour-integral correlation kernel, computes
//! joint particle/hole probabilities as complemented determinants, samples
//! finite windows exactly, extracts the associated nonintersecting path
//! ensembles, and machine-checks the determinant identities that make those
//! ensembles Gibbsian.
//!
//! See the `examples/` directory for one runnable walkthrough per major
//! capability, and the `gp` binary for the command-line surface.

pub mod canonical;
pub mod correlations;
pub mod error;
pub mod gibbs;
pub mod identities;
pub mod kernel;
pub mod linalg;
pub mod model;
pub mod paths;
pub mod presets;
pub mod psi;
pub mod quadrature;
pub mod sampler;

pub use canonical::{canonicalize, CanonicalForm};
pub use correlations::{
    build_event_matrix, event_probability, window_distribution, Configuration, EventSpec, Site,
    Window,
};
pub use error::{Error, Result};
pub use kernel::{equal_time_closed_form, ContourSign, ContourSpec, KernelContext};
pub use model::Model;
pub use psi::{eval_psi, FactorKind, PsiFactor, PsiSequence, SpectralParameter};
pub use quadrature::QuadratureSpec;
