//! Purely dissipative Lindbladians that reproduce Hamiltonian dynamics.
//!
//! The crate builds jump-operator families whose generators equal a rescaled
//! Hamiltonian commutator up to a second-order dissipator, and measures how
//! well they do it: exact diamond-norm distances by semidefinite
//! programming, uniform-in-time simulation error, qubit Bloch-sphere
//! geometry, and first-order rigidity fits.
//!
//! ```
//! use dissim_core::{constructions, metrics, numkernel::pauli};
//!
//! let h = pauli::z().scale_real(0.5);
//! let fam = constructions::mimic_single(&h, 0.025).unwrap();
//! let rep = metrics::uniform_error(
//!     fam.lindbladian(), &h, 2.0, 0.025, 16, metrics::DiamondMethod::Sdp,
//! ).unwrap();
//! assert!(rep.certified() <= 0.05);
//! ```

// `!(x > 0.0)` is used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blochgeo;
pub mod constructions;
pub mod error;
pub mod harness;
pub mod lindblad;
pub mod metrics;
pub mod numkernel;
pub mod random;
pub mod rigidity;
pub mod sdp;
pub mod tolerances;

pub use error::{Error, Result};
pub use lindblad::{DensityMatrix, Lindbladian, SuperKind, Superoperator};
pub use metrics::{DiamondMethod, DistanceReport};
pub use numkernel::{ComplexMatrix, RealMatrix, Spectrum};
