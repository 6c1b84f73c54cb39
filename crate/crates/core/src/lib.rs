//! Reduced free products of finite-dimensional C*-algebras with faithful
//! states, realized on a truncated free-product Hilbert space.
//!
//! The pipeline is:
//!
//! - [`blockalg`]: algebras `M_{d_1} ⊕ … ⊕ M_{d_k}`, their elements and
//!   states given by block densities.
//! - [`gns`]: the GNS triple of each factor in an orthonormal frame whose
//!   first vector is the cyclic vector `ξ`.
//! - [`freefock`]: alternating words, the truncated direct sum of tensor
//!   products of the centered GNS spaces, and summand projections.
//! - [`freerep`]: the left action of each factor on the truncated space, the
//!   free product state and exact mixed moments.
//! - [`compress`]: the compression isometries `V`, the closed-form values of
//!   `V* a_1 ⋯ a_m V`, the identity `V* A V = A_ι`, and a faithfulness
//!   witness search.
//! - [`oracle`]: a dense, independently indexed reference implementation.
//! - [`example_gns`]: a finite model of the Toeplitz ⊗ M₂ example whose GNS
//!   vector is not cyclic for the commutant.
//!
//! Moments of degree at most the truncation depth are exact; every operation
//! that could silently lose mass to truncation returns
//! [`Error::Exactness`] instead.

pub mod blockalg;
pub mod compress;
pub mod config;
pub mod error;
pub mod example_gns;
pub mod freefock;
pub mod freerep;
pub mod gns;
pub mod linalg;
pub mod oracle;
pub mod rng;
pub mod verify;

pub use blockalg::{AlgebraElement, BlockAlgebra, Faithfulness, StateSpec, Tolerances};
pub use error::{Error, Result};
pub use freefock::{FreeFockSpace, SummandProjection, Word};
pub use freerep::{Letter, NCPoly, RepOperator};
pub use gns::GnsSpace;

pub use num_complex::Complex64 as C64;

/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<C64>;
