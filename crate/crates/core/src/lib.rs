//! Supersymmetric ladder operators, Painlevé potentials and superintegrable systems.
//!
//! Units: every energy (potentials, factorization energies, `Q` roots, zero-mode
//! energies) is in the physical units of `ħω`; ladder relations read
//! `[H, A†] = ħω A†`.

pub mod algebra;
pub mod diffop;
pub mod error;
pub mod fd;
pub mod interval;
pub mod jet;
pub mod models;
pub mod ode;
pub mod painleve;
pub mod report;
pub mod susy;
pub mod smooth;
pub mod spectral;

pub use error::{Error, Result};
pub use interval::Interval;
pub use jet::{Jet, Scalar};
pub use smooth::SmoothFn;
