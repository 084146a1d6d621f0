//! Explicit singular solutions of the nonlocal Hartree equation
//! `−Δu = (|x|^{−μ} ∗ u^p) u^q`, the Riesz-potential calculus behind
//! them, and discrete moving-plane diagnostics.

pub mod cli;
pub mod error;
pub mod moving_plane;
pub mod output;
pub mod power_law;
pub mod radial;
pub mod special_fn;
pub mod verifier;

pub use error::{Error, Result, Violation};
pub use power_law::{ModelParams, PowerLawTerm};
pub use radial::{QuadratureConfig, RadialProfile};
