//! Numerical Riesz and Newton potentials of radial functions.
//!
//! Profiles live on log-spaced grids with power-law tails; potentials are
//! computed by reducing the N-dimensional convolution to a one-dimensional
//! radial integral against the spherically averaged kernel.

pub(crate) mod gauss;
pub(crate) mod jacobi;
pub mod kernel;
pub mod poisson;
pub mod profile;
pub mod riesz;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use kernel::angular_kernel;
pub use poisson::{inverse_laplacian_radial, laplacian_radial_fd, FdEstimate};
pub use profile::{default_grid, log_grid, RadialProfile};
pub use riesz::{riesz_radial, riesz_radial_at, PointEstimate, RieszPotential};

/// Tolerances and limits shared by every radial integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Panel budget per integration piece.
    pub max_panels: usize,
    /// Node count of fixed angular rules.
    pub angular_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_panels: 2000,
            angular_nodes: 64,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if self.max_panels < 16 {
            return Err(Error::domain("max_panels must be at least 16"));
        }
        if self.angular_nodes == 0 {
            return Err(Error::domain("angular_nodes must be positive"));
        }
        Ok(())
    }
}
