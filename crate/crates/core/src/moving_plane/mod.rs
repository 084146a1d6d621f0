//! Discrete moving planes along x₁ on uniform grids.
//!
//! Fields are sampled on `[−L, L]^N` (N = 2 or 3) and compared with their
//! reflections `u_λ(x) = u(2λ − x₁, x₂, …)`. Only planes at multiples of
//! `h/2` are allowed, so every reflected node is a grid node and no
//! interpolation enters the comparison.

mod field;
mod sweep;

pub use field::{sample_field, sample_field_unchecked, CartesianField, GridSpec, SingularPoint};
pub use sweep::{
    default_lambda_grid, default_tol, reflect, sweep_lambda0, w_plus_sup, DirectionSweep,
    MovingPlaneReport,
};
