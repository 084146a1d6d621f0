//! Residual checks of `u = A|x|^{-s}` against
//! `−Δu = γ(N−μ) I_{N−μ}(u^p) u^q` and an experimental Picard iteration.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::output::{csv_table, to_json};
use crate::power_law::{
    amplitude_power, laplacian_power, misprinted_decay_exponent, riesz_mapping_exponent,
    solve_params, ModelParams, PowerLawTerm,
};
use crate::radial::{
    default_grid, inverse_laplacian_radial, riesz_radial, riesz_radial_at, QuadratureConfig,
    RadialProfile,
};
use crate::special_fn::riesz_gamma;

/// Window on which fixed-point changes are measured.
pub const COMPARISON_WINDOW: (f64, f64) = (0.1, 10.0);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub dim: usize,
    pub mu: f64,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub amplitude: f64,
    pub radii: Vec<f64>,
    /// `−Δu`, analytic.
    pub lhs: Vec<f64>,
    /// `γ(N−μ) I_{N−μ}(u^p) u^q`, by quadrature.
    pub rhs: Vec<f64>,
    pub ratio: Vec<f64>,
    /// Relative error estimate of `rhs`, truncation included.
    pub quadrature_error: Vec<f64>,
    /// Inner and outer tails of `u^p` dropped because their integrals
    /// diverge; `rhs` then covers the working grid only.
    pub truncated_inner: bool,
    pub truncated_outer: bool,
}

impl ResidualReport {
    pub fn max_deviation(&self) -> f64 {
        self.ratio.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    /// Columns `r,lhs,rhs,ratio,err`.
    pub fn to_csv(&self) -> String {
        let rows = (0..self.radii.len()).map(|i| {
            vec![
                self.radii[i],
                self.lhs[i],
                self.rhs[i],
                self.ratio[i],
                self.quadrature_error[i],
            ]
        });
        csv_table(&["r", "lhs", "rhs", "ratio", "err"], rows)
    }
}

/// Residual of the solution built by [`solve_params`]. `params` must match
/// what `solve_params` returns for its `(N, μ, p, q)`.
pub fn verify_solution(
    params: &ModelParams,
    radii: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ResidualReport> {
    let fresh = solve_params(params.dim, params.mu, params.p, params.q)?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
    if !(close(params.s, fresh.s) && close(params.amplitude, fresh.amplitude)) {
        return Err(Error::domain(format!(
            "(s, A) = ({}, {}) do not solve the parameter system, expected ({}, {})",
            params.s, params.amplitude, fresh.s, fresh.amplitude
        )));
    }
    verify_candidate(params.dim, params.mu, params.p, params.q, params.s, params.amplitude, radii, cfg)
}

/// Residual of an arbitrary power law `A|x|^{-s}`, for perturbation and
/// discrepancy studies. Divergent parts of the Riesz integral are cut at
/// the working grid and flagged.
#[allow(clippy::too_many_arguments)]
pub fn verify_candidate(
    dim: usize,
    mu: f64,
    p: f64,
    q: f64,
    s: f64,
    amplitude: f64,
    radii: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ResidualReport> {
    let n = dim as f64;
    if dim < 3 || !(mu > 0.0 && mu < n) {
        return Err(Error::domain(format!("need N >= 3 and 0 < mu < N, got N = {dim}, mu = {mu}")));
    }
    if !(s > 0.0 && amplitude > 0.0 && s.is_finite() && amplitude.is_finite()) {
        return Err(Error::domain(format!("need s > 0 and A > 0, got s = {s}, A = {amplitude}")));
    }
    let grid = default_grid();
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    if radii.is_empty() || radii.iter().any(|&r| !(r > lo && r < hi)) {
        return Err(Error::domain(format!(
            "evaluation radii must lie strictly inside ({lo}, {hi})"
        )));
    }
    let alpha = n - mu;
    let u = PowerLawTerm::new(amplitude, s)?;
    let up = u.powf(p);
    let truncated_inner = up.exponent >= n;
    let truncated_outer = up.exponent <= alpha;
    let source = RadialProfile::from_fn(grid, |r| up.eval(r))?.with_tails(
        (!truncated_inner).then_some(up),
        (!truncated_outer).then_some(up),
    )?;
    let norm = riesz_gamma(alpha, dim)?;
    let pot = riesz_radial_at(&source, alpha, dim, radii, cfg)?;
    let lap = laplacian_power(s, dim).scale(amplitude);

    let mut report = ResidualReport {
        dim,
        mu,
        p,
        q,
        s,
        amplitude,
        radii: radii.to_vec(),
        lhs: Vec::with_capacity(radii.len()),
        rhs: Vec::with_capacity(radii.len()),
        ratio: Vec::with_capacity(radii.len()),
        quadrature_error: Vec::with_capacity(radii.len()),
        truncated_inner,
        truncated_outer,
    };
    for pt in &pot {
        let r = pt.radius;
        let lhs = lap.eval(r);
        let rhs = norm * pt.value * u.eval(r).powf(q);
        report.lhs.push(lhs);
        report.rhs.push(rhs);
        report.ratio.push(lhs / rhs);
        report.quadrature_error.push(pt.rel_error());
    }
    Ok(report)
}

/// `(s, A)` from the misprinted exponent `(N−μ+2)/(p−q+1)`. `A` comes from
/// the same gamma quotient, or is 1 where the quotient is undefined or not
/// positive.
pub fn misprinted_candidate(dim: usize, mu: f64, p: f64, q: f64) -> Result<(f64, f64)> {
    let s = misprinted_decay_exponent(dim, mu, p, q)
        .filter(|s| *s > 0.0)
        .ok_or_else(|| Error::domain("misprinted exponent is undefined or not positive"))?;
    let amplitude = amplitude_power(dim, mu, p, q, s)
        .filter(|a| *a > 0.0 && a.is_finite())
        .map_or(1.0, |a| a.powf(1.0 / (p + q - 1.0)));
    Ok((s, amplitude))
}

#[derive(Debug, Clone)]
pub struct FixedPointResult {
    pub profile: RadialProfile,
    /// `sup |u_{k+1} − u_k| / u_k` over grid radii in [`COMPARISON_WINDOW`].
    pub history: Vec<f64>,
}

/// Damped Picard iteration
/// `u ← (1−d) u + d (−Δ)^{-1}[γ(N−μ) I_{N−μ}(u^p) u^q]`.
///
/// Experimental: nothing is promised about convergence.
pub fn fixed_point_iterate(
    params: &ModelParams,
    init: &RadialProfile,
    steps: usize,
    damping: f64,
    cfg: &QuadratureConfig,
) -> Result<FixedPointResult> {
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::domain(format!("damping must lie in (0, 1], got {damping}")));
    }
    if init.values().iter().any(|&v| v <= 0.0) {
        return Err(Error::domain("initial profile must be positive"));
    }
    let (Some(inner), Some(outer)) = (init.tail_inner(), init.tail_outer()) else {
        return Err(Error::domain("initial profile needs both tail descriptors"));
    };
    let dim = params.dim;
    let n = dim as f64;
    let alpha = n - params.mu;
    if inner.exponent * params.p >= n {
        return Err(Error::domain(format!(
            "u^p is not integrable at the origin: inner exponent {} >= N",
            inner.exponent * params.p
        )));
    }
    // u^p must decay into the range where I_α maps L^t boundedly
    let b = outer.exponent * params.p;
    if b < n {
        riesz_mapping_exponent(n / b, alpha, dim)?;
    }
    let norm = riesz_gamma(alpha, dim)?;
    let fail = |step: usize, e: Error| Error::Iteration {
        step,
        reason: e.to_string(),
    };

    let mut u = init.clone();
    let mut history = Vec::with_capacity(steps);
    for step in 0..steps {
        let next = (|| -> Result<RadialProfile> {
            let pot = riesz_radial(&u.powf(params.p)?, alpha, dim, cfg)?;
            let forcing = pot.profile.scale(norm)?.mul(&u.powf(params.q)?)?;
            let image = inverse_laplacian_radial(&forcing, dim)?;
            u.blend(&image, damping)
        })()
        .map_err(|e| fail(step, e))?;
        if next.values().iter().any(|&v| !(v > 0.0)) {
            return Err(fail(step, Error::domain("iterate lost positivity")));
        }
        let (lo, hi) = COMPARISON_WINDOW;
        let change = u
            .radii()
            .iter()
            .zip(u.values().iter().zip(next.values()))
            .filter(|(r, _)| (lo..=hi).contains(*r))
            .map(|(_, (a, b))| ((b - a) / a).abs())
            .fold(0.0, f64::max);
        history.push(change);
        u = next;
    }
    Ok(FixedPointResult { profile: u, history })
}
