//! Radial Newton potential and a finite-difference Laplacian.

use serde::Serialize;

use super::gauss;
use super::profile::RadialProfile;
use crate::error::{Error, Result};

/// `u = (−Δ)^{-1} g` for radial `g`:
/// `u(r) = [r^{2−N} ∫_0^r g ρ^{N−1} dρ + ∫_r^∞ g ρ dρ] / (N − 2)`.
///
/// Tails are integrated in closed form and need inner exponent `< N` and
/// outer exponent `> 2`; a missing tail counts as zero. The result is
/// sampled on the grid of `g` with fitted tails.
pub fn inverse_laplacian_radial(g: &RadialProfile, dim: usize) -> Result<RadialProfile> {
    if dim < 3 {
        return Err(Error::domain(format!("dimension must be at least 3, got {dim}")));
    }
    let n = dim as f64;
    let radii = g.radii();
    let t_in = match g.tail_inner() {
        Some(t) if t.coefficient != 0.0 && t.exponent >= n => {
            return Err(Error::domain(format!(
                "inner tail exponent {} must be below N = {n}",
                t.exponent
            )))
        }
        Some(t) => t.coefficient * radii[0].powf(n - t.exponent) / (n - t.exponent),
        None => 0.0,
    };
    let r_max = radii[radii.len() - 1];
    let t_out = match g.tail_outer() {
        Some(t) if t.coefficient != 0.0 && t.exponent <= 2.0 => {
            return Err(Error::domain(format!(
                "outer tail exponent {} must exceed 2",
                t.exponent
            )))
        }
        Some(t) if t.coefficient == 0.0 => 0.0,
        Some(t) => t.coefficient * r_max.powf(2.0 - t.exponent) / (t.exponent - 2.0),
        None => 0.0,
    };
    // per-interval moments ∫ g ρ^k dρ in the variable ln ρ
    let moment = |a: f64, b: f64, k: f64| {
        let f = |t: f64| g.interpolate(t.exp()) * ((k + 1.0) * t).exp();
        match gauss::integrate(f, a.ln(), b.ln(), 1e-13, 0.0, 64) {
            Ok(e) | Err(e) => e.value,
        }
    };
    let m = radii.len();
    let mut inner = vec![t_in; m];
    for i in 1..m {
        inner[i] = inner[i - 1] + moment(radii[i - 1], radii[i], n - 1.0);
    }
    let mut outer = vec![t_out; m];
    for i in (0..m - 1).rev() {
        outer[i] = outer[i + 1] + moment(radii[i], radii[i + 1], 1.0);
    }
    let values = (0..m)
        .map(|i| (radii[i].powf(2.0 - n) * inner[i] + outer[i]) / (n - 2.0))
        .collect();
    Ok(RadialProfile::new(radii.to_vec(), values)?.with_fitted_tails())
}

/// Finite-difference `−Δf` with its Richardson error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdEstimate {
    pub value: f64,
    pub error: f64,
}

/// `−(f'' + (N−1) f'/r)` at `at`, from centred differences in `ln r` with
/// the local grid step and one Richardson step. Needs two grid steps of
/// room on each side.
pub fn laplacian_radial_fd(f: &RadialProfile, dim: usize, at: f64) -> Result<FdEstimate> {
    let radii = f.radii();
    let k = radii.partition_point(|&r| r < at).clamp(1, radii.len() - 1);
    let h = (radii[k] / radii[k - 1]).ln();
    let x = at.ln();
    let slack = 1e-12 * h;
    if !(x - 2.0 * h >= radii[0].ln() - slack && x + 2.0 * h <= radii[radii.len() - 1].ln() + slack) {
        return Err(Error::domain(format!(
            "r = {at} needs two grid steps on each side within [{}, {}]",
            f.r_min(),
            f.r_max()
        )));
    }
    let n = dim as f64;
    let fx = |t: f64| f.interpolate(t.exp().clamp(f.r_min(), f.r_max()));
    let f0 = fx(x);
    // Δ = (F_tt + (N−2) F_t) / r² with F(t) = f(e^t)
    let d = |step: f64| {
        let (fp, fm) = (fx(x + step), fx(x - step));
        let ftt = (fp - 2.0 * f0 + fm) / (step * step);
        let ft = (fp - fm) / (2.0 * step);
        -(ftt + (n - 2.0) * ft) / (at * at)
    };
    let (d1, d2) = (d(h), d(2.0 * h));
    Ok(FdEstimate {
        value: (4.0 * d1 - d2) / 3.0,
        error: (d1 - d2).abs() / 3.0,
    })
}
