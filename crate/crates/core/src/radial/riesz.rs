//! Riesz potentials of radial profiles.
//!
//! `I_α f(r) = γ(α)^{-1} ∫_0^∞ f(ρ) ρ^{N−1} K(r, ρ) dρ` with `K` the
//! spherical average of `|x − y|^{α−N}`. The ρ-line is cut at
//! `{r/2, r, 2r}` and at the grid ends. Far from `r` the integral runs in
//! `ln ρ`; next to `r` the substitution `|ρ − r| = W v^m` with `mα ∈ ℕ`
//! turns the kernel's algebraic or logarithmic singularity into a smooth
//! integrand. Tail regions far from `r` are summed from the kernel's
//! hypergeometric series in closed form.

use rayon::prelude::*;
use serde::Serialize;

use super::gauss::{self, Estimate};
use super::kernel::{weighted_series, Kernel};
use super::profile::RadialProfile;
use super::QuadratureConfig;
use crate::error::{Error, Result};
use crate::power_law::PowerLawTerm;
use crate::special_fn::riesz_gamma;

/// Potential value at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointEstimate {
    pub radius: f64,
    pub value: f64,
    /// Quadrature error estimate.
    pub error: f64,
    /// Estimated contribution of the regions dropped for lack of a tail
    /// descriptor; `inf` when no convergent extension exists.
    pub truncation: f64,
    pub panels: usize,
}

impl PointEstimate {
    pub fn rel_error(&self) -> f64 {
        (self.error + self.truncation) / self.value.abs()
    }
}

#[derive(Debug, Clone)]
pub struct RieszPotential {
    /// Potential on the input grid, with tails fitted to the end samples.
    pub profile: RadialProfile,
    pub points: Vec<PointEstimate>,
    /// Whether any region was dropped for lack of a tail.
    pub truncated: bool,
}

impl RieszPotential {
    pub fn max_rel_error(&self) -> f64 {
        self.points.iter().map(PointEstimate::rel_error).fold(0.0, f64::max)
    }
}

/// `I_α f` at every grid radius of `f`.
pub fn riesz_radial(
    f: &RadialProfile,
    alpha: f64,
    dim: usize,
    cfg: &QuadratureConfig,
) -> Result<RieszPotential> {
    let points = riesz_radial_at(f, alpha, dim, f.radii(), cfg)?;
    let truncated = f.tail_inner().is_none() || f.tail_outer().is_none();
    let values = points.iter().map(|p| p.value).collect();
    let profile = RadialProfile::new(f.radii().to_vec(), values)?.with_fitted_tails();
    Ok(RieszPotential {
        profile,
        points,
        truncated,
    })
}

/// `I_α f` at arbitrary radii, evaluated directly (no interpolation).
pub fn riesz_radial_at(
    f: &RadialProfile,
    alpha: f64,
    dim: usize,
    radii: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<PointEstimate>> {
    cfg.validate()?;
    if radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(Error::domain("evaluation radii must be positive and finite"));
    }
    let plan = Plan::new(f, alpha, dim, cfg)?;
    let results: Vec<std::result::Result<PointEstimate, PointEstimate>> =
        radii.par_iter().map(|&r| plan.at(r)).collect();
    let worst = results
        .iter()
        .filter_map(|r| r.as_ref().err())
        .max_by(|a, b| a.error.total_cmp(&b.error));
    if let Some(w) = worst {
        return Err(Error::Convergence {
            radius: w.radius,
            estimate: w.value,
            error: w.error,
        });
    }
    Ok(results.into_iter().map(|r| r.unwrap_or_else(|e| e)).collect())
}

enum Tail {
    Exact(PowerLawTerm),
    /// No descriptor: integrated as zero, with this extension (if any)
    /// estimating what was dropped.
    Missing(Option<PowerLawTerm>),
}

struct Plan<'a> {
    f: &'a RadialProfile,
    kernel: Kernel,
    dim: usize,
    n: f64,
    alpha: f64,
    mu: f64,
    norm: f64,
    // w = W v^m near the diagonal
    m: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
    inner: Tail,
    outer: Tail,
}

impl<'a> Plan<'a> {
    fn new(f: &'a RadialProfile, alpha: f64, dim: usize, cfg: &QuadratureConfig) -> Result<Self> {
        let norm = riesz_gamma(alpha, dim)?;
        let n = dim as f64;
        let inner = match f.tail_inner() {
            Some(t) if t.coefficient != 0.0 && t.exponent >= n => {
                return Err(Error::domain(format!(
                    "inner tail exponent {} must be below N = {n} for the potential to converge",
                    t.exponent
                )))
            }
            Some(t) => Tail::Exact(t),
            None => Tail::Missing(inner_extension(f, n)),
        };
        let outer = match f.tail_outer() {
            Some(t) if t.coefficient != 0.0 && t.exponent <= alpha => {
                return Err(Error::domain(format!(
                    "outer tail exponent {} must exceed alpha = {alpha} for the potential to converge",
                    t.exponent
                )))
            }
            Some(t) => Tail::Exact(t),
            None => Tail::Missing(outer_extension(f, alpha)),
        };
        let mu = n - alpha;
        Ok(Self {
            f,
            kernel: Kernel::new(dim, mu, cfg.angular_nodes),
            dim,
            n,
            alpha,
            mu,
            norm,
            m: (4.0 * alpha).ceil() / alpha,
            // shared among up to ~10 pieces
            rel_tol: 0.1 * cfg.rel_tol,
            abs_tol: 0.1 * cfg.abs_tol * norm,
            max_panels: cfg.max_panels,
            inner,
            outer,
        })
    }

    fn at(&self, r: f64) -> std::result::Result<PointEstimate, PointEstimate> {
        let mut failed = false;
        let mut take = |res: std::result::Result<Estimate, Estimate>| {
            res.unwrap_or_else(|e| {
                failed = true;
                e
            })
        };
        let grid = take(self.piecewise(&|rho| self.f.interpolate(rho), self.f.radii(), r));
        let (inner, inner_trunc) = match &self.inner {
            Tail::Exact(t) => (take(self.inner_region(t, r)), 0.0),
            Tail::Missing(ext) => (Estimate::ZERO, self.truncation(ext.as_ref(), r, true)),
        };
        let (outer, outer_trunc) = match &self.outer {
            Tail::Exact(t) => (take(self.outer_region(t, r)), 0.0),
            Tail::Missing(ext) => (Estimate::ZERO, self.truncation(ext.as_ref(), r, false)),
        };
        let total = grid.add(inner).add(outer);
        let est = PointEstimate {
            radius: r,
            value: total.value / self.norm,
            error: total.error / self.norm,
            truncation: (inner_trunc + outer_trunc) / self.norm,
            panels: total.panels,
        };
        if failed || !est.value.is_finite() {
            Err(est)
        } else {
            Ok(est)
        }
    }

    fn truncation(&self, ext: Option<&PowerLawTerm>, r: f64, inner: bool) -> f64 {
        let Some(t) = ext else {
            return f64::INFINITY;
        };
        let res = if inner {
            self.inner_region(t, r)
        } else {
            self.outer_region(t, r)
        };
        match res {
            Ok(e) => e.value.abs() + e.error,
            Err(_) => f64::INFINITY,
        }
    }

    /// `∫_0^{r_min}` of the inner tail.
    fn inner_region(&self, t: &PowerLawTerm, r: f64) -> std::result::Result<Estimate, Estimate> {
        let lo = self.f.r_min();
        let rho_a = lo.min(0.5 * r);
        let e = self.n - t.exponent;
        let analytic = t.coefficient
            * self.kernel.area()
            * r.powf(-self.mu)
            * rho_a.powf(e)
            * weighted_series(self.dim, self.mu, (rho_a / r).powi(2), Some(e));
        let numeric = self.piecewise(&|rho| t.eval(rho), &[rho_a, lo], r)?;
        Ok(numeric.add(exact(analytic)))
    }

    /// `∫_{r_max}^∞` of the outer tail.
    fn outer_region(&self, t: &PowerLawTerm, r: f64) -> std::result::Result<Estimate, Estimate> {
        let hi = self.f.r_max();
        let rho_b = hi.max(2.0 * r);
        let e = t.exponent - self.alpha;
        let analytic = t.coefficient
            * self.kernel.area()
            * rho_b.powf(-e)
            * weighted_series(self.dim, self.mu, (r / rho_b).powi(2), Some(e));
        let numeric = self.piecewise(&|rho| t.eval(rho), &[hi, rho_b], r)?;
        Ok(numeric.add(exact(analytic)))
    }

    /// `∫ g(ρ) ρ^{N−1} K(r, ρ) dρ` from the first to the last of `nodes`,
    /// cut at every node (where `g` may lose smoothness) and at `r/2, r, 2r`.
    fn piecewise(
        &self,
        g: &(dyn Fn(f64) -> f64 + Sync),
        nodes: &[f64],
        r: f64,
    ) -> std::result::Result<Estimate, Estimate> {
        let (lo, hi) = (nodes[0], nodes[nodes.len() - 1]);
        if hi <= lo {
            return Ok(Estimate::ZERO);
        }
        let mut cuts: Vec<f64> = nodes
            .iter()
            .copied()
            .chain([0.5 * r, r, 2.0 * r].into_iter().filter(|&c| c > lo && c < hi))
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = Estimate::ZERO;
        let mut failed = false;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            // graded substitution throughout [r/2, 2r], where r may sit
            // within rounding of a cut
            let res = if b <= r && a >= 0.5 * r {
                self.near_diagonal(g, r, r - b, r - a, -1.0)
            } else if a >= r && b <= 2.0 * r {
                self.near_diagonal(g, r, a - r, b - r, 1.0)
            } else {
                self.log_piece(g, a, b, r)
            };
            total = total.add(res.unwrap_or_else(|e| {
                failed = true;
                e
            }));
        }
        if failed {
            Err(total)
        } else {
            Ok(total)
        }
    }

    fn log_piece(
        &self,
        g: &(dyn Fn(f64) -> f64 + Sync),
        a: f64,
        b: f64,
        r: f64,
    ) -> std::result::Result<Estimate, Estimate> {
        let n = self.n;
        let integrand = |t: f64| {
            let rho = t.exp();
            g(rho) * (n * t).exp() * self.kernel.eval(r, rho, (r - rho).abs())
        };
        gauss::integrate(integrand, a.ln(), b.ln(), self.rel_tol, self.abs_tol, self.max_panels)
    }

    /// Gaps `|ρ − r|` in `[w_min, w_max]` on one side (`side = ±1`) of `r`.
    fn near_diagonal(
        &self,
        g: &(dyn Fn(f64) -> f64 + Sync),
        r: f64,
        w_min: f64,
        w_max: f64,
        side: f64,
    ) -> std::result::Result<Estimate, Estimate> {
        let m = self.m;
        let v_min = (w_min / w_max).powf(1.0 / m);
        let n1 = self.dim as i32 - 1;
        let integrand = |v: f64| {
            let gap = w_max * v.powf(m);
            if gap == 0.0 {
                return 0.0;
            }
            let rho = r + side * gap;
            let jac = w_max * m * v.powf(m - 1.0);
            g(rho) * rho.powi(n1) * self.kernel.eval(r, rho, gap) * jac
        };
        gauss::integrate(integrand, v_min, 1.0, self.rel_tol, self.abs_tol, self.max_panels)
    }
}

fn exact(value: f64) -> Estimate {
    Estimate {
        value,
        error: 0.0,
        panels: 0,
    }
}

/// Convergent stand-in for a missing inner tail: the fitted power law, or
/// the boundary value held constant.
fn inner_extension(f: &RadialProfile, n: f64) -> Option<PowerLawTerm> {
    let v0 = f.values()[0];
    match f.fitted_inner_tail() {
        Some(t) if t.exponent < n => Some(t),
        _ => PowerLawTerm::new(v0.abs(), 0.0).ok(),
    }
}

fn outer_extension(f: &RadialProfile, alpha: f64) -> Option<PowerLawTerm> {
    let v = f.values()[f.len() - 1];
    if v == 0.0 {
        return PowerLawTerm::new(0.0, 0.0).ok();
    }
    f.fitted_outer_tail().filter(|t| t.exponent > alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power_law::riesz_power;
    use crate::radial::profile::log_grid;
    use std::f64::consts::PI;

    fn power_profile(c: f64, a: f64, lo: f64, hi: f64, n: usize) -> RadialProfile {
        let term = PowerLawTerm::new(c, a).unwrap();
        RadialProfile::from_power_law(term, log_grid(lo, hi, n).unwrap()).unwrap()
    }

    #[test]
    fn power_law_matches_closed_form() {
        let cfg = QuadratureConfig::default();
        for &(dim, alpha, a) in &[
            (3usize, 2.0, 2.5),
            (3, 0.5, 1.2),
            (3, 1.0, 2.9),
            (3, 2.7, 2.9),
            (4, 2.0, 3.0),
            (5, 1.5, 4.2),
        ] {
            let f = power_profile(1.0, a, 1e-2, 1e2, 120);
            let exact = riesz_power(alpha, a, dim).unwrap();
            let radii = [0.013, 0.1, 0.5, 1.0, 3.7, 10.0, 77.0];
            let pts = riesz_radial_at(&f, alpha, dim, &radii, &cfg).unwrap();
            for p in pts {
                let e = exact.eval(p.radius);
                let rel = (p.value / e - 1.0).abs();
                assert!(rel < 10.0 * cfg.rel_tol, "N={dim} alpha={alpha} a={a} r={}: {rel:e}", p.radius);
                assert!(p.truncation == 0.0);
            }
        }
    }

    #[test]
    fn evaluates_off_grid_radii() {
        let cfg = QuadratureConfig::default();
        let f = power_profile(2.0, 2.2, 1.0, 10.0, 40);
        let exact = riesz_power(1.5, 2.2, 3).unwrap().scale(2.0);
        let pts = riesz_radial_at(&f, 1.5, 3, &[1e-3, 0.5, 1.0, 10.0, 1e3], &cfg).unwrap();
        for p in pts {
            assert!((p.value / exact.eval(p.radius) - 1.0).abs() < 1e-7, "{p:?}");
        }
    }

    #[test]
    fn shell_theorem_for_compact_bump() {
        // f = (1−ρ²)³ on ρ < 1; mass M = 4π ∫ (1−ρ²)³ ρ² dρ = 64π/315
        let radii = log_grid(1e-3, 1.0, 1000).unwrap();
        let f = RadialProfile::from_fn(radii, |r| if r < 1.0 { (1.0 - r * r).powi(3) } else { 0.0 })
            .unwrap()
            .with_tails(
                Some(PowerLawTerm::new(1.0, 0.0).unwrap()),
                Some(PowerLawTerm::new(0.0, 4.0).unwrap()),
            )
            .unwrap();
        let cfg = QuadratureConfig::default();
        let pts = riesz_radial_at(&f, 2.0, 3, &[1.5, 2.0, 10.0, 100.0], &cfg).unwrap();
        let mass = 64.0 * PI / 315.0;
        for p in pts {
            let expect = mass / (4.0 * PI * p.radius);
            assert!((p.value / expect - 1.0).abs() < 1e-7, "{p:?} vs {expect}");
        }
    }

    #[test]
    fn linear_in_the_source() {
        let cfg = QuadratureConfig::default();
        let radii = log_grid(1e-2, 1e2, 100).unwrap();
        let f = RadialProfile::from_fn(radii, |r| 1.0 / (1.0 + r * r).powf(1.7)).unwrap().with_fitted_tails();
        let a = riesz_radial(&f, 1.3, 3, &cfg).unwrap();
        let b = riesz_radial(&f.scale(2.0).unwrap(), 1.3, 3, &cfg).unwrap();
        for (x, y) in a.profile.values().iter().zip(b.profile.values()) {
            assert!((y / (2.0 * x) - 1.0).abs() < 0.1 * cfg.rel_tol, "{x} {y}");
        }
    }

    #[test]
    fn positive_for_positive_sources() {
        let cfg = QuadratureConfig::default();
        let radii = log_grid(1e-2, 1e2, 80).unwrap();
        let f = RadialProfile::from_fn(radii, |r| (-r).exp() * (2.0 + (5.0 * r).sin())).unwrap();
        for (alpha, dim) in [(0.4, 3), (2.0, 3), (2.6, 3), (1.0, 4), (3.5, 5)] {
            let pot = riesz_radial(&f, alpha, dim, &cfg).unwrap();
            assert!(pot.truncated);
            assert!(pot.profile.values().iter().all(|&v| v > 0.0), "alpha={alpha} N={dim}");
        }
    }

    #[test]
    fn radii_next_to_grid_nodes() {
        let cfg = QuadratureConfig::default();
        let grid = log_grid(1e-3, 1e3, 241).unwrap();
        let (node, lo, hi) = (grid[80], grid[0], grid[240]);
        for (alpha, a) in [(0.27, 0.42), (0.05, 1.0), (2.9, 2.95)] {
            let f = RadialProfile::from_power_law(PowerLawTerm::new(1.0, a).unwrap(), grid.clone()).unwrap();
            let exact = riesz_power(alpha, a, 3).unwrap();
            let mut radii = vec![];
            for d in [1e-16, 1e-12, 1e-8, 1e-4] {
                radii.extend([node * (1.0 + d), node * (1.0 - d), lo * (1.0 - d), hi * (1.0 + d)]);
            }
            for p in riesz_radial_at(&f, alpha, 3, &radii, &cfg).unwrap() {
                let e = (p.value / exact.eval(p.radius) - 1.0).abs();
                assert!(e < 10.0 * cfg.rel_tol, "alpha={alpha} r={} err={e:e}", p.radius);
            }
        }
    }

    #[test]
    fn missing_tails_report_truncation() {
        let cfg = QuadratureConfig::default();
        let f = power_profile(1.0, 2.5, 0.1, 10.0, 60).without_tails();
        let exact = riesz_power(2.0, 2.5, 3).unwrap();
        let p = riesz_radial_at(&f, 2.0, 3, &[1.0], &cfg).unwrap()[0];
        let dropped = exact.eval(1.0) - p.value;
        assert!(dropped > 0.0);
        // the fitted extensions are exact here
        assert!((p.truncation / dropped - 1.0).abs() < 1e-6, "{} vs {dropped}", p.truncation);
    }

    #[test]
    fn refinement_reduces_error() {
        // Newton potential of e^{−ρ²} in ℝ³: (√π/4) erf(r)/r
        let oracle = |r: f64| PI.sqrt() / 4.0 * statrs::function::erf::erf(r) / r;
        let cfg = QuadratureConfig::default();
        let eval_r = [0.3, 0.7, 1.0, 1.6, 2.5];
        let err = |n: usize| {
            let radii = log_grid(1e-2, 10.0, n).unwrap();
            let f = RadialProfile::from_fn(radii, |r| (-r * r).exp())
                .unwrap()
                .with_tails(Some(PowerLawTerm::new(1.0, 0.0).unwrap()), None)
                .unwrap();
            riesz_radial_at(&f, 2.0, 3, &eval_r, &cfg)
                .unwrap()
                .iter()
                .map(|p| (p.value / oracle(p.radius) - 1.0).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2, e3) = (err(31), err(61), err(121));
        assert!(e1 > 2.0 * e2 && e2 > 2.0 * e3, "{e1:e} {e2:e} {e3:e}");
    }

    #[test]
    fn rejects_divergent_tails() {
        let cfg = QuadratureConfig::default();
        let f = power_profile(1.0, 1.0, 0.1, 10.0, 20);
        assert!(matches!(riesz_radial(&f, 2.0, 3, &cfg), Err(Error::Domain(_))));
        let g = power_profile(1.0, 3.2, 0.1, 10.0, 20);
        assert!(matches!(riesz_radial(&g, 2.0, 3, &cfg), Err(Error::Domain(_))));
        assert!(riesz_radial(&g, 3.0, 3, &cfg).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        let cfg = QuadratureConfig {
            rel_tol: 1e-15,
            abs_tol: 1e-300,
            max_panels: 16,
            ..QuadratureConfig::default()
        };
        let radii = log_grid(1e-2, 1e2, 50).unwrap();
        let f = RadialProfile::from_fn(radii, |r| (-r).exp() * (2.0 + (40.0 * r).sin())).unwrap();
        let err = riesz_radial(&f, 1.0, 3, &cfg).unwrap_err();
        assert!(err.is_numerical(), "{err}");
    }
}
