//! Spherical average of the Riesz kernel,
//! `K(r, ρ) = ∫_{S^{N−1}} |r e₁ − ρ ω|^{−μ} dσ(ω)`.
//!
//! Evaluation paths:
//! * N = 3: closed form `2π[(r+ρ)^{2−μ} − |r−ρ|^{2−μ}] / ((2−μ) r ρ)`,
//!   with the logarithmic limit at μ = 2;
//! * well separated radii (min/max ≤ 1/2): the hypergeometric series
//!   `|S^{N−1}| R^{−μ} ₂F₁(μ/2, (μ−N+2)/2; N/2; t²)`;
//! * moderately separated radii: Gauss–Jacobi quadrature in u = cos θ with
//!   weight `(1 − u²)^{(N−3)/2}`, used while the rule is converged;
//! * r = ρ: Gauss's summation of the series;
//! * otherwise: the polar-angle integral with a sinh map that resolves the
//!   near-singular peak at θ = 0.

use std::f64::consts::PI;

use super::{gauss, jacobi};
use crate::error::{Error, Result};
use crate::special_fn::{gamma, sphere_area, GammaArg};

/// Smallest gap |r − ρ| (relative to max(r, ρ)) resolved by the angular
/// integral; closer pairs are evaluated at this gap.
const MIN_RELATIVE_GAP: f64 = 1e-150;

const SERIES_SWITCH: f64 = 0.5;

/// Spherical average of `|r e₁ − ρ ω|^{−μ}` over the unit sphere in ℝ^N.
///
/// Returns `+inf` for `r = ρ` when `μ ≥ N − 1`, where the average diverges.
pub fn angular_kernel(r: f64, rho: f64, dim: usize, mu: f64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::domain(format!("dimension must be at least 2, got {dim}")));
    }
    let n = dim as f64;
    if !(mu > 0.0 && mu < n) {
        return Err(Error::domain(format!("0 < mu < N violated: mu = {mu}, N = {n}")));
    }
    if !(r >= 0.0 && rho >= 0.0 && r.is_finite() && rho.is_finite()) || (r == 0.0 && rho == 0.0) {
        return Err(Error::domain(format!(
            "radii must be finite, non-negative and not both zero, got r = {r}, rho = {rho}"
        )));
    }
    Ok(Kernel::new(dim, mu, DEFAULT_ANGULAR_NODES).eval(r, rho, (r - rho).abs()))
}

pub const DEFAULT_ANGULAR_NODES: usize = 64;

/// Kernel evaluator with the dimension-dependent constants cached.
#[derive(Debug, Clone)]
pub(crate) struct Kernel {
    dim: usize,
    mu: f64,
    area: f64,
    ring_area: f64,
    diagonal: f64,
    rule: Option<(Vec<f64>, Vec<f64>)>,
    // Gauss–Jacobi is used for t = min/max up to this ratio
    rule_limit: f64,
}

impl Kernel {
    pub(crate) fn new(dim: usize, mu: f64, angular_nodes: usize) -> Self {
        let n = dim as f64;
        let area = sphere_area(dim);
        let ring_area = if dim >= 2 { sphere_area(dim - 1) } else { 0.0 };
        // Gauss: ₂F₁(a, b; c; 1) = Γ(c)Γ(c−a−b) / (Γ(c−a)Γ(c−b)), c−a−b = N−1−μ
        let diagonal = if mu < n - 1.0 && dim >= 3 {
            let g = |z: f64| gamma(GammaArg::new(z).expect("positive by construction"));
            area * g(0.5 * n) * g(n - 1.0 - mu) / (g(0.5 * (n - mu)) * g(n - 1.0 - 0.5 * mu))
        } else {
            f64::INFINITY
        };
        let (rule, rule_limit) = if dim > 3 && angular_nodes > 0 {
            let rule = jacobi::gauss_jacobi(angular_nodes, 0.5 * (n - 3.0));
            (Some(rule), rule_ratio_limit(angular_nodes))
        } else {
            (None, 0.0)
        };
        Self {
            dim,
            mu,
            area,
            ring_area,
            diagonal,
            rule,
            rule_limit,
        }
    }

    pub(crate) fn area(&self) -> f64 {
        self.area
    }

    /// `K(r, ρ)` where `gap = |r − ρ|` is supplied separately so that callers
    /// near the diagonal do not lose it to cancellation.
    pub(crate) fn eval(&self, r: f64, rho: f64, gap: f64) -> f64 {
        let big = r.max(rho);
        let small = r.min(rho);
        if small == 0.0 {
            return self.area * big.powf(-self.mu);
        }
        if self.dim == 3 {
            return self.closed_form_3d(r, rho, gap);
        }
        let t = small / big;
        if t <= SERIES_SWITCH {
            return self.area * big.powf(-self.mu) * hypergeometric(self.dim, self.mu, t * t);
        }
        if gap == 0.0 {
            return self.diagonal * big.powf(-self.mu);
        }
        if let Some((x, w)) = self.rule.as_ref().filter(|_| t <= self.rule_limit) {
            let (a, b) = (r * r + rho * rho, 2.0 * r * rho);
            let half_mu = 0.5 * self.mu;
            let s: f64 = x.iter().zip(w).map(|(u, wi)| wi * (a - b * u).powf(-half_mu)).sum();
            return self.ring_area * s;
        }
        self.angular_integral(r, rho, gap)
    }

    fn closed_form_3d(&self, r: f64, rho: f64, gap: f64) -> f64 {
        let eps = 2.0 - self.mu;
        let sum = r + rho;
        let bracket = if gap == 0.0 {
            if eps > 0.0 {
                sum.powf(eps) / eps
            } else {
                return f64::INFINITY;
            }
        } else {
            // [(r+ρ)^ε − gap^ε]/ε = gap^ε · expm1(ε ln((r+ρ)/gap)) / ε
            let l = (sum / gap).ln();
            if eps == 0.0 {
                l
            } else {
                gap.powf(eps) * (eps * l).exp_m1() / eps
            }
        };
        2.0 * PI * bracket / (r * rho)
    }

    /// `|S^{N−2}| ∫_0^π (gap² + 4rρ sin²(θ/2))^{−μ/2} sin^{N−2}θ dθ`
    /// with θ = θ_c sinh τ, θ_c = gap/√(rρ).
    pub(crate) fn angular_integral(&self, r: f64, rho: f64, gap: f64) -> f64 {
        let gap = gap.max(MIN_RELATIVE_GAP * r.max(rho));
        let prod = r * rho;
        let theta_c = gap / prod.sqrt();
        let tau_max = (PI / theta_c).asinh();
        let half_mu = 0.5 * self.mu;
        let pow_sin = (self.dim - 2) as i32;
        let f = |tau: f64| {
            let theta = theta_c * tau.sinh();
            let s = (0.5 * theta).sin();
            let base = gap * gap + 4.0 * prod * s * s;
            base.powf(-half_mu) * theta.sin().powi(pow_sin) * theta_c * tau.cosh()
        };
        let est = match gauss::integrate(f, 0.0, tau_max, 1e-13, 0.0, 4000) {
            Ok(e) | Err(e) => e,
        };
        self.ring_area * est.value
    }
}

/// Largest t = min/max for which an n-node Gauss–Jacobi rule reaches
/// ~1e-14. The integrand's branch point sits on the Bernstein ellipse
/// with ρ_B = 1/t, and the error decays like ρ_B^{−2n}.
fn rule_ratio_limit(nodes: usize) -> f64 {
    10f64.powf(-7.0 / nodes as f64)
}

/// ₂F₁(μ/2, (μ−N+2)/2; N/2; z) by its power series, for 0 ≤ z ≤ 1/4.
pub(crate) fn hypergeometric(dim: usize, mu: f64, z: f64) -> f64 {
    weighted_series(dim, mu, z, None)
}

/// `Σ_k c_k z^k / (offset + 2k)` where `c_k` are the coefficients of the
/// sphere-average series; `offset = None` gives the plain series.
/// Used for the analytic tail integrals.
pub(crate) fn weighted_series(dim: usize, mu: f64, z: f64, offset: Option<f64>) -> f64 {
    let n = dim as f64;
    let a = 0.5 * mu;
    let b = 0.5 * (mu - n + 2.0);
    let c = 0.5 * n;
    let weight = |k: usize| offset.map_or(1.0, |e| 1.0 / (e + 2.0 * k as f64));
    let mut coef = 1.0;
    let mut sum = weight(0);
    for k in 0..1000 {
        let kf = k as f64;
        coef *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        if coef == 0.0 {
            break;
        }
        let term = coef * weight(k + 1);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// Gauss–Jacobi rule for the weight (1 − u²)^γ on [−1, 1] via
    /// Golub–Welsch.
    fn gauss_jacobi(nodes: usize, g: f64) -> (Vec<f64>, Vec<f64>) {
        let mut j = DMatrix::<f64>::zeros(nodes, nodes);
        for k in 1..nodes {
            let kf = k as f64;
            let b2 = kf * (kf + 2.0 * g) / ((2.0 * kf + 2.0 * g + 1.0) * (2.0 * kf + 2.0 * g - 1.0));
            j[(k, k - 1)] = b2.sqrt();
            j[(k - 1, k)] = b2.sqrt();
        }
        let eig = SymmetricEigen::new(j);
        let gm = |z: f64| gamma(GammaArg::new(z).unwrap());
        let mu0 = PI.sqrt() * gm(g + 1.0) / gm(g + 1.5);
        let x = eig.eigenvalues.iter().copied().collect();
        let w = (0..nodes)
            .map(|i| mu0 * eig.eigenvectors[(0, i)].powi(2))
            .collect();
        (x, w)
    }

    /// Independent oracle: |S^{N−2}| ∫ (r²+ρ²−2rρu)^{−μ/2} (1−u²)^{(N−3)/2} du.
    fn jacobi_oracle(r: f64, rho: f64, dim: usize, mu: f64, nodes: usize) -> f64 {
        let (x, w) = gauss_jacobi(nodes, 0.5 * (dim as f64 - 3.0));
        let s: f64 = x
            .iter()
            .zip(&w)
            .map(|(u, wi)| wi * (r * r + rho * rho - 2.0 * r * rho * u).powf(-0.5 * mu))
            .sum();
        sphere_area(dim - 1) * s
    }

    #[test]
    fn centre_point_limit() {
        for dim in 3..7 {
            let k = angular_kernel(1.0, 0.0, dim, 1.3).unwrap();
            assert!(rel(k, sphere_area(dim)) < 1e-15);
        }
    }

    #[test]
    fn three_dimensional_closed_form_value() {
        let k = angular_kernel(1.0, 0.5, 3, 1.0).unwrap();
        assert!(rel(k, 4.0 * PI) < 1e-15);
        let oracle = jacobi_oracle(1.0, 0.5, 3, 1.0, 64);
        assert!(rel(k, oracle) < 1e-12);
    }

    #[test]
    fn three_dimensional_paths_agree() {
        let kern = Kernel::new(3, 2.3, DEFAULT_ANGULAR_NODES);
        for (r, rho) in [(1.0, 0.3), (1.0, 0.45), (2.0, 0.2)] {
            let closed = kern.eval(r, rho, (r - rho).abs());
            let series = 4.0 * PI * r.max(rho).powf(-2.3) * hypergeometric(3, 2.3, (rho / r).powi(2));
            assert!(rel(closed, series) < 1e-13, "{r} {rho}");
        }
        for (r, rho) in [(1.0, 0.7), (1.0, 0.99), (1.0, 1.0 + 1e-6)] {
            let closed = kern.eval(r, rho, (r - rho).abs());
            let ang = kern.angular_integral(r, rho, (r - rho).abs());
            assert!(rel(closed, ang) < 1e-11, "{r} {rho}: {closed} vs {ang}");
        }
        // logarithmic case
        let k2 = angular_kernel(1.0, 0.5, 3, 2.0).unwrap();
        assert!(rel(k2, 2.0 * PI / 0.5 * (1.5f64 / 0.5).ln()) < 1e-15);
    }

    #[test]
    fn higher_dimensions_match_gauss_jacobi() {
        for dim in [4usize, 5, 6, 8] {
            for mu in [0.7, 1.9, dim as f64 - 1.5] {
                for (r, rho) in [(1.0, 0.2), (1.0, 0.5), (0.6, 1.0), (1.0, 0.8), (1.25, 1.0)] {
                    let k = angular_kernel(r, rho, dim, mu).unwrap();
                    let o = jacobi_oracle(r, rho, dim, mu, 120);
                    assert!(rel(k, o) < 1e-10, "N={dim} mu={mu} r={r} rho={rho}: {k} vs {o}");
                }
            }
        }
    }

    #[test]
    fn jacobi_rule_agrees_with_angular_integral() {
        for dim in [4usize, 5, 7] {
            let kern = Kernel::new(dim, 1.7, DEFAULT_ANGULAR_NODES);
            assert!(kern.rule_limit > SERIES_SWITCH);
            for t in [0.51, 0.6, 0.7, kern.rule_limit] {
                let ruled = kern.eval(1.0, t, 1.0 - t);
                let direct = kern.angular_integral(1.0, t, 1.0 - t);
                assert!(rel(ruled, direct) < 1e-12, "N={dim} t={t}: {ruled} vs {direct}");
            }
        }
        // fewer nodes shrink the range where the rule is trusted
        assert!(rule_ratio_limit(16) < rule_ratio_limit(64));
    }

    #[test]
    fn symmetric_in_radii() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let dim = rng.gen_range(3..7);
            let mu = rng.gen_range(0.1..(dim as f64 - 1.05));
            let r = rng.gen_range(0.01..10.0);
            let rho = rng.gen_range(0.01..10.0);
            let a = angular_kernel(r, rho, dim, mu).unwrap();
            let b = angular_kernel(rho, r, dim, mu).unwrap();
            assert!(a > 0.0);
            assert!(rel(a, b) < 1e-12, "{dim} {mu} {r} {rho}");
        }
    }

    #[test]
    fn diagonal_values() {
        // μ < N−1 is finite and continuous across r = ρ
        for dim in [3usize, 4, 5] {
            let mu = dim as f64 - 1.5;
            let on = angular_kernel(1.0, 1.0, dim, mu).unwrap();
            let near = angular_kernel(1.0, 1.0 + 1e-9, dim, mu).unwrap();
            assert!(on.is_finite());
            assert!(rel(on, near) < 1e-4, "{dim}: {on} {near}");
        }
        assert_eq!(angular_kernel(1.0, 1.0, 3, 2.0).unwrap(), f64::INFINITY);
        assert_eq!(angular_kernel(1.0, 1.0, 5, 4.5).unwrap(), f64::INFINITY);
    }

    #[test]
    fn harmonic_mean_value_property() {
        // μ = N − 2: average of the fundamental solution over an inner sphere
        // equals its value at the centre.
        for dim in [4usize, 5, 7] {
            let mu = dim as f64 - 2.0;
            let k = angular_kernel(2.0, 1.5, dim, mu).unwrap();
            assert!(rel(k, sphere_area(dim) * 2f64.powf(-mu)) < 1e-11);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(angular_kernel(1.0, 1.0, 3, 3.0).is_err());
        assert!(angular_kernel(0.0, 0.0, 3, 1.0).is_err());
        assert!(angular_kernel(-1.0, 1.0, 3, 1.0).is_err());
    }
}
