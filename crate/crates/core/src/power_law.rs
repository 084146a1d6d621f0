//! Closed-form calculus on power laws `c·|x|^{-a}`.
//!
//! Everything here is exact algebra on exponents and gamma quotients: the
//! Laplacian of a power law, its Riesz potential, the parameter system that
//! makes `A|x|^{-s}` a solution of the Hartree model problem
//!
//! ```text
//! -Δu = ( ∫ |u(y)|^p |x-y|^{-μ} dy ) |u(x)|^q ,
//! ```
//!
//! and the Hardy–Littlewood–Sobolev exponent bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::special_fn::riesz_gamma;

/// Gamma-quotient arguments closer than this to 0 or N are rejected.
pub const DEGENERATE_MARGIN: f64 = 1e-9;

/// `coefficient · |x|^{-exponent}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawTerm {
    pub coefficient: f64,
    pub exponent: f64,
}

impl PowerLawTerm {
    pub fn new(coefficient: f64, exponent: f64) -> Result<Self> {
        if coefficient.is_finite() && exponent.is_finite() {
            Ok(Self {
                coefficient,
                exponent,
            })
        } else {
            Err(Error::domain(format!(
                "power law needs finite coefficient and exponent, got {coefficient}, {exponent}"
            )))
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.coefficient * r.powf(-self.exponent)
    }

    /// `(c r^{-a})^p = c^p r^{-ap}`.
    pub fn powf(&self, p: f64) -> Self {
        Self {
            coefficient: self.coefficient.powf(p),
            exponent: self.exponent * p,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            coefficient: self.coefficient * c,
            exponent: self.exponent,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            coefficient: self.coefficient * other.coefficient,
            exponent: self.exponent + other.exponent,
        }
    }
}

/// `−Δ|x|^{-s} = s(N−2−s)|x|^{-s-2}` away from the origin.
pub fn laplacian_power(s: f64, dim: usize) -> PowerLawTerm {
    let n = dim as f64;
    PowerLawTerm {
        coefficient: s * (n - 2.0 - s),
        exponent: s + 2.0,
    }
}

fn check_gamma_arg(name: &str, value: f64, dim: usize) -> Option<Violation> {
    let n = dim as f64;
    if value > DEGENERATE_MARGIN && value < n - DEGENERATE_MARGIN {
        None
    } else {
        Some(Violation::new(
            format!("0<{name}<N"),
            format!("{name} = {value} must lie in (0, {n}) away from the endpoints"),
        ))
    }
}

/// Riesz potential of a power law:
/// `I_α(|x|^{-a}) = γ(N−a)/γ(N−a+α) · |x|^{-(a−α)}` for `0 < α < a < N`.
pub fn riesz_power(alpha: f64, a: f64, dim: usize) -> Result<PowerLawTerm> {
    if dim < 3 {
        return Err(Error::domain(format!("dimension must be at least 3, got {dim}")));
    }
    let n = dim as f64;
    if !(alpha > 0.0 && alpha < n) {
        return Err(Error::domain(format!("0 < alpha < N violated: alpha = {alpha}, N = {n}")));
    }
    if !(alpha < a) {
        return Err(Error::domain(format!("alpha < a violated: alpha = {alpha}, a = {a}")));
    }
    if !(a < n) {
        return Err(Error::domain(format!("a < N violated: a = {a}, N = {n}")));
    }
    let lo = n - a;
    let hi = n - a + alpha;
    if let Some(v) = check_gamma_arg("N-a", lo, dim).or_else(|| check_gamma_arg("N-a+alpha", hi, dim)) {
        return Err(Error::domain(v.to_string()));
    }
    Ok(PowerLawTerm {
        coefficient: riesz_gamma(lo, dim)? / riesz_gamma(hi, dim)?,
        exponent: a - alpha,
    })
}

/// Lebesgue target exponent of the Riesz mapping `I_α : L^p → L^{Np/(N−αp)}`,
/// valid for `1 < p < ∞` and `αp < N`.
pub fn riesz_mapping_exponent(p: f64, alpha: f64, dim: usize) -> Result<f64> {
    let n = dim as f64;
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("alpha > 0 violated: alpha = {alpha}")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("1 < p < inf violated: p = {p}")));
    }
    if !(alpha * p < n) {
        return Err(Error::domain(format!("alpha*p < N violated: alpha*p = {}", alpha * p)));
    }
    Ok(n * p / (n - alpha * p))
}

/// Parameters of the explicit singular solution `u(x) = A|x|^{-s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub dim: usize,
    pub mu: f64,
    pub p: f64,
    pub q: f64,
    /// Decay exponent, `s = (N−μ+2)/(p+q−1)`.
    pub s: f64,
    /// Amplitude `A > 0`.
    pub amplitude: f64,
    /// Whether `N−2 < μ < N`, the range covered by the symmetry result.
    pub symmetry_range: bool,
}

impl ModelParams {
    pub fn profile(&self) -> PowerLawTerm {
        PowerLawTerm {
            coefficient: self.amplitude,
            exponent: self.s,
        }
    }
}

/// The decay exponent `(N−μ+2)/(p+q−1)` forced by matching powers of |x|.
pub fn decay_exponent(dim: usize, mu: f64, p: f64, q: f64) -> f64 {
    (dim as f64 - mu + 2.0) / (p + q - 1.0)
}

/// The misprinted variant `(N−μ+2)/(p−q+1)` of the decay exponent. It does
/// not satisfy the power matching unless `q = 1`; kept so that reports can
/// show the discrepancy. `None` when `p − q + 1 = 0`.
pub fn misprinted_decay_exponent(dim: usize, mu: f64, p: f64, q: f64) -> Option<f64> {
    let den = p - q + 1.0;
    (den != 0.0).then(|| (dim as f64 - mu + 2.0) / den)
}

/// `A^{p+q−1} = s(N−2−s) γ(N−2+s(q−1)) / (γ(N−μ) γ(N−sp))`, or `None` when
/// any gamma argument leaves (0, N).
pub fn amplitude_power(dim: usize, mu: f64, p: f64, q: f64, s: f64) -> Option<f64> {
    let n = dim as f64;
    let num = riesz_gamma(n - 2.0 + s * (q - 1.0), dim).ok()?;
    let den = riesz_gamma(n - mu, dim).ok()? * riesz_gamma(n - s * p, dim).ok()?;
    Some(s * (n - 2.0 - s) * num / den)
}

/// Solve for `(s, A)` and validate every constraint, collecting all
/// violations rather than stopping at the first.
pub fn solve_params(dim: usize, mu: f64, p: f64, q: f64) -> Result<ModelParams> {
    let n = dim as f64;
    let mut bad = Vec::new();

    if dim < 3 {
        bad.push(Violation::new("N>=3", format!("N = {dim}")));
    }
    if !(mu > 0.0 && mu < n) {
        bad.push(Violation::new("0<mu<N", format!("mu = {mu}, N = {n}")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        bad.push(Violation::new("p>=1", format!("p = {p}")));
    }
    if !(q >= 1.0 && q.is_finite()) {
        bad.push(Violation::new("q>=1", format!("q = {q}")));
    }
    if !(p + q > 1.0) {
        bad.push(Violation::new("p+q>1", format!("p + q = {}", p + q)));
    }
    if !bad.is_empty() {
        return Err(Error::Validation(bad));
    }

    let s = decay_exponent(dim, mu, p, q);
    let sp = s * p;
    let sq1 = s * (q - 1.0);

    if !(sp > 0.0 && sp < n) {
        bad.push(Violation::new("0<sp<N", format!("sp = {sp}, N = {n}")));
    }
    if !(sq1 > 2.0 - n && sq1 < 2.0) {
        bad.push(Violation::new("2-N<s(q-1)<2", format!("s(q-1) = {sq1}, 2-N = {}", 2.0 - n)));
    }
    if !(s > 0.0 && s < n - 2.0) {
        bad.push(Violation::new("0<s<N-2", format!("s = {s}, N-2 = {}", n - 2.0)));
    }
    if !bad.is_empty() {
        return Err(Error::Validation(bad));
    }
    // inside the open windows, but possibly too close to an endpoint
    for (name, arg) in [
        ("N-2+s(q-1)", n - 2.0 + sq1),
        ("N-mu", n - mu),
        ("N-sp", n - sp),
    ] {
        bad.extend(check_gamma_arg(name, arg, dim));
    }
    if !bad.is_empty() {
        return Err(Error::Validation(bad));
    }

    let power = amplitude_power(dim, mu, p, q, s)
        .ok_or_else(|| Error::Validation(vec![Violation::new("A>0", "gamma quotient undefined")]))?;
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::Validation(vec![Violation::new(
            "A>0",
            format!("A^(p+q-1) = {power}"),
        )]));
    }
    let amplitude = power.powf(1.0 / (p + q - 1.0));

    Ok(ModelParams {
        dim,
        mu,
        p,
        q,
        s,
        amplitude,
        symmetry_range: mu > n - 2.0 && mu < n,
    })
}

/// Lower and upper critical exponents `((2N−μ)/N, (2N−μ)/(N−2))`.
pub fn critical_exponents(dim: usize, mu: f64) -> Result<(f64, f64)> {
    if dim < 3 {
        return Err(Error::domain(format!("dimension must be at least 3, got {dim}")));
    }
    let n = dim as f64;
    if !(mu > 0.0 && mu < n) {
        return Err(Error::domain(format!("0 < mu < N violated: mu = {mu}, N = {n}")));
    }
    Ok(((2.0 * n - mu) / n, (2.0 * n - mu) / (n - 2.0)))
}

/// Exponent pair for the Hardy–Littlewood–Sobolev bound with
/// `1/t + 1/r + μ/N = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HlsExponents {
    pub t: f64,
    pub r: f64,
    pub mu: f64,
    pub dim: usize,
}

/// Conjugate exponent `r = 1/(2 − 1/t − μ/N)`, subject to
/// `1 − 1/t − μ/N < 0 < 1 − 1/t` (equivalently `t > 1` and `r > 1`).
pub fn hls_conjugate(t: f64, mu: f64, dim: usize) -> Result<HlsExponents> {
    if dim == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    let n = dim as f64;
    if !(mu > 0.0 && mu < n) {
        return Err(Error::domain(format!("0 < mu < N violated: mu = {mu}, N = {n}")));
    }
    if !(t.is_finite() && 1.0 - 1.0 / t > 0.0) {
        return Err(Error::domain(format!("0 < 1-1/t violated: t = {t}")));
    }
    let lower = 1.0 - 1.0 / t - mu / n;
    if !(lower < 0.0) {
        return Err(Error::domain(format!(
            "1-1/t-mu/N < 0 violated (r would be <= 1): 1-1/t-mu/N = {lower}"
        )));
    }
    let r = 1.0 / (2.0 - 1.0 / t - mu / n);
    if !(r > 1.0) {
        return Err(Error::domain(format!("r > 1 violated: r = {r}")));
    }
    Ok(HlsExponents { t, r, mu, dim })
}
