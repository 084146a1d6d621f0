//! Radial functions sampled on a grid, with power-law tails outside it.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::power_law::PowerLawTerm;

/// Maximum relative mismatch between a tail descriptor and the boundary
/// sample it attaches to.
pub const TAIL_CONTINUITY_TOL: f64 = 0.05;

/// Default working grid: 400 log-spaced radii over [1e-3, 1e3].
pub const DEFAULT_GRID: (f64, f64, usize) = (1e-3, 1e3, 400);

/// `n` log-spaced radii from `r_min` to `r_max` inclusive.
pub fn log_grid(r_min: f64, r_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) || n < 2 {
        return Err(Error::domain(format!(
            "log grid needs 0 < r_min < r_max and n >= 2, got [{r_min}, {r_max}], n = {n}"
        )));
    }
    let (a, b) = (r_min.ln(), r_max.ln());
    let step = (b - a) / (n - 1) as f64;
    let mut radii: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
    // pin the endpoints exactly
    radii[0] = r_min;
    radii[n - 1] = r_max;
    Ok(radii)
}

pub fn default_grid() -> Vec<f64> {
    let (lo, hi, n) = DEFAULT_GRID;
    log_grid(lo, hi, n).expect("default grid is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum Coords {
    /// Hermite cubic in (ln r, ln f); all samples positive.
    LogLog,
    /// Hermite cubic in (ln r, f).
    LogLinear,
}

/// A radial function `f(|x|)` on a strictly increasing positive grid.
///
/// Off-grid values come from a monotone (Fritsch–Butland) cubic in log–log
/// coordinates, or in (ln r, f) when some sample is not positive. Outside
/// the grid the attached tails are used; a missing tail means the function
/// is treated as zero there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct RadialProfile {
    radii: Vec<f64>,
    values: Vec<f64>,
    tail_inner: Option<PowerLawTerm>,
    tail_outer: Option<PowerLawTerm>,
    coords: Coords,
    // node ordinates and slopes in the interpolation coordinates
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    radii: Vec<f64>,
    values: Vec<f64>,
    tail_inner: Option<PowerLawTerm>,
    tail_outer: Option<PowerLawTerm>,
}

impl TryFrom<RawProfile> for RadialProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        RadialProfile::new(raw.radii, raw.values)?.with_tails(raw.tail_inner, raw.tail_outer)
    }
}

impl From<RadialProfile> for RawProfile {
    fn from(p: RadialProfile) -> Self {
        RawProfile {
            radii: p.radii,
            values: p.values,
            tail_inner: p.tail_inner,
            tail_outer: p.tail_outer,
        }
    }
}

impl RadialProfile {
    /// Samples without tails.
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() < 2 || radii.len() != values.len() {
            return Err(Error::domain(format!(
                "profile needs at least two samples and equal lengths, got {} radii and {} values",
                radii.len(),
                values.len()
            )));
        }
        if radii[0] <= 0.0 || !radii.iter().all(|r| r.is_finite()) {
            return Err(Error::domain("profile radii must be positive and finite"));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("profile radii must be strictly increasing"));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::domain("profile values must be finite"));
        }
        let coords = if values.iter().all(|&v| v > 0.0) {
            Coords::LogLog
        } else {
            Coords::LogLinear
        };
        let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = match coords {
            Coords::LogLog => values.iter().map(|v| v.ln()).collect(),
            Coords::LogLinear => values.clone(),
        };
        let slopes = monotone_slopes(&xs, &ys);
        Ok(Self {
            radii,
            values,
            tail_inner: None,
            tail_outer: None,
            coords,
            xs,
            ys,
            slopes,
        })
    }

    /// Samples `f` at `radii`.
    pub fn from_fn(radii: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = radii.iter().map(|&r| f(r)).collect();
        Self::new(radii, values)
    }

    /// Samples an exact power law and attaches it as both tails.
    pub fn from_power_law(term: PowerLawTerm, radii: Vec<f64>) -> Result<Self> {
        Self::from_fn(radii, |r| term.eval(r))?.with_tails(Some(term), Some(term))
    }

    /// Attaches tail descriptors, checking continuity with the boundary
    /// samples to within [`TAIL_CONTINUITY_TOL`].
    pub fn with_tails(
        mut self,
        inner: Option<PowerLawTerm>,
        outer: Option<PowerLawTerm>,
    ) -> Result<Self> {
        let check = |tail: &PowerLawTerm, r: f64, v: f64, side: &str| -> Result<()> {
            let t = tail.eval(r);
            let scale = v.abs().max(f64::MIN_POSITIVE);
            if !t.is_finite() || (t - v).abs() > TAIL_CONTINUITY_TOL * scale {
                return Err(Error::domain(format!(
                    "{side} tail gives {t} at r = {r}, boundary sample is {v}"
                )));
            }
            Ok(())
        };
        if let Some(t) = &inner {
            check(t, self.radii[0], self.values[0], "inner")?;
        }
        if let Some(t) = &outer {
            let n = self.radii.len() - 1;
            check(t, self.radii[n], self.values[n], "outer")?;
        }
        self.tail_inner = inner;
        self.tail_outer = outer;
        Ok(self)
    }

    /// Attaches tails fitted through the two outermost samples on each side.
    /// A side whose samples are not both positive gets no tail.
    pub fn with_fitted_tails(self) -> Self {
        let inner = self.fitted_inner_tail();
        let outer = self.fitted_outer_tail();
        self.with_tails(inner, outer)
            .expect("fitted tails pass through the boundary samples")
    }

    pub fn without_tails(mut self) -> Self {
        self.tail_inner = None;
        self.tail_outer = None;
        self
    }

    pub fn fitted_inner_tail(&self) -> Option<PowerLawTerm> {
        fit_power_law(self.radii[0], self.values[0], self.radii[1], self.values[1])
    }

    pub fn fitted_outer_tail(&self) -> Option<PowerLawTerm> {
        let n = self.radii.len();
        fit_power_law(
            self.radii[n - 2],
            self.values[n - 2],
            self.radii[n - 1],
            self.values[n - 1],
        )
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn tail_inner(&self) -> Option<PowerLawTerm> {
        self.tail_inner
    }

    pub fn tail_outer(&self) -> Option<PowerLawTerm> {
        self.tail_outer
    }

    pub fn r_min(&self) -> f64 {
        self.radii[0]
    }

    pub fn r_max(&self) -> f64 {
        self.radii[self.radii.len() - 1]
    }

    /// Value at any `r > 0`.
    pub fn eval(&self, r: f64) -> f64 {
        if r < self.r_min() {
            return self.tail_inner.map_or(0.0, |t| t.eval(r));
        }
        if r > self.r_max() {
            return self.tail_outer.map_or(0.0, |t| t.eval(r));
        }
        self.interpolate(r)
    }

    /// Value of the grid interpolant; `r` must lie in `[r_min, r_max]`.
    pub fn interpolate(&self, r: f64) -> f64 {
        let x = r.ln();
        let n = self.xs.len();
        let k = self.xs.partition_point(|&xi| xi <= x).clamp(1, n - 1) - 1;
        let h = self.xs[k + 1] - self.xs[k];
        let t = ((x - self.xs[k]) / h).clamp(0.0, 1.0);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let y = h00 * self.ys[k]
            + h10 * h * self.slopes[k]
            + h01 * self.ys[k + 1]
            + h11 * h * self.slopes[k + 1];
        match self.coords {
            Coords::LogLog => y.exp(),
            Coords::LogLinear => y,
        }
    }

    /// Pointwise map on samples; tails are dropped.
    pub fn map_values(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self
            .radii
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| f(r, v))
            .collect();
        Self::new(self.radii.clone(), values)
    }

    /// `f^p`, with tails raised to the same power.
    pub fn powf(&self, p: f64) -> Result<Self> {
        self.map_values(|_, v| v.powf(p))?
            .with_tails(self.tail_inner.map(|t| t.powf(p)), self.tail_outer.map(|t| t.powf(p)))
    }

    /// `c·f`, with tails scaled.
    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map_values(|_, v| c * v)?
            .with_tails(self.tail_inner.map(|t| t.scale(c)), self.tail_outer.map(|t| t.scale(c)))
    }

    /// Pointwise product of two profiles on the same grid.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.radii != other.radii {
            return Err(Error::domain("profiles must share a grid to be multiplied"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        let both = |a: Option<PowerLawTerm>, b: Option<PowerLawTerm>| a.zip(b).map(|(x, y)| x.mul(&y));
        Self::new(self.radii.clone(), values)?.with_tails(
            both(self.tail_inner, other.tail_inner),
            both(self.tail_outer, other.tail_outer),
        )
    }

    /// `(1−w)·self + w·other` on a shared grid; tails are refitted.
    pub fn blend(&self, other: &Self, w: f64) -> Result<Self> {
        if self.radii != other.radii {
            return Err(Error::domain("profiles must share a grid to be blended"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (1.0 - w) * a + w * b)
            .collect();
        Ok(Self::new(self.radii.clone(), values)?.with_fitted_tails())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (r, v) in self.radii.iter().zip(&self.values) {
            out.push_str(&crate::output::fmt_f64(*r));
            out.push(',');
            out.push_str(&crate::output::fmt_f64(*v));
            out.push('\n');
        }
        out
    }

    /// Reads the `r,value` CSV layout written by [`RadialProfile::to_csv`].
    /// CSV carries no tails.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut radii = Vec::new();
        let mut values = Vec::new();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim().eq_ignore_ascii_case("r,value") => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header 'r,value', found {other:?}"
                )))
            }
        }
        for (i, line) in lines.enumerate() {
            let mut cols = line.split(',');
            let parse = |c: Option<&str>| -> Result<f64> {
                c.map(str::trim)
                    .ok_or_else(|| Error::Parse(format!("line {}: missing column", i + 2)))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))
            };
            radii.push(parse(cols.next())?);
            values.push(parse(cols.next())?);
            if cols.next().is_some() {
                return Err(Error::Parse(format!("line {}: too many columns", i + 2)));
            }
        }
        Self::new(radii, values)
    }

    pub fn to_json(&self) -> Result<String> {
        crate::output::to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Loads from `.json` or `.csv` by file extension.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text),
            Some("csv") => Self::from_csv(&text),
            _ => Err(Error::Parse(format!(
                "cannot infer profile format from {}",
                path.display()
            ))),
        }
    }
}

fn fit_power_law(r0: f64, v0: f64, r1: f64, v1: f64) -> Option<PowerLawTerm> {
    if !(v0 > 0.0 && v1 > 0.0) {
        return None;
    }
    let exponent = -(v1 / v0).ln() / (r1 / r0).ln();
    let coefficient = v0 * r0.powf(exponent);
    PowerLawTerm::new(coefficient, exponent).ok()
}

/// Fritsch–Butland slopes: shape preserving, and exact for linear data.
fn monotone_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        let (d0, d1) = (delta[k - 1], delta[k]);
        if d0 == d1 {
            d[k] = d0;
        } else if d0 * d1 > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    d[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn edge_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    if m0 == m1 {
        return m0;
    }
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}
