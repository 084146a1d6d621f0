use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output::fmt_f64;
use crate::radial::RadialProfile;

/// Uniform grid on `[−L, L]^N` with `2m + 1` nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    /// `m`: nodes on each side of the origin along every axis.
    pub half_nodes: usize,
    pub extent: f64,
}

impl GridSpec {
    /// `nodes_per_axis` must be odd so that the origin is a node.
    pub fn new(dim: usize, nodes_per_axis: usize, extent: f64) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::domain(format!("grids support N = 2 or 3, got {dim}")));
        }
        if nodes_per_axis < 3 || nodes_per_axis % 2 == 0 {
            return Err(Error::domain(format!(
                "nodes per axis must be odd and at least 3, got {nodes_per_axis}"
            )));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::domain(format!("extent must be positive, got {extent}")));
        }
        Ok(Self {
            dim,
            half_nodes: nodes_per_axis / 2,
            extent,
        })
    }

    pub fn nodes_per_axis(&self) -> usize {
        2 * self.half_nodes + 1
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.half_nodes as f64
    }

    pub fn len(&self) -> usize {
        self.nodes_per_axis().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of index `i` along any axis.
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - self.half_nodes as f64) * self.spacing()
    }

    /// Axis indices of node `idx`; axis 0 (x₁) varies slowest.
    pub fn indices(&self, idx: usize) -> [usize; 3] {
        let n = self.nodes_per_axis();
        let mut out = [0; 3];
        let mut rest = idx;
        for k in (0..self.dim).rev() {
            out[k] = rest % n;
            rest /= n;
        }
        out
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let ix = self.indices(idx);
        let mut x = [0.0; 3];
        for k in 0..self.dim {
            x[k] = self.coord(ix[k]);
        }
        x
    }

    /// Stride of one step along x₁.
    pub(crate) fn x1_stride(&self) -> usize {
        self.nodes_per_axis().pow(self.dim as u32 - 1)
    }
}

/// A singular point and the radius of its exclusion ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularPoint {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Scalar field on a [`GridSpec`]; nodes inside an exclusion ball are
/// masked and hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianField {
    pub(crate) grid: GridSpec,
    pub(crate) values: Vec<f64>,
    pub(crate) mask: Vec<bool>,
    pub(crate) gamma_set: Vec<SingularPoint>,
}

impl CartesianField {
    /// Field from node values; nodes in the exclusion balls are masked.
    pub fn new(grid: GridSpec, values: Vec<f64>, gamma_set: Vec<SingularPoint>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(format!(
                "expected {} node values, got {}",
                grid.len(),
                values.len()
            )));
        }
        for g in &gamma_set {
            if g.center.len() != grid.dim || !(g.radius >= 0.0) {
                return Err(Error::domain("singular point has wrong dimension or negative radius"));
            }
        }
        let mut mask = vec![false; values.len()];
        let mut values = values;
        for idx in 0..values.len() {
            let x = grid.point(idx);
            if gamma_set.iter().any(|g| distance(&x, &g.center) <= g.radius * (1.0 + 1e-12)) {
                mask[idx] = true;
                values[idx] = f64::NAN;
            } else if !values[idx].is_finite() {
                return Err(Error::domain(format!(
                    "non-finite value outside the singular set at node {idx}"
                )));
            }
        }
        Ok(Self {
            grid,
            values,
            mask,
            gamma_set,
        })
    }

    pub fn from_fn(
        grid: GridSpec,
        f: impl Fn(&[f64]) -> f64,
        gamma_set: Vec<SingularPoint>,
    ) -> Result<Self> {
        let values = (0..grid.len())
            .map(|idx| {
                let x = grid.point(idx);
                f(&x[..grid.dim])
            })
            .map(|v| if v.is_finite() { v } else { f64::NAN })
            .collect();
        Self::new(grid, values, gamma_set)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn gamma_set(&self) -> &[SingularPoint] {
        &self.gamma_set
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    /// Largest `|u|` over unmasked nodes.
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.mask)
            .filter(|(_, m)| !**m)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max)
    }

    /// Textual form: a header
    /// `CFIELD <N> <h> <L> <k> <centre coordinates…> <radii…>`, then one
    /// node value per line in lexicographic order (`nan` when masked).
    pub fn to_text(&self) -> String {
        let g = &self.grid;
        let mut out = format!(
            "CFIELD {} {} {} {}",
            g.dim,
            fmt_f64(g.spacing()),
            fmt_f64(g.extent),
            self.gamma_set.len()
        );
        for p in &self.gamma_set {
            for c in &p.center {
                write!(out, " {}", fmt_f64(*c)).unwrap();
            }
        }
        for p in &self.gamma_set {
            write!(out, " {}", fmt_f64(p.radius)).unwrap();
        }
        out.push('\n');
        for v in &self.values {
            out.push_str(&fmt_f64(*v));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty field file".into()))?;
        let mut tok = header.split_whitespace();
        if tok.next() != Some("CFIELD") {
            return Err(Error::Parse("missing CFIELD header".into()));
        }
        let num = |s: Option<&str>| -> Result<f64> {
            s.ok_or_else(|| Error::Parse("truncated header".into()))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad header number: {e}")))
        };
        let dim = num(tok.next())? as usize;
        let h = num(tok.next())?;
        let extent = num(tok.next())?;
        let k = num(tok.next())? as usize;
        let m = (extent / h).round();
        if !(m >= 1.0 && ((extent / h) - m).abs() < 1e-9 * m) {
            return Err(Error::Parse(format!("extent {extent} is not a multiple of h = {h}")));
        }
        let grid = GridSpec::new(dim, 2 * m as usize + 1, extent)?;
        let mut centers = Vec::with_capacity(k);
        for _ in 0..k {
            let c = (0..dim).map(|_| num(tok.next())).collect::<Result<Vec<_>>>()?;
            centers.push(c);
        }
        let mut gamma_set = Vec::with_capacity(k);
        for center in centers {
            gamma_set.push(SingularPoint {
                center,
                radius: num(tok.next())?,
            });
        }
        if tok.next().is_some() {
            return Err(Error::Parse("trailing tokens in header".into()));
        }
        let values = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad node value {l:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, values, gamma_set)
    }
}

fn distance(x: &[f64; 3], c: &[f64]) -> f64 {
    c.iter()
        .zip(x)
        .map(|(c, x)| (x - c) * (x - c))
        .sum::<f64>()
        .sqrt()
}

/// `u(x) = Σ_c f(|x − c|)` with an exclusion ball of radius `h` around
/// each centre. Centres must lie on the hyperplane `{x₁ = 0}`.
pub fn sample_field(
    profile: &RadialProfile,
    centers: &[Vec<f64>],
    grid: &GridSpec,
) -> Result<CartesianField> {
    if let Some(c) = centers
        .iter()
        .find(|c| c.first().is_some_and(|x1| x1.abs() > 1e-12 * grid.extent))
    {
        return Err(Error::domain(format!(
            "singular point {c:?} is off the hyperplane x1 = 0"
        )));
    }
    sample_field_unchecked(profile, centers, grid)
}

/// [`sample_field`] without the hyperplane check, for negative tests.
pub fn sample_field_unchecked(
    profile: &RadialProfile,
    centers: &[Vec<f64>],
    grid: &GridSpec,
) -> Result<CartesianField> {
    if centers.iter().any(|c| c.len() != grid.dim) {
        return Err(Error::domain(format!("centres must have {} coordinates", grid.dim)));
    }
    let gamma_set = centers
        .iter()
        .map(|c| SingularPoint {
            center: c.clone(),
            radius: grid.spacing(),
        })
        .collect();
    CartesianField::from_fn(
        *grid,
        |x| {
            centers
                .iter()
                .map(|c| {
                    let r = c.iter().zip(x).map(|(c, x)| (x - c) * (x - c)).sum::<f64>().sqrt();
                    profile.eval(r)
                })
                .sum()
        },
        gamma_set,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power_law::PowerLawTerm;
    use crate::radial::default_grid;

    fn power(s: f64) -> RadialProfile {
        RadialProfile::from_power_law(PowerLawTerm::new(1.0, s).unwrap(), default_grid()).unwrap()
    }

    #[test]
    fn grid_layout() {
        let g = GridSpec::new(3, 5, 1.0).unwrap();
        assert_eq!(g.len(), 125);
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.point(0), [-1.0, -1.0, -1.0]);
        assert_eq!(g.point(1), [-1.0, -1.0, -0.5]);
        assert_eq!(g.point(25), [-0.5, -1.0, -1.0]);
        assert_eq!(g.indices(62), [2, 2, 2]);
        assert!(GridSpec::new(3, 4, 1.0).is_err());
        assert!(GridSpec::new(4, 5, 1.0).is_err());
    }

    #[test]
    fn radial_field_constant_on_shells() {
        let g = GridSpec::new(3, 17, 2.0).unwrap();
        let f = sample_field(&power(0.8), &[vec![0.0; 3]], &g).unwrap();
        // the seven origin-adjacent nodes are masked (radius h)
        assert_eq!(f.masked_count(), 7);
        let mut shells: std::collections::HashMap<i64, f64> = Default::default();
        for idx in 0..g.len() {
            if f.mask()[idx] {
                continue;
            }
            let ix = g.indices(idx);
            let key: i64 = ix.iter().map(|&i| (i as i64 - 8).pow(2)).sum();
            let v = f.values()[idx];
            if let Some(prev) = shells.insert(key, v) {
                assert_eq!(prev, v);
            }
        }
    }

    #[test]
    fn symmetric_pair_is_even() {
        let g = GridSpec::new(3, 17, 2.0).unwrap();
        let f = sample_field(&power(0.8), &[vec![0.0, 0.5, 0.0], vec![0.0, -0.5, 0.0]], &g).unwrap();
        let n = g.nodes_per_axis();
        for idx in 0..g.len() {
            let [i, j, k] = g.indices(idx);
            let mirror1 = ((n - 1 - i) * n + j) * n + k;
            let mirror2 = (i * n + (n - 1 - j)) * n + k;
            let v = f.values()[idx];
            for m in [mirror1, mirror2] {
                let w = f.values()[m];
                assert!(v == w || (v.is_nan() && w.is_nan()));
            }
        }
    }

    #[test]
    fn empty_centres_mask_nothing() {
        let g = GridSpec::new(2, 9, 1.0).unwrap();
        let f = sample_field(&power(0.5), &[], &g).unwrap();
        assert_eq!(f.masked_count(), 0);
    }

    #[test]
    fn off_plane_centre_rejected() {
        let g = GridSpec::new(3, 9, 1.0).unwrap();
        let err = sample_field(&power(0.5), &[vec![0.5, 0.0, 0.0]], &g).unwrap_err();
        assert!(err.to_string().contains("hyperplane"));
        assert!(sample_field_unchecked(&power(0.5), &[vec![0.5, 0.0, 0.0]], &g).is_ok());
    }

    #[test]
    fn text_round_trip() {
        let g = GridSpec::new(2, 9, 1.0).unwrap();
        let f = sample_field(&power(0.7), &[vec![0.0, 0.25]], &g).unwrap();
        let text = f.to_text();
        assert!(text.starts_with("CFIELD 2 "));
        let back = CartesianField::from_text(&text).unwrap();
        assert_eq!(back.mask(), f.mask());
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!(a == b || (a.is_nan() && b.is_nan()));
        }
        assert_eq!(back.gamma_set(), f.gamma_set());
        assert!(CartesianField::from_text("FIELD 2").is_err());
        assert!(CartesianField::from_text(&text.replace("CFIELD 2", "CFIELD 3")).is_err());
    }
}
