use rayon::prelude::*;
use serde::Serialize;

use super::field::{CartesianField, SingularPoint};
use crate::error::{Error, Result};
use crate::output::{csv_table, to_json};

/// `k` with `λ = k·h/2`, or a domain error when `λ` is not a multiple of
/// `h/2` inside `[−L, L]`.
fn half_steps(field: &CartesianField, lambda: f64) -> Result<i64> {
    let h = field.grid.spacing();
    let x = 2.0 * lambda / h;
    let k = x.round();
    let m = field.grid.half_nodes as f64;
    if !((x - k).abs() <= 1e-9 * k.abs().max(1.0)) || k.abs() > 2.0 * m {
        return Err(Error::domain(format!(
            "lambda = {lambda} is not a multiple of h/2 = {} within [-L, L]",
            0.5 * h
        )));
    }
    Ok(k as i64)
}

/// x₁-index of the mirror image of index `i` about `λ = k·h/2`.
fn mirror_index(i: usize, k: i64, m: usize) -> Option<usize> {
    let j = k + 2 * m as i64 - i as i64;
    (0..=2 * m as i64).contains(&j).then_some(j as usize)
}

/// `u_λ(x) = u(x_λ)` with `x_λ = (2λ − x₁, x₂, …)`. Nodes whose image
/// leaves the box are masked, as are images of masked nodes.
pub fn reflect(field: &CartesianField, lambda: f64) -> Result<CartesianField> {
    let k = half_steps(field, lambda)?;
    let g = field.grid;
    let m = g.half_nodes;
    let stride = g.x1_stride();
    let mut values = vec![f64::NAN; field.values.len()];
    let mut mask = vec![true; field.values.len()];
    for idx in 0..values.len() {
        let i = idx / stride;
        if let Some(j) = mirror_index(i, k, m) {
            let src = j * stride + idx % stride;
            values[idx] = field.values[src];
            mask[idx] = field.mask[src];
        }
    }
    let gamma_set = field
        .gamma_set
        .iter()
        .map(|p| {
            let mut center = p.center.clone();
            center[0] = 2.0 * lambda - center[0];
            SingularPoint {
                center,
                radius: p.radius,
            }
        })
        .collect();
    Ok(CartesianField {
        grid: g,
        values,
        mask,
        gamma_set,
    })
}

/// `sup max(u − u_λ, 0)` over unmasked pairs in `Σ_λ = {x₁ < λ}`; values
/// at or below `tol` are reported as 0.
pub fn w_plus_sup(field: &CartesianField, lambda: f64, tol: f64) -> Result<f64> {
    let k = half_steps(field, lambda)?;
    let g = field.grid;
    let m = g.half_nodes;
    let stride = g.x1_stride();
    let mut sup: f64 = 0.0;
    for i in (0..=2 * m).take_while(|&i| 2 * (i as i64 - m as i64) < k) {
        let Some(j) = mirror_index(i, k, m) else {
            continue;
        };
        for t in 0..stride {
            let (a, b) = (i * stride + t, j * stride + t);
            if field.mask[a] || field.mask[b] {
                continue;
            }
            sup = sup.max(field.values[a] - field.values[b]);
        }
    }
    Ok(if sup <= tol { 0.0 } else { sup })
}

/// One sweep direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionSweep {
    pub sup_w_plus: Vec<f64>,
    /// Largest sampled λ up to which every `sup_w_plus` is zero; `None`
    /// when the first sampled λ already fails.
    pub lambda0_estimate: Option<f64>,
    /// Smallest `u(x + h e₁) − u(x)` over unmasked pairs with `x₁ ≤ −2h`.
    pub monotonicity_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MovingPlaneReport {
    pub dim: usize,
    pub spacing: f64,
    pub extent: f64,
    pub tol: f64,
    /// The symmetry theorem needs N ≥ 3; two-dimensional runs are smoke
    /// tests only.
    pub theorem_scope: bool,
    pub lambdas: Vec<f64>,
    pub sup_w_plus: Vec<f64>,
    pub lambda0_estimate: Option<f64>,
    pub monotonicity_min: f64,
    /// The same sweep on the field mirrored in x₁, i.e. planes moving in
    /// from `x₁ = +L`.
    pub opposite: DirectionSweep,
}

impl MovingPlaneReport {
    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    /// Columns `lambda,sup_w_plus,sup_w_plus_opposite`.
    pub fn to_csv(&self) -> String {
        let rows = (0..self.lambdas.len())
            .map(|i| vec![self.lambdas[i], self.sup_w_plus[i], self.opposite.sup_w_plus[i]]);
        csv_table(&["lambda", "sup_w_plus", "sup_w_plus_opposite"], rows)
    }
}

/// `{−L, −L + h, …, −h}`.
pub fn default_lambda_grid(field: &CartesianField) -> Vec<f64> {
    let m = field.grid.half_nodes;
    let h = field.grid.spacing();
    (1..=m).rev().map(|j| -(j as f64) * h).collect()
}

/// Default zero threshold, `1e−12 · max |u|`.
pub fn default_tol(field: &CartesianField) -> f64 {
    1e-12 * field.max_abs()
}

/// Sweeps `λ` over `lambda_grid` (strictly increasing, negative,
/// commensurate) in both directions.
pub fn sweep_lambda0(
    field: &CartesianField,
    lambda_grid: &[f64],
    tol: Option<f64>,
) -> Result<MovingPlaneReport> {
    if lambda_grid.is_empty() {
        return Err(Error::domain("lambda grid is empty"));
    }
    if lambda_grid.iter().any(|&l| !(l < 0.0)) || lambda_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("lambda grid must be strictly increasing and negative"));
    }
    for &l in lambda_grid {
        half_steps(field, l)?;
    }
    let tol = tol.unwrap_or_else(|| default_tol(field));
    if !(tol >= 0.0) {
        return Err(Error::domain(format!("tolerance must be non-negative, got {tol}")));
    }
    let forward = sweep_direction(field, lambda_grid, tol)?;
    let opposite = sweep_direction(&mirror_x1(field), lambda_grid, tol)?;
    let g = field.grid;
    Ok(MovingPlaneReport {
        dim: g.dim,
        spacing: g.spacing(),
        extent: g.extent,
        tol,
        theorem_scope: g.dim >= 3,
        lambdas: lambda_grid.to_vec(),
        sup_w_plus: forward.sup_w_plus,
        lambda0_estimate: forward.lambda0_estimate,
        monotonicity_min: forward.monotonicity_min,
        opposite,
    })
}

fn sweep_direction(field: &CartesianField, lambdas: &[f64], tol: f64) -> Result<DirectionSweep> {
    let sup_w_plus = lambdas
        .par_iter()
        .map(|&l| w_plus_sup(field, l, tol))
        .collect::<Result<Vec<_>>>()?;
    let passing = sup_w_plus.iter().take_while(|s| **s == 0.0).count();
    let lambda0_estimate = passing.checked_sub(1).map(|i| lambdas[i]);
    Ok(DirectionSweep {
        sup_w_plus,
        lambda0_estimate,
        monotonicity_min: monotonicity_min(field),
    })
}

fn monotonicity_min(field: &CartesianField) -> f64 {
    let g = field.grid;
    let m = g.half_nodes;
    let stride = g.x1_stride();
    let mut min = f64::INFINITY;
    // x₁ = (i − m) h ≤ −2h
    for i in 0..m.saturating_sub(1) {
        for t in 0..stride {
            let (a, b) = (i * stride + t, (i + 1) * stride + t);
            if !(field.mask[a] || field.mask[b]) {
                min = min.min(field.values[b] - field.values[a]);
            }
        }
    }
    min
}

/// The field composed with `x₁ ↦ −x₁`.
fn mirror_x1(field: &CartesianField) -> CartesianField {
    reflect(field, 0.0).expect("0 is always commensurate")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moving_plane::field::{sample_field, sample_field_unchecked, GridSpec};
    use crate::power_law::PowerLawTerm;
    use crate::radial::{default_grid, RadialProfile};

    fn power(s: f64) -> RadialProfile {
        RadialProfile::from_power_law(PowerLawTerm::new(1.3, s).unwrap(), default_grid()).unwrap()
    }

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(3, n, 2.0).unwrap()
    }

    /// Brute-force `sup (u − u_λ)^+` from coordinates, not indices.
    fn brute_sup(field: &CartesianField, lambda: f64) -> f64 {
        let g = field.grid();
        let h = g.spacing();
        let mut sup: f64 = 0.0;
        for a in 0..g.len() {
            let x = g.point(a);
            if x[0] >= lambda || field.mask()[a] {
                continue;
            }
            let xr = 2.0 * lambda - x[0];
            let Some(b) = (0..g.len()).find(|&b| {
                let y = g.point(b);
                (y[0] - xr).abs() < 1e-9 * h && y[1] == x[1] && y[2] == x[2]
            }) else {
                continue;
            };
            if !field.mask()[b] {
                sup = sup.max(field.values()[a] - field.values()[b]);
            }
        }
        sup
    }

    #[test]
    fn reflection_is_an_involution() {
        let g = grid(9);
        let f = sample_field(&power(0.8), &[vec![0.0; 3]], &g).unwrap();
        let h = g.spacing();
        for k in -8..=8 {
            let l = 0.5 * h * k as f64;
            let twice = reflect(&reflect(&f, l).unwrap(), l).unwrap();
            let once = reflect(&f, l).unwrap();
            for idx in 0..g.len() {
                if !once.mask()[idx] {
                    let (a, b) = (twice.values()[idx], f.values()[idx]);
                    assert!(a == b || (a.is_nan() && b.is_nan()), "k={k} idx={idx}");
                    assert_eq!(twice.mask()[idx], f.mask()[idx]);
                }
            }
            assert_eq!(twice.gamma_set(), f.gamma_set());
        }
    }

    #[test]
    fn reflection_about_zero_fixes_even_fields() {
        let g = grid(9);
        let f = sample_field(&power(0.8), &[vec![0.0, 0.5, 0.0]], &g).unwrap();
        let r = reflect(&f, 0.0).unwrap();
        assert_eq!(r.mask(), f.mask());
        for (a, b) in r.values().iter().zip(f.values()) {
            assert!(a == b || (a.is_nan() && b.is_nan()));
        }
    }

    #[test]
    fn mask_follows_the_reflection() {
        let g = grid(9);
        let h = g.spacing();
        let f = sample_field(&power(0.8), &[vec![0.0; 3]], &g).unwrap();
        let r = reflect(&f, -h).unwrap();
        assert_eq!(r.gamma_set()[0].center, vec![-2.0 * h, 0.0, 0.0]);
        for idx in 0..g.len() {
            let x = g.point(idx);
            let d = ((x[0] + 2.0 * h).powi(2) + x[1] * x[1] + x[2] * x[2]).sqrt();
            if d <= h {
                assert!(r.mask()[idx]);
            }
        }
    }

    #[test]
    fn non_commensurate_lambda_rejected() {
        let g = grid(9);
        let f = sample_field(&power(0.8), &[vec![0.0; 3]], &g).unwrap();
        assert!(reflect(&f, 0.1).is_err());
        assert!(w_plus_sup(&f, -0.3, 0.0).is_err());
        assert!(reflect(&f, -2.5).is_err());
    }

    #[test]
    fn indexed_sup_matches_brute_force() {
        let g = grid(9);
        let h = g.spacing();
        let shifted = sample_field_unchecked(&power(0.8), &[vec![-0.5, 0.0, 0.0]], &g).unwrap();
        let even = sample_field(&power(0.8), &[vec![0.0, 0.5, 0.0]], &g).unwrap();
        for f in [&shifted, &even] {
            for k in -8..0 {
                let l = 0.5 * h * k as f64;
                assert_eq!(w_plus_sup(f, l, 0.0).unwrap(), brute_sup(f, l), "k={k}");
            }
        }
        assert!(w_plus_sup(&shifted, -0.5 * h, 0.0).unwrap() > 0.0);
    }

    #[test]
    fn radial_decreasing_field_has_exact_zeros() {
        let g = grid(17);
        let f = sample_field(&power(0.8), &[vec![0.0; 3]], &g).unwrap();
        let h = g.spacing();
        let lambdas: Vec<f64> = (-16..0).map(|k| 0.5 * h * k as f64).collect();
        let rep = sweep_lambda0(&f, &lambdas, Some(0.0)).unwrap();
        assert!(rep.sup_w_plus.iter().all(|s| *s == 0.0));
        assert_eq!(rep.lambda0_estimate, Some(-0.5 * h));
        assert!(rep.monotonicity_min > 0.0);
        assert_eq!(rep.opposite.lambda0_estimate, Some(-0.5 * h));
        assert!(rep.theorem_scope);
    }

    #[test]
    fn constant_field_never_fails() {
        let g = GridSpec::new(2, 11, 1.0).unwrap();
        let f = CartesianField::from_fn(g, |_| 4.0, vec![]).unwrap();
        let rep = sweep_lambda0(&f, &default_lambda_grid(&f), None).unwrap();
        assert!(rep.sup_w_plus.iter().all(|s| *s == 0.0));
        assert!(!rep.theorem_scope);
        assert_eq!(rep.monotonicity_min, 0.0);
    }

    #[test]
    fn shifted_centre_stops_the_sweep() {
        let g = grid(17);
        let h = g.spacing();
        let delta = 4.0 * h;
        let f = sample_field_unchecked(&power(0.8), &[vec![-delta, 0.0, 0.0]], &g).unwrap();
        let lambdas: Vec<f64> = (-16..0).map(|k| 0.5 * h * k as f64).collect();
        let rep = sweep_lambda0(&f, &lambdas, None).unwrap();
        assert_eq!(rep.lambda0_estimate, Some(-delta));
        // from the other side the plane stops at the centre only after x₁ = 0
        assert_eq!(rep.opposite.lambda0_estimate, Some(-0.5 * h));
    }

    #[test]
    fn sweep_validates_lambda_grid() {
        let g = grid(9);
        let f = sample_field(&power(0.8), &[vec![0.0; 3]], &g).unwrap();
        assert!(sweep_lambda0(&f, &[], None).is_err());
        assert!(sweep_lambda0(&f, &[-0.5, -1.0], None).is_err());
        assert!(sweep_lambda0(&f, &[-0.5, 0.0], None).is_err());
        assert!(sweep_lambda0(&f, &[-0.3], None).is_err());
    }

    #[test]
    fn csv_has_three_columns() {
        let g = grid(9);
        let f = sample_field(&power(0.8), &[vec![0.0; 3]], &g).unwrap();
        let rep = sweep_lambda0(&f, &default_lambda_grid(&f), None).unwrap();
        let csv = rep.to_csv();
        assert!(csv.starts_with("lambda,sup_w_plus,sup_w_plus_opposite\n"));
        assert_eq!(csv.lines().count(), 1 + rep.lambdas.len());
    }
}
