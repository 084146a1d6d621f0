//! Gauss–Jacobi rules for the symmetric weight `(1 − x²)^γ` on [−1, 1].

use crate::special_fn::{ln_gamma, GammaArg};

/// `P_n^{(γ,γ)}(x)` and `P_{n−1}^{(γ,γ)}(x)` by the three-term recurrence.
fn jacobi_pair(n: usize, g: f64, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = (g + 1.0) * x;
    if n == 0 {
        return (p0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + 2.0 * g;
        let a = 2.0 * k * (k + 2.0 * g) * (s - 2.0);
        let b = (s - 1.0) * s * (s - 2.0);
        let c = 2.0 * (k + g - 1.0).powi(2) * s;
        let p2 = (b * x * p1 - c * p0) / a;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Nodes and weights of the `n`-point rule, `γ > −1`. Nodes ascend.
pub(crate) fn gauss_jacobi(n: usize, g: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && g > -1.0);
    let nf = n as f64;
    let ln_norm = (2.0 * g + 1.0) * std::f64::consts::LN_2
        + 2.0 * lg(nf + g + 1.0)
        - lg(nf + 1.0)
        - lg(nf + 2.0 * g + 1.0);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 1..=n {
        let theta = std::f64::consts::PI * (k as f64 - 0.25 + 0.5 * g) / (nf + g + 0.5);
        let mut x = theta.cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, pm1) = jacobi_pair(n, g, x);
            dp = (-nf * x * p + (nf + g) * pm1) / (1.0 - x * x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (p, pm1) = jacobi_pair(n, g, x);
        if p != 0.0 {
            dp = (-nf * x * p + (nf + g) * pm1) / (1.0 - x * x);
        }
        nodes.push(x);
        weights.push((ln_norm - (1.0 - x * x).ln() - 2.0 * dp.abs().ln()).exp());
    }
    // the guesses run from x≈1 downwards
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn lg(z: f64) -> f64 {
    ln_gamma(GammaArg::new(z).expect("positive"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::gamma;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn moment0(g: f64) -> f64 {
        let gm = |z: f64| gamma(GammaArg::new(z).unwrap());
        std::f64::consts::PI.sqrt() * gm(g + 1.0) / gm(g + 1.5)
    }

    #[test]
    fn matches_golub_welsch() {
        for &(n, g) in &[(5usize, 0.0), (16, 0.5), (64, 1.0), (64, 2.5), (200, 1.5)] {
            let (x, w) = gauss_jacobi(n, g);
            let mut j = DMatrix::<f64>::zeros(n, n);
            for k in 1..n {
                let kf = k as f64;
                let b2 = kf * (kf + 2.0 * g) / ((2.0 * kf + 2.0 * g + 1.0) * (2.0 * kf + 2.0 * g - 1.0));
                j[(k, k - 1)] = b2.sqrt();
                j[(k - 1, k)] = b2.sqrt();
            }
            let eig = SymmetricEigen::new(j);
            let mut pairs: Vec<(f64, f64)> = (0..n)
                .map(|i| (eig.eigenvalues[i], moment0(g) * eig.eigenvectors[(0, i)].powi(2)))
                .collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            for i in 0..n {
                assert!((x[i] - pairs[i].0).abs() < 1e-13, "n={n} g={g} i={i}");
                assert!((w[i] - pairs[i].1).abs() < 1e-12 * pairs[i].1.max(1e-3), "n={n} g={g} i={i}");
            }
        }
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // ∫ x² (1−x²)^{1/2} dx = π/8
        let (x, w) = gauss_jacobi(10, 0.5);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert!((s - std::f64::consts::PI / 8.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[1] > p[0]));
    }
}
