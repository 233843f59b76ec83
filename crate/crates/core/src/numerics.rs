//! Grids, finite-difference stencils and piecewise-polynomial quadrature.
//!
//! Profiles live on grids that are uniform in `t = log s`; the routines here
//! accept arbitrary strictly increasing nodes and reduce to the classical
//! centred formulas on uniform grids.

use crate::error::{invalid, Error, Result};

/// `n` points, uniform in `log s`, from `s_min` to `s_max` (both included,
/// the last one exactly).
pub fn log_grid(s_min: f64, s_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(s_min > 0.0 && s_max > s_min) {
        return invalid(format!("log grid needs 0 < s_min < s_max, got [{s_min}, {s_max}]"));
    }
    if n < 8 {
        return invalid(format!("grid needs at least 8 points, got {n}"));
    }
    let (a, b) = (s_min.ln(), s_max.ln());
    let h = (b - a) / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| (a + h * i as f64).exp()).collect();
    g[0] = s_min;
    g[n - 1] = s_max;
    Ok(g)
}

pub fn strictly_increasing(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[1] > w[0])
}

/// Fornberg's weights for the `m`-th derivative at `x0` from `nodes`.
pub fn fornberg_weights(x0: f64, nodes: &[f64], m: usize) -> Vec<f64> {
    let np = nodes.len();
    let mut c = vec![vec![0.0; m + 1]; np];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..np {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Half width of the centred derivative stencil (sixth order on uniform
/// grids).
pub const STENCIL_HALF_WIDTH: usize = 3;

/// Centred first derivative of `f` at node `i`.
pub fn centered_derivative(x: &[f64], f: &[f64], i: usize) -> Result<f64> {
    let hw = STENCIL_HALF_WIDTH;
    let available = i.min(x.len().saturating_sub(i + 1));
    if available < hw {
        return Err(Error::Stencil {
            index: i,
            needed: hw,
            available,
        });
    }
    let nodes = &x[i - hw..=i + hw];
    let w = fornberg_weights(x[i], nodes, 1);
    Ok(w.iter().zip(&f[i - hw..=i + hw]).map(|(w, v)| w * v).sum())
}

/// First derivative of `f` at node `i` from the seven nearest nodes, centred
/// where possible and one-sided near the ends.
pub fn derivative(x: &[f64], f: &[f64], i: usize) -> Result<f64> {
    let width = 2 * STENCIL_HALF_WIDTH + 1;
    if x.len() < width || x.len() != f.len() || i >= x.len() {
        return invalid(format!("derivative needs {width} nodes and a valid index"));
    }
    let start = i.saturating_sub(STENCIL_HALF_WIDTH).min(x.len() - width);
    let w = fornberg_weights(x[i], &x[start..start + width], 1);
    Ok(w.iter().zip(&f[start..start + width]).map(|(w, v)| w * v).sum())
}

// Gauss-Legendre, 3 points on [0, 1]; exact through degree 5.
const GL_NODES: [f64; 3] = [
    0.112_701_665_379_258_31,
    0.5,
    0.887_298_334_620_741_7,
];
const GL_WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

/// Number of nodes in the local interpolant used by the quadrature.
const QUAD_NODES: usize = 6;

fn lagrange_basis(nodes: &[f64], x: f64) -> [f64; QUAD_NODES] {
    std::array::from_fn(|j| {
        nodes
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != j)
            .map(|(_, &xm)| (x - xm) / (nodes[j] - xm))
            .product()
    })
}

/// Integrals of `f` over each interval `[x_i, x_{i+1}]`, from the local
/// quintic through the six nearest nodes (shifted inward at the ends).
pub fn interval_integrals(x: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    if x.len() != f.len() {
        return invalid("nodes and values differ in length");
    }
    let n = x.len();
    if n < QUAD_NODES {
        return invalid(format!("quadrature needs at least {QUAD_NODES} nodes, got {n}"));
    }
    if !strictly_increasing(x) {
        return invalid("quadrature nodes must be strictly increasing");
    }
    let mut out = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let start = i.saturating_sub(2).min(n - QUAD_NODES);
        let nodes = &x[start..start + QUAD_NODES];
        let vals = &f[start..start + QUAD_NODES];
        let (a, h) = (x[i], x[i + 1] - x[i]);
        let mut acc = 0.0;
        for (g, wg) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let basis = lagrange_basis(nodes, a + g * h);
            acc += wg * basis.iter().zip(vals).map(|(b, v)| b * v).sum::<f64>();
        }
        out.push(acc * h);
    }
    Ok(out)
}

pub fn integrate(x: &[f64], f: &[f64]) -> Result<f64> {
    Ok(interval_integrals(x, f)?.iter().sum())
}

/// `C_i = int_{x_i}^{x_last} f`.
pub fn cumulative_from_right(x: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    let parts = interval_integrals(x, f)?;
    let mut out = vec![0.0; x.len()];
    for i in (0..parts.len()).rev() {
        out[i] = out[i + 1] + parts[i];
    }
    Ok(out)
}

/// `int_{s_0}^{s_N} g(s) ds` for samples on a positive grid, integrating
/// `g(s) s` in `t = log s`.
pub fn integrate_log(s: &[f64], g: &[f64]) -> Result<f64> {
    let (t, gs) = to_log_variable(s, g)?;
    integrate(&t, &gs)
}

/// Like [`integrate_log`] but cumulative from the right end.
pub fn cumulative_log_from_right(s: &[f64], g: &[f64]) -> Result<Vec<f64>> {
    let (t, gs) = to_log_variable(s, g)?;
    cumulative_from_right(&t, &gs)
}

fn to_log_variable(s: &[f64], g: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if s.len() != g.len() {
        return invalid("grid and values differ in length");
    }
    if s.first().map_or(true, |&s0| s0 <= 0.0) {
        return invalid("log-variable quadrature needs a positive grid");
    }
    let t = s.iter().map(|v| v.ln()).collect();
    let gs = s.iter().zip(g).map(|(si, gi)| si * gi).collect();
    Ok((t, gs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_grid_endpoints_and_spacing() {
        let g = log_grid(1e-12, 1.0, 2000).unwrap();
        assert_eq!(g.len(), 2000);
        assert_eq!(g[0], 1e-12);
        assert_eq!(g[1999], 1.0);
        let h0 = (g[1] / g[0]).ln();
        let h1 = (g[1999] / g[1998]).ln();
        assert_relative_eq!(h0, h1, max_relative = 1e-9);
        assert!(log_grid(0.0, 1.0, 100).is_err());
        assert!(log_grid(1.0, 1.0, 100).is_err());
        assert!(log_grid(0.1, 1.0, 3).is_err());
    }

    #[test]
    fn fornberg_reproduces_classical_weights() {
        let nodes = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        let w = fornberg_weights(0.0, &nodes, 1);
        let expected = [-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0].map(|v| v / 60.0);
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        let w2 = fornberg_weights(0.0, &nodes[2..5], 2);
        assert!((w2[0] - 1.0).abs() < 1e-14 && (w2[1] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_is_exact_for_sextics() {
        let x: Vec<f64> = (0..20).map(|i| 0.3 * i as f64 + 0.01 * (i as f64).sin()).collect();
        let f: Vec<f64> = x.iter().map(|v| v.powi(6) - 2.0 * v.powi(3) + 1.0).collect();
        for i in 3..17 {
            let d = centered_derivative(&x, &f, i).unwrap();
            let exact = 6.0 * x[i].powi(5) - 6.0 * x[i] * x[i];
            assert_relative_eq!(d, exact, max_relative = 1e-9, epsilon = 1e-9);
        }
        assert!(matches!(
            centered_derivative(&x, &f, 2),
            Err(Error::Stencil { index: 2, .. })
        ));
        assert!(centered_derivative(&x, &f, 17).is_err());
        for i in [0, 1, 2, 17, 19] {
            let d = derivative(&x, &f, i).unwrap();
            let exact = 6.0 * x[i].powi(5) - 6.0 * x[i] * x[i];
            assert_relative_eq!(d, exact, max_relative = 1e-8, epsilon = 1e-8);
        }
    }

    #[test]
    fn quadrature_is_exact_for_quintics() {
        let x: Vec<f64> = (0..15).map(|i| (i as f64 * 0.37).powf(1.1)).collect();
        let f: Vec<f64> = x.iter().map(|v| 3.0 * v.powi(5) - v.powi(2) + 0.5).collect();
        let b = *x.last().unwrap();
        let exact = 0.5 * b.powi(6) - b.powi(3) / 3.0 + 0.5 * b;
        assert_relative_eq!(integrate(&x, &f).unwrap(), exact, max_relative = 1e-12);
        let cum = cumulative_from_right(&x, &f).unwrap();
        assert_relative_eq!(cum[0], exact, max_relative = 1e-12);
        assert_eq!(cum[14], 0.0);
    }

    #[test]
    fn quadrature_convergence_order() {
        let err = |n: usize| {
            let s = log_grid(1e-6, 1.0, n).unwrap();
            let g: Vec<f64> = s.iter().map(|v| 1.0 / (v + 0.01).powi(2)).collect();
            let exact = 1.0 / (1e-6 + 0.01) - 1.0 / 1.01;
            (integrate_log(&s, &g).unwrap() - exact).abs() / exact
        };
        let (e1, e2) = (err(200), err(400));
        assert!(e2 < e1 / 30.0, "{e1} {e2}");
        assert!(err(2000) < 1e-10);
    }

    #[test]
    fn quadrature_rejects_bad_input() {
        assert!(integrate(&[0.0, 1.0, 2.0], &[1.0, 1.0, 1.0]).is_err());
        assert!(integrate(&[0.0, 2.0, 1.0, 3.0, 4.0, 5.0], &[1.0; 6]).is_err());
        assert!(integrate_log(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], &[1.0; 6]).is_err());
    }
}
