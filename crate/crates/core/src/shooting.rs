//! Shooting for the power nonlinearity
//!
//! ```text
//! C(n-1,k-1)/k (u_s^k s^n)_s s^{1-n} = (-u)^p,   u(0) = -m,
//! ```
//!
//! as the first-order system `q = u_s^k s^n`, `q_s = (k/C)(-u)^p s^{n-1}`,
//! `u_s = (q/s^n)^{1/k}`, integrated in `x = log s` with state `(u, log q)`.
//!
//! Scaling: if `u` solves the equation then so does `mu u(R s)` whenever
//! `mu^{k-p} R^k = 1`. Hence the solution with centre value `-m` is
//! `u_m(s) = m u_1(m^{(p-k)/k} s)`, and its first zero is
//! `R(m) = R(1) m^{-(p-k)/k}`. A zero for one `m` gives a zero for all, and a
//! solution vanishing at `R` rescales to the unit ball by
//! `V(sigma) = R^{k/(p-k)} u(R sigma)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::ProblemSpec;
use crate::error::{invalid, Result};
use crate::exact::binomial_f64;
use crate::numerics::log_grid;
use crate::ode::{Control, DenseStep, Dopri5};
use crate::profile::RadialProfile;

/// Radius where the series start is applied.
pub const SERIES_START: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Points of the returned profile, log-spaced from the series start.
    pub profile_points: usize,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            abs_tol: 1e-18,
            profile_points: 2000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShootingStatus {
    ZeroFound,
    NoZeroWithinCap,
}

impl fmt::Display for ShootingStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShootingStatus::ZeroFound => "zero-found",
            ShootingStatus::NoZeroWithinCap => "no-zero-within-cap",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShootingResult {
    pub spec: ProblemSpec,
    pub p: f64,
    pub m: f64,
    pub s_cap: f64,
    /// Profile on `[SERIES_START, s_stop]`.
    pub profile: RadialProfile,
    pub first_zero: Option<f64>,
    pub status: ShootingStatus,
    /// `p = k`: the eigenvalue regime, whose existence theory is not covered.
    pub eigenvalue_regime: bool,
    /// `u` at the end of the integration; zero when a zero was found. For
    /// `p >= gamma` a verdict is only meaningful while this stays well above
    /// the rounding floor, about `1e-13 m`.
    pub tail_value: f64,
}

/// `u_s(0+) = (k m^p / (n C(n-1,k-1)))^{1/k}`.
pub fn initial_slope(spec: ProblemSpec, p: f64, m: f64) -> f64 {
    let c = binomial_f64(spec.n() - 1, spec.k() - 1);
    (spec.kf() * m.powf(p) / (spec.nf() * c)).powf(1.0 / spec.kf())
}

pub fn shoot_power(spec: ProblemSpec, p: f64, m: f64, s_cap: f64) -> Result<ShootingResult> {
    shoot_power_with(spec, p, m, s_cap, &ShootingConfig::default())
}

pub fn shoot_power_with(
    spec: ProblemSpec,
    p: f64,
    m: f64,
    s_cap: f64,
    config: &ShootingConfig,
) -> Result<ShootingResult> {
    if !(p > 0.0) || !p.is_finite() {
        return invalid(format!("exponent p must be positive, got {p}"));
    }
    if !(m > 0.0) || !m.is_finite() {
        return invalid(format!("centre depth m must be positive, got {m}"));
    }
    if !(s_cap > 10.0 * SERIES_START) || !s_cap.is_finite() {
        return invalid(format!("s_cap must exceed {}, got {s_cap}", 10.0 * SERIES_START));
    }
    let (n, k) = (spec.nf(), spec.kf());
    let c = binomial_f64(spec.n() - 1, spec.k() - 1);
    let slope = initial_slope(spec, p, m);
    let x0 = SERIES_START.ln();
    let y0 = [-m + slope * SERIES_START, k * slope.ln() + n * x0];
    let rhs = move |x: f64, y: &[f64; 2]| {
        let depth = (-y[0]).max(0.0);
        [
            ((1.0 - n / k) * x + y[1] / k).exp(),
            k / c * depth.powf(p) * (n * x - y[1]).exp(),
        ]
    };

    let solver = Dopri5 {
        rel_tol: config.rel_tol,
        abs_tol: config.abs_tol,
        ..Dopri5::default()
    };
    let mut steps: Vec<DenseStep<2>> = Vec::new();
    let mut zero: Option<f64> = None;
    let sol = solver.integrate(rhs, x0, y0, s_cap.ln(), |st| {
        steps.push(st.clone());
        if st.y1[0] >= 0.0 {
            let xz = st.locate(|_, y| y[0]).unwrap_or(st.t1);
            zero = Some(xz);
            return Control::StopAt(xz);
        }
        Control::Continue
    })?;

    let mut x_stop = sol.t;
    if let Some(xz) = zero {
        // The crossing step straddles the kink of max(-u, 0)^p; redo it so
        // that no step reaches past the zero, refining the zero by Newton.
        let start = steps.pop().expect("a crossing step");
        let mut target = xz;
        let mut redo: Vec<DenseStep<2>> = Vec::new();
        for _ in 0..4 {
            redo.clear();
            let end = solver.integrate(rhs, start.t0, start.y0, target, |st| {
                redo.push(st.clone());
                Control::Continue
            })?;
            let u_x = rhs(end.t, &end.y)[0];
            let next = target - end.y[0] / u_x;
            if (next - target).abs() <= 1e-15 * target.abs().max(1.0) {
                break;
            }
            target = next;
        }
        steps.extend(redo);
        x_stop = target;
        zero = Some(target);
    }
    let s_stop = if zero.is_some() { x_stop.exp() } else { s_cap };
    let grid = log_grid(SERIES_START, s_stop, config.profile_points)?;
    let mut u = Vec::with_capacity(grid.len());
    let mut us = Vec::with_capacity(grid.len());
    for &s in &grid {
        let x = s.ln().clamp(x0, x_stop);
        let i = steps.partition_point(|st| st.t1 < x).min(steps.len() - 1);
        let y = steps[i].eval(x);
        u.push(y[0]);
        us.push(((y[1] - n * x) / k).exp());
    }
    let last = grid.len() - 1;
    if zero.is_some() {
        u[last] = 0.0;
    }
    let tail_value = u[last];
    let profile = RadialProfile::new(grid, u, us, None)?;
    Ok(ShootingResult {
        spec,
        p,
        m,
        s_cap,
        profile,
        first_zero: zero.map(f64::exp),
        status: if zero.is_some() {
            ShootingStatus::ZeroFound
        } else {
            ShootingStatus::NoZeroWithinCap
        },
        eigenvalue_regime: p == k,
        tail_value,
    })
}

/// First zero for centre depth `m`, from the zero for depth `1`.
pub fn zero_radius_for_depth(spec: ProblemSpec, p: f64, r_unit_depth: f64, m: f64) -> f64 {
    r_unit_depth * m.powf(-(p - spec.kf()) / spec.kf())
}

/// `V(sigma) = R^{k/(p-k)} u(R sigma)` on `(0, 1]`, which solves the same
/// equation with `V(1) = 0`.
pub fn rescale_to_unit_ball(result: &ShootingResult) -> Result<RadialProfile> {
    let Some(r) = result.first_zero else {
        return invalid("no zero was found, nothing to rescale");
    };
    let k = result.spec.kf();
    if result.p == k {
        return invalid("p = k has no scaling normalisation");
    }
    let mu = r.powf(k / (result.p - k));
    let pr = &result.profile;
    let mut grid: Vec<f64> = pr.grid.iter().map(|s| s / r).collect();
    let last = grid.len() - 1;
    grid[last] = 1.0;
    let u = pr.u.iter().map(|v| mu * v).collect();
    let us = pr.us.iter().map(|v| mu * r * v).collect();
    RadialProfile::new(grid, u, us, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::critical_exponent;
    use approx::assert_relative_eq;

    fn spec(n: u32, k: u32) -> ProblemSpec {
        ProblemSpec::new(n, k).unwrap()
    }

    /// For k = 1 and p = (n+1)/(n-1), `-u = m (1 + b m^{2/(n-1)} s)^{-(n-1)}`
    /// with `b = 1/(n(n-1))` is an exact solution.
    fn bubble(n: u32, m: f64, s: f64) -> f64 {
        let nf = n as f64;
        let b = 1.0 / (nf * (nf - 1.0));
        -m * (1.0 + b * m.powf(2.0 / (nf - 1.0)) * s).powf(-(nf - 1.0))
    }

    #[test]
    fn critical_case_matches_the_bubble() {
        // n = 2, 3 keep |u(1e6)| well above the double-precision floor
        for n in [2u32, 3] {
            let p = (n as f64 + 1.0) / (n as f64 - 1.0);
            for m in [1.0, 2.5] {
                let r = shoot_power(spec(n, 1), p, m, 1e6).unwrap();
                assert_eq!(r.status, ShootingStatus::NoZeroWithinCap);
                let pr = &r.profile;
                for (s, u) in pr.grid.iter().zip(&pr.u) {
                    let exact = bubble(n, m, *s);
                    let err = (u - exact).abs();
                    assert!(err <= 1e-12 * m && err <= 1e-3 * exact.abs(), "n {n} m {m} s {s}: {err}");
                }
                assert_relative_eq!(r.tail_value, bubble(n, m, 1e6), max_relative = 1e-2);
            }
        }
    }

    #[test]
    fn series_start() {
        let s = spec(6, 2);
        let r = shoot_power(s, 2.0, 1.0, 1e3).unwrap();
        assert_relative_eq!(r.profile.u[0], -1.0, max_relative = 1e-9);
        assert_relative_eq!(r.profile.us[0], initial_slope(s, 2.0, 1.0), max_relative = 1e-8);
        // (k m^p / (n C))^{1/k} = (2 / (6 * 5))^{1/2}
        assert_relative_eq!(initial_slope(s, 2.0, 1.0), (2.0f64 / 30.0).sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn subcritical_and_critical_examples() {
        let s = spec(2, 1);
        let r = shoot_power(s, 2.0, 1.0, 1e6).unwrap();
        assert_eq!(r.status, ShootingStatus::ZeroFound);
        let z = r.first_zero.unwrap();
        assert!(z > 0.0 && z < 1e6);
        assert!(r.profile.u[..r.profile.len() - 1].iter().all(|u| *u < 0.0));
        let r = shoot_power(s, 3.0, 1.0, 1e6).unwrap();
        assert_eq!(r.status, ShootingStatus::NoZeroWithinCap);
        assert!(r.first_zero.is_none());
    }

    #[test]
    fn eigenvalue_regime_is_flagged() {
        let r = shoot_power(spec(3, 2), 2.0, 1.0, 1e4).unwrap();
        assert!(r.eigenvalue_regime);
        assert!(rescale_to_unit_ball(&r).is_err());
        assert!(!shoot_power(spec(3, 2), 2.5, 1.0, 1e2).unwrap().eigenvalue_regime);
    }

    #[test]
    fn rejects_bad_arguments() {
        let s = spec(3, 1);
        assert!(shoot_power(s, 1.5, 0.0, 1e3).is_err());
        assert!(shoot_power(s, 1.5, -1.0, 1e3).is_err());
        assert!(shoot_power(s, 0.0, 1.0, 1e3).is_err());
        assert!(shoot_power(s, 1.5, 1.0, 1e-12).is_err());
    }

    #[test]
    fn zero_radius_scaling_law() {
        for (n, k, p) in [(2u32, 1u32, 2.0), (3, 2, 2.5), (6, 2, 3.0), (4, 1, 1.2)] {
            let s = spec(n, k);
            let r1 = shoot_power(s, p, 1.0, 1e8).unwrap().first_zero.unwrap();
            for m in [0.3, 4.0] {
                let rm = shoot_power(s, p, m, 1e8).unwrap().first_zero.unwrap();
                assert_relative_eq!(rm, zero_radius_for_depth(s, p, r1, m), max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn rescaled_profile_solves_unit_problem() {
        // (-u)^p is only C^{floor(p)} at the zero, which limits the stencil
        // near s = 1 for fractional p
        for (n, k, p, s_max) in [(2u32, 1u32, 2.0, 1.0), (3, 2, 3.0, 1.0), (6, 2, 3.0, 1.0), (3, 2, 2.5, 0.9)] {
            let s = spec(n, k);
            let r = shoot_power(s, p, 1.0, 1e6).unwrap();
            let v = rescale_to_unit_ball(&r).unwrap();
            v.require_unit_ball().unwrap();
            let mut worst: f64 = 0.0;
            for i in crate::profile::interior_indices(&v).filter(|&i| v.grid[i] <= s_max) {
                let f = (-v.u[i]).max(0.0).powf(p);
                let sk = crate::profile::radial_hessian(s, &v, i).unwrap();
                worst = worst.max((sk - f).abs() / (1.0 + f));
            }
            assert!(worst < 1e-5, "({n},{k}) p {p}: {worst}");
        }
    }

    #[test]
    fn dichotomy_at_critical_exponent() {
        for (n, k) in [(2u32, 1u32), (3, 1), (3, 2), (6, 2)] {
            let s = spec(n, k);
            let g = critical_exponent(s).to_f64();
            let below = shoot_power(s, 0.8 * g, 1.0, 1e6).unwrap();
            assert_eq!(below.status, ShootingStatus::ZeroFound, "({n},{k})");
            for p in [g, 1.2 * g] {
                let r = shoot_power(s, p, 1.0, 1e6).unwrap();
                let tail = *r.profile.u.last().unwrap();
                assert_eq!(r.status, ShootingStatus::NoZeroWithinCap, "({n},{k}) p {p}: tail {tail}");
            }
        }
    }

    #[test]
    fn weak_form_and_pointwise_bound_on_shooting_profiles() {
        let tests: [(fn(f64) -> f64, fn(f64) -> f64); 5] = [
            (|x| 1.0 - x, |_| -1.0),
            (|x| (1.0 - x).powi(2), |x| -2.0 * (1.0 - x)),
            (|x| x * (1.0 - x), |x| 1.0 - 2.0 * x),
            (|x| 1.0 - x.powi(3), |x| -3.0 * x * x),
            (|x| (1.0 - x) * (1.0 + 2.0 * x * x), |x| -1.0 + 4.0 * x - 6.0 * x * x),
        ];
        for (n, k, p) in [(2u32, 1u32, 2.0), (3, 2, 2.5), (6, 2, 3.0), (3, 1, 1.5)] {
            let s = spec(n, k);
            let v = rescale_to_unit_ball(&shoot_power(s, p, 1.0, 1e6).unwrap()).unwrap();
            for (phi, dphi) in tests {
                let wf = crate::profile::weak_form_check(s, &v, p, phi, dphi).unwrap();
                assert!(wf.residual <= 1e-6, "({n},{k}) p {p}: {wf:?}");
            }
            let ratio = crate::profile::pointwise_bound_check(s, &v).unwrap();
            assert!(ratio <= 1.0 + 1e-8 && ratio > 0.0, "({n},{k}) p {p}: {ratio}");
        }
    }

    #[test]
    fn first_zero_grows_towards_the_critical_exponent() {
        for (n, k) in [(2u32, 1u32), (3, 2), (6, 2)] {
            let s = spec(n, k);
            let g = critical_exponent(s).to_f64();
            let zeros: Vec<f64> = [0.6, 0.7, 0.8, 0.9]
                .iter()
                .map(|f| shoot_power(s, f * g, 1.0, 1e12).unwrap().first_zero.unwrap())
                .collect();
            assert!(zeros.windows(2).all(|w| w[1] > w[0]), "({n},{k}): {zeros:?}");
        }
    }
}
