//! Radial profiles `u(s)`, `s = |z|^2`, on the unit ball: the explicit
//! Monge-Ampere family, reconstruction from phase-plane trajectories, the
//! radial Hessian operator, quadratures, energies and the pointwise bound.

use serde::{Deserialize, Serialize};

use crate::constants::{
    energy_constant_exact, moser_trudinger, omega_exact, parameter_scale_exact,
    real_alpha_tilde_exact, volume_constant_exact, ProblemSpec,
};
use crate::error::{invalid, Error, Result};
use crate::exact::{binomial_f64, sphere_volume};
use crate::numerics::{
    centered_derivative, cumulative_from_right, cumulative_log_from_right, derivative,
    integrate_log, log_grid, strictly_increasing, STENCIL_HALF_WIDTH,
};
use crate::phase::{PhasePoint, Trajectory};

pub const DEFAULT_GRID_POINTS: usize = 2000;
pub const DEFAULT_S_MIN: f64 = 1e-12;

pub fn default_grid() -> Vec<f64> {
    log_grid(DEFAULT_S_MIN, 1.0, DEFAULT_GRID_POINTS).expect("valid default grid")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub a: f64,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub us: Vec<f64>,
    pub meta: Option<ProfileMeta>,
}

impl RadialProfile {
    pub fn new(grid: Vec<f64>, u: Vec<f64>, us: Vec<f64>, meta: Option<ProfileMeta>) -> Result<Self> {
        if grid.len() != u.len() || grid.len() != us.len() {
            return invalid("grid, u and u_s must have the same length");
        }
        if grid.len() < 2 * STENCIL_HALF_WIDTH + 1 {
            return invalid(format!("profile needs at least {} points", 2 * STENCIL_HALF_WIDTH + 1));
        }
        if !(grid[0] > 0.0) || !strictly_increasing(&grid) {
            return invalid("profile grid must be positive and strictly increasing");
        }
        if grid.iter().chain(&u).chain(&us).any(|x| !x.is_finite()) {
            return invalid("profile contains non-finite values");
        }
        Ok(Self { grid, u, us, meta })
    }

    pub fn zero(grid: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![0.0; n], vec![0.0; n], None)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn s_min(&self) -> f64 {
        self.grid[0]
    }

    /// Checks that the profile ends at `s = 1` with `u(1) = 0`.
    pub fn require_unit_ball(&self) -> Result<()> {
        let last = self.len() - 1;
        if self.grid[last] != 1.0 {
            return invalid(format!("profile must end at s = 1, ends at {}", self.grid[last]));
        }
        if self.u[last] != 0.0 {
            return invalid(format!("boundary condition u(1) = 0 violated: u(1) = {}", self.u[last]));
        }
        Ok(())
    }

    /// The profile `t u`.
    pub fn scaled(&self, t: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            u: self.u.iter().map(|v| t * v).collect(),
            us: self.us.iter().map(|v| t * v).collect(),
            meta: None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,u,u_s\n");
        for i in 0..self.len() {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", self.grid[i], self.u[i], self.us[i]));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "s,u,u_s" => {}
            _ => return Err(Error::Parse { line: 1, reason: "expected header 's,u,u_s'".into() }),
        }
        let (mut s, mut u, mut us) = (Vec::new(), Vec::new(), Vec::new());
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: i + 1,
                    reason: format!("expected 3 columns, found {}", fields.len()),
                });
            }
            let mut vals = [0.0; 3];
            for (slot, f) in vals.iter_mut().zip(&fields) {
                *slot = f.trim().parse().map_err(|_| Error::Parse {
                    line: i + 1,
                    reason: format!("not a number: {f:?}"),
                })?;
            }
            s.push(vals[0]);
            u.push(vals[1]);
            us.push(vals[2]);
        }
        Self::new(s, u, us, None)
    }
}

fn flux(spec: ProblemSpec, s: f64, us: f64) -> f64 {
    us.powi(spec.k() as i32) * s.powi(spec.n() as i32)
}

fn hessian_from_window(spec: ProblemSpec, p: &RadialProfile, i: usize, one_sided: bool) -> Result<f64> {
    let hw = STENCIL_HALF_WIDTH;
    let lo = i.saturating_sub(hw).min(p.len().saturating_sub(2 * hw + 1));
    let hi = (lo + 2 * hw + 1).min(p.len());
    let t: Vec<f64> = p.grid[lo..hi].iter().map(|s| s.ln()).collect();
    let q: Vec<f64> = (lo..hi).map(|j| flux(spec, p.grid[j], p.us[j])).collect();
    let dq_dt = if one_sided {
        derivative(&t, &q, i - lo)?
    } else {
        centered_derivative(&t, &q, i - lo).map_err(|_| Error::Stencil {
            index: i,
            needed: hw,
            available: i.min(p.len().saturating_sub(i + 1)),
        })?
    };
    let s = p.grid[i];
    let c = binomial_f64(spec.n() - 1, spec.k() - 1) / spec.kf();
    Ok(c * dq_dt / s.powi(spec.n() as i32))
}

/// `S_k` of the radial profile at grid index `i`, from the conservative form
/// `C(n-1,k-1)/k (u_s^k s^n)_s s^{1-n}` differentiated in `log s`.
pub fn radial_hessian(spec: ProblemSpec, profile: &RadialProfile, i: usize) -> Result<f64> {
    hessian_from_window(spec, profile, i, false)
}

/// Grid indices where the centred stencil fits.
pub fn interior_indices(profile: &RadialProfile) -> std::ops::Range<usize> {
    STENCIL_HALF_WIDTH..profile.len() - STENCIL_HALF_WIDTH
}

/// `max |S_k(u) - f| / (1 + |f|)` over interior grid points.
pub fn hessian_residual(spec: ProblemSpec, profile: &RadialProfile, rhs: &[f64]) -> Result<f64> {
    if rhs.len() != profile.len() {
        return invalid("right-hand side must be sampled on the profile grid");
    }
    let mut worst: f64 = 0.0;
    for i in interior_indices(profile) {
        let lhs = radial_hessian(spec, profile, i)?;
        worst = worst.max((lhs - rhs[i]).abs() / (1.0 + rhs[i].abs()));
    }
    Ok(worst)
}

/// `int_0^1 e^{-u} s^{n-1} ds`, with the part below the first grid point
/// replaced by `e^{-u(s_0)} s_0^n / n`.
pub fn normalization_integral(profile: &RadialProfile, n: u32) -> Result<f64> {
    if n == 0 {
        return invalid("dimension must be positive");
    }
    let nf = n as f64;
    let g: Vec<f64> = profile
        .grid
        .iter()
        .zip(&profile.u)
        .map(|(s, u)| (-u).exp() * s.powi(n as i32 - 1))
        .collect();
    let body = integrate_log(&profile.grid, &g)?;
    let s0 = profile.s_min();
    let tail = (-profile.u[0]).exp() * s0.powi(n as i32) / nf;
    // s^n e^{-u} must be decreasing towards the centre for the tail to be small
    let s1 = profile.grid[1];
    let next = (-profile.u[1]).exp() * s1.powi(n as i32) / nf;
    if !tail.is_finite() || !body.is_finite() || (tail > 1e-6 * (body + tail) && tail >= next) {
        return Err(Error::Quadrature(format!(
            "tail near the centre does not converge (tail {tail:e}, body {body:e})"
        )));
    }
    Ok(body + tail)
}

/// `f = a e^{-u} / int_{B_1} e^{-u} dV` on the profile grid.
pub fn exponential_rhs(spec: ProblemSpec, profile: &RadialProfile, a: f64) -> Result<Vec<f64>> {
    let vol = volume_constant_exact(spec).to_f64() * normalization_integral(profile, spec.n())?;
    Ok(profile.u.iter().map(|u| a * (-u).exp() / vol).collect())
}

/// The Fubini-Study family `u = (n+1) log((s + eps^2)/(1 + eps^2))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitMA {
    pub n: u32,
    pub eps: f64,
}

impl ExplicitMA {
    pub fn new(n: u32, eps: f64) -> Result<Self> {
        if n == 0 {
            return invalid("dimension must be positive");
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return invalid(format!("eps must be positive, got {eps}"));
        }
        Ok(Self { n, eps })
    }

    fn e2(&self) -> f64 {
        self.eps * self.eps
    }

    pub fn u(&self, s: f64) -> f64 {
        (self.n as f64 + 1.0) * ((s - 1.0) / (1.0 + self.e2())).ln_1p()
    }

    pub fn us(&self, s: f64) -> f64 {
        (self.n as f64 + 1.0) / (s + self.e2())
    }

    /// `a_eps = int_{B_1} S_n(u) dV = (n+1)^n omega_{2n-1} / (2n (1+eps^2)^n)`.
    pub fn parameter(&self) -> f64 {
        let n = self.n as i32;
        let nf = self.n as f64;
        (nf + 1.0).powi(n) * omega_exact(self.n).to_f64() / (2.0 * nf * (1.0 + self.e2()).powi(n))
    }

    /// `S_n(u)`, equal to `(n+1)^n eps^2 / (s + eps^2)^{n+1}`.
    pub fn hessian(&self, s: f64) -> f64 {
        let n = self.n as i32;
        (self.n as f64 + 1.0).powi(n) * self.e2() / (s + self.e2()).powi(n + 1)
    }

    /// `int_0^1 e^{-u} s^{n-1} ds = (1 + eps^2) / (n eps^2)`.
    pub fn normalization(&self) -> f64 {
        (1.0 + self.e2()) / (self.n as f64 * self.e2())
    }

    /// `lambda` in `(u_s^n s^n)_s s^{1-n} = lambda e^{-u}`.
    pub fn multiplier(&self) -> f64 {
        let nf = self.n as f64;
        nf * (nf + 1.0).powi(self.n as i32) * self.e2() / (1.0 + self.e2()).powi(self.n as i32 + 1)
    }

    pub fn phase_point(&self, s: f64) -> PhasePoint {
        let (nf, n) = (self.n as f64, self.n as i32);
        let r = s / (s + self.e2());
        PhasePoint::new(
            ((nf + 1.0) / nf).powi(n) * r.powi(n),
            (nf + 1.0).powi(n) / nf.powi(n - 1) * self.e2() * s.powi(n) / (s + self.e2()).powi(n + 1),
        )
    }

    pub fn profile_on(&self, grid: Vec<f64>) -> Result<RadialProfile> {
        let u = grid.iter().map(|&s| self.u(s)).collect();
        let us = grid.iter().map(|&s| self.us(s)).collect();
        let meta = ProfileMeta {
            a: self.parameter(),
            lambda: self.multiplier(),
        };
        RadialProfile::new(grid, u, us, Some(meta))
    }
}

/// The explicit profile on the default grid with its parameter `a_eps`.
pub fn explicit_ma(n: u32, eps: f64) -> Result<(RadialProfile, f64)> {
    let fam = ExplicitMA::new(n, eps)?;
    Ok((fam.profile_on(default_grid())?, fam.parameter()))
}

pub fn explicit_ma_phase(n: u32, eps: f64, s: f64) -> Result<PhasePoint> {
    if !(s > 0.0 && s <= 1.0) {
        return invalid(format!("s must lie in (0, 1], got {s}"));
    }
    Ok(ExplicitMA::new(n, eps)?.phase_point(s))
}

/// First time at which the trajectory reaches `v = v_target`.
pub fn time_at_v(traj: &Trajectory, v_target: f64) -> Result<f64> {
    if !(v_target > 0.0) || !v_target.is_finite() {
        return invalid(format!("target v must be positive, got {v_target}"));
    }
    traj.crossing_times(v_target)
        .first()
        .copied()
        .ok_or_else(|| Error::InvalidArgument(format!("trajectory never reaches v = {v_target}")))
}

pub fn reconstruct_profile(traj: &Trajectory, t_star: f64) -> Result<RadialProfile> {
    reconstruct_profile_with(traj, t_star, DEFAULT_GRID_POINTS)
}

/// Profile whose boundary `s = 1` sits at the trajectory time `t_star`:
/// `u(t) = -k int_t^{t_star} v^{1/k}`, `u_s = k v^{1/k} / s`.
pub fn reconstruct_profile_with(traj: &Trajectory, t_star: f64, points: usize) -> Result<RadialProfile> {
    if !(t_star > traj.t_start() && t_star <= traj.t_end()) {
        return invalid(format!(
            "t_star = {t_star} outside the trajectory range ({}, {}]",
            traj.t_start(),
            traj.t_end()
        ));
    }
    let spec = traj.spec;
    let s_min = (traj.t_start() - t_star).exp().max(DEFAULT_S_MIN);
    let grid = log_grid(s_min, 1.0, points)?;
    let t: Vec<f64> = grid.iter().map(|s| t_star + s.ln()).collect();
    let k = spec.kf();
    let mut pts = Vec::with_capacity(points);
    for &ti in &t {
        let ti = ti.clamp(traj.t_start(), t_star);
        pts.push(traj.eval(ti).ok_or_else(|| Error::InvalidArgument(format!("no trajectory at {ti}")))?);
    }
    let rate: Vec<f64> = pts.iter().map(|p| k * p.v.powf(1.0 / k)).collect();
    let cum = cumulative_from_right(&t, &rate)?;
    let u: Vec<f64> = cum.iter().map(|c| -c).collect();
    let us: Vec<f64> = rate.iter().zip(&grid).map(|(r, s)| r / s).collect();
    let end = pts[points - 1];
    let meta = ProfileMeta {
        a: parameter_scale_exact(spec).to_f64() * end.v,
        lambda: spec.k_pow_k() * end.w,
    };
    RadialProfile::new(grid, u, us, Some(meta))
}

/// Worst ratio of `|u(s)|` to the Holder bound
/// `(int_s^1 |u_s|^{k+1} s^n)^{1/(k+1)} (int_s^1 s^{-n/k})^{k/(k+1)}`.
pub fn pointwise_bound_check(spec: ProblemSpec, profile: &RadialProfile) -> Result<f64> {
    if spec.is_monge_ampere() {
        return invalid("the pointwise bound needs k < n");
    }
    let (n, k) = (spec.nf(), spec.kf());
    let k1 = spec.k() as i32 + 1;
    let g: Vec<f64> = profile
        .grid
        .iter()
        .zip(&profile.us)
        .map(|(s, us)| us.abs().powi(k1) * s.powi(spec.n() as i32))
        .collect();
    let energy = cumulative_log_from_right(&profile.grid, &g)?;
    let s_end = profile.grid[profile.len() - 1];
    let mut worst: f64 = 0.0;
    for i in 0..profile.len() {
        let lhs = (profile.u[i] - profile.u[profile.len() - 1]).abs();
        if lhs == 0.0 {
            continue;
        }
        let s = profile.grid[i];
        let e = 1.0 - n / k;
        let weight = (s_end.powf(e) - s.powf(e)) / e;
        let rhs = energy[i].max(0.0).powf(1.0 / (k + 1.0)) * weight.powf(k / (k + 1.0));
        worst = worst.max(if rhs > 0.0 { lhs / rhs } else { f64::INFINITY });
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    /// `A/(k+1) int |u_s|^{k+1} s^n ds`.
    pub energy: f64,
    /// `B/(p+1) int |u|^{p+1} s^{n-1} ds`.
    pub potential: f64,
    pub value: f64,
}

pub fn functional_value(spec: ProblemSpec, profile: &RadialProfile, p: f64) -> Result<FunctionalValue> {
    if !(p > 0.0) || !p.is_finite() {
        return invalid(format!("exponent must be positive, got {p}"));
    }
    let k1 = spec.kf() + 1.0;
    let ge: Vec<f64> = profile
        .grid
        .iter()
        .zip(&profile.us)
        .map(|(s, us)| us.abs().powf(k1) * s.powi(spec.n() as i32))
        .collect();
    let gp: Vec<f64> = profile
        .grid
        .iter()
        .zip(&profile.u)
        .map(|(s, u)| u.abs().powf(p + 1.0) * s.powi(spec.n() as i32 - 1))
        .collect();
    let energy = energy_constant_exact(spec).to_f64() / k1 * integrate_log(&profile.grid, &ge)?;
    let potential = volume_constant_exact(spec).to_f64() / (p + 1.0) * integrate_log(&profile.grid, &gp)?;
    Ok(FunctionalValue {
        energy,
        potential,
        value: energy - potential,
    })
}

/// `-1/(k+1) int_{B_1} u S_k(u) dV`, computed from the radial Hessian.
pub fn hessian_energy(spec: ProblemSpec, profile: &RadialProfile) -> Result<f64> {
    profile.require_unit_ball()?;
    let g = (0..profile.len())
        .map(|i| {
            let sk = hessian_from_window(spec, profile, i, true)?;
            Ok(profile.u[i] * sk * profile.grid[i].powi(spec.n() as i32 - 1))
        })
        .collect::<Result<Vec<f64>>>()?;
    let vol = volume_constant_exact(spec).to_f64();
    Ok(-vol / (spec.kf() + 1.0) * integrate_log(&profile.grid, &g)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakForm {
    /// `-A int u_s^k s^n phi' ds`.
    pub lhs: f64,
    /// `B int (-u)^p phi s^{n-1} ds`.
    pub rhs: f64,
    pub residual: f64,
}

/// Weak form of `C(n-1,k-1)/k (u_s^k s^n)_s s^{1-n} = (-u)^p` against a test
/// function with `phi(1) = 0`.
pub fn weak_form_check(
    spec: ProblemSpec,
    profile: &RadialProfile,
    p: f64,
    phi: impl Fn(f64) -> f64,
    dphi: impl Fn(f64) -> f64,
) -> Result<WeakForm> {
    let k = spec.k() as i32;
    let n = spec.n() as i32;
    let gl: Vec<f64> = (0..profile.len())
        .map(|i| {
            let s = profile.grid[i];
            profile.us[i].powi(k) * s.powi(n) * dphi(s)
        })
        .collect();
    let gr: Vec<f64> = (0..profile.len())
        .map(|i| {
            let s = profile.grid[i];
            (-profile.u[i]).max(0.0).powf(p) * phi(s) * s.powi(n - 1)
        })
        .collect();
    let lhs = -energy_constant_exact(spec).to_f64() * integrate_log(&profile.grid, &gl)?;
    let rhs = volume_constant_exact(spec).to_f64() * integrate_log(&profile.grid, &gr)?;
    let scale = lhs.abs().max(rhs.abs());
    Ok(WeakForm {
        lhs,
        rhs,
        residual: if scale > 0.0 { (lhs - rhs).abs() / scale } else { 0.0 },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealHalfDim {
    pub d: u32,
    pub eps: f64,
    pub profile: RadialProfile,
    pub a_tilde: f64,
    /// Threshold `alpha~(d/2, d)`; `a_tilde` lies below it.
    pub alpha_tilde: f64,
    /// Residual of the radial real `k = d/2` equation on the profile grid.
    pub residual: f64,
}

/// `a~_eps = (1/n) C(d-1, n-1) (2n+2)^n omega_{d-1} / (1+eps^2)^n`, `n = d/2`.
pub fn real_halfdim_parameter(d: u32, eps: f64) -> Result<f64> {
    if d < 2 || d % 2 != 0 {
        return invalid(format!("real half-dimension case needs even d >= 2, got {d}"));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return invalid(format!("eps must be positive, got {eps}"));
    }
    let n = d / 2;
    let nf = n as f64;
    Ok(binomial_f64(d - 1, n - 1) * (2.0 * nf + 2.0).powi(n as i32) * sphere_volume(d as i64)?
        / (nf * (1.0 + eps * eps).powi(n as i32)))
}

/// Explicit solution of the real Hessian problem with `k = d/2` in the
/// variable `s = |x|^2`. For radial `u` and `k = d/2`,
/// `S_k(D^2 u) = C(d-1,k-1) (u_r/r)^{k-1} (u_rr + u_r/r)`, which in `s` reads
///
/// ```text
/// ((u_s s)^n)_s s = n a~ / (omega_{d-1} C(d-1,n-1) 2^n) s^n e^{-u} / int_0^1 e^{-u} s^{n-1} ds.
/// ```
pub fn real_halfdim(d: u32, eps: f64) -> Result<RealHalfDim> {
    real_halfdim_on(d, eps, default_grid())
}

pub fn real_halfdim_on(d: u32, eps: f64, grid: Vec<f64>) -> Result<RealHalfDim> {
    let a_tilde = real_halfdim_parameter(d, eps)?;
    let n = d / 2;
    let fam = ExplicitMA::new(n, eps)?;
    let mut profile = fam.profile_on(grid)?;
    profile.meta = None;
    let nf = n as f64;
    let omega = sphere_volume(d as i64)?;
    let c = binomial_f64(d - 1, n - 1);
    let alpha_tilde = real_alpha_tilde_exact(n, d)
        .map(|x| x.to_f64())
        .or_else(|_| moser_trudinger(d).map(|m| m.alpha_tilde))?;

    let t: Vec<f64> = profile.grid.iter().map(|s| s.ln()).collect();
    let m: Vec<f64> = (0..profile.len())
        .map(|i| (profile.us[i] * profile.grid[i]).powi(n as i32))
        .collect();
    let norm = normalization_integral(&profile, n)?;
    let coef = nf * a_tilde / (omega * c * 2f64.powi(n as i32));
    let mut residual: f64 = 0.0;
    for i in interior_indices(&profile) {
        let lhs = centered_derivative(&t, &m, i)?;
        let s = profile.grid[i];
        let rhs = coef * s.powi(n as i32) * (-profile.u[i]).exp() / norm;
        residual = residual.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
    }
    Ok(RealHalfDim {
        d,
        eps,
        profile,
        a_tilde,
        alpha_tilde,
        residual,
    })
}
