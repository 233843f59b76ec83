//! Pohozaev audit of radial profiles on the unit ball, and the
//! nonexistence tests for the exponential problem.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::{
    a0_exact, alpha1_exact, critical_exponent, levi_unit_exact, omega_exact, thresholds,
    ProblemSpec,
};
use crate::error::{invalid, Result};
use crate::exact::rational_to_f64;
use crate::numerics::integrate_log;
use crate::profile::{normalization_integral, RadialProfile};

/// Default relative tolerance for the identity on a 2000-point grid.
pub const IDENTITY_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NonlinearitySpec {
    /// `f = (-u)^p`.
    Power { p: f64 },
    /// `f = a e^{-u} / int_{B_1} e^{-u} dV`.
    ExponentialNonlocal { a: f64 },
}

impl NonlinearitySpec {
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return invalid(format!("exponent p must be positive, got {p}"));
        }
        Ok(Self::Power { p })
    }

    pub fn exponential(a: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return invalid(format!("parameter a must be non-negative, got {a}"));
        }
        Ok(Self::ExponentialNonlocal { a })
    }

    /// `(f, F)` on the profile grid.
    pub fn evaluate(&self, spec: ProblemSpec, profile: &RadialProfile) -> Result<(Vec<f64>, Vec<f64>)> {
        match *self {
            Self::Power { p } => {
                let mut f = Vec::with_capacity(profile.len());
                let mut big_f = Vec::with_capacity(profile.len());
                for &u in &profile.u {
                    let x = (-u).max(0.0);
                    f.push(x.powf(p));
                    big_f.push(-x.powf(p + 1.0) / (p + 1.0));
                }
                Ok((f, big_f))
            }
            Self::ExponentialNonlocal { a } => {
                let vol = 0.5 * omega_exact(spec.n()).to_f64() * normalization_integral(profile, spec.n())?;
                let f = profile.u.iter().map(|u| a * (-u).exp() / vol).collect();
                let big_f = profile.u.iter().map(|u| -a * (-u).exp_m1() / vol).collect();
                Ok((f, big_f))
            }
        }
    }
}

impl fmt::Display for NonlinearitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power { p } => write!(f, "power(p = {p})"),
            Self::ExponentialNonlocal { a } => write!(f, "exponential-nonlocal(a = {a})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    IdentitySatisfied,
    IdentityViolated,
    NonexistenceTriggered,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::IdentitySatisfied => "identity-satisfied",
            Self::IdentityViolated => "identity-violated",
            Self::NonexistenceTriggered => "nonexistence-triggered",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    pub boundary_term: f64,
    pub volume_term: f64,
    pub residual: f64,
    /// Boundary flux `int S |grad u|^{k+1}`.
    pub holder_lhs: f64,
    /// `flux_lower_bound` at the profile's parameter `a`, or at the mass
    /// `int_{B_1} f dV` when the profile carries no metadata.
    pub holder_rhs: f64,
    pub verdict: Verdict,
}

/// `(n-k)/(k+1)`.
pub fn c0(spec: ProblemSpec) -> f64 {
    spec.codim() as f64 / (spec.kf() + 1.0)
}

fn levi_sphere_product(spec: ProblemSpec) -> f64 {
    rational_to_f64(&levi_unit_exact(spec)) * omega_exact(spec.n()).to_f64()
}

/// `int_0^1 g(s) s^{n-1} ds`, with the centre piece taken as constant `g`.
fn radial_integral(profile: &RadialProfile, n: u32, g: &[f64]) -> Result<f64> {
    let w: Vec<f64> = g
        .iter()
        .zip(&profile.grid)
        .map(|(g, s)| g * s.powi(n as i32 - 1))
        .collect();
    let s0 = profile.s_min();
    Ok(integrate_log(&profile.grid, &w)? + g[0] * s0.powi(n as i32) / n as f64)
}

/// Pointwise integrand of the volume term, `-2(k+1)(nF - c0 u f)`.
pub fn volume_integrand(spec: ProblemSpec, profile: &RadialProfile, nl: &NonlinearitySpec) -> Result<Vec<f64>> {
    let (f, big_f) = nl.evaluate(spec, profile)?;
    let (n, k, c) = (spec.nf(), spec.kf(), c0(spec));
    Ok((0..profile.len())
        .map(|i| -2.0 * (k + 1.0) * (n * big_f[i] - c * profile.u[i] * f[i]))
        .collect())
}

pub fn identity_radial(spec: ProblemSpec, profile: &RadialProfile, nl: &NonlinearitySpec) -> Result<PohozaevReport> {
    identity_radial_with(spec, profile, nl, IDENTITY_TOLERANCE)
}

pub fn identity_radial_with(
    spec: ProblemSpec,
    profile: &RadialProfile,
    nl: &NonlinearitySpec,
    tol: f64,
) -> Result<PohozaevReport> {
    profile.require_unit_ball()?;
    let n = spec.n();
    let omega = omega_exact(n).to_f64();
    let levi = rational_to_f64(&levi_unit_exact(spec));
    let grad = 2.0 * profile.us[profile.len() - 1];
    let boundary = omega * levi * grad.abs().powi(spec.k() as i32 + 1);

    let integrand = volume_integrand(spec, profile, nl)?;
    let volume = 0.5 * omega * radial_integral(profile, n, &integrand)?;

    let mass = match profile.meta {
        Some(meta) => meta.a,
        None => {
            let (f, _) = nl.evaluate(spec, profile)?;
            0.5 * omega * radial_integral(profile, n, &f)?
        }
    };
    let holder_rhs = if mass > 0.0 { flux_lower_bound(spec, mass)? } else { 0.0 };

    let scale = boundary.abs() + volume.abs();
    let residual = if scale == 0.0 { 0.0 } else { (boundary - volume).abs() / scale };
    let verdict = if residual <= tol {
        Verdict::IdentitySatisfied
    } else {
        Verdict::IdentityViolated
    };
    Ok(PohozaevReport {
        boundary_term: boundary,
        volume_term: volume,
        residual,
        holder_lhs: boundary,
        holder_rhs,
        verdict,
    })
}

/// `(k a)^{(k+1)/k} / (S omega)^{1/k}`.
pub fn flux_lower_bound(spec: ProblemSpec, a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return invalid(format!("parameter a must be positive, got {a}"));
    }
    let k = spec.kf();
    Ok((k * a).powf((k + 1.0) / k) / levi_sphere_product(spec).powf(1.0 / k))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonexistenceVerdict {
    pub a: f64,
    /// Threshold of the basic test: `alpha_1`, which equals `a_0` for `k = n`.
    pub threshold: f64,
    /// `a / threshold - 1`; non-negative iff the basic test triggers.
    pub margin: f64,
    pub triggered: bool,
    /// `alpha_2`, present for `k < n`.
    pub improved_threshold: Option<f64>,
    pub improved_margin: Option<f64>,
    pub improved_triggered: bool,
}

impl NonexistenceVerdict {
    pub fn any(&self) -> bool {
        self.triggered || self.improved_triggered
    }
}

pub fn nonexistence_exponential(spec: ProblemSpec, a: f64) -> Result<NonexistenceVerdict> {
    if !(a > 0.0) || !a.is_finite() {
        return invalid(format!("parameter a must be positive, got {a}"));
    }
    let threshold = if spec.is_monge_ampere() {
        a0_exact(spec.n()).to_f64()
    } else {
        alpha1_exact(spec).to_f64()
    };
    let (improved_threshold, improved_margin, improved_triggered) = if spec.is_monge_ampere() {
        (None, None, a >= threshold)
    } else {
        let t = thresholds(spec).alpha2;
        (Some(t), Some(a / t - 1.0), a >= t)
    };
    Ok(NonexistenceVerdict {
        a,
        threshold,
        margin: a / threshold - 1.0,
        triggered: a >= threshold,
        improved_threshold,
        improved_margin,
        improved_triggered,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl MuCoefficients {
    /// Coefficients at the improved threshold:
    /// `c3 = k^{(k+1)/k} alpha_2^{1/k} / (2 (S omega)^{1/k})`.
    pub fn at_improved_threshold(spec: ProblemSpec) -> Result<Self> {
        if spec.is_monge_ampere() {
            return invalid("the improved bound needs k < n");
        }
        let k = spec.kf();
        let alpha2 = thresholds(spec).alpha2;
        let c3 = k.powf((k + 1.0) / k) * (alpha2 / levi_sphere_product(spec)).powf(1.0 / k) / 2.0;
        Ok(Self {
            c1: spec.nf() * (k + 1.0),
            c2: spec.codim() as f64,
            c3,
        })
    }

    pub fn mu(&self, x: f64) -> f64 {
        self.c1 * x.exp_m1() - self.c2 * x * x.exp() - self.c3 * x.exp()
    }

    /// `e^{-x} mu'(x) = c1 - c2 (1 + x) - c3`, decreasing in `x`.
    fn reduced_slope(&self, x: f64) -> f64 {
        self.c1 - self.c2 * (1.0 + x) - self.c3
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuMaximum {
    pub coefficients: MuCoefficients,
    pub argmax: f64,
    pub max: f64,
}

/// Maximum of `mu` over `x >= 0`, located by bisection on `mu'`. At the
/// improved threshold it vanishes.
pub fn mu_maximum(coefficients: MuCoefficients) -> Result<MuMaximum> {
    let c = coefficients;
    if !(c.c2 > 0.0) {
        return invalid("mu is unbounded above unless c2 > 0");
    }
    let argmax = if c.reduced_slope(0.0) <= 0.0 {
        0.0
    } else {
        let mut hi = 1.0;
        while c.reduced_slope(hi) > 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if c.reduced_slope(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Ok(MuMaximum {
        coefficients: c,
        argmax,
        max: c.mu(argmax),
    })
}

/// `|max_{x >= 0} mu(x)|` at the improved threshold.
pub fn mu_max_verify(spec: ProblemSpec) -> Result<f64> {
    Ok(mu_maximum(MuCoefficients::at_improved_threshold(spec)?)?.max.abs())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSignCheck {
    pub p: f64,
    pub supercritical: bool,
    /// Largest value of the volume integrand over points with `u < 0`.
    pub max_volume_integrand: f64,
    pub boundary_term: f64,
    /// `p >= gamma`, integrand `<= 0` and boundary term `> 0`: the identity
    /// cannot hold.
    pub contradiction: bool,
}

/// Sign structure of the power-case identity on a candidate profile.
pub fn power_sign_check(spec: ProblemSpec, profile: &RadialProfile, p: f64) -> Result<PowerSignCheck> {
    let nl = NonlinearitySpec::power(p)?;
    let integrand = volume_integrand(spec, profile, &nl)?;
    let max_volume_integrand = integrand
        .iter()
        .zip(&profile.u)
        .filter(|(_, u)| **u < 0.0)
        .map(|(g, _)| *g)
        .fold(f64::NEG_INFINITY, f64::max);
    let grad = 2.0 * profile.us[profile.len() - 1];
    let boundary_term = levi_sphere_product(spec) * grad.abs().powi(spec.k() as i32 + 1);
    let supercritical = critical_exponent(spec).at_most(p);
    // at p = gamma the integrand vanishes identically up to rounding
    let (f, big_f) = nl.evaluate(spec, profile)?;
    let (n, k, c) = (spec.nf(), spec.kf(), c0(spec));
    let scale = (0..profile.len()).fold(0.0f64, |m, i| {
        m.max(2.0 * (k + 1.0) * (n * big_f[i].abs() + c * (profile.u[i] * f[i]).abs()))
    });
    let max_volume_integrand = if max_volume_integrand.abs() <= 1e-12 * scale {
        0.0
    } else {
        max_volume_integrand
    };
    Ok(PowerSignCheck {
        p,
        supercritical,
        max_volume_integrand,
        boundary_term,
        contradiction: supercritical && max_volume_integrand <= 0.0 && boundary_term > 0.0,
    })
}
