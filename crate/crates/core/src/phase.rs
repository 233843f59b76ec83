//! The autonomous phase-plane system of the radial exponential problem,
//!
//! ```text
//! v' = -(n-k) v + w,      w' = k w (1 - v^{1/k}),
//! ```
//!
//! in `t = log s`, together with its Lyapunov function, the invariant region
//! of the node case, crossing counts and bifurcation diagrams.
//!
//! Trajectories are integrated in logarithmic coordinates `(log v, log w)`,
//! so the local error control is relative in `v` and `w` all the way from the
//! seed near the origin to the equilibrium.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::{
    beta_exact, equilibrium_linearization, parameter_scale_exact, EquilibriumKind, ProblemSpec,
};
use crate::error::{invalid, Error, Result};
use crate::ode::{Control, DenseStep, Dopri5};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub v: f64,
    pub w: f64,
}

impl PhasePoint {
    pub fn new(v: f64, w: f64) -> Self {
        Self { v, w }
    }

    pub fn dist(&self, other: &PhasePoint) -> f64 {
        (self.v - other.v).hypot(self.w - other.w)
    }
}

/// The interior equilibrium `(1, n-k)`.
pub fn equilibrium(spec: ProblemSpec) -> PhasePoint {
    PhasePoint::new(1.0, spec.codim() as f64)
}

fn check_quadrant(p: PhasePoint) -> Result<()> {
    if !(p.v >= 0.0 && p.w >= 0.0) {
        return invalid(format!("point ({}, {}) is outside the closed quadrant", p.v, p.w));
    }
    Ok(())
}

/// `v^{1/k}`, zero at `v = 0`.
fn root_k(v: f64, k: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.powf(1.0 / k)
    }
}

pub fn vector_field(spec: ProblemSpec, p: PhasePoint) -> Result<(f64, f64)> {
    check_quadrant(p)?;
    let (c, k) = (spec.codim() as f64, spec.kf());
    Ok((-c * p.v + p.w, k * p.w * (1.0 - root_k(p.v, k))))
}

/// Point on the unstable direction of the origin, `(delta/n, delta)`.
pub fn seed_near_origin(spec: ProblemSpec, delta: f64) -> Result<PhasePoint> {
    if !(delta > 0.0) || !delta.is_finite() {
        return invalid(format!("seed size must be positive, got {delta}"));
    }
    Ok(PhasePoint::new(delta / spec.nf(), delta))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Relative accuracy per step in `v` and `w`.
    pub rel_tol: f64,
    /// Level of `w` below which a Monge-Ampere trajectory is considered to
    /// have reached its limit point.
    pub abs_tol: f64,
    pub t_max: f64,
    pub eq_radius: f64,
    pub seed_delta: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            t_max: 200.0,
            eq_radius: 1e-6,
            seed_delta: 1e-8,
        }
    }
}

impl IntegratorConfig {
    /// Config for reconstructing profiles. The seed sits slightly off the
    /// true path (by a relative `O(delta^{1/k})`), and the profile integrates
    /// `v^{1/k}`, so the seed has to be far smaller than for phase portraits.
    pub fn for_reconstruction(spec: ProblemSpec) -> Self {
        Self {
            seed_delta: 10f64.powi(-8 * spec.k() as i32).max(1e-300),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("t_max", self.t_max),
            ("eq_radius", self.eq_radius),
            ("seed_delta", self.seed_delta),
        ];
        for (name, v) in all {
            if !(v > 0.0) || !v.is_finite() {
                return invalid(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.rel_tol >= 1e-2 {
            return invalid(format!("rel_tol {} is too loose", self.rel_tol));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    EquilibriumBall,
    IntegrableLimit,
    TimeCap,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::EquilibriumBall => "equilibrium-ball",
            Termination::IntegrableLimit => "integrable-limit",
            Termination::TimeCap => "time-cap",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub v: f64,
    pub w: f64,
}

impl TrajectorySample {
    pub fn point(&self) -> PhasePoint {
        PhasePoint::new(self.v, self.w)
    }
}

/// Largest step allowed, so that samples stay dense along the path.
pub const MAX_SAMPLE_SPACING: f64 = 0.25;

/// A path from the seed near the origin, with dense output.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub spec: ProblemSpec,
    pub samples: Vec<TrajectorySample>,
    pub termination: Termination,
    pub seed_scale: f64,
    pub eq_radius: f64,
    steps: Vec<DenseStep<2>>,
}

fn log_rhs(spec: ProblemSpec) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let (c, k) = (spec.codim() as f64, spec.kf());
    move |_, y| [-c + (y[1] - y[0]).exp(), k * (1.0 - (y[0] / k).exp())]
}

fn to_point(y: &[f64; 2]) -> PhasePoint {
    PhasePoint::new(y[0].exp(), y[1].exp())
}

pub fn integrate_trajectory(spec: ProblemSpec, config: &IntegratorConfig) -> Result<Trajectory> {
    config.validate()?;
    let seed = seed_near_origin(spec, config.seed_delta)?;
    let y0 = [seed.v.ln(), seed.w.ln()];
    let eq = equilibrium(spec);
    let eq_radius = config.eq_radius;
    let log_w_floor = config.abs_tol.ln();
    let monge_ampere = spec.is_monge_ampere();

    let solver = Dopri5 {
        rel_tol: 0.0,
        abs_tol: config.rel_tol,
        h_max: MAX_SAMPLE_SPACING,
        ..Dopri5::default()
    };
    let mut steps: Vec<DenseStep<2>> = Vec::new();
    let mut termination = Termination::TimeCap;
    let sol = solver.integrate(log_rhs(spec), 0.0, y0, config.t_max, |step| {
        steps.push(step.clone());
        if monge_ampere {
            // w decays only once v > 1
            if step.y1[1] < log_w_floor && step.y1[0] > 0.0 {
                termination = Termination::IntegrableLimit;
                let ts = step.locate(|_, y| y[1] - log_w_floor).unwrap_or(step.t1);
                return Control::StopAt(ts);
            }
        } else if to_point(&step.y1).dist(&eq) < eq_radius {
            termination = Termination::EquilibriumBall;
            let ts = step
                .locate(|_, y| to_point(y).dist(&eq) - eq_radius)
                .unwrap_or(step.t1);
            return Control::StopAt(ts);
        }
        Control::Continue
    })?;

    let mut samples: Vec<TrajectorySample> = steps
        .iter()
        .map(|st| {
            let p = to_point(&st.y0);
            TrajectorySample { t: st.t0, v: p.v, w: p.w }
        })
        .collect();
    let last = to_point(&sol.y);
    if samples.last().map_or(true, |s| sol.t > s.t) {
        samples.push(TrajectorySample { t: sol.t, v: last.v, w: last.w });
    }
    if let Some(bad) = samples.iter().find(|s| !(s.v > 0.0 && s.w > 0.0)) {
        return Err(Error::Integration {
            t: bad.t,
            reason: "trajectory left the open quadrant".into(),
        });
    }
    Ok(Trajectory {
        spec,
        samples,
        termination,
        seed_scale: config.seed_delta,
        eq_radius,
        steps,
    })
}

impl Trajectory {
    pub fn t_start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn t_end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    pub fn first(&self) -> PhasePoint {
        self.samples[0].point()
    }

    pub fn last(&self) -> PhasePoint {
        self.samples[self.samples.len() - 1].point()
    }

    fn step_index(&self, t: f64) -> Option<usize> {
        if !(t >= self.t_start() && t <= self.t_end()) {
            return None;
        }
        let i = self.steps.partition_point(|st| st.t1 < t);
        Some(i.min(self.steps.len() - 1))
    }

    /// Dense-output evaluation in `log` coordinates.
    fn eval_log(&self, t: f64) -> Option<[f64; 2]> {
        self.step_index(t).map(|i| self.steps[i].eval(t))
    }

    /// Point on the path at time `t`, `None` outside the integrated range.
    pub fn eval(&self, t: f64) -> Option<PhasePoint> {
        self.eval_log(t).map(|y| to_point(&y))
    }

    /// Times of the local extrema of `v` (zeros of `w - (n-k) v`), in order.
    pub fn v_extrema(&self) -> Vec<f64> {
        let c = self.spec.codim() as f64;
        let end = self.t_end();
        let g = |_: f64, y: &[f64; 2]| y[1] - y[0] - c.ln();
        if self.spec.is_monge_ampere() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for st in &self.steps {
            let (a, b) = (g(st.t0, &st.y0), g(st.t1, &st.y1));
            if a.signum() != b.signum() && a != 0.0 {
                if let Some(t) = st.locate(g) {
                    if t > self.t_start() && t < end {
                        out.push(t);
                    }
                }
            }
        }
        out
    }

    /// Supremum of `v` along the path, refined on the dense output.
    pub fn max_v(&self) -> f64 {
        let sampled = self.samples.iter().map(|s| s.v).fold(0.0, f64::max);
        self.v_extrema()
            .into_iter()
            .filter_map(|t| self.eval(t))
            .map(|p| p.v)
            .fold(sampled, f64::max)
    }

    /// Monotone pieces of `v(t)` as `(t_from, t_to)` between consecutive
    /// extrema and the path ends.
    fn monotone_pieces(&self) -> Vec<(f64, f64)> {
        let mut knots = vec![self.t_start()];
        knots.extend(self.v_extrema());
        knots.push(self.t_end());
        knots.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Times where the path meets the line `v = v_star`, one per monotone
    /// piece that reaches it; a tangential touch at an extremum counts once.
    pub fn crossing_times(&self, v_star: f64) -> Vec<f64> {
        let target = v_star.ln();
        let mut out = Vec::new();
        for (ta, tb) in self.monotone_pieces() {
            let (Some(ya), Some(yb)) = (self.eval_log(ta), self.eval_log(tb)) else {
                continue;
            };
            let (va, vb) = (ya[0], yb[0]);
            // half-open at the start of the piece, closed at its end
            let hit = if vb >= va {
                va < target && target <= vb
            } else {
                vb <= target && target < va
            };
            if !hit {
                continue;
            }
            let (mut lo, mut hi) = (ta, tb);
            let rising = vb >= va;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                let vm = self.eval_log(mid).map_or(f64::NAN, |y| y[0]);
                if (vm < target) == rising {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(if rising { hi } else { lo });
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossingTail {
    Settled,
    SpiralInfiniteAtCenter,
    Unresolved,
}

impl fmt::Display for CrossingTail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrossingTail::Settled => "settled",
            CrossingTail::SpiralInfiniteAtCenter => "spiral-infinite-at-center",
            CrossingTail::Unresolved => "unresolved",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossings {
    pub count: usize,
    pub tail: CrossingTail,
}

pub fn count_crossings(traj: &Trajectory, v_star: f64) -> Result<Crossings> {
    if !(v_star > 0.0) || !v_star.is_finite() {
        return invalid(format!("v_star must be positive, got {v_star}"));
    }
    let count = traj.crossing_times(v_star).len();
    let spiral = equilibrium_linearization(traj.spec).kind == EquilibriumKind::Spiral;
    let tail = match traj.termination {
        Termination::TimeCap => CrossingTail::Unresolved,
        Termination::EquilibriumBall if spiral && (v_star - 1.0).abs() <= traj.eq_radius => {
            CrossingTail::SpiralInfiniteAtCenter
        }
        _ => CrossingTail::Settled,
    };
    Ok(Crossings { count, tail })
}

pub fn lyapunov(spec: ProblemSpec, p: PhasePoint) -> Result<f64> {
    check_lyapunov_domain(spec, p)?;
    let (k, c) = (spec.kf(), spec.codim() as f64);
    let vk = k * (k / (k + 1.0) * p.v.powf((k + 1.0) / k) - p.v + 1.0 / (k + 1.0));
    Ok(vk + (p.w - c) - c * (p.w / c).ln())
}

pub fn lyapunov_derivative(spec: ProblemSpec, p: PhasePoint) -> Result<f64> {
    check_lyapunov_domain(spec, p)?;
    let (k, c) = (spec.kf(), spec.codim() as f64);
    Ok(-c * k * (root_k(p.v, k) - 1.0) * (p.v - 1.0))
}

/// `grad L . F`, the chain-rule form of [`lyapunov_derivative`].
pub fn lyapunov_derivative_chain_rule(spec: ProblemSpec, p: PhasePoint) -> Result<f64> {
    check_lyapunov_domain(spec, p)?;
    let (k, c) = (spec.kf(), spec.codim() as f64);
    let dl_dv = k * (root_k(p.v, k) - 1.0);
    let dl_dw = 1.0 - c / p.w;
    let (dv, dw) = vector_field(spec, p)?;
    Ok(dl_dv * dv + dl_dw * dw)
}

fn check_lyapunov_domain(spec: ProblemSpec, p: PhasePoint) -> Result<()> {
    if spec.is_monge_ampere() {
        return invalid("the Lyapunov function needs k < n");
    }
    if !(p.v >= 0.0) || !(p.w > 0.0) {
        return invalid(format!("Lyapunov function needs v >= 0, w > 0; got ({}, {})", p.v, p.w));
    }
    Ok(())
}

fn require_node(spec: ProblemSpec) -> Result<(f64, f64)> {
    equilibrium_linearization(spec)
        .b_range
        .ok_or_else(|| Error::InvalidArgument(format!("invariant region needs n-k >= 4, got {spec}")))
}

/// `h(tau) = k(1 - tau^{1/k}) - b(n-k)(tau^{b-1} - 1)`; the curve
/// `w = (n-k) v^b` is crossed inward at `v = tau` iff `h(tau) < 0`.
pub fn region_boundary_h(spec: ProblemSpec, b: f64, tau: f64) -> Result<f64> {
    let (lo, hi) = require_node(spec)?;
    if !(b >= lo * (1.0 - 1e-12) && b <= hi * (1.0 + 1e-12)) {
        return invalid(format!("b = {b} outside the admissible range [{lo}, {hi}]"));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return invalid(format!("tau must lie in (0, 1), got {tau}"));
    }
    let (k, c) = (spec.kf(), spec.codim() as f64);
    Ok(k * (1.0 - tau.powf(1.0 / k)) - b * c * (tau.powf(b - 1.0) - 1.0))
}

/// `h'(1) = (n-k) b (1-b) - 1`.
pub fn region_boundary_slope_at_one(spec: ProblemSpec, b: f64) -> f64 {
    spec.codim() as f64 * b * (1.0 - b) - 1.0
}

/// The exponent `b = (-eig1)^{-1}` of the upper boundary curve.
pub fn region_exponent(spec: ProblemSpec) -> Result<f64> {
    Ok(require_node(spec)?.1)
}

/// Membership in the region between `w = (n-k) v` and `w = (n-k) v^b`,
/// `0 <= v <= 1`.
pub fn in_invariant_region(spec: ProblemSpec, p: PhasePoint) -> Result<bool> {
    let b = region_exponent(spec)?;
    let c = spec.codim() as f64;
    Ok((0.0..=1.0).contains(&p.v) && c * p.v <= p.w && p.w <= c * p.v.powf(b))
}

/// Inward-pointing test on the curved boundary at `v = tau`: returns
/// `slope(C) * v' - w'`, positive when the field points into the region.
pub fn boundary_inward_margin(spec: ProblemSpec, tau: f64) -> Result<f64> {
    let b = region_exponent(spec)?;
    let c = spec.codim() as f64;
    let p = PhasePoint::new(tau, c * tau.powf(b));
    let (dv, dw) = vector_field(spec, p)?;
    Ok(b * c * tau.powf(b - 1.0) * dv - dw)
}

/// `a = k^k A(k,n) v`.
pub fn parameter_of_point(spec: ProblemSpec, v: f64) -> Result<f64> {
    if !(v >= 0.0) {
        return invalid(format!("v must be non-negative, got {v}"));
    }
    Ok(parameter_scale_exact(spec).to_f64() * v)
}

/// Inverse of [`parameter_of_point`].
pub fn point_of_parameter(spec: ProblemSpec, a: f64) -> f64 {
    a / parameter_scale_exact(spec).to_f64()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionCount {
    Finite(usize),
    Infinite,
}

impl SolutionCount {
    pub fn finite(&self) -> Option<usize> {
        match self {
            SolutionCount::Finite(c) => Some(*c),
            SolutionCount::Infinite => None,
        }
    }
}

impl fmt::Display for SolutionCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionCount::Finite(c) => write!(f, "{c}"),
            SolutionCount::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BifurcationEntry {
    pub a: f64,
    pub count: SolutionCount,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub entries: Vec<BifurcationEntry>,
    pub alpha_star_estimate: f64,
    /// `beta(k,n)`; for `k = n` no spiral centre exists and this is `None`.
    pub beta_marker: Option<f64>,
    pub termination: Termination,
}

/// Reads every parameter of `a_grid` off one trajectory.
pub fn bifurcation_from_trajectory(traj: &Trajectory, a_grid: &[f64]) -> Result<BifurcationDiagram> {
    if a_grid.is_empty() {
        return invalid("parameter grid is empty");
    }
    if !a_grid.windows(2).all(|w| w[1] > w[0]) || !(a_grid[0] > 0.0) {
        return invalid("parameter grid must be positive and strictly increasing");
    }
    let spec = traj.spec;
    let scale = parameter_scale_exact(spec).to_f64();
    let entries = a_grid
        .iter()
        .map(|&a| {
            let c = count_crossings(traj, a / scale)?;
            let count = match c.tail {
                CrossingTail::SpiralInfiniteAtCenter => SolutionCount::Infinite,
                _ => SolutionCount::Finite(c.count),
            };
            Ok(BifurcationEntry { a, count })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BifurcationDiagram {
        entries,
        alpha_star_estimate: scale * traj.max_v(),
        beta_marker: (!spec.is_monge_ampere()).then(|| beta_exact(spec).to_f64()),
        termination: traj.termination,
    })
}

pub fn bifurcation_sweep(
    spec: ProblemSpec,
    a_grid: &[f64],
    config: &IntegratorConfig,
) -> Result<BifurcationDiagram> {
    let traj = integrate_trajectory(spec, config)?;
    bifurcation_from_trajectory(&traj, a_grid)
}

/// Time shift aligning `b` onto `a`: the difference of the first times at
/// which `v` reaches half of the smaller of the two maxima.
pub fn alignment_shift(a: &Trajectory, b: &Trajectory) -> Option<f64> {
    let level = 0.5 * a.max_v().min(b.max_v());
    let ta = *a.crossing_times(level).first()?;
    let tb = *b.crossing_times(level).first()?;
    Some(tb - ta)
}

/// Largest distance between `a(t)` and `b(t + shift)` over the samples of
/// `a` where both are defined. Bounds the Hausdorff distance of the paths.
pub fn path_deviation(a: &Trajectory, b: &Trajectory, shift: f64) -> f64 {
    a.samples
        .iter()
        .filter_map(|s| b.eval(s.t + shift).map(|q| q.dist(&s.point())))
        .fold(0.0, f64::max)
}
