//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use khess_core::constants::{
    a0_exact, alpha1_exact, beta_exact, critical_exponent, moser_trudinger,
    parameter_scale_exact, thresholds, ProblemSpec,
};
use khess_core::phase::{
    alignment_shift, bifurcation_from_trajectory, count_crossings, in_invariant_region,
    integrate_trajectory, lyapunov, path_deviation, IntegratorConfig, PhasePoint, SolutionCount,
    Termination, Trajectory,
};
use khess_core::pohozaev::{identity_radial, nonexistence_exponential, NonlinearitySpec};
use khess_core::profile::{
    default_grid, exponential_rhs, hessian_residual, normalization_integral, real_halfdim,
    reconstruct_profile, time_at_v, ExplicitMA,
};
use khess_core::shooting::{shoot_power, ShootingStatus};

type Outcome = Result<String, String>;

fn spec(n: u32, k: u32) -> ProblemSpec {
    ProblemSpec::new(n, k).expect("valid spec")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn factorial(m: u32) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn binomial(n: u32, r: u32) -> BigInt {
    factorial(n) / (factorial(r) * factorial(n - r))
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn thresholds_criterion() -> Outcome {
    let a01 = a0_exact(1);
    ensure(a01.coeff == ratio(2.into(), 1.into()) && a01.pi_power == 1, || {
        format!("a0(1) = {:?} pi^{}", a01.coeff, a01.pi_power)
    })?;
    let mut worst: f64 = 0.0;
    for n in 1..=12u32 {
        // product form of (n+1)^n pi^n / n!
        let oracle: f64 = (1..=n).map(|i| (n + 1) as f64 * PI / i as f64).product();
        let a0 = a0_exact(n).to_f64();
        let alpha1 = alpha1_exact(spec(n, n)).to_f64();
        worst = worst.max((a0 / oracle - 1.0).abs()).max((alpha1 / oracle - 1.0).abs());
        ensure(alpha1_exact(spec(n, n)) == a0_exact(n), || format!("alpha1({n},{n}) != a0({n}) exactly"))?;
        for k in 1..n {
            // k^k A(k,n) with A = omega/(2k) C(n-1,k-1), omega = 2 pi^n/(n-1)!
            let expected = ratio(
                BigInt::from(k).pow(k) * binomial(n - 1, k - 1),
                BigInt::from(k) * factorial(n - 1),
            );
            let beta = beta_exact(spec(n, k));
            ensure(beta.coeff == expected && beta.pi_power == n, || format!("beta({k},{n}) mismatch"))?;
            ensure(beta == parameter_scale_exact(spec(n, k)), || format!("beta({k},{n}) != k^k A"))?;
        }
    }
    ensure(worst <= 1e-12, || format!("a0 relative error {worst:e}"))?;
    Ok(format!("a0(1) = 2 pi exactly, worst relative error {worst:.1e}, beta = k^k A exactly"))
}

fn explicit_audit_criterion() -> Outcome {
    let (mut worst_h, mut worst_p): (f64, f64) = (0.0, 0.0);
    for n in [1u32, 2, 3, 6] {
        for eps in [0.1, 0.5, 1.0, 2.0] {
            let s = spec(n, n);
            let fam = ExplicitMA::new(n, eps).map_err(|e| e.to_string())?;
            let profile = fam.profile_on(default_grid()).map_err(|e| e.to_string())?;
            let rhs = exponential_rhs(s, &profile, fam.parameter()).map_err(|e| e.to_string())?;
            let h = hessian_residual(s, &profile, &rhs).map_err(|e| e.to_string())?;
            let nl = NonlinearitySpec::exponential(fam.parameter()).map_err(|e| e.to_string())?;
            let p = identity_radial(s, &profile, &nl).map_err(|e| e.to_string())?.residual;
            ensure(h <= 1e-6 && p <= 1e-6, || format!("n {n} eps {eps}: hessian {h:e}, pohozaev {p:e}"))?;
            worst_h = worst_h.max(h);
            worst_p = worst_p.max(p);
        }
    }
    Ok(format!("worst hessian residual {worst_h:.1e}, worst identity residual {worst_p:.1e}"))
}

/// Point of the explicit Monge-Ampere curve at `sigma = s / eps^2`.
fn explicit_curve(n: u32, sigma: f64) -> PhasePoint {
    let nf = n as f64;
    let r = sigma / (1.0 + sigma);
    PhasePoint::new(
        ((nf + 1.0) / nf).powi(n as i32) * r.powi(n as i32),
        (nf + 1.0).powi(n as i32) / nf.powi(n as i32 - 1) * r.powi(n as i32) / (1.0 + sigma),
    )
}

fn phase_oracle_criterion() -> Outcome {
    let n = 6u32;
    let s = spec(n, n);
    let cfg = IntegratorConfig {
        rel_tol: 1e-10,
        ..IntegratorConfig::default()
    };
    let tr = integrate_trajectory(s, &cfg).map_err(|e| e.to_string())?;
    ensure(tr.termination == Termination::IntegrableLimit, || format!("terminated by {}", tr.termination))?;
    let nf = n as f64;
    let limit = ((nf + 1.0) / nf).powi(n as i32);
    // align at v = limit/2, where sigma/(1+sigma) = 2^{-1/n}
    let t_ref = *tr.crossing_times(0.5 * limit).first().ok_or("no alignment crossing")?;
    let r = 0.5f64.powf(1.0 / nf);
    let t0 = t_ref - (r / (1.0 - r)).ln();
    let dev = tr
        .samples
        .iter()
        .map(|p| explicit_curve(n, (p.t - t0).exp()).dist(&p.point()))
        .fold(0.0, f64::max);
    ensure(dev <= 1e-7, || format!("max deviation {dev:e}"))?;
    let diag = bifurcation_from_trajectory(&tr, &[1.0]).map_err(|e| e.to_string())?;
    let a0 = 117649.0 * PI.powi(6) / 720.0;
    let rel = (diag.alpha_star_estimate / a0 - 1.0).abs();
    ensure(rel < 1e-3, || format!("alpha* off by {rel:e}"))?;
    Ok(format!("max deviation {dev:.1e}, alpha* relative error {rel:.1e}"))
}

fn counts(tr: &Trajectory, grid: &[f64]) -> Result<Vec<SolutionCount>, String> {
    let d = bifurcation_from_trajectory(tr, grid).map_err(|e| e.to_string())?;
    Ok(d.entries.iter().map(|e| e.count).collect())
}

fn finite(c: SolutionCount) -> usize {
    c.finite().unwrap_or(usize::MAX)
}

fn trichotomy_criterion() -> Outcome {
    // node
    let s1 = spec(6, 1);
    let tr = integrate_trajectory(s1, &IntegratorConfig::default()).map_err(|e| e.to_string())?;
    ensure(tr.samples.windows(2).all(|w| w[1].v >= w[0].v), || "k = 1: v not monotone".into())?;
    for p in &tr.samples {
        let inside = in_invariant_region(s1, p.point()).map_err(|e| e.to_string())?;
        ensure(inside, || format!("k = 1: sample {p:?} outside the region"))?;
    }
    let top = 1.5 * thresholds(s1).alpha1;
    let grid: Vec<f64> = (1..=400).map(|i| top * i as f64 / 400.0).collect();
    let c1 = counts(&tr, &grid)?;
    ensure(c1.iter().all(|&c| finite(c) <= 1), || "k = 1: a count exceeds 1".into())?;

    // spiral
    let s5 = spec(6, 5);
    let cfg = IntegratorConfig {
        eq_radius: 1e-9,
        rel_tol: 1e-12,
        ..IntegratorConfig::default()
    };
    let tr = integrate_trajectory(s5, &cfg).map_err(|e| e.to_string())?;
    let crossings = count_crossings(&tr, 1.0).map_err(|e| e.to_string())?.count;
    ensure(crossings >= 10, || format!("k = 5: only {crossings} crossings of v = 1"))?;
    let beta = beta_exact(s5).to_f64();
    let mut near = Vec::new();
    for side in [-1.0, 1.0] {
        let offsets: Vec<f64> = (1..=6).map(|j| 10f64.powi(-j)).collect();
        let grid: Vec<f64> = offsets.iter().map(|d| beta * (1.0 + side * d)).collect();
        let mut grid_sorted = grid.clone();
        grid_sorted.sort_by(f64::total_cmp);
        let mut c = counts(&tr, &grid_sorted)?;
        if side > 0.0 {
            c.reverse();
        }
        // c is ordered from far to near the marker
        let c: Vec<usize> = c.into_iter().map(finite).collect();
        ensure(c.windows(2).all(|w| w[1] >= w[0]), || format!("k = 5: counts {c:?} not increasing towards beta"))?;
        ensure(*c.last().unwrap() >= 5, || format!("k = 5: counts {c:?} stay below 5 near beta"))?;
        near.push(c);
    }

    // Monge-Ampere
    let s6 = spec(6, 6);
    let tr = integrate_trajectory(s6, &IntegratorConfig::default()).map_err(|e| e.to_string())?;
    let a0 = a0_exact(6).to_f64();
    // the estimate of alpha* sits within rounding of a0, so stop slightly short
    let grid: Vec<f64> = (1..=400).map(|i| a0 * (1.0 - 1e-6) * i as f64 / 400.0).collect();
    let c6 = counts(&tr, &grid)?;
    ensure(c6.iter().all(|&c| c == SolutionCount::Finite(1)), || "k = 6: a count differs from 1 below a0".into())?;

    Ok(format!(
        "k=1 monotone and inside the region; k=5 {crossings} crossings, counts towards beta {:?} / {:?}; k=6 all counts 1",
        near[0], near[1]
    ))
}

fn shooting_criterion() -> Outcome {
    let mut zeros = Vec::new();
    for (n, k) in [(2, 1), (3, 1), (3, 2), (6, 2)] {
        let s = spec(n, k);
        let gamma = critical_exponent(s).to_f64();
        let sub = shoot_power(s, 0.8 * gamma, 1.0, 1e6).map_err(|e| e.to_string())?;
        ensure(sub.status == ShootingStatus::ZeroFound, || format!("({n},{k}) p = 0.8 gamma: {}", sub.status))?;
        zeros.push(format!("({n},{k}) R = {:.3}", sub.first_zero.unwrap_or(f64::NAN)));
        for factor in [1.0, 1.2] {
            let res = shoot_power(s, factor * gamma, 1.0, 1e6).map_err(|e| e.to_string())?;
            ensure(res.status == ShootingStatus::NoZeroWithinCap, || {
                format!("({n},{k}) p = {factor} gamma: {}", res.status)
            })?;
        }
    }
    Ok(format!("s_cap = 1e6; {}", zeros.join(", ")))
}

fn frontier_criterion() -> Outcome {
    let mut triggered = 0usize;
    let shared: Vec<f64> = (1..=150).map(|i| 0.01 * i as f64).collect();
    for (n, k) in [(2, 1), (3, 1), (3, 2), (4, 3), (6, 1), (6, 2), (6, 5)] {
        let s = spec(n, k);
        let alpha1 = thresholds(s).alpha1;
        let grid: Vec<f64> = shared.iter().map(|x| x * alpha1).collect();
        let tr = integrate_trajectory(s, &IntegratorConfig::default()).map_err(|e| e.to_string())?;
        let c = counts(&tr, &grid)?;
        for (a, count) in grid.iter().zip(c) {
            let v = nonexistence_exponential(s, *a).map_err(|e| e.to_string())?;
            if v.any() {
                triggered += 1;
                ensure(count == SolutionCount::Finite(0), || format!("({n},{k}) a = {a}: count {count}"))?;
            }
        }
    }
    ensure(triggered > 0, || "no grid point triggered a nonexistence test".into())?;
    Ok(format!("{triggered} triggered grid points, all with count 0"))
}

fn property_criterion() -> Outcome {
    let cfg = IntegratorConfig::default();
    let specs = [(2, 1), (3, 1), (3, 2), (4, 3), (6, 1), (6, 2), (6, 5), (8, 3), (9, 8), (10, 4)];
    for (n, k) in specs {
        let s = spec(n, k);
        let tr = integrate_trajectory(s, &cfg).map_err(|e| e.to_string())?;
        // dense output between samples, four points per step
        let mut pts = Vec::new();
        for w in tr.samples.windows(2) {
            for j in 0..4 {
                let t = w[0].t + (w[1].t - w[0].t) * j as f64 / 4.0;
                pts.push(tr.eval(t).ok_or("dense output missing")?);
            }
        }
        pts.push(tr.last());
        let mut prev = f64::INFINITY;
        for p in &pts {
            ensure(p.v > 0.0 && p.w > 0.0, || format!("{s}: left the quadrant at {p:?}"))?;
            if n - k >= 4 {
                let inside = in_invariant_region(s, *p).map_err(|e| e.to_string())?;
                ensure(inside, || format!("{s}: left the region at {p:?}"))?;
            }
            let l = lyapunov(s, *p).map_err(|e| e.to_string())?;
            ensure(l <= prev + 10.0 * cfg.rel_tol * prev.abs().max(1.0), || {
                format!("{s}: Lyapunov increased from {prev} to {l}")
            })?;
            prev = l;
        }
    }

    let mut worst_seed: f64 = 0.0;
    for (n, k) in [(6, 1), (6, 5), (3, 2), (6, 6), (4, 2)] {
        let s = spec(n, k);
        let a = integrate_trajectory(s, &cfg).map_err(|e| e.to_string())?;
        let half = IntegratorConfig {
            seed_delta: cfg.seed_delta / 2.0,
            ..cfg
        };
        let b = integrate_trajectory(s, &half).map_err(|e| e.to_string())?;
        let shift = alignment_shift(&a, &b).ok_or("alignment failed")?;
        worst_seed = worst_seed.max(path_deviation(&a, &b, shift));
    }
    ensure(worst_seed <= 10.0 * cfg.rel_tol, || format!("seed robustness {worst_seed:e}"))?;

    let mut worst_nl: f64 = 0.0;
    for (n, k, v) in [(1, 1, 0.6), (2, 2, 0.8), (3, 3, 1.0), (6, 6, 1.5), (3, 1, 0.8), (6, 5, 0.5)] {
        let s = spec(n, k);
        let tr = integrate_trajectory(s, &IntegratorConfig::for_reconstruction(s)).map_err(|e| e.to_string())?;
        let t_star = time_at_v(&tr, v).map_err(|e| e.to_string())?;
        let p = reconstruct_profile(&tr, t_star).map_err(|e| e.to_string())?;
        let meta = p.meta.ok_or("reconstruction without metadata")?;
        let v0 = meta.a / parameter_scale_exact(s).to_f64();
        let w0 = meta.lambda / s.k_pow_k();
        let integral = normalization_integral(&p, n).map_err(|e| e.to_string())?;
        worst_nl = worst_nl.max((w0 * integral - v0).abs() / v0);
    }
    ensure(worst_nl <= 1e-6, || format!("nonlocal consistency {worst_nl:e}"))?;

    let mut worst_mt: f64 = 0.0;
    for d in (2..=16).step_by(2) {
        worst_mt = worst_mt.max(moser_trudinger(d).map_err(|e| e.to_string())?.identity_residual);
    }
    ensure(worst_mt <= 1e-12, || format!("Moser-Trudinger identity {worst_mt:e}"))?;

    let mut worst_rh: f64 = 0.0;
    for d in [2, 4, 8] {
        for eps in [0.5, 1.0] {
            worst_rh = worst_rh.max(real_halfdim(d, eps).map_err(|e| e.to_string())?.residual);
        }
    }
    ensure(worst_rh <= 1e-6, || format!("real half-dimension residual {worst_rh:e}"))?;

    Ok(format!(
        "Lyapunov/quadrant/region on 10 specs; seed {worst_seed:.1e}; nonlocal {worst_nl:.1e}; MT {worst_mt:.1e}; real half-dim {worst_rh:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 7] = [
        ("thresholds", thresholds_criterion, Duration::from_secs(1)),
        ("explicit-solution audit", explicit_audit_criterion, Duration::from_secs(10)),
        ("phase-plane oracle", phase_oracle_criterion, Duration::from_secs(30)),
        ("trichotomy", trichotomy_criterion, Duration::from_secs(60)),
        ("critical-exponent shooting", shooting_criterion, Duration::from_secs(60)),
        ("nonexistence frontier", frontier_criterion, Duration::from_secs(60)),
        ("property suites", property_criterion, Duration::from_secs(120)),
    ];
    let mut all = true;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget:?} budget")),
            Err(e) => (false, e),
        };
        all &= ok;
        println!(
            "criterion {} {name}: {} ({detail}; {:.2} s)",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
