use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use khess_core::constants::{
    critical_exponent, equilibrium_linearization, moser_trudinger, parameter_scale_exact,
    pohozaev_power_coefficient, thresholds, ProblemSpec,
};
use khess_core::phase::{
    bifurcation_from_trajectory, count_crossings, in_invariant_region, integrate_trajectory,
    IntegratorConfig, SolutionCount,
};
use khess_core::pohozaev::{identity_radial_with, nonexistence_exponential, NonlinearitySpec};
use khess_core::profile::{
    exponential_rhs, hessian_residual, normalization_integral, reconstruct_profile_with,
    time_at_v, ExplicitMA, RadialProfile, DEFAULT_S_MIN,
};
use khess_core::numerics::log_grid;
use khess_core::render::{phase_svg, trajectory_csv};
use khess_core::shooting::{rescale_to_unit_ball, shoot_power, ShootingStatus};

use crate::output::{flat_json, num, Run};
use crate::{IntegratorArgs, SpecArgs};

type CmdResult = Result<bool, Box<dyn Error>>;

fn problem(spec: SpecArgs) -> Result<ProblemSpec, Box<dyn Error>> {
    Ok(ProblemSpec::new(spec.n, spec.k)?)
}

fn stem(command: &str, s: ProblemSpec) -> String {
    format!("{command}-n{}-k{}", s.n(), s.k())
}

fn record_config(run: &mut Run, c: &IntegratorConfig) {
    run.tol("rel_tol", c.rel_tol);
    run.tol("abs_tol", c.abs_tol);
    run.tol("eq_radius", c.eq_radius);
    run.tol("seed_delta", c.seed_delta);
    run.tol("t_max", c.t_max);
}

pub fn exponents(dir: &Path, spec: SpecArgs, p: Option<f64>, d: Option<u32>) -> CmdResult {
    let s = problem(spec)?;
    let mut run = Run::new(dir, "exponents", stem("exponents", s))?;
    run.param("n", s.n());
    run.param("k", s.k());
    let gamma = critical_exponent(s);
    let th = thresholds(s);
    let lin = equilibrium_linearization(s);
    let opt = |x: Option<f64>| x.map(num).unwrap_or_else(|| "none".into());

    println!("n = {}, k = {}", s.n(), s.k());
    println!("gamma  {gamma}");
    println!("a0     {}", opt(th.a0));
    println!("alpha1 {}", num(th.alpha1));
    println!("alpha2 {}", num(th.alpha2));
    println!("beta   {}", opt(th.beta));
    println!("eig1   {} + {}i", num(lin.eig1.re), num(lin.eig1.im));
    println!("eig2   {} + {}i", num(lin.eig2.re), num(lin.eig2.im));
    println!("kind   {}", lin.kind);

    let mut doc = json!({
        "n": s.n(),
        "k": s.k(),
        "gamma": gamma.to_string(),
        "a0": th.a0,
        "alpha1": th.alpha1,
        "alpha2": th.alpha2,
        "beta": th.beta,
        "eig1": {"re": lin.eig1.re, "im": lin.eig1.im},
        "eig2": {"re": lin.eig2.re, "im": lin.eig2.im},
        "classification": lin.kind.to_string(),
        "b_range": lin.b_range.map(|(lo, hi)| vec![lo, hi]),
    });
    if let Some(p) = p {
        run.param("p", num(p));
        let coeff = pohozaev_power_coefficient(s, p)?;
        let line = if coeff.nonexistence {
            format!("p ≥ γ = {gamma}: nonexistence")
        } else {
            format!("p < γ = {gamma}: no obstruction")
        };
        println!("{line}");
        doc["power"] = json!({
            "p": p,
            "coefficient": coeff.coefficient,
            "nonexistence": coeff.nonexistence,
            "verdict": line,
        });
    }
    if let Some(d) = d {
        run.param("d", d);
        let mt = moser_trudinger(d)?;
        println!(
            "Moser-Trudinger d = {d}: D {} p0 {} E {} q0 {} alpha~ {}",
            num(mt.big_d),
            num(mt.p0),
            num(mt.e),
            num(mt.q0),
            num(mt.alpha_tilde)
        );
        doc["moser_trudinger"] = serde_json::to_value(&mt)?;
    }
    run.write_suffix(".json", &flat_json(&doc))?;
    Ok(run.finish()?)
}

pub fn phase(
    dir: &Path,
    spec: SpecArgs,
    integ: IntegratorArgs,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
) -> CmdResult {
    let s = problem(spec)?;
    let config = integ.apply(IntegratorConfig::default());
    let mut run = Run::new(dir, "phase", stem("phase", s))?;
    run.param("n", s.n());
    run.param("k", s.k());
    record_config(&mut run, &config);

    let traj = integrate_trajectory(s, &config)?;
    let crossings = count_crossings(&traj, 1.0)?;
    println!(
        "termination {} after t = {}, {} samples, max v {}, crossings of v = 1: {} ({})",
        traj.termination,
        num(traj.t_end()),
        traj.samples.len(),
        num(traj.max_v()),
        crossings.count,
        crossings.tail
    );
    let csv_path = csv.unwrap_or_else(|| run.path(".csv"));
    let svg_path = svg.unwrap_or_else(|| run.path(".svg"));
    run.write(&csv_path, &trajectory_csv(&traj))?;
    run.write(&svg_path, &phase_svg(&traj)?)?;

    run.check(
        "open-quadrant",
        traj.samples.iter().all(|p| p.v > 0.0 && p.w > 0.0),
        "v > 0 and w > 0 at every sample",
    );
    if s.codim() >= 4 {
        let mut inside = true;
        for p in &traj.samples {
            inside &= in_invariant_region(s, p.point())?;
        }
        run.check("invariant-region", inside, "every sample inside the region");
    }
    Ok(run.finish()?)
}

fn default_a_max(s: ProblemSpec) -> f64 {
    1.2 * thresholds(s).alpha1
}

pub fn bifurcation(
    dir: &Path,
    spec: SpecArgs,
    integ: IntegratorArgs,
    a_min: Option<f64>,
    a_max: Option<f64>,
    a_points: usize,
) -> CmdResult {
    let s = problem(spec)?;
    if a_points == 0 {
        return Err("the parameter grid is empty (a-points = 0)".into());
    }
    let a_max = a_max.unwrap_or_else(|| default_a_max(s));
    let a_min = a_min.unwrap_or(a_max / a_points as f64);
    if !(a_min > 0.0 && a_max >= a_min) {
        return Err(format!("need 0 < a-min <= a-max, got [{a_min}, {a_max}]").into());
    }
    let grid: Vec<f64> = if a_points == 1 {
        vec![a_min]
    } else {
        (0..a_points)
            .map(|i| a_min + (a_max - a_min) * i as f64 / (a_points - 1) as f64)
            .collect()
    };
    let config = integ.apply(IntegratorConfig::default());
    let mut run = Run::new(dir, "bifurcation", stem("bifurcation", s))?;
    run.param("n", s.n());
    run.param("k", s.k());
    run.param("a_min", num(a_min));
    run.param("a_max", num(a_max));
    run.param("a_points", a_points);
    record_config(&mut run, &config);

    let traj = integrate_trajectory(s, &config)?;
    let diagram = bifurcation_from_trajectory(&traj, &grid)?;
    let mut csv = String::from("a,count\n");
    for e in &diagram.entries {
        csv.push_str(&format!("{:.16e},{}\n", e.a, e.count));
    }
    run.write_suffix(".csv", &csv)?;

    let max_count = diagram
        .entries
        .iter()
        .map(|e| e.count.finite().map_or("inf".to_string(), |c| c.to_string()))
        .max_by_key(|c| c.parse::<usize>().unwrap_or(usize::MAX))
        .unwrap_or_default();
    println!("alpha* estimate {}", num(diagram.alpha_star_estimate));
    match diagram.beta_marker {
        Some(b) => println!("beta marker     {}", num(b)),
        None => println!("beta marker     none"),
    }
    println!("largest count   {max_count}");
    run.write_suffix(
        ".json",
        &flat_json(&json!({
            "alpha_star_estimate": diagram.alpha_star_estimate,
            "beta_marker": diagram.beta_marker,
            "termination": diagram.termination.to_string(),
            "largest_count": max_count,
        })),
    )?;

    let mut consistent = true;
    for e in &diagram.entries {
        if nonexistence_exponential(s, e.a)?.any() {
            consistent &= e.count == SolutionCount::Finite(0);
        }
    }
    run.check(
        "nonexistence-consistency",
        consistent,
        "count 0 wherever a nonexistence test triggers",
    );
    Ok(run.finish()?)
}

#[allow(clippy::too_many_arguments)]
pub fn profile(
    dir: &Path,
    spec: SpecArgs,
    integ: IntegratorArgs,
    at_v: Option<f64>,
    explicit: Option<f64>,
    points: usize,
    tol: f64,
) -> CmdResult {
    let s = problem(spec)?;
    if points < 16 {
        return Err(format!("grid needs at least 16 points, got {points}").into());
    }
    let (mut run, profile) = if let Some(eps) = explicit {
        if !s.is_monge_ampere() {
            return Err("the explicit family needs k = n".into());
        }
        let fam = ExplicitMA::new(s.n(), eps)?;
        let mut run = Run::new(dir, "profile", format!("{}-explicit", stem("profile", s)))?;
        run.param("eps", num(eps));
        (run, fam.profile_on(log_grid(DEFAULT_S_MIN, 1.0, points)?)?)
    } else {
        let v = at_v.expect("clap enforces one of the two modes");
        let config = integ.apply(IntegratorConfig::for_reconstruction(s));
        let traj = integrate_trajectory(s, &config)?;
        let t_star = time_at_v(&traj, v)?;
        let mut run = Run::new(dir, "profile", format!("{}-at-v", stem("profile", s)))?;
        run.param("v", num(v));
        record_config(&mut run, &config);
        (run, reconstruct_profile_with(&traj, t_star, points)?)
    };
    run.param("n", s.n());
    run.param("k", s.k());
    run.param("grid", points);
    run.tol("check_tol", tol);

    let meta = profile.meta.expect("both modes attach metadata");
    let rhs = exponential_rhs(s, &profile, meta.a)?;
    let residual = hessian_residual(s, &profile, &rhs)?;
    let integral = normalization_integral(&profile, s.n())?;
    let v0 = meta.a / parameter_scale_exact(s).to_f64();
    let w0 = meta.lambda / s.k_pow_k();
    let consistency = (w0 * integral - v0).abs() / v0;
    let report = identity_radial_with(s, &profile, &NonlinearitySpec::exponential(meta.a)?, tol)?;

    println!("a {} lambda {}", num(meta.a), num(meta.lambda));
    run.write_suffix(".csv", &profile.to_csv())?;
    run.write_suffix(
        ".json",
        &flat_json(&json!({
            "s": profile.grid,
            "u": profile.u,
            "u_s": profile.us,
            "a": meta.a,
            "lambda": meta.lambda,
            "hessian_residual": residual,
            "normalization_consistency": consistency,
            "pohozaev_residual": report.residual,
        })),
    )?;
    run.write_suffix(".report.json", &flat_json(&report))?;
    run.check_at_most("hessian-residual", residual, tol);
    run.check_at_most("normalization-consistency", consistency, tol);
    run.check_at_most("pohozaev-identity", report.residual, tol);
    run.check(
        "holder",
        report.holder_lhs >= report.holder_rhs * (1.0 - 1e-8),
        format!("{} >= {}", num(report.holder_lhs), num(report.holder_rhs)),
    );
    Ok(run.finish()?)
}

#[allow(clippy::too_many_arguments)]
pub fn shoot(
    dir: &Path,
    spec: SpecArgs,
    p: f64,
    m: f64,
    s_cap: f64,
    sweep_to: Option<f64>,
    sweep_points: usize,
    tol: f64,
) -> CmdResult {
    let s = problem(spec)?;
    let gamma = critical_exponent(s);
    if let Some(p_end) = sweep_to {
        if sweep_points < 2 || !(p_end > p) {
            return Err("a sweep needs sweep-to > p and at least 2 points".into());
        }
        let mut run = Run::new(dir, "shoot", format!("{}-sweep", stem("shoot", s)))?;
        run.param("n", s.n());
        run.param("k", s.k());
        run.param("p_from", num(p));
        run.param("p_to", num(p_end));
        run.param("m", num(m));
        run.param("s_cap", num(s_cap));
        let mut csv = String::from("p,status,first_zero\n");
        let mut zeros = Vec::new();
        println!("gamma = {gamma}");
        for i in 0..sweep_points {
            let pi = p + (p_end - p) * i as f64 / (sweep_points - 1) as f64;
            let res = shoot_power(s, pi, m, s_cap)?;
            let zero = res.first_zero.map(|z| format!("{z:.16e}")).unwrap_or_else(|| "none".into());
            println!("p {:<22} {:<20} {zero}", num(pi), res.status.to_string());
            csv.push_str(&format!("{pi:.16e},{},{zero}\n", res.status));
            if let Some(z) = res.first_zero {
                zeros.push(z);
            }
        }
        run.write_suffix(".csv", &csv)?;
        run.check(
            "first-zero-monotone",
            zeros.windows(2).all(|w| w[1] > w[0]),
            "first zero increases with p",
        );
        return Ok(run.finish()?);
    }

    let mut run = Run::new(dir, "shoot", stem("shoot", s))?;
    run.param("n", s.n());
    run.param("k", s.k());
    run.param("p", num(p));
    run.param("m", num(m));
    run.param("s_cap", num(s_cap));
    run.tol("check_tol", tol);
    let res = shoot_power(s, p, m, s_cap)?;
    println!("gamma = {gamma}, p = {}: {}", num(p), res.status);
    if let Some(z) = res.first_zero {
        println!("first zero at s = {}", num(z));
    } else {
        println!("u at s_cap: {}", num(res.tail_value));
    }
    if res.eigenvalue_regime {
        println!("p = k: eigenvalue regime, not covered by the existence theory");
    }
    run.write_suffix(".csv", &res.profile.to_csv())?;
    run.write_suffix(
        ".json",
        &flat_json(&json!({
            "n": s.n(),
            "k": s.k(),
            "p": p,
            "m": m,
            "s_cap": s_cap,
            "gamma": gamma.to_string(),
            "status": res.status.to_string(),
            "first_zero": res.first_zero,
            "tail_value": res.tail_value,
            "eigenvalue_regime": res.eigenvalue_regime,
        })),
    )?;
    if res.status == ShootingStatus::ZeroFound && !res.eigenvalue_regime {
        let unit = rescale_to_unit_ball(&res)?;
        run.write_suffix(".unit.csv", &unit.to_csv())?;
        let report = identity_radial_with(s, &unit, &NonlinearitySpec::power(p)?, tol)?;
        run.write_suffix(".report.json", &flat_json(&report))?;
        run.check_at_most("pohozaev-identity", report.residual, tol);
    }
    Ok(run.finish()?)
}

pub fn audit(
    dir: &Path,
    spec: SpecArgs,
    path: &Path,
    power: Option<f64>,
    exponential: Option<f64>,
    tol: f64,
) -> CmdResult {
    let s = problem(spec)?;
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let profile = RadialProfile::from_csv(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let nl = match (power, exponential) {
        (Some(p), _) => NonlinearitySpec::power(p)?,
        (None, Some(a)) => NonlinearitySpec::exponential(a)?,
        (None, None) => return Err("one of --power or --exponential is required".into()),
    };
    let name = path.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut run = Run::new(dir, "audit", format!("{name}.audit"))?;
    run.param("n", s.n());
    run.param("k", s.k());
    run.param("profile", path.display());
    run.param("nonlinearity", nl);
    run.tol("check_tol", tol);
    let report = identity_radial_with(s, &profile, &nl, tol)?;
    println!(
        "boundary {} volume {} residual {}: {}",
        num(report.boundary_term),
        num(report.volume_term),
        num(report.residual),
        report.verdict
    );
    run.write_suffix(".json", &flat_json(&report))?;
    run.check_at_most("pohozaev-identity", report.residual, tol);
    Ok(run.finish()?)
}
