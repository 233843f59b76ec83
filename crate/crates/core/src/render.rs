//! Text artefacts: trajectory CSV and SVG phase diagrams.

use std::fmt::Write as _;

use crate::constants::ProblemSpec;
use crate::error::{Error, Result};
use crate::phase::{equilibrium, region_exponent, Trajectory, TrajectorySample};

pub const SVG_WIDTH: f64 = 800.0;
pub const SVG_HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,v,w\n");
    for s in &traj.samples {
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", s.t, s.v, s.w);
    }
    out
}

pub fn trajectory_samples_from_csv(text: &str) -> Result<Vec<TrajectorySample>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "t,v,w" => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                reason: "expected header `t,v,w`".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Parse {
                line: i + 1,
                reason: format!("expected 3 columns, found {}", cols.len()),
            });
        }
        let mut vals = [0.0; 3];
        for (slot, c) in vals.iter_mut().zip(&cols) {
            *slot = c.trim().parse().map_err(|e| Error::Parse {
                line: i + 1,
                reason: format!("`{c}`: {e}"),
            })?;
        }
        out.push(TrajectorySample {
            t: vals[0],
            v: vals[1],
            w: vals[2],
        });
    }
    Ok(out)
}

struct Frame {
    v_max: f64,
    w_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN_LEFT + v / self.v_max * (SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, w: f64) -> f64 {
        SVG_HEIGHT - MARGIN_BOTTOM - w / self.w_max * (SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }

    fn clip(&self, v: f64, w: f64) -> bool {
        v >= 0.0 && v <= self.v_max && w >= 0.0 && w <= self.w_max
    }
}

/// Round an axis limit up to 1, 2 or 5 times a power of ten.
fn nice_ceiling(x: f64) -> f64 {
    let mag = 10f64.powf(x.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&c| c >= x)
        .unwrap_or(10.0 * mag)
}

fn polyline(out: &mut String, frame: &Frame, pts: impl Iterator<Item = (f64, f64)>, style: &str) {
    let mut coords = String::new();
    for (v, w) in pts.filter(|&(v, w)| frame.clip(v, w)) {
        let _ = write!(coords, "{:.2},{:.2} ", frame.x(v), frame.y(w));
    }
    if !coords.is_empty() {
        let _ = writeln!(out, r#"<polyline fill="none" {style} points="{}"/>"#, coords.trim_end());
    }
}

/// Phase diagram in the `(v, w)` plane with the equilibrium, the line
/// `v = 1` and, for `n - k >= 4`, the boundary curves of the invariant region.
pub fn phase_svg(traj: &Trajectory) -> Result<String> {
    let spec: ProblemSpec = traj.spec;
    let c = spec.codim() as f64;
    let v_top = traj.samples.iter().map(|s| s.v).fold(1.0f64, f64::max);
    let w_top = traj.samples.iter().map(|s| s.w).fold(c.max(1.0), f64::max);
    let frame = Frame {
        v_max: nice_ceiling(1.1 * v_top),
        w_max: nice_ceiling(1.1 * w_top),
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" font-family="sans-serif" font-size="14">"#
    );
    let _ = writeln!(out, r#"<rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#);
    let _ = writeln!(out, "<title>phase plane n = {}, k = {}</title>", spec.n(), spec.k());

    // axes and ticks
    let (x0, y0) = (frame.x(0.0), frame.y(0.0));
    let _ = writeln!(
        out,
        r#"<path d="M{x0:.2},{:.2} L{x0:.2},{y0:.2} L{:.2},{y0:.2}" stroke="black" fill="none"/>"#,
        frame.y(frame.w_max),
        frame.x(frame.v_max)
    );
    for i in 0..=5 {
        let v = frame.v_max * i as f64 / 5.0;
        let w = frame.w_max * i as f64 / 5.0;
        let (x, y) = (frame.x(v), frame.y(w));
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 22.0,
            tick_label(v)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 5.0,
            tick_label(w)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">v</text><text x="20" y="{:.2}" text-anchor="middle">w</text>"#,
        0.5 * (frame.x(0.0) + frame.x(frame.v_max)),
        SVG_HEIGHT - 15.0,
        0.5 * (frame.y(0.0) + frame.y(frame.w_max))
    );

    // v = 1
    let _ = writeln!(
        out,
        r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="6,4"/>"#,
        frame.y(frame.w_max),
        x = frame.x(1.0)
    );

    if spec.codim() >= 4 {
        let b = region_exponent(spec)?;
        let taus = (0..=200).map(|i| i as f64 / 200.0);
        polyline(&mut out, &frame, taus.clone().map(|v| (v, c * v)), r#"stroke="seagreen" stroke-dasharray="3,3""#);
        polyline(&mut out, &frame, taus.map(|v| (v, c * v.powf(b))), r#"stroke="seagreen" stroke-dasharray="3,3""#);
    }

    polyline(
        &mut out,
        &frame,
        traj.samples.iter().map(|s| (s.v, s.w)),
        r#"stroke="steelblue" stroke-width="1.5""#,
    );

    if !spec.is_monge_ampere() {
        let eq = equilibrium(spec);
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="crimson"/>"#,
            frame.x(eq.v),
            frame.y(eq.w)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn tick_label(x: f64) -> String {
    let s = format!("{x:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{integrate_trajectory, IntegratorConfig};

    fn traj(n: u32, k: u32) -> Trajectory {
        integrate_trajectory(ProblemSpec::new(n, k).unwrap(), &IntegratorConfig::default()).unwrap()
    }

    #[test]
    fn csv_has_three_columns_and_round_trips() {
        let t = traj(6, 5);
        let csv = trajectory_csv(&t);
        assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 3));
        let back = trajectory_samples_from_csv(&csv).unwrap();
        assert_eq!(back, t.samples);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let err = trajectory_samples_from_csv("t,v,w\n0,1,2\n0,x,2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(trajectory_samples_from_csv("a,b\n").is_err());
    }

    #[test]
    fn figure_panels_render() {
        for (n, k) in [(6, 6), (6, 1), (6, 5)] {
            let t = traj(n, k);
            let svg = phase_svg(&t).unwrap();
            assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
            assert!(svg.contains(r#"viewBox="0 0 800 600""#));
            assert_eq!(svg.contains("<circle"), k < n);
            assert_eq!(svg.contains("seagreen"), n - k >= 4);
            assert_eq!(svg, phase_svg(&t).unwrap());
        }
    }

    #[test]
    fn nice_ceilings() {
        assert_eq!(nice_ceiling(1.1), 2.0);
        assert_eq!(nice_ceiling(4.3), 5.0);
        assert_eq!(nice_ceiling(0.07), 0.1);
        assert_eq!(nice_ceiling(6.6), 10.0);
    }
}
