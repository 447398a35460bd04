//! Two-panel chart: mean actual evaluations (log scale) and speedup, both
//! against the inheritance proportion.

use std::fmt::Write as _;
use std::path::Path;

use boa_core::experiments::ProportionSummary;

use crate::CliError;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_T: f64 = 40.0;
const GAP: f64 = 110.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Series<'a> {
    label: String,
    points: Vec<&'a ProportionSummary>,
}

fn series(aggregates: &[ProportionSummary]) -> Vec<Series<'_>> {
    let mut out: Vec<Series> = Vec::new();
    for s in aggregates {
        let label = format!("{}-{}", s.problem, s.n);
        match out.iter_mut().find(|x| x.label == label) {
            Some(x) => x.points.push(s),
            None => out.push(Series { label, points: vec![s] }),
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.proportion.total_cmp(&b.proportion));
    }
    out
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Panel {
    x0: f64,
    title: &'static str,
    y_label: &'static str,
    log: bool,
    y_min: f64,
    y_max: f64,
}

impl Panel {
    fn x(&self, proportion: f64) -> f64 {
        self.x0 + proportion * PANEL_W
    }

    fn y(&self, value: f64) -> f64 {
        let t = if self.log {
            (value.log10() - self.y_min.log10()) / (self.y_max.log10() - self.y_min.log10())
        } else {
            (value - self.y_min) / (self.y_max - self.y_min)
        };
        MARGIN_T + PANEL_H * (1.0 - t)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (lo, hi) = (self.y_min.log10().round() as i32, self.y_max.log10().round() as i32);
            (lo..=hi).map(|e| 10f64.powi(e)).collect()
        } else {
            let step = nice_step(self.y_max - self.y_min);
            let mut ticks = Vec::new();
            let mut v = (self.y_min / step).ceil() * step;
            while v <= self.y_max + 1e-9 * step {
                ticks.push(v);
                v += step;
            }
            ticks
        }
    }

    fn frame(&self, svg: &mut String) {
        let (x0, y0, x1, y1) = (self.x0, MARGIN_T, self.x0 + PANEL_W, MARGIN_T + PANEL_H);
        writeln!(
            svg,
            r#"<rect x="{x0}" y="{y0}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="black"/>"#
        )
        .unwrap();
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let x = self.x(p);
            writeln!(svg, r#"<line x1="{x}" y1="{y1}" x2="{x}" y2="{}" stroke="black"/>"#, y1 + 5.0).unwrap();
            if i % 2 == 0 {
                writeln!(svg, r#"<text x="{x}" y="{}" text-anchor="middle">{p:.1}</text>"#, y1 + 20.0).unwrap();
            }
        }
        for v in self.ticks() {
            let y = self.y(v);
            let label = if self.log { format!("{v:e}") } else { format!("{v}") };
            writeln!(svg, r##"<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#dddddd"/>"##).unwrap();
            writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{label}</text>"#, x0 - 6.0, y + 4.0)
                .unwrap();
        }
        writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">inheritance proportion</text>"#,
            x0 + PANEL_W / 2.0,
            y1 + 40.0
        )
        .unwrap();
        let (lx, ly) = (x0 - 55.0, y0 + PANEL_H / 2.0);
        writeln!(
            svg,
            r#"<text x="{lx}" y="{ly}" text-anchor="middle" transform="rotate(-90 {lx} {ly})">{}</text>"#,
            self.y_label
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-weight="bold">{}</text>"#,
            x0 + PANEL_W / 2.0,
            y0 - 12.0,
            self.title
        )
        .unwrap();
    }

    fn plot(&self, svg: &mut String, points: &[(f64, f64)], color: &str) {
        let coords: Vec<(f64, f64)> = points.iter().map(|&(p, v)| (self.x(p), self.y(v))).collect();
        if coords.len() > 1 {
            let list: Vec<String> = coords.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                list.join(" ")
            )
            .unwrap();
        }
        for (x, y) in coords {
            writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#).unwrap();
        }
    }
}

fn nice_step(range: f64) -> f64 {
    let raw = range.max(1e-12) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|&s| s >= raw).unwrap_or(10.0 * mag)
}

/// Renders the chart as SVG text.
pub fn speedup_svg(aggregates: &[ProportionSummary]) -> Result<String, CliError> {
    if aggregates.is_empty() {
        return Err(CliError::Input("nothing to plot".into()));
    }
    if let Some(bad) = aggregates
        .iter()
        .find(|s| !(s.mean_evaluations > 0.0 && s.mean_evaluations.is_finite() && s.speedup.is_finite()))
    {
        return Err(CliError::Input(format!(
            "cannot plot {}-{} at {}: non-positive or non-finite value",
            bad.problem, bad.n, bad.proportion
        )));
    }
    let evals = aggregates.iter().map(|s| s.mean_evaluations);
    let (lo, hi) = evals.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let evaluations = Panel {
        x0: MARGIN_L,
        title: "Actual fitness evaluations",
        y_label: "mean actual evaluations",
        log: true,
        y_min: 10f64.powf(lo.log10().floor()),
        y_max: 10f64.powf(hi.log10().ceil().max(lo.log10().floor() + 1.0)),
    };
    let top = aggregates.iter().map(|s| s.speedup).fold(1.0f64, f64::max);
    let speedups = Panel {
        x0: MARGIN_L + PANEL_W + GAP,
        title: "Speedup",
        y_label: "speedup",
        log: false,
        y_min: 0.0,
        y_max: nice_step(top * 1.1) * (top * 1.1 / nice_step(top * 1.1)).ceil(),
    };

    let width = 2.0 * (MARGIN_L + PANEL_W) + GAP - MARGIN_L + 20.0;
    let all = series(aggregates);
    let height = MARGIN_T + PANEL_H + 60.0 + 20.0 * all.len() as f64;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    evaluations.frame(&mut svg);
    speedups.frame(&mut svg);
    for (k, s) in all.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let label = escape(&s.label);
        writeln!(svg, r#"<g class="series" data-label="{label}">"#).unwrap();
        let pts: Vec<(f64, f64)> = s.points.iter().map(|p| (p.proportion, p.mean_evaluations)).collect();
        evaluations.plot(&mut svg, &pts, color);
        let pts: Vec<(f64, f64)> = s.points.iter().map(|p| (p.proportion, p.speedup)).collect();
        speedups.plot(&mut svg, &pts, color);
        writeln!(svg, "</g>").unwrap();
        let ly = MARGIN_T + PANEL_H + 60.0 + 20.0 * k as f64;
        writeln!(
            svg,
            r#"<rect x="{MARGIN_L}" y="{}" width="12" height="12" fill="{color}"/><text x="{}" y="{ly}">{label}</text>"#,
            ly - 10.0,
            MARGIN_L + 18.0
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn render_speedup_svg(aggregates: &[ProportionSummary], path: &Path) -> Result<(), CliError> {
    let svg = speedup_svg(aggregates)?;
    std::fs::write(path, svg)?;
    Ok(())
}
