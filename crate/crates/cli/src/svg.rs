//! Minimal line-chart SVG writer. Coordinates are printed with fixed
//! precision so identical input gives byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use cavity_duet_core::observables::ObservableSeries;
use cavity_duet_core::presets::Figure;
use cavity_duet_core::Observable;

use crate::error::{CliError, CliResult};

const BLUE: &str = "#1f5fbf";
const GREEN: &str = "#2a9d3a";
const YELLOW: &str = "#d9a400";
const RED: &str = "#c0392b";

const PANEL_W: f64 = 460.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Track {
    Analytic,
    Numeric,
    Diff,
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub track: Track,
    pub obs: Observable,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub curves: Vec<Curve>,
}

/// Panels laid out row-major on a grid of `cols` columns.
#[derive(Debug, Clone)]
pub struct Layout {
    pub cols: usize,
    pub panels: Vec<Panel>,
}

fn curve(track: Track, obs: Observable, color: &'static str) -> Curve {
    let (suffix, dashed) = match track {
        Track::Analytic => ("A", false),
        Track::Numeric => ("N", true),
        Track::Diff => ("A-N", false),
    };
    let name = match obs {
        Observable::N1 => "n1",
        Observable::N2 => "n2",
        Observable::Sz1 => "sz1",
        Observable::Sz2 => "sz2",
        Observable::M1 => "M1",
        Observable::M2 => "M2",
        Observable::MTot => "M",
    };
    Curve {
        label: format!("{name} {suffix}"),
        color,
        dashed,
        track,
        obs,
    }
}

fn panel(title: &str, curves: Vec<Curve>) -> Panel {
    Panel {
        title: title.into(),
        curves,
    }
}

impl Layout {
    /// Analytic observables next to their differences.
    pub fn two_panel() -> Self {
        use Observable::*;
        use Track::*;
        Self {
            cols: 2,
            panels: vec![
                panel(
                    "analytic",
                    vec![
                        curve(Analytic, N1, BLUE),
                        curve(Analytic, N2, GREEN),
                        curve(Analytic, Sz1, YELLOW),
                        curve(Analytic, Sz2, RED),
                    ],
                ),
                panel(
                    "difference",
                    vec![
                        curve(Diff, N1, BLUE),
                        curve(Diff, N2, GREEN),
                        curve(Diff, Sz1, YELLOW),
                        curve(Diff, Sz2, RED),
                    ],
                ),
            ],
        }
    }

    pub fn for_figure(fig: Figure) -> Self {
        use Observable::*;
        use Track::*;
        match fig {
            Figure::Fig1 => Self {
                cols: 2,
                panels: vec![
                    panel(
                        "cavity one, analytic",
                        vec![
                            curve(Analytic, N1, BLUE),
                            curve(Analytic, Sz1, YELLOW),
                            curve(Analytic, M1, GREEN),
                        ],
                    ),
                    panel(
                        "difference",
                        vec![curve(Diff, N1, BLUE), curve(Diff, Sz1, YELLOW)],
                    ),
                ],
            },
            Figure::Fig2 => Self {
                cols: 2,
                panels: vec![
                    panel(
                        "(a) photons, analytic",
                        vec![curve(Analytic, N1, BLUE), curve(Analytic, N2, GREEN)],
                    ),
                    panel(
                        "(b) excitations, analytic",
                        vec![
                            curve(Analytic, M1, BLUE),
                            curve(Analytic, M2, GREEN),
                            curve(Analytic, MTot, YELLOW),
                        ],
                    ),
                    panel(
                        "(c) photon difference",
                        vec![curve(Diff, N1, BLUE), curve(Diff, N2, GREEN)],
                    ),
                    panel(
                        "(d) excitation difference",
                        vec![curve(Diff, M1, BLUE), curve(Diff, M2, GREEN)],
                    ),
                ],
            },
            Figure::Fig3 => Self {
                cols: 2,
                panels: vec![
                    panel(
                        "photons",
                        vec![
                            curve(Analytic, N1, BLUE),
                            curve(Numeric, N1, BLUE),
                            curve(Analytic, N2, GREEN),
                            curve(Numeric, N2, GREEN),
                        ],
                    ),
                    panel(
                        "atomic inversion",
                        vec![
                            curve(Analytic, Sz1, BLUE),
                            curve(Numeric, Sz1, BLUE),
                            curve(Analytic, Sz2, GREEN),
                            curve(Numeric, Sz2, GREEN),
                        ],
                    ),
                    panel(
                        "photon difference",
                        vec![curve(Diff, N1, BLUE), curve(Diff, N2, GREEN)],
                    ),
                    panel(
                        "inversion difference",
                        vec![curve(Diff, Sz1, BLUE), curve(Diff, Sz2, GREEN)],
                    ),
                ],
            },
        }
    }
}

fn values<'a>(series: &'a ObservableSeries, c: &Curve) -> &'a [f64] {
    match c.track {
        Track::Analytic => series.analytic.get(c.obs),
        Track::Numeric => series.numeric.get(c.obs),
        Track::Diff => series.diff.get(c.obs),
    }
}

/// Roughly five round tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64, lo: f64, hi: f64) -> String {
    let m = lo.abs().max(hi.abs());
    if v == 0.0 {
        "0".into()
    } else if !(1e-2..1e4).contains(&m) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn y_range(series: &ObservableSeries, p: &Panel) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in &p.curves {
        for &v in values(series, c) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(1e-12 * (1.0 + hi.abs().max(lo.abs())));
    if hi - lo < 1e-14 {
        let w = if lo == 0.0 { 1e-3 } else { lo.abs() * 1e-3 };
        return (lo - w, hi + w);
    }
    (lo - pad, hi + pad)
}

fn draw_panel(out: &mut String, series: &ObservableSeries, p: &Panel, ox: f64, oy: f64) {
    let (x0, x1) = (ox + MARGIN_L, ox + PANEL_W - MARGIN_R);
    let (y0, y1) = (oy + PANEL_H - MARGIN_B, oy + MARGIN_T);
    let (tlo, thi) = match (series.tau.first(), series.tau.last()) {
        (Some(&a), Some(&b)) if b > a => (a, b),
        (Some(&a), _) => (a, a + 1.0),
        _ => (0.0, 1.0),
    };
    let (vlo, vhi) = y_range(series, p);
    let sx = |t: f64| x0 + (t - tlo) / (thi - tlo) * (x1 - x0);
    let sy = |v: f64| y0 - (v - vlo) / (vhi - vlo) * (y0 - y1);

    let _ = writeln!(
        out,
        r##"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444"/>"##,
        x1 - x0,
        y0 - y1
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
        (x0 + x1) / 2.0,
        oy + 20.0,
        p.title
    );
    for t in ticks(tlo, thi) {
        let x = sx(t);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="#444"/>"##,
            y0 + 4.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="10">{}</text>"#,
            y0 + 16.0,
            tick_label(t, tlo, thi)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">tau</text>"#,
        (x0 + x1) / 2.0,
        y0 + 32.0
    );
    for v in ticks(vlo, vhi) {
        let y = sy(v);
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="#444"/>"##,
            x0 - 4.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{}</text>"#,
            x0 - 6.0,
            y + 3.5,
            tick_label(v, vlo, vhi)
        );
    }
    for (k, c) in p.curves.iter().enumerate() {
        let mut pts = String::new();
        for (t, v) in series.tau.iter().zip(values(series, c)) {
            let _ = write!(pts, "{:.2},{:.2} ", sx(*t), sy(*v));
        }
        let dash = if c.dashed {
            r#" stroke-dasharray="5,3""#
        } else {
            ""
        };
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.2"{dash} points="{}"/>"#,
            c.color,
            pts.trim_end()
        );
        let ly = y1 + 12.0 + 13.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="1.5"{dash}/>"#,
            x1 - 70.0,
            x1 - 52.0,
            c.color
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10">{}</text>"#,
            x1 - 48.0,
            ly + 3.5,
            c.label
        );
    }
}

pub fn render_svg(series: &ObservableSeries, layout: &Layout) -> String {
    let cols = layout.cols.max(1);
    let rows = layout.panels.len().div_ceil(cols).max(1);
    let (w, h) = (PANEL_W * cols as f64, PANEL_H * rows as f64);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for (i, p) in layout.panels.iter().enumerate() {
        let (r, c) = (i / cols, i % cols);
        let _ = writeln!(out, r#"<g class="panel" id="panel-{i}">"#);
        draw_panel(&mut out, series, p, c as f64 * PANEL_W, r as f64 * PANEL_H);
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

pub fn emit_svg(series: &ObservableSeries, path: &Path, layout: &Layout) -> CliResult<()> {
    std::fs::write(path, render_svg(series, layout)).map_err(|e| CliError::io(path, e))
}
