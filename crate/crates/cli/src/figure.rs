//! Deterministic SVG line charts with ±1 stderr error bars, drawn from the
//! harness CSVs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XAxis {
    Delta,
    Ell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YMetric {
    Throughput,
    Delta80,
    MaxLoad,
}

/// Which CSV columns split rows into separate curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesBy {
    Ell,
    Variant,
    EllVariant,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSpec {
    #[serde(default)]
    pub title: String,
    pub x: XAxis,
    /// Plot `Δ/ℓ` instead of `Δ`.
    #[serde(default)]
    pub rescale: bool,
    #[serde(default)]
    pub log_x: bool,
    pub y: YMetric,
    pub series: SeriesBy,
    pub inputs: Vec<PathBuf>,
    pub output: PathBuf,
}

impl FigureSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let config = |message: String| HarnessError::Config { path: path.display().to_string(), message };
        let spec: FigureSpec = toml::from_str(&text).map_err(|e| config(e.to_string()))?;
        spec.validate().map_err(config)?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.inputs.is_empty() {
            return Err("field `inputs`: need at least one CSV".into());
        }
        if self.rescale && self.x != XAxis::Delta {
            return Err("field `rescale`: only a delay axis can be divided by ℓ".into());
        }
        Ok(())
    }

    fn x_label(&self) -> &'static str {
        match (self.x, self.rescale) {
            (XAxis::Delta, false) => "Δ",
            (XAxis::Delta, true) => "Δ/ℓ",
            (XAxis::Ell, _) => "ℓ",
        }
    }

    fn y_label(&self) -> &'static str {
        match self.y {
            YMetric::Throughput => "block throughput",
            YMetric::Delta80 => "Δ₀.₈",
            YMetric::MaxLoad => "max load",
        }
    }
}

/// One legend entry: points sorted by `x`, each `(x, y, stderr)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64, f64)>,
}

/// Group the rows of every input into curves. Rows sharing a series and an
/// `x` value are pooled into their mean and its standard error.
pub fn collect_curves(spec: &FigureSpec, tables: &[Table]) -> Result<Vec<Curve>> {
    // Per series label: per distinct x, every (y, stderr) seen.
    type Points = Vec<(f64, Vec<(f64, f64)>)>;
    let mut groups: Vec<(String, Points)> = Vec::new();
    for table in tables {
        let x_col = table.column(match spec.x {
            XAxis::Delta => "delta",
            XAxis::Ell => "ell",
        })?;
        let (y_name, err_name) = match spec.y {
            YMetric::Throughput => ("mean_throughput", Some("stderr")),
            YMetric::Delta80 => ("delta80", Some("stderr")),
            YMetric::MaxLoad => ("max_load", None),
        };
        let y_col = table.column(y_name)?;
        let err_col = err_name.map(|e| table.column(e)).transpose()?;
        let ell_col = if spec.rescale || matches!(spec.series, SeriesBy::Ell | SeriesBy::EllVariant) {
            Some(table.column("ell")?)
        } else {
            None
        };
        let variant_col = if matches!(spec.series, SeriesBy::Variant | SeriesBy::EllVariant) {
            Some(table.column("variant")?)
        } else {
            None
        };
        for row in 0..table.rows.len() {
            let mut x = table.number(row, x_col)?;
            if spec.rescale {
                let ell = table.number(row, ell_col.unwrap())?;
                x /= ell;
            }
            let y = table.number(row, y_col)?;
            let err = err_col.map(|c| table.number(row, c)).transpose()?.unwrap_or(0.0);
            let label = match spec.series {
                SeriesBy::Ell => format!("ℓ={}", table.text(row, ell_col.unwrap())),
                SeriesBy::Variant => table.text(row, variant_col.unwrap()).to_string(),
                SeriesBy::EllVariant => {
                    format!("{} ℓ={}", table.text(row, variant_col.unwrap()), table.text(row, ell_col.unwrap()))
                }
                SeriesBy::None => spec.y_label().to_string(),
            };
            let g = match groups.iter().position(|(l, _)| *l == label) {
                Some(g) => g,
                None => {
                    groups.push((label, Vec::new()));
                    groups.len() - 1
                }
            };
            let points = &mut groups[g].1;
            match points.iter_mut().find(|(px, _)| *px == x) {
                Some((_, ys)) => ys.push((y, err)),
                None => points.push((x, vec![(y, err)])),
            }
        }
    }
    let curves = groups
        .into_iter()
        .map(|(label, points)| {
            let mut points: Vec<(f64, f64, f64)> = points
                .into_iter()
                .map(|(x, ys)| {
                    if let [(y, err)] = ys[..] {
                        return (x, y, err);
                    }
                    let values: Vec<f64> = ys.iter().map(|p| p.0).collect();
                    let (mean, se) = barracuda_core::engine::mean_stderr(&values);
                    (x, mean, se)
                })
                .collect();
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Curve { label, points }
        })
        .collect();
    Ok(curves)
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Round steps of 1, 2 or 5 times a power of ten, about five per axis.
fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    (first..).map(|i| i as f64 * step).take_while(|v| *v <= hi + 1e-9 * (hi - lo)).collect()
}

fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut decade = 10f64.powf(lo.log10().floor());
    while decade <= hi {
        for m in [1.0, 2.0, 5.0] {
            let v = m * decade;
            if v >= lo * (1.0 - 1e-9) && v <= hi * (1.0 + 1e-9) {
                out.push(v);
            }
        }
        decade *= 10.0;
    }
    out
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

pub fn render_svg(spec: &FigureSpec, curves: &[Curve]) -> String {
    let points = || curves.iter().flat_map(|c| c.points.iter());
    let xs = points().map(|p| p.0);
    let (x_min, x_max) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let y_min = points().map(|p| p.1 - p.2).fold(f64::INFINITY, f64::min);
    let y_max = points().map(|p| p.1 + p.2).fold(f64::NEG_INFINITY, f64::max);
    let log_x = spec.log_x && x_min > 0.0;
    let (fx, to_x): (Box<dyn Fn(f64) -> f64>, _) =
        if log_x { (Box::new(f64::log10), true) } else { (Box::new(|x| x), false) };
    let (ax_lo, ax_hi) = padded(fx(x_min), fx(x_max));
    let (ay_lo, ay_hi) = padded(y_min, y_max);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (fx(x) - ax_lo) / (ax_hi - ax_lo) * plot_w;
    let py = |y: f64| TOP + (ay_hi - y) / (ay_hi - ay_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    if !spec.title.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape(&spec.title)
        );
    }
    let _ =
        writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333"/>"##);

    let x_ticks = if to_x { log_ticks(10f64.powf(ax_lo), 10f64.powf(ax_hi)) } else { linear_ticks(ax_lo, ax_hi) };
    for v in x_ticks {
        let x = px(v);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 19.0,
            tick_label(v)
        );
    }
    for v in linear_ticks(ay_lo, ay_hi) {
        let y = py(v);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="#333"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            tick_label(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        spec.x_label()
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        spec.y_label()
    );

    for (i, curve) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(s, r#"<g class="series" stroke="{color}" fill="{color}">"#);
        for &(x, y, err) in &curve.points {
            if err > 0.0 {
                let (cx, lo, hi) = (px(x), py(y - err), py(y + err));
                let _ = writeln!(
                    s,
                    r#"<path d="M{cx:.2} {lo:.2}V{hi:.2}M{:.2} {lo:.2}H{:.2}M{:.2} {hi:.2}H{:.2}" fill="none"/>"#,
                    cx - 3.0,
                    cx + 3.0,
                    cx - 3.0,
                    cx + 3.0
                );
            }
        }
        let vertices: Vec<String> =
            curve.points.iter().map(|&(x, y, _)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke-width="1.5"/>"#, vertices.join(" "));
        for &(x, y, _) in &curve.points {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5"/>"#, px(x), py(y));
        }
        let ly = TOP + 12.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke-width="2"/><text x="{:.2}" y="{:.2}" stroke="none">{}</text>"#,
            lx + 22.0,
            lx + 28.0,
            ly + 4.0,
            escape(&curve.label)
        );
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

/// Read the spec's inputs and write its SVG. Nothing is written on error.
pub fn render_figure(spec: &FigureSpec) -> Result<PathBuf> {
    spec.validate().map_err(|message| HarnessError::Config { path: spec.output.display().to_string(), message })?;
    let tables = spec.inputs.iter().map(|p| Table::read(p)).collect::<Result<Vec<_>>>()?;
    let curves = collect_curves(spec, &tables)?;
    let svg = render_svg(spec, &curves);
    if let Some(dir) = spec.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    std::fs::write(&spec.output, svg).map_err(|e| HarnessError::io(&spec.output, e))?;
    Ok(spec.output.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(dir: &Path, csv: &str) -> FigureSpec {
        let input = dir.join("in.csv");
        std::fs::write(&input, csv).unwrap();
        FigureSpec {
            title: "t".into(),
            x: XAxis::Delta,
            rescale: false,
            log_x: false,
            y: YMetric::Throughput,
            series: SeriesBy::Ell,
            inputs: vec![input],
            output: dir.join("out.svg"),
        }
    }

    const HEADER: &str = "delta,ell,variant,n,k,t,trials,mean_throughput,stderr\n";

    #[test]
    fn two_points_make_one_polyline_with_two_vertices() {
        let dir = tempfile::tempdir().unwrap();
        let s = spec(dir.path(), &format!("{HEADER}1,1,instant,10,1,5,4,0.9,0.01\n2,1,instant,10,1,5,4,0.7,0.02\n"));
        let svg = std::fs::read_to_string(render_figure(&s).unwrap()).unwrap();
        let lines: Vec<&str> = svg.lines().filter(|l| l.starts_with("<polyline")).collect();
        assert_eq!(lines.len(), 1);
        let points = lines[0].split('"').nth(1).unwrap();
        assert_eq!(points.split(' ').count(), 2);
        assert_eq!(svg.matches("<path ").count(), 2);
    }

    #[test]
    fn one_curve_per_series_value_and_rescaled_axis() {
        let dir = tempfile::tempdir().unwrap();
        let mut body = HEADER.to_string();
        for ell in [1, 2, 4] {
            for delta in [1, 2, 4] {
                body += &format!("{delta},{ell},instant,10,1,5,4,0.5,0.01\n");
            }
        }
        let mut s = spec(dir.path(), &body);
        let table = Table::read(&s.inputs[0]).unwrap();
        let raw = collect_curves(&s, std::slice::from_ref(&table)).unwrap();
        assert_eq!(raw.iter().map(|c| c.label.as_str()).collect::<Vec<_>>(), ["ℓ=1", "ℓ=2", "ℓ=4"]);
        s.rescale = true;
        let scaled = collect_curves(&s, &[table]).unwrap();
        let xs: Vec<f64> = scaled[2].points.iter().map(|p| p.0).collect();
        assert_eq!(xs, vec![0.25, 0.5, 1.0]);
        let svg = render_svg(&s, &scaled);
        assert_eq!(svg.matches(r#"<g class="series""#).count(), 3);
        assert!(svg.contains(">Δ/ℓ<"));
    }

    #[test]
    fn rendering_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let s =
            spec(dir.path(), &format!("{HEADER}0.5,2,instant,10,1,5,4,0.95,0.005\n3,2,instant,10,1,5,4,0.4,0.03\n"));
        let a = std::fs::read(render_figure(&s).unwrap()).unwrap();
        let b = std::fs::read(render_figure(&s).unwrap()).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("<svg "));
        assert!(text.ends_with("</svg>\n"));
    }

    #[test]
    fn empty_body_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let s = spec(dir.path(), HEADER);
        assert!(render_figure(&s).is_err());
        assert!(!s.output.exists());
    }

    #[test]
    fn missing_column_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let s = spec(dir.path(), "delta,ell,mean_throughput\n1,1,0.5\n");
        let err = render_figure(&s).unwrap_err().to_string();
        assert!(err.contains("missing column `stderr`"), "{err}");
        assert!(!s.output.exists());
    }

    #[test]
    fn repeated_rows_are_pooled() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = spec(dir.path(), "t,ell,run,max_load,bound_C6\n10,1,0,2,9\n10,1,1,4,9\n10,2,0,5,9\n");
        s.x = XAxis::Ell;
        s.y = YMetric::MaxLoad;
        s.series = SeriesBy::None;
        let table = Table::read(&s.inputs[0]).unwrap();
        let curves = collect_curves(&s, &[table]).unwrap();
        assert_eq!(curves.len(), 1);
        assert_eq!(curves[0].points, vec![(1.0, 3.0, 1.0), (2.0, 5.0, 0.0)]);
    }

    #[test]
    fn ticks_are_round() {
        let labels: Vec<String> = linear_ticks(0.0, 1.0).into_iter().map(tick_label).collect();
        assert_eq!(labels, ["0", "0.2", "0.4", "0.6", "0.8", "1"]);
        assert_eq!(log_ticks(0.2, 9.0), vec![0.2, 0.5, 1.0, 2.0, 5.0]);
        assert_eq!(tick_label(0.25), "0.25");
        assert_eq!(tick_label(2.0), "2");
    }
}
