use std::fmt::Write as _;
use std::str::FromStr;

use super::aggregate::AggregateRow;
use crate::error::HarnessError;

const FLOOR: f64 = 1e-12;
const W: f64 = 720.0;
const H: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Energy,
    Fidelity,
}

impl FromStr for Metric {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "energy" => Ok(Self::Energy),
            "fidelity" => Ok(Self::Fidelity),
            _ => Err(HarnessError::Config(format!("unknown metric {s:?}; use energy or fidelity"))),
        }
    }
}

impl Metric {
    fn triple(self, r: &AggregateRow) -> [f64; 3] {
        match self {
            Self::Energy => [r.energy_p25, r.energy_median, r.energy_p75],
            Self::Fidelity => [r.fidelity_p25, r.fidelity_median, r.fidelity_p75],
        }
        .map(|v| v.max(FLOOR))
    }

    fn axis_label(self) -> &'static str {
        match self {
            Self::Energy => "energy error",
            Self::Fidelity => "infidelity",
        }
    }
}

/// Log-log SVG of one metric against cumulative shots: the median per method
/// as a line over its interquartile band. Output is a pure function of the input.
pub fn emit_plot(rows: &[AggregateRow], metric: Metric) -> Result<String, HarnessError> {
    let rows: Vec<&AggregateRow> = rows.iter().filter(|r| r.cumulative_shots > 0.0).collect();
    if rows.is_empty() {
        return Err(HarnessError::EmptySeries);
    }
    let mut methods: Vec<&str> = Vec::new();
    for r in &rows {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    let xs = rows.iter().map(|r| r.cumulative_shots.log10());
    let (x0, x1) = span(xs);
    let ys = rows.iter().flat_map(|r| metric.triple(r)).map(f64::log10);
    let (ya, yb) = span(ys);
    let (y0, y1) = (ya.floor(), yb.ceil().max(ya.floor() + 1.0));
    let (x0, x1) = if x1 - x0 < 1e-9 { (x0 - 0.5, x1 + 0.5) } else { (x0, x1) };
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x.log10() - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (y1 - y.log10()) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    for e in (y0 as i64)..=(y1 as i64) {
        let y = py(10f64.powi(e as i32));
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for e in (x0.ceil() as i64)..=(x1.floor() as i64) {
        let x = px(10f64.powi(e as i32));
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#eee"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{e}</text>"##,
            TOP + ph,
            TOP + ph + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">cumulative shots</text>"#,
        LEFT + pw / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(20 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + ph / 2.0,
        metric.axis_label()
    );
    for (i, m) in methods.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let series: Vec<(f64, [f64; 3])> = rows
            .iter()
            .filter(|r| r.method == *m)
            .map(|r| (r.cumulative_shots, metric.triple(r)))
            .collect();
        let upper = series.iter().map(|(x, v)| format!("{:.2},{:.2}", px(*x), py(v[2])));
        let lower = series.iter().rev().map(|(x, v)| format!("{:.2},{:.2}", px(*x), py(v[0])));
        let band: Vec<String> = upper.chain(lower).collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            band.join(" ")
        );
        let line: Vec<String> = series
            .iter()
            .map(|(x, v)| format!("{:.2},{:.2}", px(*x), py(v[1])))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            line.join(" ")
        );
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(m)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn span(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
