use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SweepRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "t,epsilon,delta_star,T,achieved_error,grid_slack,wall_time_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
            Self::Svg => "svg",
        }
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "svg" => Ok(Self::Svg),
            other => Err(Error::input(format!("unknown output format `{other}`"))),
        }
    }
}

fn nonempty(records: &[SweepRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::input("no sweep records to emit"));
    }
    Ok(())
}

/// Floats are written in shortest round-trip form.
pub fn to_csv(records: &[SweepRecord]) -> Result<String> {
    nonempty(records)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in records {
        w.serialize(r)
            .map_err(|e| Error::numerical(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::numerical(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::numerical(format!("csv: {e}")))
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| Error::input(format!("csv: {e}")))?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::input("CSV header does not match the sweep record layout"));
    }
    rd.deserialize()
        .map(|r| r.map_err(|e| Error::input(format!("csv: {e}"))))
        .collect()
}

pub fn to_json(records: &[SweepRecord]) -> Result<String> {
    nonempty(records)?;
    serde_json::to_string_pretty(records).map_err(|e| Error::numerical(format!("json: {e}")))
}

/// Log-log scatter of T against t, or against 1/ε when ε varies more than t,
/// with the least-squares line through all points.
pub fn to_svg(records: &[SweepRecord]) -> Result<String> {
    nonempty(records)?;
    let distinct = |f: fn(&SweepRecord) -> f64| {
        let mut v: Vec<f64> = records.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    };
    let by_t = distinct(|r| r.t) >= distinct(|r| r.epsilon);
    let (xlabel, pts): (&str, Vec<(f64, f64)>) = if by_t {
        (
            "log10 t",
            records.iter().map(|r| (r.t.log10(), r.big_t.log10())).collect(),
        )
    } else {
        (
            "log10 1/epsilon",
            records
                .iter()
                .map(|r| ((1.0 / r.epsilon).log10(), r.big_t.log10()))
                .collect(),
        )
    };
    if pts.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::input("sweep records must be positive to plot on log axes"));
    }

    let (w, h, m) = (640.0, 480.0, 60.0);
    let span = |vals: Vec<f64>| {
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
        (lo - pad, hi + pad)
    };
    let (x0, x1) = span(pts.iter().map(|p| p.0).collect());
    let (y0, y1) = span(pts.iter().map(|p| p.1).collect());
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} V{:.2} H{:.2}" fill="none" stroke="black"/>"#,
        h - m,
        w - m
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle">{xlabel}</text>"#,
        w / 2.0,
        h - 20.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 20 {:.2})">log10 T</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (x, y) in &pts {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="steelblue"/>"#,
            sx(*x),
            sy(*y)
        );
    }
    if let Some((slope, icept)) = line_fit(&pts) {
        let (ya, yb) = (icept + slope * x0, icept + slope * x1);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="firebrick" stroke-dasharray="6 4"/>"#,
            sx(x0),
            sy(ya),
            sx(x1),
            sy(yb)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="40" font-family="sans-serif" font-size="14">slope {slope:.4}</text>"#,
            m + 10.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn line_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if pts.len() < 2 || sxx == 0.0 {
        return None;
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    Some((slope, my - slope * mx))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Write `records` to `path` in `format`.
pub fn emit(records: &[SweepRecord], format: Format, path: &Path) -> Result<()> {
    let text = match format {
        Format::Csv => to_csv(records)?,
        Format::Json => to_json(records)?,
        Format::Svg => to_svg(records)?,
    };
    write_text(path, &text)
}

/// Pretty JSON for any report.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::numerical(format!("json: {e}")))?;
    write_text(path, &(text + "\n"))
}
