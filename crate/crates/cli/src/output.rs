//! Artifact writers. All files of a run go through one [`OutputDir`], which
//! records them for the manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use c3_core::image::Image;
use c3_core::metrics::fmt_sig6;
use c3_core::tensor::{save_tensor, FeatureMap};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::manifest::{RunManifest, CONFIG_FILE};

/// Binary PPM (P6), 8 bits per channel.
pub fn encode_ppm(image: &Image) -> Vec<u8> {
    let n = image.size();
    let mut out = format!("P6\n{n} {n}\n255\n").into_bytes();
    out.extend(image.to_rgb8());
    out
}

/// Parses a P6 file written by [`encode_ppm`] into `(width, height, rgb)`.
pub fn decode_ppm(bytes: &[u8]) -> Option<(usize, usize, Vec<u8>)> {
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return None;
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?.to_owned());
    }
    if fields[0] != "P6" || fields[3] != "255" {
        return None;
    }
    let w: usize = fields[1].parse().ok()?;
    let h: usize = fields[2].parse().ok()?;
    let data = bytes.get(pos + 1..)?.to_vec();
    (data.len() == 3 * w * h).then_some((w, h, data))
}

/// A CSV cell. Floats are rendered with 6 significant digits.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Int(u64),
    Num(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => fmt_sig6(*v),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

/// Builds a CSV row from heterogeneous values.
#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => {
        vec![$($crate::output::Cell::from($v)),*]
    };
}

pub fn render_csv(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(Cell::render).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// One named line on an SVG plot.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=4).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect()
}

/// Minimal line plot: one polyline per series, four-interval axis ticks.
pub fn render_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    const W: f64 = 480.0;
    const H: f64 = 320.0;
    const M: f64 = 50.0;
    let pts = || series.iter().flat_map(|s| s.points.iter().copied());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (x, y) in pts().filter(|(x, y)| x.is_finite() && y.is_finite()) {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="10">"#);
    let _ = writeln!(svg, r#"<text x="{}" y="16" text-anchor="middle" font-size="12">{}</text>"#, W / 2.0, xml(title));
    let _ = writeln!(svg, r#"<line x1="{M}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, H - M, W - M, H - M);
    let _ = writeln!(svg, r#"<line x1="{M}" y1="{M}" x2="{M}" y2="{}" stroke="black"/>"#, H - M);
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(svg, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#, H - M, H - M + 4.0);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, H - M + 16.0, fmt_sig6(t));
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(svg, r#"<line x1="{}" y1="{y:.2}" x2="{M}" y2="{y:.2}" stroke="black"/>"#, M - 4.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, M - 6.0, y + 3.0, fmt_sig6(t));
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, xml(x_label));
    let _ = writeln!(svg, r#"<text x="12" y="{}" text-anchor="middle" transform="rotate(-90 12 {})">{}</text>"#, H / 2.0, H / 2.0, xml(y_label));
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" "));
        let _ = writeln!(svg, r#"<text x="{}" y="{}" fill="{color}">{}</text>"#, W - M + 4.0, M + 12.0 * i as f64, xml(&s.label));
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Directory for one subcommand's artifacts.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> CliResult<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root)?;
        Ok(Self { root, files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn path_for(&mut self, rel: &str) -> CliResult<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        self.files.push(rel.to_owned());
        Ok(path)
    }

    pub fn write_bytes(&mut self, rel: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.path_for(rel)?;
        std::fs::write(path, bytes)?;
        Ok(())
    }

    pub fn write_ppm(&mut self, rel: &str, image: &Image) -> CliResult<()> {
        self.write_bytes(rel, &encode_ppm(image))
    }

    pub fn write_tensor(&mut self, rel: &str, latent: &FeatureMap<f32>) -> CliResult<()> {
        let path = self.path_for(rel)?;
        save_tensor(path, latent)?;
        Ok(())
    }

    pub fn write_csv(&mut self, rel: &str, header: &[&str], rows: &[Vec<Cell>]) -> CliResult<()> {
        self.write_bytes(rel, render_csv(header, rows).as_bytes())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_bytes(rel, text.as_bytes())
    }

    pub fn write_svg(&mut self, rel: &str, title: &str, x_label: &str, y_label: &str, series: &[Series]) -> CliResult<()> {
        self.write_bytes(rel, render_svg(title, x_label, y_label, series).as_bytes())
    }

    /// Writes the effective config and the manifest listing every file.
    pub fn finish(mut self, config: &ExperimentConfig, subcommand: &str) -> CliResult<RunManifest> {
        let config_path = self.path_for(CONFIG_FILE)?;
        let mut text = serde_json::to_string_pretty(&serde_json::to_value(config)?)?;
        text.push('\n');
        std::fs::write(config_path, text)?;
        let manifest = RunManifest::new(config, subcommand, self.files)?;
        manifest.write(&self.root)?;
        Ok(manifest)
    }
}
