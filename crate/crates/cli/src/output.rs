//! CSV tables, config sidecars and optional SVG line plots.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    /// Floats carry 17 significant digits so values round-trip exactly.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            _ => None,
        }
    }

    fn total_cmp(&self, other: &Cell) -> Ordering {
        match (self.as_f64(), other.as_f64()) {
            (Some(a), Some(b)) => a.total_cmp(&b),
            _ => self.render().cmp(&other.render()),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// Which columns to draw: `y` against `x`, one line per distinct `series`
/// tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub x: &'static str,
    pub y: &'static str,
    pub series: Vec<&'static str>,
    pub log_x: bool,
    pub log_y: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Appended to the run's file stem: `""` gives `<stem>.csv`, `"fits"`
    /// gives `<stem>-fits.csv`.
    pub suffix: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub plot: Option<PlotSpec>,
}

impl Table {
    pub fn new(suffix: &'static str, columns: &[&'static str]) -> Self {
        Self { suffix, columns: columns.to_vec(), rows: Vec::new(), plot: None }
    }

    pub fn with_plot(mut self, plot: PlotSpec) -> Self {
        self.plot = Some(plot);
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Stable sort on the named columns, numbers numerically.
    pub fn sort_by(&mut self, keys: &[&str]) {
        let idx: Vec<usize> = keys.iter().map(|k| self.column(k).expect("sort key is a column")).collect();
        self.rows.sort_by(|a, b| {
            idx.iter().map(|&i| a[i].total_cmp(&b[i])).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
        });
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Output { path: PathBuf::from("<memory>"), source: e.into() };
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output {
            path: PathBuf::from("<memory>"),
            source: std::io::Error::other(e.to_string()),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    fn file_name(&self, stem: &str, ext: &str) -> String {
        if self.suffix.is_empty() {
            format!("{stem}.{ext}")
        } else {
            format!("{stem}-{}.{ext}", self.suffix)
        }
    }
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Output { path: path.to_path_buf(), source })
}

/// Writes every table as `<dir>/<stem>[-suffix].csv` with the effective
/// config next to it, plus an SVG per plotted table when requested.
pub fn write_tables(tables: &[Table], config: &ExperimentConfig, svg: bool) -> CliResult<Vec<PathBuf>> {
    let dir = &config.output.dir;
    std::fs::create_dir_all(dir).map_err(|source| CliError::Output { path: dir.clone(), source })?;
    let stem = config.file_stem()?;
    let sidecar = serde_json::to_string_pretty(config).expect("config serialises") + "\n";
    let mut written = Vec::new();
    for t in tables {
        let csv_path = dir.join(t.file_name(&stem, "csv"));
        write(&csv_path, &t.to_csv()?)?;
        let side = dir.join(format!("{}.config.json", t.file_name(&stem, "csv")));
        write(&side, &sidecar)?;
        written.push(csv_path);
        written.push(side);
        if let (true, Some(plot)) = (svg, &t.plot) {
            let svg_path = dir.join(t.file_name(&stem, "svg"));
            write(&svg_path, &render_svg(t, plot))?;
            written.push(svg_path);
        }
    }
    Ok(written)
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

/// Minimal line plot; points with non-finite or (on log axes) non-positive
/// coordinates are skipped.
pub fn render_svg(table: &Table, plot: &PlotSpec) -> String {
    let (w, h, margin) = (640.0, 420.0, 56.0);
    let xi = table.column(plot.x).expect("plot x is a column");
    let yi = table.column(plot.y).expect("plot y is a column");
    let si: Vec<usize> = plot.series.iter().map(|s| table.column(s).expect("series key is a column")).collect();
    let tx = |v: f64| if plot.log_x { v.log10() } else { v };
    let ty = |v: f64| if plot.log_y { v.log10() } else { v };

    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for row in &table.rows {
        let (Some(x), Some(y)) = (row[xi].as_f64(), row[yi].as_f64()) else { continue };
        let (x, y) = (tx(x), ty(y));
        if !x.is_finite() || !y.is_finite() {
            continue;
        }
        let label = si.iter().map(|&i| format!("{}={}", table.columns[i], short(&row[i]))).collect::<Vec<_>>().join(" ");
        match series.iter_mut().find(|(l, _)| *l == label) {
            Some((_, pts)) => pts.push((x, y)),
            None => series.push((label, vec![(x, y)])),
        }
    }
    let all = series.iter().flat_map(|(_, p)| p.iter().copied());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if !(y1 > y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let px = |x: f64| margin + (x - x0) / (x1 - x0) * (w - 2.0 * margin);
    let py = |y: f64| h - margin - (y - y0) / (y1 - y0) * (h - 2.0 * margin);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{margin}" y="{margin}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * margin,
        h - 2.0 * margin
    );
    let axis = |name: &str, log: bool| if log { format!("log10 {name}") } else { name.to_string() };
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w / 2.0, h - 16.0, axis(plot.x, plot.log_x));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        axis(plot.y, plot.log_y)
    );
    for (v, anchor, x, y) in [
        (x0, "start", px(x0), h - margin + 14.0),
        (x1, "end", px(x1), h - margin + 14.0),
    ] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{v:.3}</text>"#);
    }
    for (v, y) in [(y0, py(y0)), (y1, py(y1))] {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{v:.3}</text>"#, margin - 4.0, y + 4.0);
    }
    for (k, (label, pts)) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        for &(x, y) in pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{colour}"/>"#, px(x), py(y));
        }
        let ly = margin + 14.0 * (k as f64 + 1.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}" fill="{colour}">{}</text>"#, w - margin - 6.0 - 0.0, escape(label));
    }
    s.push_str("</svg>\n");
    s
}

fn short(c: &Cell) -> String {
    match c {
        Cell::Float(x) => format!("{x}"),
        other => other.render(),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
