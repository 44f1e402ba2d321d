//! Output formats: eigen reports, reconstruction tables and SVG overlays.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::pswf::PswfBasis;

/// `x` as C's `%.12e`, e.g. `-1.250000000000e-03`.
pub fn fmt_e(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

#[derive(Serialize)]
struct EigenReport<'a> {
    q: f64,
    v: f64,
    a_exp: i32,
    #[serde(rename = "M")]
    depth: usize,
    eigenvalues: &'a [f64],
    samples: Vec<&'a [f64]>,
}

pub fn eigen_json(basis: &PswfBasis) -> String {
    let p = basis.params();
    let b = basis.bandlimit();
    let report = EigenReport {
        q: p.q(),
        v: p.v(),
        a_exp: b.a_exp(),
        depth: b.depth(),
        eigenvalues: basis.eigenvalues(),
        samples: (0..basis.count())
            .map(|i| basis.samples(i).expect("in range"))
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&report).expect("plain data serializes");
    s.push('\n');
    s
}

/// One row per retained point `a q^m`: `k, x, psi_0, psi_1, ...` with
/// `x = q^k`.
pub fn eigen_csv(basis: &PswfBasis) -> String {
    let p = basis.params();
    let b = basis.bandlimit();
    let mut s = String::from("k,x");
    for i in 0..basis.count() {
        write!(s, ",psi_{i}").unwrap();
    }
    s.push('\n');
    for m in 0..b.depth() {
        let k = b.a_exp() + m as i32;
        write!(s, "{k},{}", fmt_e(p.point(k))).unwrap();
        for i in 0..basis.count() {
            write!(s, ",{}", fmt_e(basis.samples(i).expect("in range")[m])).unwrap();
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionRow {
    pub z: f64,
    pub f_true: Option<f64>,
    pub f_reconstructed: f64,
}

/// Columns `z, f_true, f_reconstructed, abs_error`; the last two cells are
/// empty when the true value is unknown.
pub fn reconstruction_csv(rows: &[ReconstructionRow]) -> String {
    let mut s = String::from("z,f_true,f_reconstructed,abs_error\n");
    for r in rows {
        match r.f_true {
            Some(t) => writeln!(
                s,
                "{},{},{},{}",
                fmt_e(r.z),
                fmt_e(t),
                fmt_e(r.f_reconstructed),
                fmt_e((t - r.f_reconstructed).abs())
            ),
            None => writeln!(s, "{},,{},", fmt_e(r.z), fmt_e(r.f_reconstructed)),
        }
        .unwrap();
    }
    s
}

/// Rows of `k, x` followed by one column per named series.
pub fn lattice_csv(ks: &[i32], q: f64, columns: &[(&str, Vec<f64>)]) -> String {
    let mut s = String::from("k,x");
    for (name, _) in columns {
        write!(s, ",{name}").unwrap();
    }
    s.push('\n');
    for (row, &k) in ks.iter().enumerate() {
        write!(s, "{k},{}", fmt_e(q.powi(k))).unwrap();
        for (_, values) in columns {
            write!(s, ",{}", fmt_e(values[row])).unwrap();
        }
        s.push('\n');
    }
    s
}

pub struct Series<'a> {
    pub name: &'a str,
    pub points: &'a [(f64, f64)],
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Line plot with one `<polyline>` per series on shared linear axes.
pub fn svg_plot(title: &str, series: &[Series<'_>]) -> String {
    let all = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 >= x1 {
        x0 = if x0.is_finite() { x0 - 0.5 } else { 0.0 };
        x1 = x0 + 1.0;
    }
    if y0 >= y1 {
        y0 = if y0.is_finite() { y0 - 0.5 } else { 0.0 };
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(s, r#"<title>{}</title>"#, escape(title)).unwrap();
    writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}" font-size="12">{}</text>"#,
        MARGIN - 10.0,
        escape(title)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}" font-size="10">x: [{}, {}]  y: [{}, {}]</text>"#,
        HEIGHT - 12.0,
        fmt_e(x0),
        fmt_e(x1),
        fmt_e(y0),
        fmt_e(y1)
    )
    .unwrap();
    for (i, serie) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = serie
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            points.join(" "),
            escape(serie.name)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            WIDTH - MARGIN - 120.0,
            MARGIN + 16.0 * (i + 1) as f64,
            escape(serie.name)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
