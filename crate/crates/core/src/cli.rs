//! Command-line driver: `eigen`, `reconstruct` and `transform`.
//!
//! Settings resolve as defaults, then an optional JSON config file, then
//! flags. Every run writes `manifest.json` holding the resolved config,
//! which can be passed back through `--config` to repeat the run.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::pswf::{Bandlimit, PswfBasis, DEFAULT_DEPTH, DEFAULT_KEEP};
use crate::qcalc::{LatticeFunction, LatticeWindow, QParams, DEFAULT_EPS, DEFAULT_WINDOW};
use crate::qfourier::{fqv_transform, TransformPlan};
use crate::report::{self, fmt_e, ReconstructionRow, Series};
use crate::sampling::{self, SamplingGrid, DEFAULT_DELTA_EXP, DEFAULT_GRID};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

/// Number of uniform plot points on `[q^10, q^-1]`.
const DENSE_POINTS: usize = 200;
const PLOT_RANGE: (i32, i32) = (-1, 10);
const NARROW_GRID: (i32, i32) = (-1, 10);

#[derive(Debug, Parser)]
#[command(
    name = "qpswf",
    version,
    about = "q-Bessel Fourier analysis and q-prolate spheroidal wave functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues and eigenfunctions of the concentration operator.
    Eigen(CommonArgs),
    /// Project a function onto the q-Paley-Wiener space for each band and
    /// rebuild it from its lattice samples.
    Reconstruct(ReconstructArgs),
    /// q-Bessel Fourier transform of a samples file.
    Transform(TransformArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    v: Option<f64>,
    /// Band exponent, a = q^a_exp. Repeatable for `reconstruct`.
    #[arg(long = "a-exp", allow_hyphen_values = true)]
    a_exp: Vec<i32>,
    /// Retained lattice points of [0, a]_q.
    #[arg(long)]
    depth: Option<usize>,
    /// Lattice window MIN:MAX for tabulated functions.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    window: Option<(i32, i32)>,
    /// Sampling grid MIN:MAX.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    grid: Option<(i32, i32)>,
    #[arg(long)]
    keep: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra output: `json` adds a JSON table, `svg` adds a plot.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// JSON config file; flags take precedence over its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `narrow` uses the sampling grid -1:10.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Builtin test function.
    #[arg(long, value_enum, conflicts_with = "samples")]
    function: Option<Builtin>,
    /// File of `k value` lines giving f(q^k).
    #[arg(long)]
    samples: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// File of `k value` lines giving f(q^k).
    #[arg(long)]
    samples: Option<PathBuf>,
    /// Also transform the result back and report the deviation from f.
    #[arg(long)]
    roundtrip: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    /// 1 / (1 + x^2)
    Runge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Narrow,
}

fn parse_range(s: &str) -> std::result::Result<(i32, i32), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected MIN:MAX, got {s:?}"))?;
    let a: i32 = a
        .trim()
        .parse()
        .map_err(|e| format!("bad MIN in {s:?}: {e}"))?;
    let b: i32 = b
        .trim()
        .parse()
        .map_err(|e| format!("bad MAX in {s:?}: {e}"))?;
    if a > b {
        return Err(format!("MIN must not exceed MAX in {s:?}"));
    }
    Ok((a, b))
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub q: f64,
    pub v: f64,
    pub a_exp: Vec<i32>,
    pub depth: usize,
    pub window: [i32; 2],
    pub grid: [i32; 2],
    pub keep: usize,
    pub eps: f64,
    pub output_dir: PathBuf,
    pub format: Format,
    pub function: Option<Builtin>,
    pub samples: Option<PathBuf>,
    pub roundtrip: bool,
    pub delta_exp: i32,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            q: 0.5,
            v: -0.5,
            a_exp: Vec::new(),
            depth: DEFAULT_DEPTH,
            window: [DEFAULT_WINDOW.0, DEFAULT_WINDOW.1],
            grid: [DEFAULT_GRID.0, DEFAULT_GRID.1],
            keep: DEFAULT_KEEP,
            eps: DEFAULT_EPS,
            output_dir: PathBuf::from("out"),
            format: Format::Csv,
            function: None,
            samples: None,
            roundtrip: false,
            delta_exp: DEFAULT_DELTA_EXP,
        }
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SolverNoConvergence { .. } => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {f}");
            f.code
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Eigen(common) => {
            let config = resolve(&common, &[0])?;
            cmd_eigen(&config)
        }
        Command::Reconstruct(args) => {
            let mut config = resolve(&args.common, &[0, -1, -2])?;
            if args.function.is_some() || args.samples.is_some() {
                config.function = args.function;
                config.samples = args.samples;
            }
            if config.function.is_none() && config.samples.is_none() {
                config.function = Some(Builtin::Runge);
            }
            cmd_reconstruct(&config)
        }
        Command::Transform(args) => {
            let mut config = resolve(&args.common, &[0])?;
            if args.samples.is_some() {
                config.samples = args.samples;
            }
            config.roundtrip |= args.roundtrip;
            cmd_transform(&config)
        }
    }
}

fn resolve(args: &CommonArgs, default_a_exp: &[i32]) -> CliResult<RunConfig> {
    let mut c = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| input_error(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| config_error(format!("invalid config {}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if args.preset == Some(Preset::Narrow) {
        c.grid = [NARROW_GRID.0, NARROW_GRID.1];
    }
    macro_rules! take {
        ($field:ident) => {
            if let Some(x) = args.$field {
                c.$field = x;
            }
        };
    }
    take!(q);
    take!(v);
    take!(depth);
    take!(keep);
    take!(eps);
    take!(format);
    if let Some((a, b)) = args.window {
        c.window = [a, b];
    }
    if let Some((a, b)) = args.grid {
        c.grid = [a, b];
    }
    if let Some(out) = &args.out {
        c.output_dir = out.clone();
    }
    if !args.a_exp.is_empty() {
        c.a_exp = args.a_exp.clone();
    }
    if c.a_exp.is_empty() {
        c.a_exp = default_a_exp.to_vec();
    }
    validate(&c)?;
    Ok(c)
}

fn validate(c: &RunConfig) -> CliResult<()> {
    QParams::with_eps(c.q, c.v, c.eps)?;
    LatticeWindow::new(c.window[0], c.window[1])?;
    SamplingGrid::new(c.grid[0], c.grid[1])?;
    Bandlimit::new(0, c.depth)?;
    if c.keep == 0 || c.keep > c.depth {
        return Err(config_error(format!(
            "keep must lie in [1, {}], got {}",
            c.depth, c.keep
        )));
    }
    Ok(())
}

fn params(c: &RunConfig) -> CliResult<QParams> {
    Ok(QParams::with_eps(c.q, c.v, c.eps)?)
}

fn window(c: &RunConfig) -> CliResult<LatticeWindow> {
    Ok(LatticeWindow::new(c.window[0], c.window[1])?)
}

fn prepare_output(c: &RunConfig) -> CliResult<()> {
    std::fs::create_dir_all(&c.output_dir)
        .map_err(|e| config_error(format!("cannot create {}: {e}", c.output_dir.display())))?;
    let manifest = serde_json::to_string_pretty(c).expect("config serializes") + "\n";
    write(c, "manifest.json", &manifest)
}

fn write(c: &RunConfig, name: &str, contents: &str) -> CliResult<()> {
    let path = c.output_dir.join(name);
    report::write_atomic(&path, contents)
        .map_err(|e| config_error(format!("cannot write {}: {e}", path.display())))
}

fn single_a_exp(c: &RunConfig) -> CliResult<i32> {
    match c.a_exp.as_slice() {
        [a] => Ok(*a),
        _ => Err(config_error("this command takes exactly one --a-exp")),
    }
}

fn cmd_eigen(c: &RunConfig) -> CliResult<()> {
    let p = params(c)?;
    let b = Bandlimit::new(single_a_exp(c)?, c.depth)?;
    let basis = PswfBasis::compute(b, &p, c.keep)?;
    prepare_output(c)?;
    write(c, "eigen.json", &report::eigen_json(&basis))?;
    write(c, "eigen.csv", &report::eigen_csv(&basis))?;
    if c.format == Format::Svg {
        let shown = basis.count().min(4);
        let points: Vec<Vec<(f64, f64)>> = (0..shown)
            .map(|i| {
                let s = basis.samples(i).expect("in range");
                (0..b.depth())
                    .map(|m| (p.point(b.a_exp() + m as i32), s[m]))
                    .collect()
            })
            .collect();
        let names: Vec<String> = (0..shown).map(|i| format!("psi_{i}")).collect();
        let series: Vec<Series> = names
            .iter()
            .zip(&points)
            .map(|(name, pts)| Series { name, points: pts })
            .collect();
        write(
            c,
            "eigen.svg",
            &report::svg_plot("eigenfunctions on [0, a]_q", &series),
        )?;
    }
    for l in basis.eigenvalues() {
        println!("{}", fmt_e(*l));
    }
    Ok(())
}

/// Parses `k value` lines; `#` starts a comment. Line numbers in errors are
/// 1-based.
pub fn parse_samples(text: &str) -> std::result::Result<Vec<(i32, f64)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let parsed = match (fields.next(), fields.next(), fields.next()) {
            (Some(k), Some(x), None) => k
                .parse::<i32>()
                .ok()
                .zip(x.parse::<f64>().ok().filter(|x| x.is_finite())),
            _ => None,
        };
        match parsed {
            Some(pair) => out.push(pair),
            None => return Err(format!("line {}: expected \"k value\", got {raw:?}", i + 1)),
        }
    }
    if out.is_empty() {
        return Err("no samples found".into());
    }
    Ok(out)
}

fn load_samples(path: &Path, window: LatticeWindow) -> CliResult<LatticeFunction> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let pairs =
        parse_samples(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let mut f = LatticeFunction::zeros(window);
    for (k, x) in pairs {
        f.set(k, x).map_err(|_| {
            input_error(format!(
                "{}: exponent {k} lies outside the window [{}, {}]",
                path.display(),
                window.n_min(),
                window.n_max()
            ))
        })?;
    }
    Ok(f)
}

/// 200 uniform points on `[q^10, q^-1]` merged with the lattice points there.
pub fn dense_points(p: &QParams) -> Vec<f64> {
    let lo = p.point(PLOT_RANGE.1);
    let hi = p.point(PLOT_RANGE.0);
    let mut z: Vec<f64> = (0..DENSE_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (DENSE_POINTS - 1) as f64)
        .chain((PLOT_RANGE.0..=PLOT_RANGE.1).map(|n| p.point(n)))
        .collect();
    z.sort_by(f64::total_cmp);
    z.dedup();
    z
}

#[derive(Serialize)]
struct BandSummary {
    a_exp: i32,
    a: f64,
    sup_error: f64,
    sup_error_plot_range: f64,
    max_boundary_term: f64,
    transform_boundary_term: f64,
}

/// Closed form of a builtin function, used for the `f_true` column.
type Exact = fn(f64) -> f64;

fn cmd_reconstruct(c: &RunConfig) -> CliResult<()> {
    let p = params(c)?;
    let w = window(c)?;
    let grid = SamplingGrid::new(c.grid[0], c.grid[1])?;
    let (f, exact): (LatticeFunction, Option<Exact>) = match (&c.samples, c.function) {
        (Some(path), _) => (load_samples(path, w)?, None),
        (None, Some(Builtin::Runge)) => {
            let runge: Exact = |x| 1.0 / (1.0 + x * x);
            (LatticeFunction::from_fn(w, &p, runge), Some(runge))
        }
        (None, None) => return Err(config_error("reconstruct needs --function or --samples")),
    };
    let bands = c
        .a_exp
        .iter()
        .map(|&a| Bandlimit::new(a, c.depth))
        .collect::<crate::Result<Vec<_>>>()?;
    let plan = TransformPlan::symmetric(w, p);
    let zs = dense_points(&p);
    let lattice_z: Vec<(i32, f64)> = (PLOT_RANGE.0..=PLOT_RANGE.1)
        .map(|n| (n, p.point(n)))
        .collect();
    let truth = |z: f64| -> Option<f64> {
        match exact {
            Some(g) => Some(g(z)),
            None => lattice_z
                .iter()
                .find(|(_, x)| *x == z)
                .map(|(n, _)| f.value(*n)),
        }
    };

    prepare_output(c)?;
    let mut summaries = Vec::new();
    for b in bands {
        let (fa, tail) = sampling::project_with_diagnostics(&f, b, &plan)?;
        let samples: Vec<f64> = grid.exponents().map(|k| fa.value(k)).collect();
        let mut rows = Vec::with_capacity(zs.len());
        let mut boundary: f64 = 0.0;
        for &z in &zs {
            let d = sampling::reconstruct_with_diagnostics(&samples, z, grid, b, &p)?;
            boundary = boundary.max(d.boundary_term);
            rows.push(ReconstructionRow {
                z,
                f_true: truth(z),
                f_reconstructed: d.value,
            });
        }
        let name = format!("reconstruct_a{}", b.a_exp());
        write(
            c,
            &format!("{name}.csv"),
            &report::reconstruction_csv(&rows),
        )?;

        let f_pts: Vec<(f64, f64)> = match exact {
            Some(g) => zs.iter().map(|&z| (z, g(z))).collect(),
            None => lattice_z.iter().map(|&(n, x)| (x, f.value(n))).collect(),
        };
        let fa_pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.z, r.f_reconstructed)).collect();
        let title = format!("f and f_a, a = q^{}", b.a_exp());
        let svg = report::svg_plot(
            &title,
            &[
                Series {
                    name: "f",
                    points: &f_pts,
                },
                Series {
                    name: "f_a",
                    points: &fa_pts,
                },
            ],
        );
        write(c, &format!("{name}.svg"), &svg)?;

        let summary = BandSummary {
            a_exp: b.a_exp(),
            a: b.a(&p),
            sup_error: sampling::sup_error(&f, &fa, w.n_min(), c.delta_exp),
            sup_error_plot_range: sampling::sup_error(&f, &fa, PLOT_RANGE.0, PLOT_RANGE.1),
            max_boundary_term: boundary,
            transform_boundary_term: tail.boundary_term,
        };
        println!(
            "a_exp={} a={} sup_error={} boundary={} window_tail={}",
            summary.a_exp,
            fmt_e(summary.a),
            fmt_e(summary.sup_error),
            fmt_e(summary.max_boundary_term),
            fmt_e(summary.transform_boundary_term)
        );
        summaries.push(summary);
    }
    if c.format == Format::Json {
        let text = serde_json::to_string_pretty(&summaries).expect("plain data serializes") + "\n";
        write(c, "reconstruct_summary.json", &text)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TransformTable<'a> {
    k: Vec<i32>,
    transform: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    roundtrip: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    roundtrip_deviation: Option<f64>,
}

fn cmd_transform(c: &RunConfig) -> CliResult<()> {
    let p = params(c)?;
    let w = window(c)?;
    let path = c
        .samples
        .as_ref()
        .ok_or_else(|| config_error("transform needs --samples FILE"))?;
    let f = load_samples(path, w)?;
    let plan = TransformPlan::symmetric(w, p);
    let g = fqv_transform(&f, &plan)?;
    let back = if c.roundtrip {
        Some(fqv_transform(&g, &plan)?)
    } else {
        None
    };
    let deviation = back
        .as_ref()
        .map(|h| sampling::sup_error(&f, h, w.n_min(), w.n_max()));

    prepare_output(c)?;
    let ks: Vec<i32> = w.exponents().collect();
    let mut columns = vec![("transform", g.values().to_vec())];
    if let Some(h) = &back {
        columns.push(("roundtrip", h.values().to_vec()));
    }
    write(
        c,
        "transform.csv",
        &report::lattice_csv(&ks, p.q(), &columns),
    )?;
    if c.format == Format::Json {
        let table = TransformTable {
            k: ks,
            transform: g.values(),
            roundtrip: back.as_ref().map(|h| h.values()),
            roundtrip_deviation: deviation,
        };
        let text = serde_json::to_string_pretty(&table).expect("plain data serializes") + "\n";
        write(c, "transform.json", &text)?;
    }
    if let Some(d) = deviation {
        println!("roundtrip_deviation={}", fmt_e(d));
    }
    Ok(())
}
