//! The `phirho` command line. Every subcommand is a batch job: read the
//! inputs, write a file (or stdout), exit.
//!
//! Exit status: 0 on success, 1 when `verify` finds a failing check, 2 on
//! usage, parse or I/O errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use phirho_core::bounds::{sample_curve, Curve, RegionPoint};
use phirho_core::rearrange::rearrange_outcome;
use phirho_core::segmeasures::{phi_numeric, rho_numeric, GridOracleConfig};
use phirho_core::shuffles::{enumerate_involutions, Involution};
use phirho_core::Rational;

use crate::formats::{
    parse_measure_input, parse_permutation_list, read_file, write_file, Family, FormatError, MeasureInput,
    RearrangeRecord, Subject,
};
use crate::svg::{render, PlotPoint};
use crate::table::{read_curves, read_points, sig17, write_curves, write_points, CurveRow, PointRow};
use crate::verify::{run_suite, Suite, VerifyConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "phirho", version, about = "Exact footrule / Spearman's rho computations for copulas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Grid,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// c_alpha, delta_up, delta_down or o_star.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long = "N")]
    pub big_n: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print φ and ρ of a permutation, segment map, diagonal or family member.
    Measures {
        /// JSON input file.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Permutation in one-line notation, e.g. "4,7,8,1,6,5,2,3".
        #[arg(long)]
        pi: Option<String>,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Midpoint grid resolution for `--mode grid`.
        #[arg(long, default_value_t = 2000)]
        grid: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the (φ, ρ) points of every involution of size n as CSV.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        ceiling: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an invariant suite; one JSON line per check.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long = "n-max", default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 10)]
        ceiling: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        grid: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample bound curves to CSV.
    Boundary {
        /// lower, upper, r or s; repeat for several, omit for all four.
        #[arg(long)]
        curve: Vec<String>,
        #[arg(long, default_value_t = 301)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render points and curves CSV files to SVG.
    Render {
        /// Points CSV.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Curves CSV; may be repeated.
        #[arg(long)]
        curves: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rearrange an involution onto its canonical class and report.
    Rearrange {
        #[arg(long)]
        pi: Option<String>,
        /// JSON permutation file.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text)?,
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    Ok(())
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_grid(grid: u32) -> Result<(), CliError> {
    if grid < 16 {
        return Err(usage(format!("--grid must be at least 16, got {grid}")));
    }
    Ok(())
}

fn family_from_args(args: &FamilyArgs) -> Result<Option<Family>, CliError> {
    let Some(name) = &args.family else {
        return Ok(None);
    };
    let (flag, value) = match name.as_str() {
        "c_alpha" => ("--alpha", &args.alpha),
        "delta_up" => ("--a", &args.a),
        "delta_down" => ("--b", &args.b),
        "o_star" => ("--N", &args.big_n),
        _ => ("", &None),
    };
    let param = match value {
        Some(v) => v.as_str(),
        None if flag.is_empty() => "",
        None => return Err(usage(format!("family {name} needs {flag}"))),
    };
    Family::parse(name, param).map(Some).map_err(usage)
}

fn load_subject(input: Option<&Path>, pi: Option<&str>, family: &FamilyArgs) -> Result<Subject, CliError> {
    let fam = family_from_args(family)?;
    let given = input.is_some() as u8 + pi.is_some() as u8 + fam.is_some() as u8;
    if given != 1 {
        return Err(usage("give exactly one of --in, --pi, --family"));
    }
    if let Some(path) = input {
        let origin = path.display().to_string();
        let parsed = parse_measure_input(&read_file(path)?, &origin)?;
        return Ok(parsed.subject(&origin)?);
    }
    let record = match (pi, fam) {
        (Some(text), _) => {
            let p = parse_permutation_list(text).map_err(|e| usage(format!("--pi: {e}")))?;
            let values = p.values().iter().map(|&v| v as i64).collect();
            MeasureInput::Permutation(crate::formats::PermutationRecord { n: p.n(), pi: values })
        }
        (None, Some(f)) => MeasureInput::Family(f.record()),
        (None, None) => unreachable!("exactly one source"),
    };
    Ok(record.subject("arguments")?)
}

fn measures_report(subject: &Subject, mode: Mode, grid: u32) -> String {
    let (phi, rho) = (&subject.stats.phi, &subject.stats.rho);
    let mut s = format!("input: {}\n", subject.label);
    s += &format!("phi = {phi} ({})\n", sig17(phi.to_f64()));
    s += &format!("rho = {rho} ({})\n", sig17(rho.to_f64()));
    if mode == Mode::Grid {
        let f = subject.map.to_float();
        let cfg = GridOracleConfig::new(grid);
        let gp = phi_numeric(|u, v| f.cdf(u, v), cfg);
        let gr = rho_numeric(|u, v| f.cdf(u, v), cfg);
        let within = |e: &phirho_core::segmeasures::OracleEstimate, x: &Rational| {
            if e.brackets(x) {
                "within bound"
            } else {
                "OUTSIDE bound"
            }
        };
        s += &format!("phi_grid = {} (bound {}, n = {grid}, {})\n", sig17(gp.value), gp.bound, within(&gp, phi));
        s += &format!("rho_grid = {} (bound {}, n = {grid}, {})\n", sig17(gr.value), gr.bound, within(&gr, rho));
    }
    s
}

/// Rows for every involution of size `n`.
pub fn enumerate_rows(n: usize) -> Vec<PointRow> {
    enumerate_involutions(n)
        .map(|p| {
            let pm = p.permutation();
            let label = crate::formats::permutation_label(pm);
            let pt =
                RegionPoint::new(phirho_core::shuffles::shuffle_phi(pm), phirho_core::shuffles::shuffle_rho(pm), label)
                    .expect("shuffle statistics lie in range");
            PointRow::from_point(&pt)
        })
        .collect()
}

fn involution_from(pi: Option<&str>, input: Option<&Path>) -> Result<Involution, CliError> {
    let p = match (pi, input) {
        (Some(text), None) => parse_permutation_list(text).map_err(|e| usage(format!("--pi: {e}")))?,
        (None, Some(path)) => {
            let origin = path.display().to_string();
            match parse_measure_input(&read_file(path)?, &origin)? {
                MeasureInput::Permutation(r) => crate::formats::permutation_from_record(&r, &origin)?,
                _ => return Err(usage(format!("{origin}: expected a permutation record {{\"n\", \"pi\"}}"))),
            }
        }
        _ => return Err(usage("give exactly one of --pi, --in")),
    };
    Involution::new(p).map_err(|e| usage(format!("not an involution: {e}")))
}

fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Measures { input, pi, family, mode, grid, out } => {
            check_grid(grid)?;
            let subject = load_subject(input.as_deref(), pi.as_deref(), &family)?;
            emit(out.as_deref(), &measures_report(&subject, mode, grid))?;
        }
        Command::Enumerate { n, ceiling, out } => {
            if n < 2 || n > ceiling {
                return Err(usage(format!("--n must lie in 2..={ceiling}, got {n}")));
            }
            let mut buf = Vec::new();
            write_points(&mut buf, &enumerate_rows(n))?;
            emit(out.as_deref(), &String::from_utf8(buf).expect("csv output is UTF-8"))?;
        }
        Command::Verify { suite, n_max, ceiling, samples, seed, grid, out } => {
            let suite: Suite = suite.parse().map_err(|e: crate::verify::UnknownSuite| usage(e.to_string()))?;
            if n_max < 2 || n_max > ceiling {
                return Err(usage(format!("--n-max must lie in 2..={ceiling}, got {n_max}")));
            }
            check_grid(grid)?;
            let outcomes = run_suite(suite, &VerifyConfig { n_max, samples, seed, grid });
            let text: String = outcomes.iter().map(|o| o.json_line() + "\n").collect();
            emit(out.as_deref(), &text)?;
            return Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { 1 });
        }
        Command::Boundary { curve, samples, out } => {
            let curves: Vec<Curve> = if curve.is_empty() {
                Curve::ALL.to_vec()
            } else {
                curve.iter().map(|c| c.parse()).collect::<Result<_, _>>().map_err(|e| usage(format!("{e}")))?
            };
            if samples < 2 {
                return Err(usage("--samples must be at least 2"));
            }
            let rows: Vec<CurveRow> =
                curves.iter().flat_map(|&c| sample_curve(c, samples)).map(|s| CurveRow::from(&s)).collect();
            let mut buf = Vec::new();
            write_curves(&mut buf, &rows)?;
            emit(out.as_deref(), &String::from_utf8(buf).expect("csv output is UTF-8"))?;
        }
        Command::Render { input, curves, out } => {
            let mut points = Vec::new();
            if let Some(path) = &input {
                let origin = path.display().to_string();
                for row in read_points(read_file(path)?.as_bytes(), &origin)? {
                    let pt = row.point(&origin)?;
                    points.push(PlotPoint {
                        label: row.label.clone(),
                        phi: pt.phi().to_f64(),
                        rho: pt.rho().to_f64(),
                        highlight: row.upper_eq,
                    });
                }
            }
            let mut series: Vec<(Curve, Vec<(f64, f64)>)> = Vec::new();
            for path in &curves {
                let origin = path.display().to_string();
                for row in read_curves(read_file(path)?.as_bytes(), &origin)? {
                    let (c, x, y) = row.parse(&origin)?;
                    match series.iter_mut().find(|(k, _)| *k == c) {
                        Some((_, pts)) => pts.push((x, y)),
                        None => series.push((c, vec![(x, y)])),
                    }
                }
            }
            write_file(&out, &render(&points, &series))?;
        }
        Command::Rearrange { pi, input, out } => {
            let inv = involution_from(pi.as_deref(), input.as_deref())?;
            let outcome = rearrange_outcome(&inv).map_err(|e| usage(e.to_string()))?;
            let json = serde_json::to_string_pretty(&RearrangeRecord::from(&outcome)).expect("plain record");
            emit(out.as_deref(), &(json + "\n"))?;
        }
    }
    Ok(0)
}
