//! The `amoeba` command-line tool.
//!
//! Subcommands: `parse-check`, `newton`, `degrees`, `fiber`, `multivol`,
//! `volume`, `verify`, `render`. Inputs are system files (`vars:` line plus
//! `f<k>:` polynomial lines) or the canonical JSON form with `--json`.
//! Outputs are JSON on stdout (PGM for `render`), identical for any
//! `--threads` value. Exit codes: 0 success, 1 computation error, 2 usage
//! or input error.

use std::io::Write;
use std::path::PathBuf;

use amoeba::error::Error as CoreError;
use amoeba::fibers::{amoeba_fiber, coamoeba_fiber, curve_fiber_exact, SolverConfig, Space};
use amoeba::laurent::{parse_system, system_from_json, ParseOptions, PolySystem};
use amoeba::measure::{
    amoeba_volume_box, amoeba_volume_grid, multivol_amoeba_box, multivol_coamoeba, BoxDomain,
};
use amoeba::polytope::conj_degrees;
use amoeba::verify::{verify_system, VerifyConfig};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

pub mod raster;

#[derive(Parser, Debug)]
#[command(
    name = "amoeba",
    version,
    about = "Amoebas and coamoebas of half-dimensional toric complete intersections"
)]
struct Cli {
    /// Input system file.
    #[arg(short = 'i', long = "input", global = true)]
    input: Option<PathBuf>,

    /// Treat the input as canonical JSON regardless of extension.
    #[arg(long, global = true)]
    json: bool,

    /// Master seed for all randomized computations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Box domain `lo:hi[,lo:hi...]` (one interval per variable).
    #[arg(
        long = "box",
        global = true,
        value_name = "LO:HI,...",
        allow_hyphen_values = true
    )]
    box_spec: Option<String>,

    /// Grid or raster resolution `W` or `WxH`.
    #[arg(long, global = true, value_name = "W[xH]")]
    resolution: Option<String>,

    /// Worker threads (default: all cores). Outputs do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the main output to a file as well as stdout (required target
    /// for `render`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Solver residual tolerance (also the multiHarnack tolerance for
    /// `verify`).
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SpaceArg {
    Amoeba,
    Coamoeba,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Space {
        match s {
            SpaceArg::Amoeba => Space::Amoeba,
            SpaceArg::Coamoeba => Space::Coamoeba,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse the input and echo its canonical text and JSON forms.
    ParseCheck,
    /// Newton polytopes of the system polynomials.
    Newton,
    /// Intersection degrees (alpha, beta) from mixed volumes.
    Degrees,
    /// Solve one fiber of the log-modulus or argument map.
    Fiber {
        #[arg(long, value_enum)]
        space: SpaceArg,
        /// Comma-separated query coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Use the multistart solver even for curves (default: exact
        /// resultant solver when n = 1).
        #[arg(long)]
        multistart: bool,
    },
    /// Multiplicity-weighted volume of the amoeba (in a box) or coamoeba.
    Multivol {
        #[arg(long, value_enum)]
        space: SpaceArg,
    },
    /// Plain amoeba volume in a box: Monte Carlo, or cell counting with
    /// --resolution.
    Volume,
    /// Run the full verification battery.
    Verify,
    /// Render fiber counts over a planar box to a PGM image (curves only).
    Render {
        #[arg(long, value_enum)]
        space: SpaceArg,
        /// Also write a JSON sidecar with the raw count grid.
        #[arg(long)]
        sidecar: bool,
    },
}

/// Entry point used by both `main` and the tests. Returns the process exit
/// code.
pub fn run<I, T, W>(args: I, stdout: &mut W) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };

    #[cfg(feature = "parallel")]
    if let Some(threads) = cli.threads {
        // ignore failure: the global pool can only be built once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    match dispatch(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if usage_error(&e) {
                2
            } else {
                1
            }
        }
    }
}

/// Input problems (unreadable or malformed files, bad flag payloads) are
/// usage errors; everything downstream is a computation error.
fn usage_error(e: &anyhow::Error) -> bool {
    if e.downcast_ref::<UsageError>().is_some() {
        return true;
    }
    matches!(
        e.downcast_ref::<CoreError>(),
        Some(
            CoreError::Parse { .. }
                | CoreError::UnknownVariable { .. }
                | CoreError::ExponentOutOfRange { .. }
                | CoreError::CoefficientOutOfRange { .. }
                | CoreError::EmptyPolynomial
                | CoreError::InvalidInput(_)
                | CoreError::DimensionMismatch(_)
        )
    )
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

fn load_system(cli: &Cli) -> Result<PolySystem> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| usage("missing input file (-i FILE)"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let as_json = cli.json || path.extension().is_some_and(|e| e == "json");
    let sys = if as_json {
        system_from_json(&text)?
    } else {
        parse_system(&text, &ParseOptions::default())?
    };
    Ok(sys)
}

fn parse_box(spec: &str, dim: usize) -> Result<BoxDomain> {
    let mut intervals = Vec::new();
    for part in spec.split(',') {
        let (lo, hi) = part
            .split_once(':')
            .ok_or_else(|| usage(format!("bad interval `{part}` (expected lo:hi)")))?;
        let lo: f64 = lo
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad number `{lo}` in --box")))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad number `{hi}` in --box")))?;
        intervals.push([lo, hi]);
    }
    if intervals.len() == 1 {
        intervals = vec![intervals[0]; dim];
    }
    if intervals.len() != dim {
        bail!(usage(format!(
            "--box needs 1 or {dim} intervals, got {}",
            intervals.len()
        )));
    }
    Ok(BoxDomain(intervals))
}

fn parse_resolution(spec: &str) -> Result<(usize, usize)> {
    let parse_one = |s: &str| -> Result<usize> {
        s.trim()
            .parse()
            .map_err(|_| usage(format!("bad resolution `{s}`")))
    };
    match spec.split_once(['x', 'X']) {
        Some((w, h)) => Ok((parse_one(w)?, parse_one(h)?)),
        None => {
            let w = parse_one(spec)?;
            Ok((w, w))
        }
    }
}

fn parse_point(spec: &str, dim: usize) -> Result<Vec<f64>> {
    let point: Vec<f64> = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad coordinate `{s}` in --point")))
        })
        .collect::<Result<_>>()?;
    if point.len() != dim {
        bail!(usage(format!(
            "--point needs {dim} coordinates, got {}",
            point.len()
        )));
    }
    Ok(point)
}

fn solver_config(cli: &Cli) -> SolverConfig {
    let mut cfg = SolverConfig {
        seed: cli.seed,
        ..SolverConfig::default()
    };
    if let Some(tol) = cli.tol {
        cfg.tol = tol;
    }
    cfg
}

fn emit<W: Write>(cli: &Cli, stdout: &mut W, payload: &str) -> Result<()> {
    writeln!(stdout, "{payload}").context("writing output")?;
    if let Some(out) = &cli.out {
        std::fs::write(out, format!("{payload}\n"))
            .with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

fn dispatch<W: Write>(cli: &Cli, stdout: &mut W) -> Result<()> {
    match &cli.command {
        Command::ParseCheck => {
            let sys = load_system(cli)?;
            let payload = serde_json::json!({
                "ok": true,
                "n": sys.n(),
                "vars": sys.var_names(),
                "canonicalText": sys.to_text(),
                "canonicalJson": sys.to_json(),
            });
            emit(cli, stdout, &payload.to_string())
        }
        Command::Newton => {
            let sys = load_system(cli)?;
            let polytopes = sys.newton_polytopes()?;
            let payload = serde_json::json!({
                "polytopes": polytopes,
            });
            emit(cli, stdout, &payload.to_string())
        }
        Command::Degrees => {
            let sys = load_system(cli)?;
            let degrees = conj_degrees(&sys)?;
            emit(cli, stdout, &serde_json::to_string(&degrees)?)
        }
        Command::Fiber {
            space,
            point,
            multistart,
        } => {
            let sys = load_system(cli)?;
            let query = parse_point(point, sys.num_vars())?;
            let cfg = solver_config(cli);
            let space = Space::from(*space);
            let report = if sys.n() == 1 && !multistart {
                curve_fiber_exact(&sys, space, &query, &cfg)?
            } else {
                match space {
                    Space::Amoeba => amoeba_fiber(&sys, &query, &cfg)?,
                    Space::Coamoeba => coamoeba_fiber(&sys, &query, &cfg)?,
                }
            };
            emit(cli, stdout, &serde_json::to_string(&report)?)
        }
        Command::Multivol { space } => {
            let sys = load_system(cli)?;
            let cfg = solver_config(cli);
            let samples = cli.samples.unwrap_or(10_000);
            let estimate = match Space::from(*space) {
                Space::Coamoeba => multivol_coamoeba(&sys, samples, cli.seed, &cfg)?,
                Space::Amoeba => {
                    let spec = cli
                        .box_spec
                        .as_deref()
                        .map(|s| parse_box(s, sys.num_vars()))
                        .transpose()?
                        .unwrap_or_else(|| BoxDomain::symmetric(sys.num_vars(), 10.0));
                    multivol_amoeba_box(&sys, &spec, samples, cli.seed, &cfg)?
                }
            };
            emit(cli, stdout, &serde_json::to_string(&estimate)?)
        }
        Command::Volume => {
            let sys = load_system(cli)?;
            let cfg = solver_config(cli);
            let domain = cli
                .box_spec
                .as_deref()
                .map(|s| parse_box(s, sys.num_vars()))
                .transpose()?
                .unwrap_or_else(|| BoxDomain::symmetric(sys.num_vars(), 10.0));
            let estimate = if let Some(res) = &cli.resolution {
                let (w, h) = parse_resolution(res)?;
                if sys.num_vars() != 2 {
                    bail!(usage("--resolution grid volume requires a planar system"));
                }
                amoeba_volume_grid(&sys, &domain, &[w, h], &cfg)?
            } else {
                amoeba_volume_box(&sys, &domain, cli.samples.unwrap_or(10_000), cli.seed, &cfg)?
            };
            emit(cli, stdout, &serde_json::to_string(&estimate)?)
        }
        Command::Verify => {
            let sys = load_system(cli)?;
            let mut cfg = VerifyConfig {
                seed: cli.seed,
                ..VerifyConfig::default()
            };
            if let Some(samples) = cli.samples {
                cfg.volume_samples = samples;
                cfg.fiber_samples = (samples / 10).clamp(cfg.min_queries, 500);
            }
            if let Some(tol) = cli.tol {
                cfg.multiharnack_tol = tol;
            }
            let report = verify_system(&sys, &cfg)?;
            emit(cli, stdout, &serde_json::to_string(&report)?)
        }
        Command::Render { space, sidecar } => {
            let sys = load_system(cli)?;
            let cfg = solver_config(cli);
            let space = Space::from(*space);
            let out = cli
                .out
                .as_ref()
                .ok_or_else(|| usage("render needs --out FILE.pgm"))?;
            let default_box = match space {
                Space::Amoeba => [[-5.0, 5.0], [-5.0, 5.0]],
                Space::Coamoeba => [[0.0, std::f64::consts::PI], [0.0, std::f64::consts::PI]],
            };
            let domain = match cli.box_spec.as_deref() {
                Some(spec) => {
                    let b = parse_box(spec, 2)?;
                    [b.0[0], b.0[1]]
                }
                None => default_box,
            };
            let (w, h) = match cli.resolution.as_deref() {
                Some(spec) => parse_resolution(spec)?,
                None => (200, 200),
            };
            let image = raster::render_raster(&sys, space, domain, w, h, &cfg)?;
            std::fs::write(out, image.to_pgm())
                .with_context(|| format!("writing {}", out.display()))?;
            if *sidecar {
                let sidecar = out.with_extension("json");
                std::fs::write(&sidecar, image.to_json().to_string())
                    .with_context(|| format!("writing {}", sidecar.display()))?;
            }
            writeln!(
                stdout,
                "{}",
                serde_json::json!({
                    "out": out.display().to_string(),
                    "width": image.width,
                    "height": image.height,
                    "nonzero": image.values.iter().filter(|v| **v > 0).count(),
                })
            )?;
            Ok(())
        }
    }
}
