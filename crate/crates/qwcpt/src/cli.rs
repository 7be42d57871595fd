//! Command-line front end.
//!
//! Exit codes: 0 on success, 3 when the physics is degenerate (singular
//! stationary system or time step), 2 for everything else (bad usage,
//! config mistakes, malformed files, I/O trouble).
//!
//! Output files are written atomically: the bytes go to a temporary file in
//! the destination directory which is then renamed into place, so readers
//! never observe a half-written table.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::config::{load_config, parse_scalar_with_pi, RunConfig};
use crate::csv::{read_csv, write_table};
use crate::error::{Error, Result};
use crate::model::{build_liouvillian, StateVector};
use crate::observables::{observables_of, resonance_metrics};
use crate::solver::{evolve_implicit, residual, steady_state};
use crate::svg::{emit_svg_table, ObservableColumn};
use crate::sweep::{figure_preset_labeled, sweep_1d_threaded, FigureId, SweepParam, SweepSpec};

#[derive(Parser)]
#[command(name = "qwcpt", version, about = "Dark-resonance simulator for double tunneling-coupled quantum wells")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file (flat key-value object notation)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file, or output directory for `fig`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot next to each CSV
    #[arg(long)]
    svg: bool,
    /// Use the self-consistent variant of the generator
    #[arg(long)]
    eq13_consistent: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one stationary point and print it as a one-row table
    Steady {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep one drive parameter and tabulate the stationary response
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Swept parameter: delta, phi, v, big_delta, q, kappa, omega1, omega2
        #[arg(long)]
        param: Option<String>,
        /// Lower sweep bound (accepts pi notation, e.g. "-0.5pi")
        #[arg(long, allow_hyphen_values = true)]
        from: Option<String>,
        /// Upper sweep bound (accepts pi notation)
        #[arg(long, allow_hyphen_values = true)]
        to: Option<String>,
        /// Number of grid points
        #[arg(long)]
        points: Option<usize>,
    },
    /// Integrate the master equation from the field-free equilibrium
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Start time; only 0 is supported
        #[arg(long, allow_hyphen_values = true)]
        from: Option<String>,
        /// End time in units of 1/gamma
        #[arg(long, allow_hyphen_values = true)]
        to: Option<String>,
        /// Number of samples including t = 0
        #[arg(long)]
        points: Option<usize>,
    },
    /// Write the bundled detuning scans for one figure (2..8)
    Fig {
        /// Figure selector: a digit 2..8 or "figN"
        figure: String,
        #[command(flatten)]
        common: Common,
    },
    /// Dip metrics (contrast, width, position) of a detuning-scan CSV
    Metrics {
        /// Input CSV produced by `sweep` or `fig`
        csv: PathBuf,
        /// Write the two-line result here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Entry point used by `main` and by the binary tests.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.cmd) {
        Ok(()) => 0,
        Err(e @ (Error::DegenerateSteadyState { .. } | Error::SingularStep)) => {
            eprintln!("error: {e}");
            3
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Steady { common } => cmd_steady(&common),
        Command::Sweep { common, param, from, to, points } => cmd_sweep(&common, param, from, to, points),
        Command::Evolve { common, from, to, points } => cmd_evolve(&common, from, to, points),
        Command::Fig { figure, common } => cmd_fig(&figure, &common),
        Command::Metrics { csv, out } => cmd_metrics(&csv, out.as_deref()),
    }
}

fn load(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if common.eq13_consistent {
        cfg.eq13_consistent = true;
    }
    if common.svg {
        cfg.emit_svg = true;
    }
    if let Some(out) = &common.out {
        cfg.output_path = Some(out.to_string_lossy().into_owned());
    }
    Ok(cfg)
}

fn parse_bound(flag: &str, value: &str) -> Result<f64> {
    parse_scalar_with_pi(value)
        .ok_or_else(|| Error::Range(format!("invalid number for {flag}: {value:?}")))
}

/// Worker count for sweeps: QWCPT_THREADS when set (must be a positive
/// integer), otherwise the available parallelism capped at 8; never more
/// than one worker per grid point.
fn thread_count(points: usize) -> Result<usize> {
    let n = match std::env::var("QWCPT_THREADS") {
        Ok(s) => {
            let v: usize = s
                .trim()
                .parse()
                .map_err(|_| Error::Range(format!("QWCPT_THREADS must be a positive integer, got {s:?}")))?;
            if v == 0 {
                return Err(Error::Range("QWCPT_THREADS must be a positive integer, got \"0\"".into()));
            }
            v
        }
        Err(std::env::VarError::NotPresent) => {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8)
        }
        Err(std::env::VarError::NotUnicode(_)) => {
            return Err(Error::Range("QWCPT_THREADS must be a positive integer".into()))
        }
    };
    Ok(n.min(points).max(1))
}

static TEMP_SEQ: AtomicU64 = AtomicU64::new(0);

/// Write bytes to `path` through a same-directory temporary file plus
/// rename, so the final name only ever holds complete content.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let stem = path
        .file_name()
        .ok_or_else(|| Error::InvalidParams(format!("not a file path: {}", path.display())))?
        .to_string_lossy()
        .into_owned();
    let tmp = dir.join(format!(
        ".{stem}.tmp.{}.{}",
        std::process::id(),
        TEMP_SEQ.fetch_add(1, Ordering::Relaxed)
    ));
    let result = (|| -> Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}

/// Route a finished table to a file (plus optional SVG) or stdout.
fn deliver(
    axis_name: &str,
    axis: &[f64],
    rows: &[crate::observables::ObservableRow],
    out: Option<&str>,
    svg: bool,
    columns: &[ObservableColumn],
) -> Result<()> {
    let mut csv_bytes = Vec::new();
    write_table(axis_name, axis, rows, &mut csv_bytes)?;
    match out {
        Some(path) => {
            let path = PathBuf::from(path);
            write_atomic(&path, &csv_bytes)?;
            if svg {
                let mut svg_bytes = Vec::new();
                emit_svg_table(axis_name, axis, rows, columns, &mut svg_bytes)?;
                write_atomic(&path.with_extension("svg"), &svg_bytes)?;
            }
        }
        None => {
            if svg {
                return Err(Error::Range(
                    "writing SVG needs an output path; pass --out or set output_path".into(),
                ));
            }
            std::io::stdout().write_all(&csv_bytes)?;
        }
    }
    Ok(())
}

fn cmd_steady(common: &Common) -> Result<()> {
    let cfg = load(common)?;
    let l = build_liouvillian(&cfg.drive, &cfg.rates, cfg.eq13_consistent)?;
    let r = steady_state(&l)?;
    let mut row = observables_of(&r.x);
    row.residual_inf = r.residual_inf;
    deliver(
        "delta",
        &[cfg.drive.two_photon_detuning()],
        &[row],
        cfg.output_path.as_deref(),
        cfg.emit_svg,
        &[ObservableColumn::P33P44],
    )
}

fn cmd_sweep(
    common: &Common,
    param: Option<String>,
    from: Option<String>,
    to: Option<String>,
    points: Option<usize>,
) -> Result<()> {
    let cfg = load(common)?;
    let param = match param {
        Some(s) => s.parse::<SweepParam>()?,
        None => cfg.param.unwrap_or(SweepParam::Delta),
    };
    let start = match from {
        Some(s) => parse_bound("--from", &s)?,
        None => cfg.start.unwrap_or(-0.5),
    };
    let stop = match to {
        Some(s) => parse_bound("--to", &s)?,
        None => cfg.stop.unwrap_or(0.5),
    };
    let count = points.or(cfg.count).unwrap_or(1001);
    let spec = SweepSpec {
        base: cfg.drive,
        rates: cfg.rates,
        param,
        start,
        stop,
        count,
        eq13_consistent: cfg.eq13_consistent,
    };
    let result = sweep_1d_threaded(&spec, thread_count(count)?)?;
    deliver(
        param.as_str(),
        &result.axis,
        &result.rows,
        cfg.output_path.as_deref(),
        cfg.emit_svg,
        &[ObservableColumn::P33P44],
    )
}

fn cmd_evolve(common: &Common, from: Option<String>, to: Option<String>, points: Option<usize>) -> Result<()> {
    let cfg = load(common)?;
    let t0 = match from {
        Some(s) => parse_bound("--from", &s)?,
        None => 0.0,
    };
    if t0 != 0.0 {
        return Err(Error::Range(format!(
            "time evolution always starts at 0; --from {t0} is not supported"
        )));
    }
    let t1 = match to {
        Some(s) => parse_bound("--to", &s)?,
        None => 1e6,
    };
    if !t1.is_finite() || t1 <= 0.0 {
        return Err(Error::Range(format!("--to must be a positive time, got {t1}")));
    }
    let points = points.unwrap_or(20_001);
    if points < 2 {
        return Err(Error::Range(format!("--points must be at least 2, got {points}")));
    }

    let l = build_liouvillian(&cfg.drive, &cfg.rates, cfg.eq13_consistent)?;
    let h = t1 / (points - 1) as f64;
    let traj = evolve_implicit(&l, &StateVector::field_free_equilibrium(), h, points - 1)?;
    let rows: Vec<_> = traj
        .states
        .iter()
        .map(|x| {
            let mut row = observables_of(x);
            row.residual_inf = residual(&l, x);
            row
        })
        .collect();
    deliver(
        "t",
        &traj.times,
        &rows,
        cfg.output_path.as_deref(),
        cfg.emit_svg,
        &[ObservableColumn::P33P44],
    )
}

/// Plot selection for each bundled figure.
fn figure_columns(id: FigureId) -> &'static [ObservableColumn] {
    match id {
        FigureId::Fig2 => &[ObservableColumn::P11P22, ObservableColumn::P33, ObservableColumn::P44],
        FigureId::Fig3 | FigureId::Fig7 => &[ObservableColumn::P33, ObservableColumn::P44],
        FigureId::Fig4 => &[ObservableColumn::AbsProbe, ObservableColumn::DispProbe],
        FigureId::Fig5 => &[ObservableColumn::DispProbe, ObservableColumn::DispStrong],
        FigureId::Fig6 | FigureId::Fig8 => &[ObservableColumn::P33P44],
    }
}

fn cmd_fig(figure: &str, common: &Common) -> Result<()> {
    let id: FigureId = figure.parse()?;
    let cfg = load(common)?;
    let dir = PathBuf::from(cfg.output_path.as_deref().unwrap_or("."));
    std::fs::create_dir_all(&dir)?;
    let columns = figure_columns(id);
    for (label, mut spec) in figure_preset_labeled(id) {
        spec.eq13_consistent = cfg.eq13_consistent;
        let result = sweep_1d_threaded(&spec, thread_count(spec.count)?)?;
        let name = format!("fig{}_{label}.csv", id.number());
        let mut csv_bytes = Vec::new();
        write_table(spec.param.as_str(), &result.axis, &result.rows, &mut csv_bytes)?;
        write_atomic(&dir.join(&name), &csv_bytes)?;
        println!("wrote {}", dir.join(&name).display());
        if cfg.emit_svg {
            let mut svg_bytes = Vec::new();
            emit_svg_table(spec.param.as_str(), &result.axis, &result.rows, columns, &mut svg_bytes)?;
            let svg_name = format!("fig{}_{label}.svg", id.number());
            write_atomic(&dir.join(&svg_name), &svg_bytes)?;
            println!("wrote {}", dir.join(&svg_name).display());
        }
    }
    Ok(())
}

fn cmd_metrics(csv: &Path, out: Option<&Path>) -> Result<()> {
    let file = std::fs::File::open(csv)?;
    let table = read_csv(std::io::BufReader::new(file))?;
    if table.axis_name != "delta" {
        return Err(Error::Range(format!(
            "dip metrics need a delta scan; this table sweeps {:?}",
            table.axis_name
        )));
    }
    let values: Vec<f64> = table.rows.iter().map(|r| r.p33_p44).collect();
    let m = resonance_metrics(&table.axis, &values)?;
    let text = format!(
        "contrast,fwhm,dip_position\n{:.16e},{:.16e},{:.16e}\n",
        m.contrast, m.fwhm, m.dip_position
    );
    match out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
