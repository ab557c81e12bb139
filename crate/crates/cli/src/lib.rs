//! Command-line front end for the coupled-cavity propagators.
//!
//! Exit codes: 0 ok, 2 parse, 3 validation, 4 numerical failure,
//! 5 factorization breakdown, 6 I/O.

pub mod config;
pub mod csv_out;
pub mod error;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use cavity_duet_core::analytic::ProductEvolution;
use cavity_duet_core::observables::{
    classify_regime, compute_series_from_ket, RegimeReport, Thresholds, Verdict,
};
use cavity_duet_core::presets::{uniform_grid, Figure, TableRow, INITIAL_KET, TABLE_ROWS};
use cavity_duet_core::{basis_state, SectorBasis};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::config::{ConfigFile, Overrides, Preset, RunConfig};
use crate::csv_out::verdict_label;
pub use crate::error::{CliError, CliResult};
use crate::svg::Layout;

/// Caps the number of table rows computed at once.
pub const THREADS_ENV: &str = "CAVITY_DUET_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "cavity-duet",
    version,
    about = "Exact vs product-form evolution of two coupled JC cavities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// fig1, fig2, fig3 or table.
    #[arg(long, global = true)]
    preset: Option<String>,

    #[arg(long, global = true)]
    tau_max: Option<f64>,

    #[arg(long, global = true)]
    tau_step: Option<f64>,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    #[arg(long, global = true)]
    csv: bool,

    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare both propagators for one configuration.
    Run,
    /// Reproduce one figure: CSV and SVG.
    Figure {
        #[arg(value_enum)]
        name: FigureArg,
    },
    /// Validity verdicts for the five reference parameter rows.
    Table,
    /// Dump the Wei-Norman coefficients as CSV.
    Coeffs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig1,
    Fig2,
    Fig3,
}

impl From<FigureArg> for Figure {
    fn from(f: FigureArg) -> Self {
        match f {
            FigureArg::Fig1 => Figure::Fig1,
            FigureArg::Fig2 => Figure::Fig2,
            FigureArg::Fig3 => Figure::Fig3,
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr, reports to stdout.
pub fn run_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    match dispatch(&cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn overrides(cli: &Cli) -> CliResult<Overrides> {
    Ok(Overrides {
        preset: cli.preset.as_deref().map(str::parse).transpose()?,
        tau_max: cli.tau_max,
        tau_step: cli.tau_step,
        csv: cli.csv,
        svg: cli.svg,
    })
}

fn load(cli: &Cli, over: &Overrides) -> CliResult<RunConfig> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if cli.config.is_none() && over.preset.is_none() {
        return Err(CliError::Validation(
            "give --config FILE or --preset NAME".into(),
        ));
    }
    RunConfig::resolve(&file, over)
}

fn dispatch(cli: &Cli, out: &mut impl Write) -> CliResult<()> {
    let over = overrides(cli)?;
    std::fs::create_dir_all(&cli.out).map_err(|e| CliError::io(&cli.out, e))?;
    match &cli.command {
        Command::Run => {
            let config = load(cli, &over)?;
            if config.preset == Some(Preset::Table) {
                return table(cli, &config, out);
            }
            run(&config, &cli.out, out)
        }
        Command::Figure { name } => {
            let fig = Figure::from(*name);
            let over = Overrides {
                preset: Some(Preset::Figure(fig)),
                csv: true,
                svg: true,
                ..over
            };
            let config = load(cli, &over)?;
            run(&config, &cli.out, out)
        }
        Command::Table => {
            let over = Overrides {
                preset: Some(Preset::Table),
                ..over
            };
            let config = load(cli, &over)?;
            table(cli, &config, out)
        }
        Command::Coeffs => {
            let config = load(cli, &over)?;
            coeffs(&config, &cli.out, out)
        }
    }
}

fn layout(config: &RunConfig) -> Layout {
    match config.preset {
        Some(Preset::Figure(fig)) => Layout::for_figure(fig),
        _ => Layout::two_panel(),
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

fn run(config: &RunConfig, dir: &Path, out: &mut impl Write) -> CliResult<()> {
    let grid = config.grid();
    let series = compute_series_from_ket(&config.params, config.initial_state, &grid)?;
    let thresholds = Thresholds {
        window: (0.0, config.tau_max),
        ..Thresholds::default()
    };
    let report = classify_regime(&series, &thresholds);

    let outputs = config.outputs;
    let csv = outputs.csv || !(outputs.svg || outputs.coeffs);
    if csv {
        csv_out::emit_csv(&series, &config.output_path(dir, "csv"))?;
    }
    if outputs.svg {
        svg::emit_svg(&series, &config.output_path(dir, "svg"), &layout(config))?;
    }
    if outputs.coeffs {
        write_coeffs(config, &grid, dir)?;
    }

    writeln!(
        out,
        "{}: {} points, tau in [0, {}]",
        config.stem(),
        grid.len(),
        config.tau_max
    )
    .map_err(io_err)?;
    for (obs, d) in &report.max_abs_diff {
        writeln!(out, "  max |A - N| {:>5}: {d:.3e}", obs.name()).map_err(io_err)?;
    }
    writeln!(out, "  verdict: {}", verdict_label(report.verdict)).map_err(io_err)?;
    Ok(())
}

fn write_coeffs(config: &RunConfig, grid: &[f64], dir: &Path) -> CliResult<PathBuf> {
    let basis = Arc::new(SectorBasis::new(config.initial_state.m_total()));
    let psi0 = basis_state(&basis, config.initial_state)?;
    let evo = ProductEvolution::for_state(&config.params, &psi0, grid)?;
    let path = dir.join(format!("{}_coeffs.csv", config.stem()));
    csv_out::emit_coeffs(evo.table(), &path)?;
    Ok(path)
}

fn coeffs(config: &RunConfig, dir: &Path, out: &mut impl Write) -> CliResult<()> {
    let path = write_coeffs(config, &config.grid(), dir)?;
    writeln!(out, "wrote {}", path.display()).map_err(io_err)
}

fn thread_cap() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(CliError::Validation(format!(
                "{THREADS_ENV}={v} is not a thread count"
            ))),
        },
    }
}

/// Runs every row on the shared grid, concurrently up to the thread cap,
/// and returns reports in row order.
pub fn run_rows(rows: &[TableRow], tau_max: f64, tau_step: f64) -> CliResult<Vec<RegimeReport>> {
    let thresholds = Thresholds {
        window: (0.0, tau_max),
        ..Thresholds::default()
    };
    let grid = uniform_grid(tau_max, tau_step);
    let one = |row: &TableRow| -> CliResult<RegimeReport> {
        let params = row.params();
        let series = compute_series_from_ket(&params, INITIAL_KET, &grid)?;
        let mut report = classify_regime(&series, &thresholds);
        report.params = Some(params);
        Ok(report)
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|_| {
        CliError::Numerical(cavity_duet_core::Error::NumericalFailure(
            "could not start worker threads",
        ))
    })?;
    pool.install(|| rows.par_iter().map(one).collect())
}

fn table(cli: &Cli, config: &RunConfig, out: &mut impl Write) -> CliResult<()> {
    let reports = run_rows(&TABLE_ROWS, config.tau_max, config.tau_step)?;
    writeln!(
        out,
        "{:>8} {:>8} {:>11}  {:<17} {:<17}",
        "g/w", "lam/w1", "max|A-N|", "verdict", "reference"
    )
    .map_err(io_err)?;
    for (row, r) in TABLE_ROWS.iter().zip(&reports) {
        let reference = if row.quantitative {
            Verdict::QuantitativeAndQualitative
        } else {
            Verdict::QualitativeOnly
        };
        let mark = if reference == r.verdict {
            ""
        } else {
            "  (differs)"
        };
        writeln!(
            out,
            "{:>8} {:>8} {:>11.3e}  {:<17} {:<17}{mark}",
            row.g_ratio,
            row.lambda_ratio,
            r.worst(),
            verdict_label(r.verdict),
            verdict_label(reference)
        )
        .map_err(io_err)?;
    }
    if config.outputs.csv {
        csv_out::emit_table(&reports, &cli.out.join("table.csv"))?;
    }
    Ok(())
}
