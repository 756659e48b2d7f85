//! The `derive`, `evolve`, `current` and `sweep` commands.
//!
//! Each command has a pure core returning the CSV bytes and manifest, and a
//! thin wrapper that handles files and exit codes.

use std::f64::consts::PI;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use kdmod_core::current::{current_density, modulation_depth, SpaceTimePoint};
use kdmod_core::dynamics::{evolve, AmplitudeState};
use kdmod_core::ensemble::{sample_from, QuadratureSpec, VelocityAverage, VelocityDistribution};
use kdmod_core::Error as CoreError;
use rayon::prelude::*;

use crate::config::{ConfigError, Resolved, RunConfig};
use crate::manifest::RunManifest;
use crate::montecarlo;
use crate::output::{format_f64, manifest_path, write_atomic, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] CoreError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Usage(String),
    #[error("every sweep point failed ({failed} of {failed})")]
    SweepFailed { failed: usize, config_only: bool },
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::SweepFailed { config_only, .. } => {
                if *config_only {
                    2
                } else {
                    3
                }
            }
            CliError::Io(_) => 1,
        }
    }
}

/// Options shared by all commands.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
}

/// A finished command: CSV bytes (absent for `derive`) and its manifest.
#[derive(Debug, Clone)]
pub struct Product {
    pub csv: Option<Vec<u8>>,
    pub manifest: RunManifest,
    /// The command failed as a whole after producing output.
    pub failure: Option<(usize, bool)>,
}

/// Output positions: `output_points` values evenly spaced over
/// `[0, interaction_length]`, or the end point alone.
pub fn y_grid(resolved: &Resolved) -> Vec<f64> {
    let n = resolved.output_points;
    let end = resolved.interaction_length;
    if n == 1 {
        return vec![end];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                end
            } else {
                end * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// `time_points` instants evenly spaced over one optical period.
pub fn t_grid(resolved: &Resolved) -> Vec<f64> {
    let period = 2.0 * PI / resolved.interaction.derived.angular_frequency;
    let n = resolved.time_points;
    (0..n).map(|k| period * k as f64 / n as f64).collect()
}

fn distribution(resolved: &Resolved) -> Result<VelocityDistribution, CoreError> {
    let beam = &resolved.interaction.beam;
    VelocityDistribution::new(beam.mean_velocity(), beam.velocity_spread())
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".to_owned()));
        }
        builder = builder.num_threads(jobs);
    }
    builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

fn monte_carlo(resolved: &Resolved, seed: u64) -> Result<montecarlo::MonteCarloReport, CoreError> {
    montecarlo::check(
        resolved.interaction_length,
        &distribution(resolved)?,
        &resolved.interaction.derived,
        &QuadratureSpec::default(),
        montecarlo::SAMPLES,
        seed,
    )
}

pub fn derive(config: &RunConfig, opts: &RunOptions) -> Result<Product, CliError> {
    let resolved = config.resolve()?;
    let mut manifest = RunManifest::new("derive", config, &resolved.interaction);
    if let Some(seed) = opts.seed {
        manifest.monte_carlo = Some(monte_carlo(&resolved, seed)?);
    }
    Ok(Product {
        csv: None,
        manifest,
        failure: None,
    })
}

/// Header of the `evolve` table for a ladder of half-width `n_max`.
pub fn evolve_header(n_max: usize) -> Vec<String> {
    let reach = n_max as i32;
    let mut header = vec!["y_m".to_owned()];
    for n in -reach..=reach {
        header.push(format!("re_a_{n}"));
        header.push(format!("im_a_{n}"));
        header.push(format!("abs2_a_{n}"));
    }
    header.push("norm".to_owned());
    header
}

pub fn evolve_command(config: &RunConfig, _opts: &RunOptions) -> Result<Product, CliError> {
    let resolved = config.resolve()?;
    let interaction = &resolved.interaction;
    let q = interaction.derived.grating_number;
    let ys = y_grid(&resolved);
    let positions: Vec<f64> = ys.iter().map(|y| q * y).collect();
    let end = q * resolved.interaction_length;
    let result = evolve(
        &AmplitudeState::initial(resolved.ladder.n_max),
        end,
        &resolved.ladder,
        interaction,
        &positions,
    )?;

    let mut table = Table::new(evolve_header(resolved.ladder.n_max));
    let mut row = Vec::new();
    for (y, state) in ys.iter().zip(&result.trajectory) {
        row.clear();
        row.push(*y);
        for a in state.amplitudes() {
            row.extend([a.re, a.im, a.norm_sqr()]);
        }
        row.push(state.norm_sqr());
        table.push_numbers(&row);
    }

    let mut manifest = RunManifest::new("evolve", config, interaction);
    if result.truncation_warning() {
        manifest.run.warnings.push(format!(
            "boundary sideband occupation reached {}; increase simulation.n_max",
            format_f64(result.boundary_occupation)
        ));
    }
    Ok(Product {
        csv: Some(table.into_bytes()),
        manifest,
        failure: None,
    })
}

pub const CURRENT_HEADER: [&str; 6] = [
    "y_m",
    "t_s",
    "j_over_j0_mono",
    "j_over_j0_averaged",
    "modulation_depth_mono",
    "modulation_depth_avg",
];

/// Monochromatic and velocity-averaged modulation depths at `y`.
pub fn depths(resolved: &Resolved, y: f64) -> Result<(f64, f64), CoreError> {
    let dp = &resolved.interaction.derived;
    let avg =
        VelocityAverage::compute(y, &distribution(resolved)?, dp, &QuadratureSpec::default())?;
    Ok((modulation_depth(y, &resolved.interaction), avg.depth(dp)))
}

pub fn current_command(config: &RunConfig, opts: &RunOptions) -> Result<Product, CliError> {
    let resolved = config.resolve()?;
    let interaction = &resolved.interaction;
    let dp = &interaction.derived;
    let dist = distribution(&resolved)?;
    let ts = t_grid(&resolved);
    let quad = QuadratureSpec::default();

    let rows: Result<Vec<Vec<[f64; 6]>>, CoreError> = pool(opts.jobs)?.install(|| {
        y_grid(&resolved)
            .par_iter()
            .map(|&y| {
                let avg = VelocityAverage::compute(y, &dist, dp, &quad)?;
                let depth_mono = modulation_depth(y, interaction);
                let depth_avg = avg.depth(dp);
                Ok(ts
                    .iter()
                    .map(|&t| {
                        let point = SpaceTimePoint::on_axis(y, t);
                        let mono = current_density(&point, interaction);
                        let averaged = sample_from(&point, &avg, interaction);
                        [
                            y,
                            t,
                            1.0 + mono.relative_modulation,
                            1.0 + averaged.relative_modulation,
                            depth_mono,
                            depth_avg,
                        ]
                    })
                    .collect())
            })
            .collect()
    });
    let rows = rows?;

    let mut table = Table::new(CURRENT_HEADER);
    let mut violation = false;
    for row in rows.iter().flatten() {
        violation |= row[4] > 1.0;
        table.push_numbers(row);
    }
    let mut manifest = RunManifest::new("current", config, interaction);
    if violation {
        manifest.run.warnings.push(
            "monochromatic modulation depth exceeds 1; first order has broken down".to_owned(),
        );
    }
    if let Some(seed) = opts.seed {
        manifest.monte_carlo = Some(monte_carlo(&resolved, seed)?);
    }
    Ok(Product {
        csv: Some(table.into_bytes()),
        manifest,
        failure: None,
    })
}

/// Outcome of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepRow {
    Ok {
        coupling_rate: f64,
        modulation_length: f64,
        depth_mono: f64,
        depth_avg: f64,
    },
    ConfigError(String),
    NumericalError(String),
}

pub fn sweep_point(config: &RunConfig, path: &str, value: f64) -> SweepRow {
    let resolved = match config.with_value(path, value).and_then(|c| c.resolve()) {
        Ok(r) => r,
        Err(e) => return SweepRow::ConfigError(e.message),
    };
    match depths(&resolved, resolved.interaction_length) {
        Ok((depth_mono, depth_avg)) => SweepRow::Ok {
            coupling_rate: resolved.interaction.derived.coupling_rate,
            modulation_length: resolved.interaction.derived.modulation_length,
            depth_mono,
            depth_avg,
        },
        Err(e) => SweepRow::NumericalError(e.to_string()),
    }
}

pub fn sweep_command(config: &RunConfig, opts: &RunOptions) -> Result<Product, CliError> {
    let sweep = config.sweep.as_ref().ok_or_else(|| ConfigError {
        key: Some("sweep".to_owned()),
        line: None,
        message: "the sweep command needs a [sweep] section".to_owned(),
    })?;
    let base = config.resolve()?;
    let path = sweep.parameter_path.as_str();

    let rows: Vec<SweepRow> = pool(opts.jobs)?.install(|| {
        sweep
            .values
            .par_iter()
            .map(|&v| sweep_point(config, path, v))
            .collect()
    });

    let mut table = Table::new([
        "index",
        path,
        "status",
        "coupling_rate_per_m",
        "modulation_length_m",
        "modulation_depth_mono",
        "modulation_depth_avg",
    ]);
    let mut failed = 0;
    let mut config_only = true;
    for (i, (value, row)) in sweep.values.iter().zip(&rows).enumerate() {
        let mut cells = vec![i.to_string(), format_f64(*value)];
        match row {
            SweepRow::Ok {
                coupling_rate,
                modulation_length,
                depth_mono,
                depth_avg,
            } => {
                cells.push("ok".to_owned());
                cells.extend(
                    [*coupling_rate, *modulation_length, *depth_mono, *depth_avg].map(format_f64),
                );
            }
            SweepRow::ConfigError(msg) | SweepRow::NumericalError(msg) => {
                failed += 1;
                let kind = if matches!(row, SweepRow::ConfigError(_)) {
                    "config_error"
                } else {
                    config_only = false;
                    "numerical_error"
                };
                cells.push(format!("{kind}: {msg}"));
                cells.extend(std::iter::repeat_n(String::new(), 4));
            }
        }
        table.push(cells);
    }

    let mut manifest = RunManifest::new("sweep", config, &base.interaction);
    if failed > 0 {
        manifest
            .run
            .warnings
            .push(format!("{failed} of {} sweep points failed", rows.len()));
    }
    Ok(Product {
        csv: Some(table.into_bytes()),
        manifest,
        failure: (failed == rows.len()).then_some((failed, config_only)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Derive,
    Evolve,
    Current,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Derive => "derive",
            Command::Evolve => "evolve",
            Command::Current => "current",
            Command::Sweep => "sweep",
        }
    }
}

pub fn produce(
    command: Command,
    config: &RunConfig,
    opts: &RunOptions,
) -> Result<Product, CliError> {
    match command {
        Command::Derive => derive(config, opts),
        Command::Evolve => evolve_command(config, opts),
        Command::Current => current_command(config, opts),
        Command::Sweep => sweep_command(config, opts),
    }
}

/// Loads the configuration, runs `command` and writes its files. Returns
/// the text to print on standard output.
pub fn run(command: Command, config_path: &Path, opts: &RunOptions) -> Result<String, CliError> {
    let started = Instant::now();
    let config = RunConfig::load(config_path)?;
    let mut product = produce(command, &config, opts)?;
    product.manifest.run.wall_time_s = started.elapsed().as_secs_f64();
    let manifest = product.manifest.to_toml_string();

    let stdout = match (&product.csv, &opts.output) {
        (None, None) => manifest,
        (None, Some(path)) => {
            write_atomic(path, manifest.as_bytes())?;
            String::new()
        }
        (Some(_), None) => {
            return Err(CliError::Usage(format!(
                "`{}` needs --output <path>",
                command.name()
            )));
        }
        (Some(csv), Some(path)) => {
            write_atomic(path, csv)?;
            write_atomic(&manifest_path(path), manifest.as_bytes())?;
            String::new()
        }
    };
    for warning in &product.manifest.run.warnings {
        eprintln!("warning: {warning}");
    }
    match product.failure {
        Some((failed, config_only)) => Err(CliError::SweepFailed {
            failed,
            config_only,
        }),
        None => Ok(stdout),
    }
}
