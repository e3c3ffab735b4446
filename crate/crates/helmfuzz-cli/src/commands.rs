//! Implementations behind the `run`, `fis` and `sweep` subcommands.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use helmfuzz::guidance::{CommandSchedule, DepthProfile};
use helmfuzz::ruledsl::{builtin_fis, parse_fis, serialize_fis};
use helmfuzz::simloop::Scenario;
use helmfuzz::{compute_metrics, presets, run_scenario, Metrics};

use crate::config::load_config;
use crate::csvio::{write_csv, write_plot_script};

/// Exit code 2: bad invocation, unreadable or invalid configuration.
/// Exit code 3: the simulation itself failed.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Config(msg) | CliError::Runtime(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl std::error::Error for CliError {}

fn io_error(context: &str, err: io::Error) -> CliError {
    CliError::Runtime(format!("{context}: {err}"))
}

fn resolve_scenario(
    preset: Option<&str>,
    config: Option<&Path>,
) -> Result<(Scenario, String), CliError> {
    match (preset, config) {
        (Some(name), None) => {
            let scenario = presets::by_name(name).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown preset '{name}': expected fig4, fig5 or fig6"
                ))
            })?;
            Ok((scenario, name.to_owned()))
        }
        (None, Some(path)) => {
            let loaded = load_config(path, &presets::default_scenario())
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let title = loaded
                .plot_title
                .unwrap_or_else(|| path.display().to_string());
            Ok((loaded.scenario, title))
        }
        (None, None) => Err(CliError::Usage(
            "run requires --preset <name> or --config <path>".into(),
        )),
        (Some(_), Some(_)) => Err(CliError::Usage(
            "--preset and --config are mutually exclusive".into(),
        )),
    }
}

pub fn cmd_run(
    preset: Option<&str>,
    config: Option<&Path>,
    out: &str,
    emit_plot: Option<&Path>,
) -> Result<(), CliError> {
    let (scenario, title) = resolve_scenario(preset, config)?;
    let log = run_scenario(&scenario).map_err(|e| CliError::Runtime(e.to_string()))?;
    let metrics = compute_metrics(&log).map_err(|e| CliError::Runtime(e.to_string()))?;

    if out == "-" {
        let stdout = io::stdout();
        write_csv(stdout.lock(), &log).map_err(|e| io_error("writing CSV", e))?;
        // Keep piped CSV clean; the summary goes to stderr instead.
        print_metrics(&mut io::stderr(), log.len(), &metrics)
            .map_err(|e| io_error("writing summary", e))?;
        if emit_plot.is_some() {
            return Err(CliError::Usage(
                "--emit-plot requires --out <file>, not standard output".into(),
            ));
        }
    } else {
        let file = File::create(out).map_err(|e| io_error(&format!("creating {out}"), e))?;
        write_csv(BufWriter::new(file), &log).map_err(|e| io_error("writing CSV", e))?;
        if let Some(plot_path) = emit_plot {
            let file = File::create(plot_path)
                .map_err(|e| io_error(&format!("creating {}", plot_path.display()), e))?;
            write_plot_script(BufWriter::new(file), out, &title)
                .map_err(|e| io_error("writing plot script", e))?;
        }
        print_metrics(&mut io::stdout(), log.len(), &metrics)
            .map_err(|e| io_error("writing summary", e))?;
    }
    Ok(())
}

fn print_metrics(out: &mut dyn Write, rows: usize, metrics: &Metrics) -> io::Result<()> {
    let deg = 180.0 / std::f64::consts::PI;
    writeln!(out, "rows                {rows}")?;
    writeln!(
        out,
        "max |heading error| {:.4} deg",
        metrics.max_abs_psi_err * deg
    )?;
    writeln!(out, "rms heading error   {:.4} deg", metrics.rms_psi_err * deg)?;
    writeln!(out, "max |rudder|        {:.4} deg", metrics.max_abs_delta * deg)?;
    match metrics.settle_time {
        Some(t) => writeln!(out, "settle time         {t} s (within 1 deg of the command)")?,
        None => writeln!(out, "settle time         not settled")?,
    }
    Ok(())
}

fn load_fis_argument(source: &str) -> Result<helmfuzz::FisDefinition, CliError> {
    if source == "builtin" {
        return Ok(builtin_fis());
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| CliError::Config(format!("cannot read {source}: {e}")))?;
    parse_fis(&text).map_err(|e| CliError::Config(format!("{source}: {e}")))
}

pub fn cmd_fis_eval(psi_err: f64, r_err: f64, fis_source: &str) -> Result<(), CliError> {
    let fis = load_fis_argument(fis_source)?;
    let value = fis
        .evaluate(psi_err, r_err)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("{value}");
    Ok(())
}

pub fn cmd_fis_check(path: &str) -> Result<(), CliError> {
    let (text, shown) = if path == "-" {
        let mut buffer = String::new();
        io::stdin()
            .read_to_string(&mut buffer)
            .map_err(|e| CliError::Config(format!("cannot read standard input: {e}")))?;
        (buffer, "<stdin>".to_owned())
    } else {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
        (text, path.to_owned())
    };
    parse_fis(&text).map_err(|e| CliError::Config(format!("{shown}: {e}")))?;
    println!("{shown}: ok (3 variables, 49 rules)");
    Ok(())
}

pub fn cmd_fis_dump() -> Result<(), CliError> {
    print!("{}", serialize_fis(&builtin_fis()));
    Ok(())
}

struct SweepCell {
    name: String,
    depth_token: String,
    command_token: String,
    scenario: Scenario,
}

pub fn cmd_sweep(
    config: Option<&Path>,
    depths: Option<&str>,
    commands: Option<&str>,
    out_dir: &Path,
    jobs: Option<usize>,
) -> Result<(), CliError> {
    if depths.is_none() && commands.is_none() {
        return Err(CliError::Usage(
            "sweep requires --depths and/or --commands".into(),
        ));
    }
    let base = match config {
        Some(path) => {
            load_config(path, &presets::default_scenario())
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
                .scenario
        }
        None => presets::default_scenario(),
    };

    // A missing axis contributes one pass-through cell slot named "base".
    let depth_axis = axis_slots(parse_axis(depths, "--depths")?);
    let command_axis = axis_slots(parse_axis(commands, "--commands")?);

    let mut cells = Vec::new();
    for depth in &depth_axis {
        for command in &command_axis {
            let mut scenario = base.clone();
            if let Some(value) = depth.1 {
                scenario.depth = DepthProfile::Constant(value);
            }
            if let Some(value) = command.1 {
                scenario.schedule = CommandSchedule::step_command(value.to_radians());
            }
            cells.push(SweepCell {
                name: format!("d{}_c{}.csv", depth.0, command.0),
                depth_token: depth.0.clone(),
                command_token: command.0.clone(),
                scenario,
            });
        }
    }

    let jobs = match jobs {
        Some(n) => n,
        None => match std::env::var("HELMFUZZ_JOBS") {
            Ok(value) => value.parse::<usize>().map_err(|_| {
                CliError::Usage(format!(
                    "HELMFUZZ_JOBS must be a positive integer, got '{value}'"
                ))
            })?,
            Err(_) => 0, // rayon default: one worker per core
        },
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot build worker pool: {e}")))?;

    std::fs::create_dir_all(out_dir)
        .map_err(|e| io_error(&format!("creating {}", out_dir.display()), e))?;

    let results: Vec<Result<Metrics, String>> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let log = run_scenario(&cell.scenario).map_err(|e| e.to_string())?;
                let metrics = compute_metrics(&log).map_err(|e| e.to_string())?;
                let path = out_dir.join(&cell.name);
                let file = File::create(&path)
                    .map_err(|e| format!("creating {}: {e}", path.display()))?;
                write_csv(BufWriter::new(file), &log).map_err(|e| e.to_string())?;
                Ok(metrics)
            })
            .collect()
    });

    let summary_path = out_dir.join("summary.csv");
    let mut summary = BufWriter::new(
        File::create(&summary_path)
            .map_err(|e| io_error(&format!("creating {}", summary_path.display()), e))?,
    );
    let deg = 180.0 / std::f64::consts::PI;
    writeln!(
        summary,
        "depth,command_deg,file,status,max_abs_psi_err_deg,rms_psi_err_deg,max_abs_delta_deg,settle_time_s"
    )
    .map_err(|e| io_error("writing summary", e))?;
    let mut failures = 0usize;
    for (cell, result) in cells.iter().zip(results.iter()) {
        match result {
            Ok(m) => {
                let settle = m
                    .settle_time
                    .map(|t| t.to_string())
                    .unwrap_or_default();
                writeln!(
                    summary,
                    "{},{},{},ok,{},{},{},{}",
                    cell.depth_token,
                    cell.command_token,
                    cell.name,
                    m.max_abs_psi_err * deg,
                    m.rms_psi_err * deg,
                    m.max_abs_delta * deg,
                    settle
                )
                .map_err(|e| io_error("writing summary", e))?;
            }
            Err(message) => {
                failures += 1;
                writeln!(
                    summary,
                    "{},{},{},error: {},,,,",
                    cell.depth_token,
                    cell.command_token,
                    cell.name,
                    message.replace(',', ";")
                )
                .map_err(|e| io_error("writing summary", e))?;
            }
        }
    }
    summary.flush().map_err(|e| io_error("writing summary", e))?;
    eprintln!(
        "sweep: {} cells, {} failed, summary at {}",
        cells.len(),
        failures,
        summary_path.display()
    );
    if failures > 0 {
        return Err(CliError::Runtime(format!(
            "{failures} of {} sweep cells failed; see {}",
            cells.len(),
            summary_path.display()
        )));
    }
    Ok(())
}

type AxisEntry = (String, f64);

fn axis_slots(axis: Vec<AxisEntry>) -> Vec<(String, Option<f64>)> {
    if axis.is_empty() {
        vec![("base".to_owned(), None)]
    } else {
        axis.into_iter()
            .map(|(token, value)| (token, Some(value)))
            .collect()
    }
}

fn parse_axis(list: Option<&str>, flag: &str) -> Result<Vec<AxisEntry>, CliError> {
    match list {
        None => Ok(Vec::new()),
        Some(text) => {
            let mut entries = Vec::new();
            for token in text.split(',') {
                let token = token.trim();
                if token.is_empty() {
                    return Err(CliError::Usage(format!("{flag} contains an empty entry")));
                }
                let value: f64 = token.parse().map_err(|_| {
                    CliError::Usage(format!("{flag}: '{token}' is not a number"))
                })?;
                if !value.is_finite() {
                    return Err(CliError::Usage(format!("{flag}: '{token}' must be finite")));
                }
                entries.push((token.to_owned(), value));
            }
            Ok(entries)
        }
    }
}
