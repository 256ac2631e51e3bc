use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use cr_sched::report::{emit_plot_data, write_csv, write_json};
use cr_sched::runner::{execute, RunOptions};
use cr_sched::scenario_file::{load_scenario, MethodArg, OutputFormat, PowerArg};
use cr_sched::PRESET_NAMES;
use cr_sched_core::McComparison;

/// Selection probabilities for opportunistic scheduling under an
/// interference cap: closed form, quadrature, and Monte Carlo.
#[derive(Debug, Parser)]
#[command(name = "cr-sched", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario (a JSON file or a preset: fig1..fig4) and emit a report.
    Run(RunArgs),
    /// Run several presets and emit grouped bar-chart data as CSV.
    PlotData(PlotDataArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario file path or preset name (fig1, fig2, fig3, fig4).
    scenario: String,

    /// Probability columns to compute.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,

    /// Monte Carlo trial count override.
    #[arg(long)]
    trials: Option<u64>,

    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,

    /// Report format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Compare simulation against analytics at the 3-sigma binomial bound
    /// and fail the exit code if any user misses it.
    #[arg(long)]
    check: bool,

    /// Power-control mode for the simulator.
    #[arg(long, value_enum)]
    power: Option<PowerArg>,
}

#[derive(Debug, Args)]
struct PlotDataArgs {
    /// Presets to include, in order.
    #[arg(long, value_delimiter = ',', default_values_t = PRESET_NAMES.map(String::from))]
    presets: Vec<String>,

    /// Monte Carlo trial count override.
    #[arg(long)]
    trials: Option<u64>,

    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,

    /// Write the dataset here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::PlotData(args) => cmd_plot_data(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn open_sink(out: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => {
            Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?)
        }
        None => Box::new(io::stdout()),
    })
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let mut loaded = load_scenario(&args.scenario)?;
    if let Some(trials) = args.trials {
        loaded.scenario.trials = trials;
    }
    if let Some(seed) = args.seed {
        loaded.scenario.seed = seed;
    }
    if let Some(power) = args.power {
        loaded.scenario.power_mode = power.into();
    }
    loaded.scenario.validate()?;

    let method = args.method.or(loaded.method).unwrap_or(MethodArg::All);
    let format = args.format.or(loaded.format).unwrap_or(OutputFormat::Json);
    let opts = RunOptions {
        method,
        check: args.check,
        ..RunOptions::default()
    };

    let outcome = execute(&loaded.scenario, &loaded.label, &opts)?;

    let mut sink = open_sink(args.out.as_ref())?;
    match format {
        OutputFormat::Json => write_json(&outcome.report, &mut sink)?,
        OutputFormat::Csv => write_csv(&outcome.report, &mut sink)?,
    }
    sink.flush()?;

    if let Some(check) = &outcome.check {
        print_check(check);
        if !check.pass {
            return Ok(ExitCode::FAILURE);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_check(check: &McComparison) {
    for row in &check.rows {
        eprintln!(
            "check user {}: analytic {:.6} empirical {:.6} |diff| {:.6} (3-sigma bound {:.6}) {}",
            row.user,
            row.analytic,
            row.empirical,
            row.abs_diff,
            row.bound_3sigma,
            if row.abs_diff <= row.bound_3sigma { "ok" } else { "MISS" },
        );
    }
    eprintln!("check: {}", if check.pass { "ok" } else { "FAIL" });
}

fn cmd_plot_data(args: PlotDataArgs) -> Result<ExitCode> {
    let mut reports = Vec::new();
    for name in &args.presets {
        let mut loaded = load_scenario(name)?;
        if let Some(trials) = args.trials {
            loaded.scenario.trials = trials;
        }
        if let Some(seed) = args.seed {
            loaded.scenario.seed = seed;
        }
        loaded.scenario.validate()?;
        let opts = RunOptions::default();
        let outcome = execute(&loaded.scenario, &loaded.label, &opts)?;
        reports.push(outcome.report);
    }

    let mut sink = open_sink(args.out.as_ref())?;
    emit_plot_data(&reports, &mut sink)?;
    sink.flush()?;
    Ok(ExitCode::SUCCESS)
}
