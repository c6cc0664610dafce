//! Command-line interface.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::catalog::{load_catalog, DescriptorCatalog};
use crate::engine::{compare_regimes, indicator_series, IndicatorColumn, DEFAULT_WINDOW};
use crate::enterprise::{
    apply_mapping, check_budget, EnterpriseModel, MappedSeries, Normalization,
};
use crate::error::Result;
use crate::io::events::{parse_events, write_events};
use crate::io::mapping::parse_mapping;
use crate::io::reference::{load_reference, verify_reference};
use crate::io::report::{emit_report, parse_comparison_or_indicator, AnalysisReport, RunMeta};
use crate::io::scenario::{parse_scenario, write_scenario};
use crate::io::{catalog_doc, read_text, write_atomic};
use crate::synth::paired_scenarios;

pub const BASELINE_EVENTS: &str = "events_baseline.csv";
pub const TREATED_EVENTS: &str = "events_treated.csv";
pub const SCENARIO_COPY: &str = "scenario.toml";

#[derive(Debug, Parser)]
#[command(
    name = "integral-indicator",
    version,
    about = "Integral indicators over sliding-window correlation matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Raw,
    Standardized,
}

impl From<ModeArg> for Normalization {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Raw => Normalization::Raw,
            ModeArg::Standardized => Normalization::Standardized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputKind {
    Events,
    Indicators,
}

#[derive(Debug, clap::Args)]
struct AnalysisArgs {
    /// Competency mapping file; without it every channel is used.
    #[arg(long)]
    mapping: Option<PathBuf>,
    /// Catalog document used to resolve mapping competencies (default: bundled).
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Window length k (periods).
    #[arg(long, short = 'k', default_value_t = DEFAULT_WINDOW)]
    window: usize,
    #[arg(long, value_enum, default_value = "raw")]
    mode: ModeArg,
    /// Seed of the synthetic scenario the events came from, recorded in the metadata.
    #[arg(long)]
    seed: Option<u64>,
    /// Emit zero rows for the warm-up periods in the plot file.
    #[arg(long)]
    pad_warmup: bool,
    #[arg(long, short = 'o')]
    output: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the competency catalog, or validate an alternative catalog document.
    Catalog {
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Generate paired baseline/treated synthetic event files from a scenario config.
    Generate {
        #[arg(long, short = 'c')]
        config: PathBuf,
        #[arg(long, short = 'o')]
        output: PathBuf,
    },
    /// Compute integral indicators for an event file.
    Analyze {
        #[arg(long, short = 'e')]
        events: PathBuf,
        #[command(flatten)]
        args: AnalysisArgs,
    },
    /// Compare two regimes, from event files or from emitted indicator tables.
    Compare {
        #[arg(long)]
        basic: PathBuf,
        #[arg(long)]
        treated: PathBuf,
        #[arg(long, value_enum, default_value = "events")]
        inputs: InputKind,
        #[command(flatten)]
        args: AnalysisArgs,
    },
    /// Check the arithmetic of the bundled published regime table.
    VerifyReference,
}

/// Runs the CLI and returns the process exit status.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Catalog { file } => {
            let catalog = match file {
                Some(p) => load_catalog(&read_text(&p)?)?,
                None => DescriptorCatalog::bundled(),
            };
            print!("{}", catalog_doc::serialize(&catalog));
            eprintln!("catalog valid: {} entries", catalog.len());
            Ok(0)
        }
        Command::Generate { config, output } => {
            let cfg = parse_scenario(&read_text(&config)?)?;
            let (baseline, treated) = paired_scenarios(&cfg)?;
            std::fs::create_dir_all(&output).map_err(|e| crate::Error::io(&output, e))?;
            write_atomic(
                &output.join(BASELINE_EVENTS),
                write_events(&baseline).as_bytes(),
            )?;
            write_atomic(
                &output.join(TREATED_EVENTS),
                write_events(&treated).as_bytes(),
            )?;
            write_atomic(&output.join(SCENARIO_COPY), write_scenario(&cfg).as_bytes())?;
            println!(
                "generated {} periods x {} channels (synthetic, seed {}) into {}",
                baseline.t_max(),
                baseline.n(),
                cfg.seed,
                output.display()
            );
            Ok(0)
        }
        Command::Analyze { events, args } => {
            let model = parse_events(&read_text(&events)?)?;
            let mapped = map_events(&model, &args)?;
            let mode = args.mode.into();
            let series = indicator_series(&mapped, args.window, mode)?;
            let report = AnalysisReport::from_indicators(
                run_meta(&args, &mapped),
                mapped.labels().to_vec(),
                &series,
            );
            let files = emit_report(&report, &args.output)?;
            println!(
                "periods {}..={} (k={}, {mode}): total V = {}",
                series.first_period,
                series.last_period(),
                args.window,
                series.total
            );
            println!("wrote {}", files.table.display());
            Ok(0)
        }
        Command::Compare {
            basic,
            treated,
            inputs,
            args,
        } => {
            let (basic_col, treated_col, masked) = match inputs {
                InputKind::Events => {
                    let (b, masked) = events_column(&basic, &args)?;
                    let (t, _) = events_column(&treated, &args)?;
                    (b, t, masked)
                }
                InputKind::Indicators => (
                    parse_comparison_or_indicator(&read_text(&basic)?)?,
                    parse_comparison_or_indicator(&read_text(&treated)?)?,
                    Vec::new(),
                ),
            };
            let comparison = compare_regimes(&basic_col, &treated_col)?;
            let mut meta = RunMeta {
                masked_channels: masked,
                ..run_meta_base(&args)
            };
            if inputs == InputKind::Indicators {
                meta.k = None;
                meta.mode = None;
            }
            let report = AnalysisReport::from_comparison(meta, comparison.clone());
            let files = emit_report(&report, &args.output)?;
            println!(
                "total basic {} / treated {} / delta {}",
                comparison.total_basic, comparison.total_treated, comparison.total_delta
            );
            println!("wrote {}", files.table.display());
            Ok(0)
        }
        Command::VerifyReference => {
            let report = verify_reference(&load_reference()?);
            for c in &report.checks {
                println!(
                    "[{}] {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn run_meta_base(args: &AnalysisArgs) -> RunMeta {
    RunMeta {
        k: Some(args.window),
        mode: Some(args.mode.into()),
        seed: args.seed,
        pad_warmup: args.pad_warmup,
        masked_channels: Vec::new(),
    }
}

fn run_meta(args: &AnalysisArgs, mapped: &MappedSeries) -> RunMeta {
    RunMeta {
        masked_channels: masked_labels(mapped),
        ..run_meta_base(args)
    }
}

fn masked_labels(mapped: &MappedSeries) -> Vec<String> {
    mapped
        .masked_channels()
        .iter()
        .map(|&j| mapped.labels()[j].clone())
        .collect()
}

fn map_events(model: &EnterpriseModel, args: &AnalysisArgs) -> Result<MappedSeries> {
    let Some(path) = &args.mapping else {
        return Ok(MappedSeries::unmasked(model));
    };
    let catalog = match &args.catalog {
        Some(p) => load_catalog(&read_text(p)?)?,
        None => DescriptorCatalog::bundled(),
    };
    let mapping = parse_mapping(&read_text(path)?, &catalog, model.labels())?;
    let budget = check_budget(&mapping);
    eprintln!(
        "budget: cost {} of {} ({})",
        budget.total_cost,
        budget.budget,
        if budget.satisfied { "ok" } else { "exceeded" }
    );
    apply_mapping(model, &mapping)
}

fn events_column(path: &Path, args: &AnalysisArgs) -> Result<(IndicatorColumn, Vec<String>)> {
    let model = parse_events(&read_text(path)?)?;
    let mapped = map_events(&model, args)?;
    let series = indicator_series(&mapped, args.window, args.mode.into())?;
    Ok((series.column(), masked_labels(&mapped)))
}
