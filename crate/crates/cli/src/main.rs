//! `dfwer` — familywise error rate control for discrete count data.
//!
//! Subcommands:
//! * `analyze`  — exact tests plus adjusted p-values for a count file
//! * `simulate` — Monte Carlo FWER / minimal-power estimation from a config
//! * `goldens`  — self-check against the embedded reference dataset

mod input;
mod render;
mod simcfg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use discrete_fwer::clinical::{self, ReferenceCell};
use discrete_fwer::exact::{binomial_exact, fisher_exact, PoissonPairInput, TwoByTwoInput};
use discrete_fwer::procedures::apply;
use discrete_fwer::{Family, Hypothesis, ProcedureId};
use render::{fmt_float, render_delimited, render_table, Precision};

#[derive(Parser)]
#[command(name = "dfwer", version, about = "FWER-controlling multiple testing for discrete data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test every row of a count file and report adjusted p-values
    Analyze(AnalyzeArgs),
    /// Estimate FWER, minimal power, and mean rejections for a scenario
    Simulate(SimulateArgs),
    /// Recompute the embedded reference dataset and diff every cell
    Goldens(GoldensArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TestArg {
    /// Two-sided Fisher exact test on 2x2 tables
    Fet,
    /// Conditional binomial exact test on Poisson pairs
    Bet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Table,
    Delimited,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Count file: header `label,x1,x2`, one row per hypothesis
    input: PathBuf,
    /// Which exact test to run
    #[arg(long, value_enum, default_value_t = TestArg::Fet)]
    test: TestArg,
    /// Group-1 sample size (required for FET)
    #[arg(long)]
    n1: Option<u64>,
    /// Group-2 sample size (required for FET)
    #[arg(long)]
    n2: Option<u64>,
    /// Comma-separated procedure ids (bonf, sidak, holm, hochberg, tarone,
    /// modtarone, taroneholm, mbonf, mholm, mhoch)
    #[arg(long, value_delimiter = ',', default_value = "mbonf,mholm,mhoch")]
    procedures: Vec<String>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
    /// Decimal places for probabilities, or `full` for round-trip precision
    #[arg(long, default_value = "4")]
    precision: String,
}

#[derive(Args)]
struct SimulateArgs {
    /// key=value config file (see README for the key set)
    config: PathBuf,
    /// Override the config's seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GoldensArgs {
    /// Optional expectation overrides: CSV `table,row,column,value`
    #[arg(long)]
    expected: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Goldens(args) => cmd_goldens(args),
    }
}

fn parse_procedures(names: &[String]) -> Result<Vec<ProcedureId>> {
    if names.is_empty() {
        bail!("no procedures requested");
    }
    names
        .iter()
        .map(|s| s.parse::<ProcedureId>().map_err(|e| anyhow!("{e}")))
        .collect()
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    let precision: Precision = args.precision.parse().map_err(|e: String| anyhow!(e))?;
    let procedures = parse_procedures(&args.procedures)?;
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        bail!("alpha must be in (0, 1), got {}", args.alpha);
    }

    let group_sizes = match (args.test, args.n1, args.n2) {
        (TestArg::Fet, Some(n1), Some(n2)) => Some((n1, n2)),
        (TestArg::Fet, _, _) => bail!("--n1 and --n2 are required for --test fet"),
        (TestArg::Bet, _, _) => None,
    };

    let rows = input::parse_count_file(&args.input)?;
    let hypotheses = rows
        .iter()
        .map(|row| {
            let result = match group_sizes {
                Some((n1, n2)) => {
                    let table = TwoByTwoInput::new(row.x1, row.x2, n1, n2)
                        .with_context(|| format!("row {:?}", row.label))?;
                    fisher_exact(&table)?
                }
                None => binomial_exact(&PoissonPairInput::new(row.x1, row.x2))?,
            };
            Ok(Hypothesis::from(result).with_label(row.label.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let family = Family::new(hypotheses)?;

    let decisions = procedures
        .iter()
        .map(|&id| Ok(apply(id, &family, args.alpha)?))
        .collect::<Result<Vec<_>>>()?;

    let mut header = vec![
        "rank".to_string(),
        "label".to_string(),
        "x1".to_string(),
        "x2".to_string(),
        "p".to_string(),
    ];
    for d in &decisions {
        header.push(d.procedure.name().to_string());
        header.push(format!("{}_reject", d.procedure.name()));
    }

    let table_rows: Vec<Vec<String>> = family
        .sorted_order()
        .iter()
        .enumerate()
        .map(|(rank0, &orig)| {
            let h = &family.hypotheses()[orig];
            let mut cells = vec![
                (rank0 + 1).to_string(),
                h.label.clone().unwrap_or_default(),
                rows[orig].x1.to_string(),
                rows[orig].x2.to_string(),
                fmt_float(h.observed_p, precision),
            ];
            for d in &decisions {
                match &d.adjusted_p {
                    Some(adj) => cells.push(fmt_float(adj[orig], precision)),
                    None => cells.push("NA".to_string()),
                }
                cells.push(if d.rejected[orig] { "1" } else { "0" }.to_string());
            }
            cells
        })
        .collect();

    let rendered = match args.format {
        FormatArg::Table => render_table(&header, &table_rows),
        FormatArg::Delimited => render_delimited(&header, &table_rows),
    };
    print!("{rendered}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode> {
    let (mut config, procedures) = simcfg::parse_sim_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let results = discrete_fwer::sim::estimate(&config, &procedures)?;

    let header: Vec<String> = [
        "procedure",
        "fwer",
        "fwer_se",
        "min_power",
        "min_power_se",
        "mean_rejections",
        "min_power_defined",
    ]
    .map(String::from)
    .to_vec();
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                r.procedure.name().to_string(),
                format!("{}", r.fwer),
                format!("{}", r.fwer_se),
                format!("{}", r.min_power),
                format!("{}", r.min_power_se),
                format!("{}", r.mean_rejections),
                if r.min_power_defined { "1" } else { "0" }.to_string(),
            ]
        })
        .collect();
    print!("{}", render_delimited(&header, &rows));
    Ok(ExitCode::SUCCESS)
}

fn cmd_goldens(args: GoldensArgs) -> Result<ExitCode> {
    let mut cells = clinical::reference_cells();
    if let Some(path) = &args.expected {
        apply_overrides(&mut cells, path)?;
    }
    let checks = clinical::evaluate_cells(&cells)?;
    let mut failures = 0usize;
    for check in &checks {
        let verdict = if check.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} table{} row={} col={} expected={:.4} actual={:.4}",
            check.table, check.row, check.column, check.expected, check.actual
        );
        failures += usize::from(!check.pass);
    }
    println!(
        "{} of {} cells match at 4 decimal places",
        checks.len() - failures,
        checks.len()
    );
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Applies `table,row,column,value` overrides to the embedded expectations.
fn apply_overrides(cells: &mut [ReferenceCell], path: &PathBuf) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    for (idx, line) in text.lines().enumerate() {
        let n = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.eq_ignore_ascii_case("table,row,column,value") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            bail!("line {n}: expected `table,row,column,value`");
        }
        let table: u8 = fields[0].parse().with_context(|| format!("line {n}: table"))?;
        let row: usize = fields[1].parse().with_context(|| format!("line {n}: row"))?;
        let value: f64 = fields[3].parse().with_context(|| format!("line {n}: value"))?;
        let cell = cells
            .iter_mut()
            .find(|c| c.table == table && c.row == row && c.column == fields[2])
            .ok_or_else(|| anyhow!("line {n}: no such cell table{table} row={row} col={}", fields[2]))?;
        cell.expected = value;
    }
    Ok(())
}
