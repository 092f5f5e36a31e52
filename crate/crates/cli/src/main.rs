//! `storparity`: single-scenario runs, full sweeps and result summaries.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 on usage or
//! configuration errors.

mod config;
mod report;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use storparity::sweep::{
    box_table, build_grid, parity_table, read_results_csv, run_scenario_detailed, run_sweep,
    write_box_csv, write_parity_csv, write_results_csv, ProsumerType, Scenario, ScenarioFailure,
    ScenarioResult, DEFAULT_BESS_PRICES, DEFAULT_RATIOS,
};

use config::{ManifestGrid, RunArgs, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "storparity",
    version,
    about = "PV-plus-battery self-consumption and grid-parity simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one scenario and print its metrics.
    Simulate(SimulateArgs),
    /// Run the full country x type x size x ratio x price grid.
    Sweep(SweepArgs),
    /// Summarize a results CSV written by `sweep`.
    Report(ReportArgs),
}

#[derive(Debug, clap::Args)]
struct SimulateArgs {
    #[arg(long)]
    country: String,
    /// Prosumer type: A (4500 kWh/yr), B (7500) or C (10500).
    #[arg(long = "type")]
    prosumer_type: ProsumerType,
    #[arg(long)]
    pv_kwp: u32,
    /// Battery kWh per kWp of PV.
    #[arg(long)]
    ratio: f64,
    /// Battery price before VAT, EUR/kWh.
    #[arg(long)]
    bess_price: f64,
    /// Accept PV sizes outside the type's examined range.
    #[arg(long)]
    allow_out_of_range: bool,
    /// Write the per-step dispatch trace to this CSV.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, clap::Args)]
struct SweepArgs {
    /// Worker threads (default: logical CPU count).
    #[arg(long)]
    parallel: Option<usize>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, clap::Args)]
struct ReportArgs {
    results_csv: PathBuf,
    /// Where to write summary.json (default: next to the results file).
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Failed(format!("cannot create {}: {e}", path.display())))
}

fn write_file(
    path: &Path,
    fill: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let mut out = create(path)?;
    fill(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| {
        CliError::Usage(format!(
            "cannot create output directory {}: {e}",
            dir.display()
        ))
    })
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let settings = Settings::resolve(&args.run)?;
    let data = settings.country(&args.country)?.clone();
    let scenario = Scenario {
        country: data.name.clone(),
        prosumer_type: args.prosumer_type,
        pv_kwp: args.pv_kwp,
        ratio_kwh_per_kwp: args.ratio,
        bess_price_eur_per_kwh: args.bess_price,
    };
    scenario
        .check(args.allow_out_of_range)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let run = run_scenario_detailed(&scenario, &data, &settings.econ, &settings.model)
        .map_err(|e| CliError::Failed(format!("{scenario}: {e}")))?;

    ensure_dir(&settings.out_dir)?;
    let result_path = settings.out_dir.join("result.csv");
    write_file(&result_path, |w| {
        write_results_csv(std::slice::from_ref(&run.result), w)
    })?;
    if let Some(path) = &args.trace {
        write_file(path, |w| run.trace.write_csv(w))?;
    }
    let manifest = settings.manifest(ManifestGrid {
        prosumer_types: vec![scenario.prosumer_type.to_string()],
        ratios_kwh_per_kwp: vec![scenario.ratio_kwh_per_kwp],
        bess_prices_eur_per_kwh: vec![scenario.bess_price_eur_per_kwh],
        scenarios: 1,
        failed: 0,
    });
    write_file(&settings.out_dir.join("run-manifest.toml"), |w| {
        w.write_all(manifest.to_toml().as_bytes())
    })?;

    let r = &run.result;
    let b = &run.balance;
    println!(
        "{} type {}: {} kWp PV, {} kWh battery at {} EUR/kWh",
        data.name,
        scenario.prosumer_type,
        scenario.pv_kwp,
        scenario.bess_kwh(),
        scenario.bess_price_eur_per_kwh
    );
    println!("LCOU    {:.4} EUR/kWh", r.lcou);
    println!("LCOE    {:.4} EUR/kWh", r.lcoe);
    println!("NPV     {:.2} EUR", r.npv);
    println!("SCR     {:.4}", r.scr);
    println!("SSR     {:.4}", r.ssr);
    println!(
        "parity  {} (retail {:.5} EUR/kWh)",
        r.grid_parity, data.retail_price_eur_per_kwh
    );
    println!(
        "energy  produced {:.1}, self-consumed {:.1}, imported {:.1}, curtailed {:.1} kWh",
        b.e_produced,
        b.e_self_consumed(),
        b.e_import,
        b.e_curtail
    );
    println!(
        "capex {:.2} EUR; discount rate {}, maintenance {} of pre-VAT capex, {} years, VAT {}",
        run.capex_eur,
        run.economics.discount_rate,
        run.economics.maintenance_rate,
        run.economics.horizon_years,
        run.economics.vat_rate
    );
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let settings = Settings::resolve(&args.run)?;
    let threads = match args.parallel.or(settings.parallel) {
        Some(0) => return Err(CliError::Usage("--parallel must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let grid = build_grid(
        &settings.countries.names(),
        &ProsumerType::ALL,
        &DEFAULT_RATIOS,
        &DEFAULT_BESS_PRICES,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Failed(format!("cannot start worker pool: {e}")))?;
    let outcomes =
        pool.install(|| run_sweep(&grid, &settings.countries, &settings.econ, &settings.model));

    let (ok, failed): (Vec<_>, Vec<_>) = outcomes.into_iter().partition(Result::is_ok);
    let results: Vec<ScenarioResult> = ok.into_iter().map(Result::unwrap).collect();
    let failures: Vec<ScenarioFailure> = failed.into_iter().map(|o| o.unwrap_err()).collect();
    for f in &failures {
        eprintln!("warning: {f}; excluded from shares and statistics");
    }

    let dir = &settings.out_dir;
    ensure_dir(dir)?;
    write_file(&dir.join("results.csv"), |w| write_results_csv(&results, w))?;
    let boxes = box_table(&results);
    write_file(&dir.join("box_stats.csv"), |w| write_box_csv(&boxes, w))?;
    let shares = parity_table(&results);
    write_file(&dir.join("parity_shares.csv"), |w| {
        write_parity_csv(&shares, w)
    })?;
    let manifest = settings.manifest(ManifestGrid {
        prosumer_types: ProsumerType::ALL.iter().map(|t| t.to_string()).collect(),
        ratios_kwh_per_kwp: DEFAULT_RATIOS.to_vec(),
        bess_prices_eur_per_kwh: DEFAULT_BESS_PRICES.to_vec(),
        scenarios: grid.len(),
        failed: failures.len(),
    });
    write_file(&dir.join("run-manifest.toml"), |w| {
        w.write_all(manifest.to_toml().as_bytes())
    })?;

    println!(
        "{} of {} scenarios evaluated, outputs in {}",
        results.len(),
        grid.len(),
        dir.display()
    );
    for r in shares.iter().filter(|r| r.bess_price.is_none()) {
        println!(
            "  {:<10} grid parity in {:>5.1}% of scenarios",
            r.country, r.share_pct
        );
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{} of {} scenarios failed",
            failures.len(),
            grid.len()
        )))
    }
}

fn report(args: ReportArgs) -> Result<(), CliError> {
    let path = &args.results_csv;
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Err(CliError::Usage(format!("{} is empty", path.display())));
    }
    let results =
        read_results_csv(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if results.is_empty() {
        return Err(CliError::Usage(format!(
            "{} has no result rows",
            path.display()
        )));
    }

    let summary = report::summarize(&results);
    print!("{}", report::render_text(&summary));

    let dir = match args.out_dir {
        Some(d) => d,
        None => path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let dir = if dir.as_os_str().is_empty() {
        PathBuf::from(".")
    } else {
        dir
    };
    ensure_dir(&dir)?;
    let json = serde_json::to_string_pretty(&summary).expect("summary is plain data");
    write_file(&dir.join("summary.json"), |w| writeln!(w, "{json}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Report(a) => report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
