//! Command-line front end: single runs, scenario sweeps, fuzzy-definition
//! validation and surface export.
//!
//! Exit codes are a stable contract: 0 success, 1 domain/config error,
//! 2 I/O failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use wardsim::config::{ConfigError, ExperimentConfig};
use wardsim::experiments::{
    hypothesis_report, report_csv, run_sweep, summary_csv, ExperimentError, SweepSpec,
};
use wardsim::fuzzy::{load_fls_definition, FuzzySystem};
use wardsim::sim::{
    network_csv, patients_csv, run_simulation_with_options, trace_csv, RunResult, SimError,
    TraceHeader, VERSION,
};

#[derive(Parser)]
#[command(name = "wardsim", version, about = "Hospital ward agent simulation with fuzzy decision making")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write trace files
    Run(RunArgs),
    /// Run a scenario sweep and write summary/report files
    Sweep(SweepArgs),
    /// Validate a fuzzy definition file and print its structure
    ValidateFls {
        /// Fuzzy definition file
        path: PathBuf,
    },
    /// Write a grid of crisp outputs over a two-input fuzzy system
    FlsSurface {
        /// Fuzzy definition file
        path: PathBuf,
        /// Grid points per input
        #[arg(long, default_value_t = 21)]
        grid: usize,
        /// Output CSV path
        #[arg(long, default_value = "surface.csv")]
        output: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Seed override (defaults to the config's seed_base)
    #[arg(long)]
    seed: Option<u64>,
    /// Override the simulated duration in days
    #[arg(long)]
    days: Option<u32>,
    /// Override the doctor count (all senior)
    #[arg(long)]
    doctors: Option<u32>,
    /// Override the robot count (all humanlike at the configured h)
    #[arg(long)]
    robots: Option<u32>,
    /// Override the patient count
    #[arg(long)]
    patients: Option<u32>,
    /// Override the bed count
    #[arg(long)]
    beds: Option<u32>,
    /// Directory for trace.csv and patients.csv
    #[arg(long, default_value = ".")]
    output: PathBuf,
    /// Also write a per-day network edge dump (network.csv)
    #[arg(long)]
    dump_network: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep specification file (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Directory for summary.csv, report.csv and per-run traces
    #[arg(long, default_value = "sweep-out")]
    output: PathBuf,
    /// Number of parallel replication workers (0 = all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Also write per-day network edge dumps per replication
    #[arg(long)]
    dump_network: bool,
}

enum CliError {
    Domain(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Domain(m) | CliError::Io(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(err: ConfigError) -> Self {
        match err {
            ConfigError::Io { .. } => CliError::Io(err.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(err: SimError) -> Self {
        match err {
            SimError::Config(inner) => inner.into(),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(err: ExperimentError) -> Self {
        match err {
            ExperimentError::Config(inner) => inner.into(),
            ExperimentError::Sim(inner) => inner.into(),
            ExperimentError::Scenario { ref source, .. } => match source {
                ConfigError::Io { .. } => CliError::Io(err.to_string()),
                _ => CliError::Domain(err.to_string()),
            },
            other => CliError::Domain(other.to_string()),
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read '{}': {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("cannot create '{}': {e}", parent.display())))?;
        }
    }
    std::fs::write(path, content)
        .map_err(|e| CliError::Io(format!("cannot write '{}': {e}", path.display())))
}

fn short_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut hex = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

fn print_finals(result: &RunResult) {
    println!("finalMeanMentalState: {:.6}", result.final_mean_mental_state);
    println!("finalMeanTrustRobots: {:.6}", result.final_mean_trust_robots);
    println!("finalMeanOpinionDoctors: {:.6}", result.final_mean_opinion_doctors);
    println!("finalMeanOpinionRobots: {:.6}", result.final_mean_opinion_robots);
    println!(
        "finalEdges: green={} yellow={} red={}",
        result.final_edges.green, result.final_edges.yellow, result.final_edges.red
    );
    println!("redEdgeFraction: {:.6}", result.red_edge_fraction);
    let q = &result.queue_stats;
    println!(
        "queue: enqueued={} dispatched={} cancelledByVisit={} duplicatesIgnored={} remaining={}",
        q.enqueued, q.dispatched, q.cancelled_by_visit, q.duplicates_ignored, q.remaining_at_end
    );
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let text = read_file(&args.config)?;
    let mut config = ExperimentConfig::from_json(&text)?;

    let mut overrides = Vec::new();
    if let Some(days) = args.days {
        config.duration_days = days;
        overrides.push(format!("days={days}"));
    }
    if let Some(doctors) = args.doctors {
        config.doctors.senior = doctors;
        config.doctors.junior = 0;
        overrides.push(format!("doctors={doctors} (all senior)"));
    }
    if let Some(robots) = args.robots {
        config.robots.humanlike = robots;
        config.robots.robotlike = 0;
        overrides.push(format!("robots={robots} (all humanlike, h={})", config.robots.humanlike_h));
    }
    if let Some(patients) = args.patients {
        config.patients = patients;
        overrides.push(format!("patients={patients}"));
    }
    if let Some(beds) = args.beds {
        config.beds = beds;
        overrides.push(format!("beds={beds}"));
    }
    config.validate()?;

    let seed = args.seed.unwrap_or(config.seed_base);
    if args.seed.is_some() {
        overrides.push(format!("seed={seed}"));
    }
    let base_dir = args.config.parent().map(Path::to_path_buf);
    let fls = config.fls.load(base_dir.as_deref())?;
    let result = run_simulation_with_options(&config, &fls, seed, args.dump_network)?;

    let header = TraceHeader {
        config_hash: config.config_hash(),
        seed,
        scenario: None,
        overrides,
        green_max: config.network.green_max,
        yellow_max: config.network.yellow_max,
    };
    write_file(&args.output.join("trace.csv"), &trace_csv(&header, &result.trace))?;
    write_file(&args.output.join("patients.csv"), &patients_csv(&header, &result.patients))?;
    if let Some(dump) = &result.network_dump {
        write_file(&args.output.join("network.csv"), &network_csv(&header, dump))?;
    }

    print_finals(&result);
    println!("trace: {}", args.output.join("trace.csv").display());
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let text = read_file(&args.config)?;
    let spec = SweepSpec::from_json(&text)?;
    let base_dir = args.config.parent().map(Path::to_path_buf);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Domain(format!("cannot build worker pool: {e}")))?;
    let outcomes =
        pool.install(|| run_sweep(&spec, base_dir.as_deref(), args.dump_network))?;

    for outcome in &outcomes {
        for (k, result) in outcome.results.iter().enumerate() {
            let header = TraceHeader {
                config_hash: outcome.config.config_hash(),
                seed: outcome.config.seed_base + k as u64,
                scenario: Some(outcome.name.clone()),
                overrides: Vec::new(),
                green_max: outcome.config.network.green_max,
                yellow_max: outcome.config.network.yellow_max,
            };
            let dir = args.output.join(&outcome.name).join(format!("rep{k}"));
            write_file(&dir.join("trace.csv"), &trace_csv(&header, &result.trace))?;
            write_file(&dir.join("patients.csv"), &patients_csv(&header, &result.patients))?;
            if let Some(dump) = &result.network_dump {
                write_file(&dir.join("network.csv"), &network_csv(&header, dump))?;
            }
        }
    }

    let header_lines = vec![
        format!("wardsim v{VERSION}"),
        format!("sweep_hash: {}", short_hash(&text)),
        format!("baseline: {}", spec.baseline),
    ];
    write_file(&args.output.join("summary.csv"), &summary_csv(&outcomes, &header_lines))?;
    let rows = hypothesis_report(&outcomes, &spec.baseline)?;
    write_file(&args.output.join("report.csv"), &report_csv(&rows, &header_lines))?;

    for outcome in &outcomes {
        println!(
            "{}: reps={} finalMeanTrustRobots={:.4} redEdgeFraction={:.4}",
            outcome.name,
            outcome.results.len(),
            outcome.mean_response("finalMeanTrustRobots"),
            outcome.mean_response("redEdgeFraction"),
        );
    }
    println!("summary: {}", args.output.join("summary.csv").display());
    println!("report: {}", args.output.join("report.csv").display());
    Ok(())
}

fn cmd_validate_fls(path: &Path) -> Result<(), CliError> {
    let text = read_file(path)?;
    let system = load_fls_definition(&text).map_err(|e| CliError::Domain(e.to_string()))?;
    println!("valid: {}", path.display());
    for var in system.inputs() {
        let (lo, hi) = var.universe();
        let terms: Vec<&str> = var.terms().map(|(n, _)| n).collect();
        println!("input: {} [{lo}, {hi}] terms: {}", var.name(), terms.join(", "));
    }
    let (lo, hi) = system.output().universe();
    let terms: Vec<&str> = system.output().terms().map(|(n, _)| n).collect();
    println!("output: {} [{lo}, {hi}] terms: {}", system.output().name(), terms.join(", "));
    println!("rules: {}", system.rules().len());
    println!("completeness: ok (every grid point fires at least one rule)");
    Ok(())
}

fn cmd_fls_surface(path: &Path, grid: usize, output: &Path) -> Result<(), CliError> {
    if grid < 2 {
        return Err(CliError::Domain(format!("grid must be at least 2, got {grid}")));
    }
    let text = read_file(path)?;
    let system: FuzzySystem =
        load_fls_definition(&text).map_err(|e| CliError::Domain(e.to_string()))?;
    if system.inputs().len() != 2 {
        return Err(CliError::Domain(format!(
            "fls-surface needs a two-input system, '{}' has {}",
            path.display(),
            system.inputs().len()
        )));
    }
    let x_var = &system.inputs()[0];
    let y_var = &system.inputs()[1];
    let (xlo, xhi) = x_var.universe();
    let (ylo, yhi) = y_var.universe();

    let mut out = String::new();
    let _ = writeln!(out, "# wardsim v{VERSION}");
    let _ = writeln!(out, "# fls_hash: {}", short_hash(&text));
    let _ = writeln!(out, "# source: {}", path.display());
    let _ = writeln!(out, "# grid: {grid}");
    let _ = writeln!(out, "{},{},{}", x_var.name(), y_var.name(), system.output().name());
    for i in 0..grid {
        let x = xlo + (xhi - xlo) * i as f64 / (grid - 1) as f64;
        for j in 0..grid {
            let y = ylo + (yhi - ylo) * j as f64 / (grid - 1) as f64;
            let crisp = system
                .infer_pairs(&[(x_var.name(), x), (y_var.name(), y)])
                .map_err(|e| CliError::Domain(e.to_string()))?
                .crisp;
            let _ = writeln!(out, "{x:.6},{y:.6},{crisp:.6}");
        }
    }
    write_file(output, &out)?;
    println!("surface: {} ({grid}x{grid})", output.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::ValidateFls { path } => cmd_validate_fls(path),
        Command::FlsSurface { path, grid, output } => cmd_fls_surface(path, *grid, output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}
