use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use logistic_bd_cli::{run, CliError, Command, ExperimentSpec, Result, Table};

#[derive(Parser, Debug)]
#[command(
    name = "logistic-bd",
    version,
    about = "Extinction-time experiments for the logistic birth-death process"
)]
#[command(
    after_help = "Exit codes: 0 success, 1 usage or I/O error, 2 regime or parameter error, 3 acceptance check failed"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Spec file; flags below override its keys
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file, stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    replicates: Option<usize>,
    /// Relative acceptance tolerance
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Also write a matplotlib script that plots the CSV output
    #[arg(long, global = true)]
    plot_script: Option<PathBuf>,
    /// Comma-separated birth rates
    #[arg(long, global = true)]
    lambda: Option<String>,
    /// Comma-separated death rates
    #[arg(long, global = true)]
    mu: Option<String>,
    /// Comma-separated competition rates
    #[arg(long, global = true)]
    theta: Option<String>,
    /// Comma-separated initial sizes, or `capacity`
    #[arg(long, global = true)]
    m: Option<String>,
    /// Comma-separated scaled initial sizes, m = round(a/θ)
    #[arg(long, global = true)]
    a: Option<String>,
    /// Limit law for `limit-law`
    #[arg(long, global = true)]
    law: Option<String>,
    /// Jump horizon of the separation estimate
    #[arg(long, global = true)]
    horizon: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Exact expected extinction time
    Exact,
    /// Small-θ predictions and limit laws
    Asymptote,
    /// Simulated extinction times against the exact mean
    Simulate,
    /// Coupled runs with the linear process
    Couple,
    /// Subcritical mean sweep over μ
    Figure1,
    /// Critical mean sweep over μ
    Figure2,
    /// Goodness of fit of a limit law
    LimitLaw,
    /// Exact against asymptotic quantities along decreasing θ
    Convergence,
    /// Separation and coupling gap along decreasing θ
    CouplingStudy,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Exact => Command::Exact,
            Cmd::Asymptote => Command::Asymptote,
            Cmd::Simulate => Command::Simulate,
            Cmd::Couple => Command::Couple,
            Cmd::Figure1 => Command::Figure1,
            Cmd::Figure2 => Command::Figure2,
            Cmd::LimitLaw => Command::LimitLaw,
            Cmd::Convergence => Command::Convergence,
            Cmd::CouplingStudy => Command::CouplingStudy,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

fn build_spec(cli: &Cli) -> Result<ExperimentSpec> {
    let mut spec = match &cli.spec {
        Some(path) => ExperimentSpec::from_file(path)?,
        None => ExperimentSpec::default(),
    };
    let overrides = [
        ("lambda", cli.lambda.clone()),
        ("mu", cli.mu.clone()),
        ("theta", cli.theta.clone()),
        ("m", cli.m.clone()),
        ("a", cli.a.clone()),
        ("law", cli.law.clone()),
        ("seed", cli.seed.map(|s| s.to_string())),
        ("replicates", cli.replicates.map(|n| n.to_string())),
        ("tolerance", cli.tolerance.map(|t| t.to_string())),
        ("horizon", cli.horizon.map(|h| h.to_string())),
    ];
    if cli.m.is_some() && cli.a.is_some() {
        return Err(CliError::Usage("--m and --a are exclusive".into()));
    }
    for (key, value) in overrides {
        if let Some(v) = value {
            spec.set(key, &v).map_err(CliError::Usage)?;
        }
    }
    if let Some(out) = &cli.out {
        spec.out = Some(out.clone());
    }
    Ok(spec)
}

fn write_table(table: &Table, spec: &ExperimentSpec, format: Format) -> Result<()> {
    let io = |path: &PathBuf| {
        let path = path.clone();
        move |source| CliError::Io { path, source }
    };
    let sink: Box<dyn Write> = match &spec.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(io(path))?;
            }
            Box::new(File::create(path).map_err(io(path))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let sink = BufWriter::new(sink);
    match format {
        Format::Csv => table.write_csv(sink),
        Format::Json => table.write_json(sink),
    }
}

fn execute(cli: &Cli) -> Result<Table> {
    let spec = build_spec(cli)?;
    if cli.plot_script.is_some() && (cli.format != Format::Csv || spec.out.is_none()) {
        return Err(CliError::Usage(
            "--plot-script needs CSV output written to --out".into(),
        ));
    }
    let table = run(cli.command.into(), &spec)?;
    write_table(&table, &spec, cli.format)?;
    if let (Some(path), Some(out)) = (&cli.plot_script, &spec.out) {
        if let Some(script) = table.plot_script(&out.to_string_lossy()) {
            std::fs::write(path, script).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
        }
    }
    Ok(table)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(table) if table.violations.is_empty() => ExitCode::SUCCESS,
        Ok(table) => {
            for v in &table.violations {
                eprintln!("check failed: {v}");
            }
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
