use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use creol_ta::config::{self, Project, StrategyName};
use creol_ta::report::{render, Report};
use creol_ta::{check, exit, exit_code, sweep, translate, CliError, Overrides, SweepSpec};

#[derive(Parser)]
#[command(
    version,
    about = "Translate real-time Creol classes to timed automata and check schedulability"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the composed network as UPPAAL XML.
    Translate {
        project: PathBuf,
        /// Output file; standard output by default.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the task and location tables as JSON.
        #[arg(long)]
        tables: Option<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Check schedulability and the project's queries.
    Check {
        project: PathBuf,
        /// Check schedulability for each value of a constant instead,
        /// e.g. `SPEED=15..25` or `max_queue=4..8`.
        #[arg(long)]
        sweep: Option<SweepSpec>,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Print nothing on standard output.
        #[arg(long, short)]
        quiet: bool,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Render a JSON report as text.
    Report {
        report: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct OverrideArgs {
    #[arg(long, value_enum)]
    strategy: Option<StrategyName>,
    #[arg(long)]
    max_queue: Option<usize>,
    /// Maximum number of stored symbolic states per search.
    #[arg(long)]
    budget: Option<usize>,
    /// Override an environment constant, e.g. `-D SPEED=20`.
    #[arg(short = 'D', value_parser = parse_constant)]
    constant: Vec<(String, i64)>,
}

fn parse_constant(s: &str) -> Result<(String, i64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value = value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not an integer"))?;
    Ok((name.trim().to_string(), value))
}

impl OverrideArgs {
    fn into_overrides(self) -> Overrides {
        Overrides {
            strategy: self.strategy,
            max_queue: self.max_queue,
            budget: self.budget,
            constants: self.constant,
        }
    }
}

fn load(path: &Path, overrides: OverrideArgs) -> Result<Project, CliError> {
    let mut project = Project::load(path)?;
    overrides.into_overrides().apply(&mut project.config);
    Ok(project)
}

fn write(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Translate {
            project,
            out,
            tables,
            overrides,
        } => {
            let t = translate(&load(&project, overrides)?)?;
            for w in &t.system.warnings {
                eprintln!("warning: {w}");
            }
            write(out.as_deref(), &t.xml)?;
            if let Some(p) = tables {
                let json = serde_json::to_string_pretty(&t.tables).expect("tables serialise");
                write(Some(&p), &json)?;
            }
            Ok(exit::OK)
        }
        Command::Check {
            project,
            sweep: range,
            json,
            quiet,
            overrides,
        } => {
            let project = load(&project, overrides)?;
            let report = match range {
                Some(spec) => sweep(&project, &spec)?,
                None => check(&project)?,
            };
            if let Some(p) = json {
                let text = serde_json::to_string_pretty(&report).expect("reports serialise");
                write(Some(&p), &text)?;
            }
            if !quiet {
                print!("{}", render(&report));
            }
            Ok(exit_code(&report))
        }
        Command::Report { report, out } => {
            let text = config::read(&report)?;
            let r: Report = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", report.display())))?;
            write(out.as_deref(), &render(&r))?;
            Ok(exit_code(&r))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::INPUT as u8)
        }
    }
}
