use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use electroconv::acceptance::{self, EXIT_CRITERION_FAILURE, EXIT_PASS};
use electroconv::checks::{self, SuiteConfig};
use electroconv::config::parse_config;
use electroconv::diagnostics::{column, fit_exponent};
use electroconv::harness::{run_scenario, run_to_dir};
use electroconv::io::read_series;
use electroconv::{Error, Result};

#[derive(Parser)]
#[command(name = "electroconv", version, about = "Electroconvection decay experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the configuration in a JSON file.
    Run {
        config: PathBuf,
        /// Overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Continue from the checkpoint in the output directory.
        #[arg(long)]
        resume: bool,
    },
    /// Produce the outputs of a named scenario.
    Scenario {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a power law to one column of a series CSV.
    Fit {
        csv: PathBuf,
        #[arg(long)]
        column: String,
        /// `t_lo,t_hi`
        #[arg(long, value_parser = parse_window)]
        window: (f64, f64),
    },
    /// Run a property suite: identities, cordoba, weight_commutator,
    /// halfinv_commutator, force_lowmode or all.
    Check {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Evaluate the acceptance criteria over a scenario tree.
    Accept { dir: PathBuf },
}

fn parse_window(text: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = text.split_once(',').ok_or("expected `t_lo,t_hi`")?;
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    code(acceptance::exit_code_for(&err))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse().command) {
        Ok(c) => code(c),
        Err(e) => fail(e),
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Run { config, out, resume } => {
            let text =
                std::fs::read_to_string(&config).map_err(|_| Error::MissingInput(config.display().to_string()))?;
            let cfg = parse_config(&text)?;
            let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
            let result = run_to_dir(&cfg, &dir, resume)?;
            if let Some(reason) = &result.summary.blow_up {
                eprintln!("blow-up: {reason}");
                return Ok(acceptance::EXIT_BLOW_UP);
            }
            println!("{} samples written to {}", result.records.len(), dir.display());
            Ok(EXIT_PASS)
        }
        Command::Scenario { name, out } => {
            run_scenario(&name, &out)?;
            println!("{name} written to {}", out.display());
            Ok(EXIT_PASS)
        }
        Command::Fit {
            csv,
            column: name,
            window,
        } => {
            let records = read_series(&csv)?;
            let series = column(&records, &name).ok_or_else(|| Error::Format {
                what: "column name",
                message: format!("`{name}` is not a series column"),
            })?;
            let fit = fit_exponent(&series, window)?;
            println!("{}", serde_json::to_string_pretty(&fit)?);
            Ok(EXIT_PASS)
        }
        Command::Check { suite, seed, n } => {
            let mut cfg = SuiteConfig {
                seed,
                ..SuiteConfig::default()
            };
            if let Some(n) = n {
                cfg.n = n;
            }
            let reports = match suite.as_str() {
                "identities" => checks::identity_suite(&cfg)?,
                "cordoba" => vec![checks::cordoba_suite(&cfg)?],
                "weight_commutator" => vec![checks::weight_commutator_suite(&cfg)?],
                "halfinv_commutator" => vec![checks::halfinv_commutator_suite(&cfg)?],
                "force_lowmode" => vec![checks::force_lowmode_suite(&cfg)?],
                "all" => checks::full_suite(&cfg)?,
                other => {
                    return Err(Error::Format {
                        what: "suite name",
                        message: format!(
                            "`{other}`; expected identities, cordoba, weight_commutator, halfinv_commutator, force_lowmode or all"
                        ),
                    })
                }
            };
            println!("{}", serde_json::to_string_pretty(&reports)?);
            Ok(if reports.iter().all(|r| r.pass) {
                EXIT_PASS
            } else {
                EXIT_CRITERION_FAILURE
            })
        }
        Command::Accept { dir } => {
            let report = acceptance::accept_dir(&dir)?;
            for line in report.lines() {
                println!("{line}");
            }
            for b in &report.blow_ups {
                println!("BLOW-UP {b}");
            }
            Ok(report.exit_code())
        }
    }
}
