use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use pursuit_cli::commands::{self, FatMinorArgs, QiArgs, SolveArgs};
use pursuit_cli::config::ExperimentConfig;
use pursuit_cli::play::{report, run_config};
use pursuit_cli::{ConfigError, Outcome};

/// Cops-and-robber experiments: matches, exact solving and certificate checks.
///
/// Exit codes: 0 pass, 2 invariant failure, 3 inconclusive, 4 configuration fault.
#[derive(Parser)]
#[command(name = "pursuit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every cell of an experiment config, or a built-in suite.
    Play {
        /// Experiment config file.
        config: Option<PathBuf>,
        /// Run a built-in suite instead of a config.
        #[arg(long, conflicts_with = "config")]
        suite: Option<String>,
        /// Maximum number of cells run at once.
        #[arg(long, default_value_t = 4)]
        workers: usize,
        /// Write the report here as well as to stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Directory for one trace file per cell.
        #[arg(long)]
        traces: Option<PathBuf>,
    },
    /// Solve a finite game exactly.
    Solve {
        /// Graph spec, e.g. "path n=20".
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 1)]
        cops: usize,
        #[arg(long, default_value_t = 1)]
        cop_speed: usize,
        #[arg(long, default_value_t = 1)]
        robber_speed: usize,
        #[arg(long, default_value_t = 0)]
        reach: usize,
        /// ball(center=C,radius=R), divergence(center=C) or finite(v,..).
        #[arg(long)]
        objective: String,
        #[arg(long, default_value = "weak")]
        order: String,
        #[arg(long, default_value_t = pursuit::solver::DEFAULT_BUDGET)]
        budget: usize,
        /// Write the winner of every state here.
        #[arg(long)]
        table: Option<String>,
        /// Write the winning move of every state here.
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Check a geometric or structural certificate.
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
    /// Run a built-in acceptance suite by name or number, or `all`.
    Suite {
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        /// List the suite names.
        #[arg(long)]
        list: bool,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Re-check every move of a recorded trace against the rules.
    Replay {
        trace: String,
        /// Graph spec; defaults to the `# graph` line of the trace.
        #[arg(long)]
        graph: Option<String>,
    },
}

#[derive(Subcommand)]
enum VerifyKind {
    /// Fatness conditions of a minor model.
    Fatminor(FatMinorCli),
    /// Distortion bounds of a vertex map, optionally with a simulated strategy transfer.
    Qi(QiCli),
    /// Slim-triangle hyperbolicity constant.
    Hyperbolicity {
        #[arg(long)]
        graph: String,
        /// Geodesics enumerated per vertex pair before falling back to a bracket.
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[arg(long)]
        expect: Option<usize>,
    },
    /// Validate a tree decomposition, or compute an optimal one.
    Treedecomp {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        decomp: Option<String>,
        /// Write the computed decomposition here.
        #[arg(long)]
        write: Option<String>,
    },
    /// Search for a haven of the given order and check it against the treewidth.
    Haven {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        order: usize,
    },
}

#[derive(Args)]
struct FatMinorCli {
    /// Model file.
    #[arg(long)]
    model: Option<String>,
    /// Build a model in a grid window: k1..k4 or grid<n>.
    #[arg(long, conflicts_with = "model")]
    pattern: Option<String>,
    #[arg(long)]
    fatness: Option<usize>,
    #[arg(long, default_value_t = 2)]
    margin: usize,
    /// Check against this fatness instead of the model's.
    #[arg(long)]
    claim: Option<usize>,
    /// Save the model.
    #[arg(long)]
    write: Option<String>,
}

#[derive(Args)]
struct QiCli {
    /// path-row or subdivision.
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long, conflicts_with = "builtin")]
    source: Option<String>,
    #[arg(long, conflicts_with = "builtin")]
    target: Option<String>,
    /// Map file: a `c <C>` header and one `source target` pair per line.
    #[arg(long, conflicts_with = "builtin")]
    map: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Stages of simulated cop play to transfer; 0 skips the simulation.
    #[arg(long, default_value_t = 0)]
    simulate: usize,
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn play(config: &PathBuf, workers: usize, report_to: &Option<PathBuf>, traces: &Option<PathBuf>) -> Result<Outcome> {
    let text = std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg = match ExperimentConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {}", config.display(), e);
            return Ok(Outcome::ConfigFault);
        }
    };
    let results = run_config(&cfg, workers, traces.is_some());
    if let Some(dir) = traces {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for r in &results {
            if let Some((spec, trace)) = &r.trace {
                let path = dir.join(format!("cell-{}.trace", r.index));
                std::fs::write(&path, format!("# graph {}\n{}", spec, trace)).with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    let text = report(&results);
    print!("{}", text);
    write_out(report_to, &text)?;
    Ok(results.iter().fold(Outcome::Pass, |acc, r| acc.worst(r.outcome)))
}

fn finish(result: Result<(String, Outcome), ConfigError>, report_to: &Option<PathBuf>) -> Result<Outcome> {
    match result {
        Ok((text, outcome)) => {
            print!("{}", text);
            write_out(report_to, &text)?;
            Ok(outcome)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            Ok(Outcome::ConfigFault)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Play { config, suite, workers, report, traces } => match (config, suite) {
            (_, Some(name)) => finish(commands::suite(&name), &report),
            (Some(cfg), None) => play(&cfg, workers, &report, &traces),
            (None, None) => {
                eprintln!("error: give a config file or --suite NAME");
                Ok(Outcome::ConfigFault)
            }
        },
        Command::Solve { graph, cops, cop_speed, robber_speed, reach, objective, order, budget, table, strategy } => {
            let args = SolveArgs { graph, cops, cop_speed, robber_speed, reach, objective, order, budget, table, strategy };
            finish(commands::solve(&args), &None)
        }
        Command::Verify { kind } => {
            let result = match kind {
                VerifyKind::Fatminor(a) => commands::verify_fatminor(&FatMinorArgs {
                    model: a.model,
                    pattern: a.pattern,
                    fatness: a.fatness,
                    margin: a.margin,
                    claim: a.claim,
                    write: a.write,
                }),
                VerifyKind::Qi(a) => commands::verify_qi(&QiArgs {
                    builtin: a.builtin,
                    source: a.source,
                    target: a.target,
                    map: a.map,
                    pairs: a.pairs,
                    seed: a.seed,
                    simulate: a.simulate,
                }),
                VerifyKind::Hyperbolicity { graph, budget, expect } => commands::verify_hyperbolicity(&graph, budget, expect),
                VerifyKind::Treedecomp { graph, decomp, write } => commands::verify_treedecomp(&graph, decomp.as_deref(), write.as_deref()),
                VerifyKind::Haven { graph, order } => commands::verify_haven(&graph, order),
            };
            finish(result, &None)
        }
        Command::Suite { name, list, report } => {
            if list {
                for (i, s) in pursuit::suite::SUITES.iter().enumerate() {
                    println!("{} {}", i + 1, s);
                }
                return Ok(Outcome::Pass);
            }
            finish(commands::suite(name.as_deref().unwrap_or("all")), &report)
        }
        Command::Replay { trace, graph } => finish(commands::replay_trace(&trace, graph.as_deref()), &None),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(o) => ExitCode::from(o.code() as u8),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(Outcome::ConfigFault.code() as u8)
        }
    }
}
