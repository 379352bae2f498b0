use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lio::chair::script::{parse_script, run_script};
use lio::harness::{campaign, CampaignConfig, GenConfig, VACUITY_THRESHOLD};
use lio::lang::{eval, low_project, parse_program, RunConfig, Value};
use lio::{Label, LatticeKind, Mutation};

#[derive(Parser)]
#[command(name = "lio", version, about = "Dynamic information-flow control runtime and tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a .lio program.
    Run {
        file: PathBuf,
        #[arg(long)]
        lattice: LatticeKind,
        #[arg(long = "init-label")]
        init_label: Option<Label>,
        #[arg(long)]
        clearance: Option<Label>,
        /// NAME=LABEL:VALUE, where VALUE is an integer, true, false or text.
        #[arg(long = "secret", value_parser = parse_secret)]
        secrets: Vec<(String, Label, Value)>,
        /// Print only what an observer at this label sees.
        #[arg(long)]
        observe: Option<Label>,
        /// Write the trace and outcome as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value = "none")]
        mutation: Mutation,
    },
    /// Run a paired-execution noninterference campaign on generated programs.
    NiCheck {
        #[arg(long, default_value_t = 1000)]
        pairs: u64,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "two-point")]
        lattice: LatticeKind,
        /// Defaults to L, or <{A}|{}> on the principal lattice.
        #[arg(long)]
        observe: Option<Label>,
        #[arg(long, default_value = "none")]
        mutation: Mutation,
        /// Write the summary as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run a reviewing scenario script and print its transcript.
    ChairDemo {
        script: PathBuf,
        /// Compare the transcript against this file.
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Write the transcript to the --golden file instead of comparing.
        #[arg(long, requires = "golden")]
        bless: bool,
    },
}

/// Failures printed by `ni-check`; the JSON summary lists all of them.
const MAX_LISTED: usize = 20;

fn parse_secret(s: &str) -> Result<(String, Label, Value), String> {
    let (name, rest) = s.split_once('=').ok_or("expected NAME=LABEL:VALUE")?;
    let (label, value) = rest.split_once(':').ok_or("expected NAME=LABEL:VALUE")?;
    let label: Label = label.parse().map_err(|e| format!("{e}"))?;
    let value = match value {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        v => v.parse::<i64>().map(Value::Int).unwrap_or_else(|_| Value::str(v)),
    };
    Ok((name.to_string(), label, value))
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("lio: {msg}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match cli.command {
        Command::Run { file, lattice, init_label, clearance, secrets, observe, trace, mutation } => {
            let source = match fs::read_to_string(&file) {
                Ok(s) => s,
                Err(e) => return fail(format!("{}: {e}", file.display())),
            };
            let program = match parse_program(&source) {
                Ok(p) => p,
                Err(e) => return fail(format!("{}: {e}", file.display())),
            };
            let mut config = RunConfig::new(lattice);
            config.mutation = mutation;
            if let Some(l) = init_label {
                config.initial_label = l;
            }
            if let Some(c) = clearance {
                config.clearance = c;
            }
            for (name, label, value) in secrets {
                config = config.secret(&name, label, value);
            }
            let report = match eval(&program, &config) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            if let Some(path) = trace {
                if let Err(e) = fs::write(&path, report.to_json() + "\n") {
                    return fail(format!("{}: {e}", path.display()));
                }
            }
            match observe {
                Some(o) => match low_project(&report, &o) {
                    Ok(obs) => print!("observer {o}\n{obs}"),
                    Err(e) => return fail(e),
                },
                None => {
                    println!("result: {}", report.outcome);
                    println!("label: {}", report.final_label);
                    println!("clearance: {}", report.final_clearance);
                }
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Command::NiCheck { pairs, depth, seed, lattice, observe, mutation, json } => {
            let observe = observe.unwrap_or_else(|| match lattice {
                LatticeKind::TwoPoint => Label::LOW,
                LatticeKind::Principal => "<{A}|{}>".parse().expect("built-in label"),
            });
            let cfg = CampaignConfig::new(GenConfig::new(lattice, seed, depth), pairs, observe).with_mutation(mutation);
            let summary = match campaign(&cfg) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            if let Some(path) = json {
                if let Err(e) = fs::write(&path, summary.to_json() + "\n") {
                    return fail(format!("{}: {e}", path.display()));
                }
            }
            if summary.is_vacuous() {
                eprintln!("warning: fewer than {:.0}% of pairs were observable", 100.0 * VACUITY_THRESHOLD);
            }
            let mut out = std::io::stdout().lock();
            let _ = writeln!(
                out,
                "pairs {} pass {} fail {} both_timeout {} skipped {} ({:.2}%) informative {:.1}%",
                summary.pairs,
                summary.pass,
                summary.fail,
                summary.both_timeout,
                summary.skipped,
                100.0 * summary.skipped_rate(),
                100.0 * summary.informative_rate(),
            );
            for f in summary.failures.iter().take(MAX_LISTED) {
                let _ = writeln!(out, "FAIL seed {} secrets {} / {}: {}", f.seed, f.v1, f.v2, f.source);
            }
            if summary.failures.len() > MAX_LISTED {
                let _ = writeln!(out, "... {} more failures", summary.failures.len() - MAX_LISTED);
            }
            ExitCode::from(u8::from(summary.fail > 0))
        }
        Command::ChairDemo { script, golden, bless } => {
            let ops = match fs::read_to_string(&script).map_err(|e| e.to_string()).and_then(|s| {
                parse_script(&s).map_err(|e| e.to_string())
            }) {
                Ok(ops) => ops,
                Err(e) => return fail(format!("{}: {e}", script.display())),
            };
            let transcript = run_script(&ops);
            print!("{transcript}");
            match golden {
                Some(path) if bless => {
                    if let Err(e) = fs::write(&path, &transcript) {
                        return fail(format!("{}: {e}", path.display()));
                    }
                    ExitCode::SUCCESS
                }
                Some(path) => {
                    let expected = match fs::read_to_string(&path) {
                        Ok(s) => s,
                        Err(e) => return fail(format!("{}: {e}", path.display())),
                    };
                    if expected == transcript {
                        ExitCode::SUCCESS
                    } else {
                        let line = expected.lines().zip(transcript.lines()).position(|(a, b)| a != b);
                        let line = line.unwrap_or(expected.lines().count().min(transcript.lines().count())) + 1;
                        fail(format!("transcript differs from {} at line {line}", path.display()))
                    }
                }
                None => ExitCode::SUCCESS,
            }
        }
    }
}
