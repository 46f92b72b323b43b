use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;

use padp_core::adp::canonical_problem;
use padp_core::complexity::Complexity;
use padp_core::oracle::{edh_oracle, simulate, SamplePolicy};
use padp_core::parse::{parse_ptrs, parse_term};
use padp_core::processors::smt::SmtConfig;
use padp_core::proof::to_json;
use padp_core::ptrs::Ptrs;
use padp_core::strategy::{solve, StrategyConfig};
use padp_core::term::Term;

#[derive(Parser)]
#[command(name = "padp", version, about = "Expected runtime bounds for probabilistic term rewrite systems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, ValueEnum)]
enum Goal {
    Complexity,
    Sast,
}

#[derive(Copy, Clone, ValueEnum)]
enum Policy {
    Leftmost,
    Random,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for a bound on the expected innermost runtime complexity.
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "complexity")]
        goal: Goal,
        /// Seconds.
        #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u64).range(1..))]
        timeout: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(i64).range(1..))]
        max_coeff: i64,
        /// ROI applications per lineage; 0 disables ROI.
        #[arg(long, default_value_t = 3)]
        roi_budget: usize,
        /// External SMT solver command, e.g. "z3 -in".
        #[arg(long)]
        smt: Option<String>,
        /// Seconds per solver call.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        smt_timeout: u64,
        /// Write the proof tree as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Exact truncated expected derivation height of a basic term.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        term: String,
        #[arg(long)]
        depth: usize,
    },
    /// Monte-Carlo estimate of the expected number of innermost steps.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        term: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "leftmost")]
        policy: Policy,
    },
}

const EXIT_BOUND: u8 = 0;
const EXIT_MAYBE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

struct Fail(u8, String);

fn load(path: &Path) -> Result<Ptrs, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| Fail(EXIT_INPUT, format!("{}: {}", path.display(), e)))?;
    parse_ptrs(&text).map_err(|e| Fail(EXIT_INPUT, format!("{}: {}", path.display(), e)))
}

fn start_term(ptrs: &Ptrs, text: &str) -> Result<Term, Fail> {
    let t = parse_term(text, &ptrs.vars, ptrs.symbols(), false).map_err(|e| Fail(EXIT_INPUT, format!("term: {}", e)))?;
    if !ptrs.is_basic(&t) {
        return Err(Fail(EXIT_INPUT, format!("term {} is not basic", t)));
    }
    Ok(t)
}

fn run(cli: Cli, out: &mut String) -> Result<u8, Fail> {
    match cli.cmd {
        Cmd::Analyze { file, goal: _, timeout, max_coeff, roi_budget, smt, smt_timeout, json } => {
            let ptrs = load(&file)?;
            let cfg = StrategyConfig {
                timeout: Duration::from_secs(timeout),
                max_coeff,
                roi_budget,
                smt: smt.map(|command| SmtConfig { command, timeout: Duration::from_secs(smt_timeout) }),
                ..StrategyConfig::default()
            };
            // Both goals run the same search: SAST holds exactly when a finite bound is proved.
            let solved = solve(&canonical_problem(&ptrs), &cfg);
            let tree = solved.tree;
            let bound = tree.bound();
            let proved = tree.is_solved() && bound <= Complexity::Fin;
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&to_json(&tree)).map_err(|e| Fail(EXIT_INTERNAL, e.to_string()))?;
                std::fs::write(&path, text + "\n").map_err(|e| Fail(EXIT_INTERNAL, format!("{}: {}", path.display(), e)))?;
            }
            let _ = writeln!(out, "BOUND: {}", if proved { bound.to_string() } else { "MAYBE".into() });
            let _ = writeln!(out, "SAST: {}", if proved { "YES" } else { "MAYBE" });
            let _ = writeln!(out);
            out.push_str(&tree.render());
            Ok(match (proved, solved.timed_out) {
                (true, _) => EXIT_BOUND,
                (false, true) => EXIT_INTERNAL,
                (false, false) => EXIT_MAYBE,
            })
        }
        Cmd::Oracle { file, term, depth } => {
            let ptrs = load(&file)?;
            let t = start_term(&ptrs, &term)?;
            let v = edh_oracle(&t, &ptrs, depth).map_err(|e| Fail(EXIT_INTERNAL, e.to_string()))?;
            let _ = writeln!(out, "{}", v);
            let _ = writeln!(out, "{:.6}", v.to_f64().unwrap_or(f64::NAN));
            Ok(EXIT_BOUND)
        }
        Cmd::Simulate { file, term, samples, max_steps, seed, policy } => {
            let ptrs = load(&file)?;
            let t = start_term(&ptrs, &term)?;
            let policy = match policy {
                Policy::Leftmost => SamplePolicy::LeftmostInnermost,
                Policy::Random => SamplePolicy::RandomRedex,
            };
            let s = simulate(&t, &ptrs, policy, samples as usize, max_steps, seed);
            let _ = writeln!(out, "samples: {}", s.samples);
            let _ = writeln!(out, "mean: {:.6}", s.mean);
            let _ = writeln!(out, "stddev: {:.6}", s.stddev);
            let _ = writeln!(out, "terminated: {:.6}", s.terminated);
            let _ = writeln!(out, "truncated: {:.6}", 1.0 - s.terminated);
            Ok(EXIT_BOUND)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_BOUND });
        }
    };
    let mut out = String::new();
    let res = run(cli, &mut out);
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().write_all(out.as_bytes());
    match res {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(code)
        }
    }
}
