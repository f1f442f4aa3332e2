//! `slpurify`: purify entailments, infer frames, emit soundness conditions
//! and validate strategy libraries.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use purify_core::engine::{run_batch, Exec, ReductionTrace, Verdict, DEFAULT_MAX_STEPS};
use purify_core::frontend::{parse_entailments, parse_signature, validate_strategies, Program};
use purify_core::logic::{Entailment, Signature};
use purify_core::soundness::format_conditions;

#[derive(Parser)]
#[command(
    name = "slpurify",
    version,
    about = "Strategy-driven purification of separation-logic entailments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rewrite each entailment until it has no spatial conjuncts.
    Purify(RunArgs),
    /// Discharge the consequent's spatial conjuncts and report what is left of the antecedent.
    Frame(RunArgs),
    /// Print the soundness condition of every strategy.
    Soundness(LibArgs),
    /// Check signature, strategies and (optionally) entailments.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct LibArgs {
    /// Signature file (.sig).
    #[arg(long)]
    sig: PathBuf,
    /// Strategy files (.stg), concatenated in the given order.
    #[arg(long = "strategies", required = true)]
    strategies: Vec<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    lib: LibArgs,
    /// Entailment file (.sle).
    #[arg(long)]
    input: PathBuf,
    /// Write the reduction traces as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long = "strategies")]
    strategies: Vec<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
}

/// Diagnostics already carry their file positions.
struct Failure(Vec<String>);

impl Failure {
    fn one(msg: String) -> Self {
        Failure(vec![msg])
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::one(format!("{}: {e}", path.display())))
}

fn load_sig(path: &Path) -> Result<Signature, Failure> {
    parse_signature(&read(path)?).map_err(|e| Failure::one(format!("{}:{e}", path.display())))
}

/// Every diagnostic from every file, or the concatenated program.
fn load_program(sig: &Signature, paths: &[PathBuf]) -> Result<Program, Failure> {
    let mut program = Program::default();
    let mut errors = Vec::new();
    for path in paths {
        let (p, errs) = validate_strategies(&read(path)?, sig);
        errors.extend(errs.iter().map(|e| format!("{}:{e}", path.display())));
        program = program
            .concat(p)
            .map_err(|name| Failure::one(format!("{}: strategy `{name}` is already defined", path.display())))?;
    }
    if errors.is_empty() {
        Ok(program)
    } else {
        Err(Failure(errors))
    }
}

fn load_input(sig: &Signature, path: &Path) -> Result<Vec<Entailment>, Failure> {
    parse_entailments(&read(path)?, sig).map_err(|e| Failure::one(format!("{}:{e}", path.display())))
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::one(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Purify,
    Frame,
}

fn cmd_run(args: &RunArgs, mode: Mode) -> Result<bool, Failure> {
    let sig = load_sig(&args.lib.sig)?;
    let program = load_program(&sig, &args.lib.strategies)?;
    let ents = load_input(&sig, &args.input)?;
    let traces = run_batch(&program, &ents, args.max_steps as usize, Exec::Parallel);

    let mut out = String::new();
    let mut ok = 0;
    for (i, t) in traces.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let fine = match mode {
            Mode::Purify => t.verdict == Verdict::Purified,
            Mode::Frame => matches!(t.verdict, Verdict::Purified | Verdict::FrameInferred),
        };
        ok += usize::from(fine);
        let _ = writeln!(out, "// {}: {} after {} steps", i + 1, t.verdict.name(), t.steps.len());
        match mode {
            Mode::Purify => {
                let _ = writeln!(out, "{}", t.final_entailment());
            }
            Mode::Frame if fine => {
                let _ = writeln!(out, "{}", t.final_entailment().lhs);
            }
            Mode::Frame => {
                let _ = writeln!(out, "// no frame; residual: {}", t.final_entailment());
            }
        }
    }
    emit(&args.lib.output, &out)?;
    if let Some(path) = &args.trace {
        fs::write(path, ReductionTrace::to_json_all(&traces) + "\n")
            .map_err(|e| Failure::one(format!("{}: {e}", path.display())))?;
    }
    let word = if mode == Mode::Purify { "purified" } else { "framed" };
    eprintln!("{word} {ok}/{}", traces.len());
    Ok(ok == traces.len())
}

fn cmd_soundness(args: &LibArgs) -> Result<bool, Failure> {
    let sig = load_sig(&args.sig)?;
    let program = load_program(&sig, &args.strategies)?;
    emit(&args.output, &format_conditions(&program))?;
    Ok(true)
}

fn cmd_validate(args: &ValidateArgs) -> Result<bool, Failure> {
    let sig = load_sig(&args.sig)?;
    let mut errors = Vec::new();
    let program = match load_program(&sig, &args.strategies) {
        Ok(p) => p,
        Err(Failure(errs)) => {
            errors.extend(errs);
            Program::default()
        }
    };
    let mut count = 0;
    if let Some(input) = &args.input {
        match load_input(&sig, input) {
            Ok(ents) => count = ents.len(),
            Err(Failure(errs)) => errors.extend(errs),
        }
    }
    if !errors.is_empty() {
        return Err(Failure(errors));
    }
    eprintln!(
        "ok: {} symbols, {} strategies, {count} entailments",
        sig.len(),
        program.len()
    );
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Purify(args) => cmd_run(args, Mode::Purify),
        Command::Frame(args) => cmd_run(args, Mode::Frame),
        Command::Soundness(args) => cmd_soundness(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msgs)) => {
            for m in msgs {
                eprintln!("{m}");
            }
            ExitCode::from(2)
        }
    }
}
