//! `lfhh`: check Twelf signatures, translate them to λProlog and run
//! queries against the translation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lfhh::elab::{elaborate_decl, elaborate_query, elaborate_signature};
use lfhh::engine::{Database, Limits, Solver, DEFAULT_DEPTH};
use lfhh::invert::{invert_solution, Constraint, InvertError};
use lfhh::lf::{Signature, DEFAULT_FUEL};
use lfhh::syntax::parse_signature;
use lfhh::translate::{translate_query, translate_signature, Mode, Program};
use lfhh::typecheck::check_signature;

#[derive(Parser)]
#[command(name = "lfhh", version, about = "Run Twelf signatures as λProlog programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Elaborate and type-check a signature.
    Check { file: PathBuf },
    /// Translate a signature and print the λProlog program.
    Translate {
        file: PathBuf,
        #[command(flatten)]
        translation: Translation,
    },
    /// Solve a query against a signature and print the answers.
    Query {
        file: PathBuf,
        /// An LF type whose uppercase variables are to be instantiated.
        query: String,
        #[command(flatten)]
        translation: Translation,
        /// Bound on nested backchaining steps.
        #[arg(long, default_value_t = DEFAULT_DEPTH as u64, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
        /// Stop after this many solutions.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        solutions: Option<u64>,
        /// Reduction steps allowed when normalizing answer types.
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
    },
}

#[derive(Args)]
struct Translation {
    /// Use the hastype translation instead of per-family predicates.
    #[arg(long)]
    naive: bool,
    /// Also write the program to PATH.sig and PATH.mod.
    #[arg(long, value_name = "PATH")]
    emit_lp: Option<PathBuf>,
}

impl Translation {
    fn mode(&self) -> Mode {
        if self.naive {
            Mode::Naive
        } else {
            Mode::Optimized
        }
    }
}

const NO_SOLUTION: u8 = 1;
const INPUT_ERROR: u8 = 2;
const INTERNAL_ERROR: u8 = 3;

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { file } => check(file),
        Command::Translate { file, translation } => translate(file, translation),
        Command::Query {
            file,
            query,
            translation,
            depth,
            solutions,
            fuel,
        } => {
            let limits = Limits {
                depth: *depth as usize,
                solutions: solutions.map(|n| n as usize),
            };
            run_query(file, query, translation, limits, *fuel)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(file: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(file).map_err(|e| fail(INPUT_ERROR, format!("{}: {e}", file.display())))
}

fn load(file: &Path) -> Result<Signature, Failure> {
    let src = read(file)?;
    elaborate_signature(&src).map_err(|e| fail(INPUT_ERROR, format!("{}: {e}", file.display())))
}

fn check(file: &Path) -> Result<u8, Failure> {
    let src = read(file)?;
    let raws = parse_signature(&src).map_err(|e| fail(1, format!("{}: {e}", file.display())))?;
    let mut sig = Signature::new();
    for raw in &raws {
        let decl = elaborate_decl(raw, &sig).map_err(|e| {
            fail(
                1,
                format!("{}: {}: declaration `{}`: {e}", file.display(), raw.span, raw.name),
            )
        })?;
        println!("{} : {}.", decl.name, decl.classifier);
        sig.push(decl)
            .map_err(|e| fail(1, format!("{}: {}: {e}", file.display(), raw.span)))?;
    }
    check_signature(&sig).map_err(|e| fail(1, e))?;
    println!("{} declarations OK", sig.len());
    Ok(0)
}

fn emit(program: &Program, path: &Path) -> Result<(), Failure> {
    let module = path.file_stem().and_then(|s| s.to_str()).unwrap_or("program");
    let (sig, m) = program.to_lprolog(module);
    for (ext, text) in [("sig", sig), ("mod", m)] {
        let target = path.with_extension(ext);
        std::fs::write(&target, text).map_err(|e| fail(INPUT_ERROR, format!("{}: {e}", target.display())))?;
    }
    Ok(())
}

fn translate(file: &Path, translation: &Translation) -> Result<u8, Failure> {
    let sig = load(file)?;
    let program = translate_signature(&sig, translation.mode()).map_err(|e| fail(INPUT_ERROR, e))?;
    let module = file.file_stem().and_then(|s| s.to_str()).unwrap_or("program");
    let (lp_sig, lp_mod) = program.to_lprolog(module);
    print!("{lp_sig}\n{lp_mod}");
    if let Some(path) = &translation.emit_lp {
        emit(&program, path)?;
    }
    Ok(0)
}

fn run_query(file: &Path, text: &str, translation: &Translation, limits: Limits, fuel: u64) -> Result<u8, Failure> {
    let sig = load(file)?;
    let mode = translation.mode();
    let query = elaborate_query(text.trim().trim_end_matches('.'), &sig).map_err(|e| fail(INPUT_ERROR, e))?;
    let program = translate_signature(&sig, mode).map_err(|e| fail(INPUT_ERROR, e))?;
    if let Some(path) = &translation.emit_lp {
        emit(&program, path)?;
    }
    let goal = translate_query(&sig, &query, mode).map_err(|e| fail(INPUT_ERROR, e))?;
    let clauses: Vec<_> = program.clauses.iter().map(|(_, c)| c.clone()).collect();
    let db = Database::new(&clauses);
    let mut report: Vec<_> = goal.metas.iter().map(|(_, v)| v.clone()).collect();
    report.push(goal.proof.clone());
    let mut solver = Solver::new(&db, goal.goal.clone(), report, limits);
    let mut found = 0;
    for solution in solver.by_ref() {
        found += 1;
        let answer = invert_solution(&sig, &query, &goal, &solution, fuel).map_err(|e| match e {
            InvertError::Lf(e) => fail(INPUT_ERROR, e),
            e => fail(INTERNAL_ERROR, format!("engine answer could not be inverted: {e}")),
        })?;
        let mut out = format!("---------- Solution {found} ----------\n");
        for (name, m) in &answer.bindings {
            let _ = writeln!(out, "{name} = {m}.");
        }
        if let Some(proof) = &answer.proof {
            let _ = writeln!(out, "{} = {proof}.", goal.proof.name);
        }
        for (name, ty) in &answer.fresh {
            let _ = writeln!(out, "{name} : {ty}.");
        }
        for c in &answer.constraints {
            match c {
                Constraint::Lf(a, b) => {
                    let _ = writeln!(out, "{a} == {b}.");
                }
                Constraint::Unreduced(a, b) => {
                    let _ = writeln!(out, "{a} == {b}.  % unreduced");
                }
            }
        }
        print!("{out}");
    }
    if limits.solutions.is_none_or(|n| found < n) {
        println!(
            "{}",
            if found == 0 {
                "no solutions"
            } else {
                "no more solutions"
            }
        );
    }
    if solver.pruned() > 0 {
        eprintln!("note: {} branches cut off at depth {}", solver.pruned(), limits.depth);
    }
    Ok(if found == 0 { NO_SOLUTION } else { 0 })
}
