//! `pua`: synthesis and planning under environment assumptions.
//!
//! Exit codes: 0 realizable / valid / accepted, 1 unrealizable / rejected,
//! 2 invalid assumption, 3 parse or validation error, 4 unsupported.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pua_core::corpus::{nnf_formulas, random_domain, random_explicit_domain};
use pua_core::domain::Domain;
use pua_core::engine::{
    check_assumption, plan, synthesize, verify_strategy, Diagnostics, EngineError, Kind, Problem,
    Semantics, Status, Verification, WitnessEnd,
};
use pua_core::games::AgentStrategy;
use pua_core::logic::{parse_formula, Action, VarTable};
use pua_core::ltlf::compile;

const REALIZABLE: u8 = 0;
const UNREALIZABLE: u8 = 1;
const INVALID_ASSUMPTION: u8 = 2;
const BAD_INPUT: u8 = 3;
const UNSUPPORTED: u8 = 4;

#[derive(Parser)]
#[command(name = "pua", version, about = "Synthesis and planning under environment assumptions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the assumption is environment realizable.
    CheckAssumption { problem: PathBuf },
    /// Solve a synthesis problem (no domain).
    Synthesize(SolveArgs),
    /// Solve a planning problem (with a domain).
    Plan(SolveArgs),
    /// Check a strategy against every environment realizing the assumption.
    Verify { problem: PathBuf, strategy: PathBuf },
    /// Derive an artifact from a domain file.
    CompileDomain {
        domain: PathBuf,
        #[arg(long, value_enum)]
        to: DomainTarget,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile an LTLf formula to a minimal DFA.
    CompileFormula {
        formula: String,
        /// Comma-separated variable names.
        #[arg(long, value_delimiter = ',')]
        env: Vec<String>,
        /// Comma-separated variable names.
        #[arg(long, value_delimiter = ',')]
        agent: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate test inputs from a seed.
    Corpus {
        #[arg(value_enum)]
        kind: CorpusKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        env: usize,
        #[arg(long, default_value_t = 1)]
        agent: usize,
        /// Formula depth for `domain` and `formulas`.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Bound on successors per state-action pair for `explicit-domain`.
        #[arg(long, default_value_t = 2)]
        effects: usize,
    },
}

#[derive(clap::Args)]
struct SolveArgs {
    problem: PathBuf,
    /// Write the strategy here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dump the intermediate automata into this directory.
    #[arg(long)]
    emit_automata: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainTarget {
    Ltlf,
    Dfa,
    Dpw,
    Fairness,
    Exec,
}

#[derive(Clone, Copy, ValueEnum)]
enum CorpusKind {
    /// A domain built from random formulas.
    Domain,
    /// A domain built from random explicit relations.
    ExplicitDomain,
    /// Every NNF formula up to `--depth`, one per line.
    Formulas,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Failure {
        Failure {
            code: BAD_INPUT,
            msg: msg.into(),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Failure {
        let code = match e {
            EngineError::InvalidAssumption => INVALID_ASSUMPTION,
            ref e if e.is_unsupported() => UNSUPPORTED,
            _ => BAD_INPUT,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_problem(path: &Path) -> Result<Problem, Failure> {
    let text = read(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut load = |rel: &str| fs::read_to_string(base.join(rel)).map_err(|e| e.to_string());
    Problem::parse(&text, &mut load).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_domain(path: &Path) -> Result<Domain, Failure> {
    Domain::parse(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn summary(d: &Diagnostics) -> String {
    let mut s = String::new();
    if let Some(n) = d.domain_states {
        let _ = writeln!(s, "domain_states: {n}");
    }
    let _ = writeln!(s, "assumption_states: {}", d.assumption_states);
    let _ = writeln!(s, "goal_states: {}", d.goal_states);
    let _ = writeln!(s, "game_states: {}", d.game_states);
    let _ = writeln!(s, "iterations: {}", d.iterations);
    s
}

fn check_cmd(problem: &Path) -> Result<u8, Failure> {
    let p = load_problem(problem)?;
    let c = check_assumption(&p)?;
    println!("{}", if c.valid { "VALID" } else { "INVALID" });
    print!("{}", summary(&c.diagnostics));
    Ok(if c.valid { REALIZABLE } else { INVALID_ASSUMPTION })
}

fn emit_automata(p: &Problem, dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<(&str, String)> = Vec::new();
    match p.semantics {
        Semantics::Finite => {
            let a = p.finite_automata()?;
            if let Some(d) = &a.domain {
                files.push(("domain.dfa", d.to_text()));
            }
            files.push(("assumption.dfa", a.assumption.to_text()));
            files.push(("goal.dfa", a.goal.to_text()));
            files.push(("env_side.dfa", a.env_side.to_text()));
            files.push(("game.dfa", a.game.to_text()));
        }
        Semantics::Infinite => {
            let a = p.infinite_automata()?;
            if let Some(d) = &a.domain {
                files.push(("domain.dpw", d.to_text()));
            }
            files.push(("assumption.dpw", a.assumption.to_text()));
            files.push(("goal.dpw", a.goal.to_text()));
            files.push(("env_side.dpw", a.env_side.to_text()));
            files.push(("game.dpw", a.game.to_text()));
        }
    }
    for (name, text) in files {
        write(&dir.join(name), &text)?;
    }
    Ok(())
}

fn solve_cmd(args: &SolveArgs, kind: Kind) -> Result<u8, Failure> {
    let p = load_problem(&args.problem)?;
    if p.kind() != kind {
        return Err(Failure::input(match kind {
            Kind::Synthesis => "problem has a domain; use `pua plan`",
            Kind::Planning => "problem has no domain; use `pua synthesize`",
        }));
    }
    if let Some(dir) = &args.emit_automata {
        if !p.fair {
            emit_automata(&p, dir)?;
        }
    }
    let v = match kind {
        Kind::Synthesis => synthesize(&p)?,
        Kind::Planning => plan(&p)?,
    };
    let (status, code) = match &v.status {
        Status::Realizable(_) => ("realizable", REALIZABLE),
        Status::Unrealizable => ("unrealizable", UNREALIZABLE),
        Status::InvalidAssumption => ("invalid-assumption", INVALID_ASSUMPTION),
        Status::Unsupported(_) => ("unsupported", UNSUPPORTED),
    };
    println!("status: {status}");
    if let Status::Unsupported(reason) = &v.status {
        println!("reason: {reason}");
        return Ok(code);
    }
    print!("{}", summary(&v.diagnostics));
    if let Some(s) = v.strategy() {
        println!("strategy_memory: {}", s.memory());
        match &args.out {
            Some(path) => write(path, &s.to_text())?,
            None => print!("\n{}", s.to_text()),
        }
    }
    Ok(code)
}

fn verify_cmd(problem: &Path, strategy: &Path) -> Result<u8, Failure> {
    let p = load_problem(problem)?;
    let s = AgentStrategy::from_text(&read(strategy)?)
        .map_err(|e| Failure::input(format!("{}: {e}", strategy.display())))?;
    match verify_strategy(&p, &s)? {
        Verification::Accept => {
            println!("ACCEPT");
            Ok(REALIZABLE)
        }
        Verification::Reject(w) => {
            println!("REJECT");
            let v = &p.vars;
            let trace: Vec<String> = w.trace.iter().map(|&sym| v.symbol_set(sym)).collect();
            if trace.is_empty() {
                println!("witness: (empty)");
            } else {
                println!("witness: {}", trace.join(" "));
            }
            match w.end {
                WitnessEnd::Halt { offered } => {
                    let env = v.symbol_set(v.join(offered, Action(0)));
                    println!("witness_end: halt when offered {env}");
                }
                WitnessEnd::Cycle { loop_start } => {
                    println!("witness_end: loop from position {loop_start}");
                }
            }
            Ok(UNREALIZABLE)
        }
    }
}

fn compile_domain_cmd(path: &Path, to: DomainTarget, out: Option<&Path>) -> Result<u8, Failure> {
    let d = load_domain(path)?;
    let invalid = |e: pua_core::domain::DomainError| Failure::input(format!("{}: {e}", path.display()));
    let text = match to {
        DomainTarget::Ltlf => format!("{}\n", d.omega_ltlf().map_err(invalid)?.display(d.vars())),
        DomainTarget::Dfa => d.omega_dfa().map_err(invalid)?.minimize().to_text(),
        DomainTarget::Dpw => d.omega_dpw().map_err(invalid)?.to_text(),
        DomainTarget::Fairness => format!("{}\n", d.fairness_formula().map_err(invalid)?.display(d.vars())),
        DomainTarget::Exec => {
            d.validate().map_err(invalid)?;
            format!("{}\n", d.exec_formula().display(d.vars()))
        }
    };
    emit(out, &text)?;
    Ok(REALIZABLE)
}

fn compile_formula_cmd(
    formula: &str,
    env: &[String],
    agent: &[String],
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let vars = Arc::new(VarTable::new(env, agent).map_err(|e| Failure::input(e.to_string()))?);
    let f = parse_formula(formula, &vars).map_err(|e| Failure::input(e.to_string()))?;
    let m = compile(&f, &vars).map_err(EngineError::from)?;
    emit(out, &m.to_text())?;
    Ok(REALIZABLE)
}

fn corpus_cmd(kind: CorpusKind, seed: u64, ne: usize, na: usize, depth: usize, effects: usize) -> Result<u8, Failure> {
    let env: Vec<String> = (0..ne).map(|i| format!("e{i}")).collect();
    let agent: Vec<String> = (0..na).map(|i| format!("a{i}")).collect();
    let vars = Arc::new(VarTable::new(env, agent).map_err(|e| Failure::input(e.to_string()))?);
    if ne == 0 {
        return Err(Failure::input("a domain needs at least one environment variable"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        CorpusKind::Domain => print!("{}", random_domain(&mut rng, &vars, depth).to_text()),
        CorpusKind::ExplicitDomain => {
            print!("{}", random_explicit_domain(&mut rng, &vars, effects.max(1)).to_text())
        }
        CorpusKind::Formulas => {
            for f in nnf_formulas(&vars, depth) {
                println!("{}", f.display(&vars));
            }
        }
    }
    Ok(REALIZABLE)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::CheckAssumption { problem } => check_cmd(&problem),
        Command::Synthesize(args) => solve_cmd(&args, Kind::Synthesis),
        Command::Plan(args) => solve_cmd(&args, Kind::Planning),
        Command::Verify { problem, strategy } => verify_cmd(&problem, &strategy),
        Command::CompileDomain { domain, to, out } => compile_domain_cmd(&domain, to, out.as_deref()),
        Command::CompileFormula {
            formula,
            env,
            agent,
            out,
        } => compile_formula_cmd(&formula, &env, &agent, out.as_deref()),
        Command::Corpus {
            kind,
            seed,
            env,
            agent,
            depth,
            effects,
        } => corpus_cmd(kind, seed, env, agent, depth, effects),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
