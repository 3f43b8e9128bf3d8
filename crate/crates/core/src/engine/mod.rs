//! Synthesis and planning under environment assumptions.
//!
//! A problem pairs an assumption `ω` with a goal `γ`, optionally over a
//! planning domain `D`. The assumption must be environment realizable
//! (together with `ω_D` when a domain is present) before anything is
//! solved. Solving reduces to the agent game on `(ω_D ∧ ω) → γ`.

mod problem_file;
mod verify;

use std::sync::Arc;

use thiserror::Error;

use crate::dfa::{Connective, Dfa, DfaError};
use crate::domain::{Domain, DomainError};
use crate::games::{agent_realizable, env_realizable, AgentStrategy, EnvStrategy};
use crate::logic::{Formula, ParseError, VarTable};
use crate::ltlf::{compile, CompileError};
use crate::parity::{dpw_agent_realizable, dpw_env_realizable, Dpw, DpwError};

pub use verify::{verify_against, verify_strategy, Verification, Witness, WitnessEnd};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    Finite,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Synthesis,
    Planning,
}

/// An assumption or goal, either as a formula or as an automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Spec {
    Formula(Formula),
    Dfa(Dfa),
    Dpw(Dpw),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Dfa(#[from] DfaError),
    #[error(transparent)]
    Dpw(#[from] DpwError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("{0} is over a different vocabulary than the problem")]
    VocabularyMismatch(&'static str),
    #[error("{part}: expected a {expected} for {semantics:?} semantics")]
    WrongAutomaton {
        part: &'static str,
        expected: &'static str,
        semantics: Semantics,
    },
    #[error("this operation needs a {0:?} problem")]
    WrongKind(Kind),
    #[error("the assumption is not environment realizable")]
    InvalidAssumption,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {error}")]
    Formula { line: usize, error: ParseError },
    #[error("{path}: {msg}")]
    Load { path: String, msg: String },
}

impl EngineError {
    /// Errors caused by unsupported inputs or exceeded size guards, as
    /// opposed to malformed ones.
    pub fn is_unsupported(&self) -> bool {
        matches!(
            self,
            EngineError::Unsupported(_)
                | EngineError::Compile(CompileError::ClosureTooLarge(_) | CompileError::TooManyStates)
                | EngineError::Dpw(DpwError::TooManyColors(_) | DpwError::TooManyStates)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub semantics: Semantics,
    pub vars: Arc<VarTable>,
    pub domain: Option<Domain>,
    pub assumption: Spec,
    pub goal: Spec,
    /// Request the fairness assumption of the domain on top of `assumption`.
    pub fair: bool,
}

impl Problem {
    pub fn synthesis(vars: Arc<VarTable>, assumption: Spec, goal: Spec) -> Problem {
        Problem {
            semantics: Semantics::Finite,
            vars,
            domain: None,
            assumption,
            goal,
            fair: false,
        }
    }

    pub fn planning(domain: Domain, assumption: Spec, goal: Spec) -> Problem {
        Problem {
            semantics: Semantics::Finite,
            vars: domain.vars().clone(),
            domain: Some(domain),
            assumption,
            goal,
            fair: false,
        }
    }

    pub fn with_semantics(mut self, semantics: Semantics) -> Problem {
        self.semantics = semantics;
        self
    }

    pub fn kind(&self) -> Kind {
        if self.domain.is_some() {
            Kind::Planning
        } else {
            Kind::Synthesis
        }
    }
}

/// Goal shapes for FOND problems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FondGoal {
    /// Reach a state satisfying a propositional formula.
    Reach(Formula),
    /// Satisfy a temporal formula.
    Temporal(Formula),
}

/// `ω = true` and `γ = G pre ∧ F g` (reachability) or `G pre ∧ g`.
///
/// The fair variant cannot be solved here; the error carries the
/// fairness formula for export.
pub fn fond_to_pua(domain: &Domain, goal: FondGoal, fair: bool) -> Result<Problem, EngineError> {
    if fair {
        let f = domain.fairness_formula()?;
        return Err(EngineError::Unsupported(format!(
            "fair planning is not solvable here; fairness assumption: {}",
            f.display(domain.vars())
        )));
    }
    let goal = match goal {
        FondGoal::Reach(g) => {
            if !g.is_propositional() {
                return Err(EngineError::Unsupported(
                    "reachability goals must be propositional".into(),
                ));
            }
            Formula::eventually(g)
        }
        FondGoal::Temporal(g) => g,
    };
    Ok(Problem::planning(
        domain.clone(),
        Spec::Formula(Formula::True),
        Spec::Formula(Formula::and(domain.exec_formula(), goal)),
    ))
}

/// Automaton sizes and solver effort, for reporting.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub domain_states: Option<usize>,
    pub assumption_states: usize,
    pub goal_states: usize,
    pub game_states: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Realizable(AgentStrategy),
    Unrealizable,
    InvalidAssumption,
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub diagnostics: Diagnostics,
}

impl Verdict {
    pub fn is_realizable(&self) -> bool {
        matches!(self.status, Status::Realizable(_))
    }

    pub fn strategy(&self) -> Option<&AgentStrategy> {
        match &self.status {
            Status::Realizable(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssumptionCheck {
    pub valid: bool,
    /// An environment strategy realizing the assumption (finite semantics
    /// transducers read the assumption automaton, infinite ones the DPW).
    pub strategy: Option<EnvStrategy>,
    pub diagnostics: Diagnostics,
}

/// Automata of one problem under finite semantics.
#[derive(Debug, Clone)]
pub struct FiniteAutomata {
    pub domain: Option<Dfa>,
    pub assumption: Dfa,
    pub goal: Dfa,
    /// `M_D ∧ M_ω`, or `M_ω` without a domain.
    pub env_side: Dfa,
    /// `env_side → M_γ`.
    pub game: Dfa,
}

/// Automata of one problem under infinite semantics.
#[derive(Debug, Clone)]
pub struct InfiniteAutomata {
    pub domain: Option<Dpw>,
    pub assumption: Dpw,
    pub goal: Dpw,
    pub env_side: Dpw,
    pub game: Dpw,
}

fn spec_dfa(spec: &Spec, vars: &Arc<VarTable>, part: &'static str) -> Result<Dfa, EngineError> {
    let m = match spec {
        Spec::Formula(f) => compile(f, vars)?,
        Spec::Dfa(m) => m.clone(),
        Spec::Dpw(_) => {
            return Err(EngineError::WrongAutomaton {
                part,
                expected: "DFA",
                semantics: Semantics::Finite,
            })
        }
    };
    if **m.vars() != **vars {
        return Err(EngineError::VocabularyMismatch(part));
    }
    Ok(m)
}

/// Formulas are only accepted when they are constants: there is no LTL to
/// DPW translation.
fn spec_dpw(spec: &Spec, vars: &Arc<VarTable>, part: &'static str) -> Result<Dpw, EngineError> {
    let m = match spec {
        Spec::Formula(Formula::True) => Dpw::universal(vars.clone()),
        Spec::Formula(Formula::False) => Dpw::empty(vars.clone()),
        Spec::Formula(_) => {
            return Err(EngineError::Unsupported(format!(
                "{part}: infinite-trace formulas other than true/false need an automaton file"
            )))
        }
        Spec::Dpw(m) => m.clone(),
        Spec::Dfa(_) => {
            return Err(EngineError::WrongAutomaton {
                part,
                expected: "DPW",
                semantics: Semantics::Infinite,
            })
        }
    };
    if **m.vars() != **vars {
        return Err(EngineError::VocabularyMismatch(part));
    }
    Ok(m)
}

fn fair_unsupported(p: &Problem) -> Result<Option<String>, EngineError> {
    match (&p.domain, p.fair) {
        (Some(d), true) => Ok(Some(format!(
            "fair planning is not solvable here; fairness assumption: {}",
            d.fairness_formula()?.display(&p.vars)
        ))),
        (None, true) => Err(EngineError::WrongKind(Kind::Planning)),
        _ => Ok(None),
    }
}

impl Problem {
    pub fn finite_automata(&self) -> Result<FiniteAutomata, EngineError> {
        let assumption = spec_dfa(&self.assumption, &self.vars, "assumption")?.minimize();
        let goal = spec_dfa(&self.goal, &self.vars, "goal")?.minimize();
        let domain = match &self.domain {
            Some(d) => Some(d.omega_dfa()?.minimize()),
            None => None,
        };
        let env_side = match &domain {
            Some(md) => md.combine(&assumption, Connective::And)?.minimize(),
            None => assumption.clone(),
        };
        let game = env_side.combine(&goal, Connective::Implies)?.minimize();
        Ok(FiniteAutomata {
            domain,
            assumption,
            goal,
            env_side,
            game,
        })
    }

    pub fn infinite_automata(&self) -> Result<InfiniteAutomata, EngineError> {
        let assumption = spec_dpw(&self.assumption, &self.vars, "assumption")?;
        let goal = spec_dpw(&self.goal, &self.vars, "goal")?;
        let (domain, env_side, game) = match &self.domain {
            Some(d) => {
                let md = d.omega_dpw()?;
                let env_side = md.combine(&assumption, Connective::And)?;
                let game = Dpw::combine_all(&[&md, &assumption, &goal], |acc| {
                    !(acc[0] && acc[1]) || acc[2]
                })?;
                (Some(md), env_side, game)
            }
            None => {
                let game = assumption.combine(&goal, Connective::Implies)?;
                (None, assumption.clone(), game)
            }
        };
        Ok(InfiniteAutomata {
            domain,
            assumption,
            goal,
            env_side,
            game,
        })
    }
}

/// Whether `ω` (with `ω_D` for planning problems) is environment realizable.
pub fn check_assumption(p: &Problem) -> Result<AssumptionCheck, EngineError> {
    match p.semantics {
        Semantics::Finite => {
            let a = p.finite_automata()?;
            let sol = env_realizable(&a.env_side);
            Ok(AssumptionCheck {
                valid: sol.realizable,
                strategy: sol.strategy,
                diagnostics: Diagnostics {
                    domain_states: a.domain.as_ref().map(Dfa::num_states),
                    assumption_states: a.assumption.num_states(),
                    goal_states: a.goal.num_states(),
                    game_states: a.env_side.num_states(),
                    iterations: sol.iterations,
                },
            })
        }
        Semantics::Infinite => {
            let a = p.infinite_automata()?;
            let sol = dpw_env_realizable(&a.env_side);
            Ok(AssumptionCheck {
                valid: sol.realizable,
                strategy: sol.strategy,
                diagnostics: Diagnostics {
                    domain_states: a.domain.as_ref().map(Dpw::num_states),
                    assumption_states: a.assumption.num_states(),
                    goal_states: a.goal.num_states(),
                    game_states: a.env_side.num_states(),
                    iterations: 0,
                },
            })
        }
    }
}

fn solve(p: &Problem) -> Result<Verdict, EngineError> {
    if let Some(reason) = fair_unsupported(p)? {
        return Ok(Verdict {
            status: Status::Unsupported(reason),
            diagnostics: Diagnostics::default(),
        });
    }
    let result = match p.semantics {
        Semantics::Finite => solve_finite(p),
        Semantics::Infinite => solve_infinite(p),
    };
    match result {
        Err(EngineError::Unsupported(reason)) => Ok(Verdict {
            status: Status::Unsupported(reason),
            diagnostics: Diagnostics::default(),
        }),
        other => other,
    }
}

fn solve_finite(p: &Problem) -> Result<Verdict, EngineError> {
    let a = p.finite_automata()?;
    let mut diagnostics = Diagnostics {
        domain_states: a.domain.as_ref().map(Dfa::num_states),
        assumption_states: a.assumption.num_states(),
        goal_states: a.goal.num_states(),
        game_states: a.game.num_states(),
        iterations: 0,
    };
    let env = env_realizable(&a.env_side);
    if !env.realizable {
        diagnostics.iterations = env.iterations;
        return Ok(Verdict {
            status: Status::InvalidAssumption,
            diagnostics,
        });
    }
    let sol = agent_realizable(&a.game);
    diagnostics.iterations = sol.iterations;
    let status = match sol.strategy {
        Some(s) => Status::Realizable(s),
        None => Status::Unrealizable,
    };
    Ok(Verdict {
        status,
        diagnostics,
    })
}

fn solve_infinite(p: &Problem) -> Result<Verdict, EngineError> {
    let a = p.infinite_automata()?;
    let diagnostics = Diagnostics {
        domain_states: a.domain.as_ref().map(Dpw::num_states),
        assumption_states: a.assumption.num_states(),
        goal_states: a.goal.num_states(),
        game_states: a.game.num_states(),
        iterations: 0,
    };
    if !dpw_env_realizable(&a.env_side).realizable {
        return Ok(Verdict {
            status: Status::InvalidAssumption,
            diagnostics,
        });
    }
    let status = match dpw_agent_realizable(&a.game).strategy {
        Some(s) => Status::Realizable(s),
        None => Status::Unrealizable,
    };
    Ok(Verdict {
        status,
        diagnostics,
    })
}

/// Synthesis under assumptions: solve the agent game for `ω → γ`.
pub fn synthesize(p: &Problem) -> Result<Verdict, EngineError> {
    if p.kind() != Kind::Synthesis {
        return Err(EngineError::WrongKind(Kind::Synthesis));
    }
    solve(p)
}

/// Planning under assumptions: convert `D` to an automaton, form
/// `(M_D ∧ M_ω) → M_γ` and solve the agent game on it.
pub fn plan(p: &Problem) -> Result<Verdict, EngineError> {
    if p.kind() != Kind::Planning {
        return Err(EngineError::WrongKind(Kind::Planning));
    }
    solve(p)
}

#[cfg(test)]
mod tests;
