//! Checking a given agent strategy against every environment that
//! realizes the assumption.
//!
//! An environment realizes `ω` iff it only ever plays safe moves of the
//! safety game on `M_ω` (with `M_D ∧ M_ω` for planning): any finite
//! history of safe moves extends to a realizing environment by switching to
//! a winning strategy afterwards, and an unsafe move lets some agent reply
//! leave the winning region. So the strategy is correct iff, on the
//! product of its memory with `M_ω` and `M_γ` restricted to safe moves,
//! every play halts after at least one round in a `γ`-accepting state.

use std::collections::{HashMap, HashSet};

use super::{EngineError, FiniteAutomata, Problem, Semantics};
use crate::games::{env_region, is_safe_move, AgentMove, AgentStrategy};
use crate::logic::{EnvState, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessEnd {
    /// The agent halted when offered `offered`; `trace` is empty or not
    /// accepted by the goal.
    Halt { offered: EnvState },
    /// `trace[loop_start..]` repeats forever without the agent halting.
    Cycle { loop_start: usize },
}

/// An environment behaviour consistent with the assumption that defeats
/// the strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub trace: Vec<Symbol>,
    pub end: WitnessEnd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Accept,
    Reject(Witness),
}

impl Verification {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verification::Accept)
    }
}

type Node = (u32, u32, u32, bool);

/// Decide whether `s` realizes the goal under the assumption. Finite
/// semantics only.
pub fn verify_strategy(p: &Problem, s: &AgentStrategy) -> Result<Verification, EngineError> {
    if p.semantics != Semantics::Finite {
        return Err(EngineError::Unsupported(
            "strategy verification is only available for finite traces".into(),
        ));
    }
    verify_against(&p.finite_automata()?, s)
}

/// [`verify_strategy`] on prebuilt automata.
pub fn verify_against(a: &FiniteAutomata, s: &AgentStrategy) -> Result<Verification, EngineError> {
    if **s.vars() != **a.goal.vars() {
        return Err(EngineError::VocabularyMismatch("strategy"));
    }
    let (menv, mgoal) = (&a.env_side, &a.goal);
    let (region, _) = env_region(menv);
    if !region.contains(menv.initial()) {
        return Err(EngineError::InvalidAssumption);
    }
    let vars = a.goal.vars();
    let safe: Vec<Vec<EnvState>> = (0..menv.num_states())
        .map(|q| {
            vars.env_states()
                .filter(|&e| is_safe_move(menv, &region, q, e))
                .collect()
        })
        .collect();

    // Iterative DFS; `on_stack` detects cycles, `done` marks fully
    // explored nodes.
    let start: Node = (s.initial() as u32, menv.initial() as u32, mgoal.initial() as u32, false);
    let mut on_stack: HashMap<Node, usize> = HashMap::new();
    let mut done: HashSet<Node> = HashSet::new();
    let mut stack: Vec<(Node, usize)> = vec![(start, 0)];
    let mut trace: Vec<Symbol> = Vec::new();
    on_stack.insert(start, 0);
    while let Some(&(node, i)) = stack.last() {
        let (m, qe, qg, started) = node;
        let moves = &safe[qe as usize];
        if i == moves.len() {
            stack.pop();
            on_stack.remove(&node);
            done.insert(node);
            trace.pop();
            continue;
        }
        let e = moves[i];
        stack.last_mut().expect("non-empty").1 += 1;
        match s.step(m as usize, e) {
            (AgentMove::Halt, _) => {
                if !(started && mgoal.is_final(qg as usize)) {
                    return Ok(Verification::Reject(Witness {
                        trace,
                        end: WitnessEnd::Halt { offered: e },
                    }));
                }
            }
            (AgentMove::Act(act), m2) => {
                let sym = vars.join(e, act);
                let succ: Node = (
                    m2 as u32,
                    menv.next(qe as usize, sym) as u32,
                    mgoal.next(qg as usize, sym) as u32,
                    true,
                );
                trace.push(sym);
                if let Some(&depth) = on_stack.get(&succ) {
                    return Ok(Verification::Reject(Witness {
                        trace,
                        end: WitnessEnd::Cycle { loop_start: depth },
                    }));
                }
                if done.contains(&succ) {
                    trace.pop();
                    continue;
                }
                on_stack.insert(succ, trace.len());
                stack.push((succ, 0));
            }
        }
    }
    Ok(Verification::Accept)
}
