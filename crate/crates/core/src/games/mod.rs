//! Reachability and safety games on DFAs, environment moving first.
//!
//! One round: the environment picks `e ∈ ℰ`, the agent answers `a ∈ 𝒜`,
//! and the DFA reads `e ∪ a`. The agent wins by stopping in a final state
//! after at least one round; the environment wins by keeping every
//! non-empty prefix accepted.

mod strategy;

use crate::dfa::Dfa;
use crate::logic::{Action, EnvState};

pub use strategy::{
    play, AgentMove, AgentStrategy, EnvStrategy, EnvTransducer, Play, StrategyError,
};
pub(crate) use strategy::trim;

/// States won by a player, with the fixpoint stage at which each entered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    rank: Vec<Option<u32>>,
}

impl Region {
    pub fn contains(&self, q: usize) -> bool {
        self.rank[q].is_some()
    }

    pub fn rank(&self, q: usize) -> Option<u32> {
        self.rank[q]
    }

    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.rank.len()).filter(|&q| self.rank[q].is_some())
    }

    pub fn len(&self) -> usize {
        self.states().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
pub struct AgentSolution {
    pub realizable: bool,
    pub region: Region,
    pub strategy: Option<AgentStrategy>,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct EnvSolution {
    pub realizable: bool,
    pub region: Region,
    pub strategy: Option<EnvStrategy>,
    pub iterations: usize,
}

/// Least fixpoint of the agent's controllable predecessor, seeded with `F`.
pub fn agent_region(m: &Dfa) -> (Region, usize) {
    let vars = m.vars();
    let n = m.num_states();
    let mut rank: Vec<Option<u32>> = (0..n).map(|q| m.is_final(q).then_some(0)).collect();
    let mut stage = 0;
    loop {
        stage += 1;
        let added: Vec<usize> = (0..n)
            .filter(|&q| rank[q].is_none())
            .filter(|&q| {
                vars.env_states().all(|e| {
                    vars.actions()
                        .any(|a| rank[m.next(q, vars.join(e, a))].is_some_and(|r| r < stage))
                })
            })
            .collect();
        if added.is_empty() {
            break;
        }
        for q in added {
            rank[q] = Some(stage);
        }
    }
    (Region { rank }, stage as usize)
}

/// Best answer to `e` in `q`: the successor of least rank, lowest action on ties.
fn best_action(m: &Dfa, region: &Region, q: usize, e: EnvState) -> Option<(Action, usize)> {
    let vars = m.vars();
    vars.actions()
        .filter_map(|a| {
            let t = m.next(q, vars.join(e, a));
            region.rank(t).map(|r| (r, a, t))
        })
        .min_by_key(|&(r, a, _)| (r, a))
        .map(|(_, a, t)| (a, t))
}

/// Solve the reachability game and extract a rank-decreasing strategy.
///
/// Memory `0` is the start of the play, memory `i + 1` stands for DFA
/// state `i`. The strategy halts as soon as it sits in a final state after
/// at least one round.
pub fn agent_realizable(m: &Dfa) -> AgentSolution {
    let vars = m.vars();
    let (region, iterations) = agent_region(m);
    let q0 = m.initial();
    let realizable = vars
        .env_states()
        .all(|e| best_action(m, &region, q0, e).is_some());
    if !realizable {
        return AgentSolution {
            realizable,
            region,
            strategy: None,
            iterations,
        };
    }
    let answer = |q: usize, e: EnvState| -> (AgentMove, u32) {
        match best_action(m, &region, q, e) {
            Some((a, t)) => (AgentMove::Act(a), t as u32 + 1),
            // Off the winning play; any fixed move will do.
            None => (AgentMove::Act(Action(0)), m.next(q, vars.join(e, Action(0))) as u32 + 1),
        }
    };
    let mut rows: Vec<Vec<(AgentMove, u32)>> = Vec::with_capacity(m.num_states() + 1);
    rows.push(vars.env_states().map(|e| answer(q0, e)).collect());
    for q in 0..m.num_states() {
        let row = if m.is_final(q) {
            vec![(AgentMove::Halt, q as u32 + 1); vars.num_env_states()]
        } else {
            vars.env_states().map(|e| answer(q, e)).collect()
        };
        rows.push(row);
    }
    let table = trim(0, &rows).into_iter().flatten().collect();
    let strategy = AgentStrategy::new(vars.clone(), 0, table).expect("well-formed by construction");
    AgentSolution {
        realizable,
        region,
        strategy: Some(strategy),
        iterations,
    }
}

/// Greatest fixpoint of the environment's safe predecessor: states from
/// which some `e` keeps every agent answer inside `F ∩ Safe`.
pub fn env_region(m: &Dfa) -> (Region, usize) {
    let vars = m.vars();
    let n = m.num_states();
    let mut safe = vec![true; n];
    let mut iterations = 0;
    loop {
        iterations += 1;
        let next: Vec<bool> = (0..n)
            .map(|q| {
                safe[q]
                    && vars.env_states().any(|e| {
                        vars.actions().all(|a| {
                            let t = m.next(q, vars.join(e, a));
                            m.is_final(t) && safe[t]
                        })
                    })
            })
            .collect();
        if next == safe {
            break;
        }
        safe = next;
    }
    let rank = safe.iter().map(|&s| s.then_some(0)).collect();
    (Region { rank }, iterations)
}

/// Lowest environment state keeping `q` inside the safe region, if any.
pub fn safe_move(m: &Dfa, region: &Region, q: usize) -> Option<EnvState> {
    let vars = m.vars();
    vars.env_states().find(|&e| is_safe_move(m, region, q, e))
}

/// Whether `e` keeps every agent answer in `F ∩ Safe`.
pub fn is_safe_move(m: &Dfa, region: &Region, q: usize, e: EnvState) -> bool {
    let vars = m.vars();
    vars.actions().all(|a| {
        let t = m.next(q, vars.join(e, a));
        m.is_final(t) && region.contains(t)
    })
}

/// Solve the safety game; the strategy's memory is the DFA state.
pub fn env_realizable(m: &Dfa) -> EnvSolution {
    let vars = m.vars();
    let (region, iterations) = env_region(m);
    let q0 = m.initial();
    let realizable = region.contains(q0);
    if !realizable {
        return EnvSolution {
            realizable,
            region,
            strategy: None,
            iterations,
        };
    }
    let output = |q: usize| safe_move(m, &region, q).unwrap_or(EnvState(0));
    let rows: Vec<Vec<(EnvState, u32)>> = (0..m.num_states())
        .map(|q| {
            let e = output(q);
            vars.actions()
                .map(|a| {
                    let t = m.next(q, vars.join(e, a));
                    (output(t), t as u32)
                })
                .collect()
        })
        .collect();
    let table = trim(q0, &rows).into_iter().flatten().collect();
    let strategy = EnvStrategy::new(vars.clone(), 0, output(q0), table)
        .expect("well-formed by construction");
    EnvSolution {
        realizable,
        region,
        strategy: Some(strategy),
        iterations,
    }
}
