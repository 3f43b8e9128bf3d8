//! Compact nondeterministic planning domains `(E, A, init, pre, δ)` and the
//! artifacts derived from them: the domain property `ω_D` as a formula, DFA
//! and DPW, the executability formula, the fairness formula, and a
//! round-robin environment.

mod text;

use std::sync::Arc;

use thiserror::Error;

use crate::dfa::Dfa;
use crate::games::EnvTransducer;
use crate::logic::{Action, AtomScope, EnvState, Formula, ParseError, Symbol, VarError, VarTable};
use crate::parity::Dpw;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("a domain needs at least one environment variable")]
    NoFluents,
    #[error("`{0}` must be propositional")]
    NotPropositional(&'static str),
    #[error("`{part}` mentions `{atom}`, which is not allowed there")]
    OutOfScope { part: &'static str, atom: String },
    #[error("no environment state satisfies `init`")]
    EmptyInit,
    #[error("no action is available in state {0}")]
    NoAvailableAction(String),
    #[error("transition {state} --{action}--> {target} allowed although the action is unavailable")]
    DanglingDelta {
        state: String,
        action: String,
        target: String,
    },
    #[error("action {action} is available in state {state} but has no successor")]
    NonSerialPre { state: String, action: String },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Formula { line: usize, source: ParseError },
    #[error(transparent)]
    Vars(#[from] VarError),
}

/// A domain in compact form. Construction checks syntactic scopes only;
/// [`Domain::validate`] checks the semantic conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    vars: Arc<VarTable>,
    init: Formula,
    pre: Formula,
    delta: Formula,
}

/// The relations `I`, `Pre` and `Δ` induced by a compact domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitDomain {
    vars: Arc<VarTable>,
    init: Vec<bool>,
    /// `pre[s * |𝒜| + a]`.
    pre: Vec<bool>,
    /// Sorted successors, indexed like `pre`.
    succ: Vec<Vec<EnvState>>,
}

impl ExplicitDomain {
    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn is_initial(&self, s: EnvState) -> bool {
        self.init[s.index()]
    }

    pub fn initial_states(&self) -> impl Iterator<Item = EnvState> + '_ {
        self.vars.env_states().filter(|&s| self.is_initial(s))
    }

    pub fn available(&self, s: EnvState, a: Action) -> bool {
        self.pre[s.index() * self.vars.num_actions() + a.index()]
    }

    pub fn successors(&self, s: EnvState, a: Action) -> &[EnvState] {
        &self.succ[s.index() * self.vars.num_actions() + a.index()]
    }

    pub fn in_delta(&self, s: EnvState, a: Action, t: EnvState) -> bool {
        self.successors(s, a).binary_search(&t).is_ok()
    }

    /// `|Δ|`.
    pub fn num_transitions(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// Direct check of the domain property on a finite trace: the first
    /// state is initial, and every step whose action and all earlier
    /// actions were available follows `Δ`.
    pub fn trace_in_omega(&self, trace: &[Symbol]) -> bool {
        let Some(&first) = trace.first() else {
            return false;
        };
        if !self.is_initial(self.vars.split(first).0) {
            return false;
        }
        for w in trace.windows(2) {
            let (s, a) = self.vars.split(w[0]);
            let (t, _) = self.vars.split(w[1]);
            if !self.available(s, a) {
                return true;
            }
            if !self.in_delta(s, a, t) {
                return false;
            }
        }
        true
    }
}

fn check_scope(
    f: &Formula,
    vars: &VarTable,
    part: &'static str,
    scope: AtomScope,
) -> Result<(), DomainError> {
    if !f.is_propositional() {
        return Err(DomainError::NotPropositional(part));
    }
    for atom in f.atoms() {
        let ok = match scope {
            AtomScope::Env => vars.is_env(atom.var) && !atom.primed,
            AtomScope::EnvAgent => !atom.primed,
            AtomScope::EnvAgentPrimed => !atom.primed || vars.is_env(atom.var),
        } && atom.var < vars.len();
        if !ok {
            let name = vars.name(atom.var.min(vars.len().saturating_sub(1)));
            let atom = if atom.primed { format!("{name}'") } else { name.to_string() };
            return Err(DomainError::OutOfScope { part, atom });
        }
    }
    Ok(())
}

impl Domain {
    pub fn new(
        vars: Arc<VarTable>,
        init: Formula,
        pre: Formula,
        delta: Formula,
    ) -> Result<Domain, DomainError> {
        if vars.num_env() == 0 {
            return Err(DomainError::NoFluents);
        }
        check_scope(&init, &vars, "init", AtomScope::Env)?;
        check_scope(&pre, &vars, "pre", AtomScope::EnvAgent)?;
        check_scope(&delta, &vars, "trans", AtomScope::EnvAgentPrimed)?;
        Ok(Domain {
            vars,
            init,
            pre,
            delta,
        })
    }

    /// The domain with `I = ℰ`, `Pre = ℰ × 𝒜` and `Δ = ℰ × 𝒜 × ℰ`.
    pub fn universal(vars: Arc<VarTable>) -> Result<Domain, DomainError> {
        Domain::new(vars, Formula::True, Formula::True, Formula::True)
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn init(&self) -> &Formula {
        &self.init
    }

    pub fn pre(&self) -> &Formula {
        &self.pre
    }

    pub fn delta(&self) -> &Formula {
        &self.delta
    }

    /// `|D| = |E| + |A| + |init| + |pre| + |δ|`.
    pub fn size(&self) -> usize {
        self.vars.len() + self.init.node_count() + self.pre.node_count() + self.delta.node_count()
    }

    /// Enumerate `I`, `Pre`, `Δ` and check non-empty `I`, an available
    /// action everywhere, `Δ ⊆ Pre × ℰ`, and a successor for every
    /// available action.
    pub fn validate(&self) -> Result<ExplicitDomain, DomainError> {
        let v = &self.vars;
        let eval = |f: &Formula, cur: u32, next: u32| f.eval_prop(cur, next).expect("propositional");
        let init: Vec<bool> = v.env_states().map(|s| eval(&self.init, s.0, 0)).collect();
        if !init.iter().any(|&b| b) {
            return Err(DomainError::EmptyInit);
        }
        let mut pre = Vec::with_capacity(v.num_env_states() * v.num_actions());
        let mut succ = Vec::with_capacity(pre.capacity());
        for s in v.env_states() {
            for a in v.actions() {
                let cur = v.join(s, a).0;
                let avail = eval(&self.pre, cur, 0);
                let ts: Vec<EnvState> = v
                    .env_states()
                    .filter(|t| eval(&self.delta, cur, t.0))
                    .collect();
                if !avail {
                    if let Some(&t) = ts.first() {
                        return Err(DomainError::DanglingDelta {
                            state: v.env_bits(s),
                            action: v.action_bits(a),
                            target: v.env_bits(t),
                        });
                    }
                } else if ts.is_empty() {
                    return Err(DomainError::NonSerialPre {
                        state: v.env_bits(s),
                        action: v.action_bits(a),
                    });
                }
                pre.push(avail);
                succ.push(ts);
            }
            let row = &pre[s.index() * v.num_actions()..];
            if !row.iter().any(|&b| b) {
                return Err(DomainError::NoAvailableAction(v.env_bits(s)));
            }
        }
        Ok(ExplicitDomain {
            vars: v.clone(),
            init,
            pre,
            succ,
        })
    }

    /// `δ'' = WX false ∨ δ[e' ↦ X e]`: true at the last position, and
    /// elsewhere exactly when the next state is a `Δ`-successor.
    pub fn delta_step_formula(&self) -> Formula {
        let shifted = self
            .delta
            .prime_to_next(&self.vars, false)
            .expect("scopes checked on construction");
        Formula::or(Formula::weak_next(Formula::False), shifted)
    }

    /// `ω_D = init ∧ (G δ'' ∨ δ'' U ¬pre)` over finite traces.
    pub fn omega_ltlf(&self) -> Result<Formula, DomainError> {
        self.validate()?;
        let step = self.delta_step_formula();
        Ok(Formula::and(
            self.init.clone(),
            Formula::or(
                Formula::always(step.clone()),
                Formula::until(step, Formula::not(self.pre.clone())),
            ),
        ))
    }

    /// The automaton with states `q_in, q₊, q₋` and `ℰ × 𝒜`, unminimised.
    /// State `0` is `q_in`, `1` is `q₊`, `2` is `q₋`, and `(e, a)` is
    /// `3 + e·|𝒜| + a`.
    fn omega_table(&self) -> Result<(Vec<u32>, usize), DomainError> {
        let x = self.validate()?;
        let v = &self.vars;
        let na = v.num_actions();
        let n = 3 + v.num_env_states() * na;
        let pair = |e: EnvState, a: Action| (3 + e.index() * na + a.index()) as u32;
        let mut trans = Vec::with_capacity(n * v.num_symbols());
        for q in 0..n {
            for sym in v.symbols() {
                let (e2, a2) = v.split(sym);
                let admitted = match q {
                    0 => x.is_initial(e2),
                    1 => {
                        trans.push(1);
                        continue;
                    }
                    2 => {
                        trans.push(2);
                        continue;
                    }
                    _ => {
                        let e = EnvState(((q - 3) / na) as u32);
                        let a = Action(((q - 3) % na) as u32);
                        x.in_delta(e, a, e2)
                    }
                };
                trans.push(if !admitted {
                    2
                } else if x.available(e2, a2) {
                    pair(e2, a2)
                } else {
                    1
                });
            }
        }
        Ok((trans, n))
    }

    /// Finite-trace `ω_D` as a DFA; every state but `q₋` is final.
    pub fn omega_dfa(&self) -> Result<Dfa, DomainError> {
        let (trans, n) = self.omega_table()?;
        let finals = (0..n).map(|q| q != 2).collect();
        Ok(Dfa::new(self.vars.clone(), 0, trans, finals).expect("well-formed by construction"))
    }

    /// Infinite-trace `ω_D` as a DPW; `q₋` has color 1, every other state 0.
    pub fn omega_dpw(&self) -> Result<Dpw, DomainError> {
        let (trans, n) = self.omega_table()?;
        let colors = (0..n).map(|q| u32::from(q == 2)).collect();
        Ok(Dpw::new(self.vars.clone(), 0, trans, colors).expect("well-formed by construction"))
    }

    /// `G pre`: the agent only performs available actions.
    pub fn exec_formula(&self) -> Formula {
        Formula::always(self.pre.clone())
    }

    /// The fairness property as an LTL formula (infinite semantics): every
    /// state-action pair occurring infinitely often is followed infinitely
    /// often by each of its effects. Pairs without effects are omitted.
    pub fn fairness_formula(&self) -> Result<Formula, DomainError> {
        let x = self.validate()?;
        let v = &self.vars;
        let env_vars: Vec<usize> = (0..v.num_env()).collect();
        let agent_vars: Vec<usize> = (v.num_env()..v.len()).collect();
        let mut conjuncts = Vec::new();
        for s in v.env_states() {
            for a in v.actions() {
                let ts = x.successors(s, a);
                if ts.is_empty() {
                    continue;
                }
                let sa = Formula::and(
                    Formula::minterm(env_vars.iter().copied(), s.0, false),
                    Formula::minterm(agent_vars.iter().copied(), a.0, false),
                );
                let effects = ts.iter().map(|t| {
                    let next = Formula::next(Formula::minterm(env_vars.iter().copied(), t.0, false));
                    Formula::always(Formula::eventually(Formula::and(sa.clone(), next)))
                });
                conjuncts.push(Formula::implies(
                    Formula::always(Formula::eventually(sa.clone())),
                    Formula::conj(effects),
                ));
            }
        }
        Ok(Formula::conj(conjuncts))
    }

    /// Environment resolving nondeterminism round-robin per state-action
    /// pair, successors in bitvector order.
    pub fn round_robin_env(&self) -> Result<RoundRobin, DomainError> {
        Ok(RoundRobin {
            domain: self.validate()?,
        })
    }
}

/// Round-robin environment: starts in the lowest initial state; after an
/// available action it moves to the next successor of that pair in cyclic
/// order; after an unavailable one it moves to state `0`.
#[derive(Debug, Clone)]
pub struct RoundRobin {
    domain: ExplicitDomain,
}

/// Current state and one counter per state-action pair.
pub type RoundRobinMemory = (EnvState, Vec<u16>);

impl RoundRobin {
    pub fn domain(&self) -> &ExplicitDomain {
        &self.domain
    }
}

impl EnvTransducer for RoundRobin {
    type Memory = RoundRobinMemory;

    fn start(&self) -> (EnvState, RoundRobinMemory) {
        let s = self
            .domain
            .initial_states()
            .next()
            .expect("validated domains have an initial state");
        (s, (s, vec![0; self.domain.succ.len()]))
    }

    fn respond(&self, mem: &RoundRobinMemory, a: Action) -> (EnvState, RoundRobinMemory) {
        let (s, counters) = mem;
        if !self.domain.available(*s, a) {
            return (EnvState(0), (EnvState(0), counters.clone()));
        }
        let idx = s.index() * self.domain.vars.num_actions() + a.index();
        let ts = &self.domain.succ[idx];
        let t = ts[counters[idx] as usize];
        let mut counters = counters.clone();
        counters[idx] = ((counters[idx] as usize + 1) % ts.len()) as u16;
        (t, (t, counters))
    }
}
