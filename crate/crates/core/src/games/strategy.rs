use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::Hash;
use std::sync::Arc;

use thiserror::Error;

use crate::logic::{Action, EnvState, Symbol, VarError, VarTable};

/// Agent output in one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentMove {
    Act(Action),
    Halt,
}

/// Finite-state agent transducer `M × ℰ → (𝒜 ∪ {halt}) × M`.
///
/// Halting ends the play; the environment state offered in that round is
/// not part of the trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentStrategy {
    vars: Arc<VarTable>,
    initial: u32,
    /// `table[m * |ℰ| + e]`.
    table: Vec<(AgentMove, u32)>,
}

/// Finite-state environment transducer: an initial output, then
/// `M × 𝒜 → ℰ × M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvStrategy {
    vars: Arc<VarTable>,
    initial: u32,
    initial_output: EnvState,
    /// `table[m * |𝒜| + a]`.
    table: Vec<(EnvState, u32)>,
}

/// Anything that can drive the environment side of a play.
pub trait EnvTransducer {
    type Memory: Clone + Eq + Hash;
    fn start(&self) -> (EnvState, Self::Memory);
    fn respond(&self, mem: &Self::Memory, action: Action) -> (EnvState, Self::Memory);
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("memory state {m} has no entry for input {input}")]
    MissingEntry { m: usize, input: String },
    #[error("expected a strategy of type `{0}`")]
    WrongType(&'static str),
    #[error("memory state {0} out of range")]
    MemoryOutOfRange(usize),
    #[error("table has {got} entries, expected {expected}")]
    TableSize { got: usize, expected: usize },
    #[error(transparent)]
    Vars(#[from] VarError),
}

impl AgentStrategy {
    pub fn new(
        vars: Arc<VarTable>,
        initial: usize,
        table: Vec<(AgentMove, u32)>,
    ) -> Result<Self, StrategyError> {
        let k = vars.num_env_states();
        if table.is_empty() || !table.len().is_multiple_of(k) {
            return Err(StrategyError::TableSize {
                got: table.len(),
                expected: k * table.len().div_ceil(k).max(1),
            });
        }
        let n = table.len() / k;
        if initial >= n {
            return Err(StrategyError::MemoryOutOfRange(initial));
        }
        if let Some(&(_, m)) = table.iter().find(|(_, m)| *m as usize >= n) {
            return Err(StrategyError::MemoryOutOfRange(m as usize));
        }
        if let Some(&(AgentMove::Act(a), _)) = table
            .iter()
            .find(|(mv, _)| matches!(mv, AgentMove::Act(a) if a.index() >= vars.num_actions()))
        {
            return Err(StrategyError::Syntax {
                line: 0,
                msg: format!("action {} outside the action set", a.0),
            });
        }
        Ok(AgentStrategy {
            vars,
            initial: initial as u32,
            table,
        })
    }

    /// A memoryless strategy reacting to the current environment state only.
    pub fn positional(vars: Arc<VarTable>, choice: &[AgentMove]) -> Result<Self, StrategyError> {
        let table = choice.iter().map(|&mv| (mv, 0)).collect();
        AgentStrategy::new(vars, 0, table)
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn memory(&self) -> usize {
        self.table.len() / self.vars.num_env_states()
    }

    pub fn initial(&self) -> usize {
        self.initial as usize
    }

    pub fn step(&self, m: usize, e: EnvState) -> (AgentMove, usize) {
        let (mv, next) = self.table[m * self.vars.num_env_states() + e.index()];
        (mv, next as usize)
    }

    pub fn to_text(&self) -> String {
        let v = &self.vars;
        let mut out = format!(
            "type: agent\n{}\nmemory: {}\ninitial: {}\n",
            v.header(),
            self.memory(),
            self.initial
        );
        for m in 0..self.memory() {
            for e in v.env_states() {
                let (mv, next) = self.step(m, e);
                let shown = match mv {
                    AgentMove::Act(a) => v.action_bits(a),
                    AgentMove::Halt => "halt".to_string(),
                };
                writeln!(out, "{m} {} -> {shown} {next}", v.env_bits(e)).unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<AgentStrategy, StrategyError> {
        let raw = RawStrategy::parse(text)?;
        if raw.kind != "agent" {
            return Err(StrategyError::WrongType("agent"));
        }
        let v = &raw.vars;
        let k = v.num_env_states();
        let mut table = vec![None; raw.memory * k];
        for (line, m, input, output, next) in raw.rows {
            let e = v.parse_env_bits(&input)?;
            let mv = if output == "halt" {
                AgentMove::Halt
            } else {
                AgentMove::Act(v.parse_action_bits(&output)?)
            };
            store(&mut table, m * k + e.index(), (mv, next as u32), line)?;
        }
        let table = complete(table, k, |i| v.env_bits(EnvState(i as u32)))?;
        AgentStrategy::new(Arc::new(raw.vars), raw.initial, table)
    }
}

impl EnvStrategy {
    pub fn new(
        vars: Arc<VarTable>,
        initial: usize,
        initial_output: EnvState,
        table: Vec<(EnvState, u32)>,
    ) -> Result<Self, StrategyError> {
        let k = vars.num_actions();
        if table.is_empty() || !table.len().is_multiple_of(k) {
            return Err(StrategyError::TableSize {
                got: table.len(),
                expected: k * table.len().div_ceil(k).max(1),
            });
        }
        let n = table.len() / k;
        if initial >= n {
            return Err(StrategyError::MemoryOutOfRange(initial));
        }
        if let Some(&(_, m)) = table.iter().find(|(_, m)| *m as usize >= n) {
            return Err(StrategyError::MemoryOutOfRange(m as usize));
        }
        let limit = vars.num_env_states();
        if initial_output.index() >= limit || table.iter().any(|(e, _)| e.index() >= limit) {
            return Err(StrategyError::Syntax {
                line: 0,
                msg: "environment output outside the state set".into(),
            });
        }
        Ok(EnvStrategy {
            vars,
            initial: initial as u32,
            initial_output,
            table,
        })
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn memory(&self) -> usize {
        self.table.len() / self.vars.num_actions()
    }

    pub fn initial(&self) -> usize {
        self.initial as usize
    }

    pub fn initial_output(&self) -> EnvState {
        self.initial_output
    }

    pub fn step(&self, m: usize, a: Action) -> (EnvState, usize) {
        let (e, next) = self.table[m * self.vars.num_actions() + a.index()];
        (e, next as usize)
    }

    pub fn to_text(&self) -> String {
        let v = &self.vars;
        let mut out = format!(
            "type: env\n{}\nmemory: {}\ninitial: {} output {}\n",
            v.header(),
            self.memory(),
            self.initial,
            v.env_bits(self.initial_output)
        );
        for m in 0..self.memory() {
            for a in v.actions() {
                let (e, next) = self.step(m, a);
                writeln!(out, "{m} {} -> {} {next}", v.action_bits(a), v.env_bits(e)).unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<EnvStrategy, StrategyError> {
        let raw = RawStrategy::parse(text)?;
        if raw.kind != "env" {
            return Err(StrategyError::WrongType("env"));
        }
        let v = &raw.vars;
        let k = v.num_actions();
        let out0 = raw
            .initial_output
            .as_deref()
            .ok_or(StrategyError::MissingHeader("initial output"))?;
        let initial_output = v.parse_env_bits(out0)?;
        let mut table = vec![None; raw.memory * k];
        for (line, m, input, output, next) in raw.rows {
            let a = v.parse_action_bits(&input)?;
            let e = v.parse_env_bits(&output)?;
            store(&mut table, m * k + a.index(), (e, next as u32), line)?;
        }
        let table = complete(table, k, |i| v.action_bits(Action(i as u32)))?;
        EnvStrategy::new(Arc::new(raw.vars), raw.initial, initial_output, table)
    }
}

impl EnvTransducer for EnvStrategy {
    type Memory = usize;

    fn start(&self) -> (EnvState, usize) {
        (self.initial_output, self.initial())
    }

    fn respond(&self, mem: &usize, action: Action) -> (EnvState, usize) {
        self.step(*mem, action)
    }
}

fn store<T>(table: &mut [Option<T>], idx: usize, val: T, line: usize) -> Result<(), StrategyError> {
    let slot = table.get_mut(idx).ok_or(StrategyError::Syntax {
        line,
        msg: "memory state out of range".into(),
    })?;
    if slot.is_some() {
        return Err(StrategyError::Syntax {
            line,
            msg: "duplicate entry".into(),
        });
    }
    *slot = Some(val);
    Ok(())
}

fn complete<T>(
    table: Vec<Option<T>>,
    k: usize,
    show: impl Fn(usize) -> String,
) -> Result<Vec<T>, StrategyError> {
    table
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            x.ok_or_else(|| StrategyError::MissingEntry {
                m: i / k,
                input: show(i % k),
            })
        })
        .collect()
}

struct RawStrategy {
    kind: String,
    vars: VarTable,
    memory: usize,
    initial: usize,
    initial_output: Option<String>,
    /// `(line, m, input, output, next)`.
    rows: Vec<(usize, usize, String, String, usize)>,
}

impl RawStrategy {
    fn parse(text: &str) -> Result<RawStrategy, StrategyError> {
        let mut kind = None;
        let mut vars = None;
        let mut memory = None;
        let mut initial = None;
        let mut initial_output = None;
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: &str| StrategyError::Syntax {
                line,
                msg: msg.to_string(),
            };
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            if let Some(rest) = l.strip_prefix("type:") {
                kind = Some(rest.trim().to_string());
            } else if let Some(rest) = l.strip_prefix("vars:") {
                let (e, a) = rest.split_once('|').ok_or_else(|| err("`vars:` needs `|`"))?;
                vars = Some(VarTable::new(e.split_whitespace(), a.split_whitespace())?);
            } else if let Some(rest) = l.strip_prefix("memory:") {
                let n: usize = rest.trim().parse().map_err(|_| err("bad memory size"))?;
                if n == 0 {
                    return Err(err("memory must be positive"));
                }
                memory = Some(n);
            } else if let Some(rest) = l.strip_prefix("initial:") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                match parts.as_slice() {
                    [m] => initial = Some(m.parse().map_err(|_| err("bad initial memory"))?),
                    [m, "output", bits] => {
                        initial = Some(m.parse().map_err(|_| err("bad initial memory"))?);
                        initial_output = Some(bits.to_string());
                    }
                    _ => return Err(err("expected `initial: m [output bits]`")),
                }
            } else {
                let parts: Vec<&str> = l.split_whitespace().collect();
                let [m, input, "->", output, next] = parts.as_slice() else {
                    return Err(err("expected `m input -> output m'`"));
                };
                rows.push((
                    line,
                    m.parse().map_err(|_| err("bad memory state"))?,
                    input.to_string(),
                    output.to_string(),
                    next.parse().map_err(|_| err("bad successor memory"))?,
                ));
            }
        }
        let memory = memory.ok_or(StrategyError::MissingHeader("memory"))?;
        for &(line, m, .., next) in &rows {
            if m >= memory || next >= memory {
                return Err(StrategyError::Syntax {
                    line,
                    msg: "memory state out of range".into(),
                });
            }
        }
        Ok(RawStrategy {
            kind: kind.ok_or(StrategyError::MissingHeader("type"))?,
            vars: vars.ok_or(StrategyError::MissingHeader("vars"))?,
            memory,
            initial: initial.ok_or(StrategyError::MissingHeader("initial"))?,
            initial_output,
            rows,
        })
    }
}

/// Outcome of running an agent against an environment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Play {
    pub trace: Vec<Symbol>,
    /// False iff `max_rounds` rounds were played without the agent halting.
    pub halted: bool,
}

/// The longest trace compatible with both strategies, cut at `max_rounds`.
pub fn play<E: EnvTransducer>(agent: &AgentStrategy, env: &E, max_rounds: usize) -> Play {
    let vars = &agent.vars;
    let mut trace = Vec::new();
    let (mut e, mut env_mem) = env.start();
    let mut m = agent.initial();
    for _ in 0..max_rounds {
        let (mv, next) = agent.step(m, e);
        let AgentMove::Act(a) = mv else {
            return Play {
                trace,
                halted: true,
            };
        };
        trace.push(vars.join(e, a));
        m = next;
        (e, env_mem) = env.respond(&env_mem, a);
    }
    // One more look: an agent that halts right after the last round did halt.
    let halted = matches!(agent.step(m, e).0, AgentMove::Halt);
    Play { trace, halted }
}

/// Renumber memory states in BFS order from the initial one, dropping the
/// unreachable ones.
pub(crate) fn trim<T: Copy>(initial: usize, rows: &[Vec<(T, u32)>]) -> Vec<Vec<(T, u32)>> {
    let mut number: HashMap<u32, u32> = HashMap::from([(initial as u32, 0)]);
    let mut order = vec![initial as u32];
    let mut i = 0;
    while i < order.len() {
        for &(_, next) in &rows[order[i] as usize] {
            if !number.contains_key(&next) {
                number.insert(next, order.len() as u32);
                order.push(next);
            }
        }
        i += 1;
    }
    order
        .iter()
        .map(|&m| {
            rows[m as usize]
                .iter()
                .map(|&(o, next)| (o, number[&next]))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yx() -> Arc<VarTable> {
        Arc::new(VarTable::new(["y"], ["x"]).unwrap())
    }

    #[test]
    fn agent_text_roundtrip() {
        let vars = yx();
        let s = AgentStrategy::new(
            vars,
            0,
            vec![
                (AgentMove::Act(Action(1)), 1),
                (AgentMove::Act(Action(0)), 1),
                (AgentMove::Halt, 1),
                (AgentMove::Halt, 1),
            ],
        )
        .unwrap();
        let text = s.to_text();
        assert!(text.contains("0 1 -> 0 1"));
        assert!(text.contains("1 0 -> halt 1"));
        assert_eq!(AgentStrategy::from_text(&text).unwrap(), s);
        assert_eq!(
            EnvStrategy::from_text(&text).unwrap_err(),
            StrategyError::WrongType("env")
        );
    }

    #[test]
    fn env_text_roundtrip_and_errors() {
        let vars = yx();
        let s = EnvStrategy::new(vars, 0, EnvState(0), vec![(EnvState(1), 0), (EnvState(0), 0)])
            .unwrap();
        let text = s.to_text();
        assert!(text.contains("initial: 0 output 0"));
        assert_eq!(EnvStrategy::from_text(&text).unwrap(), s);
        let broken = text.replace("0 1 -> 0 0\n", "");
        assert!(matches!(
            EnvStrategy::from_text(&broken),
            Err(StrategyError::MissingEntry { m: 0, .. })
        ));
    }

    #[test]
    fn play_stops_at_halt() {
        let vars = yx();
        // Act once with x, then halt.
        let agent = AgentStrategy::new(
            vars.clone(),
            0,
            vec![
                (AgentMove::Act(Action(1)), 1),
                (AgentMove::Act(Action(1)), 1),
                (AgentMove::Halt, 1),
                (AgentMove::Halt, 1),
            ],
        )
        .unwrap();
        let env = EnvStrategy::new(vars.clone(), 0, EnvState(1), vec![(EnvState(1), 0); 2]).unwrap();
        let p = play(&agent, &env, 10);
        assert!(p.halted);
        assert_eq!(p.trace, vec![vars.symbol_of(&["y", "x"]).unwrap()]);

        let never = AgentStrategy::positional(vars.clone(), &[AgentMove::Act(Action(0)); 2]).unwrap();
        let p = play(&never, &env, 5);
        assert!(!p.halted);
        assert_eq!(p.trace.len(), 5);

        let at_once = AgentStrategy::positional(vars, &[AgentMove::Halt; 2]).unwrap();
        assert_eq!(play(&at_once, &env, 5).trace, vec![]);
    }
}
