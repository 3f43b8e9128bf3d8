//! Variable vocabulary, joint symbols and LTLf formulas.
//!
//! Variables are split into environment-controlled fluents `E` and
//! agent-controlled action variables `A`. A [`VarTable`] fixes a total order
//! over `E ∪ A` (environment variables first) and every bitvector encoding in
//! the crate is relative to that order.

mod eval;
mod formula;
mod parse;

use std::fmt;

use thiserror::Error;

pub use eval::{eval_finite, EvalError};
pub use formula::{Atom, Formula, FormulaDisplay, FormulaError};
pub use parse::{parse_formula, parse_formula_in, AtomScope, ParseError};

/// Upper bound on `|E ∪ A|` for the explicit-alphabet representation.
pub const MAX_VARS: usize = 16;

/// Errors raised while building a [`VarTable`] or decoding bitvectors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VarError {
    #[error("variable `{0}` declared twice")]
    Duplicate(String),
    #[error("`{0}` is not a valid variable name")]
    BadName(String),
    #[error("{0} variables declared, the explicit alphabet supports at most {MAX_VARS}")]
    TooMany(usize),
    #[error("bitvector `{text}` has wrong shape, expected {expected} binary digits")]
    BadBits { text: String, expected: usize },
}

const KEYWORDS: &[&str] = &["true", "false", "X", "WX", "F", "G", "U", "R"];

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&name)
}

/// The partitioned variable set `E ⊎ A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarTable {
    env: Vec<String>,
    agent: Vec<String>,
}

impl VarTable {
    pub fn new<I, J, S, T>(env: I, agent: J) -> Result<Self, VarError>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let env: Vec<String> = env.into_iter().map(Into::into).collect();
        let agent: Vec<String> = agent.into_iter().map(Into::into).collect();
        let mut seen = std::collections::HashSet::new();
        for name in env.iter().chain(agent.iter()) {
            if !is_identifier(name) {
                return Err(VarError::BadName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(VarError::Duplicate(name.clone()));
            }
        }
        if env.len() + agent.len() > MAX_VARS {
            return Err(VarError::TooMany(env.len() + agent.len()));
        }
        Ok(VarTable { env, agent })
    }

    pub fn env_vars(&self) -> &[String] {
        &self.env
    }

    pub fn agent_vars(&self) -> &[String] {
        &self.agent
    }

    pub fn num_env(&self) -> usize {
        self.env.len()
    }

    pub fn num_agent(&self) -> usize {
        self.agent.len()
    }

    /// Total number of variables `|E ∪ A|`.
    pub fn len(&self) -> usize {
        self.env.len() + self.agent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Global index (env first) of a variable name.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.env
            .iter()
            .chain(self.agent.iter())
            .position(|v| v == name)
    }

    pub fn is_env(&self, var: usize) -> bool {
        var < self.env.len()
    }

    pub fn name(&self, var: usize) -> &str {
        if var < self.env.len() {
            &self.env[var]
        } else {
            &self.agent[var - self.env.len()]
        }
    }

    pub fn num_symbols(&self) -> usize {
        1 << self.len()
    }

    pub fn num_env_states(&self) -> usize {
        1 << self.env.len()
    }

    pub fn num_actions(&self) -> usize {
        1 << self.agent.len()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.num_symbols() as u32).map(Symbol)
    }

    pub fn env_states(&self) -> impl Iterator<Item = EnvState> {
        (0..self.num_env_states() as u32).map(EnvState)
    }

    pub fn actions(&self) -> impl Iterator<Item = Action> {
        (0..self.num_actions() as u32).map(Action)
    }

    pub fn join(&self, env: EnvState, action: Action) -> Symbol {
        Symbol(env.0 | (action.0 << self.env.len()))
    }

    pub fn split(&self, sym: Symbol) -> (EnvState, Action) {
        let mask = (1u32 << self.env.len()) - 1;
        (EnvState(sym.0 & mask), Action(sym.0 >> self.env.len()))
    }

    /// Symbol whose true variables are exactly `names`.
    pub fn symbol_of(&self, names: &[&str]) -> Option<Symbol> {
        let mut bits = 0u32;
        for n in names {
            bits |= 1 << self.index_of(n)?;
        }
        Some(Symbol(bits))
    }

    pub fn env_state_of(&self, names: &[&str]) -> Option<EnvState> {
        let sym = self.symbol_of(names)?;
        let (e, a) = self.split(sym);
        (a.0 == 0).then_some(e)
    }

    pub fn action_of(&self, names: &[&str]) -> Option<Action> {
        let sym = self.symbol_of(names)?;
        let (e, a) = self.split(sym);
        (e.0 == 0).then_some(a)
    }

    pub fn symbol_bits(&self, sym: Symbol) -> String {
        bits_to_string(sym.0, self.len())
    }

    pub fn env_bits(&self, e: EnvState) -> String {
        bits_to_string(e.0, self.num_env())
    }

    pub fn action_bits(&self, a: Action) -> String {
        bits_to_string(a.0, self.num_agent())
    }

    pub fn parse_symbol_bits(&self, text: &str) -> Result<Symbol, VarError> {
        parse_bits(text, self.len()).map(Symbol)
    }

    pub fn parse_env_bits(&self, text: &str) -> Result<EnvState, VarError> {
        parse_bits(text, self.num_env()).map(EnvState)
    }

    pub fn parse_action_bits(&self, text: &str) -> Result<Action, VarError> {
        parse_bits(text, self.num_agent()).map(Action)
    }

    /// Human-readable set notation, e.g. `{y, x}`.
    pub fn symbol_set(&self, sym: Symbol) -> String {
        let names: Vec<&str> = (0..self.len())
            .filter(|&i| sym.0 & (1 << i) != 0)
            .map(|i| self.name(i))
            .collect();
        format!("{{{}}}", names.join(", "))
    }

    /// Header line used by the textual automaton format.
    pub fn header(&self) -> String {
        let mut out = String::from("vars:");
        for v in &self.env {
            out.push(' ');
            out.push_str(v);
        }
        out.push_str(" |");
        for v in &self.agent {
            out.push(' ');
            out.push_str(v);
        }
        out
    }
}

/// Bitvectors of length zero are written as `-`.
fn bits_to_string(bits: u32, width: usize) -> String {
    if width == 0 {
        return "-".to_string();
    }
    (0..width)
        .map(|i| if bits & (1 << i) != 0 { '1' } else { '0' })
        .collect()
}

fn parse_bits(text: &str, width: usize) -> Result<u32, VarError> {
    let bad = || VarError::BadBits {
        text: text.to_string(),
        expected: width,
    };
    if width == 0 {
        return if text == "-" { Ok(0) } else { Err(bad()) };
    }
    if text.len() != width {
        return Err(bad());
    }
    let mut bits = 0;
    for (i, c) in text.chars().enumerate() {
        match c {
            '0' => {}
            '1' => bits |= 1 << i,
            _ => return Err(bad()),
        }
    }
    Ok(bits)
}

/// An element of `2^(E ∪ A)`, bit `i` set iff variable `i` is true.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Symbol(pub u32);

/// An environment state, an element of `ℰ = 2^E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EnvState(pub u32);

/// An action, an element of `𝒜 = 2^A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Action(pub u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn holds(self, var: usize) -> bool {
        self.0 & (1 << var) != 0
    }
}

impl EnvState {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl Action {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
