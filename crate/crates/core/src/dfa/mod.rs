//! Deterministic finite automata over the explicit joint alphabet `2^(E ∪ A)`.
//!
//! Words are non-empty: the empty word is never accepted, whatever the
//! finality of the initial state. All language-level operations
//! ([`Dfa::minimize`], [`Dfa::language_equal`]) are relative to non-empty
//! words.

mod minimize;

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::logic::{Symbol, VarTable};
use crate::text::{Acceptance, AutomatonText, TextError};

/// Boolean connective for automaton products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connective {
    And,
    Or,
    Implies,
}

impl Connective {
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            Connective::And => a && b,
            Connective::Or => a || b,
            Connective::Implies => !a || b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DfaError {
    #[error("automata are defined over different variable tables")]
    VocabularyMismatch,
    #[error("symbol {0} is outside the alphabet")]
    SymbolOutOfRange(Symbol),
    #[error("automaton has no states")]
    NoStates,
    #[error("state {0} is out of range")]
    StateOutOfRange(usize),
    #[error("transition table has {got} entries, expected {expected}")]
    TableSize { got: usize, expected: usize },
    #[error(transparent)]
    Text(#[from] TextError),
}

/// A DFA `(Q, q_in, T, F)` with `Q = 0..n` and a total transition table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    vars: Arc<VarTable>,
    initial: u32,
    /// Row-major `q * |Σ| + symbol`.
    trans: Vec<u32>,
    finals: Vec<bool>,
}

impl Dfa {
    pub fn new(
        vars: Arc<VarTable>,
        initial: usize,
        trans: Vec<u32>,
        finals: Vec<bool>,
    ) -> Result<Self, DfaError> {
        let n = finals.len();
        if n == 0 {
            return Err(DfaError::NoStates);
        }
        let expected = n * vars.num_symbols();
        if trans.len() != expected {
            return Err(DfaError::TableSize {
                got: trans.len(),
                expected,
            });
        }
        if initial >= n {
            return Err(DfaError::StateOutOfRange(initial));
        }
        if let Some(&bad) = trans.iter().find(|&&t| t as usize >= n) {
            return Err(DfaError::StateOutOfRange(bad as usize));
        }
        Ok(Dfa {
            vars,
            initial: initial as u32,
            trans,
            finals,
        })
    }

    /// Build from a transition function; `num_states` states, all checked.
    pub fn from_fn(
        vars: Arc<VarTable>,
        initial: usize,
        finals: Vec<bool>,
        mut next: impl FnMut(usize, Symbol) -> usize,
    ) -> Result<Self, DfaError> {
        let k = vars.num_symbols();
        let mut trans = Vec::with_capacity(finals.len() * k);
        for q in 0..finals.len() {
            for s in 0..k {
                trans.push(next(q, Symbol(s as u32)) as u32);
            }
        }
        Dfa::new(vars, initial, trans, finals)
    }

    /// One-state automaton accepting every non-empty word.
    pub fn universal(vars: Arc<VarTable>) -> Dfa {
        let k = vars.num_symbols();
        Dfa {
            vars,
            initial: 0,
            trans: vec![0; k],
            finals: vec![true],
        }
    }

    /// One-state automaton accepting nothing.
    pub fn empty(vars: Arc<VarTable>) -> Dfa {
        let mut d = Dfa::universal(vars);
        d.finals[0] = false;
        d
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn initial(&self) -> usize {
        self.initial as usize
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> &[bool] {
        &self.finals
    }

    #[inline]
    pub fn next(&self, q: usize, sym: Symbol) -> usize {
        self.trans[q * self.vars.num_symbols() + sym.index()] as usize
    }

    /// The successor row of `q`, indexed by symbol.
    pub fn row(&self, q: usize) -> &[u32] {
        let k = self.vars.num_symbols();
        &self.trans[q * k..(q + 1) * k]
    }

    fn check_vocab(&self, other: &Dfa) -> Result<(), DfaError> {
        if Arc::ptr_eq(&self.vars, &other.vars) || *self.vars == *other.vars {
            Ok(())
        } else {
            Err(DfaError::VocabularyMismatch)
        }
    }

    /// Run on `word`; the state reached, or an error for foreign symbols.
    pub fn run(&self, word: &[Symbol]) -> Result<usize, DfaError> {
        let k = self.vars.num_symbols();
        let mut q = self.initial();
        for &s in word {
            if s.index() >= k {
                return Err(DfaError::SymbolOutOfRange(s));
            }
            q = self.next(q, s);
        }
        Ok(q)
    }

    /// True iff `word` is non-empty and its run ends in a final state.
    pub fn accepts(&self, word: &[Symbol]) -> Result<bool, DfaError> {
        let q = self.run(word)?;
        Ok(!word.is_empty() && self.finals[q])
    }

    /// Product automaton restricted to reachable pairs.
    pub fn combine(&self, other: &Dfa, op: Connective) -> Result<Dfa, DfaError> {
        self.check_vocab(other)?;
        let k = self.vars.num_symbols();
        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut pairs = vec![(self.initial, other.initial)];
        index.insert(pairs[0], 0);
        let mut trans = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            for s in 0..k {
                let succ = (
                    self.trans[p as usize * k + s],
                    other.trans[q as usize * k + s],
                );
                let id = *index.entry(succ).or_insert_with(|| {
                    pairs.push(succ);
                    (pairs.len() - 1) as u32
                });
                trans.push(id);
            }
            i += 1;
        }
        let finals = pairs
            .iter()
            .map(|&(p, q)| op.apply(self.finals[p as usize], other.finals[q as usize]))
            .collect();
        Ok(Dfa {
            vars: self.vars.clone(),
            initial: 0,
            trans,
            finals,
        })
    }

    /// Same structure with `F ↦ Q ∖ F`.
    pub fn complement(&self) -> Dfa {
        Dfa {
            vars: self.vars.clone(),
            initial: self.initial,
            trans: self.trans.clone(),
            finals: self.finals.iter().map(|f| !f).collect(),
        }
    }

    /// States reachable from the initial state (including it).
    pub fn reachable(&self) -> Vec<bool> {
        let k = self.vars.num_symbols();
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([self.initial()]);
        seen[self.initial()] = true;
        while let Some(q) = queue.pop_front() {
            for &t in &self.trans[q * k..(q + 1) * k] {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    queue.push_back(t as usize);
                }
            }
        }
        seen
    }

    /// Exact equality of the accepted sets of non-empty words, by search
    /// of the pair graph for a finality mismatch reachable by a non-empty word.
    pub fn language_equal(&self, other: &Dfa) -> Result<bool, DfaError> {
        Ok(self.distinguishing_word(other)?.is_none())
    }

    /// A shortest non-empty word accepted by exactly one of the automata.
    pub fn distinguishing_word(&self, other: &Dfa) -> Result<Option<Vec<Symbol>>, DfaError> {
        self.check_vocab(other)?;
        let k = self.vars.num_symbols();
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        let mut queue = VecDeque::new();
        let start = (self.initial(), other.initial());
        for s in 0..k {
            let sym = Symbol(s as u32);
            let succ = (self.next(start.0, sym), other.next(start.1, sym));
            if seen.insert(succ) {
                queue.push_back((succ, vec![sym]));
            }
        }
        while let Some((pair, word)) = queue.pop_front() {
            if self.finals[pair.0] != other.finals[pair.1] {
                return Ok(Some(word));
            }
            for s in 0..k {
                let sym = Symbol(s as u32);
                let succ = (self.next(pair.0, sym), other.next(pair.1, sym));
                if seen.insert(succ) {
                    let mut w = word.clone();
                    w.push(sym);
                    queue.push_back((succ, w));
                }
            }
        }
        Ok(None)
    }

    pub fn to_text(&self) -> String {
        AutomatonText {
            vars: (*self.vars).clone(),
            initial: self.initial(),
            trans: self.trans.clone(),
            acceptance: Acceptance::Finals(self.finals.clone()),
        }
        .render()
    }

    pub fn from_text(text: &str) -> Result<Dfa, DfaError> {
        let parsed = AutomatonText::parse(text)?;
        let finals = match parsed.acceptance {
            Acceptance::Finals(f) => f,
            Acceptance::Colors(_) => return Err(TextError::WrongAcceptance("finals").into()),
        };
        Dfa::new(Arc::new(parsed.vars), parsed.initial, parsed.trans, finals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vars22() -> Arc<VarTable> {
        Arc::new(VarTable::new(["e1", "e2"], ["a1", "a2"]).unwrap())
    }

    fn random_dfa(rng: &mut ChaCha8Rng, vars: &Arc<VarTable>, n: usize) -> Dfa {
        let finals = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let k = vars.num_symbols();
        let trans = (0..n * k).map(|_| rng.gen_range(0..n) as u32).collect();
        Dfa::new(vars.clone(), rng.gen_range(0..n), trans, finals).unwrap()
    }

    /// All words of length `1..=max_len` over `k` symbols.
    fn words(k: u32, max_len: usize) -> Vec<Vec<Symbol>> {
        let mut out = Vec::new();
        let mut layer = vec![vec![]];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w: &Vec<Symbol>| {
                    (0..k).map(move |s| {
                        let mut w = w.clone();
                        w.push(Symbol(s));
                        w
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    fn bounded_equal(a: &Dfa, b: &Dfa, ws: &[Vec<Symbol>]) -> bool {
        ws.iter()
            .all(|w| a.accepts(w).unwrap() == b.accepts(w).unwrap())
    }

    #[test]
    fn empty_word_never_accepted() {
        let u = Dfa::universal(vars22());
        assert!(!u.accepts(&[]).unwrap());
        assert!(u.accepts(&[Symbol(3), Symbol(0)]).unwrap());
        assert!(matches!(
            u.accepts(&[Symbol(16)]),
            Err(DfaError::SymbolOutOfRange(_))
        ));
    }

    #[test]
    fn combine_identities() {
        let vars = vars22();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_dfa(&mut rng, &vars, 4);
        let u = Dfa::universal(vars.clone());
        assert!(m.combine(&u, Connective::And).unwrap().language_equal(&m).unwrap());
        assert!(m
            .combine(&m, Connective::Implies)
            .unwrap()
            .language_equal(&u)
            .unwrap());
        let other_vars = Arc::new(VarTable::new(["e1"], ["a1"]).unwrap());
        assert_eq!(
            m.combine(&Dfa::universal(other_vars), Connective::Or),
            Err(DfaError::VocabularyMismatch)
        );
    }

    #[test]
    fn combine_matches_pointwise_connective() {
        let vars = Arc::new(VarTable::new(["e"], ["a"]).unwrap());
        let ws = words(4, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m1 = random_dfa(&mut rng, &vars, 3);
            let m2 = random_dfa(&mut rng, &vars, 3);
            for op in [Connective::And, Connective::Or, Connective::Implies] {
                let p = m1.combine(&m2, op).unwrap();
                assert!(p.num_states() <= 9);
                for w in &ws {
                    let expected = op.apply(m1.accepts(w).unwrap(), m2.accepts(w).unwrap());
                    assert_eq!(p.accepts(w).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn complement_against_word_oracle() {
        let vars = Arc::new(VarTable::new(["e"], ["a"]).unwrap());
        let ws = words(4, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let m = random_dfa(&mut rng, &vars, 4);
            let c = m.complement();
            for w in &ws {
                assert_eq!(c.accepts(w).unwrap(), !m.accepts(w).unwrap());
            }
            assert!(c.complement().language_equal(&m).unwrap());
        }
        let u = Dfa::universal(vars.clone());
        assert!(u.complement().language_equal(&Dfa::empty(vars)).unwrap());
    }

    #[test]
    fn language_equal_agrees_with_enumeration() {
        let vars = Arc::new(VarTable::new(["e"], ["a"]).unwrap());
        let ws = words(4, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut equal_seen = 0;
        for _ in 0..100 {
            let n = rng.gen_range(1..=3);
            let m1 = random_dfa(&mut rng, &vars, n);
            // Half the pairs are built to be equal up to a relabelling.
            let m2 = if rng.gen_bool(0.5) {
                equal_seen += 1;
                m1.minimize()
            } else {
                {
                    let n2 = rng.gen_range(1..=3);
                    random_dfa(&mut rng, &vars, n2)
                }
            };
            let exact = m1.language_equal(&m2).unwrap();
            // For at most 3+3 states, words up to length 5 separate any two languages.
            assert_eq!(exact, bounded_equal(&m1, &m2, &ws));
        }
        assert!(equal_seen > 0);
        assert!(!Dfa::universal(vars.clone())
            .language_equal(&Dfa::empty(vars))
            .unwrap());
    }

    #[test]
    fn text_roundtrip() {
        let vars = vars22();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_dfa(&mut rng, &vars, 3);
        let back = Dfa::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
    }
}
