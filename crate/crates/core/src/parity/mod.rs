//! Deterministic parity automata with max-even acceptance, their Boolean
//! combinations, and parity games played on them.

mod product;
mod zielonka;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::dfa::{Connective, Dfa};
use crate::logic::{Symbol, VarTable};
use crate::text::{Acceptance, AutomatonText, TextError};

pub use product::{MAX_COLOR_SUM, MAX_PRODUCT_STATES};
pub use zielonka::{
    dpw_agent_realizable, dpw_env_realizable, solve_parity_game, ParityRegions, ParitySolution,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpwError {
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
    #[error("lasso loop must be non-empty")]
    EmptyLoop,
    #[error("combined color count {0} exceeds the limit of {MAX_COLOR_SUM}")]
    TooManyColors(usize),
    #[error("product exceeds {MAX_PRODUCT_STATES} states")]
    TooManyStates,
    #[error(transparent)]
    Text(#[from] TextError),
}

/// A DPW `(Q, q_in, T, col)`; a run is accepting iff the largest color seen
/// infinitely often is even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dpw {
    vars: Arc<VarTable>,
    initial: u32,
    trans: Vec<u32>,
    colors: Vec<u32>,
}

impl Dpw {
    pub fn new(
        vars: Arc<VarTable>,
        initial: usize,
        trans: Vec<u32>,
        colors: Vec<u32>,
    ) -> Result<Self, DpwError> {
        let n = colors.len();
        if n == 0 {
            return Err(DpwError::NoStates);
        }
        let expected = n * vars.num_symbols();
        if trans.len() != expected {
            return Err(DpwError::TableSize {
                got: trans.len(),
                expected,
            });
        }
        if initial >= n {
            return Err(DpwError::StateOutOfRange(initial));
        }
        if let Some(&bad) = trans.iter().find(|&&t| t as usize >= n) {
            return Err(DpwError::StateOutOfRange(bad as usize));
        }
        Ok(Dpw {
            vars,
            initial: initial as u32,
            trans,
            colors,
        })
    }

    pub fn from_fn(
        vars: Arc<VarTable>,
        initial: usize,
        colors: Vec<u32>,
        mut next: impl FnMut(usize, Symbol) -> usize,
    ) -> Result<Self, DpwError> {
        let k = vars.num_symbols();
        let mut trans = Vec::with_capacity(colors.len() * k);
        for q in 0..colors.len() {
            for s in 0..k {
                trans.push(next(q, Symbol(s as u32)) as u32);
            }
        }
        Dpw::new(vars, initial, trans, colors)
    }

    /// One state of color 0: accepts every infinite word.
    pub fn universal(vars: Arc<VarTable>) -> Dpw {
        let k = vars.num_symbols();
        Dpw {
            vars,
            initial: 0,
            trans: vec![0; k],
            colors: vec![0],
        }
    }

    /// One state of color 1: accepts nothing.
    pub fn empty(vars: Arc<VarTable>) -> Dpw {
        let mut d = Dpw::universal(vars);
        d.colors[0] = 1;
        d
    }

    /// Same structure as `dfa`, color 0 on final states and 1 elsewhere.
    /// Accepts the words that leave `F` only finitely often.
    pub fn from_dfa_colors(dfa: &Dfa) -> Dpw {
        let colors = dfa.finals().iter().map(|&f| u32::from(!f)).collect();
        Dpw::new(
            dfa.vars().clone(),
            dfa.initial(),
            (0..dfa.num_states())
                .flat_map(|q| dfa.row(q).iter().copied())
                .collect(),
            colors,
        )
        .expect("same shape as the source DFA")
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn num_states(&self) -> usize {
        self.colors.len()
    }

    pub fn initial(&self) -> usize {
        self.initial as usize
    }

    pub fn color(&self, q: usize) -> u32 {
        self.colors[q]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// Number of distinct colors `|col(Q)|`.
    pub fn num_colors(&self) -> usize {
        let mut c = self.colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    #[inline]
    pub fn next(&self, q: usize, sym: Symbol) -> usize {
        self.trans[q * self.vars.num_symbols() + sym.index()] as usize
    }

    pub fn row(&self, q: usize) -> &[u32] {
        let k = self.vars.num_symbols();
        &self.trans[q * k..(q + 1) * k]
    }

    fn check_symbols(&self, word: &[Symbol]) -> Result<(), DpwError> {
        match word.iter().find(|s| s.index() >= self.vars.num_symbols()) {
            Some(&s) => Err(DpwError::SymbolOutOfRange(s)),
            None => Ok(()),
        }
    }

    /// Acceptance of the ultimately periodic word `prefix · loop^ω`.
    pub fn accepts_lasso(&self, prefix: &[Symbol], lp: &[Symbol]) -> Result<bool, DpwError> {
        if lp.is_empty() {
            return Err(DpwError::EmptyLoop);
        }
        self.check_symbols(prefix)?;
        self.check_symbols(lp)?;
        let mut q = self.initial();
        for &s in prefix {
            q = self.next(q, s);
        }
        // State at the start of each loop iteration; the first repeat closes the cycle.
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut starts = Vec::new();
        let mut maxima = Vec::new();
        while !seen.contains_key(&q) {
            seen.insert(q, starts.len());
            starts.push(q);
            let mut best = 0;
            for &s in lp {
                q = self.next(q, s);
                best = best.max(self.colors[q]);
            }
            maxima.push(best);
        }
        let from = seen[&q];
        let max = maxima[from..].iter().copied().max().unwrap_or(0);
        Ok(max % 2 == 0)
    }

    /// Same automaton with every color shifted by one.
    pub fn complement(&self) -> Dpw {
        Dpw {
            colors: self.colors.iter().map(|c| c + 1).collect(),
            ..self.clone()
        }
    }

    /// Relabel colors onto a contiguous range, keeping order and parity, so
    /// that equal-parity colors with no opposite color between them merge.
    pub fn compact_colors(&self) -> Dpw {
        let mut distinct = self.colors.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let mut map = HashMap::new();
        let mut cur = distinct[0] % 2;
        map.insert(distinct[0], cur);
        for w in distinct.windows(2) {
            if w[0] % 2 != w[1] % 2 {
                cur += 1;
            }
            map.insert(w[1], cur);
        }
        Dpw {
            colors: self.colors.iter().map(|c| map[c]).collect(),
            ..self.clone()
        }
    }

    /// Binary product; see [`Dpw::combine_all`].
    pub fn combine(&self, other: &Dpw, op: Connective) -> Result<Dpw, DpwError> {
        product::combine_all(&[self, other], |acc| op.apply(acc[0], acc[1]))
    }

    /// Product of several automata whose acceptance is `f` applied to the
    /// component acceptances, via an index appearance record over all
    /// component colors.
    pub fn combine_all(parts: &[&Dpw], f: impl Fn(&[bool]) -> bool) -> Result<Dpw, DpwError> {
        product::combine_all(parts, f)
    }

    pub fn to_text(&self) -> String {
        AutomatonText {
            vars: (*self.vars).clone(),
            initial: self.initial(),
            trans: self.trans.clone(),
            acceptance: Acceptance::Colors(self.colors.clone()),
        }
        .render()
    }

    pub fn from_text(text: &str) -> Result<Dpw, DpwError> {
        let parsed = AutomatonText::parse(text)?;
        let colors = match parsed.acceptance {
            Acceptance::Colors(c) => c,
            Acceptance::Finals(_) => return Err(TextError::WrongAcceptance("colors").into()),
        };
        Dpw::new(Arc::new(parsed.vars), parsed.initial, parsed.trans, colors)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_dpw(
        rng: &mut impl Rng,
        vars: &Arc<VarTable>,
        n: usize,
        colors: u32,
    ) -> Dpw {
        let k = vars.num_symbols();
        let trans = (0..n * k).map(|_| rng.gen_range(0..n) as u32).collect();
        let cols = (0..n).map(|_| rng.gen_range(0..colors)).collect();
        Dpw::new(vars.clone(), 0, trans, cols).unwrap()
    }

    pub(crate) fn random_lasso(rng: &mut impl Rng, k: u32) -> (Vec<Symbol>, Vec<Symbol>) {
        let p = rng.gen_range(0..4);
        let l = rng.gen_range(1..5);
        (
            (0..p).map(|_| Symbol(rng.gen_range(0..k))).collect(),
            (0..l).map(|_| Symbol(rng.gen_range(0..k))).collect(),
        )
    }

    fn ey() -> Arc<VarTable> {
        Arc::new(VarTable::new(["e"], ["a"]).unwrap())
    }

    #[test]
    fn constant_automata() {
        let v = ey();
        let (p, l) = (vec![Symbol(1)], vec![Symbol(2), Symbol(3)]);
        assert!(Dpw::universal(v.clone()).accepts_lasso(&p, &l).unwrap());
        assert!(!Dpw::empty(v.clone()).accepts_lasso(&p, &l).unwrap());
        assert_eq!(Dpw::universal(v.clone()).complement(), Dpw::empty(v.clone()));
        assert_eq!(
            Dpw::universal(v).accepts_lasso(&p, &[]),
            Err(DpwError::EmptyLoop)
        );
    }

    #[test]
    fn lasso_uses_colors_on_the_cycle_only() {
        // q0 -(a)-> q1 (color 3) ... q1 loops with color 3 except symbol 0 -> q2 (color 4) -> q2.
        let v = Arc::new(VarTable::new(Vec::<String>::new(), ["a"]).unwrap());
        let m = Dpw::new(v, 0, vec![1, 1, 2, 1, 2, 2], vec![0, 3, 4]).unwrap();
        assert!(!m.accepts_lasso(&[], &[Symbol(1)]).unwrap());
        assert!(m.accepts_lasso(&[Symbol(1)], &[Symbol(0)]).unwrap());
        // A loop whose start state only stabilises after one iteration.
        assert!(m.accepts_lasso(&[], &[Symbol(1), Symbol(0)]).unwrap());
    }

    #[test]
    fn complement_flips_lasso_acceptance() {
        let v = ey();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let m = random_dpw(&mut rng, &v, 5, 4);
            let c = m.complement();
            assert_eq!(c.num_states(), m.num_states());
            assert_eq!(c.num_colors(), m.num_colors());
            for _ in 0..100 {
                let (p, l) = random_lasso(&mut rng, 4);
                let a = m.accepts_lasso(&p, &l).unwrap();
                assert_eq!(c.accepts_lasso(&p, &l).unwrap(), !a);
                assert_eq!(c.complement().accepts_lasso(&p, &l).unwrap(), a);
            }
        }
    }

    #[test]
    fn compaction_preserves_acceptance() {
        let v = ey();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let m = random_dpw(&mut rng, &v, 5, 9);
            let c = m.compact_colors();
            assert!(c.num_colors() <= m.num_colors());
            let max = *c.colors().iter().max().unwrap() as usize;
            assert!(max < c.num_colors() + 1);
            for _ in 0..100 {
                let (p, l) = random_lasso(&mut rng, 4);
                assert_eq!(c.accepts_lasso(&p, &l), m.accepts_lasso(&p, &l));
            }
        }
    }

    #[test]
    fn text_roundtrip() {
        let v = ey();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_dpw(&mut rng, &v, 3, 3);
        assert_eq!(Dpw::from_text(&m.to_text()).unwrap(), m);
        assert!(Dfa::from_text(&m.to_text()).is_err());
    }
}
