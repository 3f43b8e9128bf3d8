//! LTLf to DFA translation.
//!
//! The formula is brought into negation normal form and read as an
//! alternating automaton whose states are *obligations*: a subformula that
//! must hold from the next position on, tagged strong (a next position must
//! exist) or weak (the word may end instead). Transitions are positive
//! Boolean combinations of obligations, kept in disjunctive normal form, so
//! each disjunct (a *cube*, a set of obligations) is a state of the
//! equivalent NFA. Subset construction over antichains of cubes yields the
//! DFA, which is then minimised.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::dfa::Dfa;
use crate::logic::{Formula, Symbol, VarTable};

/// Cubes are bitsets over obligation ids.
type Cube = u128;
const MAX_OBLIGATIONS: usize = 128;
const MAX_DFA_STATES: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("formula mentions variable index {0} outside the variable table")]
    VocabularyMismatch(usize),
    #[error("primed atoms cannot be compiled; substitute them first")]
    PrimedAtom,
    #[error("formula needs {0} obligations, at most {MAX_OBLIGATIONS} are supported")]
    ClosureTooLarge(usize),
    #[error("determinisation exceeded {MAX_DFA_STATES} states")]
    TooManyStates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(usize, bool),
    And(u32, u32),
    Or(u32, u32),
    Next(u32),
    WeakNext(u32),
    Until(u32, u32),
    Release(u32, u32),
    Eventually(u32),
    Always(u32),
}

/// The alternating automaton of an NNF formula, restricted to the
/// obligations reachable from the initial one.
#[derive(Debug, Clone)]
pub struct Afa {
    vars: Arc<VarTable>,
    nodes: Vec<Node>,
    /// Obligation id to `(node, weak)`.
    obligations: Vec<(u32, bool)>,
    /// `delta[ob * |Σ| + sym]` is a DNF over obligations; `[]` is false, `[0]` is true.
    delta: Vec<Vec<Cube>>,
    /// Bits of the strong obligations; a cube may end the word iff it has none.
    strong_mask: Cube,
}

struct Builder<'a> {
    vars: &'a VarTable,
    nodes: Vec<Node>,
    node_ids: HashMap<Node, u32>,
    obligations: Vec<(u32, bool)>,
    ob_ids: HashMap<(u32, bool), u32>,
}

impl Builder<'_> {
    fn intern(&mut self, f: &Formula) -> Result<u32, CompileError> {
        use Formula::*;
        let node = match f {
            True => Node::True,
            False => Node::False,
            Atom(a) => {
                if a.primed {
                    return Err(CompileError::PrimedAtom);
                }
                if a.var >= self.vars.len() {
                    return Err(CompileError::VocabularyMismatch(a.var));
                }
                Node::Lit(a.var, true)
            }
            Not(inner) => match **inner {
                Atom(a) if !a.primed && a.var < self.vars.len() => Node::Lit(a.var, false),
                Atom(a) if a.primed => return Err(CompileError::PrimedAtom),
                Atom(a) => return Err(CompileError::VocabularyMismatch(a.var)),
                _ => unreachable!("input is in negation normal form"),
            },
            And(a, b) => Node::And(self.intern(a)?, self.intern(b)?),
            Or(a, b) => Node::Or(self.intern(a)?, self.intern(b)?),
            Implies(..) => unreachable!("input is in negation normal form"),
            Next(a) => Node::Next(self.intern(a)?),
            WeakNext(a) => Node::WeakNext(self.intern(a)?),
            Until(a, b) => Node::Until(self.intern(a)?, self.intern(b)?),
            Release(a, b) => Node::Release(self.intern(a)?, self.intern(b)?),
            Eventually(a) => Node::Eventually(self.intern(a)?),
            Always(a) => Node::Always(self.intern(a)?),
        };
        let next = self.nodes.len() as u32;
        Ok(*self.node_ids.entry(node).or_insert_with(|| {
            self.nodes.push(node);
            next
        }))
    }

    fn obligation(&mut self, node: u32, weak: bool) -> Result<Cube, CompileError> {
        let next = self.obligations.len() as u32;
        let id = *self.ob_ids.entry((node, weak)).or_insert(next);
        if id == next {
            self.obligations.push((node, weak));
            if self.obligations.len() > MAX_OBLIGATIONS {
                return Err(CompileError::ClosureTooLarge(self.obligations.len()));
            }
        }
        Ok(1 << id)
    }

    /// One-step unfolding of `node` on `sym`.
    fn step(&mut self, node: u32, sym: Symbol) -> Result<Vec<Cube>, CompileError> {
        Ok(match self.nodes[node as usize] {
            Node::True => vec![0],
            Node::False => vec![],
            Node::Lit(v, pos) => {
                if sym.holds(v) == pos {
                    vec![0]
                } else {
                    vec![]
                }
            }
            Node::And(a, b) => and(&self.step(a, sym)?, &self.step(b, sym)?),
            Node::Or(a, b) => or(&self.step(a, sym)?, &self.step(b, sym)?),
            Node::Next(a) => vec![self.obligation(a, false)?],
            Node::WeakNext(a) => vec![self.obligation(a, true)?],
            Node::Until(a, b) => {
                let stay = and(&self.step(a, sym)?, &[self.obligation(node, false)?]);
                or(&self.step(b, sym)?, &stay)
            }
            Node::Release(a, b) => {
                let stay = or(&self.step(a, sym)?, &[self.obligation(node, true)?]);
                and(&self.step(b, sym)?, &stay)
            }
            Node::Eventually(a) => or(&self.step(a, sym)?, &[self.obligation(node, false)?]),
            Node::Always(a) => and(&self.step(a, sym)?, &[self.obligation(node, true)?]),
        })
    }
}

/// Keep only subset-minimal cubes, sorted.
fn normalize(mut cubes: Vec<Cube>) -> Vec<Cube> {
    cubes.sort_by_key(|c| (c.count_ones(), *c));
    cubes.dedup();
    let mut out: Vec<Cube> = Vec::with_capacity(cubes.len());
    for c in cubes {
        if !out.iter().any(|&o| o & c == o) {
            out.push(c);
        }
    }
    out.sort_unstable();
    out
}

fn or(a: &[Cube], b: &[Cube]) -> Vec<Cube> {
    normalize(a.iter().chain(b).copied().collect())
}

fn and(a: &[Cube], b: &[Cube]) -> Vec<Cube> {
    normalize(a.iter().flat_map(|x| b.iter().map(move |y| x | y)).collect())
}

impl Afa {
    /// Build the automaton for `f` (converted to NNF first). The initial
    /// obligation is `(f, strong)`, which makes the empty word rejected.
    pub fn new(f: &Formula, vars: &Arc<VarTable>) -> Result<Afa, CompileError> {
        let nnf = f.to_nnf();
        let mut b = Builder {
            vars,
            nodes: Vec::new(),
            node_ids: HashMap::new(),
            obligations: Vec::new(),
            ob_ids: HashMap::new(),
        };
        let root = b.intern(&nnf)?;
        b.obligation(root, false)?;
        let mut delta = Vec::new();
        let mut i = 0;
        while i < b.obligations.len() {
            let node = b.obligations[i].0;
            for sym in vars.symbols() {
                delta.push(b.step(node, sym)?);
            }
            i += 1;
        }
        let strong_mask = b
            .obligations
            .iter()
            .enumerate()
            .filter(|(_, &(_, weak))| !weak)
            .fold(0, |m, (i, _)| m | (1 << i));
        Ok(Afa {
            vars: vars.clone(),
            nodes: b.nodes,
            obligations: b.obligations,
            delta,
            strong_mask,
        })
    }

    /// Number of obligations (alternating-automaton states).
    pub fn closure(&self) -> usize {
        self.obligations.len()
    }

    /// Number of distinct NNF subformulas.
    pub fn subformulas(&self) -> usize {
        self.nodes.len()
    }

    /// Successor cubes of `cube` on `sym`.
    fn cube_step(&self, cube: Cube, sym: usize) -> Vec<Cube> {
        let k = self.vars.num_symbols();
        let mut acc = vec![0];
        let mut rest = cube;
        while rest != 0 {
            let ob = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            acc = and(&acc, &self.delta[ob * k + sym]);
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    /// Subset construction over antichains of cubes (not minimised).
    pub fn determinize(&self) -> Result<Dfa, CompileError> {
        let k = self.vars.num_symbols();
        let mut cube_rows: HashMap<Cube, Vec<Vec<Cube>>> = HashMap::new();
        let init: Vec<Cube> = vec![1];
        let mut index: HashMap<Vec<Cube>, u32> = HashMap::from([(init.clone(), 0)]);
        let mut states = vec![init];
        let mut trans: Vec<u32> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(q) = queue.pop_front() {
            let set = states[q].clone();
            for &c in &set {
                cube_rows
                    .entry(c)
                    .or_insert_with(|| (0..k).map(|s| self.cube_step(c, s)).collect());
            }
            for s in 0..k {
                let succ = normalize(
                    set.iter()
                        .flat_map(|c| cube_rows[c][s].iter().copied())
                        .collect(),
                );
                let id = match index.get(&succ) {
                    Some(&id) => id,
                    None => {
                        let id = states.len() as u32;
                        if states.len() >= MAX_DFA_STATES {
                            return Err(CompileError::TooManyStates);
                        }
                        index.insert(succ.clone(), id);
                        states.push(succ);
                        queue.push_back(id as usize);
                        id
                    }
                };
                // Rows are filled in BFS order, which matches state ids.
                debug_assert_eq!(trans.len(), q * k + s);
                trans.push(id);
            }
        }
        let finals = states
            .iter()
            .map(|set| set.iter().any(|&c| c & self.strong_mask == 0))
            .collect();
        Ok(Dfa::new(self.vars.clone(), 0, trans, finals).expect("well-formed by construction"))
    }
}

/// Compile `f` into the canonical minimal DFA of its non-empty models.
pub fn compile(f: &Formula, vars: &Arc<VarTable>) -> Result<Dfa, CompileError> {
    Ok(Afa::new(f, vars)?.determinize()?.minimize())
}
