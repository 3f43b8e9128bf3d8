//! Seeded generators for test corpora: random automata, lassos, domains
//! and formulas, plus exhaustive enumeration of small NNF formulas.
//!
//! Every generator is a pure function of its RNG state, so a seed fixes
//! the whole corpus.

use std::collections::HashSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dfa::Dfa;
use crate::domain::Domain;
use crate::logic::{Atom, Formula, Symbol, VarTable};
use crate::parity::Dpw;

pub fn random_dfa(rng: &mut impl Rng, vars: &Arc<VarTable>, n: usize) -> Dfa {
    let k = vars.num_symbols();
    let finals = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let trans = (0..n * k).map(|_| rng.gen_range(0..n) as u32).collect();
    Dfa::new(vars.clone(), 0, trans, finals).expect("in range")
}

/// Colors drawn from `0..colors`.
pub fn random_dpw(rng: &mut impl Rng, vars: &Arc<VarTable>, n: usize, colors: u32) -> Dpw {
    let k = vars.num_symbols();
    let trans = (0..n * k).map(|_| rng.gen_range(0..n) as u32).collect();
    let cols = (0..n).map(|_| rng.gen_range(0..colors)).collect();
    Dpw::new(vars.clone(), 0, trans, cols).expect("in range")
}

/// A lasso `(prefix, loop)` with prefix length `< max_len` and loop length
/// in `1..=max_len`.
pub fn random_lasso(
    rng: &mut impl Rng,
    vars: &VarTable,
    max_len: usize,
) -> (Vec<Symbol>, Vec<Symbol>) {
    let k = vars.num_symbols() as u32;
    let p = rng.gen_range(0..max_len);
    let l = rng.gen_range(1..=max_len);
    let mut sym = || Symbol(rng.gen_range(0..k));
    ((0..p).map(|_| sym()).collect(), (0..l).map(|_| sym()).collect())
}

/// Random propositional formula over `atoms` of depth at most `depth`.
pub fn random_prop(rng: &mut impl Rng, atoms: &[Atom], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::Atom(*atoms.choose(rng).expect("non-empty")),
        };
    }
    let sub = |rng: &mut _| random_prop(rng, atoms, depth - 1);
    match rng.gen_range(0..4) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        _ => Formula::implies(sub(rng), sub(rng)),
    }
}

fn env_atoms(vars: &VarTable, primed: bool) -> Vec<Atom> {
    (0..vars.num_env()).map(|var| Atom { var, primed }).collect()
}

/// A valid domain whose parts are random formulas.
///
/// `pre` always admits the all-false action and `trans` is restricted to
/// `pre`; states or pairs left without successors get the identity effect.
/// `init` is retried until satisfiable.
pub fn random_domain(rng: &mut impl Rng, vars: &Arc<VarTable>, depth: usize) -> Domain {
    let env = env_atoms(vars, false);
    let all: Vec<Atom> = (0..vars.len()).map(|var| Atom { var, primed: false }).collect();
    let mut with_primes = all.clone();
    with_primes.extend(env_atoms(vars, true));

    let agent_vars: Vec<usize> = (vars.num_env()..vars.len()).collect();
    let idle = Formula::minterm(agent_vars, 0, false);
    loop {
        let init = random_prop(rng, &env, depth);
        let pre = Formula::or(random_prop(rng, &all, depth), idle.clone());
        let raw = random_prop(rng, &with_primes, depth + 1);
        let stay = Formula::conj((0..vars.num_env()).map(|v| {
            Formula::not(Formula::or(
                Formula::and(Formula::atom(v), Formula::not(Formula::primed(v))),
                Formula::and(Formula::not(Formula::atom(v)), Formula::primed(v)),
            ))
        }));
        // `raw` or, when `raw` leaves the pair stuck, the identity effect.
        let stuck = Formula::not(Formula::disj(
            vars.env_states()
                .map(|t| substitute_primes(&raw, t.0)),
        ));
        let delta = Formula::and(
            pre.clone(),
            Formula::or(raw.clone(), Formula::and(stuck, stay)),
        );
        let d = Domain::new(vars.clone(), init, pre, delta).expect("scopes respected");
        if d.validate().is_ok() {
            return d;
        }
    }
}

/// Replace primed atoms by the constants of `next`.
fn substitute_primes(f: &Formula, next: u32) -> Formula {
    use Formula::*;
    match f {
        Atom(a) if a.primed => {
            if next & (1 << a.var) != 0 {
                True
            } else {
                False
            }
        }
        True | False | Atom(_) => f.clone(),
        Not(a) => Formula::not(substitute_primes(a, next)),
        And(a, b) => Formula::and(substitute_primes(a, next), substitute_primes(b, next)),
        Or(a, b) => Formula::or(substitute_primes(a, next), substitute_primes(b, next)),
        Implies(a, b) => {
            Formula::implies(substitute_primes(a, next), substitute_primes(b, next))
        }
        _ => unreachable!("propositional"),
    }
}

/// A valid domain built from explicit random relations and encoded as
/// disjunctions of minterms. Every available pair has between one and
/// `max_effects` successors.
pub fn random_explicit_domain(
    rng: &mut impl Rng,
    vars: &Arc<VarTable>,
    max_effects: usize,
) -> Domain {
    let env_vars: Vec<usize> = (0..vars.num_env()).collect();
    let agent_vars: Vec<usize> = (vars.num_env()..vars.len()).collect();
    let state = |s: u32| Formula::minterm(env_vars.iter().copied(), s, false);
    let next = |s: u32| Formula::minterm(env_vars.iter().copied(), s, true);
    let action = |a: u32| Formula::minterm(agent_vars.iter().copied(), a, false);
    let ne = vars.num_env_states() as u32;
    let na = vars.num_actions() as u32;

    let mut init: Vec<u32> = (0..ne).filter(|_| rng.gen_bool(0.4)).collect();
    if init.is_empty() {
        init.push(rng.gen_range(0..ne));
    }
    let mut pre = Vec::new();
    let mut delta = Vec::new();
    for s in 0..ne {
        let mut avail: Vec<u32> = (0..na).filter(|_| rng.gen_bool(0.6)).collect();
        if avail.is_empty() {
            avail.push(rng.gen_range(0..na));
        }
        for a in avail {
            let sa = Formula::and(state(s), action(a));
            pre.push(sa.clone());
            let k = rng.gen_range(1..=max_effects.min(ne as usize));
            let mut targets: Vec<u32> = (0..ne).collect();
            targets.shuffle(rng);
            for &t in &targets[..k] {
                delta.push(Formula::and(sa.clone(), next(t)));
            }
        }
    }
    Domain::new(
        vars.clone(),
        Formula::disj(init.into_iter().map(state)),
        Formula::disj(pre),
        Formula::disj(delta),
    )
    .expect("scopes respected")
}

/// Every NNF formula over the variables of `vars` whose operator nesting
/// is at most `depth`, counting literals and constants as depth 0.
///
/// Operators: `& | U R` (binary) and `X WX F G` (unary). Commutative
/// operators get each unordered pair once; exact duplicates are removed.
pub fn nnf_formulas(vars: &VarTable, depth: usize) -> Vec<Formula> {
    let mut levels: Vec<Vec<Formula>> = Vec::new();
    let mut leaves = vec![Formula::True, Formula::False];
    for v in 0..vars.len() {
        leaves.push(Formula::atom(v));
        leaves.push(Formula::not(Formula::atom(v)));
    }
    levels.push(leaves);
    for _ in 0..depth {
        let below: Vec<Formula> = levels.iter().flatten().cloned().collect();
        let top = levels.last().expect("non-empty").clone();
        let is_top: HashSet<&Formula> = top.iter().collect();
        let mut next = Vec::new();
        for f in &top {
            next.push(Formula::next(f.clone()));
            next.push(Formula::weak_next(f.clone()));
            next.push(Formula::eventually(f.clone()));
            next.push(Formula::always(f.clone()));
        }
        // Binary nodes need at least one child from the previous level.
        for (i, a) in below.iter().enumerate() {
            for (j, b) in below.iter().enumerate() {
                if !is_top.contains(a) && !is_top.contains(b) {
                    continue;
                }
                if i <= j {
                    next.push(Formula::and(a.clone(), b.clone()));
                    next.push(Formula::or(a.clone(), b.clone()));
                }
                next.push(Formula::until(a.clone(), b.clone()));
                next.push(Formula::release(a.clone(), b.clone()));
            }
        }
        levels.push(next);
    }
    let mut seen = HashSet::new();
    levels
        .into_iter()
        .flatten()
        .filter(|f| seen.insert(f.clone()))
        .collect()
}
