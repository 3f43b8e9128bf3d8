use thiserror::Error;

use super::{Formula, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("traces must be non-empty")]
    EmptyTrace,
    #[error("position {pos} outside trace of length {len}")]
    PositionOutOfRange { pos: usize, len: usize },
    #[error("primed atoms have no finite-trace meaning")]
    PrimedAtom,
}

/// Finite-trace satisfaction `(trace, pos) ⊨ f`.
///
/// This is the reference semantics every automaton construction in the
/// crate is tested against, so it is kept as a literal transcription of the
/// satisfaction relation rather than anything clever.
pub fn eval_finite(f: &Formula, trace: &[Symbol], pos: usize) -> Result<bool, EvalError> {
    if trace.is_empty() {
        return Err(EvalError::EmptyTrace);
    }
    if pos >= trace.len() {
        return Err(EvalError::PositionOutOfRange {
            pos,
            len: trace.len(),
        });
    }
    if f.has_primes() {
        return Err(EvalError::PrimedAtom);
    }
    Ok(sat(f, trace, pos))
}

fn sat(f: &Formula, t: &[Symbol], n: usize) -> bool {
    use Formula::*;
    let len = t.len();
    match f {
        True => true,
        False => false,
        Atom(a) => t[n].holds(a.var),
        Not(a) => !sat(a, t, n),
        And(a, b) => sat(a, t, n) && sat(b, t, n),
        Or(a, b) => sat(a, t, n) || sat(b, t, n),
        Implies(a, b) => !sat(a, t, n) || sat(b, t, n),
        Next(a) => n + 1 < len && sat(a, t, n + 1),
        WeakNext(a) => n + 1 >= len || sat(a, t, n + 1),
        Until(a, b) => (n..len).any(|i| sat(b, t, i) && (n..i).all(|j| sat(a, t, j))),
        Release(a, b) => (n..len).all(|i| sat(b, t, i) || (n..i).any(|j| sat(a, t, j))),
        Eventually(a) => (n..len).any(|i| sat(a, t, i)),
        Always(a) => (n..len).all(|i| sat(a, t, i)),
    }
}
