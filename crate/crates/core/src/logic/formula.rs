use std::fmt;

use thiserror::Error;

use super::VarTable;

/// A variable occurrence. `primed` atoms (`e'`) only appear in domain
/// transition formulas and refer to the successor environment state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub var: usize,
    pub primed: bool,
}

/// LTLf syntax tree. Derived connectives are kept as first-class nodes so
/// printed formulas stay readable; [`Formula::to_nnf`] gives the canonical
/// form consumed by the compiler.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// Strong next: a successor position exists and satisfies the operand.
    Next(Box<Formula>),
    /// Weak next: if a successor position exists it satisfies the operand.
    WeakNext(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("formula contains temporal operators where a propositional formula is required")]
    NotPropositional,
    #[error("primed variable `{0}'` is not an environment variable")]
    PrimedAgent(String),
}

impl Formula {
    pub fn atom(var: usize) -> Formula {
        Formula::Atom(Atom { var, primed: false })
    }

    pub fn primed(var: usize) -> Formula {
        Formula::Atom(Atom { var, primed: true })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn weak_next(f: Formula) -> Formula {
        Formula::WeakNext(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Formula {
        Formula::Release(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Formula) -> Formula {
        Formula::Eventually(Box::new(f))
    }

    pub fn always(f: Formula) -> Formula {
        Formula::Always(Box::new(f))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Conjunction of literals fixing every variable in `vars` to the
    /// corresponding bit of `bits`.
    pub fn minterm(vars: impl IntoIterator<Item = usize>, bits: u32, primed: bool) -> Formula {
        Formula::conj(vars.into_iter().enumerate().map(|(i, v)| {
            let atom = Formula::Atom(Atom { var: v, primed });
            if bits & (1 << i) != 0 {
                atom
            } else {
                Formula::not(atom)
            }
        }))
    }

    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            True | False | Atom(_) => vec![],
            Not(a) | Next(a) | WeakNext(a) | Eventually(a) | Always(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Release(a, b) => vec![a, b],
        }
    }

    /// Syntax-tree node count, the size measure `|φ|`.
    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        self.children()
            .iter()
            .map(|c| 1 + c.depth())
            .max()
            .unwrap_or(0)
    }

    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<Atom>) {
        if let Formula::Atom(a) = self {
            out.push(*a);
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    pub fn is_propositional(&self) -> bool {
        use Formula::*;
        match self {
            Next(_) | WeakNext(_) | Until(..) | Release(..) | Eventually(_) | Always(_) => false,
            _ => self.children().iter().all(|c| c.is_propositional()),
        }
    }

    pub fn has_primes(&self) -> bool {
        self.atoms().iter().any(|a| a.primed)
    }

    /// Negation normal form: negations only on atoms, `→` eliminated, and
    /// the dualities `X/WX`, `U/R`, `F/G` used to push negation inward.
    pub fn to_nnf(&self) -> Formula {
        self.nnf(false)
    }

    fn nnf(&self, neg: bool) -> Formula {
        use Formula::*;
        match (self, neg) {
            (True, false) | (False, true) => True,
            (True, true) | (False, false) => False,
            (Atom(a), false) => Atom(*a),
            (Atom(a), true) => Formula::not(Atom(*a)),
            (Not(a), _) => a.nnf(!neg),
            (And(a, b), false) => Formula::and(a.nnf(false), b.nnf(false)),
            (And(a, b), true) => Formula::or(a.nnf(true), b.nnf(true)),
            (Or(a, b), false) => Formula::or(a.nnf(false), b.nnf(false)),
            (Or(a, b), true) => Formula::and(a.nnf(true), b.nnf(true)),
            (Implies(a, b), false) => Formula::or(a.nnf(true), b.nnf(false)),
            (Implies(a, b), true) => Formula::and(a.nnf(false), b.nnf(true)),
            (Next(a), false) => Formula::next(a.nnf(false)),
            (Next(a), true) => Formula::weak_next(a.nnf(true)),
            (WeakNext(a), false) => Formula::weak_next(a.nnf(false)),
            (WeakNext(a), true) => Formula::next(a.nnf(true)),
            (Until(a, b), false) => Formula::until(a.nnf(false), b.nnf(false)),
            (Until(a, b), true) => Formula::release(a.nnf(true), b.nnf(true)),
            (Release(a, b), false) => Formula::release(a.nnf(false), b.nnf(false)),
            (Release(a, b), true) => Formula::until(a.nnf(true), b.nnf(true)),
            (Eventually(a), false) => Formula::eventually(a.nnf(false)),
            (Eventually(a), true) => Formula::always(a.nnf(true)),
            (Always(a), false) => Formula::always(a.nnf(false)),
            (Always(a), true) => Formula::eventually(a.nnf(true)),
        }
    }

    pub fn is_nnf(&self) -> bool {
        use Formula::*;
        match self {
            Implies(..) => false,
            Not(a) => matches!(**a, Atom(_)),
            _ => self.children().iter().all(|c| c.is_nnf()),
        }
    }

    /// Replace every primed atom `e'` by `X e` (or `WX e` when `weak`).
    pub fn prime_to_next(&self, vars: &VarTable, weak: bool) -> Result<Formula, FormulaError> {
        if !self.is_propositional() {
            return Err(FormulaError::NotPropositional);
        }
        self.replace_primes(vars, weak)
    }

    fn replace_primes(&self, vars: &VarTable, weak: bool) -> Result<Formula, FormulaError> {
        use Formula::*;
        Ok(match self {
            Atom(a) if a.primed => {
                if !vars.is_env(a.var) {
                    return Err(FormulaError::PrimedAgent(vars.name(a.var).to_string()));
                }
                let cur = Formula::atom(a.var);
                if weak {
                    Formula::weak_next(cur)
                } else {
                    Formula::next(cur)
                }
            }
            True | False | Atom(_) => self.clone(),
            Not(a) => Formula::not(a.replace_primes(vars, weak)?),
            And(a, b) => Formula::and(a.replace_primes(vars, weak)?, b.replace_primes(vars, weak)?),
            Or(a, b) => Formula::or(a.replace_primes(vars, weak)?, b.replace_primes(vars, weak)?),
            Implies(a, b) => {
                Formula::implies(a.replace_primes(vars, weak)?, b.replace_primes(vars, weak)?)
            }
            _ => return Err(FormulaError::NotPropositional),
        })
    }

    /// Evaluate a propositional formula. `current` assigns `E ∪ A` in
    /// variable order; `next_env` assigns the primed fluents.
    /// Returns `None` on temporal operators.
    pub fn eval_prop(&self, current: u32, next_env: u32) -> Option<bool> {
        use Formula::*;
        Some(match self {
            True => true,
            False => false,
            Atom(a) if a.primed => next_env & (1 << a.var) != 0,
            Atom(a) => current & (1 << a.var) != 0,
            Not(a) => !a.eval_prop(current, next_env)?,
            And(a, b) => a.eval_prop(current, next_env)? & b.eval_prop(current, next_env)?,
            Or(a, b) => a.eval_prop(current, next_env)? | b.eval_prop(current, next_env)?,
            Implies(a, b) => !a.eval_prop(current, next_env)? | b.eval_prop(current, next_env)?,
            _ => return None,
        })
    }

    pub fn display<'a>(&'a self, vars: &'a VarTable) -> FormulaDisplay<'a> {
        FormulaDisplay { formula: self, vars }
    }
}

/// Pretty-printer producing text accepted by [`super::parse_formula_in`],
/// with the minimum parentheses needed for the structure to round-trip.
pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    vars: &'a VarTable,
}

const P_IMPLIES: u8 = 1;
const P_OR: u8 = 2;
const P_AND: u8 = 3;
const P_UNTIL: u8 = 4;
const P_UNARY: u8 = 5;
const P_ATOM: u8 = 6;

fn precedence(f: &Formula) -> u8 {
    use Formula::*;
    match f {
        True | False | Atom(_) => P_ATOM,
        Not(_) | Next(_) | WeakNext(_) | Eventually(_) | Always(_) => P_UNARY,
        Until(..) | Release(..) => P_UNTIL,
        And(..) => P_AND,
        Or(..) => P_OR,
        Implies(..) => P_IMPLIES,
    }
}

impl FormulaDisplay<'_> {
    fn write(&self, f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match f {
            True => out.write_str("true"),
            False => out.write_str("false"),
            Atom(a) => {
                out.write_str(self.vars.name(a.var))?;
                if a.primed {
                    out.write_str("'")?;
                }
                Ok(())
            }
            Not(a) => {
                out.write_str("!")?;
                self.child(a, P_UNARY, out)
            }
            Next(a) => self.prefix("X ", a, out),
            WeakNext(a) => self.prefix("WX ", a, out),
            Eventually(a) => self.prefix("F ", a, out),
            Always(a) => self.prefix("G ", a, out),
            And(a, b) => self.infix(a, " & ", b, P_AND, false, out),
            Or(a, b) => self.infix(a, " | ", b, P_OR, false, out),
            Implies(a, b) => self.infix(a, " -> ", b, P_IMPLIES, true, out),
            Until(a, b) => self.infix(a, " U ", b, P_UNTIL, true, out),
            Release(a, b) => self.infix(a, " R ", b, P_UNTIL, true, out),
        }
    }

    fn prefix(&self, op: &str, a: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(op)?;
        self.child(a, P_UNARY, out)
    }

    fn infix(
        &self,
        a: &Formula,
        op: &str,
        b: &Formula,
        level: u8,
        right_assoc: bool,
        out: &mut fmt::Formatter<'_>,
    ) -> fmt::Result {
        let (left_min, right_min) = if right_assoc {
            (level + 1, level)
        } else {
            (level, level + 1)
        };
        self.child(a, left_min, out)?;
        out.write_str(op)?;
        self.child(b, right_min, out)
    }

    fn child(&self, f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if precedence(f) < min {
            out.write_str("(")?;
            self.write(f, out)?;
            out.write_str(")")
        } else {
            self.write(f, out)
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.formula, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, parse_formula_in, AtomScope};

    fn vars() -> VarTable {
        VarTable::new(["a", "b"], ["c"]).unwrap()
    }

    #[test]
    fn nnf_examples() {
        let v = vars();
        let p = |s: &str| parse_formula(s, &v).unwrap();
        assert_eq!(p("!(a & b)").to_nnf(), p("!a | !b"));
        assert_eq!(p("!X a").to_nnf(), p("WX !a"));
        assert_eq!(p("!!a").to_nnf(), p("a"));
        assert_eq!(p("!(a U b)").to_nnf(), p("!a R !b"));
        assert_eq!(p("!F a").to_nnf(), p("G !a"));
        assert_eq!(p("a -> b").to_nnf(), p("!a | b"));
        assert!(p("!(a -> X !b)").to_nnf().is_nnf());
    }

    #[test]
    fn printer_parenthesizes_minimally() {
        let v = vars();
        let p = |s: &str| parse_formula(s, &v).unwrap();
        let show = |s: &str| p(s).display(&v).to_string();
        assert_eq!(show("(a & b) & c"), "a & b & c");
        assert_eq!(show("a & (b & c)"), "a & (b & c)");
        assert_eq!(show("a -> (b -> c)"), "a -> b -> c");
        assert_eq!(show("(a -> b) -> c"), "(a -> b) -> c");
        assert_eq!(show("X (a U b)"), "X (a U b)");
        assert_eq!(show("(a U b) U c"), "(a U b) U c");
        assert_eq!(show("!(a | b)"), "!(a | b)");
        assert_eq!(show("WX !a"), "WX !a");
    }

    #[test]
    fn prime_to_next_substitutes() {
        let v = VarTable::new(["e1", "e2"], ["a"]).unwrap();
        let d = parse_formula_in("e1' & !e2'", &v, AtomScope::EnvAgentPrimed).unwrap();
        let weak = d.prime_to_next(&v, true).unwrap();
        assert_eq!(weak, parse_formula("WX e1 & !WX e2", &v).unwrap());
        assert!(weak.node_count() <= d.node_count() + 2);
        let strong = d.prime_to_next(&v, false).unwrap();
        assert_eq!(strong, parse_formula("X e1 & !X e2", &v).unwrap());
        let plain = parse_formula("e1 | a", &v).unwrap();
        assert_eq!(plain.prime_to_next(&v, true).unwrap(), plain);
    }

    #[test]
    fn prime_to_next_errors() {
        let v = VarTable::new(["e"], ["a"]).unwrap();
        let bad = Formula::primed(1);
        assert_eq!(
            bad.prime_to_next(&v, true),
            Err(FormulaError::PrimedAgent("a".into()))
        );
        let temporal = parse_formula("X e", &v).unwrap();
        assert_eq!(
            temporal.prime_to_next(&v, true),
            Err(FormulaError::NotPropositional)
        );
    }

    #[test]
    fn eval_prop_reads_primes_from_next_state() {
        let v = VarTable::new(["e"], ["a"]).unwrap();
        let d = parse_formula_in("a -> e'", &v, AtomScope::EnvAgentPrimed).unwrap();
        assert_eq!(d.eval_prop(0b10, 0), Some(false));
        assert_eq!(d.eval_prop(0b10, 1), Some(true));
        assert_eq!(d.eval_prop(0b00, 0), Some(true));
        assert_eq!(Formula::next(Formula::True).eval_prop(0, 0), None);
    }
}
