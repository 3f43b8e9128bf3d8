//! Recursive-descent parser for the concrete formula syntax.
//!
//! Precedence, tightest first: `!`, then `X WX F G`, then `U R`
//! (right-associative), `&`, `|`, and `->` (right-associative).

use thiserror::Error;

use super::{Atom, Formula, VarTable};

/// Which variables a formula may mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomScope {
    /// Fluents only (domain `init`).
    Env,
    /// `E ∪ A` (goals, assumptions, `pre`).
    EnvAgent,
    /// `E ∪ A ∪ E'` (domain transition formula).
    EnvAgentPrimed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("column {col}: {msg}")]
    Syntax { col: usize, msg: String },
    #[error("column {col}: undeclared atom `{name}`")]
    UndeclaredAtom { col: usize, name: String },
    #[error("column {col}: `{name}` is not allowed here ({scope:?} scope)")]
    OutOfScope {
        col: usize,
        name: String,
        scope: AtomScope,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String, bool),
    True,
    False,
    Not,
    Next,
    WeakNext,
    Eventually,
    Always,
    Until,
    Release,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    Eof,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let col = i + 1;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Implies
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let primed = bytes.get(i) == Some(&b'\'');
                let tok = match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" => Tok::Next,
                    "WX" => Tok::WeakNext,
                    "F" => Tok::Eventually,
                    "G" => Tok::Always,
                    "U" => Tok::Until,
                    "R" => Tok::Release,
                    _ => {
                        if primed {
                            i += 1;
                        }
                        out.push((Tok::Ident(word.to_string(), primed), col));
                        continue;
                    }
                };
                if primed {
                    return Err(ParseError::Syntax {
                        col: i + 1,
                        msg: format!("keyword `{word}` cannot be primed"),
                    });
                }
                out.push((tok, col));
                continue;
            }
            other => {
                let ch = text[i..].chars().next().unwrap_or(other as char);
                return Err(ParseError::Syntax {
                    col,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, col));
        i += 1;
    }
    out.push((Tok::Eof, text.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a VarTable,
    scope: AtomScope,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            col: self.col(),
            msg: msg.into(),
        })
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.binary_temporal()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Formula::and(lhs, self.binary_temporal()?);
        }
        Ok(lhs)
    }

    fn binary_temporal(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        match self.peek() {
            Tok::Until => {
                self.bump();
                Ok(Formula::until(lhs, self.binary_temporal()?))
            }
            Tok::Release => {
                self.bump();
                Ok(Formula::release(lhs, self.binary_temporal()?))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let wrap: fn(Formula) -> Formula = match self.peek() {
            Tok::Not => Formula::not,
            Tok::Next => Formula::next,
            Tok::WeakNext => Formula::weak_next,
            Tok::Eventually => Formula::eventually,
            Tok::Always => Formula::always,
            _ => return self.primary(),
        };
        self.bump();
        Ok(wrap(self.unary()?))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let col = self.col();
        match self.bump() {
            Tok::True => Ok(Formula::True),
            Tok::False => Ok(Formula::False),
            Tok::LParen => {
                let inner = self.implication()?;
                if *self.peek() != Tok::RParen {
                    return self.error("expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name, primed) => self.atom(name, primed, col),
            Tok::Eof => Err(ParseError::Syntax {
                col,
                msg: "unexpected end of input".into(),
            }),
            other => Err(ParseError::Syntax {
                col,
                msg: format!("unexpected token {other:?}"),
            }),
        }
    }

    fn atom(&self, name: String, primed: bool, col: usize) -> Result<Formula, ParseError> {
        let display = if primed { format!("{name}'") } else { name.clone() };
        let Some(var) = self.vars.index_of(&name) else {
            return Err(ParseError::UndeclaredAtom { col, name: display });
        };
        let allowed = match self.scope {
            AtomScope::Env => self.vars.is_env(var) && !primed,
            AtomScope::EnvAgent => !primed,
            AtomScope::EnvAgentPrimed => !primed || self.vars.is_env(var),
        };
        if !allowed {
            return Err(ParseError::OutOfScope {
                col,
                name: display,
                scope: self.scope,
            });
        }
        Ok(Formula::Atom(Atom { var, primed }))
    }
}

/// Parse a formula over `E ∪ A`.
pub fn parse_formula(text: &str, vars: &VarTable) -> Result<Formula, ParseError> {
    parse_formula_in(text, vars, AtomScope::EnvAgent)
}

pub fn parse_formula_in(
    text: &str,
    vars: &VarTable,
    scope: AtomScope,
) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
        vars,
        scope,
    };
    let f = parser.implication()?;
    if *parser.peek() != Tok::Eof {
        return parser.error("trailing input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn yx() -> VarTable {
        VarTable::new(["y"], ["x"]).unwrap()
    }

    #[test]
    fn constants_and_implication() {
        let v = yx();
        assert_eq!(parse_formula("true", &v), Ok(Formula::True));
        assert_eq!(
            parse_formula("y -> x", &v),
            Ok(Formula::implies(Formula::atom(0), Formula::atom(1)))
        );
    }

    #[test]
    fn robot_room_constraint() {
        let v = VarTable::new(["R1", "R4"], ["Move"]).unwrap();
        let f = parse_formula("G((R1 & Move) -> X(R1 | R4))", &v).unwrap();
        let expected = Formula::always(Formula::implies(
            Formula::and(Formula::atom(0), Formula::atom(2)),
            Formula::next(Formula::or(Formula::atom(0), Formula::atom(1))),
        ));
        assert_eq!(f, expected);
    }

    #[test]
    fn precedence_and_associativity() {
        let v = VarTable::new(["a", "b"], ["c"]).unwrap();
        let p = |s: &str| parse_formula(s, &v).unwrap();
        assert_eq!(p("a | b & c"), p("a | (b & c)"));
        assert_eq!(p("a U b U c"), p("a U (b U c)"));
        assert_eq!(p("a -> b -> c"), p("a -> (b -> c)"));
        assert_eq!(p("a & b U c"), p("a & (b U c)"));
        assert_eq!(p("!a U b"), p("(!a) U b"));
        assert_eq!(p("X a & b"), p("(X a) & b"));
        assert_eq!(p("! X a"), Formula::not(Formula::next(Formula::atom(0))));
        assert_eq!(p("a | b | c"), p("(a | b) | c"));
    }

    #[test]
    fn errors_carry_position() {
        let v = yx();
        assert_eq!(
            parse_formula("y & z", &v),
            Err(ParseError::UndeclaredAtom {
                col: 5,
                name: "z".into()
            })
        );
        assert!(matches!(
            parse_formula("y & ", &v),
            Err(ParseError::Syntax { col: 5, .. })
        ));
        assert!(matches!(
            parse_formula("(y", &v),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_formula("y # x", &v),
            Err(ParseError::Syntax { col: 3, .. })
        ));
        assert!(matches!(
            parse_formula("y x", &v),
            Err(ParseError::Syntax { col: 3, .. })
        ));
    }

    #[test]
    fn scopes() {
        let v = yx();
        assert!(matches!(
            parse_formula_in("x", &v, AtomScope::Env),
            Err(ParseError::OutOfScope { .. })
        ));
        assert!(matches!(
            parse_formula("y'", &v),
            Err(ParseError::OutOfScope { .. })
        ));
        assert!(matches!(
            parse_formula_in("x'", &v, AtomScope::EnvAgentPrimed),
            Err(ParseError::OutOfScope { .. })
        ));
        assert_eq!(
            parse_formula_in("y'", &v, AtomScope::EnvAgentPrimed),
            Ok(Formula::primed(0))
        );
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::True),
            Just(Formula::False),
            (0usize..3).prop_map(Formula::atom),
        ];
        leaf.prop_recursive(4, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                inner.clone().prop_map(Formula::next),
                inner.clone().prop_map(Formula::weak_next),
                inner.clone().prop_map(Formula::eventually),
                inner.clone().prop_map(Formula::always),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::release(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(f in arb_formula()) {
            let v = VarTable::new(["a", "b"], ["c"]).unwrap();
            let text = f.display(&v).to_string();
            prop_assert_eq!(parse_formula(&text, &v).unwrap(), f);
        }
    }
}
