//! Line-oriented text format shared by DFAs and DPWs.
//!
//! ```text
//! vars: e1 e2 | a1
//! states: 3
//! initial: 0
//! finals: 2            (or `colors: 0 1 2`, one per state)
//! 0 010 1              one line per transition: src symbol-bits dst
//! ```
//!
//! Blank lines and `#` comments are ignored. Every `(state, symbol)` pair
//! must have exactly one transition.

use thiserror::Error;

use crate::logic::{VarError, VarTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("no transition for state {state} on {bits}")]
    MissingTransition { state: usize, bits: String },
    #[error("expected `{0}` acceptance")]
    WrongAcceptance(&'static str),
    #[error(transparent)]
    Vars(#[from] VarError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Acceptance {
    Finals(Vec<bool>),
    Colors(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonText {
    pub vars: VarTable,
    pub initial: usize,
    pub trans: Vec<u32>,
    pub acceptance: Acceptance,
}

impl AutomatonText {
    pub fn render(&self) -> String {
        let k = self.vars.num_symbols();
        let n = self.trans.len() / k;
        let mut out = String::new();
        out.push_str(&self.vars.header());
        out.push('\n');
        out.push_str(&format!("states: {n}\ninitial: {}\n", self.initial));
        match &self.acceptance {
            Acceptance::Finals(f) => {
                out.push_str("finals:");
                for (q, _) in f.iter().enumerate().filter(|(_, &b)| b) {
                    out.push_str(&format!(" {q}"));
                }
            }
            Acceptance::Colors(c) => {
                out.push_str("colors:");
                for col in c {
                    out.push_str(&format!(" {col}"));
                }
            }
        }
        out.push('\n');
        for q in 0..n {
            for s in self.vars.symbols() {
                let t = self.trans[q * k + s.index()];
                out.push_str(&format!("{q} {} {t}\n", self.vars.symbol_bits(s)));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<AutomatonText, TextError> {
        let mut vars = None;
        let mut states = None;
        let mut initial = None;
        let mut finals_line: Option<(usize, Vec<usize>)> = None;
        let mut colors: Option<Vec<u32>> = None;
        let mut trans: Option<Vec<u32>> = None;

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |msg: &str| TextError::Syntax {
                line: line_no,
                msg: msg.to_string(),
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("vars:") {
                let (e, a) = rest
                    .split_once('|')
                    .ok_or_else(|| err("`vars:` needs `|` between env and agent variables"))?;
                vars = Some(VarTable::new(
                    e.split_whitespace(),
                    a.split_whitespace(),
                )?);
            } else if let Some(rest) = line.strip_prefix("states:") {
                let n: usize = rest.trim().parse().map_err(|_| err("bad state count"))?;
                if n == 0 {
                    return Err(err("at least one state required"));
                }
                states = Some(n);
            } else if let Some(rest) = line.strip_prefix("initial:") {
                initial = Some(rest.trim().parse::<usize>().map_err(|_| err("bad initial state"))?);
            } else if let Some(rest) = line.strip_prefix("finals:") {
                let list = rest
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|_| err("bad final state")))
                    .collect::<Result<Vec<_>, _>>()?;
                finals_line = Some((line_no, list));
            } else if let Some(rest) = line.strip_prefix("colors:") {
                let list = rest
                    .split_whitespace()
                    .map(|t| t.parse::<u32>().map_err(|_| err("bad color")))
                    .collect::<Result<Vec<_>, _>>()?;
                colors = Some(list);
            } else {
                let v = vars.as_ref().ok_or(TextError::MissingHeader("vars"))?;
                let n = states.ok_or(TextError::MissingHeader("states"))?;
                let k = v.num_symbols();
                let table = trans.get_or_insert_with(|| vec![u32::MAX; n * k]);
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(err("transition must be `src bits dst`"));
                }
                let src: usize = parts[0].parse().map_err(|_| err("bad source state"))?;
                let sym = v.parse_symbol_bits(parts[1])?;
                let dst: usize = parts[2].parse().map_err(|_| err("bad target state"))?;
                if src >= n || dst >= n {
                    return Err(err("state out of range"));
                }
                let slot = &mut table[src * k + sym.index()];
                if *slot != u32::MAX {
                    return Err(err("duplicate transition"));
                }
                *slot = dst as u32;
            }
        }

        let vars = vars.ok_or(TextError::MissingHeader("vars"))?;
        let n = states.ok_or(TextError::MissingHeader("states"))?;
        let initial = initial.ok_or(TextError::MissingHeader("initial"))?;
        if initial >= n {
            return Err(TextError::Syntax {
                line: 0,
                msg: format!("initial state {initial} out of range"),
            });
        }
        let k = vars.num_symbols();
        let trans = trans.unwrap_or_else(|| vec![u32::MAX; n * k]);
        if let Some(pos) = trans.iter().position(|&t| t == u32::MAX) {
            return Err(TextError::MissingTransition {
                state: pos / k,
                bits: vars.symbol_bits(crate::logic::Symbol((pos % k) as u32)),
            });
        }
        let acceptance = match (finals_line, colors) {
            (Some(_), Some(_)) => {
                return Err(TextError::Syntax {
                    line: 0,
                    msg: "both `finals:` and `colors:` given".into(),
                })
            }
            (Some((line, list)), None) => {
                let mut f = vec![false; n];
                for q in list {
                    if q >= n {
                        return Err(TextError::Syntax {
                            line,
                            msg: format!("final state {q} out of range"),
                        });
                    }
                    f[q] = true;
                }
                Acceptance::Finals(f)
            }
            (None, Some(c)) => {
                if c.len() != n {
                    return Err(TextError::Syntax {
                        line: 0,
                        msg: format!("{} colors for {n} states", c.len()),
                    });
                }
                Acceptance::Colors(c)
            }
            (None, None) => return Err(TextError::MissingHeader("finals")),
        };
        Ok(AutomatonText {
            vars,
            initial,
            trans,
            acceptance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
vars: e | a
states: 2
initial: 0
finals: 1
# comment
0 00 0
0 10 1
0 01 0
0 11 1
1 00 1
1 10 1
1 01 1
1 11 1
";

    #[test]
    fn parses_and_renders() {
        let t = AutomatonText::parse(SAMPLE).unwrap();
        assert_eq!(t.initial, 0);
        assert_eq!(t.trans, vec![0, 1, 0, 1, 1, 1, 1, 1]);
        assert_eq!(t.acceptance, Acceptance::Finals(vec![false, true]));
        assert_eq!(AutomatonText::parse(&t.render()).unwrap(), t);
    }

    #[test]
    fn reports_missing_and_duplicate_transitions() {
        let missing = SAMPLE.replace("1 11 1\n", "");
        assert!(matches!(
            AutomatonText::parse(&missing),
            Err(TextError::MissingTransition { state: 1, .. })
        ));
        let dup = format!("{SAMPLE}1 11 0\n");
        assert!(matches!(
            AutomatonText::parse(&dup),
            Err(TextError::Syntax { line: 14, .. })
        ));
    }
}
