//! Problem files:
//!
//! ```text
//! semantics: finite          # or infinite; default finite
//! env: y
//! agent: x
//! domain: robot.domain       # optional; supplies the variables
//! assumption: y -> x         # formula, or @file with an automaton
//! goal: @goal.dpw
//! fair: false                # optional
//! ```
//!
//! Paths are resolved by the caller-provided loader.

use std::sync::Arc;

use super::{EngineError, Problem, Semantics, Spec};
use crate::dfa::Dfa;
use crate::domain::Domain;
use crate::logic::{parse_formula_in, AtomScope, VarTable};
use crate::parity::Dpw;
use crate::text::{Acceptance, AutomatonText};

const KEYS: [&str; 7] = ["semantics", "env", "agent", "domain", "assumption", "goal", "fair"];

fn load_spec(
    value: &str,
    line: usize,
    vars: &Arc<VarTable>,
    load: &mut dyn FnMut(&str) -> Result<String, String>,
) -> Result<Spec, EngineError> {
    let Some(path) = value.strip_prefix('@') else {
        return parse_formula_in(value, vars, AtomScope::EnvAgent)
            .map(Spec::Formula)
            .map_err(|error| EngineError::Formula { line, error });
    };
    let path = path.trim();
    let err = |msg: String| EngineError::Load {
        path: path.to_string(),
        msg,
    };
    let text = load(path).map_err(err)?;
    let parsed = AutomatonText::parse(&text).map_err(|e| err(e.to_string()))?;
    let spec = match parsed.acceptance {
        Acceptance::Finals(_) => Spec::Dfa(Dfa::from_text(&text).map_err(|e| err(e.to_string()))?),
        Acceptance::Colors(_) => Spec::Dpw(Dpw::from_text(&text).map_err(|e| err(e.to_string()))?),
    };
    Ok(spec)
}

impl Problem {
    /// Parse a problem file; `load` fetches the files it refers to.
    pub fn parse(
        text: &str,
        load: &mut dyn FnMut(&str) -> Result<String, String>,
    ) -> Result<Problem, EngineError> {
        let mut fields: [Option<(usize, &str)>; 7] = [None; 7];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: String| EngineError::Syntax { line: i + 1, msg };
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| syntax("expected `key: value`".into()))?;
            let slot = KEYS
                .iter()
                .position(|k| *k == key.trim())
                .ok_or_else(|| syntax(format!("unknown key `{}`", key.trim())))?;
            if fields[slot].is_some() {
                return Err(syntax(format!("`{}` given twice", KEYS[slot])));
            }
            fields[slot] = Some((i + 1, value.trim()));
        }
        let missing = |key: &str| EngineError::Syntax {
            line: 0,
            msg: format!("missing `{key}`"),
        };

        let semantics = match fields[0] {
            None | Some((_, "finite")) => Semantics::Finite,
            Some((_, "infinite")) => Semantics::Infinite,
            Some((line, other)) => {
                return Err(EngineError::Syntax {
                    line,
                    msg: format!("unknown semantics `{other}`"),
                })
            }
        };
        let fair = match fields[6] {
            None | Some((_, "false")) => false,
            Some((_, "true")) => true,
            Some((line, other)) => {
                return Err(EngineError::Syntax {
                    line,
                    msg: format!("`fair` must be true or false, got `{other}`"),
                })
            }
        };
        let declared = match (fields[1], fields[2]) {
            (None, None) => None,
            (env, agent) => {
                fn words(f: Option<(usize, &str)>) -> std::str::SplitWhitespace<'_> {
                    f.map_or("", |f| f.1).split_whitespace()
                }
                let v = VarTable::new(words(env), words(agent)).map_err(|e| EngineError::Syntax {
                    line: env.or(agent).map_or(0, |f| f.0),
                    msg: e.to_string(),
                })?;
                Some(Arc::new(v))
            }
        };
        let domain = match fields[3] {
            Some((_, path)) => {
                let text = load(path).map_err(|msg| EngineError::Load {
                    path: path.to_string(),
                    msg,
                })?;
                let d = Domain::parse(&text).map_err(|e| EngineError::Load {
                    path: path.to_string(),
                    msg: e.to_string(),
                })?;
                Some(d)
            }
            None => None,
        };
        let vars = match (&domain, declared) {
            (Some(d), Some(v)) if **d.vars() != *v => {
                return Err(EngineError::VocabularyMismatch("domain"))
            }
            (Some(d), _) => d.vars().clone(),
            (None, Some(v)) => v,
            (None, None) => return Err(missing("env")),
        };
        let (aline, atext) = fields[4].ok_or_else(|| missing("assumption"))?;
        let (gline, gtext) = fields[5].ok_or_else(|| missing("goal"))?;
        let assumption = load_spec(atext, aline, &vars, load)?;
        let goal = load_spec(gtext, gline, &vars, load)?;
        Ok(Problem {
            semantics,
            vars,
            domain,
            assumption,
            goal,
            fair,
        })
    }
}
