//! Domain files:
//!
//! ```text
//! env: R1 R4
//! agent: Move
//! init: R1 & !R4
//! pre: true
//! trans: (R1 & Move) -> (R1' | R4')
//! ```

use std::sync::Arc;

use super::{Domain, DomainError};
use crate::logic::{parse_formula_in, AtomScope, VarTable};

impl Domain {
    pub fn parse(text: &str) -> Result<Domain, DomainError> {
        let mut fields: [Option<(usize, &str)>; 5] = [None; 5];
        const KEYS: [&str; 5] = ["env", "agent", "init", "pre", "trans"];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: String| DomainError::Syntax { line: i + 1, msg };
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
        let get = |slot: usize| {
            fields[slot].ok_or(DomainError::Syntax {
                line: 0,
                msg: format!("missing `{}`", KEYS[slot]),
            })
        };
        let env = get(0)?.1.split_whitespace();
        let agent = fields[1].map_or("", |f| f.1).split_whitespace();
        let vars = Arc::new(VarTable::new(env, agent)?);
        let formula = |slot: usize, scope: AtomScope| {
            let (line, text) = get(slot)?;
            parse_formula_in(text, &vars, scope).map_err(|source| DomainError::Formula { line, source })
        };
        let init = formula(2, AtomScope::Env)?;
        let pre = formula(3, AtomScope::EnvAgent)?;
        let delta = formula(4, AtomScope::EnvAgentPrimed)?;
        Domain::new(vars.clone(), init, pre, delta)
    }

    pub fn to_text(&self) -> String {
        let v = &self.vars;
        format!(
            "env: {}\nagent: {}\ninit: {}\npre: {}\ntrans: {}\n",
            v.env_vars().join(" "),
            v.agent_vars().join(" "),
            self.init.display(v),
            self.pre.display(v),
            self.delta.display(v),
        )
    }
}
