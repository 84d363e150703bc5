//! Broadcast protocols and their asynchronous global machines.
//!
//! A protocol is a finite automaton over local actions, broadcasts `a` and
//! receptions `~a`. Its global machine of dimension `n` runs `n` copies that
//! share an environment holding the broadcasts not yet delivered to everyone.

mod run;
mod simulate;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use run::{check_run, delivered, env_law_holds, sent, Run, RunViolation};
pub use simulate::{enumerate_lasso_runs, simulate, Scheduler};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Action {
    Local(String),
    Broadcast(String),
    /// Reception of a broadcast message.
    Receive(String),
    Idle,
}

impl Action {
    pub fn is_idle(&self) -> bool {
        matches!(self, Action::Idle)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Local(a) | Action::Broadcast(a) => write!(f, "{a}"),
            Action::Receive(a) => write!(f, "~{a}"),
            Action::Idle => write!(f, "idle"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub from: String,
    pub action: Action,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Protocol {
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub local: Vec<String>,
    pub broadcast: Vec<String>,
    pub transitions: Vec<Transition>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProtocolViolation {
    pub severity: Severity,
    pub message: String,
}

/// One step of the global machine: local states, chosen actions and the
/// messages in transit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GlobalConfiguration {
    pub states: Vec<String>,
    pub actions: Vec<Action>,
    pub env: BTreeSet<String>,
}

impl Protocol {
    /// All actions except idle: local, broadcast and reception actions.
    pub fn actions(&self) -> Vec<Action> {
        let mut out: Vec<Action> = self
            .local
            .iter()
            .map(|a| Action::Local(a.clone()))
            .collect();
        out.extend(self.broadcast.iter().map(|a| Action::Broadcast(a.clone())));
        out.extend(self.broadcast.iter().map(|a| Action::Receive(a.clone())));
        out
    }

    /// Actions with at least one transition from `q`.
    pub fn enabled(&self, q: &str) -> Vec<Action> {
        let mut out: Vec<Action> = Vec::new();
        for t in &self.transitions {
            if t.from == q && !out.contains(&t.action) {
                out.push(t.action.clone());
            }
        }
        out.sort();
        out
    }

    pub fn targets(&self, q: &str, a: &Action) -> Vec<&str> {
        self.transitions
            .iter()
            .filter(|t| t.from == q && &t.action == a)
            .map(|t| t.to.as_str())
            .collect()
    }

    pub fn allows(&self, q: &str, a: &Action, r: &str) -> bool {
        self.transitions
            .iter()
            .any(|t| t.from == q && &t.action == a && t.to == r)
    }

    /// Parses the line-oriented protocol format: `states:`, `initial:`,
    /// `local:`, `broadcast:` followed by names, and `trans: q a r` lines
    /// with receptions written `~a`.
    pub fn parse(text: &str) -> Result<Protocol> {
        let mut p = Protocol {
            states: Vec::new(),
            initial: Vec::new(),
            local: Vec::new(),
            broadcast: Vec::new(),
            transitions: Vec::new(),
        };
        let mut trans: Vec<(usize, Vec<String>)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line.split_once(':').ok_or_else(|| {
                Error::InvalidProtocol(format!("line {}: expected `section: ...`", no + 1))
            })?;
            let words: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            match key.trim() {
                "states" => p.states.extend(words),
                "initial" => p.initial.extend(words),
                "local" => p.local.extend(words),
                "broadcast" => p.broadcast.extend(words),
                "trans" => trans.push((no + 1, words)),
                other => {
                    return Err(Error::InvalidProtocol(format!(
                        "line {}: unknown section `{other}`",
                        no + 1
                    )));
                }
            }
        }
        for (no, words) in trans {
            let [q, a, r] = words.as_slice() else {
                return Err(Error::InvalidProtocol(format!(
                    "line {no}: expected `trans: q action q'`"
                )));
            };
            let action = p.resolve_action(a).ok_or_else(|| {
                Error::InvalidProtocol(format!("line {no}: unknown action `{a}`"))
            })?;
            p.transitions.push(Transition {
                from: q.clone(),
                action,
                to: r.clone(),
            });
        }
        p.check_names()?;
        Ok(p)
    }

    fn resolve_action(&self, a: &str) -> Option<Action> {
        if let Some(m) = a.strip_prefix('~') {
            return self
                .broadcast
                .iter()
                .any(|b| b == m)
                .then(|| Action::Receive(m.to_string()));
        }
        if self.broadcast.iter().any(|b| b == a) {
            Some(Action::Broadcast(a.to_string()))
        } else if self.local.iter().any(|b| b == a) {
            Some(Action::Local(a.to_string()))
        } else {
            None
        }
    }

    fn check_names(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for s in &self.states {
            if !seen.insert(s) {
                return Err(Error::InvalidProtocol(format!(
                    "state `{s}` declared twice"
                )));
            }
        }
        let mut acts = BTreeSet::new();
        for a in self.local.iter().chain(&self.broadcast) {
            if a == "idle" || a.starts_with('~') {
                return Err(Error::InvalidProtocol(format!(
                    "`{a}` cannot name an action"
                )));
            }
            if !acts.insert(a) {
                return Err(Error::InvalidProtocol(format!(
                    "action `{a}` declared twice"
                )));
            }
        }
        for t in &self.transitions {
            for q in [&t.from, &t.to] {
                if !self.states.contains(q) {
                    return Err(Error::InvalidProtocol(format!(
                        "unknown state `{q}` in a transition"
                    )));
                }
            }
        }
        for q in &self.initial {
            if !self.states.contains(q) {
                return Err(Error::InvalidProtocol(format!(
                    "unknown initial state `{q}`"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.states.join(" "))?;
        writeln!(f, "initial: {}", self.initial.join(" "))?;
        if !self.local.is_empty() {
            writeln!(f, "local: {}", self.local.join(" "))?;
        }
        if !self.broadcast.is_empty() {
            writeln!(f, "broadcast: {}", self.broadcast.join(" "))?;
        }
        for t in &self.transitions {
            writeln!(f, "trans: {} {} {}", t.from, t.action, t.to)?;
        }
        Ok(())
    }
}

/// Checks the protocol definition. Structural problems are errors; a state
/// that cannot receive some message is reported as a warning, since the
/// FloodSet protocol itself has such states.
pub fn validate_protocol(p: &Protocol) -> Vec<ProtocolViolation> {
    let mut out = Vec::new();
    let mut error = |m: String| {
        out.push(ProtocolViolation {
            severity: Severity::Error,
            message: m,
        })
    };
    if p.states.is_empty() {
        error("no states".into());
    }
    if p.initial.is_empty() {
        error("no initial states".into());
    }
    if let Err(e) = p.check_names() {
        error(e.to_string());
    }
    for t in &p.transitions {
        let known = match &t.action {
            Action::Local(a) => p.local.contains(a),
            Action::Broadcast(a) | Action::Receive(a) => p.broadcast.contains(a),
            Action::Idle => false,
        };
        if !known {
            error(format!(
                "transition {} {} {} uses an undeclared action",
                t.from, t.action, t.to
            ));
        }
    }
    for a in &p.broadcast {
        let recv = Action::Receive(a.clone());
        for q in &p.states {
            if p.targets(q, &recv).is_empty() {
                out.push(ProtocolViolation {
                    severity: Severity::Warning,
                    message: format!("state {q} cannot receive {a}"),
                });
            }
        }
    }
    out
}

/// Whether `next_states` may follow `g` under the actions of `g`.
pub fn step(p: &Protocol, g: &GlobalConfiguration, next_states: &[String]) -> Result<bool> {
    let n = g.states.len();
    if g.actions.len() != n || next_states.len() != n {
        return Err(Error::InvalidRun(format!(
            "dimension mismatch: {} states, {} actions, {} next states",
            n,
            g.actions.len(),
            next_states.len()
        )));
    }
    Ok((0..n).all(|i| match &g.actions[i] {
        Action::Idle => g.states[i] == next_states[i],
        a => p.allows(&g.states[i], a, &next_states[i]),
    }))
}

/// The asynchronous FloodSet protocol: broadcast the input bit, then keep
/// the minimum bit seen.
pub fn floodset() -> Protocol {
    let s = |x: &str| x.to_string();
    let t = |from: &str, action: Action, to: &str| Transition {
        from: s(from),
        action,
        to: s(to),
    };
    let b = |m: &str| Action::Broadcast(s(m));
    let r = |m: &str| Action::Receive(s(m));
    Protocol {
        states: vec![s("i_0"), s("i_1"), s("o_0"), s("o_1")],
        initial: vec![s("i_0"), s("i_1")],
        local: Vec::new(),
        broadcast: vec![s("0"), s("1")],
        transitions: vec![
            t("i_0", b("0"), "o_0"),
            t("o_0", r("0"), "o_0"),
            t("o_0", r("1"), "o_0"),
            t("i_1", b("1"), "o_1"),
            t("o_1", r("0"), "o_0"),
            t("o_1", r("1"), "o_1"),
        ],
    }
}
