//! Runs of the global machine and the six run conditions.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{step, Action, GlobalConfiguration, Protocol};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Run {
    pub configs: Vec<GlobalConfiguration>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunViolation {
    /// Number of the violated run condition, 1 to 6.
    pub condition: u8,
    pub step: Option<usize>,
    pub message: String,
    /// The condition cannot be decided on this (finite) run.
    pub unverifiable: bool,
}

impl fmt::Display for RunViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {}", self.condition)?;
        if let Some(s) = self.step {
            write!(f, " at step {s}")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl Run {
    pub fn dimension(&self) -> usize {
        self.configs.first().map_or(0, |c| c.states.len())
    }

    /// The first `len` configurations of the ultimately periodic run that
    /// repeats `configs[lasso_start..]` forever.
    pub fn unroll(&self, lasso_start: usize, len: usize) -> Vec<GlobalConfiguration> {
        let period = self.configs.len() - lasso_start;
        (0..len)
            .map(|i| {
                let j = if i < self.configs.len() {
                    i
                } else {
                    lasso_start + (i - lasso_start) % period
                };
                self.configs[j].clone()
            })
            .collect()
    }

    /// One line per configuration: `step i | states: .. | actions: .. | env: {..}`.
    pub fn trace(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.configs.iter().enumerate() {
            let actions: Vec<String> = c.actions.iter().map(|a| a.to_string()).collect();
            let env: Vec<&str> = c.env.iter().map(String::as_str).collect();
            out.push_str(&format!(
                "step {} | states: {} | actions: {} | env: {{{}}}\n",
                i + 1,
                c.states.join(" "),
                actions.join(" "),
                env.join(", ")
            ));
        }
        out
    }
}

/// Messages broadcast in a configuration.
pub fn sent(g: &GlobalConfiguration) -> BTreeSet<String> {
    g.actions
        .iter()
        .filter_map(|a| match a {
            Action::Broadcast(m) => Some(m.clone()),
            _ => None,
        })
        .collect()
}

/// Messages delivered by step `k` (0-based): the most recent broadcast of
/// the message at or before `k` has been received by every machine since.
pub fn delivered(configs: &[GlobalConfiguration], k: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let n = configs[k].states.len();
    let mut msgs: BTreeSet<String> = BTreeSet::new();
    for c in &configs[..=k] {
        msgs.extend(sent(c));
    }
    for a in msgs {
        let Some(i) = (0..=k).rev().find(|&i| sent(&configs[i]).contains(&a)) else {
            continue;
        };
        let recv = Action::Receive(a.clone());
        if (0..n).all(|j| (i..=k).any(|l| configs[l].actions[j] == recv)) {
            out.insert(a);
        }
    }
    out
}

/// Whether `E_{i+1} = (E_i ∪ Sent_i) − Delivered_i` holds at every step of a finite sequence.
pub fn env_law_holds(configs: &[GlobalConfiguration]) -> bool {
    (0..configs.len().saturating_sub(1)).all(|i| expected_env(configs, i) == configs[i + 1].env)
}

fn expected_env(configs: &[GlobalConfiguration], i: usize) -> BTreeSet<String> {
    let mut e: BTreeSet<String> = configs[i].env.union(&sent(&configs[i])).cloned().collect();
    for a in delivered(configs, i) {
        e.remove(&a);
    }
    e
}

/// Checks the run conditions. With `lasso_start`, the run is the ultimately
/// periodic run looping back to that index and eventual delivery is decided
/// exactly; otherwise it is reported as unverifiable.
pub fn check_run(p: &Protocol, r: &Run, lasso_start: Option<usize>) -> Result<Vec<RunViolation>> {
    if r.configs.is_empty() {
        return Err(Error::InvalidRun("empty run".into()));
    }
    let n = r.dimension();
    if n == 0 {
        return Err(Error::InvalidRun("dimension 0".into()));
    }
    for (i, c) in r.configs.iter().enumerate() {
        if c.states.len() != n || c.actions.len() != n {
            return Err(Error::InvalidRun(format!(
                "configuration {} has the wrong dimension",
                i + 1
            )));
        }
        for q in &c.states {
            if !p.states.contains(q) {
                return Err(Error::InvalidRun(format!(
                    "unknown state `{q}` at step {}",
                    i + 1
                )));
            }
        }
        for m in &c.env {
            if !p.broadcast.contains(m) {
                return Err(Error::InvalidRun(format!(
                    "unknown message `{m}` at step {}",
                    i + 1
                )));
            }
        }
    }
    if let Some(l) = lasso_start {
        if l >= r.configs.len() {
            return Err(Error::InvalidRun("lasso start beyond the run".into()));
        }
    }
    let len = r.configs.len();
    // Past prefix + 2 periods every quantity is periodic; one more period
    // leaves room for deliveries owed by sends in the last distinct step.
    let configs = match lasso_start {
        Some(l) => r.unroll(l, l + 3 * (len - l)),
        None => r.configs.clone(),
    };
    let fold = |i: usize| match lasso_start {
        Some(l) if i >= len => l + (i - l) % (len - l),
        _ => i,
    };
    let mut out: Vec<RunViolation> = Vec::new();
    let mut v = |condition: u8, step: Option<usize>, message: String| {
        let step = step.map(|s| fold(s) + 1);
        if !out
            .iter()
            .any(|o| o.condition == condition && o.step == step && o.message == message)
        {
            out.push(RunViolation {
                condition,
                step,
                message,
                unverifiable: false,
            })
        }
    };
    for (j, q) in configs[0].states.iter().enumerate() {
        if !p.initial.contains(q) {
            v(
                1,
                Some(0),
                format!("machine {} starts in non-initial state {q}", j + 1),
            );
        }
    }
    if !configs[0].env.is_empty() {
        v(2, Some(0), "initial environment is not empty".into());
    }
    for i in 0..configs.len() {
        let last = i + 1 == configs.len();
        if !last && !step(p, &configs[i], &configs[i + 1].states)? {
            v(3, Some(i), "states do not follow the actions".into());
        }
        let now = sent(&configs[i]);
        for (j, a) in configs[i].actions.iter().enumerate() {
            if let Action::Receive(m) = a {
                if !configs[i].env.contains(m) && !now.contains(m) {
                    v(
                        5,
                        Some(i),
                        format!("machine {} receives {m}, which is not in transit", j + 1),
                    );
                }
            }
        }
        if !last && expected_env(&configs, i) != configs[i + 1].env {
            v(6, Some(i), "environment update law fails".into());
        }
    }
    match lasso_start {
        Some(_) => {
            for i in 0..len {
                for m in sent(&configs[i]) {
                    let recv = Action::Receive(m.clone());
                    for k in 0..n {
                        if !configs[i..].iter().any(|c| c.actions[k] == recv) {
                            v(4, Some(i), format!("machine {} never receives {m}", k + 1));
                        }
                    }
                }
            }
        }
        None => out.push(RunViolation {
            condition: 4,
            step: None,
            message: "condition 4 unverifiable on finite prefix".into(),
            unverifiable: true,
        }),
    }
    Ok(out)
}
