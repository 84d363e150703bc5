//! Schedulers, random simulation and exhaustive enumeration of short lasso runs.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::run::{check_run, delivered, sent};
use super::{validate_protocol, Action, GlobalConfiguration, Protocol, Run, Severity};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheduler {
    /// Machines act at random, preferring deliveries they still owe.
    FairRandom,
    /// A machine may stay idle for at most `k` consecutive steps while it
    /// has an action available.
    AdversarialIdle(usize),
    /// No machine idles while it can act; messages are received as soon as possible.
    Synchronous,
}

impl FromStr for Scheduler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scheduler> {
        match s {
            "fair-random" => Ok(Scheduler::FairRandom),
            "synchronous" => Ok(Scheduler::Synchronous),
            _ => s
                .strip_prefix("adversarial-idle:")
                .and_then(|k| k.parse().ok())
                .map(Scheduler::AdversarialIdle)
                .ok_or_else(|| Error::InvalidRun(format!("unknown scheduler `{s}`"))),
        }
    }
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheduler::FairRandom => write!(f, "fair-random"),
            Scheduler::AdversarialIdle(k) => write!(f, "adversarial-idle:{k}"),
            Scheduler::Synchronous => write!(f, "synchronous"),
        }
    }
}

impl Scheduler {
    fn idle_bound(self) -> Option<usize> {
        match self {
            Scheduler::FairRandom => None,
            Scheduler::AdversarialIdle(k) => Some(k),
            Scheduler::Synchronous => Some(0),
        }
    }

    /// Whether the scheduler could have produced the idle pattern of `configs`.
    pub fn admits(self, p: &Protocol, configs: &[GlobalConfiguration]) -> bool {
        let Some(k) = self.idle_bound() else {
            return true;
        };
        let n = configs.first().map_or(0, |c| c.states.len());
        for j in 0..n {
            let mut streak = 0;
            for c in configs {
                if c.actions[j].is_idle() && can_act(p, c, j) {
                    streak += 1;
                    if streak > k {
                        return false;
                    }
                } else {
                    streak = 0;
                }
            }
        }
        true
    }
}

/// Whether machine `j` had a non-idle action available in `c`.
fn can_act(p: &Protocol, c: &GlobalConfiguration, j: usize) -> bool {
    let now = sent(c);
    p.enabled(&c.states[j]).iter().any(|a| match a {
        Action::Receive(m) => c.env.contains(m) || now.contains(m),
        _ => true,
    })
}

fn next_env(history: &[GlobalConfiguration]) -> BTreeSet<String> {
    let i = history.len() - 1;
    let mut e: BTreeSet<String> = history[i].env.union(&sent(&history[i])).cloned().collect();
    for a in delivered(history, i) {
        e.remove(&a);
    }
    e
}

struct Sim<'a> {
    p: &'a Protocol,
    rng: ChaCha8Rng,
    /// Messages each machine received since their latest broadcast.
    got: Vec<BTreeSet<String>>,
    idle_streak: Vec<usize>,
}

impl Sim<'_> {
    fn choose(
        &mut self,
        scheduler: Scheduler,
        states: &[String],
        env: &BTreeSet<String>,
    ) -> Vec<Action> {
        let n = states.len();
        let wants_to_act: Vec<bool> = (0..n)
            .map(|j| match scheduler {
                Scheduler::Synchronous => true,
                Scheduler::FairRandom => self.rng.gen_ratio(3, 4),
                Scheduler::AdversarialIdle(k) => self.idle_streak[j] >= k || self.rng.gen_bool(0.5),
            })
            .collect();
        let mut actions = vec![Action::Idle; n];
        // Broadcasts and local actions first, so that receptions may use
        // messages sent in the same step.
        let mut receivers = Vec::new();
        for j in 0..n {
            if !wants_to_act[j] {
                continue;
            }
            let enabled = self.p.enabled(&states[j]);
            let pending: Vec<&Action> = enabled
                .iter()
                .filter(|a| matches!(a, Action::Receive(m) if env.contains(m) && !self.got[j].contains(m)))
                .collect();
            let own: Vec<&Action> = enabled
                .iter()
                .filter(|a| !matches!(a, Action::Receive(_)))
                .collect();
            if pending.is_empty() && !own.is_empty() {
                actions[j] = (*own.choose(&mut self.rng).unwrap()).clone();
            } else {
                receivers.push(j);
            }
        }
        let fresh: BTreeSet<String> = actions
            .iter()
            .filter_map(|a| match a {
                Action::Broadcast(m) => Some(m.clone()),
                _ => None,
            })
            .collect();
        for m in &fresh {
            for g in &mut self.got {
                g.remove(m);
            }
        }
        for j in receivers {
            let enabled = self.p.enabled(&states[j]);
            let pending: Vec<&Action> = enabled
                .iter()
                .filter(|a| {
                    matches!(a, Action::Receive(m)
                        if (env.contains(m) || fresh.contains(m)) && !self.got[j].contains(m))
                })
                .collect();
            let forced = match scheduler {
                Scheduler::Synchronous => true,
                Scheduler::AdversarialIdle(k) => self.idle_streak[j] >= k,
                Scheduler::FairRandom => false,
            };
            let any: Vec<&Action> = enabled
                .iter()
                .filter(|a| matches!(a, Action::Receive(m) if env.contains(m) || fresh.contains(m)))
                .collect();
            if let Some(a) = pending.choose(&mut self.rng) {
                actions[j] = (*a).clone();
            } else if forced {
                if let Some(a) = any.choose(&mut self.rng) {
                    actions[j] = (*a).clone();
                }
            }
        }
        for j in 0..n {
            if let Action::Receive(m) = &actions[j] {
                self.got[j].insert(m.clone());
            }
            self.idle_streak[j] = if actions[j].is_idle() {
                self.idle_streak[j] + 1
            } else {
                0
            };
        }
        actions
    }
}

/// A run prefix of `horizon` configurations of the global machine of
/// dimension `n`; deterministic given the seed.
pub fn simulate(
    p: &Protocol,
    n: usize,
    scheduler: Scheduler,
    horizon: usize,
    seed: u64,
) -> Result<Run> {
    if n == 0 || horizon == 0 {
        return Err(Error::InvalidRun(
            "dimension and horizon must be positive".into(),
        ));
    }
    if let Some(e) = validate_protocol(p)
        .into_iter()
        .find(|v| v.severity == Severity::Error)
    {
        return Err(Error::InvalidProtocol(e.message));
    }
    let mut sim = Sim {
        p,
        rng: ChaCha8Rng::seed_from_u64(seed),
        got: vec![BTreeSet::new(); n],
        idle_streak: vec![0; n],
    };
    let mut states: Vec<String> = (0..n)
        .map(|_| p.initial.choose(&mut sim.rng).unwrap().clone())
        .collect();
    let mut env = BTreeSet::new();
    let mut configs: Vec<GlobalConfiguration> = Vec::with_capacity(horizon);
    for i in 0..horizon {
        let actions = sim.choose(scheduler, &states, &env);
        configs.push(GlobalConfiguration {
            states: states.clone(),
            actions: actions.clone(),
            env: env.clone(),
        });
        if i + 1 == horizon {
            break;
        }
        states = states
            .iter()
            .zip(&actions)
            .map(|(q, a)| match a {
                Action::Idle => q.clone(),
                a => p.targets(q, a).choose(&mut sim.rng).unwrap().to_string(),
            })
            .collect();
        env = next_env(&configs);
    }
    Ok(Run { configs })
}

/// Every lasso run of dimension `n` with at most `max_len` distinct
/// configurations that satisfies all run conditions and is admitted by the
/// scheduler, with its loop start.
pub fn enumerate_lasso_runs(
    p: &Protocol,
    n: usize,
    max_len: usize,
    scheduler: Scheduler,
) -> Result<Vec<(Run, usize)>> {
    let mut out = Vec::new();
    let mut starts: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..n {
        starts = starts
            .into_iter()
            .flat_map(|s| {
                p.initial.iter().map(move |q| {
                    let mut t = s.clone();
                    t.push(q.clone());
                    t
                })
            })
            .collect();
    }
    for s in starts {
        let mut history = Vec::new();
        extend(
            p,
            max_len,
            scheduler,
            s,
            BTreeSet::new(),
            &mut history,
            &mut out,
        )?;
    }
    Ok(out)
}

fn extend(
    p: &Protocol,
    max_len: usize,
    scheduler: Scheduler,
    states: Vec<String>,
    env: BTreeSet<String>,
    history: &mut Vec<GlobalConfiguration>,
    out: &mut Vec<(Run, usize)>,
) -> Result<()> {
    let mut choices: Vec<Vec<Action>> = vec![Vec::new()];
    for q in &states {
        let mut own = vec![Action::Idle];
        own.extend(p.enabled(q));
        choices = choices
            .into_iter()
            .flat_map(|c| {
                own.iter().map(move |a| {
                    let mut d = c.clone();
                    d.push(a.clone());
                    d
                })
            })
            .collect();
    }
    for actions in choices {
        let c = GlobalConfiguration {
            states: states.clone(),
            actions,
            env: env.clone(),
        };
        let now = sent(&c);
        if c.actions
            .iter()
            .any(|a| matches!(a, Action::Receive(m) if !env.contains(m) && !now.contains(m)))
        {
            continue;
        }
        history.push(c);
        if scheduler.admits(p, history) {
            let run = Run {
                configs: history.clone(),
            };
            for l in 0..history.len() {
                let unrolled = run.unroll(l, l + 3 * (history.len() - l));
                if scheduler.admits(p, &unrolled) && check_run(p, &run, Some(l))?.is_empty() {
                    out.push((run.clone(), l));
                }
            }
            if history.len() < max_len {
                let e = next_env(history);
                let mut nexts: Vec<Vec<String>> = vec![Vec::new()];
                let last = history.last().unwrap().clone();
                for (q, a) in last.states.iter().zip(&last.actions) {
                    let targets: Vec<String> = match a {
                        Action::Idle => vec![q.clone()],
                        a => p.targets(q, a).into_iter().map(str::to_string).collect(),
                    };
                    nexts = nexts
                        .into_iter()
                        .flat_map(|s| {
                            targets.iter().map(move |t| {
                                let mut u = s.clone();
                                u.push(t.clone());
                                u
                            })
                        })
                        .collect();
                }
                for s in nexts {
                    extend(p, max_len, scheduler, s, e.clone(), history, out)?;
                }
            }
        }
        history.pop();
    }
    Ok(())
}
