//! Reading runs off models of the translation and back.

use std::collections::{BTreeMap, BTreeSet};

use super::{action_pred, message_prop, received_pred};
use crate::error::{Error, Result};
use crate::logic::{TemporalStructure, World};
use crate::protocol::{check_run, Action, GlobalConfiguration, Protocol, Run};

/// The run described by a model: machine `j` is the `j`-th domain element,
/// its state and action at step `i` are the members of the two XOR sets it
/// satisfies, and the environment holds the messages whose `m_a` is true.
/// Returns the run with its loop start.
pub fn model_to_run(m: &TemporalStructure, p: &Protocol) -> Result<(Run, usize)> {
    m.validate()?;
    let mut actions = p.actions();
    actions.push(Action::Idle);
    let configs = m
        .prefix
        .iter()
        .chain(&m.lasso)
        .enumerate()
        .map(|(i, w)| read_config(w, i, m.domain.len(), p, &actions))
        .collect::<Result<Vec<_>>>()?;
    let run = Run { configs };
    let start = m.prefix.len();
    if let Some(v) = check_run(p, &run, Some(start))?.first() {
        return Err(Error::InvalidStructure(format!(
            "the model does not describe a run: {v}"
        )));
    }
    Ok((run, start))
}

fn read_config(
    w: &World,
    i: usize,
    n: usize,
    p: &Protocol,
    actions: &[Action],
) -> Result<GlobalConfiguration> {
    let unique = |what: &str, found: Vec<String>, e: usize| match found.as_slice() {
        [one] => Ok(one.clone()),
        _ => Err(Error::InvalidStructure(format!(
            "element {} has {} {what}s at position {i}",
            e + 1,
            found.len()
        ))),
    };
    let mut states = Vec::with_capacity(n);
    let mut acts = Vec::with_capacity(n);
    for e in 0..n {
        let qs = p
            .states
            .iter()
            .filter(|q| w.holds(q, &[e]))
            .cloned()
            .collect();
        states.push(unique("state", qs, e)?);
        let found: Vec<&Action> = actions
            .iter()
            .filter(|a| w.holds(&action_pred(a), &[e]))
            .collect();
        let names = found.iter().map(|a| a.to_string()).collect();
        unique("action", names, e)?;
        acts.push(found[0].clone());
    }
    let env = p
        .broadcast
        .iter()
        .filter(|a| w.holds(&message_prop(a), &[]))
        .cloned()
        .collect();
    Ok(GlobalConfiguration {
        states,
        actions: acts,
        env,
    })
}

/// A model of the default translation describing the lasso run `r`; the
/// reading of [`model_to_run`] inverted. Elements are named `c1..cn`.
///
/// `Received_a(c)` holds at step `i` when machine `c` reacted to `a` at some
/// step from the latest broadcast of `a` before `i` up to `i - 1`.
pub fn run_to_model(p: &Protocol, r: &Run, lasso_start: usize) -> Result<TemporalStructure> {
    if let Some(v) = check_run(p, r, Some(lasso_start))?.first() {
        return Err(Error::InvalidRun(v.to_string()));
    }
    let n = r.dimension();
    let period = r.configs.len() - lasso_start;
    // From one period past the loop start, `Received` is periodic as well.
    let cut = lasso_start + period;
    let configs = r.unroll(lasso_start, cut + period);
    let mut received: Vec<BTreeMap<&str, BTreeSet<usize>>> = Vec::with_capacity(configs.len());
    for i in 0..configs.len() {
        let mut now = BTreeMap::new();
        for a in &p.broadcast {
            let mut who = BTreeSet::new();
            if i > 0 {
                let last = (0..i).rev().find(|&k| {
                    configs[k]
                        .actions
                        .iter()
                        .any(|b| *b == Action::Broadcast(a.clone()))
                });
                if let Some(last) = last {
                    let recv = Action::Receive(a.clone());
                    who = (0..n)
                        .filter(|&j| configs[last..i].iter().any(|c| c.actions[j] == recv))
                        .collect();
                }
            }
            now.insert(a.as_str(), who);
        }
        received.push(now);
    }
    let worlds: Vec<World> = configs
        .iter()
        .zip(&received)
        .map(|(c, rec)| {
            let mut w = World::default();
            for (j, (q, a)) in c.states.iter().zip(&c.actions).enumerate() {
                w.insert(q, vec![j]);
                w.insert(&action_pred(a), vec![j]);
            }
            for a in &p.broadcast {
                w.set_prop(&message_prop(a), c.env.contains(a));
                for &j in &rec[a.as_str()] {
                    w.insert(&received_pred(a), vec![j]);
                }
            }
            w
        })
        .collect();
    Ok(TemporalStructure {
        domain: (1..=n).map(|j| format!("c{j}")).collect(),
        constants: BTreeMap::new(),
        prefix: worlds[..cut].to_vec(),
        lasso: worlds[cut..].to_vec(),
    })
}
