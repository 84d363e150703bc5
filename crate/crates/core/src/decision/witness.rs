//! Turning a lasso of colour worlds into a temporal structure.
//!
//! The loop's thread graph has a vertex per (position, colour) and an edge
//! between step-compatible colours of consecutive positions. The lasso yields
//! a model iff every vertex lies in a strongly connected component with a
//! cycle that meets every unary eventuality, every constant thread meets them
//! too, and every propositional eventuality holds somewhere on the loop.

use std::collections::{BTreeMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::compiled::{Compiled, Ctx, Transition};
use crate::logic::{TemporalStructure, World};
use crate::mono_sat::Colour;

/// One moment of a lasso: the colours present and the rest of the world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ColourWorld {
    pub gamma: Vec<Colour>,
    pub ctx: Ctx,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Periodic colour sequences of the loop elements, indexed by unrolled loop position.
fn loop_threads(
    c: &Compiled,
    lp: &[ColourWorld],
    trans: &[Transition],
) -> Option<Vec<Vec<Colour>>> {
    let len = lp.len();
    let full = c.full_unary_labels();
    if lp.iter().fold(0, |a, w| a | c.prop_labels(w.ctx.props)) != c.full_prop_labels() {
        return None;
    }
    for k in 0..c.consts.len() {
        let labels = lp.iter().fold(0, |a, w| a | c.labels(w.ctx.rho[k]));
        if labels != full {
            return None;
        }
    }
    let mut g: DiGraph<(usize, usize), ()> = DiGraph::new();
    let mut ids: Vec<Vec<NodeIndex>> = Vec::with_capacity(len);
    for (t, w) in lp.iter().enumerate() {
        ids.push(
            w.gamma
                .iter()
                .enumerate()
                .map(|(i, _)| g.add_node((t, i)))
                .collect(),
        );
    }
    for t in 0..len {
        let u = (t + 1) % len;
        for (i, &a) in lp[t].gamma.iter().enumerate() {
            for (j, &b) in lp[u].gamma.iter().enumerate() {
                if trans[t].allows(a, b) {
                    g.add_edge(ids[t][i], ids[u][j], ());
                }
            }
        }
    }
    let colour = |n: NodeIndex| {
        let (t, i) = g[n];
        lp[t].gamma[i]
    };
    let mut comp_of = vec![usize::MAX; g.node_count()];
    let sccs = tarjan_scc(&g);
    for (k, scc) in sccs.iter().enumerate() {
        for n in scc {
            comp_of[n.index()] = k;
        }
    }
    let mut walks: Vec<Vec<Colour>> = Vec::new();
    for (k, scc) in sccs.iter().enumerate() {
        let internal = |n: NodeIndex| g.neighbors(n).any(|m| comp_of[m.index()] == k);
        if !scc.iter().any(|&n| internal(n)) {
            return None;
        }
        let labels = scc.iter().fold(0, |a, &n| a | c.labels(colour(n)));
        if labels != full {
            return None;
        }
        // A closed walk from a position-0 vertex through every vertex of the component.
        let mut members: Vec<NodeIndex> = scc.clone();
        members.sort_by_key(|&n| g[n]);
        let start = *members.iter().find(|&&n| g[n].0 == 0)?;
        let path = |from: NodeIndex, to: NodeIndex| -> Vec<NodeIndex> {
            let mut prev: BTreeMap<NodeIndex, NodeIndex> = BTreeMap::new();
            let mut queue = VecDeque::from([from]);
            let mut found = false;
            while let Some(n) = queue.pop_front() {
                for m in g.neighbors(n) {
                    if comp_of[m.index()] != k || prev.contains_key(&m) {
                        continue;
                    }
                    prev.insert(m, n);
                    if m == to {
                        found = true;
                        break;
                    }
                    queue.push_back(m);
                }
                if found {
                    break;
                }
            }
            let mut out = vec![to];
            let mut cur = to;
            while cur != from || out.len() == 1 {
                cur = prev[&cur];
                out.push(cur);
                if cur == from {
                    break;
                }
            }
            out.reverse();
            out
        };
        let mut walk = vec![start];
        let mut seen = vec![false; g.node_count()];
        seen[start.index()] = true;
        for &v in &members {
            if seen[v.index()] {
                continue;
            }
            let last = *walk.last().unwrap();
            let p = path(last, v);
            for &n in &p[1..] {
                seen[n.index()] = true;
            }
            walk.extend_from_slice(&p[1..]);
        }
        let last = *walk.last().unwrap();
        let back = path(last, start);
        walk.extend_from_slice(&back[1..]);
        walk.pop();
        walks.push(walk.into_iter().map(colour).collect());
    }
    let unroll = walks
        .iter()
        .map(|w| w.len() / len)
        .fold(1, |a, m| a / gcd(a, m) * m);
    let mut threads = Vec::new();
    for w in &walks {
        for j in 0..w.len() / len {
            threads.push(
                (0..len * unroll)
                    .map(|u| w[(u + j * len) % w.len()])
                    .collect(),
            );
        }
    }
    Some(threads)
}

/// Builds a model from a prefix and loop of colour worlds, or returns `None`
/// if the loop's thread graph does not meet the acceptance condition.
/// Consecutive worlds must already satisfy the edge condition.
pub(crate) fn build_witness(
    c: &Compiled,
    prefix: &[ColourWorld],
    lp: &[ColourWorld],
) -> Option<TemporalStructure> {
    let len = lp.len();
    let loop_trans: Vec<Transition> = (0..len)
        .map(|t| c.transition(&lp[t].ctx, &lp[(t + 1) % len].ctx))
        .collect();
    if loop_trans.iter().any(|t| !t.global) {
        return None;
    }
    for k in 0..c.consts.len() {
        if (0..len).any(|t| !loop_trans[t].allows(lp[t].ctx.rho[k], lp[(t + 1) % len].ctx.rho[k])) {
            return None;
        }
    }
    let mut threads = loop_threads(c, lp, &loop_trans)?;
    let unrolled = threads[0].len();
    let p = prefix.len();
    let worlds_at = |t: usize| {
        if t < p {
            &prefix[t]
        } else {
            &lp[(t - p) % len]
        }
    };
    let pre_trans: Vec<Transition> = (0..p)
        .map(|t| c.transition(&prefix[t].ctx, &worlds_at(t + 1).ctx))
        .collect();
    let back = |from: Colour, pre: &mut Vec<Colour>| -> Option<()> {
        let mut cur = from;
        for t in (0..p).rev() {
            cur = *prefix[t]
                .gamma
                .iter()
                .find(|&&g| pre_trans[t].allows(g, cur))?;
            pre.push(cur);
        }
        pre.reverse();
        Some(())
    };
    // Each element: prefix colours followed by unrolled loop colours.
    let mut elements: Vec<Vec<Colour>> = Vec::new();
    for th in threads.drain(..) {
        let mut e = Vec::with_capacity(p + unrolled);
        back(th[0], &mut e)?;
        e.extend(th);
        elements.push(e);
    }
    for t in 0..p {
        for &d in &prefix[t].gamma {
            if elements.iter().any(|e| e[t] == d) {
                continue;
            }
            let mut e = Vec::new();
            let mut cur = d;
            for s in (0..t).rev() {
                cur = *prefix[s]
                    .gamma
                    .iter()
                    .find(|&&g| pre_trans[s].allows(g, cur))?;
                e.push(cur);
            }
            e.reverse();
            e.push(d);
            let mut cur = d;
            for s in t..p {
                let next = &worlds_at(s + 1).gamma;
                cur = *next.iter().find(|&&g| pre_trans[s].allows(cur, g))?;
                if s + 1 < p {
                    e.push(cur);
                }
            }
            let host = elements.iter().find(|h| h[p] == cur)?;
            e.extend_from_slice(&host[p..]);
            elements.push(e);
        }
    }
    let const_base = elements.len();
    for k in 0..c.consts.len() {
        elements.push((0..p + unrolled).map(|t| worlds_at(t).ctx.rho[k]).collect());
    }
    let mut domain: Vec<String> = (0..const_base).map(|i| format!("e{}", i + 1)).collect();
    domain.extend(c.consts.iter().map(|k| format!("e_{k}")));
    let world = |t: usize| {
        let mut w = World::default();
        for (e, seq) in elements.iter().enumerate() {
            let g = seq[t];
            for (b, pred) in c.space.preds.iter().enumerate() {
                if g.0 >> b & 1 == 1 {
                    w.insert(pred, vec![e]);
                }
            }
        }
        let props = worlds_at(t).ctx.props;
        for (i, name) in c.props.iter().enumerate() {
            if props >> i & 1 == 1 {
                w.set_prop(name, true);
            }
        }
        w
    };
    Some(TemporalStructure {
        domain,
        constants: c
            .consts
            .iter()
            .enumerate()
            .map(|(k, n)| (n.clone(), const_base + k))
            .collect(),
        prefix: (0..p).map(world).collect(),
        lasso: (p..p + unrolled).map(world).collect(),
    })
}
