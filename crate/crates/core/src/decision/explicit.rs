//! Behaviour graph with explicitly enumerated nodes, and the exact search for
//! an accepting cycle.

use std::collections::{HashMap, HashSet, VecDeque};
use std::rc::Rc;
use std::sync::OnceLock;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;

use super::compiled::{Compiled, Ctx};
use super::witness::ColourWorld;
use crate::error::{Error, Result};
use crate::mono_sat::{advance, Colour};

/// Upper bound on candidate colours handled explicitly.
pub(crate) const MAX_CANDIDATES: usize = 16;
const MAX_SCHEMES: u64 = 1 << 22;
const MAX_NODES: usize = 100_000;
const MAX_CTXS: usize = 1024;
const MAX_EDGES: usize = 10_000_000;
const MAX_STATES: usize = 300_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct ENode {
    /// Mask over the candidate colours.
    pub gamma: u64,
    pub rho: Vec<usize>,
    pub props: u64,
}

/// Successor masks between candidate colours for one pair of contexts, or
/// `None` when the non-unary clauses already forbid the step.
type Matrix = Option<Vec<u64>>;

pub(crate) struct Explicit<'a> {
    pub c: &'a Compiled,
    pub cands: Vec<Colour>,
    pub nodes: Vec<ENode>,
    /// Successors; filled for the nodes reachable from an initial node, or
    /// for all nodes after [`Explicit::complete`].
    pub succ: Vec<Vec<usize>>,
    pub initial: Vec<usize>,
    ctx_of: Vec<usize>,
    ctxs: Vec<Ctx>,
    /// Nodes of each context, by colour mask.
    by_ctx: Vec<HashMap<u64, usize>>,
    rows: Vec<OnceLock<Vec<Matrix>>>,
    labels: Vec<u32>,
    pool: rayon::ThreadPool,
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}

impl<'a> Explicit<'a> {
    pub fn colours_of(&self, gamma: u64) -> Vec<Colour> {
        bits(gamma).map(|i| self.cands[i]).collect()
    }

    pub fn world(&self, n: usize) -> ColourWorld {
        ColourWorld {
            gamma: self.colours_of(self.nodes[n].gamma),
            ctx: self.ctxs[self.ctx_of[n]].clone(),
        }
    }

    /// Enumerates every node and the edges reachable from the initial nodes.
    pub fn build(c: &'a Compiled, jobs: usize) -> Result<Explicit<'a>> {
        let cands = c
            .candidates(None, MAX_CANDIDATES + 1)
            .map_err(|_| too_big())?;
        if cands.len() > MAX_CANDIDATES {
            return Err(too_big());
        }
        let np = c.props.len();
        let nk = c.consts.len();
        let schemes = (1u64 << cands.len())
            .saturating_mul((cands.len() as u64).saturating_pow(nk as u32))
            .saturating_mul(if np >= 63 { u64::MAX } else { 1u64 << np });
        if schemes > MAX_SCHEMES {
            return Err(too_big());
        }
        let mut nodes = Vec::new();
        for props in 0..1u64 << np {
            let allowed = cands
                .iter()
                .enumerate()
                .filter(|(_, &g)| c.unit_ok(g, Some(props)))
                .fold(0u64, |a, (i, _)| a | 1 << i);
            let mut gamma = allowed;
            while gamma != 0 {
                let colours: Vec<Colour> = bits(gamma).map(|i| cands[i]).collect();
                let members: Vec<usize> = bits(gamma).collect();
                let mut rho = vec![0usize; nk];
                loop {
                    let ctx = Ctx {
                        props,
                        rho: rho.iter().map(|&i| colours[i]).collect(),
                    };
                    if c.universal_holds(&colours, &ctx) {
                        nodes.push(ENode {
                            gamma,
                            rho: rho.iter().map(|&i| members[i]).collect(),
                            props,
                        });
                        if nodes.len() > MAX_NODES {
                            return Err(too_big());
                        }
                    }
                    if !advance(&mut rho, colours.len()) {
                        break;
                    }
                }
                gamma = (gamma - 1) & allowed;
            }
        }
        let mut g = Self::from_nodes(c, cands, nodes, jobs)?;
        g.explore()?;
        Ok(g)
    }

    /// A graph over the given nodes only; edges are not yet computed.
    pub fn from_nodes(
        c: &'a Compiled,
        cands: Vec<Colour>,
        mut nodes: Vec<ENode>,
        jobs: usize,
    ) -> Result<Explicit<'a>> {
        nodes.sort_by(|a, b| (a.gamma, &a.rho, a.props).cmp(&(b.gamma, &b.rho, b.props)));
        let mut ctxs: Vec<Ctx> = Vec::new();
        let mut ctx_index: HashMap<Ctx, usize> = HashMap::new();
        let mut by_ctx: Vec<HashMap<u64, usize>> = Vec::new();
        let mut ctx_of = Vec::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            let ctx = Ctx {
                props: n.props,
                rho: n.rho.iter().map(|&i| cands[i]).collect(),
            };
            let id = *ctx_index.entry(ctx.clone()).or_insert_with(|| {
                ctxs.push(ctx);
                by_ctx.push(HashMap::new());
                ctxs.len() - 1
            });
            by_ctx[id].insert(n.gamma, i);
            ctx_of.push(id);
        }
        if ctxs.len() > MAX_CTXS {
            return Err(too_big());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::ResourceLimit(e.to_string()))?;
        let mut g = Explicit {
            c,
            labels: cands.iter().map(|&g| c.labels(g)).collect(),
            cands,
            succ: vec![Vec::new(); nodes.len()],
            nodes,
            initial: Vec::new(),
            ctx_of,
            rows: (0..ctxs.len()).map(|_| OnceLock::new()).collect(),
            ctxs,
            by_ctx,
            pool,
        };
        g.initial = (0..g.nodes.len())
            .filter(|&n| {
                let w = g.world(n);
                c.initial_holds(&w.gamma, &w.ctx)
            })
            .collect();
        Ok(g)
    }

    fn row(&self, a: usize) -> &[Matrix] {
        self.rows[a].get_or_init(|| {
            (0..self.ctxs.len())
                .map(|b| {
                    let t = self.c.transition(&self.ctxs[a], &self.ctxs[b]);
                    t.global.then(|| {
                        self.cands
                            .iter()
                            .map(|&x| {
                                self.cands
                                    .iter()
                                    .enumerate()
                                    .filter(|(_, &y)| t.allows(x, y))
                                    .fold(0u64, |m, (j, _)| m | 1 << j)
                            })
                            .collect()
                    })
                })
                .collect()
        })
    }

    fn fwd(&self, a: usize, b: usize) -> Option<&[u64]> {
        self.row(self.ctx_of[a])[self.ctx_of[b]].as_deref()
    }

    /// The edge conditions checked pairwise, against which `successors` is tested.
    #[cfg(test)]
    fn edge(&self, a: usize, b: usize) -> bool {
        let Some(fwd) = self.fwd(a, b) else {
            return false;
        };
        let (na, nb) = (&self.nodes[a], &self.nodes[b]);
        na.rho
            .iter()
            .zip(&nb.rho)
            .all(|(&x, &y)| fwd[x] >> y & 1 == 1)
            && nb.gamma & !bits(na.gamma).fold(0, |u, i| u | fwd[i]) == 0
            && bits(na.gamma).all(|i| fwd[i] & nb.gamma != 0)
    }

    fn successors(&self, a: usize) -> Vec<usize> {
        let na = &self.nodes[a];
        let mut out = Vec::new();
        for (b, fwd) in self.row(self.ctx_of[a]).iter().enumerate() {
            let Some(fwd) = fwd else { continue };
            let Some((&any, _)) = self.by_ctx[b].iter().next() else {
                continue;
            };
            let rho_b = &self.nodes[self.by_ctx[b][&any]].rho;
            if !na
                .rho
                .iter()
                .zip(rho_b)
                .all(|(&x, &y)| fwd[x] >> y & 1 == 1)
            {
                continue;
            }
            let reach = bits(na.gamma).fold(0, |u, i| u | fwd[i]);
            let ok = |g: u64| bits(na.gamma).all(|i| fwd[i] & g != 0);
            let group = &self.by_ctx[b];
            if reach.count_ones() < 20 && 1usize << reach.count_ones() < group.len() {
                let mut g = reach;
                while g != 0 {
                    if let Some(&n) = group.get(&g) {
                        if ok(g) {
                            out.push(n);
                        }
                    }
                    g = (g - 1) & reach;
                }
            } else {
                out.extend(
                    group
                        .iter()
                        .filter(|(&g, _)| g & !reach == 0 && ok(g))
                        .map(|(_, &n)| n),
                );
            }
        }
        out.sort_unstable();
        out
    }

    fn fill(&mut self, todo: &[usize], edges: &mut usize) -> Result<()> {
        let lists: Vec<Vec<usize>> = self
            .pool
            .install(|| todo.par_iter().map(|&a| self.successors(a)).collect());
        for (&a, l) in todo.iter().zip(lists) {
            *edges += l.len();
            if *edges > MAX_EDGES {
                return Err(too_big());
            }
            self.succ[a] = l;
        }
        Ok(())
    }

    /// Computes the successors of every node reachable from an initial node.
    pub fn explore(&mut self) -> Result<()> {
        let mut seen = vec![false; self.nodes.len()];
        let mut frontier: Vec<usize> = self.initial.clone();
        for &i in &frontier {
            seen[i] = true;
        }
        let mut edges = 0;
        while !frontier.is_empty() {
            self.fill(&frontier, &mut edges)?;
            let mut next = Vec::new();
            for &a in &frontier {
                for &b in &self.succ[a] {
                    if !seen[b] {
                        seen[b] = true;
                        next.push(b);
                    }
                }
            }
            frontier = next;
        }
        Ok(())
    }

    /// Computes the successors of every node.
    pub fn complete(&mut self) -> Result<()> {
        let all: Vec<usize> = (0..self.nodes.len()).collect();
        self.fill(&all, &mut 0)
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue: VecDeque<usize> = self.initial.iter().copied().collect();
        for &i in &self.initial {
            seen[i] = true;
        }
        while let Some(n) = queue.pop_front() {
            for &m in &self.succ[n] {
                if !seen[m] {
                    seen[m] = true;
                    queue.push_back(m);
                }
            }
        }
        seen
    }

    /// Shortest path from an initial node to `target`, excluding `target`.
    pub fn prefix_to(&self, target: usize) -> Vec<usize> {
        let mut prev: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::new();
        for &i in &self.initial {
            seen[i] = true;
            queue.push_back(i);
        }
        while let Some(n) = queue.pop_front() {
            if n == target {
                break;
            }
            for &m in &self.succ[n] {
                if !seen[m] {
                    seen[m] = true;
                    prev[m] = Some(n);
                    queue.push_back(m);
                }
            }
        }
        let mut out = Vec::new();
        let mut cur = target;
        while let Some(p) = prev[cur] {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    /// Restricts `alive` to nodes on cycles whose component covers every
    /// propositional eventuality; returns the component id of each survivor.
    fn prune(&self, alive: &mut [bool]) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.nodes.len()];
        loop {
            let mut g: DiGraph<usize, ()> = DiGraph::new();
            let mut idx = vec![None; self.nodes.len()];
            for n in 0..self.nodes.len() {
                if alive[n] {
                    idx[n] = Some(g.add_node(n));
                }
            }
            for n in 0..self.nodes.len() {
                if let Some(a) = idx[n] {
                    for &m in &self.succ[n] {
                        if let Some(b) = idx[m] {
                            g.add_edge(a, b, ());
                        }
                    }
                }
            }
            let mut changed = false;
            for (k, scc) in tarjan_scc(&g).into_iter().enumerate() {
                let nodes: Vec<usize> = scc.iter().map(|&i| g[i]).collect();
                let cyclic = nodes.len() > 1 || self.succ[nodes[0]].contains(&nodes[0]);
                let labels = nodes
                    .iter()
                    .fold(0, |a, &n| a | self.c.prop_labels(self.nodes[n].props));
                if !cyclic || labels != self.c.full_prop_labels() {
                    for n in nodes {
                        alive[n] = false;
                    }
                    changed = true;
                } else {
                    for n in nodes {
                        comp[n] = k;
                    }
                }
            }
            if !changed {
                return comp;
            }
        }
    }

    /// Finds an accepting cycle reachable from an initial node; returns the
    /// prefix and loop node sequences.
    pub fn find_lasso(&self) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
        let mut alive = self.reachable();
        let mut budget = MAX_STATES;
        loop {
            let comp = self.prune(&mut alive);
            let Some(base) = (0..self.nodes.len()).find(|&n| alive[n]) else {
                return Ok(None);
            };
            let within: Vec<bool> = (0..self.nodes.len())
                .map(|n| alive[n] && comp[n] == comp[base])
                .collect();
            if let Some(cycle) = self.search(base, &within, &mut budget)? {
                return Ok(Some((self.prefix_to(base), cycle)));
            }
            alive[base] = false;
        }
    }

    fn search(
        &self,
        base: usize,
        within: &[bool],
        budget: &mut usize,
    ) -> Result<Option<Vec<usize>>> {
        let b = &self.nodes[base];
        let n = self.cands.len();
        let start = State {
            node: base,
            rel: bits(b.gamma)
                .map(|i| (i as u8, i as u8, self.labels[i]))
                .collect(),
            pending: Vec::new(),
            consts: b.rho.iter().map(|&i| self.labels[i]).collect(),
            props: self.c.prop_labels(b.props),
        };
        let start = Rc::new(start);
        let mut seen: HashSet<Rc<State>> = HashSet::new();
        let mut states: Vec<(Rc<State>, usize)> = vec![(start.clone(), usize::MAX)];
        seen.insert(start);
        let mut head = 0;
        let mut rel = vec![u32::MAX; n * n];
        while head < states.len() {
            let cur = states[head].0.clone();
            let from = cur.node;
            for &to in &self.succ[from] {
                if !within[to] {
                    continue;
                }
                let fwd = self.fwd(from, to).expect("edge implies a transition");
                let target = &self.nodes[to];
                rel.iter_mut().for_each(|x| *x = u32::MAX);
                for &(bc, cc, l) in &cur.rel {
                    for j in bits(fwd[cc as usize] & target.gamma) {
                        let slot = &mut rel[bc as usize * n + j];
                        let nl = l | self.labels[j];
                        *slot = if *slot == u32::MAX { nl } else { *slot | nl };
                    }
                }
                let new_rel: Vec<(u8, u8, u32)> = (0..n * n)
                    .filter(|&k| rel[k] != u32::MAX)
                    .map(|k| ((k / n) as u8, (k % n) as u8, rel[k]))
                    .collect();
                let mut pending: Vec<(u64, u64)> = cur
                    .pending
                    .iter()
                    .map(|&(f, t)| (f, bits(t).fold(0, |a, c| a | fwd[c]) & target.gamma))
                    .collect();
                let consts: Vec<u32> = cur
                    .consts
                    .iter()
                    .zip(&target.rho)
                    .map(|(&l, &r)| l | self.labels[r])
                    .collect();
                let props = cur.props | self.c.prop_labels(target.props);
                if to == base && self.closes(b.gamma, &new_rel, &pending, &consts, props) {
                    let mut cycle = vec![from];
                    let mut k = head;
                    while states[k].1 != usize::MAX {
                        k = states[k].1;
                        cycle.push(states[k].0.node);
                    }
                    cycle.reverse();
                    return Ok(Some(cycle));
                }
                for j in bits(target.gamma) {
                    let f = new_rel
                        .iter()
                        .filter(|&&(_, cc, _)| cc as usize == j)
                        .fold(0u64, |a, &(bc, _, _)| a | 1 << bc);
                    pending.push((f, 1 << j));
                }
                minimise(&mut pending);
                let next = State {
                    node: to,
                    rel: new_rel,
                    pending,
                    consts,
                    props,
                };
                let next = Rc::new(next);
                if seen.insert(next.clone()) {
                    if *budget == 0 {
                        return Err(Error::ResourceLimit(
                            "cycle search state limit reached".into(),
                        ));
                    }
                    *budget -= 1;
                    states.push((next, head));
                }
            }
            head += 1;
        }
        Ok(None)
    }

    /// The acceptance check when a walk returns to its base node.
    fn closes(
        &self,
        gamma: u64,
        rel: &[(u8, u8, u32)],
        pending: &[(u64, u64)],
        consts: &[u32],
        props: u32,
    ) -> bool {
        let full = self.c.full_unary_labels();
        if props != self.c.full_prop_labels() || consts.iter().any(|&l| l != full) {
            return false;
        }
        let n = self.cands.len();
        // Reflexive-transitive reachability over the one-round relation.
        let mut reach = vec![0u64; n];
        for i in bits(gamma) {
            reach[i] = 1 << i;
        }
        for &(a, b, _) in rel {
            reach[a as usize] |= 1 << b;
        }
        loop {
            let mut changed = false;
            for i in bits(gamma) {
                let r = bits(reach[i]).fold(reach[i], |acc, j| acc | reach[j]);
                if r != reach[i] {
                    reach[i] = r;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let same = |a: usize, b: usize| reach[a] >> b & 1 == 1 && reach[b] >> a & 1 == 1;
        for i in bits(gamma) {
            let mut cyclic = false;
            let mut labels = 0;
            for &(a, b, l) in rel {
                if same(a as usize, i) && same(b as usize, i) {
                    cyclic = true;
                    labels |= l;
                }
            }
            if !cyclic || labels != full {
                return false;
            }
        }
        pending
            .iter()
            .all(|&(f, t)| bits(t).any(|j| reach[j] & f != 0))
    }
}

fn too_big() -> Error {
    Error::ResourceLimit("behaviour graph too large to enumerate explicitly".into())
}

/// Keeps only the minimal pairs: a pair with larger sets on both sides is implied.
fn minimise(v: &mut Vec<(u64, u64)>) {
    v.sort_by_key(|&(f, t)| (f.count_ones() + t.count_ones(), f, t));
    v.dedup();
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(v.len());
    for &(f, t) in v.iter() {
        if !out.iter().any(|&(f2, t2)| f2 & !f == 0 && t2 & !t == 0) {
            out.push((f, t));
        }
    }
    out.sort();
    *v = out;
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct State {
    node: usize,
    /// (base colour, current colour, labels seen on some connecting path).
    rel: Vec<(u8, u8, u32)>,
    /// (base colours reaching an intermediate vertex, colours it reaches now).
    pending: Vec<(u64, u64)>,
    consts: Vec<u32>,
    props: u32,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, Signature};
    use crate::normal_form::to_dsnf;

    #[test]
    fn lazy_edges_and_symbolic_counts_agree_with_enumeration() {
        for (sig, text) in [
            (
                "preds: P/1 Q/1",
                "always (forall x. P(x) -> next Q(x)) & exists x. P(x)",
            ),
            (
                "preds: p/0 P/1\nconsts: c",
                "(forall x. P(x) | p) & always (p -> next ~p) & sometime P(c)",
            ),
            (
                "preds: P/1 Q/1",
                "always sometime (exists x. Q(x) & ~P(x)) & next forall x. ~Q(x)",
            ),
            (
                "xorset S: A B C",
                "always (forall x. A(x) -> next B(x)) & sometime exists x. C(x)",
            ),
        ] {
            let sig = Signature::parse(sig).unwrap();
            let f = parse_formula(text, &sig).unwrap();
            let c = Compiled::new(&to_dsnf(&f, &sig).unwrap()).unwrap();
            let g = Explicit::build(&c, 1).unwrap();
            let counted = crate::decision::symbolic::count_nodes(&c).unwrap();
            assert_eq!(counted, g.nodes.len() as f64, "{text}");
            for a in 0..g.nodes.len() {
                let pairwise: Vec<usize> = (0..g.nodes.len()).filter(|&b| g.edge(a, b)).collect();
                assert_eq!(g.successors(a), pairwise, "{text}, node {a}");
            }
        }
    }
}
