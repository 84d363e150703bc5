//! Symbolic pruning of behaviour graphs too large to enumerate.
//!
//! A node is encoded by one bit per candidate colour (membership in gamma),
//! one bit per constant and candidate (the constant's colour) and one bit per
//! proposition. A tracked colour, given by its predicate bits, follows the
//! thread of a single element. Every state bit has a current and a next copy,
//! interleaved, so that renaming is a shift of variable indices.
//!
//! Nodes that cannot lie on the loop of an accepted lasso are removed by
//! fixpoints: the loop must be fair for the propositions and constants at
//! node level, and every colour in it must lie on a thread that is fair both
//! forwards and backwards within the surviving nodes. If nothing reachable
//! survives the problem is unsatisfiable. Otherwise the surviving part is
//! handed to the exact explicit search when it is small, or searched over
//! the colours of one symbolic lasso.

use biodivine_lib_bdd::{op_function, Bdd, BddValuation, BddVariable, BddVariableSet};

use super::compiled::{CLit, Compiled};
use super::explicit::{ENode, Explicit};
use super::witness::ColourWorld;
use crate::error::{Error, Result};
use crate::mono_sat::{Colour, Fo};

pub(crate) enum Outcome {
    Unsat,
    Sat(Vec<ColourWorld>, Vec<ColourWorld>),
    Unknown(String),
}

const MAX_CANDIDATES: usize = 4096;
/// Largest BDD built before giving up.
const BDD_LIMIT: usize = 2_000_000;
/// Largest node set handed to the explicit search.
const MAX_EXACT_NODES: usize = 50_000;
/// Colours of the explicit search, whose masks are 64 bits wide.
const MAX_EXACT_COLOURS: usize = 64;
const MAX_LASSO_COLOURS: usize = 24;
const MAX_WALK: usize = 10_000;
/// Colour sets tried by the search over few colours.
const MAX_SUBSETS: usize = 2_000;

fn limit() -> Error {
    Error::ResourceLimit("symbolic behaviour graph too large".into())
}

fn checked(b: Bdd) -> Result<Bdd> {
    if b.size() > BDD_LIMIT {
        Err(limit())
    } else {
        Ok(b)
    }
}

fn and(a: &Bdd, b: &Bdd) -> Result<Bdd> {
    Bdd::binary_op_with_limit(BDD_LIMIT, a, b, op_function::and).ok_or_else(limit)
}

fn or(a: &Bdd, b: &Bdd) -> Result<Bdd> {
    Bdd::binary_op_with_limit(BDD_LIMIT, a, b, op_function::or).ok_or_else(limit)
}

/// `exists vars. a & b`
fn and_exists(a: &Bdd, b: &Bdd, vars: &[BddVariable]) -> Result<Bdd> {
    checked(Bdd::binary_op_with_exists(a, b, op_function::and, vars))
}

/// Moves a BDD from current to next variables or back; the support must lie
/// on one side, so the variable order is preserved.
fn shift(b: &Bdd, up: bool) -> Bdd {
    let mut nodes = b.clone().to_nodes();
    for n in nodes.iter_mut().filter(|n| !n.is_terminal()) {
        let i = n.var.to_index();
        n.var = BddVariable::from_index(if up { i + 1 } else { i - 1 });
    }
    Bdd::from_nodes(&nodes).expect("shifting keeps the variable order")
}

/// Variable layout and the translation of compiled formulas into BDDs.
struct Enc {
    cands: Vec<Colour>,
    vars: BddVariableSet,
    /// Predicate bits of a colour.
    nb: usize,
    np: usize,
    nk: usize,
}

impl Enc {
    fn new(c: &Compiled, cands: Vec<Colour>) -> Result<Enc> {
        let nb = c.space.preds.len();
        let np = c.props.len();
        let nk = c.consts.len();
        let bits = nb + np + cands.len() * (1 + nk);
        if 2 * bits >= u16::MAX as usize {
            return Err(limit());
        }
        Ok(Enc {
            vars: BddVariableSet::new_anonymous((2 * bits) as u16),
            cands,
            nb,
            np,
            nk,
        })
    }

    /// Schemes over the current node bits satisfying the universal part.
    fn node(&self, c: &Compiled) -> Result<Bdd> {
        let n = self.cands.len();
        let mut node = (0..n).fold(self.constant(false), |a, i| {
            a.or(&self.lit(self.g_bit(i), false, true))
        });
        for k in 0..self.nk {
            let rs: Vec<BddVariable> = (0..n).map(|i| self.var(self.r_bit(k, i), false)).collect();
            node = and(&node, &self.vars.mk_sat_exactly_k(1, &rs))?;
            for i in 0..n {
                let r = self.lit(self.r_bit(k, i), false, true);
                node = and(&node, &r.imp(&self.lit(self.g_bit(i), false, true)))?;
            }
        }
        let mut slots = Vec::new();
        for f in &c.universal {
            node = and(&node, &self.fo(f, &mut slots)?)?;
        }
        Ok(node)
    }

    fn t_bit(&self, b: usize) -> usize {
        b
    }

    fn p_bit(&self, i: usize) -> usize {
        self.nb + i
    }

    fn g_bit(&self, i: usize) -> usize {
        self.nb + self.np + i * (1 + self.nk)
    }

    fn r_bit(&self, k: usize, i: usize) -> usize {
        self.g_bit(i) + 1 + k
    }

    fn bits(&self) -> usize {
        self.g_bit(self.cands.len())
    }

    fn var(&self, bit: usize, next: bool) -> BddVariable {
        BddVariable::from_index(2 * bit + next as usize)
    }

    fn lit(&self, bit: usize, next: bool, pos: bool) -> Bdd {
        self.vars.mk_literal(self.var(bit, next), pos)
    }

    fn constant(&self, b: bool) -> Bdd {
        if b {
            self.vars.mk_true()
        } else {
            self.vars.mk_false()
        }
    }

    fn cube(&self, g: Colour, next: bool) -> Bdd {
        (0..self.nb).fold(self.constant(true), |acc, b| {
            acc.and(&self.lit(self.t_bit(b), next, g.0 >> b & 1 == 1))
        })
    }

    /// The colour of constant `k` has predicate bit `bit`.
    fn ground(&self, k: usize, bit: usize, next: bool) -> Bdd {
        self.cands
            .iter()
            .enumerate()
            .filter(|(_, g)| g.0 >> bit & 1 == 1)
            .fold(self.constant(false), |acc, (i, _)| {
                acc.or(&self.lit(self.r_bit(k, i), next, true))
            })
    }

    fn clit(&self, l: CLit, next: bool) -> Bdd {
        match l {
            CLit::Unary(bit, pos) => self.lit(self.t_bit(bit), next, pos),
            CLit::Prop(i, pos) => self.lit(self.p_bit(i), next, pos),
            CLit::Ground(k, bit, pos) => {
                let g = self.ground(k, bit, next);
                if pos {
                    g
                } else {
                    g.not()
                }
            }
        }
    }

    fn fo(&self, f: &Fo, slots: &mut Vec<usize>) -> Result<Bdd> {
        Ok(match f {
            Fo::Const(b) => self.constant(*b),
            Fo::Var(s, bit) => self.constant(self.cands[slots[*s]].0 >> bit & 1 == 1),
            Fo::Ground(k, bit) => self.ground(*k, *bit, false),
            Fo::Prop(i) => self.lit(self.p_bit(*i), false, true),
            Fo::Not(a) => self.fo(a, slots)?.not(),
            Fo::And(v) => {
                let mut acc = self.constant(true);
                for a in v {
                    acc = and(&acc, &self.fo(a, slots)?)?;
                }
                acc
            }
            Fo::Or(v) => {
                let mut acc = self.constant(false);
                for a in v {
                    acc = or(&acc, &self.fo(a, slots)?)?;
                }
                acc
            }
            Fo::Forall(s, a) | Fo::Exists(s, a) => {
                let universal = matches!(f, Fo::Forall(..));
                if slots.len() <= *s {
                    slots.resize(*s + 1, 0);
                }
                let mut acc = self.constant(universal);
                for i in 0..self.cands.len() {
                    slots[*s] = i;
                    let body = self.fo(a, slots)?;
                    let present = self.lit(self.g_bit(i), false, true);
                    acc = if universal {
                        and(&acc, &present.imp(&body))?
                    } else {
                        or(&acc, &present.and(&body))?
                    };
                }
                acc
            }
        })
    }

    /// `(x, t)`: colour `t` is in gamma of node `x`.
    fn member(&self, next: bool) -> Bdd {
        (0..self.cands.len()).fold(self.constant(false), |acc, i| {
            acc.or(&self
                .lit(self.g_bit(i), next, true)
                .and(&self.cube(self.cands[i], next)))
        })
    }

    /// `(x, t)`: colour `t` is the colour of constant `k` in node `x`.
    fn denotes(&self, k: usize, next: bool) -> Bdd {
        (0..self.cands.len()).fold(self.constant(false), |acc, i| {
            acc.or(&self
                .lit(self.r_bit(k, i), next, true)
                .and(&self.cube(self.cands[i], next)))
        })
    }

    /// Forwards: every colour of the current node has a successor in the
    /// next one. Backwards: every colour of the next node has a predecessor.
    /// Colours with the same restriction of `thread` share one conjunct.
    fn cover(&self, thread: &Bdd, backwards: bool) -> Result<Bdd> {
        let (from, to) = (backwards, !backwards);
        let other = self.member(to);
        let track: Vec<BddVariable> = self.track_vars(to);
        let mut groups: Vec<(Bdd, Bdd)> = Vec::new();
        for (i, &g) in self.cands.iter().enumerate() {
            let fixed: Vec<(BddVariable, bool)> = (0..self.nb)
                .map(|b| (self.var(self.t_bit(b), from), g.0 >> b & 1 == 1))
                .collect();
            let steps = thread.restrict(&fixed);
            let present = self.lit(self.g_bit(i), from, true);
            match groups.iter_mut().find(|(s, _)| *s == steps) {
                Some((_, p)) => *p = p.or(&present),
                None => groups.push((steps, present)),
            }
        }
        let mut out = self.constant(true);
        for (steps, present) in groups {
            let reach = and_exists(&other, &steps, &track)?;
            out = and(&out, &present.imp(&reach))?;
        }
        Ok(out)
    }

    /// Current copies of the node bits (everything but the tracked colour).
    fn node_vars(&self, next: bool) -> Vec<BddVariable> {
        (self.nb..self.bits()).map(|b| self.var(b, next)).collect()
    }

    fn track_vars(&self, next: bool) -> Vec<BddVariable> {
        (0..self.nb)
            .map(|b| self.var(self.t_bit(b), next))
            .collect()
    }

    /// Fixes every variable outside the current node bits to false, so that
    /// valuations of the result correspond one-to-one to nodes.
    fn node_only(&self) -> Bdd {
        let mut fixed: Vec<BddVariable> = self.track_vars(false);
        fixed.extend((0..self.bits()).map(|b| self.var(b, true)));
        fixed.iter().fold(self.constant(true), |acc, &v| {
            acc.and(&self.vars.mk_not_var(v))
        })
    }
}

struct Sym<'a> {
    c: &'a Compiled,
    enc: Enc,
    /// Unary step clauses between a tracked colour and its successor.
    thread: Bdd,
    init: Bdd,
    node: Bdd,
    member: Bdd,
    edge: Bdd,
    node_cur: Vec<BddVariable>,
    node_next: Vec<BddVariable>,
    track_cur: Vec<BddVariable>,
    track_next: Vec<BddVariable>,
    node_labels: Vec<Bdd>,
    thread_labels: Vec<Bdd>,
}

impl<'a> Sym<'a> {
    fn new(c: &'a Compiled, cands: Vec<Colour>, exact: bool) -> Result<Sym<'a>> {
        let enc = Enc::new(c, cands)?;
        let nk = enc.nk;
        let n = enc.cands.len();
        let mut thread = enc.constant(true);
        let mut global = enc.constant(true);
        for s in &c.steps {
            let lhs = s
                .lhs
                .iter()
                .fold(enc.constant(true), |a, &l| a.and(&enc.clit(l, false)));
            let rhs = s
                .rhs
                .iter()
                .fold(enc.constant(false), |a, &l| a.or(&enc.clit(l, true)));
            let clause = lhs.imp(&rhs);
            if s.unary {
                thread = and(&thread, &clause)?;
            } else {
                global = and(&global, &clause)?;
            }
        }
        let node = enc.node(c)?;
        let mut slots = Vec::new();
        let mut init = node.clone();
        for f in &c.initial {
            init = and(&init, &enc.fo(f, &mut slots)?)?;
        }
        let member = enc.member(false);
        let track_cur = enc.track_vars(false);
        let track_next = enc.track_vars(true);
        // Node validity is imposed on images rather than on the relation.
        let mut edge = global;
        if exact {
            // Every colour has a successor, every colour of the next node a predecessor.
            edge = and(&edge, &enc.cover(&thread, false)?)?;
            edge = and(&edge, &enc.cover(&thread, true)?)?;
        }
        let mut both = track_cur.clone();
        both.extend(&track_next);
        for k in 0..nk {
            let pair = and(&enc.denotes(k, false), &enc.denotes(k, true))?;
            edge = and(&edge, &and_exists(&pair, &thread, &both)?)?;
        }
        let mut node_labels = Vec::new();
        for &(i, pos) in &c.prop_evs {
            node_labels.push(enc.lit(enc.p_bit(i), false, pos));
        }
        let sat = |b: usize, pos: bool| -> Vec<usize> {
            (0..n)
                .filter(|&i| (enc.cands[i].0 >> b & 1 == 1) == pos)
                .collect()
        };
        for &(b, pos) in &c.unary_evs {
            for k in 0..nk {
                let l = sat(b, pos).into_iter().fold(enc.constant(false), |a, i| {
                    a.or(&enc.lit(enc.r_bit(k, i), false, true))
                });
                node_labels.push(l);
            }
            let l = sat(b, pos).into_iter().fold(enc.constant(false), |a, i| {
                a.or(&enc.lit(enc.g_bit(i), false, true))
            });
            node_labels.push(l);
        }
        let thread_labels = c
            .unary_evs
            .iter()
            .map(|&(b, pos)| enc.lit(enc.t_bit(b), false, pos))
            .collect();
        Ok(Sym {
            c,
            thread,
            init,
            node,
            member,
            edge,
            node_cur: enc.node_vars(false),
            node_next: enc.node_vars(true),
            track_cur,
            track_next,
            node_labels,
            thread_labels,
            enc,
        })
    }

    fn pre(&self, s: &Bdd) -> Result<Bdd> {
        and(
            &self.node,
            &and_exists(&shift(s, true), &self.edge, &self.node_next)?,
        )
    }

    fn post(&self, s: &Bdd) -> Result<Bdd> {
        and(
            &self.node,
            &shift(&and_exists(s, &self.edge, &self.node_cur)?, false),
        )
    }

    /// Predecessors in the product of nodes and tracked colours.
    fn pre_thread(&self, s: &Bdd) -> Result<Bdd> {
        let a = and_exists(&shift(s, true), &self.thread, &self.track_next)?;
        let b = and_exists(&a, &self.edge, &self.node_next)?;
        and(&and(&b, &self.member)?, &self.node)
    }

    fn post_thread(&self, s: &Bdd) -> Result<Bdd> {
        let a = and_exists(s, &self.thread, &self.track_cur)?;
        let b = and_exists(&a, &self.edge, &self.node_cur)?;
        and(&and(&shift(&b, false), &self.member)?, &self.node)
    }

    /// The states of `within` with an infinite path inside `within` visiting
    /// every label infinitely often, along `step` (predecessors or successors).
    fn fair(
        &self,
        within: &Bdd,
        labels: &[Bdd],
        step: impl Fn(&Bdd) -> Result<Bdd>,
    ) -> Result<Bdd> {
        let mut z = within.clone();
        loop {
            let mut next = and(&z, &step(&z)?)?;
            for l in labels {
                let mut reach = and(&next, l)?;
                loop {
                    let more = or(&reach, &and(&next, &step(&reach)?)?)?;
                    if more == reach {
                        break;
                    }
                    reach = more;
                }
                next = and(&next, &step(&reach)?)?;
            }
            if next == z {
                return Ok(z);
            }
            z = next;
        }
    }

    fn reachable(&self) -> Result<Bdd> {
        let mut r = self.init.clone();
        let mut frontier = r.clone();
        while !frontier.is_false() {
            let post = self.post(&frontier)?;
            frontier = post.and_not(&r);
            r = or(&r, &frontier)?;
        }
        Ok(r)
    }

    /// Nodes that may lie on the loop of an accepted lasso.
    fn loop_candidates(&self, reach: &Bdd) -> Result<Bdd> {
        let mut z = reach.clone();
        loop {
            z = self.fair(&z, &self.node_labels, |s| self.pre(s))?;
            z = self.fair(&z, &self.node_labels, |s| self.post(s))?;
            if z.is_false() {
                return Ok(z);
            }
            let mut w = and(&z, &self.member)?;
            loop {
                let before = w.clone();
                w = self.fair(&w, &self.thread_labels, |s| self.pre_thread(s))?;
                w = self.fair(&w, &self.thread_labels, |s| self.post_thread(s))?;
                if w == before {
                    break;
                }
            }
            let covered = checked(Bdd::binary_op_with_for_all(
                &self.member,
                &w,
                op_function::imp,
                &self.track_cur,
            ))?;
            let next = and(&z, &covered)?;
            if next == z {
                return Ok(z);
            }
            z = next;
        }
    }

    /// Reachable nodes from which a loop candidate can be reached.
    fn live(&self, reach: &Bdd, z: &Bdd) -> Result<Bdd> {
        let mut b = z.clone();
        loop {
            let more = or(&b, &and(reach, &self.pre(&b)?)?)?;
            if more == b {
                return Ok(b);
            }
            b = more;
        }
    }

    fn colours_in(&self, s: &Bdd) -> Vec<usize> {
        (0..self.enc.cands.len())
            .filter(|&i| {
                !s.and(&self.enc.lit(self.enc.g_bit(i), false, true))
                    .is_false()
            })
            .collect()
    }

    fn count(&self, s: &Bdd) -> f64 {
        s.and(&self.enc.node_only()).cardinality()
    }

    fn decode(&self, v: &BddValuation, index: &[Option<usize>]) -> ENode {
        let e = &self.enc;
        let on = |bit: usize| v.value(e.var(bit, false));
        let mut gamma = 0u64;
        let mut rho = vec![0; e.nk];
        for i in 0..e.cands.len() {
            if on(e.g_bit(i)) {
                let j = index[i].expect("colour in the support");
                gamma |= 1 << j;
                for (k, r) in rho.iter_mut().enumerate() {
                    if on(e.r_bit(k, i)) {
                        *r = j;
                    }
                }
            }
        }
        let props = (0..e.np)
            .filter(|&i| on(e.p_bit(i)))
            .fold(0u64, |a, i| a | 1 << i);
        ENode { gamma, rho, props }
    }

    /// Runs the explicit search on the given nodes, whose colours are `support`.
    fn explicit(
        &self,
        s: &Bdd,
        support: &[usize],
        jobs: usize,
    ) -> Result<Option<(Vec<ColourWorld>, Vec<ColourWorld>)>> {
        let mut index = vec![None; self.enc.cands.len()];
        for (j, &i) in support.iter().enumerate() {
            index[i] = Some(j);
        }
        let nodes: Vec<ENode> = s
            .and(&self.enc.node_only())
            .sat_valuations()
            .map(|v| self.decode(&v, &index))
            .collect();
        let cands = support.iter().map(|&i| self.enc.cands[i]).collect();
        let mut g = Explicit::from_nodes(self.c, cands, nodes, jobs)?;
        g.explore()?;
        Ok(g.find_lasso()?.map(|(prefix, lp)| {
            (
                prefix.iter().map(|&n| g.world(n)).collect(),
                lp.iter().map(|&n| g.world(n)).collect(),
            )
        }))
    }

    fn pick(&self, s: &Bdd) -> Option<Bdd> {
        let v = s.and(&self.enc.node_only()).most_negative_valuation()?;
        let e = &self.enc;
        Some(
            e.node_vars(false)
                .into_iter()
                .fold(e.constant(true), |a, x| {
                    a.and(&e.vars.mk_literal(x, v.value(x)))
                }),
        )
    }

    /// The colours of one lasso through the loop candidates, preferring
    /// nodes with few colours.
    fn lasso_colours(&self, live: &Bdd, z: &Bdd) -> Result<Option<Vec<usize>>> {
        let Some(mut x) = self.pick(z) else {
            return Ok(None);
        };
        let mut walk: Vec<Bdd> = Vec::new();
        while !walk.contains(&x) {
            if walk.len() == MAX_WALK {
                return Ok(None);
            }
            walk.push(x.clone());
            let Some(y) = self.pick(&and(&self.post(&x)?, z)?) else {
                return Ok(None);
            };
            x = y;
        }
        let entry = x;
        let mut layers = vec![and(&self.init, live)?];
        while and(layers.last().unwrap(), &entry)?.is_false() {
            let next = and(&self.post(layers.last().unwrap())?, live)?;
            if layers.contains(&next) || layers.len() > MAX_WALK {
                return Ok(None);
            }
            layers.push(next);
        }
        let mut path = vec![entry];
        for l in layers.iter().rev().skip(1) {
            let prev = and(l, &self.pre(path.last().unwrap())?)?;
            match self.pick(&prev) {
                Some(p) => path.push(p),
                None => return Ok(None),
            }
        }
        let all = path
            .iter()
            .chain(&walk)
            .fold(self.enc.constant(false), |a, b| a.or(b));
        Ok(Some(self.colours_in(&all)))
    }

    /// Lassos over one or two colours whose nodes meet the loop candidates.
    fn few_colours(
        &self,
        live: &Bdd,
        z: &Bdd,
        support: &[usize],
        jobs: usize,
    ) -> Result<Option<(Vec<ColourWorld>, Vec<ColourWorld>)>> {
        let mut tried = 0;
        let singles: Vec<usize> = support
            .iter()
            .copied()
            .filter(|&i| self.only(z, &[i]).is_ok_and(|b| !b.is_false()))
            .collect();
        let pairs = support
            .iter()
            .enumerate()
            .flat_map(|(a, &i)| support[a + 1..].iter().map(move |&j| vec![i, j]));
        for colours in singles.iter().map(|&i| vec![i]).chain(pairs) {
            if tried == MAX_SUBSETS {
                break;
            }
            if self.only(z, &colours)?.is_false() {
                continue;
            }
            tried += 1;
            let sub = self.only(live, &colours)?;
            match self.explicit(&sub, &colours, jobs) {
                Ok(Some(found)) => return Ok(Some(found)),
                Ok(None) | Err(Error::ResourceLimit(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(None)
    }

    fn only(&self, s: &Bdd, colours: &[usize]) -> Result<Bdd> {
        let mut out = s.clone();
        for i in 0..self.enc.cands.len() {
            if !colours.contains(&i) {
                out = out.and(&self.enc.lit(self.enc.g_bit(i), false, false));
            }
        }
        checked(out)
    }
}

/// The number of nodes of the behaviour graph, counted on the BDD of the
/// node condition.
pub(crate) fn count_nodes(c: &Compiled) -> Result<f64> {
    let enc = Enc::new(c, c.candidates(None, MAX_CANDIDATES)?)?;
    Ok(enc.node(c)?.and(&enc.node_only()).cardinality())
}

pub(crate) fn decide(c: &Compiled, jobs: usize) -> Result<Outcome> {
    match run(c, jobs) {
        Err(Error::ResourceLimit(why)) => Ok(Outcome::Unknown(why)),
        other => other,
    }
}

fn run(c: &Compiled, jobs: usize) -> Result<Outcome> {
    let cands = c.candidates(None, MAX_CANDIDATES)?;
    let sym = match Sym::new(c, cands.clone(), true) {
        Err(Error::ResourceLimit(_)) => Sym::new(c, cands, false)?,
        other => other?,
    };
    let reach = sym.reachable()?;
    let z = sym.loop_candidates(&reach)?;
    if z.is_false() {
        return Ok(Outcome::Unsat);
    }
    let live = sym.live(&reach, &z)?;
    let support = sym.colours_in(&live);
    if support.len() <= MAX_EXACT_COLOURS && sym.count(&live) <= MAX_EXACT_NODES as f64 {
        match sym.explicit(&live, &support, jobs) {
            Ok(Some((prefix, lp))) => return Ok(Outcome::Sat(prefix, lp)),
            Ok(None) => return Ok(Outcome::Unsat),
            Err(Error::ResourceLimit(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if let Some((prefix, lp)) = sym.few_colours(&live, &z, &support, jobs)? {
        return Ok(Outcome::Sat(prefix, lp));
    }
    if let Some(colours) = sym.lasso_colours(&live, &z)? {
        if colours.len() <= MAX_LASSO_COLOURS {
            let sub = sym.only(&live, &colours)?;
            if sym.count(&sub) <= MAX_EXACT_NODES as f64 {
                match sym.explicit(&sub, &colours, jobs) {
                    Ok(Some((prefix, lp))) => return Ok(Outcome::Sat(prefix, lp)),
                    Ok(None) | Err(Error::ResourceLimit(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(Outcome::Unknown(format!(
        "no accepted lasso found over few of {} colours",
        support.len()
    )))
}
