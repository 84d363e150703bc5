//! Bounded search for lasso models by grounding to propositional SAT.
//!
//! For a domain size, prefix length and loop length the formula is unfolded
//! over the lasso positions and handed to a SAT solver; shapes are tried in
//! increasing order.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use varisat::{ExtendFormula, Lit, Solver};

use crate::error::{Error, Result};
use crate::logic::{Formula, Signature, TemporalStructure, Term, World};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum OracleResult {
    Model(TemporalStructure),
    /// No model within the bounds; not a proof of unsatisfiability.
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleBounds {
    pub max_domain: usize,
    pub max_prefix: usize,
    pub max_loop: usize,
}

struct Encoder<'a> {
    solver: Solver<'static>,
    sig: &'a Signature,
    domain: usize,
    prefix: usize,
    positions: usize,
    truth: Lit,
    atoms: HashMap<(String, usize, usize), Lit>,
    props: HashMap<(String, usize), Lit>,
    consts: HashMap<(String, usize), Lit>,
    memo: HashMap<(usize, usize, Vec<usize>), Lit>,
}

impl<'a> Encoder<'a> {
    fn new(sig: &'a Signature, domain: usize, prefix: usize, looplen: usize) -> Self {
        let mut solver = Solver::new();
        let truth = solver.new_lit();
        solver.add_clause(&[truth]);
        let mut e = Encoder {
            solver,
            sig,
            domain,
            prefix,
            positions: prefix + looplen,
            truth,
            atoms: HashMap::new(),
            props: HashMap::new(),
            consts: HashMap::new(),
            memo: HashMap::new(),
        };
        for c in &sig.constants {
            let lits: Vec<Lit> = (0..domain).map(|el| e.constant(c, el)).collect();
            e.exactly_one(&lits);
        }
        for x in &sig.xor_sets {
            for el in 0..domain {
                for pos in 0..e.positions {
                    let lits: Vec<Lit> = x.members.iter().map(|m| e.atom(m, el, pos)).collect();
                    e.exactly_one(&lits);
                }
            }
        }
        e
    }

    fn exactly_one(&mut self, lits: &[Lit]) {
        self.solver.add_clause(lits);
        for i in 0..lits.len() {
            for j in i + 1..lits.len() {
                self.solver.add_clause(&[!lits[i], !lits[j]]);
            }
        }
    }

    fn atom(&mut self, p: &str, el: usize, pos: usize) -> Lit {
        let solver = &mut self.solver;
        *self
            .atoms
            .entry((p.to_string(), el, pos))
            .or_insert_with(|| solver.new_lit())
    }

    fn prop(&mut self, p: &str, pos: usize) -> Lit {
        let solver = &mut self.solver;
        *self
            .props
            .entry((p.to_string(), pos))
            .or_insert_with(|| solver.new_lit())
    }

    fn constant(&mut self, c: &str, el: usize) -> Lit {
        let solver = &mut self.solver;
        *self
            .consts
            .entry((c.to_string(), el))
            .or_insert_with(|| solver.new_lit())
    }

    fn and(&mut self, lits: Vec<Lit>) -> Lit {
        if lits.iter().any(|&l| l == !self.truth) {
            return !self.truth;
        }
        let lits: Vec<Lit> = lits.into_iter().filter(|&l| l != self.truth).collect();
        match lits.len() {
            0 => self.truth,
            1 => lits[0],
            _ => {
                let g = self.solver.new_lit();
                let mut long = vec![g];
                for &l in &lits {
                    self.solver.add_clause(&[!g, l]);
                    long.push(!l);
                }
                self.solver.add_clause(&long);
                g
            }
        }
    }

    fn or(&mut self, lits: Vec<Lit>) -> Lit {
        let negated = self.and(lits.into_iter().map(|l| !l).collect());
        !negated
    }

    fn succ(&self, pos: usize) -> usize {
        if pos + 1 == self.positions {
            self.prefix
        } else {
            pos + 1
        }
    }

    fn future(&self, pos: usize) -> Vec<usize> {
        if pos < self.prefix {
            (pos..self.positions).collect()
        } else {
            (pos..self.positions).chain(self.prefix..pos).collect()
        }
    }

    fn encode(&mut self, f: &Formula, pos: usize, a: &mut Vec<(String, usize)>) -> Result<Lit> {
        use Formula::*;
        let key = (
            f as *const Formula as usize,
            pos,
            a.iter().map(|(_, e)| *e).collect(),
        );
        if let Some(&l) = self.memo.get(&key) {
            return Ok(l);
        }
        let lit = match f {
            True => self.truth,
            False => !self.truth,
            Start => {
                if pos == 0 {
                    self.truth
                } else {
                    !self.truth
                }
            }
            Atom(p, args) => match args.as_slice() {
                [] => self.prop(p, pos),
                [Term::Var(v)] => {
                    let el = a
                        .iter()
                        .rev()
                        .find(|(n, _)| n == v)
                        .map(|(_, e)| *e)
                        .ok_or_else(|| Error::FreeVariable(v.clone()))?;
                    self.atom(p, el, pos)
                }
                [Term::Const(c)] => {
                    let mut options = Vec::new();
                    for el in 0..self.domain {
                        let k = self.constant(c, el);
                        let at = self.atom(p, el, pos);
                        options.push(self.and(vec![k, at]));
                    }
                    self.or(options)
                }
                _ => return Err(Error::NotMonadic(p.clone(), args.len())),
            },
            Not(x) => !self.encode(x, pos, a)?,
            And(x, y) => {
                let v = vec![self.encode(x, pos, a)?, self.encode(y, pos, a)?];
                self.and(v)
            }
            Or(x, y) => {
                let v = vec![self.encode(x, pos, a)?, self.encode(y, pos, a)?];
                self.or(v)
            }
            Implies(x, y) => {
                let v = vec![!self.encode(x, pos, a)?, self.encode(y, pos, a)?];
                self.or(v)
            }
            Iff(x, y) => {
                let (l, r) = (self.encode(x, pos, a)?, self.encode(y, pos, a)?);
                let both = self.and(vec![l, r]);
                let neither = self.and(vec![!l, !r]);
                self.or(vec![both, neither])
            }
            Forall(v, x) | Exists(v, x) => {
                let mut parts = Vec::new();
                for el in 0..self.domain {
                    a.push((v.clone(), el));
                    let r = self.encode(x, pos, a);
                    a.pop();
                    parts.push(r?);
                }
                if matches!(f, Forall(..)) {
                    self.and(parts)
                } else {
                    self.or(parts)
                }
            }
            Next(x) => self.encode(x, self.succ(pos), a)?,
            Always(x) | Sometime(x) => {
                let mut parts = Vec::new();
                for j in self.future(pos) {
                    parts.push(self.encode(x, j, a)?);
                }
                if matches!(f, Always(_)) {
                    self.and(parts)
                } else {
                    self.or(parts)
                }
            }
            Until(x, y) | Unless(x, y) => {
                let fut = self.future(pos);
                let mut options = Vec::new();
                let mut held = Vec::new();
                for &j in &fut {
                    let b = self.encode(y, j, a)?;
                    let mut conj = held.clone();
                    conj.push(b);
                    options.push(self.and(conj));
                    held.push(self.encode(x, j, a)?);
                }
                if matches!(f, Unless(..)) {
                    options.push(self.and(held));
                }
                self.or(options)
            }
        };
        self.memo.insert(key, lit);
        Ok(lit)
    }

    fn extract(&self, model: &[Lit]) -> TemporalStructure {
        let value: BTreeMap<varisat::Var, bool> =
            model.iter().map(|l| (l.var(), l.is_positive())).collect();
        let holds = |l: Lit| value.get(&l.var()).copied().unwrap_or(false) == l.is_positive();
        let mut worlds = vec![World::default(); self.positions];
        let mut atoms: Vec<_> = self.atoms.iter().collect();
        atoms.sort();
        for ((p, el, pos), &l) in atoms {
            if holds(l) {
                worlds[*pos].insert(p, vec![*el]);
            }
        }
        let mut props: Vec<_> = self.props.iter().collect();
        props.sort();
        for ((p, pos), &l) in props {
            if holds(l) {
                worlds[*pos].set_prop(p, true);
            }
        }
        let mut constants = BTreeMap::new();
        for c in &self.sig.constants {
            let el = (0..self.domain)
                .find(|&el| holds(self.consts[&(c.clone(), el)]))
                .unwrap_or(0);
            constants.insert(c.clone(), el);
        }
        let lasso = worlds.split_off(self.prefix);
        TemporalStructure {
            domain: (1..=self.domain).map(|i| format!("e{i}")).collect(),
            constants,
            prefix: worlds,
            lasso,
        }
    }
}

/// Searches for a lasso model with at most `max_domain` elements, a prefix of
/// at most `max_prefix` worlds and a loop of at most `max_loop` worlds.
/// Shapes are tried by domain size, then prefix length, then loop length.
pub fn bounded_model_oracle(
    f: &Formula,
    sig: &Signature,
    bounds: OracleBounds,
) -> Result<OracleResult> {
    f.check_against(sig)?;
    if !f.is_closed() {
        let vars: Vec<String> = f.free_variables().into_iter().collect();
        return Err(Error::NotClosed(vars.join(", ")));
    }
    if let Some((p, a)) = f.first_non_monadic() {
        return Err(Error::NotMonadic(p.to_string(), a));
    }
    let start = f.mentions_start();
    for domain in 1..=bounds.max_domain {
        for prefix in 0..=bounds.max_prefix {
            // With an empty prefix position 0 recurs, so `start` needs a prefix.
            if prefix == 0 && start {
                continue;
            }
            for looplen in 1..=bounds.max_loop {
                let mut enc = Encoder::new(sig, domain, prefix, looplen);
                let root = enc.encode(f, 0, &mut Vec::new())?;
                enc.solver.add_clause(&[root]);
                let sat = enc
                    .solver
                    .solve()
                    .map_err(|e| Error::ResourceLimit(e.to_string()))?;
                if sat {
                    let model = enc.solver.model().unwrap_or_default();
                    let m = enc.extract(&model);
                    if !m.evaluate(0, &BTreeMap::new(), f)? || !m.xor_valid(sig) {
                        return Err(Error::InvalidStructure(
                            "oracle model failed re-evaluation".into(),
                        ));
                    }
                    return Ok(OracleResult::Model(m));
                }
            }
        }
    }
    Ok(OracleResult::Exhausted)
}
