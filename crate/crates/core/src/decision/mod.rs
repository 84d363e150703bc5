//! Satisfiability of temporal problems via the behaviour graph.
//!
//! A node of the behaviour graph is a colour scheme: the set of colours
//! present in a world, the colours of the constants and the proposition
//! valuation. Nodes are the schemes whose world satisfies the universal part,
//! edges join schemes whose colours can be matched up by the step clauses, and
//! a problem has a model iff some reachable cycle admits colour threads that
//! fulfil every eventuality. Problems with few candidate colours are decided
//! by explicit search; larger ones by symbolic pruning, which is conclusive
//! when it refutes, followed by a search for small witnesses.

mod compiled;
mod explicit;
pub mod oracle;
mod project;
mod symbolic;
mod witness;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{Formula, Signature, TemporalStructure};
use crate::mono_sat::{fo_satisfiable, Colour, ColourSpace};
use crate::normal_form::{to_dsnf, StepClause, TemporalProblem};

use compiled::{Compiled, Ctx};
use witness::{build_witness, ColourWorld};

pub use oracle::{bounded_model_oracle, OracleBounds, OracleResult};

/// `(Gamma, rho, pi)`: colours present, colours of constants, proposition values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ColourScheme {
    pub gamma: Vec<Colour>,
    pub rho: BTreeMap<String, Colour>,
    pub props: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BehaviourGraph {
    #[serde(skip)]
    pub space: ColourSpace,
    pub nodes: Vec<ColourScheme>,
    pub edges: Vec<(usize, usize)>,
    pub initial: Vec<usize>,
}

impl BehaviourGraph {
    /// Text dump; colour ids are positions in the canonical colour enumeration.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let ids: Vec<String> = n
                .gamma
                .iter()
                .map(|&g| self.space.index_of(g).to_string())
                .collect();
            let _ = write!(out, "node {i}: {{{}}} rho:", ids.join(", "));
            for (c, &g) in &n.rho {
                let _ = write!(out, " {c}->{}", self.space.index_of(g));
            }
            if !n.props.is_empty() {
                let on: Vec<&str> = n
                    .props
                    .iter()
                    .filter(|(_, &v)| v)
                    .map(|(p, _)| p.as_str())
                    .collect();
                let _ = write!(out, " props: {{{}}}", on.join(", "));
            }
            out.push('\n');
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "edge {a} {b}");
        }
        let init: Vec<String> = self.initial.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "initial: {}", init.join(" "));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub satisfiable: bool,
    pub witness: Option<TemporalStructure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Validity {
    pub valid: bool,
    pub countermodel: Option<TemporalStructure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecisionOptions {
    /// Worker threads for graph construction; results do not depend on it.
    pub jobs: usize,
}

impl Default for DecisionOptions {
    fn default() -> Self {
        DecisionOptions { jobs: 1 }
    }
}

fn colour_formula(space: &ColourSpace, g: Colour, var: &str) -> Formula {
    Formula::conj(space.preds.iter().map(|p| {
        let a = Formula::unary(p, var);
        if space.holds(g, p) {
            a
        } else {
            Formula::not(a)
        }
    }))
}

fn ground_colour_formula(space: &ColourSpace, g: Colour, c: &str) -> Formula {
    Formula::conj(space.preds.iter().map(|p| {
        let a = Formula::ground(p, c);
        if space.holds(g, p) {
            a
        } else {
            Formula::not(a)
        }
    }))
}

/// The first-order formula whose models are the worlds described by a scheme.
fn scheme_formula(space: &ColourSpace, c: &ColourScheme, p: &TemporalProblem) -> Formula {
    let x = crate::normal_form::VAR;
    let mut parts: Vec<Formula> = p.universal.clone();
    parts.push(Formula::forall(
        x,
        Formula::disj(c.gamma.iter().map(|&g| colour_formula(space, g, x))),
    ));
    parts.extend(
        c.gamma
            .iter()
            .map(|&g| Formula::exists(x, colour_formula(space, g, x))),
    );
    parts.extend(
        c.rho
            .iter()
            .map(|(k, &g)| ground_colour_formula(space, g, k)),
    );
    parts.extend(c.props.iter().map(|(q, &v)| {
        if v {
            Formula::prop(q)
        } else {
            Formula::not(Formula::prop(q))
        }
    }));
    Formula::conj(parts)
}

fn check_scheme(space: &ColourSpace, c: &ColourScheme, p: &TemporalProblem) -> Result<()> {
    let sig = &p.signature;
    let bad = |m: String| Err(Error::InvalidStructure(m));
    if c.gamma.is_empty() {
        return bad("empty colour set".into());
    }
    if let Some(g) = c.gamma.iter().find(|&&g| !space.is_valid(g)) {
        return bad(format!("{} is not a colour", space.describe(*g)));
    }
    if c.rho.keys().ne(sig.constants.iter()) {
        return bad("rho must map exactly the constants".into());
    }
    if let Some((k, _)) = c.rho.iter().find(|(_, g)| !c.gamma.contains(g)) {
        return bad(format!("rho({k}) is not in gamma"));
    }
    let props: Vec<&str> = sig.propositions();
    if c.props.keys().map(String::as_str).ne(props.iter().copied()) {
        return bad("proposition valuation must cover exactly the propositions".into());
    }
    Ok(())
}

/// Whether a scheme is a node: its describing first-order formula together
/// with the universal part is satisfiable.
pub fn node_condition(c: &ColourScheme, p: &TemporalProblem) -> Result<bool> {
    p.validate()?;
    let space = ColourSpace::new(&p.signature)?;
    check_scheme(&space, c, p)?;
    Ok(fo_satisfiable(&scheme_formula(&space, c, p), &p.signature)?.is_some())
}

/// As [`node_condition`], for the initial part together with the universal part.
pub fn initial_condition(c: &ColourScheme, p: &TemporalProblem) -> Result<bool> {
    p.validate()?;
    let space = ColourSpace::new(&p.signature)?;
    check_scheme(&space, c, p)?;
    let mut f = scheme_formula(&space, c, p);
    for i in &p.initial {
        f = Formula::and(f, i.clone().replace_start(true));
    }
    Ok(fo_satisfiable(&f, &p.signature)?.is_some())
}

/// Whether the colour `g2` may follow `g` under the unary step clauses of `s`.
/// Clauses with propositional or ground literals constrain whole worlds and
/// are ignored here.
pub fn step_compatible(g: Colour, g2: Colour, s: &[StepClause], sig: &Signature) -> Result<bool> {
    let space = ColourSpace::new(sig)?;
    let holds = |c: Colour, l: &crate::normal_form::Literal| -> Result<Option<bool>> {
        match &l.atom {
            crate::normal_form::LitAtom::Unary(p) => {
                let i = space
                    .pred_index(p)
                    .ok_or_else(|| Error::UnknownSymbol(p.clone()))?;
                Ok(Some((c.0 >> i & 1 == 1) == l.positive))
            }
            _ => Ok(None),
        }
    };
    'clause: for cl in s {
        let mut lits = Vec::new();
        for l in &cl.lhs {
            match holds(g, l)? {
                Some(v) => lits.push(v),
                None => continue 'clause,
            }
        }
        let mut rhs = Vec::new();
        for l in &cl.rhs {
            match holds(g2, l)? {
                Some(v) => rhs.push(v),
                None => continue 'clause,
            }
        }
        if lits.iter().all(|&v| v) && !rhs.iter().any(|&v| v) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn scheme_of(c: &Compiled, gamma: Vec<Colour>, ctx: &Ctx) -> ColourScheme {
    ColourScheme {
        gamma,
        rho: c
            .consts
            .iter()
            .cloned()
            .zip(ctx.rho.iter().copied())
            .collect(),
        props: c
            .props
            .iter()
            .enumerate()
            .map(|(i, q)| (q.clone(), ctx.props >> i & 1 == 1))
            .collect(),
    }
}

/// The behaviour graph with all nodes enumerated; fails with a resource error
/// when the candidate colours are too many for explicit enumeration.
pub fn build_behaviour_graph(
    p: &TemporalProblem,
    opts: &DecisionOptions,
) -> Result<BehaviourGraph> {
    let c = Compiled::new(p)?;
    let mut g = explicit::Explicit::build(&c, opts.jobs)?;
    g.complete()?;
    let nodes = (0..g.nodes.len())
        .map(|n| {
            let w = g.world(n);
            scheme_of(&c, w.gamma, &w.ctx)
        })
        .collect();
    let edges = g
        .succ
        .iter()
        .enumerate()
        .flat_map(|(a, s)| s.iter().map(move |&b| (a, b)))
        .collect();
    Ok(BehaviourGraph {
        space: c.space.clone(),
        nodes,
        edges,
        initial: g.initial.clone(),
    })
}

/// The number of nodes of the behaviour graph, reachable or not. Counted by
/// enumeration when the candidate colours are few and on a BDD otherwise.
pub fn count_nodes(p: &TemporalProblem) -> Result<f64> {
    p.validate()?;
    let c = Compiled::new(p)?;
    match explicit::Explicit::build(&c, 1) {
        Ok(g) => Ok(g.nodes.len() as f64),
        Err(Error::ResourceLimit(_)) => symbolic::count_nodes(&c),
        Err(e) => Err(e),
    }
}

fn finish(
    c: &Compiled,
    p: &TemporalProblem,
    prefix: &[ColourWorld],
    lp: &[ColourWorld],
) -> Result<Verdict> {
    let m = build_witness(c, prefix, lp)
        .ok_or_else(|| Error::InvalidStructure("accepted lasso yields no witness".into()))?;
    if !m.evaluate(0, &BTreeMap::new(), &p.associated_formula())? || !m.xor_valid(&p.signature) {
        return Err(Error::InvalidStructure(
            "witness failed verification".into(),
        ));
    }
    Ok(Verdict {
        satisfiable: true,
        witness: Some(m),
    })
}

pub fn check_satisfiability(p: &TemporalProblem) -> Result<Verdict> {
    check_satisfiability_with(p, &DecisionOptions::default())
}

pub fn check_satisfiability_with(p: &TemporalProblem, opts: &DecisionOptions) -> Result<Verdict> {
    p.validate()?;
    let proj = project::project(p);
    let mut v = decide(&proj.problem, opts)?;
    if let Some(m) = v.witness.take() {
        let m = proj.extend(&p.signature, m);
        if !m.evaluate(0, &BTreeMap::new(), &p.associated_formula())? || !m.xor_valid(&p.signature)
        {
            return Err(Error::InvalidStructure(
                "extended witness failed verification".into(),
            ));
        }
        v.witness = Some(m);
    }
    Ok(v)
}

fn decide(p: &TemporalProblem, opts: &DecisionOptions) -> Result<Verdict> {
    let c = Compiled::new(p)?;
    let unsat = Verdict {
        satisfiable: false,
        witness: None,
    };
    match explicit::Explicit::build(&c, opts.jobs) {
        Ok(g) => match g.find_lasso()? {
            Some((prefix, lp)) => {
                let prefix: Vec<ColourWorld> = prefix.iter().map(|&n| g.world(n)).collect();
                let lp: Vec<ColourWorld> = lp.iter().map(|&n| g.world(n)).collect();
                finish(&c, p, &prefix, &lp)
            }
            None => Ok(unsat),
        },
        Err(Error::ResourceLimit(_)) => match symbolic::decide(&c, opts.jobs)? {
            symbolic::Outcome::Unsat => Ok(unsat),
            symbolic::Outcome::Sat(prefix, lp) => finish(&c, p, &prefix, &lp),
            symbolic::Outcome::Unknown(why) => Err(Error::Undecided(why)),
        },
        Err(e) => Err(e),
    }
}

/// Satisfiability of a formula; the witness is restricted to the formula's signature.
pub fn formula_satisfiability(
    f: &Formula,
    sig: &Signature,
    opts: &DecisionOptions,
) -> Result<Verdict> {
    let p = to_dsnf(f, sig)?;
    let mut v = check_satisfiability_with(&p, opts)?;
    let keep: BTreeSet<String> = sig
        .preds
        .keys()
        .cloned()
        .chain(sig.xor_sets.iter().flat_map(|x| x.members.iter().cloned()))
        .collect();
    v.witness = v.witness.map(|m| m.restrict_to(&keep));
    if let Some(m) = &v.witness {
        if !m.evaluate(0, &BTreeMap::new(), f)? {
            return Err(Error::InvalidStructure(
                "witness does not satisfy the input formula".into(),
            ));
        }
    }
    Ok(v)
}

/// `f` is valid iff its negation is unsatisfiable; a model of the negation is a countermodel.
pub fn check_validity(f: &Formula, sig: &Signature, opts: &DecisionOptions) -> Result<Validity> {
    let v = formula_satisfiability(&Formula::not(f.clone()), sig, opts)?;
    Ok(Validity {
        valid: !v.satisfiable,
        countermodel: v.witness,
    })
}
