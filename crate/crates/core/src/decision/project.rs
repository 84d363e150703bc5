//! Dropping symbols a problem does not mention.
//!
//! Unmentioned predicates, propositions and constants impose nothing, and the
//! unmentioned members of an XOR set are interchangeable, so one of them can
//! stand for all. Models of the projected problem extend to the full
//! signature by fixing the dropped symbols.

use std::collections::BTreeSet;

use crate::logic::{Formula, Signature, TemporalStructure, Term};
use crate::normal_form::TemporalProblem;

pub(crate) struct Projection {
    pub problem: TemporalProblem,
    /// For each XOR set dropped entirely, the member made to hold everywhere.
    fixed: Vec<String>,
}

fn mentioned(p: &TemporalProblem) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut preds = BTreeSet::new();
    let mut consts = BTreeSet::new();
    let mut visit = |f: &Formula| {
        f.visit(&mut |g| {
            if let Formula::Atom(q, args) = g {
                preds.insert(q.clone());
                for t in args {
                    if let Term::Const(c) = t {
                        consts.insert(c.clone());
                    }
                }
            }
        })
    };
    for f in p.universal.iter().chain(&p.initial) {
        visit(f);
    }
    for s in &p.step {
        for l in s.lhs.iter().chain(&s.rhs) {
            visit(&l.to_formula());
        }
    }
    for l in &p.eventualities {
        visit(&l.to_formula());
    }
    (preds, consts)
}

pub(crate) fn project(p: &TemporalProblem) -> Projection {
    let (preds, consts) = mentioned(p);
    let sig = &p.signature;
    let mut out = Signature::new();
    let mut fixed = Vec::new();
    for x in &sig.xor_sets {
        let used: Vec<&str> = x
            .members
            .iter()
            .filter(|m| preds.contains(*m))
            .map(String::as_str)
            .collect();
        if used.is_empty() {
            fixed.push(x.members[0].clone());
            continue;
        }
        let mut members = used;
        if let Some(rest) = x.members.iter().find(|m| !preds.contains(*m)) {
            members.push(rest);
        }
        out.add_xor_set(&x.name, &members)
            .expect("subset of a valid signature");
    }
    for (q, &arity) in &sig.preds {
        if preds.contains(q) {
            out.add_pred(q, arity).expect("subset of a valid signature");
        }
    }
    for c in &sig.constants {
        if consts.contains(c) {
            out.add_constant(c).expect("subset of a valid signature");
        }
    }
    let mut problem = p.clone();
    problem.signature = out;
    Projection { problem, fixed }
}

impl Projection {
    /// Extends a model of the projected problem to the full signature.
    pub fn extend(&self, full: &Signature, mut m: TemporalStructure) -> TemporalStructure {
        let n = m.domain.len();
        for w in m.prefix.iter_mut().chain(m.lasso.iter_mut()) {
            for member in &self.fixed {
                for e in 0..n {
                    w.insert(member, vec![e]);
                }
            }
        }
        for c in &full.constants {
            m.constants.entry(c.clone()).or_insert(0);
        }
        m
    }
}
