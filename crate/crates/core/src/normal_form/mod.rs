//! Divided separated normal form: a temporal problem `<U, I, S, E>` of
//! universal formulas, initial formulas, step clauses and eventualities.

mod dsnf;
pub mod nnf;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{parse_formula, Formula, Signature, Term};

pub use dsnf::to_dsnf;

/// The variable every unary literal of a problem is stated over.
pub const VAR: &str = "x";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum LitAtom {
    /// `P(x)`
    Unary(String),
    /// `p`
    Prop(String),
    /// `P(c)`
    Ground(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Literal {
    pub positive: bool,
    pub atom: LitAtom,
}

impl Literal {
    pub fn pos(atom: LitAtom) -> Self {
        Literal {
            positive: true,
            atom,
        }
    }

    pub fn neg(atom: LitAtom) -> Self {
        Literal {
            positive: false,
            atom,
        }
    }

    pub fn negated(&self) -> Self {
        Literal {
            positive: !self.positive,
            atom: self.atom.clone(),
        }
    }

    pub fn pred(&self) -> &str {
        match &self.atom {
            LitAtom::Unary(p) | LitAtom::Prop(p) | LitAtom::Ground(p, _) => p,
        }
    }

    pub fn is_unary(&self) -> bool {
        matches!(self.atom, LitAtom::Unary(_))
    }

    pub fn to_formula(&self) -> Formula {
        let atom = match &self.atom {
            LitAtom::Unary(p) => Formula::unary(p, VAR),
            LitAtom::Prop(p) => Formula::prop(p),
            LitAtom::Ground(p, c) => Formula::ground(p, c),
        };
        if self.positive {
            atom
        } else {
            Formula::not(atom)
        }
    }

    /// Reads a literal back from a formula `A`, `~A` with `A` an atom of arity at most one.
    pub fn from_formula(f: &Formula) -> Option<Literal> {
        let (positive, atom) = match f {
            Formula::Not(a) => (false, &**a),
            a => (true, a),
        };
        let atom = match atom {
            Formula::Atom(p, args) => match args.as_slice() {
                [] => LitAtom::Prop(p.clone()),
                [Term::Var(_)] => LitAtom::Unary(p.clone()),
                [Term::Const(c)] => LitAtom::Ground(p.clone(), c.clone()),
                _ => return None,
            },
            _ => return None,
        };
        Some(Literal { positive, atom })
    }
}

/// `lhs -> next (rhs)`: a conjunction of literals implies a disjunction at the next moment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StepClause {
    pub lhs: Vec<Literal>,
    pub rhs: Vec<Literal>,
}

impl StepClause {
    pub fn is_unary(&self) -> bool {
        self.lhs.iter().chain(&self.rhs).any(Literal::is_unary)
    }

    /// The clause as a formula, universally closed over [`VAR`] when it has unary literals.
    pub fn to_formula(&self) -> Formula {
        let body = Formula::implies(
            Formula::conj(self.lhs.iter().map(Literal::to_formula)),
            Formula::next(Formula::disj(self.rhs.iter().map(Literal::to_formula))),
        );
        if self.is_unary() {
            Formula::forall(VAR, body)
        } else {
            body
        }
    }

    fn unquantified(&self) -> Formula {
        match self.to_formula() {
            Formula::Forall(_, b) => *b,
            f => f,
        }
    }

    /// Re-encodes XOR literals so that the left-hand side only has negative ones
    /// and the right-hand side only positive ones, then drops duplicates.
    /// Returns `None` when the clause is trivially true.
    pub fn normalise(&self, sig: &Signature) -> Option<StepClause> {
        let others = |l: &Literal| -> Option<Vec<Literal>> {
            let set = sig.xor_set_of(l.pred())?;
            let rebuild = |m: &str| match &l.atom {
                LitAtom::Ground(_, c) => LitAtom::Ground(m.to_string(), c.clone()),
                _ => LitAtom::Unary(m.to_string()),
            };
            Some(
                sig.xor_sets[set]
                    .members
                    .iter()
                    .filter(|m| *m != l.pred())
                    .map(|m| Literal {
                        positive: !l.positive,
                        atom: rebuild(m),
                    })
                    .collect(),
            )
        };
        let mut lhs = Vec::new();
        for l in &self.lhs {
            match (l.positive, others(l)) {
                (true, Some(rest)) => lhs.extend(rest),
                _ => lhs.push(l.clone()),
            }
        }
        let mut rhs = Vec::new();
        for l in &self.rhs {
            match (l.positive, others(l)) {
                (false, Some(rest)) => rhs.extend(rest),
                _ => rhs.push(l.clone()),
            }
        }
        lhs.sort();
        lhs.dedup();
        rhs.sort();
        rhs.dedup();
        let complementary = |v: &[Literal]| v.windows(2).any(|w| w[0].atom == w[1].atom);
        if complementary(&lhs) || complementary(&rhs) {
            return None;
        }
        Some(StepClause { lhs, rhs })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemporalProblem {
    pub signature: Signature,
    pub universal: Vec<Formula>,
    pub initial: Vec<Formula>,
    pub step: Vec<StepClause>,
    /// `Unary` literals stand for `always forall x. sometime L(x)`, the others for `always sometime l`.
    pub eventualities: Vec<Literal>,
}

impl TemporalProblem {
    pub fn new(signature: Signature) -> Self {
        TemporalProblem {
            signature,
            universal: Vec::new(),
            initial: Vec::new(),
            step: Vec::new(),
            eventualities: Vec::new(),
        }
    }

    pub fn eventuality_formula(l: &Literal) -> Formula {
        let ev = Formula::sometime(l.to_formula());
        if l.is_unary() {
            Formula::forall(VAR, ev)
        } else {
            ev
        }
    }

    /// `I & always U & always S & always E`, one conjunct per part.
    pub fn associated_formula(&self) -> Formula {
        let initial = self.initial.iter().cloned();
        let universal = self.universal.iter().cloned().map(Formula::always);
        let step = self.step.iter().map(|c| Formula::always(c.to_formula()));
        let ev = self
            .eventualities
            .iter()
            .map(|l| Formula::always(Self::eventuality_formula(l)));
        Formula::conj(initial.chain(universal).chain(step).chain(ev))
    }

    pub fn validate(&self) -> Result<()> {
        let sig = &self.signature;
        let bad = |m: String| Err(Error::IllFormedProblem(m));
        for f in self.universal.iter().chain(&self.initial) {
            f.check_against(sig)?;
            if !f.is_closed() {
                return bad(format!("`{f}` is not closed"));
            }
            if !f.is_monadic() {
                return bad(format!("`{f}` is not monadic"));
            }
            let fo = f.clone().replace_start(true);
            if !fo.is_first_order() {
                return bad(format!("`{f}` contains a temporal operator"));
            }
        }
        if let Some(f) = self.universal.iter().find(|f| f.mentions_start()) {
            return bad(format!("universal formula `{f}` mentions start"));
        }
        let check_lit = |l: &Literal| -> Result<()> { l.to_formula().check_against(sig) };
        for c in &self.step {
            for l in c.lhs.iter().chain(&c.rhs) {
                check_lit(l)?;
            }
            if c.rhs.is_empty() {
                return bad(format!(
                    "step clause `{}` has an empty right-hand side",
                    c.to_formula()
                ));
            }
            for l in &c.lhs {
                if l.positive && sig.xor_set_of(l.pred()).is_some() {
                    return bad(format!(
                        "positive XOR literal on the left of `{}`",
                        c.to_formula()
                    ));
                }
            }
            for l in &c.rhs {
                if !l.positive && sig.xor_set_of(l.pred()).is_some() {
                    return bad(format!(
                        "negative XOR literal on the right of `{}`",
                        c.to_formula()
                    ));
                }
            }
        }
        for l in &self.eventualities {
            check_lit(l)?;
            if matches!(l.atom, LitAtom::Ground(..)) {
                return bad(format!("ground eventuality `{}`", l.to_formula()));
            }
        }
        Ok(())
    }

    /// Reads the text format written by `Display`.
    pub fn parse(text: &str) -> Result<TemporalProblem> {
        let mut sig_text = String::new();
        let mut sections: Vec<(String, Vec<(usize, String)>)> = Vec::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let start = offset;
            offset += line.len();
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if matches!(
                content,
                "universal:" | "initial:" | "step:" | "eventuality:"
            ) {
                sections.push((content.trim_end_matches(':').to_string(), Vec::new()));
            } else if let Some((_, items)) = sections.last_mut() {
                items.push((start, content.to_string()));
            } else {
                sig_text.push_str(line);
            }
        }
        let mut problem = TemporalProblem::new(Signature::parse(&sig_text)?);
        for (name, items) in sections {
            for (at, item) in items {
                let f = parse_formula(&item, &problem.signature).map_err(|e| shift(e, at))?;
                let ill = || Error::IllFormedProblem(format!("`{item}` is not a {name} entry"));
                match name.as_str() {
                    "universal" => problem.universal.push(f),
                    "initial" => problem.initial.push(f),
                    "step" => problem.step.push(step_from_formula(&f).ok_or_else(ill)?),
                    _ => problem
                        .eventualities
                        .push(eventuality_from_formula(&f).ok_or_else(ill)?),
                }
            }
        }
        problem.validate()?;
        Ok(problem)
    }
}

fn shift(e: Error, by: usize) -> Error {
    match e {
        Error::Parse { offset, message } => Error::Parse {
            offset: offset + by,
            message,
        },
        other => other,
    }
}

fn flatten<'a>(f: &'a Formula, and: bool, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(a, b) if and => {
            flatten(a, and, out);
            flatten(b, and, out);
        }
        Formula::Or(a, b) if !and => {
            flatten(a, and, out);
            flatten(b, and, out);
        }
        Formula::True if and => {}
        Formula::False if !and => {}
        other => out.push(other),
    }
}

fn step_from_formula(f: &Formula) -> Option<StepClause> {
    let body = match f {
        Formula::Forall(_, b) => b,
        other => other,
    };
    let Formula::Implies(lhs, rhs) = body else {
        return None;
    };
    let Formula::Next(rhs) = &**rhs else {
        return None;
    };
    let lits = |g: &Formula, and: bool| -> Option<Vec<Literal>> {
        let mut parts = Vec::new();
        flatten(g, and, &mut parts);
        parts.into_iter().map(Literal::from_formula).collect()
    };
    Some(StepClause {
        lhs: lits(lhs, true)?,
        rhs: lits(rhs, false)?,
    })
}

fn eventuality_from_formula(f: &Formula) -> Option<Literal> {
    let inner = match f {
        Formula::Forall(_, b) => b,
        other => other,
    };
    match inner {
        Formula::Sometime(l) => Literal::from_formula(l),
        _ => None,
    }
}

impl fmt::Display for TemporalProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.signature)?;
        writeln!(f, "universal:")?;
        for u in &self.universal {
            writeln!(f, "  {u}")?;
        }
        writeln!(f, "initial:")?;
        for i in &self.initial {
            writeln!(f, "  {i}")?;
        }
        writeln!(f, "step:")?;
        for s in &self.step {
            writeln!(f, "  {}", s.unquantified())?;
        }
        writeln!(f, "eventuality:")?;
        for e in &self.eventualities {
            writeln!(f, "  sometime {}", e.to_formula())?;
        }
        Ok(())
    }
}
