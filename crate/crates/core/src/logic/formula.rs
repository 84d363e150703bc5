use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::logic::signature::Signature;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Start,
    Atom(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    Next(Box<Formula>),
    Always(Box<Formula>),
    Sometime(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Unless(Box<Formula>, Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn prop(name: &str) -> Formula {
        Atom(name.to_string(), Vec::new())
    }

    pub fn unary(pred: &str, var: &str) -> Formula {
        Atom(pred.to_string(), vec![Term::var(var)])
    }

    pub fn ground(pred: &str, constant: &str) -> Formula {
        Atom(pred.to_string(), vec![Term::constant(constant)])
    }

    pub fn not(f: Formula) -> Formula {
        Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        Forall(v.to_string(), Box::new(f))
    }

    pub fn exists(v: &str, f: Formula) -> Formula {
        Exists(v.to_string(), Box::new(f))
    }

    pub fn next(f: Formula) -> Formula {
        Next(Box::new(f))
    }

    pub fn always(f: Formula) -> Formula {
        Always(Box::new(f))
    }

    pub fn sometime(f: Formula) -> Formula {
        Sometime(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Until(Box::new(a), Box::new(b))
    }

    pub fn unless(a: Formula, b: Formula) -> Formula {
        Unless(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or(True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or(False)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            True | False | Start | Atom(..) => vec![],
            Not(a) | Forall(_, a) | Exists(_, a) | Next(a) | Always(a) | Sometime(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | Until(a, b) | Unless(a, b) => {
                vec![a, b]
            }
        }
    }

    pub fn is_temporal_op(&self) -> bool {
        matches!(
            self,
            Next(_) | Always(_) | Sometime(_) | Until(..) | Unless(..)
        )
    }

    /// True when the formula contains no temporal operator and no `start`.
    pub fn is_first_order(&self) -> bool {
        !matches!(self, Start)
            && !self.is_temporal_op()
            && self.children().iter().all(|c| c.is_first_order())
    }

    pub fn mentions_start(&self) -> bool {
        matches!(self, Start) || self.children().iter().any(|c| c.mentions_start())
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Atom(_, args) => {
                for t in args {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            Forall(v, a) | Exists(v, a) => {
                bound.push(v.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Every temporal subformula has at most one free variable.
    pub fn is_monodic(&self) -> bool {
        self.first_non_monodic().is_none()
    }

    pub fn first_non_monodic(&self) -> Option<&Formula> {
        if self.is_temporal_op() && self.free_variables().len() > 1 {
            return Some(self);
        }
        self.children()
            .into_iter()
            .find_map(|c| c.first_non_monodic())
    }

    /// Every atom has arity at most one.
    pub fn is_monadic(&self) -> bool {
        self.first_non_monadic().is_none()
    }

    pub fn first_non_monadic(&self) -> Option<(&str, usize)> {
        match self {
            Atom(p, args) if args.len() > 1 => Some((p.as_str(), args.len())),
            _ => self
                .children()
                .into_iter()
                .find_map(|c| c.first_non_monadic()),
        }
    }

    /// Predicate and proposition names occurring in the formula.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Atom(p, _) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn visit<F: FnMut(&Formula)>(&self, f: &mut F) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Applies `f` to every immediate subformula, rebuilding the node.
    pub fn map_children<F: FnMut(Formula) -> Formula>(self, mut f: F) -> Formula {
        let b = |x: Box<Formula>, f: &mut F| Box::new(f(*x));
        match self {
            True | False | Start | Atom(..) => self,
            Not(a) => Not(b(a, &mut f)),
            Forall(v, a) => Forall(v, b(a, &mut f)),
            Exists(v, a) => Exists(v, b(a, &mut f)),
            Next(a) => Next(b(a, &mut f)),
            Always(a) => Always(b(a, &mut f)),
            Sometime(a) => Sometime(b(a, &mut f)),
            And(x, y) => {
                let x = b(x, &mut f);
                And(x, b(y, &mut f))
            }
            Or(x, y) => {
                let x = b(x, &mut f);
                Or(x, b(y, &mut f))
            }
            Implies(x, y) => {
                let x = b(x, &mut f);
                Implies(x, b(y, &mut f))
            }
            Iff(x, y) => {
                let x = b(x, &mut f);
                Iff(x, b(y, &mut f))
            }
            Until(x, y) => {
                let x = b(x, &mut f);
                Until(x, b(y, &mut f))
            }
            Unless(x, y) => {
                let x = b(x, &mut f);
                Unless(x, b(y, &mut f))
            }
        }
    }

    /// Replaces every `start` by the given truth value.
    pub fn replace_start(self, value: bool) -> Formula {
        match self {
            Start => {
                if value {
                    True
                } else {
                    False
                }
            }
            other => other.map_children(|c| c.replace_start(value)),
        }
    }

    /// Renames free occurrences of variable `from` to `to`.
    pub fn rename_free(self, from: &str, to: &str) -> Formula {
        match self {
            Atom(p, args) => Atom(
                p,
                args.into_iter()
                    .map(|t| match t {
                        Term::Var(v) if v == from => Term::Var(to.to_string()),
                        t => t,
                    })
                    .collect(),
            ),
            Forall(ref v, _) | Exists(ref v, _) if v == from => self,
            other => other.map_children(|c| c.rename_free(from, to)),
        }
    }

    /// Checks symbols, arities and the use of constants against the signature.
    pub fn check_against(&self, sig: &Signature) -> Result<()> {
        let mut result = Ok(());
        self.visit(&mut |f| {
            if result.is_err() {
                return;
            }
            match f {
                Atom(p, args) => match sig.arity(p) {
                    None => result = Err(Error::UnknownSymbol(p.clone())),
                    Some(a) if a != args.len() => {
                        result = Err(Error::ArityMismatch {
                            symbol: p.clone(),
                            expected: a,
                            found: args.len(),
                        })
                    }
                    Some(_) => {
                        for t in args {
                            if let Term::Const(c) = t {
                                if !sig.is_constant(c) {
                                    result = Err(Error::UnknownSymbol(c.clone()));
                                }
                            }
                        }
                    }
                },
                Forall(v, _) | Exists(v, _) if sig.is_constant(v) => {
                    result = Err(Error::Signature(format!(
                        "constant `{v}` used as a variable"
                    )))
                }
                _ => {}
            }
        });
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_variables_respect_binders() {
        let f = Formula::and(
            Formula::forall("x", Formula::unary("P", "x")),
            Formula::unary("Q", "y"),
        );
        assert_eq!(
            f.free_variables().into_iter().collect::<Vec<_>>(),
            vec!["y"]
        );
        assert!(!f.is_closed());
    }

    #[test]
    fn monodicity_counts_free_variables_of_temporal_subformulas() {
        let one = Formula::forall("x", Formula::next(Formula::unary("P", "x")));
        assert!(one.is_monodic());
        let two = Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::next(Formula::and(
                    Formula::unary("P", "x"),
                    Formula::unary("P", "y"),
                )),
            ),
        );
        assert!(!two.is_monodic());
    }

    #[test]
    fn monadic_rejects_binary_atoms() {
        let f = Atom("R".into(), vec![Term::var("x"), Term::var("y")]);
        assert_eq!(f.first_non_monadic(), Some(("R", 2)));
    }

    #[test]
    fn rename_free_stops_at_rebinding() {
        let f = Formula::and(
            Formula::unary("P", "x"),
            Formula::exists("x", Formula::unary("Q", "x")),
        );
        let g = f.rename_free("x", "z");
        assert_eq!(
            g,
            Formula::and(
                Formula::unary("P", "z"),
                Formula::exists("x", Formula::unary("Q", "x"))
            )
        );
    }
}
