//! Negation normal form with constant folding.
//!
//! After conversion negation only sits directly on atoms or `start`, and `->`,
//! `<->` are gone. Temporal operators are dualised when a negation passes them.

use crate::logic::Formula;

pub fn mk_and(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::False, _) | (_, Formula::False) => Formula::False,
        (Formula::True, x) | (x, Formula::True) => x,
        (x, y) if x == y => x,
        (x, y) => Formula::and(x, y),
    }
}

pub fn mk_or(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::True, _) | (_, Formula::True) => Formula::True,
        (Formula::False, x) | (x, Formula::False) => x,
        (x, y) if x == y => x,
        (x, y) => Formula::or(x, y),
    }
}

pub fn mk_not(a: Formula) -> Formula {
    match a {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Not(x) => *x,
        x => Formula::not(x),
    }
}

fn mk_next(a: Formula) -> Formula {
    match a {
        Formula::True | Formula::False => a,
        x => Formula::next(x),
    }
}

fn mk_quant(universal: bool, v: &str, body: Formula) -> Formula {
    match body {
        Formula::True | Formula::False => body,
        b if !b.free_variables().contains(v) => b,
        b if universal => Formula::forall(v, b),
        b => Formula::exists(v, b),
    }
}

fn mk_always(a: Formula) -> Formula {
    match a {
        Formula::True | Formula::False => a,
        Formula::Always(_) => a,
        x => Formula::always(x),
    }
}

fn mk_sometime(a: Formula) -> Formula {
    match a {
        Formula::True | Formula::False => a,
        Formula::Sometime(_) => a,
        x => Formula::sometime(x),
    }
}

fn mk_until(a: Formula, b: Formula) -> Formula {
    match (&a, &b) {
        (_, Formula::True) => Formula::True,
        (Formula::False, _) => b,
        (_, Formula::False) => Formula::False,
        (Formula::True, _) => mk_sometime(b),
        _ => Formula::until(a, b),
    }
}

fn mk_unless(a: Formula, b: Formula) -> Formula {
    match (&a, &b) {
        (_, Formula::True) | (Formula::True, _) => Formula::True,
        (Formula::False, _) => b,
        (_, Formula::False) => mk_always(a),
        _ => Formula::unless(a, b),
    }
}

/// Negation normal form of `f`, or of `~f` when `negate` is set.
pub fn nnf(f: &Formula, negate: bool) -> Formula {
    use Formula::*;
    match f {
        True | False | Start | Atom(..) => {
            if negate {
                mk_not(f.clone())
            } else {
                f.clone()
            }
        }
        Not(a) => nnf(a, !negate),
        And(a, b) if !negate => mk_and(nnf(a, false), nnf(b, false)),
        And(a, b) => mk_or(nnf(a, true), nnf(b, true)),
        Or(a, b) if !negate => mk_or(nnf(a, false), nnf(b, false)),
        Or(a, b) => mk_and(nnf(a, true), nnf(b, true)),
        Implies(a, b) if !negate => mk_or(nnf(a, true), nnf(b, false)),
        Implies(a, b) => mk_and(nnf(a, false), nnf(b, true)),
        Iff(a, b) if !negate => mk_and(
            mk_or(nnf(a, true), nnf(b, false)),
            mk_or(nnf(a, false), nnf(b, true)),
        ),
        Iff(a, b) => mk_and(
            mk_or(nnf(a, false), nnf(b, false)),
            mk_or(nnf(a, true), nnf(b, true)),
        ),
        Forall(v, a) => mk_quant(!negate, v, nnf(a, negate)),
        Exists(v, a) => mk_quant(negate, v, nnf(a, negate)),
        Next(a) => mk_next(nnf(a, negate)),
        Always(a) if !negate => mk_always(nnf(a, false)),
        Always(a) => mk_sometime(nnf(a, true)),
        Sometime(a) if !negate => mk_sometime(nnf(a, false)),
        Sometime(a) => mk_always(nnf(a, true)),
        Until(a, b) if !negate => mk_until(nnf(a, false), nnf(b, false)),
        Until(a, b) => mk_unless(nnf(b, true), mk_and(nnf(a, true), nnf(b, true))),
        Unless(a, b) if !negate => mk_unless(nnf(a, false), nnf(b, false)),
        Unless(a, b) => mk_until(nnf(b, true), mk_and(nnf(a, true), nnf(b, true))),
    }
}

/// Rebuilds `f` bottom-up through the smart constructors; `f` must already be in NNF.
pub fn simplify(f: Formula) -> Formula {
    use Formula::*;
    match f {
        And(a, b) => mk_and(simplify(*a), simplify(*b)),
        Or(a, b) => mk_or(simplify(*a), simplify(*b)),
        Not(a) => mk_not(simplify(*a)),
        Forall(v, a) => mk_quant(true, &v, simplify(*a)),
        Exists(v, a) => mk_quant(false, &v, simplify(*a)),
        Next(a) => mk_next(simplify(*a)),
        Always(a) => mk_always(simplify(*a)),
        Sometime(a) => mk_sometime(simplify(*a)),
        Until(a, b) => mk_until(simplify(*a), simplify(*b)),
        Unless(a, b) => mk_unless(simplify(*a), simplify(*b)),
        other => other,
    }
}

pub fn is_literal(f: &Formula) -> bool {
    match f {
        Formula::Atom(..) | Formula::Start => true,
        Formula::Not(a) => matches!(**a, Formula::Atom(..) | Formula::Start),
        _ => false,
    }
}

/// Replaces `start` outside the scope of every temporal operator.
pub fn replace_start_now(f: Formula, with: &Formula) -> Formula {
    match f {
        Formula::Start => with.clone(),
        g if g.is_temporal_op() => g,
        g => g.map_children(|c| replace_start_now(c, with)),
    }
}

pub fn mentions_start_now(f: &Formula) -> bool {
    match f {
        Formula::Start => true,
        g if g.is_temporal_op() => false,
        g => g.children().iter().any(|c| mentions_start_now(c)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, Signature};

    fn sig() -> Signature {
        Signature::parse("preds: p/0 q/0 P/1").unwrap()
    }

    fn n(text: &str) -> String {
        nnf(&parse_formula(text, &sig()).unwrap(), false).to_string()
    }

    #[test]
    fn dualises_temporal_operators() {
        assert_eq!(n("~always p"), "sometime ~p");
        assert_eq!(n("~sometime p"), "always ~p");
        assert_eq!(n("~next p"), "next ~p");
        assert_eq!(n("~(p U q)"), "~q W (~p & ~q)");
        assert_eq!(n("~(p W q)"), "~q U (~p & ~q)");
        assert_eq!(n("~forall x. P(x) -> p"), "exists x. P(x) & ~p");
    }

    #[test]
    fn folds_constants() {
        assert_eq!(n("p & true"), "p");
        assert_eq!(n("p | true"), "true");
        assert_eq!(n("true U p"), "sometime p");
        assert_eq!(n("p W false"), "always p");
        assert_eq!(n("next false | q"), "q");
    }
}
