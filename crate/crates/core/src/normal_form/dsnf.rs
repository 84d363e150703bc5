use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::logic::{Formula, Signature, Term};
use crate::normal_form::nnf::{
    is_literal, mentions_start_now, mk_and, mk_or, nnf, replace_start_now, simplify,
};
use crate::normal_form::{LitAtom, Literal, StepClause, TemporalProblem, VAR};

/// Converts a closed monodic monadic formula into an equisatisfiable temporal problem.
///
/// The returned problem carries the input signature extended by the fresh
/// symbols introduced for renamed subformulas; none of them joins an XOR set.
pub fn to_dsnf(f: &Formula, sig: &Signature) -> Result<TemporalProblem> {
    f.check_against(sig)?;
    let free = f.free_variables();
    if !free.is_empty() {
        let vars: Vec<String> = free.into_iter().collect();
        return Err(Error::NotClosed(vars.join(", ")));
    }
    if let Some(g) = f.first_non_monodic() {
        return Err(Error::NotMonodic(g.to_string()));
    }
    if let Some((p, a)) = f.first_non_monadic() {
        return Err(Error::NotMonadic(p.to_string(), a));
    }
    let mut b = Builder {
        problem: TemporalProblem::new(sig.clone()),
        defs: HashMap::new(),
        start: None,
    };
    b.top(nnf(f, false));
    let mut problem = b.problem;
    problem.step.sort();
    problem.step.dedup();
    let mut seen = std::collections::HashSet::new();
    problem.eventualities.retain(|l| seen.insert(l.clone()));
    problem.validate()?;
    Ok(problem)
}

struct Builder {
    problem: TemporalProblem,
    /// Canonical text of a renamed subformula to the symbol naming it.
    defs: HashMap<String, String>,
    start: Option<String>,
}

fn contains_temporal(f: &Formula) -> bool {
    f.is_temporal_op() || f.children().iter().any(|c| contains_temporal(c))
}

fn quantify(var: Option<&str>, body: Formula) -> Formula {
    match var {
        Some(v) if body.free_variables().contains(v) => Formula::forall(v, body),
        _ => body,
    }
}

fn flatten_or(f: Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::Or(a, b) => {
            flatten_or(*a, out);
            flatten_or(*b, out);
        }
        other => out.push(other),
    }
}

/// Clauses over opaque items: literals, quantified subformulas and `next` of either.
fn cnf(f: &Formula) -> Vec<Vec<Formula>> {
    match f {
        Formula::And(a, b) => {
            let mut out = cnf(a);
            out.extend(cnf(b));
            out
        }
        Formula::Or(a, b) => {
            let left = cnf(a);
            let right = cnf(b);
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    let mut c = l.clone();
                    c.extend(r.iter().cloned());
                    out.push(c);
                }
            }
            out
        }
        Formula::True => vec![],
        Formula::False => vec![vec![]],
        other => vec![vec![other.clone()]],
    }
}

/// Distributes `next` over conjunction and disjunction of an NNF formula.
fn push_next(f: Formula) -> Formula {
    match f {
        Formula::And(a, b) => mk_and(push_next(*a), push_next(*b)),
        Formula::Or(a, b) => mk_or(push_next(*a), push_next(*b)),
        Formula::True | Formula::False => f,
        other => Formula::next(other),
    }
}

impl Builder {
    fn fresh(&mut self, base: &str, arity: usize) -> String {
        let name = self.problem.signature.fresh_name(base);
        self.problem
            .signature
            .add_pred(&name, arity)
            .expect("fresh names are valid");
        name
    }

    fn symbol_atom(name: &str, var: Option<&str>) -> Formula {
        match var {
            Some(v) => Formula::unary(name, v),
            None => Formula::prop(name),
        }
    }

    fn start_atom(&mut self) -> Formula {
        if let Some(s) = &self.start {
            return Formula::prop(s);
        }
        let s = self.fresh("st", 0);
        self.problem.initial.push(Formula::prop(&s));
        self.problem.step.push(StepClause {
            lhs: vec![],
            rhs: vec![Literal::neg(LitAtom::Prop(s.clone()))],
        });
        self.start = Some(s.clone());
        Formula::prop(&s)
    }

    /// `g` holds at time zero.
    fn top(&mut self, g: Formula) {
        match g {
            Formula::True => {}
            Formula::And(a, b) => {
                self.top(*a);
                self.top(*b);
            }
            Formula::Always(h) => self.always(*h),
            Formula::Forall(v, body) if matches!(*body, Formula::Always(_)) => {
                let Formula::Always(h) = *body else {
                    unreachable!()
                };
                self.always(Formula::forall(&v, *h));
            }
            Formula::Forall(v, body) if matches!(*body, Formula::And(..)) => {
                let Formula::And(a, b) = *body else {
                    unreachable!()
                };
                self.top(quantify(Some(&v), *a));
                self.top(quantify(Some(&v), *b));
            }
            g => {
                let g = self.abstract_temporal(g, false, false);
                let g = simplify(replace_start_now(g, &Formula::True));
                if g != Formula::True {
                    self.problem.initial.push(g);
                }
            }
        }
    }

    /// `h` holds at every moment.
    fn always(&mut self, h: Formula) {
        match h {
            Formula::True => {}
            Formula::And(a, b) => {
                self.always(*a);
                self.always(*b);
            }
            Formula::Always(a) => self.always(*a),
            Formula::Forall(v, body) => match *body {
                Formula::And(a, b) => {
                    self.always(quantify(Some(&v), *a));
                    self.always(quantify(Some(&v), *b));
                }
                Formula::Always(b) => self.always(quantify(Some(&v), *b)),
                Formula::Sometime(l) if Self::unary_literal_over(&l, &v) => {
                    let lit = Literal::from_formula(&l).expect("literal");
                    self.problem.eventualities.push(lit);
                }
                body => self.general(Formula::forall(&v, body)),
            },
            Formula::Sometime(l) if is_literal(&l) && l.free_variables().is_empty() => {
                match Literal::from_formula(&l) {
                    Some(lit) if matches!(lit.atom, LitAtom::Prop(_)) => {
                        self.problem.eventualities.push(lit)
                    }
                    _ => self.general(Formula::Sometime(l)),
                }
            }
            h => self.general(h),
        }
    }

    fn unary_literal_over(f: &Formula, v: &str) -> bool {
        let atom = match f {
            Formula::Not(a) => &**a,
            a => a,
        };
        matches!(atom, Formula::Atom(_, args) if args.as_slice() == [Term::Var(v.to_string())])
    }

    fn general(&mut self, h: Formula) {
        let h = if mentions_start_now(&h) {
            let later = simplify(replace_start_now(h.clone(), &Formula::False));
            if later == Formula::True {
                self.top(simplify(replace_start_now(h, &Formula::True)));
                return;
            }
            let st = self.start_atom();
            replace_start_now(h, &st)
        } else {
            h
        };
        self.clausify(h);
    }

    /// Moves a single universally quantified disjunct that carries temporal
    /// operators to the front: `a | forall y. b` becomes `forall y. (a | b)`.
    fn lift_forall(h: Formula) -> Formula {
        if !matches!(h, Formula::Or(..)) {
            return h;
        }
        let mut parts = Vec::new();
        flatten_or(h, &mut parts);
        let temporal_foralls = parts
            .iter()
            .filter(|p| matches!(p, Formula::Forall(_, b) if contains_temporal(b)))
            .count();
        if temporal_foralls != 1 {
            return parts
                .into_iter()
                .reduce(Formula::or)
                .unwrap_or(Formula::False);
        }
        let idx = parts
            .iter()
            .position(|p| matches!(p, Formula::Forall(_, b) if contains_temporal(b)))
            .unwrap();
        let Formula::Forall(v, body) = parts.remove(idx) else {
            unreachable!()
        };
        parts.push(*body);
        Formula::forall(&v, parts.into_iter().reduce(Formula::or).unwrap())
    }

    fn clausify(&mut self, h: Formula) {
        let h = Self::lift_forall(h);
        let (var, body) = match h {
            Formula::Forall(v, b) => (Some(v), *b),
            other => (None, other),
        };
        let mut body = simplify(self.abstract_temporal(body, true, false));
        // Renaming can bring operands that mention `start` to the current moment.
        if mentions_start_now(&body) {
            let st = self.start_atom();
            body = simplify(replace_start_now(body, &st));
        }
        if !contains_temporal(&body) {
            if body != Formula::True {
                self.problem.universal.push(quantify(var.as_deref(), body));
            }
            return;
        }
        for clause in cnf(&body) {
            let (next, now): (Vec<Formula>, Vec<Formula>) = clause
                .into_iter()
                .partition(|i| matches!(i, Formula::Next(_)));
            if next.is_empty() {
                let d = now
                    .into_iter()
                    .reduce(Formula::or)
                    .unwrap_or(Formula::False);
                self.problem.universal.push(quantify(var.as_deref(), d));
                continue;
            }
            let lhs: Vec<Literal> = now
                .iter()
                .map(|i| self.item_literal(i, var.as_deref()).negated())
                .collect();
            let rhs: Vec<Literal> = next
                .iter()
                .map(|i| match i {
                    Formula::Next(a) => self.item_literal(a, var.as_deref()),
                    _ => unreachable!(),
                })
                .collect();
            match (StepClause { lhs, rhs }).normalise(&self.problem.signature) {
                Some(c) if c.rhs.is_empty() => {
                    let never = Formula::disj(c.lhs.iter().map(|l| l.negated().to_formula()));
                    self.problem.universal.push(quantify(Some(VAR), never));
                }
                Some(c) => self.problem.step.push(c),
                None => {}
            }
        }
    }

    /// A literal standing for a clause item, naming quantified subformulas by definitions.
    fn item_literal(&mut self, item: &Formula, var: Option<&str>) -> Literal {
        if is_literal(item) {
            return Literal::from_formula(item).expect("literal item");
        }
        self.definition(item, var)
    }

    /// A symbol `d` with `d <-> item` added to the universal part.
    fn definition(&mut self, item: &Formula, var: Option<&str>) -> Literal {
        let open = var.is_some_and(|v| item.free_variables().contains(v));
        let canonical = |f: &Formula| match (open, var) {
            (true, Some(v)) => f.clone().rename_free(v, VAR).to_string(),
            _ => f.to_string(),
        };
        let key = format!("def|{}", canonical(item));
        let neg_key = format!("def|{}", canonical(&nnf(item, true)));
        let atom = |name: &str| {
            if open {
                LitAtom::Unary(name.to_string())
            } else {
                LitAtom::Prop(name.to_string())
            }
        };
        if let Some(name) = self.defs.get(&key) {
            return Literal::pos(atom(name));
        }
        if let Some(name) = self.defs.get(&neg_key) {
            return Literal::neg(atom(name));
        }
        let name = self.fresh("d", usize::from(open));
        self.defs.insert(key, name.clone());
        let body = if open {
            item.clone().rename_free(var.unwrap(), VAR)
        } else {
            item.clone()
        };
        let head = if open {
            Formula::unary(&name, VAR)
        } else {
            Formula::prop(&name)
        };
        let eq = Formula::iff(head, body);
        self.problem
            .universal
            .push(if open { Formula::forall(VAR, eq) } else { eq });
        Literal::pos(atom(&name))
    }

    /// Replaces temporal subformulas by fresh symbols, innermost first.
    ///
    /// With `keep_next` set, `next` applied to a literal or to a quantified
    /// first-order formula survives, unless it occurs below a quantifier.
    fn abstract_temporal(&mut self, f: Formula, keep_next: bool, under_quant: bool) -> Formula {
        match f {
            Formula::True
            | Formula::False
            | Formula::Start
            | Formula::Atom(..)
            | Formula::Not(_) => f,
            Formula::And(a, b) => {
                let a = self.abstract_temporal(*a, keep_next, under_quant);
                mk_and(a, self.abstract_temporal(*b, keep_next, under_quant))
            }
            Formula::Or(a, b) => {
                let a = self.abstract_temporal(*a, keep_next, under_quant);
                mk_or(a, self.abstract_temporal(*b, keep_next, under_quant))
            }
            Formula::Forall(v, a) => {
                let a = self.abstract_temporal(*a, keep_next, true);
                Formula::forall(&v, a)
            }
            Formula::Exists(v, a) => {
                let a = self.abstract_temporal(*a, keep_next, true);
                Formula::exists(&v, a)
            }
            Formula::Next(a) => {
                let inner = self.abstract_temporal(*a, false, false);
                // `start` is false at every successor moment.
                let inner = simplify(replace_start_now(inner, &Formula::False));
                let pushed = push_next(inner.clone());
                if (keep_next && !under_quant) || !contains_temporal(&pushed) {
                    pushed
                } else {
                    self.rename(Formula::next(inner))
                }
            }
            Formula::Always(a) => {
                let a = self.abstract_temporal(*a, false, false);
                self.rename(Formula::always(a))
            }
            Formula::Sometime(a) => {
                let a = self.abstract_temporal(*a, false, false);
                self.rename(Formula::sometime(a))
            }
            Formula::Until(a, b) => {
                let a = self.abstract_temporal(*a, false, false);
                let b = self.abstract_temporal(*b, false, false);
                self.rename(Formula::until(a, b))
            }
            Formula::Unless(a, b) => {
                let a = self.abstract_temporal(*a, false, false);
                let b = self.abstract_temporal(*b, false, false);
                self.rename(Formula::unless(a, b))
            }
            Formula::Implies(..) | Formula::Iff(..) => {
                unreachable!("input is in negation normal form")
            }
        }
    }

    /// Names a temporal formula whose operands are first-order and returns the
    /// replacement that holds wherever the formula is required.
    fn rename(&mut self, f: Formula) -> Formula {
        let free = f.free_variables();
        let var = free.iter().next().cloned();
        let v = var.as_deref();
        let key_text = match v {
            Some(v) => f.clone().rename_free(v, VAR).to_string(),
            None => f.to_string(),
        };
        let (base, operands) = match &f {
            Formula::Next(a) => ("nx", vec![(**a).clone()]),
            Formula::Always(a) => ("bx", vec![(**a).clone()]),
            Formula::Sometime(a) => ("ev", vec![(**a).clone()]),
            Formula::Until(a, b) => ("un", vec![(**a).clone(), (**b).clone()]),
            Formula::Unless(a, b) => ("wu", vec![(**a).clone(), (**b).clone()]),
            _ => unreachable!("only temporal formulas are renamed"),
        };
        let key = format!("{base}|{key_text}");
        let existing = self.defs.get(&key).cloned();
        let name = match existing {
            Some(n) => n,
            None => {
                let n = self.fresh(base, usize::from(v.is_some()));
                self.defs.insert(key, n.clone());
                self.define(&f, &n, v);
                n
            }
        };
        let q = Self::symbol_atom(&name, v);
        match base {
            "ev" => mk_or(operands[0].clone(), q),
            "un" | "wu" => mk_or(operands[1].clone(), mk_and(operands[0].clone(), q)),
            _ => q,
        }
    }

    fn define(&mut self, f: &Formula, name: &str, v: Option<&str>) {
        let q = Self::symbol_atom(name, v);
        let not_q = Formula::not(q.clone());
        let forall = |body: Formula| quantify(v, body);
        match f {
            Formula::Next(a) => {
                self.always(forall(mk_or(not_q, Formula::next((**a).clone()))));
            }
            Formula::Always(a) => {
                self.always(forall(mk_or(not_q.clone(), (**a).clone())));
                self.always(forall(mk_or(not_q, Formula::next(q))));
            }
            Formula::Sometime(a) => {
                let a = (**a).clone();
                let later = Formula::next(mk_or(a.clone(), q));
                self.always(forall(mk_or(mk_or(not_q.clone(), a), later)));
                self.push_eventuality(not_q, v);
            }
            Formula::Until(a, b) | Formula::Unless(a, b) => {
                let (a, b) = ((**a).clone(), (**b).clone());
                self.always(forall(mk_or(
                    not_q.clone(),
                    Formula::next(mk_or(b.clone(), a)),
                )));
                self.always(forall(mk_or(not_q.clone(), Formula::next(mk_or(b, q)))));
                if matches!(f, Formula::Until(..)) {
                    self.push_eventuality(not_q, v);
                }
            }
            _ => unreachable!(),
        }
    }

    fn push_eventuality(&mut self, lit: Formula, v: Option<&str>) {
        let lit = match v {
            Some(v) => lit.rename_free(v, VAR),
            None => lit,
        };
        self.problem
            .eventualities
            .push(Literal::from_formula(&lit).expect("eventuality literal"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn automaton_sig() -> Signature {
        Signature::parse("xorset s: s_a s_b s_t s_w\npreds: p/0 Q/1\nconsts: c").unwrap()
    }

    fn dsnf(text: &str) -> TemporalProblem {
        let sig = automaton_sig();
        to_dsnf(&parse_formula(text, &sig).unwrap(), &sig).unwrap()
    }

    #[test]
    fn single_step_clause_with_xor_encoding() {
        let p = dsnf("always forall x. (s_a(x) -> next s_w(x))");
        assert!(p.universal.is_empty() && p.initial.is_empty() && p.eventualities.is_empty());
        assert_eq!(p.step.len(), 1);
        let c = &p.step[0];
        let names: Vec<String> = c.lhs.iter().map(|l| l.to_formula().to_string()).collect();
        assert_eq!(names, vec!["~s_b(x)", "~s_t(x)", "~s_w(x)"]);
        assert_eq!(c.rhs, vec![Literal::pos(LitAtom::Unary("s_w".into()))]);
        assert_eq!(p.signature, automaton_sig());
    }

    #[test]
    fn start_guarded_formulas_go_to_the_initial_part() {
        let p = dsnf("always (start -> exists x. s_t(x))");
        assert_eq!(p.initial.len(), 1);
        assert_eq!(p.initial[0].to_string(), "exists x. s_t(x)");
        assert!(p.universal.is_empty() && p.step.is_empty());
    }

    #[test]
    fn unary_eventualities_are_copied() {
        let p = dsnf("always forall x. sometime ~Q(x)");
        assert_eq!(
            p.eventualities,
            vec![Literal::neg(LitAtom::Unary("Q".into()))]
        );
        assert_eq!(p.signature, automaton_sig());
    }

    #[test]
    fn nested_temporal_operators_get_fresh_symbols() {
        let p = dsnf("sometime always forall x. Q(x)");
        assert!(p.signature.preds.len() > automaton_sig().preds.len());
        assert!(!p.eventualities.is_empty());
        for s in p.signature.preds.keys() {
            assert!(p.signature.xor_set_of(s).is_none());
        }
    }

    #[test]
    fn closed_subformulas_in_step_clauses_become_definitions() {
        let p = dsnf("always ((exists x. s_a(x)) -> next p)");
        assert_eq!(p.step.len(), 1);
        assert_eq!(p.universal.len(), 1);
        assert!(p.universal[0].to_string().contains("<->"));
    }

    #[test]
    fn rejects_open_and_non_monodic_input() {
        let mut sig = automaton_sig();
        sig.add_pred("R", 2).unwrap();
        let open = parse_formula("Q(x)", &sig).unwrap();
        assert!(matches!(to_dsnf(&open, &sig), Err(Error::NotClosed(_))));
        let two = parse_formula("forall x. forall y. next (Q(x) & Q(y))", &sig).unwrap();
        assert!(matches!(to_dsnf(&two, &sig), Err(Error::NotMonodic(_))));
        let binary = parse_formula("forall x. forall y. R(x, y)", &sig).unwrap();
        assert!(matches!(to_dsnf(&binary, &sig), Err(Error::NotMonadic(..))));
    }
}
