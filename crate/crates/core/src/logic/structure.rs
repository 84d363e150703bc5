//! Ultimately periodic temporal structures and formula evaluation over them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::formula::{Formula, Term};
use crate::logic::signature::Signature;

/// One moment: for each predicate, the tuples of element indices it holds of.
/// A proposition holds when its set contains the empty tuple.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct World {
    pub facts: BTreeMap<String, BTreeSet<Vec<usize>>>,
}

impl World {
    pub fn holds(&self, pred: &str, args: &[usize]) -> bool {
        self.facts.get(pred).is_some_and(|s| s.contains(args))
    }

    pub fn insert(&mut self, pred: &str, args: Vec<usize>) {
        self.facts.entry(pred.to_string()).or_default().insert(args);
    }

    pub fn set_prop(&mut self, prop: &str, value: bool) {
        if value {
            self.insert(prop, Vec::new());
        } else if let Some(s) = self.facts.get_mut(prop) {
            s.remove(&Vec::new());
        }
    }
}

/// A structure whose world at time `t >= prefix.len()` is
/// `lasso[(t - prefix.len()) % lasso.len()]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemporalStructure {
    pub domain: Vec<String>,
    pub constants: BTreeMap<String, usize>,
    pub prefix: Vec<World>,
    pub lasso: Vec<World>,
}

pub type Assignment = BTreeMap<String, usize>;

impl TemporalStructure {
    pub fn positions(&self) -> usize {
        self.prefix.len() + self.lasso.len()
    }

    pub fn position(&self, t: usize) -> usize {
        let p = self.prefix.len();
        if t < p {
            t
        } else {
            p + (t - p) % self.lasso.len()
        }
    }

    pub fn world(&self, t: usize) -> &World {
        let pos = self.position(t);
        if pos < self.prefix.len() {
            &self.prefix[pos]
        } else {
            &self.lasso[pos - self.prefix.len()]
        }
    }

    fn succ(&self, pos: usize) -> usize {
        if pos + 1 == self.positions() {
            self.prefix.len()
        } else {
            pos + 1
        }
    }

    /// Positions visited from `pos` until every reachable position has been seen once.
    fn future(&self, pos: usize) -> Vec<usize> {
        let p = self.prefix.len();
        let n = self.positions();
        if pos < p {
            (pos..n).collect()
        } else {
            (pos..n).chain(p..pos).collect()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.domain.is_empty() {
            return Err(Error::InvalidStructure("empty domain".into()));
        }
        if self.lasso.is_empty() {
            return Err(Error::InvalidStructure("empty loop".into()));
        }
        for (c, &e) in &self.constants {
            if e >= self.domain.len() {
                return Err(Error::InvalidStructure(format!(
                    "constant `{c}` out of range"
                )));
            }
        }
        for w in self.prefix.iter().chain(&self.lasso) {
            for (p, tuples) in &w.facts {
                if tuples.iter().flatten().any(|&e| e >= self.domain.len()) {
                    return Err(Error::InvalidStructure(format!(
                        "`{p}` refers to a missing element"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Truth of `f` at time `t` under `assignment`.
    pub fn evaluate(&self, t: usize, assignment: &Assignment, f: &Formula) -> Result<bool> {
        self.validate()?;
        if self.prefix.is_empty() && f.mentions_start() {
            // Position 0 must be visited at time 0 only for `start` to be read off it.
            return self.with_prefix().evaluate(t, assignment, f);
        }
        let mut a = assignment.clone();
        self.eval(self.position(t), &mut a, f)
    }

    /// The same sequence of worlds with the first loop world moved into the prefix.
    pub fn with_prefix(&self) -> TemporalStructure {
        let mut lasso = self.lasso.clone();
        lasso.rotate_left(1);
        TemporalStructure {
            domain: self.domain.clone(),
            constants: self.constants.clone(),
            prefix: self
                .prefix
                .iter()
                .chain(self.lasso.first())
                .cloned()
                .collect(),
            lasso,
        }
    }

    fn term(&self, a: &Assignment, t: &Term) -> Result<usize> {
        match t {
            Term::Var(v) => a
                .get(v)
                .copied()
                .ok_or_else(|| Error::FreeVariable(v.clone())),
            Term::Const(c) => self
                .constants
                .get(c)
                .copied()
                .ok_or_else(|| Error::UnknownSymbol(c.clone())),
        }
    }

    fn eval(&self, pos: usize, a: &mut Assignment, f: &Formula) -> Result<bool> {
        use Formula::*;
        Ok(match f {
            True => true,
            False => false,
            Start => pos == 0,
            Atom(p, args) => {
                let tuple = args
                    .iter()
                    .map(|t| self.term(a, t))
                    .collect::<Result<Vec<_>>>()?;
                self.world(pos).holds(p, &tuple)
            }
            Not(x) => !self.eval(pos, a, x)?,
            And(x, y) => self.eval(pos, a, x)? && self.eval(pos, a, y)?,
            Or(x, y) => self.eval(pos, a, x)? || self.eval(pos, a, y)?,
            Implies(x, y) => !self.eval(pos, a, x)? || self.eval(pos, a, y)?,
            Iff(x, y) => self.eval(pos, a, x)? == self.eval(pos, a, y)?,
            Forall(v, x) | Exists(v, x) => {
                let universal = matches!(f, Forall(..));
                let saved = a.get(v).copied();
                let mut result = universal;
                for e in 0..self.domain.len() {
                    a.insert(v.clone(), e);
                    if self.eval(pos, a, x)? != universal {
                        result = !universal;
                        break;
                    }
                }
                match saved {
                    Some(s) => a.insert(v.clone(), s),
                    None => a.remove(v),
                };
                result
            }
            Next(x) => self.eval(self.succ(pos), a, x)?,
            Always(x) => {
                for j in self.future(pos) {
                    if !self.eval(j, a, x)? {
                        return Ok(false);
                    }
                }
                true
            }
            Sometime(x) => {
                for j in self.future(pos) {
                    if self.eval(j, a, x)? {
                        return Ok(true);
                    }
                }
                false
            }
            Until(x, y) | Unless(x, y) => {
                for j in self.future(pos) {
                    if self.eval(j, a, y)? {
                        return Ok(true);
                    }
                    if !self.eval(j, a, x)? {
                        return Ok(false);
                    }
                }
                matches!(f, Unless(..))
            }
        })
    }

    /// Every element satisfies exactly one member of each XOR set at every moment.
    pub fn xor_valid(&self, sig: &Signature) -> bool {
        self.prefix.iter().chain(&self.lasso).all(|w| {
            (0..self.domain.len()).all(|e| {
                sig.xor_sets
                    .iter()
                    .all(|x| x.members.iter().filter(|m| w.holds(m, &[e])).count() == 1)
            })
        })
    }

    /// Keeps only the listed predicates; used to project away auxiliary symbols.
    pub fn restrict_to(&self, symbols: &BTreeSet<String>) -> TemporalStructure {
        let keep = |w: &World| World {
            facts: w
                .facts
                .iter()
                .filter(|(p, _)| symbols.contains(*p))
                .map(|(p, s)| (p.clone(), s.clone()))
                .collect(),
        };
        TemporalStructure {
            domain: self.domain.clone(),
            constants: self.constants.clone(),
            prefix: self.prefix.iter().map(keep).collect(),
            lasso: self.lasso.iter().map(keep).collect(),
        }
    }
}

impl fmt::Display for TemporalStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain: {}", self.domain.join(" "))?;
        for (c, e) in &self.constants {
            writeln!(f, "const {c} = {}", self.domain[*e])?;
        }
        let p = self.prefix.len();
        for (i, w) in self.prefix.iter().chain(&self.lasso).enumerate() {
            let mark = if i == p { " (loop)" } else { "" };
            let mut facts = Vec::new();
            for (pred, tuples) in &w.facts {
                for t in tuples {
                    if t.is_empty() {
                        facts.push(pred.clone());
                    } else {
                        let args: Vec<&str> = t.iter().map(|e| self.domain[*e].as_str()).collect();
                        facts.push(format!("{pred}({})", args.join(", ")));
                    }
                }
            }
            writeln!(f, "t{i}{mark}: {}", facts.join(" "))?;
        }
        writeln!(f, "loops back to t{p}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parser::parse_formula;

    fn sig() -> Signature {
        Signature::parse("xorset s: A B\npreds: p/0").unwrap()
    }

    /// One element alternating A, B forever; p holds only at time 0.
    fn alternating() -> TemporalStructure {
        let mut w0 = World::default();
        w0.insert("A", vec![0]);
        w0.set_prop("p", true);
        let mut w1 = World::default();
        w1.insert("B", vec![0]);
        let mut w2 = World::default();
        w2.insert("A", vec![0]);
        TemporalStructure {
            domain: vec!["e0".into()],
            constants: BTreeMap::new(),
            prefix: vec![w0],
            lasso: vec![w1, w2],
        }
    }

    fn eval(text: &str) -> bool {
        let f = parse_formula(text, &sig()).unwrap();
        alternating().evaluate(0, &Assignment::new(), &f).unwrap()
    }

    #[test]
    fn temporal_operators_on_a_lasso() {
        assert!(eval("p & next ~p"));
        assert!(eval("always forall x. sometime B(x)"));
        assert!(eval("always forall x. (A(x) -> next B(x))"));
        assert!(!eval("sometime always forall x. A(x)"));
        assert!(eval("next always ~p"));
        assert!(eval("forall x. (A(x) U B(x))"));
        assert!(!eval("p W false"));
        assert!(eval("next (~p W false)"));
        assert!(eval("start & next ~start"));
    }

    #[test]
    fn positions_wrap_into_the_loop() {
        let m = alternating();
        assert_eq!(m.position(0), 0);
        assert_eq!(m.position(3), 1);
        assert_eq!(m.position(4), 2);
        assert!(m.xor_valid(&sig()));
    }

    #[test]
    fn unassigned_variable_is_an_error() {
        let f = parse_formula("A(x)", &sig()).unwrap();
        assert_eq!(
            alternating().evaluate(0, &Assignment::new(), &f),
            Err(Error::FreeVariable("x".into()))
        );
    }
}
