//! Predicate colours and satisfiability of closed monadic first-order formulas.
//!
//! A monadic formula without equality only distinguishes elements by the set
//! of unary predicates they satisfy, so a model can be taken to consist of
//! distinct colours. Satisfiability is decided by searching colour sets,
//! proposition valuations and constant maps.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{Formula, Signature, Term};

/// A colour as a bitmask over the unary predicates of a [`ColourSpace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Colour(pub u64);

/// The unary predicates of a signature in colour order, with XOR structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColourSpace {
    pub preds: Vec<String>,
    index: HashMap<String, usize>,
    xor_groups: Vec<Vec<usize>>,
    free: Vec<usize>,
}

impl ColourSpace {
    pub fn new(sig: &Signature) -> Result<Self> {
        let preds: Vec<String> = sig
            .unary_predicates()
            .into_iter()
            .map(String::from)
            .collect();
        if preds.len() > 64 {
            return Err(Error::ResourceLimit(format!(
                "{} unary predicates; colours are limited to 64",
                preds.len()
            )));
        }
        let index: HashMap<String, usize> = preds
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let mut xor_groups = Vec::new();
        for x in &sig.xor_sets {
            if x.members.is_empty() {
                return Err(Error::Signature(format!("XOR set `{}` is empty", x.name)));
            }
            xor_groups.push(x.members.iter().map(|m| index[m]).collect());
        }
        let free = sig.non_xor_unary().map(|p| index[p]).collect();
        Ok(ColourSpace {
            preds,
            index,
            xor_groups,
            free,
        })
    }

    pub fn pred_index(&self, pred: &str) -> Option<usize> {
        self.index.get(pred).copied()
    }

    /// Bit indices of each XOR set, in signature order.
    pub fn xor_groups(&self) -> &[Vec<usize>] {
        &self.xor_groups
    }

    /// Bit indices of the unary predicates outside every XOR set.
    pub fn free_bits(&self) -> &[usize] {
        &self.free
    }

    /// Position of a valid colour in [`ColourSpace::enumerate`].
    pub fn index_of(&self, c: Colour) -> u128 {
        let mut idx: u128 = 0;
        for g in &self.xor_groups {
            let pos = g.iter().position(|&i| c.0 >> i & 1 == 1).unwrap_or(0);
            idx = idx * g.len() as u128 + pos as u128;
        }
        for &i in &self.free {
            idx = idx * 2 + (c.0 >> i & 1) as u128;
        }
        idx
    }

    pub fn holds(&self, c: Colour, pred: &str) -> bool {
        self.pred_index(pred).is_some_and(|i| c.0 >> i & 1 == 1)
    }

    pub fn count(&self) -> u128 {
        let xor: u128 = self.xor_groups.iter().map(|g| g.len() as u128).product();
        xor << self.free.len()
    }

    /// All colours, XOR choices varying slowest, first set most significant.
    pub fn enumerate(&self) -> Vec<Colour> {
        let mut out = vec![0u64];
        for g in &self.xor_groups {
            out = out
                .iter()
                .flat_map(|base| g.iter().map(move |&i| base | 1 << i))
                .collect();
        }
        for &i in &self.free {
            out = out.iter().flat_map(|&base| [base, base | 1 << i]).collect();
        }
        out.into_iter().map(Colour).collect()
    }

    pub fn is_valid(&self, c: Colour) -> bool {
        self.xor_groups
            .iter()
            .all(|g| g.iter().filter(|&&i| c.0 >> i & 1 == 1).count() == 1)
            && c.0 >> self.preds.len() == 0
    }

    pub fn describe(&self, c: Colour) -> String {
        let names: Vec<&str> = (0..self.preds.len())
            .filter(|&i| c.0 >> i & 1 == 1)
            .map(|i| self.preds[i].as_str())
            .collect();
        format!("{{{}}}", names.join(", "))
    }
}

/// Colours of a signature in canonical order.
pub fn enumerate_colours(sig: &Signature) -> Result<Vec<Colour>> {
    Ok(ColourSpace::new(sig)?.enumerate())
}

/// A first-order structure whose elements are distinct colours.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColourStructure {
    pub colours: Vec<Colour>,
    /// Constant to index into `colours`.
    pub constants: BTreeMap<String, usize>,
    pub props: BTreeMap<String, bool>,
}

/// Formula compiled against a colour space: predicates become bit indices,
/// variables become slots.
#[derive(Debug, Clone)]
pub enum Fo {
    Const(bool),
    /// Bit of the colour in a variable slot.
    Var(usize, usize),
    /// Bit of the colour a constant denotes.
    Ground(usize, usize),
    Prop(usize),
    Not(Box<Fo>),
    And(Vec<Fo>),
    Or(Vec<Fo>),
    Forall(usize, Box<Fo>),
    Exists(usize, Box<Fo>),
}

/// Names behind the indices of a compiled formula.
#[derive(Debug, Clone, Default)]
pub struct FoContext {
    pub props: Vec<String>,
    pub constants: Vec<String>,
    pub slots: usize,
}

impl FoContext {
    pub fn new(sig: &Signature) -> Self {
        FoContext {
            props: sig.propositions().into_iter().map(String::from).collect(),
            constants: sig.constants.iter().cloned().collect(),
            slots: 0,
        }
    }

    /// Compiles a first-order formula; `start` compiles to `start_value`.
    pub fn compile(&mut self, space: &ColourSpace, f: &Formula, start_value: bool) -> Result<Fo> {
        let mut scope: Vec<(String, usize)> = Vec::new();
        self.compile_in(space, f, start_value, &mut scope)
    }

    fn compile_in(
        &mut self,
        space: &ColourSpace,
        f: &Formula,
        start_value: bool,
        scope: &mut Vec<(String, usize)>,
    ) -> Result<Fo> {
        use Formula::*;
        let sub = |g: &Formula, this: &mut Self, scope: &mut Vec<(String, usize)>| {
            this.compile_in(space, g, start_value, scope)
        };
        Ok(match f {
            True => Fo::Const(true),
            False => Fo::Const(false),
            Start => Fo::Const(start_value),
            Atom(p, args) => match args.as_slice() {
                [] => Fo::Prop(
                    self.props
                        .iter()
                        .position(|q| q == p)
                        .ok_or_else(|| Error::UnknownSymbol(p.clone()))?,
                ),
                [t] => {
                    let bit = space
                        .pred_index(p)
                        .ok_or_else(|| Error::UnknownSymbol(p.clone()))?;
                    match t {
                        Term::Var(v) => {
                            let slot = scope
                                .iter()
                                .rev()
                                .find(|(n, _)| n == v)
                                .map(|(_, s)| *s)
                                .ok_or_else(|| Error::FreeVariable(v.clone()))?;
                            Fo::Var(slot, bit)
                        }
                        Term::Const(c) => Fo::Ground(
                            self.constants
                                .iter()
                                .position(|k| k == c)
                                .ok_or_else(|| Error::UnknownSymbol(c.clone()))?,
                            bit,
                        ),
                    }
                }
                _ => return Err(Error::NotMonadic(p.clone(), args.len())),
            },
            Not(a) => Fo::Not(Box::new(sub(a, self, scope)?)),
            And(a, b) => Fo::And(vec![sub(a, self, scope)?, sub(b, self, scope)?]),
            Or(a, b) => Fo::Or(vec![sub(a, self, scope)?, sub(b, self, scope)?]),
            Implies(a, b) => Fo::Or(vec![
                Fo::Not(Box::new(sub(a, self, scope)?)),
                sub(b, self, scope)?,
            ]),
            Iff(a, b) => {
                let (x, y) = (sub(a, self, scope)?, sub(b, self, scope)?);
                Fo::Or(vec![
                    Fo::And(vec![x.clone(), y.clone()]),
                    Fo::And(vec![Fo::Not(Box::new(x)), Fo::Not(Box::new(y))]),
                ])
            }
            Forall(v, a) | Exists(v, a) => {
                let slot = self.slots;
                self.slots += 1;
                scope.push((v.clone(), slot));
                let body = sub(a, self, scope)?;
                scope.pop();
                if matches!(f, Forall(..)) {
                    Fo::Forall(slot, Box::new(body))
                } else {
                    Fo::Exists(slot, Box::new(body))
                }
            }
            _ => return Err(Error::TemporalInFirstOrder(f.to_string())),
        })
    }
}

/// Evaluation environment: present colours, colours of constants, proposition bits.
pub struct FoEnv<'a> {
    pub colours: &'a [Colour],
    pub constants: &'a [Colour],
    pub props: u64,
}

impl Fo {
    pub fn eval(&self, env: &FoEnv<'_>, slots: &mut Vec<Colour>) -> bool {
        match self {
            Fo::Const(b) => *b,
            Fo::Var(s, bit) => slots[*s].0 >> bit & 1 == 1,
            Fo::Ground(k, bit) => env.constants[*k].0 >> bit & 1 == 1,
            Fo::Prop(i) => env.props >> i & 1 == 1,
            Fo::Not(a) => !a.eval(env, slots),
            Fo::And(v) => v.iter().all(|a| a.eval(env, slots)),
            Fo::Or(v) => v.iter().any(|a| a.eval(env, slots)),
            Fo::Forall(s, a) | Fo::Exists(s, a) => {
                let universal = matches!(self, Fo::Forall(..));
                if slots.len() <= *s {
                    slots.resize(*s + 1, Colour(0));
                }
                for &c in env.colours {
                    slots[*s] = c;
                    if a.eval(env, slots) != universal {
                        return !universal;
                    }
                }
                universal
            }
        }
    }
}

/// Truth of a first-order formula in a colour structure under an assignment of
/// variables to indices into `s.colours`.
pub fn evaluate_fo(
    sig: &Signature,
    s: &ColourStructure,
    assignment: &BTreeMap<String, usize>,
    f: &Formula,
) -> Result<bool> {
    let space = ColourSpace::new(sig)?;
    let mut ctx = FoContext::new(sig);
    // Free variables are bound by wrapping them in singleton quantifiers below.
    let mut wrapped = f.clone();
    let free: Vec<String> = f.free_variables().into_iter().collect();
    for v in &free {
        if !assignment.contains_key(v) {
            return Err(Error::FreeVariable(v.clone()));
        }
        wrapped = Formula::forall(v, wrapped);
    }
    let fo = ctx.compile(&space, &wrapped, true)?;
    let constants: Vec<Colour> = ctx
        .constants
        .iter()
        .map(|c| {
            s.constants
                .get(c)
                .map(|&i| s.colours[i])
                .ok_or_else(|| Error::UnknownSymbol(c.clone()))
        })
        .collect::<Result<_>>()?;
    let props = prop_bits(&ctx.props, &s.props);
    // Peel the wrappers off by pinning each slot to the assigned colour.
    let mut slots = Vec::new();
    let mut body = &fo;
    for v in free.iter().rev() {
        match body {
            Fo::Forall(slot, inner) => {
                if slots.len() <= *slot {
                    slots.resize(*slot + 1, Colour(0));
                }
                slots[*slot] = s.colours[assignment[v]];
                body = inner;
            }
            _ => unreachable!(),
        }
    }
    let env = FoEnv {
        colours: &s.colours,
        constants: &constants,
        props,
    };
    Ok(body.eval(&env, &mut slots))
}

pub fn prop_bits(names: &[String], values: &BTreeMap<String, bool>) -> u64 {
    names
        .iter()
        .enumerate()
        .filter(|(_, n)| values.get(*n).copied().unwrap_or(false))
        .fold(0, |acc, (i, _)| acc | 1 << i)
}

fn conjuncts<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => out.push(other),
    }
}

fn quantifier_free(f: &Formula) -> bool {
    !matches!(f, Formula::Forall(..) | Formula::Exists(..))
        && f.children().iter().all(|c| quantifier_free(c))
}

fn mentions_constant(f: &Formula) -> bool {
    match f {
        Formula::Atom(_, args) => args.iter().any(|t| matches!(t, Term::Const(_))),
        _ => f.children().iter().any(|c| mentions_constant(c)),
    }
}

/// Returns a colour structure satisfying `f`, or `None` if `f` is unsatisfiable.
///
/// Candidate colours are pruned by the top-level conjuncts `forall x. phi(x)`
/// with `phi` quantifier-free; colour sets are then tried smallest first.
pub fn fo_satisfiable(f: &Formula, sig: &Signature) -> Result<Option<ColourStructure>> {
    f.check_against(sig)?;
    if !f.is_first_order() {
        return Err(Error::TemporalInFirstOrder(f.to_string()));
    }
    if !f.is_closed() {
        let vars: Vec<String> = f.free_variables().into_iter().collect();
        return Err(Error::NotClosed(vars.join(", ")));
    }
    if let Some((p, a)) = f.first_non_monadic() {
        return Err(Error::NotMonadic(p.to_string(), a));
    }
    let space = ColourSpace::new(sig)?;
    let mut ctx = FoContext::new(sig);
    let whole = ctx.compile(&space, f, true)?;
    let mut parts = Vec::new();
    conjuncts(f, &mut parts);
    let mut unit = Vec::new();
    let mut witness = Vec::new();
    for p in parts {
        match p {
            Formula::Forall(_, body) if quantifier_free(body) && !mentions_constant(body) => {
                unit.push(ctx.compile(&space, p, true)?)
            }
            Formula::Exists(_, body) if quantifier_free(body) && !mentions_constant(body) => {
                witness.push(ctx.compile(&space, p, true)?)
            }
            _ => {}
        }
    }
    let colours = space.enumerate();
    let nprops = ctx.props.len();
    let nconsts = ctx.constants.len();
    for props in 0..1u64 << nprops {
        let allowed: Vec<Colour> = colours
            .iter()
            .copied()
            .filter(|c| {
                let env = FoEnv {
                    colours: std::slice::from_ref(c),
                    constants: &[],
                    props,
                };
                unit.iter().all(|u| u.eval(&env, &mut Vec::new()))
            })
            .collect();
        let witnesses: Vec<u128> = witness
            .iter()
            .map(|w| {
                allowed.iter().enumerate().fold(0u128, |acc, (i, c)| {
                    let env = FoEnv {
                        colours: std::slice::from_ref(c),
                        constants: &[],
                        props,
                    };
                    if w.eval(&env, &mut Vec::new()) {
                        acc | 1 << i
                    } else {
                        acc
                    }
                })
            })
            .collect();
        if witnesses.contains(&0) || allowed.is_empty() {
            continue;
        }
        if allowed.len() > 24 {
            return Err(Error::ResourceLimit(format!(
                "{} candidate colours in first-order search",
                allowed.len()
            )));
        }
        let forced: u128 = witnesses
            .iter()
            .filter(|w| w.count_ones() == 1)
            .fold(0, |acc, w| acc | w);
        for size in 1..=allowed.len() {
            for subset in subsets_of_size(allowed.len(), size) {
                if subset & forced != forced || witnesses.iter().any(|w| w & subset == 0) {
                    continue;
                }
                let chosen: Vec<Colour> = (0..allowed.len())
                    .filter(|i| subset >> i & 1 == 1)
                    .map(|i| allowed[i])
                    .collect();
                let env_colours = chosen.clone();
                let mut map = vec![0usize; nconsts];
                loop {
                    let consts: Vec<Colour> = map.iter().map(|&i| env_colours[i]).collect();
                    let env = FoEnv {
                        colours: &env_colours,
                        constants: &consts,
                        props,
                    };
                    if whole.eval(&env, &mut Vec::new()) {
                        return Ok(Some(ColourStructure {
                            colours: chosen,
                            constants: ctx.constants.iter().cloned().zip(map).collect(),
                            props: ctx
                                .props
                                .iter()
                                .enumerate()
                                .map(|(i, p)| (p.clone(), props >> i & 1 == 1))
                                .collect(),
                        }));
                    }
                    if !advance(&mut map, env_colours.len()) {
                        break;
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Odometer step over `0..base` digits; false once every value has been produced.
pub fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Bitmasks over `n` positions with exactly `k` bits set, in increasing order.
pub fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u128> {
    let first: u128 = if k == 0 { 0 } else { (1u128 << k) - 1 };
    let limit: u128 = 1u128 << n;
    let mut next = Some(first);
    std::iter::from_fn(move || {
        let cur = next?;
        if cur >= limit {
            next = None;
            return None;
        }
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack.
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            Some((((r ^ cur) >> 2) / c) | r)
        };
        Some(cur)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn sig() -> Signature {
        Signature::parse("xorset a: P1 P2 P3\nxorset b: P4 P5 P6 P7 P8\npreds: Q/1 p/0\nconsts: c")
            .unwrap()
    }

    #[test]
    fn colour_count_matches_product() {
        let s = Signature::parse("xorset a: P1 P2 P3\nxorset b: P4 P5 P6 P7 P8").unwrap();
        let colours = enumerate_colours(&s).unwrap();
        assert_eq!(colours.len(), 15);
        let space = ColourSpace::new(&sig()).unwrap();
        assert_eq!(space.count(), 30);
        let all = space.enumerate();
        assert!(all.iter().all(|&c| space.is_valid(c)));
        for (i, &c) in all.iter().enumerate() {
            assert_eq!(space.index_of(c), i as u128);
        }
    }

    #[test]
    fn xor_restriction_example() {
        let s = Signature::parse("xorset a: P1 P2 P3\nxorset b: P4 P5 P6 P7 P8").unwrap();
        let f = parse_formula("forall x. (P1(x) | P2(x)) & (P4(x) | P7(x) | P8(x))", &s).unwrap();
        let space = ColourSpace::new(&s).unwrap();
        let mut ctx = FoContext::new(&s);
        let fo = ctx.compile(&space, &f, true).unwrap();
        let ok = space
            .enumerate()
            .into_iter()
            .filter(|c| {
                let env = FoEnv {
                    colours: std::slice::from_ref(c),
                    constants: &[],
                    props: 0,
                };
                fo.eval(&env, &mut Vec::new())
            })
            .count();
        assert_eq!(ok, 6);
    }

    #[test]
    fn satisfiable_and_unsatisfiable() {
        let s = sig();
        let f = parse_formula(
            "(exists x. P1(x) & Q(x)) & (forall x. Q(x) -> P4(x)) & P2(c) & p",
            &s,
        )
        .unwrap();
        let m = fo_satisfiable(&f, &s).unwrap().expect("satisfiable");
        assert_eq!(evaluate_fo(&s, &m, &BTreeMap::new(), &f), Ok(true));
        let g = parse_formula("(exists x. P1(x)) & forall x. P2(x) | P3(x)", &s).unwrap();
        assert_eq!(fo_satisfiable(&g, &s).unwrap(), None);
        let h = parse_formula("exists x. P1(x) & P2(x)", &s).unwrap();
        assert_eq!(fo_satisfiable(&h, &s).unwrap(), None);
    }

    #[test]
    fn rejects_temporal_input() {
        let s = sig();
        let f = parse_formula("next p", &s).unwrap();
        assert!(matches!(
            fo_satisfiable(&f, &s),
            Err(Error::TemporalInFirstOrder(_))
        ));
    }

    #[test]
    fn subsets_are_enumerated_in_order() {
        let v: Vec<u128> = subsets_of_size(4, 2).collect();
        assert_eq!(v, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(subsets_of_size(3, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(subsets_of_size(3, 3).collect::<Vec<_>>(), vec![0b111]);
    }
}
