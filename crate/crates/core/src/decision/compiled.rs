//! A temporal problem compiled against its colour space.

use crate::error::{Error, Result};
use crate::logic::{Formula, Signature};
use crate::mono_sat::{Colour, ColourSpace, Fo, FoContext, FoEnv};
use crate::normal_form::{LitAtom, Literal, TemporalProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CLit {
    Unary(usize, bool),
    Prop(usize, bool),
    Ground(usize, usize, bool),
}

#[derive(Debug, Clone)]
pub(crate) struct CStep {
    pub lhs: Vec<CLit>,
    pub rhs: Vec<CLit>,
    pub unary: bool,
}

/// The non-colour part of a world: proposition bits and constant colours.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Ctx {
    pub props: u64,
    pub rho: Vec<Colour>,
}

/// A unary step clause after substituting the propositions and constants of
/// two consecutive worlds: `g ⊇ lpos, g ∩ lneg = ∅` implies
/// `g2 ∩ rpos ≠ ∅ or rneg ⊄ g2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Reduced {
    pub lpos: u64,
    pub lneg: u64,
    pub rpos: u64,
    pub rneg: u64,
}

impl Reduced {
    pub fn allows(&self, g: Colour, g2: Colour) -> bool {
        let fires = g.0 & self.lpos == self.lpos && g.0 & self.lneg == 0;
        !fires || g2.0 & self.rpos != 0 || !g2.0 & self.rneg != 0
    }
}

/// Colour-level view of a pair of consecutive worlds.
#[derive(Debug, Clone)]
pub(crate) struct Transition {
    /// Non-unary clauses hold.
    pub global: bool,
    pub clauses: Vec<Reduced>,
}

impl Transition {
    pub fn allows(&self, g: Colour, g2: Colour) -> bool {
        self.clauses.iter().all(|c| c.allows(g, g2))
    }
}

pub(crate) struct Compiled {
    pub space: ColourSpace,
    pub props: Vec<String>,
    pub consts: Vec<String>,
    pub universal: Vec<Fo>,
    /// Bodies of conjuncts `forall x. phi(x)` with `phi` quantifier-free and
    /// constant-free, with the slot of `x`.
    pub unit: Vec<(usize, Fo)>,
    pub initial: Vec<Fo>,
    pub steps: Vec<CStep>,
    pub unary_evs: Vec<(usize, bool)>,
    pub prop_evs: Vec<(usize, bool)>,
}

fn lit(c: &Compiled, l: &Literal) -> Result<CLit> {
    let unknown = |s: &str| Error::UnknownSymbol(s.to_string());
    Ok(match &l.atom {
        LitAtom::Unary(p) => {
            CLit::Unary(c.space.pred_index(p).ok_or_else(|| unknown(p))?, l.positive)
        }
        LitAtom::Prop(p) => CLit::Prop(
            c.props
                .iter()
                .position(|q| q == p)
                .ok_or_else(|| unknown(p))?,
            l.positive,
        ),
        LitAtom::Ground(p, k) => CLit::Ground(
            c.consts
                .iter()
                .position(|q| q == k)
                .ok_or_else(|| unknown(k))?,
            c.space.pred_index(p).ok_or_else(|| unknown(p))?,
            l.positive,
        ),
    })
}

fn conjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        Formula::True => {}
        other => out.push(other.clone()),
    }
}

fn quantifier_free(f: &Formula) -> bool {
    !matches!(f, Formula::Forall(..) | Formula::Exists(..))
        && f.children().iter().all(|c| quantifier_free(c))
}

fn constant_free(f: &Formula) -> bool {
    match f {
        Formula::Atom(_, args) => args.iter().all(|t| matches!(t, crate::logic::Term::Var(_))),
        _ => f.children().iter().all(|c| constant_free(c)),
    }
}

impl Compiled {
    pub fn new(p: &TemporalProblem) -> Result<Compiled> {
        p.validate()?;
        let sig: &Signature = &p.signature;
        let space = ColourSpace::new(sig)?;
        let mut ctx = FoContext::new(sig);
        if ctx.props.len() > 64 {
            return Err(Error::ResourceLimit(format!(
                "{} propositions",
                ctx.props.len()
            )));
        }
        let mut parts = Vec::new();
        for u in &p.universal {
            conjuncts(u, &mut parts);
        }
        let mut universal = Vec::new();
        let mut unit = Vec::new();
        for f in &parts {
            let fo = ctx.compile(&space, f, false)?;
            if let Formula::Forall(_, body) = f {
                if quantifier_free(body) && constant_free(body) {
                    if let Fo::Forall(slot, b) = &fo {
                        unit.push((*slot, (**b).clone()));
                    }
                }
            }
            universal.push(fo);
        }
        let mut initial = Vec::new();
        for f in &p.initial {
            initial.push(ctx.compile(&space, f, true)?);
        }
        let mut c = Compiled {
            space,
            props: ctx.props.clone(),
            consts: ctx.constants.clone(),
            universal,
            unit,
            initial,
            steps: Vec::new(),
            unary_evs: Vec::new(),
            prop_evs: Vec::new(),
        };
        for s in &p.step {
            let lhs = s
                .lhs
                .iter()
                .map(|l| lit(&c, l))
                .collect::<Result<Vec<_>>>()?;
            let rhs = s
                .rhs
                .iter()
                .map(|l| lit(&c, l))
                .collect::<Result<Vec<_>>>()?;
            c.steps.push(CStep {
                lhs,
                rhs,
                unary: s.is_unary(),
            });
        }
        for e in &p.eventualities {
            match lit(&c, e)? {
                CLit::Unary(b, pos) => c.unary_evs.push((b, pos)),
                CLit::Prop(i, pos) => c.prop_evs.push((i, pos)),
                CLit::Ground(..) => {
                    return Err(Error::IllFormedProblem("ground eventuality".into()));
                }
            }
        }
        if c.unary_evs.len() > 32 || c.prop_evs.len() > 32 {
            return Err(Error::ResourceLimit(
                "more than 32 eventualities of one kind".into(),
            ));
        }
        Ok(c)
    }

    pub fn full_unary_labels(&self) -> u32 {
        mask32(self.unary_evs.len())
    }

    pub fn full_prop_labels(&self) -> u32 {
        mask32(self.prop_evs.len())
    }

    /// Eventuality labels a colour satisfies.
    pub fn labels(&self, g: Colour) -> u32 {
        self.unary_evs
            .iter()
            .enumerate()
            .filter(|(_, &(b, pos))| (g.0 >> b & 1 == 1) == pos)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    pub fn prop_labels(&self, props: u64) -> u32 {
        self.prop_evs
            .iter()
            .enumerate()
            .filter(|(_, &(b, pos))| (props >> b & 1 == 1) == pos)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Whether a colour can satisfy every unit universal constraint; unknown
    /// propositions are treated as free.
    pub fn unit_ok(&self, g: Colour, props: Option<u64>) -> bool {
        let known = mask64(self.space.preds.len());
        self.unit
            .iter()
            .all(|(slot, f)| eval3(f, *slot, known, g.0, props) != Some(false))
    }

    /// Candidate colours in canonical order: those that can satisfy the unit
    /// universal constraints under the given (or some) proposition valuation.
    pub fn candidates(&self, props: Option<u64>, limit: usize) -> Result<Vec<Colour>> {
        let mut vars: Vec<Vec<u64>> = Vec::new();
        for g in self.space.xor_groups() {
            vars.push(g.iter().map(|&i| 1u64 << i).collect());
        }
        for &i in self.space.free_bits() {
            vars.push(vec![0, 1u64 << i]);
        }
        let mut known_after = Vec::with_capacity(vars.len());
        let mut known = 0u64;
        for g in self.space.xor_groups() {
            known |= g.iter().fold(0, |a, &i| a | 1 << i);
            known_after.push(known);
        }
        for &i in self.space.free_bits() {
            known |= 1 << i;
            known_after.push(known);
        }
        let mut out = Vec::new();
        self.dfs(&vars, &known_after, 0, 0, props, &mut out, limit)?;
        Ok(out)
    }

    fn dfs(
        &self,
        vars: &[Vec<u64>],
        known_after: &[u64],
        level: usize,
        value: u64,
        props: Option<u64>,
        out: &mut Vec<Colour>,
        limit: usize,
    ) -> Result<()> {
        if level == vars.len() {
            if out.len() >= limit {
                return Err(Error::ResourceLimit(format!(
                    "more than {limit} candidate colours"
                )));
            }
            out.push(Colour(value));
            return Ok(());
        }
        for &choice in &vars[level] {
            let v = value | choice;
            let known = known_after[level];
            if self
                .unit
                .iter()
                .all(|(slot, f)| eval3(f, *slot, known, v, props) != Some(false))
            {
                self.dfs(vars, known_after, level + 1, v, props, out, limit)?;
            }
        }
        Ok(())
    }

    /// Truth of the universal part in the world `(gamma, ctx)`.
    pub fn universal_holds(&self, gamma: &[Colour], ctx: &Ctx) -> bool {
        let env = FoEnv {
            colours: gamma,
            constants: &ctx.rho,
            props: ctx.props,
        };
        let mut slots = Vec::new();
        self.universal.iter().all(|f| f.eval(&env, &mut slots))
    }

    pub fn initial_holds(&self, gamma: &[Colour], ctx: &Ctx) -> bool {
        let env = FoEnv {
            colours: gamma,
            constants: &ctx.rho,
            props: ctx.props,
        };
        let mut slots = Vec::new();
        self.initial.iter().all(|f| f.eval(&env, &mut slots))
    }

    fn lit_at(&self, l: CLit, ctx: &Ctx) -> Option<bool> {
        match l {
            CLit::Unary(..) => None,
            CLit::Prop(i, pos) => Some((ctx.props >> i & 1 == 1) == pos),
            CLit::Ground(k, b, pos) => Some((ctx.rho[k].0 >> b & 1 == 1) == pos),
        }
    }

    /// Substitutes the non-colour parts of two consecutive worlds into the step clauses.
    pub fn transition(&self, a: &Ctx, b: &Ctx) -> Transition {
        let mut global = true;
        let mut clauses = Vec::new();
        'clause: for s in &self.steps {
            let mut r = Reduced {
                lpos: 0,
                lneg: 0,
                rpos: 0,
                rneg: 0,
            };
            for &l in &s.lhs {
                match (l, self.lit_at(l, a)) {
                    (_, Some(false)) => continue 'clause,
                    (_, Some(true)) => {}
                    (CLit::Unary(bit, true), None) => r.lpos |= 1 << bit,
                    (CLit::Unary(bit, false), None) => r.lneg |= 1 << bit,
                    _ => unreachable!(),
                }
            }
            for &l in &s.rhs {
                match (l, self.lit_at(l, b)) {
                    (_, Some(true)) => continue 'clause,
                    (_, Some(false)) => {}
                    (CLit::Unary(bit, true), None) => r.rpos |= 1 << bit,
                    (CLit::Unary(bit, false), None) => r.rneg |= 1 << bit,
                    _ => unreachable!(),
                }
            }
            if s.unary {
                if r.lpos & r.lneg == 0 {
                    clauses.push(r);
                }
            } else {
                global = false;
            }
        }
        Transition { global, clauses }
    }
}

fn mask32(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn mask64(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Kleene evaluation of a quantifier-free formula over one variable slot with
/// partially known colour bits.
fn eval3(f: &Fo, slot: usize, known: u64, value: u64, props: Option<u64>) -> Option<bool> {
    match f {
        Fo::Const(b) => Some(*b),
        Fo::Var(s, bit) if *s == slot => (known >> bit & 1 == 1).then(|| value >> bit & 1 == 1),
        Fo::Prop(i) => props.map(|p| p >> i & 1 == 1),
        Fo::Not(a) => eval3(a, slot, known, value, props).map(|b| !b),
        Fo::And(v) => {
            let mut unknown = false;
            for a in v {
                match eval3(a, slot, known, value, props) {
                    Some(false) => return Some(false),
                    None => unknown = true,
                    _ => {}
                }
            }
            (!unknown).then_some(true)
        }
        Fo::Or(v) => {
            let mut unknown = false;
            for a in v {
                match eval3(a, slot, known, value, props) {
                    Some(true) => return Some(true),
                    None => unknown = true,
                    _ => {}
                }
            }
            (!unknown).then_some(false)
        }
        _ => None,
    }
}
