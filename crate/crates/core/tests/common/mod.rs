//! Random signatures, formulas and structures for property tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use fotlx::logic::{Formula, Signature, TemporalStructure, World};
use fotlx::normal_form::{LitAtom, Literal, StepClause, TemporalProblem};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone, Copy)]
pub struct SigLimits {
    pub xor_sets: usize,
    pub xor_size: usize,
    pub free_unary: usize,
    pub props: usize,
    pub consts: usize,
}

pub const SMALL: SigLimits = SigLimits {
    xor_sets: 2,
    xor_size: 3,
    free_unary: 2,
    props: 1,
    consts: 2,
};

/// Up to three XOR sets of up to four members and three further unary predicates.
pub const WIDE: SigLimits = SigLimits {
    xor_sets: 3,
    xor_size: 4,
    free_unary: 3,
    props: 0,
    consts: 0,
};

pub fn signature<R: Rng>(rng: &mut R, lim: SigLimits) -> Signature {
    let mut sig = Signature::new();
    let mut next = 0;
    for s in 0..rng.gen_range(0..=lim.xor_sets) {
        let size = rng.gen_range(1..=lim.xor_size.max(1));
        let names: Vec<String> = (0..size)
            .map(|_| {
                next += 1;
                format!("P{next}")
            })
            .collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        sig.add_xor_set(&format!("X{s}"), &refs).unwrap();
    }
    for i in 0..rng.gen_range(0..=lim.free_unary) {
        sig.add_pred(&format!("Q{i}"), 1).unwrap();
    }
    for i in 0..rng.gen_range(0..=lim.props) {
        sig.add_pred(&format!("p{i}"), 0).unwrap();
    }
    for i in 0..rng.gen_range(0..=lim.consts) {
        sig.add_constant(&format!("c{i}")).unwrap();
    }
    if sig.unary_predicates().is_empty() && sig.propositions().is_empty() {
        sig.add_pred("p0", 0).unwrap();
    }
    sig
}

/// A closed, monodic, monadic formula of at most the given depth.
pub fn formula<R: Rng>(rng: &mut R, sig: &Signature, depth: usize) -> Formula {
    gen(rng, sig, depth, &[], true)
}

/// As [`formula`] but without temporal operators or `start`.
pub fn fo_formula<R: Rng>(rng: &mut R, sig: &Signature, depth: usize) -> Formula {
    gen(rng, sig, depth, &[], false)
}

fn atom<R: Rng>(rng: &mut R, sig: &Signature, vars: &[String]) -> Formula {
    let unary = sig.unary_predicates();
    let props = sig.propositions();
    let consts: Vec<&String> = sig.constants.iter().collect();
    let mut options: Vec<u8> = Vec::new();
    if !unary.is_empty() && !vars.is_empty() {
        options.extend([0, 0, 0]);
    }
    if !unary.is_empty() && !consts.is_empty() {
        options.push(1);
    }
    if !props.is_empty() {
        options.push(2);
    }
    if options.is_empty() {
        return if rng.gen() {
            Formula::True
        } else {
            Formula::False
        };
    }
    match *options.choose(rng).unwrap() {
        0 => Formula::unary(unary.choose(rng).unwrap(), vars.choose(rng).unwrap()),
        1 => Formula::ground(unary.choose(rng).unwrap(), consts.choose(rng).unwrap()),
        _ => Formula::prop(props.choose(rng).unwrap()),
    }
}

fn gen<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    depth: usize,
    vars: &[String],
    temporal: bool,
) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 5) {
        if temporal && vars.is_empty() && rng.gen_ratio(1, 12) {
            return Formula::Start;
        }
        return atom(rng, sig, vars);
    }
    let d = depth - 1;
    let kind = if temporal {
        rng.gen_range(0..12)
    } else {
        rng.gen_range(0..7)
    };
    match kind {
        0 => Formula::not(gen(rng, sig, d, vars, temporal)),
        1 => Formula::and(
            gen(rng, sig, d, vars, temporal),
            gen(rng, sig, d, vars, temporal),
        ),
        2 => Formula::or(
            gen(rng, sig, d, vars, temporal),
            gen(rng, sig, d, vars, temporal),
        ),
        3 => Formula::implies(
            gen(rng, sig, d, vars, temporal),
            gen(rng, sig, d, vars, temporal),
        ),
        4 => Formula::iff(
            gen(rng, sig, d, vars, temporal),
            gen(rng, sig, d, vars, temporal),
        ),
        5 | 6 => {
            let v = if vars.last().map(String::as_str) == Some("x") {
                "y"
            } else {
                "x"
            };
            let mut inner: Vec<String> = vars.to_vec();
            inner.push(v.to_string());
            let body = gen(rng, sig, d, &inner, temporal);
            if kind == 5 {
                Formula::forall(v, body)
            } else {
                Formula::exists(v, body)
            }
        }
        _ => {
            // Temporal bodies may use only the innermost variable.
            let inner: Vec<String> = vars.last().cloned().into_iter().collect();
            let a = gen(rng, sig, d, &inner, temporal);
            match kind {
                7 => Formula::next(a),
                8 => Formula::always(a),
                9 => Formula::sometime(a),
                10 => Formula::until(a, gen(rng, sig, d, &inner, temporal)),
                _ => Formula::unless(a, gen(rng, sig, d, &inner, temporal)),
            }
        }
    }
}

/// A random XOR-valid lasso structure over the signature.
pub fn structure<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    max_domain: usize,
    max_prefix: usize,
    max_loop: usize,
) -> TemporalStructure {
    let domain = rng.gen_range(1..=max_domain);
    let prefix = rng.gen_range(0..=max_prefix);
    let lasso = rng.gen_range(1..=max_loop);
    let mut world = || {
        let mut w = World::default();
        for e in 0..domain {
            for x in &sig.xor_sets {
                w.insert(x.members.choose(rng).unwrap(), vec![e]);
            }
            for p in sig.non_xor_unary() {
                if rng.gen() {
                    w.insert(p, vec![e]);
                }
            }
        }
        for p in sig.propositions() {
            w.set_prop(p, rng.gen());
        }
        w
    };
    let prefix_worlds: Vec<World> = (0..prefix).map(|_| world()).collect();
    let loop_worlds: Vec<World> = (0..lasso).map(|_| world()).collect();
    let constants: BTreeMap<String, usize> = sig
        .constants
        .iter()
        .map(|c| (c.clone(), rng.gen_range(0..domain)))
        .collect();
    TemporalStructure {
        domain: (1..=domain).map(|i| format!("e{i}")).collect(),
        constants,
        prefix: prefix_worlds,
        lasso: loop_worlds,
    }
}

fn unary_literal<R: Rng>(rng: &mut R, preds: &[&str]) -> Literal {
    let atom = LitAtom::Unary(preds.choose(rng).unwrap().to_string());
    if rng.gen() {
        Literal::pos(atom)
    } else {
        Literal::neg(atom)
    }
}

/// A random problem in clausal form over exactly the given signature, which
/// must have a unary predicate.
pub fn problem<R: Rng>(rng: &mut R, sig: &Signature) -> TemporalProblem {
    let preds = sig.unary_predicates();
    let mut p = TemporalProblem::new(sig.clone());
    for _ in 0..rng.gen_range(0..=3) {
        let (a, b) = (unary_literal(rng, &preds), unary_literal(rng, &preds));
        p.universal.push(Formula::forall(
            "x",
            Formula::or(a.to_formula(), b.to_formula()),
        ));
    }
    for _ in 0..rng.gen_range(0..=2) {
        p.initial.push(Formula::exists(
            "x",
            unary_literal(rng, &preds).to_formula(),
        ));
    }
    // XOR literals are negative on the left of step clauses and positive on the right.
    let side = |mut l: Literal, left: bool| {
        if sig.xor_set_of(l.pred()).is_some() {
            l.positive = !left;
        }
        l
    };
    for _ in 0..rng.gen_range(0..=3) {
        p.step.push(StepClause {
            lhs: vec![side(unary_literal(rng, &preds), true)],
            rhs: vec![
                side(unary_literal(rng, &preds), false),
                side(unary_literal(rng, &preds), false),
            ],
        });
    }
    if rng.gen() {
        p.eventualities.push(unary_literal(rng, &preds));
    }
    p
}
