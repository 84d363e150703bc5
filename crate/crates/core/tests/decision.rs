mod common;

use std::collections::BTreeMap;

use fotlx::decision::{
    bounded_model_oracle, build_behaviour_graph, check_satisfiability, check_validity,
    formula_satisfiability, node_condition, step_compatible, ColourScheme, DecisionOptions,
    OracleBounds, OracleResult,
};
use fotlx::logic::{parse_formula, Signature};
use fotlx::mono_sat::{enumerate_colours, Colour, ColourSpace};
use fotlx::normal_form::{to_dsnf, TemporalProblem};
use fotlx::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const OPTS: DecisionOptions = DecisionOptions { jobs: 1 };

fn automaton() -> (Signature, String) {
    let sig = Signature::parse("xorset S: s_a s_b s_t s_w").unwrap();
    let text = "(exists x. s_t(x)) \
        & always (forall x. s_t(x) -> next (s_t(x) | s_a(x))) \
        & always (forall x. s_b(x) -> next s_t(x)) \
        & always (forall x. s_a(x) -> next s_w(x)) \
        & always (forall x. s_w(x) -> next (s_w(x) | s_b(x)))"
        .to_string();
    (sig, text)
}

fn sat(text: &str, sig: &Signature) -> bool {
    let f = parse_formula(text, sig).unwrap();
    formula_satisfiability(&f, sig, &OPTS).unwrap().satisfiable
}

fn oracle(text: &str, sig: &Signature, d: usize, p: usize, l: usize) -> OracleResult {
    let f = parse_formula(text, sig).unwrap();
    let bounds = OracleBounds {
        max_domain: d,
        max_prefix: p,
        max_loop: l,
    };
    bounded_model_oracle(&f, sig, bounds).unwrap()
}

fn colour(space: &ColourSpace, preds: &[&str]) -> Colour {
    Colour(
        preds
            .iter()
            .fold(0, |a, p| a | 1 << space.pred_index(p).unwrap()),
    )
}

#[test]
fn node_condition_examples() {
    let sig = Signature::parse("xorset X: P Q").unwrap();
    let space = ColourSpace::new(&sig).unwrap();
    let mut p = TemporalProblem::new(sig.clone());
    let scheme = ColourScheme {
        gamma: vec![colour(&space, &["P"])],
        rho: BTreeMap::new(),
        props: BTreeMap::new(),
    };
    assert!(node_condition(&scheme, &p).unwrap());
    p.universal
        .push(parse_formula("forall x. ~P(x)", &sig).unwrap());
    assert!(!node_condition(&scheme, &p).unwrap());
}

#[test]
fn node_condition_rejects_rho_outside_gamma() {
    let sig = Signature::parse("xorset X: P Q\nconsts: c").unwrap();
    let space = ColourSpace::new(&sig).unwrap();
    let p = TemporalProblem::new(sig);
    let scheme = ColourScheme {
        gamma: vec![colour(&space, &["P"])],
        rho: BTreeMap::from([("c".to_string(), colour(&space, &["Q"]))]),
        props: BTreeMap::new(),
    };
    assert!(matches!(
        node_condition(&scheme, &p),
        Err(Error::InvalidStructure(_))
    ));
}

#[test]
fn step_compatible_examples() {
    let sig = Signature::parse("xorset S: s_a s_b s_t s_w").unwrap();
    let space = ColourSpace::new(&sig).unwrap();
    let f = parse_formula("always forall x. s_a(x) -> next s_w(x)", &sig).unwrap();
    let p = to_dsnf(&f, &sig).unwrap();
    let (a, w, t) = (
        colour(&space, &["s_a"]),
        colour(&space, &["s_w"]),
        colour(&space, &["s_t"]),
    );
    assert!(step_compatible(a, w, &p.step, &sig).unwrap());
    assert!(!step_compatible(a, t, &p.step, &sig).unwrap());
    assert!(step_compatible(a, t, &[], &sig).unwrap());
}

#[test]
fn empty_problem_gives_complete_graph() {
    let sig = Signature::parse("xorset X: P Q").unwrap();
    let p = TemporalProblem::new(sig);
    let g = build_behaviour_graph(&p, &OPTS).unwrap();
    assert_eq!(g.nodes.len(), 3);
    assert_eq!(g.edges.len(), 9);
    assert_eq!(g.initial.len(), 3);
    let dump = g.dump();
    assert!(dump.starts_with("node 0: {0} rho:\n"), "{dump}");
    assert!(dump.ends_with("initial: 0 1 2\n"), "{dump}");
}

#[test]
fn contradictory_universal_part_gives_no_nodes() {
    let sig = Signature::parse("xorset X: P Q").unwrap();
    let mut p = TemporalProblem::new(sig.clone());
    p.universal
        .push(parse_formula("forall x. false", &sig).unwrap());
    assert!(build_behaviour_graph(&p, &OPTS).unwrap().nodes.is_empty());
    assert!(!check_satisfiability(&p).unwrap().satisfiable);
}

#[test]
fn graph_respects_automaton_transitions() {
    let (sig, text) = automaton();
    let p = to_dsnf(&parse_formula(&text, &sig).unwrap(), &sig).unwrap();
    let g = build_behaviour_graph(&p, &OPTS).unwrap();
    let space = &g.space;
    let allowed = |a: Colour, b: Colour| {
        let name = |c: Colour| {
            ["s_a", "s_b", "s_t", "s_w"]
                .into_iter()
                .find(|s| space.holds(c, s))
                .unwrap()
        };
        matches!(
            (name(a), name(b)),
            ("s_t", "s_t")
                | ("s_t", "s_a")
                | ("s_b", "s_t")
                | ("s_a", "s_w")
                | ("s_w", "s_w")
                | ("s_w", "s_b")
        )
    };
    for &(a, b) in &g.edges {
        for &x in &g.nodes[a].gamma {
            assert!(g.nodes[b].gamma.iter().any(|&y| allowed(x, y)));
        }
    }
    assert!(!g.edges.is_empty());
}

#[test]
fn automaton_is_satisfiable() {
    let (sig, text) = automaton();
    assert!(sat(&text, &sig));
    let more = format!("{text} & always (forall x. sometime s_b(x))");
    assert!(sat(&more, &sig));
    let stuck = format!("{more} & always (forall x. s_w(x) -> next ~s_w(x))");
    assert!(sat(&stuck, &sig));
    assert!(matches!(
        oracle(&stuck, &sig, 1, 2, 5),
        OracleResult::Model(_)
    ));
}

#[test]
fn start_contradiction_is_unsatisfiable() {
    let sig = Signature::parse("preds: p/0").unwrap();
    assert!(!sat("start & ~start", &sig));
}

#[test]
fn validity_examples() {
    let sig = Signature::parse("preds: P/1\nconsts: c").unwrap();
    let valid = |t: &str| {
        let f = parse_formula(t, &sig).unwrap();
        check_validity(&f, &sig, &OPTS).unwrap()
    };
    assert!(valid("always P(c) -> sometime P(c)").valid);
    let v = valid("sometime P(c) -> always P(c)");
    assert!(!v.valid);
    let m = v.countermodel.unwrap();
    let f = parse_formula("sometime P(c) & sometime ~P(c)", &sig).unwrap();
    assert!(m.evaluate(0, &BTreeMap::new(), &f).unwrap());
}

#[test]
fn oracle_examples() {
    let sig = Signature::parse("preds: P/1 p/0\nconsts: c").unwrap();
    let ind = "always (P(c) -> next P(c)) & P(c) & sometime ~P(c)";
    assert_eq!(oracle(ind, &sig, 2, 3, 3), OracleResult::Exhausted);
    assert_eq!(
        oracle("sometime p & always ~p", &sig, 2, 2, 2),
        OracleResult::Exhausted
    );
    let xs = Signature::parse("xorset a: P1 P2 P3\nxorset b: P4 P5 P6 P7 P8").unwrap();
    match oracle(
        "forall x. (P1(x) | P2(x)) & (P4(x) | P7(x) | P8(x))",
        &xs,
        1,
        0,
        1,
    ) {
        OracleResult::Model(m) => {
            assert_eq!(m.domain.len(), 1);
            assert_eq!(m.lasso.len(), 1);
        }
        OracleResult::Exhausted => panic!("expected a model"),
    }
}

#[test]
fn infinite_domain_only_formula_is_unsatisfiable_here() {
    let sig = Signature::parse("preds: P/1").unwrap();
    assert!(!sat(
        "always (forall x. P(x) -> next always ~P(x)) & always exists x. P(x)",
        &sig
    ));
}

#[test]
fn unknown_colour_count_matches() {
    let sig = Signature::parse("xorset a: A B\npreds: Q/1 R/1").unwrap();
    assert_eq!(enumerate_colours(&sig).unwrap().len(), 8);
}

#[test]
fn random_formulas_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..60 {
        let sig = common::signature(&mut rng, common::SMALL);
        let f = common::formula(&mut rng, &sig, 3);
        let v = match formula_satisfiability(&f, &sig, &OPTS) {
            Ok(v) => v,
            Err(Error::Undecided(_)) => continue,
            Err(e) => panic!("case {i}: {f}: {e}"),
        };
        let bounds = OracleBounds {
            max_domain: 2,
            max_prefix: 2,
            max_loop: 2,
        };
        let o = bounded_model_oracle(&f, &sig, bounds).unwrap();
        if let OracleResult::Model(_) = o {
            assert!(
                v.satisfiable,
                "case {i}: {f} has a bounded model but was refuted"
            );
        }
        if let Some(m) = &v.witness {
            assert!(
                m.evaluate(0, &BTreeMap::new(), &f).unwrap(),
                "case {i}: {f}"
            );
            assert!(m.xor_valid(&sig));
        }
    }
}
