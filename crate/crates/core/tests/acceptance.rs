//! Acceptance gate: every check prints one PASS/FAIL line with its runtime
//! and the test fails if any check fails or exceeds its time budget.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use fotlx::decision::{
    bounded_model_oracle, count_nodes, formula_satisfiability, DecisionOptions, OracleBounds,
    OracleResult,
};
use fotlx::logic::{parse_formula, Formula, Signature};
use fotlx::mono_sat::enumerate_colours;
use fotlx::normal_form::to_dsnf;
use fotlx::protocol::{
    check_run, enumerate_lasso_runs, floodset, simulate, Action, GlobalConfiguration, Scheduler,
};
use fotlx::translator::{
    self, derive_signature, fairness, model_to_run, run_to_model, theory, Delivery,
    TranslationOptions, VerificationTask,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

const OPTS: DecisionOptions = DecisionOptions { jobs: 4 };

fn check(name: &str, budget: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = body();
    let dt = t.elapsed();
    let (ok, detail) = match out {
        Ok(d) if dt <= budget => (true, d),
        Ok(d) => (false, format!("{d}; over the {budget:?} budget")),
        Err(e) => (false, e),
    };
    println!(
        "{} {name}: {detail} [{dt:.2?}]",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

/// Colours of a signature counted from its shape alone.
fn colour_count(sig: &Signature) -> u128 {
    let xor: u128 = sig
        .xor_sets
        .iter()
        .map(|x| x.members.len() as u128)
        .product();
    let in_xor: BTreeSet<&str> = sig
        .xor_sets
        .iter()
        .flat_map(|x| x.members.iter().map(String::as_str))
        .collect();
    let free = sig
        .unary_predicates()
        .into_iter()
        .filter(|p| !in_xor.contains(*p))
        .count();
    xor << free
}

fn wide_signatures() -> Vec<Signature> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..20)
        .map(|_| common::signature(&mut rng, common::WIDE))
        .collect()
}

fn colour_identity() -> Outcome {
    for (i, sig) in wide_signatures().iter().enumerate() {
        let n = enumerate_colours(sig).map_err(|e| e.to_string())?.len() as u128;
        if n != colour_count(sig) {
            return Err(format!(
                "signature {i}: {n} colours, expected {}",
                colour_count(sig)
            ));
        }
    }
    Ok("20 signatures".into())
}

fn node_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut largest = 0f64;
    for (i, sig) in wide_signatures().iter().enumerate() {
        if sig.unary_predicates().is_empty() {
            continue;
        }
        let p = common::problem(&mut rng, sig);
        let t = Instant::now();
        let nodes = count_nodes(&p).map_err(|e| format!("signature {i}: {e}"))?;
        if t.elapsed() > Duration::from_secs(60) {
            return Err(format!("signature {i}: counting took {:?}", t.elapsed()));
        }
        let c = colour_count(sig) as f64;
        let bound = (c.exp2() - 1.0)
            * c.powi(sig.constants.len() as i32)
            * (sig.propositions().len() as f64).exp2();
        if nodes > bound {
            return Err(format!(
                "signature {i}: {nodes} nodes exceed the bound {bound}"
            ));
        }
        largest = largest.max(nodes);
    }
    Ok(format!("largest graph has {largest:e} nodes"))
}

fn oracle_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bounds = OracleBounds {
        max_domain: 3,
        max_prefix: 3,
        max_loop: 3,
    };
    let (mut sat, mut unsat, mut confirmed) = (0, 0, 0);
    for i in 0..200 {
        let sig = common::signature(&mut rng, common::SMALL);
        let f = common::formula(&mut rng, &sig, 4);
        let v = formula_satisfiability(&f, &sig, &OPTS)
            .map_err(|e| format!("formula {i} `{f}`: {e}"))?;
        let o = bounded_model_oracle(&f, &sig, bounds).map_err(|e| e.to_string())?;
        let found = matches!(o, OracleResult::Model(_));
        if found && !v.satisfiable {
            return Err(format!(
                "formula {i} `{f}`: refuted but the oracle has a model"
            ));
        }
        if let Some(m) = &v.witness {
            if !m.evaluate(0, &BTreeMap::new(), &f).unwrap_or(false) || !m.xor_valid(&sig) {
                return Err(format!("formula {i} `{f}`: witness fails verification"));
            }
        }
        if v.satisfiable {
            sat += 1;
            confirmed += found as usize;
        } else {
            unsat += 1;
        }
    }
    Ok(format!(
        "200 formulae: {sat} SAT ({confirmed} with a bounded model), {unsat} UNSAT, 0 disagreements"
    ))
}

fn dualities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let none = BTreeMap::new();
    for i in 0..1000 {
        let sig = common::signature(&mut rng, common::SMALL);
        let m = common::structure(&mut rng, &sig, 3, 3, 3);
        let a = common::formula(&mut rng, &sig, 3);
        let b = common::formula(&mut rng, &sig, 3);
        let pairs = [
            (
                Formula::always(a.clone()),
                Formula::not(Formula::sometime(Formula::not(a.clone()))),
            ),
            (
                Formula::sometime(a.clone()),
                Formula::not(Formula::always(Formula::not(a.clone()))),
            ),
            (
                Formula::unless(a.clone(), b.clone()),
                Formula::or(
                    Formula::until(a.clone(), b.clone()),
                    Formula::always(a.clone()),
                ),
            ),
        ];
        for t in 0..m.positions() {
            for (l, r) in &pairs {
                let (x, y) = (m.evaluate(t, &none, l), m.evaluate(t, &none, r));
                if x.is_err() || x != y {
                    return Err(format!("pair {i} at {t}: `{l}` and `{r}` differ"));
                }
            }
        }
    }
    Ok("1000 pairs, 3 identities at every position".into())
}

fn dsnf_equisatisfiable() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (d, p, l) = (2, 2, 2);
    let bounds = |p| OracleBounds {
        max_domain: d,
        max_prefix: p,
        max_loop: l,
    };
    let mut models = 0;
    for i in 0..100 {
        let sig = common::signature(&mut rng, common::SMALL);
        let f = common::formula(&mut rng, &sig, 3);
        let prob = to_dsnf(&f, &sig).map_err(|e| format!("formula {i}: {e}"))?;
        let g = prob.associated_formula();
        let has = |f: &Formula, s: &Signature, p| {
            bounded_model_oracle(f, s, bounds(p)).map(|o| matches!(o, OracleResult::Model(_)))
        };
        let of = has(&f, &sig, p).map_err(|e| e.to_string())?;
        let og = has(&g, &prob.signature, p).map_err(|e| e.to_string())?;
        // A model of the normal form restricts to one of the input; a model
        // of the input extends, with one more prefix world for `start`.
        if og && !of {
            return Err(format!(
                "formula {i} `{f}`: only the normal form has a model"
            ));
        }
        if of && !og && !has(&g, &prob.signature, p + 1).map_err(|e| e.to_string())? {
            return Err(format!("formula {i} `{f}`: only the input has a model"));
        }
        models += of as usize;
    }
    Ok(format!(
        "100 formulae, {models} with bounded models, verdicts agree"
    ))
}

/// `E_{i+1} = (E_i ∪ Sent_i) − Delivered_i`, with a message delivered at step
/// `k` when every machine reacted to it between its latest broadcast and `k`.
fn env_law_matches(configs: &[GlobalConfiguration]) -> Option<usize> {
    let sent = |c: &GlobalConfiguration| -> BTreeSet<String> {
        c.actions
            .iter()
            .filter_map(|a| match a {
                Action::Broadcast(m) => Some(m.clone()),
                _ => None,
            })
            .collect()
    };
    for k in 0..configs.len().saturating_sub(1) {
        let mut e: BTreeSet<String> = configs[k].env.union(&sent(&configs[k])).cloned().collect();
        e.retain(|a| {
            let Some(i) = (0..=k).rev().find(|&i| sent(&configs[i]).contains(a)) else {
                return true;
            };
            let recv = Action::Receive(a.clone());
            !(0..configs[k].actions.len())
                .all(|j| configs[i..=k].iter().any(|c| c.actions[j] == recv))
        });
        if e != configs[k + 1].env {
            return Some(k);
        }
    }
    None
}

fn simulated_runs() -> Outcome {
    let p = floodset();
    let schedulers = [
        Scheduler::FairRandom,
        Scheduler::AdversarialIdle(1),
        Scheduler::AdversarialIdle(3),
        Scheduler::Synchronous,
    ];
    for i in 0..100 {
        let n = 1 + i % 4;
        let s = schedulers[(i / 4) % 4];
        let r = simulate(&p, n, s, 50, i as u64).map_err(|e| e.to_string())?;
        if r.configs.len() != 50 {
            return Err(format!("run {i}: {} configurations", r.configs.len()));
        }
        let v = check_run(&p, &r, None).map_err(|e| e.to_string())?;
        if v.len() != 1 || !(v[0].condition == 4 && v[0].unverifiable) {
            let msgs: Vec<String> = v.iter().map(|v| v.to_string()).collect();
            return Err(format!("run {i} (n={n}, {s}): {}", msgs.join("; ")));
        }
        if let Some(k) = env_law_matches(&r.configs) {
            return Err(format!(
                "run {i} (n={n}, {s}): environment law fails at step {}",
                k + 1
            ));
        }
    }
    Ok("100 runs, n = 1..4, horizon 50, four schedulers".into())
}

fn faithfulness() -> Outcome {
    let p = floodset();
    let opts = TranslationOptions::default();
    let (t, _) = theory(&p, &opts).map_err(|e| e.to_string())?;
    let mut count = 0;
    for n in 1..=2 {
        for s in [Scheduler::Synchronous, Scheduler::AdversarialIdle(1)] {
            for (r, l) in enumerate_lasso_runs(&p, n, 6, s).map_err(|e| e.to_string())? {
                let m = run_to_model(&p, &r, l).map_err(|e| format!("{e}\n{}", r.trace()))?;
                if !m
                    .evaluate(0, &BTreeMap::new(), &t)
                    .map_err(|e| e.to_string())?
                {
                    return Err(format!(
                        "not a model of the theory (loop at {l}):\n{}",
                        r.trace()
                    ));
                }
                let (r2, l2) = model_to_run(&m, &p).map_err(|e| e.to_string())?;
                let period = r.configs.len() - l;
                let horizon = l.max(l2) + 2 * period;
                if r2.configs.len() - l2 != period || r2.unroll(l2, horizon) != r.unroll(l, horizon)
                {
                    return Err(format!(
                        "round trip changes the run (loop at {l}):\n{}",
                        r.trace()
                    ));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} lasso runs"))
}

fn end_to_end() -> Outcome {
    let p = floodset();
    let sig = derive_signature(&p).map_err(|e| e.to_string())?;
    let chi = parse_formula("sometime ((forall x. o_0(x)) | (forall x. o_1(x)))", &sig)
        .map_err(|e| e.to_string())?;
    let plain = VerificationTask {
        protocol: p.clone(),
        options: TranslationOptions::default(),
        property: chi.clone(),
        assumptions: vec![],
    };
    let a = translator::verify(&plain, &OPTS).map_err(|e| format!("(a): {e}"))?;
    if a.valid {
        return Err("(a) reported VALID".into());
    }
    let Some((run, _)) = &a.run else {
        return Err(format!(
            "(a): no run read off the countermodel: {:?}",
            a.run_error
        ));
    };
    if !run
        .configs
        .iter()
        .all(|c| c.actions.iter().all(Action::is_idle))
    {
        return Err(format!(
            "(a): countermodel is not all-idle:\n{}",
            run.trace()
        ));
    }
    let fair = VerificationTask {
        protocol: p.clone(),
        options: TranslationOptions {
            delivery: Delivery::Finite,
            ..Default::default()
        },
        property: chi,
        assumptions: vec![fairness()],
    };
    let b = translator::verify(&fair, &OPTS).map_err(|e| format!("(b): {e}"))?;
    if !b.valid {
        return Err("(b) reported INVALID".into());
    }
    let f = fair.formula().map_err(|e| e.to_string())?;
    let bounds = OracleBounds {
        max_domain: 2,
        max_prefix: 4,
        max_loop: 4,
    };
    match bounded_model_oracle(&Formula::not(f), &sig, bounds).map_err(|e| e.to_string())? {
        OracleResult::Exhausted => {}
        OracleResult::Model(_) => return Err("(b): the oracle found a countermodel".into()),
    }
    Ok(format!(
        "(a) INVALID, all-idle countermodel with {} machine(s); (b) VALID, oracle exhausted domain 2, prefix 4, loop 4",
        run.dimension()
    ))
}

fn automaton() -> Outcome {
    let sig = Signature::parse("xorset S: s_a s_b s_t s_w").unwrap();
    let base = "(exists x. s_t(x)) \
        & always (forall x. s_t(x) -> next (s_t(x) | s_a(x))) \
        & always (forall x. s_b(x) -> next s_t(x)) \
        & always (forall x. s_a(x) -> next s_w(x)) \
        & always (forall x. s_w(x) -> next (s_w(x) | s_b(x)))";
    let more = format!(
        "{base} & always (forall x. s_w(x) -> next ~s_w(x)) & always (forall x. sometime s_b(x))"
    );
    let bounds = OracleBounds {
        max_domain: 1,
        max_prefix: 2,
        max_loop: 4,
    };
    for text in [base, more.as_str()] {
        let f = parse_formula(text, &sig).map_err(|e| e.to_string())?;
        let v = formula_satisfiability(&f, &sig, &OPTS).map_err(|e| e.to_string())?;
        if !v.satisfiable {
            return Err(format!("`{text}` refuted"));
        }
        if !matches!(
            bounded_model_oracle(&f, &sig, bounds),
            Ok(OracleResult::Model(_))
        ) {
            return Err(format!("no bounded model of `{text}`"));
        }
    }
    Ok("both clause sets SAT, confirmed by bounded models".into())
}

#[test]
fn acceptance() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let results = [
        check(
            "colour count identity",
            Duration::from_secs(1),
            colour_identity,
        ),
        check("behaviour graph node bound", min(20), node_bound),
        check(
            "decision procedure agrees with the oracle",
            min(10),
            oracle_agreement,
        ),
        check("temporal dualities", Duration::from_secs(10), dualities),
        check(
            "normal form preserves satisfiability",
            min(5),
            dsnf_equisatisfiable,
        ),
        check(
            "simulated runs satisfy the run conditions",
            Duration::from_secs(30),
            simulated_runs,
        ),
        check(
            "runs and models of the translation correspond",
            min(10),
            faithfulness,
        ),
        check("FloodSet liveness verification", min(15), end_to_end),
        check("automaton clause sets", min(1), automaton),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    assert_eq!(failed, 0, "{failed} acceptance checks failed");
}
