use std::collections::BTreeMap;
use std::path::Path;

use fotlx::decision::DecisionOptions;
use fotlx::protocol::{floodset, Action, GlobalConfiguration, Protocol, Run};
use fotlx::translator::{
    axioms, derive_signature, model_to_run, run_to_model, theory, translate, verify, Bookkeeping,
    Delivery, TranslationOptions, VerificationTask, ACTION_SET, STATE_SET,
};
use fotlx::Error;

fn member_count(sig: &fotlx::logic::Signature, set: &str) -> usize {
    sig.xor_sets
        .iter()
        .find(|s| s.name == set)
        .unwrap()
        .members
        .len()
}

#[test]
fn floodset_signature() {
    let sig = derive_signature(&floodset()).unwrap();
    assert_eq!(member_count(&sig, STATE_SET), 4);
    // Two broadcasts, two receives and idle.
    assert_eq!(member_count(&sig, ACTION_SET), 5);
    for name in ["m_0", "m_1"] {
        assert_eq!(sig.arity(name), Some(0));
    }
    for name in ["Received_0", "Received_1"] {
        assert_eq!(sig.arity(name), Some(1));
    }
}

#[test]
fn local_protocol_has_no_message_symbols() {
    let p = Protocol::parse("states: a b\ninitial: a\nlocal: go\ntrans: a go b\ntrans: b go a")
        .unwrap();
    let sig = derive_signature(&p).unwrap();
    assert!(sig.propositions().is_empty());
    assert!(!sig.preds.keys().any(|k| k.starts_with("Received")));
    assert_eq!(member_count(&sig, ACTION_SET), 2);
}

#[test]
fn clashing_names_are_rejected() {
    let p = Protocol::parse("states: A_go b\ninitial: b\nlocal: go\ntrans: b go A_go").unwrap();
    assert!(matches!(derive_signature(&p), Err(Error::Translation(m)) if m.contains("A_go")));
}

#[test]
fn axiom_counts() {
    let p = floodset();
    let labels = |opts: &TranslationOptions| {
        axioms(&p, opts)
            .unwrap()
            .into_iter()
            .map(|a| a.label)
            .collect::<Vec<_>>()
    };
    let default = labels(&TranslationOptions::default());
    let det = labels(&TranslationOptions {
        deterministic: true,
        ..Default::default()
    });
    let printed = labels(&TranslationOptions {
        bookkeeping: Bookkeeping::AsPrinted,
        ..Default::default()
    });
    let count = |ls: &[String], prefix: &str| ls.iter().filter(|l| l.starts_with(prefix)).count();
    // One II axiom per state and action, or one per transition.
    assert_eq!(count(&default, "II("), 4 * 4);
    assert_eq!(count(&det, "II("), floodset().transitions.len());
    assert_eq!(count(&default, "VII."), 2 * 4);
    assert_eq!(count(&printed, "VII."), 2 * 7);
    assert_eq!(count(&default, "I("), 4);
    assert_eq!(count(&default, "III("), 4);
    assert!(default.contains(&"II(o_1, ~0)".to_string()));
}

#[test]
fn theory_is_over_the_derived_signature() {
    for delivery in [Delivery::Guaranteed, Delivery::Bound(2), Delivery::Finite] {
        let opts = TranslationOptions {
            delivery,
            ..Default::default()
        };
        let (f, sig) = theory(&floodset(), &opts).unwrap();
        assert!(f.is_closed());
        assert!(f.is_monodic());
        assert_eq!(sig, derive_signature(&floodset()).unwrap());
        assert!(translate(&floodset(), &opts).is_ok());
    }
}

#[test]
fn delivery_parses() {
    assert_eq!(
        "guaranteed".parse::<Delivery>().unwrap(),
        Delivery::Guaranteed
    );
    assert_eq!("finite".parse::<Delivery>().unwrap(), Delivery::Finite);
    assert_eq!("bound:3".parse::<Delivery>().unwrap(), Delivery::Bound(3));
    for bad in ["bound:0", "bound:x", "eventually"] {
        assert!(bad.parse::<Delivery>().is_err(), "{bad}");
    }
    assert_eq!(Delivery::Bound(3).to_string(), "bound:3");
    let opts = TranslationOptions {
        delivery: Delivery::Bound(0),
        ..Default::default()
    };
    assert!(axioms(&floodset(), &opts).is_err());
}

fn write_protocol(dir: &Path) {
    std::fs::write(dir.join("floodset.protocol"), floodset().to_string()).unwrap();
}

#[test]
fn task_files_parse() {
    let dir = tempfile::tempdir().unwrap();
    write_protocol(dir.path());
    let text = "# agreement\nprotocol: floodset.protocol\noptions: delivery finite\noptions: deterministic\n\
                assume: fairness\nproperty: forall x. (i_0(x) -> sometime o_0(x))\n";
    let t = VerificationTask::parse(text, dir.path()).unwrap();
    assert_eq!(t.protocol, floodset());
    assert_eq!(t.options.delivery, Delivery::Finite);
    assert!(t.options.deterministic);
    assert_eq!(t.assumptions.len(), 1);
    assert!(t.formula().unwrap().is_closed());

    let bad = [
        "property: start",
        "protocol: floodset.protocol",
        "protocol: floodset.protocol\noptions: fast\nproperty: start",
        "protocol: missing.protocol\nproperty: start",
        "protocol: floodset.protocol\nproperty: nothing(x)",
        "protocol floodset.protocol",
    ];
    for text in bad {
        assert!(VerificationTask::parse(text, dir.path()).is_err(), "{text}");
    }
}

#[test]
fn open_properties_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write_protocol(dir.path());
    let t = VerificationTask::parse("protocol: floodset.protocol\nproperty: o_0(x)", dir.path())
        .unwrap();
    assert!(matches!(t.formula(), Err(Error::NotClosed(_))));
}

fn config(states: &[&str], actions: &[Action], env: &[&str]) -> GlobalConfiguration {
    GlobalConfiguration {
        states: states.iter().map(|s| s.to_string()).collect(),
        actions: actions.to_vec(),
        env: env.iter().map(|s| s.to_string()).collect(),
    }
}

/// One machine with input 1 broadcasts it, hears it back and idles forever.
fn single_run() -> Run {
    Run {
        configs: vec![
            config(&["i_1"], &[Action::Broadcast("1".into())], &[]),
            config(&["o_1"], &[Action::Receive("1".into())], &["1"]),
            config(&["o_1"], &[Action::Idle], &[]),
        ],
    }
}

#[test]
fn run_and_model_round_trip() {
    let p = floodset();
    let r = single_run();
    let m = run_to_model(&p, &r, 2).unwrap();
    assert_eq!(m.domain, vec!["c1".to_string()]);
    let (t, sig) = theory(&p, &TranslationOptions::default()).unwrap();
    assert!(m.xor_valid(&sig));
    assert!(m.evaluate(0, &BTreeMap::new(), &t).unwrap());
    let (back, start) = model_to_run(&m, &p).unwrap();
    let period = r.configs.len() - 2;
    assert_eq!(back.unroll(start, 10), r.unroll(2, 10));
    assert_eq!(back.configs.len() - start, period);
}

#[test]
fn invalid_runs_have_no_model() {
    let mut r = single_run();
    r.configs[2].actions[0] = Action::Receive("0".into());
    assert!(matches!(
        run_to_model(&floodset(), &r, 2),
        Err(Error::InvalidRun(_))
    ));
}

#[test]
fn received_tracks_reactions_since_the_broadcast() {
    let m = run_to_model(&floodset(), &single_run(), 2).unwrap();
    let rec = |t: usize| m.world(t).holds("Received_1", &[0]);
    assert!(!rec(0));
    assert!(!rec(1));
    assert!(rec(2));
    assert!(rec(3));
    assert!(!m.world(2).holds("m_1", &[]));
}

#[test]
fn machines_start_in_initial_states() {
    let dir = tempfile::tempdir().unwrap();
    write_protocol(dir.path());
    let text = "protocol: floodset.protocol\nproperty: forall x. (i_0(x) | i_1(x))\n";
    let t = VerificationTask::parse(text, dir.path()).unwrap();
    let r = verify(&t, &DecisionOptions { jobs: 2 }).unwrap();
    assert!(r.valid);
    assert!(r.run.is_none() && r.countermodel.is_none());
}
