//! Translation of broadcast protocols into the logic.
//!
//! Every element of the domain stands for one copy of the automaton. Its
//! local state and its current action are members of two XOR sets, each
//! broadcast message `a` has a proposition `m_a` recording that it is in
//! transit and a unary predicate `Received_a` for the bookkeeping of who has
//! reacted to it.

mod bridge;
mod task;

use std::fmt;

use crate::error::{Error, Result};
use crate::logic::signature::{is_identifier, KEYWORDS};
use crate::logic::{Formula, Signature};
use crate::normal_form::{to_dsnf, TemporalProblem};
use crate::protocol::{validate_protocol, Action, Protocol, Severity};

pub use bridge::{model_to_run, run_to_model};
pub use task::{verify, VerificationTask, VerifyReport};

pub const STATE_SET: &str = "states";
pub const ACTION_SET: &str = "actions";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delivery {
    /// Every broadcast is eventually received by every machine.
    #[default]
    Guaranteed,
    /// Every machine receives a broadcast within the given number of steps.
    Bound(usize),
    /// After every broadcast, a moment comes when all machines have reacted to it.
    Finite,
}

impl std::str::FromStr for Delivery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Delivery> {
        match s {
            "guaranteed" => Ok(Delivery::Guaranteed),
            "finite" => Ok(Delivery::Finite),
            _ => match s.strip_prefix("bound:").map(str::parse) {
                Some(Ok(n)) if n >= 1 => Ok(Delivery::Bound(n)),
                _ => Err(Error::Translation(format!(
                    "unknown delivery `{s}`; expected guaranteed, bound:N with N >= 1, or finite"
                ))),
            },
        }
    }
}

impl fmt::Display for Delivery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delivery::Guaranteed => write!(f, "guaranteed"),
            Delivery::Bound(n) => write!(f, "bound:{n}"),
            Delivery::Finite => write!(f, "finite"),
        }
    }
}

/// How `Received_a` is maintained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Bookkeeping {
    /// `Received_a(x)`: `x` has reacted to `a` since its latest broadcast;
    /// `m_a` is updated by the environment law of the machine.
    #[default]
    RunFaithful,
    /// The seven bookkeeping axioms taken literally, with the
    /// missing argument and parenthesis restored.
    AsPrinted,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TranslationOptions {
    pub deterministic: bool,
    pub delivery: Delivery,
    pub bookkeeping: Bookkeeping,
    pub extra_axioms: Vec<Formula>,
}

impl TranslationOptions {
    pub fn validate(&self) -> Result<()> {
        if self.delivery == Delivery::Bound(0) {
            return Err(Error::Translation(
                "delivery bound must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A labelled conjunct of the translation, e.g. `II(o_1, ~0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub label: String,
    pub formula: Formula,
}

pub fn action_pred(a: &Action) -> String {
    match a {
        Action::Local(s) | Action::Broadcast(s) => format!("A_{s}"),
        Action::Receive(s) => format!("A_{s}_bar"),
        Action::Idle => "A_idle".into(),
    }
}

pub fn message_prop(a: &str) -> String {
    format!("m_{a}")
}

pub fn received_pred(a: &str) -> String {
    format!("Received_{a}")
}

fn check_protocol(p: &Protocol) -> Result<()> {
    if let Some(e) = validate_protocol(p)
        .into_iter()
        .find(|v| v.severity == Severity::Error)
    {
        return Err(Error::InvalidProtocol(e.message));
    }
    Ok(())
}

/// States as one XOR set, actions including idle as another, plus `m_a`
/// and `Received_a` for each broadcast message.
pub fn derive_signature(p: &Protocol) -> Result<Signature> {
    check_protocol(p)?;
    let mut actions: Vec<Action> = p.actions();
    actions.push(Action::Idle);
    let action_names: Vec<String> = actions.iter().map(action_pred).collect();
    let mut names: Vec<String> = p.states.clone();
    names.extend(action_names.iter().cloned());
    names.extend(p.broadcast.iter().map(|a| message_prop(a)));
    names.extend(p.broadcast.iter().map(|a| received_pred(a)));
    let mut seen = std::collections::BTreeSet::new();
    for n in &names {
        if !is_identifier(n) || KEYWORDS.contains(&n.as_str()) {
            return Err(Error::Translation(format!(
                "`{n}` cannot be used as a predicate name"
            )));
        }
        if !seen.insert(n) {
            return Err(Error::Translation(format!("name clash on `{n}`")));
        }
    }
    let mut sig = Signature::new();
    let states: Vec<&str> = p.states.iter().map(String::as_str).collect();
    sig.add_xor_set(STATE_SET, &states)?;
    let acts: Vec<&str> = action_names.iter().map(String::as_str).collect();
    sig.add_xor_set(ACTION_SET, &acts)?;
    for a in &p.broadcast {
        sig.add_pred(&message_prop(a), 0)?;
        sig.add_pred(&received_pred(a), 1)?;
    }
    Ok(sig)
}

const X: &str = "x";
const Y: &str = "y";

fn at(a: &Action, v: &str) -> Formula {
    Formula::unary(&action_pred(a), v)
}

fn sent(a: &str) -> Formula {
    Formula::exists(Y, at(&Action::Broadcast(a.into()), Y))
}

fn all_received(a: &str) -> Formula {
    Formula::forall(Y, Formula::unary(&received_pred(a), Y))
}

/// `always forall x. body`
fn everywhere(body: Formula) -> Formula {
    Formula::always(Formula::forall(X, body))
}

/// `next^k f`
fn next_n(k: usize, f: Formula) -> Formula {
    (0..k).fold(f, |g, _| Formula::next(g))
}

/// The conjuncts of the theory of `p`, in axiom order.
pub fn axioms(p: &Protocol, opts: &TranslationOptions) -> Result<Vec<Axiom>> {
    check_protocol(p)?;
    opts.validate()?;
    let mut out = Vec::new();
    let mut push = |label: String, formula: Formula| out.push(Axiom { label, formula });
    let state = |q: &str| Formula::unary(q, X);

    for q in &p.states {
        let mut acts: Vec<Formula> = p.enabled(q).iter().map(|a| at(a, X)).collect();
        acts.push(at(&Action::Idle, X));
        push(
            format!("I({q})"),
            everywhere(Formula::implies(state(q), Formula::disj(acts))),
        );
    }
    if opts.deterministic {
        for t in &p.transitions {
            push(
                format!("II({}, {}, {})", t.from, t.action, t.to),
                everywhere(Formula::implies(
                    Formula::and(state(&t.from), at(&t.action, X)),
                    Formula::next(state(&t.to)),
                )),
            );
        }
    } else {
        for q in &p.states {
            for a in p.actions() {
                let targets = p.targets(q, &a);
                push(
                    format!("II({q}, {a})"),
                    everywhere(Formula::implies(
                        Formula::and(state(q), at(&a, X)),
                        Formula::next(Formula::disj(targets.iter().map(|r| state(r)))),
                    )),
                );
            }
        }
    }
    for q in &p.states {
        push(
            format!("III({q})"),
            everywhere(Formula::implies(
                Formula::and(state(q), at(&Action::Idle, X)),
                Formula::next(state(q)),
            )),
        );
    }
    for a in &p.broadcast {
        push(
            format!("IV({a})"),
            Formula::implies(
                Formula::Start,
                Formula::not(Formula::prop(&message_prop(a))),
            ),
        );
    }
    push(
        "IV(initial)".into(),
        Formula::implies(
            Formula::Start,
            Formula::forall(X, Formula::disj(p.initial.iter().map(|q| state(q)))),
        ),
    );
    for a in &p.broadcast {
        let recv = || at(&Action::Receive(a.clone()), X);
        let delivery = match opts.delivery {
            Delivery::Guaranteed => Formula::forall(X, Formula::sometime(recv())),
            Delivery::Bound(n) => {
                Formula::forall(X, Formula::disj((1..=n).map(|k| next_n(k, recv()))))
            }
            Delivery::Finite => {
                Formula::sometime(Formula::forall(X, Formula::unary(&received_pred(a), X)))
            }
        };
        push(
            format!("V({a})"),
            Formula::always(Formula::implies(sent(a), delivery)),
        );
    }
    for a in &p.broadcast {
        push(
            format!("VI({a})"),
            everywhere(Formula::implies(
                at(&Action::Receive(a.clone()), X),
                Formula::or(Formula::prop(&message_prop(a)), sent(a)),
            )),
        );
    }
    for a in &p.broadcast {
        for (i, f) in bookkeeping(a, opts.bookkeeping).into_iter().enumerate() {
            push(format!("VII.{}({a})", i + 1), f);
        }
    }
    for (i, f) in opts.extra_axioms.iter().enumerate() {
        push(format!("extra({})", i + 1), f.clone());
    }
    Ok(out)
}

fn bookkeeping(a: &str, mode: Bookkeeping) -> Vec<Formula> {
    let rec = |v: &str| Formula::unary(&received_pred(a), v);
    let recv = |v: &str| at(&Action::Receive(a.into()), v);
    let m = || Formula::prop(&message_prop(a));
    let not = Formula::not;
    let init = Formula::implies(Formula::Start, Formula::forall(X, not(rec(X))));
    match mode {
        Bookkeeping::AsPrinted => {
            let open = || not(all_received(a));
            vec![
                init,
                everywhere(Formula::implies(
                    Formula::and(recv(X), open()),
                    Formula::next(rec(X)),
                )),
                everywhere(Formula::implies(
                    Formula::and(rec(X), open()),
                    Formula::next(rec(X)),
                )),
                everywhere(Formula::implies(
                    Formula::and(not(Formula::or(recv(X), rec(X))), open()),
                    Formula::next(not(rec(X))),
                )),
                Formula::always(Formula::implies(all_received(a), Formula::next(not(m())))),
                Formula::always(Formula::implies(
                    Formula::and(sent(a), open()),
                    Formula::next(m()),
                )),
                Formula::always(Formula::implies(
                    Formula::and(not(sent(a)), open()),
                    Formula::iff(m(), Formula::next(m())),
                )),
            ]
        }
        Bookkeeping::RunFaithful => {
            let delivered = Formula::or(
                Formula::and(sent(a), Formula::forall(Y, recv(Y))),
                Formula::and(
                    not(sent(a)),
                    Formula::forall(Y, Formula::or(rec(Y), recv(Y))),
                ),
            );
            vec![
                init,
                everywhere(Formula::implies(
                    sent(a),
                    Formula::iff(Formula::next(rec(X)), recv(X)),
                )),
                everywhere(Formula::implies(
                    not(sent(a)),
                    Formula::iff(Formula::next(rec(X)), Formula::or(rec(X), recv(X))),
                )),
                Formula::always(Formula::iff(
                    Formula::next(m()),
                    Formula::and(Formula::or(m(), sent(a)), not(delivered)),
                )),
            ]
        }
    }
}

/// The conjunction of the axioms over the derived signature.
pub fn theory(p: &Protocol, opts: &TranslationOptions) -> Result<(Formula, Signature)> {
    let sig = derive_signature(p)?;
    let ax = axioms(p, opts)?;
    let f = Formula::conj(ax.into_iter().map(|a| a.formula));
    f.check_against(&sig)?;
    Ok((f, sig))
}

/// The theory in clausal form; the problem carries the extended signature.
pub fn translate(p: &Protocol, opts: &TranslationOptions) -> Result<TemporalProblem> {
    let (f, sig) = theory(p, opts)?;
    to_dsnf(&f, &sig)
}

/// `always forall x. sometime ~A_idle(x)`: no machine stays idle forever.
pub fn fairness() -> Formula {
    everywhere(Formula::sometime(Formula::not(at(&Action::Idle, X))))
}
