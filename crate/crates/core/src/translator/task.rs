//! Verification tasks: is `(theory & assumptions) -> property` valid?

use std::path::Path;

use serde::Serialize;

use super::{derive_signature, fairness, model_to_run, theory, Delivery, TranslationOptions};
use crate::decision::{check_validity, DecisionOptions};
use crate::error::{Error, Result};
use crate::logic::{parse_formula, Formula, TemporalStructure};
use crate::protocol::{Protocol, Run};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationTask {
    pub protocol: Protocol,
    pub options: TranslationOptions,
    pub property: Formula,
    pub assumptions: Vec<Formula>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub countermodel: Option<TemporalStructure>,
    /// The run read off the countermodel, with its loop start.
    pub run: Option<(Run, usize)>,
    /// Why no run could be read off a countermodel.
    pub run_error: Option<String>,
}

impl VerificationTask {
    /// Parses a task file. Lines are `protocol: PATH` (relative to `base`),
    /// `property: FORMULA`, `assume: FORMULA` or `assume: fairness`, and
    /// `options: deterministic | delivery guaranteed|bound:N|finite | bookkeeping as-printed|run-faithful`.
    /// Formulas may only follow the protocol line.
    pub fn parse(text: &str, base: &Path) -> Result<VerificationTask> {
        let bad = |no: usize, m: String| Error::Translation(format!("task line {no}: {m}"));
        let mut protocol: Option<Protocol> = None;
        let mut options = TranslationOptions::default();
        let mut property = None;
        let mut assumptions = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| bad(no, "expected `key: value`".into()))?;
            let rest = rest.trim();
            let sig = || {
                protocol
                    .as_ref()
                    .ok_or_else(|| bad(no, "formulas must follow the protocol line".into()))
                    .and_then(derive_signature)
            };
            match key.trim() {
                "protocol" => {
                    let path = base.join(rest);
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| bad(no, format!("cannot read {}: {e}", path.display())))?;
                    protocol = Some(Protocol::parse(&text)?);
                }
                "property" => property = Some(parse_formula(rest, &sig()?)?),
                "assume" if rest == "fairness" => assumptions.push(fairness()),
                "assume" => assumptions.push(parse_formula(rest, &sig()?)?),
                "options" => {
                    let words: Vec<&str> = rest.split_whitespace().collect();
                    match words.as_slice() {
                        ["deterministic"] => options.deterministic = true,
                        ["delivery", d] => options.delivery = d.parse::<Delivery>()?,
                        ["bookkeeping", "as-printed"] => {
                            options.bookkeeping = super::Bookkeeping::AsPrinted
                        }
                        ["bookkeeping", "run-faithful"] => {
                            options.bookkeeping = super::Bookkeeping::RunFaithful
                        }
                        _ => return Err(bad(no, format!("unknown option `{rest}`"))),
                    }
                }
                other => return Err(bad(no, format!("unknown key `{other}`"))),
            }
        }
        Ok(VerificationTask {
            protocol: protocol
                .ok_or_else(|| Error::Translation("task names no protocol".into()))?,
            options,
            property: property.ok_or_else(|| Error::Translation("task has no property".into()))?,
            assumptions,
        })
    }

    /// `(theory & assumptions) -> property` over the derived signature.
    pub fn formula(&self) -> Result<Formula> {
        let (t, sig) = theory(&self.protocol, &self.options)?;
        for f in self.assumptions.iter().chain([&self.property]) {
            f.check_against(&sig)?;
            if !f.is_closed() {
                return Err(Error::NotClosed(f.to_string()));
            }
        }
        let lhs = Formula::conj(std::iter::once(t).chain(self.assumptions.iter().cloned()));
        Ok(Formula::implies(lhs, self.property.clone()))
    }
}

/// Decides the task; a countermodel is mapped back to a run of the protocol.
pub fn verify(task: &VerificationTask, opts: &DecisionOptions) -> Result<VerifyReport> {
    let f = task.formula()?;
    let sig = derive_signature(&task.protocol)?;
    let v = check_validity(&f, &sig, opts)?;
    let (run, run_error) = match &v.countermodel {
        Some(m) => match model_to_run(m, &task.protocol) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        },
        None => (None, None),
    };
    Ok(VerifyReport {
        valid: v.valid,
        countermodel: v.countermodel,
        run,
        run_error,
    })
}
