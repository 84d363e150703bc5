//! Signatures: XOR predicate sets, ordinary predicates, propositions and constants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Words the formula parser treats as operators; they cannot name symbols.
pub const KEYWORDS: &[&str] = &[
    "true", "false", "start", "next", "always", "sometime", "forall", "exists", "U", "W",
];

/// A named set of unary predicates of which exactly one holds per element at every moment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XorSet {
    pub name: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub xor_sets: Vec<XorSet>,
    /// Predicates outside every XOR set, with their arity. Arity zero marks a proposition.
    pub preds: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_new_name(&self, name: &str) -> Result<()> {
        if !is_identifier(name) {
            return Err(Error::Signature(format!("`{name}` is not an identifier")));
        }
        if KEYWORDS.contains(&name) {
            return Err(Error::Signature(format!("`{name}` is a reserved word")));
        }
        if self.contains(name) {
            return Err(Error::Signature(format!("`{name}` is declared twice")));
        }
        Ok(())
    }

    pub fn add_xor_set(&mut self, name: &str, members: &[&str]) -> Result<()> {
        if members.is_empty() {
            return Err(Error::Signature(format!("XOR set `{name}` is empty")));
        }
        if self.xor_sets.iter().any(|x| x.name == name) {
            return Err(Error::Signature(format!(
                "XOR set `{name}` is declared twice"
            )));
        }
        let mut seen = BTreeSet::new();
        for m in members {
            self.check_new_name(m)?;
            if !seen.insert(*m) {
                return Err(Error::Signature(format!("`{m}` is declared twice")));
            }
        }
        self.xor_sets.push(XorSet {
            name: name.to_string(),
            members: members.iter().map(|m| m.to_string()).collect(),
        });
        Ok(())
    }

    pub fn add_pred(&mut self, name: &str, arity: usize) -> Result<()> {
        self.check_new_name(name)?;
        self.preds.insert(name.to_string(), arity);
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str) -> Result<()> {
        self.check_new_name(name)?;
        self.constants.insert(name.to_string());
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arity(name).is_some() || self.constants.contains(name)
    }

    /// Arity of a predicate or proposition; XOR members are unary.
    pub fn arity(&self, name: &str) -> Option<usize> {
        if self.xor_set_of(name).is_some() {
            return Some(1);
        }
        self.preds.get(name).copied()
    }

    pub fn xor_set_of(&self, name: &str) -> Option<usize> {
        self.xor_sets
            .iter()
            .position(|x| x.members.iter().any(|m| m == name))
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.constants.contains(name)
    }

    pub fn is_proposition(&self, name: &str) -> bool {
        self.preds.get(name) == Some(&0)
    }

    /// Unary predicates in colour order: XOR members set by set, then the rest by name.
    pub fn unary_predicates(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .xor_sets
            .iter()
            .flat_map(|x| x.members.iter().map(String::as_str))
            .collect();
        out.extend(self.non_xor_unary());
        out
    }

    pub fn non_xor_unary(&self) -> impl Iterator<Item = &str> {
        self.preds
            .iter()
            .filter(|(_, a)| **a == 1)
            .map(|(n, _)| n.as_str())
    }

    pub fn propositions(&self) -> Vec<&str> {
        self.preds
            .iter()
            .filter(|(_, a)| **a == 0)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    /// A name starting with `base` that is not yet used and is not a keyword.
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.contains(base) && !KEYWORDS.contains(&base) && is_identifier(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !self.contains(n))
            .expect("unbounded name supply")
    }

    /// Parses the line format `xorset NAME: p q`, `preds: r/1 s/0`, `consts: c d`.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sig = Signature::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let start = offset;
            offset += line.len();
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |m: String| Error::Parse {
                offset: start,
                message: m,
            };
            let (head, rest) = content
                .split_once(':')
                .ok_or_else(|| err(format!("expected `:` in `{content}`")))?;
            let words: Vec<&str> = rest.split_whitespace().collect();
            let head_words: Vec<&str> = head.split_whitespace().collect();
            match head_words.as_slice() {
                ["xorset", name] => sig.add_xor_set(name, &words)?,
                ["preds"] => {
                    for w in words {
                        let (name, arity) = w
                            .split_once('/')
                            .ok_or_else(|| err(format!("expected NAME/ARITY, found `{w}`")))?;
                        let arity: usize = arity
                            .parse()
                            .map_err(|_| err(format!("bad arity in `{w}`")))?;
                        sig.add_pred(name, arity)?;
                    }
                }
                ["consts"] => {
                    for w in words {
                        sig.add_constant(w)?;
                    }
                }
                _ => return Err(err(format!("unknown declaration `{head}`"))),
            }
        }
        Ok(sig)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.xor_sets {
            writeln!(f, "xorset {}: {}", x.name, x.members.join(" "))?;
        }
        if !self.preds.is_empty() {
            let items: Vec<String> = self.preds.iter().map(|(n, a)| format!("{n}/{a}")).collect();
            writeln!(f, "preds: {}", items.join(" "))?;
        }
        if !self.constants.is_empty() {
            let items: Vec<&str> = self.constants.iter().map(String::as_str).collect();
            writeln!(f, "consts: {}", items.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        let text = "xorset s: s_a s_b s_t s_w\npreds: p/0 q/1\nconsts: c\n";
        let sig = Signature::parse(text).unwrap();
        assert_eq!(sig.to_string(), text);
        assert_eq!(sig.arity("s_b"), Some(1));
        assert_eq!(sig.xor_set_of("s_w"), Some(0));
        assert!(sig.is_proposition("p"));
        assert_eq!(
            sig.unary_predicates(),
            vec!["s_a", "s_b", "s_t", "s_w", "q"]
        );
    }

    #[test]
    fn rejects_duplicates_and_empty_sets() {
        assert!(Signature::parse("xorset a: p q\npreds: p/1").is_err());
        assert!(Signature::parse("xorset a:").is_err());
        assert!(Signature::parse("preds: next/1").is_err());
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let mut sig = Signature::new();
        sig.add_pred("w", 1).unwrap();
        sig.add_pred("w_1", 1).unwrap();
        assert_eq!(sig.fresh_name("w"), "w_2");
        assert_eq!(sig.fresh_name("v"), "v");
        assert_eq!(sig.fresh_name("U"), "U_1");
    }
}
