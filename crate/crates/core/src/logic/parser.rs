//! Recursive-descent parser for the ASCII formula syntax.
//!
//! Binding strength, tightest first: prefix operators (`~`, `next`, `always`,
//! `sometime`), then `U`/`W` (right associative), `&`, `|`, `->` (right
//! associative), `<->`. A quantifier `forall x.` or `exists x.` scopes as far
//! to the right as possible.

use crate::error::{Error, Result};
use crate::logic::formula::{Formula, Term};
use crate::logic::signature::Signature;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DArrow,
    Eof,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let simple = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            b'.' => Some(Tok::Dot),
            b'~' => Some(Tok::Tilde),
            b'&' => Some(Tok::Amp),
            b'|' => Some(Tok::Bar),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, start));
            i += 1;
            continue;
        }
        if text[i..].starts_with("->") {
            out.push((Tok::Arrow, start));
            i += 2;
            continue;
        }
        if text[i..].starts_with("<->") {
            out.push((Tok::DArrow, start));
            i += 3;
            continue;
        }
        if c.is_ascii_alphanumeric() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
            continue;
        }
        let ch = text[i..].chars().next().unwrap_or('?');
        return Err(Error::Parse {
            offset: start,
            message: format!("unexpected character `{ch}`"),
        });
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.binary_temporal()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.binary_temporal()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn binary_temporal(&mut self) -> Result<Formula> {
        let lhs = self.unary()?;
        if self.is_keyword("U") {
            self.bump();
            let rhs = self.binary_temporal()?;
            return Ok(Formula::until(lhs, rhs));
        }
        if self.is_keyword("W") {
            self.bump();
            let rhs = self.binary_temporal()?;
            return Ok(Formula::unless(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        if *self.peek() == Tok::Tilde {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        let word = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return self.primary(),
        };
        match word.as_str() {
            "next" => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            "always" => {
                self.bump();
                Ok(Formula::always(self.unary()?))
            }
            "sometime" => {
                self.bump();
                Ok(Formula::sometime(self.unary()?))
            }
            "forall" | "exists" => {
                self.bump();
                let var = match self.peek() {
                    Tok::Ident(v) if !crate::logic::signature::KEYWORDS.contains(&v.as_str()) => {
                        v.clone()
                    }
                    other => {
                        return self.error(format!("expected variable, found {}", describe(other)))
                    }
                };
                if self.sig.is_constant(&var) {
                    return self.error(format!("constant `{var}` cannot be quantified"));
                }
                self.bump();
                self.expect(Tok::Dot, "`.`")?;
                let body = self.iff()?;
                Ok(if word == "forall" {
                    Formula::forall(&var, body)
                } else {
                    Formula::exists(&var, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        let at = self.offset();
        match self.bump() {
            Tok::LParen => {
                let f = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) => match name.as_str() {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                "start" => Ok(Formula::Start),
                "U" | "W" | "next" | "always" | "sometime" | "forall" | "exists" => {
                    Err(Error::Parse {
                        offset: at,
                        message: format!("unexpected keyword `{name}`"),
                    })
                }
                _ => self.atom(name),
            },
            other => Err(Error::Parse {
                offset: at,
                message: format!("expected formula, found {}", describe(&other)),
            }),
        }
    }

    fn atom(&mut self, name: String) -> Result<Formula> {
        let arity = self
            .sig
            .arity(&name)
            .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            loop {
                match self.peek() {
                    Tok::Ident(t) if !crate::logic::signature::KEYWORDS.contains(&t.as_str()) => {
                        let t = t.clone();
                        args.push(if self.sig.is_constant(&t) {
                            Term::Const(t)
                        } else {
                            Term::Var(t)
                        });
                        self.bump();
                    }
                    other => {
                        return self.error(format!("expected term, found {}", describe(other)))
                    }
                }
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    other => {
                        return self
                            .error(format!("expected `,` or `)`, found {}", describe(other)))
                    }
                }
            }
        }
        if args.len() != arity {
            return Err(Error::ArityMismatch {
                symbol: name,
                expected: arity,
                found: args.len(),
            });
        }
        Ok(Formula::Atom(name, args))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Tilde => "`~`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::DArrow => "`<->`".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses a formula, resolving predicate, proposition and constant names against `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sig,
    };
    let f = p.iff()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::parse(
            "xorset a: P1 P2 P3\nxorset b: P4 P5 P6 P7 P8\npreds: p/0 q/0 Q/1\nconsts: c\n",
        )
        .unwrap()
    }

    #[test]
    fn quantifier_scope_extends_right() {
        let f = parse_formula(
            "forall x. (P1(x) | P2(x)) & (P4(x) | P7(x) | P8(x))",
            &sig(),
        )
        .unwrap();
        let expected = Formula::forall(
            "x",
            Formula::and(
                Formula::or(Formula::unary("P1", "x"), Formula::unary("P2", "x")),
                Formula::or(
                    Formula::or(Formula::unary("P4", "x"), Formula::unary("P7", "x")),
                    Formula::unary("P8", "x"),
                ),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn precedence_and_associativity() {
        let s = sig();
        let f = parse_formula("p -> q -> p", &s).unwrap();
        assert_eq!(
            f,
            Formula::implies(
                Formula::prop("p"),
                Formula::implies(Formula::prop("q"), Formula::prop("p"))
            )
        );
        let g = parse_formula("~p U q & p", &s).unwrap();
        assert_eq!(
            g,
            Formula::and(
                Formula::until(Formula::not(Formula::prop("p")), Formula::prop("q")),
                Formula::prop("p")
            )
        );
        let h = parse_formula("p | q <-> q | p", &s).unwrap();
        assert!(matches!(h, Formula::Iff(..)));
    }

    #[test]
    fn constants_are_resolved() {
        let f = parse_formula("Q(c) & exists y. Q(y)", &sig()).unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::ground("Q", "c"),
                Formula::exists("y", Formula::unary("Q", "y"))
            )
        );
    }

    #[test]
    fn error_offsets() {
        let mut s = Signature::new();
        s.add_pred("P", 1).unwrap();
        match parse_formula("P(x,", &s) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_formula("R(x)", &s),
            Err(Error::UnknownSymbol(_))
        ));
        assert!(matches!(
            parse_formula("P", &s),
            Err(Error::ArityMismatch { .. })
        ));
    }
}
