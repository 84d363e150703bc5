//! Pretty-printer producing text that parses back to the same tree.

use std::fmt;

use crate::logic::formula::{Formula, Term};

const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNTIL: u8 = 5;
const PREFIX: u8 = 6;
const ATOM: u8 = 7;

fn precedence(f: &Formula) -> u8 {
    use Formula::*;
    match f {
        Iff(..) => IFF,
        Implies(..) => IMPLIES,
        Or(..) => OR,
        And(..) => AND,
        Until(..) | Unless(..) => UNTIL,
        Not(_) | Next(_) | Always(_) | Sometime(_) => PREFIX,
        Forall(..) | Exists(..) => 0,
        True | False | Start | Atom(..) => ATOM,
    }
}

fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula, ctx: u8) -> fmt::Result {
    use Formula::*;
    let prec = precedence(f);
    let parens = prec < ctx;
    if parens {
        out.write_str("(")?;
    }
    match f {
        True => out.write_str("true")?,
        False => out.write_str("false")?,
        Start => out.write_str("start")?,
        Atom(p, args) => {
            out.write_str(p)?;
            if !args.is_empty() {
                out.write_str("(")?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        out.write_str(", ")?;
                    }
                    out.write_str(t.name())?;
                }
                out.write_str(")")?;
            }
        }
        Not(a) => {
            out.write_str("~")?;
            write_formula(out, a, PREFIX)?;
        }
        Next(a) | Always(a) | Sometime(a) => {
            let kw = match f {
                Next(_) => "next ",
                Always(_) => "always ",
                _ => "sometime ",
            };
            out.write_str(kw)?;
            write_formula(out, a, PREFIX)?;
        }
        Forall(v, a) | Exists(v, a) => {
            let kw = if matches!(f, Forall(..)) {
                "forall"
            } else {
                "exists"
            };
            write!(out, "{kw} {v}. ")?;
            write_formula(out, a, 0)?;
        }
        And(a, b) | Or(a, b) | Iff(a, b) => {
            let op = match f {
                And(..) => " & ",
                Or(..) => " | ",
                _ => " <-> ",
            };
            write_formula(out, a, prec)?;
            out.write_str(op)?;
            write_formula(out, b, prec + 1)?;
        }
        Implies(a, b) | Until(a, b) | Unless(a, b) => {
            let op = match f {
                Implies(..) => " -> ",
                Until(..) => " U ",
                _ => " W ",
            };
            write_formula(out, a, prec + 1)?;
            out.write_str(op)?;
            write_formula(out, b, prec)?;
        }
    }
    if parens {
        out.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use crate::logic::parser::parse_formula;
    use crate::logic::signature::Signature;

    #[test]
    fn prints_minimal_parentheses() {
        let sig = Signature::parse("preds: p/0 q/0 r/0 P/1").unwrap();
        for text in [
            "p -> q -> r",
            "(p -> q) -> r",
            "p & q | r",
            "p & (q | r)",
            "~(forall x. P(x)) | q",
            "always (p U q W r)",
            "(p U q) W r",
            "forall x. P(x) -> next P(x)",
            "sometime ~P(x) <-> start",
        ] {
            let f = parse_formula(text, &sig).unwrap();
            assert_eq!(f.to_string(), text);
        }
    }
}
