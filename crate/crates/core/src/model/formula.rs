use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Baf, World};

/// Propositional formula over arguments. Leaves hold canonical argument
/// indices, resolved when the formula is built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Atom(usize),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn atom(baf: &Baf, name: &str) -> Result<Self> {
        Ok(Formula::Atom(baf.index_of(name)?))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(fs: impl IntoIterator<Item = Formula>) -> Self {
        Formula::And(fs.into_iter().collect())
    }

    pub fn or(fs: impl IntoIterator<Item = Formula>) -> Self {
        Formula::Or(fs.into_iter().collect())
    }

    /// Parses `!`/`~` (negation), `&` (conjunction), `|` (disjunction) and
    /// parentheses, with the usual precedence.
    pub fn parse(baf: &Baf, text: &str) -> Result<Self> {
        let mut p = Parser {
            baf,
            src: text,
            pos: 0,
        };
        let f = p.disjunction()?;
        p.skip_ws();
        if p.pos < text.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(f)
    }

    /// Truth of the formula in a world.
    pub fn eval(&self, w: World) -> bool {
        match self {
            Formula::Atom(a) => w.contains(*a),
            Formula::Not(f) => !f.eval(w),
            Formula::And(fs) => fs.iter().all(|f| f.eval(w)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(w)),
        }
    }

    /// Distinct argument indices occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<usize>) {
        match self {
            Formula::Atom(a) => {
                out.insert(*a);
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_atoms(out)),
        }
    }

    pub(crate) fn check_arity(&self, n: usize) -> Result<()> {
        match self.atoms().last() {
            Some(&a) if a >= n => Err(Error::IndexOutOfRange { index: a, len: n }),
            _ => Ok(()),
        }
    }

    pub fn display<'a>(&'a self, baf: &'a Baf) -> impl fmt::Display + 'a {
        FormulaDisplay { f: self, baf }
    }
}

/// Evaluates `f` in world `w`, rejecting leaves outside a framework of `n`
/// arguments.
pub fn eval_formula(w: World, f: &Formula, n: usize) -> Result<bool> {
    f.check_arity(n)?;
    Ok(f.eval(w))
}

struct FormulaDisplay<'a> {
    f: &'a Formula,
    baf: &'a Baf,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(f: &Formula, baf: &Baf, out: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
            let join = |fs: &[Formula], sep: &str, out: &mut fmt::Formatter<'_>| {
                if fs.is_empty() {
                    // Not parseable; only reachable through hand-built formulas.
                    return out.write_str(if sep == " & " { "true" } else { "false" });
                }
                if nested && fs.len() > 1 {
                    out.write_str("(")?;
                }
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        out.write_str(sep)?;
                    }
                    go(g, baf, out, true)?;
                }
                if nested && fs.len() > 1 {
                    out.write_str(")")?;
                }
                Ok(())
            };
            match f {
                Formula::Atom(a) => out.write_str(baf.name(*a)),
                Formula::Not(g) => {
                    out.write_str("!")?;
                    go(g, baf, out, true)
                }
                Formula::And(fs) => join(fs, " & ", out),
                Formula::Or(fs) => join(fs, " | ", out),
            }
        }
        go(self.f, self.baf, out, false)
    }
}

struct Parser<'a> {
    baf: &'a Baf,
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::FormulaSyntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conjunction()?];
        while self.eat('|') {
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while self.eat('&') {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat('!') || self.eat('~') {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat('(') {
            let f = self.disjunction()?;
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(f);
        }
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected an argument name"));
        }
        let name = &rest[..len];
        let atom = Formula::atom(self.baf, name)?;
        self.pos += len;
        Ok(atom)
    }
}
