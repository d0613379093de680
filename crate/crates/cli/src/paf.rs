//! The `.paf` problem format.
//!
//! One directive per line; `#` starts a comment and blank lines are ignored.
//!
//! ```text
//! arg A
//! arg B
//! att A B
//! sup B A
//! semantics COH FOU
//! constraint 1*A + 1*B <= 1
//! query both A & !B
//! ```
//!
//! Arguments must be declared with `arg` before any line refers to them.

use std::collections::BTreeSet;
use std::fmt;

use probarg::{
    compile_semantics, Baf, ConjunctiveQuery, ConstraintSet, RawConstraint, Relation,
    SemanticsFlag,
};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedQuery {
    pub name: String,
    pub query: ConjunctiveQuery,
}

/// A parsed problem: framework, semantics, user constraints and named queries.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub baf: Baf,
    pub semantics: Vec<SemanticsFlag>,
    pub constraints: Vec<RawConstraint>,
    pub queries: Vec<NamedQuery>,
}

impl ProblemFile {
    /// Semantic constraints followed by the user constraints.
    pub fn constraint_set(&self) -> ConstraintSet {
        let mut cs = compile_semantics(&self.baf, self.semantics.iter().copied());
        for c in &self.constraints {
            cs.add_raw(c).expect("constraints are resolved against this framework");
        }
        cs
    }

    pub fn query(&self, name: &str) -> Option<&ConjunctiveQuery> {
        self.queries.iter().find(|q| q.name == name).map(|q| &q.query)
    }
}

impl fmt::Display for ProblemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let baf = &self.baf;
        for a in baf.args() {
            writeln!(f, "arg {a}")?;
        }
        for (s, t) in baf.attacks() {
            writeln!(f, "att {} {}", baf.name(s), baf.name(t))?;
        }
        for (s, t) in baf.supports() {
            writeln!(f, "sup {} {}", baf.name(s), baf.name(t))?;
        }
        if !self.semantics.is_empty() {
            let flags: Vec<&str> = self.semantics.iter().map(|s| s.name()).collect();
            writeln!(f, "semantics {}", flags.join(" "))?;
        }
        for c in &self.constraints {
            write!(f, "constraint ")?;
            if c.terms().is_empty() {
                // No term survives merging; keep the line parseable.
                write!(f, "0*{}", baf.name(0))?;
            }
            for (i, &(a, coeff)) in c.terms().iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "{coeff:?}*{}", baf.name(a))?;
            }
            writeln!(f, " {} {:?}", c.relation().symbol(), c.bound())?;
        }
        for q in &self.queries {
            let lits: Vec<String> = q
                .query
                .literals()
                .iter()
                .map(|&(a, pos)| format!("{}{}", if pos { "" } else { "!" }, baf.name(a)))
                .collect();
            writeln!(f, "query {} {}", q.name, lits.join(" & "))?;
        }
        Ok(())
    }
}

struct PendingConstraint {
    line: usize,
    terms: Vec<(String, f64)>,
    relation: Relation,
    bound: f64,
}

struct PendingQuery {
    line: usize,
    name: String,
    literals: Vec<(String, bool)>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_number(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("malformed number `{s}`")),
    }
}

/// Splits `lhs (<=|=|>=) rhs`.
fn split_relation(body: &str) -> Result<(&str, Relation, &str), String> {
    for (i, c) in body.char_indices() {
        let (len, relation) = match c {
            '<' if body[i..].starts_with("<=") => (2, Relation::Le),
            '>' if body[i..].starts_with(">=") => (2, Relation::Ge),
            '=' => (1, Relation::Eq),
            '<' | '>' => return Err(format!("expected `{c}=`")),
            _ => continue,
        };
        return Ok((&body[..i], relation, &body[i + len..]));
    }
    Err("missing relation (<=, = or >=)".into())
}

/// Parses `<c>*<arg> [+ <c>*<arg>]...`. A `+` directly after an exponent
/// marker belongs to the number.
fn parse_terms(lhs: &str) -> Result<Vec<(String, f64)>, String> {
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, c) in lhs.char_indices() {
        if c != '+' {
            continue;
        }
        let seg = &lhs[start..i];
        let in_exponent = !seg.contains('*')
            && seg.ends_with(['e', 'E'])
            && seg[..seg.len() - 1].ends_with(|d: char| d.is_ascii_digit() || d == '.');
        if !in_exponent {
            parts.push(seg);
            start = i + 1;
        }
    }
    parts.push(&lhs[start..]);

    let mut terms = Vec::new();
    for part in parts {
        let part = part.trim();
        if part.is_empty() {
            return Err("empty term".into());
        }
        let (coeff, name) = part
            .split_once('*')
            .ok_or_else(|| format!("term `{part}` is not of the form <coefficient>*<argument>"))?;
        let coeff = parse_number(coeff.trim())
            .map_err(|_| format!("malformed coefficient `{}`", coeff.trim()))?;
        let name = name.trim();
        if !is_identifier(name) {
            return Err(format!("invalid argument name `{name}`"));
        }
        terms.push((name.to_string(), coeff));
    }
    Ok(terms)
}

fn parse_literals(text: &str) -> Result<Vec<(String, bool)>, String> {
    let mut lits = Vec::new();
    for part in text.split('&') {
        let part = part.trim();
        let (name, positive) = match part.strip_prefix('!') {
            Some(rest) => (rest.trim_start(), false),
            None => (part, true),
        };
        if !is_identifier(name) {
            return Err(format!("malformed literal `{part}`"));
        }
        lits.push((name.to_string(), positive));
    }
    Ok(lits)
}

fn known(declared: &BTreeSet<String>, name: &str, line: usize) -> Result<String, ParseError> {
    if declared.contains(name) {
        Ok(name.to_string())
    } else {
        Err(ParseError {
            line,
            message: format!("unknown argument `{name}`"),
        })
    }
}

/// Parses a `.paf` document.
pub fn parse(text: &str) -> Result<ProblemFile, ParseError> {
    let mut args: Vec<String> = Vec::new();
    let mut declared: BTreeSet<String> = BTreeSet::new();
    let mut attacks = Vec::new();
    let mut supports = Vec::new();
    let mut semantics: Option<Vec<SemanticsFlag>> = None;
    let mut constraints = Vec::new();
    let mut queries: Vec<PendingQuery> = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let fail = |message: String| ParseError { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = match content.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (content, ""),
        };
        match keyword {
            "arg" => {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                let [name] = fields[..] else {
                    return Err(fail("expected `arg <name>`".into()));
                };
                if !is_identifier(name) {
                    return Err(fail(format!("invalid argument name `{name}`")));
                }
                if !declared.insert(name.to_string()) {
                    return Err(fail(format!("duplicate argument `{name}`")));
                }
                args.push(name.to_string());
            }
            "att" | "sup" => {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                let [s, t] = fields[..] else {
                    return Err(fail(format!("expected `{keyword} <source> <target>`")));
                };
                let edge = (known(&declared, s, line)?, known(&declared, t, line)?);
                if keyword == "att" {
                    attacks.push(edge);
                } else {
                    supports.push(edge);
                }
            }
            "semantics" => {
                if semantics.is_some() {
                    return Err(fail("more than one `semantics` line".into()));
                }
                let mut flags = Vec::new();
                for token in rest.split_whitespace() {
                    let flag: SemanticsFlag = token
                        .parse()
                        .map_err(|()| fail(format!("unknown semantics flag `{token}`")))?;
                    if !flags.contains(&flag) {
                        flags.push(flag);
                    }
                }
                if flags.is_empty() {
                    return Err(fail("expected at least one semantics flag".into()));
                }
                semantics = Some(flags);
            }
            "constraint" => {
                let (lhs, relation, rhs) = split_relation(rest).map_err(fail)?;
                let terms = parse_terms(lhs).map_err(fail)?;
                for (name, _) in &terms {
                    known(&declared, name, line)?;
                }
                let bound = parse_number(rhs.trim())
                    .map_err(|_| fail(format!("malformed bound `{}`", rhs.trim())))?;
                constraints.push(PendingConstraint {
                    line,
                    terms,
                    relation,
                    bound,
                });
            }
            "query" => {
                let (name, body) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| fail("expected `query <name> <literal> [& <literal>]...`".into()))?;
                if !is_identifier(name) {
                    return Err(fail(format!("invalid query name `{name}`")));
                }
                if queries.iter().any(|q| q.name == name) {
                    return Err(fail(format!("duplicate query `{name}`")));
                }
                let literals = parse_literals(body).map_err(fail)?;
                for (arg, _) in &literals {
                    known(&declared, arg, line)?;
                }
                queries.push(PendingQuery {
                    line,
                    name: name.to_string(),
                    literals,
                });
            }
            other => return Err(fail(format!("unknown directive `{other}`"))),
        }
    }

    let baf = Baf::new(
        &args,
        attacks.iter().map(|(s, t)| (s, t)),
        supports.iter().map(|(s, t)| (s, t)),
    )
    .expect("names and edges are validated line by line");
    let constraints = constraints
        .into_iter()
        .map(|c| {
            RawConstraint::from_names(&baf, &c.terms, c.relation, c.bound).map_err(|e| ParseError {
                line: c.line,
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let queries = queries
        .into_iter()
        .map(|q| {
            ConjunctiveQuery::from_names(&baf, q.literals)
                .map(|query| NamedQuery {
                    name: q.name,
                    query,
                })
                .map_err(|e| ParseError {
                    line: q.line,
                    message: e.to_string(),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProblemFile {
        baf,
        semantics: semantics.unwrap_or_default(),
        constraints,
        queries,
    })
}
