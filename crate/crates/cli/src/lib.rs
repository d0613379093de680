//! Command-line front end for the `probarg` reasoner: the `.paf` problem
//! format and the subcommands built on it.

pub mod paf;
mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use probarg::oracle::{world_lp_entail_with, world_lp_sat_with, world_maxent_with};
use probarg::{
    check_sat, conditional_query, conjunctive_query, entail, entail_all, exclusive_dnf_query,
    maxent_labelling, Baf, ConjunctiveQuery, Error, Formula, Labelling, OracleConfig,
    DEFAULT_DNF_LIMIT,
};
use serde_json::{json, Map, Value};

pub use report::{Report, Status};

use paf::ProblemFile;

#[derive(Debug, Parser)]
#[command(name = "probarg", version, about = "Probabilistic reasoning over bipolar argumentation frameworks")]
pub struct Cli {
    /// Print a single JSON object {status, values, diagnostics}.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide satisfiability; prints the inconsistency value and a witness.
    Sat { file: PathBuf },
    /// Bounds on the probability of one argument.
    Entail { file: PathBuf, arg: String },
    /// Bounds on the probability of every argument.
    EntailAll { file: PathBuf },
    /// The maximum-entropy labelling.
    Maxent { file: PathBuf },
    /// Probability of a conjunctive query under the maximum-entropy labelling.
    Query {
        file: PathBuf,
        /// Name of a query in the file, or literals such as "A & !B".
        query: String,
        /// Condition on a conjunction of accepted arguments.
        #[arg(long, conflicts_with = "dnf")]
        condition: Option<String>,
        /// Read the query as a general formula, expanded into exclusive
        /// conjunctions.
        #[arg(long)]
        dnf: bool,
    },
    /// Brute-force counterparts over all possible worlds.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    Sat {
        file: PathBuf,
        #[command(flatten)]
        limit: Limit,
    },
    /// Bounds on the probability of a formula.
    Entail {
        file: PathBuf,
        formula: String,
        #[command(flatten)]
        limit: Limit,
    },
    Maxent {
        file: PathBuf,
        #[command(flatten)]
        limit: Limit,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Limit {
    /// Refuse frameworks with more arguments than this.
    #[arg(long, default_value_t = 16)]
    pub max_args: usize,
}

impl Limit {
    fn config(self) -> OracleConfig {
        OracleConfig {
            lp_limit: self.max_args,
            maxent_limit: self.max_args,
            ..OracleConfig::default()
        }
    }
}

/// Runs a command and reports its outcome.
pub fn run(command: &Command) -> Report {
    execute(command).unwrap_or_else(|report| report)
}

type Outcome = Result<Report, Report>;

fn load(path: &Path) -> Result<ProblemFile, Report> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Report::usage(format!("{}: {e}", path.display())))?;
    paf::parse(&text).map_err(|e| Report::usage(format!("{}: {e}", path.display())))
}

/// Maps an engine error to a report.
fn failure(e: Error) -> Report {
    match e {
        Error::Unsatisfiable { value } => Report::unsat(value, None),
        Error::ConditionInconsistent { value } => Report::unsat(
            value,
            Some("the condition is inconsistent with the constraints".into()),
        ),
        Error::UnknownArgument(_)
        | Error::InvalidName(_)
        | Error::DuplicateLiteral(_)
        | Error::InvalidQuery(_)
        | Error::FormulaSyntax { .. }
        | Error::TooManyArguments { .. } => Report::usage(e.to_string()),
        other => Report::solver(other.to_string()),
    }
}

fn labelling_values(baf: &Baf, l: &Labelling) -> Value {
    let map: Map<String, Value> = baf
        .args()
        .iter()
        .zip(l.values())
        .map(|(a, &v)| (a.to_string(), json!(v)))
        .collect();
    Value::Object(map)
}

fn labelling_lines(baf: &Baf, l: &Labelling) -> Vec<String> {
    let width = name_width(baf.args().iter().map(|a| a.as_str()));
    baf.args()
        .iter()
        .zip(l.values())
        .map(|(a, v)| format!("{:<width$} {v:.6}", format!("{a}:")))
        .collect()
}

fn name_width<'a>(names: impl Iterator<Item = &'a str>) -> usize {
    names.map(|n| n.len() + 1).max().unwrap_or(0)
}

fn bounds_report(rows: Vec<(String, f64, f64)>) -> Report {
    let width = name_width(rows.iter().map(|r| r.0.as_str()));
    let mut report = Report::new(Status::Ok);
    let mut bounds = Map::new();
    for (name, lo, hi) in rows {
        report
            .lines
            .push(format!("{:<width$} [{lo:.6}, {hi:.6}]", format!("{name}:")));
        bounds.insert(name, json!({ "lower": lo, "upper": hi }));
    }
    report.values.insert("bounds".into(), Value::Object(bounds));
    report
}

fn sat_report(baf: &Baf, satisfiable: bool, value: f64, witness: Option<&Labelling>) -> Report {
    if !satisfiable {
        return Report::unsat(value, None);
    }
    let mut report = Report::new(Status::Sat);
    report.lines.push(format!("SAT value={value:.6}"));
    report.values.insert("satisfiable".into(), json!(true));
    report.values.insert("inconsistency_value".into(), json!(value));
    if let Some(w) = witness {
        report.lines.extend(labelling_lines(baf, w));
        report.values.insert("witness".into(), labelling_values(baf, w));
    }
    report
}

fn resolve_query(problem: &ProblemFile, text: &str) -> Result<ConjunctiveQuery, Report> {
    match problem.query(text) {
        Some(q) => Ok(q.clone()),
        None => ConjunctiveQuery::parse(&problem.baf, text).map_err(failure),
    }
}

fn execute(command: &Command) -> Outcome {
    match command {
        Command::Sat { file } => {
            let p = load(file)?;
            let r = check_sat(&p.constraint_set(), &p.baf).map_err(failure)?;
            Ok(sat_report(&p.baf, r.satisfiable, r.inconsistency_value, r.witness.as_ref()))
        }
        Command::Entail { file, arg } => {
            let p = load(file)?;
            let b = entail(&p.constraint_set(), &p.baf, arg).map_err(failure)?;
            Ok(bounds_report(vec![(arg.clone(), b.lower, b.upper)]))
        }
        Command::EntailAll { file } => {
            let p = load(file)?;
            let all = entail_all(&p.constraint_set(), &p.baf).map_err(failure)?;
            Ok(bounds_report(
                all.into_iter().map(|(a, b)| (a.to_string(), b.lower, b.upper)).collect(),
            ))
        }
        Command::Maxent { file } => {
            let p = load(file)?;
            let m = maxent_labelling(&p.constraint_set(), &p.baf).map_err(failure)?;
            let mut report = Report::new(Status::Ok);
            report.lines.extend(labelling_lines(&p.baf, &m.labelling));
            report.lines.push(format!("entropy={:.6}", m.entropy));
            report.values.insert("labelling".into(), labelling_values(&p.baf, &m.labelling));
            report.values.insert("entropy".into(), json!(m.entropy));
            report.values.insert("iterations".into(), json!(m.iterations));
            report.values.insert("gap".into(), json!(m.gap));
            Ok(report)
        }
        Command::Query {
            file,
            query,
            condition,
            dnf,
        } => {
            let p = load(file)?;
            let cs = p.constraint_set();
            let (shown, probability) = if *dnf {
                let f = match p.query(query) {
                    Some(q) => q.to_formula(),
                    None => Formula::parse(&p.baf, query).map_err(failure)?,
                };
                let m = maxent_labelling(&cs, &p.baf).map_err(failure)?;
                let v = exclusive_dnf_query(&m.labelling, &f, DEFAULT_DNF_LIMIT).map_err(failure)?;
                let shown = f.display(&p.baf).to_string();
                (shown, v)
            } else {
                let target = resolve_query(&p, query)?;
                let shown = target.display(&p.baf).to_string();
                match condition {
                    Some(c) => {
                        let given = resolve_query(&p, c)?;
                        let v = conditional_query(&cs, &p.baf, &given, &target).map_err(failure)?;
                        (format!("{shown} | {}", given.display(&p.baf)), v)
                    }
                    None => {
                        let m = maxent_labelling(&cs, &p.baf).map_err(failure)?;
                        (shown, conjunctive_query(&m.labelling, &target).map_err(failure)?)
                    }
                }
            };
            let mut report = Report::new(Status::Ok);
            report.lines.push(format!("P({shown}) = {probability:.6}"));
            report.values.insert("query".into(), json!(shown));
            report.values.insert("probability".into(), json!(probability));
            Ok(report)
        }
        Command::Oracle(OracleCommand::Sat { file, limit }) => {
            let p = load(file)?;
            let r = world_lp_sat_with(&p.constraint_set(), &p.baf, &limit.config()).map_err(failure)?;
            Ok(sat_report(&p.baf, r.satisfiable, r.inconsistency_value, r.witness.as_ref()))
        }
        Command::Oracle(OracleCommand::Entail {
            file,
            formula,
            limit,
        }) => {
            let p = load(file)?;
            let f = Formula::parse(&p.baf, formula).map_err(failure)?;
            let b = world_lp_entail_with(&p.constraint_set(), &p.baf, &f, &limit.config())
                .map_err(failure)?;
            let shown = f.display(&p.baf).to_string();
            Ok(bounds_report(vec![(shown, b.lower, b.upper)]))
        }
        Command::Oracle(OracleCommand::Maxent { file, limit }) => {
            let p = load(file)?;
            let d = world_maxent_with(&p.constraint_set(), &p.baf, &limit.config()).map_err(failure)?;
            let l = d.labelling();
            let entropy = probarg::info::entropy_distribution(&d);
            let mut report = Report::new(Status::Ok);
            report.lines.extend(labelling_lines(&p.baf, &l));
            report.lines.push(format!("entropy={entropy:.6}"));
            report.values.insert("labelling".into(), labelling_values(&p.baf, &l));
            report.values.insert("entropy".into(), json!(entropy));
            Ok(report)
        }
    }
}
