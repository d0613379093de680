use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Sat,
    Unsat,
    UsageError,
    SolverError,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "OK",
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::UsageError | Status::SolverError => "ERROR",
        }
    }

    /// 0 success, 1 unsatisfiable, 2 usage or parse error, 3 solver failure.
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok | Status::Sat => 0,
            Status::Unsat => 1,
            Status::UsageError => 2,
            Status::SolverError => 3,
        }
    }
}

/// Outcome of one command: text lines for the terminal, values for JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub status: Status,
    pub lines: Vec<String>,
    pub values: Map<String, Value>,
    pub diagnostics: Vec<String>,
}

impl Report {
    pub fn new(status: Status) -> Self {
        Report {
            status,
            lines: Vec::new(),
            values: Map::new(),
            diagnostics: Vec::new(),
        }
    }

    pub(crate) fn unsat(value: f64, note: Option<String>) -> Self {
        let mut r = Report::new(Status::Unsat);
        r.lines.push(format!("UNSAT value={value:.6}"));
        r.values.insert("satisfiable".into(), json!(false));
        r.values.insert("inconsistency_value".into(), json!(value));
        r.diagnostics.extend(note);
        r
    }

    pub(crate) fn usage(message: String) -> Self {
        let mut r = Report::new(Status::UsageError);
        r.diagnostics.push(message);
        r
    }

    pub(crate) fn solver(message: String) -> Self {
        let mut r = Report::new(Status::SolverError);
        r.diagnostics.push(message);
        r
    }

    pub fn exit_code(&self) -> u8 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "status": self.status.name(),
            "values": self.values,
            "diagnostics": self.diagnostics,
        })
    }
}
