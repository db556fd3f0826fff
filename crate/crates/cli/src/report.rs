use std::collections::BTreeMap;

use ltlab::padic::Elem;
use ltlab::LtError;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize)]
pub struct Claim {
    pub pass: bool,
    /// Digits of agreement or of remaining precision, as an exact rational.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved_precision: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
    /// Reported but not counted towards the exit status.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
}

impl Claim {
    pub fn new(pass: bool) -> Claim {
        Claim { pass, achieved_precision: None, detail: Value::Null, informational: false }
    }

    pub fn precision(mut self, p: impl ToString) -> Claim {
        self.achieved_precision = Some(p.to_string());
        self
    }

    pub fn detail(mut self, d: Value) -> Claim {
        self.detail = d;
        self
    }

    pub fn info(mut self) -> Claim {
        self.informational = true;
        self
    }
}

/// How a case ended when a computation raised an error.
#[derive(Clone, Debug, Serialize)]
pub struct CaseError {
    pub kind: String,
    pub message: String,
    #[serde(skip)]
    pub precision: bool,
}

impl From<&LtError> for CaseError {
    fn from(e: &LtError) -> Self {
        let kind = format!("{e:?}");
        let kind = kind.split(['(', ' ', '{']).next().unwrap_or("").to_string();
        CaseError { kind, message: e.to_string(), precision: e.is_precision() }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Case {
    /// Parameters of the case, for reproduction.
    pub params: BTreeMap<String, Value>,
    pub claims: BTreeMap<String, Claim>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<CaseError>,
    /// Computed values, kept in memory for precision comparisons.
    #[serde(skip)]
    pub outputs: Vec<(String, Elem)>,
}

impl Case {
    pub fn param(&mut self, k: &str, v: impl Serialize) {
        self.params.insert(k.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    pub fn claim(&mut self, id: &str, c: Claim) {
        self.claims.insert(id.to_string(), c);
    }

    pub fn output(&mut self, name: impl Into<String>, x: &Elem) {
        self.outputs.push((name.into(), x.clone()));
    }

    pub fn pass(&self) -> bool {
        self.error.is_none() && self.claims.values().all(|c| c.pass || c.informational)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub suite: String,
    pub config: Value,
    pub cases: BTreeMap<String, Case>,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CLAIM: i32 = 1;
pub const EXIT_PRECISION: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

impl Report {
    pub fn pass(&self) -> bool {
        self.cases.values().all(Case::pass)
    }

    /// Configuration errors first, then claim failures, then precision exhaustion.
    pub fn exit_code(&self) -> i32 {
        if self.cases.values().any(|c| c.error.as_ref().is_some_and(|e| e.kind == "Config")) {
            return EXIT_CONFIG;
        }
        let claim_failed = self.cases.values().any(|c| {
            c.claims.values().any(|cl| !cl.pass && !cl.informational) || c.error.as_ref().is_some_and(|e| !e.precision)
        });
        if claim_failed {
            EXIT_CLAIM
        } else if self.cases.values().any(|c| c.error.is_some()) {
            EXIT_PRECISION
        } else {
            EXIT_PASS
        }
    }

    pub fn merge(&mut self, prefix: &str, other: Report) {
        for (k, v) in other.cases {
            self.cases.insert(format!("{prefix}/{k}"), v);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per claim, failing ones marked.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for (name, case) in &self.cases {
            if let Some(e) = &case.error {
                out.push_str(&format!("ERROR {name}: {}: {}\n", e.kind, e.message));
            }
            for (id, c) in &case.claims {
                let tag = match (c.pass, c.informational) {
                    (_, true) => "INFO",
                    (true, _) => "PASS",
                    (false, _) => "FAIL",
                };
                let prec = c.achieved_precision.as_deref().map(|p| format!(" [{p}]")).unwrap_or_default();
                out.push_str(&format!("{tag} {name} {id}{prec}\n"));
            }
        }
        out
    }
}
