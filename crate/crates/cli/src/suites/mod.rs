//! Certification suites. Each runs a list of cases; a failing computation is
//! recorded on its case and never aborts the suite.

mod boundary;
mod thm1;
mod witt;

use ltlab::formal_group::LubinTate;
use ltlab::padic::{make_context, Context};
use ltlab::tower::{build_tower, Tower};
use ltlab::{LtError, Result};
use serde::Serialize;

use crate::config::{PiPrime, PolySpec, RunConfig, CHECKS};
use crate::report::{Case, CaseError, Report};

pub use boundary::{prop2, prop3, thm4};
pub use thm1::thm1;
pub use witt::witt_axioms;

pub const SUITES: &[&str] = &["thm1", "prop2", "prop3", "thm4", "witt_axioms", "all"];

/// Base field `K` of a case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Field {
    pub p: u64,
    pub f: u32,
    pub eis: Option<Vec<Vec<i64>>>,
}

impl Field {
    pub fn qp(p: u64) -> Field {
        Field { p, f: 1, eis: None }
    }

    pub fn of(cfg: &RunConfig) -> Field {
        Field { p: cfg.p, f: cfg.f, eis: cfg.eis.clone() }
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }

    pub fn label(&self) -> String {
        let mut s = format!("p={}", self.p);
        if self.f > 1 {
            s.push_str(&format!(",f={}", self.f));
        }
        if let Some(e) = &self.eis {
            s.push_str(&format!(",eis={}", eisenstein_label(e)));
        }
        s
    }

    pub fn context(&self, n: u32) -> Result<Context> {
        make_context(self.p, self.f, self.eis.clone(), n)
    }
}

fn eisenstein_label(e: &[Vec<i64>]) -> String {
    format!("{e:?}").replace(' ', "")
}

/// Everything a tower computation needs: `K`, `F_P` to degree `d`, and the
/// level-`n` tower of `Q` over `pi'`.
pub struct Setup {
    pub ctx: Context,
    pub lt: LubinTate,
    pub tower: Tower,
}

pub struct SetupSpec<'a> {
    pub field: &'a Field,
    pub prec: u32,
    pub p_poly: &'a PolySpec,
    pub q_poly: &'a PolySpec,
    pub pi_prime: &'a PiPrime,
    pub level: usize,
    pub d: usize,
}

impl SetupSpec<'_> {
    pub fn build(&self) -> Result<Setup> {
        let ctx = self.field.context(self.prec)?;
        let pi = ctx.pi().clone();
        let lt = LubinTate::from_polynomial(&ctx, &pi, self.p_poly.coefficients(&ctx, &pi)?, self.d)?;
        let pi_prime = self.pi_prime.element(&ctx);
        let q = self.q_poly.coefficients(&ctx, &pi_prime)?;
        let tower = build_tower(&ctx, &q, &pi_prime, self.level)?;
        Ok(Setup { ctx, lt, tower })
    }

    pub fn record(&self, case: &mut Case) {
        case.param("field", self.field);
        case.param("N", self.prec);
        case.param("D", self.d);
        case.param("n", self.level);
        case.param("P", self.p_poly.to_string());
        case.param("Q", self.q_poly.to_string());
        case.param("pi_prime", self.pi_prime.to_string());
    }
}

/// Runs `body` on a fresh case, recording an error instead of propagating it.
pub(crate) fn run_case(params: impl FnOnce(&mut Case), body: impl FnOnce(&mut Case) -> Result<()>) -> Case {
    let mut case = Case::default();
    params(&mut case);
    if let Err(e) = body(&mut case) {
        case.error = Some(CaseError::from(&e));
    }
    case
}

/// The configuration as echoed in reports; the output path is left out so
/// that reports do not depend on where they are written.
pub fn config_json(cfg: &RunConfig) -> serde_json::Value {
    let mut v = serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null);
    if let Some(m) = v.as_object_mut() {
        m.remove("out");
    }
    v
}

/// Runs one suite. Only configuration problems are returned as errors.
pub fn run_suite(cfg: &RunConfig, suite: &str) -> Result<Report> {
    cfg.validate()?;
    let mut report = match suite {
        "thm1" => thm1(cfg),
        "prop2" => prop2(cfg),
        "prop3" => prop3(cfg),
        "thm4" => thm4(cfg),
        "witt_axioms" => witt_axioms(cfg),
        "all" => {
            let mut all = Report::default();
            for s in CHECKS.iter().filter(|s| cfg.checks.iter().any(|c| c == *s)) {
                all.merge(s, run_suite(cfg, s)?);
            }
            all
        }
        other => return Err(LtError::Config(format!("unknown suite {other:?}; expected one of {SUITES:?}"))),
    };
    report.suite = suite.to_string();
    report.config = config_json(cfg);
    Ok(report)
}
