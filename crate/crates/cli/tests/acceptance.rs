//! Acceptance run: one line per criterion. Runs without the libtest harness so
//! the lines are always shown; exits nonzero on any unexpected outcome.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::{exp_minus_one, log_one_plus, dwork_oracle, rat_to_elem};
use ltlab::exponentials::{curly_e, exp_radius_check};
use ltlab::formal_group::{lt_polynomial, LtPreset, LubinTate};
use ltlab::padic::{make_context, Elem};
use ltlab::series::PowerSeries;
use ltlab::tower::build_tower;
use ltlab_cli::config::{auto_precision, RunConfig};
use ltlab_cli::{run_suite, Report};
use num_rational::{BigRational, Ratio};

/// Extra digits for the precision-soundness rerun.
const EXTRA: u32 = 10;
/// Minimum agreement with the closed-form exponential, in pi-digits.
const DWORK_DIGITS: i64 = 15;
const D_MULT: usize = 100;
const N_MULT: u32 = 40;
const D_DWORK: usize = 100;

struct Line {
    id: u32,
    title: &'static str,
    pass: bool,
    note: String,
    secs: f64,
    budget: Option<f64>,
}

impl Line {
    fn print(&self) {
        let time = match self.budget {
            Some(b) => format!("{:.1} s of {b:.0} s", self.secs),
            None => format!("{:.1} s", self.secs),
        };
        println!(
            "criterion {} {:<30} {}  ({}; {time})",
            self.id,
            self.title,
            if self.pass { "PASS" } else { "FAIL" },
            self.note
        );
    }

    fn within_budget(&self) -> bool {
        self.budget.is_none_or(|b| self.secs <= b)
    }
}

fn series_of(ring: &std::sync::Arc<ltlab::padic::Ring>, c: &[BigRational]) -> PowerSeries {
    PowerSeries::new(ring, c.iter().map(|x| rat_to_elem(ring, x)).collect(), c.len() - 1)
}

/// Failing claims and case errors, as `case: claim`.
fn failures(r: &Report) -> Vec<String> {
    let mut out = Vec::new();
    for (name, case) in &r.cases {
        if let Some(e) = &case.error {
            out.push(format!("{name}: {} ({})", e.kind, e.message));
        }
        for (id, c) in &case.claims {
            if !c.pass && !c.informational {
                out.push(format!("{name}: {id}"));
            }
        }
    }
    out
}

fn claim_count(r: &Report) -> usize {
    r.cases.values().map(|c| c.claims.values().filter(|c| !c.informational).count()).sum()
}

fn multiplicative() -> (bool, String, LubinTate) {
    let k = make_context(3, 1, None, N_MULT).unwrap();
    let lt = LubinTate::from_preset(&k, k.pi(), &LtPreset::Multiplicative, D_MULT).unwrap();
    let f = lt.formal_group(D_MULT).unwrap();
    let mut fg_ok = true;
    let mut min_prec = i64::MAX;
    for i in 0..=D_MULT {
        for j in 0..=D_MULT - i {
            let c = f.coeff(i, j);
            let want = if matches!((i, j), (1, 0) | (0, 1) | (1, 1)) { k.one() } else { k.zero() };
            fg_ok &= c.agrees_with(&want);
            min_prec = min_prec.min(c.abs_prec());
        }
    }
    // the group law is integral, so exactness means no digit was lost
    fg_ok &= min_prec >= N_MULT as i64;
    let exp_ok = lt.exp().agrees_with(&series_of(k.ring(), &exp_minus_one(D_MULT)));
    let log_ok = lt.log().agrees_with(&series_of(k.ring(), &log_one_plus(D_MULT)));
    let note = format!(
        "F_P = X+Y+XY to total degree {D_MULT}, {min_prec} digits: {fg_ok}; exp: {exp_ok}; log: {log_ok}; N = {N_MULT}"
    );
    (fg_ok && exp_ok && log_ok, note, lt)
}

/// `curly E_{P,n}` for the multiplicative `P` and `Q = X^3 + 3X` against the
/// closed form, `n = 1, 2`. Returns the smallest agreement and the coefficients.
fn dwork_closed_form(n_prec: u32) -> (Ratio<i64>, Vec<(String, Elem)>, LubinTate) {
    let k = make_context(3, 1, None, n_prec).unwrap();
    let lt = LubinTate::from_preset(&k, k.pi(), &LtPreset::Multiplicative, D_DWORK).unwrap();
    let q = lt_polynomial(&k, k.pi(), &LtPreset::Canonical).unwrap();
    let tower = build_tower(&k, &q, k.pi(), 2).unwrap();
    let mut worst = Ratio::from_integer(i64::MAX);
    let mut outputs = Vec::new();
    for n in 1..=2 {
        let ce = curly_e(&lt, &tower, n, D_DWORK).unwrap();
        let (_, oracle) = dwork_oracle(3, &[0, 3, 0, 1], n, D_DWORK);
        let w = tower.omega(n);
        for i in 1..=D_DWORK {
            let mut want = Elem::zero(tower.ring());
            let mut wj = Elem::one(tower.ring());
            for c in &oracle[i] {
                want = want.add_ref(&wj.mul_sub(&rat_to_elem(k.ring(), c)));
                wj = wj.mul_ref(w);
            }
            let c = ce.series.coeff(i);
            worst = worst.min(c.sub_ref(&want).valuation().lower());
            outputs.push((format!("n={n}/c{i}"), c.clone()));
        }
    }
    (worst, outputs, lt)
}

/// Every output of `lo` is reproduced by `hi` truncated to the same precision,
/// and every claim has the same verdict.
fn reproduces(lo: &Report, hi: &Report) -> Result<usize, String> {
    let mut n = 0;
    for (name, a) in &lo.cases {
        let b = hi.cases.get(name).ok_or_else(|| format!("{name}: missing at N+{EXTRA}"))?;
        for (id, c) in &a.claims {
            if b.claims.get(id).map(|d| d.pass) != Some(c.pass) {
                return Err(format!("{name}: verdict of {id} changed"));
            }
        }
        if a.error.is_some() != b.error.is_some() {
            return Err(format!("{name}: error status changed"));
        }
        n += compare_outputs(name, &a.outputs, &b.outputs)?;
    }
    Ok(n)
}

fn compare_outputs(name: &str, lo: &[(String, Elem)], hi: &[(String, Elem)]) -> Result<usize, String> {
    if lo.len() != hi.len() {
        return Err(format!("{name}: {} outputs against {}", lo.len(), hi.len()));
    }
    for ((ka, a), (kb, b)) in lo.iter().zip(hi) {
        if ka != kb {
            return Err(format!("{name}: output {ka} against {kb}"));
        }
        if a.to_json() != b.with_abs_prec(a.abs_prec()).to_json() {
            return Err(format!("{name}/{ka}: {a} against {b}"));
        }
    }
    Ok(lo.len())
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed().as_secs_f64())
}

fn main() {
    let mut lines = Vec::new();
    let mut unexpected = Vec::new();

    // 1
    let ((pass, note, lt_mult), secs) = timed(multiplicative);
    lines.push(Line { id: 1, title: "multiplicative recovery", pass, note, secs, budget: Some(5.0) });

    // 2
    let n2 = auto_precision(3, 1, D_DWORK);
    let ((agree, outs2, lt_dwork), secs) = timed(|| dwork_closed_form(n2));
    let pass = agree >= Ratio::from_integer(DWORK_DIGITS);
    let note = format!("n = 1, 2 to D = {D_DWORK} at N = {n2}: agreement {agree} digits, need {DWORK_DIGITS}");
    lines.push(Line { id: 2, title: "closed-form Dwork exponential", pass, note, secs, budget: Some(30.0) });

    // 3 to 7 through the suites, with default configuration
    let cfg = RunConfig::default();
    let suites = [
        (3, "thm1", "integrality matrix", 600.0),
        (4, "prop2", "boundary division points", 120.0),
        (5, "prop3", "Galois action identity", 180.0),
        (6, "thm4", "trace and lattice", 120.0),
        (7, "witt_axioms", "Witt suite", 120.0),
    ];
    let mut reports = Vec::new();
    for (id, suite, title, budget) in suites {
        let (r, secs) = timed(|| run_suite(&cfg, suite).unwrap());
        let fails = failures(&r);
        let pass = fails.is_empty();
        let mut note = format!("{} cases, {} claims", r.cases.len(), claim_count(&r));
        if !fails.is_empty() {
            note.push_str(&format!("; failing: {}", fails.join(", ")));
        }
        if id == 6 {
            // the stated trace formula has the opposite sign to the computed trace
            let case = r.cases.values().next().unwrap();
            if let Some(c) = case.claims.get("thm4.trace") {
                note.push_str(&format!("; trace {}", c.detail["trace"].as_str().unwrap_or("?")));
                note.push_str(&format!(", stated (q-1)a_(q-1) = {}", c.detail["formula"].as_str().unwrap_or("?")));
            }
            let expected: BTreeSet<String> = case
                .claims
                .keys()
                .filter(|k| k.as_str() == "thm4.trace")
                .map(|k| format!("{}: {k}", r.cases.keys().next().unwrap()))
                .collect();
            let got: BTreeSet<String> = fails.iter().cloned().collect();
            if got != expected || expected.is_empty() {
                unexpected.push(format!("criterion 6 failures {got:?}, expected exactly the stated trace formula"));
            }
            note.push_str("; negated trace, uniformizer, valuations and lattice certified");
        }
        lines.push(Line { id, title, pass, note, secs, budget: Some(budget) });
        reports.push((suite, r));
    }

    // 8: every constructed P
    let (mut radius_checked, mut radius_bad) = (0usize, Vec::new());
    for lt in [&lt_mult, &lt_dwork] {
        radius_checked += 1;
        if !exp_radius_check(lt).holds {
            radius_bad.push("multiplicative".to_string());
        }
    }
    for (_, r) in &reports {
        for (name, case) in &r.cases {
            if let Some(c) = case.claims.get("expfp.radius") {
                radius_checked += 1;
                if !c.pass {
                    radius_bad.push(name.clone());
                }
            }
        }
    }
    let pass = radius_bad.is_empty() && radius_checked >= 56;
    let note = format!("{radius_checked} series checked through their full degree; violations: {radius_bad:?}");
    lines.push(Line { id: 8, title: "exp_{F_P} coefficient bound", pass, note, secs: 0.0, budget: None });

    // 9
    let t = Instant::now();
    let mut problems = Vec::new();
    let mut compared = 0;
    let (agree_hi, outs_hi, _) = dwork_closed_form(n2 + EXTRA);
    match compare_outputs("criterion 2", &outs2, &outs_hi) {
        Ok(n) => compared += n,
        Err(e) => problems.push(e),
    }
    if (agree_hi >= Ratio::from_integer(DWORK_DIGITS)) != (agree >= Ratio::from_integer(DWORK_DIGITS)) {
        problems.push("criterion 2 verdict changed".into());
    }
    let hi_cfg = RunConfig { extra_precision: EXTRA, ..RunConfig::default() };
    for (suite, lo) in reports.iter().filter(|(s, _)| *s != "witt_axioms") {
        let hi = run_suite(&hi_cfg, suite).unwrap();
        match reproduces(lo, &hi) {
            Ok(n) => compared += n,
            Err(e) => problems.push(format!("{suite}: {e}")),
        }
    }
    let pass = problems.is_empty() && compared > 0;
    let note = format!("criteria 2 to 6 rerun at N+{EXTRA}: {compared} values identical after truncation; mismatches: {problems:?}");
    lines.push(Line { id: 9, title: "precision soundness", pass, note, secs: t.elapsed().as_secs_f64(), budget: None });

    println!();
    for l in &lines {
        l.print();
        if !l.within_budget() {
            unexpected.push(format!("criterion {} over its time budget", l.id));
        }
        if !l.pass && l.id != 6 {
            unexpected.push(format!("criterion {} failed", l.id));
        }
    }
    println!();
    if unexpected.is_empty() {
        println!("acceptance: all outcomes as expected (criterion 6 fails only on the sign of the stated trace formula)");
    } else {
        for u in &unexpected {
            println!("unexpected: {u}");
        }
        std::process::exit(1);
    }
}
