//! Suites built on certified boundary values of `curly E`.

use ltlab::exponentials::exp_radius_check;
use ltlab::padic::Valuation;
use ltlab::tower::{prop2_check, prop3_check, prop3_digit_vectors, thm4_check, CheckOptions, CurlyFamily, DivisionPoint};
use ltlab::{LtError, Result};
use num_rational::Ratio;
use serde_json::json;

use super::{run_case, Field, Setup, SetupSpec};
use crate::config::{Matrix, PiPrime, PolySpec, RunConfig};
use crate::report::{Case, Claim, Report};

pub const D_BOUNDARY: usize = 300;
/// The trace certificate decays slowly in the degree; 300 leaves too few digits.
pub const D_BOUNDARY_TRACE: usize = 480;

struct Run {
    field: Field,
    p_poly: PolySpec,
    q_poly: PolySpec,
    pi_prime: PiPrime,
    level: usize,
}

impl Run {
    fn key(&self) -> String {
        format!("{}/n={}/P={}/Q={}/pi'={}", self.field.label(), self.level, self.p_poly, self.q_poly, self.pi_prime)
    }
}

fn single(cfg: &RunConfig, level: usize) -> Run {
    Run {
        field: Field::of(cfg),
        p_poly: cfg.p_poly.clone(),
        q_poly: cfg.q_spec().clone(),
        pi_prime: cfg.pi_prime.clone(),
        level,
    }
}

fn canonical(p: u64) -> Run {
    Run {
        field: Field::qp(p),
        p_poly: PolySpec::default(),
        q_poly: PolySpec::default(),
        pi_prime: PiPrime::Pi,
        level: 2,
    }
}

fn options(cfg: &RunConfig, d: usize) -> CheckOptions {
    CheckOptions { t: cfg.t, d_boundary: d, d_bracket: cfg.d_bracket, d_group: cfg.d_bivariate }
}

fn run_all(cfg: &RunConfig, runs: Vec<Run>, d: usize, body: impl Fn(&Setup, &CurlyFamily, &CheckOptions, &mut Case) -> Result<()>) -> Report {
    let mut report = Report::default();
    let opts = options(cfg, d);
    for run in runs {
        let spec = SetupSpec {
            field: &run.field,
            prec: cfg.boundary_precision_for(run.field.p, run.field.f, d),
            p_poly: &run.p_poly,
            q_poly: &run.q_poly,
            pi_prime: &run.pi_prime,
            level: run.level,
            d,
        };
        let case = run_case(
            |c| {
                spec.record(c);
                c.param("T", cfg.t);
            },
            |case| {
                let s = spec.build()?;
                let radius = exp_radius_check(&s.lt);
                let mut cl = Claim::new(radius.holds).detail(json!({ "first_violation": radius.first_violation }));
                if let Some(m) = radius.min_margin {
                    cl = cl.precision(m);
                }
                case.claim("expfp.radius", cl);
                let fam = CurlyFamily::new(&s.lt, &s.tower, d)?;
                body(&s, &fam, &opts, case)
            },
        );
        report.cases.insert(run.key(), case);
    }
    report
}

fn top_level(cfg: &RunConfig) -> usize {
    cfg.levels.iter().copied().max().unwrap_or(2)
}

pub fn prop2(cfg: &RunConfig) -> Report {
    let runs = match cfg.matrix {
        Matrix::Default => vec![canonical(2), canonical(3)],
        Matrix::Single => vec![single(cfg, top_level(cfg))],
    };
    run_all(cfg, runs, cfg.d_boundary.unwrap_or(D_BOUNDARY), |s, fam, opts, case| {
        let r = prop2_check(&s.lt, &s.tower, fam, opts)?;
        let vpi = s.lt.pi().valuation().exact().ok_or(LtError::IndeterminateValuation)?;
        let first = vpi / Ratio::from_integer(s.lt.q() as i64 - 1);
        let mut levels = Vec::new();
        let mut distinguishable = true;
        for l in &r.levels {
            let prev = &l.division.iterates[l.m - 1];
            distinguishable &= *prev == Valuation::Exact(first);
            levels.push(json!({
                "m": l.m,
                "value": l.value.to_string(),
                "verdict": l.division.verdict,
                "certified": l.division.certified.to_string(),
                "previous_iterate_valuation": prev.to_string(),
                "offset_from_omega": l.offset_from_omega.to_string(),
                "offset_bound": l.offset_bound.to_string(),
            }));
            case.output(format!("s{}", l.m), &l.value);
        }
        let certified = r.levels.iter().map(|l| l.division.certified).min().unwrap_or(r.threshold);
        case.claim(
            "prop2.primitive",
            Claim::new(r.primitive && distinguishable)
                .precision(certified)
                .detail(json!({ "threshold": r.threshold.to_string(), "levels": levels })),
        );
        let offset = r.levels.iter().map(|l| l.offset_from_omega).min().unwrap_or(r.threshold);
        case.claim("prop2.congruence", Claim::new(r.congruent).precision(offset));
        let coherence = if r.coherence.is_empty() {
            Claim::new(true).info().detail(json!("skipped: pi and pi' differ"))
        } else {
            let worst = r.coherence.iter().min().copied().unwrap_or(r.threshold);
            Claim::new(r.coherent).precision(worst).detail(json!({ "threshold": r.threshold.to_string() }))
        };
        case.claim("prop2.coherence", coherence);
        Ok(())
    })
}

pub fn prop3(cfg: &RunConfig) -> Report {
    let runs = match cfg.matrix {
        Matrix::Default => vec![canonical(3)],
        Matrix::Single => vec![single(cfg, top_level(cfg))],
    };
    run_all(cfg, runs, cfg.d_boundary.unwrap_or(D_BOUNDARY), |s, fam, opts, case| {
        for (k, z) in prop3_digit_vectors(&s.tower).iter().enumerate() {
            let r = prop3_check(&s.lt, &s.tower, fam, z, opts)?;
            let digits: Vec<String> = z.iter().map(|x| x.to_string()).collect();
            case.claim(
                &format!("prop3.identity[{k}]"),
                Claim::new(r.pass()).precision(r.agreement).detail(json!({
                    "z": digits,
                    "threshold": r.threshold.to_string(),
                })),
            );
            case.output(format!("lhs{k}"), &r.lhs);
            case.output(format!("rhs{k}"), &r.rhs);
        }
        Ok(())
    })
}

pub fn thm4(cfg: &RunConfig) -> Report {
    let runs = match cfg.matrix {
        Matrix::Default => vec![Run {
            field: Field::qp(3),
            p_poly: PolySpec::Coeffs(vec![0, 3, 3, 1]),
            q_poly: PolySpec::Coeffs(vec![0, 3, 3, 1]),
            pi_prime: PiPrime::Pi,
            level: 2,
        }],
        Matrix::Single => vec![single(cfg, 2)],
    };
    let t = cfg.t as i64;
    run_all(cfg, runs, cfg.d_boundary.unwrap_or(D_BOUNDARY_TRACE), move |s, fam, opts, case| {
        let r = thm4_check(&s.lt, &s.tower, fam, opts)?;
        let q = s.lt.q();
        case.claim(
            "thm4.division",
            Claim::new(r.division.verdict == DivisionPoint::Primitive).precision(r.division.certified),
        );
        let prec = r.trace_to_k.abs_prec();
        let detail = json!({
            "trace": r.trace_to_k.to_string(),
            "formula": r.trace_formula.to_string(),
        });
        case.claim(
            "thm4.trace",
            Claim::new(r.trace_matches_formula && prec >= t).precision(prec).detail(detail.clone()),
        );
        case.claim(
            "thm4.trace_negated",
            Claim::new(r.trace_matches_negated_formula && prec >= t).precision(prec).detail(detail),
        );
        case.claim(
            "thm4.uniformizer",
            Claim::new(r.uniformizer_ok(q)).detail(json!({ "v_L(beta)": r.beta_v_l, "expected": q - 1 })),
        );
        let alphas: Vec<_> = r
            .alphas
            .iter()
            .map(|a| {
                json!({
                    "alpha": a.label,
                    "v_p": a.v_p.to_string(),
                    "expected_v_p": a.expected_v_p.to_string(),
                    "det_valuation": a.det_valuation.map(|v| v.to_string()),
                })
            })
            .collect();
        case.claim(
            "thm4.alpha_valuation",
            Claim::new(r.alphas.iter().all(|a| a.valuation_ok())).detail(json!(alphas)),
        );
        case.claim("thm4.lattice", Claim::new(r.alphas.iter().all(|a| a.lattice_ok())).detail(json!(alphas)));
        case.param(
            "representatives",
            r.representatives.iter().map(|z| format!("1+({z})pi")).collect::<Vec<_>>(),
        );
        case.output("trace", &r.trace_to_k);
        case.output("beta", &r.beta);
        Ok(())
    })
}
