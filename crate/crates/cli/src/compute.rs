//! `ltlab compute`: build one object and dump it.

use ltlab::exponentials::{curly_e, e_p};
use ltlab::formal_group::LubinTate;
use ltlab::padic::Elem;
use ltlab::series::{BivariateSeries, PowerSeries};
use ltlab::witt::multipoly::small_integer;
use ltlab::witt::structural_polys;
use ltlab::{LtError, Result};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::suites::{Field, SetupSpec};

pub const TARGETS: &[&str] = &["fg", "log", "exp", "e_p", "curly_e", "witt", "tower"];

pub struct Artifact {
    pub json: Value,
    pub text: String,
}

fn coeff_text(c: &Elem) -> String {
    match small_integer(c) {
        Some(v) if v.abs() < 1_000_000 => v.to_string(),
        _ => format!("({c})"),
    }
}

fn monomial(i: usize, var: &str) -> String {
    match i {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{i}"),
    }
}

fn join_terms(terms: Vec<String>) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    terms.join(" + ").replace("+ -", "- ")
}

fn term(c: &Elem, mono: String) -> String {
    let c = coeff_text(c);
    match (c.as_str(), mono.is_empty()) {
        (_, true) => c,
        ("1", _) => mono,
        ("-1", _) => format!("-{mono}"),
        _ => format!("{c}*{mono}"),
    }
}

pub fn series_text(s: &PowerSeries) -> String {
    let terms = (0..=s.degree())
        .filter(|&i| !s.coeff(i).is_zero())
        .map(|i| term(s.coeff(i), monomial(i, "X")))
        .collect();
    format!("{} + O(X^{})", join_terms(terms), s.degree() + 1)
}

pub fn bivariate_text(f: &BivariateSeries) -> String {
    let d = f.degree();
    let mut terms = Vec::new();
    for t in 0..=d {
        for i in (0..=t).rev() {
            let c = f.coeff(i, t - i);
            if !c.is_zero() {
                let m = format!("{}{}", monomial(i, "X"), monomial(t - i, "Y"));
                let m = if i > 0 && t > i { m.replacen('Y', "*Y", 1) } else { m };
                terms.push(term(c, m));
            }
        }
    }
    format!("{} + O(deg {})", join_terms(terms), d + 1)
}

pub fn compute(cfg: &RunConfig, target: &str) -> Result<Artifact> {
    cfg.validate()?;
    let field = Field::of(cfg);
    let d = cfg.d_series;
    let level = cfg.levels.iter().copied().max().unwrap_or(1);
    let prec = cfg.precision_for(field.p, field.f, d);
    let header = json!({
        "target": target,
        "field": field,
        "N": prec,
        "D": d,
        "P": cfg.p_poly.to_string(),
    });
    let ctx = field.context(prec)?;
    let pi = ctx.pi().clone();
    let lt = || LubinTate::from_polynomial(&ctx, &pi, cfg.p_poly.coefficients(&ctx, &pi)?, d);
    let (data, text) = match target {
        "fg" => {
            // F_P cannot be known beyond the degree of its logarithm
            let db = cfg.d_bivariate.min(d);
            let f = lt()?.formal_group(db)?;
            (json!({ "D_bivariate": db, "series": f.to_json() }), format!("F_P(X,Y) = {}", bivariate_text(&f)))
        }
        "log" => {
            let l = lt()?;
            (json!({ "series": l.log().to_json() }), format!("log_P(X) = {}", series_text(l.log())))
        }
        "exp" => {
            let l = lt()?;
            (json!({ "series": l.exp().to_json() }), format!("exp_P(X) = {}", series_text(l.exp())))
        }
        "e_p" => {
            let e = e_p(&lt()?, d)?;
            (json!({ "series": e.to_json() }), format!("E_P(X) = {}", series_text(&e)))
        }
        "curly_e" | "tower" => {
            let spec = SetupSpec {
                field: &field,
                prec,
                p_poly: &cfg.p_poly,
                q_poly: cfg.q_spec(),
                pi_prime: &cfg.pi_prime,
                level,
                d,
            };
            let s = spec.build()?;
            if target == "tower" {
                let omegas: Vec<Value> = (1..=level)
                    .map(|i| {
                        let w = s.tower.omega(i);
                        json!({
                            "coords": s.tower.power_basis_coords(w).iter().map(Elem::to_json).collect::<Vec<_>>(),
                            "v_p": w.valuation().to_string(),
                        })
                    })
                    .collect();
                let mut text = format!("tower of degree {} over K, Q = {}, pi' = {}\n", s.tower.degree(), cfg.q_spec(), cfg.pi_prime);
                for i in 1..=level {
                    text.push_str(&format!("omega_{i}: v_p = {}\n", s.tower.omega(i).valuation()));
                }
                (
                    json!({
                        "n": level,
                        "Q": cfg.q_spec().to_string(),
                        "pi_prime": cfg.pi_prime.to_string(),
                        "degree": s.tower.degree(),
                        "modulus": s.tower.modulus().iter().map(Elem::to_json).collect::<Vec<_>>(),
                        "omegas": omegas,
                    }),
                    text.trim_end().to_string(),
                )
            } else {
                let ce = curly_e(&s.lt, &s.tower, level, d)?;
                // coordinates in powers of omega_n, comparable with closed forms over Q(omega_n)
                let coords: Vec<Vec<_>> = ce
                    .series
                    .coeffs()
                    .iter()
                    .map(|c| s.tower.power_basis_coords(c).iter().map(Elem::to_json).collect())
                    .collect();
                let text = format!(
                    "curly E_(P,{level})^Q over the degree-{} tower; integrality {}, congruence {}\n{}",
                    s.tower.degree(),
                    if ce.integrality.pass { "pass" } else { "FAIL" },
                    if ce.congruence.pass { "pass" } else { "FAIL" },
                    series_text(&ce.series)
                );
                (
                    json!({
                        "n": level,
                        "Q": cfg.q_spec().to_string(),
                        "pi_prime": cfg.pi_prime.to_string(),
                        "integrality": ce.integrality.pass,
                        "congruence": ce.congruence.pass,
                        "coefficients_in_power_basis": coords,
                    }),
                    text,
                )
            }
        }
        "witt" => {
            let st = structural_polys(&ctx, &pi, level, None)?;
            let show = |ps: &[ltlab::witt::MultiPoly]| ps.iter().map(|p| st.display(p)).collect::<Vec<_>>();
            let mut text = String::new();
            for (name, ps) in [("S", &st.sum), ("P", &st.product), ("F", &st.frobenius), ("I", &st.inverse)] {
                for (i, p) in ps.iter().enumerate() {
                    text.push_str(&format!("{name}_{i} = {}\n", st.display(p)));
                }
            }
            (
                json!({
                    "n": level,
                    "variables": st.var_names(),
                    "sum": show(&st.sum),
                    "product": show(&st.product),
                    "frobenius": show(&st.frobenius),
                    "inverse": show(&st.inverse),
                }),
                text.trim_end().to_string(),
            )
        }
        other => return Err(LtError::Config(format!("unknown target {other:?}; expected one of {TARGETS:?}"))),
    };
    let mut json = header;
    json["data"] = data;
    Ok(Artifact { json, text })
}
