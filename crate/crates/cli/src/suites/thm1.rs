use ltlab::exponentials::{curly_e, exp_radius_check, overconvergence_profile};
use ltlab::LtError;
use serde_json::json;

use super::{run_case, Field, SetupSpec};
use crate::config::{Matrix, PiPrime, PolySpec, RunConfig};
use crate::report::{Claim, Report};

struct Cell {
    field: Field,
    levels: Vec<usize>,
}

fn default_cells() -> Vec<Cell> {
    vec![
        Cell { field: Field::qp(2), levels: vec![1, 2] },
        Cell { field: Field::qp(3), levels: vec![1, 2] },
        Cell { field: Field::qp(5), levels: vec![1, 2] },
        Cell { field: Field { p: 3, f: 2, eis: None }, levels: vec![1] },
        Cell { field: Field { p: 3, f: 1, eis: Some(vec![vec![-3], vec![0], vec![1]]) }, levels: vec![1, 2] },
    ]
}

/// Seeds of the `k`-th random pair; the same pairs are used in every cell.
pub fn pair_seeds(seed: u64, k: usize) -> (u64, u64) {
    let base = seed.wrapping_mul(1_000_003).wrapping_add(2 * k as u64);
    (base + 1, base + 2)
}

pub fn thm1(cfg: &RunConfig) -> Report {
    let mut report = Report::default();
    let d = cfg.d_series;
    let mut runs: Vec<(String, Field, usize, PolySpec, PolySpec, PiPrime)> = Vec::new();
    match cfg.matrix {
        Matrix::Single => {
            let field = Field::of(cfg);
            for &n in &cfg.levels {
                let key = format!("{}/n={n}/P={}/Q={}/pi'={}", field.label(), cfg.p_poly, cfg.q_spec(), cfg.pi_prime);
                runs.push((key, field.clone(), n, cfg.p_poly.clone(), cfg.q_spec().clone(), cfg.pi_prime.clone()));
            }
        }
        Matrix::Default => {
            for cell in default_cells() {
                for &n in &cell.levels {
                    for k in 0..cfg.pairs {
                        let (sp, sq) = pair_seeds(cfg.seed, k);
                        for pp in [PiPrime::Pi, PiPrime::Shift(n as u32 + 1)] {
                            let key = format!("{}/n={n}/pair={k}/pi'={pp}", cell.field.label());
                            runs.push((key, cell.field.clone(), n, PolySpec::random(sp), PolySpec::random(sq), pp));
                        }
                    }
                }
            }
        }
    }
    for (key, field, n, p_poly, q_poly, pi_prime) in runs {
        let spec = SetupSpec {
            field: &field,
            prec: cfg.precision_for(field.p, field.f, d),
            p_poly: &p_poly,
            q_poly: &q_poly,
            pi_prime: &pi_prime,
            level: n,
            d,
        };
        let case = run_case(
            |c| spec.record(c),
            |case| {
                let s = spec.build()?;
                let radius = exp_radius_check(&s.lt);
                let mut cl = Claim::new(radius.holds)
                    .detail(json!({ "first_violation": radius.first_violation }));
                if let Some(m) = radius.min_margin {
                    cl = cl.precision(m);
                }
                case.claim("expfp.radius", cl);

                let ce = curly_e(&s.lt, &s.tower, n, d)?;
                let mut part1 = Claim::new(ce.integrality.pass).detail(json!({ "checked": ce.integrality.checked }));
                if let Some(v) = ce.integrality.min_valuation {
                    part1 = part1.precision(v);
                }
                case.claim("thm1.part1", part1);
                let cg = &ce.congruence;
                if cg.undetermined > 0 {
                    // no coefficient contradicts the congruence, but some are not known well enough
                    return Err(LtError::PrecisionExhausted(format!(
                        "{} coefficients not known to v_p >= {}; raise N",
                        cg.undetermined, cg.bound
                    )));
                }
                case.claim(
                    "thm1.part2",
                    Claim::new(cg.pass).precision(cg.linear_offset.min(cg.higher_min)).detail(json!({
                        "bound": cg.bound.to_string(),
                        "linear_offset": cg.linear_offset.to_string(),
                        "higher_min": cg.higher_min.to_string(),
                        "undetermined": cg.undetermined,
                    })),
                );
                let oc = overconvergence_profile(&ce.series);
                case.claim(
                    "overconvergence",
                    Claim::new(true).info().detail(json!({
                        "verdict": oc.verdict,
                        "samples": oc.samples,
                        "tail_min": oc.tail_min.iter().map(|v| v.map(|v| v.to_string())).collect::<Vec<_>>(),
                    })),
                );
                for (i, c) in ce.series.coeffs().iter().enumerate() {
                    case.output(format!("c{i}"), c);
                }
                Ok(())
            },
        );
        report.cases.insert(key, case);
    }
    report
}
