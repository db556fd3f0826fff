//! Generalised Artin-Hasse exponentials `E_P(lambda, X)` and the series
//! `curly E^Q_{P,n}` built from a coherent set of roots.

use std::sync::Arc;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{LtError, Result};
use crate::formal_group::LubinTate;
use crate::padic::{Elem, Ring, Valuation};
use crate::series::PowerSeries;
use crate::tower::Tower;
use crate::witt::{self, WittVector};

/// `f(g(X))` truncated at degree `d`, for `f` over `K` and a sparse `g`
/// (pairs `(degree, coefficient)`, degrees at least one) over `ring`.
pub fn compose_sparse(f: &PowerSeries, g: &[(usize, Elem)], ring: &Arc<Ring>, d: usize) -> Result<PowerSeries> {
    if g.iter().any(|(t, _)| *t == 0) {
        return Err(LtError::NonzeroConstantTerm);
    }
    let d = d.min(f.degree());
    let g: Vec<(usize, Elem)> = g.iter().filter(|(t, c)| *t <= d && !c.is_exact_zero()).map(|(t, c)| (*t, c.embed(ring))).collect();
    let mut out = vec![Elem::zero(ring); d + 1];
    out[0] = f.coeff(0).embed(ring);
    let tmin = match g.iter().map(|(t, _)| *t).min() {
        Some(t) => t,
        None => return Ok(PowerSeries::new(ring, out, d)),
    };
    let mut pw = vec![Elem::zero(ring); d + 1];
    pw[0] = Elem::one(ring);
    for k in 1..=d {
        if k * tmin > d {
            break;
        }
        let mut next = vec![Elem::zero(ring); d + 1];
        for (j, x) in pw.iter().enumerate() {
            if x.is_exact_zero() {
                continue;
            }
            for (t, c) in &g {
                if j + t <= d {
                    next[j + t] = next[j + t].add_ref(&x.mul_ref(c));
                }
            }
        }
        pw = next;
        let bk = f.coeff(k);
        if bk.is_exact_zero() {
            continue;
        }
        for (j, x) in pw.iter().enumerate().skip(k * tmin) {
            if !x.is_exact_zero() {
                out[j] = out[j].add_ref(&x.mul_sub(bk));
            }
        }
    }
    Ok(PowerSeries::new(ring, out, d))
}

fn abort_if_not_integral(s: &PowerSeries, what: &str) -> Result<()> {
    match s.first_non_integral() {
        Some((i, v)) => Err(LtError::IntegralityViolation { index: format!("{what} X^{i}"), valuation: v.to_string() }),
        None => Ok(()),
    }
}

/// Largest `k` with `q^k <= d`.
fn levels(q: u64, d: usize) -> usize {
    let mut k = 0;
    let mut qk = q as usize;
    while qk <= d {
        k += 1;
        qk *= q as usize;
    }
    k
}

fn inv_pi_pow(lt: &LubinTate, k: usize) -> Result<Elem> {
    lt.pi().pow(k as u64).inv()
}

/// `E_P(X) = exp_{F_P}(sum_k X^(q^k) / pi^k)`, checked to be integral.
pub fn e_p(lt: &LubinTate, d: usize) -> Result<PowerSeries> {
    let q = lt.q();
    let ring = lt.ring();
    let g = (0..=levels(q, d))
        .map(|k| Ok((q.pow(k as u32) as usize, inv_pi_pow(lt, k)?)))
        .collect::<Result<Vec<_>>>()?;
    let s = compose_sparse(lt.exp(), &g, ring, d)?;
    abort_if_not_integral(&s, "E_P")?;
    Ok(s)
}

/// `exp_{F_P}(sum_k u_k X^(q^k) / pi^k)` for a ghost vector `u`; entries
/// beyond `u.len()` are taken to be zero.
pub fn e_p_ghost(lt: &LubinTate, u: &[Elem], d: usize) -> Result<PowerSeries> {
    let q = lt.q();
    let ring = u.iter().map(|x| x.ring()).chain([lt.ring()]).max_by_key(|r| r.dim()).unwrap().clone();
    let mut g = Vec::new();
    for (k, x) in u.iter().enumerate().take(levels(q, d) + 1) {
        if !x.is_exact_zero() {
            g.push((q.pow(k as u32) as usize, x.embed(&ring).mul_sub(&inv_pi_pow(lt, k)?)));
        }
    }
    compose_sparse(lt.exp(), &g, &ring, d)
}

/// `E_P(lambda, X)` for a finite Witt vector (padded with zero components),
/// computed from the ghost components and from the `F_P`-sum
/// `sum_j E_P(lambda_j X^(q^j))`. The two routes must agree.
pub fn e_p_lambda(lt: &LubinTate, lambda: &WittVector<Elem>, d: usize) -> Result<PowerSeries> {
    let q = lt.q();
    let len = levels(q, d) + 1;
    let comps = lambda.components();
    let ring = comps.iter().map(|x| x.ring()).chain([lt.ring()]).max_by_key(|r| r.dim()).unwrap().clone();
    let mut padded: Vec<Elem> = comps.iter().take(len).map(|x| x.embed(&ring)).collect();
    padded.resize(len, Elem::zero(&ring));
    let ghost = witt::ghost(&padded, lt.pi(), q);
    let direct = e_p_ghost(lt, &ghost, d)?;

    let base = e_p(lt, d)?;
    let f = lt.formal_group(d)?;
    let mut acc = PowerSeries::zero(&ring, d);
    for (j, l) in padded.iter().enumerate() {
        if l.is_zero() {
            continue;
        }
        let step = q.pow(j as u32) as usize;
        let mut c = vec![Elem::zero(&ring); d + 1];
        let mut lk = Elem::one(&ring);
        for k in 1..=d / step {
            lk = lk.mul_ref(l);
            c[k * step] = lk.mul_sub(base.coeff(k));
        }
        let term = PowerSeries::new(&ring, c, d);
        acc = if acc.coeffs().iter().all(|x| x.is_exact_zero()) { term } else { f.along(&acc, &term)? };
    }
    if !direct.agrees_with(&acc) {
        return Err(LtError::RouteMismatch(format!(
            "E_P(lambda, X): ghost route and F_P-sum agree only to valuation {}",
            direct.agreement(&acc)
        )));
    }
    Ok(direct)
}

/// `E^Q_{P,m}(X) = E_P(S_{Q,omega_m}(X), X)` for `1 <= m <= n`, from the
/// ghost vector `(omega_m, ..., omega_1, 0, ...)`.
pub fn e_pq(lt: &LubinTate, tower: &Tower, m: usize, d: usize) -> Result<PowerSeries> {
    let u: Vec<Elem> = (1..=m).rev().map(|i| tower.omega(i).clone()).collect();
    e_p_ghost(lt, &u, d)
}

/// The inner sum `sum_{i<m} omega_{m-i} (X^(q^i) - X^(q^(i+1))) / pi^i`.
fn curly_inner(lt: &LubinTate, tower: &Tower, m: usize, d: usize) -> Result<Vec<(usize, Elem)>> {
    let q = lt.q() as usize;
    let mut terms: Vec<(usize, Elem)> = Vec::new();
    let mut push = |t: usize, c: Elem| match terms.iter_mut().find(|(s, _)| *s == t) {
        Some(e) => e.1 = e.1.add_ref(&c),
        None => terms.push((t, c)),
    };
    for i in 0..m {
        let c = tower.omega(m - i).mul_sub(&inv_pi_pow(lt, i)?);
        let t = q.pow(i as u32);
        if t <= d {
            push(t, c.clone());
        }
        if t * q <= d {
            push(t * q, c.neg_ref());
        }
    }
    terms.retain(|(_, c)| !c.is_exact_zero());
    Ok(terms)
}

#[derive(Clone, Debug)]
pub struct IntegralityCert {
    pub pass: bool,
    /// Coefficients with a determinate valuation.
    pub checked: usize,
    pub min_valuation: Option<Ratio<i64>>,
}

#[derive(Clone, Debug)]
pub struct CongruenceCert {
    pub pass: bool,
    /// Required valuation `2 v_p(omega_n)`.
    pub bound: Ratio<i64>,
    /// Lower bound for `v_p(c_1 - omega_n)`.
    pub linear_offset: Ratio<i64>,
    /// Smallest lower bound among `v_p(c_k)`, `k >= 2`.
    pub higher_min: Ratio<i64>,
    /// Coefficients whose precision is below the bound; they certify nothing.
    pub undetermined: usize,
}

/// `curly E^Q_{P,n}` together with its certificates.
#[derive(Clone, Debug)]
pub struct CurlyE {
    pub level: usize,
    pub series: PowerSeries,
    pub integrality: IntegralityCert,
    pub congruence: CongruenceCert,
}

/// `exp_{F_P}(sum_{i<m} omega_{m-i} (X^(q^i) - X^(q^(i+1))) / pi^i)` over the
/// tower, for `1 <= m <= tower level`, by direct composition. Aborts with
/// [`LtError::IntegralityViolation`] or [`LtError::CongruenceViolation`] when a
/// determinate coefficient breaks either property.
pub fn curly_e(lt: &LubinTate, tower: &Tower, m: usize, d: usize) -> Result<CurlyE> {
    if m == 0 || m > tower.level() {
        return Err(LtError::InvalidParameter(format!("level {m} outside 1..={}", tower.level())));
    }
    let ring = tower.ring();
    let g = curly_inner(lt, tower, m, d)?;
    let series = compose_sparse(lt.exp(), &g, ring, d)?;

    let vals: Vec<Valuation> = series.profile();
    let checked = vals.iter().filter(|v| v.is_exact()).count();
    let min_valuation = series.min_valuation();
    if let Some((i, v)) = series.first_non_integral() {
        return Err(LtError::IntegralityViolation { index: format!("curly E X^{i}"), valuation: v.to_string() });
    }
    let integrality = IntegralityCert { pass: true, checked, min_valuation };

    let w = tower.omega(m);
    let bound = w.valuation().exact().ok_or(LtError::IndeterminateValuation)? * Ratio::from_integer(2);
    let mut undetermined = 0;
    let mut check = |x: &Elem, what: String| -> Result<Ratio<i64>> {
        match x.valuation() {
            Valuation::Exact(v) if v < bound => Err(LtError::CongruenceViolation(format!(
                "{what} has valuation {v}, below {bound}"
            ))),
            v => {
                if !v.certainly_at_least(bound) {
                    undetermined += 1;
                }
                Ok(v.lower())
            }
        }
    };
    let linear_offset = check(&series.coeff(1).sub_ref(w), "c_1 - omega".into())?;
    let mut higher_min: Option<Ratio<i64>> = None;
    for k in 2..=series.degree() {
        let v = check(series.coeff(k), format!("c_{k}"))?;
        higher_min = Some(higher_min.map_or(v, |h| h.min(v)));
    }
    let congruence = CongruenceCert {
        pass: undetermined == 0,
        bound,
        linear_offset,
        higher_min: higher_min.unwrap_or(bound),
        undetermined,
    };
    Ok(CurlyE { level: m, series, integrality, congruence })
}

#[derive(Clone, Debug)]
pub struct DecomposeReport {
    pub agree: bool,
    /// Lower bound for the valuation of the coefficientwise difference.
    pub agreement: Ratio<i64>,
}

/// Compares `E_P(S_{Q,omega_n} lambda, X)` with the `F_P`-sum
/// `sum_{j<n} E^Q_{P,n-j}(lambda_j X^(q^j))`, for `n` at most the tower level.
pub fn decompose_check(lt: &LubinTate, tower: &Tower, n: usize, lambda: &WittVector<Elem>, d: usize) -> Result<DecomposeReport> {
    if n == 0 || n > tower.level() {
        return Err(LtError::InvalidParameter(format!("level {n} outside 1..={}", tower.level())));
    }
    let q = lt.q();
    let ring = tower.ring();
    let mut comps: Vec<Elem> = lambda.components().iter().take(n).map(|x| x.embed(ring)).collect();
    comps.resize(n, Elem::zero(ring));
    let lg = witt::ghost(&comps, lt.pi(), q);
    // ghost of S_{Q,omega_n} is (omega_n, ..., omega_1, 0, ...)
    let u: Vec<Elem> = (0..n).map(|k| tower.omega(n - k).mul_ref(&lg[k])).collect();
    let lhs = e_p_ghost(lt, &u, d)?;

    let f = lt.formal_group(d)?;
    let mut acc = PowerSeries::zero(ring, d);
    for (j, l) in comps.iter().enumerate() {
        let step = q.pow(j as u32) as usize;
        if l.is_zero() || step > d {
            continue;
        }
        let e = e_pq(lt, tower, n - j, d / step)?;
        let mut c = vec![Elem::zero(ring); d + 1];
        let mut lk = Elem::one(ring);
        for k in 1..=d / step {
            lk = lk.mul_ref(l);
            c[k * step] = lk.mul_ref(e.coeff(k));
        }
        let term = PowerSeries::new(ring, c, d);
        acc = if acc.coeffs().iter().all(|x| x.is_exact_zero()) { term } else { f.along(&acc, &term)? };
    }
    Ok(DecomposeReport { agree: lhs.agrees_with(&acc), agreement: lhs.agreement(&acc) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OverconvergenceVerdict {
    EmpiricallyOverconvergent,
    NotOverconvergent,
}

#[derive(Clone, Debug)]
pub struct OverconvergenceProfile {
    /// `k -> min_{k <= j <= D} v_p(c_j)` (lower bounds); `None` when every
    /// coefficient on `[k, D]` is exactly zero.
    pub tail_min: Vec<Option<Ratio<i64>>>,
    /// Sample points `D/4, D/2, 3D/4, D`.
    pub samples: Vec<usize>,
    pub verdict: OverconvergenceVerdict,
}

/// Tail-minimum profile of the coefficient valuations. The verdict is
/// empirical: over-convergent when the profile strictly increases across the
/// sample points.
pub fn overconvergence_profile(s: &PowerSeries) -> OverconvergenceProfile {
    let d = s.degree();
    let mut tail_min = vec![None; d + 1];
    let mut cur: Option<Ratio<i64>> = None;
    for k in (0..=d).rev() {
        let c = s.coeff(k);
        if !c.is_exact_zero() {
            let v = c.valuation().lower();
            cur = Some(cur.map_or(v, |m| m.min(v)));
        }
        tail_min[k] = cur;
    }
    let samples: Vec<usize> = (1..=4).map(|i| (d * i / 4).max(1).min(d)).collect();
    let rising = samples.windows(2).all(|w| match (tail_min[w[0]], tail_min[w[1]]) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(a), Some(b)) => b > a,
    });
    let verdict = if rising {
        OverconvergenceVerdict::EmpiricallyOverconvergent
    } else {
        OverconvergenceVerdict::NotOverconvergent
    };
    OverconvergenceProfile { tail_min, samples, verdict }
}

#[derive(Clone, Debug)]
pub struct ExpBoundReport {
    pub holds: bool,
    /// Smallest `v_p(b_k) + (k-1)/(e (q-1))` over determinate coefficients.
    pub min_margin: Option<Ratio<i64>>,
    pub first_violation: Option<usize>,
}

/// `v_p(b_k) >= -(k-1) / (e_K (q-1))` for the coefficients of `exp_{F_P}`.
pub fn exp_radius_check(lt: &LubinTate) -> ExpBoundReport {
    let e = lt.ctx().e() as i64;
    let q = lt.q() as i64;
    let mut min_margin: Option<Ratio<i64>> = None;
    let mut first_violation = None;
    for (k, b) in lt.exp().coeffs().iter().enumerate().skip(1) {
        let bound = Ratio::new(-(k as i64 - 1), e * (q - 1));
        let v = match b.valuation() {
            Valuation::Exact(v) => v,
            // known to be at least this much; a violation would have shown up
            Valuation::AtLeast(_) => continue,
        };
        let margin = v - bound;
        min_margin = Some(min_margin.map_or(margin, |m| m.min(margin)));
        if margin < Ratio::from_integer(0) && first_violation.is_none() {
            first_violation = Some(k);
        }
    }
    ExpBoundReport { holds: first_violation.is_none(), min_margin, first_violation }
}
