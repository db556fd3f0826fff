//! Division points, the action `x -> [u]_P(x)` and partial traces.

use num_rational::Ratio;
use serde::Serialize;

use super::Tower;
use crate::error::{LtError, Result};
use crate::formal_group::LubinTate;
use crate::padic::{linalg, Elem, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DivisionPoint {
    Primitive,
    Nonprimitive,
    /// The `m`-th iterate is visibly nonzero.
    Fail,
}

#[derive(Clone, Debug)]
pub struct DivisionPointReport {
    pub verdict: DivisionPoint,
    /// Valuations of `x, P(x), ..., P^(m)(x)`.
    pub iterates: Vec<Valuation>,
    /// Certified lower bound for `v_p(P^(m)(x))`.
    pub certified: Ratio<i64>,
    pub threshold: Ratio<i64>,
}

/// Decide whether `x` is a primitive `m`-th division point of `P`, treating
/// the `m`-th iterate as zero once it is known to vanish to `t` pi-digits.
pub fn division_point_check(lt: &LubinTate, x: &Elem, m: usize, t: u32) -> Result<DivisionPointReport> {
    let vpi = lt.pi().valuation().exact().ok_or(LtError::IndeterminateValuation)?;
    let threshold = vpi * Ratio::from_integer(t as i64);
    if m == 0 {
        return Err(LtError::InvalidParameter("division level must be at least 1".into()));
    }
    if !x.is_zero() && x.valuation().lower() <= Ratio::from_integer(0) {
        return Err(LtError::NonPositiveValuationPoint);
    }
    let mut ys = vec![x.clone()];
    for _ in 0..m {
        let y = lt.eval_p(ys.last().unwrap())?;
        ys.push(y);
    }
    let iterates: Vec<Valuation> = ys.iter().map(|y| y.valuation()).collect();
    let last = &ys[m];
    let certified = last.valuation().lower();
    let verdict = match last.valuation() {
        Valuation::Exact(v) if v < threshold => DivisionPoint::Fail,
        _ if certified < threshold => {
            return Err(LtError::ThresholdTooHigh(format!(
                "P^({m})(x) is only known to valuation {certified}, threshold {threshold}"
            )))
        }
        _ if ys[m - 1].is_zero() => DivisionPoint::Nonprimitive,
        _ => DivisionPoint::Primitive,
    };
    Ok(DivisionPointReport { verdict, iterates, certified, threshold })
}

/// `[u]_P(x)` for a unit `u` of `O_K`, with the bracket truncated at degree `d`.
pub fn galois_conjugate(lt: &LubinTate, u: &Elem, x: &Elem, d: usize) -> Result<Elem> {
    if u.v_units() != Some(0) {
        return Err(LtError::InvalidParameter("the Galois action needs a unit".into()));
    }
    if x.is_exact_zero() {
        return Ok(x.clone());
    }
    Ok(lt.eval_bracket(u, x, d)?.value)
}

/// The trace from the tower down to the fixed field of `mu_{q-1}`.
#[derive(Clone, Debug)]
pub struct PartialTrace {
    pub value: Elem,
    /// `[z]_P(x)` for the Teichmuller units `z`, in the order of
    /// [`crate::padic::Context::roots_of_unity`].
    pub conjugates: Vec<Elem>,
}

/// `sum_{z in mu_{q-1}} [z]_P(x)` for a division point `x` generating the
/// tower over `K`. The result is checked to be fixed by every `[w]_P`, acting
/// on it through its expansion in powers of `x`.
pub fn trace_to_m(tower: &Tower, lt: &LubinTate, x: &Elem, d: usize) -> Result<PartialTrace> {
    let ctx = tower.ctx();
    let roots = ctx.roots_of_unity();
    let x = tower.elem(x);
    if x.is_exact_zero() {
        return Ok(PartialTrace { value: x.clone(), conjugates: vec![x; roots.len()] });
    }
    let conjugates = roots
        .iter()
        .map(|z| galois_conjugate(lt, z, &x, d))
        .collect::<Result<Vec<_>>>()?;
    let mut value = Elem::zero(tower.ring());
    for c in &conjugates {
        value = value.add_ref(c);
    }
    let b = expand_in_powers(tower, &x, &value)?;
    for (z, y) in roots.iter().zip(&conjugates) {
        let mut image = Elem::zero(tower.ring());
        let mut yj = Elem::one(tower.ring());
        for bj in &b {
            image = image.add_ref(&yj.mul_sub(bj));
            yj = yj.mul_ref(y);
        }
        if !image.agrees_with(&value) {
            return Err(LtError::InvarianceViolation(format!(
                "partial trace moved by [{z}]_P (difference of valuation {})",
                image.sub_ref(&value).valuation()
            )));
        }
    }
    Ok(PartialTrace { value, conjugates })
}

/// Coordinates `b_j` in `K` with `y = sum_j b_j x^j`.
pub(crate) fn expand_in_powers(tower: &Tower, x: &Elem, y: &Elem) -> Result<Vec<Elem>> {
    let d = tower.degree();
    let mut cols = Vec::with_capacity(d);
    let mut xj = Elem::one(tower.ring());
    for _ in 0..d {
        cols.push(tower.power_basis_coords(&xj));
        xj = xj.mul_ref(x);
    }
    let a: Vec<Vec<Elem>> = (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect();
    linalg::solve(a, tower.power_basis_coords(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_group::LtPreset;
    use crate::padic::make_context;
    use crate::tower::build_tower;

    #[test]
    fn tower_roots_are_primitive() {
        let k = make_context(3, 1, None, 30).unwrap();
        let lt = LubinTate::from_preset(&k, k.pi(), &LtPreset::Canonical, 40).unwrap();
        let t = build_tower(&k, lt.polynomial().unwrap(), k.pi(), 2).unwrap();
        for m in 1..=2 {
            let r = division_point_check(&lt, t.omega(m), m, 10).unwrap();
            assert_eq!(r.verdict, DivisionPoint::Primitive);
        }
        let r = division_point_check(&lt, &Elem::zero(t.ring()), 1, 10).unwrap();
        assert_eq!(r.verdict, DivisionPoint::Nonprimitive);
        let r = division_point_check(&lt, t.omega(2), 1, 10).unwrap();
        assert_eq!(r.verdict, DivisionPoint::Fail);
    }

    #[test]
    fn conjugation_is_multiplicative() {
        let k = make_context(3, 1, None, 60).unwrap();
        let lt = LubinTate::from_preset(&k, k.pi(), &LtPreset::Canonical, 80).unwrap();
        let t = build_tower(&k, lt.polynomial().unwrap(), k.pi(), 2).unwrap();
        let w = t.omega(2);
        assert!(galois_conjugate(&lt, &k.one(), w, 80).unwrap().agrees_with(w));
        let (u, v) = (k.elem(2), k.elem(4));
        let a = galois_conjugate(&lt, &u, &galois_conjugate(&lt, &v, w, 80).unwrap(), 80).unwrap();
        let b = galois_conjugate(&lt, &k.elem(8), w, 80).unwrap();
        assert!(a.close_to(&b, Ratio::from_integer(8)));
        // conjugates of a division point are division points of the same level
        let r = division_point_check(&lt, &b, 2, 8).unwrap();
        assert_eq!(r.verdict, DivisionPoint::Primitive);
    }

    #[test]
    fn partial_trace_transitivity() {
        let k = make_context(3, 1, None, 60).unwrap();
        let lt = LubinTate::from_preset(&k, k.pi(), &LtPreset::Canonical, 80).unwrap();
        let t = build_tower(&k, lt.polynomial().unwrap(), k.pi(), 2).unwrap();
        let w = t.omega(2);
        let tr = trace_to_m(&t, &lt, w, 80).unwrap();
        assert_eq!(tr.conjugates.len(), 2);
        let full = t.trace_to_k(w);
        // Tr_{L/K} = Tr_{M/K} o Tr_{L/M}, and Tr_{M/K} of an element of M is (1/(q-1)) Tr_{L/K}
        let via_m = t.trace_to_k(&tr.value);
        assert!(via_m.close_to(&full.mul_int(2), Ratio::from_integer(8)));
    }
}
