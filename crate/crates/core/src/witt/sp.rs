//! The Witt vectors `S_P(h)` over `O_K[[X]]` and their specialisations
//! `S_{P,a}(h)`, with the valuation criterion on the components.

use num_rational::Ratio;

use super::WittVector;
use crate::error::{LtError, Result};
use crate::padic::{poly_eval, Context, Elem, Valuation};
use crate::series::PowerSeries;

/// `P(0) = 0` and `P = X^q mod pi`.
pub fn check_frobenius_lift(p: &PowerSeries, pi: &Elem, q: u64) -> Result<()> {
    let vpi = pi.valuation().lower();
    if !p.coeff(0).is_zero() {
        return Err(LtError::NonzeroConstantTerm);
    }
    for (i, c) in p.coeffs().iter().enumerate() {
        let c = if i as u64 == q { c.sub_ref(&Elem::one(c.ring())) } else { c.clone() };
        if !c.valuation().certainly_at_least(vpi) {
            return Err(LtError::HypothesisViolated(format!("P is not X^{q} modulo pi (coefficient {i})")));
        }
    }
    Ok(())
}

/// `S_P(h)` of length `m + 1`: ghost components `h, h(P), h(P(P)), ...`.
pub fn s_p(ctx: &Context, pi: &Elem, h: &PowerSeries, p: &PowerSeries, m: usize) -> Result<WittVector<PowerSeries>> {
    check_frobenius_lift(p, pi, ctx.q())?;
    let mut ghost = vec![h.clone()];
    for n in 0..m {
        let next = ghost[n].compose(p)?;
        ghost.push(next);
    }
    WittVector::from_ghost(ghost, pi, ctx.q())
}

/// `S_{P,a}(h)` of length `m + 1`, from the ghost vector
/// `h(a), h(P(a)), h(P(P(a))), ...`. Both `h` and `P` are evaluated as the
/// polynomials given by their stored coefficients.
pub fn s_pa(ctx: &Context, pi: &Elem, h: &PowerSeries, p: &PowerSeries, a: &Elem, m: usize) -> Result<WittVector<Elem>> {
    check_frobenius_lift(p, pi, ctx.q())?;
    if !a.valuation().certainly_at_least(Ratio::new(1, 1 << 20)) {
        return Err(LtError::NonPositiveValuationPoint);
    }
    let mut point = a.clone();
    let mut ghost = Vec::with_capacity(m + 1);
    for n in 0..=m {
        ghost.push(poly_eval(h.coeffs(), &point));
        if n < m {
            point = poly_eval(p.coeffs(), &point);
        }
    }
    WittVector::from_ghost(ghost, pi, ctx.q())
}

/// Outcome of the valuation criterion for one `(h, a)`.
#[derive(Clone, Debug)]
pub struct KeyCriterion {
    /// First index with a unit component, `None` if all computed components
    /// lie in the maximal ideal.
    pub r: Option<usize>,
    /// `v_p(h(0)) / v_p(pi)`, `None` when `h(0) = 0`.
    pub r_from_constant: Option<usize>,
    pub component_valuations: Vec<Valuation>,
    /// The two sides agree on the computed length.
    pub consistent: bool,
}

/// Reads `r` off the component valuations of `S_{P,a}(h)` and compares it
/// with the valuation of the constant term of `h`, truncated to length `m+1`.
pub fn key_valuation_criterion(
    ctx: &Context,
    pi: &Elem,
    h: &PowerSeries,
    p: &PowerSeries,
    a: &Elem,
    m: usize,
) -> Result<KeyCriterion> {
    let w = s_pa(ctx, pi, h, p, a, m)?;
    let zero = Ratio::from_integer(0);
    let vals: Vec<Valuation> = w.components().iter().map(|c| c.valuation()).collect();
    let mut r = None;
    for (i, v) in vals.iter().enumerate() {
        match v {
            Valuation::Exact(x) if *x == zero => {
                r = Some(i);
                break;
            }
            Valuation::Exact(_) => {}
            Valuation::AtLeast(b) if *b > zero => {}
            Valuation::AtLeast(_) => return Err(LtError::IndeterminateValuation),
        }
    }
    let vpi = pi.valuation().exact().ok_or(LtError::IndeterminateValuation)?;
    let r_from_constant = match h.coeff(0).valuation() {
        Valuation::Exact(v) => {
            let k = v / vpi;
            if !k.is_integer() || k < zero {
                return Err(LtError::HypothesisViolated("h(0) is not an integral power of pi times a unit".into()));
            }
            Some(k.to_integer() as usize)
        }
        Valuation::AtLeast(b) if b >= vpi * Ratio::from_integer(m as i64 + 1) => None,
        Valuation::AtLeast(_) => return Err(LtError::IndeterminateValuation),
    };
    let truncated = r_from_constant.filter(|&k| k <= m);
    Ok(KeyCriterion { r, r_from_constant, component_valuations: vals, consistent: r == truncated })
}
