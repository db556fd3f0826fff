//! Truncated power series over a p-adic ring, with per-coefficient precision.

pub mod bivariate;

use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{LtError, Result};
use crate::padic::{Elem, ElemJson, Ring, Valuation};

pub use bivariate::BivariateSeries;

/// `c_0 + c_1 X + ... + c_D X^D + O(X^(D+1))`.
#[derive(Clone)]
pub struct PowerSeries {
    ring: Arc<Ring>,
    c: Vec<Elem>,
}

impl std::fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PowerSeries(D={}, [", self.degree())?;
        for (i, c) in self.c.iter().enumerate().take(8) {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        if self.c.len() > 8 {
            write!(f, ", ...")?;
        }
        write!(f, "])")
    }
}

/// Value of a series at an interior point together with the guaranteed
/// absolute precision contributed by the truncated tail.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: Elem,
    pub tail_bound: Ratio<i64>,
}

/// Result of summing a series at a point of valuation zero.
#[derive(Clone, Debug)]
pub struct BoundaryEvaluation {
    pub value: Elem,
    /// Smallest valuation among the last `window` increments (heuristic).
    pub achieved_prec: Ratio<i64>,
    /// Lower bounds for the coefficient valuations.
    pub profile: Vec<Valuation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    #[serde(rename = "D")]
    pub d: usize,
    pub ring: String,
    pub coeffs: Vec<ElemJson>,
}

impl PowerSeries {
    pub fn new(ring: &Arc<Ring>, mut coeffs: Vec<Elem>, d: usize) -> PowerSeries {
        coeffs.truncate(d + 1);
        while coeffs.len() < d + 1 {
            coeffs.push(Elem::zero(ring));
        }
        let c = coeffs.into_iter().map(|x| x.embed(ring)).collect();
        PowerSeries { ring: ring.clone(), c }
    }

    pub fn zero(ring: &Arc<Ring>, d: usize) -> PowerSeries {
        Self::new(ring, Vec::new(), d)
    }

    pub fn one(ring: &Arc<Ring>, d: usize) -> PowerSeries {
        Self::new(ring, vec![Elem::one(ring)], d)
    }

    /// The series `X`.
    pub fn x(ring: &Arc<Ring>, d: usize) -> PowerSeries {
        Self::monomial(&Elem::one(ring), 1, d)
    }

    /// `c X^k`.
    pub fn monomial(c: &Elem, k: usize, d: usize) -> PowerSeries {
        let mut s = Self::zero(c.ring(), d);
        if k <= d {
            s.c[k] = c.clone();
        }
        s
    }

    /// Polynomial with small integer coefficients (low degree first).
    pub fn from_ints(ring: &Arc<Ring>, coeffs: &[i64], d: usize) -> PowerSeries {
        Self::new(ring, coeffs.iter().map(|&x| Elem::from_i64(ring, x)).collect(), d)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    /// Truncation degree `D`.
    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &Elem {
        &self.c[i]
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.c
    }

    pub fn set_coeff(&mut self, i: usize, x: Elem) {
        self.c[i] = x.embed(&self.ring);
    }

    pub fn truncate(&self, d: usize) -> PowerSeries {
        Self::new(&self.ring, self.c.clone(), d)
    }

    pub fn embed(&self, ring: &Arc<Ring>) -> PowerSeries {
        PowerSeries { ring: ring.clone(), c: self.c.iter().map(|x| x.embed(ring)).collect() }
    }

    /// Map every coefficient.
    pub fn map(&self, f: impl Fn(&Elem) -> Elem) -> PowerSeries {
        let c: Vec<Elem> = self.c.iter().map(f).collect();
        let ring = c[0].ring().clone();
        PowerSeries { ring, c }
    }

    fn check(&self, other: &PowerSeries) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring.same_tower(&other.ring) {
            Ok(())
        } else {
            Err(LtError::RingMismatch)
        }
    }

    pub fn add(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.check(other)?;
        let d = self.degree().min(other.degree());
        let c = (0..=d).map(|i| self.c[i].add_ref(&other.c[i])).collect();
        Ok(PowerSeries { ring: self.ring.clone(), c })
    }

    pub fn sub(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.check(other)?;
        let d = self.degree().min(other.degree());
        let c = (0..=d).map(|i| self.c[i].sub_ref(&other.c[i])).collect();
        Ok(PowerSeries { ring: self.ring.clone(), c })
    }

    pub fn neg(&self) -> PowerSeries {
        self.map(|x| x.neg_ref())
    }

    pub fn scale(&self, a: &Elem) -> PowerSeries {
        let a = a.embed(&self.ring);
        self.map(|x| x.mul_ref(&a))
    }

    pub fn mul_int(&self, k: i64) -> PowerSeries {
        self.scale(&Elem::from_i64(&self.ring, k))
    }

    pub fn mul(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.check(other)?;
        let d = self.degree().min(other.degree());
        Ok(PowerSeries { ring: self.ring.clone(), c: mul_trunc(&self.c, &other.c, d + 1, &self.ring) })
    }

    pub fn pow(&self, k: u64) -> PowerSeries {
        let mut acc = PowerSeries::one(&self.ring, self.degree());
        for _ in 0..k {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Substitute `X -> X^k`.
    pub fn subst_power(&self, k: usize) -> PowerSeries {
        let d = self.degree();
        let mut out = PowerSeries::zero(&self.ring, d);
        for (i, c) in self.c.iter().enumerate() {
            if i * k > d {
                break;
            }
            out.c[i * k] = c.clone();
        }
        out
    }

    pub fn derivative(&self) -> PowerSeries {
        let d = self.degree();
        if d == 0 {
            return PowerSeries::zero(&self.ring, 0);
        }
        let c = (1..=d).map(|i| self.c[i].mul_int(i as i64)).collect();
        PowerSeries::new(&self.ring, c, d - 1)
    }

    /// `f(g)` truncated at the smaller degree. Requires `g(0) = 0` exactly,
    /// or at least indistinguishable from zero with positive precision.
    pub fn compose(&self, g: &PowerSeries) -> Result<PowerSeries> {
        let g0 = &g.c[0];
        if !(g0.is_exact_zero() || (g0.is_zero() && g0.abs_prec() > 0)) {
            return Err(LtError::NonzeroConstantTerm);
        }
        let ring = if self.ring.dim() >= g.ring.dim() { self.ring.clone() } else { g.ring.clone() };
        let d = self.degree().min(g.degree());
        let gc: Vec<Elem> = {
            let mut v: Vec<Elem> = g.c[..=d].iter().map(|x| x.embed(&ring)).collect();
            v[0] = Elem::zero(&ring);
            v
        };
        // Brent-Kung: f = sum_j F_j(g) g^(jm) with blocks F_j of m coefficients,
        // summed by Horner in g^m; the accumulator at block j only matters
        // modulo X^(d+1-jm).
        let m = ((d + 1) as f64).sqrt().ceil().max(1.0) as usize;
        let mut gp: Vec<Vec<Elem>> = vec![PowerSeries::one(&ring, d).c];
        for i in 1..=m {
            let next = mul_trunc(&gp[i - 1], &gc, d + 1, &ring);
            gp.push(next);
        }
        let block = |j: usize, len: usize| -> Vec<Elem> {
            let mut out = vec![Elem::zero(&ring); len];
            for i in 0..m {
                let Some(c) = self.c.get(j * m + i) else { break };
                if j * m + i > d || c.is_exact_zero() {
                    continue;
                }
                let c = c.embed(&ring);
                for (k, x) in gp[i].iter().enumerate().take(len) {
                    if !x.is_exact_zero() {
                        out[k] = out[k].add_ref(&x.mul_ref(&c));
                    }
                }
            }
            out
        };
        let last = d / m;
        let mut acc = block(last, d + 1 - last * m);
        for j in (0..last).rev() {
            let len = d + 1 - j * m;
            let mut next = mul_trunc(&acc, &gp[m], len, &ring);
            for (k, b) in block(j, len).into_iter().enumerate() {
                if !b.is_exact_zero() {
                    next[k] = next[k].add_ref(&b);
                }
            }
            acc = next;
        }
        Ok(PowerSeries::new(&ring, acc, d))
    }

    /// Compositional inverse, by Newton iteration on `f(h) = X`.
    pub fn reversion(&self) -> Result<PowerSeries> {
        let d = self.degree();
        if !self.c[0].is_exact_zero() && !(self.c[0].is_zero() && self.c[0].abs_prec() > 0) {
            return Err(LtError::NonzeroConstantTerm);
        }
        if d == 0 {
            return Ok(PowerSeries::zero(&self.ring, 0));
        }
        let c1 = &self.c[1];
        if c1.v_units() != Some(0) {
            return Err(LtError::NonUnitLinearCoefficient);
        }
        let inv1 = c1.inv()?;
        let mut h = PowerSeries::monomial(&inv1, 1, 1);
        let mut prec = 1;
        while prec < d {
            prec = (2 * prec).min(d);
            let h_ext = h.truncate(prec);
            let f_t = self.truncate(prec);
            let fh = f_t.compose(&h_ext)?;
            let x = PowerSeries::x(&self.ring, prec);
            let resid = fh.sub(&x)?;
            // f'(h) h' = 1 + resid'
            let one_plus = PowerSeries::one(&self.ring, prec).add(&resid.derivative_full())?;
            let corr = resid.mul(&h_ext.derivative_full())?.mul(&one_plus.reciprocal()?)?;
            h = h_ext.sub(&corr)?;
            h.c[0] = Elem::zero(&self.ring);
        }
        Ok(h)
    }

    /// Derivative kept at the same truncation degree; the top coefficient
    /// is never read by callers that truncate first.
    fn derivative_full(&self) -> PowerSeries {
        let d = self.degree();
        let mut c: Vec<Elem> = (1..=d).map(|i| self.c[i].mul_int(i as i64)).collect();
        c.push(Elem::zero(&self.ring));
        PowerSeries { ring: self.ring.clone(), c }
    }

    /// Multiplicative inverse; requires a unit constant term.
    pub fn reciprocal(&self) -> Result<PowerSeries> {
        let c0 = &self.c[0];
        if c0.v_units() != Some(0) {
            return Err(LtError::NonUnitConstantTerm);
        }
        let inv0 = c0.inv()?;
        let d = self.degree();
        let nz: Vec<usize> = (1..=d).filter(|&i| !self.c[i].is_exact_zero()).collect();
        let mut g: Vec<Elem> = Vec::with_capacity(d + 1);
        g.push(inv0.clone());
        for k in 1..=d {
            let mut acc = Elem::zero(&self.ring);
            for &i in nz.iter().take_while(|&&i| i <= k) {
                acc = acc.add_ref(&self.c[i].mul_ref(&g[k - i]));
            }
            g.push(acc.mul_ref(&inv0).neg_ref());
        }
        Ok(PowerSeries { ring: self.ring.clone(), c: g })
    }

    /// Lower bounds for the coefficient valuations.
    pub fn profile(&self) -> Vec<Valuation> {
        self.c.iter().map(|x| x.valuation()).collect()
    }

    /// Smallest valuation among determinate coefficients.
    pub fn min_valuation(&self) -> Option<Ratio<i64>> {
        self.c.iter().filter_map(|x| x.valuation().exact()).min()
    }

    /// First determinate coefficient of negative valuation.
    pub fn first_non_integral(&self) -> Option<(usize, Ratio<i64>)> {
        self.c.iter().enumerate().find_map(|(i, x)| match x.valuation() {
            Valuation::Exact(v) if v < Ratio::from_integer(0) => Some((i, v)),
            _ => None,
        })
    }

    pub fn is_integral(&self) -> bool {
        self.first_non_integral().is_none()
    }

    /// Number of coefficients whose valuation is determinate.
    pub fn determinate_count(&self) -> usize {
        self.c.iter().filter(|x| !x.is_zero()).count()
    }

    /// Coefficientwise agreement at the lower of the two precisions.
    pub fn agrees_with(&self, other: &PowerSeries) -> bool {
        let d = self.degree().min(other.degree());
        (0..=d).all(|i| self.c[i].agrees_with(&other.c[i]))
    }

    /// Smallest lower bound for `v_p(a_i - b_i)` over all coefficients.
    pub fn agreement(&self, other: &PowerSeries) -> Ratio<i64> {
        let d = self.degree().min(other.degree());
        (0..=d)
            .map(|i| self.c[i].sub_ref(&other.c[i]).valuation().lower())
            .min()
            .unwrap()
    }

    /// Evaluate at `x` with `v_p(x) > 0`, assuming every omitted coefficient
    /// has valuation at least `min(0, smallest coefficient bound)`.
    pub fn eval_interior(&self, x: &Elem) -> Result<Evaluation> {
        let floor = self
            .c
            .iter()
            .map(|c| c.valuation().lower())
            .min()
            .unwrap()
            .min(Ratio::from_integer(0));
        self.eval_interior_with_floor(x, floor)
    }

    /// Evaluate at `x` with `v_p(x) > 0`, given a floor `m` for the valuations
    /// of the omitted tail coefficients.
    pub fn eval_interior_with_floor(&self, x: &Elem, m: Ratio<i64>) -> Result<Evaluation> {
        let vx = match x.valuation() {
            Valuation::Exact(v) => v,
            Valuation::AtLeast(v) => v,
        };
        if vx <= Ratio::from_integer(0) {
            return Err(LtError::NonPositiveValuationPoint);
        }
        let d = self.degree() as i64;
        let tail = vx * Ratio::from_integer(d + 1) + m;
        let ring = if self.ring.dim() >= x.ring().dim() { self.ring.clone() } else { x.ring().clone() };
        let x = x.embed(&ring);
        let mut acc = Elem::zero(&ring);
        for c in self.c.iter().rev() {
            acc = acc.mul_ref(&x).add_ref(&c.embed(&ring));
        }
        let value = acc.with_abs_prec(tail.floor().to_integer());
        Ok(Evaluation { value, tail_bound: tail })
    }

    /// Sum the series at a point with `v_p(x) >= 0`. The precision reported is
    /// heuristic and must be certified by the caller.
    pub fn eval_boundary(&self, x: &Elem, window: usize) -> Result<BoundaryEvaluation> {
        if x.valuation().lower() < Ratio::from_integer(0) {
            return Err(LtError::NonPositiveValuationPoint);
        }
        let ring = if self.ring.dim() >= x.ring().dim() { self.ring.clone() } else { x.ring().clone() };
        let x = x.embed(&ring);
        let d = self.degree();
        let window = window.clamp(1, d + 1);
        let mut sum = Elem::zero(&ring);
        let mut xk = Elem::one(&ring);
        let mut incr_vals: Vec<Option<Ratio<i64>>> = Vec::with_capacity(d + 1);
        for (k, c) in self.c.iter().enumerate() {
            if k > 0 {
                xk = xk.mul_ref(&x);
            }
            if c.is_exact_zero() {
                incr_vals.push(None);
                continue;
            }
            let t = c.embed(&ring).mul_ref(&xk);
            incr_vals.push(Some(t.valuation().lower()));
            sum = sum.add_ref(&t);
        }
        let last = &incr_vals[d + 1 - window..];
        let first = &incr_vals[..window];
        let min_of = |s: &[Option<Ratio<i64>>]| s.iter().flatten().min().copied();
        let full = Ratio::from_integer(sum.abs_prec());
        let achieved = min_of(last).map_or(full, |v| v.min(full));
        if let (Some(a), Some(b)) = (min_of(last), min_of(first)) {
            if a <= b {
                return Err(LtError::NoStabilization(format!(
                    "increment valuations stay at {a} over the last {window} terms"
                )));
            }
        }
        Ok(BoundaryEvaluation { value: sum, achieved_prec: achieved, profile: self.profile() })
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            d: self.degree(),
            ring: format!("{:?}", self.ring),
            coeffs: self.c.iter().map(|x| x.to_json()).collect(),
        }
    }

    pub fn from_json(ring: &Arc<Ring>, j: &SeriesJson) -> Result<PowerSeries> {
        let c = j.coeffs.iter().map(|x| Elem::from_json(ring, x)).collect::<Result<Vec<_>>>()?;
        Ok(PowerSeries::new(ring, c, j.d))
    }
}

/// Product of two coefficient vectors modulo `X^len`, skipping exact zeros.
pub(crate) fn mul_trunc(a: &[Elem], b: &[Elem], len: usize, ring: &Arc<Ring>) -> Vec<Elem> {
    let na: Vec<(usize, Elem)> = a
        .iter()
        .enumerate()
        .take(len)
        .filter(|(_, x)| !x.is_exact_zero())
        .map(|(i, x)| (i, x.embed(ring)))
        .collect();
    let nb: Vec<(usize, Elem)> = b
        .iter()
        .enumerate()
        .take(len)
        .filter(|(_, x)| !x.is_exact_zero())
        .map(|(i, x)| (i, x.embed(ring)))
        .collect();
    let mut out: Vec<Elem> = vec![Elem::zero(ring); len];
    for (i, x) in &na {
        for (j, y) in &nb {
            let k = i + j;
            if k >= len {
                break;
            }
            out[k] = out[k].add_ref(&x.mul_ref(y));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_context;

    #[test]
    fn geometric_series() {
        let k = make_context(3, 1, None, 30).unwrap();
        let r = k.ring();
        let one_minus_x = PowerSeries::from_ints(r, &[1, -1], 20);
        let geo = PowerSeries::from_ints(r, &[1; 21], 20);
        let prod = one_minus_x.mul(&geo).unwrap();
        assert!(prod.agrees_with(&PowerSeries::one(r, 20)));
        assert!(one_minus_x.reciprocal().unwrap().agrees_with(&geo));
    }

    #[test]
    fn compose_small() {
        let k = make_context(3, 1, None, 30).unwrap();
        let r = k.ring();
        let f = PowerSeries::from_ints(r, &[0, 1, 1], 10);
        let g = PowerSeries::from_ints(r, &[0, 2], 10);
        assert!(f.compose(&g).unwrap().agrees_with(&PowerSeries::from_ints(r, &[0, 2, 4], 10)));
        let c = PowerSeries::from_ints(r, &[1, 1], 10);
        assert_eq!(f.compose(&c).unwrap_err(), LtError::NonzeroConstantTerm);
    }

    #[test]
    fn mobius_reversion() {
        let k = make_context(5, 1, None, 30).unwrap();
        let r = k.ring();
        let d = 25;
        // X/(1-X) and X/(1+X)
        let f = PowerSeries::from_ints(r, &[0; 1], d)
            .add(&PowerSeries::new(r, (0..=d).map(|i| Elem::from_i64(r, (i > 0) as i64)).collect(), d))
            .unwrap();
        let g = PowerSeries::new(
            r,
            (0..=d).map(|i| Elem::from_i64(r, if i == 0 { 0 } else if i % 2 == 1 { 1 } else { -1 })).collect(),
            d,
        );
        assert!(f.reversion().unwrap().agrees_with(&g));
        assert!(f.compose(&g).unwrap().agrees_with(&PowerSeries::x(r, d)));
    }

    #[test]
    fn interior_evaluation() {
        let k = make_context(3, 1, None, 30).unwrap();
        let r = k.ring();
        let geo = PowerSeries::from_ints(r, &[1; 21], 20);
        let ev = geo.eval_interior(&k.elem(3)).unwrap();
        let expect = k.one().div_ref(&k.elem(-2)).unwrap();
        assert!(ev.value.agrees_with(&expect));
        assert_eq!(ev.value.abs_prec(), 21);
        let x = PowerSeries::x(r, 20);
        let ev = x.eval_interior(k.pi()).unwrap();
        assert!(ev.value.agrees_with(k.pi()));
        assert_eq!(ev.tail_bound, Ratio::from_integer(21));
        assert_eq!(x.eval_interior(&k.one()).unwrap_err(), LtError::NonPositiveValuationPoint);
    }

    #[test]
    fn boundary_evaluation() {
        let k = make_context(3, 1, None, 30).unwrap();
        let r = k.ring();
        let poly = PowerSeries::from_ints(r, &[1, 2, 3], 30);
        let ev = poly.eval_boundary(&k.one(), 5).unwrap();
        assert!(ev.value.agrees_with(&k.elem(6)));
        assert_eq!(ev.achieved_prec, Ratio::from_integer(30));
        let geo = PowerSeries::from_ints(r, &[1; 31], 30);
        assert!(matches!(geo.eval_boundary(&k.one(), 5), Err(LtError::NoStabilization(_))));
    }
}
