//! Lubin-Tate series, their formal groups, logarithms, exponentials and
//! endomorphisms `[a]_P`.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use parking_lot::Mutex;
use rand::Rng as _;

use crate::error::{LtError, Result};
use crate::padic::{Context, Elem, ElemJson, Ring};
use crate::series::{mul_trunc, BivariateSeries, Evaluation, PowerSeries};

/// Named families of Lubin-Tate polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LtPreset {
    /// `X^q + pi X`.
    Canonical,
    /// `(1 + X)^p - 1`, only for `K = Q_p` and `pi = p`.
    Multiplicative,
    /// `X^q + sum_{2<=i<q} pi r_i X^i + pi X` with residues `r_i` drawn uniformly from `k`.
    Random(u64),
}

/// Coefficients (low degree first) of a Lubin-Tate polynomial for `pi`.
pub fn lt_polynomial(ctx: &Context, pi: &Elem, preset: &LtPreset) -> Result<Vec<Elem>> {
    let q = ctx.q() as usize;
    let mut c = vec![ctx.zero(); q + 1];
    c[q] = ctx.one();
    match preset {
        LtPreset::Canonical => {
            c[1] = c[1].add_ref(pi);
        }
        LtPreset::Multiplicative => {
            if ctx.f() != 1 || ctx.e() != 1 || !pi.agrees_with(&ctx.elem(ctx.p() as i64)) {
                return Err(LtError::InvalidParameter(
                    "the multiplicative preset needs K = Q_p and pi = p".into(),
                ));
            }
            let p = ctx.p() as usize;
            let mut binom = BigInt::from(1);
            for (i, ci) in c.iter_mut().enumerate().take(p + 1).skip(1) {
                binom = binom * BigInt::from(p + 1 - i) / BigInt::from(i);
                *ci = Elem::from_bigint(ctx.ring(), &binom);
            }
        }
        LtPreset::Random(seed) => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
            c[1] = pi.clone();
            let k = ctx.residue_field();
            let elems = k.elements();
            for ci in c.iter_mut().take(q).skip(2) {
                let r = &elems[rng.gen_range(0..elems.len())];
                let coords: Vec<i64> = r.iter().map(|&x| x as i64).collect();
                *ci = ctx.unram_elem(&coords).mul_ref(pi);
            }
        }
    }
    Ok(c)
}

/// `P = pi X mod X^2` and `P = X^q mod pi`, checked at the available precision.
pub fn lt_validate(ctx: &Context, p_series: &PowerSeries, pi: &Elem) -> bool {
    let q = ctx.q() as usize;
    if p_series.degree() < q {
        return false;
    }
    if pi.v_units() != Some(1) {
        return false;
    }
    if !p_series.coeff(0).is_zero() || !p_series.coeff(1).agrees_with(pi) {
        return false;
    }
    // coefficients other than X^q are divisible by pi; X^q is 1 mod pi
    p_series.coeffs().iter().enumerate().all(|(i, c)| {
        let c = if i == q { c.sub_ref(&ctx.one()) } else { c.clone() };
        c.is_zero() || c.v_units().is_some_and(|v| v >= 1)
    })
}

pub struct LubinTate {
    ctx: Context,
    pi: Elem,
    poly: Option<Vec<Elem>>,
    p_series: PowerSeries,
    log: PowerSeries,
    exp: PowerSeries,
    log_powers: Mutex<Option<Arc<Vec<Vec<Elem>>>>>,
    groups: Mutex<HashMap<usize, Arc<BivariateSeries>>>,
    brackets: Mutex<HashMap<(ElemJson, usize), Arc<PowerSeries>>>,
}

impl std::fmt::Debug for LubinTate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LubinTate({:?}, pi={}, D={})", self.ctx, self.pi, self.degree())
    }
}

impl LubinTate {
    /// Lubin-Tate data for a polynomial `P` (low degree first) at series degree `d`.
    pub fn from_polynomial(ctx: &Context, pi: &Elem, coeffs: Vec<Elem>, d: usize) -> Result<LubinTate> {
        let p_series = PowerSeries::new(ctx.ring(), coeffs.clone(), d.max(coeffs.len()));
        let mut lt = Self::from_series(ctx, pi, p_series.truncate(d.max(ctx.q() as usize)))?;
        lt.poly = Some(coeffs);
        Ok(lt)
    }

    pub fn from_preset(ctx: &Context, pi: &Elem, preset: &LtPreset, d: usize) -> Result<LubinTate> {
        Self::from_polynomial(ctx, pi, lt_polynomial(ctx, pi, preset)?, d)
    }

    /// Lubin-Tate data for a series `P` (truncated at its degree).
    pub fn from_series(ctx: &Context, pi: &Elem, p_series: PowerSeries) -> Result<LubinTate> {
        if !lt_validate(ctx, &p_series, pi) {
            return Err(LtError::InvalidParameter("not a Lubin-Tate series for the given uniformizer".into()));
        }
        let log = lt_log(&p_series, pi)?;
        let exp = log.reversion()?;
        Ok(LubinTate {
            ctx: ctx.clone(),
            pi: pi.clone(),
            poly: None,
            p_series,
            log,
            exp,
            log_powers: Mutex::new(None),
            groups: Mutex::new(HashMap::new()),
            brackets: Mutex::new(HashMap::new()),
        })
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.ctx.ring()
    }

    pub fn pi(&self) -> &Elem {
        &self.pi
    }

    pub fn q(&self) -> u64 {
        self.ctx.q()
    }

    pub fn degree(&self) -> usize {
        self.log.degree()
    }

    pub fn series(&self) -> &PowerSeries {
        &self.p_series
    }

    /// The polynomial `P`, when the data was built from one.
    pub fn polynomial(&self) -> Option<&[Elem]> {
        self.poly.as_deref()
    }

    pub fn log(&self) -> &PowerSeries {
        &self.log
    }

    pub fn exp(&self) -> &PowerSeries {
        &self.exp
    }

    /// Coefficients of `log^k` modulo `X^(d+1)` for `k <= d`, possibly from a
    /// larger cached table.
    fn log_powers(&self, d: usize) -> Arc<Vec<Vec<Elem>>> {
        let mut slot = self.log_powers.lock();
        if let Some(t) = slot.as_ref() {
            if t.len() > d {
                return t.clone();
            }
        }
        let ring = self.ring();
        let mut out = vec![PowerSeries::one(ring, d).coeffs().to_vec()];
        for k in 1..=d {
            let next = mul_trunc(&out[k - 1], self.log.coeffs(), d + 1, ring);
            out.push(next);
        }
        let t = Arc::new(out);
        *slot = Some(t.clone());
        t
    }

    /// `[a]_P = exp(a log X)` at the full series degree.
    pub fn bracket(&self, a: &Elem) -> Result<Arc<PowerSeries>> {
        self.bracket_at(a, self.degree())
    }

    /// `[a]_P` truncated at degree `d <= D`.
    pub fn bracket_at(&self, a: &Elem, d: usize) -> Result<Arc<PowerSeries>> {
        let d = d.min(self.degree());
        let key = (a.to_json(), d);
        if let Some(s) = self.brackets.lock().get(&key) {
            return Ok(s.clone());
        }
        let s = Arc::new(self.bracket_uncached(a, d)?);
        self.brackets.lock().insert(key, s.clone());
        Ok(s)
    }

    fn bracket_uncached(&self, a: &Elem, d: usize) -> Result<PowerSeries> {
        let ring = self.ring();
        if a.valuation().lower() < Ratio::from_integer(0) {
            return Err(LtError::InvalidParameter("[a]_P needs a in O_K".into()));
        }
        let a = a.embed(ring);
        let pows = self.log_powers(d);
        let mut ak = Elem::one(ring);
        let mut scaled = Vec::with_capacity(d + 1);
        for k in 0..=d {
            if k > 0 {
                ak = ak.mul_ref(&a);
            }
            scaled.push(self.exp.coeff(k).mul_ref(&ak));
        }
        let mut c = vec![Elem::zero(ring); d + 1];
        for (m, cm) in c.iter_mut().enumerate().skip(1) {
            let mut acc = Elem::zero(ring);
            for (k, bk) in scaled.iter().enumerate().take(m + 1).skip(1) {
                let t = &pows[k][m];
                if !t.is_exact_zero() && !bk.is_exact_zero() {
                    acc = acc.add_ref(&bk.mul_ref(t));
                }
            }
            *cm = acc;
        }
        let s = PowerSeries::new(ring, c, d);
        if let Some((i, v)) = s.first_non_integral() {
            return Err(LtError::IntegralityViolation { index: format!("[a]_P X^{i}"), valuation: v.to_string() });
        }
        Ok(s)
    }

    /// The formal group `F_P = exp(log X + log Y)` truncated at total degree `d`.
    pub fn formal_group(&self, d: usize) -> Result<Arc<BivariateSeries>> {
        let d = d.min(self.degree());
        if let Some(f) = self.groups.lock().get(&d) {
            return Ok(f.clone());
        }
        let mut f = self.assemble_group(d);
        let cap = self.ring().cap() as i64;
        let lowest = f.iter().map(|(_, _, c)| c.abs_prec()).min().unwrap_or(cap);
        if lowest < cap {
            if let Some(g) = self.group_with_guard_digits(d, cap - lowest + 2)? {
                f = g;
            }
        }
        if let Some((i, j, v)) = f.first_non_integral() {
            return Err(LtError::IntegralityViolation { index: format!("F_P X^{i} Y^{j}"), valuation: v.to_string() });
        }
        let f = Arc::new(f);
        self.groups.lock().insert(d, f.clone());
        Ok(f)
    }

    /// The group law is integral but `exp` has denominators, so the direct
    /// formula loses digits. For a polynomial `P` the coefficients are taken as
    /// exact and the group is recomputed with `guard` extra digits.
    fn group_with_guard_digits(&self, d: usize, guard: i64) -> Result<Option<BivariateSeries>> {
        let Some(poly) = &self.poly else { return Ok(None) };
        let ctx = self.ctx.with_precision(self.ctx.precision() + guard as u32)?;
        let wide = ctx.ring();
        let lift = |e: &Elem| e.lift_representative(wide);
        let coeffs = poly.iter().map(lift).collect();
        let lt = LubinTate::from_polynomial(&ctx, &lift(&self.pi), coeffs, d)?;
        let g = lt.assemble_group(d);
        let ring = self.ring();
        Ok(Some(BivariateSeries::from_fn(ring, d, |a, b| {
            let c = g.coeff(a, b);
            c.lift_representative(ring).with_abs_prec(c.abs_prec())
        })))
    }

    fn assemble_group(&self, d: usize) -> BivariateSeries {
        let ring = self.ring();
        let pows = self.log_powers(d);
        // b_{i+j} binom(i+j, i)
        let mut weights: Vec<Vec<Elem>> = Vec::with_capacity(d + 1);
        for i in 0..=d {
            let mut row = Vec::with_capacity(d + 1 - i);
            let mut binom = BigInt::from(1);
            for j in 0..=d - i {
                if j > 0 {
                    binom = binom * BigInt::from(i + j) / BigInt::from(j);
                }
                row.push(self.exp.coeff(i + j).mul_ref(&Elem::from_bigint(ring, &binom)));
            }
            weights.push(row);
        }
        // F = L^T W L with L[i][a] the X^a coefficient of log^i; the inner
        // product M = W L is shared by every a.
        let m: Vec<Vec<Elem>> = (0..=d)
            .map(|i| {
                (0..=d - i)
                    .map(|b| {
                        let mut acc = Elem::zero(ring);
                        for j in 0..=b.min(d - i) {
                            let (w, lb) = (&weights[i][j], &pows[j][b]);
                            if i + j > 0 && !w.is_exact_zero() && !lb.is_exact_zero() {
                                acc = acc.add_ref(&w.mul_ref(lb));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        BivariateSeries::from_fn(ring, d, |a, b| {
            let mut acc = Elem::zero(ring);
            for (i, mi) in m.iter().enumerate().take(a + 1) {
                let la = &pows[i][a];
                if !la.is_exact_zero() && !mi[b].is_exact_zero() {
                    acc = acc.add_ref(&la.mul_ref(&mi[b]));
                }
            }
            acc
        })
    }

    /// `P(x)`, exactly when `P` is a polynomial.
    pub fn eval_p(&self, x: &Elem) -> Result<Elem> {
        match &self.poly {
            Some(c) => Ok(crate::padic::poly_eval(c, x)),
            None => Ok(self.p_series.eval_interior_with_floor(x, Ratio::from_integer(0))?.value),
        }
    }

    /// `[a]_P(x)` for `v_p(x) > 0`, using the bracket series at degree `d`.
    pub fn eval_bracket(&self, a: &Elem, x: &Elem, d: usize) -> Result<Evaluation> {
        let s = self.bracket_at(a, d)?;
        s.eval_interior_with_floor(x, Ratio::from_integer(0))
    }

    /// `x +_F y` using `F_P` truncated at total degree `d`.
    pub fn add_points(&self, x: &Elem, y: &Elem, d: usize) -> Result<Elem> {
        if x.is_exact_zero() {
            return Ok(y.clone());
        }
        if y.is_exact_zero() {
            return Ok(x.clone());
        }
        Ok(self.formal_group(d)?.eval(x, y)?.value)
    }

    /// Left fold of `+_F` over the values.
    pub fn fg_sum(&self, values: &[Elem], d: usize) -> Result<Elem> {
        let f = self.formal_group(d)?;
        fg_sum(&f, values)
    }
}

/// Left fold of the group law over the values.
pub fn fg_sum(f: &BivariateSeries, values: &[Elem]) -> Result<Elem> {
    let mut it = values.iter();
    let mut acc = it.next().ok_or_else(|| LtError::InvalidParameter("empty sum".into()))?.clone();
    if acc.valuation().lower() <= Ratio::from_integer(0) && !acc.is_exact_zero() {
        return Err(LtError::NonPositiveValuationPoint);
    }
    for v in it {
        if v.is_exact_zero() {
            continue;
        }
        if acc.is_exact_zero() {
            acc = v.clone();
            continue;
        }
        acc = f.eval(&acc, v)?.value;
    }
    Ok(acc)
}

/// The normalized logarithm `L` with `L(P(X)) = pi L(X)`.
pub fn lt_log(p_series: &PowerSeries, pi: &Elem) -> Result<PowerSeries> {
    let ring = p_series.ring().clone();
    let d = p_series.degree();
    let pi = pi.embed(&ring);
    // rows[k] = coefficients of P^k
    let mut pk: Vec<Vec<Elem>> = Vec::with_capacity(d + 1);
    pk.push(PowerSeries::one(&ring, d).coeffs().to_vec());
    for k in 1..d {
        let next = mul_trunc(&pk[k - 1], p_series.coeffs(), d + 1, &ring);
        pk.push(next);
    }
    let mut l = vec![Elem::zero(&ring); d + 1];
    if d >= 1 {
        l[1] = Elem::one(&ring);
    }
    let mut pim = pi.clone();
    for m in 2..=d {
        pim = pim.mul_ref(&pi);
        let mut acc = Elem::zero(&ring);
        for k in 1..m {
            let t = &pk[k][m];
            if !t.is_exact_zero() && !l[k].is_exact_zero() {
                acc = acc.add_ref(&l[k].mul_ref(t));
            }
        }
        let denom = pi.sub_ref(&pim);
        l[m] = acc.div_ref(&denom)?;
    }
    Ok(PowerSeries::new(&ring, l, d))
}

/// Output of the functional-equation construction.
pub struct Hazewinkel {
    pub log: PowerSeries,
    pub lt: LubinTate,
    pub group: Arc<BivariateSeries>,
}

/// `f_g = g + f_g(X^q)/pi`, then `P = f_g^{-1}(pi f_g)` and `F = f_g^{-1}(f_g(X) + f_g(Y))`.
pub fn hazewinkel(ctx: &Context, pi: &Elem, g: &PowerSeries, d_biv: usize) -> Result<Hazewinkel> {
    let ring = ctx.ring();
    let d = g.degree();
    if !g.coeff(0).is_zero() || !g.coeff(1).agrees_with(&ctx.one()) {
        return Err(LtError::InvalidParameter("g must be X mod X^2".into()));
    }
    if let Some((i, v)) = g.first_non_integral() {
        return Err(LtError::IntegralityViolation { index: format!("g X^{i}"), valuation: v.to_string() });
    }
    let q = ctx.q() as usize;
    let pi_inv = pi.inv()?;
    let mut f: Vec<Elem> = vec![Elem::zero(ring); d + 1];
    for m in 1..=d {
        let mut c = g.coeff(m).clone();
        if m % q == 0 {
            c = c.add_ref(&f[m / q].mul_ref(&pi_inv));
        }
        f[m] = c;
    }
    let log = PowerSeries::new(ring, f, d);
    let exp = log.reversion()?;
    let p_series = exp.compose(&log.scale(pi))?;
    if let Some((i, v)) = p_series.first_non_integral() {
        return Err(LtError::IntegralityViolation { index: format!("P X^{i}"), valuation: v.to_string() });
    }
    let lt = LubinTate::from_series(ctx, pi, p_series)?;
    let lx = BivariateSeries::from_univariate(&log.truncate(d_biv), false);
    let ly = BivariateSeries::from_univariate(&log.truncate(d_biv), true);
    let group = lx.add(&ly)?.compose_into(&exp.truncate(d_biv))?;
    if let Some((i, j, v)) = group.first_non_integral() {
        return Err(LtError::IntegralityViolation { index: format!("F X^{i} Y^{j}"), valuation: v.to_string() });
    }
    Ok(Hazewinkel { log, lt, group: Arc::new(group) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_context;

    #[test]
    fn canonical_polynomial_is_lubin_tate() {
        let k = make_context(3, 1, None, 30).unwrap();
        let c = lt_polynomial(&k, k.pi(), &LtPreset::Canonical).unwrap();
        let s = PowerSeries::new(k.ring(), c, 10);
        assert!(lt_validate(&k, &s, k.pi()));
        let bad = PowerSeries::from_ints(k.ring(), &[0, 1, 0, 1], 10);
        assert!(!lt_validate(&k, &bad, k.pi()));
    }

    #[test]
    fn bracket_pi_is_p() {
        let k = make_context(3, 1, None, 40).unwrap();
        let lt = LubinTate::from_preset(&k, k.pi(), &LtPreset::Canonical, 20).unwrap();
        let b = lt.bracket(k.pi()).unwrap();
        assert!(b.agrees_with(lt.series()));
        let one = lt.bracket(&k.one()).unwrap();
        assert!(one.agrees_with(&PowerSeries::x(k.ring(), 20)));
    }

    #[test]
    fn multiplicative_group_law() {
        let k = make_context(3, 1, None, 40).unwrap();
        let lt = LubinTate::from_preset(&k, k.pi(), &LtPreset::Multiplicative, 20).unwrap();
        let f = lt.formal_group(10).unwrap();
        let gm = BivariateSeries::from_terms(k.ring(), 10, &[(1, 0, 1), (0, 1, 1), (1, 1, 1)]);
        assert!(f.agrees_with(&gm));
    }
}
