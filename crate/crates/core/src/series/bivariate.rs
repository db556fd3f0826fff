//! Bivariate series truncated at total degree `D`, stored triangularly.

use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{mul_trunc, Evaluation, PowerSeries};
use crate::error::{LtError, Result};
use crate::padic::{Elem, ElemJson, Ring, Valuation};

/// `sum c_ij X^i Y^j` over `i + j <= D`.
#[derive(Clone, Debug)]
pub struct BivariateSeries {
    ring: Arc<Ring>,
    d: usize,
    /// `rows[i][j] = c_ij`, `rows[i].len() == D - i + 1`.
    rows: Vec<Vec<Elem>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BivariateJson {
    #[serde(rename = "D")]
    pub d: usize,
    pub ring: String,
    /// Row `i` lists `c_{i,0}, ..., c_{i,D-i}`.
    pub rows: Vec<Vec<ElemJson>>,
}

impl BivariateSeries {
    pub fn zero(ring: &Arc<Ring>, d: usize) -> BivariateSeries {
        let rows = (0..=d).map(|i| vec![Elem::zero(ring); d - i + 1]).collect();
        BivariateSeries { ring: ring.clone(), d, rows }
    }

    pub fn from_fn(ring: &Arc<Ring>, d: usize, mut f: impl FnMut(usize, usize) -> Elem) -> BivariateSeries {
        let rows = (0..=d).map(|i| (0..=d - i).map(|j| f(i, j).embed(ring)).collect()).collect();
        BivariateSeries { ring: ring.clone(), d, rows }
    }

    /// `X^i Y^j` with integer coefficients, e.g. `&[(1,0,1),(0,1,1),(1,1,1)]` for `X+Y+XY`.
    pub fn from_terms(ring: &Arc<Ring>, d: usize, terms: &[(usize, usize, i64)]) -> BivariateSeries {
        let mut s = Self::zero(ring, d);
        for &(i, j, c) in terms {
            if i + j <= d {
                s.rows[i][j] = s.rows[i][j].add_ref(&Elem::from_i64(ring, c));
            }
        }
        s
    }

    /// `f(X)` viewed as a bivariate series (or `f(Y)` when `in_y`).
    pub fn from_univariate(f: &PowerSeries, in_y: bool) -> BivariateSeries {
        let d = f.degree();
        Self::from_fn(f.ring(), d, |i, j| {
            let (k, other) = if in_y { (j, i) } else { (i, j) };
            if other == 0 {
                f.coeff(k).clone()
            } else {
                Elem::zero(f.ring())
            }
        })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn coeff(&self, i: usize, j: usize) -> &Elem {
        &self.rows[i][j]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Elem)> {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().enumerate().map(move |(j, c)| (i, j, c)))
    }

    pub fn add(&self, other: &BivariateSeries) -> Result<BivariateSeries> {
        self.check(other)?;
        let d = self.d.min(other.d);
        Ok(Self::from_fn(&self.ring, d, |i, j| self.rows[i][j].add_ref(&other.rows[i][j])))
    }

    pub fn sub(&self, other: &BivariateSeries) -> Result<BivariateSeries> {
        self.check(other)?;
        let d = self.d.min(other.d);
        Ok(Self::from_fn(&self.ring, d, |i, j| self.rows[i][j].sub_ref(&other.rows[i][j])))
    }

    fn check(&self, other: &BivariateSeries) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring.same_tower(&other.ring) {
            Ok(())
        } else {
            Err(LtError::RingMismatch)
        }
    }

    pub fn mul(&self, other: &BivariateSeries) -> Result<BivariateSeries> {
        self.check(other)?;
        let d = self.d.min(other.d);
        let mut out = Self::zero(&self.ring, d);
        let nz = |s: &BivariateSeries| -> Vec<(usize, usize, Elem)> {
            s.iter()
                .filter(|(i, j, c)| i + j <= d && !c.is_exact_zero())
                .map(|(i, j, c)| (i, j, c.clone()))
                .collect()
        };
        let a = nz(self);
        let b = nz(other);
        for (i1, j1, x) in &a {
            for (i2, j2, y) in &b {
                if i1 + j1 + i2 + j2 > d {
                    continue;
                }
                let t = &mut out.rows[i1 + i2][j1 + j2];
                *t = t.add_ref(&x.mul_ref(y));
            }
        }
        Ok(out)
    }

    /// `f(self)`, requiring a zero constant term.
    pub fn compose_into(&self, f: &PowerSeries) -> Result<BivariateSeries> {
        if !self.rows[0][0].is_zero() {
            return Err(LtError::NonzeroConstantTerm);
        }
        let d = self.d.min(f.degree());
        let mut inner = self.truncate(d);
        inner.rows[0][0] = Elem::zero(&self.ring);
        let mut acc = Self::zero(&self.ring, d);
        for k in (0..=d).rev() {
            acc = acc.mul(&inner)?;
            acc.rows[0][0] = acc.rows[0][0].add_ref(&f.coeff(k).embed(&self.ring));
        }
        Ok(acc)
    }

    pub fn truncate(&self, d: usize) -> BivariateSeries {
        let d = d.min(self.d);
        Self::from_fn(&self.ring, d, |i, j| self.rows[i][j].clone())
    }

    /// `F(a(X), b(Y))` for univariate `a, b` without constant term.
    pub fn substitute(&self, a: &PowerSeries, b: &PowerSeries) -> Result<BivariateSeries> {
        let d = self.d.min(a.degree()).min(b.degree());
        let ring = [&self.ring, a.ring(), b.ring()].into_iter().max_by_key(|r| r.dim()).unwrap();
        let lifted = ring.dim() > self.ring.dim();
        let (a, b) = (a.embed(ring), b.embed(ring));
        let powers = |s: &PowerSeries| -> Vec<Vec<Elem>> {
            let mut out = vec![PowerSeries::one(ring, d).coeffs().to_vec()];
            for k in 1..=d {
                let prev = &out[k - 1];
                out.push(mul_trunc(prev, s.coeffs(), d + 1, ring));
            }
            out
        };
        let pa = powers(&a);
        let pb = powers(&b);
        let mut out = Self::zero(ring, d);
        for (i, j, c) in self.iter() {
            if i + j > d || c.is_exact_zero() {
                continue;
            }
            for (u, x) in pa[i].iter().enumerate() {
                if x.is_exact_zero() {
                    continue;
                }
                let cx = if lifted { x.mul_sub(c) } else { c.mul_ref(x) };
                for (v, y) in pb[j].iter().enumerate().take(d + 1 - u) {
                    if y.is_exact_zero() {
                        continue;
                    }
                    let t = &mut out.rows[u][v];
                    *t = t.add_ref(&cx.mul_ref(y));
                }
            }
        }
        Ok(out)
    }

    /// `F(X, Y) -> F(Y, X)`.
    pub fn swap(&self) -> BivariateSeries {
        Self::from_fn(&self.ring, self.d, |i, j| self.rows[j][i].clone())
    }

    /// `F(X, 0)`.
    pub fn restrict_y0(&self) -> PowerSeries {
        PowerSeries::new(&self.ring, (0..=self.d).map(|i| self.rows[i][0].clone()).collect(), self.d)
    }

    /// `F(X, g(X))` as a univariate series.
    pub fn diagonal(&self, g: &PowerSeries) -> Result<PowerSeries> {
        self.along(&PowerSeries::x(&self.ring, self.d), g)
    }

    /// `F(a(X), b(X))` as a univariate series, for `a, b` without constant
    /// term, possibly over a larger ring of the same tower.
    pub fn along(&self, a: &PowerSeries, b: &PowerSeries) -> Result<PowerSeries> {
        let d = self.d.min(a.degree()).min(b.degree());
        let ring = [&self.ring, a.ring(), b.ring()].into_iter().max_by_key(|r| r.dim()).unwrap();
        let lifted = ring.dim() > self.ring.dim();
        let (a, b) = (a.embed(ring), b.embed(ring));
        let mut pb = vec![PowerSeries::one(ring, d).coeffs().to_vec()];
        for j in 1..=d {
            let next = mul_trunc(&pb[j - 1], b.coeffs(), d + 1, ring);
            pb.push(next);
        }
        let mut out = vec![Elem::zero(ring); d + 1];
        let mut ai = PowerSeries::one(ring, d).coeffs().to_vec();
        for i in 0..=d {
            if i > 0 {
                ai = mul_trunc(&ai, a.coeffs(), d + 1, ring);
            }
            // sum_j c_ij b^j
            let mut bi = vec![Elem::zero(ring); d + 1];
            for (j, c) in self.rows[i].iter().enumerate().take(d + 1 - i) {
                if c.is_exact_zero() {
                    continue;
                }
                for (v, y) in pb[j].iter().enumerate() {
                    if !y.is_exact_zero() {
                        let t = if lifted { y.mul_sub(c) } else { y.mul_ref(c) };
                        bi[v] = bi[v].add_ref(&t);
                    }
                }
            }
            for (k, t) in mul_trunc(&ai, &bi, d + 1, ring).into_iter().enumerate() {
                if !t.is_exact_zero() {
                    out[k] = out[k].add_ref(&t);
                }
            }
        }
        Ok(PowerSeries::new(ring, out, d))
    }

    pub fn agrees_with(&self, other: &BivariateSeries) -> bool {
        let d = self.d.min(other.d);
        (0..=d).all(|i| (0..=d - i).all(|j| self.rows[i][j].agrees_with(&other.rows[i][j])))
    }

    pub fn first_non_integral(&self) -> Option<(usize, usize, Ratio<i64>)> {
        self.iter().find_map(|(i, j, c)| match c.valuation() {
            Valuation::Exact(v) if v < Ratio::from_integer(0) => Some((i, j, v)),
            _ => None,
        })
    }

    /// Evaluate at `(x, y)` with positive valuations; integral coefficients assumed.
    pub fn eval(&self, x: &Elem, y: &Elem) -> Result<Evaluation> {
        let vx = x.valuation().lower();
        let vy = y.valuation().lower();
        let zero = Ratio::from_integer(0);
        if vx <= zero || vy <= zero {
            return Err(LtError::NonPositiveValuationPoint);
        }
        let ring = [&self.ring, x.ring(), y.ring()].into_iter().max_by_key(|r| r.dim()).unwrap().clone();
        let x = x.embed(&ring);
        let y = y.embed(&ring);
        let mut ypow = vec![Elem::one(&ring)];
        for j in 1..=self.d {
            let t = ypow[j - 1].mul_ref(&y);
            ypow.push(t);
        }
        // Horner in X over rows evaluated in Y
        let mut acc = Elem::zero(&ring);
        for i in (0..=self.d).rev() {
            let mut row = Elem::zero(&ring);
            for (j, c) in self.rows[i].iter().enumerate() {
                if !c.is_exact_zero() {
                    row = row.add_ref(&ypow[j].mul_sub(c));
                }
            }
            acc = acc.mul_ref(&x).add_ref(&row);
        }
        let tail = vx.min(vy) * Ratio::from_integer(self.d as i64 + 1);
        Ok(Evaluation { value: acc.with_abs_prec(tail.floor().to_integer()), tail_bound: tail })
    }

    pub fn to_json(&self) -> BivariateJson {
        BivariateJson {
            d: self.d,
            ring: format!("{:?}", self.ring),
            rows: self.rows.iter().map(|r| r.iter().map(|c| c.to_json()).collect()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_context;

    #[test]
    fn multiplicative_group_evaluation() {
        let k = make_context(3, 1, None, 30).unwrap();
        let r = k.ring();
        let gm = BivariateSeries::from_terms(r, 10, &[(1, 0, 1), (0, 1, 1), (1, 1, 1)]);
        let a = k.elem(3);
        let b = k.elem(6);
        let v = gm.eval(&a, &b).unwrap().value;
        assert!(v.agrees_with(&k.elem(3 + 6 + 18)));
        assert!(gm.eval(&a, &k.zero().with_abs_prec(40)).is_ok());
        assert!(gm.restrict_y0().agrees_with(&PowerSeries::x(r, 10)));
        assert!(gm.swap().agrees_with(&gm));
    }

    #[test]
    fn composition_with_exp_like_series() {
        let k = make_context(5, 1, None, 30).unwrap();
        let r = k.ring();
        // (1+X)(1+Y) - 1 = X + Y + XY squared via f(T) = 2T + T^2
        let gm = BivariateSeries::from_terms(r, 6, &[(1, 0, 1), (0, 1, 1), (1, 1, 1)]);
        let f = PowerSeries::from_ints(r, &[0, 2, 1], 6);
        let got = gm.compose_into(&f).unwrap();
        let want = gm.mul(&gm).unwrap().add(&gm.add(&gm).unwrap()).unwrap();
        assert!(got.agrees_with(&want));
    }
}
