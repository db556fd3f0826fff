//! Sparse polynomials over `O_K` in finitely many variables.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use super::WittCoeff;
use crate::padic::{Elem, Ring};

/// Exponent vector -> coefficient. Terms indistinguishable from zero are dropped.
#[derive(Clone)]
pub struct MultiPoly {
    ring: Arc<Ring>,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Elem>,
}

impl MultiPoly {
    pub fn zero(ring: &Arc<Ring>, nvars: usize) -> MultiPoly {
        MultiPoly { ring: ring.clone(), nvars, terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<Ring>, nvars: usize, c: &Elem) -> MultiPoly {
        let mut out = Self::zero(ring, nvars);
        out.add_term(vec![0; nvars], c.embed(ring));
        out
    }

    pub fn var(ring: &Arc<Ring>, nvars: usize, i: usize) -> MultiPoly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut out = Self::zero(ring, nvars);
        out.add_term(e, Elem::one(ring));
        out
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Elem)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Elem {
        self.terms.get(e).cloned().unwrap_or_else(|| Elem::zero(&self.ring))
    }

    fn add_term(&mut self, e: Vec<u32>, c: Elem) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&e) {
            Some(old) => {
                let s = old.add_ref(&c);
                if !s.is_zero() {
                    self.terms.insert(e, s);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Evaluate at values in any coefficient algebra.
    pub fn eval<A: WittCoeff>(&self, vals: &[A]) -> A {
        assert_eq!(vals.len(), self.nvars);
        let zero = vals[0].zero_like();
        let mut cache: Vec<BTreeMap<u32, A>> = vec![BTreeMap::new(); self.nvars];
        let mut acc = zero.clone();
        for (e, c) in &self.terms {
            let mut t = vals[0].one_like().scale(c);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pw = cache[i].entry(k).or_insert_with(|| vals[i].pow(k as u64)).clone();
                t = t.mul(&pw);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Evaluate over `F_p` after reducing coefficients modulo the maximal
    /// ideal. Only meaningful for `K = Q_p`; `None` if a coefficient is not integral.
    pub fn eval_mod_p(&self, vals: &[u64]) -> Option<u64> {
        let p = self.ring.p();
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let mut t = c.residue()?[0] % p;
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t * vals[i] % p;
                }
            }
            acc = (acc + t) % p;
        }
        Some(acc)
    }

    /// Coefficients as signed integers, when they all lie in `Z_p`.
    pub fn integer_coeffs(&self) -> Option<BTreeMap<Vec<u32>, BigInt>> {
        self.terms.iter().map(|(e, c)| Some((e.clone(), signed_integer(c)?))).collect()
    }

    pub fn agrees_with(&self, other: &MultiPoly) -> bool {
        self.sub(other).terms.is_empty()
    }

    pub fn min_precision(&self) -> i64 {
        self.terms.values().map(|c| c.abs_prec()).min().unwrap_or(i64::MAX)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let coeff = match signed_integer(c) {
                Some(n) => n.to_string(),
                None => format!("({:?})", c),
            };
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{}", names[i], k) })
                .collect();
            let s = match (coeff.as_str(), mono.is_empty()) {
                (_, true) => coeff,
                ("1", false) => mono.join("*"),
                ("-1", false) => format!("-{}", mono.join("*")),
                _ => format!("{}*{}", coeff, mono.join("*")),
            };
            parts.push(s);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

/// Integer representative in `(-p^A/2, p^A/2]` for an element of `Z_p` known mod `p^A`.
fn signed_integer(c: &Elem) -> Option<BigInt> {
    if c.valuation().lower() < Ratio::from_integer(0) {
        return None;
    }
    if c.is_zero() {
        return Some(BigInt::zero());
    }
    if c.unit()[1..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let p = BigInt::from(c.p());
    let m = num_traits::pow(p.clone(), c.abs_prec() as usize);
    let v = (&c.unit()[0] * num_traits::pow(p, c.exponent() as usize)).mod_floor(&m);
    let half = &m / 2u32;
    Some(if v > half { v - m } else { v })
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.display_with(&names))
    }
}

impl WittCoeff for MultiPoly {
    fn zero_like(&self) -> Self {
        Self::zero(&self.ring, self.nvars)
    }

    fn one_like(&self) -> Self {
        Self::constant(&self.ring, self.nvars, &Elem::one(&self.ring))
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.neg_ref());
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.ring, self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.mul_ref(c2));
            }
        }
        out
    }

    fn scale(&self, c: &Elem) -> Self {
        let c = c.embed(&self.ring);
        let mut out = Self::zero(&self.ring, self.nvars);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x.mul_ref(&c));
        }
        out
    }

    fn div_exact(&self, pi_k: &Elem) -> Result<Self, ()> {
        let mut out = Self::zero(&self.ring, self.nvars);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x.div_exact(pi_k)?);
        }
        Ok(out)
    }

    fn valuation_at_least(&self, v: Ratio<i64>) -> bool {
        self.terms.values().all(|c| c.valuation().certainly_at_least(v))
    }

    fn agrees_with(&self, other: &Self) -> bool {
        MultiPoly::agrees_with(self, other)
    }
}

/// Signed value of a small integer coefficient, for tests and display.
pub fn small_integer(c: &Elem) -> Option<i64> {
    signed_integer(c).and_then(|n| if n.abs() < BigInt::from(i64::MAX) { n.to_i64() } else { None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_context;

    #[test]
    fn arithmetic_and_display() {
        let k = make_context(3, 1, None, 20).unwrap();
        let r = k.ring();
        let x = MultiPoly::var(r, 2, 0);
        let y = MultiPoly::var(r, 2, 1);
        let s = x.add(&y);
        let sq = s.mul(&s);
        assert_eq!(small_integer(&sq.coeff(&[1, 1])), Some(2));
        let d = sq.sub(&x.mul(&x)).sub(&y.mul(&y));
        assert_eq!(d.len(), 1);
        assert_eq!(format!("{:?}", d.scale(&k.elem(-1))), "-2*x0*x1");
        let v = sq.eval(&[k.elem(2), k.elem(5)]);
        assert!(v.agrees_with(&k.elem(49)));
        assert_eq!(sq.eval_mod_p(&[1, 1]), Some(1));
    }
}
