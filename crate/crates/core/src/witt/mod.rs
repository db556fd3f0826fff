//! Ramified Witt vectors `W_{O_K,pi}(A)` of finite length, computed through
//! ghost components in pi-torsion-free algebras.

pub mod multipoly;
pub mod sp;
pub mod structural;

use num_rational::Ratio;

use crate::error::{LtError, Result};
use crate::padic::{Elem, Valuation};
use crate::series::PowerSeries;

pub use multipoly::MultiPoly;
pub use sp::{key_valuation_criterion, s_p, s_pa, KeyCriterion};
pub use structural::{classical_oracle, structural_polys, Structural};

/// An `O_K`-algebra without pi-torsion, as far as the ghost strategy needs it.
pub trait WittCoeff: Clone + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Multiplication by a scalar of `O_K`.
    fn scale(&self, c: &Elem) -> Self;
    /// Exact division by `pi^k`, where `pi_k = pi^k`; fails if the quotient
    /// is not integral at the working precision.
    fn div_exact(&self, pi_k: &Elem) -> std::result::Result<Self, ()>;
    /// Every coefficient has valuation at least `v` (p-units), or is
    /// indistinguishable from zero at such a precision.
    fn valuation_at_least(&self, v: Ratio<i64>) -> bool;
    fn agrees_with(&self, other: &Self) -> bool;

    fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl WittCoeff for Elem {
    fn zero_like(&self) -> Self {
        Elem::zero(self.ring())
    }
    fn one_like(&self) -> Self {
        Elem::one(self.ring())
    }
    fn add(&self, other: &Self) -> Self {
        self.add_ref(other)
    }
    fn sub(&self, other: &Self) -> Self {
        self.sub_ref(other)
    }
    fn mul(&self, other: &Self) -> Self {
        self.mul_ref(other)
    }
    fn scale(&self, c: &Elem) -> Self {
        self.mul_ref(&c.embed(self.ring()))
    }
    fn div_exact(&self, pi_k: &Elem) -> std::result::Result<Self, ()> {
        if self.is_exact_zero() {
            return Ok(self.clone());
        }
        let y = self.div_ref(&pi_k.embed(self.ring())).map_err(|_| ())?;
        match y.valuation() {
            Valuation::Exact(v) if v < Ratio::from_integer(0) => Err(()),
            _ => Ok(y),
        }
    }
    fn valuation_at_least(&self, v: Ratio<i64>) -> bool {
        self.valuation().certainly_at_least(v)
    }
    fn agrees_with(&self, other: &Self) -> bool {
        Elem::agrees_with(self, other)
    }
    fn pow(&self, k: u64) -> Self {
        Elem::pow(self, k)
    }
}

impl WittCoeff for PowerSeries {
    fn zero_like(&self) -> Self {
        PowerSeries::zero(self.ring(), self.degree())
    }
    fn one_like(&self) -> Self {
        PowerSeries::one(self.ring(), self.degree())
    }
    fn add(&self, other: &Self) -> Self {
        PowerSeries::add(self, other).expect("same ring")
    }
    fn sub(&self, other: &Self) -> Self {
        PowerSeries::sub(self, other).expect("same ring")
    }
    fn mul(&self, other: &Self) -> Self {
        PowerSeries::mul(self, other).expect("same ring")
    }
    fn scale(&self, c: &Elem) -> Self {
        PowerSeries::scale(self, c)
    }
    fn div_exact(&self, pi_k: &Elem) -> std::result::Result<Self, ()> {
        let c = self.coeffs().iter().map(|x| x.div_exact(pi_k)).collect::<std::result::Result<Vec<_>, ()>>()?;
        Ok(PowerSeries::new(self.ring(), c, self.degree()))
    }
    fn valuation_at_least(&self, v: Ratio<i64>) -> bool {
        self.coeffs().iter().all(|x| x.valuation().certainly_at_least(v))
    }
    fn agrees_with(&self, other: &Self) -> bool {
        PowerSeries::agrees_with(self, other)
    }
}

/// Ghost components `u_n = sum_{i<=n} pi^i a_i^(q^(n-i))`.
pub fn ghost<A: WittCoeff>(comps: &[A], pi: &Elem, q: u64) -> Vec<A> {
    let m = comps.len();
    // pw[i] holds a_i^(q^(n-i)) for the current n
    let mut pw: Vec<A> = Vec::with_capacity(m);
    let mut out = Vec::with_capacity(m);
    let mut pi_i = vec![Elem::one(pi.ring())];
    for i in 1..m {
        let t = pi_i[i - 1].mul_ref(pi);
        pi_i.push(t);
    }
    for n in 0..m {
        for x in pw.iter_mut() {
            *x = x.pow(q);
        }
        pw.push(comps[n].clone());
        let mut acc = comps[0].zero_like();
        for (i, x) in pw.iter().enumerate() {
            acc = acc.add(&x.scale(&pi_i[i]));
        }
        out.push(acc);
    }
    out
}

/// The Witt vector with the given ghost components.
pub fn unghost<A: WittCoeff>(u: &[A], pi: &Elem, q: u64) -> Result<Vec<A>> {
    let m = u.len();
    let mut comps: Vec<A> = Vec::with_capacity(m);
    let mut pw: Vec<A> = Vec::with_capacity(m);
    let mut pi_i = vec![Elem::one(pi.ring())];
    for i in 1..m {
        let t = pi_i[i - 1].mul_ref(pi);
        pi_i.push(t);
    }
    for n in 0..m {
        for x in pw.iter_mut() {
            *x = x.pow(q);
        }
        let mut acc = u[n].clone();
        for (i, x) in pw.iter().enumerate() {
            acc = acc.sub(&x.scale(&pi_i[i]));
        }
        let a = acc.div_exact(&pi_i[n]).map_err(|_| LtError::NotInGhostImage { level: n })?;
        pw.push(a.clone());
        comps.push(a);
    }
    Ok(comps)
}

/// A Witt vector `(a_0, ..., a_m)` with cached ghost components.
#[derive(Clone, Debug)]
pub struct WittVector<A: WittCoeff> {
    pi: Elem,
    q: u64,
    comps: Vec<A>,
    ghost: Vec<A>,
}

impl<A: WittCoeff> WittVector<A> {
    pub fn new(comps: Vec<A>, pi: &Elem, q: u64) -> Self {
        let ghost = ghost(&comps, pi, q);
        WittVector { pi: pi.clone(), q, comps, ghost }
    }

    pub fn from_ghost(u: Vec<A>, pi: &Elem, q: u64) -> Result<Self> {
        let comps = unghost(&u, pi, q)?;
        Ok(WittVector { pi: pi.clone(), q, comps, ghost: u })
    }

    pub fn components(&self) -> &[A] {
        &self.comps
    }

    pub fn ghost(&self) -> &[A] {
        &self.ghost
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn pi(&self) -> &Elem {
        &self.pi
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `(a, 0, 0, ...)` of length `len`.
    pub fn teichmuller(a: &A, len: usize, pi: &Elem, q: u64) -> Self {
        let mut c = vec![a.zero_like(); len];
        c[0] = a.clone();
        Self::new(c, pi, q)
    }

    pub fn zero(like: &A, len: usize, pi: &Elem, q: u64) -> Self {
        Self::new(vec![like.zero_like(); len], pi, q)
    }

    pub fn one(like: &A, len: usize, pi: &Elem, q: u64) -> Self {
        Self::teichmuller(&like.one_like(), len, pi, q)
    }

    fn zip(&self, other: &Self, f: impl Fn(&A, &A) -> A) -> Result<Self> {
        if self.len() != other.len() {
            return Err(LtError::InvalidParameter("Witt vectors of different lengths".into()));
        }
        let u = self.ghost.iter().zip(&other.ghost).map(|(a, b)| f(a, b)).collect();
        Self::from_ghost(u, &self.pi, self.q)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.mul(b))
    }

    pub fn neg(&self) -> Result<Self> {
        let u = self.ghost.iter().map(|a| a.zero_like().sub(a)).collect();
        Self::from_ghost(u, &self.pi, self.q)
    }

    /// Multiplication by `x` in `O_K` through the structure map.
    pub fn scalar(&self, x: &Elem) -> Result<Self> {
        let u = self.ghost.iter().map(|a| a.scale(x)).collect();
        Self::from_ghost(u, &self.pi, self.q)
    }

    /// Frobenius: shift of the ghost vector; the result is one shorter.
    pub fn frobenius(&self) -> Result<Self> {
        Self::from_ghost(self.ghost[1..].to_vec(), &self.pi, self.q)
    }

    /// Verschiebung `(0, a_0, a_1, ...)`; the result is one longer.
    pub fn verschiebung(&self) -> Self {
        let mut c = vec![self.comps[0].zero_like()];
        c.extend(self.comps.iter().cloned());
        Self::new(c, &self.pi, self.q)
    }

    /// First `len` components.
    pub fn truncate(&self, len: usize) -> Self {
        WittVector {
            pi: self.pi.clone(),
            q: self.q,
            comps: self.comps[..len].to_vec(),
            ghost: self.ghost[..len].to_vec(),
        }
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        self.len() == other.len() && self.comps.iter().zip(&other.comps).all(|(a, b)| a.agrees_with(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_context;

    #[test]
    fn ghost_of_teichmuller_and_v() {
        let k = make_context(3, 1, None, 30).unwrap();
        let a = k.elem(2);
        let t = WittVector::teichmuller(&a, 3, k.pi(), 3);
        assert!(t.ghost()[2].agrees_with(&a.pow(9)));
        let e1 = WittVector::new(vec![k.zero(), k.one(), k.zero()], k.pi(), 3);
        assert!(e1.ghost()[0].is_zero());
        assert!(e1.ghost()[1].agrees_with(&k.elem(3)));
        assert!(e1.ghost()[2].agrees_with(&k.elem(3)));
    }

    #[test]
    fn unghost_rejects_non_image() {
        let k = make_context(3, 1, None, 30).unwrap();
        // <1, 2> is not congruent to the Frobenius of 1 mod 3
        let r = WittVector::from_ghost(vec![k.one(), k.elem(2)], k.pi(), 3);
        assert_eq!(r.unwrap_err(), LtError::NotInGhostImage { level: 1 });
        let w = WittVector::from_ghost(vec![k.one(), k.one()], k.pi(), 3).unwrap();
        assert!(w.components()[1].is_zero());
    }
}
