//! Elements of a p-adic ring at finite precision.
//!
//! An element is `p^exp * (u_0 b_0 + ... + u_{d-1} b_{d-1})` where the `b_i`
//! are the flat basis monomials of its [`Ring`] and the integer coordinates
//! `u_i` are known modulo `p^rel`. The coordinate vector is normalised so that
//! not every `u_i` is divisible by `p`; the element is then known modulo
//! `p^(exp + rel) O`. An element with `rel == 0` is indistinguishable from
//! zero and only carries the lower bound `exp` on its valuation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::linalg;
use super::ring::{vp_bigint, Ring};
use crate::error::{LtError, Result};

/// Absolute precision used for exactly known zeros.
pub const PREC_INF: i64 = 1 << 40;

/// A valuation normalised by `v_p(p) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Exact(Ratio<i64>),
    /// The element is indistinguishable from zero; its valuation is at least
    /// this bound.
    AtLeast(Ratio<i64>),
}

impl Valuation {
    pub fn exact(&self) -> Option<Ratio<i64>> {
        match self {
            Valuation::Exact(v) => Some(*v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// Lower bound, exact when determinate.
    pub fn lower(&self) -> Ratio<i64> {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => *v,
        }
    }

    /// The valuation is known to be `>= bound`.
    pub fn certainly_at_least(&self, bound: Ratio<i64>) -> bool {
        self.lower() >= bound
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Valuation::Exact(_))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{}", v),
            Valuation::AtLeast(v) if v.to_integer() >= PREC_INF / 2 => write!(f, ">=inf"),
            Valuation::AtLeast(v) => write!(f, ">={}", v),
        }
    }
}

#[derive(Clone)]
pub struct Elem {
    ring: Arc<Ring>,
    exp: i64,
    rel: u32,
    unit: Vec<BigInt>,
}

fn sat(x: i64) -> i64 {
    x.min(PREC_INF)
}

impl Elem {
    /// Exact zero.
    pub fn zero(ring: &Arc<Ring>) -> Elem {
        Self::zero_prec(ring, PREC_INF)
    }

    /// Zero known modulo `p^abs`.
    pub fn zero_prec(ring: &Arc<Ring>, abs: i64) -> Elem {
        Elem { ring: ring.clone(), exp: sat(abs), rel: 0, unit: vec![BigInt::zero(); ring.dim()] }
    }

    pub fn one(ring: &Arc<Ring>) -> Elem {
        Self::from_i64(ring, 1)
    }

    pub fn from_i64(ring: &Arc<Ring>, x: i64) -> Elem {
        Self::from_bigint(ring, &BigInt::from(x))
    }

    pub fn from_bigint(ring: &Arc<Ring>, x: &BigInt) -> Elem {
        let mut coords = vec![BigInt::zero(); ring.dim()];
        coords[0] = x.clone();
        Self::from_coords(ring, coords)
    }

    /// Exact integral element from flat coordinates (known to the ring cap).
    pub fn from_coords(ring: &Arc<Ring>, coords: Vec<BigInt>) -> Elem {
        assert_eq!(coords.len(), ring.dim());
        if coords.iter().all(|c| c.is_zero()) {
            return Self::zero(ring);
        }
        let v = coords
            .iter()
            .map(|c| vp_bigint(c, ring.p(), u32::MAX))
            .min()
            .unwrap_or(0);
        let d = ring.pow_p(v);
        let coords = coords.into_iter().map(|c| c / &d).collect();
        Self::normalize(ring, coords, v as i64, ring.cap() as i64)
    }

    /// Element `p^exp * coords` known modulo `p^(exp + r)`.
    pub(crate) fn from_parts(ring: &Arc<Ring>, coords: Vec<BigInt>, exp: i64, r: i64) -> Elem {
        Self::normalize(ring, coords, exp, r)
    }

    fn normalize(ring: &Arc<Ring>, mut coords: Vec<BigInt>, exp: i64, r: i64) -> Elem {
        if exp >= PREC_INF {
            return Self::zero(ring);
        }
        let r = r.min(ring.cap() as i64);
        if r <= 0 {
            return Self::zero_prec(ring, exp + r);
        }
        let r = r as u32;
        let m = ring.pow_p_ref(r);
        for c in coords.iter_mut() {
            if c.is_negative() || *c >= *m {
                *c = c.mod_floor(&m);
            }
        }
        let mut v = r;
        for c in coords.iter() {
            if v == 0 {
                break;
            }
            if !c.is_zero() {
                v = v.min(vp_bigint(c, ring.p(), v));
            }
        }
        if v >= r {
            return Self::zero_prec(ring, exp + r as i64);
        }
        if v > 0 {
            let d = ring.pow_p(v);
            for c in coords.iter_mut() {
                *c = &*c / &d;
            }
        }
        Elem { ring: ring.clone(), exp: exp + v as i64, rel: r - v, unit: coords }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p()
    }

    /// Power of `p` factored out of the coordinates (for zeros: the absolute precision).
    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn rel_prec(&self) -> u32 {
        self.rel
    }

    pub(crate) fn unit(&self) -> &[BigInt] {
        &self.unit
    }

    /// Absolute precision in p-adic digits: the element is known modulo `p^abs_prec`.
    pub fn abs_prec(&self) -> i64 {
        if self.rel == 0 {
            self.exp
        } else {
            self.exp + self.rel as i64
        }
    }

    /// Indistinguishable from zero at its precision.
    pub fn is_zero(&self) -> bool {
        self.rel == 0
    }

    pub fn is_exact_zero(&self) -> bool {
        self.rel == 0 && self.exp >= PREC_INF
    }

    /// Valuation in units of `1/e`, where `e` is the ramification index of the
    /// ring. `None` when indistinguishable from zero.
    pub fn v_units(&self) -> Option<i64> {
        if self.rel == 0 {
            return None;
        }
        let w = self
            .unit
            .iter()
            .enumerate()
            .filter(|(_, c)| !(*c % self.ring.p()).is_zero())
            .map(|(i, _)| self.ring.weight(i))
            .min()
            .expect("normalised unit has a coordinate prime to p");
        Some(self.exp * self.ring.e() as i64 + w as i64)
    }

    pub fn valuation(&self) -> Valuation {
        match self.v_units() {
            Some(v) => Valuation::Exact(Ratio::new(v, self.ring.e() as i64)),
            None => Valuation::AtLeast(Ratio::from_integer(self.exp)),
        }
    }

    /// Lower bound on the valuation in p-digits, rounded down.
    pub fn val_floor(&self) -> i64 {
        self.exp
    }

    fn check_ring(&self, other: &Elem) {
        if !Arc::ptr_eq(&self.ring, &other.ring) {
            assert!(self.ring.same_tower(&other.ring), "ring mismatch: {:?} vs {:?}", self.ring, other.ring);
        }
    }

    pub fn same_ring(&self, other: &Elem) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring) || self.ring.same_tower(&other.ring)
    }

    pub fn add_ref(&self, other: &Elem) -> Elem {
        self.check_ring(other);
        if self.is_exact_zero() {
            return other.clone();
        }
        if other.is_exact_zero() {
            return self.clone();
        }
        let abs = self.abs_prec().min(other.abs_prec());
        let emin = self.exp.min(other.exp);
        let r = abs - emin;
        if r <= 0 {
            return Self::zero_prec(&self.ring, abs);
        }
        let mut coords = vec![BigInt::zero(); self.ring.dim()];
        for src in [self, other] {
            if src.rel == 0 {
                continue;
            }
            let shift = (src.exp - emin) as u32;
            if shift as i64 >= r {
                continue;
            }
            if shift == 0 {
                for (c, u) in coords.iter_mut().zip(src.unit.iter()) {
                    *c += u;
                }
            } else {
                let s = self.ring.pow_p_ref(shift);
                for (c, u) in coords.iter_mut().zip(src.unit.iter()) {
                    if !u.is_zero() {
                        *c += u * &*s;
                    }
                }
            }
        }
        Self::normalize(&self.ring, coords, emin, r)
    }

    pub fn neg_ref(&self) -> Elem {
        if self.rel == 0 {
            return self.clone();
        }
        let m = self.ring.pow_p_ref(self.rel);
        let unit = self
            .unit
            .iter()
            .map(|u| if u.is_zero() { BigInt::zero() } else { &*m - u })
            .collect();
        Elem { ring: self.ring.clone(), exp: self.exp, rel: self.rel, unit }
    }

    pub fn sub_ref(&self, other: &Elem) -> Elem {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Elem) -> Elem {
        self.check_ring(other);
        match (self.rel == 0, other.rel == 0) {
            (true, true) => return Self::zero_prec(&self.ring, sat(self.exp + other.exp)),
            (true, false) => return Self::zero_prec(&self.ring, sat(self.exp + other.exp)),
            (false, true) => return Self::zero_prec(&self.ring, sat(self.exp + other.exp)),
            _ => {}
        }
        let r = self.rel.min(other.rel);
        let coords = if self.ring.dim() == 1 {
            vec![&self.unit[0] * &other.unit[0]]
        } else {
            self.ring.mul_flat(&self.unit, &other.unit)
        };
        Self::normalize(&self.ring, coords, self.exp + other.exp, r as i64)
    }

    /// Product with an element of a sub-tower of this ring, block by block,
    /// without embedding it first.
    pub fn mul_sub(&self, c: &Elem) -> Elem {
        let s = c.ring.dim();
        if s == self.ring.dim() {
            return self.mul_ref(&c.embed(&self.ring));
        }
        debug_assert!(c.ring.is_prefix_of(&self.ring));
        if self.rel == 0 || c.rel == 0 {
            return Self::zero_prec(&self.ring, sat(self.exp + c.exp));
        }
        let mut coords = Vec::with_capacity(self.ring.dim());
        for block in self.unit.chunks(s) {
            if s == 1 {
                coords.push(&block[0] * &c.unit[0]);
            } else if block.iter().all(|x| x.is_zero()) {
                coords.extend(block.iter().cloned());
            } else {
                coords.extend(c.ring.mul_flat(block, &c.unit));
            }
        }
        Self::normalize(&self.ring, coords, self.exp + c.exp, self.rel.min(c.rel) as i64)
    }

    /// Multiply by `p^k`.
    pub fn shift_p(&self, k: i64) -> Elem {
        if self.is_exact_zero() {
            return self.clone();
        }
        let mut out = self.clone();
        out.exp = sat(out.exp + k);
        out
    }

    pub fn mul_int(&self, k: i64) -> Elem {
        self.mul_ref(&Elem::from_i64(&self.ring, k))
    }

    pub fn square(&self) -> Elem {
        self.mul_ref(self)
    }

    pub fn pow(&self, mut k: u64) -> Elem {
        let mut base = self.clone();
        let mut acc = Elem::one(&self.ring);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Lower the absolute precision to at most `abs`.
    pub fn with_abs_prec(&self, abs: i64) -> Elem {
        if abs >= self.abs_prec() {
            return self.clone();
        }
        if self.rel == 0 || abs <= self.exp {
            return Self::zero_prec(&self.ring, abs.min(self.abs_prec()));
        }
        Self::normalize(&self.ring, self.unit.clone(), self.exp, abs - self.exp)
    }

    /// True if the top-layer coordinates above degree 0 vanish, so the element
    /// lies in the parent ring.
    fn in_parent(&self) -> bool {
        match self.ring.top_layer() {
            None => false,
            Some(l) => self.unit[l.sub_dim..].iter().all(|c| c.is_zero()),
        }
    }

    /// Coefficient of `w^c` (top-layer generator) as an element of the parent ring.
    pub fn block(&self, c: usize) -> Elem {
        let parent = self.ring.parent().expect("ring has no parent").clone();
        let s = parent.dim();
        if self.rel == 0 {
            return Elem::zero_prec(&parent, self.exp);
        }
        let coords = self.unit[c * s..(c + 1) * s].to_vec();
        Self::normalize(&parent, coords, self.exp, self.rel as i64)
    }

    /// Assemble `sum_c blocks[c] w^c` from parent-ring elements.
    pub fn from_blocks(ring: &Arc<Ring>, blocks: &[Elem]) -> Elem {
        let layer = ring.top_layer().expect("ring has no top layer");
        assert_eq!(blocks.len(), layer.degree);
        let s = layer.sub_dim;
        let abs = blocks.iter().map(|b| b.abs_prec()).min().unwrap();
        if abs >= PREC_INF && blocks.iter().all(|b| b.is_exact_zero()) {
            return Elem::zero(ring);
        }
        let emin = blocks.iter().map(|b| b.exp).min().unwrap().min(abs);
        let mut coords = vec![BigInt::zero(); ring.dim()];
        for (c, b) in blocks.iter().enumerate() {
            if b.rel == 0 {
                continue;
            }
            let s_p = ring.pow_p((b.exp - emin) as u32);
            for (i, u) in b.unit.iter().enumerate() {
                coords[c * s + i] = u * &s_p;
            }
        }
        Self::normalize(ring, coords, emin, abs - emin)
    }

    /// The stored representative as an element of the same tower at another
    /// cap, known to that cap.
    pub fn lift_representative(&self, target: &Arc<Ring>) -> Elem {
        assert!(self.ring.same_tower(target), "cannot lift {:?} into {:?}", self.ring, target);
        if self.rel == 0 {
            return Self::zero(target);
        }
        Self::normalize(target, self.unit.clone(), self.exp, target.cap() as i64)
    }

    /// Embed into a ring that contains this one as a sub-tower.
    pub fn embed(&self, target: &Arc<Ring>) -> Elem {
        if Arc::ptr_eq(&self.ring, target) {
            return self.clone();
        }
        assert!(self.ring.is_prefix_of(target), "cannot embed {:?} into {:?}", self.ring, target);
        let mut coords = vec![BigInt::zero(); target.dim()];
        for (c, u) in coords.iter_mut().zip(self.unit.iter()) {
            *c = u.clone();
        }
        if self.rel == 0 {
            return Elem::zero_prec(target, self.exp);
        }
        Self::normalize(target, coords, self.exp, self.rel as i64)
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Elem> {
        if self.rel == 0 {
            return Err(LtError::DivisionByIndistinguishableZero);
        }
        if self.in_parent() {
            let down = self.block(0);
            return Ok(down.inv()?.embed(&self.ring));
        }
        if self.ring.dim() == 1 {
            let m = self.ring.pow_p(self.rel);
            let g = self.unit[0].extended_gcd(&m);
            debug_assert!(g.gcd.is_one());
            return Ok(Self::normalize(&self.ring, vec![g.x], -self.exp, self.rel as i64));
        }
        // Solve (mult-by-unit) y = 1 over Q_p.
        let qp = self.ring.scalars();
        let rows = self.ring.mul_matrix(&self.unit);
        let a: Vec<Vec<Elem>> = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| Elem::from_parts(&qp, vec![x], 0, self.rel as i64))
                    .collect()
            })
            .collect();
        let mut b = vec![Elem::zero(&qp); self.ring.dim()];
        b[0] = Elem::one(&qp);
        let y = linalg::solve(a, b)?;
        Ok(Self::from_qp_coords(&self.ring, &y).shift_p(-self.exp))
    }

    pub fn div_ref(&self, other: &Elem) -> Result<Elem> {
        Ok(self.mul_ref(&other.inv()?))
    }

    /// Build an element from its flat coordinates given as `Q_p` elements.
    pub fn from_qp_coords(ring: &Arc<Ring>, ys: &[Elem]) -> Elem {
        assert_eq!(ys.len(), ring.dim());
        let abs = ys.iter().map(|y| y.abs_prec()).min().unwrap();
        if ys.iter().all(|y| y.is_exact_zero()) {
            return Elem::zero(ring);
        }
        let emin = ys.iter().map(|y| y.exp).min().unwrap().min(abs);
        let coords = ys
            .iter()
            .map(|y| {
                if y.rel == 0 {
                    BigInt::zero()
                } else {
                    &y.unit[0] * ring.pow_p((y.exp - emin) as u32)
                }
            })
            .collect();
        Self::normalize(ring, coords, emin, abs - emin)
    }

    /// Flat coordinates as `Q_p` elements.
    pub fn qp_coords(&self) -> Vec<Elem> {
        let qp = self.ring.scalars();
        (0..self.ring.dim())
            .map(|i| {
                if self.rel == 0 {
                    Elem::zero_prec(&qp, self.exp)
                } else {
                    Elem::from_parts(&qp, vec![self.unit[i].clone()], self.exp, self.rel as i64)
                }
            })
            .collect()
    }

    /// Reduction modulo the maximal ideal, as coordinates in `F_p[u]/(unram)`.
    /// `None` if the element is not known to be integral.
    pub fn residue(&self) -> Option<Vec<u64>> {
        let f = self.ring.f() as usize;
        if self.rel == 0 {
            return if self.exp >= 1 { Some(vec![0; f]) } else { None };
        }
        if self.exp > 0 {
            return Some(vec![0; f]);
        }
        if self.exp < 0 {
            return None;
        }
        let p = self.ring.p();
        Some(self.unit[..f].iter().map(|c| (c % p).to_u64().unwrap()).collect())
    }

    /// `self` and `other` agree at the lower of their two precisions.
    pub fn agrees_with(&self, other: &Elem) -> bool {
        self.sub_ref(other).is_zero()
    }

    /// `self - other` has valuation at least `t` (p-digits) or is
    /// indistinguishable from zero at precision at least `t`.
    pub fn close_to(&self, other: &Elem, t: Ratio<i64>) -> bool {
        self.sub_ref(other).valuation().certainly_at_least(t)
    }

    pub fn to_json(&self) -> ElemJson {
        let p = self.ring.p();
        ElemJson {
            shift: -self.exp.min(PREC_INF),
            digits: self.unit.iter().map(|c| base_p_digits(c, p)).collect(),
            abs_prec: self.abs_prec(),
        }
    }

    pub fn from_json(ring: &Arc<Ring>, j: &ElemJson) -> Result<Elem> {
        if j.digits.len() != ring.dim() {
            return Err(LtError::Config(format!(
                "element has {} digits, ring dimension is {}",
                j.digits.len(),
                ring.dim()
            )));
        }
        let coords = j
            .digits
            .iter()
            .map(|s| parse_base_p(s, ring.p()))
            .collect::<Result<Vec<_>>>()?;
        let exp = -j.shift;
        Ok(Self::normalize(ring, coords, exp, j.abs_prec - exp))
    }
}

/// Serialized form: value `p^(-shift) * sum digits_i b_i`, known modulo
/// `p^abs_prec`; each coordinate is a little-endian base-p digit string.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElemJson {
    pub shift: i64,
    pub digits: Vec<String>,
    pub abs_prec: i64,
}

const DIGIT_CHARS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

fn base_p_digits(x: &BigInt, p: u64) -> String {
    if x.is_zero() {
        return String::new();
    }
    if p <= 36 {
        let mut out = String::new();
        let mut cur = x.clone();
        let pb = BigInt::from(p);
        while !cur.is_zero() {
            let (q, r) = cur.div_mod_floor(&pb);
            out.push(DIGIT_CHARS[r.to_usize().unwrap()] as char);
            cur = q;
        }
        out
    } else {
        x.to_string()
    }
}

fn parse_base_p(s: &str, p: u64) -> Result<BigInt> {
    if p > 36 {
        return s.parse().map_err(|_| LtError::Config(format!("bad integer {s}")));
    }
    let mut acc = BigInt::zero();
    for ch in s.bytes().rev() {
        let d = DIGIT_CHARS
            .iter()
            .position(|&c| c == ch.to_ascii_lowercase())
            .filter(|&d| (d as u64) < p)
            .ok_or_else(|| LtError::Config(format!("bad base-{p} digit '{}'", ch as char)))?;
        acc = acc * p + d;
    }
    Ok(acc)
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rel == 0 {
            if self.exp >= PREC_INF {
                return write!(f, "0");
            }
            return write!(f, "O({}^{})", self.ring.p(), self.exp);
        }
        let coords: Vec<String> = self.unit.iter().map(|c| c.to_string()).collect();
        if self.ring.dim() == 1 {
            write!(f, "{}^{}*{} + O({}^{})", self.ring.p(), self.exp, coords[0], self.ring.p(), self.abs_prec())
        } else {
            write!(f, "{}^{}*[{}] + O({}^{})", self.ring.p(), self.exp, coords.join(","), self.ring.p(), self.abs_prec())
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&Elem> for &Elem {
            type Output = Elem;
            fn $m(self, rhs: &Elem) -> Elem {
                self.$imp(rhs)
            }
        }
        impl $tr<Elem> for Elem {
            type Output = Elem;
            fn $m(self, rhs: Elem) -> Elem {
                self.$imp(&rhs)
            }
        }
        impl $tr<&Elem> for Elem {
            type Output = Elem;
            fn $m(self, rhs: &Elem) -> Elem {
                self.$imp(rhs)
            }
        }
        impl $tr<Elem> for &Elem {
            type Output = Elem;
            fn $m(self, rhs: Elem) -> Elem {
                self.$imp(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for &Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        self.neg_ref()
    }
}

impl Neg for Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        self.neg_ref()
    }
}

pub fn ratio(n: i64, d: i64) -> Ratio<i64> {
    Ratio::new(n, d)
}
