//! Independent oracles built on exact rational arithmetic.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use ltlab::padic::{Elem, Ring};
use std::sync::Arc;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `exp(X) - 1` coefficients.
pub fn exp_minus_one(d: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero()];
    let mut fact = BigInt::one();
    for k in 1..=d {
        fact *= k;
        out.push(BigRational::new(BigInt::one(), fact.clone()));
    }
    out
}

/// `log(1 + X)` coefficients.
pub fn log_one_plus(d: usize) -> Vec<BigRational> {
    (0..=d)
        .map(|k| if k == 0 { BigRational::zero() } else { rat(if k % 2 == 1 { 1 } else { -1 }, k as i64) })
        .collect()
}

/// `(1 + X)^a - 1` coefficients for an integer `a`.
pub fn binomial_minus_one(a: i64, d: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero()];
    let mut c = BigRational::one();
    for k in 1..=d {
        c *= BigRational::new(BigInt::from(a - k as i64 + 1), BigInt::from(k));
        out.push(c.clone());
    }
    out
}

/// `exp(g)` for `g` with `g(0) = 0`, via `E' = g' E`.
pub fn exp_of(g: &[BigRational], d: usize) -> Vec<BigRational> {
    let mut e = vec![BigRational::one()];
    for m in 1..=d {
        let mut acc = BigRational::zero();
        for j in 1..=m.min(g.len() - 1) {
            if !g[j].is_zero() {
                acc += &g[j] * BigRational::from_integer(BigInt::from(j)) * &e[m - j];
            }
        }
        e.push(acc / BigRational::from_integer(BigInt::from(m)));
    }
    e
}

/// Artin-Hasse exponential `exp(sum X^(p^i)/p^i)`.
pub fn artin_hasse(p: u64, d: usize) -> Vec<BigRational> {
    let mut g = vec![BigRational::zero(); d + 1];
    let mut pi = 1u64;
    while (pi as usize) <= d {
        g[pi as usize] = rat(1, pi as i64);
        pi *= p;
    }
    exp_of(&g, d)
}

/// p-adic valuation of a nonzero rational.
pub fn vp_rat(x: &BigRational, p: u64) -> i64 {
    let v = |n: &BigInt| {
        let mut n = n.abs();
        let pb = BigInt::from(p);
        let mut k = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            k += 1;
        }
        k
    };
    v(x.numer()) - v(x.denom())
}

/// The rational as an element of `Q_p` (inside `ring`, in the first coordinate).
pub fn rat_to_elem(ring: &Arc<Ring>, x: &BigRational) -> Elem {
    rat_vec_to_elem(ring, std::slice::from_ref(x))
}

/// Flat rational coordinates as an element of `ring`.
pub fn rat_vec_to_elem(ring: &Arc<Ring>, xs: &[BigRational]) -> Elem {
    let p = ring.p();
    let cap = ring.cap() as i64;
    let mut v = i64::MAX;
    for x in xs {
        if !x.is_zero() {
            v = v.min(vp_rat(x, p));
        }
    }
    if v == i64::MAX {
        return Elem::zero(ring);
    }
    // scale by p^-v, reduce every coordinate modulo p^cap
    let m = num_traits::pow(BigInt::from(p), cap as usize);
    let mut coords = vec![BigInt::zero(); ring.dim()];
    for (i, x) in xs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let s = if v >= 0 {
            x / BigRational::from_integer(num_traits::pow(BigInt::from(p), v as usize))
        } else {
            x * BigRational::from_integer(num_traits::pow(BigInt::from(p), (-v) as usize))
        };
        let inv = mod_inverse(s.denom(), &m);
        coords[i] = (s.numer() * inv).mod_floor(&m);
    }
    let unit = Elem::from_coords(ring, coords).with_abs_prec(cap);
    if v >= 0 {
        unit.mul_ref(&Elem::from_bigint(ring, &num_traits::pow(BigInt::from(p), v as usize)))
    } else {
        unit.shift_p(v)
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    assert!(g.gcd.is_one(), "not invertible");
    g.x.mod_floor(m)
}

/// Dense polynomials with rational coefficients modulo a monic integer modulus.
#[derive(Clone)]
pub struct RatField {
    pub modulus: Vec<BigRational>,
}

impl RatField {
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn reduce(&self, mut a: Vec<BigRational>) -> Vec<BigRational> {
        let d = self.degree();
        while a.len() > d {
            let c = a.pop().unwrap();
            if c.is_zero() {
                continue;
            }
            let shift = a.len() - d;
            for i in 0..d {
                a[shift + i] -= &c * &self.modulus[i];
            }
        }
        a.resize(d, BigRational::zero());
        a
    }

    pub fn mul(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        self.reduce(out)
    }

    pub fn scale(&self, a: &[BigRational], c: &BigRational) -> Vec<BigRational> {
        a.iter().map(|x| x * c).collect()
    }

    pub fn add(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn zero(&self) -> Vec<BigRational> {
        vec![BigRational::zero(); self.degree()]
    }

    pub fn one(&self) -> Vec<BigRational> {
        let mut v = self.zero();
        v[0] = BigRational::one();
        v
    }

    /// Generator class `X`.
    pub fn gen(&self) -> Vec<BigRational> {
        self.reduce(vec![BigRational::zero(), BigRational::one()])
    }

    /// `poly(a)` for an integer polynomial.
    pub fn eval_int_poly(&self, poly: &[i64], a: &[BigRational]) -> Vec<BigRational> {
        let mut acc = self.zero();
        for &c in poly.iter().rev() {
            acc = self.mul(&acc, a);
            acc[0] += rat(c, 1);
        }
        acc
    }
}

/// Integer polynomial arithmetic for building tower moduli in the oracle.
pub fn int_poly_mul(a: &[i64], b: &[i64]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += BigInt::from(*x) * BigInt::from(*y);
        }
    }
    out
}

/// `Q^(n)(X) / Q^(n-1)(X)` over the integers for an integer polynomial `Q`.
pub fn division_modulus(q: &[i64], n: usize) -> Vec<BigRational> {
    let compose = |f: &[BigInt], g: &[BigInt]| -> Vec<BigInt> {
        let mut acc = vec![BigInt::zero()];
        for c in f.iter().rev() {
            let mut next = vec![BigInt::zero(); acc.len() + g.len() - 1];
            for (i, x) in acc.iter().enumerate() {
                for (j, y) in g.iter().enumerate() {
                    next[i + j] += x * y;
                }
            }
            next[0] += c;
            acc = next;
        }
        while acc.len() > 1 && acc.last().unwrap().is_zero() {
            acc.pop();
        }
        acc
    };
    let qb: Vec<BigInt> = q.iter().map(|&x| BigInt::from(x)).collect();
    let mut prev = vec![BigInt::zero(), BigInt::one()];
    let mut cur = qb.clone();
    for _ in 1..n {
        prev = cur.clone();
        cur = compose(&qb, &cur);
    }
    // exact division cur / prev
    let mut rem = cur.clone();
    let dq = rem.len() - prev.len();
    let mut quot = vec![BigInt::zero(); dq + 1];
    let lead = prev.last().unwrap().clone();
    for k in (0..=dq).rev() {
        let c = &rem[k + prev.len() - 1] / &lead;
        for (i, y) in prev.iter().enumerate() {
            rem[k + i] -= &c * y;
        }
        quot[k] = c;
    }
    assert!(rem.iter().all(|x| x.is_zero()), "Q^(n-1) does not divide Q^(n)");
    quot.into_iter().map(BigRational::from_integer).collect()
}

/// The series `exp(sum_{i<n} w_{n-i} (X^(p^i) - X^(p^(i+1))) / p^i)` over
/// `Q[w]/(modulus)` with `w = w_n`, for `K = Q_p` and integer `Q`.
pub fn dwork_oracle(p: u64, q_poly: &[i64], n: usize, d: usize) -> (RatField, Vec<Vec<BigRational>>) {
    let modulus = division_modulus(q_poly, n);
    let field = RatField { modulus };
    let w = field.gen();
    // w_{n-i} = Q^(i)(w_n)
    let mut ws = vec![w.clone()];
    for i in 1..n {
        let next = field.eval_int_poly(q_poly, &ws[i - 1]);
        ws.push(next);
    }
    let mut g: Vec<Vec<BigRational>> = vec![field.zero(); d + 1];
    let mut pi = 1u64;
    for wi in ws.iter().take(n) {
        let lo = pi as usize;
        let hi = (pi * p) as usize;
        let c = field.scale(wi, &rat(1, pi as i64));
        if lo <= d {
            g[lo] = field.add(&g[lo], &c);
        }
        if hi <= d {
            g[hi] = field.add(&g[hi], &field.scale(&c, &rat(-1, 1)));
        }
        pi *= p;
    }
    let mut e: Vec<Vec<BigRational>> = vec![field.one()];
    for m in 1..=d {
        let mut acc = field.zero();
        for j in 1..=m {
            if g[j].iter().all(|x| x.is_zero()) {
                continue;
            }
            let t = field.mul(&g[j], &e[m - j]);
            acc = field.add(&acc, &field.scale(&t, &rat(j as i64, 1)));
        }
        e.push(field.scale(&acc, &rat(1, m as i64)));
    }
    (field, e)
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}
