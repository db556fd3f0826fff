//! Flat presentation of a tower `Z_p ⊂ O_{K0} ⊂ O_K ⊂ O_L` of simple
//! extensions.
//!
//! An element of the top ring is stored as a vector of p-adic integers in the
//! monomial basis `u^a t^b w^c ...`, one digit per layer. The bottom layer may
//! be unramified (degree `f`), every further layer is Eisenstein over the ring
//! below it. Because of that shape the valuation of a vector can be read off
//! its coordinates directly: basis monomials have pairwise distinct valuations
//! modulo `1/e`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq)]
pub(crate) struct Layer {
    pub degree: usize,
    pub sub_dim: usize,
    pub ramified: bool,
    /// Lower coefficients `m_0..m_{d-1}` of the monic modulus, each a flat
    /// integral vector over the ring below.
    pub modulus: Vec<Vec<BigInt>>,
}

pub struct Ring {
    p: u64,
    cap: u32,
    layers: Vec<Layer>,
    dim: usize,
    e: u32,
    f: u32,
    weights: Vec<u32>,
    pows: Vec<BigInt>,
    parent: Option<Arc<Ring>>,
    scalars: OnceLock<Arc<Ring>>,
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let degs: Vec<_> = self
            .layers
            .iter()
            .map(|l| format!("{}{}", if l.ramified { "e" } else { "f" }, l.degree))
            .collect();
        write!(f, "Ring(p={}, cap={}, layers=[{}])", self.p, self.cap, degs.join(","))
    }
}

impl Ring {
    /// `Q_p` itself at relative precision `cap`.
    pub fn qp(p: u64, cap: u32) -> Arc<Ring> {
        Arc::new(Self::build(p, cap, Vec::new(), None))
    }

    fn build(p: u64, cap: u32, layers: Vec<Layer>, parent: Option<Arc<Ring>>) -> Ring {
        let dim = layers.iter().map(|l| l.degree).product::<usize>().max(1);
        let e = layers
            .iter()
            .filter(|l| l.ramified)
            .map(|l| l.degree as u32)
            .product::<u32>()
            .max(1);
        let f = layers
            .iter()
            .filter(|l| !l.ramified)
            .map(|l| l.degree as u32)
            .product::<u32>()
            .max(1);
        // weight of the generator of each layer, in units of 1/e
        let mut gen_w = vec![0u32; layers.len()];
        for (j, l) in layers.iter().enumerate() {
            if l.ramified {
                gen_w[j] = layers[j + 1..]
                    .iter()
                    .filter(|m| m.ramified)
                    .map(|m| m.degree as u32)
                    .product::<u32>()
                    .max(1);
            }
        }
        let mut weights = vec![0u32; dim];
        for (idx, w) in weights.iter_mut().enumerate() {
            let mut rest = idx;
            let mut acc = 0;
            for (j, l) in layers.iter().enumerate() {
                let digit = rest % l.degree;
                rest /= l.degree;
                acc += digit as u32 * gen_w[j];
            }
            *w = acc;
        }
        let pb = BigInt::from(p);
        let mut pows = Vec::with_capacity(2 * cap as usize + 4);
        let mut cur = BigInt::one();
        for _ in 0..(2 * cap as usize + 4) {
            pows.push(cur.clone());
            cur *= &pb;
        }
        Ring { p, cap, layers, dim, e, f, weights, pows, parent, scalars: OnceLock::new() }
    }

    /// Extend `base` by a monic modulus whose lower coefficients are flat
    /// vectors over `base`.
    pub(crate) fn extend(base: &Arc<Ring>, modulus: Vec<Vec<BigInt>>, ramified: bool) -> Arc<Ring> {
        let degree = modulus.len();
        let mut layers = base.layers.clone();
        layers.push(Layer { degree, sub_dim: base.dim, ramified, modulus });
        Arc::new(Self::build(base.p, base.cap, layers, Some(base.clone())))
    }

    /// Same tower with a different precision cap.
    pub fn with_cap(self: &Arc<Self>, cap: u32) -> Arc<Ring> {
        if cap == self.cap {
            return self.clone();
        }
        let parent = self.parent.as_ref().map(|p| p.with_cap(cap));
        Arc::new(Self::build(self.p, cap, self.layers.clone(), parent))
    }

    /// `Q_p` at the same precision cap.
    pub fn scalars(&self) -> Arc<Ring> {
        self.scalars
            .get_or_init(|| Ring::qp(self.p, self.cap + 4))
            .clone()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Relative precision cap in p-adic digits.
    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Absolute ramification index over `Q_p`.
    pub fn e(&self) -> u32 {
        self.e
    }

    /// Absolute residue degree.
    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn parent(&self) -> Option<&Arc<Ring>> {
        self.parent.as_ref()
    }

    pub(crate) fn top_layer(&self) -> Option<&Layer> {
        self.layers.last()
    }

    pub(crate) fn weight(&self, idx: usize) -> u32 {
        self.weights[idx]
    }

    pub(crate) fn pow_p(&self, k: u32) -> BigInt {
        match self.pows.get(k as usize) {
            Some(x) => x.clone(),
            None => num_traits::pow(BigInt::from(self.p), k as usize),
        }
    }

    pub(crate) fn pow_p_ref(&self, k: u32) -> std::borrow::Cow<'_, BigInt> {
        match self.pows.get(k as usize) {
            Some(x) => std::borrow::Cow::Borrowed(x),
            None => std::borrow::Cow::Owned(num_traits::pow(BigInt::from(self.p), k as usize)),
        }
    }

    /// True when `self` is (up to precision cap) a sub-tower of `other`,
    /// so that its elements embed by zero padding.
    pub fn is_prefix_of(&self, other: &Ring) -> bool {
        if self.p != other.p || self.layers.len() > other.layers.len() {
            return false;
        }
        let m = self.pow_p(self.cap.min(other.cap));
        self.layers.iter().zip(other.layers.iter()).all(|(a, b)| {
            a.degree == b.degree
                && a.ramified == b.ramified
                && a.modulus.iter().zip(b.modulus.iter()).all(|(x, y)| {
                    x.iter().zip(y.iter()).all(|(u, v)| u.mod_floor(&m) == v.mod_floor(&m))
                })
        })
    }

    pub fn same_tower(&self, other: &Ring) -> bool {
        self.layers.len() == other.layers.len() && self.is_prefix_of(other)
    }

    /// Product of two flat integral vectors, reduced by the layer moduli but
    /// not modulo any power of p.
    pub(crate) fn mul_flat(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        self.mul_level(self.layers.len(), a, b)
    }

    fn mul_level(&self, lvl: usize, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        if lvl == 0 {
            return vec![&a[0] * &b[0]];
        }
        let layer = &self.layers[lvl - 1];
        let d = layer.degree;
        let s = layer.sub_dim;
        let nz = |v: &[BigInt]| v.iter().any(|x| !x.is_zero());
        let mut blocks: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); s]; 2 * d - 1];
        let a_nz: Vec<bool> = (0..d).map(|i| nz(&a[i * s..(i + 1) * s])).collect();
        let b_nz: Vec<bool> = (0..d).map(|i| nz(&b[i * s..(i + 1) * s])).collect();
        for i in 0..d {
            if !a_nz[i] {
                continue;
            }
            for j in 0..d {
                if !b_nz[j] {
                    continue;
                }
                let prod = self.mul_level(lvl - 1, &a[i * s..(i + 1) * s], &b[j * s..(j + 1) * s]);
                for (t, x) in blocks[i + j].iter_mut().zip(prod) {
                    *t += x;
                }
            }
        }
        for k in (d..2 * d - 1).rev() {
            let c = std::mem::take(&mut blocks[k]);
            if !nz(&c) {
                continue;
            }
            for (i, m) in layer.modulus.iter().enumerate() {
                if !nz(m) {
                    continue;
                }
                let prod = self.mul_level(lvl - 1, &c, m);
                for (t, x) in blocks[k - d + i].iter_mut().zip(prod) {
                    *t -= x;
                }
            }
        }
        blocks.truncate(d);
        blocks.into_iter().flatten().collect()
    }

    /// Matrix (column `j` = coordinates of `u * b_j`) of multiplication by a
    /// flat vector in the flat basis.
    pub(crate) fn mul_matrix(&self, u: &[BigInt]) -> Vec<Vec<BigInt>> {
        let mut cols = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let mut basis = vec![BigInt::zero(); self.dim];
            basis[j] = BigInt::one();
            cols.push(self.mul_flat(u, &basis));
        }
        // transpose to rows
        (0..self.dim).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
    }
}

/// p-adic valuation of an integer, capped at `limit`.
pub(crate) fn vp_bigint(x: &BigInt, p: u64, limit: u32) -> u32 {
    if x.is_zero() {
        return limit;
    }
    if p == 2 {
        return (x.trailing_zeros().unwrap_or(0) as u32).min(limit);
    }
    let mut v = 0;
    let mut cur = x.abs();
    let pb = BigInt::from(p);
    while v < limit {
        let (q, r) = cur.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        cur = q;
        v += 1;
    }
    v
}
