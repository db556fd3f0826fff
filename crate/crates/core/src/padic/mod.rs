//! The base field `K`: an unramified extension of `Q_p` followed by an
//! optional Eisenstein extension, with residue-field operations, Hensel
//! lifting and Teichmüller representatives.

pub mod elem;
pub mod linalg;
pub mod residue;
pub mod ring;

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use elem::{Elem, ElemJson, Valuation, PREC_INF};
pub use residue::{Fq, ResidueField};
pub use ring::Ring;

use crate::error::{LtError, Result};

/// Serialized form of a [`Context`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextJson {
    pub p: u64,
    pub f: u32,
    pub unram_modulus: Vec<i64>,
    #[serde(default)]
    pub eisenstein_modulus: Option<Vec<Vec<i64>>>,
    #[serde(rename = "N")]
    pub n: u32,
}

/// A finite extension `K/Q_p` at working precision `N` p-adic digits.
#[derive(Clone)]
pub struct Context {
    p: u64,
    f: u32,
    n: u32,
    unram: Vec<i64>,
    eis: Option<Vec<Vec<i64>>>,
    residue: ResidueField,
    ring: Arc<Ring>,
    pi: Elem,
}

impl std::fmt::Debug for Context {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Context(p={}, f={}, e={}, N={})", self.p, self.f, self.e(), self.n)
    }
}

/// Build a validated context. `eis` lists the coefficients (low degree
/// first, each a coordinate vector over the unramified stage) of an
/// Eisenstein polynomial; `None` means `K` is unramified with `pi = p`.
pub fn make_context(p: u64, f: u32, eis: Option<Vec<Vec<i64>>>, n: u32) -> Result<Context> {
    if !residue::is_prime(p) {
        return Err(LtError::NotPrime(p));
    }
    if f == 0 {
        return Err(LtError::InvalidParameter("f must be at least 1".into()));
    }
    let unram: Vec<i64> = residue::smallest_irreducible(f, p).into_iter().map(|c| c as i64).collect();
    Context::with_moduli(p, unram, eis, n)
}

impl Context {
    /// Build a context from an explicit unramified modulus (monic, degree `f`).
    pub fn with_moduli(p: u64, unram: Vec<i64>, eis: Option<Vec<Vec<i64>>>, n: u32) -> Result<Context> {
        if !residue::is_prime(p) {
            return Err(LtError::NotPrime(p));
        }
        if n < 4 {
            return Err(LtError::InvalidParameter(format!("N = {n} is below the minimum 4")));
        }
        if unram.len() < 2 || *unram.last().unwrap() != 1 {
            return Err(LtError::InvalidParameter("unramified modulus must be monic of degree >= 1".into()));
        }
        let f = (unram.len() - 1) as u32;
        let modp: Vec<u64> = unram.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
        if !residue::is_irreducible(&modp, p) {
            return Err(LtError::ReducibleModulus);
        }
        let residue = ResidueField { p, modulus: modp };
        let qp = Ring::qp(p, n);
        let base = if f > 1 {
            let m = unram[..f as usize].iter().map(|&c| vec![BigInt::from(c)]).collect();
            Ring::extend(&qp, m, false)
        } else {
            qp
        };
        let (ring, pi, eis) = match eis {
            None => {
                let pi = Elem::from_i64(&base, p as i64);
                (base, pi, None)
            }
            Some(coeffs) => {
                let m = eisenstein_flat(&base, &coeffs)?;
                let ring = Ring::extend(&base, m, true);
                let mut g = vec![BigInt::zero(); ring.dim()];
                g[base.dim()] = 1.into();
                let pi = Elem::from_coords(&ring, g);
                (ring, pi, Some(coeffs))
            }
        };
        Ok(Context { p, f, n, unram, eis, residue, ring, pi })
    }

    pub fn from_json(j: &ContextJson) -> Result<Context> {
        let ctx = Context::with_moduli(j.p, j.unram_modulus.clone(), j.eisenstein_modulus.clone(), j.n)?;
        if ctx.f != j.f {
            return Err(LtError::Config(format!("f = {} but unramified modulus has degree {}", j.f, ctx.f)));
        }
        Ok(ctx)
    }

    pub fn to_json(&self) -> ContextJson {
        ContextJson {
            p: self.p,
            f: self.f,
            unram_modulus: self.unram.clone(),
            eisenstein_modulus: self.eis.clone(),
            n: self.n,
        }
    }

    /// Same field at a different working precision.
    pub fn with_precision(&self, n: u32) -> Result<Context> {
        Context::with_moduli(self.p, self.unram.clone(), self.eis.clone(), n)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn e(&self) -> u32 {
        self.ring.e()
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.residue
    }

    pub fn pi(&self) -> &Elem {
        &self.pi
    }

    pub fn elem(&self, x: i64) -> Elem {
        Elem::from_i64(&self.ring, x)
    }

    pub fn zero(&self) -> Elem {
        Elem::zero(&self.ring)
    }

    pub fn one(&self) -> Elem {
        Elem::one(&self.ring)
    }

    /// `pi^k` for `k >= 0`.
    pub fn pi_pow(&self, k: u32) -> Elem {
        self.pi.pow(k as u64)
    }

    /// Element of the unramified stage with the given coordinates in `1, u, ..., u^(f-1)`.
    pub fn unram_elem(&self, coords: &[i64]) -> Elem {
        let mut v = vec![BigInt::zero(); self.ring.dim()];
        for (i, &c) in coords.iter().enumerate().take(self.f as usize) {
            v[i] = BigInt::from(c);
        }
        Elem::from_coords(&self.ring, v)
    }

    /// Residue class of an integral element.
    pub fn residue_of(&self, x: &Elem) -> Option<Fq> {
        x.residue()
    }

    /// The Teichmüller representative of `r`: the root of `X^q - X` reducing to `r`.
    pub fn teichmuller_root(&self, r: &[u64]) -> Elem {
        let r = self.residue.normalize(r);
        if self.residue.is_zero(&r) {
            return self.zero();
        }
        let coords: Vec<i64> = r.iter().map(|&c| c as i64).collect();
        let mut x = self.unram_elem(&coords);
        let q = self.q();
        // x -> x^q gains one digit per step
        for _ in 0..=self.n + 1 {
            let y = x.pow(q);
            if y.agrees_with(&x) && y.abs_prec() >= x.abs_prec() {
                return y;
            }
            x = y;
        }
        x
    }

    /// Teichmüller representatives of all nonzero residues, in the order of
    /// [`ResidueField::units`]. The first entry is `1`.
    pub fn roots_of_unity(&self) -> Vec<Elem> {
        let mut units = self.residue.units();
        let one = self.residue.one();
        units.sort_by_key(|u| u != &one);
        units.iter().map(|u| self.teichmuller_root(u)).collect()
    }

    /// Newton refinement of a simple root of `g` (coefficients low degree first).
    pub fn hensel_lift(&self, g: &[Elem], x0: &Elem) -> Result<Elem> {
        let dg = poly_derivative(g);
        let gx = poly_eval(g, x0);
        let dgx = poly_eval(&dg, x0);
        let vd = dgx.v_units().ok_or(LtError::HenselCriterionFailed)?;
        if let Some(vg) = gx.v_units() {
            if vg <= 2 * vd {
                return Err(LtError::HenselCriterionFailed);
            }
        }
        let mut x = x0.clone().with_abs_prec(PREC_INF);
        for _ in 0..2 * (64 - (self.n as u64).leading_zeros()) + 8 {
            let gx = poly_eval(g, &x);
            if gx.is_zero() {
                break;
            }
            let step = gx.div_ref(&poly_eval(&dg, &x))?;
            x = x.sub_ref(&step);
        }
        Ok(x)
    }
}

fn eisenstein_flat(base: &Arc<Ring>, coeffs: &[Vec<i64>]) -> Result<Vec<Vec<BigInt>>> {
    if coeffs.len() < 2 {
        return Err(LtError::NotEisenstein("degree must be at least 1".into()));
    }
    let to_elem = |c: &Vec<i64>| {
        let mut v = vec![BigInt::zero(); base.dim()];
        for (i, &x) in c.iter().enumerate() {
            if i >= base.dim() {
                return Err(LtError::NotEisenstein("coefficient has too many coordinates".into()));
            }
            v[i] = BigInt::from(x);
        }
        Ok(Elem::from_coords(base, v))
    };
    let elems = coeffs.iter().map(to_elem).collect::<Result<Vec<_>>>()?;
    let lead = elems.last().unwrap();
    if lead.v_units() != Some(0) {
        return Err(LtError::NotEisenstein("leading coefficient is not a unit".into()));
    }
    let inv = lead.inv()?;
    let mut out = Vec::with_capacity(elems.len() - 1);
    for (i, c) in elems[..elems.len() - 1].iter().enumerate() {
        let c = c.mul_ref(&inv);
        match c.v_units() {
            Some(v) if i == 0 && v != 1 => {
                return Err(LtError::NotEisenstein(format!("constant term has valuation {v}, expected 1")))
            }
            None if i == 0 => return Err(LtError::NotEisenstein("constant term vanishes".into())),
            Some(0) => return Err(LtError::NotEisenstein(format!("coefficient {i} is a unit"))),
            _ => {}
        }
        out.push(integral_coords(&c));
    }
    Ok(out)
}

/// Flat integer coordinates of an integral element (reduced to its precision).
pub(crate) fn integral_coords(x: &Elem) -> Vec<BigInt> {
    let dim = x.ring().dim();
    if x.is_zero() {
        return vec![BigInt::zero(); dim];
    }
    assert!(x.exponent() >= 0, "element is not integral");
    let s = x.ring().pow_p(x.exponent() as u32);
    x.unit().iter().map(|u| u * &s).collect()
}

/// Horner evaluation of a polynomial (low degree first).
pub fn poly_eval(coeffs: &[Elem], x: &Elem) -> Elem {
    let mut acc = Elem::zero(x.ring());
    for c in coeffs.iter().rev() {
        acc = acc.mul_ref(x).add_ref(&c.embed(x.ring()));
    }
    acc
}

pub fn poly_derivative(coeffs: &[Elem]) -> Vec<Elem> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| c.mul_int(i as i64)).collect()
}

/// Residue coordinates as small integers, for display.
pub fn residue_to_i64(r: &[u64]) -> Vec<i64> {
    r.iter().map(|&c| c.to_i64().unwrap()).collect()
}
