//! Lubin-Tate extensions `K_{pi',n} = K(omega_n)` as flat towers over `K`.
//!
//! Elements of the tower are plain [`Elem`]s of [`Tower::ring`]; the top
//! layer has the generator `omega_n` and the Eisenstein modulus
//! `Q^(n)(X) / Q^(n-1)(X)`.

pub mod checks;
pub mod galois;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{LtError, Result};
use crate::padic::{integral_coords, linalg, poly_eval, Context, Elem, Ring, Valuation};

pub use checks::{
    prop2_check, prop3_check, prop3_digit_vectors, same_field_hypothesis, thm4_check, AlphaReport, CheckOptions,
    CurlyFamily, Prop2Level, Prop2Report, Prop3Report, Thm4Report,
};
pub use galois::{division_point_check, galois_conjugate, trace_to_m, DivisionPoint, DivisionPointReport, PartialTrace};

/// Product of polynomials (low degree first).
pub fn poly_mul(a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let ring = a[0].ring();
    let mut out = vec![Elem::zero(ring); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_exact_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_exact_zero() {
                out[i + j] = out[i + j].add_ref(&x.mul_ref(y));
            }
        }
    }
    out
}

/// `f(g(X))`.
pub fn poly_compose(f: &[Elem], g: &[Elem]) -> Vec<Elem> {
    let ring = g[0].ring();
    let mut acc = vec![f.last().map_or_else(|| Elem::zero(ring), |c| c.embed(ring))];
    for c in f.iter().rev().skip(1) {
        acc = poly_mul(&acc, g);
        acc[0] = acc[0].add_ref(c);
    }
    acc
}

/// Division by a monic polynomial: `(quotient, remainder)`.
pub fn poly_divrem_monic(a: &[Elem], b: &[Elem]) -> (Vec<Elem>, Vec<Elem>) {
    let db = b.len() - 1;
    let mut rem = a.to_vec();
    if a.len() <= db {
        return (vec![Elem::zero(a[0].ring())], rem);
    }
    let dq = a.len() - 1 - db;
    let mut quot = vec![Elem::zero(a[0].ring()); dq + 1];
    for k in (0..=dq).rev() {
        let c = rem[k + db].clone();
        for (i, y) in b.iter().enumerate() {
            rem[k + i] = rem[k + i].sub_ref(&c.mul_ref(y));
        }
        quot[k] = c;
    }
    rem.truncate(db);
    (quot, rem)
}

/// `K_{pi',n}` with its coherent roots `omega_1, ..., omega_n`.
#[derive(Clone, Debug)]
pub struct Tower {
    ctx: Context,
    pi_prime: Elem,
    q_poly: Vec<Elem>,
    n: usize,
    modulus: Vec<Elem>,
    ring: Arc<Ring>,
    omegas: Vec<Elem>,
}

/// Valuation of a tower element, read from coordinates and cross-checked
/// against the determinant of multiplication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerValuation {
    pub v_p: Ratio<i64>,
    /// In units of the normalised valuation of the tower field.
    pub v_l: i64,
    pub det_agrees: bool,
}

pub fn build_tower(ctx: &Context, q_poly: &[Elem], pi_prime: &Elem, n: usize) -> Result<Tower> {
    if n == 0 {
        return Err(LtError::InvalidParameter("tower level must be at least 1".into()));
    }
    let q = ctx.q() as usize;
    if q_poly.len() != q + 1 || !q_poly[q].agrees_with(&ctx.one()) {
        return Err(LtError::InvalidParameter("Q must be a monic polynomial of degree q".into()));
    }
    let ring = ctx.ring();
    let q_poly: Vec<Elem> = q_poly.iter().map(|c| c.embed(ring)).collect();
    let mut prev = vec![Elem::zero(ring), Elem::one(ring)];
    let mut cur = q_poly.clone();
    for _ in 1..n {
        prev = cur.clone();
        cur = poly_compose(&q_poly, &cur);
    }
    let (modulus, rem) = poly_divrem_monic(&cur, &prev);
    if rem.iter().any(|r| !r.is_zero()) {
        return Err(LtError::NonzeroRemainder);
    }
    check_eisenstein(&modulus)?;
    let d = modulus.len() - 1;
    debug_assert_eq!(d, q.pow(n as u32 - 1) * (q - 1));
    let lower: Vec<Vec<BigInt>> = modulus[..d].iter().map(integral_coords).collect();
    let top = Ring::extend(ring, lower, true);
    let omega_n = if d == 1 {
        // q = 2, n = 1: omega_1 = -f_1(0) already lies in K
        modulus[0].neg_ref().embed(&top)
    } else {
        let mut g = vec![BigInt::zero(); top.dim()];
        g[ring.dim()] = 1.into();
        Elem::from_coords(&top, g)
    };
    let mut omegas = vec![omega_n];
    for _ in 1..n {
        let next = poly_eval(&q_poly, omegas.last().unwrap());
        omegas.push(next);
    }
    omegas.reverse();
    if !poly_eval(&q_poly, &omegas[0]).is_zero() || omegas[0].is_zero() {
        return Err(LtError::HypothesisViolated("omega_1 is not a nonzero root of Q".into()));
    }
    Ok(Tower { ctx: ctx.clone(), pi_prime: pi_prime.clone(), q_poly, n, modulus, ring: top, omegas })
}

/// Monic, constant term of valuation one (in `K`), other lower coefficients in the maximal ideal.
fn check_eisenstein(m: &[Elem]) -> Result<()> {
    let d = m.len() - 1;
    if m[d].v_units() != Some(0) {
        return Err(LtError::NotEisenstein("leading coefficient is not a unit".into()));
    }
    match m[0].v_units() {
        Some(1) => {}
        v => return Err(LtError::NotEisenstein(format!("constant term has valuation {v:?} (units of 1/e)"))),
    }
    for (i, c) in m[1..d].iter().enumerate() {
        if !(c.is_zero() || c.v_units().is_some_and(|v| v >= 1)) {
            return Err(LtError::NotEisenstein(format!("coefficient {} is a unit", i + 1)));
        }
    }
    Ok(())
}

impl Tower {
    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn level(&self) -> usize {
        self.n
    }

    pub fn pi_prime(&self) -> &Elem {
        &self.pi_prime
    }

    pub fn q_poly(&self) -> &[Elem] {
        &self.q_poly
    }

    /// `f_n`, monic, low degree first.
    pub fn modulus(&self) -> &[Elem] {
        &self.modulus
    }

    /// `[K_{pi',n} : K] = q^(n-1) (q-1)`.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// `omega_i` for `1 <= i <= n`.
    pub fn omega(&self, i: usize) -> &Elem {
        &self.omegas[i - 1]
    }

    pub fn omegas(&self) -> &[Elem] {
        &self.omegas
    }

    pub fn elem(&self, x: &Elem) -> Elem {
        x.embed(&self.ring)
    }

    /// Element `sum_j c_j omega_n^j` with `c_j` in `K`.
    pub fn from_power_basis(&self, c: &[Elem]) -> Elem {
        let d = self.degree();
        let mut blocks: Vec<Elem> = c.iter().map(|x| x.embed(self.ctx.ring())).collect();
        blocks.resize(d, Elem::zero(self.ctx.ring()));
        Elem::from_blocks(&self.ring, &blocks)
    }

    /// Coordinates over `K` in the basis `1, omega_n, ..., omega_n^(d-1)`.
    pub fn power_basis_coords(&self, x: &Elem) -> Vec<Elem> {
        (0..self.degree()).map(|c| x.embed(&self.ring).block(c)).collect()
    }

    /// Valuation from coordinates, checked against `v_p(det M_x) / [L:Q_p]`.
    pub fn valuation(&self, x: &Elem) -> Result<TowerValuation> {
        let x = x.embed(&self.ring);
        let v = x.valuation().exact().ok_or(LtError::IndeterminateValuation)?;
        let e = self.ring.e() as i64;
        let vd = det_valuation(&x)?;
        Ok(TowerValuation { v_p: v, v_l: (v * Ratio::from_integer(e)).to_integer(), det_agrees: vd == Some(v) })
    }

    /// Trace down to `K`.
    pub fn trace_to_k(&self, x: &Elem) -> Elem {
        let x = x.embed(&self.ring);
        let w = &self.omegas[self.n - 1];
        let mut basis = Elem::one(&self.ring);
        let mut acc = Elem::zero(self.ctx.ring());
        for j in 0..self.degree() {
            acc = acc.add_ref(&x.mul_ref(&basis).block(j));
            basis = basis.mul_ref(w);
        }
        acc
    }
}

/// `v_p(det M_x) / [L:Q_p]`, `None` if the determinant is indistinguishable from zero.
fn det_valuation(x: &Elem) -> Result<Option<Ratio<i64>>> {
    let ring = x.ring();
    let qp = ring.scalars();
    let coords = integral_coords(&x.shift_p(-x.exponent()));
    let rel = x.rel_prec() as i64;
    let m: Vec<Vec<Elem>> = ring
        .mul_matrix(&coords)
        .into_iter()
        .map(|row| row.into_iter().map(|c| Elem::from_bigint(&qp, &c).with_abs_prec(rel)).collect())
        .collect();
    let det = linalg::det(m)?;
    let dim = ring.dim() as i64;
    Ok(match det.valuation() {
        Valuation::Exact(v) => Some(v / Ratio::from_integer(dim) + Ratio::from_integer(x.exponent())),
        Valuation::AtLeast(_) => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_group::{lt_polynomial, LtPreset};
    use crate::padic::make_context;

    #[test]
    fn level_one_canonical() {
        let k = make_context(5, 1, None, 20).unwrap();
        let q = lt_polynomial(&k, k.pi(), &LtPreset::Canonical).unwrap();
        let t = build_tower(&k, &q, k.pi(), 1).unwrap();
        assert_eq!(t.degree(), 4);
        // X^4 + 5
        assert!(t.modulus()[0].agrees_with(&k.elem(5)));
        assert!(t.modulus()[1..4].iter().all(|c| c.is_zero()));
        let v = t.valuation(t.omega(1)).unwrap();
        assert_eq!(v.v_p, Ratio::new(1, 4));
        assert!(v.det_agrees);
    }

    #[test]
    fn level_two_degree_and_chain() {
        let k = make_context(3, 1, None, 30).unwrap();
        let q = lt_polynomial(&k, k.pi(), &LtPreset::Canonical).unwrap();
        let t = build_tower(&k, &q, k.pi(), 2).unwrap();
        assert_eq!(t.degree(), 6);
        assert_eq!(t.valuation(t.omega(2)).unwrap().v_p, Ratio::new(1, 6));
        assert_eq!(t.valuation(t.omega(1)).unwrap().v_p, Ratio::new(1, 2));
        assert!(poly_eval(&q, t.omega(1)).is_zero());
        assert!(t.trace_to_k(&Elem::one(t.ring())).agrees_with(&k.elem(6)));
        let w2 = t.trace_to_k(t.omega(2));
        assert!(w2.agrees_with(&t.modulus()[5].neg_ref()));
    }

    #[test]
    fn degree_one_level_for_q_two() {
        let k = make_context(2, 1, None, 30).unwrap();
        let q = lt_polynomial(&k, k.pi(), &LtPreset::Canonical).unwrap();
        let t = build_tower(&k, &q, k.pi(), 1).unwrap();
        assert_eq!(t.degree(), 1);
        assert!(t.omega(1).agrees_with(&t.elem(&k.elem(-2))));
        assert!(poly_eval(&q, t.omega(1)).is_zero());
        let t2 = build_tower(&k, &q, k.pi(), 2).unwrap();
        assert_eq!(t2.degree(), 2);
        assert!(poly_eval(&q, t2.omega(2)).agrees_with(t2.omega(1)));
    }
}
