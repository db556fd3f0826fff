//! Universal polynomials for Witt vector arithmetic, obtained by running the
//! ghost recursion over a polynomial algebra.

use std::collections::BTreeMap;

use super::{MultiPoly, WittVector};
use crate::error::{LtError, Result};
use crate::padic::{make_context, residue, Context, Elem};

/// `S_i, P_i, C_{x,i}, F_i, I_i` for `i <= n`.
///
/// Variables are `X_0..X_{n+1}` (indices `0..n+2`) followed by `Y_0..Y_{n+1}`;
/// only `F_i` uses `X_{n+1}`.
#[derive(Clone, Debug)]
pub struct Structural {
    pub n: usize,
    pub sum: Vec<MultiPoly>,
    pub product: Vec<MultiPoly>,
    pub scalar: Option<Vec<MultiPoly>>,
    pub frobenius: Vec<MultiPoly>,
    pub inverse: Vec<MultiPoly>,
}

impl Structural {
    pub fn nvars(&self) -> usize {
        2 * (self.n + 2)
    }

    pub fn x_index(&self, i: usize) -> usize {
        i
    }

    pub fn y_index(&self, i: usize) -> usize {
        self.n + 2 + i
    }

    pub fn var_names(&self) -> Vec<String> {
        let k = self.n + 2;
        (0..k).map(|i| format!("X{i}")).chain((0..k).map(|i| format!("Y{i}"))).collect()
    }

    pub fn display(&self, p: &MultiPoly) -> String {
        p.display_with(&self.var_names())
    }
}

pub fn structural_polys(ctx: &Context, pi: &Elem, n: usize, x: Option<&Elem>) -> Result<Structural> {
    if n > 2 {
        return Err(LtError::InvalidParameter(format!("structural polynomials are limited to n <= 2, got {n}")));
    }
    let ring = ctx.ring();
    let q = ctx.q();
    let k = n + 2;
    let nv = 2 * k;
    let var = |i: usize| MultiPoly::var(ring, nv, i);
    let xs: Vec<MultiPoly> = (0..=n).map(var).collect();
    let ys: Vec<MultiPoly> = (0..=n).map(|i| var(k + i)).collect();
    let wx = WittVector::new(xs, pi, q);
    let wy = WittVector::new(ys, pi, q);
    let sum = wx.add(&wy)?.components().to_vec();
    let product = wx.mul(&wy)?.components().to_vec();
    let inverse = wx.neg()?.components().to_vec();
    let scalar = match x {
        Some(x) => Some(wx.scalar(x)?.components().to_vec()),
        None => None,
    };
    let long = WittVector::new((0..k).map(var).collect(), pi, q);
    let frobenius = long.frobenius()?.components().to_vec();
    Ok(Structural { n, sum, product, scalar, frobenius, inverse })
}

/// A polynomial over `F_p` as a function on `F_p^k`: exponents reduced into
/// `1..p-1` and like terms merged.
struct FpFunction {
    p: u64,
    terms: Vec<(u64, Vec<u32>)>,
}

impl FpFunction {
    fn new(poly: &MultiPoly, vars: &[usize]) -> Option<FpFunction> {
        let p = poly.ring().p();
        let mut merged: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for (e, c) in poly.terms() {
            let c = c.residue()?[0] % p;
            if c == 0 {
                continue;
            }
            for (i, &k) in e.iter().enumerate() {
                if k > 0 && !vars.contains(&i) {
                    return None;
                }
            }
            let red: Vec<u32> = vars
                .iter()
                .map(|&i| {
                    let k = e[i];
                    if k == 0 {
                        0
                    } else {
                        ((k - 1) % (p as u32 - 1)) + 1
                    }
                })
                .collect();
            let t = merged.entry(red).or_insert(0);
            *t = (*t + c) % p;
        }
        Some(FpFunction { p, terms: merged.into_iter().filter(|(_, c)| *c != 0).map(|(e, c)| (c, e)).collect() })
    }

    fn eval(&self, vals: &[u64], pow: &[Vec<u64>]) -> u64 {
        let mut acc = 0;
        for (c, e) in &self.terms {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t * pow[vals[i] as usize][k as usize] % self.p;
                    if t == 0 {
                        break;
                    }
                }
            }
            acc += t;
        }
        acc % self.p
    }
}

/// Checks that the structural polynomials of `W_{Z_p,p}` reduced mod `p`
/// make length-`m` vectors over `F_p` a ring isomorphic to `Z/p^m`.
///
/// Exhaustive: the Teichmuller-digit map `a -> sum p^i [a_i]` must be a
/// bijection onto `Z/p^m` carrying Witt sums and products to sums and
/// products, and `(1,0,..)` must have additive order `p^m`.
pub fn classical_oracle(p: u64, m: usize) -> Result<bool> {
    if !residue::is_prime(p) {
        return Err(LtError::NotPrime(p));
    }
    if m == 0 || m > 3 {
        return Err(LtError::InvalidParameter(format!("length must be in 1..=3, got {m}")));
    }
    let ctx = make_context(p, 1, None, 12)?;
    let n = m - 1;
    let st = structural_polys(&ctx, ctx.pi(), n, None)?;
    let vars: Vec<usize> = (0..m).map(|i| st.x_index(i)).chain((0..m).map(|i| st.y_index(i))).collect();
    let compile = |ps: &[MultiPoly]| -> Option<Vec<FpFunction>> { ps.iter().map(|f| FpFunction::new(f, &vars)).collect() };
    let (Some(sum), Some(prod)) = (compile(&st.sum), compile(&st.product)) else {
        return Ok(false);
    };
    let pu = p as usize;
    let pow: Vec<Vec<u64>> = (0..p)
        .map(|a| {
            let mut row = vec![1u64; pu];
            for k in 1..pu {
                row[k] = row[k - 1] * a % p;
            }
            row
        })
        .collect();
    let modulus = p.pow(m as u32);
    let teich: Vec<u64> = (0..p).map(|a| modpow(a, p.pow(m as u32 - 1), modulus)).collect();
    let size = modulus as usize;
    let digits = |idx: usize| -> Vec<u64> { (0..m).map(|i| (idx / pu.pow(i as u32) % pu) as u64).collect() };
    let to_int = |a: &[u64]| -> u64 {
        let mut acc = 0;
        let mut pk = 1;
        for &d in a {
            acc = (acc + pk * teich[d as usize]) % modulus;
            pk *= p;
        }
        acc
    };
    let all: Vec<Vec<u64>> = (0..size).map(digits).collect();
    let images: Vec<u64> = all.iter().map(|a| to_int(a)).collect();
    let mut seen = vec![false; size];
    for &v in &images {
        if seen[v as usize] {
            return Ok(false);
        }
        seen[v as usize] = true;
    }
    let apply = |fs: &[FpFunction], a: &[u64], b: &[u64]| -> Vec<u64> {
        let vals: Vec<u64> = a.iter().chain(b).copied().collect();
        fs.iter().map(|f| f.eval(&vals, &pow)).collect()
    };
    // additive order of the identity
    let mut one = vec![0u64; m];
    one[0] = 1;
    let mut acc = one.clone();
    for _ in 1..modulus {
        if acc.iter().all(|&d| d == 0) {
            return Ok(false);
        }
        acc = apply(&sum, &acc, &one);
    }
    if acc.iter().any(|&d| d != 0) {
        return Ok(false);
    }
    for (i, a) in all.iter().enumerate() {
        for (j, b) in all.iter().enumerate() {
            let s = apply(&sum, a, b);
            if to_int(&s) != (images[i] + images[j]) % modulus {
                return Ok(false);
            }
            let t = apply(&prod, a, b);
            if to_int(&t) != images[i] * images[j] % modulus {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witt::multipoly::small_integer;

    #[test]
    fn level_zero_and_frobenius() {
        let k = make_context(3, 1, None, 20).unwrap();
        let st = structural_polys(&k, k.pi(), 1, None).unwrap();
        assert_eq!(st.display(&st.sum[0]), "X0 + Y0");
        assert_eq!(st.display(&st.product[0]), "X0*Y0");
        assert_eq!(st.display(&st.frobenius[0]), "X0^3 + 3*X1");
        // S_1 = X1 + Y1 - X0^2 Y0 - X0 Y0^2
        let s1 = &st.sum[1];
        assert_eq!(s1.len(), 4);
        let mut e = vec![0u32; st.nvars()];
        e[0] = 2;
        e[st.y_index(0)] = 1;
        assert_eq!(small_integer(&s1.coeff(&e)), Some(-1));
    }

    #[test]
    fn small_classical_cases() {
        assert!(classical_oracle(3, 1).unwrap());
        assert!(classical_oracle(2, 2).unwrap());
    }
}
