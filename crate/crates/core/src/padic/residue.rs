//! Polynomials over `F_p` and the residue field `F_q = F_p[u]/(m(u))`.

/// Dense polynomial over `F_p`, little-endian, no trailing zeros.
pub type FpPoly = Vec<u64>;

fn trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn fp_inv(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "inverse of zero mod {p}");
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn poly_sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y % p) % p
        })
        .collect();
    trim(out)
}

pub fn poly_mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo `m` (any nonzero `m`).
pub fn poly_rem(a: &[u64], m: &[u64], p: u64) -> FpPoly {
    let m = trim(m.to_vec());
    assert!(!m.is_empty(), "division by zero polynomial");
    let mut r = trim(a.to_vec());
    let lead_inv = fp_inv(*m.last().unwrap(), p);
    while r.len() >= m.len() {
        let c = r.last().unwrap() * lead_inv % p;
        let shift = r.len() - m.len();
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
        }
        r = trim(r);
    }
    r
}

pub fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&l) = a.last() {
        let inv = fp_inv(l, p);
        for c in a.iter_mut() {
            *c = *c * inv % p;
        }
    }
    a
}

/// `X^(p^k) mod m`.
fn frob_power_of_x(k: u32, m: &[u64], p: u64) -> FpPoly {
    let mut x = poly_rem(&[0, 1], m, p);
    for _ in 0..k {
        x = poly_powmod(&x, p, m, p);
    }
    x
}

pub fn poly_powmod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> FpPoly {
    let mut base = poly_rem(a, m, p);
    let mut acc = poly_rem(&[1], m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &base, p), m, p);
        }
        base = poly_rem(&poly_mul(&base, &base, p), m, p);
        e >>= 1;
    }
    acc
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test for a monic polynomial of degree `f`.
pub fn is_irreducible(m: &[u64], p: u64) -> bool {
    let m = trim(m.iter().map(|c| c % p).collect());
    if m.len() < 2 {
        return false;
    }
    let f = (m.len() - 1) as u32;
    let x = vec![0, 1];
    if !poly_rem(&poly_sub(&frob_power_of_x(f, &m, p), &x, p), &m, p).is_empty() {
        return false;
    }
    prime_factors(f).into_iter().all(|r| {
        let h = poly_sub(&frob_power_of_x(f / r, &m, p), &x, p);
        poly_gcd(&m, &h, p).len() == 1
    })
}

/// Lexicographically smallest monic irreducible polynomial of degree `f`.
pub fn smallest_irreducible(f: u32, p: u64) -> FpPoly {
    if f == 1 {
        return vec![0, 1];
    }
    let count = p.pow(f);
    for n in 0..count {
        let mut m = Vec::with_capacity(f as usize + 1);
        let mut rest = n;
        for _ in 0..f {
            m.push(rest % p);
            rest /= p;
        }
        m.push(1);
        if m[0] != 0 && is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials of every degree exist")
}

/// The residue field `F_p[u]/(m)` with elements as coordinate vectors of length `f`.
#[derive(Clone, Debug)]
pub struct ResidueField {
    pub p: u64,
    pub modulus: FpPoly,
}

pub type Fq = Vec<u64>;

impl ResidueField {
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.degree() as u32)
    }

    pub fn normalize(&self, a: &[u64]) -> Fq {
        let mut r = poly_rem(a, &self.modulus, self.p);
        r.resize(self.degree(), 0);
        r
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Fq {
        self.normalize(&poly_mul(&trim(a.to_vec()), &trim(b.to_vec()), self.p))
    }

    pub fn pow(&self, a: &[u64], e: u64) -> Fq {
        let mut r = poly_powmod(&trim(a.to_vec()), e, &self.modulus, self.p);
        r.resize(self.degree(), 0);
        r
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c % self.p == 0)
    }

    pub fn one(&self) -> Fq {
        self.normalize(&[1])
    }

    /// All elements in a fixed order (base-p counting on the coordinates).
    pub fn elements(&self) -> Vec<Fq> {
        let f = self.degree();
        (0..self.order())
            .map(|mut n| {
                (0..f)
                    .map(|_| {
                        let d = n % self.p;
                        n /= self.p;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    pub fn units(&self) -> Vec<Fq> {
        self.elements().into_iter().filter(|a| !self.is_zero(a)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&[1, 0, 1], 3)); // u^2 + 1
        assert!(!is_irreducible(&[1, 0, 1], 5)); // 2^2 = -1 mod 5
        assert!(is_irreducible(&[1, 1, 1], 2));
        assert_eq!(smallest_irreducible(2, 3), vec![1, 0, 1]);
        assert_eq!(smallest_irreducible(3, 2), vec![1, 1, 0, 1]);
    }

    #[test]
    fn field_of_nine_elements() {
        let k = ResidueField { p: 3, modulus: vec![1, 0, 1] };
        let units = k.units();
        assert_eq!(units.len(), 8);
        for a in &units {
            assert_eq!(k.pow(a, 8), k.one());
        }
        // u has order 4 since u^2 = -1
        assert_eq!(k.pow(&[0, 1], 2), vec![2, 0]);
    }
}
