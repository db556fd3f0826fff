//! Gaussian elimination over p-adic elements with valuation pivoting.

use super::elem::Elem;
use crate::error::{LtError, Result};

fn pivot_row(a: &[Vec<Elem>], col: usize, from: usize) -> Option<usize> {
    let mut best: Option<(usize, i64)> = None;
    for (i, row) in a.iter().enumerate().skip(from) {
        if let Some(v) = row[col].v_units() {
            if best.is_none_or(|(_, bv)| v < bv) {
                best = Some((i, v));
            }
        }
    }
    best.map(|(i, _)| i)
}

/// Reduce `a` (with augmented columns `b`) to row echelon form in place.
/// Returns the pivot columns, one per pivot row.
fn eliminate(a: &mut [Vec<Elem>], b: &mut [Vec<Elem>], sign: &mut bool) -> Result<Vec<usize>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = pivot_row(a, c, r) else { continue };
        if pr != r {
            a.swap(pr, r);
            b.swap(pr, r);
            *sign = !*sign;
        }
        let inv = a[r][c].inv()?;
        for i in r + 1..rows {
            if a[i][c].is_exact_zero() {
                continue;
            }
            let factor = a[i][c].mul_ref(&inv);
            for j in c..cols {
                let t = factor.mul_ref(&a[r][j]);
                a[i][j] = a[i][j].sub_ref(&t);
            }
            for j in 0..b[i].len() {
                let t = factor.mul_ref(&b[r][j]);
                b[i][j] = b[i][j].sub_ref(&t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(pivots)
}

/// Solve `a x = b` for a square matrix `a` (rows of elements).
pub fn solve(a: Vec<Vec<Elem>>, b: Vec<Elem>) -> Result<Vec<Elem>> {
    let n = a.len();
    if n == 0 || a.iter().any(|r| r.len() != n) || b.len() != n {
        return Err(LtError::InvalidParameter("solve needs a square system".into()));
    }
    solve_consistent(a, b)
}

/// Solve an overdetermined but consistent system `a x = b` with `a` of full
/// column rank. Rows beyond the rank must reduce to zero at the working
/// precision; otherwise [`LtError::RouteMismatch`] is returned.
pub fn solve_consistent(mut a: Vec<Vec<Elem>>, b: Vec<Elem>) -> Result<Vec<Elem>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut bb: Vec<Vec<Elem>> = b.into_iter().map(|x| vec![x]).collect();
    let mut sign = false;
    let pivots = eliminate(&mut a, &mut bb, &mut sign)?;
    if pivots.len() < cols {
        return Err(LtError::PrecisionExhausted(format!(
            "matrix rank {} below {} at working precision",
            pivots.len(),
            cols
        )));
    }
    for row in bb.iter().skip(cols) {
        if !row[0].is_zero() {
            return Err(LtError::RouteMismatch("inconsistent linear system".into()));
        }
    }
    let mut x: Vec<Option<Elem>> = vec![None; cols];
    for r in (0..cols).rev() {
        let c = pivots[r];
        let mut acc = bb[r][0].clone();
        for j in c + 1..cols {
            if let Some(xj) = &x[j] {
                acc = acc.sub_ref(&a[r][j].mul_ref(xj));
            }
        }
        x[c] = Some(acc.div_ref(&a[r][c])?);
    }
    Ok(x.into_iter().map(|v| v.expect("pivot per column")).collect())
}

/// Determinant of a square matrix.
pub fn det(mut a: Vec<Vec<Elem>>) -> Result<Elem> {
    let n = a.len();
    assert!(n > 0 && a.iter().all(|r| r.len() == n));
    let ring = a[0][0].ring().clone();
    let mut none: Vec<Vec<Elem>> = vec![Vec::new(); n];
    let mut sign = false;
    let pivots = eliminate(&mut a, &mut none, &mut sign)?;
    if pivots.len() < n {
        // singular at working precision: bound by the leftover minor
        let abs = a.iter().flatten().map(|x| x.abs_prec()).min().unwrap_or(0);
        let lead: i64 = pivots.iter().enumerate().map(|(r, &c)| a[r][c].exponent()).sum();
        return Ok(Elem::zero_prec(&ring, lead + abs.max(0)));
    }
    let mut d = Elem::one(&ring);
    for (r, c) in pivots.into_iter().enumerate() {
        d = d.mul_ref(&a[r][c]);
    }
    Ok(if sign { d.neg_ref() } else { d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ring::Ring;

    #[test]
    fn solves_small_system() {
        let r = Ring::qp(5, 20);
        let e = |x: i64| Elem::from_i64(&r, x);
        // [[5, 1], [1, 2]] x = [7, 4]  ->  x = (10/9, 13/9)
        let a = vec![vec![e(5), e(1)], vec![e(1), e(2)]];
        let x = solve(a, vec![e(7), e(4)]).unwrap();
        assert!(x[0].mul_int(9).agrees_with(&e(10)));
        assert!(x[1].mul_int(9).agrees_with(&e(13)));
    }

    #[test]
    fn determinant_sign_and_value() {
        let r = Ring::qp(3, 20);
        let e = |x: i64| Elem::from_i64(&r, x);
        let a = vec![vec![e(0), e(2)], vec![e(3), e(1)]];
        assert!(det(a).unwrap().agrees_with(&e(-6)));
    }
}
