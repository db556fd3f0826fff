//! Ramified Witt vector identities, checked exactly at tracked precision on
//! seeded random inputs.

use ltlab::padic::{make_context, Context, Elem};
use ltlab::series::PowerSeries;
use ltlab::witt::{classical_oracle, key_valuation_criterion, s_p, structural_polys, WittVector};
use ltlab::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::run_case;
use crate::config::RunConfig;
use crate::report::{Case, Claim, Report};

pub const RING_TRIPLES: usize = 200;
pub const KEY_PAIRS: usize = 50;
const LEN: usize = 3;

/// Unramified quadratic over Q_3 and a ramified quadratic over Q_2.
fn contexts() -> Result<Vec<Context>> {
    Ok(vec![make_context(3, 2, None, 30)?, make_context(2, 1, Some(vec![vec![2], vec![2], vec![1]]), 40)?])
}

/// `sum_j u_j pi^j` with `u_j` unramified, from `f e` integer digits.
fn from_digits(k: &Context, d: &[i64]) -> Elem {
    let f = k.f() as usize;
    let mut acc = k.zero();
    let mut pj = k.one();
    for chunk in d.chunks(f) {
        acc = acc.add_ref(&k.unram_elem(chunk).mul_ref(&pj));
        pj = pj.mul_ref(k.pi());
    }
    acc
}

fn random_elem(k: &Context, rng: &mut ChaCha8Rng, bound: i64) -> Elem {
    let dim = (k.f() * k.e()) as usize;
    let d: Vec<i64> = (0..dim).map(|_| rng.gen_range(-bound..bound)).collect();
    from_digits(k, &d)
}

fn random_vector(k: &Context, rng: &mut ChaCha8Rng) -> WittVector<Elem> {
    WittVector::new((0..LEN).map(|_| random_elem(k, rng, 500)).collect(), k.pi(), k.q())
}

fn tally(case: &mut Case, id: &str, checked: usize, failures: Vec<String>) {
    let pass = failures.is_empty();
    let first: Vec<String> = failures.into_iter().take(5).collect();
    case.claim(id, Claim::new(pass).detail(json!({ "checked": checked, "failures": first })));
}

pub fn witt_axioms(cfg: &RunConfig) -> Report {
    let mut report = Report::default();
    let seed = cfg.seed;
    let mut add = |name: &str, body: &dyn Fn(&mut Case) -> Result<()>| {
        let case = run_case(|c| c.param("seed", seed), body);
        report.cases.insert(name.to_string(), case);
    };
    add("ghost", &|case| ghost_checks(seed, case));
    add("ring", &|case| ring_checks(seed, case));
    add("operators", &|case| operator_checks(seed, case));
    add("s_p", &sp_checks);
    add("key_criterion", &|case| key_checks(seed, case));
    add("structural", &|case| structural_checks(seed, case));
    add("classical_oracle", &classical_checks);
    report
}

fn ghost_checks(seed: u64, case: &mut Case) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    let mut n = 0;
    for k in contexts()? {
        for i in 0..50 {
            let w = random_vector(&k, &mut rng);
            let back = WittVector::from_ghost(w.ghost().to_vec(), k.pi(), k.q())?;
            n += 1;
            if !back.agrees_with(&w) {
                bad.push(format!("q={} #{i}", k.q()));
            }
        }
    }
    tally(case, "witt.ghost_roundtrip", n, bad);
    Ok(())
}

fn ring_checks(seed: u64, case: &mut Case) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let ks = contexts()?;
    let mut bad = Vec::new();
    for i in 0..RING_TRIPLES {
        let k = &ks[i % ks.len()];
        let (a, b, c) = (random_vector(k, &mut rng), random_vector(k, &mut rng), random_vector(k, &mut rng));
        let sum = a.add(&b)?;
        let prod = a.mul(&b)?;
        let mut ok = true;
        // ghost oracle: componentwise arithmetic on ghost vectors
        for j in 0..LEN {
            ok &= sum.ghost()[j].agrees_with(&a.ghost()[j].add_ref(&b.ghost()[j]));
            ok &= prod.ghost()[j].agrees_with(&a.ghost()[j].mul_ref(&b.ghost()[j]));
        }
        ok &= sum.add(&c)?.agrees_with(&a.add(&b.add(&c)?)?);
        ok &= sum.agrees_with(&b.add(&a)?);
        ok &= prod.mul(&c)?.agrees_with(&a.mul(&b.mul(&c)?)?);
        ok &= prod.agrees_with(&b.mul(&a)?);
        ok &= sum.mul(&c)?.agrees_with(&a.mul(&c)?.add(&b.mul(&c)?)?);
        ok &= a.mul(&WittVector::one(&k.one(), LEN, k.pi(), k.q()))?.agrees_with(&a);
        ok &= a.add(&a.neg()?)?.components().iter().all(|x| x.is_zero());
        if !ok {
            bad.push(format!("q={} triple {i}", k.q()));
        }
    }
    tally(case, "witt.ring_axioms", RING_TRIPLES, bad);
    Ok(())
}

fn operator_checks(seed: u64, case: &mut Case) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let (mut fv, mut fq, mut teich) = (Vec::new(), Vec::new(), Vec::new());
    let mut n = 0;
    for k in contexts()? {
        let vpi = k.pi().valuation().lower();
        for i in 0..25 {
            n += 1;
            let w = random_vector(&k, &mut rng);
            if !w.verschiebung().frobenius()?.agrees_with(&w.scalar(k.pi())?) {
                fv.push(format!("q={} #{i}", k.q()));
            }
            let f = w.frobenius()?;
            let close = f
                .components()
                .iter()
                .zip(w.components())
                .all(|(c, x)| c.sub_ref(&x.pow(k.q())).valuation().certainly_at_least(vpi));
            if !close {
                fq.push(format!("q={} #{i}", k.q()));
            }
            let (a, b) = (random_elem(&k, &mut rng, 99), random_elem(&k, &mut rng, 99));
            let ta = WittVector::teichmuller(&a, LEN, k.pi(), k.q());
            let tb = WittVector::teichmuller(&b, LEN, k.pi(), k.q());
            let tab = WittVector::teichmuller(&a.mul_ref(&b), LEN, k.pi(), k.q());
            let fa = WittVector::teichmuller(&a.pow(k.q()), LEN - 1, k.pi(), k.q());
            if !ta.mul(&tb)?.agrees_with(&tab) || !ta.frobenius()?.agrees_with(&fa) {
                teich.push(format!("q={} #{i}", k.q()));
            }
        }
    }
    tally(case, "witt.fv_is_pi", n, fv);
    tally(case, "witt.frobenius_mod_pi", n, fq);
    tally(case, "witt.teichmuller", n, teich);
    Ok(())
}

/// `F(S_P(h)) = S_P(h o P)` for a few `h`, over `Q_3` and `Q_9`.
fn sp_checks(case: &mut Case) -> Result<()> {
    let d = 60;
    let mut bad = Vec::new();
    let mut n = 0;
    for f in [1u32, 2] {
        let k = make_context(3, f, None, 40)?;
        let r = k.ring();
        let q = k.q() as usize;
        let mut pc = vec![0i64; q + 1];
        pc[1] = 3;
        pc[q] = 1;
        let p = PowerSeries::from_ints(r, &pc, d);
        for h in [vec![0, 1], vec![1, 2, 0, 5], vec![0, 0, 3, -1, 7]] {
            n += 1;
            let hs = PowerSeries::from_ints(r, &h, d);
            let w = s_p(&k, k.pi(), &hs, &p, 2)?;
            let shifted = s_p(&k, k.pi(), &hs.compose(&p)?, &p, 1)?;
            if !w.frobenius()?.agrees_with(&shifted) || !w.components()[0].agrees_with(&hs) {
                bad.push(format!("q={q} h={h:?}"));
            }
        }
    }
    tally(case, "witt.sp_frobenius_shift", n, bad);
    Ok(())
}

/// The valuation criterion against the known `v_p(h(0))` of random `h`,
/// evaluated at points of a ramified extension.
fn key_checks(seed: u64, case: &mut Case) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    let k = make_context(3, 1, None, 40)?;
    let l = make_context(3, 1, Some(vec![vec![3], vec![3], vec![1]]), 40)?;
    let p = PowerSeries::from_ints(k.ring(), &[0, 3, 0, 1], 3);
    let mut bad = Vec::new();
    for i in 0..KEY_PAIRS {
        let r: u32 = rng.gen_range(0..5);
        let unit = [1i64, 2, 4, 5, 7][rng.gen_range(0..5)];
        let c0 = if r == 4 { 0 } else { 3i64.pow(r) * unit };
        let mut coeffs = vec![c0];
        coeffs.extend((0..4).map(|_| rng.gen_range(-40i64..40)));
        let h = PowerSeries::from_ints(k.ring(), &coeffs, 4);
        let a = l.pi().mul_ref(&l.elem(rng.gen_range(1..30)));
        let kc = key_valuation_criterion(&k, k.pi(), &h, &p, &a, 3)?;
        let want = if r == 4 { None } else { Some(r as usize) };
        if !kc.consistent || kc.r != want {
            bad.push(format!("#{i}: h={coeffs:?} got {:?}", kc.r));
        }
    }
    tally(case, "witt.key_criterion", KEY_PAIRS, bad);
    Ok(())
}

/// Classical Witt sum and product of integer vectors through the integer
/// ghost recursion `w_n = sum_i p^i x_i^(p^(n-i))`.
fn classical_arith(p: i128, x: &[i128], y: &[i128], product: bool) -> Vec<i128> {
    let w = |v: &[i128], n: usize| -> i128 { (0..=n).map(|i| p.pow(i as u32) * v[i].pow(p.pow((n - i) as u32) as u32)).sum() };
    let mut out: Vec<i128> = Vec::new();
    for n in 0..x.len() {
        let target = if product { w(x, n) * w(y, n) } else { w(x, n) + w(y, n) };
        let lower: i128 = (0..n).map(|i| p.pow(i as u32) * out[i].pow(p.pow((n - i) as u32) as u32)).sum();
        let pn = p.pow(n as u32);
        assert_eq!((target - lower) % pn, 0, "classical Witt recursion is integral");
        out.push((target - lower) / pn);
    }
    out
}

fn structural_checks(seed: u64, case: &mut Case) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4));
    let mut bad = Vec::new();
    let mut n = 0;
    for p in [2u64, 3] {
        let k = make_context(p, 1, None, 40)?;
        let st = structural_polys(&k, k.pi(), 2, None)?;
        for _ in 0..10 {
            n += 1;
            let x: Vec<i128> = (0..3).map(|_| rng.gen_range(0..4)).collect();
            let y: Vec<i128> = (0..3).map(|_| rng.gen_range(0..4)).collect();
            let mut vals = vec![k.zero(); st.nvars()];
            for i in 0..3 {
                vals[st.x_index(i)] = k.elem(x[i] as i64);
                vals[st.y_index(i)] = k.elem(y[i] as i64);
            }
            let s = classical_arith(p as i128, &x, &y, false);
            let m = classical_arith(p as i128, &x, &y, true);
            for i in 0..3 {
                let want_s = k.elem(i64::try_from(s[i]).expect("small inputs"));
                let want_m = k.elem(i64::try_from(m[i]).expect("small inputs"));
                if !st.sum[i].eval(&vals).agrees_with(&want_s) || !st.product[i].eval(&vals).agrees_with(&want_m) {
                    bad.push(format!("p={p} x={x:?} y={y:?} index {i}"));
                }
            }
        }
    }
    tally(case, "witt.structural_classical", n, bad);
    Ok(())
}

fn classical_checks(case: &mut Case) -> Result<()> {
    let mut bad = Vec::new();
    for p in [2u64, 3] {
        for m in 1..=3 {
            if !classical_oracle(p, m)? {
                bad.push(format!("p={p} m={m}"));
            }
        }
    }
    tally(case, "witt.classical_oracle", 6, bad);
    Ok(())
}
