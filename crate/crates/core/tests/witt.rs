use std::collections::BTreeMap;

use ltlab::padic::{make_context, Context, Elem};
use ltlab::series::PowerSeries;
use ltlab::witt::{classical_oracle, key_valuation_criterion, s_p, s_pa, structural_polys, MultiPoly, WittCoeff, WittVector};
use num_bigint::BigInt;
use num_rational::Ratio;
use proptest::prelude::*;

fn elem(ctx: &Context, coords: &[i64]) -> Elem {
    let d = ctx.ring().dim();
    let c = (0..d).map(|i| BigInt::from(*coords.get(i).unwrap_or(&0))).collect();
    Elem::from_coords(ctx.ring(), c)
}

fn vector(ctx: &Context, raw: &[Vec<i64>]) -> WittVector<Elem> {
    WittVector::new(raw.iter().map(|c| elem(ctx, c)).collect(), ctx.pi(), ctx.q())
}

fn comps() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-500i64..500, 2), 3)
}

/// Unramified quadratic over Q_3 and a ramified quadratic over Q_2.
fn contexts() -> Vec<Context> {
    vec![
        make_context(3, 2, None, 30).unwrap(),
        make_context(2, 1, Some(vec![vec![2], vec![2], vec![1]]), 40).unwrap(),
    ]
}

#[test]
fn ghost_examples() {
    let k = make_context(5, 1, None, 20).unwrap();
    let a = k.elem(7);
    let t = WittVector::teichmuller(&a, 3, k.pi(), 5);
    assert!(t.ghost()[1].agrees_with(&a.pow(5)));
    assert!(t.ghost()[2].agrees_with(&a.pow(25)));
    let zero = WittVector::zero(&a, 3, k.pi(), 5);
    assert!(zero.ghost().iter().all(|g| g.is_zero()));
    let w = WittVector::from_ghost(vec![a.clone(), a.pow(5), a.pow(25)], k.pi(), 5).unwrap();
    assert!(w.agrees_with(&t));
}

#[test]
fn verschiebung_ghost_and_fv() {
    for k in contexts() {
        let w = vector(&k, &[vec![3, 1], vec![-2, 5], vec![7, 0]]);
        let v = w.verschiebung();
        assert!(v.ghost()[0].is_zero());
        for n in 0..3 {
            assert!(v.ghost()[n + 1].agrees_with(&w.ghost()[n].mul_ref(k.pi())));
        }
        let fv = v.frobenius().unwrap();
        assert!(fv.agrees_with(&w.scalar(k.pi()).unwrap()));
    }
}

#[test]
fn structural_sum_is_classical_witt_addition() {
    for p in [2u64, 3, 5] {
        let k = make_context(p, 1, None, 20).unwrap();
        let st = structural_polys(&k, k.pi(), 1, None).unwrap();
        // (X0^p + Y0^p - (X0 + Y0)^p) / p by binomial coefficients
        let mut want: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
        let nv = st.nvars();
        let mut binom = 1i64;
        for j in 1..p as i64 {
            binom = binom * (p as i64 - j + 1) / j;
            let mut e = vec![0u32; nv];
            e[st.x_index(0)] = (p as i64 - j) as u32;
            e[st.y_index(0)] = j as u32;
            want.insert(e, -binom / p as i64);
        }
        for idx in [st.x_index(1), st.y_index(1)] {
            let mut e = vec![0u32; nv];
            e[idx] = 1;
            want.insert(e, 1);
        }
        let got = st.sum[1].integer_coeffs().unwrap();
        let got: BTreeMap<Vec<u32>, i64> = got.into_iter().map(|(e, c)| (e, i64::try_from(c).unwrap())).collect();
        assert_eq!(got, want, "p = {p}");
    }
}

#[test]
fn frobenius_polynomial_level_zero() {
    let k = make_context(2, 2, None, 20).unwrap();
    let st = structural_polys(&k, k.pi(), 0, None).unwrap();
    assert_eq!(st.display(&st.frobenius[0]), "X0^4 + 2*X1");
    assert_eq!(st.display(&st.inverse[0]), "-X0");
}

#[test]
fn structural_polys_agree_with_ghost_arithmetic() {
    let k = make_context(3, 1, None, 30).unwrap();
    let x = k.elem(5);
    let st = structural_polys(&k, k.pi(), 2, Some(&x)).unwrap();
    let a = vector(&k, &[vec![4], vec![-7], vec![11]]);
    let b = vector(&k, &[vec![2], vec![9], vec![-1]]);
    let long = vector(&k, &[vec![4], vec![-7], vec![11], vec![6]]);
    let mut vals = vec![k.zero(); st.nvars()];
    for i in 0..3 {
        vals[st.x_index(i)] = a.components()[i].clone();
        vals[st.y_index(i)] = b.components()[i].clone();
    }
    let sum = a.add(&b).unwrap();
    let prod = a.mul(&b).unwrap();
    let neg = a.neg().unwrap();
    let sc = a.scalar(&x).unwrap();
    for i in 0..3 {
        assert!(st.sum[i].eval(&vals).agrees_with(&sum.components()[i]), "S_{i}");
        assert!(st.product[i].eval(&vals).agrees_with(&prod.components()[i]), "P_{i}");
        assert!(st.inverse[i].eval(&vals).agrees_with(&neg.components()[i]), "I_{i}");
        assert!(st.scalar.as_ref().unwrap()[i].eval(&vals).agrees_with(&sc.components()[i]), "C_{i}");
    }
    let mut lv = vals.clone();
    lv[st.x_index(3)] = long.components()[3].clone();
    let fr = long.frobenius().unwrap();
    for i in 0..3 {
        assert!(st.frobenius[i].eval(&lv).agrees_with(&fr.components()[i]), "F_{i}");
    }
}

#[test]
fn classical_witt_vectors_of_f_p() {
    for p in [2u64, 3] {
        for m in 1..=3 {
            assert!(classical_oracle(p, m).unwrap(), "p = {p}, m = {m}");
        }
    }
}

#[test]
fn sp_frobenius_shift() {
    let k = make_context(3, 1, None, 40).unwrap();
    let r = k.ring();
    let d = 60;
    let h = PowerSeries::x(r, d);
    let p = PowerSeries::from_ints(r, &[0, 3, 0, 1], d);
    let w = s_p(&k, k.pi(), &h, &p, 2).unwrap();
    let hp = h.compose(&p).unwrap();
    let shifted = s_p(&k, k.pi(), &hp, &p, 1).unwrap();
    assert!(w.frobenius().unwrap().agrees_with(&shifted));
    assert!(w.components()[0].agrees_with(&h));
    // constant h: ghost is constant, components (c, (c - c^3)/3, ...)
    let c = PowerSeries::from_ints(r, &[2], d);
    let wc = s_p(&k, k.pi(), &c, &p, 2).unwrap();
    let direct = WittVector::from_ghost(vec![k.elem(2); 3], k.pi(), 3).unwrap();
    for i in 0..3 {
        assert!(wc.components()[i].coeff(0).agrees_with(&direct.components()[i]));
    }
}

#[test]
fn spa_is_specialisation_of_sp() {
    // L = Q_3(sqrt(-3)), a = sqrt(-3) is a root of X^3 + 3X
    let l = make_context(3, 1, Some(vec![vec![3], vec![0], vec![1]]), 40).unwrap();
    let k = make_context(3, 1, None, 40).unwrap();
    let p = PowerSeries::from_ints(k.ring(), &[0, 3, 0, 1], 40);
    let x = PowerSeries::x(k.ring(), 40);
    let a = l.pi().clone();
    let w = s_pa(&k, k.pi(), &x, &p, &a, 2).unwrap();
    assert!(w.ghost()[0].agrees_with(&a));
    assert!(w.ghost()[1].is_zero() && w.ghost()[2].is_zero());

    let b = a.mul_ref(&l.elem(1 + 3));
    let h = PowerSeries::from_ints(k.ring(), &[1, 2, 0, 5], 40);
    let direct = s_pa(&k, k.pi(), &h, &p, &b, 2).unwrap();
    let series = s_p(&k, k.pi(), &h, &p, 2).unwrap();
    for i in 0..3 {
        let v = series.components()[i].eval_interior(&b).unwrap().value;
        assert!(v.agrees_with(&direct.components()[i]), "component {i}");
        assert!(v.abs_prec() >= 10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unghost_inverts_ghost(raw in comps()) {
        for k in contexts() {
            let w = vector(&k, &raw);
            let back = WittVector::from_ghost(w.ghost().to_vec(), k.pi(), k.q()).unwrap();
            prop_assert!(back.agrees_with(&w));
        }
    }

    #[test]
    fn ring_axioms(a in comps(), b in comps(), c in comps()) {
        for k in contexts() {
            let (a, b, c) = (vector(&k, &a), vector(&k, &b), vector(&k, &c));
            let ab = a.add(&b).unwrap();
            prop_assert!(ab.add(&c).unwrap().agrees_with(&a.add(&b.add(&c).unwrap()).unwrap()));
            prop_assert!(ab.agrees_with(&b.add(&a).unwrap()));
            let m = a.mul(&b).unwrap();
            prop_assert!(m.mul(&c).unwrap().agrees_with(&a.mul(&b.mul(&c).unwrap()).unwrap()));
            let lhs = ab.mul(&c).unwrap();
            let rhs = a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap();
            prop_assert!(lhs.agrees_with(&rhs));
            let one = WittVector::one(&k.one(), 3, k.pi(), k.q());
            prop_assert!(a.mul(&one).unwrap().agrees_with(&a));
            let z = a.add(&a.neg().unwrap()).unwrap();
            prop_assert!(z.components().iter().all(|x| x.is_zero()));
            // V is additive
            prop_assert!(ab.verschiebung().agrees_with(&a.verschiebung().add(&b.verschiebung()).unwrap()));
        }
    }

    #[test]
    fn frobenius_is_qth_power_mod_pi(raw in comps()) {
        for k in contexts() {
            let w = vector(&k, &raw);
            let f = w.frobenius().unwrap();
            let vpi = k.pi().valuation().lower();
            for (i, c) in f.components().iter().enumerate() {
                let d = c.sub_ref(&w.components()[i].pow(k.q()));
                prop_assert!(d.valuation().certainly_at_least(vpi));
            }
        }
    }

    #[test]
    fn teichmuller_is_multiplicative(x in prop::collection::vec(-99i64..99, 2), y in prop::collection::vec(-99i64..99, 2)) {
        for k in contexts() {
            let (a, b) = (elem(&k, &x), elem(&k, &y));
            let ta = WittVector::teichmuller(&a, 3, k.pi(), k.q());
            let tb = WittVector::teichmuller(&b, 3, k.pi(), k.q());
            let tab = WittVector::teichmuller(&a.mul_ref(&b), 3, k.pi(), k.q());
            prop_assert!(ta.mul(&tb).unwrap().agrees_with(&tab));
            let fa = ta.frobenius().unwrap();
            prop_assert!(fa.agrees_with(&WittVector::teichmuller(&a.pow(k.q()), 2, k.pi(), k.q())));
        }
    }

    #[test]
    fn valuation_criterion(c in prop::collection::vec(-40i64..40, 4), r in 0u32..5, unit in 1i64..8, au in 1i64..30) {
        let k = make_context(3, 1, None, 40).unwrap();
        let l = make_context(3, 1, Some(vec![vec![3], vec![3], vec![1]]), 40).unwrap();
        let unit = if unit % 3 == 0 { unit + 1 } else { unit };
        let c0 = if r == 4 { 0 } else { 3i64.pow(r) * unit };
        let mut coeffs = vec![c0];
        coeffs.extend_from_slice(&c);
        let h = PowerSeries::from_ints(k.ring(), &coeffs, 4);
        let p = PowerSeries::from_ints(k.ring(), &[0, 3, 0, 1], 3);
        let a = l.pi().mul_ref(&l.elem(au));
        let kc = key_valuation_criterion(&k, k.pi(), &h, &p, &a, 3).unwrap();
        prop_assert!(kc.consistent, "{:?}", kc);
        let want = if r == 4 { None } else { Some(r as usize) };
        prop_assert_eq!(kc.r, want);
    }
}

#[test]
fn multipoly_coefficients_in_ramified_base() {
    // structural polynomials over Z_2[sqrt(2)]-style base with pi of valuation 1/2
    let k = make_context(2, 1, Some(vec![vec![2], vec![0], vec![1]]), 30).unwrap();
    let st = structural_polys(&k, k.pi(), 1, None).unwrap();
    let one = Ratio::from_integer(0);
    for poly in st.sum.iter().chain(&st.product) {
        assert!(poly.valuation_at_least(one));
    }
    let x = MultiPoly::var(k.ring(), 2, 0);
    assert_eq!(x.total_degree(), 1);
}
