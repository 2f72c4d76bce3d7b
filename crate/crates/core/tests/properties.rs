use num_bigint::BigInt;
use proptest::prelude::*;
use qweyl_core::completion::{sigma_series, Branch};
use qweyl_core::monomials::a_mono;
use qweyl_core::weylops::{chari_mono, tprime_inv_step, tprime_step};
use qweyl_core::{CartanData, Component, Monomial, Poly, ThetaCtx, TruncSeries};

const ORDER: usize = 5;

fn b2() -> CartanData {
    CartanData::from_label("B2").unwrap()
}

/// `(node, spectral, exponent)` triples for a Y-monomial.
fn y_factors() -> impl Strategy<Value = Vec<(usize, i32, i32)>> {
    prop::collection::vec((1usize..=2, -6i32..=6, prop_oneof![Just(-1), Just(1), Just(2)]), 0..4)
}

/// Lists of `(coefficient, [(node, spectral)])` describing `sum c * prod A^{-1}`.
fn a_terms() -> impl Strategy<Value = Vec<(i64, Vec<(usize, i32)>)>> {
    prop::collection::vec((-3i64..=3, prop::collection::vec((1usize..=2, -4i32..=4), 1..3)), 0..5)
}

fn y_mono(cd: &CartanData, f: &[(usize, i32, i32)]) -> Monomial {
    f.iter().fold(Monomial::one(cd.rank()), |m, &(i, s, e)| m.mul(&Monomial::y(cd.rank(), i, s, e)))
}

/// `m (1 + sum c prod A^{-1})`, which has `m` as its unique leading term in component `e`.
fn unit_poly(cd: &CartanData, m: &Monomial, terms: &[(i64, Vec<(usize, i32)>)]) -> Poly {
    let mut p = Poly::from_mono(m.clone());
    for (c, fs) in terms {
        let mono = fs.iter().fold(m.clone(), |acc, &(i, s)| acc.mul(&a_mono(cd, i, s).inv()));
        p.add_term(mono, BigInt::from(*c));
    }
    p
}

fn series(cd: &CartanData, m: &Monomial, p: &Poly) -> TruncSeries {
    TruncSeries::from_poly_anchored(Component::identity(cd), p, m.varpi(), ORDER).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn ring_laws(x in a_terms(), y in a_terms(), z in a_terms()) {
        let cd = b2();
        let one = Monomial::one(2);
        let (x, y, z) = (unit_poly(&cd, &one, &x), unit_poly(&cd, &one, &y), unit_poly(&cd, &one, &z));
        let e = Component::identity(&cd);
        let s = |p: &Poly| TruncSeries::from_poly_anchored(e.clone(), p, cd.zero_weight(), ORDER).unwrap();
        let (a, b, c) = (s(&x), s(&y), s(&z));
        prop_assert!(a.mul(&b).unwrap().first_difference(&b.mul(&a).unwrap()).unwrap().is_none());
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(l.first_difference(&r).unwrap().is_none());
        let dist = a.mul(&b.add(&c).unwrap()).unwrap();
        prop_assert!(dist.first_difference(&a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()).unwrap().is_none());
        let unit = a.mul(&a.inverse().unwrap()).unwrap();
        prop_assert!(unit.first_difference(&TruncSeries::one(e.clone(), 2, ORDER)).unwrap().is_none());
        // truncated arithmetic agrees with exact polynomial arithmetic
        prop_assert!(a.mul(&b).unwrap().first_difference(&s(&x.mul(&y))).unwrap().is_none());
    }

    #[test]
    fn theta_is_an_involution(m in y_factors(), t in a_terms(), i in 1usize..=2, shift in -4i32..=4) {
        let cd = b2();
        let ctx = ThetaCtx::new(&cd);
        let m = y_mono(&cd, &m);
        let x = series(&cd, &m, &unit_poly(&cd, &m, &t));
        let once = ctx.theta_step(&x, i).unwrap();
        let twice = ctx.theta_step(&once, i).unwrap();
        prop_assert!(twice.comp.is_identity());
        prop_assert!(twice.first_difference(&x).unwrap().is_none());
        // varpi intertwines Theta_i with s_i
        let img = once.varpi().body();
        let want: Poly = Poly::from_terms(2, x.varpi().body().sorted().into_iter().map(|(m, c)| (Monomial::weight(cd.reflect(i, &m.wt)), c.clone())));
        prop_assert_eq!(img, want);
        // and commutes with spectral shifts
        let shifted = ctx.theta_step(&x.shift(&cd, 2 * shift), i).unwrap();
        prop_assert!(shifted.first_difference(&once.shift(&cd, 2 * shift)).unwrap().is_none());
    }

    #[test]
    fn braid_operators_on_monomials(m in y_factors(), i in 1usize..=2) {
        let cd = b2();
        let y = y_mono(&cd, &m);
        prop_assert_eq!(tprime_inv_step(&cd, i, &tprime_step(&cd, i, &y)), y.clone());
        prop_assert_eq!(chari_mono(&cd, &[1, 2, 1, 2], &y), chari_mono(&cd, &[2, 1, 2, 1], &y));
        // T_i moves the weight by s_i
        prop_assert_eq!(chari_mono(&cd, &[i], &y).varpi(), cd.reflect(i, &y.varpi()));
    }

    #[test]
    fn sigma_shift_equivariance(i in 1usize..=2, r in -6i32..=6) {
        let cd = b2();
        let a = sigma_series(&cd, i, r, Branch::E, ORDER).unwrap();
        let b = sigma_series(&cd, i, 0, Branch::E, ORDER).unwrap().shift(&cd, r);
        prop_assert!(a.first_difference(&b).unwrap().is_none());
    }
}
