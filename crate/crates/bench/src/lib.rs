//! Fixed workloads shared by the benchmarks.

use qweyl_core::monomials::a_mono;
use qweyl_core::{CartanData, Component, Monomial, Poly, TruncSeries};

pub fn cartan(label: &str) -> CartanData {
    CartanData::from_label(label).expect("built-in type")
}

/// `prod_k (1 - A_{i_k, s_k}^{-1})^{-1}` style unit in component `e`, dense up to `order`.
pub fn dense_unit(cd: &CartanData, order: usize) -> TruncSeries {
    let e = Component::identity(cd);
    let mut acc = TruncSeries::one(e.clone(), cd.rank(), order);
    for i in cd.nodes() {
        for s in [0, 3] {
            let mut p = Poly::one(cd.rank());
            p.add_term(a_mono(cd, i, s).inv(), (-1).into());
            let f = TruncSeries::from_poly_anchored(e.clone(), &p, cd.zero_weight(), order).expect("unit");
            acc = acc.mul(&f.inverse().expect("invertible")).expect("same component");
        }
    }
    acc
}

pub fn y(cd: &CartanData, i: usize, r: i32) -> Poly {
    Poly::from_mono(Monomial::y(cd.rank(), i, r, 1))
}
