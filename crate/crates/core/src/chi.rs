//! Rational weight characters `chi_{w(omega_i)}` in `Z[(1 - [-alpha])^{-1}]`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::cartan::{CartanData, Node, Weight, WeylWord};
use crate::completion::{Comp, TruncSeries};
use crate::error::{Error, Result};
use crate::monomials::{Monomial, Poly};

/// `sign * [weight] * prod_beta (1 - [-beta])^{-mult}` over positive roots `beta`
/// (simple-root coordinates). Every element of the ring has exactly one such form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalChar {
    pub sign: i8,
    pub weight: Weight,
    #[serde(serialize_with = "factor_list")]
    pub factors: BTreeMap<Vec<i64>, i32>,
}

fn factor_list<S: serde::Serializer>(f: &BTreeMap<Vec<i64>, i32>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(f.iter())
}

impl RationalChar {
    pub fn one(n: usize) -> Self {
        RationalChar { sign: 1, weight: Weight::zero(n), factors: BTreeMap::new() }
    }

    /// `(1 - [-alpha])^{-mult}` for any root `alpha`.
    pub fn factor(cd: &CartanData, root: &[i64], mult: i32) -> Result<Self> {
        let mut out = Self::one(cd.rank());
        out.mul_factor(cd, root, mult)?;
        Ok(out)
    }

    /// `(1 - [-alpha])^{-1}`.
    pub fn geometric(cd: &CartanData, alpha: &Weight) -> Result<Self> {
        let x = cd.root_coords(alpha).ok_or_else(|| Error::Contract(format!("{alpha} is not a root")))?;
        Self::factor(cd, &x, 1)
    }

    fn mul_factor(&mut self, cd: &CartanData, root: &[i64], mult: i32) -> Result<()> {
        let w = cd.weight_of_root_coords(root);
        match cd.root_sign(&w) {
            Some(true) => {
                *self.factors.entry(root.to_vec()).or_insert(0) += mult;
            }
            Some(false) => {
                // (1 - [beta])^{-m} = (-1)^m [-m beta] (1 - [-beta])^{-m}
                let beta: Vec<i64> = root.iter().map(|v| -v).collect();
                if mult % 2 != 0 {
                    self.sign = -self.sign;
                }
                self.weight.add_scaled(&w, mult);
                *self.factors.entry(beta).or_insert(0) += mult;
            }
            None => return Err(Error::Contract(format!("{w} is not a root"))),
        }
        self.factors.retain(|_, m| *m != 0);
        Ok(())
    }

    pub fn mul(&self, o: &RationalChar) -> Self {
        let mut out = self.clone();
        out.sign *= o.sign;
        out.weight += &o.weight;
        for (b, m) in &o.factors {
            *out.factors.entry(b.clone()).or_insert(0) += m;
        }
        out.factors.retain(|_, m| *m != 0);
        out
    }

    pub fn inv(&self) -> Self {
        RationalChar { sign: self.sign, weight: -&self.weight, factors: self.factors.iter().map(|(b, m)| (b.clone(), -m)).collect() }
    }

    pub fn div(&self, o: &RationalChar) -> Self {
        self.mul(&o.inv())
    }

    pub fn pow(&self, k: i32) -> Self {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut out = Self::one(self.weight.rank());
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn mul_weight(&self, w: &Weight) -> Self {
        let mut out = self.clone();
        out.weight += w;
        out
    }

    /// `e_v(self)` to relative height `order`: each `(1 - [-beta])^{-1}` is expanded
    /// in powers of `[-beta]` when `v(beta) > 0` and of `[beta]` otherwise.
    pub fn expand(&self, cd: &CartanData, comp: &Comp, order: usize) -> Result<TruncSeries> {
        let n = cd.rank();
        let mut s = TruncSeries::monomial(comp.clone(), Monomial::weight(self.weight.clone()), BigInt::from(self.sign), order);
        for (b, &m) in &self.factors {
            let beta = cd.weight_of_root_coords(b);
            let mut p = Poly::one(n);
            p.add_term(Monomial::weight(-&beta), BigInt::from(-1));
            let f = TruncSeries::from_poly(comp.clone(), &p, order)?;
            let f = if m > 0 { f.inverse()? } else { f };
            for _ in 0..m.unsigned_abs() {
                s = s.mul(&f)?;
            }
        }
        Ok(s)
    }

    pub fn fmt_with(&self, cd: &CartanData) -> String {
        let _ = cd;
        let mut num = String::new();
        if self.sign < 0 {
            num.push('-');
        }
        if self.weight.is_zero() {
            num.push('1');
        } else {
            num.push_str(&format!("w{}", self.weight));
        }
        let mut den = Vec::new();
        let mut top = Vec::new();
        for (b, &m) in &self.factors {
            let a: Vec<String> = b.iter().enumerate().filter(|(_, &v)| v != 0).map(|(j, &v)| if v == 1 { format!("a{}^-1", j + 1) } else { format!("a{}^-{}", j + 1, v) }).collect();
            let base = format!("(1 - {})", a.join(" "));
            let e = m.abs();
            let f = if e == 1 { base } else { format!("{base}^{e}") };
            if m > 0 {
                den.push(f);
            } else {
                top.push(f);
            }
        }
        let mut s = num;
        for t in top {
            s.push_str(" * ");
            s.push_str(&t);
        }
        if !den.is_empty() {
            s.push_str(" / (");
            s.push_str(&den.join(" "));
            s.push(')');
        }
        s
    }
}

impl fmt::Display for RationalChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sign {} weight {} factors {:?}", self.sign, self.weight, self.factors)
    }
}

/// Evaluates the recursion `chi_{w s_i(omega_i)} chi_{w(omega_i)} = (1 - [-w(alpha_i)])^{-1}
/// prod_{j != i} chi_{w(omega_j)}^{-C_{i,j}}` along the given reduced word.
pub struct ChiSolver<'a> {
    cd: &'a CartanData,
    memo: FxHashMap<(Vec<Node>, Node), RationalChar>,
}

impl<'a> ChiSolver<'a> {
    pub fn new(cd: &'a CartanData) -> Self {
        ChiSolver { cd, memo: FxHashMap::default() }
    }

    pub fn chi(&mut self, w: &WeylWord, i: Node) -> Result<RationalChar> {
        self.cd.check_node(i)?;
        if !self.cd.is_reduced(&w.letters) {
            return Err(Error::NotReduced(w.to_string()));
        }
        self.eval(&w.letters, i)
    }

    fn eval(&mut self, letters: &[Node], i: Node) -> Result<RationalChar> {
        if let Some(c) = self.memo.get(&(letters.to_vec(), i)) {
            return Ok(c.clone());
        }
        let cd = self.cd;
        let out = match letters.split_last() {
            None => RationalChar::one(cd.rank()),
            Some((&last, rest)) if last != i => self.eval(rest, i)?,
            Some((_, rest)) => {
                let walpha = cd.weyl_apply(&WeylWord { letters: rest.to_vec(), reduced: true }, &cd.alpha(i));
                let mut acc = RationalChar::geometric(cd, &walpha)?;
                for j in cd.nodes() {
                    if j != i && cd.c(i, j) != 0 {
                        acc = acc.mul(&self.eval(rest, j)?.pow(-cd.c(i, j)));
                    }
                }
                acc.div(&self.eval(rest, i)?)
            }
        };
        self.memo.insert((letters.to_vec(), i), out.clone());
        Ok(out)
    }

    /// `chi_{lambda}` for `lambda` in the orbit `W omega_i`.
    pub fn chi_of_weight(&mut self, i: Node, lambda: &Weight) -> Result<RationalChar> {
        let orbit = self.cd.weyl_orbit_fundamental(i)?;
        let (w, _) = orbit.into_iter().find(|(_, l)| l == lambda).ok_or_else(|| Error::Contract(format!("{lambda} is not in the orbit of omega_{i}")))?;
        self.chi(&w, i)
    }
}

pub fn chi_extremal(cd: &CartanData, w: &WeylWord, i: Node) -> Result<RationalChar> {
    ChiSolver::new(cd).chi(w, i)
}

#[derive(Clone, Debug, Serialize)]
pub struct ChiEntry {
    pub type_label: &'static str,
    pub node: Node,
    pub weight: Vec<i32>,
    /// Denominator factors `(1 - a^{-root})^mult` as printed in the rank-2 tables.
    pub printed: Vec<(Vec<i64>, i32)>,
    /// Replacement factors where the printed entry is a misprint.
    pub corrected: Option<Vec<(Vec<i64>, i32)>>,
    pub note: &'static str,
}

macro_rules! factors {
    ($(([$($r:expr),*], $m:expr)),*) => { vec![$((vec![$($r),*], $m)),*] };
}

macro_rules! entry {
    ($t:expr, $i:expr, [$($w:expr),*], [$($f:tt),*]) => {
        ChiEntry { type_label: $t, node: $i, weight: vec![$($w),*], printed: factors!($($f),*), corrected: None, note: "" }
    };
    ($t:expr, $i:expr, [$($w:expr),*], [$($f:tt),*], fix [$($g:tt),*], $note:expr) => {
        ChiEntry { type_label: $t, node: $i, weight: vec![$($w),*], printed: factors!($($f),*), corrected: Some(factors!($($g),*)), note: $note }
    };
}

/// The closed forms for the rank-2 orbits, with roots read off the `a`-monomials
/// (`a_1^{-m} a_2^{-k}` is the root `m alpha_1 + k alpha_2`; a bare `a_2` is `-alpha_2`).
pub fn chi_catalog() -> Vec<ChiEntry> {
    vec![
        entry!("A2", 1, [1, 0], []),
        entry!("A2", 1, [-1, 1], [([1, 0], 1)]),
        entry!("A2", 1, [0, -1], [([1, 1], 1), ([0, 1], 1)]),
        entry!("B2", 1, [1, 0], []),
        entry!("B2", 1, [-1, 2], [([1, 0], 1)]),
        entry!("B2", 1, [1, -2], [([1, 2], 1), ([0, 1], 1)]),
        entry!("B2", 1, [-1, 0], [([1, 2], 1), ([1, 0], 1), ([1, 1], 1)]),
        entry!("B2", 2, [0, 1], []),
        entry!("B2", 2, [1, -1], [([0, 1], 1)]),
        entry!("B2", 2, [-1, 1], [([1, 1], 1), ([1, 0], 2)]),
        entry!("B2", 2, [0, -1], [([1, 1], 1), ([0, 1], 1), ([1, 2], 2)]),
        entry!("G2", 1, [1, 0], []),
        entry!("G2", 1, [-1, 3], [([1, 0], 1)]),
        entry!("G2", 1, [2, -3], [([1, 3], 1), ([0, 1], 1)]),
        entry!("G2", 1, [-2, 3], [([1, 3], 1), ([1, 0], 2), ([1, 1], 1)],
            fix [([2, 3], 1), ([1, 0], 2), ([1, 1], 1)], "printed a1^-1 a2^-3 where a1^-2 a2^-3 is needed"),
        entry!("G2", 1, [1, -3], [([2, 3], 1), ([1, 2], 1), ([1, 3], 2), ([0, -1], 1)],
            fix [([2, 3], 1), ([1, 2], 1), ([1, 3], 2), ([0, 1], 1)], "printed (1 - a2) for (1 - a2^-1)"),
        entry!("G2", 1, [-1, 0], [([2, 3], 2), ([1, 1], 1), ([-1, 0], 1), ([1, 2], 1), ([1, 3], 1)],
            fix [([2, 3], 2), ([1, 1], 1), ([1, 0], 1), ([1, 2], 1), ([1, 3], 1)], "printed (1 - a1) for (1 - a1^-1)"),
        entry!("G2", 2, [0, 1], []),
        entry!("G2", 2, [1, -1], [([0, 1], 1)]),
        entry!("G2", 2, [-1, 2], [([1, 1], 1), ([1, 0], 3)]),
        entry!("G2", 2, [1, -2], [([1, 1], 1), ([0, 1], 2), ([1, 2], 1)],
            fix [([1, 3], 3), ([0, 1], 2), ([1, 2], 1)], "printed (1 - a1^-1 a2^-1) where (1 - a1^-1 a2^-3)^3 is needed"),
        entry!("G2", 2, [-1, 1], [([1, 1], 2), ([1, 0], 3), ([1, 2], 1), ([2, 3], 3)]),
        entry!("G2", 2, [0, -1], [([1, 1], 1), ([0, 1], 1), ([1, 2], 3), ([2, 3], 2), ([1, 3], 3)],
            fix [([1, 1], 1), ([0, 1], 1), ([1, 2], 2), ([2, 3], 3), ([1, 3], 3)], "exponents of a1^-1 a2^-2 and a1^-2 a2^-3 are swapped"),
    ]
}

fn char_of(cd: &CartanData, f: &[(Vec<i64>, i32)]) -> Result<RationalChar> {
    let mut c = RationalChar::one(cd.rank());
    for (r, m) in f {
        c.mul_factor(cd, r, *m)?;
    }
    Ok(c)
}

impl ChiEntry {
    pub fn printed_char(&self, cd: &CartanData) -> Result<RationalChar> {
        char_of(cd, &self.printed)
    }

    /// The printed value, or its correction when the printed one is a misprint.
    pub fn to_char(&self, cd: &CartanData) -> Result<RationalChar> {
        char_of(cd, self.corrected.as_ref().unwrap_or(&self.printed))
    }
}

pub fn chi_catalog_rank2(type_label: &str, lambda: &Weight) -> Result<(ChiEntry, RationalChar)> {
    let cd = CartanData::from_label(type_label)?;
    let e = chi_catalog()
        .into_iter()
        .find(|e| e.type_label == cd.label() && e.weight.as_slice() == &lambda.0[..])
        .ok_or_else(|| Error::Catalog(format!("no closed form for chi_{lambda} in type {type_label}")))?;
    let c = e.to_char(&cd)?;
    Ok((e, c))
}

/// `chi_{-omega_i} = prod_{beta > 0} (1 - [-beta])^{-<coefficient of alpha_i in beta>}`.
pub fn chi_lowest(cd: &CartanData, i: Node) -> RationalChar {
    let mut c = RationalChar::one(cd.rank());
    for b in cd.positive_roots() {
        if b[i - 1] != 0 {
            c.factors.insert(b.clone(), b[i - 1] as i32);
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::{Component, ThetaCtx};

    fn all_reduced_words(cd: &CartanData, target: &crate::cartan::WeylElem, len: usize) -> Vec<Vec<Node>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &out {
                for i in cd.nodes() {
                    let mut x = w.clone();
                    x.push(i);
                    if cd.is_reduced(&x) {
                        next.push(x);
                    }
                }
            }
            out = next;
        }
        out.into_iter().filter(|w| &cd.elem_of_word(w) == target).collect()
    }

    #[test]
    fn normal_form_of_negative_roots() {
        let a2 = CartanData::from_label("A2").unwrap();
        let c = RationalChar::factor(&a2, &[-1, 0], 1).unwrap();
        assert_eq!(c.sign, -1);
        assert_eq!(c.weight, -&a2.alpha(1));
        assert_eq!(c.factors.get(&vec![1, 0]), Some(&1));
        let e = Component::identity(&a2);
        let lhs = c.expand(&a2, &e, 4).unwrap();
        let direct = RationalChar::factor(&a2, &[1, 0], 1).unwrap().mul_weight(&-&a2.alpha(1)).expand(&a2, &e, 4).unwrap().neg();
        assert_eq!(lhs.first_difference(&direct).unwrap(), None);
    }

    #[test]
    fn simple_examples() {
        let a2 = CartanData::from_label("A2").unwrap();
        for i in a2.nodes() {
            let c = chi_extremal(&a2, &WeylWord::new(&a2, vec![i]).unwrap(), i).unwrap();
            assert_eq!(c, RationalChar::geometric(&a2, &a2.alpha(i)).unwrap());
            let e = Component::identity(&a2);
            let s = c.expand(&a2, &e, 2).unwrap();
            let mut want = Poly::zero(2);
            for k in 0..=2 {
                want.add_term(Monomial::weight(a2.alpha(i).scaled(-k)), BigInt::from(1));
            }
            assert_eq!(s.body(), want);
        }
        assert_eq!(RationalChar::one(2).expand(&a2, &Component::identity(&a2), 5).unwrap().body(), Poly::one(2));
        let w = WeylWord::parse(&a2, "s2 s1").unwrap();
        assert_eq!(a2.weyl_apply(&w, &a2.omega(1)), Weight::from_slice(&[0, -1]));
        let c = chi_extremal(&a2, &w, 1).unwrap();
        let s = c.expand(&a2, &Component::identity(&a2), 1).unwrap();
        let want = Poly::one(2).add(&Poly::from_mono(Monomial::weight(-&a2.alpha(2))));
        assert_eq!(s.body(), want);
        let b2 = CartanData::from_label("B2").unwrap();
        let (_, c) = chi_catalog_rank2("B2", &Weight::from_slice(&[-1, 2])).unwrap();
        assert_eq!(c, RationalChar::geometric(&b2, &b2.alpha(1)).unwrap());
    }

    #[test]
    fn expansion_in_other_components() {
        // e_v of (1 - [-beta])^{-1} with v(beta) < 0 is -[beta] - [2 beta] - ...
        let a2 = CartanData::from_label("A2").unwrap();
        let v = Component::of_word(&a2, &[1]);
        let s = RationalChar::geometric(&a2, &a2.alpha(1)).unwrap().expand(&a2, &v, 2).unwrap();
        let mut want = Poly::zero(2);
        for k in 1..=3 {
            want.add_term(Monomial::weight(a2.alpha(1).scaled(k)), BigInt::from(-1));
        }
        assert_eq!(s.body(), want);
    }

    #[test]
    fn recursion_and_coset_invariance() {
        for t in ["A2", "B2", "G2", "A3", "B3"] {
            let cd = CartanData::from_label(t).unwrap();
            let mut sol = ChiSolver::new(&cd);
            for (w, word) in cd.weyl_group(100_000).unwrap() {
                for i in cd.nodes() {
                    let ww = WeylWord::new(&cd, word.clone()).unwrap();
                    let c = sol.chi(&ww, i).unwrap();
                    let lam = cd.weyl_apply(&ww, &cd.omega(i));
                    assert_eq!(c, sol.chi_of_weight(i, &lam).unwrap(), "{t} {ww} {i}");
                    if cd.rank() == 2 {
                        for alt in all_reduced_words(&cd, &w, word.len()) {
                            assert_eq!(sol.chi(&WeylWord::new(&cd, alt).unwrap(), i).unwrap(), c);
                        }
                    }
                    let mut ext = word.clone();
                    ext.push(i);
                    if cd.is_reduced(&ext) {
                        let lhs = sol.chi(&WeylWord::new(&cd, ext).unwrap(), i).unwrap().mul(&c);
                        let mut rhs = RationalChar::geometric(&cd, &w.apply(&cd.alpha(i))).unwrap();
                        for j in cd.nodes() {
                            if j != i {
                                rhs = rhs.mul(&sol.chi(&ww, j).unwrap().pow(-cd.c(i, j)));
                            }
                        }
                        assert_eq!(lhs, rhs);
                    }
                }
            }
            for i in cd.nodes() {
                assert_eq!(sol.chi_of_weight(i, &-&cd.omega(cd.bar(i))).unwrap(), chi_lowest(&cd, cd.bar(i)), "{t} {i}");
            }
        }
    }

    #[test]
    fn catalog_agrees_after_expansion() {
        for e in chi_catalog() {
            let cd = CartanData::from_label(e.type_label).unwrap();
            let got = ChiSolver::new(&cd).chi_of_weight(e.node, &Weight::from_slice(&e.weight)).unwrap();
            let want = e.to_char(&cd).unwrap();
            assert_eq!(got, want, "{} {:?}", e.type_label, e.weight);
            let comp = Component::identity(&cd);
            let a = got.expand(&cd, &comp, 8).unwrap();
            let b = want.expand(&cd, &comp, 8).unwrap();
            assert_eq!(a.first_difference(&b).unwrap(), None);
            assert_eq!(a.leading_term(&cd).unwrap().mono, Monomial::one(2));
            assert_eq!(e.printed_char(&cd).unwrap() == want, e.corrected.is_none(), "{}", e.note);
            for root in want.factors.keys() {
                assert!(cd.positive_roots().contains(root));
            }
        }
        assert_eq!(chi_catalog().iter().filter(|e| e.corrected.is_some()).count(), 5);
    }

    #[test]
    fn agrees_with_theta_prime() {
        for t in ["A2", "B2", "G2"] {
            let cd = CartanData::from_label(t).unwrap();
            let ctx = ThetaCtx::new(&cd);
            let e = Component::identity(&cd);
            for i in cd.nodes() {
                for (w, _) in cd.weyl_orbit_fundamental(i).unwrap() {
                    let psi = Poly::from_mono(Monomial::psi(&cd, i, 0, 1));
                    let img = ctx.theta_to_identity(&w, &psi, 6).unwrap().varpi();
                    let c = chi_extremal(&cd, &w, i).unwrap().expand(&cd, &e, 6).unwrap();
                    assert_eq!(img.first_difference(&c).unwrap(), None, "{t} {w} {i}");
                }
            }
        }
    }
}
