//! q-characters of small modules, the substitution form of the TQ-relations, and the
//! Weyl-invariance check.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::cartan::{CartanData, Node, Weight, WeylElem, WeylWord};
use crate::completion::{Component, ThetaCtx, TruncSeries};
use crate::error::{Error, Result};
use crate::monomials::{a_mono, Monomial, Poly};
use crate::qq::{CaseReport, QqContext};
use crate::weylops::chari_mono;

#[derive(Clone, Debug)]
pub struct QCharacter {
    pub highest: Monomial,
    pub body: Poly,
}

impl QCharacter {
    pub fn dim(&self) -> BigInt {
        self.body.terms.values().sum()
    }

    pub fn shift(&self, cd: &CartanData, s: i32) -> QCharacter {
        QCharacter { highest: self.highest.shift_y(s), body: self.body.shift(cd, s) }
    }

    /// The ordinary character as a map weight -> multiplicity.
    pub fn weights(&self) -> BTreeMap<Weight, BigInt> {
        let mut out = BTreeMap::new();
        for (m, c) in &self.body.terms {
            *out.entry(m.varpi()).or_insert_with(BigInt::zero) += c;
        }
        out
    }
}

/// Splits a multiset of spectral parameters into `step`-strings in general position,
/// taking the lowest parameter and its longest string first.
fn strings(mut params: Vec<i32>, step: i32) -> Vec<(i32, usize)> {
    params.sort_unstable();
    let mut out = Vec::new();
    while let Some(&a) = params.first() {
        let mut len = 0;
        let mut cur = a;
        while let Some(p) = params.iter().position(|&x| x == cur) {
            params.remove(p);
            len += 1;
            cur += step;
        }
        out.push((a, len));
    }
    out
}

/// `chi_q` of the `U_{q_j}(sl_2)`-piece of a `j`-dominant monomial, as `A_j^{-1}` products.
fn sl2_factor(cd: &CartanData, j: Node, m: &Monomial) -> Poly {
    let n = cd.rank();
    let d = cd.d(j);
    let mut params = Vec::new();
    for &(k, s, e) in &m.y {
        if k as usize == j {
            for _ in 0..e {
                params.push(s);
            }
        }
    }
    let mut out = Poly::one(n);
    for (a, len) in strings(params, 2 * d) {
        let mut kr = Poly::one(n);
        let mut lower = Monomial::one(n);
        for t in 0..len {
            let top = a + 2 * d * (len as i32 - 1 - t as i32);
            lower = lower.div(&a_mono(cd, j, top + d));
            kr.add_term(lower.clone(), BigInt::one());
        }
        out = out.mul(&kr);
    }
    out
}

/// The monomial closure of a dominant monomial by `j`-strings.
pub fn fm_complete(cd: &CartanData, top: &Monomial, bound: usize) -> Result<QCharacter> {
    if !top.is_dominant() || top.has_psi() {
        return Err(Error::Parse(format!("{} is not a dominant Y-monomial", top.fmt_with(Some(cd)))));
    }
    let hf = cd.height_fn(&cd.identity());
    let h0 = hf.scaled(&top.varpi());
    let key = |m: &Monomial| ((h0 - hf.scaled(&m.varpi())) / hf.den, m.clone());
    let mut queue: BTreeMap<(i64, Monomial), ()> = BTreeMap::new();
    let mut coeff: FxHashMap<Monomial, BigInt> = FxHashMap::default();
    let mut colored: FxHashMap<(Monomial, Node), BigInt> = FxHashMap::default();
    coeff.insert(top.clone(), BigInt::one());
    queue.insert(key(top), ());
    let mut body = Poly::zero(cd.rank());
    while let Some(((_, m), _)) = queue.pop_first() {
        let mut s = coeff.get(&m).cloned().unwrap_or_default();
        for j in cd.nodes() {
            let sj = colored.get(&(m.clone(), j)).cloned().unwrap_or_default();
            if !m.is_j_dominant(j) && sj != s {
                if sj > s {
                    s = sj;
                } else {
                    return Err(Error::Internal(format!("closure is inconsistent at {} for colour {j}", m.fmt_with(Some(cd)))));
                }
            }
        }
        for j in cd.nodes() {
            let sj = colored.get(&(m.clone(), j)).cloned().unwrap_or_default();
            if !m.is_j_dominant(j) && sj != s {
                return Err(Error::Internal(format!("closure is inconsistent at {} for colour {j}", m.fmt_with(Some(cd)))));
            }
        }
        if s.is_zero() {
            continue;
        }
        body.add_term(m.clone(), s.clone());
        if body.len() > bound {
            return Err(Error::Bound(format!("closure of {} exceeds {bound} monomials", top.fmt_with(Some(cd)))));
        }
        for j in cd.nodes() {
            if !m.is_j_dominant(j) {
                continue;
            }
            let sj = colored.get(&(m.clone(), j)).cloned().unwrap_or_default();
            let fresh = &s - &sj;
            if fresh <= BigInt::zero() {
                continue;
            }
            for (lower, c) in &sl2_factor(cd, j, &m).terms {
                let m2 = m.mul(lower);
                let add = c * &fresh;
                *colored.entry((m2.clone(), j)).or_insert_with(BigInt::zero) += &add;
                if m2 != m {
                    let e = coeff.entry(m2.clone()).or_insert_with(BigInt::zero);
                    let cj = colored[&(m2.clone(), j)].clone();
                    if cj > *e {
                        *e = cj;
                    }
                    queue.insert(key(&m2), ());
                }
            }
        }
    }
    Ok(QCharacter { highest: top.clone(), body })
}

/// `(node, spectral offset, exponent)`.
pub type QFactor = (Node, i32, i32);

#[derive(Clone, Debug, Serialize)]
pub struct QCharEntry {
    pub type_label: &'static str,
    pub node: Node,
    /// Terms relative to the highest monomial `Y_{node, r}`.
    pub terms: Vec<(i64, Vec<QFactor>)>,
}

macro_rules! qterm {
    ($c:expr; $(($i:expr, $s:expr, $e:expr)),*) => { ($c, vec![$(($i, $s, $e)),*]) };
}

pub fn qchar_catalog() -> Vec<QCharEntry> {
    vec![
        QCharEntry { type_label: "A1", node: 1, terms: vec![qterm!(1; (1, 0, 1)), qterm!(1; (1, 2, -1))] },
        QCharEntry {
            type_label: "A2",
            node: 1,
            terms: vec![qterm!(1; (1, 0, 1)), qterm!(1; (1, 2, -1), (2, 1, 1)), qterm!(1; (2, 3, -1))],
        },
        QCharEntry {
            type_label: "A2",
            node: 2,
            terms: vec![qterm!(1; (2, 0, 1)), qterm!(1; (2, 2, -1), (1, 1, 1)), qterm!(1; (1, 3, -1))],
        },
        QCharEntry {
            type_label: "B2",
            node: 1,
            terms: vec![
                qterm!(1; (1, 0, 1)),
                qterm!(1; (1, 4, -1), (2, 1, 1), (2, 3, 1)),
                qterm!(1; (2, 1, 1), (2, 5, -1)),
                qterm!(1; (2, 3, -1), (2, 5, -1), (1, 2, 1)),
                qterm!(1; (1, 6, -1)),
            ],
        },
        QCharEntry {
            type_label: "B2",
            node: 2,
            terms: vec![
                qterm!(1; (2, 0, 1)),
                qterm!(1; (2, 2, -1), (1, 1, 1)),
                qterm!(1; (1, 5, -1), (2, 4, 1)),
                qterm!(1; (2, 6, -1)),
            ],
        },
        QCharEntry {
            type_label: "G2",
            node: 2,
            terms: vec![
                qterm!(1; (2, 0, 1)),
                qterm!(1; (2, 2, -1), (1, 1, 1)),
                qterm!(1; (1, 7, -1), (2, 4, 1), (2, 6, 1)),
                qterm!(1; (2, 4, 1), (2, 8, -1)),
                qterm!(1; (2, 6, -1), (2, 8, -1), (1, 5, 1)),
                qterm!(1; (1, 11, -1), (2, 10, 1)),
                qterm!(1; (2, 12, -1)),
            ],
        },
    ]
}

impl QCharEntry {
    pub fn at(&self, cd: &CartanData, r: i32) -> QCharacter {
        let n = cd.rank();
        let mut body = Poly::zero(n);
        for (c, fs) in &self.terms {
            let mut m = Monomial::one(n);
            for &(i, s, e) in fs {
                m = m.mul(&Monomial::y(n, i, r + s, e));
            }
            body.add_term(m, BigInt::from(*c));
        }
        QCharacter { highest: Monomial::y(n, self.node, r, 1), body }
    }
}

pub fn qchar_small_rep(cd: &CartanData, i: Node, r: i32) -> Result<QCharacter> {
    cd.check_node(i)?;
    qchar_catalog()
        .into_iter()
        .find(|e| e.type_label == cd.label() && e.node == i)
        .map(|e| e.at(cd, r))
        .ok_or_else(|| Error::Catalog(format!("no q-character for node {i} of {}", cd.label())))
}

/// `chi_q(V)` with each `Y_{i,s}` replaced by `[w(omega_i)] Psi Q(s - d_i) / Psi Q(s + d_i)`,
/// expanded in component `e`.
pub fn tq_substitution(qc: &QqContext, w: &WeylWord, v: &QCharacter) -> Result<TruncSeries> {
    let cd = qc.cd();
    let mut ratios: FxHashMap<(Node, i32), (TruncSeries, TruncSeries)> = FxHashMap::default();
    let mut total: Option<TruncSeries> = None;
    for (m, c) in v.body.sorted() {
        let mut s = TruncSeries::monomial(qc.e.clone(), Monomial::one(cd.rank()), c.clone(), qc.order);
        for &(i, at, e) in &m.y {
            let i = i as Node;
            if let std::collections::hash_map::Entry::Vacant(slot) = ratios.entry((i, at)) {
                let d = cd.d(i);
                let q = qc.q(&w.letters, i)?;
                let lam = cd.weyl_apply(w, &cd.omega(i));
                let psi = qc.psi(&w.letters, i, at - d)?.div(&qc.psi(&w.letters, i, at + d)?).mul_weight(&lam);
                let r = q.at(cd, at - d).div(&q.at(cd, at + d))?.mul_mono(&psi);
                let rinv = r.inverse()?;
                slot.insert((r, rinv));
            }
            let (r, rinv) = &ratios[&(i, at)];
            let f = if e > 0 { r } else { rinv };
            for _ in 0..e.unsigned_abs() {
                s = s.mul(f)?;
            }
        }
        if !m.wt.is_zero() {
            s = s.mul_weight(&m.wt);
        }
        total = Some(match total {
            None => s,
            Some(t) => t.add(&s)?,
        });
    }
    total.ok_or_else(|| Error::Parse("empty q-character".into()))
}

/// TQ invariance for every `w` of the Weyl group (or those up to `max_len`).
pub fn verify_tq(cd: &CartanData, nodes: &[Node], order: usize, max_len: Option<usize>) -> Result<Vec<CaseReport>> {
    let qc = QqContext::new(cd, order);
    qc.warm(&cd.nodes().collect::<Vec<_>>(), max_len.unwrap_or(usize::MAX))?;
    let elems = cd.weyl_group(100_000)?;
    let mut cases = Vec::new();
    for &i in nodes {
        let v = qchar_small_rep(cd, i, 0)?;
        for (_, word) in &elems {
            if word.len() <= max_len.unwrap_or(usize::MAX) {
                cases.push((i, v.clone(), WeylWord::new(cd, word.clone())?));
            }
        }
    }
    Ok(cases
        .par_iter()
        .map(|(i, v, w)| {
            let id = format!("{} V=L(Y_{},0) w={}", cd.label(), i, w);
            let res = tq_substitution(&qc, w, v).and_then(|s| {
                let plain = TruncSeries::from_poly(qc.e.clone(), &v.body, order)?;
                s.sub(&plain)
            });
            match res {
                Ok(d) => CaseReport::from_diff(id, &d, cd),
                Err(e) => CaseReport::error(id, &e),
            }
        })
        .collect())
}

/// `Theta_i(x|_v) = x|_{v s_i}` for the diagonal image of `x`, every component `v` and node `i`.
pub fn verify_weyl_invariance(cd: &CartanData, x: &Poly, order: usize) -> Result<Vec<CaseReport>> {
    let ctx = ThetaCtx::new(cd);
    let elems: Vec<WeylElem> = cd.weyl_group(100_000)?.into_iter().map(|(e, _)| e).collect();
    let cases: Vec<(WeylElem, Node)> = elems.iter().flat_map(|v| cd.nodes().map(move |i| (v.clone(), i))).collect();
    Ok(cases
        .par_iter()
        .map(|(v, i)| {
            let comp = Component::new(cd, v.clone());
            let id = format!("{} v={} i={}", cd.label(), comp.label(), i);
            let res = (|| {
                let src = TruncSeries::from_poly(comp.clone(), x, order)?;
                let img = ctx.theta_step(&src, *i)?;
                let tgt = TruncSeries::from_poly(img.comp.clone(), x, order)?;
                img.sub(&tgt)
            })();
            match res {
                Ok(d) => CaseReport::from_diff(id, &d, cd),
                Err(e) => CaseReport::error(id, &e),
            }
        })
        .collect())
}

/// `T_w(m)` for all `w`, with the coefficient it has in `chi_q(L(m))`.
pub fn extremal_coefficients(cd: &CartanData, v: &QCharacter) -> Result<Vec<(Vec<Node>, BigInt)>> {
    Ok(cd
        .weyl_group(100_000)?
        .into_iter()
        .map(|(_, w)| {
            let m = chari_mono(cd, &w, &v.highest);
            let c = v.body.coeff(&m);
            (w, c)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cd(t: &str) -> CartanData {
        CartanData::from_label(t).unwrap()
    }

    #[test]
    fn catalog_is_the_closure() {
        for e in qchar_catalog() {
            let c = cd(e.type_label);
            let v = e.at(&c, 0);
            let fm = fm_complete(&c, &v.highest, 100).unwrap();
            assert_eq!(fm.body, v.body, "{} {}: {}", e.type_label, e.node, fm.body.fmt_with(Some(&c)));
        }
    }

    #[test]
    fn closure_examples() {
        let a1 = cd("A1");
        let v = fm_complete(&a1, &Monomial::y(1, 1, 0, 1), 10).unwrap();
        assert_eq!(v.body.len(), 2);
        let a2 = cd("A2");
        assert_eq!(fm_complete(&a2, &Monomial::y(2, 1, 0, 1), 10).unwrap().body.len(), 3);
        let b2 = cd("B2");
        assert_eq!(fm_complete(&b2, &Monomial::y(2, 1, 0, 1), 10).unwrap().dim(), BigInt::from(5));
        assert_eq!(fm_complete(&b2, &Monomial::y(2, 2, 0, 1), 10).unwrap().dim(), BigInt::from(4));
        // sl2 KR module W_2: three terms
        let kr = fm_complete(&a1, &Monomial::y(1, 1, 0, 1).mul(&Monomial::y(1, 1, 2, 1)), 10).unwrap();
        assert_eq!(kr.body.len(), 3);
        // general position: tensor product of two evaluation modules
        let tp = fm_complete(&a1, &Monomial::y(1, 1, 0, 1).mul(&Monomial::y(1, 1, 6, 1)), 10).unwrap();
        assert_eq!(tp.body.len(), 4);
        assert!(fm_complete(&a2, &Monomial::y(2, 1, 0, 1), 2).is_err());
    }

    #[test]
    fn ordinary_characters_are_weyl_symmetric() {
        let dims = [("A1", 1, 2), ("A2", 1, 3), ("A2", 2, 3), ("B2", 1, 5), ("B2", 2, 4), ("G2", 2, 7)];
        for (t, i, dim) in dims {
            let c = cd(t);
            let v = qchar_small_rep(&c, i, 0).unwrap();
            assert_eq!(v.dim(), BigInt::from(dim));
            let wts = v.weights();
            for (w, m) in &wts {
                for j in c.nodes() {
                    assert_eq!(wts.get(&c.reflect(j, w)), Some(m), "{t} {i}");
                }
            }
            for mono in v.body.terms.keys() {
                assert!(c.in_q_plus(&(&v.highest.varpi() - &mono.varpi())) || mono == &v.highest);
                let ratio = mono.div(&v.highest);
                assert!(ratio.y.iter().all(|f| f.2 != 0));
            }
            for (w, coeff) in extremal_coefficients(&c, &v).unwrap() {
                assert!(coeff.is_one(), "{t} {i} {w:?}");
            }
        }
    }

    #[test]
    fn substitution_is_tautological_at_identity() {
        for t in ["A1", "A2", "B2"] {
            let c = cd(t);
            let qc = QqContext::new(&c, 4);
            for i in c.nodes() {
                let v = qchar_small_rep(&c, i, 0).unwrap();
                let s = tq_substitution(&qc, &WeylWord::identity(), &v).unwrap();
                assert_eq!(s.body(), v.body);
            }
        }
    }

    #[test]
    fn tq_small() {
        for (t, n) in [("A1", 6), ("A2", 3), ("B2", 2)] {
            let c = cd(t);
            let nodes: Vec<Node> = c.nodes().collect();
            for rep in verify_tq(&c, &nodes, n, None).unwrap() {
                assert!(rep.passed(), "{rep:?}");
            }
        }
    }

    #[test]
    fn weyl_invariance() {
        for (t, i) in [("A1", 1), ("A2", 1), ("A2", 2), ("B2", 2), ("G2", 2)] {
            let c = cd(t);
            let v = qchar_small_rep(&c, i, 0).unwrap();
            for rep in verify_weyl_invariance(&c, &v.body, 4).unwrap() {
                assert!(rep.passed(), "{rep:?}");
            }
        }
        let a2 = cd("A2");
        let reps = verify_weyl_invariance(&a2, &Poly::from_mono(Monomial::y(2, 1, 0, 1)), 4).unwrap();
        assert!(reps.iter().any(|r| !r.passed() && r.witness.is_some()));
    }
}
