//! Height-truncated models of the completions `Y~^v`, the series `Sigma`, and the
//! Weyl operators `Theta_i` routing component `v` to `v s_i`.
//!
//! A [`TruncSeries`] in component `v` with anchor `lambda` and order `N` keeps the
//! terms `t` with `ht(v(lambda - varpi(t))) <= N`, bucketed by that height.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::cartan::{CartanData, HeightFn, Node, Weight, WeylElem, WeylWord};
use crate::error::{Error, Result};
use crate::monomials::{a_mono, psi_tilde, Monomial, Poly, Term};

#[derive(Debug)]
pub struct Component {
    pub elem: WeylElem,
    pub word: Vec<Node>,
    pub hf: HeightFn,
}

pub type Comp = Arc<Component>;

impl Component {
    pub fn new(cd: &CartanData, elem: WeylElem) -> Comp {
        let word = cd.reduced_word(&elem);
        let hf = cd.height_fn(&elem);
        Arc::new(Component { elem, word, hf })
    }

    pub fn identity(cd: &CartanData) -> Comp {
        Self::new(cd, cd.identity())
    }

    pub fn of_word(cd: &CartanData, letters: &[Node]) -> Comp {
        Self::new(cd, cd.elem_of_word(letters))
    }

    /// Component `v s_i`.
    pub fn times_reflection(&self, cd: &CartanData, i: Node) -> Comp {
        Self::new(cd, self.elem.mul(&cd.reflection(i)))
    }

    pub fn is_identity(&self) -> bool {
        self.elem.is_identity()
    }

    fn hnum(&self, w: &Weight) -> i64 {
        self.hf.scaled(w)
    }

    /// `ht(v(hi - lo))`, if integral.
    pub fn rel(&self, hi: &Weight, lo: &Weight) -> Option<i64> {
        self.hf.diff(hi, lo)
    }

    /// `v(alpha_i)` is a positive root.
    pub fn sends_positive(&self, cd: &CartanData, i: Node) -> bool {
        cd.root_sign(&self.elem.apply(&cd.alpha(i))) == Some(true)
    }

    pub fn label(&self) -> String {
        if self.word.is_empty() {
            "e".into()
        } else {
            self.word.iter().map(|l| format!("s{l}")).collect::<Vec<_>>().join(" ")
        }
    }
}

impl PartialEq for Component {
    fn eq(&self, o: &Self) -> bool {
        self.elem == o.elem
    }
}

#[derive(Clone, Debug)]
pub struct TruncSeries {
    pub comp: Comp,
    pub anchor: Weight,
    pub order: usize,
    /// `grades[h]` holds the terms at relative height `h`.
    pub grades: Vec<Poly>,
}

fn same_comp(a: &Comp, b: &Comp) -> Result<()> {
    if Arc::ptr_eq(a, b) || a.elem == b.elem {
        Ok(())
    } else {
        Err(Error::Component(format!("series live in different components ({} vs {})", a.label(), b.label())))
    }
}

impl TruncSeries {
    pub fn zero(comp: Comp, anchor: Weight, order: usize) -> Self {
        let n = anchor.rank();
        TruncSeries { comp, anchor, order, grades: vec![Poly::zero(n); order + 1] }
    }

    pub fn one(comp: Comp, n: usize, order: usize) -> Self {
        Self::monomial(comp, Monomial::one(n), BigInt::one(), order)
    }

    pub fn monomial(comp: Comp, m: Monomial, c: BigInt, order: usize) -> Self {
        let mut s = Self::zero(comp, m.varpi(), order);
        s.grades[0].add_term(m, c);
        s
    }

    /// Embeds a finite sum; the anchor is a term of maximal `v`-height.
    pub fn from_poly(comp: Comp, p: &Poly, order: usize) -> Result<Self> {
        let n = p.rank();
        let anchor = match p.terms.keys().max_by_key(|m| (comp.hnum(&m.varpi()), std::cmp::Reverse((*m).clone()))) {
            Some(m) => m.varpi(),
            None => Weight::zero(n),
        };
        Self::from_poly_anchored(comp, p, anchor, order)
    }

    pub fn from_poly_anchored(comp: Comp, p: &Poly, anchor: Weight, order: usize) -> Result<Self> {
        let mut s = Self::zero(comp.clone(), anchor.clone(), order);
        for (m, c) in &p.terms {
            let h = comp.rel(&anchor, &m.varpi()).ok_or_else(|| Error::Component(format!("{m} is not height-commensurable with anchor {anchor}")))?;
            if h < 0 {
                return Err(Error::Component(format!("{m} lies above the anchor {anchor} in component {}", comp.label())));
            }
            if h as usize <= order {
                s.grades[h as usize].add_term_ref(m, c);
            }
        }
        Ok(s)
    }

    pub fn rank(&self) -> usize {
        self.anchor.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.grades.iter().all(|g| g.is_zero())
    }

    pub fn num_terms(&self) -> usize {
        self.grades.iter().map(|g| g.len()).sum()
    }

    pub fn body(&self) -> Poly {
        let mut p = Poly::zero(self.rank());
        for g in &self.grades {
            p.add_assign(g);
        }
        p
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        TruncSeries { comp: self.comp.clone(), anchor: self.anchor.clone(), order, grades: self.grades[..=order].to_vec() }
    }

    pub fn lowest_grade(&self) -> Option<usize> {
        self.grades.iter().position(|g| !g.is_zero())
    }

    pub fn neg(&self) -> Self {
        TruncSeries { grades: self.grades.iter().map(|g| g.neg()).collect(), ..self.clone() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        TruncSeries { grades: self.grades.iter().map(|g| g.scale(k)).collect(), ..self.clone() }
    }

    pub fn mul_mono(&self, m: &Monomial) -> Self {
        TruncSeries { comp: self.comp.clone(), anchor: &self.anchor + &m.varpi(), order: self.order, grades: self.grades.iter().map(|g| g.mul_mono(m)).collect() }
    }

    pub fn mul_weight(&self, w: &Weight) -> Self {
        self.mul_mono(&Monomial::weight(w.clone()))
    }

    pub fn mul(&self, o: &TruncSeries) -> Result<Self> {
        same_comp(&self.comp, &o.comp)?;
        let order = self.order.min(o.order);
        let mut out = Self::zero(self.comp.clone(), &self.anchor + &o.anchor, order);
        let pairs: Vec<(usize, usize)> = (0..=order).flat_map(|a| (0..=order - a).map(move |b| (a, b))).filter(|&(a, b)| !self.grades[a].is_zero() && !o.grades[b].is_zero()).collect();
        let big = pairs.iter().map(|&(a, b)| self.grades[a].len() * o.grades[b].len()).sum::<usize>() > 20_000;
        if big {
            let parts: Vec<(usize, Poly)> = pairs.par_iter().map(|&(a, b)| (a + b, self.grades[a].mul(&o.grades[b]))).collect();
            for (h, p) in parts {
                out.grades[h].add_assign(&p);
            }
        } else {
            for (a, b) in pairs {
                let p = self.grades[a].mul(&o.grades[b]);
                out.grades[a + b].add_assign(&p);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::one(self.comp.clone(), self.rank(), self.order);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Sum; the result keeps every height at which both operands are known.
    pub fn add(&self, o: &TruncSeries) -> Result<Self> {
        self.combine(o, false)
    }

    pub fn sub(&self, o: &TruncSeries) -> Result<Self> {
        self.combine(o, true)
    }

    fn combine(&self, o: &TruncSeries, negate: bool) -> Result<Self> {
        same_comp(&self.comp, &o.comp)?;
        let den = self.comp.hf.den;
        let ha = self.comp.hnum(&self.anchor);
        let hb = self.comp.hnum(&o.anchor);
        if (ha - hb) % den != 0 {
            return Err(Error::Component(format!("anchors {} and {} are not height-commensurable", self.anchor, o.anchor)));
        }
        let (top, htop) = if hb > ha { (&o.anchor, hb) } else { (&self.anchor, ha) };
        let cut = (ha - self.order as i64 * den).max(hb - o.order as i64 * den);
        let order = ((htop - cut) / den) as usize;
        let mut out = Self::zero(self.comp.clone(), top.clone(), order);
        for (s, h, sign) in [(self, ha, false), (o, hb, negate)] {
            let off = ((htop - h) / den) as usize;
            for (g, p) in s.grades.iter().enumerate() {
                let t = g + off;
                if t > order {
                    break;
                }
                if sign {
                    out.grades[t].sub_assign(p);
                } else {
                    out.grades[t].add_assign(p);
                }
            }
        }
        Ok(out)
    }

    /// Leading coefficient `c = +-1` and monomial `L` with `x = c L (1 + y)`.
    pub fn unit_lead(&self) -> Result<(usize, BigInt, Monomial)> {
        let h0 = self.lowest_grade().ok_or_else(|| Error::NotUnit("series is zero to its truncation order".into()))?;
        let t = self.grades[h0].as_term().ok_or_else(|| Error::NotUnit(format!("lowest grade has {} terms", self.grades[h0].len())))?;
        if !t.coeff.abs().is_one() {
            return Err(Error::NotUnit(format!("leading coefficient {} is not +-1", t.coeff)));
        }
        Ok((h0, t.coeff, t.mono))
    }

    pub fn inverse(&self) -> Result<Self> {
        let (h0, c, l) = self.unit_lead()?;
        let order = self.order - h0;
        let linv = l.inv();
        let comp = self.comp.clone();
        let n = self.rank();
        let zero_anchor = Weight::zero(n);
        // y = x / (cL) - 1, graded from 0 relative to L
        let mut y = Self::zero(comp.clone(), zero_anchor.clone(), order);
        for g in (h0 + 1)..=self.order {
            y.grades[g - h0] = self.grades[g].mul_mono(&linv).scale(&c);
        }
        let mut s = Self::one(comp.clone(), n, order);
        for _ in 0..order {
            let ys = y.mul(&s)?;
            s = Self::one(comp.clone(), n, order).sub(&ys)?;
            s.anchor = zero_anchor.clone();
        }
        Ok(s.mul_mono(&linv).scale(&c))
    }

    pub fn div(&self, o: &TruncSeries) -> Result<Self> {
        self.mul(&o.inverse()?)
    }

    pub fn shift(&self, cd: &CartanData, s: i32) -> Self {
        TruncSeries { grades: self.grades.iter().map(|g| g.shift(cd, s)).collect(), ..self.clone() }
    }

    pub fn varpi(&self) -> Self {
        TruncSeries { grades: self.grades.iter().map(|g| g.varpi()).collect(), ..self.clone() }
    }

    /// The unique `prec_v`-maximal term.
    pub fn leading_term(&self, cd: &CartanData) -> Result<Term> {
        let h0 = self.lowest_grade().ok_or_else(|| Error::Ambiguous("series is zero".into()))?;
        let g = &self.grades[h0];
        if g.len() != 1 {
            let list: Vec<String> = g.to_terms().iter().map(|t| t.fmt_with(Some(cd))).collect();
            return Err(Error::Ambiguous(list.join(", ")));
        }
        let lead = g.as_term().unwrap();
        let lw = lead.mono.varpi();
        for gr in &self.grades[h0 + 1..] {
            for m in gr.terms.keys() {
                let diff = self.comp.elem.apply(&(&lw - &m.varpi()));
                if !cd.in_q_plus(&diff) {
                    return Err(Error::Ambiguous(format!("{} is not below {} in component {}", m.fmt_with(Some(cd)), lead.fmt_with(Some(cd)), self.comp.label())));
                }
            }
        }
        Ok(lead)
    }

    /// First height at which two series differ, within the common precision.
    pub fn first_difference(&self, o: &TruncSeries) -> Result<Option<usize>> {
        let d = self.sub(o)?;
        Ok(d.lowest_grade())
    }

    pub fn fmt_with(&self, cd: Option<&CartanData>) -> String {
        let mut parts = Vec::new();
        for (h, g) in self.grades.iter().enumerate() {
            if !g.is_zero() {
                parts.push(format!("  h={h}: {}", g.fmt_with(cd)));
            }
        }
        format!("[component {}; anchor {}; order {}]\n{}", self.comp.label(), self.anchor, self.order, parts.join("\n"))
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(None))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Branch {
    E,
    Si,
}

/// `Sigma^e_{i,r} = sum_k prod_{j=1..k} A_{i,r-2d(j-1)}^{-1}` (needs `v(alpha_i) > 0`) or
/// `Sigma^{s_i}_{i,r} = -sum_{k>=1} prod_{j=1..k} A_{i,r+2dj}` (needs `v(alpha_i) < 0`).
pub fn sigma_series_in(cd: &CartanData, comp: &Comp, i: Node, r: i32, branch: Branch, order: usize) -> Result<TruncSeries> {
    cd.check_node(i)?;
    let n = cd.rank();
    let d = cd.d(i);
    let pos = comp.sends_positive(cd, i);
    let step = cd.height(&comp.elem.apply(&cd.alpha(i))).unwrap().unsigned_abs() as usize;
    match branch {
        Branch::E => {
            if !pos {
                return Err(Error::Component(format!("Sigma^e needs v(alpha_{i}) > 0, component {}", comp.label())));
            }
            let mut s = TruncSeries::one(comp.clone(), n, order);
            let mut m = Monomial::one(n);
            let mut k = 1;
            while k * step <= order {
                m = m.div(&a_mono(cd, i, r - 2 * d * (k as i32 - 1)));
                s.grades[k * step].add_term(m.clone(), BigInt::one());
                k += 1;
            }
            Ok(s)
        }
        Branch::Si => {
            if pos {
                return Err(Error::Component(format!("Sigma^si needs v(alpha_{i}) < 0, component {}", comp.label())));
            }
            let mut m = a_mono(cd, i, r + 2 * d);
            let mut s = TruncSeries::zero(comp.clone(), cd.alpha(i), order);
            let mut k = 1;
            while (k - 1) * step <= order {
                s.grades[(k - 1) * step].add_term(m.clone(), -BigInt::one());
                k += 1;
                m = m.mul(&a_mono(cd, i, r + 2 * d * k as i32));
            }
            Ok(s)
        }
    }
}

/// The branch of `Sigma` living in component `comp`.
pub fn sigma_branch(cd: &CartanData, comp: &Comp, i: Node) -> Branch {
    if comp.sends_positive(cd, i) {
        Branch::E
    } else {
        Branch::Si
    }
}

/// `Sigma` in its natural component: `e` for branch `e`, `s_i` for branch `s_i`.
pub fn sigma_series(cd: &CartanData, i: Node, r: i32, branch: Branch, order: usize) -> Result<TruncSeries> {
    let comp = match branch {
        Branch::E => Component::identity(cd),
        Branch::Si => Component::of_word(cd, &[i]),
    };
    sigma_series_in(cd, &comp, i, r, branch, order)
}

/// `Sigma_{i,r} - 1 - A_{i,r}^{-1} Sigma_{i,r-2d_i}` for the given series; the result
/// is anchored at the highest of the three summands' anchors.
pub fn sigma_residual(cd: &CartanData, s0: &TruncSeries, i: Node, r: i32) -> Result<TruncSeries> {
    let d = cd.d(i);
    let shifted = s0.shift(cd, -2 * d).mul_mono(&a_mono(cd, i, r).inv());
    let one = TruncSeries::one(s0.comp.clone(), cd.rank(), s0.order + 1);
    s0.sub(&one)?.sub(&shifted)
}

/// A collection of series indexed by component, for elements of `Pi`.
#[derive(Clone, Debug)]
pub struct PiElement {
    pub comps: BTreeMap<WeylElem, TruncSeries>,
}

impl PiElement {
    /// Diagonal embedding of a finite sum into the listed components.
    pub fn diagonal(cd: &CartanData, p: &Poly, order: usize, comps: &[WeylElem]) -> Result<Self> {
        let mut out = BTreeMap::new();
        for v in comps {
            out.insert(v.clone(), TruncSeries::from_poly(Component::new(cd, v.clone()), p, order)?);
        }
        Ok(PiElement { comps: out })
    }

    pub fn project(&self, v: &WeylElem) -> Result<&TruncSeries> {
        self.comps.get(v).ok_or_else(|| Error::Component("requested component is absent".into()))
    }

    pub fn add(&self, o: &PiElement) -> Result<PiElement> {
        let mut out = BTreeMap::new();
        for (v, s) in &self.comps {
            if let Some(t) = o.comps.get(v) {
                out.insert(v.clone(), s.add(t)?);
            }
        }
        Ok(PiElement { comps: out })
    }
}

type SeriesKey = Vec<(u8, i32, i32)>;

struct Kernel {
    f: TruncSeries,
    finv: TruncSeries,
    sig: TruncSeries,
    siginv: TruncSeries,
}

/// Caches the `Sigma`-ratios needed by `Theta_i` per (target component, node, order).
pub struct ThetaCtx<'a> {
    pub cd: &'a CartanData,
    kernels: Mutex<FxHashMap<(WeylElem, Node, usize), Arc<Kernel>>>,
}

impl<'a> ThetaCtx<'a> {
    pub fn new(cd: &'a CartanData) -> Self {
        ThetaCtx { cd, kernels: Mutex::new(FxHashMap::default()) }
    }

    fn kernel(&self, u: &Comp, i: Node, order: usize) -> Result<Arc<Kernel>> {
        let key = (u.elem.clone(), i, order);
        if let Some(k) = self.kernels.lock().unwrap().get(&key) {
            return Ok(k.clone());
        }
        let cd = self.cd;
        let d = cd.d(i);
        let br = sigma_branch(cd, u, i);
        let sig = sigma_series_in(cd, u, i, 0, br, order)?;
        let siginv = sig.inverse()?;
        let s3 = sig.shift(cd, -3 * d);
        let s1inv = siginv.shift(cd, -d);
        let f = s3.mul(&s1inv)?;
        let finv = sig.shift(cd, -d).mul(&siginv.shift(cd, -3 * d))?;
        let k = Arc::new(Kernel { f, finv, sig, siginv });
        self.kernels.lock().unwrap().insert(key, k.clone());
        Ok(k)
    }

    /// `Theta_i` (extended to `Psi`'s as `Theta'_i`) from component `x.comp` to `x.comp s_i`.
    pub fn theta_step(&self, x: &TruncSeries, i: Node) -> Result<TruncSeries> {
        let cd = self.cd;
        cd.check_node(i)?;
        let n = cd.rank();
        let d = cd.d(i);
        let u = x.comp.times_reflection(cd, i);
        let br = sigma_branch(cd, &u, i);
        let sig_anchor = match br {
            Branch::E => Weight::zero(n),
            Branch::Si => cd.alpha(i),
        };
        let mut deg: Option<i32> = None;
        for g in &x.grades {
            for m in g.terms.keys() {
                let di = m.psi.iter().filter(|f| f.0 as usize == i).map(|f| f.2).sum::<i32>();
                match deg {
                    None => deg = Some(di),
                    Some(e) if e != di => return Err(Error::Component(format!("Theta_{i} needs a constant Psi_{i}-degree"))),
                    _ => {}
                }
            }
        }
        let deg = deg.unwrap_or(0);
        let anchor = &cd.reflect(i, &x.anchor) + &sig_anchor.scaled(deg);
        let order = x.order;
        let mut out = TruncSeries::zero(u.clone(), anchor.clone(), order);

        // image monomial and series key for each term, with its height
        struct Item {
            h: usize,
            c: BigInt,
            mono: Monomial,
            key: SeriesKey,
        }
        let mut items = Vec::new();
        for (h, g) in x.grades.iter().enumerate() {
            for (m, c) in &g.terms {
                let mut mono = Monomial::weight(cd.reflect(i, &m.wt));
                let mut key: SeriesKey = Vec::new();
                for &(k, s, e) in &m.y {
                    if k as usize == i {
                        let ya = Monomial::y(n, i, s, 1).div(&a_mono(cd, i, s - d));
                        mono = mono.mul(&ya.pow(e));
                        key.push((0, s, e));
                    } else {
                        mono = mono.mul(&Monomial::y(n, k as Node, s, e));
                    }
                }
                for &(k, c0, e) in &m.psi {
                    if k as usize == i {
                        mono = mono.mul(&psi_tilde(cd, i, c0 - 2 * d).pow(e));
                        key.push((1, c0 - 2 * d, e));
                    } else {
                        let mut p = Monomial::one(n);
                        p.psi.push((k, c0, e));
                        mono = mono.mul(&p);
                    }
                }
                items.push(Item { h, c: c.clone(), mono, key });
            }
        }
        let mut need: FxHashMap<SeriesKey, usize> = FxHashMap::default();
        for it in &items {
            let p = order - it.h;
            let e = need.entry(it.key.clone()).or_insert(p);
            *e = (*e).max(p);
        }
        let kern = if need.keys().any(|k| !k.is_empty()) { Some(self.kernel(&u, i, order)?) } else { None };
        let keys: Vec<(SeriesKey, usize)> = need.into_iter().collect();
        let built: Vec<(SeriesKey, TruncSeries)> = keys
            .par_iter()
            .map(|(key, p)| {
                let mut s = TruncSeries::one(u.clone(), n, *p);
                for &(kind, at, e) in key {
                    let k = kern.as_ref().unwrap();
                    let base = match (kind, e > 0) {
                        (0, true) => &k.f,
                        (0, false) => &k.finv,
                        (_, true) => &k.sig,
                        (_, false) => &k.siginv,
                    };
                    let f = base.truncate(*p).shift(cd, at);
                    for _ in 0..e.unsigned_abs() {
                        s = s.mul(&f)?;
                    }
                }
                Ok((key.clone(), s))
            })
            .collect::<Result<_>>()?;
        let series: FxHashMap<SeriesKey, TruncSeries> = built.into_iter().collect();
        for it in items {
            let s = &series[&it.key];
            for (g, p) in s.grades.iter().enumerate() {
                let t = it.h + g;
                if t > order {
                    break;
                }
                for (m, c) in &p.terms {
                    out.grades[t].add_term(m.mul(&it.mono), c * &it.c);
                }
            }
        }
        Ok(out)
    }

    /// Applies the letters right to left, so that `x` in component `v` lands in `v w^{-1}`.
    pub fn theta_word(&self, letters: &[Node], x: &TruncSeries) -> Result<TruncSeries> {
        let mut cur = x.clone();
        for &i in letters.iter().rev() {
            cur = self.theta_step(&cur, i)?;
        }
        Ok(cur)
    }

    pub fn theta_apply(&self, w: &WeylWord, x: &PiElement) -> Result<PiElement> {
        let mut out = BTreeMap::new();
        for s in x.comps.values() {
            let y = self.theta_word(&w.letters, s)?;
            out.insert(y.comp.elem.clone(), y);
        }
        Ok(PiElement { comps: out })
    }

    /// `E_e(Theta_w(x))` for `x` a finite sum: starts in component `w`.
    pub fn theta_to_identity(&self, w: &WeylWord, x: &Poly, order: usize) -> Result<TruncSeries> {
        let comp = Component::of_word(self.cd, &w.letters);
        let s = TruncSeries::from_poly(comp, x, order)?;
        let r = self.theta_word(&w.letters, &s)?;
        debug_assert!(r.comp.is_identity());
        Ok(r)
    }
}
