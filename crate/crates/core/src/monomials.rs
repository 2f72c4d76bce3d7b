//! Laurent monomials in `Y_{i,q^r}` and `Psi_{i,q^r}` with a weight factor `[lambda]`,
//! and finite integer combinations of them.
//!
//! The two families are related by `Y_{i,s} = [omega_i] Psi_{i,s-d_i} Psi_{i,s+d_i}^{-1}`.
//! A monomial is stored in a canonical form where `Psi_{i,c}` only appears for
//! `0 <= c < 2 d_i`; every other `Psi` factor is rewritten through `Y`'s. With that
//! convention equal elements have equal representations and the product of two
//! canonical monomials is canonical.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::cartan::{CartanData, Node, Weight};
use crate::error::{Error, Result};

/// `(node, spectral exponent, power)`.
pub type Factor = (u32, i32, i32);
pub type Factors = SmallVec<[Factor; 6]>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    pub wt: Weight,
    pub y: Factors,
    pub psi: Factors,
}

fn merge(a: &Factors, b: &Factors, sb: i32) -> Factors {
    let mut out = Factors::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (ka, kb) = ((a[i].0, a[i].1), (b[j].0, b[j].1));
        match ka.cmp(&kb) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push((b[j].0, b[j].1, sb * b[j].2));
                j += 1;
            }
            Ordering::Equal => {
                let e = a[i].2 + sb * b[j].2;
                if e != 0 {
                    out.push((ka.0, ka.1, e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend(b[j..].iter().map(|f| (f.0, f.1, sb * f.2)));
    out
}

fn normalize(mut f: Vec<Factor>) -> Factors {
    f.sort_unstable_by_key(|x| (x.0, x.1));
    let mut out = Factors::new();
    for (n, r, e) in f {
        if let Some(last) = out.last_mut() {
            if last.0 == n && last.1 == r {
                last.2 += e;
                if last.2 == 0 {
                    out.pop();
                }
                continue;
            }
        }
        if e != 0 {
            out.push((n, r, e));
        }
    }
    out
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial { wt: Weight::zero(n), y: Factors::new(), psi: Factors::new() }
    }

    pub fn weight(wt: Weight) -> Self {
        Monomial { wt, y: Factors::new(), psi: Factors::new() }
    }

    pub fn y(n: usize, i: Node, r: i32, e: i32) -> Self {
        let mut m = Self::one(n);
        if e != 0 {
            m.y.push((i as u32, r, e));
        }
        m
    }

    /// `Psi_{i,q^r}^e`, rewritten into canonical form.
    pub fn psi(cd: &CartanData, i: Node, r: i32, e: i32) -> Self {
        let n = cd.rank();
        let d = cd.d(i);
        let period = 2 * d;
        let c = r.rem_euclid(period);
        let k = (r - c) / period;
        let mut m = Self::one(n);
        if e == 0 {
            return m;
        }
        m.wt.0[i - 1] = k * e;
        m.psi.push((i as u32, c, e));
        let mut ys = Vec::new();
        if k > 0 {
            for j in 1..=k {
                ys.push((i as u32, c + (2 * j - 1) * d, -e));
            }
        } else {
            for j in (k + 1)..=0 {
                ys.push((i as u32, c + (2 * j - 1) * d, e));
            }
        }
        m.y = normalize(ys);
        m
    }

    /// Builds a canonical monomial from raw data; `psi` may use any spectral exponents.
    pub fn build(cd: &CartanData, wt: Weight, y: &[Factor], psi: &[Factor]) -> Self {
        let mut m = Monomial { wt, y: normalize(y.to_vec()), psi: Factors::new() };
        for &(i, r, e) in psi {
            m = m.mul(&Self::psi(cd, i as Node, r, e));
        }
        m
    }

    pub fn rank(&self) -> usize {
        self.wt.rank()
    }

    pub fn is_one(&self) -> bool {
        self.y.is_empty() && self.psi.is_empty() && self.wt.is_zero()
    }

    pub fn is_pure_weight(&self) -> bool {
        self.y.is_empty() && self.psi.is_empty()
    }

    pub fn has_psi(&self) -> bool {
        !self.psi.is_empty()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial { wt: &self.wt + &o.wt, y: merge(&self.y, &o.y, 1), psi: merge(&self.psi, &o.psi, 1) }
    }

    pub fn div(&self, o: &Monomial) -> Monomial {
        Monomial { wt: &self.wt - &o.wt, y: merge(&self.y, &o.y, -1), psi: merge(&self.psi, &o.psi, -1) }
    }

    pub fn inv(&self) -> Monomial {
        Monomial {
            wt: -&self.wt,
            y: self.y.iter().map(|&(a, b, e)| (a, b, -e)).collect(),
            psi: self.psi.iter().map(|&(a, b, e)| (a, b, -e)).collect(),
        }
    }

    pub fn pow(&self, k: i32) -> Monomial {
        if k == 0 {
            return Self::one(self.rank());
        }
        Monomial {
            wt: self.wt.scaled(k),
            y: self.y.iter().map(|&(a, b, e)| (a, b, e * k)).collect(),
            psi: self.psi.iter().map(|&(a, b, e)| (a, b, e * k)).collect(),
        }
    }

    pub fn mul_weight(&self, w: &Weight) -> Monomial {
        let mut m = self.clone();
        m.wt += w;
        m
    }

    /// The weight `varpi`: `[lambda] -> lambda`, `Y_{i,a} -> omega_i`, `Psi_{i,a} -> 0`.
    pub fn varpi(&self) -> Weight {
        let mut w = self.wt.clone();
        for &(i, _, e) in &self.y {
            w.0[i as usize - 1] += e;
        }
        w
    }

    /// Degree of the `Psi`-part in each node; invariant under the `Y`/`Psi` identification.
    pub fn psi_degree(&self) -> Vec<i32> {
        let mut v = vec![0; self.rank()];
        for &(i, _, e) in &self.psi {
            v[i as usize - 1] += e;
        }
        v
    }

    /// Spectral shift `tau_s`.
    pub fn shift(&self, cd: &CartanData, s: i32) -> Monomial {
        let mut m = Monomial { wt: self.wt.clone(), y: self.y.iter().map(|&(a, b, e)| (a, b + s, e)).collect(), psi: Factors::new() };
        for &(i, c, e) in &self.psi {
            m = m.mul(&Self::psi(cd, i as Node, c + s, e));
        }
        m
    }

    /// Shift of a monomial without `Psi` factors.
    pub fn shift_y(&self, s: i32) -> Monomial {
        debug_assert!(self.psi.is_empty());
        Monomial { wt: self.wt.clone(), y: self.y.iter().map(|&(a, b, e)| (a, b + s, e)).collect(), psi: Factors::new() }
    }

    /// `Psi_{i,r} -> Psi_{i,-r}^{-1}`, `Y_{i,r} -> Y_{i,-r}`, `[omega]` fixed.
    pub fn sigma(&self, cd: &CartanData) -> Monomial {
        let mut m = Monomial { wt: self.wt.clone(), y: normalize(self.y.iter().map(|&(a, b, e)| (a, -b, e)).collect()), psi: Factors::new() };
        for &(i, c, e) in &self.psi {
            m = m.mul(&Self::psi(cd, i as Node, -c, -e));
        }
        m
    }

    /// Every `Y` rewritten as `Psi`'s: returns the weight factor and raw `Psi` exponents.
    /// The weight factor of the result equals `varpi`.
    pub fn to_psi_form(&self, cd: &CartanData) -> (Weight, Factors) {
        let mut wt = self.wt.clone();
        let mut f: Vec<Factor> = self.psi.to_vec();
        for &(i, s, e) in &self.y {
            let d = cd.d(i as Node);
            wt.0[i as usize - 1] += e;
            f.push((i, s - d, e));
            f.push((i, s + d, -e));
        }
        (wt, normalize(f))
    }

    pub fn y_exponent(&self, i: Node, r: i32) -> i32 {
        self.y.iter().find(|f| f.0 as usize == i && f.1 == r).map_or(0, |f| f.2)
    }

    /// `true` if every `Y` exponent is non-negative and there are no `Psi`'s.
    pub fn is_dominant(&self) -> bool {
        self.psi.is_empty() && self.y.iter().all(|f| f.2 > 0)
    }

    pub fn is_j_dominant(&self, j: Node) -> bool {
        self.y.iter().filter(|f| f.0 as usize == j).all(|f| f.2 > 0)
    }

    pub fn fmt_with(&self, cd: Option<&CartanData>) -> String {
        let mut parts = Vec::new();
        let psi_form = cd.filter(|_| !self.psi.is_empty());
        if let Some(cd) = psi_form {
            let (wt, f) = self.to_psi_form(cd);
            if !wt.is_zero() {
                parts.push(format!("w{wt}"));
            }
            for &(i, r, e) in &f {
                parts.push(format!("Psi[{i},{r}]^{e}"));
            }
        } else {
            if !self.wt.is_zero() {
                parts.push(format!("w{}", self.wt));
            }
            for &(i, r, e) in &self.y {
                parts.push(format!("Y[{i},{r}]^{e}"));
            }
            for &(i, r, e) in &self.psi {
                parts.push(format!("Psi[{i},{r}]^{e}"));
            }
        }
        parts.join(" * ")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.fmt_with(None);
        if s.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{s}")
        }
    }
}

/// An integer multiple of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: BigInt,
    pub mono: Monomial,
}

impl Term {
    pub fn new(coeff: impl Into<BigInt>, mono: Monomial) -> Self {
        Term { coeff: coeff.into(), mono }
    }

    /// `coeff * [wt] * prod Y * prod Psi`, canonicalized.
    pub fn build(cd: &CartanData, coeff: i64, wt: Weight, y: &[Factor], psi: &[Factor]) -> Self {
        Term { coeff: BigInt::from(coeff), mono: Monomial::build(cd, wt, y, psi) }
    }

    pub fn varpi(&self) -> Weight {
        self.mono.varpi()
    }

    pub fn fmt_with(&self, cd: Option<&CartanData>) -> String {
        let m = self.mono.fmt_with(cd);
        if m.is_empty() {
            format!("{}", self.coeff)
        } else {
            format!("{} * {}", self.coeff, m)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(None))
    }
}

/// A finite sum of terms with distinct monomials and nonzero coefficients.
#[derive(Clone, Debug, Default)]
pub struct Poly {
    n: usize,
    pub terms: FxHashMap<Monomial, BigInt>,
}

impl PartialEq for Poly {
    fn eq(&self, o: &Poly) -> bool {
        self.terms == o.terms
    }
}
impl Eq for Poly {}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: FxHashMap::default() }
    }

    pub fn one(n: usize) -> Self {
        Self::from_mono(Monomial::one(n))
    }

    pub fn from_mono(m: Monomial) -> Self {
        Self::from_term(BigInt::one(), m)
    }

    pub fn from_term(c: BigInt, m: Monomial) -> Self {
        let mut p = Self::zero(m.rank());
        p.add_term(m, c);
        p
    }

    pub fn from_terms(n: usize, it: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut p = Self::zero(n);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add_term_ref(&mut self, m: &Monomial, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        if let Some(x) = self.terms.get_mut(m) {
            *x += c;
            if x.is_zero() {
                self.terms.remove(m);
            }
        } else {
            self.terms.insert(m.clone(), c.clone());
        }
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_assign(&mut self, o: &Poly) {
        for (m, c) in &o.terms {
            self.add_term_ref(m, c);
        }
    }

    pub fn sub_assign(&mut self, o: &Poly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), -c);
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut p = self.clone();
        p.add_assign(o);
        p
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut p = self.clone();
        p.sub_assign(o);
        p
    }

    pub fn neg(&self) -> Poly {
        Poly { n: self.n, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        if k.is_zero() {
            return Poly::zero(self.n);
        }
        Poly { n: self.n, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul_mono(&self, m: &Monomial) -> Poly {
        Poly { n: self.n, terms: self.terms.iter().map(|(a, c)| (a.mul(m), c.clone())).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut p = Poly::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                p.add_term(ma.mul(mb), ca * cb);
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut p = Poly::one(self.n);
        for _ in 0..k {
            p = p.mul(self);
        }
        p
    }

    pub fn shift(&self, cd: &CartanData, s: i32) -> Poly {
        Poly::from_terms(self.n, self.terms.iter().map(|(m, c)| (m.shift(cd, s), c.clone())))
    }

    pub fn sigma(&self, cd: &CartanData) -> Poly {
        Poly::from_terms(self.n, self.terms.iter().map(|(m, c)| (m.sigma(cd), c.clone())))
    }

    /// Every monomial replaced by its weight.
    pub fn varpi(&self) -> Poly {
        Poly::from_terms(self.n, self.terms.iter().map(|(m, c)| (Monomial::weight(m.varpi()), c.clone())))
    }

    /// Terms in canonical order (by weight part, then `Y`-, then `Psi`-exponents).
    pub fn sorted(&self) -> Vec<(&Monomial, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn to_terms(&self) -> Vec<Term> {
        self.sorted().into_iter().map(|(m, c)| Term { coeff: c.clone(), mono: m.clone() }).collect()
    }

    /// The single term of a one-term polynomial.
    pub fn as_term(&self) -> Option<Term> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some(Term { coeff: c.clone(), mono: m.clone() })
        } else {
            None
        }
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn fmt_with(&self, cd: Option<&CartanData>) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self.sorted().into_iter().map(|(m, c)| Term { coeff: c.clone(), mono: m.clone() }.fmt_with(cd)).collect();
        parts.join(" + ")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.to_terms().iter().map(term_to_json).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(None))
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: String,
    wt: Vec<i32>,
    #[serde(default)]
    y: Vec<[i32; 3]>,
    #[serde(default)]
    psi: Vec<[i32; 3]>,
}

pub fn term_to_json(t: &Term) -> serde_json::Value {
    let tj = TermJson {
        coeff: t.coeff.to_string(),
        wt: t.mono.wt.0.to_vec(),
        y: t.mono.y.iter().map(|&(i, r, e)| [i as i32, r, e]).collect(),
        psi: t.mono.psi.iter().map(|&(i, r, e)| [i as i32, r, e]).collect(),
    };
    serde_json::to_value(tj).expect("plain data serializes")
}

pub fn term_from_json(cd: &CartanData, v: &serde_json::Value) -> Result<Term> {
    let tj: TermJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    if tj.wt.len() != cd.rank() {
        return Err(Error::Parse(format!("weight {:?} has wrong rank", tj.wt)));
    }
    let coeff: BigInt = tj.coeff.parse().map_err(|_| Error::Parse(format!("bad coefficient `{}`", tj.coeff)))?;
    let mut y = Vec::new();
    for [i, r, e] in tj.y {
        cd.check_node(i as usize)?;
        y.push((i as u32, r, e));
    }
    let mut psi = Vec::new();
    for [i, r, e] in tj.psi {
        cd.check_node(i as usize)?;
        psi.push((i as u32, r, e));
    }
    Ok(Term { coeff, mono: Monomial::build(cd, Weight::from_slice(&tj.wt), &y, &psi) })
}

pub fn poly_from_json(cd: &CartanData, v: &serde_json::Value) -> Result<Poly> {
    let arr = v.as_array().ok_or_else(|| Error::Parse("expected an array of terms".into()))?;
    let mut p = Poly::zero(cd.rank());
    for t in arr {
        let t = term_from_json(cd, t)?;
        p.add_term(t.mono, t.coeff);
    }
    Ok(p)
}

/// Parses `-1 * w[-1,0] * Y[1,-1]^1 * Psi[2,0]^-1`; factors may omit `^1`.
pub fn parse_term(cd: &CartanData, text: &str) -> Result<Term> {
    let mut coeff = BigInt::one();
    let mut wt = cd.zero_weight();
    let mut y = Vec::new();
    let mut psi = Vec::new();
    let t = text.trim();
    let t = if let Some(rest) = t.strip_prefix('-') {
        coeff = -coeff;
        rest.trim_start()
    } else {
        t
    };
    for raw in t.split('*') {
        let f = raw.trim();
        if f.is_empty() {
            return Err(Error::Parse(format!("empty factor in `{text}`")));
        }
        if f.chars().all(|c| c.is_ascii_digit() || c == '-') {
            let k: BigInt = f.parse().map_err(|_| Error::Parse(format!("bad coefficient `{f}`")))?;
            coeff *= k;
            continue;
        }
        let open = f.find('[').ok_or_else(|| Error::Parse(format!("bad factor `{f}`")))?;
        let close = f.find(']').ok_or_else(|| Error::Parse(format!("bad factor `{f}`")))?;
        let name = &f[..open];
        let inner: Vec<i32> = f[open + 1..close]
            .split(',')
            .map(|s| s.trim().parse::<i32>().map_err(|_| Error::Parse(format!("bad index in `{f}`"))))
            .collect::<Result<_>>()?;
        let tail = f[close + 1..].trim();
        let e: i32 = if tail.is_empty() {
            1
        } else {
            tail.strip_prefix('^').ok_or_else(|| Error::Parse(format!("bad exponent in `{f}`")))?.trim().parse().map_err(|_| Error::Parse(format!("bad exponent in `{f}`")))?
        };
        match name {
            "w" => {
                if inner.len() != cd.rank() {
                    return Err(Error::Parse(format!("weight `{f}` has wrong rank")));
                }
                wt.add_scaled(&Weight::from_slice(&inner), e);
            }
            "Y" | "Psi" => {
                if inner.len() != 2 {
                    return Err(Error::Parse(format!("`{f}` needs [node,exponent]")));
                }
                cd.check_node(inner[0] as usize)?;
                let fac = (inner[0] as u32, inner[1], e);
                if name == "Y" {
                    y.push(fac)
                } else {
                    psi.push(fac)
                }
            }
            _ => return Err(Error::Parse(format!("unknown factor `{name}`"))),
        }
    }
    Ok(Term { coeff, mono: Monomial::build(cd, wt, &y, &psi) })
}

/// Parses a sum of terms separated by ` + `.
pub fn parse_poly(cd: &CartanData, text: &str) -> Result<Poly> {
    let mut p = Poly::zero(cd.rank());
    if text.trim() == "0" {
        return Ok(p);
    }
    for part in text.split(" + ") {
        let t = parse_term(cd, part)?;
        p.add_term(t.mono, t.coeff);
    }
    Ok(p)
}

// ---- distinguished monomials ----

/// `A_{i,q^r} = Y_{i,r-d_i} Y_{i,r+d_i} prod_{j: C_{j,i}<0} (prod_t Y_{j, r + (m-1-2t) d_j})^{-1}`,
/// `m = -C_{j,i}`.
pub fn a_mono(cd: &CartanData, i: Node, r: i32) -> Monomial {
    let d = cd.d(i);
    let mut f = vec![(i as u32, r - d, 1), (i as u32, r + d, 1)];
    for j in cd.nodes() {
        if j == i {
            continue;
        }
        let m = -cd.c(j, i);
        let dj = cd.d(j);
        for t in 0..m {
            f.push((j as u32, r + (m - 1 - 2 * t) * dj, -1));
        }
    }
    Monomial { wt: cd.zero_weight(), y: normalize(f), psi: Factors::new() }
}

/// `Psi~_{i,q^r} = Psi_{i,r}^{-1} prod_{j: C_{i,j}<0} prod_t Psi_{j, r + d_i + (2t-(m-1)) d_i}`,
/// `m = -C_{i,j}`.
pub fn psi_tilde(cd: &CartanData, i: Node, r: i32) -> Monomial {
    let di = cd.d(i);
    let mut m = Monomial::psi(cd, i, r, -1);
    for j in cd.nodes() {
        if j == i {
            continue;
        }
        let mm = -cd.c(i, j);
        for t in 0..mm {
            m = m.mul(&Monomial::psi(cd, j, r + di + (2 * t - (mm - 1)) * di, 1));
        }
    }
    m
}

/// The block `W_{i,q^r}`: `Y_{i,r}` when `d_i = d`; `Y_{i,r-1} Y_{i,r+1}` when `d_i = d-1`;
/// `Y_{i,r-2} Y_{i,r} Y_{i,r+2}` when `d_i = d-2`.
pub fn w_mono(cd: &CartanData, i: Node, r: i32) -> Monomial {
    let n = cd.rank();
    let gap = cd.lacing_of(i) - cd.d(i);
    let mut m = Monomial::one(n);
    for t in 0..=gap {
        m = m.mul(&Monomial::y(n, i, r - gap + 2 * t, 1));
    }
    m
}

/// `U_{i,q^r}`, with `T_i(W_{i,a}) = W_{i,a} U_{i,a q_i}^{-1}`: the product of the `A_{i,*}`
/// matching the length of the `W`-block.
pub fn u_mono(cd: &CartanData, i: Node, r: i32) -> Monomial {
    let n = cd.rank();
    let gap = cd.lacing_of(i) - cd.d(i);
    let mut m = Monomial::one(n);
    for t in 0..=gap {
        m = m.mul(&a_mono(cd, i, r - gap + 2 * t));
    }
    m
}

/// `Y_{i,s} -> [omega_i] Psi_{i,s-d_i} Psi_{i,s+d_i}^{-1}`, reported as `(weight, raw Psi exponents)`.
/// Fails if the input has `Psi`-factors already.
pub fn embed_lweight(cd: &CartanData, m: &Monomial) -> Result<(Weight, Factors)> {
    if m.has_psi() {
        return Err(Error::Parse("embedding expects a monomial in Y only".into()));
    }
    Ok(m.to_psi_form(cd))
}

/// `V^{(k)}_{i,q^r} = (A_{i,r} A_{i,r-2d_i} ... A_{i,r-2d_i(k-1)})^{-1}`.
pub fn v_block(cd: &CartanData, i: Node, r: i32, k: i32) -> Monomial {
    let d = cd.d(i);
    let mut m = Monomial::one(cd.rank());
    for t in 0..k {
        m = m.div(&a_mono(cd, i, r - 2 * d * t));
    }
    m
}
