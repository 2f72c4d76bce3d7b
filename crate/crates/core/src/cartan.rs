//! Root data, weights and Weyl group combinatorics for finite types.
//!
//! Nodes are labelled `1..=n` everywhere in the public interface. Weights are
//! integer vectors in the basis of fundamental weights.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Node = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Weight(pub SmallVec<[i32; 4]>);

impl Weight {
    pub fn zero(n: usize) -> Self {
        Weight(SmallVec::from_elem(0, n))
    }

    pub fn from_slice(c: &[i32]) -> Self {
        Weight(SmallVec::from_slice(c))
    }

    pub fn fundamental(n: usize, i: Node) -> Self {
        let mut w = Self::zero(n);
        w.0[i - 1] = 1;
        w
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn scaled(&self, k: i32) -> Self {
        Weight(self.0.iter().map(|c| c * k).collect())
    }

    pub fn add_scaled(&mut self, other: &Weight, k: i32) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a += k * b;
        }
    }

    pub fn coord(&self, i: Node) -> i32 {
        self.0[i - 1]
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, o: &Weight) -> Weight {
        Weight(self.0.iter().zip(o.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, o: &Weight) -> Weight {
        Weight(self.0.iter().zip(o.0.iter()).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }
}

impl AddAssign<&Weight> for Weight {
    fn add_assign(&mut self, o: &Weight) {
        self.add_scaled(o, 1);
    }
}

impl SubAssign<&Weight> for Weight {
    fn sub_assign(&mut self, o: &Weight) {
        self.add_scaled(o, -1);
    }
}

/// A Weyl group element, stored as its integer matrix on the basis of
/// fundamental weights (row-major). Two words give equal elements iff
/// their matrices agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElem {
    n: usize,
    m: Vec<i32>,
}

impl WeylElem {
    pub fn identity(n: usize) -> Self {
        let mut m = vec![0; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        WeylElem { n, m }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn apply(&self, w: &Weight) -> Weight {
        let n = self.n;
        let mut out = Weight::zero(n);
        for r in 0..n {
            let mut s = 0;
            for c in 0..n {
                s += self.m[r * n + c] * w.0[c];
            }
            out.0[r] = s;
        }
        out
    }

    pub fn mul(&self, o: &WeylElem) -> WeylElem {
        let n = self.n;
        let mut m = vec![0; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.m[r * n + k];
                if a == 0 {
                    continue;
                }
                for c in 0..n {
                    m[r * n + c] += a * o.m[k * n + c];
                }
            }
        }
        WeylElem { n, m }
    }

    pub fn matrix(&self) -> &[i32] {
        &self.m
    }
}

/// A word in the simple reflections, read as the product `s_{l1} s_{l2} ...`,
/// so the rightmost letter acts first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylWord {
    pub letters: Vec<Node>,
    pub reduced: bool,
}

impl WeylWord {
    pub fn new(cd: &CartanData, letters: Vec<Node>) -> Result<Self> {
        for &l in &letters {
            cd.check_node(l)?;
        }
        let reduced = cd.is_reduced(&letters);
        Ok(WeylWord { letters, reduced })
    }

    pub fn identity() -> Self {
        WeylWord { letters: vec![], reduced: true }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Accepts `"s1 s2 s1"`, `"1 2 1"`, `"s1s2"`, `"121"` (single digits) or `"e"`.
    pub fn parse(cd: &CartanData, text: &str) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() || t == "e" || t == "id" {
            return Ok(Self::identity());
        }
        let mut letters = Vec::new();
        let tokens: Vec<&str> = t.split(|c: char| c.is_whitespace() || c == ',' || c == '*').filter(|s| !s.is_empty()).collect();
        for tok in tokens {
            let parts: Vec<&str> = tok.split('s').filter(|s| !s.is_empty()).collect();
            if parts.is_empty() {
                return Err(Error::Parse(format!("bad Weyl word token `{tok}`")));
            }
            for p in parts {
                if !tok.contains('s') && p.len() > 1 && cd.rank() < 10 {
                    for ch in p.chars() {
                        letters.push(ch.to_digit(10).ok_or_else(|| Error::Parse(format!("bad letter `{ch}`")))? as usize);
                    }
                } else {
                    letters.push(p.parse::<usize>().map_err(|_| Error::Parse(format!("bad letter `{p}`")))?);
                }
            }
        }
        Self::new(cd, letters)
    }
}

impl fmt::Display for WeylWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let s: Vec<String> = self.letters.iter().map(|l| format!("s{l}")).collect();
        write!(f, "{}", s.join(" "))
    }
}

/// Linear functional `mu -> ht(v(mu))` with rational values `num . mu / den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightFn {
    pub num: SmallVec<[i64; 4]>,
    pub den: i64,
}

impl HeightFn {
    pub fn scaled(&self, w: &Weight) -> i64 {
        self.num.iter().zip(w.0.iter()).map(|(a, &b)| a * b as i64).sum()
    }

    /// Height of `hi - lo` when it is an integer.
    pub fn diff(&self, hi: &Weight, lo: &Weight) -> Option<i64> {
        let s = self.scaled(hi) - self.scaled(lo);
        if s % self.den == 0 {
            Some(s / self.den)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
pub struct CartanData {
    label: String,
    n: usize,
    c: Vec<i32>,
    sym: Vec<i32>,
    comp_of: Vec<usize>,
    components: Vec<Vec<Node>>,
    comp_lacing: Vec<i32>,
    comp_hv: Vec<i32>,
    bar: Vec<Node>,
    det: i64,
    adj: Vec<i64>,
    pos_roots: Vec<Vec<i64>>,
    w0: Vec<Node>,
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    #[serde(default)]
    label: Option<String>,
    cartan: Vec<Vec<i32>>,
}

impl CartanData {
    /// Build from a label such as `"A2"`, `"B2"`, `"G2"`, `"A1xA1"`, `"D4"`.
    ///
    /// Conventions: `C_{ij} = 2(a_i,a_j)/(a_i,a_i)`; for `B_n` nodes `1..n-1` are
    /// long, for `C_n` node `n` is long, for `G2` node 1 is the long root.
    pub fn from_label(label: &str) -> Result<Self> {
        let parts: Vec<&str> = label.split(['x', 'X', '×']).map(str::trim).collect();
        let mut blocks: Vec<Block> = Vec::new();
        for p in &parts {
            blocks.push(simple_block(p).ok_or_else(|| Error::UnknownType(label.to_string()))?);
        }
        let n: usize = blocks.iter().map(|b| b.0.len()).sum();
        let mut c = vec![0i32; n * n];
        let mut off = 0;
        for (d, edges) in &blocks {
            let k = d.len();
            for a in 0..k {
                c[(off + a) * n + off + a] = 2;
            }
            for &(a, b) in edges {
                let ip = -d[a].max(d[b]);
                c[(off + a) * n + off + b] = ip / d[a];
                c[(off + b) * n + off + a] = ip / d[b];
            }
            off += k;
        }
        let rows: Vec<Vec<i32>> = (0..n).map(|r| c[r * n..(r + 1) * n].to_vec()).collect();
        Self::from_matrix_labelled(&rows, label.to_string())
    }

    pub fn from_matrix(rows: &[Vec<i32>]) -> Result<Self> {
        Self::from_matrix_labelled(rows, "custom".to_string())
    }

    /// JSON form: `{"cartan": [[2,-1],[-1,2]]}` or a bare matrix `[[2,-1],[-1,2]]`.
    pub fn from_json(text: &str) -> Result<Self> {
        if let Ok(mf) = serde_json::from_str::<MatrixFile>(text) {
            let label = mf.label.unwrap_or_else(|| "custom".into());
            return Self::from_matrix_labelled(&mf.cartan, label);
        }
        let rows: Vec<Vec<i32>> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_matrix(&rows)
    }

    fn from_matrix_labelled(rows: &[Vec<i32>], label: String) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidCartan("empty matrix".into()));
        }
        let mut c = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::InvalidCartan("matrix is not square".into()));
            }
            c.extend_from_slice(r);
        }
        for i in 0..n {
            if c[i * n + i] != 2 {
                return Err(Error::InvalidCartan(format!("diagonal entry C[{0},{0}] must be 2", i + 1)));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let v = c[i * n + j];
                if !(-3..=0).contains(&v) {
                    return Err(Error::InvalidCartan(format!("off-diagonal entry C[{},{}] = {v} not in {{0,-1,-2,-3}}", i + 1, j + 1)));
                }
                if (v == 0) != (c[j * n + i] == 0) {
                    return Err(Error::InvalidCartan(format!("C[{0},{1}] and C[{1},{0}] must vanish together", i + 1, j + 1)));
                }
            }
        }
        // connected components
        let mut comp_of = vec![usize::MAX; n];
        let mut components = Vec::new();
        for s in 0..n {
            if comp_of[s] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut members = vec![];
            let mut q = VecDeque::from([s]);
            comp_of[s] = id;
            while let Some(a) = q.pop_front() {
                members.push(a + 1);
                for b in 0..n {
                    if b != a && c[a * n + b] != 0 && comp_of[b] == usize::MAX {
                        comp_of[b] = id;
                        q.push_back(b);
                    }
                }
            }
            members.sort();
            components.push(members);
        }
        // symmetrizer: d_i C_ij = d_j C_ji, minimal positive integers per component
        let mut sym = vec![0i32; n];
        for comp in &components {
            let mut d: HashMap<usize, Rational64> = HashMap::new();
            let root = comp[0] - 1;
            d.insert(root, Rational64::from_integer(1));
            let mut q = VecDeque::from([root]);
            while let Some(a) = q.pop_front() {
                let da = d[&a];
                for b in 0..n {
                    if b != a && c[a * n + b] != 0 {
                        let want = da * Rational64::from_integer(c[a * n + b] as i64) / Rational64::from_integer(c[b * n + a] as i64);
                        match d.get(&b) {
                            Some(&old) if old != want => {
                                return Err(Error::InvalidCartan("matrix is not symmetrizable".into()));
                            }
                            Some(_) => {}
                            None => {
                                d.insert(b, want);
                                q.push_back(b);
                            }
                        }
                    }
                }
            }
            let lcm_den = d.values().fold(1i64, |acc, r| acc.lcm(r.denom()));
            let ints: Vec<(usize, i64)> = d.iter().map(|(&k, r)| (k, (r * Rational64::from_integer(lcm_den)).to_integer())).collect();
            let g = ints.iter().fold(0i64, |acc, (_, v)| acc.gcd(v));
            for (k, v) in ints {
                if v <= 0 {
                    return Err(Error::InvalidCartan("symmetrizer is not positive".into()));
                }
                sym[k] = (v / g) as i32;
            }
        }
        // positive definiteness of the symmetrized matrix via leading minors
        let b: Vec<i128> = (0..n * n).map(|k| sym[k / n] as i128 * c[k] as i128).collect();
        for k in 1..=n {
            if bareiss_det(&b, n, k) <= 0 {
                return Err(Error::InvalidCartan("matrix is not of finite type (symmetrized form not positive definite)".into()));
            }
        }
        let cf: Vec<i128> = c.iter().map(|&v| v as i128).collect();
        let det = bareiss_det(&cf, n, n) as i64;
        let adj = adjugate(&c, n);
        let mut cd = CartanData {
            label,
            n,
            c,
            sym,
            comp_of,
            components,
            comp_lacing: vec![],
            comp_hv: vec![],
            bar: vec![],
            det,
            adj,
            pos_roots: vec![],
            w0: vec![],
        };
        cd.pos_roots = cd.enumerate_positive_roots();
        cd.comp_lacing = cd.components.iter().map(|comp| comp.iter().map(|&i| cd.sym[i - 1]).max().unwrap()).collect();
        cd.comp_hv = (0..cd.components.len()).map(|k| cd.dual_coxeter_of_component(k)).collect();
        cd.w0 = cd.compute_longest_word();
        let w0 = cd.elem_of_word(&cd.w0);
        cd.bar = (1..=n)
            .map(|i| {
                let img = w0.apply(&Weight::fundamental(n, i));
                (1..=n).find(|&j| img == Weight::fundamental(n, j).scaled(-1)).expect("w0 maps fundamental weights to negatives")
            })
            .collect();
        Ok(cd)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> std::ops::RangeInclusive<Node> {
        1..=self.n
    }

    pub fn check_node(&self, i: Node) -> Result<()> {
        if i >= 1 && i <= self.n {
            Ok(())
        } else {
            Err(Error::BadNode { node: i, rank: self.n })
        }
    }

    /// `C_{i,j}` with 1-based nodes.
    pub fn c(&self, i: Node, j: Node) -> i32 {
        self.c[(i - 1) * self.n + (j - 1)]
    }

    pub fn matrix(&self) -> Vec<Vec<i32>> {
        (0..self.n).map(|r| self.c[r * self.n..(r + 1) * self.n].to_vec()).collect()
    }

    pub fn d(&self, i: Node) -> i32 {
        self.sym[i - 1]
    }

    pub fn symmetrizers(&self) -> &[i32] {
        &self.sym
    }

    pub fn components(&self) -> &[Vec<Node>] {
        &self.components
    }

    pub fn is_simple(&self) -> bool {
        self.components.len() == 1
    }

    /// Lacing number of the component containing `i`.
    pub fn lacing_of(&self, i: Node) -> i32 {
        self.comp_lacing[self.comp_of[i - 1]]
    }

    /// Lacing number `d`; for a product of types, the maximum over components.
    pub fn lacing(&self) -> i32 {
        *self.comp_lacing.iter().max().unwrap()
    }

    pub fn dual_coxeter_of(&self, i: Node) -> i32 {
        self.comp_hv[self.comp_of[i - 1]]
    }

    /// Dual Coxeter number; `None` for a product of several simple types.
    pub fn dual_coxeter(&self) -> Option<i32> {
        if self.is_simple() {
            Some(self.comp_hv[0])
        } else {
            None
        }
    }

    pub fn bar(&self, i: Node) -> Node {
        self.bar[i - 1]
    }

    pub fn omega(&self, i: Node) -> Weight {
        Weight::fundamental(self.n, i)
    }

    /// `alpha_i = sum_j C_{j,i} omega_j`.
    pub fn alpha(&self, i: Node) -> Weight {
        Weight((1..=self.n).map(|j| self.c(j, i)).collect())
    }

    pub fn zero_weight(&self) -> Weight {
        Weight::zero(self.n)
    }

    /// `(lambda, mu)` with `(alpha_i, omega_j) = d_j delta_ij`; returned as a rational.
    pub fn form(&self, l: &Weight, m: &Weight) -> Rational64 {
        let x = self.root_coords_rational(l);
        let mut s = Rational64::from_integer(0);
        for (i, xi) in x.iter().enumerate() {
            s += xi * Rational64::from_integer(self.sym[i] as i64 * m.0[i] as i64);
        }
        s
    }

    fn root_coords_rational(&self, w: &Weight) -> Vec<Rational64> {
        let n = self.n;
        (0..n)
            .map(|r| {
                let s: i64 = (0..n).map(|k| self.adj[r * n + k] * w.0[k] as i64).sum();
                Rational64::new(s, self.det)
            })
            .collect()
    }

    /// Coordinates in the basis of simple roots, if `w` lies in the root lattice.
    pub fn root_coords(&self, w: &Weight) -> Option<Vec<i64>> {
        let n = self.n;
        let mut out = Vec::with_capacity(n);
        for r in 0..n {
            let s: i64 = (0..n).map(|k| self.adj[r * n + k] * w.0[k] as i64).sum();
            if s % self.det != 0 {
                return None;
            }
            out.push(s / self.det);
        }
        Some(out)
    }

    pub fn weight_of_root_coords(&self, x: &[i64]) -> Weight {
        let mut w = self.zero_weight();
        for (j, &xj) in x.iter().enumerate() {
            w.add_scaled(&self.alpha(j + 1), xj as i32);
        }
        w
    }

    /// Is `w` a nonzero element of the positive root cone `Q+`?
    pub fn in_q_plus(&self, w: &Weight) -> bool {
        match self.root_coords(w) {
            Some(x) => x.iter().all(|&v| v >= 0),
            None => false,
        }
    }

    pub fn height(&self, w: &Weight) -> Option<i64> {
        self.root_coords(w).map(|x| x.iter().sum())
    }

    /// Positive roots in simple-root coordinates, sorted by height then lexicographically.
    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.pos_roots
    }

    pub fn positive_root_weights(&self) -> Vec<Weight> {
        self.pos_roots.iter().map(|x| self.weight_of_root_coords(x)).collect()
    }

    /// `Some(true)` for a positive root, `Some(false)` for a negative root, `None` otherwise.
    pub fn root_sign(&self, w: &Weight) -> Option<bool> {
        let x = self.root_coords(w)?;
        if self.pos_roots.contains(&x) {
            return Some(true);
        }
        let neg: Vec<i64> = x.iter().map(|v| -v).collect();
        if self.pos_roots.contains(&neg) {
            return Some(false);
        }
        None
    }

    fn enumerate_positive_roots(&self) -> Vec<Vec<i64>> {
        let n = self.n;
        let mut seen: Vec<Vec<i64>> = Vec::new();
        let mut q = VecDeque::new();
        for i in 0..n {
            let mut e = vec![0i64; n];
            e[i] = 1;
            seen.push(e.clone());
            q.push_back(e);
        }
        while let Some(b) = q.pop_front() {
            for i in 0..n {
                let pair: i64 = (0..n).map(|j| self.c[i * n + j] as i64 * b[j]).sum();
                if pair == 0 {
                    continue;
                }
                let mut nb = b.clone();
                nb[i] -= pair;
                if nb.iter().all(|&v| v >= 0) && nb.iter().any(|&v| v > 0) && !seen.contains(&nb) {
                    seen.push(nb.clone());
                    q.push_back(nb);
                }
            }
        }
        seen.sort_by(|a, b| (a.iter().sum::<i64>(), a).cmp(&(b.iter().sum::<i64>(), b)));
        seen
    }

    fn dual_coxeter_of_component(&self, k: usize) -> i32 {
        let comp = &self.components[k];
        let d = self.comp_lacing[k] as i64;
        let theta = self
            .pos_roots
            .iter()
            .filter(|x| x.iter().enumerate().all(|(j, &v)| v == 0 || comp.contains(&(j + 1))))
            .max_by_key(|x| x.iter().sum::<i64>())
            .unwrap();
        let s: i64 = theta.iter().enumerate().map(|(j, &v)| v * self.sym[j] as i64).sum();
        (1 + s / d) as i32
    }

    // ---- Weyl group ----

    pub fn identity(&self) -> WeylElem {
        WeylElem::identity(self.n)
    }

    pub fn reflection(&self, i: Node) -> WeylElem {
        let n = self.n;
        let mut e = WeylElem::identity(n);
        let a = self.alpha(i);
        for r in 0..n {
            e.m[r * n + (i - 1)] -= a.0[r];
        }
        e
    }

    pub fn elem_of_word(&self, letters: &[Node]) -> WeylElem {
        let mut e = self.identity();
        for &l in letters {
            e = e.mul(&self.reflection(l));
        }
        e
    }

    pub fn elem(&self, w: &WeylWord) -> WeylElem {
        self.elem_of_word(&w.letters)
    }

    /// Applies the letters right to left.
    pub fn weyl_apply(&self, w: &WeylWord, l: &Weight) -> Weight {
        let mut out = l.clone();
        for &i in w.letters.iter().rev() {
            out = self.reflect(i, &out);
        }
        out
    }

    /// `s_i(lambda) = lambda - <lambda, alpha_i^vee> alpha_i`.
    pub fn reflect(&self, i: Node, l: &Weight) -> Weight {
        let mut out = l.clone();
        out.add_scaled(&self.alpha(i), -l.0[i - 1]);
        out
    }

    /// Number of positive roots sent to negative roots.
    pub fn length(&self, w: &WeylElem) -> usize {
        self.pos_roots
            .iter()
            .filter(|x| {
                let img = w.apply(&self.weight_of_root_coords(x));
                self.root_sign(&img) == Some(false)
            })
            .count()
    }

    pub fn is_reduced(&self, letters: &[Node]) -> bool {
        let mut w = self.identity();
        for &l in letters {
            let img = w.apply(&self.alpha(l));
            if self.root_sign(&img) != Some(true) {
                return false;
            }
            w = w.mul(&self.reflection(l));
        }
        true
    }

    /// `(length of the element, whether the word is reduced)`.
    pub fn reduced_length(&self, w: &WeylWord) -> (usize, bool) {
        let e = self.elem(w);
        let l = self.length(&e);
        (l, l == w.letters.len())
    }

    /// A reduced word for `w`, built by peeling right descents (smallest index first).
    pub fn reduced_word(&self, w: &WeylElem) -> Vec<Node> {
        let mut cur = w.clone();
        let mut rev = Vec::new();
        loop {
            let desc = (1..=self.n).find(|&i| self.root_sign(&cur.apply(&self.alpha(i))) == Some(false));
            match desc {
                None => break,
                Some(i) => {
                    rev.push(i);
                    cur = cur.mul(&self.reflection(i));
                }
            }
        }
        rev.reverse();
        rev
    }

    pub fn longest_word(&self) -> WeylWord {
        WeylWord { letters: self.w0.clone(), reduced: true }
    }

    fn compute_longest_word(&self) -> Vec<Node> {
        let rho = Weight(SmallVec::from_elem(1, self.n));
        let mut lam = rho;
        let mut word = VecDeque::new();
        while let Some(j) = (1..=self.n).find(|&j| lam.0[j - 1] > 0) {
            lam = self.reflect(j, &lam);
            word.push_front(j);
        }
        // w0 = s_{j_k} ... s_{j_1}, letters recorded in application order
        let letters: Vec<Node> = word.into_iter().collect();
        letters
    }

    /// All elements with a shortlex-minimal reduced word, in breadth-first order.
    pub fn weyl_group(&self, cap: usize) -> Result<Vec<(WeylElem, Vec<Node>)>> {
        let mut seen: HashMap<WeylElem, usize> = HashMap::new();
        let mut out: Vec<(WeylElem, Vec<Node>)> = Vec::new();
        let id = self.identity();
        seen.insert(id.clone(), 0);
        out.push((id, vec![]));
        let mut head = 0;
        while head < out.len() {
            let (e, word) = out[head].clone();
            head += 1;
            for i in 1..=self.n {
                let ne = e.mul(&self.reflection(i));
                if !seen.contains_key(&ne) {
                    if out.len() >= cap {
                        return Err(Error::TooLarge(out.len()));
                    }
                    let mut nw = word.clone();
                    nw.push(i);
                    seen.insert(ne.clone(), out.len());
                    out.push((ne, nw));
                }
            }
        }
        Ok(out)
    }

    /// Orbit `W . omega_i` with minimal-length coset representatives, listed by length.
    pub fn weyl_orbit_fundamental(&self, i: Node) -> Result<Vec<(WeylWord, Weight)>> {
        self.check_node(i)?;
        let start = self.omega(i);
        let mut seen: HashMap<Weight, ()> = HashMap::new();
        seen.insert(start.clone(), ());
        let mut out = vec![(WeylWord::identity(), start)];
        let mut head = 0;
        while head < out.len() {
            let (w, lam) = out[head].clone();
            head += 1;
            for j in 1..=self.n {
                if lam.0[j - 1] > 0 {
                    let nl = self.reflect(j, &lam);
                    if seen.insert(nl.clone(), ()).is_none() {
                        let mut letters = vec![j];
                        letters.extend_from_slice(&w.letters);
                        out.push((WeylWord { letters, reduced: true }, nl));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Height functional of the component `v`: `mu -> ht(v(mu))`.
    pub fn height_fn(&self, v: &WeylElem) -> HeightFn {
        let n = self.n;
        let mut num: SmallVec<[i64; 4]> = SmallVec::from_elem(0, n);
        for c in 0..n {
            let mut s = 0i64;
            for k in 0..n {
                let colsum: i64 = (0..n).map(|r| self.adj[r * n + k]).sum();
                s += colsum * v.m[k * n + c] as i64;
            }
            num[c] = s;
        }
        HeightFn { num, den: self.det }
    }

    /// `w(omega_i^vee)` in fundamental coweight coordinates, via `phi_i(w(omega_i))`
    /// with `phi_i(omega_k) = (d_k/d_i) omega_k^vee`.
    pub fn coweight_image(&self, w: &WeylWord, i: Node) -> Vec<Rational64> {
        let lam = self.weyl_apply(w, &self.omega(i));
        (1..=self.n).map(|k| Rational64::new(lam.0[k - 1] as i64 * self.d(k) as i64, self.d(i) as i64)).collect()
    }

    /// `w(omega_i^vee)` computed directly with `s_k(omega_j^vee) = omega_j^vee - delta_kj alpha_k^vee`
    /// and `alpha_k^vee = sum_j C_{k,j} omega_j^vee`.
    pub fn coweight_reflect(&self, w: &WeylWord, i: Node) -> Vec<Rational64> {
        let mut v: Vec<i64> = (1..=self.n).map(|k| if k == i { 1 } else { 0 }).collect();
        for &k in w.letters.iter().rev() {
            let ck = v[k - 1];
            for j in 1..=self.n {
                v[j - 1] -= ck * self.c(k, j) as i64;
            }
        }
        v.into_iter().map(Rational64::from_integer).collect()
    }
}

/// Symmetrizers and Dynkin edges of a simple factor.
type Block = (Vec<i32>, Vec<(usize, usize)>);

fn simple_block(p: &str) -> Option<Block> {
    let mut chars = p.chars();
    let letter = chars.next()?.to_ascii_uppercase();
    let n: usize = chars.as_str().parse().ok()?;
    let path = |k: usize| -> Vec<(usize, usize)> { (0..k.saturating_sub(1)).map(|a| (a, a + 1)).collect() };
    match (letter, n) {
        ('A', n) if n >= 1 => Some((vec![1; n], path(n))),
        ('B', n) if n >= 2 => {
            let mut d = vec![2; n];
            d[n - 1] = 1;
            Some((d, path(n)))
        }
        ('C', n) if n >= 2 => {
            let mut d = vec![1; n];
            d[n - 1] = 2;
            Some((d, path(n)))
        }
        ('D', n) if n >= 4 => {
            let mut e = path(n - 1);
            e.push((n - 3, n - 1));
            Some((vec![1; n], e))
        }
        ('E', n) if (6..=8).contains(&n) => {
            // Bourbaki: 1-3-4-5-6-7-8 with 2 attached to 4
            let mut e = vec![(0, 2), (1, 3), (2, 3)];
            for a in 3..n - 1 {
                e.push((a, a + 1));
            }
            Some((vec![1; n], e))
        }
        ('F', 4) => Some((vec![2, 2, 1, 1], path(4))),
        ('G', 2) => Some((vec![3, 1], path(2))),
        _ => None,
    }
}

fn bareiss_det(m: &[i128], n: usize, k: usize) -> i128 {
    let mut a: Vec<i128> = (0..k * k).map(|t| m[(t / k) * n + t % k]).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for p in 0..k {
        if a[p * k + p] == 0 {
            match (p + 1..k).find(|&r| a[r * k + p] != 0) {
                None => return 0,
                Some(r) => {
                    for c in 0..k {
                        a.swap(p * k + c, r * k + c);
                    }
                    sign = -sign;
                }
            }
        }
        for r in p + 1..k {
            for c in p + 1..k {
                a[r * k + c] = (a[r * k + c] * a[p * k + p] - a[r * k + p] * a[p * k + c]) / prev;
            }
        }
        prev = a[p * k + p];
    }
    sign * a[(k - 1) * k + (k - 1)]
}

fn adjugate(c: &[i32], n: usize) -> Vec<i64> {
    let mut adj = vec![0i64; n * n];
    if n == 1 {
        adj[0] = 1;
        return adj;
    }
    for i in 0..n {
        for j in 0..n {
            let mut minor = Vec::with_capacity((n - 1) * (n - 1));
            for r in 0..n {
                if r == j {
                    continue;
                }
                for s in 0..n {
                    if s == i {
                        continue;
                    }
                    minor.push(c[r * n + s] as i128);
                }
            }
            let det = bareiss_det(&minor, n - 1, n - 1) as i64;
            adj[i * n + j] = if (i + j) % 2 == 0 { det } else { -det };
        }
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_and_symmetrizers() {
        let a1 = CartanData::from_label("A1").unwrap();
        assert_eq!(a1.matrix(), vec![vec![2]]);
        assert_eq!((a1.d(1), a1.lacing(), a1.dual_coxeter()), (1, 1, Some(2)));

        let b2 = CartanData::from_label("B2").unwrap();
        assert_eq!(b2.matrix(), vec![vec![2, -1], vec![-2, 2]]);
        assert_eq!((b2.d(1), b2.d(2), b2.lacing()), (2, 1, 2));

        let g2 = CartanData::from_label("G2").unwrap();
        assert_eq!(g2.matrix(), vec![vec![2, -1], vec![-3, 2]]);
        assert_eq!((g2.d(1), g2.d(2), g2.lacing()), (3, 1, 3));
        assert_eq!(g2.alpha(1), Weight::from_slice(&[2, -3]));
    }

    #[test]
    fn dual_coxeter_numbers() {
        for (t, h) in [("A3", 4), ("B3", 5), ("C3", 4), ("D4", 6), ("E6", 12), ("E7", 18), ("E8", 30), ("F4", 9), ("G2", 4), ("B2", 3)] {
            assert_eq!(CartanData::from_label(t).unwrap().dual_coxeter(), Some(h), "{t}");
        }
    }

    #[test]
    fn rejects_affine_and_garbage() {
        assert!(CartanData::from_matrix(&[vec![2, -2], vec![-2, 2]]).is_err());
        assert!(CartanData::from_matrix(&[vec![2, -1], vec![0, 2]]).is_err());
        assert!(CartanData::from_matrix(&[vec![2, -4], vec![-1, 2]]).is_err());
        assert!(CartanData::from_label("Q7").is_err());
    }

    #[test]
    fn weyl_apply_examples() {
        let a2 = CartanData::from_label("A2").unwrap();
        let s1 = WeylWord::parse(&a2, "s1").unwrap();
        assert_eq!(a2.weyl_apply(&s1, &a2.omega(1)), Weight::from_slice(&[-1, 1]));
        let s21 = WeylWord::parse(&a2, "s2 s1").unwrap();
        assert_eq!(a2.weyl_apply(&s21, &a2.omega(1)), Weight::from_slice(&[0, -1]));
        let s2 = WeylWord::parse(&a2, "s2").unwrap();
        assert_eq!(a2.weyl_apply(&s2, &a2.omega(1)), a2.omega(1));
    }

    #[test]
    fn lengths() {
        let a1 = CartanData::from_label("A1").unwrap();
        assert_eq!(a1.reduced_length(&WeylWord::new(&a1, vec![1, 1]).unwrap()), (0, false));
        let b2 = CartanData::from_label("B2").unwrap();
        assert_eq!(b2.reduced_length(&WeylWord::new(&b2, vec![1, 2, 1, 2]).unwrap()), (4, true));
        assert_eq!(b2.weyl_group(100).unwrap().len(), 8);
        let g2 = CartanData::from_label("G2").unwrap();
        assert_eq!(g2.longest_word().len(), 6);
        assert_eq!(g2.weyl_group(100).unwrap().len(), 12);
    }

    #[test]
    fn longest_and_bar() {
        let a2 = CartanData::from_label("A2").unwrap();
        assert_eq!(a2.longest_word().len(), 3);
        assert_eq!((a2.bar(1), a2.bar(2)), (2, 1));
        let b2 = CartanData::from_label("B2").unwrap();
        assert_eq!(b2.longest_word().len(), 4);
        assert_eq!((b2.bar(1), b2.bar(2)), (1, 2));
        let d5 = CartanData::from_label("D5").unwrap();
        assert_eq!((d5.bar(4), d5.bar(5), d5.bar(1)), (5, 4, 1));
        let e6 = CartanData::from_label("E6").unwrap();
        assert_eq!((e6.bar(1), e6.bar(2), e6.bar(3)), (6, 2, 5));
    }

    #[test]
    fn orbits() {
        let a2 = CartanData::from_label("A2").unwrap();
        let o = a2.weyl_orbit_fundamental(1).unwrap();
        let ws: Vec<Weight> = o.iter().map(|x| x.1.clone()).collect();
        assert_eq!(ws, vec![Weight::from_slice(&[1, 0]), Weight::from_slice(&[-1, 1]), Weight::from_slice(&[0, -1])]);
        let b2 = CartanData::from_label("B2").unwrap();
        assert_eq!(b2.weyl_orbit_fundamental(2).unwrap().len(), 4);
        for (w, lam) in b2.weyl_orbit_fundamental(1).unwrap() {
            assert!(w.reduced);
            assert_eq!(b2.weyl_apply(&w, &b2.omega(1)), lam);
        }
    }

    #[test]
    fn coweights() {
        let b2 = CartanData::from_label("B2").unwrap();
        for w in b2.weyl_group(100).unwrap() {
            let word = WeylWord::new(&b2, w.1).unwrap();
            for i in 1..=2 {
                assert_eq!(b2.coweight_image(&word, i), b2.coweight_reflect(&word, i));
            }
        }
        let a2 = CartanData::from_label("A2").unwrap();
        let w = WeylWord::parse(&a2, "s2 s1").unwrap();
        assert_eq!(a2.coweight_image(&w, 1), vec![Rational64::from_integer(0), Rational64::from_integer(-1)]);
    }

    #[test]
    fn form_invariance() {
        for t in ["A2", "B2", "G2", "A3"] {
            let cd = CartanData::from_label(t).unwrap();
            let lams = [Weight::from_slice(&vec![1; cd.rank()]), cd.omega(1), cd.alpha(cd.rank())];
            for (e, _) in cd.weyl_group(100).unwrap() {
                for l in &lams {
                    for m in &lams {
                        assert_eq!(cd.form(&e.apply(l), &e.apply(m)), cd.form(l, m));
                    }
                }
            }
            assert_eq!(cd.form(&cd.alpha(1), &cd.omega(1)), Rational64::from_integer(cd.d(1) as i64));
        }
    }

    #[test]
    fn height_fn_matches_root_height() {
        let g2 = CartanData::from_label("G2").unwrap();
        for (e, _) in g2.weyl_group(100).unwrap() {
            let hf = g2.height_fn(&e);
            for r in g2.positive_root_weights() {
                let direct = g2.height(&e.apply(&r)).unwrap();
                assert_eq!(hf.diff(&r, &g2.zero_weight()), Some(direct));
            }
        }
    }
}
