//! Braid group actions on monomials: Chari's `T_i` on the `Y`-ring, its extension
//! `T'_i` to `Psi`-monomials, extremal monomials and extremal `l`-weights.

use serde::Serialize;

use crate::cartan::{CartanData, Node, Weight, WeylWord};
use crate::error::{Error, Result};
use crate::monomials::{a_mono, psi_tilde, w_mono, Monomial, Poly};

/// `T_i` on a monomial: `Y_{i,s} -> Y_{i,s} A_{i,s+d_i}^{-1}`, other `Y`'s fixed, `[w] -> [s_i w]`.
pub fn chari_step(cd: &CartanData, i: Node, m: &Monomial) -> Monomial {
    debug_assert!(!m.has_psi());
    let d = cd.d(i);
    let mut out = Monomial::weight(cd.reflect(i, &m.wt));
    out.y = m.y.clone();
    for &(k, s, e) in &m.y {
        if k as usize == i {
            out = out.div(&a_mono(cd, i, s + d).pow(e));
        }
    }
    out
}

/// `T_w = T_{i_1} ... T_{i_k}` on a monomial in `Y`'s; the rightmost letter acts first.
pub fn chari_mono(cd: &CartanData, letters: &[Node], m: &Monomial) -> Monomial {
    let mut x = m.clone();
    for &i in letters.iter().rev() {
        x = chari_step(cd, i, &x);
    }
    x
}

pub fn chari_apply(cd: &CartanData, w: &WeylWord, x: &Poly) -> Result<Poly> {
    if x.terms.keys().any(|m| m.has_psi()) {
        return Err(Error::Parse("Chari operators act on Y-monomials only".into()));
    }
    Ok(Poly::from_terms(x.rank(), x.terms.iter().map(|(m, c)| (chari_mono(cd, &w.letters, m), c.clone()))))
}

/// Applies a ring endomorphism given on `Psi_{k,r}` and on weights.
fn psi_hom(cd: &CartanData, m: &Monomial, on_psi: impl Fn(Node, i32) -> Monomial, on_weight: impl Fn(&Weight) -> Weight) -> Monomial {
    let (wt, raw) = m.to_psi_form(cd);
    let mut out = Monomial::weight(on_weight(&wt));
    for &(k, r, e) in &raw {
        out = out.mul(&on_psi(k as usize, r).pow(e));
    }
    out
}

/// `T'_i(Psi_{i,r}) = Psi~_{i,r} Psi_{i,r} Psi_{i,r+2d_i}^{-1}`, `T'_i(Psi_{j,r}) = Psi_{j,r}`,
/// `T'_i[w] = [s_i w]`.
pub fn tprime_step(cd: &CartanData, i: Node, m: &Monomial) -> Monomial {
    let d = cd.d(i);
    psi_hom(
        cd,
        m,
        |k, r| {
            if k == i {
                psi_tilde(cd, i, r).mul(&Monomial::psi(cd, i, r, 1)).mul(&Monomial::psi(cd, i, r + 2 * d, -1))
            } else {
                Monomial::psi(cd, k, r, 1)
            }
        },
        |w| cd.reflect(i, w),
    )
}

/// `(T'_i)^{-1}(Psi_{i,r}) = Psi~_{i,r-2d_i}`.
pub fn tprime_inv_step(cd: &CartanData, i: Node, m: &Monomial) -> Monomial {
    let d = cd.d(i);
    psi_hom(cd, m, |k, r| if k == i { psi_tilde(cd, i, r - 2 * d) } else { Monomial::psi(cd, k, r, 1) }, |w| cd.reflect(i, w))
}

pub fn tprime_mono(cd: &CartanData, letters: &[Node], m: &Monomial) -> Monomial {
    let mut x = m.clone();
    for &i in letters.iter().rev() {
        x = tprime_step(cd, i, &x);
    }
    x
}

pub fn tprime_apply(cd: &CartanData, w: &WeylWord, x: &Poly) -> Poly {
    Poly::from_terms(x.rank(), x.terms.iter().map(|(m, c)| (tprime_mono(cd, &w.letters, m), c.clone())))
}

fn require_reduced(cd: &CartanData, w: &WeylWord) -> Result<()> {
    if cd.is_reduced(&w.letters) {
        Ok(())
    } else {
        Err(Error::NotReduced(w.to_string()))
    }
}

/// `Y_{w(omega_i), q^r} = T_w(Y_{i,r})`.
pub fn extremal_y(cd: &CartanData, w: &WeylWord, i: Node, r: i32) -> Result<Monomial> {
    cd.check_node(i)?;
    require_reduced(cd, w)?;
    Ok(chari_mono(cd, &w.letters, &Monomial::y(cd.rank(), i, r, 1)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PsiMethod {
    Substitution,
    Conjugated,
}

/// `Psi_{w(omega_i), q^r}`.
pub fn psi_extremal(cd: &CartanData, w: &WeylWord, i: Node, r: i32, method: PsiMethod) -> Result<Monomial> {
    cd.check_node(i)?;
    require_reduced(cd, w)?;
    match method {
        PsiMethod::Conjugated => {
            let start = Monomial::psi(cd, i, r, 1).sigma(cd);
            Ok(tprime_mono(cd, &w.letters, &start).sigma(cd))
        }
        PsiMethod::Substitution => {
            let y = chari_mono(cd, &w.letters, &Monomial::y(cd.rank(), i, 0, 1));
            Ok(substitute_psi(cd, &y, i)?.shift(cd, r))
        }
    }
}

/// Replaces the `Y`'s of an extremal monomial by `Psi`'s according to the ratio of root lengths.
fn substitute_psi(cd: &CartanData, y: &Monomial, i: Node) -> Result<Monomial> {
    let n = cd.rank();
    let di = cd.d(i);
    let mut out = Monomial::one(n);
    for k in cd.nodes() {
        let dk = cd.d(k);
        let mut facs: Vec<(i32, i32)> = y.y.iter().filter(|f| f.0 as usize == k).map(|f| (f.1, f.2)).collect();
        if facs.is_empty() {
            continue;
        }
        if dk == di {
            for (b, e) in facs {
                out = out.mul(&Monomial::psi(cd, k, -b, e));
            }
        } else if dk > di {
            if dk % di != 0 {
                return Err(Error::Internal(format!("root length ratio d_{k}/d_{i} is not an integer")));
            }
            let m = dk / di;
            for (b, e) in facs {
                for t in 0..m {
                    out = out.mul(&Monomial::psi(cd, k, -b + (m - 1) - 2 * t, e));
                }
            }
        } else {
            // peel W-blocks Y_{k,b-g} Y_{k,b-g+2} ... Y_{k,b+g} starting from the lowest exponent
            let block = w_mono(cd, k, 0);
            let g = -block.y[0].1;
            facs.sort();
            let mut cur: std::collections::BTreeMap<i32, i32> = facs.into_iter().collect();
            while let Some((&lo, &e)) = cur.iter().next() {
                let b = lo + g;
                for f in &block.y {
                    let pos = f.1 + b;
                    let v = cur.entry(pos).or_insert(0);
                    *v -= e;
                    if *v == 0 {
                        cur.remove(&pos);
                    }
                }
                if cur.contains_key(&lo) {
                    return Err(Error::Internal(format!("W-block factorization failed for {y}")));
                }
                out = out.mul(&Monomial::psi(cd, k, -b, e));
                if cur.len() > 64 {
                    return Err(Error::Internal(format!("W-block factorization of {y} does not terminate")));
                }
            }
        }
    }
    if !y.wt.is_zero() {
        return Err(Error::Internal("extremal monomial carries a weight factor".into()));
    }
    Ok(out)
}

/// Braid relation order from the Cartan entries.
pub fn braid_order(cd: &CartanData, i: Node, j: Node) -> usize {
    match cd.c(i, j) * cd.c(j, i) {
        0 => 2,
        1 => 3,
        2 => 4,
        3 => 6,
        p => panic!("finite type has C_ij C_ji <= 3, got {p}"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Alphabet {
    Y,
    Yprime,
}

#[derive(Clone, Debug, Serialize)]
pub struct BraidReport {
    pub i: Node,
    pub j: Node,
    pub order: usize,
    pub checked: usize,
    pub pass: bool,
    pub counterexample: Option<String>,
}

pub const BRAID_WINDOW: std::ops::RangeInclusive<i32> = -8..=8;

/// Checks `T_i T_j T_i ... = T_j T_i T_j ...` (`m(i,j)` letters each side) on generators.
pub fn check_braid(cd: &CartanData, i: Node, j: Node, alphabet: Alphabet) -> Result<BraidReport> {
    cd.check_node(i)?;
    cd.check_node(j)?;
    if i == j {
        return Err(Error::Parse("braid relation needs two distinct nodes".into()));
    }
    let m = braid_order(cd, i, j);
    let lhs: Vec<Node> = (0..m).map(|t| if t % 2 == 0 { i } else { j }).collect();
    let rhs: Vec<Node> = (0..m).map(|t| if t % 2 == 0 { j } else { i }).collect();
    let n = cd.rank();
    let mut gens = Vec::new();
    for k in cd.nodes() {
        for r in BRAID_WINDOW {
            gens.push(Monomial::y(n, k, r, 1));
            if alphabet == Alphabet::Yprime {
                gens.push(Monomial::psi(cd, k, r, 1));
            }
        }
        if alphabet == Alphabet::Yprime {
            gens.push(Monomial::weight(cd.omega(k)));
        }
    }
    let mut report = BraidReport { i, j, order: m, checked: 0, pass: true, counterexample: None };
    for g in &gens {
        let (a, b) = match alphabet {
            Alphabet::Y => (chari_mono(cd, &lhs, g), chari_mono(cd, &rhs, g)),
            Alphabet::Yprime => (tprime_mono(cd, &lhs, g), tprime_mono(cd, &rhs, g)),
        };
        report.checked += 1;
        if a != b {
            report.pass = false;
            report.counterexample = Some(format!("{}: {} vs {}", g.fmt_with(Some(cd)), a.fmt_with(Some(cd)), b.fmt_with(Some(cd))));
            break;
        }
    }
    Ok(report)
}
