use std::fmt::Write as _;

use qweyl_core::chi::{chi_catalog_rank2, ChiSolver};
use qweyl_core::completion::{sigma_branch, sigma_residual, sigma_series_in};
use qweyl_core::monomials::{parse_poly, term_to_json};
use qweyl_core::qq::{lattice_catalog, shifted_qchar_report, CaseReport, QqContext};
use qweyl_core::tq::{qchar_catalog, qchar_small_rep, tq_substitution};
use qweyl_core::weylops::{check_braid, chari_mono, extremal_y, psi_extremal, tprime_mono, Alphabet, PsiMethod};
use qweyl_core::{Branch, CartanData, Component, Error, Monomial, Node, Poly, Result, ThetaCtx, TruncSeries, WeylWord};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::weights::parse_weight;
use crate::{BranchArg, Command, Outcome, RunConfig};

pub fn run(cmd: Command, cd: &CartanData, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::Orbit => orbit(cd, cfg),
        Command::Chi => chi(cd, cfg),
        Command::Sigma => sigma(cd, cfg),
        Command::Theta => theta(cd, cfg),
        Command::QSeries => q_series(cd, cfg),
        Command::QqVerify => qq_verify(cd, cfg),
        Command::TqVerify => tq_verify(cd, cfg),
        Command::BraidCheck => braid_check(cd, cfg),
        Command::ShiftedChar => shifted_char(cd, cfg),
    }
}

fn series_json(cd: &CartanData, s: &TruncSeries) -> Value {
    let grades: Vec<Value> = s
        .grades
        .iter()
        .enumerate()
        .filter(|(_, g)| !g.is_zero())
        .map(|(h, g)| json!({"height": h, "terms": g.sorted().into_iter().map(|(m, c)| term_json(cd, qweyl_core::Term::new(c.clone(), m.clone()))).collect::<Vec<_>>()}))
        .collect();
    json!({"component": s.comp.label(), "anchor": s.anchor.0.to_vec(), "order": s.order, "grades": grades})
}

fn term_json(cd: &CartanData, t: qweyl_core::Term) -> Value {
    let mut v = term_to_json(&t);
    v["text"] = Value::String(t.fmt_with(Some(cd)));
    v
}

fn mono_text(cd: &CartanData, m: &Monomial) -> String {
    let s = m.fmt_with(Some(cd));
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

fn require_node(cd: &CartanData, cfg: &RunConfig) -> Result<Node> {
    let i = cfg.node.ok_or_else(|| Error::Parse("--node is required".into()))?;
    cd.check_node(i)?;
    Ok(i)
}

fn single_word(cd: &CartanData, cfg: &RunConfig) -> Result<WeylWord> {
    match &cfg.weyl {
        None => Ok(WeylWord::identity()),
        Some(w) if w.contains(';') => Err(Error::Parse("this command takes a single Weyl word".into())),
        Some(w) => WeylWord::parse(cd, w),
    }
}

/// The orbit point named by `--weight` (optionally with `--node`) or by `--weyl` and `--node`.
fn orbit_point(cd: &CartanData, cfg: &RunConfig) -> Result<(WeylWord, Node)> {
    if let Some(text) = &cfg.weight {
        let lam = parse_weight(cd, text)?;
        let nodes: Vec<Node> = match cfg.node {
            Some(i) => vec![i],
            None => cd.nodes().collect(),
        };
        for i in nodes {
            if let Some((w, _)) = cd.weyl_orbit_fundamental(i)?.into_iter().find(|(_, l)| *l == lam) {
                return Ok((w, i));
            }
        }
        return Err(Error::Parse(format!("{lam} is not in the Weyl orbit of a fundamental weight")));
    }
    let i = require_node(cd, cfg)?;
    let w = single_word(cd, cfg)?;
    if !cd.is_reduced(&w.letters) {
        return Err(Error::NotReduced(w.to_string()));
    }
    Ok((w, i))
}

fn words(cd: &CartanData, cfg: &RunConfig) -> Result<Vec<WeylWord>> {
    match &cfg.weyl {
        Some(text) => text.split(';').map(|w| WeylWord::parse(cd, w)).collect(),
        None => {
            let cap = cfg.max_len.unwrap_or(usize::MAX);
            cd.weyl_group(100_000)?.into_iter().filter(|(_, w)| w.len() <= cap).map(|(_, w)| WeylWord::new(cd, w)).collect()
        }
    }
}

fn verdicts(title: String, reports: Vec<CaseReport>, heights: bool) -> Outcome {
    let mut text = title;
    let passed = reports.iter().filter(|r| r.passed()).count();
    for r in &reports {
        let _ = write!(text, "  {:<5} {}", r.status, r.id);
        match &r.witness {
            Some(w) => {
                let _ = writeln!(text, "  ({w})");
            }
            None if heights => {
                let _ = writeln!(text, "  (height <= {})", r.max_height);
            }
            None => text.push('\n'),
        }
    }
    let _ = writeln!(text, "{passed}/{} cases pass", reports.len());
    Outcome {
        ok: passed == reports.len(),
        cases: reports.iter().map(|r| serde_json::to_value(r).expect("report serializes")).collect(),
        text,
    }
}

fn orbit(cd: &CartanData, cfg: &RunConfig) -> Result<Outcome> {
    let nodes: Vec<Node> = match cfg.node {
        Some(i) => vec![i],
        None => cd.nodes().collect(),
    };
    let r = cfg.shift;
    let mut text = String::new();
    let mut cases = Vec::new();
    let mut ok = true;
    for i in nodes {
        cd.check_node(i)?;
        let _ = writeln!(text, "{} orbit of w{i}, a = q^{r}", cd.label());
        for (w, lam) in cd.weyl_orbit_fundamental(i)? {
            let y = extremal_y(cd, &w, i, r)?;
            let psi = psi_extremal(cd, &w, i, r, PsiMethod::Conjugated)?;
            let agree = psi == psi_extremal(cd, &w, i, r, PsiMethod::Substitution)?;
            ok &= agree;
            let coweight: Vec<String> = cd.coweight_image(&w, i).iter().map(|c| c.to_string()).collect();
            let _ = writeln!(
                text,
                "  {:<24} {:<10} Y = {:<40} Psi_{{{lam},a}} = {}{}",
                w.to_string(),
                lam.to_string(),
                mono_text(cd, &y),
                mono_text(cd, &psi),
                if agree { "" } else { "  [constructions disagree]" }
            );
            cases.push(json!({
                "node": i,
                "word": w.letters,
                "weight": lam.0.to_vec(),
                "y": mono_text(cd, &y),
                "psi": mono_text(cd, &psi),
                "coweight": coweight,
                "status": if agree { "pass" } else { "fail" },
            }));
        }
    }
    Ok(Outcome { text, cases, ok })
}

fn chi(cd: &CartanData, cfg: &RunConfig) -> Result<Outcome> {
    let (w, i) = orbit_point(cd, cfg)?;
    let lam = cd.weyl_apply(&w, &cd.omega(i));
    let c = ChiSolver::new(cd).chi(&w, i)?;
    let e = Component::identity(cd);
    let series = c.expand(cd, &e, cfg.height)?;
    let mut text = format!("chi_{lam} (node {i}, w = {w})\n  = {}\n", c.fmt_with(cd));
    let mut table = Value::Null;
    let mut ok = true;
    if let Ok((entry, fixed)) = chi_catalog_rank2(cd.label(), &lam) {
        let printed = entry.printed_char(cd)?;
        let status = if printed == c {
            "matches the rank-2 table"
        } else if fixed == c {
            "printed table entry is a misprint; agrees with the corrected entry"
        } else {
            ok = false;
            "DISAGREES with the rank-2 table"
        };
        let _ = writeln!(text, "  table: {status}");
        if printed != c {
            let _ = writeln!(text, "  printed: {}", printed.fmt_with(cd));
        }
        table = json!({"status": status, "printed": printed.fmt_with(cd), "note": entry.note});
    }
    let _ = writeln!(text, "expansion to height {}:\n{}", cfg.height, series.fmt_with(Some(cd)));
    let case = json!({
        "node": i,
        "word": w.letters,
        "weight": lam.0.to_vec(),
        "factored": c.fmt_with(cd),
        "character": c,
        "expansion": series_json(cd, &series),
        "table": table,
        "status": if ok { "pass" } else { "fail" },
    });
    Ok(Outcome { text, cases: vec![case], ok })
}

fn sigma(cd: &CartanData, cfg: &RunConfig) -> Result<Outcome> {
    let i = require_node(cd, cfg)?;
    let w = single_word(cd, cfg)?;
    let comp = Component::of_word(cd, &w.letters);
    let branch = match cfg.branch {
        Some(BranchArg::E) => Branch::E,
        Some(BranchArg::Si) => Branch::Si,
        None => sigma_branch(cd, &comp, i),
    };
    let s = sigma_series_in(cd, &comp, i, cfg.shift, branch, cfg.height)?;
    let res = sigma_residual(cd, &s, i, cfg.shift)?;
    let low = res.lowest_grade();
    let ok = low.is_none_or(|h| h > cfg.height);
    let mut text = format!("Sigma^{branch:?}_{{{i},q^{}}} in component {}\n{}\n", cfg.shift, comp.label(), s.fmt_with(Some(cd)));
    let _ = writeln!(
        text,
        "residual Sigma - 1 - A^-1 tau(Sigma): {}",
        if ok { format!("vanishes to height {}", cfg.height) } else { format!("nonzero at height {}", low.unwrap()) }
    );
    let case = json!({"node": i, "branch": format!("{branch:?}"), "series": series_json(cd, &s), "status": if ok { "pass" } else { "fail" }});
    Ok(Outcome { text, cases: vec![case], ok })
}

fn theta(cd: &CartanData, cfg: &RunConfig) -> Result<Outcome> {
    let w = single_word(cd, cfg)?;
    let x = match &cfg.poly {
        Some(p) => parse_poly(cd, p)?,
        None => Poly::from_mono(Monomial::y(cd.rank(), require_node(cd, cfg)?, cfg.shift, 1)),
    };
    let ctx = ThetaCtx::new(cd);
    let img = ctx.theta_to_identity(&w, &x, cfg.height)?;
    let text = format!("E_e(Theta_{{{w}}}({}))\n{}\n", x.fmt_with(Some(cd)), img.fmt_with(Some(cd)));
    let case = json!({"word": w.letters, "input": x.fmt_with(Some(cd)), "image": series_json(cd, &img), "status": "pass"});
    Ok(Outcome { text, cases: vec![case], ok: true })
}

fn q_series(cd: &CartanData, cfg: &RunConfig) -> Result<Outcome> {
    let (w, i) = orbit_point(cd, cfg)?;
    let qc = QqContext::new(cd, cfg.height);
    let q = qc.q(&w.letters, i)?;
    let (c, chi_series) = qc.chi(&w.letters, i)?;
    let r = cfg.shift;
    let body = q.at(cd, r);
    let product = chi_series.mul(&body)?;
    let mut text = format!(
        "Q_{{{},q^{r}}} (node {i}, w = {w}); Theta_w(Y) leading term {}\n{}\nchi = {}\nchi * Q:\n{}\n",
        q.weight,
        q.lead.fmt_with(Some(cd)),
        body.fmt_with(Some(cd)),
        c.fmt_with(cd),
        product.fmt_with(Some(cd))
    );
    let mut ok = true;
    let mut closed = Value::Null;
    let lam = q.weight.clone();
    for ls in lattice_catalog().into_iter().filter(|l| l.type_label == cd.label() && l.node == i) {
        let lw = WeylWord::parse(cd, ls.word)?;
        if cd.weyl_apply(&lw, &cd.omega(i)) != lam {
            continue;
        }
        let printed = product.first_difference(&ls.expand_printed(cd, r, cfg.height)?)?;
        let fixed = product.first_difference(&ls.expand(cd, r, cfg.height)?)?;
        let status = match (printed, fixed) {
            (None, _) => "agrees with the closed form".to_string(),
            (Some(h), None) => format!("printed closed form differs at height {h}; corrected range `{}` agrees", ls.corrected.map(|c| c.0).unwrap_or("")),
            (_, Some(h)) => {
                ok = false;
                format!("DIFFERS from the closed form at height {h}")
            }
        };
        let _ = writeln!(text, "closed form {} ({}): {status}", ls.name, ls.constraint);
        closed = json!({"name": ls.name, "constraint": ls.constraint, "status": status});
    }
    let case = json!({
        "node": i,
        "word": w.letters,
        "weight": lam.0.to_vec(),
        "q": series_json(cd, &body),
        "chi": c.fmt_with(cd),
        "chi_q": series_json(cd, &product),
        "closed_form": closed,
        "status": if ok { "pass" } else { "fail" },
    });
    Ok(Outcome { text, cases: vec![case], ok })
}

fn nodes_or_all(cd: &CartanData, cfg: &RunConfig) -> Result<Vec<Node>> {
    match cfg.node {
        Some(i) => {
            cd.check_node(i)?;
            Ok(vec![i])
        }
        None => Ok(cd.nodes().collect()),
    }
}

fn qq_verify(cd: &CartanData, cfg: &RunConfig) -> Result<Outcome> {
    let ws = words(cd, cfg)?;
    let nodes = nodes_or_all(cd, cfg)?;
    let qc = QqContext::new(cd, cfg.height);
    let cap = ws.iter().map(|w| w.len()).max().unwrap_or(0) + 1;
    qc.warm(&cd.nodes().collect::<Vec<_>>(), cap)?;
    let cases: Vec<(WeylWord, Node)> = ws.iter().flat_map(|w| nodes.iter().map(move |&i| (w.clone(), i))).collect();
    let reports: Vec<CaseReport> = cases
        .par_iter()
        .map(|(w, i)| {
            let id = format!("{} w={} i={}", cd.label(), w, i);
            match qc.qq_sides(&w.letters, *i, cfg.shift).and_then(|(l, r)| l.sub(&r)) {
                Ok(d) => CaseReport::from_diff(id, &d, cd),
                Err(e) => CaseReport::error(id, &e),
            }
        })
        .collect();
    Ok(verdicts(format!("extended QQ-system, {} to height {}\n", cd.label(), cfg.height), reports, true))
}

fn tq_verify(cd: &CartanData, cfg: &RunConfig) -> Result<Outcome> {
    let ws = words(cd, cfg)?;
    let nodes: Vec<Node> = match cfg.node {
        Some(i) => vec![i],
        None => qchar_catalog().iter().filter(|e| e.type_label == cd.label()).map(|e| e.node).collect(),
    };
    if nodes.is_empty() {
        return Err(Error::Catalog(format!("no built-in q-characters for type {}", cd.label())));
    }
    let mut vs = Vec::new();
    for &i in &nodes {
        vs.push((i, qchar_small_rep(cd, i, cfg.shift)?));
    }
    let qc = QqContext::new(cd, cfg.height);
    let cases: Vec<_> = ws.iter().flat_map(|w| vs.iter().map(move |(i, v)| (w.clone(), *i, v))).collect();
    let reports: Vec<CaseReport> = cases
        .par_iter()
        .map(|(w, i, v)| {
            let id = format!("{} V=L(Y_{},{}) w={}", cd.label(), i, cfg.shift, w);
            let res = tq_substitution(&qc, w, v).and_then(|s| s.sub(&TruncSeries::from_poly(qc.e.clone(), &v.body, cfg.height)?));
            match res {
                Ok(d) => CaseReport::from_diff(id, &d, cd),
                Err(e) => CaseReport::error(id, &e),
            }
        })
        .collect();
    Ok(verdicts(format!("extended TQ-relations, {} to height {}\n", cd.label(), cfg.height), reports, true))
}

const SAMPLES: usize = 64;

fn braid_check(cd: &CartanData, cfg: &RunConfig) -> Result<Outcome> {
    let mut reports = Vec::new();
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let n = cd.rank();
    for i in cd.nodes() {
        for j in cd.nodes().filter(|&j| j > i) {
            for alphabet in [Alphabet::Y, Alphabet::Yprime] {
                let r = check_braid(cd, i, j, alphabet)?;
                reports.push(CaseReport {
                    id: format!("{} T{} i={} j={} order {} ({} generators)", cd.label(), if alphabet == Alphabet::Y { "" } else { "'" }, i, j, r.order, r.checked),
                    status: if r.pass { "pass" } else { "fail" }.into(),
                    max_height: 0,
                    witness: r.counterexample,
                });
                let m = r.order;
                let lhs: Vec<Node> = (0..m).map(|t| if t % 2 == 0 { i } else { j }).collect();
                let rhs: Vec<Node> = (0..m).map(|t| if t % 2 == 0 { j } else { i }).collect();
                let mut witness = None;
                for _ in 0..SAMPLES {
                    let mut x = Monomial::one(n);
                    for _ in 0..3 {
                        let k = rng.random_range(1..=n);
                        let s = rng.random_range(-8..=8);
                        let e = if rng.random_bool(0.5) { 1 } else { -1 };
                        let g = if alphabet == Alphabet::Yprime && rng.random_bool(0.5) { Monomial::psi(cd, k, s, e) } else { Monomial::y(n, k, s, e) };
                        x = x.mul(&g);
                    }
                    let (a, b) = match alphabet {
                        Alphabet::Y => (chari_mono(cd, &lhs, &x), chari_mono(cd, &rhs, &x)),
                        Alphabet::Yprime => (tprime_mono(cd, &lhs, &x), tprime_mono(cd, &rhs, &x)),
                    };
                    if a != b {
                        witness = Some(format!("{}: {} vs {}", mono_text(cd, &x), mono_text(cd, &a), mono_text(cd, &b)));
                        break;
                    }
                }
                reports.push(CaseReport {
                    id: format!("{} T{} i={} j={} on {SAMPLES} sampled products (seed {})", cd.label(), if alphabet == Alphabet::Y { "" } else { "'" }, i, j, cfg.seed),
                    status: if witness.is_none() { "pass" } else { "fail" }.into(),
                    max_height: 0,
                    witness,
                });
            }
        }
    }
    Ok(verdicts(format!("braid relations, {}\n", cd.label()), reports, false))
}

fn shifted_char(cd: &CartanData, cfg: &RunConfig) -> Result<Outcome> {
    let (w, i) = orbit_point(cd, cfg)?;
    let qc = QqContext::new(cd, cfg.height);
    let rep = shifted_qchar_report(&qc, &w, i, cfg.shift)?;
    let ok = rep.series.varpi().first_difference(&rep.plain)?.is_none();
    let coweight: Vec<String> = rep.coweight.iter().map(|c| c.to_string()).collect();
    let mut text = format!(
        "highest l-weight Psi_{{{},q^{}}} = {}\ncoweight [{}]\nchi = {}\n",
        rep.weight,
        cfg.shift,
        mono_text(cd, &rep.psi),
        coweight.join(","),
        rep.chi.fmt_with(cd)
    );
    let _ = writeln!(text, "q-character [Psi] E_e(Q) chi:\n{}", rep.series.fmt_with(Some(cd)));
    let _ = writeln!(text, "varpi of the q-character {} chi to height {}", if ok { "equals" } else { "DIFFERS from" }, cfg.height);
    let case = json!({
        "node": i,
        "word": w.letters,
        "weight": rep.weight.0.to_vec(),
        "coweight": coweight,
        "psi": mono_text(cd, &rep.psi),
        "chi": rep.chi.fmt_with(cd),
        "series": series_json(cd, &rep.series),
        "plain": series_json(cd, &rep.plain),
        "status": if ok { "pass" } else { "fail" },
    });
    Ok(Outcome { text, cases: vec![case], ok })
}
