//! Computations behind each subcommand, collected into plain documents.

use cdf_compact::approach::{theorem22_check, ExtValue};
use cdf_compact::cdf::SupportBound;
use cdf_compact::distances::{delta_distance, levy, phi, uniform_distance, Basis};
use cdf_compact::family::FamilySpec;
use cdf_compact::indices::{
    choose_window, default_alpha_grid, escape_index, helly_on_window, is_tight, limit_operator, prokhorov_bracket,
    CdfInstance,
};
use cdf_compact::rational::ratio;
use cdf_compact::sample::random_discrete;
use cdf_compact::{Cdf, Rational, Result};
use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Config {
    pub eps: Rational,
    pub grid_depth: usize,
    pub gammas: Vec<Rational>,
    pub alphas: Vec<Rational>,
    pub window: Option<Rational>,
    pub seed: u64,
    /// Members taken from each tail in the pairwise tables.
    pub members: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            eps: ratio(1, 100),
            grid_depth: 64,
            gammas: vec![ratio(1, 1)],
            alphas: vec![ratio(1, 2)],
            window: None,
            seed: 0,
            members: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(title: &str, header: &[&str]) -> Self {
        Table {
            title: title.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: vec![],
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contract {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    pub label: String,
    /// `(grid depth, value)`.
    pub points: Vec<(usize, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plot {
    pub title: String,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub title: String,
    pub notes: Vec<String>,
    pub tables: Vec<Table>,
    pub contracts: Vec<Contract>,
    pub plot: Option<Plot>,
}

impl Document {
    pub fn passed(&self) -> bool {
        self.contracts.iter().all(|c| c.passed)
    }

    fn contract(&mut self, name: &str, passed: bool, detail: String) {
        self.contracts.push(Contract {
            name: name.into(),
            passed,
            detail,
        });
    }

    fn absorb(&mut self, other: Document) {
        self.notes.extend(other.notes);
        self.tables.extend(other.tables);
        self.contracts.extend(other.contracts);
        if self.plot.is_none() {
            self.plot = other.plot;
        }
    }
}

fn s(x: &Rational) -> String {
    x.to_string()
}

fn yes(b: bool) -> String {
    if b { "true" } else { "false" }.into()
}

/// Explicit members followed by the first few members of each tail.
fn labelled_members(family: &FamilySpec, per_tail: usize) -> Vec<(String, Cdf)> {
    let mut out: Vec<(String, Cdf)> = family
        .explicit
        .iter()
        .enumerate()
        .map(|(i, f)| (format!("explicit[{i}]"), f.clone()))
        .collect();
    for (i, t) in family.tails.iter().enumerate() {
        for n in 1..=per_tail.min(t.horizon()) {
            out.push((format!("tail[{i}][{n}]"), t.member(n)));
        }
    }
    out
}

fn component_names(family: &FamilySpec) -> Vec<String> {
    (0..family.explicit.len())
        .map(|i| format!("explicit[{i}]"))
        .chain(
            family
                .tails
                .iter()
                .enumerate()
                .map(|(i, t)| format!("tail[{i}] {}", t.template().name())),
        )
        .collect()
}

pub fn metrics(family: &FamilySpec, cfg: &Config) -> Result<Document> {
    let members = labelled_members(family, cfg.members);
    let mut header = vec!["F".to_string(), "G".to_string(), "D_u".to_string()];
    header.extend(cfg.gammas.iter().map(|g| format!("L_{g}")));
    header.extend(cfg.alphas.iter().map(|a| format!("phi_{a}")));
    let mut table = Table {
        title: "Pairwise distances".into(),
        header,
        rows: vec![],
    };
    let mut symmetric = true;
    for (i, (fl, f)) in members.iter().enumerate() {
        for (j, (gl, g)) in members.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut row = vec![fl.clone(), gl.clone(), s(&uniform_distance(f, g))];
            for gm in &cfg.gammas {
                let v = levy(gm, f, g);
                symmetric &= i > j || v == levy(gm, g, f);
                row.push(s(&v));
            }
            row.extend(cfg.alphas.iter().map(|a| s(&phi(f, a, g))));
            table.push(row);
        }
    }
    let mut doc = Document {
        title: "Metrics".into(),
        ..Default::default()
    };
    doc.notes.push(format!("{} members compared", members.len()));
    doc.tables.push(table);
    doc.contract(
        "levy symmetry",
        symmetric,
        "L_gamma(F, G) = L_gamma(G, F) on every pair".into(),
    );
    Ok(doc)
}

fn depths(max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(1usize), |d| Some(d * 2))
        .take_while(|&d| d < max)
        .collect();
    out.push(max.max(1));
    out
}

pub fn indices(family: &FamilySpec, cfg: &Config) -> Result<Document> {
    let chi = escape_index(family)?;
    let tight = is_tight(family)?;
    let m = match &cfg.window {
        Some(m) => m.clone(),
        None => choose_window(family, &cfg.eps)?,
    };
    let window = SupportBound::symmetric(m.clone())?;
    let grid = default_alpha_grid(cfg.grid_depth);

    let mut doc = Document {
        title: "Indices".into(),
        ..Default::default()
    };
    let mut summary = Table::new("Escape index", &["chi_e", "tight", "settled window M", "attained by"]);
    summary.push(vec![s(&chi.value), yes(tight), s(&chi.window), chi.attained_by.clone()]);
    doc.tables.push(summary);

    let mut table = Table::new(
        "Limit operator against the Helly limit",
        &[
            "component",
            "escape value",
            "window escape",
            "lambda lower",
            "lambda upper",
        ],
    );
    let mut plot = Plot {
        title: format!("Limit operator bracket versus grid depth (window M = {m})"),
        series: vec![],
    };
    let mut within = true;
    for (name, seq) in component_names(family).into_iter().zip(family.sequences()) {
        let h = helly_on_window(&seq, &window, &cfg.eps)?;
        let lambda = limit_operator(&seq, &h.limit, &grid)?;
        within &= lambda.upper <= h.lambda_bound;
        table.push(vec![
            name.clone(),
            s(&seq.escape_value()),
            s(&h.lambda_bound),
            s(&lambda.lower),
            s(&lambda.upper),
        ]);
        let mut lower = Series {
            label: format!("{name} lower"),
            points: vec![],
        };
        let mut upper = Series {
            label: format!("{name} upper"),
            points: vec![],
        };
        for d in depths(cfg.grid_depth) {
            let b = limit_operator(&seq, &h.limit, &default_alpha_grid(d))?;
            lower.points.push((d, b.lower));
            upper.points.push((d, b.upper));
        }
        plot.series.push(lower);
        plot.series.push(upper);
    }
    doc.tables.push(table);
    doc.plot = Some(plot);
    doc.notes.push(format!(
        "Helly window [-{m}, {m}], alpha grid 1/n for n <= {}",
        cfg.grid_depth
    ));
    doc.contract(
        "tightness",
        tight == chi.value.is_zero(),
        format!("chi_e = {}", chi.value),
    );
    doc.contract(
        "limit within window escape",
        within,
        "lambda upper <= window escape for every component".into(),
    );
    Ok(doc)
}

pub fn prokhorov_check(family: &FamilySpec, cfg: &Config) -> Result<Document> {
    let b = prokhorov_bracket(family, &cfg.eps)?;
    let ok = b.lower <= b.upper && b.upper <= &b.lower + &cfg.eps;
    let mut doc = Document {
        title: "Compactness bracket".into(),
        ..Default::default()
    };
    let mut t = Table::new("Bracket", &["lower", "upper", "eps", "window M", "status"]);
    t.push(vec![
        s(&b.lower),
        s(&b.upper),
        s(&cfg.eps),
        s(&b.window.high),
        if ok { "PASS" } else { "FAIL" }.into(),
    ]);
    doc.tables.push(t);
    let mut h = Table::new(
        "Helly selections",
        &["component", "lambda bound", "selector prefix", "limit"],
    );
    for (name, r) in component_names(family).into_iter().zip(&b.helly) {
        let prefix: Vec<String> = r.selector.iter().take(8).map(|n| n.to_string()).collect();
        h.push(vec![name, s(&r.lambda_bound), prefix.join(" "), r.limit.to_string()]);
    }
    doc.tables.push(h);
    doc.notes
        .push(format!("lower bound attained by {}", b.escape.attained_by));
    doc.contract(
        "bracket",
        ok,
        format!("{} <= {} <= {} + {}", b.lower, b.upper, b.lower, cfg.eps),
    );
    Ok(doc)
}

fn ext(v: &ExtValue) -> String {
    v.to_string()
}

pub fn theorem22(family: &FamilySpec, cfg: &Config) -> Result<Document> {
    let inst = CdfInstance {
        family,
        eps: cfg.eps.clone(),
        sample_per_tail: 8,
    };
    let report = theorem22_check(&inst)?;
    let b = &report.brackets;
    let mut doc = Document {
        title: "Index chain".into(),
        ..Default::default()
    };
    let mut t = Table::new("Index brackets", &["index", "lower", "upper"]);
    for (name, br) in [("chi_rsc", &b.rsc), ("chi_rc", &b.rc), ("chi_L", &b.lindelof)] {
        t.push(vec![name.into(), ext(&br.lower), ext(&br.upper)]);
    }
    doc.tables.push(t);
    doc.notes.extend(b.witnesses.iter().cloned());
    doc.contract(
        "chi_rsc <= chi_rc",
        report.lower_chain,
        format!("{} <= {}", b.rsc.lower, b.rc.upper),
    );
    doc.contract(
        "chi_rc <= chi_rsc + chi_L",
        report.upper_chain,
        format!("{} <= {} + {}", b.rc.lower, b.rsc.upper, b.lindelof.upper),
    );
    let level_ok = b.lindelof.upper <= ExtValue::Finite(cfg.eps.clone());
    doc.contract("cover level", level_ok, format!("{} <= {}", b.lindelof.upper, cfg.eps));
    Ok(doc)
}

/// Phi and Lévy bases on seeded random atomic pairs.
fn basis_sample(cfg: &Config) -> Result<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tol = ratio(1, 1_000_000);
    let mut t = Table::new(
        "Seeded basis comparison",
        &["pair", "phi lower", "levy lower", "phi upper", "levy upper"],
    );
    let mut agree = true;
    for i in 0..8 {
        let f = random_discrete(&mut rng, 4);
        let k = rng.gen_range(1..=4);
        let fam: Vec<Cdf> = (0..k).map(|_| random_discrete(&mut rng, 4)).collect();
        let p = delta_distance(&f, &fam, Basis::Phi, cfg.grid_depth)?;
        let l = delta_distance(&f, &fam, Basis::Levy, cfg.grid_depth)?;
        let gap = |a: &Rational, b: &Rational| if a > b { a - b } else { b - a };
        agree &= gap(&p.lower, &l.lower) <= tol && gap(&p.upper, &l.upper) <= tol;
        t.push(vec![i.to_string(), s(&p.lower), s(&l.lower), s(&p.upper), s(&l.upper)]);
    }
    let mut doc = Document::default();
    doc.notes.push(format!("random sample seed {}", cfg.seed));
    doc.tables.push(t);
    doc.contract(
        "basis agreement",
        agree,
        "phi and Levy brackets agree within 1/1000000".into(),
    );
    Ok(doc)
}

pub fn report(family: &FamilySpec, cfg: &Config) -> Result<Document> {
    let mut doc = Document {
        title: "Family report".into(),
        ..Default::default()
    };
    doc.absorb(indices(family, cfg)?);
    doc.absorb(prokhorov_check(family, cfg)?);
    doc.absorb(theorem22(family, cfg)?);
    doc.absorb(metrics(family, cfg)?);
    doc.absorb(basis_sample(cfg)?);
    Ok(doc)
}
