//! Text rendering and JSON views.

use std::collections::BTreeMap;
use std::fmt::Write;

use amscheme_core::amt::{AmtReport, CertificationPath, KReason};
use amscheme_core::codes::BlockCode;
use amscheme_core::design::{BlockMultiset, DesignCheck};
use amscheme_core::extension::{Composition, Word};
use amscheme_core::interpolation::{GridCertificate, LeastSpace};
use amscheme_core::linalg::fmt_rational;
use amscheme_core::scheme::{matrix_to_decimals, matrix_to_strings, AssociationScheme};
use serde::Serialize;

#[derive(Serialize)]
pub struct SchemeView {
    label: String,
    size: usize,
    classes: usize,
    valencies: Vec<u64>,
    p: Vec<Vec<String>>,
    p_decimal: Vec<Vec<String>>,
    q: Vec<Vec<String>>,
    q_decimal: Vec<Vec<String>>,
    /// p[i][j][k] = p_ij^k.
    intersection_numbers: Vec<Vec<Vec<u64>>>,
    /// q[i][j][k] = q_ij^k.
    krein_parameters: Vec<Vec<Vec<String>>>,
}

impl SchemeView {
    pub fn new(s: &AssociationScheme) -> Self {
        SchemeView {
            label: s.label().to_string(),
            size: s.size(),
            classes: s.classes(),
            valencies: (0..=s.classes()).map(|i| s.valency(i)).collect(),
            p: matrix_to_strings(s.p_matrix()),
            p_decimal: matrix_to_decimals(s.p_matrix()),
            q: matrix_to_strings(s.q_matrix()),
            q_decimal: matrix_to_decimals(s.q_matrix()),
            intersection_numbers: s.intersection_numbers(),
            krein_parameters: s
                .krein_parameters()
                .iter()
                .map(|m| matrix_to_strings(m))
                .collect(),
        }
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scheme: {}", self.label);
        let _ = writeln!(out, "|X| = {}, s = {}", self.size, self.classes);
        let _ = writeln!(out, "valencies: {:?}", self.valencies);
        for (name, exact, dec) in [
            ("P", &self.p, &self.p_decimal),
            ("Q", &self.q, &self.q_decimal),
        ] {
            let _ = writeln!(out, "{name}:");
            for (row, drow) in exact.iter().zip(dec) {
                let cells: Vec<String> = row
                    .iter()
                    .zip(drow)
                    .map(|(e, d)| format!("{e} [{d}]"))
                    .collect();
                let _ = writeln!(out, "  {}", cells.join(" | "));
            }
        }
        let _ = writeln!(out, "intersection numbers p_ij^k:");
        for (i, m) in self.intersection_numbers.iter().enumerate() {
            for (j, row) in m.iter().enumerate() {
                let _ = writeln!(out, "  p_{i}{j}^* = {row:?}");
            }
        }
        let _ = writeln!(out, "Krein parameters q_ij^k:");
        for (i, m) in self.krein_parameters.iter().enumerate() {
            for (j, row) in m.iter().enumerate() {
                let _ = writeln!(out, "  q_{i}{j}^* = [{}]", row.join(", "));
            }
        }
        out
    }
}

fn join(v: &[Composition]) -> String {
    if v.is_empty() {
        return "{}".into();
    }
    let items: Vec<String> = v.iter().map(|a| a.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

pub fn report_text(r: &AmtReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "code: n = {}, |C| = {}, scheme {} ({} classes){}",
        r.code.n,
        r.code.size,
        r.code.scheme,
        r.code.classes,
        if r.code.additive { ", additive" } else { "" }
    );
    let _ = writeln!(out, "weight distribution:");
    for (a, c) in &r.weight_distribution {
        let _ = writeln!(out, "  {:>12}  {c}", a.to_string());
    }
    let _ = writeln!(out, "dual support: {}", join(&r.dual_support));
    let _ = writeln!(out, "delta* = {}", r.delta_star);
    if let Some(d) = r.delta {
        let _ = writeln!(out, "delta = {d}");
    }
    if !r.input.k_exclude.is_empty() {
        let k: Vec<Composition> = r.input.k_exclude.iter().cloned().collect();
        let _ = writeln!(out, "K = {}", join(&k));
    }
    if !r.input.l_exclude.is_empty() {
        let l: Vec<Composition> = r.input.l_exclude.iter().cloned().collect();
        let dl = r.delta_star_l.map_or("inf".to_string(), |d| d.to_string());
        let _ = writeln!(out, "L = {}, delta*_L = {dl}", join(&l));
    }
    let path = match r.path {
        CertificationPath::General => "general",
        CertificationPath::Hamming {
            dual_condition: false,
        } => "one-class",
        CertificationPath::Hamming {
            dual_condition: true,
        } => "one-class with dual condition",
    };
    let _ = writeln!(out, "levels ({path} condition):");
    for l in &r.levels {
        if l.window.is_empty() && l.r as usize * 2 > r.code.n {
            continue;
        }
        let bound = l.bound.map_or("inf".to_string(), |b| b.to_string());
        let margin = l.margin.map_or("inf".to_string(), |m| m.to_string());
        let _ = writeln!(
            out,
            "  r = {:>2}: mu = {:>2}, bound = {:>3}, margin = {:>3}  {}  S_r\\K = {}",
            l.r,
            l.mu,
            bound,
            margin,
            if l.satisfied { "ok  " } else { "FAIL" },
            join(&l.reduced)
        );
        if let Some(d) = &l.dual {
            let _ = writeln!(
                out,
                "          dual weights {:?} vs delta - r = {}",
                d.window, d.bound
            );
        }
    }
    for v in &r.l_validation {
        let parts: Vec<String> = v
            .classes
            .iter()
            .map(|(a, ok)| format!("{a}: {}", if *ok { "balanced" } else { "not balanced" }))
            .collect();
        let _ = writeln!(
            out,
            "L validation at t = {}: {} -> {}",
            v.t,
            parts.join(", "),
            if v.accepted { "accepted" } else { "rejected" }
        );
    }
    if !r.k_suggestions.is_empty() {
        let _ = writeln!(out, "K candidates:");
        for s in &r.k_suggestions {
            let why = match &s.reason {
                KReason::NegationPair { partner } => format!("negation pair with {partner}"),
                KReason::CompleteDesign => "complete design".to_string(),
            };
            let _ = writeln!(out, "  {}: {why}", s.alpha);
        }
    }
    if r.classes.iter().any(|c| c.max_design_t.is_some()) {
        let _ = writeln!(out, "exhaustive design check:");
        for c in &r.classes {
            if let Some(t) = c.max_design_t {
                let lambda = c.lambda.map_or(String::new(), |l| {
                    format!(", lambda_{} = {l}", r.certified_t)
                });
                let _ = writeln!(
                    out,
                    "  {:>12}  k = {:>2}, blocks = {}, max t = {t}{lambda}",
                    c.alpha.to_string(),
                    c.block_size,
                    c.blocks
                );
            }
        }
    }
    let _ = writeln!(out, "certified t = {}", r.certified_t);
    if !r.target_met {
        let _ = writeln!(out, "target not met");
    }
    out
}

#[derive(Serialize)]
pub struct MuView {
    dim: usize,
    points: Vec<Vec<String>>,
    mu: i64,
    basis: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<GridCertificate>,
}

impl MuView {
    pub fn new(space: &LeastSpace, certificate: Option<GridCertificate>) -> Self {
        MuView {
            dim: space.points().dim(),
            points: space
                .points()
                .points()
                .iter()
                .map(|p| p.iter().map(fmt_rational).collect())
                .collect(),
            mu: space.mu(),
            basis: space.basis().iter().map(|p| p.to_string()).collect(),
            certificate,
        }
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} points in dimension {}",
            self.points.len(),
            self.dim
        );
        let _ = writeln!(out, "mu = {}", self.mu);
        let _ = writeln!(out, "least space basis:");
        for b in &self.basis {
            let _ = writeln!(out, "  {b}");
        }
        if let Some(c) = &self.certificate {
            let _ = writeln!(
                out,
                "grid certificate: mu <= {} (largest grid index {})",
                c.bound, c.attained
            );
            if let Some(basis) = &c.basis {
                for (idx, f) in c.grid_indices.iter().zip(basis) {
                    let _ = writeln!(out, "  f_{idx:?} = {f}");
                }
            }
        }
        out
    }
}

pub fn design_text(label: &str, blocks: &BlockMultiset, check: &DesignCheck) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "class {label}: {} blocks of size {} on {} points ({} distinct)",
        blocks.block_count(),
        blocks.k(),
        blocks.n(),
        blocks.distinct_blocks()
    );
    match check {
        DesignCheck::Design(c) => {
            let _ = writeln!(
                out,
                "{}-design, lambda = {:?}{}",
                c.t,
                c.lambdas,
                if c.simple { ", simple" } else { "" }
            );
        }
        DesignCheck::NotDesign(w) => {
            let _ = writeln!(
                out,
                "not a {}-design: {:?} lies in {} blocks, {:?} in {}",
                w.t, w.first.0, w.first.1, w.second.0, w.second.1
            );
        }
    }
    out
}

pub fn enumerate_text(
    code: &BlockCode,
    wd: &BTreeMap<Composition, u64>,
    words: Option<&[Word]>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "|C| = {}, n = {}", code.size(), code.len());
    for (a, c) in wd {
        let _ = writeln!(out, "  {:>12}  {c}", a.to_string());
    }
    if let Some(ws) = words {
        for w in ws {
            let s: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", s.join(" "));
        }
    }
    out
}
