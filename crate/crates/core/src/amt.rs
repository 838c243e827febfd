//! The certification pipeline: dual distance, weight windows, the
//! interpolation condition μ(S_r∖K) < δ*_L − r, dual-side validation of L,
//! and the one-class (Hamming) path.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{dual_code, weight_data, weight_distribution, BlockCode, WeightData};
use crate::design::{is_t_design, max_design_t, supports_by_class, DesignCheck};
use crate::error::{Error, Result};
use crate::extension::{Composition, Word};
use crate::interpolation::{mu_rank, PointSet};
use crate::scheme::AssociationScheme;

/// Requested outcome: the largest t, or a specific t to validate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    #[default]
    Max,
    T(u32),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmtInput {
    /// Base vertex; the zero word when absent.
    pub base: Option<Word>,
    /// Classes already known to be t-designs.
    pub k_exclude: BTreeSet<Composition>,
    /// Dual classes to be validated as weakly t-balanced arrays.
    pub l_exclude: BTreeSet<Composition>,
    pub target: Target,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualLevel {
    /// Nonzero dual weights in the window.
    pub window: Vec<u32>,
    /// δ − r.
    pub bound: i64,
    pub satisfied: bool,
}

/// Condition check at one r.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub r: u32,
    /// S_r.
    pub window: Vec<Composition>,
    /// S_r∖K.
    pub reduced: Vec<Composition>,
    /// μ(S_r∖K), −1 for the empty set.
    pub mu: i64,
    /// δ*_L − r; absent when δ*_L is infinite.
    pub bound: Option<i64>,
    /// δ*_L − r − μ; the condition holds iff it is positive.
    pub margin: Option<i64>,
    /// One-class path only: the dual condition at this r.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<DualLevel>,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LValidation {
    pub t: u32,
    pub classes: Vec<(Composition, bool)>,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub alpha: Composition,
    pub block_size: u32,
    pub blocks: u64,
    pub in_k: bool,
    /// Largest t for which the supports form a t-design (exhaustive check).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_design_t: Option<usize>,
    /// λ at the certified t, when the class was verified at that level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSummary {
    pub n: usize,
    pub size: String,
    pub scheme: String,
    pub classes: usize,
    pub additive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificationPath {
    General,
    Hamming { dual_condition: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmtReport {
    pub code: CodeSummary,
    pub input: AmtInput,
    pub path: CertificationPath,
    pub delta_star: u32,
    /// δ*_L; absent when every nonzero dual class lies in L.
    pub delta_star_l: Option<u32>,
    /// Minimum nonzero weight of the code (one-class path).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<u32>,
    pub weight_distribution: BTreeMap<Composition, u64>,
    pub dual_support: Vec<Composition>,
    pub levels: Vec<LevelReport>,
    /// Largest t from the K-only condition (δ* unmodified).
    pub t_without_l: u32,
    pub certified_t: u32,
    pub target_met: bool,
    pub l_validation: Vec<LValidation>,
    pub k_suggestions: Vec<KSuggestion>,
    pub classes: Vec<ClassSummary>,
}

/// S_r = {α : r ≤ |α| ≤ n − r, wd[α] > 0} for 1 ≤ r ≤ ⌊n/2⌋, empty beyond.
pub fn window_sets(wd: &BTreeMap<Composition, u64>, n: usize) -> BTreeMap<u32, Vec<Composition>> {
    (1..=n as u32)
        .map(|r| {
            let set = if 2 * r as usize <= n {
                wd.iter()
                    .filter(|(a, &c)| {
                        c > 0 && a.weight() >= r && a.weight() as usize <= n - r as usize
                    })
                    .map(|(a, _)| a.clone())
                    .collect()
            } else {
                Vec::new()
            };
            (r, set)
        })
        .collect()
}

/// min{|α| : α ≠ 0 in the dual support}.
pub fn delta_star(dual_support: &BTreeSet<Composition>) -> Result<u32> {
    dual_support
        .iter()
        .filter(|a| !a.is_zero())
        .map(Composition::weight)
        .min()
        .ok_or_else(|| {
            Error::InvalidCode("dual support is {0}; the code is the whole space".into())
        })
}

fn delta_star_excluding(
    dual_support: &BTreeSet<Composition>,
    l: &BTreeSet<Composition>,
) -> Option<u32> {
    dual_support
        .iter()
        .filter(|a| !a.is_zero() && !l.contains(*a))
        .map(Composition::weight)
        .min()
}

fn to_points(set: &[Composition]) -> Result<PointSet> {
    let dim = set.first().map(|a| a.classes()).unwrap_or(0);
    PointSet::new(
        dim,
        set.iter()
            .map(|a| {
                a.0.iter()
                    .map(|&x| BigRational::from_integer(x.into()))
                    .collect()
            })
            .collect(),
    )
}

fn summary(code: &BlockCode) -> CodeSummary {
    CodeSummary {
        n: code.len(),
        size: code.size().to_string(),
        scheme: code.scheme().label().to_string(),
        classes: code.scheme().classes(),
        additive: code.is_additive(),
    }
}

/// Levels r = 1..n of the general condition against a given δ*_L.
fn general_levels(
    windows: &BTreeMap<u32, Vec<Composition>>,
    k: &BTreeSet<Composition>,
    delta: Option<u32>,
) -> Result<Vec<LevelReport>> {
    let mut cache: HashMap<Vec<Composition>, i64> = HashMap::new();
    let mut out = Vec::with_capacity(windows.len());
    for (&r, window) in windows {
        let reduced: Vec<Composition> =
            window.iter().filter(|a| !k.contains(*a)).cloned().collect();
        let mu = match cache.get(&reduced) {
            Some(&m) => m,
            None => {
                let m = if reduced.is_empty() {
                    -1
                } else {
                    mu_rank(&to_points(&reduced)?)
                };
                cache.insert(reduced.clone(), m);
                m
            }
        };
        let bound = delta.map(|d| d as i64 - r as i64);
        let margin = bound.map(|b| b - mu);
        out.push(LevelReport {
            r,
            window: window.clone(),
            reduced,
            mu,
            bound,
            margin,
            dual: None,
            satisfied: margin.is_none_or(|m| m > 0),
        });
    }
    Ok(out)
}

fn prefix_t(levels: &[LevelReport]) -> u32 {
    levels.iter().take_while(|l| l.satisfied).count() as u32
}

/// Weakly t-balanced check: for every Λ with |Λ| ≤ t, the number of words
/// whose restriction to Λ has composition γ (relative to symbol 0) depends
/// only on |Λ| and γ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceCheck {
    pub balanced: bool,
    /// Reference counts per |Λ|, from Λ = {1, …, |Λ|}.
    pub counts: BTreeMap<u32, BTreeMap<Composition, u64>>,
    /// First Λ (1-indexed) whose counts differ from the reference.
    pub witness: Option<Vec<usize>>,
}

pub fn weakly_balanced_check(
    words: &[Word],
    t: usize,
    scheme: &AssociationScheme,
) -> Result<BalanceCheck> {
    let n = words.first().map(|w| w.len()).unwrap_or(0);
    if t > n && !words.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "t = {t} exceeds length {n}"
        )));
    }
    if let Some(w) = words.iter().find(|w| w.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            got: w.len(),
        });
    }
    let s = scheme.classes();
    let class_of: Vec<usize> = (0..scheme.size()).map(|x| scheme.relation(0, x)).collect();
    let profile = |lambda: &[usize]| -> BTreeMap<Composition, u64> {
        let mut m = BTreeMap::new();
        for w in words {
            let mut g = vec![0u32; s];
            for &l in lambda {
                let c = class_of[w[l] as usize];
                if c > 0 {
                    g[c - 1] += 1;
                }
            }
            *m.entry(Composition(g)).or_insert(0) += 1;
        }
        m
    };
    let mut counts = BTreeMap::new();
    for size in 0..=t {
        let reference: Vec<usize> = (0..size).collect();
        let expected = profile(&reference);
        let mut subsets = Vec::new();
        subsets_of(n, size, &mut Vec::new(), 0, &mut subsets);
        let bad = subsets
            .par_iter()
            .find_first(|lam| profile(lam) != expected);
        if let Some(lam) = bad {
            return Ok(BalanceCheck {
                balanced: false,
                counts,
                witness: Some(lam.iter().map(|x| x + 1).collect()),
            });
        }
        counts.insert(size as u32, expected);
    }
    Ok(BalanceCheck {
        balanced: true,
        counts,
        witness: None,
    })
}

fn subsets_of(
    n: usize,
    size: usize,
    cur: &mut Vec<usize>,
    start: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if cur.len() == size {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        if n - i < size - cur.len() {
            break;
        }
        cur.push(i);
        subsets_of(n, size, cur, i + 1, out);
        cur.pop();
    }
}

/// Words of C^⊥ grouped by composition under the dual scheme.
fn dual_classes(
    code: &BlockCode,
    wanted: &BTreeSet<Composition>,
) -> Result<BTreeMap<Composition, Vec<Word>>> {
    let dual = dual_code(code)?;
    let scheme = dual.scheme().clone();
    let zero = vec![0u8; code.len()];
    let groups = dual.fold_words(
        BTreeMap::<Composition, Vec<Word>>::new,
        |acc, w| {
            let a = crate::extension::composition_of(&zero, w, &scheme).expect("valid dual word");
            if wanted.contains(&a) {
                acc.entry(a).or_default().push(w.to_vec());
            }
        },
        |mut a, b| {
            for (k, mut v) in b {
                a.entry(k).or_default().append(&mut v);
            }
            a
        },
    )?;
    Ok(groups)
}

/// Why a class was proposed for K.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KReason {
    /// α ≠ −α are the only classes of Hamming weight |α| and carry identical
    /// support multisets, so each is half of the fused weight class and is a
    /// t-design whenever that class is.
    NegationPair { partner: Composition },
    /// Every |α|-subset occurs equally often: a t-design for all t ≤ |α|.
    CompleteDesign,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KSuggestion {
    pub alpha: Composition,
    pub reason: KReason,
}

fn negate(alpha: &Composition, scheme: &AssociationScheme) -> Composition {
    let mut out = vec![0u32; alpha.classes()];
    for (j, &c) in alpha.0.iter().enumerate() {
        out[scheme.transpose_class(j + 1) - 1] += c;
    }
    Composition(out)
}

/// Candidate K classes. The user decides whether to adopt them; negation
/// pairs rely on the fused Hamming class being a design (check it with the
/// one-class path). Classes with |α| ∈ {0, n} are skipped.
pub fn suggest_k(code: &BlockCode, base: Option<&[u8]>) -> Result<Vec<KSuggestion>> {
    let classes = supports_by_class(code, base)?;
    let n = code.len();
    let mut out = Vec::new();
    for (alpha, blocks) in &classes {
        let k = alpha.weight() as usize;
        if k == 0 || k == n {
            continue;
        }
        let partner = negate(alpha, code.scheme());
        let same_weight: Vec<&Composition> = classes
            .keys()
            .filter(|a| a.weight() == alpha.weight())
            .collect();
        let pair = partner != *alpha
            && same_weight.len() == 2
            && same_weight.contains(&&partner)
            && classes.get(&partner) == Some(blocks);
        if pair {
            out.push(KSuggestion {
                alpha: alpha.clone(),
                reason: KReason::NegationPair { partner },
            });
        } else if is_t_design(blocks, k)?.is_design() {
            out.push(KSuggestion {
                alpha: alpha.clone(),
                reason: KReason::CompleteDesign,
            });
        }
    }
    Ok(out)
}

/// Certifies the largest t (or checks the target) from the general condition
/// with the K and L refinements.
pub fn certify(code: &BlockCode, input: &AmtInput) -> Result<AmtReport> {
    let s = code.scheme().classes();
    for a in input.k_exclude.iter().chain(&input.l_exclude) {
        if a.classes() != s || a.weight() as usize > code.len() {
            return Err(Error::InvalidParameter(format!(
                "{a} is not a composition for this code"
            )));
        }
    }
    if !input.l_exclude.is_empty() && !code.is_additive() {
        return Err(Error::NotAdditive);
    }
    let data = weight_data(code, input.base.as_deref())?;
    certify_with_data(code, input, &data)
}

/// As [`certify`], reusing precomputed weight data.
pub fn certify_with_data(
    code: &BlockCode,
    input: &AmtInput,
    data: &WeightData,
) -> Result<AmtReport> {
    let n = code.len();
    let d = delta_star(&data.dual_support)?;
    let windows = window_sets(&data.wd, n);
    let base_levels = general_levels(&windows, &input.k_exclude, Some(d))?;
    let t_k = prefix_t(&base_levels);
    let mut levels = base_levels;
    let mut certified = t_k;
    let mut l_validation = Vec::new();
    let d_l = if input.l_exclude.is_empty() {
        Some(d)
    } else {
        delta_star_excluding(&data.dual_support, &input.l_exclude)
    };
    if !input.l_exclude.is_empty() {
        let l_levels = general_levels(&windows, &input.k_exclude, d_l)?;
        let t_l = prefix_t(&l_levels);
        if t_l > t_k {
            let groups = dual_classes(code, &input.l_exclude)?;
            let dual = crate::scheme::dual_scheme(code.scheme())?;
            for t in (t_k + 1..=t_l).rev() {
                let mut classes = Vec::new();
                for alpha in &input.l_exclude {
                    // an empty class is trivially balanced
                    let ok = match groups.get(alpha) {
                        Some(words) => weakly_balanced_check(words, t as usize, &dual)?.balanced,
                        None => true,
                    };
                    classes.push((alpha.clone(), ok));
                }
                let accepted = classes.iter().all(|(_, ok)| *ok);
                l_validation.push(LValidation {
                    t,
                    classes,
                    accepted,
                });
                if accepted {
                    certified = t;
                    levels = l_levels;
                    break;
                }
            }
        }
    }
    let target_met = match input.target {
        Target::Max => true,
        Target::T(t) => certified >= t,
    };
    Ok(AmtReport {
        code: summary(code),
        input: input.clone(),
        path: CertificationPath::General,
        delta_star: d,
        delta_star_l: if certified > t_k { d_l } else { Some(d) },
        delta: None,
        weight_distribution: data.wd.clone(),
        dual_support: data.dual_support.iter().cloned().collect(),
        levels,
        t_without_l: t_k,
        certified_t: certified,
        target_met,
        l_validation,
        k_suggestions: Vec::new(),
        classes: class_summaries(&data.wd, &input.k_exclude),
    })
}

fn class_summaries(
    wd: &BTreeMap<Composition, u64>,
    k: &BTreeSet<Composition>,
) -> Vec<ClassSummary> {
    wd.iter()
        .filter(|(a, &c)| c > 0 && !a.is_zero())
        .map(|(a, &c)| ClassSummary {
            alpha: a.clone(),
            block_size: a.weight(),
            blocks: c,
            in_k: k.contains(a),
            max_design_t: None,
            lambda: None,
        })
        .collect()
}

/// One-class path: at each r, the number of code weights in the window is
/// at most δ* − r, or (with `dual_condition`) the number of dual weights in
/// the window is at most δ − r. Weights listed in K are dropped from the
/// primal count.
pub fn hamming_certify(
    code: &BlockCode,
    k: &BTreeSet<Composition>,
    dual_condition: bool,
) -> Result<AmtReport> {
    let scheme = code.scheme();
    if scheme.classes() != 1 {
        return Err(Error::InvalidParameter(format!(
            "the one-class path needs a 1-class scheme, got {} classes",
            scheme.classes()
        )));
    }
    let n = code.len();
    let data = weight_data(code, None)?;
    let d_star = delta_star(&data.dual_support)?;
    let delta = data
        .wd
        .iter()
        .filter(|(a, &c)| c > 0 && !a.is_zero())
        .map(|(a, _)| a.weight())
        .min()
        .ok_or_else(|| Error::InvalidCode("code has no nonzero weights".into()))?;
    let windows = window_sets(&data.wd, n);
    let mut levels = Vec::with_capacity(n);
    for (&r, window) in &windows {
        let reduced: Vec<Composition> =
            window.iter().filter(|a| !k.contains(*a)).cloned().collect();
        let bound = d_star as i64 - r as i64;
        let primal_ok = (reduced.len() as i64) <= bound;
        let dual = if dual_condition {
            let dual_window: Vec<u32> = if 2 * r as usize <= n {
                data.dual_support
                    .iter()
                    .map(Composition::weight)
                    .filter(|&w| w != 0 && w >= r && w as usize <= n - r as usize)
                    .collect()
            } else {
                Vec::new()
            };
            let dual_bound = delta as i64 - r as i64;
            Some(DualLevel {
                satisfied: (dual_window.len() as i64) <= dual_bound,
                window: dual_window,
                bound: dual_bound,
            })
        } else {
            None
        };
        let mu = reduced.len() as i64 - 1;
        levels.push(LevelReport {
            r,
            window: window.clone(),
            mu,
            bound: Some(bound),
            margin: Some(bound - mu),
            satisfied: primal_ok || dual.as_ref().is_some_and(|d| d.satisfied),
            dual,
            reduced,
        });
    }
    let t = prefix_t(&levels);
    let input = AmtInput {
        k_exclude: k.clone(),
        ..AmtInput::default()
    };
    Ok(AmtReport {
        code: summary(code),
        input,
        path: CertificationPath::Hamming { dual_condition },
        delta_star: d_star,
        delta_star_l: Some(d_star),
        delta: Some(delta),
        weight_distribution: data.wd.clone(),
        dual_support: data.dual_support.iter().cloned().collect(),
        levels,
        t_without_l: t,
        certified_t: t,
        target_met: true,
        l_validation: Vec::new(),
        k_suggestions: Vec::new(),
        classes: class_summaries(&data.wd, k),
    })
}

/// Runs the exhaustive design check on every class of the report and fills
/// in max_design_t and λ at the certified t.
pub fn attach_design_checks(report: &mut AmtReport, code: &BlockCode) -> Result<()> {
    let classes = supports_by_class(code, report.input.base.as_deref())?;
    let t = report.certified_t as usize;
    for summary in &mut report.classes {
        let Some(blocks) = classes.get(&summary.alpha) else {
            continue;
        };
        summary.max_design_t = Some(max_design_t(blocks)?);
        if t <= blocks.k() {
            if let DesignCheck::Design(cert) = is_t_design(blocks, t)? {
                summary.lambda = Some(cert.lambda());
            }
        }
    }
    Ok(())
}

/// Fills in K suggestions.
pub fn attach_k_suggestions(report: &mut AmtReport, code: &BlockCode) -> Result<()> {
    report.k_suggestions = suggest_k(code, report.input.base.as_deref())?;
    Ok(())
}

/// Hamming weight distribution of a code through its one-class view.
pub fn hamming_weights(code: &BlockCode) -> Result<BTreeMap<u32, u64>> {
    let wd = weight_distribution(code, None)?;
    let mut out = BTreeMap::new();
    for (a, c) in wd.counts {
        *out.entry(a.weight()).or_insert(0) += c;
    }
    Ok(out)
}
