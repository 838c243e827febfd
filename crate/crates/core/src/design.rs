//! Brute-force t-design verification of support multisets.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::BlockCode;
use crate::error::{Error, Result};
use crate::extension::{Composition, CompositionIndexer};

/// Multiset of k-subsets of {1..n}, stored as sorted (mask, multiplicity)
/// pairs with bit ℓ−1 standing for point ℓ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMultiset {
    n: usize,
    k: usize,
    blocks: Vec<(u64, u64)>,
}

impl BlockMultiset {
    /// Collects masks (with repetition) into a multiset; every mask must have
    /// exactly k bits within the first n.
    pub fn from_masks(n: usize, k: usize, masks: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut v: Vec<u64> = masks.into_iter().collect();
        v.sort_unstable();
        Self::from_sorted(n, k, &v)
    }

    fn from_sorted(n: usize, k: usize, sorted: &[u64]) -> Result<Self> {
        if n > 64 || k > n {
            return Err(Error::InvalidParameter(format!(
                "bad design parameters n = {n}, k = {k}"
            )));
        }
        let mut blocks: Vec<(u64, u64)> = Vec::new();
        for &m in sorted {
            if m.count_ones() as usize != k || (n < 64 && m >> n != 0) {
                return Err(Error::InvalidParameter(format!(
                    "block {m:#b} is not a {k}-subset of {n} points"
                )));
            }
            match blocks.last_mut() {
                Some((last, c)) if *last == m => *c += 1,
                _ => blocks.push((m, 1)),
            }
        }
        Ok(BlockMultiset { n, k, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[(u64, u64)] {
        &self.blocks
    }

    pub fn block_count(&self) -> u64 {
        self.blocks.iter().map(|(_, c)| c).sum()
    }

    pub fn distinct_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_simple(&self) -> bool {
        self.blocks.iter().all(|&(_, c)| c == 1)
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Multiset union; both sides must share n and k.
    pub fn union(&self, other: &BlockMultiset) -> Result<BlockMultiset> {
        if self.n != other.n || self.k != other.k {
            return Err(Error::InvalidParameter(
                "union of multisets with different n or k".into(),
            ));
        }
        let mut merged: BTreeMap<u64, u64> = self.blocks.iter().copied().collect();
        for &(m, c) in &other.blocks {
            *merged.entry(m).or_insert(0) += c;
        }
        Ok(BlockMultiset {
            n: self.n,
            k: self.k,
            blocks: merged.into_iter().collect(),
        })
    }
}

/// λ values of a verified t-design, λ_0 (the block count) through λ_t.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignCertificate {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub lambdas: Vec<u64>,
    pub simple: bool,
}

impl DesignCertificate {
    pub fn lambda(&self) -> u64 {
        self.lambdas[self.t]
    }
}

/// Two t-subsets (1-indexed points) lying in different numbers of blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignWitness {
    pub t: usize,
    pub first: (Vec<usize>, u64),
    pub second: (Vec<usize>, u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum DesignCheck {
    Design(DesignCertificate),
    NotDesign(DesignWitness),
}

impl DesignCheck {
    pub fn is_design(&self) -> bool {
        matches!(self, DesignCheck::Design(_))
    }
}

struct Binomials(Vec<Vec<u64>>);

impl Binomials {
    fn new(n: usize) -> Self {
        let mut c = vec![vec![0u64; n + 2]; n + 2];
        for i in 0..=n + 1 {
            c[i][0] = 1;
            for j in 1..=i {
                c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
            }
        }
        Binomials(c)
    }

    fn get(&self, n: usize, k: usize) -> u64 {
        if k > n {
            0
        } else {
            self.0[n][k]
        }
    }
}

fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Colex unranking of a t-subset of {0..n−1}.
fn unrank(mut rank: u64, t: usize, n: usize, b: &Binomials) -> Vec<usize> {
    let mut out = Vec::with_capacity(t);
    let mut hi = n;
    for i in (1..=t).rev() {
        let mut c = i - 1;
        while c + 1 < hi && b.get(c + 1, i) <= rank {
            c += 1;
        }
        rank -= b.get(c, i);
        out.push(c);
        hi = c;
    }
    out.reverse();
    out
}

/// Number of blocks (with multiplicity) containing each t-subset, indexed by
/// colex rank.
fn sparse_counts(blocks: &BlockMultiset, t: usize, b: &Binomials) -> Vec<u64> {
    let size = b.get(blocks.n, t) as usize;
    blocks
        .blocks
        .par_chunks(1024)
        .map(|chunk| {
            let mut counts = vec![0u64; size];
            for &(mask, mult) in chunk {
                let pos = bits(mask);
                add_subsets(&pos, t, mult, b, &mut counts);
            }
            counts
        })
        .reduce(
            || vec![0u64; size],
            |mut a, c| {
                a.iter_mut().zip(c).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Adds `mult` at the colex rank of every t-subset of `pos`; the i-th chosen
/// element (1-based, increasing) contributes C(element, i).
fn add_subsets(pos: &[usize], t: usize, mult: u64, b: &Binomials, counts: &mut [u64]) {
    fn rec(
        pos: &[usize],
        t: usize,
        chosen: usize,
        start: usize,
        rank: u64,
        mult: u64,
        b: &Binomials,
        counts: &mut [u64],
    ) {
        if chosen == t {
            counts[rank as usize] += mult;
            return;
        }
        for j in start..=pos.len() - (t - chosen) {
            rec(
                pos,
                t,
                chosen + 1,
                j + 1,
                rank + b.get(pos[j], chosen + 1),
                mult,
                b,
                counts,
            );
        }
    }
    rec(pos, t, 0, 0, 0, mult, b, counts);
}

/// Dense superset sums over all 2ⁿ masks: g[T] = Σ_{B ⊇ T} mult(B).
fn superset_sums(blocks: &BlockMultiset) -> Vec<u64> {
    let n = blocks.n;
    let mut g = vec![0u64; 1usize << n];
    for &(m, c) in &blocks.blocks {
        g[m as usize] += c;
    }
    for i in 0..n {
        let bit = 1usize << i;
        // each chunk of 2·bit entries: lower half gains the upper half
        g.par_chunks_mut(bit << 1).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(bit);
            lo.iter_mut().zip(hi.iter()).for_each(|(a, b)| *a += b);
        });
    }
    g
}

/// Largest n for which the dense 2ⁿ table is used.
const DENSE_MAX_N: usize = 26;

fn prefer_dense(blocks: &BlockMultiset, t: usize, b: &Binomials) -> bool {
    if blocks.n > DENSE_MAX_N {
        return false;
    }
    let sparse = blocks.blocks.len() as u128 * b.get(blocks.k, t) as u128;
    let dense = (blocks.n as u128 + 1) << blocks.n;
    sparse > dense
}

fn certificate(
    blocks: &BlockMultiset,
    t: usize,
    lambda_t: u64,
    b: &Binomials,
) -> Result<DesignCertificate> {
    let (n, k) = (blocks.n as u128, blocks.k as u128);
    let mut lambdas = vec![0u64; t + 1];
    lambdas[t] = lambda_t;
    for i in (0..t).rev() {
        let num = lambdas[i + 1] as u128 * (n - i as u128);
        let den = k - i as u128;
        if !num.is_multiple_of(den) {
            return Err(Error::Invariant(format!("lambda_{i} is not integral")));
        }
        lambdas[i] = (num / den) as u64;
    }
    let count = blocks.block_count();
    if lambdas[0] != count
        || lambda_t as u128 * b.get(blocks.n, t) as u128
            != count as u128 * b.get(blocks.k, t) as u128
    {
        return Err(Error::Invariant(
            "lambda chain disagrees with the block count".into(),
        ));
    }
    Ok(DesignCertificate {
        n: blocks.n,
        k: blocks.k,
        t,
        lambdas,
        simple: blocks.is_simple(),
    })
}

fn check_level<I: Iterator<Item = (Vec<usize>, u64)>>(
    blocks: &BlockMultiset,
    t: usize,
    mut counts: I,
    b: &Binomials,
) -> Result<DesignCheck> {
    let Some((first_set, first)) = counts.next() else {
        return Err(Error::InvalidParameter("no t-subsets".into()));
    };
    for (set, c) in counts {
        if c != first {
            let one = |s: Vec<usize>| s.into_iter().map(|x| x + 1).collect();
            return Ok(DesignCheck::NotDesign(DesignWitness {
                t,
                first: (one(first_set), first),
                second: (one(set), c),
            }));
        }
    }
    certificate(blocks, t, first, b).map(DesignCheck::Design)
}

/// Counts, for every t-subset T, the blocks containing T; a design iff all
/// counts agree.
pub fn is_t_design(blocks: &BlockMultiset, t: usize) -> Result<DesignCheck> {
    if t > blocks.k {
        return Err(Error::InvalidParameter(format!(
            "t = {t} exceeds block size {}",
            blocks.k
        )));
    }
    if blocks.is_empty() {
        return Err(Error::InvalidParameter("empty block multiset".into()));
    }
    let b = Binomials::new(blocks.n);
    if prefer_dense(blocks, t, &b) {
        let g = superset_sums(blocks);
        let iter = g
            .iter()
            .enumerate()
            .filter(|(m, _)| m.count_ones() as usize == t)
            .map(|(m, &c)| (bits(m as u64), c));
        return check_level(blocks, t, iter, &b);
    }
    let counts = sparse_counts(blocks, t, &b);
    let n = blocks.n;
    let iter = counts
        .into_iter()
        .enumerate()
        .map(|(r, c)| (unrank(r as u64, t, n, &b), c));
    check_level(blocks, t, iter, &b)
}

/// Reference implementation: every t-subset tested against every block.
pub fn is_t_design_naive(blocks: &BlockMultiset, t: usize) -> Result<bool> {
    if t > blocks.k {
        return Err(Error::InvalidParameter(format!(
            "t = {t} exceeds block size {}",
            blocks.k
        )));
    }
    let n = blocks.n;
    let mut first: Option<u64> = None;
    let mut ok = true;
    for_each_subset(n, t, &mut |subset: u64| {
        let c: u64 = blocks
            .blocks
            .iter()
            .filter(|(m, _)| m & subset == subset)
            .map(|(_, c)| c)
            .sum();
        match first {
            None => first = Some(c),
            Some(f) if f != c => ok = false,
            _ => {}
        }
    });
    Ok(ok)
}

fn for_each_subset(n: usize, t: usize, f: &mut impl FnMut(u64)) {
    fn rec(n: usize, left: usize, start: usize, acc: u64, f: &mut impl FnMut(u64)) {
        if left == 0 {
            f(acc);
            return;
        }
        for i in start..=n - left {
            rec(n, left - 1, i + 1, acc | 1 << i, f);
        }
    }
    if t <= n {
        rec(n, t, 0, 0, f);
    }
}

/// Largest t for which the blocks form a t-design. Levels are checked in
/// ascending order (a t-design is a t′-design for every t′ < t), so the first
/// failure settles it; small-n inputs use one dense pass for all levels.
pub fn max_design_t(blocks: &BlockMultiset) -> Result<usize> {
    if blocks.is_empty() {
        return Err(Error::InvalidParameter("empty block multiset".into()));
    }
    let b = Binomials::new(blocks.n);
    if prefer_dense(blocks, blocks.k.min(blocks.n / 2).max(1).min(blocks.k), &b) {
        let g = superset_sums(blocks);
        let mut level: Vec<Option<u64>> = vec![None; blocks.n + 1];
        let mut constant = vec![true; blocks.n + 1];
        for (m, &c) in g.iter().enumerate() {
            let p = m.count_ones() as usize;
            match level[p] {
                None => level[p] = Some(c),
                Some(v) if v != c => constant[p] = false,
                _ => {}
            }
        }
        let t = (0..=blocks.k)
            .take_while(|&t| constant[t])
            .last()
            .unwrap_or(0);
        return Ok(t);
    }
    let mut t = 0;
    while t < blocks.k && is_t_design(blocks, t + 1)?.is_design() {
        t += 1;
    }
    Ok(t)
}

/// Support multiset of the codewords with composition α relative to `base`.
pub fn supports_of_class(
    code: &BlockCode,
    alpha: &Composition,
    base: Option<&[u8]>,
) -> Result<BlockMultiset> {
    let all = supports_by_class(code, base)?;
    all.get(alpha)
        .cloned()
        .ok_or_else(|| Error::InvalidParameter(format!("composition class {alpha} is empty")))
}

/// Support multisets of every nonempty composition class, from one pass over
/// the code.
pub fn supports_by_class(
    code: &BlockCode,
    base: Option<&[u8]>,
) -> Result<BTreeMap<Composition, BlockMultiset>> {
    let n = code.len();
    let scheme = code.scheme().clone();
    let base: Vec<u8> = base
        .map(|b| b.to_vec())
        .unwrap_or_else(|| code.default_base());
    if base.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: base.len(),
        });
    }
    let s = scheme.classes();
    let ix = CompositionIndexer::new(n, s);
    if !ix.is_dense() {
        return Err(Error::InvalidParameter(
            "too many composition classes to index".into(),
        ));
    }
    let size = scheme.size();
    let mut strides = vec![0usize; n * size];
    for (l, &b) in base.iter().enumerate() {
        for sym in 0..size {
            strides[l * size + sym] = ix.stride(scheme.relation(b as usize, sym));
        }
    }
    let mut pairs: Vec<(u32, u64)> = code.fold_words(
        Vec::new,
        |acc: &mut Vec<(u32, u64)>, w| {
            let mut idx = 0usize;
            let mut mask = 0u64;
            for (l, (&x, &b)) in w.iter().zip(&base).enumerate() {
                idx += strides[l * size + x as usize];
                if x != b {
                    mask |= 1 << l;
                }
            }
            acc.push((idx as u32, mask));
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    )?;
    pairs.par_sort_unstable();
    let mut out = BTreeMap::new();
    let mut start = 0;
    while start < pairs.len() {
        let cls = pairs[start].0;
        let end = start + pairs[start..].partition_point(|p| p.0 == cls);
        let alpha = ix.unpack(cls as usize);
        let masks: Vec<u64> = pairs[start..end].iter().map(|p| p.1).collect();
        out.insert(
            alpha.clone(),
            BlockMultiset::from_sorted(n, alpha.weight() as usize, &masks)?,
        );
        start = end;
    }
    Ok(out)
}

/// Union of the classes with |α| = k: the Hamming-weight-k support design.
pub fn supports_of_weight(
    classes: &BTreeMap<Composition, BlockMultiset>,
    k: u32,
) -> Option<BlockMultiset> {
    classes
        .iter()
        .filter(|(a, _)| a.weight() == k)
        .map(|(_, b)| b.clone())
        .reduce(|a, b| a.union(&b).expect("same n and k"))
}
