//! Codes in Xⁿ: explicit and additive representations, weight and inner
//! distributions, weight enumerators, the MacWilliams transform, and dual
//! codes of additive codes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, Integer, One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};
use crate::extension::{composition_of, Composition, CompositionIndexer, Word};
use crate::scheme::{dual_scheme, AssociationScheme};
use crate::snf;

pub mod descriptor;
pub mod qr;

/// Default enumeration cap, 2²⁵ words. Overridable per code.
pub const DEFAULT_CAP: u128 = 1 << 25;

/// Largest explicit code for which the O(|C|²) inner distribution runs.
pub const PAIRWISE_CAP: usize = 1 << 15;

#[derive(Clone, Debug)]
pub struct AdditiveData {
    pub generators: Vec<Word>,
    /// Independent generators with their additive orders; every codeword is
    /// uniquely Σ cᵢ bᵢ with 0 ≤ cᵢ < orders[i].
    pub basis: Vec<Word>,
    pub orders: Vec<u32>,
}

#[derive(Clone, Debug)]
pub enum CodeRepr {
    Explicit(Vec<Word>),
    Additive(AdditiveData),
}

#[derive(Clone, Debug)]
pub struct BlockCode {
    scheme: Arc<AssociationScheme>,
    n: usize,
    repr: CodeRepr,
    cap: u128,
}

fn check_word(w: &[u8], n: usize, size: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: w.len(),
        });
    }
    if let Some(&s) = w.iter().find(|&&s| s as usize >= size) {
        return Err(Error::InvalidCode(format!(
            "symbol {s} outside alphabet of size {size}"
        )));
    }
    Ok(())
}

fn full_space_size(size: usize, n: usize) -> Option<u128> {
    (size as u128).checked_pow(n as u32)
}

impl BlockCode {
    /// Code given by an explicit word list (duplicates removed).
    pub fn from_words(scheme: Arc<AssociationScheme>, mut words: Vec<Word>) -> Result<Self> {
        let n = words.first().map(|w| w.len()).unwrap_or(0);
        if n == 0 {
            return Err(Error::InvalidCode("empty word list or zero length".into()));
        }
        if n > 64 {
            return Err(Error::InvalidCode(
                "length above 64 is not supported".into(),
            ));
        }
        for w in &words {
            check_word(w, n, scheme.size())?;
        }
        words.sort();
        words.dedup();
        let code = BlockCode {
            scheme,
            n,
            repr: CodeRepr::Explicit(words),
            cap: DEFAULT_CAP,
        };
        code.check_size()?;
        Ok(code)
    }

    /// Subgroup of Xⁿ generated by `generators`; requires a translation scheme.
    pub fn additive(
        scheme: Arc<AssociationScheme>,
        n: usize,
        generators: Vec<Word>,
    ) -> Result<Self> {
        let group = scheme.group().ok_or(Error::NotTranslation)?.clone();
        if n == 0 || n > 64 {
            return Err(Error::InvalidCode(format!("unsupported length {n}")));
        }
        for g in &generators {
            check_word(g, n, scheme.size())?;
        }
        let factors = group.factors().to_vec();
        let m = factors.len();
        let big_n = group.exponent();
        let cols = n * m;
        let rows: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|g| {
                let mut row = Vec::with_capacity(cols);
                for &sym in g {
                    let el = group.element_at(sym as usize);
                    for (r, &k) in el.residues().iter().zip(&factors) {
                        row.push(BigInt::from(*r * (big_n / k)));
                    }
                }
                row
            })
            .collect();
        let mut basis = Vec::new();
        let mut orders = Vec::new();
        if !rows.is_empty() {
            let diag = snf::diagonalize(rows, cols);
            let nn = BigInt::from(big_n);
            for (i, d) in diag.diagonal.iter().enumerate() {
                let g = d.mod_floor(&nn).gcd(&nn);
                let order = (&nn / &g).to_u32().unwrap();
                if order == 1 {
                    continue;
                }
                let embedded: Vec<u32> = diag.v_inv[i]
                    .iter()
                    .map(|x| (d * x).mod_floor(&nn).to_u32().unwrap())
                    .collect();
                basis.push(unembed(&embedded, &factors, big_n, &group)?);
                orders.push(order);
            }
        }
        let code = BlockCode {
            scheme,
            n,
            repr: CodeRepr::Additive(AdditiveData {
                generators,
                basis,
                orders,
            }),
            cap: DEFAULT_CAP,
        };
        code.check_size()?;
        Ok(code)
    }

    fn check_size(&self) -> Result<()> {
        let size = self.size();
        let full = full_space_size(self.scheme.size(), self.n);
        if size <= 1 || Some(size) == full {
            return Err(Error::InvalidCode(format!(
                "a code needs 1 < |C| < |X|^n (got |C| = {size})"
            )));
        }
        Ok(())
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> u128 {
        self.cap
    }

    /// Same word set viewed over another scheme on the same alphabet, e.g.
    /// the 1-class scheme for Hamming weights.
    pub fn with_scheme(&self, scheme: Arc<AssociationScheme>) -> Result<Self> {
        if scheme.size() != self.scheme.size() {
            return Err(Error::InvalidParameter("alphabet sizes differ".into()));
        }
        if let CodeRepr::Additive(_) = self.repr {
            if scheme.group() != self.scheme.group() {
                return Err(Error::InvalidParameter(
                    "additive codes need the same group".into(),
                ));
            }
        }
        Ok(BlockCode {
            scheme,
            n: self.n,
            repr: self.repr.clone(),
            cap: self.cap,
        })
    }

    pub fn scheme(&self) -> &Arc<AssociationScheme> {
        &self.scheme
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn repr(&self) -> &CodeRepr {
        &self.repr
    }

    pub fn is_additive(&self) -> bool {
        matches!(self.repr, CodeRepr::Additive(_))
    }

    pub fn size(&self) -> u128 {
        match &self.repr {
            CodeRepr::Explicit(w) => w.len() as u128,
            CodeRepr::Additive(a) => a.orders.iter().map(|&o| o as u128).product(),
        }
    }

    /// Zero word for translation schemes, index 0 otherwise.
    pub fn default_base(&self) -> Word {
        vec![0; self.n]
    }

    fn check_cap(&self) -> Result<()> {
        let size = self.size();
        if size > self.cap {
            return Err(Error::CapExceeded {
                size,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Streams every codeword through `fold`, in parallel chunks merged with
    /// `merge`. Results are independent of the chunking whenever `merge` is
    /// associative and commutative.
    pub fn fold_words<A, I, F, M>(&self, init: I, fold: F, merge: M) -> Result<A>
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(&mut A, &[u8]) + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        self.check_cap()?;
        match &self.repr {
            CodeRepr::Explicit(words) => Ok(words
                .par_chunks(4096)
                .map(|chunk| {
                    let mut acc = init();
                    for w in chunk {
                        fold(&mut acc, w);
                    }
                    acc
                })
                .reduce(&init, &merge)),
            CodeRepr::Additive(a) => {
                let add = add_table(&self.scheme);
                let size = self.scheme.size();
                let r = a.basis.len();
                // leading digits enumerated in parallel
                let mut p = 0;
                let mut prefixes: usize = 1;
                while p < r && prefixes < 256 {
                    prefixes *= a.orders[p] as usize;
                    p += 1;
                }
                let n = self.n;
                let result = (0..prefixes)
                    .into_par_iter()
                    .map(|mut idx| {
                        let mut acc = init();
                        let mut word = vec![0u8; n];
                        for i in (0..p).rev() {
                            let o = a.orders[i] as usize;
                            let c = idx % o;
                            idx /= o;
                            for _ in 0..c {
                                add_into(&mut word, &a.basis[i], &add, size);
                            }
                        }
                        let mut digits = vec![0u32; r];
                        loop {
                            fold(&mut acc, &word);
                            // odometer over digits p..r
                            let mut j = r;
                            loop {
                                if j == p {
                                    return acc;
                                }
                                j -= 1;
                                add_into(&mut word, &a.basis[j], &add, size);
                                digits[j] += 1;
                                if digits[j] < a.orders[j] {
                                    break;
                                }
                                digits[j] = 0;
                            }
                        }
                    })
                    .reduce(&init, &merge);
                Ok(result)
            }
        }
    }

    /// All codewords, sorted.
    pub fn enumerate(&self) -> Result<Vec<Word>> {
        let mut words = self.fold_words(
            Vec::new,
            |acc: &mut Vec<Word>, w| acc.push(w.to_vec()),
            |mut a, b| {
                a.extend(b);
                a
            },
        )?;
        words.sort();
        words.dedup();
        Ok(words)
    }

    pub fn contains(&self, w: &[u8]) -> Result<bool> {
        Ok(self.enumerate()?.binary_search(&w.to_vec()).is_ok())
    }
}

fn unembed(
    embedded: &[u32],
    factors: &[u32],
    big_n: u32,
    group: &crate::alphabet::FiniteAbelianGroup,
) -> Result<Word> {
    embedded
        .chunks(factors.len())
        .map(|chunk| {
            let residues: Vec<u32> = chunk
                .iter()
                .zip(factors)
                .map(|(&e, &k)| {
                    let step = big_n / k;
                    if e % step != 0 {
                        Err(Error::Invariant(
                            "basis vector left the embedded subgroup".into(),
                        ))
                    } else {
                        Ok(e / step)
                    }
                })
                .collect::<Result<_>>()?;
            Ok(group.index_of_residues(&residues) as u8)
        })
        .collect()
}

fn add_table(scheme: &AssociationScheme) -> Vec<u8> {
    let g = scheme
        .group()
        .expect("additive codes live on translation schemes");
    let size = g.order();
    let mut t = vec![0u8; size * size];
    for a in 0..size {
        for b in 0..size {
            t[a * size + b] = g.add_indices(a, b) as u8;
        }
    }
    t
}

fn add_into(word: &mut [u8], b: &[u8], table: &[u8], size: usize) {
    for (w, &x) in word.iter_mut().zip(b) {
        *w = table[*w as usize * size + x as usize];
    }
}

/// wd[α] = |C ∩ (Xⁿ)_α| relative to a base vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightDistribution {
    pub n: usize,
    pub classes: usize,
    pub base: Word,
    pub counts: BTreeMap<Composition, u64>,
}

impl WeightDistribution {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn get(&self, alpha: &[u32]) -> u64 {
        self.counts
            .get(&Composition(alpha.to_vec()))
            .copied()
            .unwrap_or(0)
    }

    pub fn support(&self) -> BTreeSet<Composition> {
        self.counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(a, _)| a.clone())
            .collect()
    }

    pub fn to_enumerator(&self) -> WeightEnumerator {
        WeightEnumerator {
            n: self.n,
            classes: self.classes,
            terms: self
                .counts
                .iter()
                .map(|(a, &c)| (a.clone(), CyclotomicNumber::from_int(1, c as i64)))
                .collect(),
        }
    }
}

/// Per-coordinate packed-index strides relative to `base`.
fn stride_table(scheme: &AssociationScheme, base: &[u8], ix: &CompositionIndexer) -> Vec<usize> {
    let size = scheme.size();
    let mut t = vec![0usize; base.len() * size];
    for (l, &b) in base.iter().enumerate() {
        for sym in 0..size {
            t[l * size + sym] = ix.stride(scheme.relation(b as usize, sym));
        }
    }
    t
}

pub fn weight_distribution(code: &BlockCode, base: Option<&[u8]>) -> Result<WeightDistribution> {
    let n = code.n;
    let s = code.scheme.classes();
    let base: Word = match base {
        Some(b) => {
            check_word(b, n, code.scheme.size())?;
            b.to_vec()
        }
        None => code.default_base(),
    };
    let ix = CompositionIndexer::new(n, s);
    let counts: BTreeMap<Composition, u64> = if ix.is_dense() {
        let strides = stride_table(&code.scheme, &base, &ix);
        let size = code.scheme.size();
        let cap = ix.capacity();
        let dense = code.fold_words(
            || vec![0u64; cap],
            |acc, w| {
                let idx: usize = w
                    .iter()
                    .enumerate()
                    .map(|(l, &x)| strides[l * size + x as usize])
                    .sum();
                acc[idx] += 1;
            },
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )?;
        dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c > 0)
            .map(|(i, c)| (ix.unpack(i), c))
            .collect()
    } else {
        let scheme = code.scheme.clone();
        let sparse = code.fold_words(
            HashMap::<Composition, u64>::new,
            |acc, w| {
                let a = composition_of(&base, w, &scheme).expect("validated word");
                *acc.entry(a).or_insert(0) += 1;
            },
            |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                a
            },
        )?;
        sparse.into_iter().collect()
    };
    Ok(WeightDistribution {
        n,
        classes: s,
        base,
        counts,
    })
}

/// a_α = |C|⁻¹ |{(x, y) ∈ C² : c(x, y) = α}|.
pub fn inner_distribution(code: &BlockCode) -> Result<BTreeMap<Composition, BigRational>> {
    let size = code.size();
    if code.is_additive() {
        let wd = weight_distribution(code, None)?;
        return Ok(wd
            .counts
            .into_iter()
            .map(|(a, c)| (a, BigRational::from_integer(c.into())))
            .collect());
    }
    let words = match &code.repr {
        CodeRepr::Explicit(w) => w,
        CodeRepr::Additive(_) => unreachable!(),
    };
    if words.len() > PAIRWISE_CAP {
        return Err(Error::CapExceeded {
            size,
            cap: PAIRWISE_CAP as u128,
        });
    }
    let ix = CompositionIndexer::new(code.n, code.scheme.classes());
    let scheme = &code.scheme;
    let pair_counts: HashMap<Composition, u64> = words
        .par_iter()
        .map(|x| {
            let mut local = HashMap::new();
            for y in words {
                let a = composition_of(x, y, scheme).expect("validated words");
                *local.entry(a).or_insert(0u64) += 1;
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let _ = ix;
    let denom = BigInt::from(words.len());
    Ok(pair_counts
        .into_iter()
        .map(|(a, c)| (a, BigRational::new(BigInt::from(c), denom.clone())))
        .collect())
}

/// Homogeneous polynomial of degree n in s+1 variables ξ₀, …, ξ_s; the key α
/// stands for ξ₀^{n−|α|} ξ₁^{α₁} ⋯ ξ_s^{α_s}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightEnumerator {
    pub n: usize,
    pub classes: usize,
    pub terms: BTreeMap<Composition, CyclotomicNumber>,
}

impl WeightEnumerator {
    pub fn from_rationals(
        n: usize,
        classes: usize,
        terms: &BTreeMap<Composition, BigRational>,
    ) -> Self {
        WeightEnumerator {
            n,
            classes,
            terms: terms
                .iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(a, v)| (a.clone(), CyclotomicNumber::from_rational(1, v.clone())))
                .collect(),
        }
    }

    /// Sum of all coefficients, w(1, …, 1).
    pub fn total(&self) -> CyclotomicNumber {
        self.terms
            .values()
            .fold(CyclotomicNumber::zero(1), |acc, c| acc.add(c))
    }

    pub fn coefficient(&self, alpha: &[u32]) -> CyclotomicNumber {
        self.terms
            .get(&Composition(alpha.to_vec()))
            .cloned()
            .unwrap_or_else(|| CyclotomicNumber::zero(1))
    }

    pub fn support(&self) -> BTreeSet<Composition> {
        self.terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, _)| a.clone())
            .collect()
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        WeightEnumerator {
            n: self.n,
            classes: self.classes,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.clone(), c.scale(q)))
                .collect(),
        }
    }

    /// Integer coefficients when every coefficient is a rational integer.
    pub fn integer_terms(&self) -> Option<BTreeMap<Composition, BigInt>> {
        self.terms
            .iter()
            .map(|(a, c)| c.as_integer().map(|v| (a.clone(), v)))
            .collect()
    }
}

impl fmt::Display for WeightEnumerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (alpha, c) in &self.terms {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono = monomial_text(self.n, alpha);
            match c.as_rational() {
                Some(q) if q.is_one() => write!(f, "{mono}")?,
                Some(q) => write!(f, "{}*{mono}", crate::linalg::fmt_rational(&q))?,
                None => write!(f, "({c})*{mono}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn monomial_text(n: usize, alpha: &Composition) -> String {
    let mut parts = Vec::new();
    let a0 = alpha.alpha0(n);
    let exps = std::iter::once(a0).chain(alpha.0.iter().copied());
    for (i, e) in exps.enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("x{i}")),
            _ => parts.push(format!("x{i}^{e}")),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// w_C(ξ) = Σ a_α ξ^α from the inner distribution.
pub fn weight_enumerator(code: &BlockCode) -> Result<WeightEnumerator> {
    let a = inner_distribution(code)?;
    Ok(WeightEnumerator::from_rationals(
        code.n,
        code.scheme.classes(),
        &a,
    ))
}

type Poly = HashMap<Vec<u32>, CyclotomicNumber>;

fn poly_mul(a: &Poly, b: &Poly, level: u32) -> Poly {
    let mut out: Poly = HashMap::with_capacity(a.len() * 2);
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let prod = ca.mul(cb);
            out.entry(e)
                .and_modify(|v| *v = v.add(&prod))
                .or_insert(prod);
        }
    }
    out.retain(|_, v| !v.is_zero());
    let _ = level;
    out
}

/// |C|⁻¹ w(ξQᵀ): every variable ξ_i is replaced by Σ_j Q_{ij} ξ_j, the
/// result expanded exactly and divided by w(1, …, 1). Coefficients must be
/// non-negative reals; anything else is reported as an invariant failure.
pub fn macwilliams_transform(
    w: &WeightEnumerator,
    scheme: &AssociationScheme,
) -> Result<WeightEnumerator> {
    transform_with(w, scheme.q_matrix(), true)
}

fn transform_with(
    w: &WeightEnumerator,
    q: &[Vec<CyclotomicNumber>],
    check_sign: bool,
) -> Result<WeightEnumerator> {
    let d = q.len();
    if w.classes + 1 != d {
        return Err(Error::InvalidParameter(format!(
            "enumerator has {} variables, scheme has {}",
            w.classes + 1,
            d
        )));
    }
    let level = q.iter().flatten().map(|z| z.level()).max().unwrap_or(1);
    let total = w.total().lift(level);
    let total_inv = total
        .inverse()
        .ok_or_else(|| Error::InvalidParameter("enumerator sums to zero".into()))?;
    let n = w.n;
    // powers[i][k] = (Σ_j Q_ij ξ_j)^k, exponents over all d variables.
    let linear: Vec<Poly> = (0..d)
        .map(|i| {
            (0..d)
                .filter(|&j| !q[i][j].is_zero())
                .map(|j| {
                    let mut e = vec![0u32; d];
                    e[j] = 1;
                    (e, q[i][j].lift(level))
                })
                .collect()
        })
        .collect();
    let needed: Vec<u32> = (0..d)
        .map(|i| {
            w.terms
                .keys()
                .map(|a| if i == 0 { a.alpha0(n) } else { a.0[i - 1] })
                .max()
                .unwrap_or(0)
        })
        .collect();
    let powers: Vec<Vec<Poly>> = (0..d)
        .map(|i| {
            let mut v: Vec<Poly> = Vec::with_capacity(needed[i] as usize + 1);
            let mut unit = Poly::new();
            unit.insert(vec![0u32; d], CyclotomicNumber::one(level));
            v.push(unit);
            for k in 1..=needed[i] as usize {
                let next = poly_mul(&v[k - 1], &linear[i], level);
                v.push(next);
            }
            v
        })
        .collect();
    let partials: Vec<Poly> = w
        .terms
        .par_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(alpha, coeff)| {
            let mut acc = powers[0][alpha.alpha0(n) as usize].clone();
            for i in 1..d {
                let k = alpha.0[i - 1] as usize;
                if k > 0 {
                    acc = poly_mul(&acc, &powers[i][k], level);
                }
            }
            let c = coeff.lift(level);
            acc.into_iter().map(|(e, v)| (e, v.mul(&c))).collect()
        })
        .collect();
    let mut sum: Poly = HashMap::new();
    for p in partials {
        for (e, v) in p {
            sum.entry(e).and_modify(|x| *x = x.add(&v)).or_insert(v);
        }
    }
    let mut terms = BTreeMap::new();
    for (e, v) in sum {
        let v = v.mul(&total_inv);
        if v.is_zero() {
            continue;
        }
        if check_sign && !matches!(v.real_sign(), Some(std::cmp::Ordering::Greater)) {
            return Err(Error::Invariant(format!(
                "transform coefficient at {:?} is {v}, not a non-negative real",
                &e[1..]
            )));
        }
        terms.insert(Composition(e[1..].to_vec()), reduce_level(v));
    }
    Ok(WeightEnumerator {
        n,
        classes: w.classes,
        terms,
    })
}

/// Rational values are stored at level 1.
fn reduce_level(v: CyclotomicNumber) -> CyclotomicNumber {
    match v.as_rational() {
        Some(q) => CyclotomicNumber::from_rational(1, q),
        None => v,
    }
}

/// Inverse direction: substitution with P (the second eigenmatrix of the dual
/// scheme). transform_dual(transform(w)) = w.
pub fn macwilliams_transform_dual(
    w: &WeightEnumerator,
    scheme: &AssociationScheme,
) -> Result<WeightEnumerator> {
    transform_with(w, scheme.p_matrix(), true)
}

/// {α : coefficient of ξ^α in the MacWilliams transform of w_C is nonzero}.
pub fn dual_support(code: &BlockCode) -> Result<BTreeSet<Composition>> {
    let w = weight_enumerator(code)?;
    Ok(macwilliams_transform(&w, &code.scheme)?.support())
}

/// Replaces variable ξ_c by ξ_{map[c]} (or by 0 when `None`) and collects
/// terms. map[0] must be Some(0).
pub fn specialize_enumerator(
    w: &WeightEnumerator,
    map: &[Option<usize>],
) -> Result<WeightEnumerator> {
    if map.len() != w.classes + 1 || map[0] != Some(0) {
        return Err(Error::InvalidParameter(
            "class 0 must map to variable 0".into(),
        ));
    }
    let target = map.iter().flatten().copied().max().unwrap_or(0);
    if map.iter().skip(1).flatten().any(|&v| v == 0) {
        return Err(Error::InvalidParameter(
            "only class 0 may map to variable 0".into(),
        ));
    }
    let mut terms: BTreeMap<Composition, CyclotomicNumber> = BTreeMap::new();
    'outer: for (alpha, c) in &w.terms {
        let mut out = vec![0u32; target];
        for (i, &a) in alpha.0.iter().enumerate() {
            match map[i + 1] {
                Some(v) => out[v - 1] += a,
                None if a > 0 => continue 'outer,
                None => {}
            }
        }
        let key = Composition(out);
        let entry = terms
            .entry(key)
            .or_insert_with(|| CyclotomicNumber::zero(1));
        *entry = entry.add(c);
    }
    terms.retain(|_, v| !v.is_zero());
    Ok(WeightEnumerator {
        n: w.n,
        classes: target,
        terms: terms
            .into_iter()
            .map(|(a, v)| (a, reduce_level(v)))
            .collect(),
    })
}

/// Identifies variables along a partition of the classes 0..=s; part 0 must
/// be exactly {0}.
pub fn fuse_enumerator(w: &WeightEnumerator, fusion: &[Vec<usize>]) -> Result<WeightEnumerator> {
    let d = w.classes + 1;
    if fusion.first().map(|p| p.as_slice()) != Some(&[0]) {
        return Err(Error::InvalidParameter(
            "fusion must keep class 0 alone".into(),
        ));
    }
    let mut map = vec![None; d];
    for (part, classes) in fusion.iter().enumerate() {
        if classes.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "fusion part {part} is empty"
            )));
        }
        for &c in classes {
            if c >= d || map[c].is_some() {
                return Err(Error::InvalidParameter(format!(
                    "class {c} is out of range or repeated"
                )));
            }
            map[c] = Some(part);
        }
    }
    if map.iter().any(Option::is_none) {
        return Err(Error::InvalidParameter(
            "fusion does not cover every class".into(),
        ));
    }
    specialize_enumerator(w, &map)
}

/// C^⊥ under the fixed pairing, as an additive code over the dual scheme.
/// Verified by pairing every generator pair and by |C|·|C^⊥| = |X|ⁿ.
pub fn dual_code(code: &BlockCode) -> Result<BlockCode> {
    let add = match &code.repr {
        CodeRepr::Additive(a) => a,
        CodeRepr::Explicit(_) => return Err(Error::NotAdditive),
    };
    let group = code.scheme.group().ok_or(Error::NotTranslation)?.clone();
    let factors = group.factors().to_vec();
    let big_n = group.exponent();
    let m = factors.len();
    let cols = code.n * m;
    let rows: Vec<Vec<BigInt>> = add
        .basis
        .iter()
        .map(|g| {
            let mut row = Vec::with_capacity(cols);
            for &sym in g {
                let el = group.element_at(sym as usize);
                for (r, &k) in el.residues().iter().zip(&factors) {
                    row.push(BigInt::from(*r * (big_n / k)));
                }
            }
            row
        })
        .collect();
    let nn = BigInt::from(big_n);
    let mut gens: Vec<Word> = Vec::new();
    let to_word = |col: Vec<BigInt>| -> Word {
        col.chunks(m)
            .map(|chunk| {
                let residues: Vec<u32> = chunk
                    .iter()
                    .zip(&factors)
                    .map(|(x, &k)| x.mod_floor(&BigInt::from(k)).to_u32().unwrap())
                    .collect();
                group.index_of_residues(&residues) as u8
            })
            .collect()
    };
    if rows.is_empty() {
        return Err(Error::InvalidCode("code has no generators".into()));
    }
    let diag = snf::diagonalize(rows, cols);
    let rank = diag.diagonal.len();
    for i in 0..cols {
        let scale = if i < rank {
            &nn / diag.diagonal[i].mod_floor(&nn).gcd(&nn)
        } else {
            BigInt::one()
        };
        let col: Vec<BigInt> = (0..cols).map(|r| &diag.v[r][i] * &scale).collect();
        let w = to_word(col);
        if w.iter().any(|&x| x != 0) {
            gens.push(w);
        }
    }
    let dual = dual_scheme(&code.scheme)?;
    for g in &add.basis {
        for h in &gens {
            let e: u64 = g
                .iter()
                .zip(h)
                .map(|(&a, &b)| group.pairing_exponent(a as usize, b as usize) as u64)
                .sum();
            if !e.is_multiple_of(big_n as u64) {
                return Err(Error::Invariant(
                    "dual generator pairs nontrivially with the code".into(),
                ));
            }
        }
    }
    let out = BlockCode::additive(Arc::new(dual), code.n, gens)?.with_cap(code.cap);
    let full = full_space_size(code.scheme.size(), code.n);
    if full != code.size().checked_mul(out.size()) {
        return Err(Error::Invariant(format!(
            "|C|·|C^⊥| = {}·{} != |X|^n",
            code.size(),
            out.size()
        )));
    }
    Ok(out)
}

/// Everything the certification pipeline reads from a code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightData {
    pub base: Word,
    pub wd: BTreeMap<Composition, u64>,
    #[serde(with = "rational_map")]
    pub inner: BTreeMap<Composition, BigRational>,
    pub dual_support: BTreeSet<Composition>,
}

pub fn weight_data(code: &BlockCode, base: Option<&[u8]>) -> Result<WeightData> {
    let wd = weight_distribution(code, base)?;
    let inner = inner_distribution(code)?;
    let w = WeightEnumerator::from_rationals(code.n, code.scheme.classes(), &inner);
    let dual_support = macwilliams_transform(&w, &code.scheme)?.support();
    let data = WeightData {
        base: wd.base.clone(),
        wd: wd.counts,
        inner,
        dual_support,
    };
    let size = BigRational::from_integer(BigInt::from(code.size()));
    let total: BigRational = data.inner.values().sum();
    if total != size
        || data.inner.get(&Composition::zero(code.scheme.classes())) != Some(&BigRational::one())
    {
        return Err(Error::Invariant(
            "inner distribution does not sum to |C| with a_0 = 1".into(),
        ));
    }
    if data.wd.values().sum::<u64>() as u128 != code.size() {
        return Err(Error::Invariant(
            "weight distribution does not sum to |C|".into(),
        ));
    }
    Ok(data)
}

mod rational_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<Composition, BigRational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<(Composition, String)> = m
            .iter()
            .map(|(a, q)| (a.clone(), crate::linalg::fmt_rational(q)))
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<Composition, BigRational>, D::Error> {
        let v: Vec<(Composition, String)> = Vec::deserialize(d)?;
        v.into_iter()
            .map(|(a, s)| {
                crate::linalg::parse_rational(&s)
                    .map(|q| (a, q))
                    .ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests;
