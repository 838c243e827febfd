//! Combinatorics of the length-n extension of a scheme: compositions,
//! supports, and the Hamming fusion.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::AssociationScheme;

/// A word of length n; each symbol is an alphabet index (group element index
/// for translation schemes).
pub type Word = Vec<u8>;

/// α = (α₁, …, α_s); α₀ = n − |α| is implicit.
///
/// Serialised as the string "(α₁,…,α_s)" so it can key JSON maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Composition(pub Vec<u32>);

impl Serialize for Composition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Composition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Composition {
    pub fn zero(s: usize) -> Self {
        Composition(vec![0; s])
    }

    pub fn classes(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn alpha0(&self, n: usize) -> u32 {
        n as u32 - self.weight()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

/// Graded lexicographic: by |α|, then larger leading entries first.
impl Ord for Composition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Composition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl std::str::FromStr for Composition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        if body.trim().is_empty() {
            return Ok(Composition(Vec::new()));
        }
        body.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad composition {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Composition)
    }
}

pub fn composition_of(x: &[u8], y: &[u8], scheme: &AssociationScheme) -> Result<Composition> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let size = scheme.size();
    let mut alpha = vec![0u32; scheme.classes()];
    for (&a, &b) in x.iter().zip(y) {
        if a as usize >= size || b as usize >= size {
            return Err(Error::InvalidParameter(format!(
                "symbol out of range for |X| = {size}"
            )));
        }
        let c = scheme.relation(a as usize, b as usize);
        if c > 0 {
            alpha[c - 1] += 1;
        }
    }
    Ok(Composition(alpha))
}

/// All α ∈ ℕ^s with |α| ≤ n in graded lexicographic order; C(n+s, s) items.
pub fn enumerate_compositions(n: usize, s: usize) -> Vec<Composition> {
    let mut out = Vec::new();
    for w in 0..=n as u32 {
        let mut cur = vec![0u32; s];
        fill_weight(&mut cur, 0, w, &mut out);
    }
    out
}

fn fill_weight(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Composition>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(Composition(cur.clone()));
        return;
    }
    if cur.is_empty() {
        if remaining == 0 {
            out.push(Composition(Vec::new()));
        }
        return;
    }
    for v in (0..=remaining).rev() {
        cur[pos] = v;
        fill_weight(cur, pos + 1, remaining - v, out);
    }
    cur[pos] = 0;
}

/// |α|, the class index in the Hamming fusion H(n, |X|).
pub fn hamming_weight(alpha: &Composition) -> u32 {
    alpha.weight()
}

/// 1-indexed coordinates where `x` differs from `base`.
pub fn support(x: &[u8], base: &[u8]) -> Result<Vec<usize>> {
    if x.len() != base.len() {
        return Err(Error::LengthMismatch {
            expected: base.len(),
            got: x.len(),
        });
    }
    Ok(x.iter()
        .zip(base)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| i + 1)
        .collect())
}

/// Support as a bit mask (bit ℓ−1 for coordinate ℓ).
pub fn support_mask(x: &[u8], base: &[u8]) -> u64 {
    x.iter()
        .zip(base)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .fold(0u64, |m, (i, _)| m | (1 << i))
}

/// Packs compositions of a fixed (n, s) into dense indices for fast
/// accumulation; falls back to a hash map when (n+1)^s is large.
#[derive(Clone, Debug)]
pub struct CompositionIndexer {
    n: usize,
    s: usize,
    dense: bool,
    /// stride[c] for class c (stride[0] = 0).
    strides: Vec<usize>,
}

const DENSE_LIMIT: usize = 1 << 22;

impl CompositionIndexer {
    pub fn new(n: usize, s: usize) -> Self {
        let mut strides = vec![0usize];
        let mut acc: usize = 1;
        let mut dense = true;
        for _ in 0..s {
            strides.push(acc);
            match acc.checked_mul(n + 1) {
                Some(v) if v <= DENSE_LIMIT => acc = v,
                _ => {
                    dense = false;
                    acc = acc.saturating_mul(n + 1);
                }
            }
        }
        CompositionIndexer {
            n,
            s,
            dense,
            strides,
        }
    }

    pub fn is_dense(&self) -> bool {
        self.dense
    }

    /// Size of the dense table.
    pub fn capacity(&self) -> usize {
        (self.n + 1).pow(self.s as u32)
    }

    /// Contribution of one coordinate in class `c` to the packed index.
    pub fn stride(&self, c: usize) -> usize {
        self.strides[c]
    }

    pub fn pack(&self, alpha: &Composition) -> usize {
        alpha
            .0
            .iter()
            .enumerate()
            .map(|(i, &a)| a as usize * self.strides[i + 1])
            .sum()
    }

    pub fn unpack(&self, mut idx: usize) -> Composition {
        let mut alpha = vec![0u32; self.s];
        for a in alpha.iter_mut() {
            *a = (idx % (self.n + 1)) as u32;
            idx /= self.n + 1;
        }
        Composition(alpha)
    }
}

/// Sparse counter keyed by composition, used when the dense table is too big.
pub type CompositionCounts = HashMap<Composition, u64>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::FiniteAbelianGroup;
    use crate::scheme::{build_cycle_scheme, build_group_scheme};
    use proptest::prelude::*;

    #[test]
    fn composition_examples() {
        let z3 = build_group_scheme(&FiniteAbelianGroup::cyclic(3).unwrap()).unwrap();
        let x = [0u8, 1, 2, 1];
        let y = [0u8, 2, 2, 0];
        assert_eq!(
            composition_of(&x, &x, &z3).unwrap(),
            Composition(vec![0, 0])
        );
        assert_eq!(
            composition_of(&x, &y, &z3).unwrap(),
            Composition(vec![1, 1])
        );
        let c4 = build_cycle_scheme(4).unwrap();
        assert_eq!(
            composition_of(&[0, 0, 0], &[1, 2, 3], &c4).unwrap(),
            Composition(vec![2, 1])
        );
        assert!(composition_of(&[0, 0], &[0], &c4).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let c = enumerate_compositions(2, 1);
        assert_eq!(
            c,
            vec![
                Composition(vec![0]),
                Composition(vec![1]),
                Composition(vec![2])
            ]
        );
        assert_eq!(enumerate_compositions(2, 2).len(), 6);
        assert_eq!(enumerate_compositions(12, 2).len(), 91);
        let all = enumerate_compositions(5, 3);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn weights_and_supports() {
        assert_eq!(hamming_weight(&Composition(vec![0, 0])), 0);
        assert_eq!(hamming_weight(&Composition(vec![3, 3])), 6);
        assert_eq!(hamming_weight(&Composition(vec![6, 3])), 9);
        assert_eq!(support(&[0, 1, 0, 2], &[0, 0, 0, 0]).unwrap(), vec![2, 4]);
        assert!(support(&[1, 2], &[1, 2]).unwrap().is_empty());
        assert_eq!(support_mask(&[0, 1, 0, 2], &[0, 0, 0, 0]), 0b1010);
    }

    #[test]
    fn composition_parse_display() {
        let a: Composition = "(6,3)".parse().unwrap();
        assert_eq!(a, Composition(vec![6, 3]));
        assert_eq!(a.to_string(), "(6,3)");
        assert_eq!("2,2,2".parse::<Composition>().unwrap().weight(), 6);
    }

    #[test]
    fn indexer_round_trip() {
        let ix = CompositionIndexer::new(12, 3);
        assert!(ix.is_dense());
        for a in enumerate_compositions(12, 3) {
            assert_eq!(ix.unpack(ix.pack(&a)), a);
        }
        assert!(!CompositionIndexer::new(24, 7).is_dense());
    }

    proptest! {
        #[test]
        fn composition_symmetries(k in 3u32..8, x in prop::collection::vec(0u8..8, 6), y in prop::collection::vec(0u8..8, 6)) {
            let g = FiniteAbelianGroup::cyclic(k).unwrap();
            let s = build_group_scheme(&g).unwrap();
            let x: Vec<u8> = x.iter().map(|&v| v % k as u8).collect();
            let y: Vec<u8> = y.iter().map(|&v| v % k as u8).collect();
            let a = composition_of(&x, &y, &s).unwrap();
            let b = composition_of(&y, &x, &s).unwrap();
            // transpose permutation
            let mut permuted = vec![0u32; s.classes()];
            for (i, &v) in a.0.iter().enumerate() {
                permuted[s.transpose_class(i + 1) - 1] += v;
            }
            prop_assert_eq!(Composition(permuted), b.clone());
            // translation invariance
            let diff: Vec<u8> = x.iter().zip(&y).map(|(&p, &q)| g.add_indices(q as usize, g.neg_index(p as usize)) as u8).collect();
            prop_assert_eq!(composition_of(&[0; 6], &diff, &s).unwrap(), a.clone());
            prop_assert_eq!(support(&y, &x).unwrap().len() as u32, hamming_weight(&a));
        }
    }
}
