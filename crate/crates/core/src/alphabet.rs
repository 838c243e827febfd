//! Finite abelian groups used as alphabets, and their characters.
//!
//! A group is ℤ_{k₁} × … × ℤ_{k_m}. Elements are enumerated in mixed radix
//! with the first factor most significant, so ℤ₂×ℤ₂ lists
//! (0,0), (0,1), (1,0), (1,1) as indices 0..4.
//!
//! Characters are indexed by group elements through the symmetric pairing
//! ε_x(y) = ∏ᵢ ζ_{kᵢ}^{xᵢyᵢ}.

use num::integer::Integer;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct FiniteAbelianGroup {
    factors: Vec<u32>,
}

impl TryFrom<Vec<u32>> for FiniteAbelianGroup {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        FiniteAbelianGroup::new(v)
    }
}

impl From<FiniteAbelianGroup> for Vec<u32> {
    fn from(g: FiniteAbelianGroup) -> Self {
        g.factors
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    factors: Vec<u32>,
    residues: Vec<u32>,
}

/// The element x indexing the character ε_x.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharacterIndex(pub GroupElement);

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u32>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("no cyclic factors".into()));
        }
        if let Some(k) = factors.iter().find(|&&k| k < 2) {
            return Err(Error::InvalidGroup(format!("cyclic factor of order {k}")));
        }
        let order = factors
            .iter()
            .try_fold(1u64, |acc, &k| acc.checked_mul(k as u64));
        match order {
            Some(o) if o <= 256 => Ok(FiniteAbelianGroup { factors }),
            _ => Err(Error::InvalidGroup(
                "group order above 256 is not supported".into(),
            )),
        }
    }

    pub fn cyclic(k: u32) -> Result<Self> {
        Self::new(vec![k])
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.iter().map(|&k| k as usize).product()
    }

    /// lcm of the factor orders; character values live in Q(ζ_exponent).
    pub fn exponent(&self) -> u32 {
        self.factors.iter().fold(1, |acc, &k| acc.lcm(&k))
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            factors: self.factors.clone(),
            residues: vec![0; self.factors.len()],
        }
    }

    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        if residues.len() != self.factors.len() {
            return Err(Error::LengthMismatch {
                expected: self.factors.len(),
                got: residues.len(),
            });
        }
        Ok(GroupElement {
            factors: self.factors.clone(),
            residues: residues
                .iter()
                .zip(&self.factors)
                .map(|(&r, &k)| r.rem_euclid(k as i64) as u32)
                .collect(),
        })
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut residues = vec![0u32; self.factors.len()];
        for (slot, &k) in residues.iter_mut().zip(&self.factors).rev() {
            *slot = (index % k as usize) as u32;
            index /= k as usize;
        }
        GroupElement {
            factors: self.factors.clone(),
            residues,
        }
    }

    pub fn index_of(&self, g: &GroupElement) -> Result<usize> {
        self.check(g)?;
        Ok(self.index_of_residues(&g.residues))
    }

    pub(crate) fn index_of_residues(&self, residues: &[u32]) -> usize {
        residues
            .iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&r, &k)| acc * k as usize + r as usize)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(move |i| self.element_at(i))
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if g.factors != self.factors {
            return Err(Error::GroupMismatch(
                self.factors.clone(),
                g.factors.clone(),
            ));
        }
        Ok(())
    }

    /// Sum of two element indices.
    pub fn add_indices(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.element_at(a), self.element_at(b));
        let r: Vec<u32> = x
            .residues
            .iter()
            .zip(&y.residues)
            .zip(&self.factors)
            .map(|((&p, &q), &k)| (p + q) % k)
            .collect();
        self.index_of_residues(&r)
    }

    pub fn neg_index(&self, a: usize) -> usize {
        let x = self.element_at(a);
        let r: Vec<u32> = x
            .residues
            .iter()
            .zip(&self.factors)
            .map(|(&p, &k)| (k - p) % k)
            .collect();
        self.index_of_residues(&r)
    }

    /// Exponent e with ε_a(b) = ζ_N^e, N = self.exponent().
    pub fn pairing_exponent(&self, a: usize, b: usize) -> u32 {
        let n = self.exponent();
        let (x, y) = (self.element_at(a), self.element_at(b));
        x.residues
            .iter()
            .zip(&y.residues)
            .zip(&self.factors)
            .fold(0u64, |acc, ((&p, &q), &k)| {
                (acc + (n / k) as u64 * p as u64 * q as u64) % n as u64
            }) as u32
    }
}

impl GroupElement {
    pub fn residues(&self) -> &[u32] {
        &self.residues
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }
}

/// Component-wise sum modulo the factor orders.
pub fn group_add(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    if g.factors != h.factors {
        return Err(Error::GroupMismatch(g.factors.clone(), h.factors.clone()));
    }
    Ok(GroupElement {
        factors: g.factors.clone(),
        residues: g
            .residues
            .iter()
            .zip(&h.residues)
            .zip(&g.factors)
            .map(|((&a, &b), &k)| (a + b) % k)
            .collect(),
    })
}

fn pairing(e: &GroupElement, g: &GroupElement) -> Result<(u32, u32)> {
    if e.factors != g.factors {
        return Err(Error::GroupMismatch(e.factors.clone(), g.factors.clone()));
    }
    let n = e.factors.iter().fold(1u32, |acc, &k| acc.lcm(&k));
    let exp = e
        .residues
        .iter()
        .zip(&g.residues)
        .zip(&e.factors)
        .fold(0u64, |acc, ((&a, &b), &k)| {
            (acc + (n / k) as u64 * a as u64 * b as u64) % n as u64
        });
    Ok((n, exp as u32))
}

/// ε_e(g) as an exact root of unity in Q(ζ_N), N the group exponent.
pub fn character_value(e: &CharacterIndex, g: &GroupElement) -> Result<CyclotomicNumber> {
    let (n, exp) = pairing(&e.0, g)?;
    Ok(CyclotomicNumber::zeta_pow(n, exp as i64))
}

/// Σ_{x ∈ set} conj(ε_e(x)).
pub fn character_sum(e: &CharacterIndex, set: &[GroupElement]) -> Result<CyclotomicNumber> {
    let n = e.0.factors.iter().fold(1u32, |acc, &k| acc.lcm(&k));
    set.iter().try_fold(CyclotomicNumber::zero(n), |acc, x| {
        let (_, exp) = pairing(&e.0, x)?;
        Ok(acc.add(&CyclotomicNumber::zeta_pow(n, -(exp as i64))))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(k: u32) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(k).unwrap()
    }

    #[test]
    fn addition_examples() {
        let g = z(4);
        let s = group_add(&g.element(&[3]).unwrap(), &g.element(&[2]).unwrap()).unwrap();
        assert_eq!(s.residues(), &[1]);
        let k = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let s = group_add(&k.element(&[1, 0]).unwrap(), &k.element(&[1, 1]).unwrap()).unwrap();
        assert_eq!(s.residues(), &[0, 1]);
        let x = k.element(&[1, 1]).unwrap();
        assert_eq!(group_add(&x, &k.identity()).unwrap(), x);
    }

    #[test]
    fn mismatched_parents_are_rejected() {
        let a = z(4).element(&[1]).unwrap();
        let b = z(5).element(&[1]).unwrap();
        assert!(matches!(group_add(&a, &b), Err(Error::GroupMismatch(..))));
        assert!(character_value(&CharacterIndex(a), &b).is_err());
    }

    #[test]
    fn character_value_examples() {
        let g = z(4);
        let e = CharacterIndex(g.element(&[1]).unwrap());
        assert_eq!(
            character_value(&e, &g.element(&[1]).unwrap()).unwrap(),
            CyclotomicNumber::zeta_pow(4, 1)
        );
        let e2 = CharacterIndex(g.element(&[2]).unwrap());
        assert_eq!(
            character_value(&e2, &g.element(&[2]).unwrap()).unwrap(),
            CyclotomicNumber::one(4)
        );
        let k = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let e = CharacterIndex(k.element(&[1, 1]).unwrap());
        assert_eq!(
            character_value(&e, &k.element(&[1, 0]).unwrap()).unwrap(),
            CyclotomicNumber::from_int(2, -1)
        );
    }

    #[test]
    fn character_sum_examples() {
        let g = z(3);
        let e = CharacterIndex(g.element(&[1]).unwrap());
        let s = vec![g.element(&[1]).unwrap(), g.element(&[2]).unwrap()];
        assert_eq!(
            character_sum(&e, &s).unwrap(),
            CyclotomicNumber::from_int(3, -1)
        );

        let g5 = z(5);
        let e = CharacterIndex(g5.element(&[1]).unwrap());
        let s = vec![g5.element(&[1]).unwrap(), g5.element(&[4]).unwrap()];
        let v = character_sum(&e, &s).unwrap();
        assert_eq!(
            v,
            CyclotomicNumber::zeta_pow(5, 1).add(&CyclotomicNumber::zeta_pow(5, 4))
        );
        assert!((v.to_complex().0 - 0.618_033_988_749_895).abs() < 1e-12);

        let trivial = CharacterIndex(g5.identity());
        let all: Vec<_> = g5.elements().collect();
        assert_eq!(
            character_sum(&trivial, &all[1..4]).unwrap(),
            CyclotomicNumber::from_int(5, 3)
        );
    }

    #[test]
    fn index_round_trip() {
        let g = FiniteAbelianGroup::new(vec![2, 3, 4]).unwrap();
        for (i, x) in g.elements().enumerate() {
            assert_eq!(g.index_of(&x).unwrap(), i);
        }
        assert_eq!(g.element_at(1).residues(), &[0, 0, 1]);
    }

    #[test]
    fn bad_groups() {
        assert!(FiniteAbelianGroup::new(vec![]).is_err());
        assert!(FiniteAbelianGroup::new(vec![1]).is_err());
        assert!(FiniteAbelianGroup::new(vec![16, 32]).is_err());
    }

    fn groups() -> impl Strategy<Value = FiniteAbelianGroup> {
        prop::collection::vec(2u32..7, 1..3).prop_map(|f| FiniteAbelianGroup::new(f).unwrap())
    }

    proptest! {
        #[test]
        fn character_properties(g in groups(), seed in 0usize..1000) {
            let ord = g.order();
            let x = g.element_at(seed % ord);
            let y = g.element_at((seed / 7) % ord);
            let ex = CharacterIndex(x.clone());
            let ey = CharacterIndex(y.clone());
            // symmetric pairing
            prop_assert_eq!(character_value(&ex, &y).unwrap(), character_value(&ey, &x).unwrap());
            // ε(g)·ε(−g) = 1
            let neg = g.element_at(g.neg_index(seed / 7 % ord));
            let prod = character_value(&ex, &y).unwrap().mul(&character_value(&ex, &neg).unwrap());
            prop_assert_eq!(prod, CyclotomicNumber::one(g.exponent()));
            // orthogonality
            let total = g.elements().fold(CyclotomicNumber::zero(g.exponent()), |acc, h| {
                acc.add(&character_value(&ex, &h).unwrap())
            });
            let expected = if x.is_identity() { ord as i64 } else { 0 };
            prop_assert_eq!(total, CyclotomicNumber::from_int(g.exponent(), expected));
        }

        #[test]
        fn cyclotomic_ring_laws(level in 1u32..25, a in prop::collection::vec(-5i64..5, 1..10),
                                b in prop::collection::vec(-5i64..5, 1..10),
                                c in prop::collection::vec(-5i64..5, 1..10)) {
            let mk = |v: &Vec<i64>| CyclotomicNumber::from_raw(level, v.iter().map(|&x| num::BigRational::from_integer(x.into())).collect());
            let (a, b, c) = (mk(&a), mk(&b), mk(&c));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            let again = CyclotomicNumber::from_raw(level, a.coeffs().to_vec());
            prop_assert_eq!(again.coeffs(), a.coeffs());
        }
    }
}
