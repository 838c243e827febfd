//! Extended quadratic-residue codes over small fields, the binary Golay code,
//! and its Hensel lift to ℤ₄.

use std::sync::Arc;

use crate::alphabet::FiniteAbelianGroup;
use crate::error::{Error, Result};
use crate::extension::Word;
use crate::scheme::{
    build_cycle_scheme, build_group_scheme, build_group_scheme_ordered, build_trivial_scheme,
    AssociationScheme,
};

use super::BlockCode;

/// Fields of order 2, 3, 4, 5. F₄ elements are labelled a + 2b for a + bω.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmallField {
    Prime(u8),
    F4,
}

impl SmallField {
    pub fn order(self) -> u8 {
        match self {
            SmallField::Prime(p) => p,
            SmallField::F4 => 4,
        }
    }

    fn add(self, a: u8, b: u8) -> u8 {
        match self {
            SmallField::Prime(p) => (a + b) % p,
            SmallField::F4 => a ^ b,
        }
    }

    fn neg(self, a: u8) -> u8 {
        match self {
            SmallField::Prime(p) => (p - a) % p,
            SmallField::F4 => a,
        }
    }

    fn mul(self, a: u8, b: u8) -> u8 {
        match self {
            SmallField::Prime(p) => ((a as u16 * b as u16) % p as u16) as u8,
            SmallField::F4 => {
                if a == 0 || b == 0 {
                    return 0;
                }
                // labels 1, 2, 3 are ω⁰, ω¹, ω²
                const LOG: [u8; 4] = [0, 0, 1, 2];
                const EXP: [u8; 3] = [1, 2, 3];
                EXP[((LOG[a as usize] + LOG[b as usize]) % 3) as usize]
            }
        }
    }

    /// Group element index of a field element in the alphabet used for codes:
    /// ℤ_p for prime fields; ℤ₂² for F₄ with 1 ↦ (1,1), ω ↦ (0,1), ω² ↦ (1,0),
    /// which turns the group pairing into the trace form.
    pub fn symbol(self, a: u8) -> u8 {
        match self {
            SmallField::Prime(_) => a,
            SmallField::F4 => [0, 3, 1, 2][a as usize],
        }
    }

    fn elements(self) -> std::ops::Range<u8> {
        0..self.order()
    }
}

/// Remainder of `a` modulo the monic `g` (coefficients low degree first).
fn poly_rem(field: SmallField, a: &[u8], g: &[u8]) -> Vec<u8> {
    let mut r = a.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if lead != 0 {
            for (i, &c) in g.iter().enumerate() {
                let t = field.mul(lead, c);
                r[shift + i] = field.add(r[shift + i], field.neg(t));
            }
        }
        r.pop();
    }
    r
}

/// First monic divisor of xᵖ − 1 of degree (p−1)/2 that does not vanish at 1,
/// in lexicographic order of its low coefficients.
fn qr_generator(p: usize, field: SmallField) -> Result<Vec<u8>> {
    let h = (p - 1) / 2;
    let q = field.order() as usize;
    let mut target = vec![0u8; p + 1];
    target[0] = field.neg(1);
    target[p] = 1;
    let total = q
        .checked_pow(h as u32)
        .ok_or_else(|| Error::InvalidParameter("search too large".into()))?;
    for mut idx in 0..total {
        let mut g = vec![0u8; h + 1];
        for c in g.iter_mut().take(h) {
            *c = (idx % q) as u8;
            idx /= q;
        }
        g[h] = 1;
        if g[0] == 0 {
            continue;
        }
        let at_one = g.iter().fold(0u8, |acc, &c| field.add(acc, c));
        if at_one == 0 {
            continue;
        }
        if poly_rem(field, &target, &g).iter().all(|&c| c == 0) {
            return Ok(g);
        }
    }
    Err(Error::InvalidParameter(format!(
        "x^{p} - 1 has no divisor of degree {h} over a field of order {q}"
    )))
}

fn cyclic_rows(g: &[u8], p: usize) -> Vec<Vec<u8>> {
    let k = p - (g.len() - 1);
    (0..k)
        .map(|i| {
            let mut row = vec![0u8; p];
            row[i..i + g.len()].copy_from_slice(g);
            row
        })
        .collect()
}

/// Rows of the extended QR code of prime length p over `field`, as field
/// elements. The extra coordinate is γ·Σxᵢ with 1 + pγ² = 0; γ = −1 is
/// tried first, then the remaining field elements, and the first γ making the
/// rows self-orthogonal wins.
pub fn extended_qr_rows(p: usize, field: SmallField) -> Result<Vec<Vec<u8>>> {
    if p < 3 || (2..p).any(|d| p.is_multiple_of(d)) {
        return Err(Error::InvalidParameter(format!("{p} is not an odd prime")));
    }
    let g = qr_generator(p, field)?;
    let rows = cyclic_rows(&g, p);
    let p_mod = (0..p).fold(0u8, |acc, _| field.add(acc, 1));
    // the plain parity check γ = −1 first, when it qualifies
    let minus_one = field.neg(1);
    let candidates =
        std::iter::once(minus_one).chain(field.elements().skip(1).filter(|&g| g != minus_one));
    for gamma in candidates {
        let norm = field.add(1, field.mul(p_mod, field.mul(gamma, gamma)));
        if norm != 0 {
            continue;
        }
        let ext: Vec<Vec<u8>> = rows
            .iter()
            .map(|r| {
                let sum = r.iter().fold(0u8, |acc, &c| field.add(acc, c));
                let mut e = r.clone();
                e.push(field.mul(gamma, sum));
                e
            })
            .collect();
        let orthogonal = ext.iter().all(|a| {
            ext.iter().all(|b| {
                a.iter()
                    .zip(b)
                    .fold(0u8, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
                    == 0
            })
        });
        if orthogonal {
            return Ok(ext);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no self-orthogonal extension for p = {p}"
    )))
}

/// Additive generators over the alphabet group: the rows, plus ω·rows for F₄.
pub fn extended_qr_generators(p: usize, field: SmallField) -> Result<Vec<Word>> {
    let rows = extended_qr_rows(p, field)?;
    let mut out: Vec<Word> = rows
        .iter()
        .map(|r| r.iter().map(|&c| field.symbol(c)).collect())
        .collect();
    if field == SmallField::F4 {
        out.extend(rows.iter().map(|r| {
            r.iter()
                .map(|&c| field.symbol(field.mul(2, c)))
                .collect::<Word>()
        }));
    }
    Ok(out)
}

/// F₄ as ℤ₂² with classes ordered 1, ω, ω².
pub fn f4_scheme() -> Result<AssociationScheme> {
    let g = FiniteAbelianGroup::new(vec![2, 2])?;
    build_group_scheme_ordered(&g, &[3, 1, 2])
}

/// Extended ternary QR code of length 12 under the ℤ₃ group scheme.
pub fn xq11_f3() -> Result<BlockCode> {
    let scheme = build_group_scheme(&FiniteAbelianGroup::cyclic(3)?)?;
    BlockCode::additive(
        Arc::new(scheme),
        12,
        extended_qr_generators(11, SmallField::Prime(3))?,
    )
}

/// Extended quaternary QR code of length 12 under the F₄ group scheme.
pub fn xq11_f4() -> Result<BlockCode> {
    BlockCode::additive(
        Arc::new(f4_scheme()?),
        12,
        extended_qr_generators(11, SmallField::F4)?,
    )
}

/// Extended quinary QR code of length 12 under the 5-cycle scheme.
pub fn xq11_f5() -> Result<BlockCode> {
    BlockCode::additive(
        Arc::new(build_cycle_scheme(5)?),
        12,
        extended_qr_generators(11, SmallField::Prime(5))?,
    )
}

/// Extended binary Golay code [24, 12, 8].
pub fn binary_golay() -> Result<BlockCode> {
    BlockCode::additive(
        Arc::new(build_trivial_scheme(2)?),
        24,
        extended_qr_generators(23, SmallField::Prime(2))?,
    )
}

/// Monic Hensel lift to ℤ₄ of a binary divisor g of x²³ − 1, by Graeffe's
/// method: g̃(x²) = ±(e(x)² − o(x)²) where e, o are the even and odd parts of g.
pub fn hensel_lift_z4(g: &[u8]) -> Vec<u8> {
    let d = g.len() - 1;
    let mut e = vec![0i64; g.len()];
    let mut o = vec![0i64; g.len()];
    for (i, &c) in g.iter().enumerate() {
        if i % 2 == 0 {
            e[i] = c as i64;
        } else {
            o[i] = c as i64;
        }
    }
    let square = |a: &[i64]| {
        let mut r = vec![0i64; 2 * a.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in a.iter().enumerate() {
                r[i + j] += x * y;
            }
        }
        r
    };
    let (e2, o2) = (square(&e), square(&o));
    let diff: Vec<i64> = e2.iter().zip(&o2).map(|(a, b)| a - b).collect();
    let mut lifted: Vec<u8> = (0..=d).map(|i| diff[2 * i].rem_euclid(4) as u8).collect();
    if lifted[d] == 3 {
        lifted.iter_mut().for_each(|c| *c = (4 - *c) % 4);
    }
    lifted
}

/// The ℤ₄ lift of the extended Golay code (length 24, 4¹² words) under the
/// 4-cycle scheme, so compositions record (#{±1}, #{2}).
pub fn lifted_golay_z4() -> Result<BlockCode> {
    let g = qr_generator(23, SmallField::Prime(2))?;
    let h = hensel_lift_z4(&g);
    let z4 = SmallField::Prime(4);
    let mut target = vec![0u8; 24];
    target[0] = 3;
    target[23] = 1;
    if h[11] != 1 || poly_rem(z4, &target, &h).iter().any(|&c| c != 0) {
        return Err(Error::Invariant(
            "Hensel lift does not divide x^23 - 1 over Z4".into(),
        ));
    }
    let rows = cyclic_rows(&h, 23);
    let mut chosen = None;
    for gamma in [1u8, 3] {
        let ext: Vec<Word> = rows
            .iter()
            .map(|r| {
                let sum = r.iter().map(|&c| c as u32).sum::<u32>();
                let mut e = r.clone();
                e.push(((gamma as u32 * sum) % 4) as u8);
                e
            })
            .collect();
        let orthogonal = ext.iter().all(|a| {
            ext.iter().all(|b| {
                a.iter()
                    .zip(b)
                    .map(|(&x, &y)| x as u32 * y as u32)
                    .sum::<u32>()
                    % 4
                    == 0
            })
        });
        if orthogonal {
            chosen = Some(ext);
            break;
        }
    }
    let gens =
        chosen.ok_or_else(|| Error::Invariant("no self-orthogonal extension over Z4".into()))?;
    BlockCode::additive(Arc::new(build_cycle_scheme(4)?), 24, gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_arithmetic() {
        let f = SmallField::F4;
        // ω·ω = ω², ω + 1 = ω², ω·ω² = 1
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.add(2, 1), 3);
        assert_eq!(f.mul(2, 3), 1);
    }

    #[test]
    fn generators_divide() {
        for field in [SmallField::Prime(3), SmallField::F4, SmallField::Prime(5)] {
            let g = qr_generator(11, field).unwrap();
            assert_eq!(g.len(), 6);
        }
        assert_eq!(qr_generator(23, SmallField::Prime(2)).unwrap().len(), 12);
    }

    #[test]
    fn code_sizes() {
        assert_eq!(xq11_f3().unwrap().size(), 729);
        assert_eq!(xq11_f4().unwrap().size(), 4096);
        assert_eq!(xq11_f5().unwrap().size(), 15625);
        assert_eq!(binary_golay().unwrap().size(), 4096);
        assert_eq!(lifted_golay_z4().unwrap().size(), 1 << 24);
    }
}
