//! Commutative association schemes with exact eigenmatrices.
//!
//! Translation schemes (group, cycle, trivial, or any translation-invariant
//! partition of a finite abelian group) get their first eigenmatrix from
//! character sums. Schemes given only by a relation table are accepted when
//! their Bose–Mesner algebra splits over Q; the eigenvalues are then found by
//! simultaneous diagonalisation of the intersection matrices.
//!
//! Row 0 of P is always the valency row (E₀ = |X|⁻¹J). For translation
//! schemes the remaining rows are ordered by the smallest index of −x over
//! the characters ε_x in each dual class, which reproduces P = [ζ_k^{ij}] for
//! the group scheme of ℤ_k. For table schemes they are sorted by descending
//! eigenvalue tuple.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::alphabet::FiniteAbelianGroup;
use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};
use crate::linalg;

/// Input description of a scheme, as read from scheme and code files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SchemeDescriptor {
    /// Group scheme: one class per nonzero element. `order` optionally lists
    /// the nonzero elements (as residue tuples) in class order.
    Group {
        factors: Vec<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<Vec<Vec<u32>>>,
    },
    Cycle {
        k: u32,
    },
    /// One-class scheme on q symbols, modelled on ℤ_q unless `factors` names
    /// another group of order q.
    Trivial {
        q: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        factors: Option<Vec<u32>>,
    },
    Table {
        size: usize,
        classes: usize,
        relation: Vec<Vec<usize>>,
    },
    /// Dual of a translation scheme, on the same index set.
    Dual {
        of: Box<SchemeDescriptor>,
    },
}

impl SchemeDescriptor {
    pub fn build(&self) -> Result<AssociationScheme> {
        match self {
            SchemeDescriptor::Group { factors, order } => {
                let g = FiniteAbelianGroup::new(factors.clone())?;
                match order {
                    None => build_group_scheme(&g),
                    Some(els) => {
                        let idx = els
                            .iter()
                            .map(|r| {
                                let r: Vec<i64> = r.iter().map(|&x| x as i64).collect();
                                g.index_of(&g.element(&r)?)
                            })
                            .collect::<Result<Vec<_>>>()?;
                        build_group_scheme_ordered(&g, &idx)
                    }
                }
            }
            SchemeDescriptor::Cycle { k } => build_cycle_scheme(*k),
            SchemeDescriptor::Trivial { q, factors } => match factors {
                None => build_trivial_scheme(*q),
                Some(f) => {
                    let g = FiniteAbelianGroup::new(f.clone())?;
                    if g.order() != *q as usize {
                        return Err(Error::InvalidParameter(format!(
                            "group {f:?} does not have order {q}"
                        )));
                    }
                    trivial_scheme_on(&g)
                }
            },
            SchemeDescriptor::Table {
                size,
                classes,
                relation,
            } => {
                if relation.len() != *size || relation.iter().any(|r| r.len() != *size) {
                    return Err(Error::Axiom {
                        axiom: "AS2",
                        detail: format!("relation table is not {size}x{size}"),
                    });
                }
                let s = build_from_table(relation)?;
                if s.classes() != *classes {
                    return Err(Error::InvalidParameter(format!(
                        "descriptor declares {classes} classes, table has {}",
                        s.classes()
                    )));
                }
                Ok(s)
            }
            SchemeDescriptor::Dual { of } => dual_scheme(&of.build()?),
        }
    }
}

/// Data only present for translation schemes.
#[derive(Clone, Debug)]
pub struct TranslationData {
    pub group: FiniteAbelianGroup,
    /// X_i as element indices.
    pub classes: Vec<Vec<usize>>,
    /// X_i* as character indices (ε_x ↦ x).
    pub dual_classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    pub dual_class_of: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct AssociationScheme {
    size: usize,
    classes: usize,
    relation: Vec<u8>,
    transpose: Vec<usize>,
    valency: Vec<u64>,
    p: Vec<Vec<CyclotomicNumber>>,
    q: Vec<Vec<CyclotomicNumber>>,
    intersection: Vec<u64>,
    krein: Vec<CyclotomicNumber>,
    translation: Option<TranslationData>,
    label: String,
}

impl AssociationScheme {
    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of non-identity classes s.
    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relation(&self, x: usize, y: usize) -> usize {
        self.relation[x * self.size + y] as usize
    }

    pub fn relation_table(&self) -> Vec<Vec<usize>> {
        (0..self.size)
            .map(|x| (0..self.size).map(|y| self.relation(x, y)).collect())
            .collect()
    }

    /// Class index i' with A_i^T = A_{i'}.
    pub fn transpose_class(&self, i: usize) -> usize {
        self.transpose[i]
    }

    pub fn valency(&self, i: usize) -> u64 {
        self.valency[i]
    }

    pub fn p_matrix(&self) -> &[Vec<CyclotomicNumber>] {
        &self.p
    }

    pub fn q_matrix(&self) -> &[Vec<CyclotomicNumber>] {
        &self.q
    }

    /// p_{ij}^k.
    pub fn intersection_number(&self, i: usize, j: usize, k: usize) -> u64 {
        let d = self.classes + 1;
        self.intersection[(i * d + j) * d + k]
    }

    /// q_{ij}^k.
    pub fn krein_parameter(&self, i: usize, j: usize, k: usize) -> &CyclotomicNumber {
        let d = self.classes + 1;
        &self.krein[(i * d + j) * d + k]
    }

    pub fn intersection_numbers(&self) -> Vec<Vec<Vec<u64>>> {
        let d = self.classes + 1;
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|k| self.intersection_number(i, j, k)).collect())
                    .collect()
            })
            .collect()
    }

    pub fn krein_parameters(&self) -> Vec<Vec<Vec<CyclotomicNumber>>> {
        let d = self.classes + 1;
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        (0..d)
                            .map(|k| self.krein_parameter(i, j, k).clone())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn translation(&self) -> Option<&TranslationData> {
        self.translation.as_ref()
    }

    pub fn group(&self) -> Option<&FiniteAbelianGroup> {
        self.translation.as_ref().map(|t| &t.group)
    }

    pub fn is_translation(&self) -> bool {
        self.translation.is_some()
    }

    /// Level of the cyclotomic field holding P and Q.
    pub fn level(&self) -> u32 {
        self.p
            .iter()
            .flatten()
            .map(|z| z.level())
            .max()
            .unwrap_or(1)
    }

    /// Index of the dual class containing the character ε_x.
    pub fn dual_class_of(&self, x: usize) -> Option<usize> {
        self.translation.as_ref().map(|t| t.dual_class_of[x])
    }

    /// Re-validates every stored invariant: PQ = QP = |X|I, P_{i0} = Q_{i0} = 1,
    /// row 0 of P is the valency row, row sums of P₀ equal |X|, Krein
    /// parameters are non-negative reals.
    pub fn check_invariants(&self) -> Result<()> {
        let d = self.classes + 1;
        let level = self.level();
        let nx = CyclotomicNumber::from_int(level, self.size as i64);
        let zero = CyclotomicNumber::zero(level);
        for (a, b, name) in [(&self.p, &self.q, "PQ"), (&self.q, &self.p, "QP")] {
            let prod = linalg::mat_mul(a, b);
            for i in 0..d {
                for j in 0..d {
                    let want = if i == j { &nx } else { &zero };
                    if prod[i][j] != *want {
                        return Err(Error::Invariant(format!("{name} != |X|I at ({i},{j})")));
                    }
                }
            }
        }
        for i in 0..d {
            if self.p[i][0] != CyclotomicNumber::one(level)
                || self.q[i][0] != CyclotomicNumber::one(level)
            {
                return Err(Error::Invariant(format!("column 0 entry {i} is not 1")));
            }
            if self.p[0][i].as_integer() != Some((self.valency[i] as i64).into()) {
                return Err(Error::Invariant(format!("P[0][{i}] is not the valency")));
            }
        }
        let total: u64 = self.valency.iter().sum();
        if total != self.size as u64 {
            return Err(Error::Invariant("valencies do not sum to |X|".into()));
        }
        for (idx, q) in self.krein.iter().enumerate() {
            match q.real_sign() {
                Some(std::cmp::Ordering::Less) | None => {
                    return Err(Error::Invariant(format!(
                        "Krein parameter #{idx} = {q} is not a non-negative real"
                    )))
                }
                _ => {}
            }
        }
        if let Some(t) = &self.translation {
            for (j, dc) in t.dual_classes.iter().enumerate() {
                if self.q[0][j].as_integer() != Some((dc.len() as i64).into()) {
                    return Err(Error::Invariant(format!("|X_{j}*| != Q[0][{j}]")));
                }
            }
        }
        Ok(())
    }
}

/// Validates (AS1)–(AS4) by counting and returns (s, transposes, valencies,
/// intersection tensor).
fn validate_table(table: &[u8], size: usize) -> Result<(usize, Vec<usize>, Vec<u64>, Vec<u64>)> {
    if size < 2 {
        return Err(Error::InvalidParameter(
            "scheme needs at least 2 points".into(),
        ));
    }
    let r = |x: usize, y: usize| table[x * size + y] as usize;
    // AS1
    for x in 0..size {
        if r(x, x) != 0 {
            return Err(Error::Axiom {
                axiom: "AS1",
                detail: format!("r({x},{x}) = {} (diagonal must be class 0)", r(x, x)),
            });
        }
        for y in 0..size {
            if x != y && r(x, y) == 0 {
                return Err(Error::Axiom {
                    axiom: "AS1",
                    detail: format!("r({x},{y}) = 0 for distinct points"),
                });
            }
        }
    }
    // AS2: classes 0..=s all used
    let s = table.iter().copied().max().unwrap_or(0) as usize;
    let d = s + 1;
    let mut used = vec![false; d];
    for &c in table {
        used[c as usize] = true;
    }
    if let Some(c) = used.iter().position(|&u| !u) {
        return Err(Error::Axiom {
            axiom: "AS2",
            detail: format!("class {c} is empty (classes must be numbered 0..={s} without gaps)"),
        });
    }
    // AS3
    let mut transpose = vec![usize::MAX; d];
    for x in 0..size {
        for y in 0..size {
            let (i, j) = (r(x, y), r(y, x));
            if transpose[i] == usize::MAX {
                transpose[i] = j;
            } else if transpose[i] != j {
                return Err(Error::Axiom {
                    axiom: "AS3",
                    detail: format!(
                        "transpose of class {i} is not a class (witness pair ({y},{x}))"
                    ),
                });
            }
        }
    }
    // AS4 via intersection numbers
    let mut inter = vec![u64::MAX; d * d * d];
    let mut counts = vec![0u64; d * d];
    for x in 0..size {
        for y in 0..size {
            let k = r(x, y);
            counts.iter_mut().for_each(|c| *c = 0);
            for z in 0..size {
                counts[r(x, z) * d + r(z, y)] += 1;
            }
            for i in 0..d {
                for j in 0..d {
                    let slot = &mut inter[(i * d + j) * d + k];
                    let c = counts[i * d + j];
                    if *slot == u64::MAX {
                        *slot = c;
                    } else if *slot != c {
                        return Err(Error::Axiom {
                            axiom: "AS4",
                            detail: format!(
                                "p_{{{i}{j}}}^{k} depends on the pair: {} vs {c} at ({x},{y})",
                                *slot
                            ),
                        });
                    }
                }
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                if inter[(i * d + j) * d + k] != inter[(j * d + i) * d + k] {
                    return Err(Error::Axiom {
                        axiom: "AS4",
                        detail: format!("A_{i}A_{j} != A_{j}A_{i} (p_{{{i}{j}}}^{k})"),
                    });
                }
            }
        }
    }
    let valency: Vec<u64> = (0..d)
        .map(|i| (0..size).filter(|&y| r(0, y) == i).count() as u64)
        .collect();
    Ok((s, transpose, valency, inter))
}

/// Krein parameters from q_ij = |X|⁻¹ P (Q_{·i} ∘ Q_{·j}).
fn compute_krein(
    p: &[Vec<CyclotomicNumber>],
    q: &[Vec<CyclotomicNumber>],
    size: usize,
) -> Result<Vec<CyclotomicNumber>> {
    let d = p.len();
    let level = p
        .iter()
        .chain(q)
        .flatten()
        .map(|z| z.level())
        .max()
        .unwrap_or(1);
    let inv = BigRational::new(1.into(), (size as i64).into());
    let mut out = Vec::with_capacity(d * d * d);
    for i in 0..d {
        for j in 0..d {
            let v: Vec<CyclotomicNumber> = (0..d).map(|l| q[l][i].mul(&q[l][j])).collect();
            for k in 0..d {
                let s = (0..d).fold(CyclotomicNumber::zero(level), |acc, l| {
                    acc.add(&p[k][l].mul(&v[l]))
                });
                let qk = s.scale(&inv);
                if matches!(qk.real_sign(), Some(std::cmp::Ordering::Less) | None) {
                    return Err(Error::Invariant(format!(
                        "Krein parameter q_{{{i}{j}}}^{k} = {qk}"
                    )));
                }
                out.push(qk);
            }
        }
    }
    Ok(out)
}

fn second_eigenmatrix(
    p: &[Vec<CyclotomicNumber>],
    size: usize,
) -> Result<Vec<Vec<CyclotomicNumber>>> {
    let inv = linalg::invert(&p.to_vec())
        .ok_or_else(|| Error::Invariant("first eigenmatrix is singular".into()))?;
    let scale = BigRational::from_integer((size as i64).into());
    Ok(inv
        .into_iter()
        .map(|row| row.into_iter().map(|z| z.scale(&scale)).collect())
        .collect())
}

/// How the rows of P are ordered for a translation scheme.
enum RowOrder {
    /// Row j holds ε_{−x} for x ∈ X_j when that pairs classes with dual
    /// classes; smallest index of −x over the dual class otherwise.
    Canonical,
    /// Row j is the dual class containing the given character index.
    Anchored(Vec<usize>),
}

/// Translation scheme on `group` with classes X_0 = {0}, X_1, …, X_s given
/// as element indices.
pub fn build_translation_scheme(
    group: &FiniteAbelianGroup,
    classes: Vec<Vec<usize>>,
    label: String,
) -> Result<AssociationScheme> {
    build_translation_inner(group, classes, RowOrder::Canonical, label)
}

fn build_translation_inner(
    group: &FiniteAbelianGroup,
    classes: Vec<Vec<usize>>,
    order: RowOrder,
    label: String,
) -> Result<AssociationScheme> {
    let size = group.order();
    if classes.first().map(|c| c.as_slice()) != Some(&[0]) {
        return Err(Error::Axiom {
            axiom: "AS1",
            detail: "class 0 of a translation scheme must be {0}".into(),
        });
    }
    let mut class_of = vec![usize::MAX; size];
    for (i, c) in classes.iter().enumerate() {
        if c.is_empty() {
            return Err(Error::Axiom {
                axiom: "AS2",
                detail: format!("class {i} is empty"),
            });
        }
        for &x in c {
            if x >= size || class_of[x] != usize::MAX {
                return Err(Error::Axiom {
                    axiom: "AS2",
                    detail: format!("element {x} is out of range or repeated"),
                });
            }
            class_of[x] = i;
        }
    }
    if let Some(x) = class_of.iter().position(|&c| c == usize::MAX) {
        return Err(Error::Axiom {
            axiom: "AS2",
            detail: format!("element {x} is not classified"),
        });
    }
    if classes.len() > 255 {
        return Err(Error::InvalidParameter("too many classes".into()));
    }
    let mut relation = vec![0u8; size * size];
    for x in 0..size {
        let nx = group.neg_index(x);
        for y in 0..size {
            relation[x * size + y] = class_of[group.add_indices(y, nx)] as u8;
        }
    }
    let (s, transpose, valency, intersection) = validate_table(&relation, size)?;
    let d = s + 1;
    let n = group.exponent();

    // Eigenvalue vector of each character, Σ_{x∈X_i} conj(ε(x)).
    let eig = |e: usize| -> Vec<CyclotomicNumber> {
        classes
            .iter()
            .map(|c| {
                c.iter().fold(CyclotomicNumber::zero(n), |acc, &x| {
                    acc.add(&CyclotomicNumber::zeta_pow(
                        n,
                        -(group.pairing_exponent(e, x) as i64),
                    ))
                })
            })
            .collect()
    };
    let mut groups: Vec<(Vec<CyclotomicNumber>, Vec<usize>)> = Vec::new();
    for e in 0..size {
        let v = eig(e);
        match groups.iter_mut().find(|(w, _)| *w == v) {
            Some((_, members)) => members.push(e),
            None => groups.push((v, vec![e])),
        }
    }
    if groups.len() != d {
        return Err(Error::Axiom {
            axiom: "AS4",
            detail: format!(
                "{} distinct eigenvalue rows for {} classes",
                groups.len(),
                d
            ),
        });
    }
    let ordered: Vec<(Vec<CyclotomicNumber>, Vec<usize>)> = match order {
        RowOrder::Canonical => {
            // Pair row j with class j through x ↦ ε_{−x} when that is a
            // bijection; otherwise sort by smallest −x.
            let anchors: Vec<usize> = classes.iter().map(|c| group.neg_index(c[0])).collect();
            let slots: Vec<Option<usize>> = anchors
                .iter()
                .map(|a| groups.iter().position(|(_, m)| m.contains(a)))
                .collect();
            let mut seen = vec![false; groups.len()];
            let bijective = slots.iter().all(|s| match s {
                Some(p) if !seen[*p] => {
                    seen[*p] = true;
                    true
                }
                _ => false,
            });
            if bijective {
                let mut g: Vec<Option<(Vec<CyclotomicNumber>, Vec<usize>)>> =
                    groups.into_iter().map(Some).collect();
                slots
                    .iter()
                    .map(|s| g[s.unwrap()].take().unwrap())
                    .collect()
            } else {
                let mut g = groups;
                g.sort_by_key(|(_, members)| {
                    members.iter().map(|&e| group.neg_index(e)).min().unwrap()
                });
                g
            }
        }
        RowOrder::Anchored(anchors) => {
            let mut out = Vec::with_capacity(d);
            for a in anchors {
                let pos = groups
                    .iter()
                    .position(|(_, m)| m.contains(&a))
                    .ok_or_else(|| Error::Invariant(format!("anchor {a} matches no dual class")))?;
                out.push(groups.swap_remove(pos));
            }
            out
        }
    };
    if ordered[0].1 != [0] {
        return Err(Error::Invariant(
            "row 0 is not the trivial character".into(),
        ));
    }
    let p: Vec<Vec<CyclotomicNumber>> = ordered.iter().map(|(v, _)| v.clone()).collect();
    let dual_classes: Vec<Vec<usize>> = ordered.into_iter().map(|(_, m)| m).collect();
    let mut dual_class_of = vec![0usize; size];
    for (j, dc) in dual_classes.iter().enumerate() {
        for &e in dc {
            dual_class_of[e] = j;
        }
    }
    let q = second_eigenmatrix(&p, size)?;
    let krein = compute_krein(&p, &q, size)?;
    let scheme = AssociationScheme {
        size,
        classes: s,
        relation,
        transpose,
        valency,
        p,
        q,
        intersection,
        krein,
        translation: Some(TranslationData {
            group: group.clone(),
            classes,
            dual_classes,
            class_of,
            dual_class_of,
        }),
        label,
    };
    scheme.check_invariants()?;
    Ok(scheme)
}

/// Group scheme: one class per nonzero element in index order.
pub fn build_group_scheme(group: &FiniteAbelianGroup) -> Result<AssociationScheme> {
    let order: Vec<usize> = (1..group.order()).collect();
    build_group_scheme_ordered(group, &order)
}

/// Group scheme with the nonzero elements listed in class order.
pub fn build_group_scheme_ordered(
    group: &FiniteAbelianGroup,
    order: &[usize],
) -> Result<AssociationScheme> {
    let mut classes = vec![vec![0]];
    classes.extend(order.iter().map(|&x| vec![x]));
    let label = format!("group scheme of Z{:?}", group.factors());
    build_translation_scheme(group, classes, label)
}

/// Scheme of the ordinary k-cycle: classes {0}, {±1}, …, {±⌊k/2⌋}.
pub fn build_cycle_scheme(k: u32) -> Result<AssociationScheme> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!(
            "cycle scheme needs k >= 3, got {k}"
        )));
    }
    let g = FiniteAbelianGroup::cyclic(k)?;
    let e = (k / 2) as usize;
    let k = k as usize;
    let mut classes = vec![vec![0]];
    for i in 1..=e {
        if 2 * i == k {
            classes.push(vec![i]);
        } else {
            classes.push(vec![i, k - i]);
        }
    }
    build_translation_scheme(&g, classes, format!("{k}-cycle scheme"))
}

/// One-class scheme on ℤ_q.
pub fn build_trivial_scheme(q: u32) -> Result<AssociationScheme> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!(
            "trivial scheme needs q >= 2, got {q}"
        )));
    }
    trivial_scheme_on(&FiniteAbelianGroup::cyclic(q)?)
}

/// One-class scheme on an arbitrary group; its extension is H(n, |G|).
pub fn trivial_scheme_on(group: &FiniteAbelianGroup) -> Result<AssociationScheme> {
    let classes = vec![vec![0], (1..group.order()).collect()];
    build_translation_scheme(
        group,
        classes,
        format!("1-class scheme on {} symbols", group.order()),
    )
}

/// Scheme from a full relation table. The Bose–Mesner algebra must split
/// over Q (all eigenvalues integral).
pub fn build_from_table(relation: &[Vec<usize>]) -> Result<AssociationScheme> {
    let size = relation.len();
    if relation.iter().any(|r| r.len() != size) {
        return Err(Error::Axiom {
            axiom: "AS2",
            detail: "relation table is not square".into(),
        });
    }
    if relation.iter().flatten().any(|&c| c > 254) {
        return Err(Error::InvalidParameter("too many classes".into()));
    }
    let table: Vec<u8> = relation.iter().flatten().map(|&c| c as u8).collect();
    let (s, transpose, valency, intersection) = validate_table(&table, size)?;
    let d = s + 1;
    let q_int = |v: i64| BigRational::from_integer(v.into());
    // B_i: column j holds the coefficients of A_i A_j.
    let b: Vec<Vec<Vec<BigRational>>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|k| {
                    (0..d)
                        .map(|j| q_int(intersection[(i * d + j) * d + k] as i64))
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut dims = 0usize;
    let mut stack: Vec<Vec<BigRational>> = Vec::new();
    joint_eigen_search(
        &b,
        &valency,
        1,
        vec![1],
        &mut stack,
        &mut rows,
        &mut dims,
        d,
    );
    if rows.len() != d || dims != d {
        return Err(Error::NonRationalSplitting(format!(
            "found {} rational joint eigenspaces of total dimension {dims}, need {d}",
            rows.len()
        )));
    }
    let val_row: Vec<i64> = valency.iter().map(|&v| v as i64).collect();
    rows.sort_by(|a, b| b[1..].cmp(&a[1..]));
    let pos0 = rows
        .iter()
        .position(|r| *r == val_row)
        .ok_or_else(|| Error::Invariant("valency row is not an eigenvalue row".into()))?;
    let first = rows.remove(pos0);
    rows.insert(0, first);
    let p: Vec<Vec<CyclotomicNumber>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&v| CyclotomicNumber::from_int(1, v))
                .collect()
        })
        .collect();
    let q = second_eigenmatrix(&p, size)?;
    let krein = compute_krein(&p, &q, size)?;
    let scheme = AssociationScheme {
        size,
        classes: s,
        relation: table,
        transpose,
        valency,
        p,
        q,
        intersection,
        krein,
        translation: None,
        label: format!("table scheme on {size} points"),
    };
    scheme.check_invariants()?;
    Ok(scheme)
}

/// Depth-first search over integer eigenvalue tuples (θ_1, …, θ_s) with
/// |θ_i| ≤ valency; a branch survives while the stacked system
/// (B_1 − θ_1 I; …; B_i − θ_i I) v = 0 has a nonzero solution.
#[allow(clippy::too_many_arguments)]
fn joint_eigen_search(
    b: &[Vec<Vec<BigRational>>],
    valency: &[u64],
    level: usize,
    prefix: Vec<i64>,
    stack: &mut Vec<Vec<BigRational>>,
    out: &mut Vec<Vec<i64>>,
    dims: &mut usize,
    d: usize,
) {
    if level == d {
        let kernel_dim = if stack.is_empty() {
            d
        } else {
            d - linalg::rank(stack)
        };
        if kernel_dim > 0 {
            *dims += kernel_dim;
            out.push(prefix);
        }
        return;
    }
    let k = valency[level] as i64;
    for theta in (-k..=k).rev() {
        let added: Vec<Vec<BigRational>> = (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| {
                        let mut v = b[level][r][c].clone();
                        if r == c {
                            v -= BigRational::from_integer(theta.into());
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let before = stack.len();
        stack.extend(added);
        if linalg::rank(stack) < d {
            let mut next = prefix.clone();
            next.push(theta);
            joint_eigen_search(b, valency, level + 1, next, stack, out, dims, d);
        }
        stack.truncate(before);
    }
}

/// Dual scheme on the character group, with P* = Q and Q* = P (checked).
///
/// The result lives on the same index set (ε_x ↦ x). Under the double-dual
/// identification x ↦ −x its dual has the original relation table.
pub fn dual_scheme(scheme: &AssociationScheme) -> Result<AssociationScheme> {
    let t = scheme.translation.as_ref().ok_or(Error::NotTranslation)?;
    let group = &t.group;
    // Row j of Q is the eigenvalue row of the character ε_{−x}, x ∈ X_j.
    let anchors: Vec<usize> = t.classes.iter().map(|c| group.neg_index(c[0])).collect();
    let dual = build_translation_inner(
        group,
        t.dual_classes.clone(),
        RowOrder::Anchored(anchors),
        format!("dual of {}", scheme.label),
    )?;
    if dual.p != scheme.q || dual.q != scheme.p {
        return Err(Error::Invariant(
            "dual scheme eigenmatrices are not (Q, P)".into(),
        ));
    }
    Ok(dual)
}

/// Exact rendering helpers shared by the CLI.
pub fn matrix_to_strings(m: &[Vec<CyclotomicNumber>]) -> Vec<Vec<String>> {
    m.iter()
        .map(|r| r.iter().map(|z| z.to_string()).collect())
        .collect()
}

pub fn matrix_to_decimals(m: &[Vec<CyclotomicNumber>]) -> Vec<Vec<String>> {
    m.iter()
        .map(|r| r.iter().map(|z| z.decimal()).collect())
        .collect()
}

/// Convenience handle used across modules.
pub type SchemeRef = Arc<AssociationScheme>;

/// Class index of every nonzero group element, keyed by element index.
pub fn class_map(scheme: &AssociationScheme) -> BTreeMap<usize, usize> {
    (0..scheme.size())
        .map(|x| (x, scheme.relation(0, x)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(level: u32, rows: &[&[i64]]) -> Vec<Vec<CyclotomicNumber>> {
        rows.iter()
            .map(|r| {
                r.iter()
                    .map(|&v| CyclotomicNumber::from_int(level, v))
                    .collect()
            })
            .collect()
    }

    fn z(level: u32, k: i64) -> CyclotomicNumber {
        CyclotomicNumber::zeta_pow(level, k)
    }

    #[test]
    fn group_scheme_z3() {
        let s = build_group_scheme(&FiniteAbelianGroup::cyclic(3).unwrap()).unwrap();
        let one = CyclotomicNumber::one(3);
        let expected = vec![
            vec![one.clone(), one.clone(), one.clone()],
            vec![one.clone(), z(3, 1), z(3, 2)],
            vec![one, z(3, 2), z(3, 1)],
        ];
        assert_eq!(s.p_matrix(), expected.as_slice());
        // Q = [ζ^{-ij}]
        assert_eq!(s.q_matrix()[1][1], z(3, -1));
    }

    #[test]
    fn group_scheme_z2_and_klein() {
        let s = build_group_scheme(&FiniteAbelianGroup::cyclic(2).unwrap()).unwrap();
        let m = ints(2, &[&[1, 1], &[1, -1]]);
        assert_eq!(s.p_matrix(), m.as_slice());
        assert_eq!(s.q_matrix(), m.as_slice());

        // F4 with classes ordered 1, ω, ω² = (1,1), (0,1), (1,0).
        let k = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let s = build_group_scheme_ordered(&k, &[3, 1, 2]).unwrap();
        let m = ints(
            2,
            &[
                &[1, 1, 1, 1],
                &[1, 1, -1, -1],
                &[1, -1, -1, 1],
                &[1, -1, 1, -1],
            ],
        );
        assert_eq!(s.p_matrix(), m.as_slice());
        assert_eq!(s.q_matrix(), m.as_slice());
    }

    #[test]
    fn cycle_schemes() {
        let s4 = build_cycle_scheme(4).unwrap();
        let m = ints(4, &[&[1, 2, 1], &[1, 0, -1], &[1, -2, 1]]);
        assert_eq!(s4.p_matrix(), m.as_slice());
        assert_eq!(s4.q_matrix(), m.as_slice());

        let s5 = build_cycle_scheme(5).unwrap();
        let row0: Vec<_> = s5.p_matrix()[0]
            .iter()
            .map(|z| z.as_integer().unwrap())
            .collect();
        assert_eq!(row0, vec![1.into(), 2.into(), 2.into()]);
        assert_eq!(s5.p_matrix()[1][1], z(5, 1).add(&z(5, 4)));

        let s3 = build_cycle_scheme(3).unwrap();
        assert_eq!(s3.p_matrix(), ints(3, &[&[1, 2], &[1, -1]]).as_slice());
        assert!(build_cycle_scheme(2).is_err());
    }

    #[test]
    fn trivial_schemes() {
        for q in 2..=4i64 {
            let s = build_trivial_scheme(q as u32).unwrap();
            let m = ints(1, &[&[1, q - 1], &[1, -1]]);
            assert_eq!(s.p_matrix(), m.as_slice());
            assert_eq!(s.q_matrix(), m.as_slice());
        }
        assert!(build_trivial_scheme(1).is_err());
        let s = build_trivial_scheme(2).unwrap();
        assert_eq!(s.krein_parameter(1, 1, 0).as_integer(), Some(1.into()));
        assert_eq!(s.krein_parameter(1, 1, 1).as_integer(), Some(0.into()));
    }

    #[test]
    fn table_matches_group_scheme() {
        let s = build_from_table(&[vec![0, 1], vec![1, 0]]).unwrap();
        let g = build_group_scheme(&FiniteAbelianGroup::cyclic(2).unwrap()).unwrap();
        assert_eq!(s.p_matrix(), g.p_matrix());
        assert_eq!(s.q_matrix(), g.q_matrix());
    }

    #[test]
    fn table_four_cycle() {
        let t: Vec<Vec<usize>> = (0..4)
            .map(|x: i32| {
                (0..4)
                    .map(|y: i32| ((y - x).rem_euclid(4).min((x - y).rem_euclid(4))) as usize)
                    .collect()
            })
            .collect();
        let s = build_from_table(&t).unwrap();
        let c = build_cycle_scheme(4).unwrap();
        assert_eq!(s.p_matrix(), c.p_matrix());
        assert!(!s.is_translation());
    }

    #[test]
    fn table_axiom_errors() {
        let err = build_from_table(&[vec![1, 1], vec![1, 0]]).unwrap_err();
        assert!(matches!(err, Error::Axiom { axiom: "AS1", .. }));
        let err = build_from_table(&[vec![0, 2], vec![2, 0]]).unwrap_err();
        assert!(matches!(err, Error::Axiom { axiom: "AS2", .. }));
        // directed 3-cycle with a non-class transpose pattern
        let err = build_from_table(&[vec![0, 1, 1], vec![2, 0, 1], vec![1, 2, 0]]).unwrap_err();
        assert!(matches!(err, Error::Axiom { .. }));
    }

    #[test]
    fn pentagon_table_is_irrational() {
        let t: Vec<Vec<usize>> = (0..5)
            .map(|x: i32| {
                (0..5)
                    .map(|y: i32| ((y - x).rem_euclid(5).min((x - y).rem_euclid(5))) as usize)
                    .collect()
            })
            .collect();
        assert!(matches!(
            build_from_table(&t),
            Err(Error::NonRationalSplitting(_))
        ));
    }

    #[test]
    fn intersection_examples() {
        let z4 = build_group_scheme(&FiniteAbelianGroup::cyclic(4).unwrap()).unwrap();
        assert_eq!(z4.intersection_number(1, 1, 2), 1);
        for s in [z4, build_cycle_scheme(7).unwrap()] {
            let d = s.classes() + 1;
            for j in 0..d {
                for k in 0..d {
                    assert_eq!(s.intersection_number(0, j, k), (j == k) as u64);
                    let q = s.krein_parameter(0, j, k).as_integer().unwrap();
                    assert_eq!(q, ((j == k) as i64).into());
                }
            }
        }
        let c5 = build_cycle_scheme(5).unwrap();
        // z ∈ {±1} with 1 − z ∈ {±1}: none of 1−1=0, 1+1=2 qualifies.
        assert_eq!(c5.intersection_number(1, 1, 1), 0);
        assert_eq!(c5.intersection_number(1, 1, 2), 1);
        assert_eq!(c5.intersection_number(1, 1, 0), 2);
    }

    #[test]
    fn group_scheme_is_self_dual_in_parameters() {
        for k in 2..=6 {
            let s = build_group_scheme(&FiniteAbelianGroup::cyclic(k).unwrap()).unwrap();
            let d = s.classes() + 1;
            for i in 0..d {
                for j in 0..d {
                    for l in 0..d {
                        let q = s.krein_parameter(i, j, l).as_integer().unwrap();
                        assert_eq!(q, (s.intersection_number(i, j, l) as i64).into());
                    }
                }
            }
        }
    }

    #[test]
    fn dual_of_translation_schemes() {
        let c5 = build_cycle_scheme(5).unwrap();
        let d = dual_scheme(&c5).unwrap();
        assert_eq!(d.p_matrix(), c5.q_matrix());
        let t = build_trivial_scheme(3).unwrap();
        let d = dual_scheme(&t).unwrap();
        assert_eq!(d.classes(), 1);
        let g = build_group_scheme(&FiniteAbelianGroup::cyclic(5).unwrap()).unwrap();
        let d = dual_scheme(&g).unwrap();
        assert!(d
            .translation()
            .unwrap()
            .classes
            .iter()
            .all(|c| c.len() == 1));
        let tab = build_from_table(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(dual_scheme(&tab), Err(Error::NotTranslation)));
    }

    #[test]
    fn descriptor_parsing() {
        let d: SchemeDescriptor = serde_json::from_str(r#"{"type":"cycle","k":5}"#).unwrap();
        assert_eq!(d.build().unwrap().classes(), 2);
        let d: SchemeDescriptor =
            serde_json::from_str(r#"{"type":"group","factors":[2,2],"order":[[1,1],[0,1],[1,0]]}"#)
                .unwrap();
        assert_eq!(
            d.build().unwrap().p_matrix()[1][2],
            CyclotomicNumber::from_int(2, -1)
        );
        let d: SchemeDescriptor = serde_json::from_str(
            r#"{"type":"table","size":2,"classes":1,"relation":[[0,1],[1,0]]}"#,
        )
        .unwrap();
        assert_eq!(d.build().unwrap().size(), 2);
        let d: SchemeDescriptor =
            serde_json::from_str(r#"{"type":"trivial","q":4,"factors":[2,2]}"#).unwrap();
        assert_eq!(d.build().unwrap().group().unwrap().factors(), &[2, 2]);
    }
}
