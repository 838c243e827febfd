//! Minimal-degree multivariate interpolation over ℚ: μ(S) by the rank
//! formula, the de Boor–Ron least space, interpolants, and grid embeddings
//! that bound μ from above with an explicit basis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, fmt_rational, parse_rational};

pub type Point = Vec<BigRational>;

/// Exponent vectors of total degree `k` in `s` variables, larger leading
/// exponents first.
pub fn monomials_of_degree(s: usize, k: u32) -> Vec<Vec<u32>> {
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for v in (0..=left).rev() {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, out);
        }
    }
    let mut out = Vec::new();
    if s == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, k, &mut vec![0; s], &mut out);
    out
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// k!/β! for |β| = k.
fn multinomial(beta: &[u32]) -> BigInt {
    let k: u32 = beta.iter().sum();
    beta.iter().fold(factorial(k), |acc, &b| acc / factorial(b))
}

fn power(z: &BigRational, e: u32) -> BigRational {
    num::pow(z.clone(), e as usize)
}

fn monomial_value(point: &[BigRational], beta: &[u32]) -> BigRational {
    point
        .iter()
        .zip(beta)
        .fold(BigRational::one(), |acc, (z, &b)| acc * power(z, b))
}

/// Sparse polynomial with rational coefficients in variables x1, …, xs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Poly {
    pub fn zero(vars: usize) -> Self {
        Poly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: BigRational) -> Self {
        let mut p = Poly::zero(vars);
        p.add_term(vec![0; vars], c);
        p
    }

    /// The coordinate function x_{i+1}.
    pub fn var(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        let mut p = Poly::zero(vars);
        p.add_term(e, BigRational::one());
        p
    }

    pub fn from_terms(
        vars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>,
    ) -> Self {
        let mut p = Poly::zero(vars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        self.terms.retain(|_, v| !v.is_zero());
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; −1 for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>() as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        self.terms.iter().fold(BigRational::zero(), |acc, (e, c)| {
            acc + c * monomial_value(point, e)
        })
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.vars);
        }
        Poly {
            vars: self.vars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let entry = out.terms.entry(e).or_insert_with(BigRational::zero);
                *entry += ca * cb;
            }
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    /// Terms in display order: by degree descending, then lexicographically.
    fn ordered_terms(&self) -> Vec<(&Vec<u32>, &BigRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let (da, db) = (a.iter().sum::<u32>(), b.iter().sum::<u32>());
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.ordered_terms().into_iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(j, &p)| {
                    if p == 1 {
                        format!("x{}", j + 1)
                    } else {
                        format!("x{}^{p}", j + 1)
                    }
                })
                .collect();
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if mono.is_empty() {
                write!(f, "{}", fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&mag), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Serialised as a list of [exponents, "p/q"] pairs.
impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<(&Vec<u32>, String)> = self
            .terms
            .iter()
            .map(|(e, c)| (e, fmt_rational(c)))
            .collect();
        (self.vars, v).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (vars, v): (usize, Vec<(Vec<u32>, String)>) = Deserialize::deserialize(d)?;
        let mut p = Poly::zero(vars);
        for (e, c) in v {
            if e.len() != vars {
                return Err(serde::de::Error::custom("exponent length mismatch"));
            }
            let c = parse_rational(&c)
                .ok_or_else(|| serde::de::Error::custom(format!("bad rational {c:?}")))?;
            p.add_term(e, c);
        }
        Ok(p)
    }
}

/// Finite set of distinct points in ℚˢ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for p in &points {
            if p.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if !seen.insert(p.clone()) {
                let shown: Vec<String> = p.iter().map(fmt_rational).collect();
                return Err(Error::InvalidParameter(format!(
                    "repeated point ({})",
                    shown.join(",")
                )));
            }
        }
        Ok(PointSet { dim, points })
    }

    pub fn empty(dim: usize) -> Self {
        PointSet {
            dim,
            points: Vec::new(),
        }
    }

    pub fn from_integers(dim: usize, points: &[Vec<i64>]) -> Result<Self> {
        PointSet::new(
            dim,
            points
                .iter()
                .map(|p| p.iter().map(|&x| linalg::int(x)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Image under x ↦ A·x + b.
    pub fn map_affine(&self, a: &[Vec<BigRational>], b: &[BigRational]) -> Result<PointSet> {
        let mapped = self.points.iter().map(|p| apply_affine(a, b, p)).collect();
        PointSet::new(a.len(), mapped)
    }
}

fn apply_affine(a: &[Vec<BigRational>], b: &[BigRational], p: &[BigRational]) -> Point {
    a.iter()
        .zip(b)
        .map(|(row, off)| {
            row.iter()
                .zip(p)
                .fold(off.clone(), |acc, (x, y)| acc + x * y)
        })
        .collect()
}

/// Row of Taylor-type coefficients k!/β!·z^β of a point over all monomials
/// of degree exactly k.
fn degree_block(point: &[BigRational], monos: &[Vec<u32>]) -> Vec<BigRational> {
    monos
        .iter()
        .map(|b| BigRational::from_integer(multinomial(b)) * monomial_value(point, b))
        .collect()
}

/// μ(S): the least m for which the polynomials Σ_{k≤m} (z·ξ)^k, z ∈ S, are
/// linearly independent. Returns −1 for the empty set.
pub fn mu_rank(s: &PointSet) -> i64 {
    let n = s.len();
    if n == 0 {
        return -1;
    }
    let mut rows: Vec<Vec<BigRational>> = vec![Vec::new(); n];
    for m in 0..n as u32 {
        let monos = monomials_of_degree(s.dim, m);
        for (row, p) in rows.iter_mut().zip(&s.points) {
            row.extend(degree_block(p, &monos));
        }
        if linalg::rank(&rows) == n {
            return m as i64;
        }
    }
    unreachable!("mu(S) <= |S| - 1 for distinct points")
}

/// The de Boor–Ron least space of S with its degree μ(S).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeastSpace {
    points: PointSet,
    basis: Vec<Poly>,
    mu: i64,
    /// Inverse of the evaluation matrix E[i][j] = basis_j(point_i).
    eval_inverse: Vec<Vec<BigRational>>,
}

impl LeastSpace {
    pub fn basis(&self) -> &[Poly] {
        &self.basis
    }

    pub fn mu(&self) -> i64 {
        self.mu
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Least space by Gaussian elimination by degree segments on the Taylor
/// coefficients of exp(z·ξ), z ∈ S, truncated at degree |S| − 1.
pub fn least_space(s: &PointSet) -> Result<LeastSpace> {
    let n = s.len();
    if n == 0 {
        return Err(Error::InvalidParameter(
            "least space of the empty set".into(),
        ));
    }
    // transform[r] expresses active row r as a combination of the exponentials.
    let mut transform: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut basis = Vec::with_capacity(n);
    let mut k = 0u32;
    while !transform.is_empty() {
        if k as usize >= n {
            return Err(Error::Invariant(format!(
                "least space needs degree above |S| - 1 = {}",
                n - 1
            )));
        }
        let monos = monomials_of_degree(s.dim, k);
        let evals: Vec<Vec<BigRational>> =
            s.points.iter().map(|p| degree_block(p, &monos)).collect();
        let width = monos.len();
        let mut aug: Vec<Vec<BigRational>> = transform
            .iter()
            .map(|t| {
                let mut row: Vec<BigRational> = (0..width)
                    .map(|c| {
                        t.iter()
                            .zip(&evals)
                            .fold(BigRational::zero(), |acc, (w, e)| acc + w * &e[c])
                    })
                    .collect();
                row.extend(t.iter().cloned());
                row
            })
            .collect();
        // eliminate on the block columns only
        let rows = aug.len();
        let mut r = 0;
        for c in 0..width {
            let Some(p) = (r..rows).find(|&i| !aug[i][c].is_zero()) else {
                continue;
            };
            aug.swap(r, p);
            let inv = aug[r][c].recip();
            for v in aug[r].iter_mut() {
                *v *= &inv;
            }
            for i in 0..rows {
                if i != r && !aug[i][c].is_zero() {
                    let f = aug[i][c].clone();
                    let pivot_row = aug[r].clone();
                    for (x, y) in aug[i].iter_mut().zip(pivot_row) {
                        *x -= &f * y;
                    }
                }
            }
            r += 1;
            if r == rows {
                break;
            }
        }
        for row in &aug[..r] {
            basis.push(Poly::from_terms(
                s.dim,
                monos.iter().cloned().zip(row[..width].iter().cloned()),
            ));
        }
        transform = aug[r..].iter().map(|row| row[width..].to_vec()).collect();
        k += 1;
    }
    let mu = basis.iter().map(Poly::degree).max().unwrap_or(-1);
    let e: Vec<Vec<BigRational>> = s
        .points
        .iter()
        .map(|p| basis.iter().map(|b| b.eval(p)).collect())
        .collect();
    let eval_inverse = linalg::invert(&e)
        .ok_or_else(|| Error::Invariant("least space evaluation matrix is singular".into()))?;
    Ok(LeastSpace {
        points: s.clone(),
        basis,
        mu,
        eval_inverse,
    })
}

/// The unique g in the space with g(zᵢ) = values[i], in point order.
pub fn interpolate(space: &LeastSpace, values: &[BigRational]) -> Result<Poly> {
    let n = space.points.len();
    if values.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: values.len(),
        });
    }
    let coeffs: Vec<BigRational> = space
        .eval_inverse
        .iter()
        .map(|row| {
            row.iter()
                .zip(values)
                .fold(BigRational::zero(), |acc, (a, v)| acc + a * v)
        })
        .collect();
    let g = space
        .basis
        .iter()
        .zip(&coeffs)
        .fold(Poly::zero(space.points.dim), |acc, (b, c)| {
            acc.add(&b.scale(c))
        });
    for (p, v) in space.points.points.iter().zip(values) {
        if &g.eval(p) != v {
            return Err(Error::Invariant(
                "interpolant misses a prescribed value".into(),
            ));
        }
    }
    Ok(g)
}

/// Values keyed by point, reordered to match the space.
pub fn interpolate_map(space: &LeastSpace, values: &BTreeMap<Point, BigRational>) -> Result<Poly> {
    if values.len() != space.points.len() {
        return Err(Error::InvalidParameter(
            "values must be keyed exactly by S".into(),
        ));
    }
    let ordered = space
        .points
        .points
        .iter()
        .map(|p| {
            values
                .get(p)
                .cloned()
                .ok_or_else(|| Error::InvalidParameter("values must be keyed exactly by S".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    interpolate(space, &ordered)
}

mod rational_strings {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        m: &[Vec<BigRational>],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Vec<String>> = m
            .iter()
            .map(|r| r.iter().map(fmt_rational).collect())
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Vec<BigRational>>, D::Error> {
        let v: Vec<Vec<serde_json::Value>> = Vec::deserialize(d)?;
        v.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| rational_from_json(&x).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

/// Accepts JSON integers or strings "p/q".
pub fn rational_from_json(v: &serde_json::Value) -> std::result::Result<BigRational, String> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(linalg::int)
            .ok_or_else(|| format!("non-integer number {n}; write rationals as \"p/q\"")),
        serde_json::Value::String(s) => {
            parse_rational(s).ok_or_else(|| format!("bad rational {s:?}"))
        }
        other => Err(format!("expected a rational, got {other}")),
    }
}

/// σ(x) = A·x + b together with per-axis node lists z_{i0}, z_{i1}, … and a
/// degree bound m.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridEmbedding {
    #[serde(with = "rational_strings")]
    pub matrix: Vec<Vec<BigRational>>,
    #[serde(default, with = "offset_strings")]
    pub offset: Vec<BigRational>,
    #[serde(with = "rational_strings")]
    pub nodes: Vec<Vec<BigRational>>,
    pub bound: u32,
}

mod offset_strings {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &[BigRational],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = v.iter().map(fmt_rational).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<BigRational>, D::Error> {
        let v: Vec<serde_json::Value> = Vec::deserialize(d)?;
        v.iter()
            .map(|x| rational_from_json(x).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl GridEmbedding {
    pub fn new(matrix: Vec<Vec<BigRational>>, nodes: Vec<Vec<BigRational>>, bound: u32) -> Self {
        let dim = matrix.len();
        GridEmbedding {
            matrix,
            offset: vec![BigRational::zero(); dim],
            nodes,
            bound,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// σ(p); an empty offset (as allowed in files) means b = 0.
    pub fn apply(&self, p: &[BigRational]) -> Point {
        if self.offset.is_empty() {
            let zero = vec![BigRational::zero(); self.dim()];
            return apply_affine(&self.matrix, &zero, p);
        }
        apply_affine(&self.matrix, &self.offset, p)
    }

    fn validate(&self, dim: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::Embedding(msg));
        if self.matrix.len() != dim || self.matrix.iter().any(|r| r.len() != dim) {
            return bad(format!("sigma must be a {dim}x{dim} matrix"));
        }
        if !self.offset.is_empty() && self.offset.len() != dim {
            return bad(format!("offset must have {dim} entries"));
        }
        if linalg::rank(&self.matrix) != dim {
            return bad("sigma is not invertible".into());
        }
        if self.nodes.len() != dim {
            return bad(format!("need node lists for {dim} axes"));
        }
        for (i, axis) in self.nodes.iter().enumerate() {
            let distinct: BTreeSet<&BigRational> = axis.iter().collect();
            if distinct.len() != axis.len() {
                return bad(format!("repeated node scalar on axis {}", i + 1));
            }
        }
        Ok(())
    }
}

/// Outcome of a verified grid embedding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCertificate {
    pub bound: u32,
    /// max |α| over σ(S).
    pub attained: u32,
    /// Grid index α of σ(z) for each z ∈ S, in point order.
    pub grid_indices: Vec<Vec<u32>>,
    /// f_α in σ-coordinates, in point order, when materialised.
    pub basis: Option<Vec<Poly>>,
}

/// Checks σ(S) ⊆ {z_α : |α| ≤ m} and returns m as an upper bound for μ(S).
/// With `materialize`, builds f_α = g_α − Σ_{|β|>|α|} g_α(z_β) f_β and
/// checks f_α(z_γ) = δ_{αγ} on σ(S).
pub fn grid_upper_bound(
    s: &PointSet,
    emb: &GridEmbedding,
    materialize: bool,
) -> Result<GridCertificate> {
    emb.validate(s.dim)?;
    let mut grid_indices = Vec::with_capacity(s.len());
    let mut images = Vec::with_capacity(s.len());
    for p in &s.points {
        let img = emb.apply(p);
        let alpha = img
            .iter()
            .zip(&emb.nodes)
            .map(|(z, axis)| axis.iter().position(|n| n == z).map(|l| l as u32))
            .collect::<Option<Vec<u32>>>();
        let show = |v: &[BigRational]| v.iter().map(fmt_rational).collect::<Vec<_>>().join(",");
        let Some(alpha) = alpha else {
            return Err(Error::Embedding(format!(
                "sigma({}) = ({}) is not a grid node",
                show(p),
                show(&img)
            )));
        };
        let weight: u32 = alpha.iter().sum();
        if weight > emb.bound {
            return Err(Error::Embedding(format!(
                "sigma({}) = ({}) has grid degree {weight} > {}",
                show(p),
                show(&img),
                emb.bound
            )));
        }
        grid_indices.push(alpha);
        images.push(img);
    }
    let attained = grid_indices
        .iter()
        .map(|a| a.iter().sum())
        .max()
        .unwrap_or(0);
    let basis = if materialize {
        Some(constructive_basis(
            s.dim,
            &emb.nodes,
            &grid_indices,
            &images,
        )?)
    } else {
        None
    };
    Ok(GridCertificate {
        bound: emb.bound,
        attained,
        grid_indices,
        basis,
    })
}

fn constructive_basis(
    dim: usize,
    nodes: &[Vec<BigRational>],
    alphas: &[Vec<u32>],
    images: &[Point],
) -> Result<Vec<Poly>> {
    // g_α = Π_i Π_{ℓ<α_i} (ξ_i − z_{iℓ}) / (z_{iα_i} − z_{iℓ})
    let g: Vec<Poly> = alphas
        .iter()
        .map(|alpha| {
            let mut p = Poly::constant(dim, BigRational::one());
            for (i, &a) in alpha.iter().enumerate() {
                let target = &nodes[i][a as usize];
                for l in 0..a as usize {
                    let z = &nodes[i][l];
                    let denom = (target - z).recip();
                    let factor = Poly::var(dim, i)
                        .sub(&Poly::constant(dim, z.clone()))
                        .scale(&denom);
                    p = p.mul(&factor);
                }
            }
            p
        })
        .collect();
    let weight = |a: &Vec<u32>| a.iter().sum::<u32>();
    let mut order: Vec<usize> = (0..alphas.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(weight(&alphas[i])));
    let mut f: Vec<Option<Poly>> = vec![None; alphas.len()];
    for &a in &order {
        let mut fa = g[a].clone();
        for &b in &order {
            if weight(&alphas[b]) <= weight(&alphas[a]) {
                continue;
            }
            let c = g[a].eval(&images[b]);
            if !c.is_zero() {
                fa = fa.sub(&f[b].as_ref().expect("higher levels built first").scale(&c));
            }
        }
        f[a] = Some(fa);
    }
    let f: Vec<Poly> = f.into_iter().map(Option::unwrap).collect();
    for (a, fa) in f.iter().enumerate() {
        for (c, img) in images.iter().enumerate() {
            let expected = if a == c {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            if fa.eval(img) != expected {
                return Err(Error::Invariant(
                    "constructed basis is not dual to the grid points".into(),
                ));
            }
        }
    }
    Ok(f)
}
