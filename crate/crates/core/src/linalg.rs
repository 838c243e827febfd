//! Exact Gaussian elimination over any field implementing [`Field`].

use num::{BigRational, One, Signed, Zero};

/// Minimal field interface used by the elimination routines. Elements carry
/// their own context (e.g. the cyclotomic level), so constants are produced
/// relative to an existing element.
pub trait Field: Clone + PartialEq + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    /// Multiplicative inverse; callers never pass zero.
    fn inv_ref(&self) -> Self;
}

impl Field for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn inv_ref(&self) -> Self {
        self.recip()
    }
}

pub type Matrix<F> = Vec<Vec<F>>;

/// Row-reduces `m` in place to reduced row echelon form and returns the pivot
/// columns.
pub fn rref<F: Field>(m: &mut Matrix<F>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero_elem()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv_ref();
        for j in c..cols {
            m[r][j] = m[r][j].mul_ref(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero_elem() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let d = f.mul_ref(&m[r][j]);
                    m[i][j] = m[i][j].sub_ref(&d);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    let mut work = m.clone();
    rref(&mut work).len()
}

/// Inverse of a square matrix, or `None` when singular.
pub fn invert<F: Field>(m: &Matrix<F>) -> Option<Matrix<F>> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let zero = m[0][0].zero_like();
    let one = m[0][0].one_like();
    let mut aug: Matrix<F> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { one.clone() } else { zero.clone() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `m x = b` for square nonsingular `m`.
pub fn solve<F: Field>(m: &Matrix<F>, b: &[F]) -> Option<Vec<F>> {
    let n = m.len();
    let mut aug: Matrix<F> = m
        .iter()
        .zip(b)
        .map(|(row, v)| {
            let mut r = row.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

/// Basis of the right null space of `m` (vectors `v` with `m v = 0`).
pub fn kernel<F: Field>(m: &Matrix<F>, cols: usize, template: &F) -> Vec<Vec<F>> {
    let mut work = m.clone();
    let pivots = rref(&mut work);
    let zero = template.zero_like();
    let one = template.one_like();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![zero.clone(); cols];
            v[f] = one.clone();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = zero.sub_ref(&work[r][f]);
            }
            v
        })
        .collect()
}

pub fn mat_mul<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    let zero = a[0][0].zero_like();
    (0..a.len())
        .map(|i| {
            (0..b[0].len())
                .map(|j| {
                    a[i].iter()
                        .zip(b.iter())
                        .fold(zero.clone(), |acc, (x, row)| {
                            acc.add_ref(&x.mul_ref(&row[j]))
                        })
                })
                .collect()
        })
        .collect()
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `-p`, or `p/q`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: num::BigInt = n.trim().parse().ok()?;
            let d: num::BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => s.parse::<num::BigInt>().ok().map(BigRational::from_integer),
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    use num::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        // Very large magnitudes only; keep the sign.
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_two_by_two() {
        let m = vec![vec![int(1), int(1)], vec![int(1), int(-1)]];
        let inv = invert(&m).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(
            inv,
            vec![vec![half.clone(), half.clone()], vec![half.clone(), -half]]
        );
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert!(invert(&m).is_none());
        assert_eq!(rank(&m), 1);
        let k = kernel(&m, 2, &int(0));
        assert_eq!(k, vec![vec![int(-2), int(1)]]);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(
            parse_rational("-3/6"),
            Some(BigRational::new((-1).into(), 2.into()))
        );
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(fmt_rational(&BigRational::new(3.into(), 4.into())), "3/4");
    }
}
