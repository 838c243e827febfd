//! Integer diagonalisation with unimodular transforms, used for additive
//! codes: U·A·V = D with D diagonal, V and V⁻¹ both tracked.

use num::{BigInt, Integer, One, Signed, Zero};

pub struct Diagonalization {
    /// Diagonal entries d_0, …, d_{r-1} (nonzero, r = rank).
    pub diagonal: Vec<BigInt>,
    /// Column transform V (cols × cols).
    pub v: Vec<Vec<BigInt>>,
    /// V⁻¹.
    pub v_inv: Vec<Vec<BigInt>>,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Diagonalises `a` (rows × cols) by row and column operations. Row
/// operations are not recorded; callers only need the column side.
pub fn diagonalize(mut a: Vec<Vec<BigInt>>, cols: usize) -> Diagonalization {
    let rows = a.len();
    let mut v = identity(cols);
    let mut v_inv = identity(cols);
    let mut diagonal = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        swap_cols(&mut a, &mut v, &mut v_inv, t, pj);
        loop {
            let mut changed = false;
            // clear column t below the pivot
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let d = &q * &a[t][j];
                    a[i][j] -= d;
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    changed = true;
                }
            }
            // clear row t right of the pivot
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                add_col_multiple(&mut a, &mut v, &mut v_inv, j, t, &q);
                if !a[t][j].is_zero() {
                    swap_cols(&mut a, &mut v, &mut v_inv, t, j);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        diagonal.push(a[t][t].clone());
        t += 1;
    }
    Diagonalization { diagonal, v, v_inv }
}

fn swap_cols(
    a: &mut [Vec<BigInt>],
    v: &mut [Vec<BigInt>],
    v_inv: &mut [Vec<BigInt>],
    x: usize,
    y: usize,
) {
    if x == y {
        return;
    }
    for row in a.iter_mut() {
        row.swap(x, y);
    }
    for row in v.iter_mut() {
        row.swap(x, y);
    }
    v_inv.swap(x, y);
}

/// col_j -= q·col_t, mirrored on V and V⁻¹.
fn add_col_multiple(
    a: &mut [Vec<BigInt>],
    v: &mut [Vec<BigInt>],
    v_inv: &mut [Vec<BigInt>],
    j: usize,
    t: usize,
    q: &BigInt,
) {
    for row in a.iter_mut() {
        let d = q * &row[t];
        row[j] -= d;
    }
    for row in v.iter_mut() {
        let d = q * &row[t];
        row[j] -= d;
    }
    // V ← V·E with E = I − q e_t e_jᵀ, so V⁻¹ ← E⁻¹ V⁻¹: row_t += q·row_j.
    let rj = v_inv[j].clone();
    for (x, y) in v_inv[t].iter_mut().zip(rj) {
        *x += q * y;
    }
}
