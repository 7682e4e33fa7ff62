//! Exact integer and rational matrix routines: determinants, inverses,
//! Hermite and Smith normal forms.
//!
//! Matrices are plain row-major `Vec<Vec<_>>`; all dimensions in this crate
//! are small (n <= 24) so no attempt is made at asymptotically fast methods.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn identity_int(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn int_from_i64(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn rat_from_int(m: &IntMatrix) -> RatMatrix {
    m.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
}

pub fn mul_int(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let k = b.len();
    let cols = if k == 0 { 0 } else { b[0].len() };
    a.iter().map(|row| (0..cols).map(|j| (0..k).fold(BigInt::zero(), |acc, t| acc + &row[t] * &b[t][j])).collect()).collect()
}

pub fn mul_rat(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let k = b.len();
    let cols = if k == 0 { 0 } else { b[0].len() };
    a.iter().map(|row| (0..cols).map(|j| (0..k).fold(BigRational::zero(), |acc, t| acc + &row[t] * &b[t][j])).collect()).collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Fraction-free (Bareiss) determinant of a square integer matrix.
pub fn det_int(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Least common multiple of all denominators.
pub fn common_denominator(m: &RatMatrix) -> BigInt {
    m.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Returns `(d, d*m)` with `d*m` integral and `d` minimal.
pub fn clear_denominators(m: &RatMatrix) -> (BigInt, IntMatrix) {
    let d = common_denominator(m);
    let int = m.iter().map(|r| r.iter().map(|x| x.numer() * (&d / x.denom())).collect()).collect();
    (d, int)
}

pub fn det_rat(m: &RatMatrix) -> BigRational {
    let n = m.len();
    let (d, int) = clear_denominators(m);
    let num = det_int(&int);
    BigRational::new(num, num_traits::pow(d, n))
}

/// Gauss-Jordan inverse over the rationals; `None` if singular.
pub fn inverse_rat(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: RatMatrix = m.clone();
    let mut inv: RatMatrix =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(piv, col);
        inv.swap(piv, col);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[i][j] -= t;
                    let t = &f * &inv[col][j];
                    inv[i][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

fn row_sub_mul(m: &mut IntMatrix, target: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let src_row = m[src].clone();
    for (t, s) in m[target].iter_mut().zip(src_row.iter()) {
        *t -= q * s;
    }
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// The result has one row per unit of rank, is upper triangular (in the
/// echelon sense), pivots are positive and entries above each pivot lie in
/// `[0, pivot)`.
pub fn hnf(rows: &IntMatrix) -> IntMatrix {
    let mut a: IntMatrix = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    if a.is_empty() {
        return a;
    }
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        loop {
            // smallest nonzero |a[i][c]| for i >= r
            let piv = (r..a.len()).filter(|&i| !a[i][c].is_zero()).min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()));
            let Some(p) = piv else { break };
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..a.len() {
                if !a[i][c].is_zero() {
                    let q = a[i][c].div_floor(&a[r][c]);
                    row_sub_mul(&mut a, i, r, &q);
                    if !a[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < a.len() && !a[r][c].is_zero() {
            if a[r][c].is_negative() {
                for x in a[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let q = a[i][c].div_floor(&a[r][c]);
                row_sub_mul(&mut a, i, r, &q);
            }
            r += 1;
        }
    }
    a.truncate(r);
    a.retain(|row| row.iter().any(|x| !x.is_zero()));
    a
}

/// Smith normal form `U * B * V = D` of an integer matrix.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal of `D`; trailing zeros for rank-deficient input.
    pub diagonal: Vec<BigInt>,
}

pub fn snf(b: &IntMatrix) -> Snf {
    let rows = b.len();
    let cols = if rows == 0 { 0 } else { b[0].len() };
    let mut a = b.clone();
    let mut u = identity_int(rows);
    let mut v = identity_int(cols);

    fn col_sub_mul(m: &mut IntMatrix, target: usize, src: usize, q: &BigInt) {
        for row in m.iter_mut() {
            let s = row[src].clone();
            row[target] -= q * s;
        }
    }
    fn swap_cols(m: &mut IntMatrix, i: usize, j: usize) {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
    }

    let steps = rows.min(cols);
    let mut t = 0;
    while t < steps {
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()));
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);

        let mut clean = true;
        for i in t + 1..rows {
            if !a[i][t].is_zero() {
                let q = a[i][t].div_floor(&a[t][t]);
                row_sub_mul(&mut a, i, t, &q);
                row_sub_mul(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
        }
        for j in t + 1..cols {
            if !a[t][j].is_zero() {
                let q = a[t][j].div_floor(&a[t][t]);
                col_sub_mul(&mut a, j, t, &q);
                col_sub_mul(&mut v, j, t, &q);
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        // divisibility condition on the remaining block
        let bad = (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
        if let Some((i, _)) = bad {
            let (ui, ai) = (u[i].clone(), a[i].clone());
            for (x, y) in a[t].iter_mut().zip(ai) {
                *x += y;
            }
            for (x, y) in u[t].iter_mut().zip(ui) {
                *x += y;
            }
            continue;
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }
    let diagonal = (0..steps).map(|i| a[i][i].clone()).collect();
    Snf { u, v, diagonal }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn bareiss_matches_known_determinants() {
        assert_eq!(det_int(&m(&[&[3, -2, 1], &[1, 3, -2], &[-2, 1, 3]])), BigInt::from(38));
        assert_eq!(det_int(&m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(det_int(&m(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    #[test]
    fn hnf_of_stacked_generators() {
        let h = hnf(&m(&[&[1, 1], &[2, 0], &[0, 2]]));
        assert_eq!(h, m(&[&[1, 1], &[0, 2]]));
    }

    #[test]
    fn snf_small_cases() {
        let s = snf(&m(&[&[2, 0], &[1, 1]]));
        assert_eq!(s.diagonal, vec![BigInt::from(1), BigInt::from(2)]);
        let b = m(&[&[2, 0], &[1, 1]]);
        let d = mul_int(&mul_int(&s.u, &b), &s.v);
        assert_eq!(d, m(&[&[1, 0], &[0, 2]]));
        assert_eq!(snf(&m(&[&[2, 0], &[0, 4]])).diagonal, vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(snf(&m(&[&[4, 0], &[0, 6]])).diagonal, vec![BigInt::from(2), BigInt::from(12)]);
    }

    #[test]
    fn rational_inverse() {
        let a = rat_from_int(&m(&[&[2, 1], &[1, 1]]));
        let inv = inverse_rat(&a).unwrap();
        let id = mul_rat(&a, &inv);
        assert_eq!(id, rat_from_int(&identity_int(2)));
    }
}
