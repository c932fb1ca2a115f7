//! Small dense linear algebra over [`Scalar`] and over integers.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

/// Solves the square system `a x = b`. Returns `None` when `a` is singular.
pub fn solve<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = a.len();
    for col in 0..n {
        let pivot = pick_pivot(&a, col, col)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone() / a[col][col].clone();
            for k in col..n {
                let delta = factor.clone() * a[col][k].clone();
                a[row][k] = a[row][k].clone() - delta;
            }
            let delta = factor * b[col].clone();
            b[row] = b[row].clone() - delta;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc = acc - a[row][k].clone() * x[k].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Some(x)
}

// Exact types take the first nonzero entry; inexact ones take the largest.
fn pick_pivot<T: Scalar>(a: &[Vec<T>], col: usize, from: usize) -> Option<usize> {
    if T::is_exact() {
        (from..a.len()).find(|&r| !a[r][col].is_zero())
    } else {
        let best = (from..a.len()).max_by(|&x, &y| {
            a[x][col]
                .abs()
                .partial_cmp(&a[y][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[best][col].is_zero() {
            None
        } else {
            Some(best)
        }
    }
}

/// Rank of a (possibly rectangular) matrix.
pub fn rank<T: Scalar>(rows: &[Vec<T>]) -> usize {
    let mut a: Vec<Vec<T>> = rows.to_vec();
    if a.is_empty() {
        return 0;
    }
    let cols = a[0].len();
    let mut r = 0;
    for col in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(p) = pick_pivot(&a, col, r) else {
            continue;
        };
        a.swap(r, p);
        for row in r + 1..a.len() {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone() / a[r][col].clone();
            for k in col..cols {
                let delta = factor.clone() * a[r][k].clone();
                a[row][k] = a[row][k].clone() - delta;
            }
        }
        r += 1;
    }
    r
}

/// Determinant of a square integer matrix (fraction-free Bareiss elimination).
pub fn det_integer(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
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

/// Affine dimension of a point set (`-1` encoded as `None` for the empty set).
pub fn affine_dimension(points: &[&[BigInt]]) -> Option<usize> {
    let (first, rest) = points.split_first()?;
    let diffs: Vec<Vec<crate::Rational>> = rest
        .iter()
        .map(|p| {
            p.iter()
                .zip(first.iter())
                .map(|(a, b)| crate::Rational::from_integer(a - b))
                .collect()
        })
        .collect();
    Some(rank(&diffs))
}

/// Primitive integer normal of the hyperplane through `d` points in `R^d`.
/// `None` when the points are affinely dependent.
pub fn hyperplane_normal(points: &[&[BigInt]]) -> Option<Vec<BigInt>> {
    let d = points.first()?.len();
    if points.len() != d {
        return None;
    }
    let base = points[0];
    let diffs: Vec<Vec<BigInt>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base.iter()).map(|(a, b)| a - b).collect())
        .collect();
    let mut normal = Vec::with_capacity(d);
    for j in 0..d {
        let minor: Vec<Vec<BigInt>> = diffs
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let c = det_integer(&minor);
        normal.push(if j % 2 == 0 { c } else { -c });
    }
    let g = normal.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    if g.is_zero() {
        return None;
    }
    Some(normal.into_iter().map(|v| v / &g).collect())
}

pub fn dot_integer(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// `|det|` of the edge matrix of `d+1` integer points in `R^d`.
pub fn simplex_det_abs(points: &[&[BigInt]]) -> BigInt {
    let base = points[0];
    let m: Vec<Vec<BigInt>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base.iter()).map(|(a, b)| a - b).collect())
        .collect();
    det_integer(&m).abs()
}
