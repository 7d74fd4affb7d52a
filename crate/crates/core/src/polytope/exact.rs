//! Exact integer kernels for the polytope code: determinants, ranks and
//! normal vectors over a signed integer type.
//!
//! Everything runs in checked `i128` first; on overflow the caller reruns
//! the whole computation over `BigInt`, which cannot overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub(crate) trait Int: Clone + Ord + std::fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn checked_add(&self, o: &Self) -> Option<Self>;
    fn checked_sub(&self, o: &Self) -> Option<Self>;
    fn checked_mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
    /// Division known to be exact (Bareiss pivots, gcd reduction).
    fn div_exact(&self, o: &Self) -> Self;
    fn gcd(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn signum_i(&self) -> i8;
}

impl Int for i128 {
    fn zero() -> Self {
        0
    }
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn checked_add(&self, o: &Self) -> Option<Self> {
        i128::checked_add(*self, *o)
    }
    fn checked_sub(&self, o: &Self) -> Option<Self> {
        i128::checked_sub(*self, *o)
    }
    fn checked_mul(&self, o: &Self) -> Option<Self> {
        i128::checked_mul(*self, *o)
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn div_exact(&self, o: &Self) -> Self {
        debug_assert!(*o != 0 && self % o == 0);
        self / o
    }
    fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.abs(), o.abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn signum_i(&self) -> i8 {
        match self.cmp(&0) {
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => 1,
        }
    }
}

impl Int for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn checked_add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn checked_sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn checked_mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Self {
        debug_assert!(!Zero::is_zero(o) && Zero::is_zero(&(self % o)));
        self / o
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn signum_i(&self) -> i8 {
        if Zero::is_zero(self) {
            0
        } else if self.is_negative() {
            -1
        } else {
            1
        }
    }
}

pub(crate) fn overflow() -> Error {
    Error::ArithmeticOverflow
}

pub(crate) fn dot<T: Int>(a: &[T], b: &[T]) -> Result<T> {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        let p = x.checked_mul(y).ok_or_else(overflow)?;
        acc = acc.checked_add(&p).ok_or_else(overflow)?;
    }
    Ok(acc)
}

/// Determinant by cofactor expansion; fine for the n <= 4 sizes used here.
pub(crate) fn det<T: Int>(m: &[Vec<T>]) -> Result<T> {
    let n = m.len();
    debug_assert!(m.iter().all(|r| r.len() == n));
    match n {
        0 => Ok(T::from_i64(1)),
        1 => Ok(m[0][0].clone()),
        2 => {
            let a = m[0][0].checked_mul(&m[1][1]).ok_or_else(overflow)?;
            let b = m[0][1].checked_mul(&m[1][0]).ok_or_else(overflow)?;
            a.checked_sub(&b).ok_or_else(overflow)
        }
        _ => {
            let mut acc = T::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<T>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][j].checked_mul(&det(&minor)?).ok_or_else(overflow)?;
                acc = if j % 2 == 0 {
                    acc.checked_add(&term).ok_or_else(overflow)?
                } else {
                    acc.checked_sub(&term).ok_or_else(overflow)?
                };
            }
            Ok(acc)
        }
    }
}

/// Rank via fraction-free Gaussian elimination (Bareiss).
pub(crate) fn rank<T: Int>(mut m: Vec<Vec<T>>) -> Result<usize> {
    let rows = m.len();
    if rows == 0 {
        return Ok(0);
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut prev_pivot = T::from_i64(1);
    let mut col = 0;
    while rank < rows && col < cols {
        let Some(pivot_row) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            col += 1;
            continue;
        };
        m.swap(rank, pivot_row);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let a = m[rank][col].checked_mul(&m[r][c]).ok_or_else(overflow)?;
                let b = m[r][col].checked_mul(&m[rank][c]).ok_or_else(overflow)?;
                let num = a.checked_sub(&b).ok_or_else(overflow)?;
                m[r][c] = num.div_exact(&prev_pivot);
            }
            m[r][col] = T::zero();
        }
        prev_pivot = m[rank][col].clone();
        rank += 1;
        col += 1;
    }
    Ok(rank)
}

/// Normal of the hyperplane through `d` affinely independent points in
/// dimension `d`, as the cofactor vector of the `(d-1) x d` difference
/// matrix. Returns the zero vector when the points are affinely dependent.
pub(crate) fn hyperplane_normal<T: Int>(points: &[&[T]]) -> Result<Vec<T>> {
    let d = points[0].len();
    debug_assert_eq!(points.len(), d);
    let diffs: Vec<Vec<T>> = points[1..]
        .iter()
        .map(|p| {
            p.iter()
                .zip(points[0])
                .map(|(a, b)| a.checked_sub(b).ok_or_else(overflow))
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;
    let mut normal = Vec::with_capacity(d);
    for j in 0..d {
        let minor: Vec<Vec<T>> = diffs
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let cof = det(&minor)?;
        normal.push(if j % 2 == 0 { cof } else { cof.neg() });
    }
    Ok(normal)
}

/// Divide a normal/offset pair by the gcd of all entries.
pub(crate) fn reduce_hyperplane<T: Int>(normal: &mut [T], offset: &mut T) {
    let mut g = offset.clone();
    if g.signum_i() < 0 {
        g = g.neg();
    }
    for x in normal.iter() {
        g = g.gcd(x);
    }
    if g.is_zero() || g == T::from_i64(1) {
        return;
    }
    for x in normal.iter_mut() {
        *x = x.div_exact(&g);
    }
    *offset = offset.div_exact(&g);
}

/// Visit all `k`-combinations of `0..m` in lexicographic order.
pub(crate) fn for_each_combination(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 || k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Number of `k`-combinations, saturating.
pub(crate) fn binomial(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((m - i) as u128) / (i as u128 + 1);
    }
    acc
}
