//! Shared helpers for the integration and acceptance suites: seeded random
//! systems with pinned Newton polytopes, and an exact linear-programming
//! oracle for extreme points (independent of the facet-enumeration route
//! used by the library).

#![allow(dead_code)]

use amoeba::laurent::{ExponentVector, LaurentPolynomial, PolySystem};
use amoeba::rng::SampleRng;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The line `1 + x + y`.
pub fn line_system() -> PolySystem {
    amoeba::laurent::parse_system(
        "vars: x, y\nf1: 1 + x + y\n",
        &amoeba::laurent::ParseOptions::default(),
    )
    .unwrap()
}

/// Random curve of degree `d` with full `d`-simplex Newton polytope:
/// coefficients are seeded uniform complex numbers, and the three corner
/// monomials are forced nonzero so the polytope is exactly the dilated
/// simplex.
pub fn random_curve(degree: i64, seed: u64) -> PolySystem {
    let mut rng = SampleRng::new(seed);
    let mut terms = Vec::new();
    for i in 0..=degree {
        for j in 0..=(degree - i) {
            let corner = (i == 0 && j == 0) || i == degree || j == degree;
            let mut re = rng.uniform(-2.0, 2.0);
            let mut im = rng.uniform(-2.0, 2.0);
            if corner {
                // keep corners safely away from zero
                re += 3.0 * re.signum();
                im += 0.5 * im.signum();
            } else if rng.next_f64() < 0.2 {
                // some interior monomials absent
                continue;
            }
            terms.push((ExponentVector::new(vec![i, j]), Complex64::new(re, im)));
        }
    }
    let poly = LaurentPolynomial::from_terms(2, terms).unwrap();
    PolySystem::new(vec![poly], vec!["x".into(), "y".into()]).unwrap()
}

/// Two seeded random degree-1 polynomials in four variables (a generic
/// 2-plane in the 4-torus), all coefficients nonzero.
pub fn random_linear_n2(seed: u64) -> PolySystem {
    let mut rng = SampleRng::new(seed);
    let mut polys = Vec::new();
    for _ in 0..2 {
        let mut terms = Vec::new();
        for k in 0..5 {
            let mut exp = vec![0i64; 4];
            if k > 0 {
                exp[k - 1] = 1;
            }
            let re = rng.uniform(0.4, 2.0) * if rng.next_f64() < 0.5 { -1.0 } else { 1.0 };
            let im = rng.uniform(-1.5, 1.5);
            terms.push((ExponentVector::new(exp), Complex64::new(re, im)));
        }
        polys.push(LaurentPolynomial::from_terms(4, terms).unwrap());
    }
    PolySystem::new(polys, vec!["x".into(), "y".into(), "z".into(), "w".into()]).unwrap()
}

/// Seeded random point set in `Z^dim`.
pub fn random_points(dim: usize, count: usize, bound: i64, seed: u64) -> Vec<Vec<i64>> {
    let mut rng = SampleRng::new(seed);
    (0..count)
        .map(|_| {
            (0..dim)
                .map(|_| rng.uniform(-(bound as f64), bound as f64 + 1.0).floor() as i64)
                .collect()
        })
        .collect()
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Exact test whether `p` lies in the convex hull of `points`, by phase-one
/// simplex over rationals on `sum l_i q_i = p, sum l_i = 1, l >= 0`
/// (Bland's rule, so it terminates).
pub fn in_convex_hull_lp(p: &[i64], points: &[Vec<i64>]) -> bool {
    let dim = p.len();
    let rows = dim + 1;
    let cols = points.len();
    if cols == 0 {
        return false;
    }

    // tableau rows: [A | I | b] with artificial identity; objective is the
    // sum of artificials
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = (0..cols)
                .map(|c| if r < dim { rat(points[c][r]) } else { rat(1) })
                .collect();
            row.extend((0..rows).map(|k| if k == r { rat(1) } else { rat(0) }));
            row.push(if r < dim { rat(p[r]) } else { rat(1) });
            row
        })
        .collect();

    // make b nonnegative
    for row in a.iter_mut() {
        if row.last().unwrap().is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            // re-fix the artificial column sign by rebuilding it below
        }
    }
    // rebuild artificial columns as a clean identity after sign flips
    for (r, row) in a.iter_mut().enumerate() {
        for k in 0..rows {
            row[cols + k] = if k == r { rat(1) } else { rat(0) };
        }
    }

    let total_cols = cols + rows; // excluding b
    let mut basis: Vec<usize> = (cols..total_cols).collect();

    loop {
        // reduced costs for objective = sum of artificial variables:
        // cost row = sum of rows whose basic variable is artificial
        let mut reduced = vec![BigRational::zero(); total_cols];
        let mut objective = BigRational::zero();
        for (r, row) in a.iter().enumerate() {
            if basis[r] >= cols {
                for c in 0..total_cols {
                    reduced[c] += row[c].clone();
                }
                objective += row[total_cols].clone();
            }
        }
        // entering column: Bland, smallest non-artificial index with
        // positive reduced cost
        let entering = (0..cols).find(|&c| !basis.contains(&c) && reduced[c].is_positive());
        let Some(entering) = entering else {
            return objective.is_zero();
        };
        // ratio test; Bland breaks ties by smallest basic-variable index
        let mut pivot_row: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for (r, row) in a.iter().enumerate() {
            if row[entering].is_positive() {
                let ratio = row[total_cols].clone() / row[entering].clone();
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b
                            || (ratio == *b
                                && basis[r] < basis[pivot_row.expect("tie implies a row")])
                    }
                };
                if better {
                    best = Some(ratio);
                    pivot_row = Some(r);
                }
            }
        }
        let Some(pr) = pivot_row else {
            // unbounded phase-one cannot happen; fail closed
            return false;
        };
        // pivot
        let pivot = a[pr][entering].clone();
        for v in a[pr].iter_mut() {
            *v = v.clone() / pivot.clone();
        }
        for r in 0..rows {
            if r == pr {
                continue;
            }
            let factor = a[r][entering].clone();
            if factor.is_zero() {
                continue;
            }
            let pivot_row_copy = a[pr].clone();
            for (v, pv) in a[r].iter_mut().zip(&pivot_row_copy) {
                let delta = factor.clone() * pv.clone();
                *v -= delta;
            }
        }
        basis[pr] = entering;
    }
}

/// Extreme points of a set by the LP oracle: `p` is extreme iff it is not in
/// the hull of the others.
pub fn extreme_points_lp(points: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut distinct = points.to_vec();
    distinct.sort();
    distinct.dedup();
    let mut out = Vec::new();
    for (i, p) in distinct.iter().enumerate() {
        let others: Vec<Vec<i64>> = distinct
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, q)| q.clone())
            .collect();
        if !in_convex_hull_lp(p, &others) {
            out.push(p.clone());
        }
    }
    out.sort();
    out
}

/// `BigRational` needs `One` in scope for ratio math above.
fn _assert_one() {
    let _ = BigRational::one();
}
