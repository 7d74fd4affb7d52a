//! Exact lattice-polytope geometry: hulls, Minkowski sums, normalized and
//! mixed volumes, and the conj/conj' intersection degrees of a
//! half-dimensional system.
//!
//! All arithmetic is exact: 128-bit signed integers with overflow detection,
//! escalating to arbitrary precision when a computation leaves the 128-bit
//! range. Mixed volumes are normalized so that the mixed volume of the
//! Newton polytopes of a generic system equals its number of torus roots.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::PolySystem;
use crate::par;

mod exact;
mod hull;

use exact::Int;

/// Default bound on the ambient dimension; the exhaustive facet enumeration
/// is intended for desk-scale inputs.
pub const MAX_DIM: usize = 4;

/// A lattice polytope stored as its minimal vertex set, sorted
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<Vec<i64>>,
}

impl LatticePolytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// The reflection through the origin, `-P`.
    pub fn negated(&self) -> LatticePolytope {
        let mut vertices: Vec<Vec<i64>> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| -x).collect())
            .collect();
        vertices.sort_unstable();
        LatticePolytope {
            dim: self.dim,
            vertices,
        }
    }
}

fn validate_points(points: &[Vec<i64>], max_dim: usize) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let dim = points[0].len();
    if dim == 0 {
        return Err(Error::InvalidInput("zero-dimensional points".into()));
    }
    if dim > max_dim {
        return Err(Error::DimensionGuard { dim, max: max_dim });
    }
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch(
            "points of differing dimension".into(),
        ));
    }
    Ok(dim)
}

fn to_t<T: Int>(points: &[Vec<i64>]) -> Vec<Vec<T>> {
    points
        .iter()
        .map(|p| p.iter().map(|&x| T::from_i64(x)).collect())
        .collect()
}

/// Run the i128 path and rerun over `BigInt` if it overflows.
fn with_escalation<R>(
    narrow: impl FnOnce() -> Result<R>,
    wide: impl FnOnce() -> Result<R>,
) -> Result<R> {
    match narrow() {
        Err(Error::ArithmeticOverflow) => wide(),
        other => other,
    }
}

/// Convex hull of an integer point set (dimension at most [`MAX_DIM`]).
pub fn convex_hull(points: &[Vec<i64>]) -> Result<LatticePolytope> {
    convex_hull_guarded(points, MAX_DIM)
}

/// Convex hull with a caller-chosen dimension guard.
pub fn convex_hull_guarded(points: &[Vec<i64>], max_dim: usize) -> Result<LatticePolytope> {
    let dim = validate_points(points, max_dim)?;
    let mut distinct: Vec<Vec<i64>> = points.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let idx = with_escalation(
        || hull::hull_vertex_indices(&to_t::<i128>(&distinct)),
        || hull::hull_vertex_indices(&to_t::<BigInt>(&distinct)),
    )?;
    let vertices: Vec<Vec<i64>> = idx.into_iter().map(|i| distinct[i].clone()).collect();
    // distinct is sorted and idx ascending, so vertices are already sorted
    Ok(LatticePolytope { dim, vertices })
}

/// Minkowski sum: hull of all pairwise vertex sums.
pub fn minkowski_sum(p: &LatticePolytope, q: &LatticePolytope) -> Result<LatticePolytope> {
    if p.dim != q.dim {
        return Err(Error::DimensionMismatch(format!(
            "Minkowski sum of polytopes of dimension {} and {}",
            p.dim, q.dim
        )));
    }
    let mut sums = Vec::with_capacity(p.vertices.len() * q.vertices.len());
    for a in &p.vertices {
        for b in &q.vertices {
            let s: Option<Vec<i64>> = a.iter().zip(b).map(|(x, y)| x.checked_add(*y)).collect();
            sums.push(s.ok_or(Error::ArithmeticOverflow)?);
        }
    }
    convex_hull_guarded(&sums, p.dim)
}

/// `dim! * EuclideanVolume(P)`, an exact nonnegative integer; zero iff `P`
/// is lower-dimensional.
pub fn normalized_volume(p: &LatticePolytope) -> Result<u64> {
    let pts = &p.vertices;
    let value = with_escalation(
        || {
            hull::normalized_volume_impl(&to_t::<i128>(pts))
                .map(|v| u64::try_from(v).map_err(|_| Error::ArithmeticOverflow))?
        },
        || {
            hull::normalized_volume_impl(&to_t::<BigInt>(pts))
                .map(|v| v.to_u64().ok_or(Error::ArithmeticOverflow))?
        },
    )?;
    Ok(value)
}

/// Mixed volume of `dim` polytopes in dimension `dim`, normalized so that
/// `mixed_volume(P, ..., P) == normalized_volume(P)`, via
/// inclusion-exclusion over subset Minkowski sums. The alternating sum is
/// checked to be divisible by `dim!`.
pub fn mixed_volume(ps: &[LatticePolytope]) -> Result<u64> {
    if ps.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let dim = ps[0].dim;
    if dim > MAX_DIM {
        return Err(Error::DimensionGuard { dim, max: MAX_DIM });
    }
    if ps.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "mixed volume needs exactly {} polytopes in dimension {}, got {}",
            dim,
            dim,
            ps.len()
        )));
    }
    if ps.iter().any(|p| p.dim != dim) {
        return Err(Error::DimensionMismatch(
            "mixed volume arguments of differing dimension".into(),
        ));
    }

    // The 2^dim - 1 inclusion-exclusion terms are independent.
    let n_subsets = (1usize << dim) - 1;
    let terms: Vec<Result<(u32, u64)>> = par::map_indexed(n_subsets, |t| {
        let mask = t + 1;
        let members: Vec<&LatticePolytope> = (0..dim)
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| &ps[k])
            .collect();
        let mut sum = members[0].clone();
        for q in &members[1..] {
            sum = minkowski_sum(&sum, q)?;
        }
        Ok((members.len() as u32, normalized_volume(&sum)?))
    });

    let mut acc: i128 = 0;
    for term in terms {
        let (card, vol) = term?;
        let sign = if (dim as u32 - card).is_multiple_of(2) {
            1
        } else {
            -1
        };
        acc = acc
            .checked_add(sign * vol as i128)
            .ok_or(Error::ArithmeticOverflow)?;
    }
    let factorial: i128 = (1..=dim as i128).product();
    if acc.rem_euclid(factorial) != 0 || acc < 0 {
        return Err(Error::MixedVolumeNotIntegral {
            sum: acc.to_string(),
            dim,
            factorial: factorial.to_string(),
        });
    }
    Ok((acc / factorial) as u64)
}

/// The pair of intersection degrees of a half-dimensional complete
/// intersection: `alpha` counts intersections with the coordinatewise
/// conjugate of the variety, `beta` with its inverse conjugate. Both are
/// mixed volumes of Newton polytopes; `beta` is always even.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Degrees {
    pub alpha: u64,
    pub beta: u64,
}

/// Compute the degrees from the Newton polytopes of the system: `alpha` is
/// the mixed volume of each polytope taken twice, `beta` the mixed volume of
/// the negated polytopes together with the originals.
pub fn conj_degrees(system: &PolySystem) -> Result<Degrees> {
    let deltas = system.newton_polytopes()?;
    let mut doubled = deltas.clone();
    doubled.extend(deltas.iter().cloned());
    let alpha = mixed_volume(&doubled)?;
    let mut mirrored: Vec<LatticePolytope> = deltas.iter().map(|p| p.negated()).collect();
    mirrored.extend(deltas.iter().cloned());
    let beta = mixed_volume(&mirrored)?;
    if beta % 2 != 0 {
        return Err(Error::OddBeta(beta));
    }
    Ok(Degrees { alpha, beta })
}

#[cfg(test)]
mod tests;
