//! Exact convex hulls in dimension <= 4 by exhaustive facet enumeration.
//!
//! Every facet hyperplane of a full-dimensional polytope passes through `d`
//! affinely independent input points, so enumerating all `d`-subsets,
//! keeping the supporting ones, and certifying each input point against the
//! active facet normals yields the exact vertex set. Volumes come from a
//! pulling triangulation: cone a base vertex over recursively triangulated
//! facets and sum absolute edge-matrix determinants.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::par;

use super::exact::{
    binomial, det, dot, for_each_combination, hyperplane_normal, overflow, rank, reduce_hyperplane,
    Int,
};

/// Cap on the number of candidate facet subsets; beyond this the exhaustive
/// search is not desk-scale any more.
const MAX_SUBSETS: u128 = 40_000_000;

pub(crate) struct HullData<T> {
    /// Supporting hyperplanes `(normal, offset)` with `<normal, p> <= offset`
    /// for every point.
    pub facets: Vec<(Vec<T>, T)>,
    /// Indices of input points that are vertices, ascending.
    pub vertices: Vec<usize>,
}

/// Greedy selection of coordinate columns on which the difference vectors of
/// `pts` have full rank; the projection to those columns is injective on the
/// affine span. Returns `(affine_rank, columns)`.
pub(crate) fn affine_columns<T: Int>(pts: &[Vec<T>]) -> Result<(usize, Vec<usize>)> {
    let dim = pts[0].len();
    let diffs: Vec<Vec<T>> = pts[1..]
        .iter()
        .map(|p| {
            p.iter()
                .zip(&pts[0])
                .map(|(a, b)| a.checked_sub(b).ok_or_else(overflow))
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;
    let mut cols: Vec<usize> = Vec::new();
    let mut current_rank = 0;
    for c in 0..dim {
        let mut trial = cols.clone();
        trial.push(c);
        let sub: Vec<Vec<T>> = diffs
            .iter()
            .map(|row| trial.iter().map(|&j| row[j].clone()).collect())
            .collect();
        let r = rank(sub)?;
        if r > current_rank {
            cols.push(c);
            current_rank = r;
        }
        if current_rank == dim {
            break;
        }
    }
    Ok((current_rank, cols))
}

fn project<T: Int>(pts: &[Vec<T>], cols: &[usize]) -> Vec<Vec<T>> {
    pts.iter()
        .map(|p| cols.iter().map(|&c| p[c].clone()).collect())
        .collect()
}

/// Facets and vertices of a point set with full affine dimension `d >= 2`.
pub(crate) fn hull_full_dim<T: Int>(pts: &[Vec<T>]) -> Result<HullData<T>> {
    let m = pts.len();
    let d = pts[0].len();
    debug_assert!(d >= 2);
    if binomial(m, d) > MAX_SUBSETS {
        return Err(Error::TooManyPoints { points: m, dim: d });
    }

    // Parallel over the smallest subset index; each task walks the remaining
    // (d-1)-combinations. Results are merged through an ordered set, so the
    // outcome is independent of scheduling.
    let chunks: Vec<Result<Vec<(Vec<T>, T)>>> = par::map_indexed(m.saturating_sub(d - 1), |i0| {
        let mut found: Vec<(Vec<T>, T)> = Vec::new();
        let rest = m - i0 - 1;
        for_each_combination_offset(rest, d - 1, i0 + 1, |tail| {
            let mut subset: Vec<&[T]> = Vec::with_capacity(d);
            subset.push(&pts[i0]);
            for &j in tail {
                subset.push(&pts[j]);
            }
            match supporting_hyperplane(pts, &subset) {
                Ok(Some(h)) => found.push(h),
                Ok(None) => {}
                Err(_) => found.push((Vec::new(), T::zero())), // overflow marker
            }
        });
        if found.iter().any(|(n, _)| n.is_empty()) {
            Err(overflow())
        } else {
            Ok(found)
        }
    });

    let mut facet_set: BTreeSet<(Vec<T>, T)> = BTreeSet::new();
    for chunk in chunks {
        for h in chunk? {
            facet_set.insert(h);
        }
    }
    let facets: Vec<(Vec<T>, T)> = facet_set.into_iter().collect();

    let mut vertices = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let active: Vec<Vec<T>> = facets
            .iter()
            .filter(|(n, c)| dot(n, p).map(|v| v == *c).unwrap_or(false))
            .map(|(n, _)| n.clone())
            .collect();
        if active.len() >= d && rank(active)? == d {
            vertices.push(i);
        }
    }
    Ok(HullData { facets, vertices })
}

/// Like `for_each_combination(rest, k, ..)` but with indices shifted by
/// `offset`.
fn for_each_combination_offset(rest: usize, k: usize, offset: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 {
        f(&[]);
        return;
    }
    for_each_combination(rest, k, |idx| {
        let shifted: Vec<usize> = idx.iter().map(|&i| i + offset).collect();
        f(&shifted);
    });
}

/// If the hyperplane through `subset` supports `pts`, return its reduced
/// inward form; `None` when the subset is degenerate or the plane cuts the
/// point set.
fn supporting_hyperplane<T: Int>(pts: &[Vec<T>], subset: &[&[T]]) -> Result<Option<(Vec<T>, T)>> {
    let mut normal = hyperplane_normal(subset)?;
    if normal.iter().all(|x| x.is_zero()) {
        return Ok(None);
    }
    let mut offset = dot(&normal, subset[0])?;
    let mut any_pos = false;
    let mut any_neg = false;
    for p in pts {
        match dot(&normal, p)?
            .checked_sub(&offset)
            .ok_or_else(overflow)?
            .signum_i()
        {
            1 => any_pos = true,
            -1 => any_neg = true,
            _ => {}
        }
        if any_pos && any_neg {
            return Ok(None);
        }
    }
    if any_pos {
        for x in normal.iter_mut() {
            *x = x.neg();
        }
        offset = offset.neg();
    }
    reduce_hyperplane(&mut normal, &mut offset);
    Ok(Some((normal, offset)))
}

/// Indices of the extreme points of an arbitrary distinct point set.
pub(crate) fn hull_vertex_indices<T: Int>(pts: &[Vec<T>]) -> Result<Vec<usize>> {
    if pts.len() == 1 {
        return Ok(vec![0]);
    }
    let (aff_rank, cols) = affine_columns(pts)?;
    if aff_rank == 0 {
        // distinct points cannot all coincide
        unreachable!("distinct points with affine rank 0");
    }
    let ppts = project(pts, &cols);
    if aff_rank == 1 {
        let lo = (0..pts.len()).min_by_key(|&i| ppts[i].clone()).unwrap();
        let hi = (0..pts.len()).max_by_key(|&i| ppts[i].clone()).unwrap();
        let mut v = vec![lo, hi];
        v.sort_unstable();
        return Ok(v);
    }
    Ok(hull_full_dim(&ppts)?.vertices)
}

/// Pulling triangulation of a distinct point set of any affine dimension;
/// returns simplices as index lists into `pts` (each of length
/// `affine_dim + 1`).
pub(crate) fn triangulate<T: Int>(pts: &[Vec<T>]) -> Result<Vec<Vec<usize>>> {
    if pts.len() == 1 {
        return Ok(vec![vec![0]]);
    }
    let (aff_rank, cols) = affine_columns(pts)?;
    let ppts = project(pts, &cols);
    if aff_rank == 1 {
        let lo = (0..pts.len()).min_by_key(|&i| ppts[i].clone()).unwrap();
        let hi = (0..pts.len()).max_by_key(|&i| ppts[i].clone()).unwrap();
        return Ok(vec![vec![lo, hi]]);
    }
    let hull = hull_full_dim(&ppts)?;
    // canonical base: vertex with lexicographically smallest coordinates
    let base = *hull
        .vertices
        .iter()
        .min_by_key(|&&i| ppts[i].clone())
        .expect("full-dimensional hull has vertices");
    let mut simplices = Vec::new();
    for (normal, offset) in &hull.facets {
        if dot(normal, &ppts[base])? == *offset {
            continue;
        }
        let face_idx: Vec<usize> = (0..ppts.len())
            .filter(|&i| dot(normal, &ppts[i]).map(|v| v == *offset).unwrap_or(false))
            .collect();
        let face_pts: Vec<Vec<T>> = face_idx.iter().map(|&i| ppts[i].clone()).collect();
        for face_simplex in triangulate(&face_pts)? {
            let mut simplex: Vec<usize> = face_simplex.into_iter().map(|i| face_idx[i]).collect();
            simplex.push(base);
            simplices.push(simplex);
        }
    }
    Ok(simplices)
}

/// `dim! * EuclideanVolume` of the hull of a distinct point set; zero when
/// the set is lower-dimensional.
pub(crate) fn normalized_volume_impl<T: Int>(pts: &[Vec<T>]) -> Result<T> {
    let dim = pts[0].len();
    if pts.len() <= dim {
        return Ok(T::zero());
    }
    let (aff_rank, _) = affine_columns(pts)?;
    if aff_rank < dim {
        return Ok(T::zero());
    }
    let mut total = T::zero();
    for simplex in triangulate(pts)? {
        debug_assert_eq!(simplex.len(), dim + 1);
        let edges: Vec<Vec<T>> = simplex[1..]
            .iter()
            .map(|&i| {
                pts[i]
                    .iter()
                    .zip(&pts[simplex[0]])
                    .map(|(a, b)| a.checked_sub(b).ok_or_else(overflow))
                    .collect::<Result<Vec<T>>>()
            })
            .collect::<Result<_>>()?;
        let mut v = det(&edges)?;
        if v.signum_i() < 0 {
            v = v.neg();
        }
        total = total.checked_add(&v).ok_or_else(overflow)?;
    }
    Ok(total)
}
