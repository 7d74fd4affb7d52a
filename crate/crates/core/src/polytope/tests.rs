use proptest::prelude::*;

use super::*;
use crate::laurent::{parse_system, ParseOptions};

fn hull(points: &[&[i64]]) -> LatticePolytope {
    convex_hull(&points.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn verts(p: &LatticePolytope) -> Vec<Vec<i64>> {
    p.vertices().to_vec()
}

/// 2! * area of a polygon given by its vertex set, via the shoelace formula
/// on the angularly sorted boundary. Independent of the facet-enumeration
/// route used by the implementation.
fn shoelace_nvol(vertices: &[Vec<i64>]) -> u64 {
    if vertices.len() < 3 {
        return 0;
    }
    let cx: f64 = vertices.iter().map(|v| v[0] as f64).sum::<f64>() / vertices.len() as f64;
    let cy: f64 = vertices.iter().map(|v| v[1] as f64).sum::<f64>() / vertices.len() as f64;
    let mut ordered = vertices.to_vec();
    ordered.sort_by(|a, b| {
        let ta = (a[1] as f64 - cy).atan2(a[0] as f64 - cx);
        let tb = (b[1] as f64 - cy).atan2(b[0] as f64 - cx);
        ta.partial_cmp(&tb).unwrap()
    });
    let mut twice_area: i64 = 0;
    for i in 0..ordered.len() {
        let a = &ordered[i];
        let b = &ordered[(i + 1) % ordered.len()];
        twice_area += a[0] * b[1] - b[0] * a[1];
    }
    twice_area.unsigned_abs()
}

#[test]
fn hull_drops_interior_and_duplicate_points() {
    let p = hull(&[&[0, 0], &[1, 0], &[0, 1], &[0, 0]]);
    assert_eq!(verts(&p), vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
}

#[test]
fn hull_collinear_keeps_endpoints() {
    let p = hull(&[&[0, 0], &[1, 1], &[2, 2]]);
    assert_eq!(verts(&p), vec![vec![0, 0], vec![2, 2]]);
}

#[test]
fn hull_one_dimensional_input() {
    let p = hull(&[&[0], &[2], &[1]]);
    assert_eq!(verts(&p), vec![vec![0], vec![2]]);
}

#[test]
fn hull_rejects_empty_and_guards_dimension() {
    assert!(matches!(convex_hull(&[]), Err(Error::EmptyPointSet)));
    let five_d = vec![vec![0i64; 5], vec![1i64; 5]];
    assert!(matches!(
        convex_hull(&five_d),
        Err(Error::DimensionGuard { dim: 5, max: 4 })
    ));
}

fn unit_triangle() -> LatticePolytope {
    hull(&[&[0, 0], &[1, 0], &[0, 1]])
}

fn unit_square() -> LatticePolytope {
    hull(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
}

#[test]
fn minkowski_identity_element() {
    let tri = unit_triangle();
    let origin = hull(&[&[0, 0]]);
    assert_eq!(minkowski_sum(&tri, &origin).unwrap(), tri);
}

#[test]
fn minkowski_difference_body_is_hexagon() {
    let tri = unit_triangle();
    let hex = minkowski_sum(&tri, &tri.negated()).unwrap();
    let mut expected = vec![
        vec![1, 0],
        vec![0, 1],
        vec![-1, 1],
        vec![-1, 0],
        vec![0, -1],
        vec![1, -1],
    ];
    expected.sort_unstable();
    assert_eq!(verts(&hex), expected);
}

#[test]
fn minkowski_segments_make_square() {
    let horizontal = hull(&[&[0, 0], &[1, 0]]);
    let vertical = hull(&[&[0, 0], &[0, 1]]);
    assert_eq!(
        minkowski_sum(&horizontal, &vertical).unwrap(),
        unit_square()
    );
}

#[test]
fn negate_examples() {
    let tri = unit_triangle();
    assert_eq!(
        verts(&tri.negated()),
        vec![vec![-1, 0], vec![0, -1], vec![0, 0]]
    );
    let hex = minkowski_sum(&tri, &tri.negated()).unwrap();
    assert_eq!(hex.negated(), hex);
}

#[test]
fn normalized_volume_examples() {
    assert_eq!(normalized_volume(&unit_triangle()).unwrap(), 1);
    let cube = convex_hull(
        &(0..8)
            .map(|i| vec![i & 1, (i >> 1) & 1, (i >> 2) & 1])
            .collect::<Vec<_>>(),
    )
    .unwrap();
    assert_eq!(normalized_volume(&cube).unwrap(), 6);
    let tri = unit_triangle();
    let hex = minkowski_sum(&tri, &tri.negated()).unwrap();
    assert_eq!(normalized_volume(&hex).unwrap(), 6);
    assert_eq!(shoelace_nvol(hex.vertices()), 6);
}

#[test]
fn normalized_volume_lower_dimensional_is_zero() {
    let seg = hull(&[&[0, 0], &[3, 3]]);
    assert_eq!(normalized_volume(&seg).unwrap(), 0);
}

#[test]
fn simplex_4d_volume() {
    let simplex = convex_hull(&[
        vec![0, 0, 0, 0],
        vec![1, 0, 0, 0],
        vec![0, 1, 0, 0],
        vec![0, 0, 1, 0],
        vec![0, 0, 0, 1],
    ])
    .unwrap();
    assert_eq!(normalized_volume(&simplex).unwrap(), 1);
}

#[test]
fn mixed_volume_examples() {
    let tri = unit_triangle();
    assert_eq!(mixed_volume(&[tri.clone(), tri.clone()]).unwrap(), 1);
    assert_eq!(mixed_volume(&[tri.negated(), tri.clone()]).unwrap(), 2);
    // by hand: nvol(2K) - 2 nvol(K) = 8 - 4, over 2!
    let sq = unit_square();
    assert_eq!(mixed_volume(&[sq.clone(), sq]).unwrap(), 2);
}

#[test]
fn mixed_volume_of_equal_arguments_is_normalized_volume() {
    let tri = unit_triangle();
    let hex = minkowski_sum(&tri, &tri.negated()).unwrap();
    assert_eq!(
        mixed_volume(&[hex.clone(), hex.clone()]).unwrap(),
        normalized_volume(&hex).unwrap()
    );
}

#[test]
fn degrees_of_the_line() {
    let sys = parse_system("vars: x, y\nf1: 1 + x + y\n", &ParseOptions::default()).unwrap();
    let d = conj_degrees(&sys).unwrap();
    assert_eq!(d, Degrees { alpha: 1, beta: 2 });
}

#[test]
fn degrees_scale_quadratically_for_dilated_curves() {
    let sys = parse_system(
        "vars: x, y\nf1: 1 + x^2 + y^2 + x*y + x + y\n",
        &ParseOptions::default(),
    )
    .unwrap();
    let d = conj_degrees(&sys).unwrap();
    assert_eq!(d, Degrees { alpha: 4, beta: 8 });
}

fn arb_points_2d() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-5i64..=5, 2), 3..9)
}

proptest! {
    // shoelace is an independent oracle for the 2D volume route
    #[test]
    fn volume_matches_shoelace_in_2d(points in arb_points_2d()) {
        let p = convex_hull(&points).unwrap();
        prop_assert_eq!(normalized_volume(&p).unwrap(), shoelace_nvol(p.vertices()));
    }

    #[test]
    fn negate_is_an_involution(points in arb_points_2d()) {
        let p = convex_hull(&points).unwrap();
        prop_assert_eq!(p.negated().negated(), p);
    }

    #[test]
    fn hull_is_idempotent(points in arb_points_2d()) {
        let p = convex_hull(&points).unwrap();
        let again = convex_hull(p.vertices()).unwrap();
        prop_assert_eq!(p, again);
    }
}
