//! Small sets with hand-checked structure, shared across unit tests.

use crate::point::Point;
use crate::valueset::ValueSet;

/// Two coordinate lines through a node: {(0,0)} u ((1,1) + N^2).
pub fn e2l() -> ValueSet {
    ValueSet::from_points(
        2,
        &[Point::from([0, 0]), Point::from([1, 1])],
        Point::from([1, 1]),
    )
    .expect("fixture is valid")
}

/// {0} u ((1,1,1) + N^3).
pub fn e3a() -> ValueSet {
    ValueSet::from_points(
        3,
        &[Point::from([0, 0, 0]), Point::from([1, 1, 1])],
        Point::from([1, 1, 1]),
    )
    .expect("fixture is valid")
}

/// Three concurrent coplanar lines:
/// {0} u {(1,1,k),(1,k,1),(k,1,1) : k >= 1} u ((2,2,2) + N^3).
pub fn e3c() -> ValueSet {
    ValueSet::from_points(
        3,
        &[
            Point::from([0, 0, 0]),
            Point::from([1, 1, 1]),
            Point::from([1, 1, 2]),
            Point::from([1, 2, 1]),
            Point::from([2, 1, 1]),
            Point::from([2, 2, 2]),
        ],
        Point::from([2, 2, 2]),
    )
    .expect("fixture is valid")
}

/// The numerical set S = {0, 2, 3, 4, ...}.
pub fn numerical_s() -> ValueSet {
    ValueSet::from_points(1, &[Point::from([0]), Point::from([2])], Point::from([2]))
        .expect("fixture is valid")
}

/// The product S x S.
pub fn prod_ss() -> ValueSet {
    ValueSet::from_points(
        2,
        &[
            Point::from([0, 0]),
            Point::from([0, 2]),
            Point::from([2, 0]),
            Point::from([2, 2]),
        ],
        Point::from([2, 2]),
    )
    .expect("fixture is valid")
}

/// The product S x S x S.
pub fn prod_sss() -> ValueSet {
    let mut pts = Vec::new();
    for x in [0, 2] {
        for y in [0, 2] {
            for z in [0, 2] {
                pts.push(Point::from([x, y, z]));
            }
        }
    }
    ValueSet::from_points(3, &pts, Point::from([2, 2, 2])).expect("fixture is valid")
}

/// N^r, minimum and conductor both at the origin.
pub fn naturals(r: usize) -> ValueSet {
    let zero = Point::new(vec![0; r]);
    ValueSet::from_points(r, &[zero.clone()], zero).expect("fixture is valid")
}

/// Two relative maximals (1,2,0) and (2,1,0) sharing level 0, adjacent, with
/// their join (2,2,0) an absolute maximal. Last-coordinate slices:
/// z = 0 is {(0,0)} u {(1,y) : y >= 1} u {(x,1) : x >= 2} u {(2,2)},
/// z >= 1 is {(0,0), (1,1), (1,2), (2,1)} u ((3,3) + N^2).
pub fn e3_rm_pair() -> ValueSet {
    ValueSet::from_points(
        3,
        &[
            Point::from([0, 0, 0]),
            Point::from([1, 1, 0]),
            Point::from([1, 2, 0]),
            Point::from([1, 3, 0]),
            Point::from([2, 1, 0]),
            Point::from([2, 2, 0]),
            Point::from([3, 1, 0]),
            Point::from([0, 0, 1]),
            Point::from([1, 1, 1]),
            Point::from([1, 2, 1]),
            Point::from([2, 1, 1]),
            Point::from([3, 3, 1]),
        ],
        Point::from([3, 3, 1]),
    )
    .expect("fixture is valid")
}
