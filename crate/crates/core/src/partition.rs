//! The partition of corner positions `(x0 mod 1, y0 mod 1)` by shape class.
//!
//! Corners producing class `j` fill the parallelogram with base point
//! `(1/2 - bj/det, 1/2 - aj/det)` and edges `(b, a)/det` and `(-d, -c)/det`,
//! together with its integer translates. Each cell has area `1/|det|`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digitizer::{to_i64, Point, Slopes};
use crate::numerics::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("({0}, {1}) lies on a cell boundary")]
    OnBoundary(Rational, Rational),
    #[error("({0}, {1}) is not covered by any cell")]
    Uncovered(Rational, Rational),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vector {
    pub x: Rational,
    pub y: Rational,
}

impl Vector {
    pub fn new(x: Rational, y: Rational) -> Self {
        Vector { x, y }
    }

    pub fn cross(&self, other: &Vector) -> Rational {
        self.x * other.y - self.y * other.x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parallelogram {
    pub index: i64,
    /// Base corner reduced into the unit square.
    pub base: Point,
    pub edge1: Vector,
    pub edge2: Vector,
}

impl Parallelogram {
    /// `base`, `base + edge1`, `base + edge1 + edge2`, `base + edge2`.
    pub fn corners(&self) -> [Point; 4] {
        let p = |s: i64, t: i64| {
            Point::new(
                self.base.x + self.edge1.x.mul_int(s) + self.edge2.x.mul_int(t),
                self.base.y + self.edge1.y.mul_int(s) + self.edge2.y.mul_int(t),
            )
        };
        [p(0, 0), p(1, 0), p(1, 1), p(0, 1)]
    }

    pub fn area(&self) -> Rational {
        self.edge1.cross(&self.edge2).abs()
    }

    /// Coordinates `(s, t)` with `p = base + s*edge1 + t*edge2`.
    pub fn local_coords(&self, p: Point) -> (Rational, Rational) {
        let rel = Vector::new(p.x - self.base.x, p.y - self.base.y);
        let det = self.edge1.cross(&self.edge2);
        (rel.cross(&self.edge2) / det, self.edge1.cross(&rel) / det)
    }

    /// Integer shifts `(m, n)` for which the translated cell can meet the unit square.
    pub fn shifts_meeting_unit_square(&self) -> Vec<(i64, i64)> {
        let cs = self.corners();
        let span = |f: fn(&Point) -> Rational| {
            let lo = cs.iter().map(f).min().unwrap();
            let hi = cs.iter().map(f).max().unwrap();
            // m with [lo + m, hi + m] overlapping [0, 1]
            (to_i64((-hi).floor()), to_i64((Rational::ONE - lo).ceil()))
        };
        let (mx0, mx1) = span(|p| p.x);
        let (my0, my1) = span(|p| p.y);
        (my0..=my1)
            .flat_map(|n| (mx0..=mx1).map(move |m| (m, n)))
            .collect()
    }
}

fn mod_one(p: Point) -> Point {
    Point::new(p.x.fract(), p.y.fract())
}

/// The `|ad - bc|` cells, in class order.
///
/// With `det = ad - bc` signed, the cell for class `j` is the image of
/// `alpha in (-1, 0], beta in (j - 1, j]` under the inverse corner map; for
/// positive `det` this is the familiar corner list with `D = det`.
pub fn partition_unit_square(slopes: &Slopes) -> Vec<Parallelogram> {
    let det = slopes.determinant();
    let r = |n: i64| Rational::new(n as i128, det as i128);
    let edge1 = Vector::new(r(slopes.b()), r(slopes.a()));
    let edge2 = Vector::new(r(-slopes.d()), r(-slopes.c()));
    (0..slopes.class_count())
        .map(|j| {
            let base = Point::new(
                Rational::HALF - r(slopes.b() * j),
                Rational::HALF - r(slopes.a() * j),
            );
            Parallelogram {
                index: j,
                base: mod_one(base),
                edge1,
                edge2,
            }
        })
        .collect()
}

/// Which cell contains `p` modulo 1.
///
/// Points on a cell edge are refused rather than assigned.
pub fn locate_in_partition(cells: &[Parallelogram], p: Point) -> Result<i64, PartitionError> {
    let q = mod_one(p);
    let (zero, one) = (Rational::ZERO, Rational::ONE);
    let mut found = None;
    for cell in cells {
        let (s0, t0) = cell.local_coords(q);
        let origin = cell.local_coords(Point::new(Rational::ZERO, Rational::ZERO));
        for (m, n) in cell.shifts_meeting_unit_square() {
            // q lies in cell + (m, n) iff q - (m, n) lies in cell; local
            // coordinates are affine, so only the shift's offset is recomputed.
            let (sm, tm) = cell.local_coords(Point::new(Rational::from(m), Rational::from(n)));
            let (s, t) = (s0 - (sm - origin.0), t0 - (tm - origin.1));
            let inside_closed = s >= zero && s <= one && t >= zero && t <= one;
            if !inside_closed {
                continue;
            }
            if s == zero || s == one || t == zero || t == one {
                return Err(PartitionError::OnBoundary(q.x, q.y));
            }
            found.get_or_insert(cell.index);
        }
    }
    found.ok_or(PartitionError::Uncovered(q.x, q.y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digitizer::AngleSpec;
    use crate::shapes::class_index;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn case_p() -> Slopes {
        Slopes::new(2, 1, -3, 1).unwrap()
    }

    #[test]
    fn first_cell_corners() {
        let cells = partition_unit_square(&case_p());
        let want = [
            Point::new(r(1, 2), r(1, 2)),
            Point::new(r(7, 10), r(9, 10)),
            Point::new(r(1, 2), r(3, 2)),
            Point::new(r(3, 10), r(11, 10)),
        ];
        assert_eq!(cells[0].corners(), want);
    }

    #[test]
    fn cell_bases_are_reduced() {
        let cells = partition_unit_square(&case_p());
        // 1/2 - 2/5 = 1/10 and 1/2 - 4/5 = -3/10 -> 7/10
        assert_eq!(cells[2].base, Point::new(r(1, 10), r(7, 10)));
        for c in &cells {
            assert!(c.base.x >= Rational::ZERO && c.base.x < Rational::ONE);
        }
    }

    #[test]
    fn areas() {
        for s in [case_p(), Slopes::new(3, -1, -1, 2).unwrap()] {
            for c in partition_unit_square(&s) {
                assert_eq!(c.area(), r(1, 5));
            }
        }
        let negative = Slopes::new(1, 1, 1, -2).unwrap();
        assert_eq!(negative.determinant(), -3);
        let cells = partition_unit_square(&negative);
        assert_eq!(cells.len(), 3);
        assert!(cells.iter().all(|c| c.area() == r(1, 3)));
    }

    #[test]
    fn locate_agrees_with_class_index_on_a_grid() {
        for s in [case_p(), Slopes::new(1, 1, 1, -2).unwrap(), Slopes::new(3, 2, -1, 4).unwrap()] {
            let cells = partition_unit_square(&s);
            for i in 0..37 {
                for j in 0..37 {
                    let p = Point::new(r(2 * i + 1, 74), r(2 * j + 1, 74));
                    match locate_in_partition(&cells, p) {
                        Ok(k) => assert_eq!(k, class_index(&AngleSpec::new(s, p)), "{p:?}"),
                        Err(PartitionError::OnBoundary(..)) => {}
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn figure_points_sit_on_boundaries() {
        let cells = partition_unit_square(&case_p());
        let p = Point::new(r(1, 10), r(7, 10));
        assert!(matches!(locate_in_partition(&cells, p), Err(PartitionError::OnBoundary(..))));
    }

    #[test]
    fn json_uses_rational_strings() {
        let cells = partition_unit_square(&case_p());
        let v = serde_json::to_value(cells[1]).unwrap();
        assert_eq!(v["base"]["x"], "3/10");
        assert_eq!(v["edge1"]["x"], "1/5");
        assert_eq!(v["edge2"]["y"], "3/5");
    }
}
