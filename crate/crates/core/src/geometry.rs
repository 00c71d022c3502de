//! Planar points, directional sectors and the `inrange` predicate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(Scalar::from_int(x), Scalar::from_int(y))
    }

    pub fn origin() -> Self {
        Point::from_ints(0, 0)
    }

    pub fn dist_sq(&self, other: &Point) -> Scalar {
        let dx = &other.x - &self.x;
        let dy = &other.y - &self.y;
        dx.square() + dy.square()
    }

    pub fn sub(&self, other: &Point) -> Vector {
        Vector { x: &self.x - &other.x, y: &self.y - &other.y }
    }

    /// `self + dir * k`
    pub fn offset(&self, dir: &Vector, k: &Scalar) -> Point {
        Point::new(&self.x + &(&dir.x * k), &self.y + &(&dir.y * k))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vector {
    pub x: Scalar,
    pub y: Scalar,
}

impl Vector {
    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn cross(&self, other: &Vector) -> Scalar {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn neg(&self) -> Vector {
        Vector { x: -self.x.clone(), y: -self.y.clone() }
    }
}

/// An angle measured in multiples of π, so that the common directions
/// (0, π/2, π, ...) are exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(pub Scalar);

impl Angle {
    pub fn zero() -> Self {
        Angle(Scalar::zero())
    }

    pub fn half_turn() -> Self {
        Angle(Scalar::one())
    }

    pub fn full_turn() -> Self {
        Angle(Scalar::from_int(2))
    }

    pub fn pi_multiple(&self) -> &Scalar {
        &self.0
    }

    /// Reduce into `[0, 2π)`.
    pub fn normalized(&self) -> Angle {
        let two = Scalar::from_int(2);
        let turns = (self.0.clone() / two.clone()).floor();
        Angle(self.0.clone() - turns * two)
    }

    pub fn is_valid_direction(&self) -> bool {
        !self.0.is_negative() && self.0 < Scalar::from_int(2)
    }

    pub fn is_valid_width(&self) -> bool {
        self.0.is_positive() && self.0 <= Scalar::from_int(2)
    }

    /// A vector pointing in this direction. Exact for multiples of π/4;
    /// other angles go through f64 trigonometry and are then treated as
    /// exact from that point on.
    pub fn direction(&self) -> Vector {
        let a = self.normalized().0;
        let quarter_steps = a.clone() * Scalar::from_int(4);
        if quarter_steps.is_integer() {
            let k = quarter_steps.to_f64() as i64;
            let (x, y) = match k.rem_euclid(8) {
                0 => (1, 0),
                1 => (1, 1),
                2 => (0, 1),
                3 => (-1, 1),
                4 => (-1, 0),
                5 => (-1, -1),
                6 => (0, -1),
                _ => (1, -1),
            };
            return Vector { x: Scalar::from_int(x), y: Scalar::from_int(y) };
        }
        let rad = a.to_f64() * std::f64::consts::PI;
        Vector {
            x: Scalar::from_f64(rad.cos()).unwrap_or_else(Scalar::zero),
            y: Scalar::from_f64(rad.sin()).unwrap_or_else(Scalar::zero),
        }
    }

    /// Direction of `v`, exact when `v` lies on an axis or a diagonal.
    pub fn of_vector(v: &Vector) -> Angle {
        let zero = Scalar::zero();
        let exact = if v.y.is_zero() {
            Some(if v.x >= zero { 0 } else { 4 })
        } else if v.x.is_zero() {
            Some(if v.y > zero { 2 } else { 6 })
        } else if v.x.abs() == v.y.abs() {
            Some(match (v.x > zero, v.y > zero) {
                (true, true) => 1,
                (false, true) => 3,
                (false, false) => 5,
                (true, false) => 7,
            })
        } else {
            None
        };
        if let Some(k) = exact {
            return Angle(Scalar::ratio(k, 4));
        }
        let rad = v.y.to_f64().atan2(v.x.to_f64());
        let turns = Scalar::from_f64(rad / std::f64::consts::PI).unwrap_or_else(Scalar::zero);
        Angle(Scalar::limit_denominator(&turns, 1 << 40)).normalized()
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}π", self.0)
    }
}

/// Whether `target` lies in the closed sector with apex `apex` that starts
/// at direction `alpha` and sweeps counter-clockwise by `beta`.
/// A full-circle sector and the apex itself are always in range.
pub fn in_sector(apex: &Point, alpha: &Angle, beta: &Angle, target: &Point) -> bool {
    let two = Scalar::from_int(2);
    if beta.0 >= two {
        return true;
    }
    let w = target.sub(apex);
    if w.is_zero() {
        return true;
    }
    let start = alpha.direction();
    let end = Angle(alpha.0.clone() + beta.0.clone()).direction();
    let zero = Scalar::zero();
    if beta.0 <= Scalar::one() {
        // Sector no wider than a half-plane.
        let from_start = start.cross(&w);
        let to_end = w.cross(&end);
        if beta.0 == Scalar::one() {
            return from_start >= zero;
        }
        // Exclude the ray opposite to `start` (cross products vanish there too).
        if from_start.is_zero() && to_end.is_zero() {
            return same_direction(&start, &w);
        }
        from_start >= zero && to_end >= zero
    } else {
        // Complement is an open sector narrower than a half-plane.
        let inside_complement = end.cross(&w) > zero && w.cross(&start) > zero;
        !inside_complement
    }
}

fn same_direction(a: &Vector, b: &Vector) -> bool {
    let dot = &a.x * &b.x + &a.y * &b.y;
    dot.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ang(p: i64, q: i64) -> Angle {
        Angle(Scalar::ratio(p, q))
    }

    #[test]
    fn quarter_sector_examples() {
        let a = Point::origin();
        assert!(in_sector(&a, &ang(0, 1), &ang(1, 2), &Point::from_ints(1, 1)));
        assert!(!in_sector(&a, &ang(0, 1), &ang(1, 2), &Point::from_ints(-1, 0)));
    }

    #[test]
    fn boundary_rays_are_closed() {
        let a = Point::origin();
        assert!(in_sector(&a, &ang(0, 1), &ang(1, 2), &Point::from_ints(5, 0)));
        assert!(in_sector(&a, &ang(0, 1), &ang(1, 2), &Point::from_ints(0, 5)));
        assert!(!in_sector(&a, &ang(0, 1), &ang(1, 2), &Point::from_ints(0, -5)));
    }

    #[test]
    fn full_circle_and_apex() {
        let a = Point::from_ints(3, 3);
        assert!(in_sector(&a, &ang(1, 3), &Angle::full_turn(), &Point::from_ints(-9, 2)));
        assert!(in_sector(&a, &ang(0, 1), &ang(1, 100), &a));
    }

    #[test]
    fn half_plane_aimed_right_excludes_left() {
        let c = Point::from_ints(4, 0);
        let alpha = ang(3, 2);
        assert!(in_sector(&c, &alpha, &Angle::half_turn(), &Point::from_ints(8, 0)));
        assert!(!in_sector(&c, &alpha, &Angle::half_turn(), &Point::from_ints(0, 0)));
    }

    #[test]
    fn wide_sector_uses_complement() {
        let a = Point::origin();
        // [0, 3π/2]: everything except the open fourth quadrant.
        let beta = ang(3, 2);
        assert!(in_sector(&a, &ang(0, 1), &beta, &Point::from_ints(-1, -1)));
        assert!(in_sector(&a, &ang(0, 1), &beta, &Point::from_ints(0, -1)));
        assert!(!in_sector(&a, &ang(0, 1), &beta, &Point::from_ints(1, -1)));
    }

    #[test]
    fn sector_wrapping_past_two_pi() {
        let a = Point::origin();
        // [7π/4, 9π/4] around the positive x-axis.
        assert!(in_sector(&a, &ang(7, 4), &ang(1, 2), &Point::from_ints(1, 0)));
        assert!(!in_sector(&a, &ang(7, 4), &ang(1, 2), &Point::from_ints(-1, 0)));
    }

    #[test]
    fn angle_of_axis_vectors_is_exact() {
        let v = Point::from_ints(-2, 0).sub(&Point::origin());
        assert_eq!(Angle::of_vector(&v), ang(1, 1));
        let v = Point::from_ints(0, -3).sub(&Point::origin());
        assert_eq!(Angle::of_vector(&v), ang(3, 2));
    }
}
