use std::ops::{Add, Mul, Neg, Sub};

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

/// A point of the plane, also used as a plane vector.
///
/// Serializes as the two-element array `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn dist2(self, other: Point2) -> f64 {
        (self - other).norm2()
    }

    /// Counterclockwise quarter turn: (x, y) -> (-y, x).
    pub fn rot90(self) -> Self {
        Point2 { x: -self.y, y: self.x }
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2 { x: self.x + rhs.x, y: self.y + rhs.y }
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2 { x: self.x - rhs.x, y: self.y - rhs.y }
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2 { x: self.x * rhs, y: self.y * rhs }
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2 { x: -self.x, y: -self.y }
    }
}

impl Serialize for Point2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&self.x)?;
        t.serialize_element(&self.y)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Point2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct P2Visitor;
        impl<'de> Visitor<'de> for P2Visitor {
            type Value = Point2;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a two-element array [x, y]")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Point2, A::Error> {
                let x = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let y = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(Point2 { x, y })
            }
        }
        deserializer.deserialize_tuple(2, P2Visitor)
    }
}

/// A closed ball `{x : |x - center| <= radius}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point2,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point2, radius: f64) -> Self {
        debug_assert!(radius > 0.0, "ball radius must be positive");
        Ball { center, radius }
    }

    pub fn contains(&self, x: Point2) -> bool {
        self.center.dist2(x) <= self.radius * self.radius
    }

    /// Closed containment of `other` in `self`, with absolute slack `tol`.
    pub fn contains_ball(&self, other: &Ball, tol: f64) -> bool {
        self.center.dist(other.center) + other.radius <= self.radius + tol
    }

    /// Closed balls intersect (tangency counts), with absolute slack `tol`.
    pub fn intersects(&self, other: &Ball, tol: f64) -> bool {
        self.center.dist(other.center) <= self.radius + other.radius + tol
    }

    /// The ball scaled about its own center.
    pub fn scaled(&self, factor: f64) -> Ball {
        Ball { center: self.center, radius: self.radius * factor }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rot90_is_counterclockwise() {
        let e1 = Point2::new(1.0, 0.0);
        assert_eq!(e1.rot90(), Point2::new(0.0, 1.0));
        assert_eq!(e1.rot90().rot90(), -e1);
    }

    #[test]
    fn point_serializes_as_pair() {
        let p = Point2::new(1.5, -2.0);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1.5,-2.0]");
        let q: Point2 = serde_json::from_str("[1.5,-2.0]").unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn ball_scaling_fixes_center() {
        let b = Ball::new(Point2::new(3.0, 4.0), 2.0);
        let s = b.scaled(2.5);
        assert_eq!(s.center, b.center);
        assert_eq!(s.radius, 5.0);
    }
}
