use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Point2;

/// A bounded open region of the plane: a disc or an axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Region {
    Ball { center: Point2, radius: f64 },
    Rect { lo: Point2, hi: Point2 },
}

impl Region {
    pub fn ball(center: Point2, radius: f64) -> Result<Region> {
        if !(radius > 0.0) || !center.is_finite() || !radius.is_finite() {
            return Err(Error::geometry("region ball needs finite center and positive radius"));
        }
        Ok(Region::Ball { center, radius })
    }

    pub fn rect(lo: Point2, hi: Point2) -> Result<Region> {
        if !lo.is_finite() || !hi.is_finite() || !(lo.x < hi.x) || !(lo.y < hi.y) {
            return Err(Error::geometry("region rect needs lo < hi componentwise"));
        }
        Ok(Region::Rect { lo, hi })
    }

    /// Signed distance to the complement: positive inside, negative outside.
    pub fn signed_dist(&self, x: Point2) -> f64 {
        match *self {
            Region::Ball { center, radius } => radius - center.dist(x),
            Region::Rect { lo, hi } => {
                let dx = (x.x - lo.x).min(hi.x - x.x);
                let dy = (x.y - lo.y).min(hi.y - x.y);
                if dx >= 0.0 && dy >= 0.0 {
                    dx.min(dy)
                } else {
                    // Outside: minus the Euclidean distance to the rectangle.
                    let ox = (-dx).max(0.0);
                    let oy = (-dy).max(0.0);
                    -(ox * ox + oy * oy).sqrt()
                }
            }
        }
    }

    pub fn contains(&self, x: Point2) -> bool {
        self.signed_dist(x) > 0.0
    }

    /// Distance from `x` to the region (zero inside).
    pub fn dist_to(&self, x: Point2) -> f64 {
        (-self.signed_dist(x)).max(0.0)
    }

    /// Membership in the 1-neighborhood `{x : d(x, U) < 1}`.
    pub fn hat_contains(&self, x: Point2) -> bool {
        self.dist_to(x) < 1.0
    }

    /// Radius of the largest disc contained in the region.
    pub fn inradius(&self) -> f64 {
        match *self {
            Region::Ball { radius, .. } => radius,
            Region::Rect { lo, hi } => 0.5 * (hi.x - lo.x).min(hi.y - lo.y),
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Region::Ball { radius, .. } => std::f64::consts::PI * radius * radius,
            Region::Rect { lo, hi } => (hi.x - lo.x) * (hi.y - lo.y),
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bbox(&self) -> (Point2, Point2) {
        match *self {
            Region::Ball { center, radius } => (
                Point2::new(center.x - radius, center.y - radius),
                Point2::new(center.x + radius, center.y + radius),
            ),
            Region::Rect { lo, hi } => (lo, hi),
        }
    }

    /// Bounding box of the 1-neighborhood.
    pub fn hat_bbox(&self) -> (Point2, Point2) {
        let (lo, hi) = self.bbox();
        (Point2::new(lo.x - 1.0, lo.y - 1.0), Point2::new(hi.x + 1.0, hi.y + 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_signed_distance() {
        let r = Region::rect(Point2::new(0.0, 0.0), Point2::new(4.0, 2.0)).unwrap();
        assert_eq!(r.signed_dist(Point2::new(2.0, 1.0)), 1.0);
        assert_eq!(r.signed_dist(Point2::new(0.5, 1.0)), 0.5);
        // Corner exterior: distance to the corner point.
        let d = r.signed_dist(Point2::new(-3.0, -4.0));
        assert!((d + 5.0).abs() < 1e-12);
        assert!(!r.contains(Point2::new(-3.0, -4.0)));
    }

    #[test]
    fn ball_hat_membership() {
        let b = Region::ball(Point2::new(0.0, 0.0), 2.0).unwrap();
        assert!(b.hat_contains(Point2::new(2.9, 0.0)));
        assert!(!b.hat_contains(Point2::new(3.1, 0.0)));
        assert_eq!(b.inradius(), 2.0);
    }

    #[test]
    fn region_serde_round_trip() {
        let b: Region =
            serde_json::from_str(r#"{"kind":"ball","center":[1.0,2.0],"radius":3.0}"#).unwrap();
        assert_eq!(b, Region::Ball { center: Point2::new(1.0, 2.0), radius: 3.0 });
        let r: Region =
            serde_json::from_str(r#"{"kind":"rect","lo":[0.0,0.0],"hi":[1.0,2.0]}"#).unwrap();
        assert!(matches!(r, Region::Rect { .. }));
    }

    #[test]
    fn degenerate_regions_rejected() {
        assert!(Region::ball(Point2::new(0.0, 0.0), 0.0).is_err());
        assert!(Region::rect(Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)).is_err());
    }
}
