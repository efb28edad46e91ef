use serde::{Deserialize, Serialize};

use crate::background::BackgroundMeasure;
use crate::error::{Error, Result};
use crate::plane::Point2;
use crate::region::Region;

/// A finite set of distinct points carrying the singular part of the current.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct PointConfig {
    points: Vec<Point2>,
}

impl PointConfig {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::config("point configuration is empty"));
        }
        for p in &points {
            if !p.is_finite() {
                return Err(Error::config("point coordinates must be finite"));
            }
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i].dist2(points[j]) == 0.0 {
                    return Err(Error::config(format!(
                        "points {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(PointConfig { points })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Half the minimal pairwise distance; infinite for a single point.
    /// Balls `B(p, eta)` with `eta <= separation` are pairwise disjoint.
    pub fn separation(&self) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                min = min.min(self.points[i].dist(self.points[j]));
            }
        }
        0.5 * min
    }

    pub fn translated(&self, shift: Point2) -> PointConfig {
        PointConfig { points: self.points.iter().map(|&p| p + shift).collect() }
    }
}

impl TryFrom<Vec<Point2>> for PointConfig {
    type Error = Error;
    fn try_from(points: Vec<Point2>) -> Result<Self> {
        PointConfig::new(points)
    }
}

impl From<PointConfig> for Vec<Point2> {
    fn from(c: PointConfig) -> Vec<Point2> {
        c.points
    }
}

/// A full problem instance: points, background, and the region carrying the
/// cutoff. This is the on-disk job input format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Instance {
    pub points: PointConfig,
    pub background: BackgroundMeasure,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub region: Option<Region>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates() {
        let err = PointConfig::new(vec![Point2::new(1.0, 2.0), Point2::new(1.0, 2.0)]);
        assert!(err.is_err());
    }

    #[test]
    fn separation_examples() {
        let c = PointConfig::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(4.0, 0.0),
            Point2::new(4.0, 3.0),
        ])
        .unwrap();
        assert_eq!(c.separation(), 1.5);
        let single = PointConfig::new(vec![Point2::new(0.0, 0.0)]).unwrap();
        assert!(single.separation().is_infinite());
    }

    #[test]
    fn instance_json() {
        let text = r#"{
            "points": [[0.0, 0.0], [1.0, 0.5]],
            "background": {"kind": "lebesgue"},
            "region": {"kind": "ball", "center": [0.0, 0.0], "radius": 4.0}
        }"#;
        let inst: Instance = serde_json::from_str(text).unwrap();
        assert_eq!(inst.points.len(), 2);
        assert_eq!(inst.background, BackgroundMeasure::Lebesgue);
        assert!(inst.region.is_some());
    }
}
