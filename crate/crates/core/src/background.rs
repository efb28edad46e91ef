use serde::{Deserialize, Serialize};

use crate::plane::Point2;

/// Background measure entering `curl j = 2*pi*nu - m`.
///
/// Three kinds are supported: the zero measure, planar Lebesgue measure, and
/// arc length on the horizontal axis. Each satisfies the growth condition
/// `m(B(x, r)) <= pi * M * r` for `r < 1` with the stated bound `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BackgroundMeasure {
    Zero,
    Lebesgue,
    Line,
}

impl BackgroundMeasure {
    /// Smallest `M` with `m(B(x, r)) <= pi * M * r` for all `x` and `r < 1`.
    pub fn density_bound(&self) -> f64 {
        match self {
            BackgroundMeasure::Zero => 0.0,
            BackgroundMeasure::Lebesgue => 1.0,
            BackgroundMeasure::Line => 2.0 / std::f64::consts::PI,
        }
    }

    /// Mass of the disc `B(center, radius)`.
    ///
    /// For the line measure this is the chord length `2*sqrt(r^2 - d^2)` when
    /// the disc reaches the axis (`d = |center.y|`), zero otherwise.
    pub fn disc_mass(&self, center: Point2, radius: f64) -> f64 {
        match self {
            BackgroundMeasure::Zero => 0.0,
            BackgroundMeasure::Lebesgue => std::f64::consts::PI * radius * radius,
            BackgroundMeasure::Line => {
                let d2 = radius * radius - center.y * center.y;
                if d2 > 0.0 {
                    2.0 * d2.sqrt()
                } else {
                    0.0
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn disc_masses() {
        let c = Point2::new(3.0, 0.0);
        assert_eq!(BackgroundMeasure::Zero.disc_mass(c, 2.0), 0.0);
        let leb = BackgroundMeasure::Lebesgue.disc_mass(c, 2.0);
        assert!((leb - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        // Chord of a radius-2 disc centered at height 1: 2*sqrt(3).
        let chord = BackgroundMeasure::Line.disc_mass(Point2::new(0.0, 1.0), 2.0);
        assert!((chord - 2.0 * 3.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(BackgroundMeasure::Line.disc_mass(Point2::new(0.0, 5.0), 2.0), 0.0);
    }

    #[test]
    fn serde_kind_tags() {
        let m: BackgroundMeasure = serde_json::from_str(r#"{"kind":"line"}"#).unwrap();
        assert_eq!(m, BackgroundMeasure::Line);
    }

    proptest! {
        // m(B(x, r)) <= pi * M * r for r < 1, all kinds.
        #[test]
        fn density_bound_holds(x in -5.0f64..5.0, y in -5.0f64..5.0, r in 1e-6f64..1.0) {
            let c = Point2::new(x, y);
            for m in [BackgroundMeasure::Zero, BackgroundMeasure::Lebesgue, BackgroundMeasure::Line] {
                let mass = m.disc_mass(c, r);
                prop_assert!(mass <= std::f64::consts::PI * m.density_bound() * r + 1e-12);
            }
        }
    }
}
