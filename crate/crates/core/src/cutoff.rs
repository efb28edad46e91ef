use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Point2;
use crate::region::Region;

/// Ramp profile of a cutoff: linear in the boundary distance, or the C^2
/// smoothstep of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RampShape {
    Linear,
    Smooth,
}

/// A Lipschitz cutoff supported on a region: equal to its sup on the set at
/// distance >= `ramp_width` from the complement, ramping to zero through the
/// boundary band of that width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    region: Region,
    amplitude: f64,
    shape: RampShape,
    ramp_width: f64,
}

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

impl Cutoff {
    /// Linear ramp of height 1 over the unit boundary band. Fails when the
    /// band does not fit.
    pub fn standard(region: Region) -> Result<Cutoff> {
        Self::with_shape(region, RampShape::Linear)
    }

    /// Smoothstep ramp of height 1 (mollified variant, Lipschitz 3/2).
    pub fn smooth(region: Region) -> Result<Cutoff> {
        Self::with_shape(region, RampShape::Smooth)
    }

    pub fn with_shape(region: Region, shape: RampShape) -> Result<Cutoff> {
        Self::with_ramp(region, shape, 1.0)
    }

    /// Ramp over a band of the given width. A width equal to the inradius
    /// turns a ball window into a cone.
    pub fn with_ramp(region: Region, shape: RampShape, ramp_width: f64) -> Result<Cutoff> {
        if !(ramp_width > 0.0) || !ramp_width.is_finite() {
            return Err(Error::config("ramp width must be positive"));
        }
        if region.inradius() < ramp_width {
            return Err(Error::config("cutoff ramp does not fit"));
        }
        Ok(Cutoff { region, amplitude: 1.0, shape, ramp_width })
    }

    /// The same profile scaled by `a > 0`.
    pub fn scaled(&self, a: f64) -> Result<Cutoff> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::config("cutoff scale must be positive"));
        }
        Ok(Cutoff { amplitude: self.amplitude * a, ..*self })
    }

    pub fn eval(&self, x: Point2) -> f64 {
        let d = (self.region.signed_dist(x) / self.ramp_width).clamp(0.0, 1.0);
        match self.shape {
            RampShape::Linear => self.amplitude * d,
            RampShape::Smooth => self.amplitude * smoothstep(d),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.amplitude
    }

    pub fn lipschitz(&self) -> f64 {
        let slope = match self.shape {
            RampShape::Linear => self.amplitude,
            RampShape::Smooth => 1.5 * self.amplitude,
        };
        slope / self.ramp_width
    }

    pub fn support(&self) -> &Region {
        &self.region
    }

    /// Number of points whose radius-1/2 ball meets the transition band
    /// `{0 < chi <= sup/2}`.
    ///
    /// Both ramp shapes reach half height exactly where the boundary distance
    /// is half the ramp width, so the band is `{0 < d(x, U^c) <= w/2}` and
    /// the count reduces to a signed-distance window.
    pub fn transition_band_count(&self, points: &[Point2]) -> usize {
        let half_band = 0.5 * self.ramp_width;
        points
            .iter()
            .filter(|&&p| {
                let s = self.region.signed_dist(p);
                let dist_to_band = if s <= 0.0 { -s } else { (s - half_band).max(0.0) };
                dist_to_band < 0.5
            })
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn disc(r: f64) -> Region {
        Region::ball(Point2::new(0.0, 0.0), r).unwrap()
    }

    #[test]
    fn tent_profile_on_disc() {
        let chi = Cutoff::standard(disc(2.0)).unwrap();
        assert_eq!(chi.eval(Point2::new(0.0, 0.0)), 1.0);
        assert_eq!(chi.eval(Point2::new(0.5, 0.0)), 1.0);
        assert!((chi.eval(Point2::new(1.5, 0.0)) - 0.5).abs() < 1e-15);
        assert_eq!(chi.eval(Point2::new(2.5, 0.0)), 0.0);
        assert_eq!(chi.sup_norm(), 1.0);
        assert_eq!(chi.lipschitz(), 1.0);
    }

    #[test]
    fn ramp_must_fit() {
        let err = Cutoff::standard(disc(0.8)).unwrap_err();
        assert!(err.to_string().contains("cutoff ramp does not fit"));
        // Width equal to the inradius makes a cone: sup attained at the
        // center only, slope spread over the whole window.
        let cone = Cutoff::with_ramp(disc(4.0), RampShape::Linear, 4.0).unwrap();
        assert_eq!(cone.eval(Point2::new(0.0, 0.0)), 1.0);
        assert!((cone.eval(Point2::new(2.0, 0.0)) - 0.5).abs() < 1e-15);
        assert!((cone.lipschitz() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn band_count_window() {
        let chi = Cutoff::standard(disc(3.0)).unwrap();
        // Band is {2.5 <= |x| < 3}; counted points are those with |x| in (2, 3.5).
        let pts = [
            Point2::new(0.0, 0.0),    // deep interior, excluded
            Point2::new(2.1, 0.0),    // within 1/2 of the band
            Point2::new(2.7, 0.0),    // inside the band
            Point2::new(3.3, 0.0),    // outside, within 1/2
            Point2::new(3.6, 0.0),    // too far out
        ];
        assert_eq!(chi.transition_band_count(&pts), 3);
    }

    proptest! {
        #[test]
        fn lipschitz_bound(ax in -4.0f64..4.0, ay in -4.0f64..4.0,
                           bx in -4.0f64..4.0, by in -4.0f64..4.0,
                           smooth in proptest::bool::ANY) {
            let region = disc(3.0);
            let chi = if smooth { Cutoff::smooth(region).unwrap() } else { Cutoff::standard(region).unwrap() };
            let a = Point2::new(ax, ay);
            let b = Point2::new(bx, by);
            let gap = (chi.eval(a) - chi.eval(b)).abs();
            prop_assert!(gap <= chi.lipschitz() * a.dist(b) + 1e-12);
        }
    }
}
