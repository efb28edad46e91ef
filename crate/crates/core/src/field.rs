use crate::annuli::{annuli_from_trace, Annulus};
use crate::background::BackgroundMeasure;
use crate::config::PointConfig;
use crate::error::{Error, Result};
use crate::growth::GrowthTrace;
use crate::plane::{Ball, Point2};
use crate::quad::gauss;

/// One building block of a planar vector field. Vortex-type terms all share
/// the same counterclockwise profile rot90(x - c) / |x - c|^2.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    /// Full vortex kernel around a point.
    Vortex { center: Point2 },
    /// Potential field of area measure: contributes curl -1 everywhere.
    LebesgueBackground,
    /// Potential field of arc length on the horizontal axis: curl is minus
    /// the line measure.
    LineBackground,
    /// Vortex kernel truncated to a half-open annulus around its own center.
    AnnulusVortex { annulus: Annulus },
    /// Vortex kernel truncated to a punctured closed disc.
    BallVortex { ball: Ball },
}

impl Term {
    fn vortex_kernel(center: Point2, x: Point2) -> Result<Point2> {
        let d = x - center;
        let d2 = d.norm2();
        if d2 == 0.0 {
            return Err(Error::field("evaluation at a field singularity"));
        }
        Ok(d.rot90() * (1.0 / d2))
    }

    pub fn value_at(&self, x: Point2) -> Result<Point2> {
        match self {
            Term::Vortex { center } => Term::vortex_kernel(*center, x),
            Term::LebesgueBackground => Ok(Point2::new(0.5 * x.y, -0.5 * x.x)),
            Term::LineBackground => {
                let vx = if x.y > 0.0 {
                    0.5
                } else if x.y < 0.0 {
                    -0.5
                } else {
                    0.0
                };
                Ok(Point2::new(vx, 0.0))
            }
            Term::AnnulusVortex { annulus } => {
                if annulus.contains(x) {
                    Term::vortex_kernel(annulus.center, x)
                } else {
                    Ok(Point2::ORIGIN)
                }
            }
            Term::BallVortex { ball } => {
                let d2 = x.dist2(ball.center);
                if d2 == 0.0 {
                    Err(Error::field("evaluation at a field singularity"))
                } else if d2 <= ball.radius * ball.radius {
                    Term::vortex_kernel(ball.center, x)
                } else {
                    Ok(Point2::ORIGIN)
                }
            }
        }
    }

    /// Center of the vortex kernel this term applies at `x`, if any.
    fn active_singular_center(&self, x: Point2) -> Option<Point2> {
        match self {
            Term::Vortex { center } => Some(*center),
            Term::AnnulusVortex { annulus } => annulus.contains(x).then_some(annulus.center),
            Term::BallVortex { ball } => {
                let d2 = x.dist2(ball.center);
                (d2 > 0.0 && d2 <= ball.radius * ball.radius).then_some(ball.center)
            }
            _ => None,
        }
    }

    /// Center at which the term itself is singular, if any.
    fn pole(&self) -> Option<Point2> {
        match self {
            Term::Vortex { center } => Some(*center),
            Term::BallVortex { ball } => Some(ball.center),
            _ => None,
        }
    }
}

/// A finite weighted combination of terms, evaluated pointwise.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnalyticField {
    pub terms: Vec<(f64, Term)>,
}

fn close(a: Point2, b: Point2) -> bool {
    a.dist2(b) <= (1e-12 * (1.0 + a.norm())).powi(2)
}

impl AnalyticField {
    pub fn from_terms(terms: Vec<(f64, Term)>) -> Self {
        AnalyticField { terms }
    }

    pub fn push(&mut self, coeff: f64, term: Term) {
        self.terms.push((coeff, term));
    }

    /// self - other, as a single field.
    pub fn difference(&self, other: &AnalyticField) -> AnalyticField {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(c, t)| (-c, t.clone())));
        AnalyticField { terms }
    }

    pub fn eval(&self, x: Point2) -> Result<Point2> {
        let mut out = Point2::ORIGIN;
        for (coeff, term) in &self.terms {
            out = out + term.value_at(x)? * *coeff;
        }
        Ok(out)
    }

    pub fn eval_squared(&self, x: Point2) -> Result<f64> {
        Ok(self.eval(x)?.norm2())
    }

    /// Splits |f(x)|^2 into (coeff, regular) with
    /// |f(x)|^2 = regular + coeff / |x - pole|^2,
    /// where coeff is the squared net vortex weight active at x around `pole`.
    pub fn eval_squared_split(&self, x: Point2, pole: Point2) -> Result<(f64, f64)> {
        let d = x - pole;
        let d2 = d.norm2();
        if d2 == 0.0 {
            return Err(Error::field("split requested at the singularity itself"));
        }
        let mut k = 0.0;
        for (coeff, term) in &self.terms {
            if let Some(c) = term.active_singular_center(x) {
                if close(c, pole) {
                    k += coeff;
                }
            }
        }
        let v = d.rot90() * (1.0 / d2);
        let full = self.eval(x)?;
        let rest = full - v * k;
        let regular = rest.norm2() + 2.0 * k * rest.dot(v);
        Ok((k * k, regular))
    }

    /// Distinct centers where the field keeps a vortex singularity, with the
    /// net kernel weight at each. Annulus terms vanish near their center and
    /// do not count.
    pub fn singular_centers(&self) -> Vec<(Point2, f64)> {
        let mut out: Vec<(Point2, f64)> = Vec::new();
        for (coeff, term) in &self.terms {
            let Some(c) = term.pole() else { continue };
            match out.iter_mut().find(|(p, _)| close(*p, c)) {
                Some((_, k)) => *k += coeff,
                None => out.push((c, *coeff)),
            }
        }
        out.retain(|&(_, k)| k.abs() > 1e-12);
        out
    }

    /// Counterclockwise line integral of the tangential component over the
    /// circle of the given center and radius.
    pub fn circulation(&self, center: Point2, radius: f64) -> Result<f64> {
        if !(radius > 0.0) {
            return Err(Error::field("contour radius must be positive"));
        }
        let margin = radius * 1e-6;
        for (coeff, term) in &self.terms {
            if *coeff == 0.0 {
                continue;
            }
            if let Some(p) = term.pole() {
                if (p.dist(center) - radius).abs() <= margin {
                    return Err(Error::field("a singularity sits on the contour"));
                }
            }
        }

        let mut breaks: Vec<f64> = Vec::new();
        for (coeff, term) in &self.terms {
            if *coeff == 0.0 {
                continue;
            }
            match term {
                Term::LineBackground => {
                    if center.y.abs() < radius {
                        let t = (-center.y / radius).asin();
                        breaks.push(normalize_angle(t));
                        breaks.push(normalize_angle(std::f64::consts::PI - t));
                    }
                }
                Term::AnnulusVortex { annulus } => {
                    circle_crossings(center, radius, annulus.center, annulus.inner, &mut breaks);
                    circle_crossings(center, radius, annulus.center, annulus.outer, &mut breaks);
                }
                Term::BallVortex { ball } => {
                    circle_crossings(center, radius, ball.center, ball.radius, &mut breaks);
                }
                _ => {}
            }
        }

        let integrand = |theta: f64| {
            let dir = Point2::new(theta.cos(), theta.sin());
            let x = center + dir * radius;
            let tangent = dir.rot90();
            // Poles are bounded away from the contour, checked above.
            self.eval(x).expect("contour avoids singularities") .dot(tangent) * radius
        };

        if breaks.is_empty() {
            return Ok(periodic_trapezoid(&integrand));
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mut total = 0.0;
        for i in 0..breaks.len() {
            let a = breaks[i];
            let b = if i + 1 < breaks.len() {
                breaks[i + 1]
            } else {
                breaks[0] + std::f64::consts::TAU
            };
            if b - a < 1e-13 {
                continue;
            }
            let tol = 1e-10 * ((b - a) / std::f64::consts::TAU) + 1e-13;
            total += adaptive_1d(&integrand, a, b, tol, 24);
        }
        Ok(total)
    }
}

pub(crate) fn normalize_angle(t: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut t = t % tau;
    if t < 0.0 {
        t += tau;
    }
    t
}

/// Angles on the contour circle (center `o`, radius `big_r`) where it crosses
/// the circle of center `c`, radius `rho`.
pub(crate) fn circle_crossings(o: Point2, big_r: f64, c: Point2, rho: f64, out: &mut Vec<f64>) {
    let d = o.dist(c);
    if d <= f64::EPSILON * (1.0 + big_r) {
        return;
    }
    if d >= big_r + rho || d <= (big_r - rho).abs() {
        return;
    }
    let cos_delta = ((d * d + big_r * big_r - rho * rho) / (2.0 * d * big_r)).clamp(-1.0, 1.0);
    let delta = cos_delta.acos();
    let phi = (c.y - o.y).atan2(c.x - o.x);
    out.push(normalize_angle(phi - delta));
    out.push(normalize_angle(phi + delta));
}

/// Trapezoid rule on the full period, doubled until stable; spectrally
/// accurate for smooth periodic integrands.
fn periodic_trapezoid<F: Fn(f64) -> f64>(f: &F) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut n = 64usize;
    let eval = |n: usize| {
        let h = tau / n as f64;
        let mut acc = crate::quad::KahanSum::default();
        for i in 0..n {
            acc.add(f(i as f64 * h));
        }
        acc.value() * h
    };
    let mut prev = eval(n);
    while n < 32768 {
        n *= 2;
        let cur = eval(n);
        if (cur - prev).abs() <= 1e-11 * cur.abs().max(1.0) {
            return cur;
        }
        prev = cur;
    }
    prev
}

pub(crate) fn adaptive_1d<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let whole = gauss::integrate_1d(f, a, b, 16);
    let mid = 0.5 * (a + b);
    let halves = gauss::integrate_1d(f, a, mid, 16) + gauss::integrate_1d(f, mid, b, 16);
    if (whole - halves).abs() <= tol || depth == 0 {
        halves
    } else {
        adaptive_1d(f, a, mid, 0.5 * tol, depth - 1) + adaptive_1d(f, mid, b, 0.5 * tol, depth - 1)
    }
}

/// The superposition of unit vortices at the configuration points plus the
/// background potential.
pub fn synthetic_current(config: &PointConfig, background: BackgroundMeasure) -> AnalyticField {
    let mut field = AnalyticField::default();
    for &p in config.points() {
        field.push(1.0, Term::Vortex { center: p });
    }
    match background {
        BackgroundMeasure::Zero => {}
        BackgroundMeasure::Lebesgue => field.push(1.0, Term::LebesgueBackground),
        BackgroundMeasure::Line => field.push(1.0, Term::LineBackground),
    }
    field
}

/// The piecewise vortex approximation attached to a growth trace: a unit
/// vortex kernel around the annulus center inside every swept annulus, plus
/// a unit kernel on the closed disc of radius `eta` around every seed point.
/// On each annulus |G(x)| times the distance to the annulus center is 1.
pub fn comparison_field(trace: &GrowthTrace, eta: f64) -> Result<AnalyticField> {
    let initial = trace.initial_balls();
    let r_min = initial.iter().map(|b| b.radius).fold(f64::INFINITY, f64::min);
    if !(eta > 0.0) || eta > r_min * (1.0 + 1e-12) {
        return Err(Error::field(
            "comparison field needs 0 < eta <= the smallest initial radius",
        ));
    }
    let collection = annuli_from_trace(trace);
    let mut field = AnalyticField::default();
    for annulus in &collection.annuli {
        field.push(1.0, Term::AnnulusVortex { annulus: *annulus });
    }
    for ball in initial {
        field.push(1.0, Term::BallVortex { ball: Ball::new(ball.center, eta) });
    }
    Ok(field)
}

/// Central-difference curl, for checking field identities away from poles.
pub fn numerical_curl(field: &AnalyticField, x: Point2, h: f64) -> Result<f64> {
    let fxp = field.eval(Point2::new(x.x + h, x.y))?;
    let fxm = field.eval(Point2::new(x.x - h, x.y))?;
    let fyp = field.eval(Point2::new(x.x, x.y + h))?;
    let fym = field.eval(Point2::new(x.x, x.y - h))?;
    Ok((fxp.y - fxm.y) / (2.0 * h) - (fyp.x - fym.x) / (2.0 * h))
}

pub fn numerical_divergence(field: &AnalyticField, x: Point2, h: f64) -> Result<f64> {
    let fxp = field.eval(Point2::new(x.x + h, x.y))?;
    let fxm = field.eval(Point2::new(x.x - h, x.y))?;
    let fyp = field.eval(Point2::new(x.x, x.y + h))?;
    let fym = field.eval(Point2::new(x.x, x.y - h))?;
    Ok((fxp.x - fxm.x) / (2.0 * h) + (fyp.y - fym.y) / (2.0 * h))
}
