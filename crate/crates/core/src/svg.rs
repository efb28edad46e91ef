//! Plain SVG snapshots of growth families, annuli collections, and the
//! covering construction. The writer is deliberately tiny: circles and dots
//! on a flipped-y canvas, shortest round-trip float formatting, so identical
//! inputs produce identical bytes.

use std::fmt::Write;

use crate::annuli::AnnuliCollection;
use crate::growth::GrowthTrace;
use crate::plane::{Ball, Point2};
use crate::verify::Construction;

struct Canvas {
    body: String,
    lo: Point2,
    hi: Point2,
}

impl Canvas {
    fn new() -> Canvas {
        Canvas {
            body: String::new(),
            lo: Point2::new(f64::INFINITY, f64::INFINITY),
            hi: Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn cover(&mut self, center: Point2, radius: f64) {
        self.lo.x = self.lo.x.min(center.x - radius);
        self.lo.y = self.lo.y.min(center.y - radius);
        self.hi.x = self.hi.x.max(center.x + radius);
        self.hi.y = self.hi.y.max(center.y + radius);
    }

    fn circle(&mut self, center: Point2, radius: f64, style: &str) {
        self.cover(center, radius);
        writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" {}/>"#,
            center.x, center.y, radius, style
        )
        .expect("string writes never fail");
    }

    /// Filled ring between two concentric radii, via an even-odd path.
    fn ring(&mut self, center: Point2, inner: f64, outer: f64, style: &str) {
        self.cover(center, outer);
        let mut d = String::new();
        for r in [outer, inner] {
            write!(
                d,
                "M {} {} a {r} {r} 0 1 0 {} 0 a {r} {r} 0 1 0 {} 0 ",
                center.x - r,
                center.y,
                2.0 * r,
                -2.0 * r
            )
            .expect("string writes never fail");
        }
        writeln!(self.body, r#"<path d="{}" fill-rule="evenodd" {}/>"#, d.trim_end(), style)
            .expect("string writes never fail");
    }

    fn finish(self) -> String {
        let (lo, hi) = if self.lo.x.is_finite() {
            (self.lo, self.hi)
        } else {
            (Point2::new(-1.0, -1.0), Point2::new(1.0, 1.0))
        };
        let w = hi.x - lo.x;
        let h = hi.y - lo.y;
        let margin = 0.05 * w.max(h).max(1e-9);
        format!(
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
                "\n<g transform=\"scale(1,-1)\">\n{}</g>\n</svg>\n"
            ),
            lo.x - margin,
            -(hi.y + margin),
            w + 2.0 * margin,
            h + 2.0 * margin,
            self.body
        )
    }
}

fn stroke_width(balls: &[Ball]) -> f64 {
    let extent = balls
        .iter()
        .map(|b| 2.0 * b.radius)
        .fold(f64::MIN_POSITIVE, f64::max);
    0.02 * extent
}

/// Every event of a growth family: seeds as dots, each snapshot's balls as
/// outlines fading with event index, the final collection filled.
pub fn render_trace(trace: &GrowthTrace) -> String {
    let mut canvas = Canvas::new();
    let all: Vec<Ball> = trace.events.iter().flat_map(|e| e.balls.iter().map(|tb| tb.ball)).collect();
    let sw = stroke_width(&all);
    let last = trace.events.len().saturating_sub(1);
    for (i, event) in trace.events.iter().enumerate() {
        for tb in &event.balls {
            if i == last {
                canvas.circle(
                    tb.ball.center,
                    tb.ball.radius,
                    &format!(
                        r##"fill="#7aa6c2" fill-opacity="0.35" stroke="#2c5f83" stroke-width="{sw}""##
                    ),
                );
            } else {
                canvas.circle(
                    tb.ball.center,
                    tb.ball.radius,
                    &format!(
                        r##"fill="none" stroke="#9db8cc" stroke-opacity="0.7" stroke-width="{}""##,
                        0.6 * sw
                    ),
                );
            }
        }
    }
    if let Some(first) = trace.events.first() {
        for tb in &first.balls {
            canvas.circle(tb.ball.center, 0.5 * sw, r##"fill="#1d3c53""##);
        }
    }
    canvas.finish()
}

/// The annuli of a collection as filled rings.
pub fn render_annuli(coll: &AnnuliCollection) -> String {
    let mut canvas = Canvas::new();
    let widest = coll
        .annuli
        .iter()
        .map(|a| 2.0 * a.outer)
        .fold(f64::MIN_POSITIVE, f64::max);
    let sw = 0.01 * widest;
    for a in &coll.annuli {
        canvas.ring(
            a.center,
            a.inner,
            a.outer,
            &format!(
                r##"fill="#c28f5c" fill-opacity="0.4" stroke="#7d5226" stroke-width="{sw}""##
            ),
        );
    }
    canvas.finish()
}

/// Covering discs that host a growth run, with the kept balls and the seed
/// points they cover drawn on top.
pub fn render_construction(cons: &Construction, points: &[Point2]) -> String {
    let mut canvas = Canvas::new();
    let kept: Vec<Ball> = cons.kept.iter().map(|kb| kb.ball).collect();
    let sw = stroke_width(&kept).max(0.002);
    for cell in &cons.covering.cells {
        canvas.circle(
            cell.center,
            0.25,
            &format!(
                r##"fill="#88a37c" fill-opacity="0.15" stroke="#5a7350" stroke-width="{}""##,
                0.25 * sw
            ),
        );
    }
    for kb in &cons.kept {
        canvas.circle(
            kb.ball.center,
            kb.ball.radius,
            &format!(r##"fill="#b5651d" fill-opacity="0.5" stroke="#6e3a0c" stroke-width="{sw}""##),
        );
        for &seed in &kb.seeds {
            canvas.circle(points[seed], 0.3 * sw, r##"fill="#27160a""##);
        }
    }
    canvas.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PointConfig;
    use crate::growth::{grow, initial_collection};
    use crate::region::Region;
    use crate::verify::localized_construction;

    fn two_point_trace() -> GrowthTrace {
        let config =
            PointConfig::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]).unwrap();
        let initial = initial_collection(&config, 0.1).unwrap();
        grow(&initial, 2.0).unwrap()
    }

    #[test]
    fn trace_svg_is_wellformed_and_deterministic() {
        let trace = two_point_trace();
        let doc = render_trace(&trace);
        assert!(doc.starts_with("<svg "));
        assert!(doc.trim_end().ends_with("</svg>"));
        let balls: usize = trace.events.iter().map(|e| e.balls.len()).sum();
        let seeds = trace.events[0].balls.len();
        let circles = doc.matches("<circle ").count();
        assert_eq!(circles, balls + seeds);
        assert_eq!(doc, render_trace(&trace));
    }

    #[test]
    fn annuli_svg_has_one_ring_per_annulus() {
        let trace = two_point_trace();
        let coll = crate::annuli::annuli_from_trace(&trace);
        let doc = render_annuli(&coll);
        assert_eq!(doc.matches("<path ").count(), coll.annuli.len());
        assert!(doc.contains("evenodd"));
    }

    #[test]
    fn construction_svg_draws_cells_and_kept_balls() {
        let config =
            PointConfig::new(vec![Point2::new(0.3, 0.1), Point2::new(-0.4, -0.2)]).unwrap();
        let region = Region::ball(Point2::ORIGIN, 2.0).unwrap();
        let cons = localized_construction(&config, &region).unwrap();
        let doc = render_construction(&cons, config.points());
        let expected = cons.covering.cells.len() + cons.kept.len() + config.len();
        assert_eq!(doc.matches("<circle ").count(), expected);
    }
}
