//! End-to-end numerical checks: the lattice covering, localized ball growth
//! with pruning, assembly of the comparison field, and evaluation of the
//! energy and Lorentz-norm inequalities on concrete configurations.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annuli::{annuli_from_trace, Annulus};
use crate::background::BackgroundMeasure;
use crate::config::PointConfig;
use crate::cutoff::{Cutoff, RampShape};
use crate::energy::{bump, energy_density, renormalized_energy, DensityPoint, EnergyOpts};
use crate::error::{Error, Result};
use crate::field::{
    adaptive_1d, circle_crossings, comparison_field, normalize_angle, synthetic_current,
    AnalyticField, Term,
};
use crate::growth::{grow, initial_collection, GrowthTrace};
use crate::lattice::{hex_disc, hex_shells, hex_spacing, line_segment, square_disc, square_spacing};
use crate::lorentz::SampledField;
use crate::plane::{Ball, Point2};
use crate::quad::{integrate_log_polar, integrate_polar, integrate_rect_tiled, Anchor, QuadOpts};
use crate::region::Region;

/// Lattice pitch of the cover centers.
pub const COVER_SPACING: f64 = 0.125;
/// Radius of each cover disc.
pub const COVER_RADIUS: f64 = 0.25;

/// One disc of the plane cover.
#[derive(Debug, Clone, Serialize)]
pub struct CoverCell {
    /// Lattice index; the center is index * spacing.
    pub index: (i64, i64),
    pub center: Point2,
    /// Configuration points strictly inside the disc, by index.
    pub members: Vec<usize>,
}

/// The portion of the plane cover within reach of a configuration, together
/// with the combinatorial constants the bounds depend on.
#[derive(Debug, Clone, Serialize)]
pub struct Covering {
    pub cells: Vec<CoverCell>,
    /// Max count of cover discs containing a single point, certified over
    /// the arrangement of disc boundaries (closed count, an upper bound for
    /// the open discs used for membership).
    pub overlap: usize,
    /// Count of cells whose disc comes within 1/2 of a fixed disc.
    pub crowding: usize,
    /// Per-cell growth budget, 1 / (32 * crowding).
    pub rho: f64,
}

/// Plane-wide maximum number of cover discs containing one point, in lattice
/// units (disc radius 2, unit spacing). The membership count is piecewise
/// constant on the arrangement of the boundary circles and every bounded
/// face's closure contains a circle intersection, so enumerating those
/// vertices (and the centers) over one period certifies the maximum.
fn overlap_constant() -> usize {
    let r2 = 4.0;
    let centers: Vec<Point2> = (-4..=5)
        .flat_map(|i| (-4..=5).map(move |j| Point2::new(i as f64, j as f64)))
        .collect();
    let mut candidates: Vec<Point2> = centers
        .iter()
        .copied()
        .filter(|c| (0.0..=1.0).contains(&c.x) && (0.0..=1.0).contains(&c.y))
        .collect();
    for (k, a) in centers.iter().enumerate() {
        for b in &centers[k + 1..] {
            let d = a.dist(*b);
            if d == 0.0 || d > 4.0 {
                continue;
            }
            let h = (r2 - 0.25 * d * d).max(0.0).sqrt();
            let mid = (*a + *b) * 0.5;
            let u = (*b - *a) * (1.0 / d);
            let normal = Point2::new(-u.y, u.x);
            for s in [h, -h] {
                let p = mid + normal * s;
                if (-0.2..=1.2).contains(&p.x) && (-0.2..=1.2).contains(&p.y) {
                    candidates.push(p);
                }
            }
        }
    }
    candidates
        .iter()
        .map(|p| centers.iter().filter(|c| c.dist2(*p) <= r2 + 1e-9).count())
        .max()
        .unwrap()
}

/// Cells whose disc comes within 1/2 of a fixed cell's disc: center distance
/// below 1/2 + 2 * radius = 1, which is 8 lattice units.
fn crowding_constant() -> usize {
    let mut count = 0;
    for i in -8i64..=8 {
        for j in -8i64..=8 {
            if i * i + j * j < 64 {
                count += 1;
            }
        }
    }
    count
}

/// Enumerates the cover cells near the configuration and assigns points to
/// the open discs that contain them. Cells are ordered by lattice index, so
/// every later tie-break on "first cell" is deterministic.
pub fn build_covering(config: &PointConfig) -> Covering {
    let overlap = overlap_constant();
    let crowding = crowding_constant();
    let rho = 1.0 / (32.0 * crowding as f64);
    // The pruning step needs candidate cells up to one disc radius plus a
    // cluster diameter away from some point; 3 lattice units = 0.375 covers
    // that with room to spare.
    let mut indices: BTreeSet<(i64, i64)> = BTreeSet::new();
    for p in config.points() {
        let ci = (p.x / COVER_SPACING).round() as i64;
        let cj = (p.y / COVER_SPACING).round() as i64;
        for i in ci - 3..=ci + 3 {
            for j in cj - 3..=cj + 3 {
                indices.insert((i, j));
            }
        }
    }
    let cells = indices
        .into_iter()
        .map(|(i, j)| {
            let center = Point2::new(i as f64 * COVER_SPACING, j as f64 * COVER_SPACING);
            let members = config
                .points()
                .iter()
                .enumerate()
                .filter(|(_, p)| p.dist(center) < COVER_RADIUS)
                .map(|(idx, _)| idx)
                .collect();
            CoverCell { index: (i, j), center, members }
        })
        .collect();
    Covering { cells, overlap, crowding, rho }
}

/// Growth run for one occupied cover cell.
#[derive(Debug, Clone)]
pub struct CellGrowth {
    /// Index into `Covering::cells`.
    pub cell: usize,
    /// Configuration indices of the seeds, in configuration order.
    pub members: Vec<usize>,
    pub trace: GrowthTrace,
}

/// A final ball that survived pruning.
#[derive(Debug, Clone)]
pub struct KeptBall {
    /// Index into `Construction::growths`.
    pub growth: usize,
    /// Ball id inside that trace.
    pub ball_id: usize,
    pub ball: Ball,
    /// Configuration indices of the seeds inside.
    pub seeds: Vec<usize>,
}

/// The full localized construction: one growth per occupied cell, a pruned
/// disjoint family of final balls covering the points, and the comparison
/// field assembled from the kept annuli plus one seed-scale ball per point.
#[derive(Debug, Clone)]
pub struct Construction {
    pub covering: Covering,
    pub growths: Vec<CellGrowth>,
    pub kept: Vec<KeptBall>,
    /// Seed radius of the initial balls.
    pub eta: f64,
    /// Annuli retained for the field, unit coefficient each.
    pub annuli: Vec<Annulus>,
    /// The comparison field.
    pub field: AnalyticField,
}

/// Root of a ball in the merge forest.
fn forest_roots(trace: &GrowthTrace) -> Vec<usize> {
    let n = trace.parent.len();
    let mut roots = vec![0usize; n];
    for id in 0..n {
        let mut cur = id;
        while let Some(up) = trace.parent[cur] {
            cur = up;
        }
        roots[id] = cur;
    }
    roots
}

/// Runs the per-cell growths, groups the final balls of all cells into
/// connected components, keeps each component's balls from the first cell
/// whose disc contains the whole component, and assembles the comparison
/// field. All points must lie within distance 1 of `support`.
pub fn localized_construction(config: &PointConfig, support: &Region) -> Result<Construction> {
    for p in config.points() {
        if !support.hat_contains(*p) {
            return Err(Error::config(
                "a configuration point lies further than 1 from the region",
            ));
        }
    }
    let covering = build_covering(config);
    let n = config.len();
    let eta = 0.5 * config.separation().min(covering.rho / n as f64);

    let mut growths: Vec<CellGrowth> = Vec::new();
    for (cell_idx, cell) in covering.cells.iter().enumerate() {
        if cell.members.is_empty() {
            continue;
        }
        let pts: Vec<Point2> = cell.members.iter().map(|&i| config.points()[i]).collect();
        let sub = PointConfig::new(pts)?;
        let initial = initial_collection(&sub, eta)?;
        let trace = grow(&initial, covering.rho)?;
        growths.push(CellGrowth { cell: cell_idx, members: cell.members.clone(), trace });
    }

    // Final balls across all cells, flattened; union-find over intersection.
    let mut flat: Vec<(usize, usize, Ball)> = Vec::new();
    for (g, growth) in growths.iter().enumerate() {
        let last = growth.trace.events.last().expect("trace has events");
        for tb in &last.balls {
            flat.push((g, tb.id, tb.ball));
        }
    }
    let mut dsu: Vec<usize> = (0..flat.len()).collect();
    fn find(dsu: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while dsu[r] != r {
            r = dsu[r];
        }
        let mut cur = i;
        while dsu[cur] != r {
            let next = dsu[cur];
            dsu[cur] = r;
            cur = next;
        }
        r
    }
    for i in 0..flat.len() {
        for j in (i + 1)..flat.len() {
            if flat[i].2.intersects(&flat[j].2, 1e-12) {
                let (ri, rj) = (find(&mut dsu, i), find(&mut dsu, j));
                if ri != rj {
                    dsu[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut components: Vec<Vec<usize>> = Vec::new();
    {
        let mut root_slot: std::collections::HashMap<usize, usize> = Default::default();
        for i in 0..flat.len() {
            let r = find(&mut dsu, i);
            let slot = *root_slot.entry(r).or_insert_with(|| {
                components.push(Vec::new());
                components.len() - 1
            });
            components[slot].push(i);
        }
    }

    let mut kept: Vec<KeptBall> = Vec::new();
    for comp in &components {
        // Points of the component: seeds of every member ball.
        let mut comp_points: BTreeSet<usize> = BTreeSet::new();
        for &fi in comp {
            let (g, ball_id, _) = flat[fi];
            for leaf in growths[g].trace.leaves_under(ball_id) {
                comp_points.insert(growths[g].members[leaf]);
            }
        }
        // First cell whose disc contains every ball of the component and
        // whose membership includes every point of the component.
        let home = covering.cells.iter().position(|cell| {
            comp.iter().all(|&fi| {
                let b = &flat[fi].2;
                b.center.dist(cell.center) + b.radius <= COVER_RADIUS + 1e-12
            }) && comp_points.iter().all(|&pi| cell.members.contains(&pi))
        });
        let Some(home) = home else {
            return Err(Error::geometry(
                "a merged cluster does not fit inside one cover disc",
            ));
        };
        let Some(home_growth) = growths.iter().position(|gr| gr.cell == home) else {
            return Err(Error::geometry("the host cover cell has no growth run"));
        };
        let mut covered: BTreeSet<usize> = BTreeSet::new();
        for &fi in comp {
            let (g, ball_id, ball) = flat[fi];
            if g != home_growth {
                continue;
            }
            let seeds: Vec<usize> = growths[g]
                .trace
                .leaves_under(ball_id)
                .into_iter()
                .map(|leaf| growths[g].members[leaf])
                .collect();
            covered.extend(seeds.iter().copied());
            kept.push(KeptBall { growth: g, ball_id, ball, seeds });
        }
        if covered != comp_points {
            return Err(Error::geometry("pruned balls fail to cover their cluster"));
        }
    }

    for i in 0..kept.len() {
        for j in (i + 1)..kept.len() {
            if kept[i].ball.intersects(&kept[j].ball, -1e-9) {
                return Err(Error::geometry("kept balls overlap after pruning"));
            }
        }
    }

    // Field assembly: unit annulus terms from each kept ball's own chain,
    // then one seed-scale ball term per configuration point.
    let mut field = AnalyticField::default();
    let mut kept_annuli: Vec<Annulus> = Vec::new();
    for (g, growth) in growths.iter().enumerate() {
        let kept_ids: BTreeSet<usize> =
            kept.iter().filter(|kb| kb.growth == g).map(|kb| kb.ball_id).collect();
        if kept_ids.is_empty() {
            continue;
        }
        let roots = forest_roots(&growth.trace);
        let collection = annuli_from_trace(&growth.trace);
        let meta = collection.meta.as_ref().expect("trace annuli carry meta");
        for (annulus, m) in collection.annuli.iter().zip(meta) {
            if kept_ids.contains(&roots[m.ball_id]) {
                kept_annuli.push(*annulus);
                field.push(1.0, Term::AnnulusVortex { annulus: *annulus });
            }
        }
    }
    for p in config.points() {
        field.push(1.0, Term::BallVortex { ball: Ball::new(*p, eta) });
    }

    Ok(Construction { covering, growths, kept, eta, annuli: kept_annuli, field })
}

/// Circles (and optionally the horizontal axis) across which an integrand
/// jumps or kinks. Charts align quadrature panels with these so no panel
/// interior sees a discontinuity.
#[derive(Debug, Clone, Default)]
struct ChartBreaks {
    circles: Vec<(Point2, f64)>,
    axis: bool,
}

impl ChartBreaks {
    fn from_field(field: &AnalyticField) -> Self {
        let mut out = ChartBreaks::default();
        out.merge_field(field);
        out
    }

    fn merge_field(&mut self, field: &AnalyticField) {
        for (coeff, term) in &field.terms {
            if *coeff == 0.0 {
                continue;
            }
            match term {
                Term::AnnulusVortex { annulus } => {
                    self.circles.push((annulus.center, annulus.inner));
                    self.circles.push((annulus.center, annulus.outer));
                }
                Term::BallVortex { ball } => self.circles.push((ball.center, ball.radius)),
                Term::LineBackground => self.axis = true,
                _ => {}
            }
        }
    }

    /// Kink circles of a ramp cutoff over a disc region.
    fn merge_cutoff(&mut self, chi: &Cutoff) {
        if let Region::Ball { center, radius } = *chi.support() {
            self.circles.push((center, radius));
            if radius > 1.0 {
                self.circles.push((center, radius - 1.0));
            }
        }
    }

    /// Keeps only structure that meets the open disc B(center, r_hi).
    fn clipped(&self, center: Point2, r_hi: f64) -> ChartBreaks {
        let circles = self
            .circles
            .iter()
            .copied()
            .filter(|&(c, rho)| (center.dist(c) - rho).abs() < r_hi)
            .collect();
        ChartBreaks { circles, axis: self.axis && center.y.abs() < r_hi }
    }

    /// Crossing angles on the circle of radius s around `center`, sorted.
    fn theta_breaks(&self, center: Point2, s: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for &(c, rho) in &self.circles {
            circle_crossings(center, s, c, rho, &mut out);
        }
        if self.axis && center.y.abs() < s {
            let t = (-center.y / s).asin();
            out.push(normalize_angle(t));
            out.push(normalize_angle(std::f64::consts::PI - t));
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        out
    }

    /// Radii at which the crossing pattern changes: tangency distances of
    /// every break circle, plus the axis distance.
    fn radial_knots(&self, center: Point2, r_hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for &(c, rho) in &self.circles {
            let d = center.dist(c);
            for t in [(d - rho).abs(), d + rho] {
                if t > 1e-14 && t < r_hi {
                    out.push(t);
                }
            }
        }
        if self.axis {
            let t = center.y.abs();
            if t > 1e-14 && t < r_hi {
                out.push(t);
            }
        }
        out
    }
}

/// Integral of f against dtheta over the circle of radius s, panels aligned
/// with the break angles. Multiply by s for an arc-length integral.
fn circle_integral<F: Fn(Point2) -> f64>(
    f: &F,
    center: Point2,
    s: f64,
    breaks: &ChartBreaks,
    tol: f64,
) -> f64 {
    let tau = std::f64::consts::TAU;
    let g = |theta: f64| f(Point2::new(center.x + s * theta.cos(), center.y + s * theta.sin()));
    let cuts = breaks.theta_breaks(center, s);
    if cuts.is_empty() {
        return adaptive_1d(&g, 0.0, tau, tol, 24);
    }
    let mut total = 0.0;
    for i in 0..cuts.len() {
        let a = cuts[i];
        let b = if i + 1 < cuts.len() { cuts[i + 1] } else { cuts[0] + tau };
        if b - a < 1e-13 {
            continue;
        }
        total += adaptive_1d(&g, a, b, tol * (b - a) / tau + 1e-300, 24);
    }
    total
}

/// Area integral of f over B(center, r_hi) as an adaptive radial scan of
/// adaptive circle integrals. Between radial knots the circle-integral
/// profile is smooth, so the outer rule sees no hidden structure.
fn radial_scan<F: Fn(Point2) -> f64>(
    f: &F,
    center: Point2,
    r_hi: f64,
    breaks: &ChartBreaks,
    splits: &[f64],
    tol: f64,
) -> f64 {
    let mut knots = breaks.radial_knots(center, r_hi);
    knots.extend(splits.iter().copied().filter(|&t| t > 1e-14 && t < r_hi));
    knots.push(0.0);
    knots.push(r_hi);
    knots.sort_by(f64::total_cmp);
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * r_hi.max(1.0));
    let theta_tol = 0.25 * tol / (r_hi * r_hi);
    let profile = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        s * circle_integral(f, center, s, breaks, theta_tol)
    };
    let mut total = 0.0;
    for pair in knots.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b - a < 1e-15 * r_hi.max(1.0) {
            continue;
        }
        total += adaptive_1d(&profile, a, b, tol * (b - a) / r_hi + 1e-300, 20);
    }
    total
}

fn bump_at(kb: &KeptBall, x: Point2) -> f64 {
    let reach = 2.0 * kb.ball.radius;
    let d2 = x.dist2(kb.ball.center);
    if d2 >= reach * reach {
        0.0
    } else {
        bump(d2.sqrt(), reach)
    }
}

/// Product of (1 - bump) over every kept ball; vanishes exactly where some
/// bump saturates, in particular on each kept ball itself.
fn complement_weight(kept: &[KeptBall], x: Point2) -> f64 {
    let mut w = 1.0;
    for kb in kept {
        let b = bump_at(kb, x);
        if b >= 1.0 {
            return 0.0;
        }
        w *= 1.0 - b;
    }
    w
}

/// Ordered partition piece for ball `idx`: its own bump damped by every
/// earlier ball's complement. Summed over idx this equals one minus the
/// complement weight, exactly.
fn ordered_bump(kept: &[KeptBall], idx: usize, x: Point2) -> f64 {
    let mut w = bump_at(&kept[idx], x);
    if w <= 0.0 {
        return 0.0;
    }
    for kb in &kept[..idx] {
        w *= 1.0 - bump_at(kb, x);
        if w == 0.0 {
            return 0.0;
        }
    }
    w
}

fn field_has_axis(field: &AnalyticField) -> bool {
    field
        .terms
        .iter()
        .any(|(c, t)| *c != 0.0 && matches!(t, Term::LineBackground))
}

/// Local piece of the weighted difference energy over one kept ball's bump
/// support. Concentric charts (an unmerged chain with no foreign structure
/// in reach) use a product quadrature in (r, theta); anything else falls
/// back to the radial scan.
fn kept_ball_local_integral(
    diff: &AnalyticField,
    chi: &Cutoff,
    kept: &[KeptBall],
    idx: usize,
    breaks: &ChartBreaks,
    tol: f64,
) -> Result<f64> {
    let kb = &kept[idx];
    let center = kb.ball.center;
    let r_b = kb.ball.radius;
    let r_hi = 2.0 * r_b;
    let f = |x: Point2| {
        let w = ordered_bump(kept, idx, x);
        if w <= 0.0 {
            return 0.0;
        }
        let chi_v = chi.eval(x);
        if chi_v <= 0.0 {
            return 0.0;
        }
        // The difference field is bounded across seed points; an eval error
        // means a node hit a seed exactly, a measure-zero event.
        match diff.eval_squared(x) {
            Ok(v) => chi_v * w * v,
            Err(_) => 0.0,
        }
    };
    let clipped = breaks.clipped(center, r_hi);
    let concentric = !clipped.axis
        && clipped
            .circles
            .iter()
            .all(|&(c, _)| c.dist(center) <= 1e-9 * (1.0 + center.norm()));
    if concentric {
        let mut q = QuadOpts::with_tol(tol);
        q.split_x = clipped
            .circles
            .iter()
            .map(|&(_, rho)| rho)
            .filter(|&t| t > 0.0 && t < r_hi)
            .collect();
        q.split_x.push(r_b);
        let res = integrate_polar(|x| f(x), center, 0.0, r_hi, &q)?;
        Ok(res.value)
    } else {
        Ok(radial_scan(&f, center, r_hi, &clipped, &[r_b], tol))
    }
}

/// One half of the integral of chi |j - G|^2 over the cutoff support, split
/// as a smooth complement piece plus one local chart per kept ball.
fn half_local_energy(
    j: &AnalyticField,
    cons: &Construction,
    chi: &Cutoff,
    opts: &VerifyOpts,
) -> Result<f64> {
    let kept = &cons.kept;
    let poles = j.singular_centers();

    // One smooth hole per pole, wide enough to swallow the kept ball around
    // it and its ramp, narrow enough to exclude every other pole. The far
    // field then needs no refinement below the hole scale, and each hole is
    // integrated on its own log-polar chart where the inverse-square profile
    // is flat.
    let hole_radius: Vec<f64> = poles
        .iter()
        .map(|&(p, _)| {
            let nearest = poles
                .iter()
                .filter(|&&(q, _)| q != p)
                .map(|&(q, _)| p.dist(q))
                .fold(f64::INFINITY, f64::min);
            let (bc, br) = kept
                .iter()
                .find(|kb| kb.ball.contains(p))
                .map(|kb| (kb.ball.center, kb.ball.radius))
                .unwrap_or((p, 0.0));
            let reach = 2.0 * (bc.dist(p) + 2.0 * br);
            (0.35 * nearest).min(0.5).max(reach)
        })
        .collect();
    let hole_weight = |x: Point2, upto: usize| {
        let mut w = 1.0;
        for (k, &(p, _)) in poles.iter().take(upto).enumerate() {
            w *= 1.0 - bump(x.dist(p), hole_radius[k]);
            if w == 0.0 {
                break;
            }
        }
        w
    };

    let (lo, hi) = chi.support().bbox();
    let mut q = QuadOpts::with_tol(0.5 * opts.quad_tol);
    q.anchors = poles
        .iter()
        .zip(&hole_radius)
        .map(|(&(p, _), &d)| Anchor { at: p, scale: 0.5 * d })
        .collect();
    if field_has_axis(j) && lo.y < 0.0 && hi.y > 0.0 {
        q.split_y.push(0.0);
    }
    let outer_f = |x: Point2| {
        let holes = hole_weight(x, poles.len());
        if holes <= 0.0 {
            return 0.0;
        }
        let w = complement_weight(kept, x);
        if w <= 0.0 {
            return 0.0;
        }
        let chi_v = chi.eval(x);
        if chi_v <= 0.0 {
            return 0.0;
        }
        match j.eval_squared(x) {
            Ok(v) => chi_v * w * holes * v,
            Err(_) => f64::INFINITY,
        }
    };
    let outer = integrate_rect_tiled(&outer_f, lo, hi, &q, opts.tiles)?;

    // Ordered hole weights sum with the far weight to one, so the charts and
    // the far field tile the support exactly whether or not holes overlap.
    let chart_tol = 0.5 * opts.quad_tol / poles.len().max(1) as f64;
    let charts: Result<Vec<f64>> = (0..poles.len())
        .into_par_iter()
        .map(|k| {
            let (p, _) = poles[k];
            let d = hole_radius[k];
            let (bc, br) = kept
                .iter()
                .find(|kb| kb.ball.contains(p))
                .map(|kb| (kb.ball.center, kb.ball.radius))
                .unwrap_or((p, 0.0));
            let dead = (br - bc.dist(p)).max(0.0);
            let r_lo = (0.5 * dead).max(1e-12 * d);
            let mut cq = QuadOpts::with_tol(chart_tol);
            if bc.dist(p) <= 1e-12 * (1.0 + br) {
                for t in [br, 2.0 * br] {
                    if t > r_lo && t < d {
                        cq.split_x.push(t.ln());
                    }
                }
            }
            if field_has_axis(j) && p.y == 0.0 {
                cq.split_y.push(std::f64::consts::PI);
            }
            let f = |x: Point2| {
                let w = bump(x.dist(p), d) * hole_weight(x, k);
                if w <= 0.0 {
                    return 0.0;
                }
                let c = complement_weight(kept, x);
                if c <= 0.0 {
                    return 0.0;
                }
                let chi_v = chi.eval(x);
                if chi_v <= 0.0 {
                    return 0.0;
                }
                match j.eval_squared(x) {
                    Ok(v) => chi_v * c * w * v,
                    Err(_) => f64::INFINITY,
                }
            };
            integrate_log_polar(f, p, r_lo, d, &cq).map(|r| r.value)
        })
        .collect();
    let chart_sum: f64 = charts?.iter().sum();

    let diff = j.difference(&cons.field);
    let mut breaks = ChartBreaks::from_field(&cons.field);
    breaks.axis |= field_has_axis(j);
    breaks.merge_cutoff(chi);
    for kb in kept.iter() {
        breaks.circles.push((kb.ball.center, kb.ball.radius));
        breaks.circles.push((kb.ball.center, 2.0 * kb.ball.radius));
    }
    let tol_ball = opts.quad_tol / kept.len().max(1) as f64;
    let locals: Result<Vec<f64>> = (0..kept.len())
        .into_par_iter()
        .map(|i| kept_ball_local_integral(&diff, chi, kept, i, &breaks, tol_ball))
        .collect();
    let local_sum: f64 = locals?.iter().sum();
    Ok(0.5 * (outer.value + chart_sum + local_sum))
}

/// Knobs for the inequality checks.
#[derive(Debug, Clone)]
pub struct VerifyOpts {
    /// Weight on the renormalized energy in the main comparison.
    pub beta: f64,
    /// Absolute budget for the local-energy quadratures.
    pub quad_tol: f64,
    /// Grid cells across a kept-ball radius when sampling the comparison
    /// field's weak norm.
    pub patch_cells: f64,
    pub tiles: usize,
    pub energy: EnergyOpts,
}

impl Default for VerifyOpts {
    fn default() -> Self {
        VerifyOpts {
            beta: 1.0,
            quad_tol: 1e-6,
            patch_cells: 12.0,
            tiles: 8,
            energy: EnergyOpts::default(),
        }
    }
}

/// One checked inequality: lhs <= constant * rhs_without_constant, with the
/// constant the data implies. For bounds that carry no free constant the
/// implied value is the ratio lhs / rhs and should sit at or above one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs_without_constant: f64,
    pub implied_constant: f64,
}

/// Full record of the main comparison on one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub n_prime: usize,
    pub beta: f64,
    /// Renormalized energy of the current against the cutoff.
    pub energy: f64,
    /// Residual of the eta extrapolation behind `energy`.
    pub energy_tail: f64,
    /// Half the integral of chi |j - G|^2.
    pub local_energy: f64,
    /// Sampled weak-L2 norm of the comparison field, squared.
    pub comparison_weak_sq: f64,
    pub eta: f64,
    pub rho: f64,
    pub kept_balls: usize,
    pub kept_annuli: usize,
    /// local_energy <= (1 + beta) energy + C (n (sup + lip) + n' ln n' + 1).
    pub main: InequalityRecord,
    /// comparison_weak_sq <= C n.
    pub comparison: InequalityRecord,
}

/// Runs the full pipeline on one configuration: localized construction,
/// renormalized energy, local difference energy, and the weak norm of the
/// comparison field.
pub fn check_theorem_main(
    config: &PointConfig,
    background: BackgroundMeasure,
    chi: &Cutoff,
    opts: &VerifyOpts,
) -> Result<VerifyReport> {
    let j = synthetic_current(config, background);
    let cons = localized_construction(config, chi.support())?;
    let local_energy = half_local_energy(&j, &cons, chi, opts)?;
    let energy = renormalized_energy(&j, chi, &opts.energy)?;

    let n = config.len();
    let n_prime = chi.transition_band_count(config.points());
    let boundary_term = if n_prime > 0 {
        n_prime as f64 * (n_prime as f64).ln()
    } else {
        0.0
    };
    let denom = n as f64 * (chi.sup_norm() + chi.lipschitz()) + boundary_term + 1.0;
    let implied = (local_energy - (1.0 + opts.beta) * energy.value) / denom;
    let main = InequalityRecord {
        name: "local-energy-comparison".into(),
        lhs: local_energy,
        rhs_without_constant: denom,
        implied_constant: implied,
    };

    let min_r = cons
        .kept
        .iter()
        .map(|kb| kb.ball.radius)
        .fold(f64::INFINITY, f64::min);
    let patches: Vec<Ball> = cons.kept.iter().map(|kb| kb.ball).collect();
    let sampled = SampledField::sample_patches(&cons.field, &patches, min_r / opts.patch_cells)?;
    let weak_sq = sampled.weak_l2_norm().powi(2);
    let comparison = InequalityRecord {
        name: "comparison-weak-l2".into(),
        lhs: weak_sq,
        rhs_without_constant: n as f64,
        implied_constant: weak_sq / n as f64,
    };

    Ok(VerifyReport {
        n,
        n_prime,
        beta: opts.beta,
        energy: energy.value,
        energy_tail: energy.extrapolation_delta,
        local_energy,
        comparison_weak_sq: weak_sq,
        eta: cons.eta,
        rho: cons.covering.rho,
        kept_balls: cons.kept.len(),
        kept_annuli: cons.annuli.len(),
        main,
        comparison,
    })
}

/// Record of the interpolation corollary on one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct CorollaryReport {
    pub p: f64,
    pub grid_h: f64,
    /// Sampled L^p norm of sqrt(chi) |j|.
    pub sampled_lp: f64,
    /// Sampled weak-L2 norm of the same samples.
    pub sampled_weak: f64,
    /// sampled_lp / (C_p |supp|^{1/p - 1/2}); never exceeds sampled_weak.
    pub embedding_lower: f64,
    pub chain_holds: bool,
    /// sampled_lp <= C (energy + n (sup + lip) + n' ln n')^{1/2}.
    pub record: InequalityRecord,
}

/// Checks the weighted L^p bound through the weak-L2 pivot. `energy` is the
/// renormalized energy of the same current and cutoff, computed separately.
pub fn check_corollary(
    config: &PointConfig,
    background: BackgroundMeasure,
    chi: &Cutoff,
    p: f64,
    energy: f64,
    grid_h: f64,
) -> Result<CorollaryReport> {
    if !(1.0 <= p && p < 1.95) {
        return Err(Error::config(
            "interpolation exponent must lie in [1, 1.95); the constant blows up at 2",
        ));
    }
    let j = synthetic_current(config, background);
    let samples =
        SampledField::sample_weighted(&j, |x| chi.eval(x).sqrt(), chi.support(), grid_h)?;
    let sampled_lp = samples.lp_norm(p)?;
    let sampled_weak = samples.weak_l2_norm();
    let c_p = crate::lorentz::embedding_constant(p)?;
    let embedding_lower = sampled_lp / (c_p * samples.measure().powf(1.0 / p - 0.5));
    let chain_holds = embedding_lower <= sampled_weak * (1.0 + 1e-9);

    let n = config.len() as f64;
    let n_prime = chi.transition_band_count(config.points());
    let boundary_term = if n_prime > 0 {
        n_prime as f64 * (n_prime as f64).ln()
    } else {
        0.0
    };
    let rhs = (energy + n * (chi.sup_norm() + chi.lipschitz()) + boundary_term)
        .max(0.0)
        .sqrt();
    let record = InequalityRecord {
        name: "weighted-lp-by-energy".into(),
        lhs: sampled_lp,
        rhs_without_constant: rhs,
        implied_constant: sampled_lp / rhs,
    };
    Ok(CorollaryReport {
        p,
        grid_h,
        sampled_lp,
        sampled_weak,
        embedding_lower,
        chain_holds,
        record,
    })
}

/// One concentric circle inside a growth annulus, with both line integrals
/// and the circulation-derived margin.
#[derive(Debug, Clone, Serialize)]
pub struct CircleCheck {
    pub center: Point2,
    pub radius: f64,
    /// Line integral of |j|^2 over the circle.
    pub current_sq: f64,
    /// Line integral of |j - G|^2.
    pub diff_sq: f64,
    /// Points strictly enclosed by the circle.
    pub winding: usize,
    /// current_sq - diff_sq - 2 pi winding / radius + 2 pi M; nonnegative.
    pub margin: f64,
}

/// Lower bound for the energy of one final ball of a growth trace.
#[derive(Debug, Clone, Serialize)]
pub struct AnnulusBoundReport {
    pub ball: Ball,
    /// Seeds inside this ball.
    pub seeds: usize,
    /// Seeds of the whole trace.
    pub trace_points: usize,
    pub eta: f64,
    /// Total radius of the final collection.
    pub total_radius: f64,
    pub density_bound: f64,
    /// Half the integral of |j|^2 over the ball minus the seed discs.
    pub current_half: f64,
    /// Same integral for j - G.
    pub diff_half: f64,
    /// current_half >= pi seeds (ln(total/(n eta)) - M total) + diff_half,
    /// recorded as the ratio of the two sides.
    pub growth: InequalityRecord,
    pub circles: Vec<CircleCheck>,
}

/// Checks the per-ball growth lower bound and the concentric-circle
/// inequality on sampled circles inside each annulus of the chain.
pub fn check_annulus_bounds(
    trace: &GrowthTrace,
    background: BackgroundMeasure,
    eta: f64,
    ball_index: usize,
    circles_per_annulus: usize,
    quad_tol: f64,
) -> Result<AnnulusBoundReport> {
    let seeds: Vec<Point2> = trace.initial_balls().iter().map(|b| b.center).collect();
    let config = PointConfig::new(seeds.clone())?;
    let j = synthetic_current(&config, background);
    let g = comparison_field(trace, eta)?;
    let diff = j.difference(&g);
    let last = trace.events.last().expect("trace has events");
    let Some(tb) = last.balls.get(ball_index) else {
        return Err(Error::config("no final ball at that index"));
    };
    let ball = tb.ball;
    let n_b = trace.leaves_under(tb.id).len();
    let n = trace.n_initial;
    let total_radius = trace.end_time();
    let m = background.density_bound();

    let holes: Vec<Ball> = seeds.iter().map(|&p| Ball::new(p, eta)).collect();
    let masked = |x: Point2| holes.iter().any(|b| b.contains(x));
    let mut breaks = ChartBreaks::from_field(&g);
    breaks.axis |= field_has_axis(&j);
    let clipped = breaks.clipped(ball.center, ball.radius * (1.0 + 1e-9));

    let f_cur = |x: Point2| {
        if masked(x) {
            0.0
        } else {
            j.eval_squared(x).unwrap_or(0.0)
        }
    };
    let f_diff = |x: Point2| {
        if masked(x) {
            0.0
        } else {
            diff.eval_squared(x).unwrap_or(0.0)
        }
    };
    let current_half = 0.5 * radial_scan(&f_cur, ball.center, ball.radius, &clipped, &[], quad_tol);
    let diff_half = 0.5 * radial_scan(&f_diff, ball.center, ball.radius, &clipped, &[], quad_tol);

    let log_term = (total_radius / (n as f64 * eta)).ln() - m * total_radius;
    let rhs = std::f64::consts::PI * n_b as f64 * log_term + diff_half;
    let growth = InequalityRecord {
        name: "growth-ball-energy-lower".into(),
        lhs: current_half,
        rhs_without_constant: rhs,
        implied_constant: current_half / rhs,
    };

    let tau = std::f64::consts::TAU;
    let roots = forest_roots(trace);
    let collection = annuli_from_trace(trace);
    let metas = collection.meta.as_ref().expect("trace annuli carry meta");
    let mut circles = Vec::new();
    for (annulus, meta) in collection.annuli.iter().zip(metas) {
        if roots[meta.ball_id] != tb.id {
            continue;
        }
        for k in 0..circles_per_annulus {
            let frac = (k as f64 + 0.5) / circles_per_annulus as f64;
            let s = annulus.inner + frac * (annulus.outer - annulus.inner);
            let theta_tol = quad_tol * (1.0 + 1.0 / (s * s));
            let cur = s * circle_integral(
                &|x| j.eval_squared(x).unwrap_or(0.0),
                annulus.center,
                s,
                &breaks,
                theta_tol,
            );
            let dif = s * circle_integral(
                &|x| diff.eval_squared(x).unwrap_or(0.0),
                annulus.center,
                s,
                &breaks,
                theta_tol,
            );
            let winding = seeds.iter().filter(|p| p.dist(annulus.center) <= s).count();
            let margin = cur - dif - tau * winding as f64 / s + tau * m;
            circles.push(CircleCheck {
                center: annulus.center,
                radius: s,
                current_sq: cur,
                diff_sq: dif,
                winding,
                margin,
            });
        }
    }

    Ok(AnnulusBoundReport {
        ball,
        seeds: n_b,
        trace_points: n,
        eta,
        total_radius,
        density_bound: m,
        current_half,
        diff_half,
        growth,
        circles,
    })
}

/// One corpus entry of the scaling study.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingEntry {
    pub shells: u32,
    pub n: usize,
    pub n_prime: usize,
    /// Sampled L^p norm of sqrt(chi) |j|.
    pub weighted_lp: f64,
    pub weighted_weak: f64,
}

/// Least-squares slope of ln(norm) against ln(n) over a family of hexagonal
/// shell configurations whose window deliberately cuts the outer shell.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub p: f64,
    pub spacing: f64,
    pub grid_step: f64,
    pub entries: Vec<ScalingEntry>,
    pub slope: f64,
    /// The interpolation bound predicts slope 1/p.
    pub slope_target: f64,
    /// sqrt(ln n): the factor by which the direct energy bound exceeds the
    /// interpolation bound. Strictly increasing along the corpus.
    pub baseline_ratio: Vec<f64>,
    /// n' / n; decays as boundary over bulk.
    pub boundary_share: Vec<f64>,
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Runs the scaling corpus: hexagonal lattices at the neutral density
/// 1/(2 pi), windows of radius shells * spacing - 0.2, fixed grid step
/// spacing / grid_divisor.
pub fn scaling_study(shell_counts: &[u32], p: f64, grid_divisor: f64) -> Result<ScalingReport> {
    if !(1.0 <= p && p <= 1.9) {
        return Err(Error::config("scaling exponent must lie in [1, 1.9]"));
    }
    if shell_counts.len() < 4 {
        return Err(Error::config("need at least four sizes to fit a slope"));
    }
    if shell_counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("shell counts must increase"));
    }
    let spacing = hex_spacing(1.0 / std::f64::consts::TAU);
    let grid_step = spacing / grid_divisor;
    let mut entries = Vec::new();
    for &k in shell_counts {
        let config = PointConfig::new(hex_shells(spacing, k))?;
        // Neutrality radius: the background charge pi R^2 enclosed by the
        // window matches the total vortex circulation 2 pi n exactly. This
        // keeps the whole configuration inside the window (up to the six
        // outermost corners at the largest sizes, which stay in the ramp
        // band) while the net field past the lattice edge decays instead of
        // growing, so the norm tracks the point count rather than a window
        // truncation artifact.
        let radius = (2.0 * config.len() as f64).sqrt();
        if radius <= 1.0 {
            return Err(Error::config("window too small for the ramp cutoff"));
        }
        let region = Region::ball(Point2::ORIGIN, radius)?;
        let chi = Cutoff::standard(region.clone())?;
        let j = synthetic_current(&config, BackgroundMeasure::Lebesgue);
        let samples =
            SampledField::sample_weighted(&j, |x| chi.eval(x).sqrt(), &region, grid_step)?;
        entries.push(ScalingEntry {
            shells: k,
            n: config.len(),
            n_prime: chi.transition_band_count(config.points()),
            weighted_lp: samples.lp_norm(p)?,
            weighted_weak: samples.weak_l2_norm(),
        });
    }
    let xs: Vec<f64> = entries.iter().map(|e| (e.n as f64).ln()).collect();
    let ys: Vec<f64> = entries.iter().map(|e| e.weighted_lp.ln()).collect();
    let slope = fit_slope(&xs, &ys);
    // Ratio of the older energy-count bound sqrt(n (log n + 1)) to the
    // sharper sqrt(n) form, evaluated on the same inputs.
    let baseline_ratio = entries.iter().map(|e| ((e.n as f64).ln() + 1.0).sqrt()).collect();
    // Band cost relative to the bulk cost: the theorem's extra term over its
    // main term. The trend toward zero is what makes the band points free.
    let boundary_share = entries
        .iter()
        .map(|e| {
            let np = e.n_prime as f64;
            if e.n_prime > 1 { np * np.ln() / e.n as f64 } else { 0.0 }
        })
        .collect();
    Ok(ScalingReport {
        p,
        spacing,
        grid_step,
        entries,
        slope,
        slope_target: 1.0 / p,
        baseline_ratio,
        boundary_share,
    })
}

/// Energy-per-area curves of the two Bravais lattices at equal density.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeComparison {
    pub density: f64,
    pub radii: Vec<f64>,
    pub hex: Vec<DensityPoint>,
    pub square: Vec<DensityPoint>,
}

/// Renormalized energy per unit area for hexagonal and square lattices of
/// the same density over growing windows.
///
/// Each window is a cone cutoff over B(0, R) and the configurations extend
/// two spacings past it. The slowly varying weight samples the lattices
/// nearly uniformly, which keeps the weighted charge close to neutral; a
/// sharp band instead picks up whole rows with fractional weight, and that
/// commensuration noise is larger than the energy gap between the lattices
/// at desk-scale windows.
pub fn compare_lattices(
    radii: &[f64],
    density: f64,
    opts: &EnergyOpts,
) -> Result<LatticeComparison> {
    if radii.is_empty() {
        return Err(Error::config("no window radii given"));
    }
    let cone = |r: f64| Cutoff::with_ramp(Region::ball(Point2::ORIGIN, r)?, RampShape::Linear, r);
    let a_hex = hex_spacing(density);
    let a_square = square_spacing(density);
    let hex = energy_density(
        |r| PointConfig::new(hex_disc(a_hex, r + 2.0 * a_hex)),
        BackgroundMeasure::Lebesgue,
        radii,
        cone,
        opts,
    )?;
    let square = energy_density(
        |r| PointConfig::new(square_disc(a_square, r + 2.0 * a_square)),
        BackgroundMeasure::Lebesgue,
        radii,
        cone,
        opts,
    )?;
    Ok(LatticeComparison { density, radii: radii.to_vec(), hex, square })
}

/// Energies of a one-dimensional lattice on the axis against random
/// in-line perturbations of the same points.
#[derive(Debug, Clone, Serialize)]
pub struct LineLatticeStudy {
    pub spacing: f64,
    pub window: f64,
    pub amplitude: f64,
    /// Points free to move in each trial; the rest stay on the lattice.
    pub jittered: usize,
    pub lattice_energy: f64,
    pub perturbed_energies: Vec<f64>,
    /// Trials whose energy exceeds the lattice energy.
    pub lattice_wins: usize,
}

/// Compares the axis lattice of the given spacing with `trials` random
/// in-line perturbations, all against the line background over a window of
/// the given radius. Points extend past the window so edge effects stay
/// outside the cutoff, and only points at least three spacings clear of the
/// ramp band are moved: the cutoff discounts energy parked in the band, so
/// jittering points near it measures that artificial outward pull instead
/// of the bulk ordering.
pub fn line_lattice_study(
    spacing: f64,
    window: f64,
    amplitude: f64,
    trials: usize,
    seed: u64,
    opts: &EnergyOpts,
) -> Result<LineLatticeStudy> {
    use rand::Rng;
    use rand::SeedableRng;

    if !(amplitude > 0.0 && amplitude < 0.5 * spacing) {
        return Err(Error::config(
            "perturbation amplitude must stay below half the spacing",
        ));
    }
    let deep = window - 1.0 - 3.0 * spacing;
    if deep < 0.0 {
        return Err(Error::config(
            "window too small: no point sits three spacings clear of the ramp",
        ));
    }
    let pad = window + 2.0;
    let base = line_segment(spacing, pad);
    let jittered = base.iter().filter(|p| p.x.abs() <= deep).count();
    let region = Region::ball(Point2::ORIGIN, window)?;
    let chi = Cutoff::standard(region)?;
    let energy_of = |points: Vec<Point2>| -> Result<f64> {
        let config = PointConfig::new(points)?;
        let j = synthetic_current(&config, BackgroundMeasure::Line);
        Ok(renormalized_energy(&j, &chi, opts)?.value)
    };
    let lattice_energy = energy_of(base.clone())?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut perturbed_energies = Vec::with_capacity(trials);
    for _ in 0..trials {
        let moved: Vec<Point2> = base
            .iter()
            .map(|p| {
                let d = rng.gen_range(-amplitude..amplitude);
                if p.x.abs() <= deep {
                    Point2::new(p.x + d, p.y)
                } else {
                    *p
                }
            })
            .collect();
        perturbed_energies.push(energy_of(moved)?);
    }
    let lattice_wins = perturbed_energies
        .iter()
        .filter(|&&e| e > lattice_energy)
        .count();
    Ok(LineLatticeStudy {
        spacing,
        window,
        amplitude,
        jittered,
        lattice_energy,
        perturbed_energies,
        lattice_wins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    #[test]
    fn covering_constants_by_enumeration() {
        let config = PointConfig::new(vec![Point2::ORIGIN]).unwrap();
        let covering = build_covering(&config);
        assert_eq!(covering.overlap, 14);
        assert_eq!(covering.crowding, 193);
        assert!((covering.rho - 1.0 / 6176.0).abs() < 1e-18);
        // The pruning argument needs crowding * rho below 1/16.
        assert!(covering.crowding as f64 * covering.rho < 1.0 / 16.0);
        assert!(covering.cells.iter().any(|c| !c.members.is_empty()));
    }

    #[test]
    fn every_point_has_a_home_cell() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let pts = crate::lattice::poisson_box(
            40,
            Point2::new(-1.0, -1.0),
            Point2::new(1.0, 1.0),
            &mut rng,
        );
        let config = PointConfig::new(pts).unwrap();
        let covering = build_covering(&config);
        for i in 0..config.len() {
            assert!(covering.cells.iter().any(|c| c.members.contains(&i)));
        }
    }

    #[test]
    fn single_point_pipeline() {
        let config = PointConfig::new(vec![Point2::new(0.03, 0.07)]).unwrap();
        let region = Region::ball(Point2::ORIGIN, 2.0).unwrap();
        let cons = localized_construction(&config, &region).unwrap();
        assert_eq!(cons.kept.len(), 1);
        let kb = &cons.kept[0];
        assert!((kb.ball.radius - cons.covering.rho).abs() < 1e-12 * cons.covering.rho);
        assert_eq!(cons.annuli.len(), 1);
        assert_eq!(cons.field.terms.len(), 2);
        let p = config.points()[0];
        let d = 0.5 * (cons.eta + cons.covering.rho);
        let x = p + Point2::new(d, 0.0);
        let g = cons.field.eval(x).unwrap();
        assert!((g.norm() * d - 1.0).abs() < 1e-12);
        let outside = p + Point2::new(2.0 * cons.covering.rho, 0.0);
        assert_eq!(cons.field.eval(outside).unwrap().norm(), 0.0);
    }

    #[test]
    fn close_pair_merges_and_prunes_to_one_ball() {
        let p1 = Point2::new(0.011, 0.017);
        let rho = 1.0 / 6176.0;
        let p2 = p1 + Point2::new(0.25 * rho, 0.0);
        let config = PointConfig::new(vec![p1, p2]).unwrap();
        let region = Region::ball(Point2::ORIGIN, 2.0).unwrap();
        let cons = localized_construction(&config, &region).unwrap();
        assert_eq!(cons.kept.len(), 1);
        let kb = &cons.kept[0];
        assert_eq!(kb.seeds.len(), 2);
        assert!(kb.ball.contains(p1) && kb.ball.contains(p2));
        assert_eq!(cons.annuli.len(), 3);

        // The assembled field and the home trace's own comparison field
        // agree inside the kept ball.
        let local = comparison_field(&cons.growths[kb.growth].trace, cons.eta).unwrap();
        let probes = [
            p1 + Point2::new(0.4 * rho, 0.1 * rho),
            kb.ball.center + Point2::new(0.0, 0.9 * rho),
            p2 + Point2::new(0.0, 0.5 * cons.eta),
        ];
        for x in probes {
            let a = cons.field.eval(x).unwrap();
            let b = local.eval(x).unwrap();
            assert!((a - b).norm() <= 1e-9 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn distant_points_stay_separate() {
        let pa = Point2::new(-0.7, 0.0);
        let pb = Point2::new(0.8, 0.1);
        let config = PointConfig::new(vec![pa, pb]).unwrap();
        let region = Region::ball(Point2::ORIGIN, 2.0).unwrap();
        let cons = localized_construction(&config, &region).unwrap();
        assert_eq!(cons.kept.len(), 2);
        assert!(cons.kept.iter().any(|kb| kb.ball.contains(pa)));
        assert!(cons.kept.iter().any(|kb| kb.ball.contains(pb)));
        assert_eq!(cons.annuli.len(), 2);
    }

    #[test]
    fn theorem_report_single_vortex() {
        let config = PointConfig::new(vec![Point2::ORIGIN]).unwrap();
        let chi = Cutoff::standard(Region::ball(Point2::ORIGIN, 2.0).unwrap()).unwrap();
        let opts = VerifyOpts { quad_tol: 1e-7, ..VerifyOpts::default() };
        let report = check_theorem_main(&config, BackgroundMeasure::Zero, &chi, &opts).unwrap();

        // G truncates the vortex at the kept radius rho, so the local term
        // has the closed form pi (ln(1/rho) + 2 ln 2 - 1).
        let expected = PI * ((1.0 / report.rho).ln() + 2.0 * (2.0f64).ln() - 1.0);
        assert!(
            (report.local_energy - expected).abs() < 1e-4 * expected,
            "local energy {} vs {}",
            report.local_energy,
            expected
        );
        let w = PI * (2.0 * (2.0f64).ln() - 1.0);
        assert!((report.energy - w).abs() < 1e-4);
        assert_eq!(report.n, 1);
        assert_eq!(report.n_prime, 0);
        assert_eq!(report.kept_balls, 1);
        assert!(report.main.implied_constant > 0.0);
        assert!(report.comparison_weak_sq > 1.0);
        assert!(report.comparison_weak_sq <= 53.0 * PI * 1.05);
    }

    #[test]
    fn transition_band_point_is_counted() {
        let config = PointConfig::new(vec![Point2::new(1.2, 0.0)]).unwrap();
        let chi = Cutoff::standard(Region::ball(Point2::ORIGIN, 2.0).unwrap()).unwrap();
        let opts = VerifyOpts { quad_tol: 1e-5, ..VerifyOpts::default() };
        let report = check_theorem_main(&config, BackgroundMeasure::Zero, &chi, &opts).unwrap();
        assert_eq!(report.n_prime, 1);
        assert!(report.main.implied_constant.is_finite());
    }

    #[test]
    fn annulus_bound_exact_for_lone_vortex() {
        let initial = vec![Ball::new(Point2::ORIGIN, 0.1)];
        let trace = grow(&initial, 0.5).unwrap();
        let report =
            check_annulus_bounds(&trace, BackgroundMeasure::Zero, 0.1, 0, 2, 1e-9).unwrap();
        let expected = PI * (5.0f64).ln();
        assert!((report.current_half - expected).abs() < 1e-6);
        assert!(report.diff_half.abs() < 1e-9);
        assert!((report.growth.implied_constant - 1.0).abs() < 1e-6);
        for c in &report.circles {
            // With no background the circle inequality is an identity.
            assert!(c.margin.abs() < 1e-6 * (1.0 + c.current_sq));
            assert_eq!(c.winding, 1);
        }
    }

    #[test]
    fn annulus_bound_keeps_slack_with_background() {
        let initial = vec![
            Ball::new(Point2::new(0.2, 0.0), 0.05),
            Ball::new(Point2::new(-0.2, 0.0), 0.05),
        ];
        let trace = grow(&initial, 0.9).unwrap();
        assert_eq!(trace.final_balls().len(), 1);
        let report =
            check_annulus_bounds(&trace, BackgroundMeasure::Lebesgue, 0.05, 0, 2, 1e-9).unwrap();
        assert_eq!(report.seeds, 2);
        assert!(report.growth.implied_constant >= 1.0 - 1e-6);
        for c in &report.circles {
            assert!(c.margin >= -1e-6 * (1.0 + c.current_sq));
        }
    }

    #[test]
    fn scaling_smoke() {
        let report = scaling_study(&[1, 2, 3, 4], 1.5, 16.0).unwrap();
        assert_eq!(report.entries.len(), 4);
        let miss = (report.slope - 1.0 / 1.5).abs();
        assert!(miss < 0.15, "slope {}", report.slope);
        assert!(report.baseline_ratio.windows(2).all(|w| w[0] < w[1]));
        // Band points are a vanishing share of the cost once they appear.
        let first = report.boundary_share.iter().copied().find(|&s| s > 0.0);
        let last = *report.boundary_share.last().unwrap();
        assert!(first.is_some_and(|f| last < f && f < 0.75));
        assert!(scaling_study(&[1, 2, 3], 1.5, 16.0).is_err());
        assert!(scaling_study(&[1, 2, 3, 4], 1.95, 16.0).is_err());
    }

    #[test]
    fn corollary_chain_on_vortex_pair() {
        let config =
            PointConfig::new(vec![Point2::new(-0.4, 0.0), Point2::new(0.5, 0.2)]).unwrap();
        let chi = Cutoff::standard(Region::ball(Point2::ORIGIN, 2.0).unwrap()).unwrap();
        let report =
            check_corollary(&config, BackgroundMeasure::Lebesgue, &chi, 1.5, 2.0, 1.0 / 128.0)
                .unwrap();
        assert!(report.chain_holds);
        assert!(report.record.implied_constant.is_finite());
        assert!(report.record.implied_constant > 0.0);
        assert!(report.embedding_lower <= report.sampled_weak * (1.0 + 1e-9));
        assert!(
            check_corollary(&config, BackgroundMeasure::Lebesgue, &chi, 1.96, 2.0, 0.01).is_err()
        );
    }
}
