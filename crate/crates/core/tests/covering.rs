//! Sampled facts about the plane cover: every nearby point lies in at least
//! one and at most 13 of the discs, and every configuration point is a
//! member of some cell.

mod common;

use common::scattered_points;
use currents::verify::{COVER_RADIUS, COVER_SPACING};
use currents::{build_covering, PointConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn sampled_overlap_counts_stay_in_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let pts = scattered_points(&mut rng, 12, 2.0, 0.05);
    let config = PointConfig::new(pts.clone()).unwrap();
    let covering = build_covering(&config);

    for _ in 0..10_000 {
        // Sample near a configuration point, where the cell list is complete.
        let anchor = pts[rng.gen_range(0..pts.len())];
        let x = anchor.x + rng.gen_range(-0.3..0.3);
        let y = anchor.y + rng.gen_range(-0.3..0.3);
        let hits = covering
            .cells
            .iter()
            .filter(|c| c.center.dist(currents::Point2::new(x, y)) < COVER_RADIUS)
            .count();
        assert!(
            (1..=covering.overlap).contains(&hits),
            "point ({x}, {y}) lies in {hits} discs"
        );
    }

    // The full-plane cover has disc radius twice the grid spacing, so every
    // point of the configuration lands in some cell.
    assert!(COVER_RADIUS == 2.0 * COVER_SPACING);
    for (idx, _) in pts.iter().enumerate() {
        assert!(
            covering.cells.iter().any(|c| c.members.contains(&idx)),
            "configuration point {idx} belongs to no cell"
        );
    }
}
