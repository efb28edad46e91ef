//! Growth process against the naive stepping simulation: same merge
//! partition, same merge times to within the stepping resolution, exact
//! radius conservation along the way.

mod common;

use common::{scattered_points, stepping_oracle};
use currents::{grow, initial_collection, PointConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const STEP: f64 = 1e-5;
const TIME_TOL: f64 = 1e-3;

#[test]
fn thousand_random_configs_match_the_stepping_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for case in 0..1000 {
        let n = rng.gen_range(2..=20);
        let pts = scattered_points(&mut rng, n, 5.0, 0.05);
        let config = PointConfig::new(pts).unwrap();
        let eta = 0.5 * config.separation();
        let initial = initial_collection(&config, eta).unwrap();
        let start_total = eta * n as f64;
        let target = 2.5 * start_total;

        let trace = grow(&initial, target).unwrap();
        trace.validate().unwrap();
        for event in &trace.events {
            let sum: f64 = event.balls.iter().map(|tb| tb.ball.radius).sum();
            assert!(
                (sum - event.time).abs() <= 1e-12 * event.time,
                "case {case}: radius sum {sum} drifted from time {}",
                event.time
            );
        }

        let oracle = stepping_oracle(&initial, target, STEP);
        assert_eq!(
            trace.final_partition(),
            oracle.partition,
            "case {case}: merge partitions disagree"
        );

        let mut drops: Vec<f64> = Vec::new();
        for event in &trace.events {
            for merge in &event.merges {
                for _ in 1..merge.parents.len() {
                    drops.push(event.time);
                }
            }
        }
        drops.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            drops.len(),
            oracle.drop_times.len(),
            "case {case}: different merge counts"
        );
        for (ours, theirs) in drops.iter().zip(&oracle.drop_times) {
            assert!(
                (ours - theirs).abs() <= TIME_TOL,
                "case {case}: merge at {ours} vs oracle {theirs}"
            );
        }
    }
    assert!(
        started.elapsed().as_secs() < 60,
        "oracle comparison exceeded its time budget"
    );
}
