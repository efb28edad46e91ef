#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use currents::{Ball, Point2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One ball of the naive stepping simulation, carrying its seed set.
struct SteppedBall {
    center: Point2,
    radius: f64,
    seeds: Vec<usize>,
}

pub struct OracleRun {
    /// One entry per ball-count decrement, at the total radius where the
    /// count dropped. Sorted ascending.
    pub drop_times: Vec<f64>,
    /// Seed classes of the final collection, members and classes sorted.
    pub partition: Vec<Vec<usize>>,
    pub final_total: f64,
}

/// Reference simulation for the growth process: scale every radius by the
/// fixed factor 1 + step, then replace any overlapping pair by the ball of
/// summed radius containing both. No event solving, so it is an independent
/// check of the exact algorithm, accurate to one step in time.
pub fn stepping_oracle(initial: &[Ball], target: f64, step: f64) -> OracleRun {
    let mut balls: Vec<SteppedBall> = initial
        .iter()
        .enumerate()
        .map(|(i, b)| SteppedBall {
            center: b.center,
            radius: b.radius,
            seeds: vec![i],
        })
        .collect();
    let mut total: f64 = balls.iter().map(|b| b.radius).sum();
    let mut drop_times = Vec::new();
    while total < target {
        let factor = (1.0 + step).min(target / total);
        for b in &mut balls {
            b.radius *= factor;
        }
        total *= factor;
        merge_pass(&mut balls, total, &mut drop_times);
    }
    let mut partition: Vec<Vec<usize>> = balls
        .iter()
        .map(|b| {
            let mut seeds = b.seeds.clone();
            seeds.sort_unstable();
            seeds
        })
        .collect();
    partition.sort();
    OracleRun {
        drop_times,
        partition,
        final_total: total,
    }
}

fn merge_pass(balls: &mut Vec<SteppedBall>, total: f64, drop_times: &mut Vec<f64>) {
    loop {
        let mut hit = None;
        'scan: for i in 0..balls.len() {
            for j in (i + 1)..balls.len() {
                let d = balls[i].center.dist(balls[j].center);
                if d <= balls[i].radius + balls[j].radius {
                    hit = Some((i, j, d));
                    break 'scan;
                }
            }
        }
        let Some((i, j, _)) = hit else { return };
        let (r, s) = (balls[i].radius, balls[j].radius);
        // Radius-weighted center: the summed ball contains both parents and
        // pairwise merging in any order agrees on the cluster result.
        let center = (balls[i].center * r + balls[j].center * s) * (1.0 / (r + s));
        let mut seeds = std::mem::take(&mut balls[i].seeds);
        seeds.extend_from_slice(&balls[j].seeds);
        balls[j] = SteppedBall {
            center,
            radius: r + s,
            seeds,
        };
        balls.swap_remove(i);
        drop_times.push(total);
    }
}

/// Uniform points in the centered square of the given half-width, resampled
/// until pairwise distances reach min_sep.
pub fn scattered_points(
    rng: &mut ChaCha8Rng,
    n: usize,
    half_width: f64,
    min_sep: f64,
) -> Vec<Point2> {
    let mut pts: Vec<Point2> = Vec::with_capacity(n);
    while pts.len() < n {
        let c = Point2::new(
            rng.gen_range(-half_width..half_width),
            rng.gen_range(-half_width..half_width),
        );
        if pts.iter().all(|p| p.dist(c) >= min_sep) {
            pts.push(c);
        }
    }
    pts
}

fn baseline_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/baselines")
        .join(format!("{name}.json"))
}

/// Compares labeled values against the frozen baseline file, or rewrites it
/// when CURRENTS_WRITE_BASELINES is set. Locks fitted constants so silent
/// drift fails the suite.
pub fn check_baseline(name: &str, pairs: &[(String, f64)], rel_tol: f64) {
    let path = baseline_path(name);
    if std::env::var("CURRENTS_WRITE_BASELINES").is_ok() {
        let mut text = String::from("{\n");
        for (i, (label, value)) in pairs.iter().enumerate() {
            let comma = if i + 1 == pairs.len() { "" } else { "," };
            text.push_str(&format!("  \"{label}\": {value}{comma}\n"));
        }
        text.push_str("}\n");
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, text).unwrap();
        return;
    }
    let text = fs::read_to_string(&path).unwrap_or_else(|_| {
        panic!(
            "missing baseline {name}; run once with CURRENTS_WRITE_BASELINES=1 to freeze it"
        )
    });
    let frozen: std::collections::BTreeMap<String, f64> =
        serde_json::from_str(&text).expect("baseline file is valid json");
    assert_eq!(
        frozen.len(),
        pairs.len(),
        "baseline {name} has a different entry count; refreeze deliberately"
    );
    for (label, value) in pairs {
        let Some(expected) = frozen.get(label) else {
            panic!("baseline {name} is missing {label}; refreeze deliberately");
        };
        let scale = 1.0 + expected.abs();
        assert!(
            (value - expected).abs() <= rel_tol * scale,
            "{name}/{label} drifted: frozen {expected}, got {value}"
        );
    }
}
