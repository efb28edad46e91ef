use currents::{hex_disc, hex_spacing, renormalized_energy, square_disc, square_spacing, synthetic_current, BackgroundMeasure, Cutoff, EnergyOpts, Point2, PointConfig, RampShape, Region};
use std::time::Instant;

fn main() {
    let opts = EnergyOpts { quad_tol: 3e-4, richardson_tol: 3e-5, ..EnergyOpts::default() };
    let density = 1.0 / std::f64::consts::TAU;
    let a_hex = hex_spacing(density);
    let a_sq = square_spacing(density);
    for r in [6.0, 9.0, 12.0] {
        let region = Region::ball(Point2::ORIGIN, r).unwrap();
        let chi = Cutoff::with_ramp(region, RampShape::Linear, r).unwrap();
        // Cone mass over the disc: integral of (1 - |x|/R).
        let chi_mass = std::f64::consts::PI * r * r / 3.0;
        let mut results = Vec::new();
        for (pts, label) in [
            (hex_disc(a_hex, r + 2.0 * a_hex), "hex"),
            (square_disc(a_sq, r + 2.0 * a_sq), "sq"),
        ] {
            let t0 = Instant::now();
            let wsum: f64 = pts.iter().map(|p| chi.eval(*p)).sum();
            let imbalance = std::f64::consts::TAU * wsum - chi_mass;
            let config = PointConfig::new(pts).unwrap();
            let j = synthetic_current(&config, BackgroundMeasure::Lebesgue);
            let report = renormalized_energy(&j, &chi, &opts).unwrap();
            results.push((label, report.value / chi_mass, imbalance, report.extrapolation_delta, t0.elapsed().as_secs_f64()));
        }
        let (l0, e0, i0, d0, t0) = &results[0];
        let (l1, e1, i1, d1, t1) = &results[1];
        println!("R={r}: {l0} W/mass={e0:.6} imb={i0:+.3} d={d0:.0e} [{t0:.0}s] | {l1} W/mass={e1:.6} imb={i1:+.3} d={d1:.0e} [{t1:.0}s] hex<=sq: {}", e0 <= e1);
    }
}
