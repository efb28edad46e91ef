use currents::config::PointConfig;
use currents::lattice::{hex_shells, hex_spacing};
use currents::plane::Point2;
use currents::region::Region;
use currents::{check_theorem_main, BackgroundMeasure, Cutoff, VerifyOpts};
use std::time::Instant;

fn main() {
    let a = hex_spacing(1.0 / std::f64::consts::TAU);
    for k in [3u32, 4] {
        let config = PointConfig::new(hex_shells(a, k)).unwrap();
        let radius = (2.0 * config.len() as f64).sqrt();
        let region = Region::ball(Point2::ORIGIN, radius).unwrap();
        let chi = Cutoff::standard(region.clone()).unwrap();
        let t0 = Instant::now();
        let mut opts = VerifyOpts::default();
        let n = config.len() as f64;
        opts.quad_tol = 1e-5 * n;
        opts.energy.quad_tol = 1e-4 * n;
        opts.energy.richardson_tol = 1e-4;
        let report =
            check_theorem_main(&config, BackgroundMeasure::Lebesgue, &chi, &opts).unwrap();
        let dt = t0.elapsed();
        println!(
            "k={k} n={} W={:.4} lhs={:.4} implied={:.3} weak2/n={:.2} n'={} ({:.2?})",
            config.len(),
            report.energy,
            report.local_energy,
            report.main.implied_constant,
            report.comparison_weak_sq / config.len() as f64,
            report.n_prime,
            dt
        );
    }
}
