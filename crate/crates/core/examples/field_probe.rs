use currents::config::PointConfig;
use currents::field::synthetic_current;
use currents::lattice::{hex_shells, hex_spacing};
use currents::lorentz::SampledField;
use currents::plane::Point2;
use currents::region::Region;
use currents::{BackgroundMeasure, Cutoff};

fn main() {
    let a = hex_spacing(1.0 / std::f64::consts::TAU);
    let h = a / 64.0;
    for k in [1u32, 3, 7] {
        let radius = 3f64.sqrt() / 2.0 * k as f64 * a - 0.2;
        let region = Region::ball(Point2::ORIGIN, radius).unwrap();
        let chi = Cutoff::standard(region.clone()).unwrap();
        let pts = hex_shells(a, k);
        let config = PointConfig::new(pts.clone()).unwrap();
        let j = synthetic_current(&config, BackgroundMeasure::Lebesgue);
        let s = SampledField::sample_weighted(&j, |x| chi.eval(x).sqrt(), &region, h).unwrap();
        // bin cells by distance to nearest config point, in units of a
        let bins = [0.1, 0.25, 0.5, f64::INFINITY];
        let mut sums = [0.0f64; 4];
        let mut maxv = [0.0f64; 4];
        for (c, v) in s.centers.iter().zip(&s.values) {
            let d = pts.iter().map(|p| p.dist(*c)).fold(f64::INFINITY, f64::min) / a;
            let b = bins.iter().position(|&t| d < t).unwrap();
            sums[b] += h * h * v.powf(1.5);
            if *v > maxv[b] { maxv[b] = *v; }
        }
        let total: f64 = sums.iter().sum();
        println!("k={k} n={} total={:.2} per-n={:.3}", config.len(), total, total / config.len() as f64);
        for (i, t) in bins.iter().enumerate() {
            println!("   d<{:>4}a  sum={:>9.2}  share={:.3}  max|f|={:.2}", t, sums[i], sums[i] / total, maxv[i]);
        }
    }
}
