use currents::field::{AnalyticField, Term};
use currents::lorentz::SampledField;
use currents::plane::Point2;
use currents::region::Region;

fn main() {
    let h = 1.0 / 256.0;
    for (label, c) in [
        ("corner", Point2::new(0.0, 0.0)),
        ("center", Point2::new(0.5 / 256.0, 0.5 / 256.0)),
        ("generic", Point2::new(0.27 / 256.0, 0.63 / 256.0)),
    ] {
        let f = AnalyticField::from_terms(vec![(1.0, Term::Vortex { center: c })]);
        let region = Region::ball(c, 1.0).unwrap();
        let s = SampledField::sample_field(&f, &region, h).unwrap();
        let q = s.weak_l2_quasinorm();
        let n = s.weak_l2_norm();
        println!("{label}: cells={} quasi={:.4} norm={:.4} sqrt(pi)={:.4} 2sqrt(pi)={:.4}",
                 s.len(), q, n, std::f64::consts::PI.sqrt(), 2.0 * std::f64::consts::PI.sqrt());
    }
}
