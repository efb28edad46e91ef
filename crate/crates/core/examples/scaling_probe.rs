use currents::verify::scaling_study;

fn main() {
    for (divisor, shells) in [(16.0, vec![1u32, 2, 3, 4]), (64.0, vec![1, 2, 3, 4, 5, 6, 7])] {
        let t0 = std::time::Instant::now();
        let r = scaling_study(&shells, 1.5, divisor).unwrap();
        println!("divisor {divisor}, {:?}", t0.elapsed());
        for e in &r.entries {
            println!(
                "  k={} n={} n'={} lp={:.6} weak={:.6}",
                e.shells, e.n, e.n_prime, e.weighted_lp, e.weighted_weak
            );
        }
        println!("  slope {:.4} target {:.4}", r.slope, r.slope_target);
    }
}
