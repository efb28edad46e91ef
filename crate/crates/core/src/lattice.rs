use rand::Rng;

use crate::plane::Point2;

/// Triangular lattice spacing giving `density` points per unit area:
/// each point owns a cell of area `sqrt(3)/2 * a^2`.
pub fn hex_spacing(density: f64) -> f64 {
    (2.0 / (3.0f64.sqrt() * density)).sqrt()
}

pub fn square_spacing(density: f64) -> f64 {
    (1.0 / density).sqrt()
}

/// Triangular lattice points within the closed disc of the given radius.
pub fn hex_disc(spacing: f64, radius: f64) -> Vec<Point2> {
    let b1 = Point2::new(spacing, 0.0);
    let b2 = Point2::new(0.5 * spacing, 0.5 * 3.0f64.sqrt() * spacing);
    let range = (radius / spacing * 2.0).ceil() as i64 + 2;
    let mut out = Vec::new();
    for i in -range..=range {
        for j in -range..=range {
            let p = b1 * i as f64 + b2 * j as f64;
            if p.norm() <= radius {
                out.push(p);
            }
        }
    }
    sort_points(&mut out);
    out
}

/// The hexagon of `shells` full rings around the origin: 3k(k+1)+1 points.
pub fn hex_shells(spacing: f64, shells: u32) -> Vec<Point2> {
    let k = shells as i64;
    let b1 = Point2::new(spacing, 0.0);
    let b2 = Point2::new(0.5 * spacing, 0.5 * 3.0f64.sqrt() * spacing);
    let mut out = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            if (i + j).abs() <= k {
                out.push(b1 * i as f64 + b2 * j as f64);
            }
        }
    }
    sort_points(&mut out);
    out
}

pub fn square_disc(spacing: f64, radius: f64) -> Vec<Point2> {
    let range = (radius / spacing).ceil() as i64 + 1;
    let mut out = Vec::new();
    for i in -range..=range {
        for j in -range..=range {
            let p = Point2::new(i as f64 * spacing, j as f64 * spacing);
            if p.norm() <= radius {
                out.push(p);
            }
        }
    }
    sort_points(&mut out);
    out
}

/// Points `k * spacing` on the horizontal axis with `|x| <= half_len`.
pub fn line_segment(spacing: f64, half_len: f64) -> Vec<Point2> {
    let range = (half_len / spacing).floor() as i64;
    (-range..=range).map(|k| Point2::new(k as f64 * spacing, 0.0)).collect()
}

/// `n` uniform samples in the box `[lo, hi]`.
pub fn poisson_box(n: usize, lo: Point2, hi: Point2, rng: &mut impl Rng) -> Vec<Point2> {
    (0..n)
        .map(|_| {
            Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y))
        })
        .collect()
}

fn sort_points(points: &mut [Point2]) {
    points.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shell_counts_are_centered_hexagonal() {
        for k in 1..=7u32 {
            let n = hex_shells(1.0, k).len() as u32;
            assert_eq!(n, 3 * k * (k + 1) + 1);
        }
    }

    #[test]
    fn hex_spacing_matches_density() {
        let a = hex_spacing(1.0 / (2.0 * std::f64::consts::PI));
        let cell = 0.5 * 3.0f64.sqrt() * a * a;
        assert!((cell - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn nearest_neighbor_distances() {
        let hex = hex_shells(2.0, 3);
        let mut min = f64::INFINITY;
        for i in 0..hex.len() {
            for j in (i + 1)..hex.len() {
                min = min.min(hex[i].dist(hex[j]));
            }
        }
        assert!((min - 2.0).abs() < 1e-12);
    }

    #[test]
    fn line_counts() {
        assert_eq!(line_segment(0.5, 2.0).len(), 9);
    }
}
