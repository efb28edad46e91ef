use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::plane::Point2;

/// Neumaier compensated accumulator; safe for sums of mixed magnitude.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub mod gauss {
    use super::*;

    fn legendre_value_deriv(n: usize, x: f64) -> (f64, f64) {
        let mut p0 = 1.0;
        let mut p1 = x;
        for k in 2..=n {
            let k = k as f64;
            let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        let deriv = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        (p1, deriv)
    }

    fn compute(n: usize) -> Vec<(f64, f64)> {
        assert!(n >= 1);
        if n == 1 {
            return vec![(0.0, 2.0)];
        }
        let mut out = Vec::with_capacity(n);
        for i in 1..=n {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            for _ in 0..50 {
                let (p, dp) = legendre_value_deriv(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_value_deriv(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            out.push((x, w));
        }
        out.reverse();
        out
    }

    /// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
    pub fn legendre(n: usize) -> &'static [(f64, f64)] {
        static CACHE: OnceLock<Mutex<HashMap<usize, &'static [(f64, f64)]>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap();
        map.entry(n).or_insert_with(|| Box::leak(compute(n).into_boxed_slice()))
    }

    /// Fixed-order panel rule on [a, b].
    pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = KahanSum::default();
        for &(x, w) in legendre(n) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.value()
    }
}

/// A feature the quadtree must resolve: cells containing `at` are split until
/// their longest side is at most `scale`.
#[derive(Debug, Clone, Copy)]
pub struct Anchor {
    pub at: Point2,
    pub scale: f64,
}

#[derive(Debug, Clone)]
pub struct QuadOpts {
    /// Target absolute error for the whole integral.
    pub tol: f64,
    pub max_depth: u32,
    pub max_cells: usize,
    pub anchors: Vec<Anchor>,
    /// Initial panel boundaries, for integrands with known jump lines.
    pub split_x: Vec<f64>,
    pub split_y: Vec<f64>,
}

impl Default for QuadOpts {
    fn default() -> Self {
        QuadOpts {
            tol: 1e-8,
            max_depth: 24,
            max_cells: 4_000_000,
            anchors: Vec::new(),
            split_x: Vec::new(),
            split_y: Vec::new(),
        }
    }
}

impl QuadOpts {
    pub fn with_tol(tol: f64) -> Self {
        QuadOpts { tol, ..QuadOpts::default() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Sum of per-cell discrepancies between the fine and coarse rules.
    pub error: f64,
    pub cells: usize,
}

fn gl_product<F: Fn(Point2) -> f64>(f: &F, lo: Point2, hi: Point2, n: usize) -> f64 {
    let nodes = gauss::legendre(n);
    let cx = 0.5 * (lo.x + hi.x);
    let cy = 0.5 * (lo.y + hi.y);
    let hx = 0.5 * (hi.x - lo.x);
    let hy = 0.5 * (hi.y - lo.y);
    let mut acc = KahanSum::default();
    for &(xi, wi) in nodes {
        let x = cx + hx * xi;
        for &(yj, wj) in nodes {
            acc.add(wi * wj * f(Point2::new(x, yj * hy + cy)));
        }
    }
    acc.value() * hx * hy
}

fn initial_panels(lo: Point2, hi: Point2, opts: &QuadOpts) -> Vec<(Point2, Point2)> {
    let cuts = |a: f64, b: f64, lines: &[f64]| -> Vec<f64> {
        let mut v: Vec<f64> = lines.iter().copied().filter(|&c| a < c && c < b).collect();
        v.push(a);
        v.push(b);
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let xs = cuts(lo.x, hi.x, &opts.split_x);
    let ys = cuts(lo.y, hi.y, &opts.split_y);
    let mut panels = Vec::new();
    for wx in xs.windows(2) {
        for wy in ys.windows(2) {
            panels.push((Point2::new(wx[0], wy[0]), Point2::new(wx[1], wy[1])));
        }
    }
    panels
}

/// Adaptive quadtree integration of `f` over the axis-aligned rectangle
/// [lo, hi]. Each cell compares a 4x4 against a 2x2 Gauss rule and splits
/// until the discrepancy fits within the cell's share of the tolerance.
pub fn integrate_rect<F: Fn(Point2) -> f64>(
    f: F,
    lo: Point2,
    hi: Point2,
    opts: &QuadOpts,
) -> Result<QuadResult> {
    if !(lo.x < hi.x && lo.y < hi.y) {
        return Err(Error::quadrature("integration rectangle is degenerate"));
    }
    let total_area = (hi.x - lo.x) * (hi.y - lo.y);
    let mut stack: Vec<(Point2, Point2, u32)> =
        initial_panels(lo, hi, opts).into_iter().map(|(a, b)| (a, b, 0)).collect();
    let mut value = KahanSum::default();
    let mut error = KahanSum::default();
    let mut cells = 0usize;

    while let Some((clo, chi, depth)) = stack.pop() {
        cells += 1;
        if cells > opts.max_cells {
            return Err(Error::quadrature("quadrature cell budget exhausted"));
        }
        let side = (chi.x - clo.x).max(chi.y - clo.y);
        let can_split = depth < opts.max_depth;
        let forced = can_split
            && opts.anchors.iter().any(|a| {
                clo.x <= a.at.x && a.at.x <= chi.x && clo.y <= a.at.y && a.at.y <= chi.y && side > a.scale
            });
        if !forced {
            let fine = gl_product(&f, clo, chi, 4);
            let coarse = gl_product(&f, clo, chi, 2);
            let err = (fine - coarse).abs();
            let finite = fine.is_finite() && coarse.is_finite();
            let area = (chi.x - clo.x) * (chi.y - clo.y);
            let tol_cell = opts.tol * (area / total_area).max(1e-8);
            if finite && (err <= tol_cell || !can_split) {
                value.add(fine);
                error.add(err);
                continue;
            }
            if !finite && !can_split {
                return Err(Error::quadrature("integrand not finite at maximal refinement"));
            }
        }
        let mx = 0.5 * (clo.x + chi.x);
        let my = 0.5 * (clo.y + chi.y);
        stack.push((clo, Point2::new(mx, my), depth + 1));
        stack.push((Point2::new(mx, clo.y), Point2::new(chi.x, my), depth + 1));
        stack.push((Point2::new(clo.x, my), Point2::new(mx, chi.y), depth + 1));
        stack.push((Point2::new(mx, my), chi, depth + 1));
    }
    Ok(QuadResult { value: value.value(), error: error.value(), cells })
}

/// Same integral, with the initial panels taken from a tiles x tiles
/// partition of the rectangle and processed in parallel. Results do not
/// depend on the number of worker threads.
pub fn integrate_rect_tiled<F>(
    f: &F,
    lo: Point2,
    hi: Point2,
    opts: &QuadOpts,
    tiles: usize,
) -> Result<QuadResult>
where
    F: Fn(Point2) -> f64 + Sync,
{
    use rayon::prelude::*;

    if !(lo.x < hi.x && lo.y < hi.y) {
        return Err(Error::quadrature("integration rectangle is degenerate"));
    }
    let tiles = tiles.max(1);
    let frac = 1.0 / (tiles * tiles) as f64;
    let mut rects = Vec::with_capacity(tiles * tiles);
    for i in 0..tiles {
        for j in 0..tiles {
            let t0 = Point2::new(
                lo.x + (hi.x - lo.x) * i as f64 / tiles as f64,
                lo.y + (hi.y - lo.y) * j as f64 / tiles as f64,
            );
            let t1 = Point2::new(
                lo.x + (hi.x - lo.x) * (i + 1) as f64 / tiles as f64,
                lo.y + (hi.y - lo.y) * (j + 1) as f64 / tiles as f64,
            );
            rects.push((t0, t1));
        }
    }
    let parts: Vec<Result<QuadResult>> = rects
        .par_iter()
        .map(|&(t0, t1)| {
            let tile_opts = QuadOpts { tol: opts.tol * frac, ..opts.clone() };
            integrate_rect(f, t0, t1, &tile_opts)
        })
        .collect();
    let mut value = KahanSum::default();
    let mut error = KahanSum::default();
    let mut cells = 0usize;
    for part in parts {
        let part = part?;
        value.add(part.value);
        error.add(part.error);
        cells += part.cells;
    }
    Ok(QuadResult { value: value.value(), error: error.value(), cells })
}

/// Integral over the annulus r_lo <= |x - center| <= r_hi in plain polar
/// coordinates. Split lines and anchors in `opts` live in (r, theta).
pub fn integrate_polar<F: Fn(Point2) -> f64>(
    f: F,
    center: Point2,
    r_lo: f64,
    r_hi: f64,
    opts: &QuadOpts,
) -> Result<QuadResult> {
    if !(0.0 <= r_lo && r_lo < r_hi) {
        return Err(Error::quadrature("bad polar radii"));
    }
    let g = |p: Point2| {
        let (r, theta) = (p.x, p.y);
        f(Point2::new(center.x + r * theta.cos(), center.y + r * theta.sin())) * r
    };
    integrate_rect(g, Point2::new(r_lo, 0.0), Point2::new(r_hi, std::f64::consts::TAU), opts)
}

/// Integral over the annulus in log-polar coordinates u = ln r; the natural
/// chart when the integrand scales like an inverse square near the center.
/// Split lines and anchors in `opts` live in (u, theta).
pub fn integrate_log_polar<F: Fn(Point2) -> f64>(
    f: F,
    center: Point2,
    r_lo: f64,
    r_hi: f64,
    opts: &QuadOpts,
) -> Result<QuadResult> {
    if !(0.0 < r_lo && r_lo < r_hi) {
        return Err(Error::quadrature("log-polar radii must be positive"));
    }
    let g = |p: Point2| {
        let (u, theta) = (p.x, p.y);
        let r = u.exp();
        f(Point2::new(center.x + r * theta.cos(), center.y + r * theta.sin())) * r * r
    };
    integrate_rect(
        g,
        Point2::new(r_lo.ln(), 0.0),
        Point2::new(r_hi.ln(), std::f64::consts::TAU),
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_orders() {
        for n in [2, 4, 8, 16] {
            let nodes = gauss::legendre(n);
            assert_eq!(nodes.len(), n);
            let wsum: f64 = nodes.iter().map(|&(_, w)| w).sum();
            assert!((wsum - 2.0).abs() < 1e-13);
            // Degree 2n-1 polynomials are integrated exactly; check x^(2n-2).
            let p = 2 * n as i32 - 2;
            let exact = 2.0 / (p as f64 + 1.0);
            let got: f64 = nodes.iter().map(|&(x, w)| w * x.powi(p)).sum();
            assert!((got - exact).abs() < 1e-12, "order {n}");
        }
    }

    #[test]
    fn bilinear_over_unit_square() {
        let r = integrate_rect(
            |p| p.x * p.y,
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            &QuadOpts::default(),
        )
        .unwrap();
        assert!((r.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn split_line_handles_jump() {
        let mut opts = QuadOpts::with_tol(1e-10);
        opts.split_x = vec![0.37];
        let r = integrate_rect(
            |p| if p.x < 0.37 { 1.0 } else { 0.0 },
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            &opts,
        )
        .unwrap();
        assert!((r.value - 0.37).abs() < 1e-10);
        assert!(r.cells <= 8);
    }

    #[test]
    fn anchor_resolves_narrow_spike() {
        let p0 = Point2::new(0.3, 0.7);
        let s = 1e-2;
        let f = move |p: Point2| (-p.dist2(p0) / (s * s)).exp();
        let exact = PI * s * s;

        let mut opts = QuadOpts::with_tol(1e-9);
        opts.anchors = vec![Anchor { at: p0, scale: s }];
        let r = integrate_rect(f, Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), &opts).unwrap();
        assert!((r.value - exact).abs() < 1e-7 * exact.max(1.0));
        assert!((r.value - exact).abs() / exact < 1e-4);
    }

    #[test]
    fn polar_disc_area() {
        let r = integrate_polar(
            |_| 1.0,
            Point2::new(3.0, -1.0),
            0.0,
            2.0,
            &QuadOpts::with_tol(1e-10),
        )
        .unwrap();
        assert!((r.value - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn log_polar_inverse_square() {
        let c = Point2::new(0.5, 0.5);
        let r = integrate_log_polar(
            move |p| 1.0 / p.dist2(c),
            c,
            0.5,
            2.0,
            &QuadOpts::with_tol(1e-10),
        )
        .unwrap();
        assert!((r.value - std::f64::consts::TAU * f64::ln(4.0)).abs() < 1e-9);
    }

    #[test]
    fn degenerate_rect_rejected() {
        assert!(integrate_rect(|_| 1.0, Point2::new(0.0, 0.0), Point2::new(0.0, 1.0), &QuadOpts::default()).is_err());
    }

    #[test]
    fn kahan_recovers_small_terms() {
        let mut acc = KahanSum::default();
        acc.add(1.0);
        for _ in 0..10_000 {
            acc.add(1e-18);
        }
        assert!((acc.value() - (1.0 + 1e-14)).abs() < 1e-16);
    }
}
