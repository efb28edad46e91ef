use rayon::prelude::*;
use serde::Serialize;

use crate::cutoff::Cutoff;
use crate::error::{Error, Result};
use crate::field::AnalyticField;
use crate::plane::Point2;
use crate::quad::{integrate_log_polar, integrate_rect_tiled, Anchor, KahanSum, QuadOpts};

/// Quintic bump: 1 inside half the radius, 0 outside, C2 across both seams.
pub(crate) fn bump(d: f64, radius: f64) -> f64 {
    let half = 0.5 * radius;
    if d <= half {
        1.0
    } else if d >= radius {
        0.0
    } else {
        let u = (d - half) / half;
        1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LevelEstimate {
    /// Excision radius for this level.
    pub eta: f64,
    /// Truncated energy at that radius, log term included.
    pub estimate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    /// Extrapolated renormalized energy.
    pub value: f64,
    /// Largest excision radius of the ladder (0 when the field has no
    /// singularities).
    pub eta0: f64,
    pub levels: Vec<LevelEstimate>,
    /// Difference between the last two extrapolants.
    pub extrapolation_delta: f64,
    /// Quadrature tolerance the estimates were computed at.
    pub quad_tol: f64,
    /// Total quadrature cells spent.
    pub cells: usize,
}

#[derive(Debug, Clone)]
pub struct EnergyOpts {
    /// Stop when successive extrapolants agree to this tolerance.
    pub richardson_tol: f64,
    pub quad_tol: f64,
    pub max_levels: usize,
    pub tiles: usize,
}

impl Default for EnergyOpts {
    fn default() -> Self {
        EnergyOpts { richardson_tol: 1e-6, quad_tol: 1e-8, max_levels: 12, tiles: 8 }
    }
}

struct Pole {
    at: Point2,
    /// Net squared kernel weight, the coefficient of 1/d^2 in |field|^2.
    weight_sq: f64,
    /// Radius of the bump disc carved out of the outer integral.
    bump_radius: f64,
    /// Cutoff value at the pole, weighting the log counterterm.
    chi: f64,
}

fn collect_poles(field: &AnalyticField, cutoff: &Cutoff) -> Vec<Pole> {
    let centers = field.singular_centers();
    centers
        .iter()
        .map(|&(at, k)| {
            let nearest = centers
                .iter()
                .filter(|&&(q, _)| q != at)
                .map(|&(q, _)| at.dist(q))
                .fold(f64::INFINITY, f64::min);
            let bump_radius = (0.35 * nearest).min(0.5);
            Pole { at, weight_sq: k * k, chi: cutoff.eval(at), bump_radius }
        })
        .collect()
}

/// Integral of cutoff * |field|^2 over the support with the bump discs
/// removed.
fn outer_integral(
    field: &AnalyticField,
    cutoff: &Cutoff,
    poles: &[Pole],
    opts: &EnergyOpts,
) -> Result<(f64, usize)> {
    let (lo, hi) = cutoff.support().bbox();
    let mut quad = QuadOpts::with_tol(opts.quad_tol);
    quad.anchors = poles
        .iter()
        .map(|p| Anchor { at: p.at, scale: 0.5 * p.bump_radius })
        .collect();
    if field.terms.iter().any(|(c, t)| *c != 0.0 && matches!(t, crate::field::Term::LineBackground))
    {
        quad.split_y.push(0.0);
    }
    let integrand = |x: Point2| {
        let mut hole = 0.0;
        for p in poles {
            hole += bump(x.dist(p.at), p.bump_radius);
        }
        let w = (1.0 - hole).max(0.0);
        if w == 0.0 {
            return 0.0;
        }
        let chi = cutoff.eval(x);
        if chi == 0.0 {
            return 0.0;
        }
        match field.eval_squared(x) {
            Ok(v) => w * chi * v,
            Err(_) => f64::INFINITY,
        }
    };
    let r = integrate_rect_tiled(&integrand, lo, hi, &quad, opts.tiles)?;
    Ok((r.value, r.cells))
}

/// Integral of cutoff * |field|^2 * bump over one radial shell around a
/// pole, in log-polar coordinates.
fn shell_integral(
    field: &AnalyticField,
    cutoff: &Cutoff,
    pole: &Pole,
    r_lo: f64,
    r_hi: f64,
    tol: f64,
) -> Result<(f64, usize)> {
    let integrand = |x: Point2| {
        let chi = cutoff.eval(x);
        if chi == 0.0 {
            return 0.0;
        }
        match field.eval_squared(x) {
            Ok(v) => chi * v * bump(x.dist(pole.at), pole.bump_radius),
            Err(_) => f64::INFINITY,
        }
    };
    let r = integrate_log_polar(integrand, pole.at, r_lo, r_hi, &QuadOpts::with_tol(tol))?;
    Ok((r.value, r.cells))
}

/// Renormalized energy of the field against the cutoff: the limit of
/// (1/2) * integral of cutoff * |field|^2 outside radius-eta discs around
/// the singularities, plus pi * log(eta) * sum of cutoff weights, as eta
/// shrinks. Estimated over the ladder eta_k = eta0 * 2^-k by Richardson
/// extrapolation through second order.
pub fn renormalized_energy(
    field: &AnalyticField,
    cutoff: &Cutoff,
    opts: &EnergyOpts,
) -> Result<EnergyReport> {
    let poles = collect_poles(field, cutoff);
    let (outer, outer_cells) = outer_integral(field, cutoff, &poles, opts)?;
    let mut cells = outer_cells;

    if poles.is_empty() {
        let value = 0.5 * outer;
        return Ok(EnergyReport {
            value,
            eta0: 0.0,
            levels: vec![LevelEstimate { eta: 0.0, estimate: value }],
            extrapolation_delta: 0.0,
            quad_tol: opts.quad_tol,
            cells,
        });
    }

    let eta0 = 0.5 * poles.iter().map(|p| p.bump_radius).fold(f64::INFINITY, f64::min);
    let shell_tol = opts.quad_tol / (poles.len() * (opts.max_levels + 2)) as f64;

    // Head pieces cover [eta0, bump radius] once; ladder shells halve from
    // eta0 downward and are suffix-summed into the level estimates.
    let heads: Vec<Result<(f64, usize)>> = poles
        .par_iter()
        .map(|p| shell_integral(field, cutoff, p, eta0, p.bump_radius, shell_tol))
        .collect();
    let mut head_sum = KahanSum::default();
    for h in heads {
        let (v, c) = h?;
        head_sum.add(v);
        cells += c;
    }

    let log_weight: f64 = poles.iter().map(|p| p.weight_sq * p.chi).sum();
    let mut interior = KahanSum::default();
    let mut levels: Vec<LevelEstimate> = Vec::new();
    let mut extrapolants: Vec<f64> = Vec::new();

    let level_estimate = |interior: f64, eta: f64| {
        0.5 * (outer + head_sum.value() + interior) + std::f64::consts::PI * eta.ln() * log_weight
    };

    for k in 0..=opts.max_levels {
        let eta_k = eta0 * 0.5f64.powi(k as i32);
        levels.push(LevelEstimate { eta: eta_k, estimate: level_estimate(interior.value(), eta_k) });

        // Second-order extrapolant from the last three levels.
        if levels.len() >= 3 {
            let m = levels.len();
            let i0 = levels[m - 3].estimate;
            let i1 = levels[m - 2].estimate;
            let i2 = levels[m - 1].estimate;
            let t1a = 2.0 * i1 - i0;
            let t1b = 2.0 * i2 - i1;
            extrapolants.push((4.0 * t1b - t1a) / 3.0);
        }
        if extrapolants.len() >= 2 {
            let m = extrapolants.len();
            let delta = (extrapolants[m - 1] - extrapolants[m - 2]).abs();
            if delta <= opts.richardson_tol * (1.0 + extrapolants[m - 1].abs()) {
                return Ok(EnergyReport {
                    value: extrapolants[m - 1],
                    eta0,
                    levels,
                    extrapolation_delta: delta,
                    quad_tol: opts.quad_tol,
                    cells,
                });
            }
        }

        if k < opts.max_levels {
            let next = eta_k * 0.5;
            let shells: Vec<Result<(f64, usize)>> = poles
                .par_iter()
                .map(|p| shell_integral(field, cutoff, p, next, eta_k, shell_tol))
                .collect();
            for s in shells {
                let (v, c) = s?;
                interior.add(v);
                cells += c;
            }
        }
    }
    Err(Error::quadrature(format!(
        "energy extrapolation did not settle within {} levels (last delta {:.3e})",
        opts.max_levels,
        extrapolants
            .windows(2)
            .last()
            .map(|w| (w[1] - w[0]).abs())
            .unwrap_or(f64::NAN)
    )))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensityPoint {
    pub r: f64,
    pub energy: f64,
    /// Energy divided by the disc area pi r^2.
    pub per_area: f64,
    pub extrapolation_delta: f64,
}

/// Renormalized energy per unit window area over growing discs B(0, R).
/// `configs` supplies the points for each R and `window` the cutoff over
/// B(0, R).
pub fn energy_density<F, W>(
    configs: F,
    background: crate::background::BackgroundMeasure,
    r_values: &[f64],
    window: W,
    opts: &EnergyOpts,
) -> Result<Vec<DensityPoint>>
where
    F: Fn(f64) -> Result<crate::config::PointConfig>,
    W: Fn(f64) -> Result<Cutoff>,
{
    let mut out = Vec::with_capacity(r_values.len());
    for &r in r_values {
        let config = configs(r)?;
        let chi = window(r)?;
        let j = crate::field::synthetic_current(&config, background);
        let report = renormalized_energy(&j, &chi, opts)?;
        out.push(DensityPoint {
            r,
            energy: report.value,
            per_area: report.value / (std::f64::consts::PI * r * r),
            extrapolation_delta: report.extrapolation_delta,
        });
    }
    Ok(out)
}

/// Truncated energy at a single excision radius, without extrapolation.
pub fn truncated_energy(
    field: &AnalyticField,
    cutoff: &Cutoff,
    eta: f64,
    opts: &EnergyOpts,
) -> Result<f64> {
    let poles = collect_poles(field, cutoff);
    if let Some(bad) = poles.iter().find(|p| !(eta > 0.0 && eta <= p.bump_radius)) {
        return Err(Error::config(format!(
            "excision radius must lie in (0, {}]",
            bad.bump_radius
        )));
    }
    let (outer, _) = outer_integral(field, cutoff, &poles, opts)?;
    let mut total = KahanSum::default();
    total.add(outer);
    for p in &poles {
        let (v, _) = shell_integral(field, cutoff, p, eta, p.bump_radius, opts.quad_tol / 4.0)?;
        total.add(v);
    }
    let log_weight: f64 = poles.iter().map(|p| p.weight_sq * p.chi).sum();
    Ok(0.5 * total.value() + std::f64::consts::PI * eta.ln() * log_weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::BackgroundMeasure;
    use crate::config::PointConfig;
    use crate::field::synthetic_current;
    use crate::region::Region;
    use std::f64::consts::PI;

    fn tent_cutoff() -> Cutoff {
        Cutoff::standard(Region::ball(Point2::ORIGIN, 2.0).unwrap()).unwrap()
    }

    #[test]
    fn single_vortex_tent_energy() {
        let config = PointConfig::new(vec![Point2::ORIGIN]).unwrap();
        let j = synthetic_current(&config, BackgroundMeasure::Zero);
        let report = renormalized_energy(&j, &tent_cutoff(), &EnergyOpts::default()).unwrap();
        let exact = PI * (2.0 * f64::ln(2.0) - 1.0);
        assert!(
            (report.value - exact).abs() < 1e-5,
            "energy {} vs {}",
            report.value,
            exact
        );
        assert!(report.extrapolation_delta < 1e-5);
    }

    #[test]
    fn truncated_energy_is_eta_independent_for_radial_cutoff() {
        // With the cutoff constant near the pole, the truncated energy
        // already equals the limit for every excision radius.
        let config = PointConfig::new(vec![Point2::ORIGIN]).unwrap();
        let j = synthetic_current(&config, BackgroundMeasure::Zero);
        let cutoff = tent_cutoff();
        let opts = EnergyOpts::default();
        let exact = PI * (2.0 * f64::ln(2.0) - 1.0);
        for eta in [0.175, 0.0875] {
            let v = truncated_energy(&j, &cutoff, eta, &opts).unwrap();
            assert!((v - exact).abs() < 1e-6, "eta {eta}: {v}");
        }
    }

    #[test]
    fn background_energy_without_poles() {
        let config = PointConfig::new(vec![Point2::ORIGIN]).unwrap();
        let mut j = synthetic_current(&config, BackgroundMeasure::Lebesgue);
        j.terms.retain(|(_, t)| !matches!(t, crate::field::Term::Vortex { .. }));
        let report = renormalized_energy(&j, &tent_cutoff(), &EnergyOpts::default()).unwrap();
        // (1/2) int chi |x|^2/4 with the tent profile min(2-r, 1).
        let exact = PI * (1.0 / 16.0 + 15.0 / 8.0 - 31.0 / 20.0);
        assert!((report.value - exact).abs() < 1e-6, "{} vs {}", report.value, exact);
        assert_eq!(report.levels.len(), 1);
    }

    #[test]
    fn energy_scales_with_cutoff_amplitude() {
        let config = PointConfig::new(vec![Point2::ORIGIN]).unwrap();
        let j = synthetic_current(&config, BackgroundMeasure::Zero);
        let base = renormalized_energy(&j, &tent_cutoff(), &EnergyOpts::default()).unwrap();
        let scaled_cutoff = tent_cutoff().scaled(2.0).unwrap();
        let scaled = renormalized_energy(&j, &scaled_cutoff, &EnergyOpts::default()).unwrap();
        assert!((scaled.value - 2.0 * base.value).abs() < 2e-5);
    }
}
