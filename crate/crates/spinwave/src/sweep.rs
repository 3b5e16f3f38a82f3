//! Time-grid evaluation of the entanglement criteria, empirical period
//! extraction, and refined minimum location.

use crate::bogoliubov::BogoliubovTransform;
use crate::criteria::{duan_v, mean_photon, vlf_correlations, vlf_gains, PhotonNumbers, VlfGains};
use crate::error::{Error, Result};
use crate::model::{oscillation_period, CouplingParams, ModeId};
use crate::moments::{evolve_moments, initial_moments, MomentTable, SpinConvention};
use rayon::prelude::*;

/// One bipartite grid point: Duan–Simon sum and photon numbers of the
/// two fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartitePoint {
    pub t: f64,
    pub v: f64,
    pub n1: PhotonNumbers,
    pub n2: PhotonNumbers,
}

/// One tripartite grid point: the three pairwise van Loock–Furusawa
/// combinations, the optimal gains, and the three field photon numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripartitePoint {
    pub t: f64,
    pub v12: f64,
    pub v13: f64,
    pub v23: f64,
    pub gains: VlfGains,
    pub n1: PhotonNumbers,
    pub n2: PhotonNumbers,
    pub n3: PhotonNumbers,
}

fn grid(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_max must be finite and > 0, got {t_max}"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "steps must be >= 2, got {steps}"
        )));
    }
    Ok((0..steps)
        .map(|i| t_max * i as f64 / (steps - 1) as f64)
        .collect())
}

fn bipartite_point(
    params: &CouplingParams,
    initial: &MomentTable,
    t: f64,
) -> Result<BipartitePoint> {
    let m = evolve_moments(&BogoliubovTransform::for_params(params, t), initial)?;
    Ok(BipartitePoint {
        t,
        v: duan_v(&m)?,
        n1: mean_photon(&m, ModeId::Field1)?,
        n2: mean_photon(&m, ModeId::Field2)?,
    })
}

fn tripartite_point(
    params: &CouplingParams,
    initial: &MomentTable,
    t: f64,
) -> Result<TripartitePoint> {
    let m = evolve_moments(&BogoliubovTransform::for_params(params, t), initial)?;
    let gains = vlf_gains(&m)?;
    let (v12, v13, v23) = vlf_correlations(&m, &gains)?;
    Ok(TripartitePoint {
        t,
        v12,
        v13,
        v23,
        gains,
        n1: mean_photon(&m, ModeId::Field1)?,
        n2: mean_photon(&m, ModeId::Field2)?,
        n3: mean_photon(&m, ModeId::Field3)?,
    })
}

/// Duan–Simon criterion and photon numbers on a uniform grid
/// `t_i = i * t_max / (steps - 1)`, evaluated in parallel.
pub fn bipartite_series(
    params: &CouplingParams,
    convention: SpinConvention,
    n_atoms: u64,
    t_max: f64,
    steps: usize,
) -> Result<Vec<BipartitePoint>> {
    if params.is_tripartite() {
        return Err(Error::BipartiteRequired);
    }
    let initial = initial_moments(convention, params.n_modes(), n_atoms)?;
    grid(t_max, steps)?
        .par_iter()
        .map(|&t| bipartite_point(params, &initial, t))
        .collect()
}

/// Van Loock–Furusawa combinations, gains, and photon numbers on a
/// uniform grid, evaluated in parallel.
pub fn tripartite_series(
    params: &CouplingParams,
    convention: SpinConvention,
    n_atoms: u64,
    t_max: f64,
    steps: usize,
) -> Result<Vec<TripartitePoint>> {
    if !params.is_tripartite() {
        return Err(Error::TripartiteRequired);
    }
    let initial = initial_moments(convention, params.n_modes(), n_atoms)?;
    grid(t_max, steps)?
        .par_iter()
        .map(|&t| tripartite_point(params, &initial, t))
        .collect()
}

/// Mean spacing of the refined minima of a sampled oscillatory signal.
///
/// Minima are located as the deepest point of each contiguous run below
/// `min + 0.25 * (max - min)` (one minimum per dip, so shallow ripples
/// riding on the main oscillation do not produce spurious detections),
/// then refined by parabolic interpolation through the three surrounding
/// samples. Returns `None` when fewer than two dips are found or the
/// signal has no usable contrast.
pub fn empirical_period(ts: &[f64], ys: &[f64]) -> Option<f64> {
    if ts.len() != ys.len() || ts.len() < 3 {
        return None;
    }
    let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) || hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return None;
    }
    let threshold = lo + 0.25 * (hi - lo);

    let mut minima = Vec::new();
    let mut run_best: Option<usize> = None;
    for i in 0..ys.len() {
        if ys[i] < threshold {
            run_best = Some(match run_best {
                Some(j) if ys[j] <= ys[i] => j,
                _ => i,
            });
        } else if let Some(j) = run_best.take() {
            minima.push(refine_parabolic(ts, ys, j));
        }
    }
    if let Some(j) = run_best {
        minima.push(refine_parabolic(ts, ys, j));
    }
    if minima.len() < 2 {
        return None;
    }
    Some((minima[minima.len() - 1] - minima[0]) / (minima.len() - 1) as f64)
}

/// Vertex abscissa of the parabola through the sample at `j` and its
/// neighbors; falls back to the sample position at the grid edges.
fn refine_parabolic(ts: &[f64], ys: &[f64], j: usize) -> f64 {
    if j == 0 || j + 1 >= ys.len() {
        return ts[j];
    }
    let (y0, y1, y2) = (ys[j - 1], ys[j], ys[j + 1]);
    let denom = y0 - 2.0 * y1 + y2;
    if denom.abs() < 1e-300 {
        return ts[j];
    }
    let shift = 0.5 * (y0 - y2) / denom;
    let h = 0.5 * (ts[j + 1] - ts[j - 1]);
    ts[j] + shift.clamp(-1.0, 1.0) * h
}

/// Golden-section minimization of a unimodal function on `[a, b]` to
/// abscissa tolerance `tol`; returns the minimizing point and value.
pub fn golden_min(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (a + b);
    let fm = f(xm);
    if f1 <= f2 && f1 <= fm {
        (x1, f1)
    } else if f2 <= fm {
        (x2, f2)
    } else {
        (xm, fm)
    }
}

/// Result of a minimum scan over a time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinScanSummary {
    /// Smallest criterion value found (after golden-section refinement).
    pub min_v: f64,
    /// Time of the refined minimum.
    pub argmin_t: f64,
    /// `argmin_t / (T_exact / 2)`, when the exact period exists.
    pub ratio_half_period: Option<f64>,
    /// Mean spacing of successive dips of the scanned series, if at
    /// least two dips fall inside the grid.
    pub empirical_period: Option<f64>,
}

fn scan_summary(
    params: &CouplingParams,
    ts: &[f64],
    vs: &[f64],
    refine: impl Fn(f64) -> f64,
) -> MinScanSummary {
    let (mut best, mut best_v) = (0usize, f64::INFINITY);
    for (i, &v) in vs.iter().enumerate() {
        if v < best_v {
            best = i;
            best_v = v;
        }
    }
    let a = ts[best.saturating_sub(1)];
    let b = ts[(best + 1).min(ts.len() - 1)];
    let (argmin_t, min_v) = if b > a {
        let tol = (b - a) * 1e-10 + 1e-300;
        golden_min(&refine, a, b, tol)
    } else {
        (ts[best], vs[best])
    };
    let (argmin_t, min_v) = if min_v <= best_v {
        (argmin_t, min_v)
    } else {
        (ts[best], best_v)
    };
    MinScanSummary {
        min_v,
        argmin_t,
        ratio_half_period: oscillation_period(params)
            .ok()
            .map(|p| argmin_t / (0.5 * p.exact)),
        empirical_period: empirical_period(ts, vs),
    }
}

/// Locate the minimum of the Duan–Simon sum over a grid, with
/// golden-section refinement between the neighbors of the best sample.
pub fn min_scan_bipartite(
    params: &CouplingParams,
    convention: SpinConvention,
    n_atoms: u64,
    t_max: f64,
    steps: usize,
) -> Result<MinScanSummary> {
    let series = bipartite_series(params, convention, n_atoms, t_max, steps)?;
    let ts: Vec<f64> = series.iter().map(|p| p.t).collect();
    let vs: Vec<f64> = series.iter().map(|p| p.v).collect();
    let initial = initial_moments(convention, params.n_modes(), n_atoms)?;
    Ok(scan_summary(params, &ts, &vs, |t| {
        bipartite_point(params, &initial, t)
            .map(|p| p.v)
            .unwrap_or(f64::INFINITY)
    }))
}

/// Locate the minimum of `max(V12, V13, V23)` over a grid, with
/// golden-section refinement between the neighbors of the best sample.
pub fn min_scan_tripartite(
    params: &CouplingParams,
    convention: SpinConvention,
    n_atoms: u64,
    t_max: f64,
    steps: usize,
) -> Result<MinScanSummary> {
    let series = tripartite_series(params, convention, n_atoms, t_max, steps)?;
    let ts: Vec<f64> = series.iter().map(|p| p.t).collect();
    let vs: Vec<f64> = series.iter().map(|p| p.v12.max(p.v13).max(p.v23)).collect();
    let initial = initial_moments(convention, params.n_modes(), n_atoms)?;
    Ok(scan_summary(params, &ts, &vs, |t| {
        tripartite_point(params, &initial, t)
            .map(|p| p.v12.max(p.v13).max(p.v23))
            .unwrap_or(f64::INFINITY)
    }))
}
