//! Boundary coefficients `C1(b) = -2b E0` and `C2(b) = 2b E_corr`, with
//! sweeps in `b`, the sign scan of `C2`, the near-critical scaling checks and
//! the small-`ε` expansion of the curved energy.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::HalfLineGrid;
use crate::identities::correction_closed;
use crate::profile1d::{
    optimize_alpha_halfplane_with, solve_curved, HalfPlaneSolution, ModelParams,
};
use crate::spectral::{Theta0Result, THETA0_REFERENCE};

/// Rows with `1 - bΘ0` below this are flagged and not trusted.
pub const NEAR_CRITICAL_GAP: f64 = 1e-3;
/// Relative agreement required between `-2b E0` and `∫ f0⁴`.
pub const C1_CONSISTENCY: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientRow {
    pub b: f64,
    pub alpha0: f64,
    pub e0: f64,
    pub f0_sq_at_0: f64,
    pub e_corr: f64,
    pub c1: f64,
    pub c2: f64,
    /// `∫ f0⁴`, the second evaluation of `C1`.
    pub c1_quadrature: f64,
    pub converged: bool,
    pub near_critical: bool,
}

impl CoefficientRow {
    pub fn from_solution(sol: &HalfPlaneSolution) -> Result<Self> {
        let b = sol.b;
        let corr = correction_closed(sol)?;
        let f4: Vec<f64> = sol.f0.iter().map(|v| v.powi(4)).collect();
        let c1 = -2.0 * b * sol.e0;
        let c1_quadrature = sol.grid.integrate(&f4)?;
        let near_critical = 1.0 - b * THETA0_REFERENCE < NEAR_CRITICAL_GAP;
        if !near_critical && (c1 - c1_quadrature).abs() > C1_CONSISTENCY * c1.abs() {
            return Err(Error::ConsistencyViolation(format!(
                "C1 = {c1:e} from the energy but {c1_quadrature:e} from the quartic integral at b = {b}"
            )));
        }
        Ok(Self {
            b,
            alpha0: sol.alpha0,
            e0: sol.e0,
            f0_sq_at_0: sol.f0[0] * sol.f0[0],
            e_corr: corr.via_boundary,
            c1,
            c2: 2.0 * b * corr.via_boundary,
            c1_quadrature,
            converged: true,
            near_critical,
        })
    }
}

pub fn coefficient_row(b: f64, grid: &HalfLineGrid) -> Result<CoefficientRow> {
    let sol = optimize_alpha_halfplane_with(&ModelParams::half_plane(b), grid, None)?;
    CoefficientRow::from_solution(&sol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepMode {
    /// Sequential in `b`, each solve warm-started from the previous one.
    #[default]
    Continuation,
    /// Independent cold solves in parallel, for auditing continuation.
    ColdParallel,
}

fn b_values(b_min: f64, b_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || !(b_min < b_max) {
        return Err(Error::InvalidRange(format!(
            "need b_min < b_max and steps >= 2, got ({b_min}, {b_max}, {steps})"
        )));
    }
    if !(b_min > 1.0 && b_max * THETA0_REFERENCE < 1.0) {
        return Err(Error::InvalidRange(format!(
            "[{b_min}, {b_max}] leaves the surface regime"
        )));
    }
    let m = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| ((m - i as f64) * b_min + i as f64 * b_max) / m)
        .collect())
}

pub fn sweep(
    b_min: f64,
    b_max: f64,
    steps: usize,
    grid: &HalfLineGrid,
) -> Result<Vec<CoefficientRow>> {
    sweep_with(b_min, b_max, steps, grid, SweepMode::Continuation)
}

pub fn sweep_with(
    b_min: f64,
    b_max: f64,
    steps: usize,
    grid: &HalfLineGrid,
    mode: SweepMode,
) -> Result<Vec<CoefficientRow>> {
    let bs = b_values(b_min, b_max, steps)?;
    match mode {
        SweepMode::Continuation => {
            let mut rows = Vec::with_capacity(bs.len());
            let mut prev: Option<HalfPlaneSolution> = None;
            for b in bs {
                let params = ModelParams::half_plane(b);
                let sol = match optimize_alpha_halfplane_with(&params, grid, prev.as_ref()) {
                    Ok(s) => s,
                    Err(_) if prev.is_some() => optimize_alpha_halfplane_with(&params, grid, None)?,
                    Err(e) => return Err(e),
                };
                rows.push(CoefficientRow::from_solution(&sol)?);
                prev = Some(sol);
            }
            Ok(rows)
        }
        SweepMode::ColdParallel => bs.par_iter().map(|b| coefficient_row(*b, grid)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignScan {
    /// Midpoint of the final bracket, when `C2` changes sign in the window.
    pub b0_estimate: Option<f64>,
    pub bracket: Option<(f64, f64)>,
    /// `(b, C2(b))` at the scan points.
    pub samples: Vec<(f64, f64)>,
}

/// Scans `C2` over the window at `scan_points` uniformly spaced values and
/// bisects the first sign change down to `resolution`.
pub fn sign_scan(
    window: (f64, f64),
    resolution: f64,
    scan_points: usize,
    grid: &HalfLineGrid,
) -> Result<SignScan> {
    let (lo, hi) = window;
    if !(resolution > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    let bs = b_values(lo, hi, scan_points.max(2))?;
    let samples: Vec<(f64, f64)> = bs
        .par_iter()
        .map(|b| coefficient_row(*b, grid).map(|r| (*b, r.c2)))
        .collect::<Result<_>>()?;
    let Some(w) = samples
        .windows(2)
        .find(|w| w[0].1.signum() != w[1].1.signum())
    else {
        return Ok(SignScan {
            b0_estimate: None,
            bracket: None,
            samples,
        });
    };
    let (mut a, mut fa) = w[0];
    let (mut b, _) = w[1];
    while b - a > resolution {
        let m = 0.5 * (a + b);
        let fm = coefficient_row(m, grid)?.c2;
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(SignScan {
        b0_estimate: Some(0.5 * (a + b)),
        bracket: Some((a, b)),
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRow {
    pub b: f64,
    /// `1 - bΘ0`
    pub gap: f64,
    /// `f0(0)² ‖u0‖₄⁴ / ((1 - bΘ0) u0(0)²)`
    pub rho1: f64,
    /// `∫ f0⁴ ‖u0‖₄⁴ / (1 - bΘ0)²`
    pub rho2: f64,
    /// `|α0 + √Θ0|`
    pub alpha_gap: f64,
}

/// Near-critical scaling ratios, which tend to 1 as `b ↑ 1/Θ0`.
pub fn limiting_check(
    b_list: &[f64],
    theta: &Theta0Result,
    grid: &HalfLineGrid,
) -> Result<Vec<LimitRow>> {
    for &b in b_list {
        let gap = 1.0 - b * theta.theta0;
        if !(gap > 1e-3 && gap < 0.1) {
            return Err(Error::InvalidParameter(format!(
                "1 - b*Theta0 = {gap} at b = {b} outside (1e-3, 0.1)"
            )));
        }
    }
    b_list
        .par_iter()
        .map(|&b| {
            let row = coefficient_row(b, grid)?;
            let gap = 1.0 - b * theta.theta0;
            Ok(LimitRow {
                b,
                gap,
                rho1: row.f0_sq_at_0 * theta.u0_l4_pow4 / (gap * theta.u0_at_0.powi(2)),
                rho2: row.c1_quadrature * theta.u0_l4_pow4 / (gap * gap),
                alpha_gap: (row.alpha0 + theta.theta0.sqrt()).abs(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationDiagnostics {
    pub b: f64,
    pub k: f64,
    pub eps_list: Vec<f64>,
    pub e_star: Vec<f64>,
    pub e0: f64,
    pub e_corr: f64,
    /// `|E⋆(ε) - (E0 - εk E_corr)|`
    pub deviations: Vec<f64>,
    /// Least-squares slope of `E⋆ - E0` in the model `s ε + c ε²`.
    pub slope: f64,
    /// Least-squares slope through the origin without the quadratic term.
    pub slope_linear: f64,
}

impl PerturbationDiagnostics {
    /// `-k E_corr`, the slope predicted by the expansion.
    pub fn predicted_slope(&self) -> f64 {
        -self.k * self.e_corr
    }
}

/// Solves the curved problem at each `ε` and compares with the first-order
/// expansion `E0 - εk E_corr`. Curved grids use the spacing of `grid`, which
/// also serves as the half-plane reference grid.
pub fn perturbation_check(
    b: f64,
    k: f64,
    eps_list: &[f64],
    c0: f64,
    grid: &HalfLineGrid,
) -> Result<PerturbationDiagnostics> {
    if eps_list.len() < 3 {
        return Err(Error::InvalidParameter(
            "eps_list needs at least 3 entries".into(),
        ));
    }
    if eps_list.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::InvalidParameter(
            "eps_list must be strictly decreasing".into(),
        ));
    }
    let params: Vec<ModelParams> = eps_list
        .iter()
        .map(|&eps| ModelParams::curved(b, eps, k, c0))
        .collect();
    for p in &params {
        p.validate()?;
        let w = 1.0 - p.eps_k() * p.truncation();
        if !(w > 0.0) {
            return Err(Error::WeightNonPositive(w));
        }
    }
    let half = optimize_alpha_halfplane_with(&ModelParams::half_plane(b), grid, None)?;
    let e_corr = correction_closed(&half)?.via_boundary;
    let e_star: Vec<f64> = params
        .par_iter()
        .map(|p| solve_curved(p, &p.curved_grid(grid.h())?).map(|s| s.e_star))
        .collect::<Result<_>>()?;
    let e0 = half.e0;
    let deviations = eps_list
        .iter()
        .zip(&e_star)
        .map(|(eps, e)| (e - (e0 - eps * k * e_corr)).abs())
        .collect();

    let y: Vec<f64> = e_star.iter().map(|e| e - e0).collect();
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in eps_list.iter().zip(&y) {
        s11 += x * x;
        s12 += x * x * x;
        s22 += x * x * x * x;
        r1 += x * y;
        r2 += x * x * y;
    }
    let slope = (r1 * s22 - r2 * s12) / (s11 * s22 - s12 * s12);
    let slope_linear = r1 / s11;
    Ok(PerturbationDiagnostics {
        b,
        k,
        eps_list: eps_list.to_vec(),
        e_star,
        e0,
        e_corr,
        deviations,
        slope,
        slope_linear,
    })
}
