//! Nonlinear boundary-layer profiles.
//!
//! For a shift `alpha` the profile minimizes
//!
//! ```text
//! F[f] = ∫₀ᵀ w(t) { f'² + V(t) f² - (1/2b)(2f² - f⁴) } dt,
//! w(t) = 1 - εk t,   V(t) = (t + α - εk t²/2)² / w(t)²,
//! ```
//!
//! which reduces to the half-plane functional for `εk = 0`. The Euler-Lagrange
//! equation `-(w f')' + w (V - 1/b + f²/b) f = 0` is brought to Liouville
//! normal form with `g = √w f`, giving `g'' = q(t, g)` with a Robin condition
//! `g'(0) = -(εk/2) g(0)`. That form is discretized by the Numerov scheme and
//! a fourth-order one-sided closure at `t = 0`, so computed energies and
//! integral identities converge at fourth order. The far end carries a
//! Dirichlet condition.
//!
//! The outer minimization over `alpha` is a golden-section search on the
//! energy followed by a root solve of the optimality integral
//! `∫ (t + α - εk t²/2) f² / w dt = 0`.

use crate::error::{Error, Result};
use crate::grid::{differentiate4, HalfLineGrid};
use crate::numerics::{bracketed_root, golden_section, Tridiagonal};
use crate::spectral::{lowest_mode, THETA0_REFERENCE};

/// Truncation used for the curvature-free problem.
pub const HALF_PLANE_T: f64 = 20.0;
pub const DEFAULT_CELLS: usize = 4000;
pub const DEFAULT_C0: f64 = 6.0;

/// Max-norm tolerance on the discrete Euler-Lagrange residual.
pub const EL_TOL: f64 = 1e-10;
const MAX_NEWTON: usize = 100;
const DAMPING_FLOOR: f64 = 1.0 / (1u32 << 20) as f64;
const ZERO_LEVEL: f64 = 1.0 - 1e-12;
/// Relative size of the optimality integral at which the outer root solve stops.
const OPTIMALITY_RTOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub b: f64,
    /// Zero for the half-plane problem.
    pub eps: f64,
    /// Signed boundary curvature; `k < 0` models the exterior of a disc.
    pub k: f64,
    pub c0: f64,
    /// Allows `b` outside `(1, 1/Θ0)`.
    pub regime_override: bool,
}

impl ModelParams {
    pub fn half_plane(b: f64) -> Self {
        Self {
            b,
            eps: 0.0,
            k: 0.0,
            c0: f64::INFINITY,
            regime_override: false,
        }
    }

    pub fn curved(b: f64, eps: f64, k: f64, c0: f64) -> Self {
        Self {
            b,
            eps,
            k,
            c0,
            regime_override: false,
        }
    }

    pub fn with_regime_override(mut self) -> Self {
        self.regime_override = true;
        self
    }

    /// Applied field `b/ε²` (infinite for the half-plane problem).
    pub fn hex(&self) -> f64 {
        self.b / (self.eps * self.eps)
    }

    pub fn eps_k(&self) -> f64 {
        self.eps * self.k
    }

    pub fn is_curved(&self) -> bool {
        self.eps > 0.0
    }

    /// Truncation length `c0 |log ε|` of the curved problem.
    pub fn truncation(&self) -> f64 {
        self.c0 * self.eps.ln().abs()
    }

    /// Grid on `[0, c0 |log ε|]` with spacing close to `h`.
    pub fn curved_grid(&self, h: f64) -> Result<HalfLineGrid> {
        self.validate()?;
        HalfLineGrid::with_spacing(self.truncation(), h)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "b must be positive, got {}",
                self.b
            )));
        }
        if !self.regime_override && !(self.b > 1.0 && self.b * THETA0_REFERENCE < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "b = {} outside the surface regime (1, {:.6})",
                self.b,
                1.0 / THETA0_REFERENCE
            )));
        }
        if self.eps != 0.0 {
            if !(self.eps.is_finite() && self.eps > 0.0 && self.eps < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "eps must lie in (0, 1), got {}",
                    self.eps
                )));
            }
            if !(self.c0.is_finite() && self.c0 > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "c0 must be positive, got {}",
                    self.c0
                )));
            }
            if !self.k.is_finite() {
                return Err(Error::InvalidParameter("curvature must be finite".into()));
            }
        } else if self.k != 0.0 {
            return Err(Error::InvalidParameter("curvature requires eps > 0".into()));
        }
        Ok(())
    }
}

/// Minimizing pair of the half-plane functional.
#[derive(Debug, Clone)]
pub struct HalfPlaneSolution {
    pub b: f64,
    pub alpha0: f64,
    pub f0: Vec<f64>,
    pub e0: f64,
    /// Max-norm Euler-Lagrange residual of the returned profile.
    pub residual_norm: f64,
    /// `∫ (t + α0) f0²`.
    pub optimality_residual: f64,
    pub grid: HalfLineGrid,
}

impl HalfPlaneSolution {
    pub fn is_zero(&self) -> bool {
        self.f0.iter().all(|v| *v == 0.0)
    }
}

/// Minimizing pair of the curvature-weighted functional.
#[derive(Debug, Clone)]
pub struct CurvedSolution {
    pub params: ModelParams,
    pub alpha_k: f64,
    pub f_k: Vec<f64>,
    pub e_star: f64,
    pub residual_norm: f64,
    pub optimality_residual: f64,
    pub grid: HalfLineGrid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// `∫ w f'²`
    pub kinetic: f64,
    /// `∫ w V f²`
    pub potential: f64,
    /// `-(1/2b) ∫ w (2f² - f⁴)`
    pub nonlinear: f64,
    pub total: f64,
}

/// Discretized problem at fixed shift.
struct Problem {
    grid: HalfLineGrid,
    b: f64,
    alpha: f64,
    ek: f64,
    weight: Vec<f64>,
    pot: Vec<f64>,
    pot_eff: Vec<f64>,
}

impl Problem {
    fn new(alpha: f64, params: &ModelParams, grid: &HalfLineGrid) -> Result<Self> {
        let ek = params.eps_k();
        let weight = grid.sample(|t| 1.0 - ek * t);
        let wmin = weight.iter().copied().fold(f64::INFINITY, f64::min);
        if !(wmin > 0.0) {
            return Err(Error::WeightNonPositive(wmin));
        }
        let pot: Vec<f64> = (0..grid.len())
            .map(|i| {
                let t = grid.node(i);
                (t + alpha - 0.5 * ek * t * t).powi(2) / weight[i].powi(2)
            })
            .collect();
        let pot_eff = pot
            .iter()
            .zip(&weight)
            .map(|(v, w)| v - ek * ek / (4.0 * w * w))
            .collect();
        Ok(Self {
            grid: *grid,
            b: params.b,
            alpha,
            ek,
            weight,
            pot,
            pot_eff,
        })
    }

    fn q(&self, i: usize, g: f64) -> f64 {
        (self.pot_eff[i] - 1.0 / self.b) * g + g * g * g / (self.b * self.weight[i])
    }

    fn dq(&self, i: usize, g: f64) -> f64 {
        self.pot_eff[i] - 1.0 / self.b + 3.0 * g * g / (self.b * self.weight[i])
    }

    /// Numerov residual scaled by `1/h²`, so that it approximates `-g'' + q`.
    fn residual(&self, g: &[f64]) -> Vec<f64> {
        let n = self.grid.n_cells();
        let h = self.grid.h();
        let h2 = h * h;
        let q: Vec<f64> = g.iter().enumerate().map(|(i, v)| self.q(i, *v)).collect();
        let mut r = vec![0.0; n + 1];
        r[0] = -(g[1] - g[0] + h * 0.5 * self.ek * g[0]) / h2 + (7.0 / 24.0) * q[0] + 0.25 * q[1]
            - q[2] / 24.0;
        for i in 1..n {
            r[i] = -(g[i + 1] - 2.0 * g[i] + g[i - 1]) / h2
                + (q[i + 1] + 10.0 * q[i] + q[i - 1]) / 12.0;
        }
        r[n] = g[n];
        r
    }

    fn jacobian(&self, g: &[f64]) -> Tridiagonal {
        let n = self.grid.n_cells();
        let h = self.grid.h();
        let inv_h2 = 1.0 / (h * h);
        let dq: Vec<f64> = g.iter().enumerate().map(|(i, v)| self.dq(i, *v)).collect();
        let mut m = Tridiagonal::zeros(n + 1);
        m.diag[0] = (1.0 - h * 0.5 * self.ek) * inv_h2 + (7.0 / 24.0) * dq[0];
        m.upper[0] = -inv_h2 + 0.25 * dq[1];
        m.corner = -dq[2] / 24.0;
        for i in 1..n {
            m.lower[i - 1] = -inv_h2 + dq[i - 1] / 12.0;
            m.diag[i] = 2.0 * inv_h2 + 10.0 * dq[i] / 12.0;
            m.upper[i] = -inv_h2 + dq[i + 1] / 12.0;
        }
        m.diag[n] = 1.0;
        m
    }

    fn to_f(&self, g: &[f64]) -> Vec<f64> {
        g.iter()
            .zip(&self.weight)
            .map(|(v, w)| v / w.sqrt())
            .collect()
    }

    fn breakdown(&self, f: &[f64]) -> EnergyBreakdown {
        let df = differentiate4(f, self.grid.h());
        let b = self.b;
        let mut kin = vec![0.0; f.len()];
        let mut pot = vec![0.0; f.len()];
        let mut nl = vec![0.0; f.len()];
        for i in 0..f.len() {
            let w = self.weight[i];
            let f2 = f[i] * f[i];
            kin[i] = w * df[i] * df[i];
            pot[i] = w * self.pot[i] * f2;
            nl[i] = -w * (2.0 * f2 - f2 * f2) / (2.0 * b);
        }
        let kinetic = self.grid.integrate_unchecked(&kin);
        let potential = self.grid.integrate_unchecked(&pot);
        let nonlinear = self.grid.integrate_unchecked(&nl);
        EnergyBreakdown {
            kinetic,
            potential,
            nonlinear,
            total: kinetic + potential + nonlinear,
        }
    }

    fn energy_of_g(&self, g: &[f64]) -> f64 {
        self.breakdown(&self.to_f(g)).total
    }

    /// `∫ (t + α - εk t²/2) f² / w`, half the derivative of the energy in α.
    fn optimality_integral(&self, f: &[f64]) -> f64 {
        let ek = self.ek;
        let y: Vec<f64> = (0..f.len())
            .map(|i| {
                let t = self.grid.node(i);
                (t + self.alpha - 0.5 * ek * t * t) / self.weight[i] * f[i] * f[i]
            })
            .collect();
        self.grid.integrate_unchecked(&y)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Converged profile at a fixed shift.
#[derive(Debug, Clone)]
struct Profile {
    alpha: f64,
    f: Vec<f64>,
    energy: f64,
    residual_norm: f64,
    optimality: f64,
}

impl Profile {
    fn is_zero(&self) -> bool {
        self.f.iter().all(|v| *v == 0.0)
    }
}

fn newton(problem: &Problem, mut g: Vec<f64>) -> Result<(Vec<f64>, f64)> {
    let n = problem.grid.n_cells();
    g[n] = 0.0;
    let mut energy = problem.energy_of_g(&g);
    for _ in 0..MAX_NEWTON {
        let r = problem.residual(&g);
        let rn = max_abs(&r);
        if rn <= EL_TOL {
            return Ok(polish(problem, g, rn));
        }
        let dx = problem.jacobian(&g).solve(&r)?;
        let mut step = 1.0;
        loop {
            let trial: Vec<f64> = g.iter().zip(&dx).map(|(a, d)| a - step * d).collect();
            let e_trial = problem.energy_of_g(&trial);
            if e_trial.is_finite() && e_trial <= energy + 1e-14 + 1e-12 * energy.abs() {
                g = trial;
                energy = e_trial;
                break;
            }
            step *= 0.5;
            if step < DAMPING_FLOOR {
                return Err(Error::NewtonDivergence(format!(
                    "damping floor reached at alpha = {}, residual {rn:e}",
                    problem.alpha
                )));
            }
        }
    }
    let rn = max_abs(&problem.residual(&g));
    if rn <= EL_TOL {
        Ok((g, rn))
    } else {
        Err(Error::NewtonDivergence(format!(
            "no convergence in {MAX_NEWTON} iterations (residual {rn:e})"
        )))
    }
}

/// Extra undamped Newton steps past the tolerance, kept while the residual
/// drops, so that the iteration error sits well below discretization error.
fn polish(problem: &Problem, mut g: Vec<f64>, mut rn: f64) -> (Vec<f64>, f64) {
    for _ in 0..3 {
        let Ok(dx) = problem.jacobian(&g).solve(&problem.residual(&g)) else {
            break;
        };
        let trial: Vec<f64> = g.iter().zip(&dx).map(|(a, d)| a - d).collect();
        let rt = max_abs(&problem.residual(&trial));
        if !(rt < 0.5 * rn) {
            break;
        }
        g = trial;
        rn = rt;
    }
    (g, rn)
}

fn solve_profile(
    alpha: f64,
    params: &ModelParams,
    grid: &HalfLineGrid,
    warm: Option<&[f64]>,
) -> Result<Profile> {
    let problem = Problem::new(alpha, params, grid)?;
    let zero = |problem: &Problem| Profile {
        alpha,
        f: vec![0.0; grid.len()],
        energy: 0.0,
        residual_norm: 0.0,
        optimality: problem.optimality_integral(&vec![0.0; grid.len()]),
    };

    // linear level of the flat-boundary operator decides whether a nontrivial
    // minimizer exists and seeds the Newton iteration
    let lin_grid = if grid.t_max() >= 4.0 * (1.0 + alpha.abs()) {
        *grid
    } else {
        HalfLineGrid::with_spacing(4.0 * (1.0 + alpha.abs()), grid.h())?
    };
    let mode = lowest_mode(alpha, &lin_grid)?;
    if params.b * mode.mu >= ZERO_LEVEL {
        return Ok(zero(&problem));
    }

    let init: Vec<f64> = match warm {
        Some(f) if f.len() == grid.len() && f.iter().any(|v| *v > 0.0) => f
            .iter()
            .zip(&problem.weight)
            .map(|(v, w)| v * w.sqrt())
            .collect(),
        _ => {
            let u4: Vec<f64> = mode.u.iter().map(|u| u.powi(4)).collect();
            let amp = ((1.0 - params.b * mode.mu).max(0.0) / lin_grid.integrate(&u4)?).sqrt();
            (0..grid.len())
                .map(|i| {
                    let t = grid.node(i);
                    let u = if t <= lin_grid.t_max() {
                        mode.u[((t / lin_grid.h()).round() as usize).min(lin_grid.n_cells())]
                    } else {
                        0.0
                    };
                    (amp * u).min(0.999)
                })
                .collect()
        }
    };
    let (g, residual_norm) = newton(&problem, init)?;
    let f = problem.to_f(&g);
    if max_abs(&f) < 1e-12 {
        return Ok(zero(&problem));
    }
    let energy = problem.breakdown(&f).total;
    let optimality = problem.optimality_integral(&f);
    Ok(Profile {
        alpha,
        f,
        energy,
        residual_norm,
        optimality,
    })
}

/// Nonnegative solution of the Euler-Lagrange equation at a fixed shift.
/// Returns the zero profile when the linear level satisfies `b μ(α) ≥ 1`.
pub fn solve_f_given_alpha(
    alpha: f64,
    params: &ModelParams,
    grid: &HalfLineGrid,
) -> Result<Vec<f64>> {
    params.validate()?;
    Ok(solve_profile(alpha, params, grid, None)?.f)
}

/// Term-by-term value of the functional for a profile `f` at shift `alpha`.
pub fn energy_breakdown(
    f: &[f64],
    alpha: f64,
    params: &ModelParams,
    grid: &HalfLineGrid,
) -> Result<EnergyBreakdown> {
    if f.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: f.len(),
        });
    }
    if let Some(i) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(Problem::new(alpha, params, grid)?.breakdown(f))
}

/// Joint minimization over `(f, alpha)`.
fn optimize_alpha(
    params: &ModelParams,
    grid: &HalfLineGrid,
    warm: Option<(f64, &[f64])>,
) -> Result<Profile> {
    let mut last: Option<Profile> = None;
    let eval = |alpha: f64, last: &mut Option<Profile>| -> Result<Profile> {
        let seed = last.as_ref().filter(|p| !p.is_zero()).map(|p| p.f.clone());
        let p = solve_profile(alpha, params, grid, seed.as_deref())
            .or_else(|_| solve_profile(alpha, params, grid, None))?;
        *last = Some(p.clone());
        Ok(p)
    };

    let alpha_start = match warm {
        Some((a, f)) => {
            last = Some(Profile {
                alpha: a,
                f: f.to_vec(),
                energy: 0.0,
                residual_norm: 0.0,
                optimality: 0.0,
            });
            a
        }
        None => {
            let lo = -THETA0_REFERENCE.sqrt() - 0.5;
            let (a, e) = golden_section(|a| Ok(eval(a, &mut last)?.energy), lo, 0.0, 1e-3)?;
            if e >= 0.0 {
                // no nontrivial minimizer anywhere on the bracket
                let a = -THETA0_REFERENCE.sqrt();
                return solve_profile(a, params, grid, None);
            }
            a
        }
    };

    // bracket a sign change of the optimality integral
    let mut delta = 2e-3;
    let (lo, hi) = loop {
        let plo = eval(alpha_start - delta, &mut last)?;
        let phi = eval(alpha_start + delta, &mut last)?;
        if !plo.is_zero() && !phi.is_zero() && plo.optimality < 0.0 && phi.optimality > 0.0 {
            break (alpha_start - delta, alpha_start + delta);
        }
        delta *= 2.0;
        if delta > 0.5 {
            return Err(Error::NoRoot {
                lo: alpha_start - delta / 2.0,
                hi: alpha_start + delta / 2.0,
            });
        }
    };
    let mut best: Option<Profile> = None;
    let scale = std::cell::Cell::new(1.0);
    bracketed_root(
        |a| {
            let p = eval(a, &mut last)?;
            let v = p.optimality;
            let f2: Vec<f64> = p.f.iter().map(|x| x * x).collect();
            scale.set(grid.integrate_unchecked(&f2));
            best = Some(p);
            Ok(v)
        },
        lo,
        hi,
        |_, v| v.abs() <= OPTIMALITY_RTOL * scale.get(),
    )?;
    let best = best.expect("root search evaluates at least once");
    Ok(best)
}

/// Minimizes the half-plane functional jointly over the profile and the shift.
pub fn optimize_alpha_halfplane(b: f64, grid: &HalfLineGrid) -> Result<HalfPlaneSolution> {
    optimize_alpha_halfplane_with(&ModelParams::half_plane(b), grid, None)
}

/// As [`optimize_alpha_halfplane`], optionally warm-started from a nearby
/// solution (continuation in `b`).
pub fn optimize_alpha_halfplane_with(
    params: &ModelParams,
    grid: &HalfLineGrid,
    warm: Option<&HalfPlaneSolution>,
) -> Result<HalfPlaneSolution> {
    if params.is_curved() {
        return Err(Error::InvalidParameter(
            "half-plane solve takes eps = 0, k = 0".into(),
        ));
    }
    params.validate()?;
    let warm = warm
        .filter(|w| !w.is_zero() && w.grid == *grid)
        .map(|w| (w.alpha0, w.f0.as_slice()));
    let p = optimize_alpha(params, grid, warm)?;
    Ok(HalfPlaneSolution {
        b: params.b,
        alpha0: p.alpha,
        f0: p.f,
        e0: p.energy,
        residual_norm: p.residual_norm,
        optimality_residual: p.optimality,
        grid: *grid,
    })
}

/// Minimizes the curvature-weighted functional on `[0, c0 |log ε|]`.
pub fn solve_curved(params: &ModelParams, grid: &HalfLineGrid) -> Result<CurvedSolution> {
    params.validate()?;
    if !params.is_curved() {
        return Err(Error::InvalidParameter("curved solve needs eps > 0".into()));
    }
    let t = params.truncation();
    if (grid.t_max() - t).abs() > grid.h() {
        return Err(Error::InvalidParameter(format!(
            "grid length {} does not match c0 |log eps| = {t}",
            grid.t_max()
        )));
    }
    let wmin = 1.0 - params.eps_k() * grid.t_max();
    if !(wmin > 0.0) {
        return Err(Error::WeightNonPositive(wmin));
    }
    let p = optimize_alpha(params, grid, None)?;
    Ok(CurvedSolution {
        params: *params,
        alpha_k: p.alpha,
        f_k: p.f,
        e_star: p.energy,
        residual_norm: p.residual_norm,
        optimality_residual: p.optimality,
        grid: *grid,
    })
}

/// Default half-plane grid: `T = 20`, 4000 cells.
pub fn default_grid() -> HalfLineGrid {
    HalfLineGrid::new(HALF_PLANE_T, DEFAULT_CELLS).expect("default grid is valid")
}
