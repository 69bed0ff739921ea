//! Lowest Neumann eigenpair of the shifted harmonic oscillator
//! `-d²/dt² + (t + alpha)²` on the half-line, and its minimum over `alpha`
//! (the de Gennes constant `Θ0`).
//!
//! The operator is discretized by the standard three-point stencil with a
//! ghost-node reflection at `t = 0` and a Dirichlet cutoff at `t = T`. The
//! resulting matrix is symmetrized by a diagonal similarity and its lowest
//! eigenpair found by inverse iteration. Eigenvalues are Richardson
//! extrapolated from the grid and its refinement, which removes the `h²`
//! term of the error expansion.

use crate::error::{Error, Result};
use crate::grid::HalfLineGrid;
use crate::numerics::{bracketed_root, golden_section, Tridiagonal};

/// `Θ0` from an independent shooting computation; used to decide whether a
/// field strength `b` lies inside the surface-superconductivity window.
pub const THETA0_REFERENCE: f64 = 0.590_106_124_95;

/// Bracket searched for the optimal shift.
pub const ALPHA_BRACKET: (f64, f64) = (-1.2, -0.3);

const MAX_INVERSE_ITERATIONS: usize = 500;
const EIGEN_RTOL: f64 = 1e-12;
const TRUNCATION_TOL: f64 = 1e-8;

/// Normalized lowest mode at a given shift.
#[derive(Debug, Clone)]
pub struct LinearMode {
    pub alpha: f64,
    pub mu: f64,
    /// `dμ/dα` from the Feynman-Hellmann formula, extrapolated like `mu`.
    pub dmu_dalpha: f64,
    /// L²-normalized, `u[0] > 0`.
    pub u: Vec<f64>,
    pub grid: HalfLineGrid,
    pub neumann_residual: f64,
}

#[derive(Debug, Clone)]
pub struct Theta0Result {
    pub theta0: f64,
    pub alpha_opt: f64,
    pub mode: LinearMode,
    pub u0_at_0: f64,
    /// `∫ u0⁴`.
    pub u0_l4_pow4: f64,
}

struct RawMode {
    mu: f64,
    dmu: f64,
    u: Vec<f64>,
}

/// Inverse iteration on the symmetrized matrix for one grid.
fn raw_lowest_mode(alpha: f64, grid: &HalfLineGrid) -> Result<RawMode> {
    let n = grid.n_cells(); // unknowns at nodes 0..n-1, u_n = 0
    let h = grid.h();
    let inv_h2 = 1.0 / (h * h);
    let pot: Vec<f64> = (0..n).map(|i| (grid.node(i) + alpha).powi(2)).collect();

    let mut m = Tridiagonal::zeros(n);
    for i in 0..n {
        m.diag[i] = 2.0 * inv_h2 + pot[i];
    }
    for i in 0..n - 1 {
        m.lower[i] = -inv_h2;
        m.upper[i] = -inv_h2;
    }
    m.lower[0] = -std::f64::consts::SQRT_2 * inv_h2;
    m.upper[0] = m.lower[0];

    // symmetric variable v = S u with S = diag(1/√2, 1, 1, ...)
    let to_u = |v: &[f64]| -> Vec<f64> {
        let mut u = v.to_vec();
        u[0] *= std::f64::consts::SQRT_2;
        u.push(0.0);
        u
    };
    let rayleigh = |u: &[f64]| -> (f64, f64) {
        let mut grad = 0.0;
        for i in 0..n {
            grad += (u[i + 1] - u[i]).powi(2);
        }
        let (mut num, mut den, mut dnum) = (grad * inv_h2, 0.0, 0.0);
        for i in 0..n {
            let w = if i == 0 { 0.5 } else { 1.0 };
            num += w * pot[i] * u[i] * u[i];
            den += w * u[i] * u[i];
            dnum += w * 2.0 * (grid.node(i) + alpha) * u[i] * u[i];
        }
        (num / den, dnum / den)
    };

    let mut v: Vec<f64> = (0..n)
        .map(|i| (-(grid.node(i) + alpha).powi(2) / 2.0).exp())
        .collect();
    normalize_max(&mut v);
    let mut mu_prev = f64::INFINITY;
    for _ in 0..MAX_INVERSE_ITERATIONS {
        let mut next = m.solve(&v).map_err(|_| Error::NonConvergence(0))?;
        normalize_max(&mut next);
        let change = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        let u = to_u(&v);
        let (mu, dmu) = rayleigh(&u);
        if (mu - mu_prev).abs() <= EIGEN_RTOL * mu.abs() && change <= 1e-11 {
            return Ok(RawMode { mu, dmu, u });
        }
        mu_prev = mu;
    }
    Err(Error::NonConvergence(MAX_INVERSE_ITERATIONS))
}

fn normalize_max(v: &mut [f64]) {
    let (imax, _) =
        v.iter().enumerate().fold(
            (0, 0.0),
            |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc },
        );
    let s = v[imax];
    v.iter_mut().for_each(|x| *x /= s);
}

/// Lowest eigenpair of `-d²/dt² + (t + alpha)²` with `u'(0) = 0`, `u(T) = 0`.
pub fn lowest_mode(alpha: f64, grid: &HalfLineGrid) -> Result<LinearMode> {
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "shift must be finite, got {alpha}"
        )));
    }
    if grid.t_max() < 4.0 * (1.0 + alpha.abs()) {
        return Err(Error::InvalidParameter(format!(
            "truncation T = {} too short for alpha = {alpha}",
            grid.t_max()
        )));
    }
    let coarse = raw_lowest_mode(alpha, grid)?;
    let fine = raw_lowest_mode(alpha, &grid.refined())?;
    let mu = (4.0 * fine.mu - coarse.mu) / 3.0;
    let dmu_dalpha = (4.0 * fine.dmu - coarse.dmu) / 3.0;

    let mut u: Vec<f64> = fine.u.iter().step_by(2).copied().collect();
    let sq: Vec<f64> = u.iter().map(|x| x * x).collect();
    let norm = grid.integrate(&sq)?.sqrt();
    let sign = if u[0] < 0.0 { -1.0 } else { 1.0 };
    u.iter_mut().for_each(|x| *x *= sign / norm);

    let tail = u[grid.n_cells() - 1].abs();
    if tail > TRUNCATION_TOL {
        return Err(Error::TruncationTooShort(tail));
    }
    let neumann_residual = grid.differentiate_fourth_order(&u)?[0].abs();
    Ok(LinearMode {
        alpha,
        mu,
        dmu_dalpha,
        u,
        grid: *grid,
        neumann_residual,
    })
}

/// Minimizes `alpha ↦ μ(alpha)` over [`ALPHA_BRACKET`].
///
/// Golden-section search narrows the bracket to width `tol`; the minimizer is
/// then polished as the root of the Feynman-Hellmann derivative `dμ/dα`,
/// which is exact for the discrete eigenproblem.
pub fn compute_theta0(grid: &HalfLineGrid, tol: f64) -> Result<Theta0Result> {
    if !(tol >= 1e-10) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be >= 1e-10, got {tol}"
        )));
    }
    let (lo, hi) = ALPHA_BRACKET;
    let mu_lo = lowest_mode(lo, grid)?.mu;
    let mu_hi = lowest_mode(hi, grid)?.mu;
    let (alpha_g, mu_g) = golden_section(|a| Ok(lowest_mode(a, grid)?.mu), lo, hi, tol)?;
    if mu_g >= mu_lo.min(mu_hi) || alpha_g - lo <= 2.0 * tol || hi - alpha_g <= 2.0 * tol {
        return Err(Error::BracketFailure(format!(
            "mu is not unimodal on [{lo}, {hi}] at this grid (minimum found at {alpha_g})"
        )));
    }

    let delta = (100.0 * tol).max(1e-5);
    let polished = bracketed_root(
        |a| Ok(lowest_mode(a, grid)?.dmu_dalpha),
        alpha_g - delta,
        alpha_g + delta,
        |_, d| d.abs() <= 1e-13,
    );
    let alpha_opt = match polished {
        Ok(a) => a,
        Err(Error::NoRoot { .. }) => alpha_g,
        Err(e) => return Err(e),
    };
    let mode = lowest_mode(alpha_opt, grid)?;
    let theta0 = mode.mu;
    if !(0.0 < theta0 && theta0 < 1.0) {
        return Err(Error::ConsistencyViolation(format!(
            "theta0 = {theta0} outside (0, 1)"
        )));
    }
    if (alpha_opt + theta0.sqrt()).abs() > 10.0 * tol {
        return Err(Error::ConsistencyViolation(format!(
            "|alpha_opt + sqrt(theta0)| = {:e} exceeds {:e}",
            (alpha_opt + theta0.sqrt()).abs(),
            10.0 * tol
        )));
    }
    let u4: Vec<f64> = mode.u.iter().map(|x| x.powi(4)).collect();
    let u0_l4_pow4 = grid.integrate(&u4)?;
    Ok(Theta0Result {
        theta0,
        alpha_opt,
        u0_at_0: mode.u[0],
        u0_l4_pow4,
        mode,
    })
}

/// Default grid for the linear problem: `T = 20`, 4000 cells.
pub fn default_grid() -> HalfLineGrid {
    HalfLineGrid::new(20.0, 4000).expect("default grid is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unshifted_oscillator_has_unit_eigenvalue() {
        let g = default_grid();
        let m = lowest_mode(0.0, &g).unwrap();
        assert!((m.mu - 1.0).abs() < 1e-6, "mu = {}", m.mu);
        let c = std::f64::consts::PI.powf(-0.25) * 2f64.sqrt();
        let dev =
            m.u.iter()
                .enumerate()
                .map(|(i, u)| (u - c * (-g.node(i).powi(2) / 2.0).exp()).abs())
                .fold(0.0, f64::max);
        assert!(dev < 1e-5, "dev = {dev}");
        assert!(m.neumann_residual < 1e-6);
    }

    #[test]
    fn mode_is_normalized_and_positive_at_origin() {
        let g = default_grid();
        let m = lowest_mode(-0.5, &g).unwrap();
        let sq: Vec<f64> = m.u.iter().map(|x| x * x).collect();
        assert!((g.integrate(&sq).unwrap() - 1.0).abs() < 1e-10);
        assert!(m.u[0] > 0.0);
        assert!(m.mu > 0.0);
    }

    #[test]
    fn negative_shift_lowers_the_eigenvalue() {
        // trial function e^{-(t+α)²/2}: any value below μ(0) = 1 certifies
        let g = default_grid();
        let alpha = -0.7;
        let trial = g.sample(|t| (-(t + alpha).powi(2) / 2.0).exp());
        let dtrial = g.sample(|t| -(t + alpha) * (-(t + alpha).powi(2) / 2.0).exp());
        let num: Vec<f64> = (0..g.len())
            .map(|i| dtrial[i].powi(2) + (g.node(i) + alpha).powi(2) * trial[i].powi(2))
            .collect();
        let den: Vec<f64> = trial.iter().map(|x| x * x).collect();
        let bound = g.integrate(&num).unwrap() / g.integrate(&den).unwrap();
        assert!(bound < 1.0);
        let m = lowest_mode(alpha, &g).unwrap();
        assert!(m.mu <= bound + 1e-12);
        assert!(m.mu < 1.0);
    }

    #[test]
    fn rejects_short_truncation() {
        let g = HalfLineGrid::new(5.0, 1000).unwrap();
        assert!(matches!(
            lowest_mode(-0.5, &g),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            lowest_mode(f64::NAN, &g),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn theta0_properties() {
        let g = default_grid();
        let r = compute_theta0(&g, 1e-7).unwrap();
        assert!(r.theta0 > 0.5 && r.theta0 < 0.7);
        assert!((r.alpha_opt + r.theta0.sqrt()).abs() < 1e-6);
        assert!((r.theta0 - THETA0_REFERENCE).abs() < 1e-7);
        for d in [-0.05, 0.05] {
            assert!(r.theta0 <= lowest_mode(r.alpha_opt + d, &g).unwrap().mu);
        }
        // first-order optimality in alpha
        let m: Vec<f64> = r
            .mode
            .u
            .iter()
            .enumerate()
            .map(|(i, u)| (g.node(i) + r.alpha_opt) * u * u)
            .collect();
        assert!(g.integrate(&m).unwrap().abs() < 1e-6);
    }

    #[test]
    fn theta0_rejects_tiny_tolerance() {
        assert!(matches!(
            compute_theta0(&default_grid(), 1e-12),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn coarse_grid_fails_the_bracket() {
        // T = 4.4 is too short for the left end of the bracket
        let g = HalfLineGrid::new(4.4, 400).unwrap();
        assert!(compute_theta0(&g, 1e-6).is_err());
    }
}
