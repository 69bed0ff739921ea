//! Small dense-free linear solvers and scalar searches shared by the solvers.

use crate::error::{Error, Result};

/// Tridiagonal system stored by diagonals, with an optional extra entry at
/// position (0, 2) produced by the fourth-order boundary closure.
#[derive(Debug, Clone)]
pub(crate) struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub corner: f64,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n - 1],
            diag: vec![0.0; n],
            upper: vec![0.0; n - 1],
            corner: 0.0,
        }
    }

    /// Solves `A x = rhs` by the Thomas algorithm. The corner entry is first
    /// eliminated against row 1.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.diag.len();
        let mut a = self.lower.clone();
        let mut b = self.diag.clone();
        let mut c = self.upper.clone();
        let mut d = rhs.to_vec();
        if self.corner != 0.0 {
            // row0 -= (corner / A[1][2]) * row1
            let m = self.corner / c[1];
            b[0] -= m * a[0];
            c[0] -= m * b[1];
            d[0] -= m * d[1];
        }
        for i in 1..n {
            if b[i - 1] == 0.0 {
                return Err(Error::NewtonDivergence("singular tridiagonal pivot".into()));
            }
            let m = a[i - 1] / b[i - 1];
            b[i] -= m * c[i - 1];
            d[i] -= m * d[i - 1];
            a[i - 1] = 0.0;
        }
        if b[n - 1] == 0.0 {
            return Err(Error::NewtonDivergence("singular tridiagonal pivot".into()));
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NewtonDivergence("non-finite linear solve".into()));
        }
        Ok(x)
    }
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping when the
/// bracket is narrower than `tol`. Returns `(x_min, f(x_min))`.
pub(crate) fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Root of `f` on a sign-changing bracket by the Illinois variant of regula
/// falsi, with a bisection fallback when the secant step stalls. Stops when
/// `done(x, f(x))` holds or the bracket collapses to round-off.
pub(crate) fn bracketed_root<F, D>(mut f: F, lo: f64, hi: f64, mut done: D) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
    D: FnMut(f64, f64) -> bool,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot { lo, hi });
    }
    let mut side = 0i8;
    for iter in 0..200 {
        let width = (b - a).abs();
        let mut x = if iter % 4 == 3 {
            0.5 * (a + b)
        } else {
            (a * fb - b * fa) / (fb - fa)
        };
        if !(x > a.min(b) && x < a.max(b)) {
            x = 0.5 * (a + b);
        }
        let fx = f(x)?;
        if fx == 0.0 || done(x, fx) || width <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
            return Ok(x);
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa /= 2.0;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb /= 2.0;
            }
            side = 1;
        }
    }
    Ok(0.5 * (a + b))
}
