//! Uniform grids on `[0, T]` with quadrature and finite-difference helpers.
//!
//! Every solver in the crate samples its unknowns on the nodes `t_i = i*h`,
//! `i = 0..=n_cells`. Quadrature is composite Simpson (trapezoid when the
//! number of cells is odd).

use crate::error::{Error, Result};

/// Uniform discretization of `[0, T]` with `n_cells` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLineGrid {
    h: f64,
    n_cells: usize,
    t_max: f64,
}

impl HalfLineGrid {
    pub const MIN_CELLS: usize = 128;

    /// Builds the grid with spacing `h = t_max / n_cells`.
    pub fn new(t_max: f64, n_cells: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid length must be positive, got {t_max}"
            )));
        }
        if n_cells < Self::MIN_CELLS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {} cells, got {n_cells}",
                Self::MIN_CELLS
            )));
        }
        let h = t_max / n_cells as f64;
        Ok(Self {
            h,
            n_cells,
            t_max: h * n_cells as f64,
        })
    }

    /// Grid with approximately the requested spacing, rounded up to an even
    /// number of cells so Simpson's rule applies.
    pub fn with_spacing(t_max: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "spacing must be positive, got {h}"
            )));
        }
        let mut n = (t_max / h).ceil().max(Self::MIN_CELLS as f64) as usize;
        n += n % 2;
        Self::new(t_max, n)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Number of nodes, `n_cells + 1`.
    pub fn len(&self) -> usize {
        self.n_cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Same interval, half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            h: self.h / 2.0,
            n_cells: 2 * self.n_cells,
            t_max: self.t_max,
        }
    }

    /// Samples `f(t_i)` at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(self.node(i))).collect()
    }

    fn check(&self, samples: &[f64]) -> Result<()> {
        if samples.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: samples.len(),
            });
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(())
    }

    /// Composite Simpson on an even number of cells, trapezoid otherwise.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        self.check(samples)?;
        Ok(self.integrate_unchecked(samples))
    }

    pub(crate) fn integrate_unchecked(&self, samples: &[f64]) -> f64 {
        let n = self.n_cells;
        if n % 2 == 0 {
            simpson(samples, self.h)
        } else {
            let inner: f64 = samples[1..n].iter().sum();
            self.h * (0.5 * (samples[0] + samples[n]) + inner)
        }
    }

    /// Composite Boole rule (order six) when `n_cells` is divisible by four;
    /// falls back to [`HalfLineGrid::integrate`] otherwise. Used to audit
    /// quadrature error.
    pub fn integrate_high_order(&self, samples: &[f64]) -> Result<f64> {
        self.check(samples)?;
        if self.n_cells % 4 != 0 {
            return Ok(self.integrate_unchecked(samples));
        }
        let mut acc = 0.0;
        for c in (0..self.n_cells).step_by(4) {
            acc += 7.0 * samples[c]
                + 32.0 * samples[c + 1]
                + 12.0 * samples[c + 2]
                + 32.0 * samples[c + 3]
                + 7.0 * samples[c + 4];
        }
        Ok(acc * 2.0 * self.h / 45.0)
    }

    /// Second-order derivative: central stencil inside, one-sided
    /// three-point stencils at the endpoints.
    pub fn differentiate(&self, samples: &[f64]) -> Result<Vec<f64>> {
        self.check(samples)?;
        let n = self.n_cells;
        let inv = 1.0 / (2.0 * self.h);
        let mut d = vec![0.0; n + 1];
        for i in 1..n {
            d[i] = (samples[i + 1] - samples[i - 1]) * inv;
        }
        d[0] = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) * inv;
        d[n] = (3.0 * samples[n] - 4.0 * samples[n - 1] + samples[n - 2]) * inv;
        Ok(d)
    }

    /// Fourth-order derivative: five-point central stencil inside, one-sided
    /// five-point stencils on the two nodes nearest each end.
    pub fn differentiate_fourth_order(&self, samples: &[f64]) -> Result<Vec<f64>> {
        self.check(samples)?;
        Ok(differentiate4(samples, self.h))
    }
}

pub(crate) fn simpson(y: &[f64], h: f64) -> f64 {
    let n = y.len() - 1;
    debug_assert!(n % 2 == 0);
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in (1..n).step_by(2) {
        odd += y[i];
    }
    for i in (2..n).step_by(2) {
        even += y[i];
    }
    h / 3.0 * (y[0] + y[n] + 4.0 * odd + 2.0 * even)
}

pub(crate) fn differentiate4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len() - 1;
    let inv = 1.0 / (12.0 * h);
    let mut d = vec![0.0; n + 1];
    for i in 2..n - 1 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * inv;
    }
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * inv;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * inv;
    d[n] =
        (25.0 * f[n] - 48.0 * f[n - 1] + 36.0 * f[n - 2] - 16.0 * f[n - 3] + 3.0 * f[n - 4]) * inv;
    d[n - 1] = (3.0 * f[n] + 10.0 * f[n - 1] - 18.0 * f[n - 2] + 6.0 * f[n - 3] - f[n - 4]) * inv;
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_is_length_over_cells() {
        let g = HalfLineGrid::new(20.0, 2000).unwrap();
        assert!((g.h() - 0.01).abs() < 1e-15);
        let g = HalfLineGrid::new(30.0, 4096).unwrap();
        assert_eq!(g.h(), 30.0 / 4096.0);
        assert_eq!(g.len(), 4097);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            HalfLineGrid::new(10.0, 100),
            Err(Error::InvalidParameter(_))
        ));
        assert!(HalfLineGrid::new(0.0, 1000).is_err());
        assert!(HalfLineGrid::new(-1.0, 1000).is_err());
        assert!(HalfLineGrid::new(f64::NAN, 1000).is_err());
    }

    #[test]
    fn integrates_constants_and_linear() {
        let g = HalfLineGrid::new(10.0, 1000).unwrap();
        assert!((g.integrate(&vec![1.0; g.len()]).unwrap() - 10.0).abs() < 1e-12);
        let t = g.nodes();
        assert!((g.integrate(&t).unwrap() - 50.0).abs() < 1e-12);
        // odd cell count takes the trapezoid path
        let g = HalfLineGrid::new(10.0, 1001).unwrap();
        assert!((g.integrate(&g.nodes()).unwrap() - 50.0).abs() < 1e-11);
    }

    #[test]
    fn integrates_exponential_tail() {
        let g = HalfLineGrid::new(30.0, 3000).unwrap();
        let y = g.sample(|t| (-t).exp());
        let exact = 1.0 - (-30.0f64).exp();
        assert!((g.integrate(&y).unwrap() - exact).abs() < 1e-8);
    }

    #[test]
    fn simpson_exact_on_cubics() {
        let g = HalfLineGrid::new(3.0, 128).unwrap();
        let y = g.sample(|t| 1.0 - 2.0 * t + 0.5 * t * t - 0.25 * t * t * t);
        let exact = 3.0 - 9.0 + 4.5 - 81.0 / 16.0;
        assert!((g.integrate(&y).unwrap() - exact).abs() < 1e-12);
    }

    #[test]
    fn boole_matches_simpson_on_smooth_data() {
        let g = HalfLineGrid::new(8.0, 1024).unwrap();
        let y = g.sample(|t| (-t * t).exp());
        let a = g.integrate(&y).unwrap();
        let b = g.integrate_high_order(&y).unwrap();
        let exact = 0.5 * std::f64::consts::PI.sqrt();
        assert!((b - exact).abs() < 1e-13);
        assert!((a - exact).abs() < 1e-9);
    }

    #[test]
    fn quadrature_error_is_at_least_second_order() {
        // odd cell counts force the trapezoid path, the weakest rule in use
        let err = |n: usize| {
            // exact: ∫₀^2 e^{-t²} dt
            let g = HalfLineGrid::new(2.0, n).unwrap();
            let y = g.sample(|t| (-t * t).exp());
            (g.integrate(&y).unwrap() - 0.882_081_390_762_421_4).abs()
        };
        let (e1, e2) = (err(129), err(259));
        assert!(e1 / e2 >= 3.5, "ratio {}", e1 / e2);
        let (e1, e2) = (err(128), err(256));
        assert!(e1 / e2 >= 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn rejects_bad_samples() {
        let g = HalfLineGrid::new(1.0, 128).unwrap();
        assert!(matches!(
            g.integrate(&[1.0; 10]),
            Err(Error::LengthMismatch {
                expected: 129,
                actual: 10
            })
        ));
        let mut y = vec![0.0; 129];
        y[7] = f64::INFINITY;
        assert_eq!(g.integrate(&y), Err(Error::NonFinite(7)));
        assert_eq!(g.differentiate(&y), Err(Error::NonFinite(7)));
    }

    #[test]
    fn derivative_of_constants_and_lines() {
        let g = HalfLineGrid::new(5.0, 500).unwrap();
        let d = g.differentiate(&vec![3.0; g.len()]).unwrap();
        assert!(d.iter().all(|v| *v == 0.0));
        let d = g.differentiate(&g.nodes()).unwrap();
        assert!(d.iter().all(|v| (v - 1.0).abs() < 1e-10));
        // quadratics are exact for second-order stencils
        let d = g.differentiate(&g.sample(|t| t * t)).unwrap();
        for (i, v) in d.iter().enumerate() {
            assert!((v - 2.0 * g.node(i)).abs() < 1e-9);
        }
    }

    #[test]
    fn derivative_converges_at_second_order() {
        let err = |n: usize| {
            let g = HalfLineGrid::new(3.0, n).unwrap();
            let d = g.differentiate(&g.sample(|t| (t * t).sin())).unwrap();
            d.iter()
                .enumerate()
                .map(|(i, v)| (v - 2.0 * g.node(i) * (g.node(i).powi(2)).cos()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(256) / err(512);
        assert!(ratio >= 3.5, "ratio {ratio}");
    }

    #[test]
    fn fourth_order_derivative_converges() {
        let err = |n: usize| {
            let g = HalfLineGrid::new(3.0, n).unwrap();
            let d = g
                .differentiate_fourth_order(&g.sample(|t| (t * t).sin()))
                .unwrap();
            d.iter()
                .enumerate()
                .map(|(i, v)| (v - 2.0 * g.node(i) * (g.node(i).powi(2)).cos()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(256) / err(512);
        assert!(ratio >= 12.0, "ratio {ratio}");
    }

    #[test]
    fn integral_of_derivative_recovers_increment() {
        let g = HalfLineGrid::new(4.0, 800).unwrap();
        let f = g.sample(|t| (-0.5 * t).exp() * t.cos());
        let d = g.differentiate(&f).unwrap();
        let lhs = g.integrate(&d).unwrap();
        let rhs = f[g.n_cells()] - f[0];
        assert!((lhs - rhs).abs() < 1e-4, "{lhs} vs {rhs}");
    }
}
