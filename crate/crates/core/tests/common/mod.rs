#![allow(dead_code)]

/// `u'(0)/|u(0)|` for the solution of `-u'' + (t + α)² u = μ u` that decays at
/// infinity, integrated inward from `t = 10` by classical RK4.
pub fn shoot(mu: f64, alpha: f64) -> f64 {
    let t_end = 10.0;
    let steps = 20_000;
    let h = t_end / steps as f64;
    let rhs = |t: f64, y: [f64; 2]| [y[1], ((t + alpha).powi(2) - mu) * y[0]];
    let mut y = [1e-30, -(t_end + alpha) * 1e-30];
    let mut t = t_end;
    for _ in 0..steps {
        let k1 = rhs(t, y);
        let k2 = rhs(
            t - h / 2.0,
            [y[0] - h / 2.0 * k1[0], y[1] - h / 2.0 * k1[1]],
        );
        let k3 = rhs(
            t - h / 2.0,
            [y[0] - h / 2.0 * k2[0], y[1] - h / 2.0 * k2[1]],
        );
        let k4 = rhs(t - h, [y[0] - h * k3[0], y[1] - h * k3[1]]);
        for j in 0..2 {
            y[j] -= h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        t -= h;
    }
    y[1] / y[0].abs()
}

/// Lowest Neumann eigenvalue by bisection on the shooting mismatch.
pub fn shooting_mu(alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.2, 3.0);
    let s_lo = shoot(lo, alpha).signum();
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        if shoot(m, alpha).signum() == s_lo {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// `(α_opt, Θ0)` by golden-section minimization of the shooting eigenvalue.
pub fn shooting_theta0() -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (-1.2, -0.4);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (shooting_mu(x1), shooting_mu(x2));
    while b - a > 1e-7 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = shooting_mu(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = shooting_mu(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Composite trapezoid rule on uniform samples.
pub fn trapezoid(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    h * (y[1..n - 1].iter().sum::<f64>() + 0.5 * (y[0] + y[n - 1]))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
