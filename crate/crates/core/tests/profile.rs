mod common;

use surfsc_core::identities::correction_closed;
use surfsc_core::profile1d::{
    default_grid, energy_breakdown, optimize_alpha_halfplane, solve_curved, solve_f_given_alpha,
    ModelParams, EL_TOL,
};
use surfsc_core::spectral::{compute_theta0, THETA0_REFERENCE};
use surfsc_core::HalfLineGrid;

#[test]
fn maximum_principle_and_residual() {
    let g = default_grid();
    for b in [1.1, 1.3, 1.6] {
        let s = optimize_alpha_halfplane(b, &g).unwrap();
        assert!(s.residual_norm <= EL_TOL);
        for v in &s.f0 {
            assert!(*v >= -1e-9 && *v <= 1.0 + 1e-9);
        }
        let f2: Vec<f64> = s.f0.iter().map(|x| x * x).collect();
        assert!(s.optimality_residual.abs() <= 1e-8 * g.integrate(&f2).unwrap());
    }
}

#[test]
fn ground_energy_rises_toward_zero_with_b() {
    let g = default_grid();
    let e: Vec<f64> = [1.1, 1.3, 1.5, 1.65]
        .iter()
        .map(|b| optimize_alpha_halfplane(*b, &g).unwrap().e0)
        .collect();
    // E0 vanishes at b = 1/Θ0, so it must increase toward 0
    assert!(e.iter().all(|x| *x < 0.0));
    assert!(e.windows(2).all(|w| w[0] <= w[1]), "{e:?}");
}

#[test]
fn refinement_changes_energy_by_less_than_1e8() {
    let g = default_grid();
    let a = optimize_alpha_halfplane(1.5, &g).unwrap();
    let b = optimize_alpha_halfplane(1.5, &g.refined()).unwrap();
    assert!((a.e0 - b.e0).abs() <= 1e-8);
    assert!((a.alpha0 - b.alpha0).abs() <= 1e-7);
}

#[test]
fn brute_force_alpha_scan_has_interior_minimum_at_alpha0() {
    let g = HalfLineGrid::new(20.0, 1000).unwrap();
    let p = ModelParams::half_plane(1.5);
    let sol = optimize_alpha_halfplane(1.5, &g).unwrap();
    let alphas: Vec<f64> = (0..=40)
        .map(|i| sol.alpha0 - 0.02 + 1e-3 * i as f64)
        .collect();
    let energies: Vec<f64> = alphas
        .iter()
        .map(|a| {
            let f = solve_f_given_alpha(*a, &p, &g).unwrap();
            energy_breakdown(&f, *a, &p, &g).unwrap().total
        })
        .collect();
    let imin = (0..energies.len())
        .min_by(|i, j| energies[*i].total_cmp(&energies[*j]))
        .unwrap();
    assert!(imin > 0 && imin < energies.len() - 1);
    assert!((alphas[imin] - sol.alpha0).abs() <= 1e-3);
    assert!(energies[imin] >= sol.e0 - 1e-12);
}

#[test]
fn kinetic_energy_matches_gradient_identity() {
    let g = default_grid();
    let s = optimize_alpha_halfplane(1.25, &g).unwrap();
    let e = energy_breakdown(&s.f0, s.alpha0, &ModelParams::half_plane(1.25), &g).unwrap();
    let rhs: Vec<f64> =
        s.f0.iter()
            .map(|f| f * f / (2.0 * 1.25) - 5.0 * f.powi(4) / (8.0 * 1.25))
            .collect();
    assert!((e.kinetic - g.integrate(&rhs).unwrap()).abs() <= 1e-6);
    assert!((e.kinetic + e.potential + e.nonlinear - e.total).abs() <= 1e-15);
}

#[test]
fn near_critical_scaling_and_shift() {
    let g = default_grid();
    let theta = compute_theta0(&surfsc_core::spectral::default_grid(), 1e-9).unwrap();
    let b = 0.99 / THETA0_REFERENCE;
    let s = optimize_alpha_halfplane(b, &g).unwrap();
    assert!((s.alpha0 + THETA0_REFERENCE.sqrt()).abs() <= 0.02);
    let f4: Vec<f64> = s.f0.iter().map(|f| f.powi(4)).collect();
    let predicted = 0.01f64.powi(2) / theta.u0_l4_pow4;
    assert!((g.integrate(&f4).unwrap() / predicted - 1.0).abs() < 0.1);
    assert!(s.e0 < 0.0 && s.e0 > -1e-4);
}

#[test]
fn vanishing_curvature_reduces_to_half_plane() {
    let h = 0.005;
    let p = ModelParams::curved(1.5, 1e-3, 0.0, 6.0);
    let grid = p.curved_grid(h).unwrap();
    let c = solve_curved(&p, &grid).unwrap();
    let s = optimize_alpha_halfplane(1.5, &default_grid()).unwrap();
    assert!((c.e_star - s.e0).abs() <= 1e-8, "{} vs {}", c.e_star, s.e0);
    assert!((c.alpha_k - s.alpha0).abs() <= 1e-6);
}

#[test]
fn tiny_eps_profile_is_continuous_in_curvature() {
    let p0 = ModelParams::half_plane(1.5);
    let p1 = ModelParams::curved(1.5, 1e-6, 1.0, 6.0);
    let grid = p1.curved_grid(0.005).unwrap();
    let alpha = optimize_alpha_halfplane(1.5, &default_grid())
        .unwrap()
        .alpha0;
    let f0 = solve_f_given_alpha(alpha, &p0, &grid).unwrap();
    let f1 = solve_f_given_alpha(alpha, &p1, &grid).unwrap();
    assert!(common::max_abs_diff(&f0, &f1) <= 1e-4);
}

#[test]
fn curved_energy_follows_first_order_expansion() {
    let half = optimize_alpha_halfplane(1.5, &default_grid()).unwrap();
    let e_corr = correction_closed(&half).unwrap().via_boundary;
    assert!(e_corr > 0.0);

    let p = ModelParams::curved(1.5, 1e-3, 1.0, 6.0);
    let c = solve_curved(&p, &p.curved_grid(0.005).unwrap()).unwrap();
    assert!(c.e_star < half.e0);
    assert!(c.e_star > half.e0 - 1e-3 * e_corr - 1e-4);
    for v in &c.f_k {
        assert!(*v >= -1e-9 && *v <= 1.0 + 1e-9);
    }

    let eps: f64 = 1e-2;
    let p = ModelParams::curved(1.5, eps, -1.0, 6.0);
    let c = solve_curved(&p, &p.curved_grid(0.005).unwrap()).unwrap();
    assert!((c.e_star - (half.e0 + eps * e_corr)).abs() <= eps.powf(1.5));
}
