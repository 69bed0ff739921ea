//! Argument definitions and the mapping from subcommands to result tables.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use surfsc_core::coefficients::{self, SweepMode};
use surfsc_core::disc2d::{self, DiscParams};
use surfsc_core::geometry::{self, BoundarySegment, Descriptor};
use surfsc_core::identities::{self, Quadrature, IDENTITY_TOL};
use surfsc_core::profile1d::{self, ModelParams};
use surfsc_core::spectral::{self, THETA0_REFERENCE};
use surfsc_core::HalfLineGrid;

use crate::table::{Format, Table};

pub const SUBCOMMANDS: &[&str] = &[
    "theta0",
    "halfplane",
    "curved",
    "identities",
    "coeffs",
    "perturb",
    "sign-scan",
    "limit-check",
    "predict",
    "disc",
    "disc-theorem",
];

#[derive(Debug, Parser)]
#[command(
    name = "surfsc",
    version,
    about = "Effective 1D surface superconductivity models, curvature coefficients and a radial disc check",
    args_override_self = true
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write the table here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// File of key=value lines; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Print run metadata (version, timing, threads) to stderr.
    #[arg(long, global = true)]
    pub meta: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Half-line truncation T.
    #[arg(long, default_value_t = profile1d::HALF_PLANE_T)]
    pub t_max: f64,

    /// Number of cells on [0, T].
    #[arg(long, default_value_t = profile1d::DEFAULT_CELLS)]
    pub n_cells: usize,
}

impl GridArgs {
    fn grid(&self) -> surfsc_core::Result<HalfLineGrid> {
        HalfLineGrid::new(self.t_max, self.n_cells)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest de Gennes eigenvalue Θ0 and its optimal shift.
    Theta0 {
        #[command(flatten)]
        grid: GridArgs,
        /// Tolerance of the shift optimization.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Half-plane minimizer at one b.
    Halfplane {
        /// Field ratio b = H/H_C2.
        #[arg(long)]
        b: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// Emit the profile t, f0 instead of the summary.
        #[arg(long)]
        profile: bool,
        /// Accept b outside (1, 1/Θ0).
        #[arg(long)]
        regime_override: bool,
    },
    /// Curvature-weighted minimizer at one (b, eps, k).
    Curved {
        /// Field ratio b = H/H_C2.
        #[arg(long)]
        b: f64,
        /// Small parameter eps.
        #[arg(long)]
        eps: f64,
        /// Boundary curvature.
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        /// Truncation constant: T = c0 |ln eps|.
        #[arg(long, default_value_t = profile1d::DEFAULT_C0)]
        c0: f64,
        /// Grid spacing.
        #[arg(long, default_value_t = 0.005)]
        h: f64,
        #[arg(long)]
        profile: bool,
        #[arg(long)]
        regime_override: bool,
    },
    /// Residuals of the exact integral identities.
    Identities {
        /// Field ratio b = H/H_C2.
        #[arg(long)]
        b: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// Use fourth-order quadrature instead of the solver's.
        #[arg(long)]
        high_order: bool,
        /// Pass threshold for scaled residuals.
        #[arg(long, default_value_t = IDENTITY_TOL)]
        tol: f64,
    },
    /// Coefficient table C1(b), C2(b) over a b range.
    Coeffs {
        #[arg(long, default_value_t = 1.1)]
        b_min: f64,
        #[arg(long, default_value_t = 1.6)]
        b_max: f64,
        #[arg(long, default_value_t = 6)]
        steps: usize,
        #[command(flatten)]
        grid: GridArgs,
        /// Independent parallel solves instead of continuation.
        #[arg(long)]
        cold: bool,
    },
    /// Curved energies against the first-order expansion E0 - eps k Ecorr.
    Perturb {
        /// Field ratio b = H/H_C2.
        #[arg(long, default_value_t = 1.5)]
        b: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.003,0.001")]
        eps_list: Vec<f64>,
        #[arg(long, default_value_t = profile1d::DEFAULT_C0)]
        c0: f64,
        /// Half-plane grid; its spacing is reused for the curved solves.
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Search for a sign change of C2 over a b window.
    SignScan {
        #[arg(long, default_value_t = 1.05)]
        b_lo: f64,
        /// Defaults to 1/Θ0 - 0.005.
        #[arg(long)]
        b_hi: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
        #[command(flatten)]
        grid: GridArgs,
        /// Emit the scanned (b, C2) samples instead of the summary.
        #[arg(long)]
        samples: bool,
    },
    /// Near-critical scaling ratios at given gaps 1 - bΘ0.
    LimitCheck {
        #[arg(long, value_delimiter = ',', default_value = "0.04,0.02,0.01")]
        gaps: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Predicted boundary quartic mass along a curve segment.
    Predict {
        /// circle:R=1, ellipse:a=2,b=1 or fourier:a2=0.05,a3=0.01
        #[arg(long)]
        curve: String,
        /// Arclength interval s_a,s_b; the whole curve if omitted.
        #[arg(long, allow_hyphen_values = true)]
        segment: Option<String>,
        /// Small parameter eps.
        #[arg(long)]
        eps: f64,
        /// Field ratio b = H/H_C2.
        #[arg(long)]
        b: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Radial disc solve at one eps.
    Disc {
        /// Small parameter eps.
        #[arg(long)]
        eps: f64,
        /// Field ratio b = H/H_C2.
        #[arg(long, default_value_t = 1.5)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Fix the winding number instead of searching.
        #[arg(long)]
        winding: Option<i64>,
        /// Radial cells; defaults to max(4000, 200/eps).
        #[arg(long)]
        n_r: Option<usize>,
        /// Emit the radial profile r, g.
        #[arg(long)]
        profile: bool,
    },
    /// Disc quartic mass against eps C1 + eps^2 C2 over several eps.
    DiscTheorem {
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.03,0.02")]
        eps_list: Vec<f64>,
        /// Field ratio b = H/H_C2.
        #[arg(long, default_value_t = 1.5)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        n_r: Option<usize>,
        #[command(flatten)]
        grid: GridArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Theta0 { .. } => "theta0",
            Command::Halfplane { .. } => "halfplane",
            Command::Curved { .. } => "curved",
            Command::Identities { .. } => "identities",
            Command::Coeffs { .. } => "coeffs",
            Command::Perturb { .. } => "perturb",
            Command::SignScan { .. } => "sign-scan",
            Command::LimitCheck { .. } => "limit-check",
            Command::Predict { .. } => "predict",
            Command::Disc { .. } => "disc",
            Command::DiscTheorem { .. } => "disc-theorem",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Solver(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Solver(m) => f.write_str(m),
        }
    }
}

impl From<surfsc_core::Error> for CliError {
    fn from(e: surfsc_core::Error) -> Self {
        if e.is_invalid_input() {
            CliError::Invalid(e.to_string())
        } else {
            CliError::Solver(e.to_string())
        }
    }
}

type Out = Result<Table, CliError>;

fn profile_table(x: &str, y: &str, grid: &HalfLineGrid, v: &[f64]) -> Table {
    let mut t = Table::new(&[x, y]);
    for (i, fi) in v.iter().enumerate() {
        t.push(vec![grid.node(i).into(), (*fi).into()]);
    }
    t
}

fn parse_segment(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Invalid(format!("segment '{s}': expected s_a,s_b"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

/// Runs a subcommand. Warnings and diagnostics go to stderr; the returned
/// table is the only data output.
pub fn run(cmd: &Command) -> Out {
    match cmd {
        Command::Theta0 { grid, tol } => {
            let r = spectral::compute_theta0(&grid.grid()?, *tol)?;
            let mut t = Table::new(&["theta0", "alpha_opt", "u0_at_0", "u0_L4_pow4"]);
            t.push(vec![
                r.theta0.into(),
                r.alpha_opt.into(),
                r.u0_at_0.into(),
                r.u0_l4_pow4.into(),
            ]);
            Ok(t)
        }
        Command::Halfplane {
            b,
            grid,
            profile,
            regime_override,
        } => {
            let mut params = ModelParams::half_plane(*b);
            if *regime_override {
                params = params.with_regime_override();
            }
            let grid = grid.grid()?;
            let sol = profile1d::optimize_alpha_halfplane_with(&params, &grid, None)?;
            if *profile {
                return Ok(profile_table("t", "f0", &grid, &sol.f0));
            }
            let e = profile1d::energy_breakdown(&sol.f0, sol.alpha0, &params, &grid)?;
            let mut t = Table::new(&[
                "b",
                "alpha0",
                "E0",
                "f0sq0",
                "kinetic",
                "potential",
                "nonlinear",
                "residual_norm",
                "optimality_residual",
            ]);
            t.push(vec![
                sol.b.into(),
                sol.alpha0.into(),
                sol.e0.into(),
                (sol.f0[0] * sol.f0[0]).into(),
                e.kinetic.into(),
                e.potential.into(),
                e.nonlinear.into(),
                sol.residual_norm.into(),
                sol.optimality_residual.into(),
            ]);
            Ok(t)
        }
        Command::Curved {
            b,
            eps,
            k,
            c0,
            h,
            profile,
            regime_override,
        } => {
            let mut params = ModelParams::curved(*b, *eps, *k, *c0);
            if *regime_override {
                params = params.with_regime_override();
            }
            let grid = params.curved_grid(*h)?;
            let sol = profile1d::solve_curved(&params, &grid)?;
            if *profile {
                return Ok(profile_table("t", "f", &grid, &sol.f_k));
            }
            let mut t = Table::new(&[
                "b",
                "eps",
                "k",
                "c0",
                "T",
                "alpha",
                "E_star",
                "residual_norm",
            ]);
            t.push(vec![
                (*b).into(),
                (*eps).into(),
                (*k).into(),
                (*c0).into(),
                grid.t_max().into(),
                sol.alpha_k.into(),
                sol.e_star.into(),
                sol.residual_norm.into(),
            ]);
            Ok(t)
        }
        Command::Identities {
            b,
            grid,
            high_order,
            tol,
        } => {
            let sol = profile1d::optimize_alpha_halfplane(*b, &grid.grid()?)?;
            let q = if *high_order {
                Quadrature::HighOrder
            } else {
                Quadrature::Solver
            };
            let rep = identities::verify_all_with(&sol, q)?;
            let mut t = Table::new(&["identity", "lhs", "rhs", "scaled", "applicable", "pass"]);
            for (name, r) in rep.residuals() {
                t.push(vec![
                    name.into(),
                    r.lhs.into(),
                    r.rhs.into(),
                    r.scaled.into(),
                    r.applicable.into(),
                    r.passes(*tol).into(),
                ]);
            }
            Ok(t)
        }
        Command::Coeffs {
            b_min,
            b_max,
            steps,
            grid,
            cold,
        } => {
            let mode = if *cold {
                SweepMode::ColdParallel
            } else {
                SweepMode::Continuation
            };
            let rows = coefficients::sweep_with(*b_min, *b_max, *steps, &grid.grid()?, mode)?;
            let mut t = Table::new(&["b", "alpha0", "E0", "f0sq0", "Ecorr", "C1", "C2"]);
            for r in rows {
                if r.near_critical {
                    eprintln!(
                        "warning: b = {} is within {} of 1/Θ0",
                        r.b,
                        coefficients::NEAR_CRITICAL_GAP
                    );
                }
                if !r.converged {
                    eprintln!("warning: b = {} did not converge", r.b);
                }
                t.push(vec![
                    r.b.into(),
                    r.alpha0.into(),
                    r.e0.into(),
                    r.f0_sq_at_0.into(),
                    r.e_corr.into(),
                    r.c1.into(),
                    r.c2.into(),
                ]);
            }
            Ok(t)
        }
        Command::Perturb {
            b,
            k,
            eps_list,
            c0,
            grid,
        } => {
            let d = coefficients::perturbation_check(*b, *k, eps_list, *c0, &grid.grid()?)?;
            eprintln!(
                "slope {:e} (linear-only fit {:e}), predicted {:e}",
                d.slope,
                d.slope_linear,
                d.predicted_slope()
            );
            let mut t = Table::new(&["eps", "E_star", "E_linear", "deviation"]);
            for ((eps, e), dev) in d.eps_list.iter().zip(&d.e_star).zip(&d.deviations) {
                t.push(vec![
                    (*eps).into(),
                    (*e).into(),
                    (d.e0 - eps * d.k * d.e_corr).into(),
                    (*dev).into(),
                ]);
            }
            Ok(t)
        }
        Command::SignScan {
            b_lo,
            b_hi,
            resolution,
            points,
            grid,
            samples,
        } => {
            let hi = b_hi.unwrap_or(1.0 / THETA0_REFERENCE - 0.005);
            let s = coefficients::sign_scan((*b_lo, hi), *resolution, *points, &grid.grid()?)?;
            if *samples {
                let mut t = Table::new(&["b", "C2"]);
                for (b, c2) in s.samples {
                    t.push(vec![b.into(), c2.into()]);
                }
                return Ok(t);
            }
            let mut t = Table::new(&[
                "b_lo",
                "b_hi",
                "resolution",
                "sign_change",
                "b0_estimate",
                "bracket_lo",
                "bracket_hi",
                "min_C2",
            ]);
            let min_c2 = s.samples.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
            t.push(vec![
                (*b_lo).into(),
                hi.into(),
                (*resolution).into(),
                s.b0_estimate.is_some().into(),
                s.b0_estimate.into(),
                s.bracket.map(|x| x.0).into(),
                s.bracket.map(|x| x.1).into(),
                min_c2.into(),
            ]);
            Ok(t)
        }
        Command::LimitCheck { gaps, grid } => {
            let grid = grid.grid()?;
            let theta = spectral::compute_theta0(&spectral::default_grid(), 1e-10)?;
            let bs: Vec<f64> = gaps.iter().map(|g| (1.0 - g) / theta.theta0).collect();
            let rows = coefficients::limiting_check(&bs, &theta, &grid)?;
            let mut t = Table::new(&["b", "gap", "rho1", "rho2", "alpha_gap"]);
            for r in rows {
                t.push(vec![
                    r.b.into(),
                    r.gap.into(),
                    r.rho1.into(),
                    r.rho2.into(),
                    r.alpha_gap.into(),
                ]);
            }
            Ok(t)
        }
        Command::Predict {
            curve,
            segment,
            eps,
            b,
            grid,
        } => {
            let desc: Descriptor = curve.parse()?;
            let curve = geometry::curve_from_descriptor(desc)?;
            let seg = match segment {
                Some(s) => {
                    let (a, bb) = parse_segment(s)?;
                    BoundarySegment::new(&curve, a, bb)?
                }
                None => BoundarySegment::full(&curve),
            };
            // reject bad eps before the coefficient solve
            if !(*eps > 0.0 && *eps < 0.2) {
                return Err(CliError::Invalid(format!("eps = {eps} outside (0, 0.2)")));
            }
            let row = coefficients::coefficient_row(*b, &grid.grid()?)?;
            let p = geometry::predict_quartic_mass(&curve, &seg, *eps, &row)?;
            let mut t = Table::new(&["leading", "correction", "total"]);
            t.push(vec![p.leading.into(), p.correction.into(), p.total.into()]);
            Ok(t)
        }
        Command::Disc {
            eps,
            b,
            radius,
            winding,
            n_r,
            profile,
        } => {
            let mut params = DiscParams::new(*eps, *b).with_radius(*radius);
            if let Some(n) = winding {
                params = params.with_winding(*n);
            }
            if let Some(n) = n_r {
                params = params.with_cells(*n);
            }
            let sol = disc2d::solve_disc(&params)?;
            if *profile {
                return Ok(profile_table("r", "g", &sol.grid, &sol.g));
            }
            let id = disc2d::check_energy_identity(&sol)?;
            let mut t = Table::new(&[
                "eps",
                "b",
                "R",
                "n_opt",
                "n_hat",
                "energy",
                "quartic_mass",
                "boundary_value",
                "residual_norm",
                "identity_integrated",
                "identity_pointwise",
            ]);
            t.push(vec![
                (*eps).into(),
                (*b).into(),
                (*radius).into(),
                sol.n_opt.into(),
                sol.n_hat.into(),
                sol.energy.into(),
                sol.quartic_mass.into(),
                sol.boundary_value.into(),
                sol.residual_norm.into(),
                id.integrated_residual.into(),
                id.pointwise_residual.into(),
            ]);
            Ok(t)
        }
        Command::DiscTheorem {
            eps_list,
            b,
            radius,
            n_r,
            grid,
        } => {
            let row = coefficients::coefficient_row(*b, &grid.grid()?)?;
            let sols = eps_list
                .par_iter()
                .map(|eps| {
                    let mut p = DiscParams::new(*eps, *b).with_radius(*radius);
                    if let Some(n) = n_r {
                        p = p.with_cells(*n);
                    }
                    disc2d::solve_disc(&p)
                })
                .collect::<surfsc_core::Result<Vec<_>>>()?;
            let rep = disc2d::check_theorem(&sols, &row)?;
            eprintln!(
                "C1 = {}, C2 = {}; gap shrinking: {}, c2_hat monotone: {}, within 30%: {}",
                rep.c1, rep.c2, rep.gap_shrinking, rep.c2_monotone, rep.c2_within_30pct
            );
            let mut t = Table::new(&[
                "eps",
                "n_opt",
                "quartic_mass",
                "leading_ratio",
                "relative_gap",
                "c2_hat",
            ]);
            for r in rep.rows {
                t.push(vec![
                    r.eps.into(),
                    r.n_opt.into(),
                    r.quartic_mass.into(),
                    r.leading_ratio.into(),
                    r.relative_gap.into(),
                    r.c2_hat.into(),
                ]);
            }
            Ok(t)
        }
    }
}
