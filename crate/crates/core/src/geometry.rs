//! Smooth closed boundary curves and the boundary-concentration prediction
//! `∫_D |Ψ|⁴ ≈ ε C1 |∂Ω ∩ ∂D| + ε² C2 ∫ k ds` for sets `D` cut out by
//! normals at the ends of an arclength segment.
//!
//! Curves are parametrized by an angle `θ ∈ [0, 2π)` and traversed
//! counterclockwise, so convex domains have positive curvature.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::coefficients::CoefficientRow;
use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 4096;
pub const DEFAULT_SAMPLES: usize = 8192;
/// Bound on `Σ m² |a_m|` for Fourier-radial curves.
pub const FOURIER_SMOOTHNESS_BOUND: f64 = 0.5;
const GAUSS_BONNET_TOL: f64 = 1e-8;

const GL_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss8(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GL_X.iter().zip(&GL_W) {
        s += w * (f(c - r * x) + f(c + r * x));
    }
    s * r
}

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (gauss8(f, a, m), gauss8(f, m, b));
    if depth == 0 || (l + r - whole).abs() <= tol {
        l + r
    } else {
        adaptive(f, a, m, l, 0.5 * tol, depth - 1) + adaptive(f, m, b, r, 0.5 * tol, depth - 1)
    }
}

fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    adaptive(f, a, b, gauss8(f, a, b), 1e-15, 20)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Descriptor {
    Circle {
        r: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// `r(θ) = 1 + Σ a_m cos(mθ)`, stored as `(m, a_m)` sorted by `m`.
    Fourier {
        coeffs: Vec<(u32, f64)>,
    },
}

impl Descriptor {
    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        match self {
            Descriptor::Circle { r } => positive("R", *r),
            Descriptor::Ellipse { a, b } => positive("a", *a).and(positive("b", *b)),
            Descriptor::Fourier { coeffs } => {
                if coeffs.iter().any(|(m, a)| *m == 0 || !a.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "fourier modes need m >= 1 and finite amplitudes".into(),
                    ));
                }
                let s: f64 = coeffs
                    .iter()
                    .map(|(m, a)| (*m as f64).powi(2) * a.abs())
                    .sum();
                if s >= FOURIER_SMOOTHNESS_BOUND {
                    return Err(Error::SmoothnessViolation(format!(
                        "sum m^2 |a_m| = {s} is not below {FOURIER_SMOOTHNESS_BOUND}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Position and first two derivatives in `θ`.
    fn eval(&self, th: f64) -> [[f64; 2]; 3] {
        let (s, c) = th.sin_cos();
        match self {
            Descriptor::Circle { r } => [[r * c, r * s], [-r * s, r * c], [-r * c, -r * s]],
            Descriptor::Ellipse { a, b } => [[a * c, b * s], [-a * s, b * c], [-a * c, -b * s]],
            Descriptor::Fourier { coeffs } => {
                let (mut r, mut dr, mut ddr) = (1.0, 0.0, 0.0);
                for &(m, a) in coeffs {
                    let m = m as f64;
                    let (sm, cm) = (m * th).sin_cos();
                    r += a * cm;
                    dr -= a * m * sm;
                    ddr -= a * m * m * cm;
                }
                [
                    [r * c, r * s],
                    [dr * c - r * s, dr * s + r * c],
                    [
                        ddr * c - 2.0 * dr * s - r * c,
                        ddr * s + 2.0 * dr * c - r * s,
                    ],
                ]
            }
        }
    }

    fn speed(&self, th: f64) -> f64 {
        let [_, d, _] = self.eval(th);
        d[0].hypot(d[1])
    }

    fn curvature(&self, th: f64) -> f64 {
        let [_, d, dd] = self.eval(th);
        (d[0] * dd[1] - d[1] * dd[0]) / d[0].hypot(d[1]).powi(3)
    }

    /// `k |γ'|`, the rate of turning of the tangent in `θ`.
    fn turning_rate(&self, th: f64) -> f64 {
        let [_, d, dd] = self.eval(th);
        (d[0] * dd[1] - d[1] * dd[0]) / (d[0] * d[0] + d[1] * d[1])
    }
}

impl FromStr for Descriptor {
    type Err = Error;

    /// Parses `circle:R=1`, `ellipse:a=2,b=1` or `fourier:a2=0.05,a3=0.01`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidParameter(format!("curve '{s}': {msg}"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got '{item}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad number '{v}'")))?;
            kv.push((k.trim().to_string(), v));
        }
        let get = |key: &str| {
            kv.iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| bad(format!("missing {key}")))
        };
        let only = |keys: &[&str]| match kv.iter().find(|(k, _)| !keys.contains(&k.as_str())) {
            Some((k, _)) => Err(bad(format!("unknown key '{k}'"))),
            None => Ok(()),
        };
        let d = match kind.trim() {
            "circle" => {
                only(&["R"])?;
                Descriptor::Circle { r: get("R")? }
            }
            "ellipse" => {
                only(&["a", "b"])?;
                Descriptor::Ellipse {
                    a: get("a")?,
                    b: get("b")?,
                }
            }
            "fourier" => {
                let mut coeffs = Vec::new();
                for (k, v) in &kv {
                    let m: u32 = k
                        .strip_prefix('a')
                        .and_then(|m| m.parse().ok())
                        .ok_or_else(|| bad(format!("unknown key '{k}'")))?;
                    if coeffs.iter().any(|(mm, _)| *mm == m) {
                        return Err(bad(format!("duplicate mode {m}")));
                    }
                    coeffs.push((m, *v));
                }
                coeffs.sort_by_key(|c| c.0);
                Descriptor::Fourier { coeffs }
            }
            other => return Err(bad(format!("unknown curve type '{other}'"))),
        };
        d.validate()?;
        Ok(d)
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Circle { r } => write!(f, "circle:R={r}"),
            Descriptor::Ellipse { a, b } => write!(f, "ellipse:a={a},b={b}"),
            Descriptor::Fourier { coeffs } => {
                write!(f, "fourier:")?;
                for (i, (m, a)) in coeffs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "a{m}={a}")?;
                }
                Ok(())
            }
        }
    }
}

/// Closed curve with arclength and curvature tabulated at uniform parameter
/// samples `θ_j = 2πj/N`, `j = 0..=N`.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    descriptor: Descriptor,
    theta: Vec<f64>,
    s: Vec<f64>,
    k: Vec<f64>,
}

pub fn curve_from_descriptor(descriptor: Descriptor) -> Result<BoundaryCurve> {
    BoundaryCurve::with_samples(descriptor, DEFAULT_SAMPLES)
}

impl BoundaryCurve {
    pub fn with_samples(descriptor: Descriptor, samples: usize) -> Result<Self> {
        descriptor.validate()?;
        if samples < MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "need at least {MIN_SAMPLES} samples, got {samples}"
            )));
        }
        let d = &descriptor;
        let dth = 2.0 * PI / samples as f64;
        let theta: Vec<f64> = (0..=samples).map(|j| j as f64 * dth).collect();
        let mut s = vec![0.0; samples + 1];
        for j in 0..samples {
            s[j + 1] = s[j] + integrate(&|t| d.speed(t), theta[j], theta[j + 1]);
        }
        let k: Vec<f64> = theta.iter().map(|t| d.curvature(*t)).collect();
        let curve = Self {
            descriptor,
            theta,
            s,
            k,
        };
        curve.check_smooth()?;
        curve.check_simple()?;
        let total = curve.total_turning();
        if (total - 2.0 * PI).abs() > GAUSS_BONNET_TOL {
            return Err(Error::ConsistencyViolation(format!(
                "total curvature {total} differs from 2π"
            )));
        }
        Ok(curve)
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn length(&self) -> f64 {
        *self.s.last().unwrap()
    }

    pub fn samples(&self) -> usize {
        self.theta.len() - 1
    }

    pub fn arclength_table(&self) -> &[f64] {
        &self.s
    }

    pub fn curvature_table(&self) -> &[f64] {
        &self.k
    }

    pub fn parameter_table(&self) -> &[f64] {
        &self.theta
    }

    /// `∮ k ds`.
    pub fn total_turning(&self) -> f64 {
        (0..self.samples())
            .map(|j| {
                integrate(
                    &|t| self.descriptor.turning_rate(t),
                    self.theta[j],
                    self.theta[j + 1],
                )
            })
            .sum()
    }

    /// Parameter value at arclength `s`.
    pub fn parameter_at(&self, s: f64) -> Result<f64> {
        let len = self.length();
        if !(s >= 0.0 && s <= len) {
            return Err(Error::SegmentOutOfRange(format!(
                "s = {s} outside [0, {len}]"
            )));
        }
        let j = match self.s.partition_point(|x| *x <= s) {
            0 => 0,
            p => (p - 1).min(self.samples() - 1),
        };
        let (t0, s0) = (self.theta[j], self.s[j]);
        let mut th = t0 + (s - s0) / (self.s[j + 1] - s0) * (self.theta[j + 1] - t0);
        for _ in 0..20 {
            let err = s0 + integrate(&|t| self.descriptor.speed(t), t0, th) - s;
            let step = err / self.descriptor.speed(th);
            th -= step;
            if step.abs() <= 1e-15 {
                break;
            }
        }
        Ok(th)
    }

    pub fn curvature_at(&self, s: f64) -> Result<f64> {
        Ok(self.descriptor.curvature(self.parameter_at(s)?))
    }

    pub fn point_at(&self, s: f64) -> Result<[f64; 2]> {
        Ok(self.descriptor.eval(self.parameter_at(s)?)[0])
    }

    fn check_smooth(&self) -> Result<()> {
        let max_jump = (0..self.samples())
            .map(|j| ((self.k[j + 1] - self.k[j]) / (self.s[j + 1] - self.s[j])).abs())
            .fold(0.0, f64::max);
        let kmax = self.k.iter().fold(0.0f64, |m, k| m.max(k.abs()));
        // a smooth curve has |k'| bounded by a modest multiple of k_max²
        if !max_jump.is_finite() || max_jump > 1e3 * (1.0 + kmax * kmax) {
            return Err(Error::SmoothnessViolation(format!(
                "discrete curvature derivative reaches {max_jump:e}"
            )));
        }
        Ok(())
    }

    fn check_simple(&self) -> Result<()> {
        let pts: Vec<[f64; 2]> = self.theta[..self.samples()]
            .iter()
            .map(|t| self.descriptor.eval(*t)[0])
            .collect();
        match first_crossing(&pts) {
            Some((i, j)) => Err(Error::NonSimpleCurve(format!(
                "polyline edges {i} and {j} cross"
            ))),
            None => Ok(()),
        }
    }
}

/// First pair of non-adjacent edges of the closed polyline that cross.
fn first_crossing(pts: &[[f64; 2]]) -> Option<(usize, usize)> {
    let n = pts.len();
    let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
    let orient = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    };
    let bbox: Vec<[f64; 4]> = (0..n)
        .map(|i| {
            let (p, q) = seg(i);
            [
                p[0].min(q[0]),
                p[0].max(q[0]),
                p[1].min(q[1]),
                p[1].max(q[1]),
            ]
        })
        .collect();
    // sweep over edges sorted by their left end
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| bbox[*a][0].total_cmp(&bbox[*b][0]));
    let mut found: Option<(usize, usize)> = None;
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if bbox[j][0] > bbox[i][1] {
                break;
            }
            let (lo, hi) = (i.min(j), i.max(j));
            if hi - lo < 2 || (lo == 0 && hi == n - 1) {
                continue;
            }
            let (a, b) = (bbox[i], bbox[j]);
            if a[3] < b[2] || b[3] < a[2] {
                continue;
            }
            let ((p1, p2), (q1, q2)) = (seg(i), seg(j));
            if orient(p1, p2, q1) * orient(p1, p2, q2) < 0.0
                && orient(q1, q2, p1) * orient(q1, q2, p2) < 0.0
            {
                found = Some(found.map_or((lo, hi), |f| f.min((lo, hi))));
            }
        }
    }
    found
}

/// Arclength interval `[s_a, s_b]` of the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySegment {
    pub s_a: f64,
    pub s_b: f64,
}

impl BoundarySegment {
    pub fn new(curve: &BoundaryCurve, s_a: f64, s_b: f64) -> Result<Self> {
        let len = curve.length();
        if !(s_a >= 0.0 && s_a < s_b && s_b <= len) {
            return Err(Error::SegmentOutOfRange(format!(
                "[{s_a}, {s_b}] is not an interval inside [0, {len}]"
            )));
        }
        Ok(Self { s_a, s_b })
    }

    pub fn full(curve: &BoundaryCurve) -> Self {
        Self {
            s_a: 0.0,
            s_b: curve.length(),
        }
    }

    pub fn length(&self) -> f64 {
        self.s_b - self.s_a
    }
}

fn check_segment(curve: &BoundaryCurve, seg: &BoundarySegment) -> Result<()> {
    BoundarySegment::new(curve, seg.s_a, seg.s_b).map(|_| ())
}

/// `∫_{s_a}^{s_b} k ds`.
pub fn curvature_integral(curve: &BoundaryCurve, seg: &BoundarySegment) -> Result<f64> {
    check_segment(curve, seg)?;
    let ta = curve.parameter_at(seg.s_a)?;
    let tb = curve.parameter_at(seg.s_b)?;
    let th = &curve.theta;
    let ja = th.partition_point(|t| *t <= ta);
    let jb = th.partition_point(|t| *t < tb);
    let f = |t: f64| curve.descriptor.turning_rate(t);
    if ja >= jb {
        return Ok(integrate(&f, ta, tb));
    }
    let mut total = integrate(&f, ta, th[ja]);
    for j in ja..jb - 1 {
        total += integrate(&f, th[j], th[j + 1]);
    }
    total += integrate(&f, th[jb - 1], tb);
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticPrediction {
    /// `ε C1 (s_b - s_a)`
    pub leading: f64,
    /// `ε² C2 ∫ k ds`
    pub correction: f64,
    pub total: f64,
}

fn check_inputs(eps: f64, coeff: &CoefficientRow) -> Result<()> {
    if !(eps > 0.0 && eps < 0.2) {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} outside (0, 0.2)"
        )));
    }
    if !coeff.converged {
        return Err(Error::UnconvergedInput(f64::NAN));
    }
    Ok(())
}

pub fn predict_quartic_mass(
    curve: &BoundaryCurve,
    seg: &BoundarySegment,
    eps: f64,
    coeff: &CoefficientRow,
) -> Result<QuarticPrediction> {
    check_inputs(eps, coeff)?;
    let leading = eps * coeff.c1 * seg.length();
    let correction = eps * eps * coeff.c2 * curvature_integral(curve, seg)?;
    Ok(QuarticPrediction {
        leading,
        correction,
        total: leading + correction,
    })
}

/// Density `ε C1 + ε² C2 k(s)` per unit boundary length.
pub fn predict_density_per_arclength(
    curve: &BoundaryCurve,
    s: f64,
    eps: f64,
    coeff: &CoefficientRow,
) -> Result<f64> {
    check_inputs(eps, coeff)?;
    Ok(eps * coeff.c1 + eps * eps * coeff.c2 * curve.curvature_at(s)?)
}
