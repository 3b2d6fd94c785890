//! Gradient, Hessian and Laplace–Beltrami operator of scalar fields, the
//! normalized gradient field, and the transnormal / isoparametric /
//! level-set mean curvature checks.
//!
//! Sign conventions: Δ = −div∘grad = −Σᵢ Hess_f(Eᵢ,Eᵢ), and the mean
//! curvature of a regular level is h = −Σᵢ g(∇_{Eᵢ}N, Eᵢ) over an
//! orthonormal frame of N^⊥.

use std::fmt;
use std::sync::Arc;

use crate::connection::cov_deriv;
use crate::error::{GeometryError, Result};
use crate::field::{ambient_gradient, directional_vec, to_dvector, GradientField, NormalizedGradient, ScalarField};
use crate::par::par_map;
use crate::report::{ReportBuilder, ResidualReport};
use crate::sphere::{check_base, gram_schmidt_frame, metric, project, Frame, SpherePoint, TangentVector};
use crate::tolerances;

/// Riemannian gradient P_p ∇̃f(p).
pub fn gradient<F: ScalarField>(f: &F, p: &SpherePoint) -> TangentVector {
    project(p, &to_dvector(ambient_gradient(f, p.as_slice())))
}

/// Hess_f(u,v) = g(∇_u ∇f, v).
pub fn hessian<F: ScalarField>(f: &F, u: &TangentVector, v: &TangentVector) -> Result<f64> {
    check_base(u, v)?;
    let g = GradientField(f);
    let d = directional_vec(&g, u.base().as_slice(), u.as_slice());
    Ok(d.iter().zip(v.as_slice()).map(|(a, b)| a * b).sum())
}

/// Δf at the base of `frame`, as −Σ Hess_f(Eᵢ,Eᵢ).
pub fn laplacian_in_frame<F: ScalarField>(f: &F, frame: &Frame) -> f64 {
    let mut acc = 0.0;
    for e in frame.vectors() {
        acc -= hessian(f, e, e).expect("frame vectors share a base");
    }
    acc
}

/// Δf in the canonical frame at `p`.
pub fn laplacian<F: ScalarField>(f: &F, p: &SpherePoint) -> f64 {
    let frame = gram_schmidt_frame(p, &[]).expect("canonical frame always exists");
    laplacian_in_frame(f, &frame)
}

/// ∇f/‖∇f‖, failing within `eps_reg` of the critical set.
pub fn normalized_gradient<F: ScalarField>(f: &F, p: &SpherePoint) -> Result<TangentVector> {
    normalized_gradient_with(f, p, tolerances::REGULARITY)
}

pub fn normalized_gradient_with<F: ScalarField>(f: &F, p: &SpherePoint, eps_reg: f64) -> Result<TangentVector> {
    let g = gradient(f, p);
    let norm = g.norm();
    if !(norm >= eps_reg) {
        return Err(GeometryError::Regularity { norm });
    }
    Ok(g.scaled(1.0 / norm))
}

/// ‖∇f‖² = b(f) with derivative b′.
#[derive(Clone)]
pub struct TransnormalProfile {
    b: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    b_prime: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    label: String,
}

impl TransnormalProfile {
    pub fn new(
        label: impl Into<String>,
        b: impl Fn(f64) -> f64 + Send + Sync + 'static,
        b_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TransnormalProfile { b: Arc::new(b), b_prime: Arc::new(b_prime), label: label.into() }
    }

    /// b(t) = 4(1 − t²), the profile of every double K-contact angle function.
    pub fn angle() -> Self {
        Self::new("4(1-t^2)", |t| 4.0 * (1.0 - t * t), |t| -8.0 * t)
    }

    /// b(t) = 1 − t², height functions on the unit sphere.
    pub fn height() -> Self {
        Self::new("1-t^2", |t| 1.0 - t * t, |t| -2.0 * t)
    }

    pub fn zero() -> Self {
        Self::new("0", |_| 0.0, |_| 0.0)
    }

    pub fn b(&self, t: f64) -> f64 {
        (self.b)(t)
    }

    pub fn b_prime(&self, t: f64) -> f64 {
        (self.b_prime)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for TransnormalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TransnormalProfile({})", self.label)
    }
}

/// Δf = a(f).
#[derive(Clone)]
pub struct IsoparametricProfile {
    a: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    label: String,
}

impl IsoparametricProfile {
    pub fn new(label: impl Into<String>, a: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        IsoparametricProfile { a: Arc::new(a), label: label.into() }
    }

    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self::new(format!("{slope}t+{intercept}"), move |t| slope * t + intercept)
    }

    pub fn a(&self, t: f64) -> f64 {
        (self.a)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for IsoparametricProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IsoparametricProfile({})", self.label)
    }
}

/// ‖∇_N N‖ per point, N = ∇f/‖∇f‖; critical points are skipped and counted.
pub fn check_geodesic<F: ScalarField>(f: &F, points: &[SpherePoint]) -> ResidualReport {
    let n = NormalizedGradient::new(f);
    let values = par_map(points, |_, p| {
        let np = normalized_gradient(f, p).ok()?;
        Some(cov_deriv(&n, &np).expect("normalized gradient is tangent").norm())
    });
    let mut b = ReportBuilder::new(
        format!("geodesic[{}]", f.label()),
        tolerances::GEODESIC,
        "normalized gradient of a transnormal function is geodesic",
    );
    for v in values {
        match v {
            Some(r) => b.push(r),
            None => b.skip(),
        }
    }
    b.finish()
}

/// |‖∇f‖² − b(f)| per point.
pub fn check_transnormal<F: ScalarField>(f: &F, profile: &TransnormalProfile, points: &[SpherePoint]) -> ResidualReport {
    let values = par_map(points, |_, p| {
        let g = gradient(f, p);
        (g.norm().powi(2) - profile.b(f.value(p))).abs()
    });
    let mut b = ReportBuilder::new(
        format!("transnormal[{}]", f.label()),
        tolerances::TRANSNORMAL,
        "|grad f|^2 = b(f)",
    );
    b.diagnostic("profile_b_at_0", profile.b(0.0));
    values.into_iter().for_each(|v| b.push(v));
    b.finish()
}

/// |Δf − a(f)| per point.
pub fn check_isoparametric<F: ScalarField>(f: &F, profile: &IsoparametricProfile, points: &[SpherePoint]) -> ResidualReport {
    let values = par_map(points, |_, p| (laplacian(f, p) - profile.a(f.value(p))).abs());
    let mut b = ReportBuilder::new(
        format!("isoparametric[{}]", f.label()),
        tolerances::ISOPARAMETRIC,
        "Laplacian f = a(f)",
    );
    values.into_iter().for_each(|v| b.push(v));
    b.finish()
}

/// Least-squares fit Δf ≈ slope·f + intercept.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineFit {
    pub slope: f64,
    pub intercept: f64,
    /// max |Δf − slope·f − intercept| over the samples.
    pub residual: f64,
}

pub fn fit_affine_profile<F: ScalarField>(f: &F, points: &[SpherePoint]) -> AffineFit {
    let pairs: Vec<(f64, f64)> = par_map(points, |_, p| (f.value(p), laplacian(f, p)));
    fit_affine(&pairs)
}

pub(crate) fn fit_affine(pairs: &[(f64, f64)]) -> AffineFit {
    let n = pairs.len().max(1) as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 1e-300 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let residual = pairs.iter().map(|p| (p.1 - slope * p.0 - intercept).abs()).fold(0.0, f64::max);
    AffineFit { slope, intercept, residual }
}

/// h = −Σ g(∇_{Eᵢ}N, Eᵢ) over a frame of N^⊥.
pub fn level_mean_curvature<F: ScalarField>(f: &F, p: &SpherePoint) -> Result<f64> {
    let np = normalized_gradient(f, p)?;
    let n = NormalizedGradient::new(f);
    let frame = gram_schmidt_frame(p, &[np])?;
    let mut h = 0.0;
    for e in &frame.vectors()[1..] {
        h -= metric(&cov_deriv(&n, e)?, e)?;
    }
    Ok(h)
}

/// |h − (Δf/‖∇f‖ + b′(f)/(2√b(f)))| per regular point.
pub fn lemma1_residual<F: ScalarField>(f: &F, profile: &TransnormalProfile, points: &[SpherePoint]) -> ResidualReport {
    let values = par_map(points, |_, p| {
        let grad_norm = gradient(f, p).norm();
        if !(grad_norm >= tolerances::REGULARITY) {
            return None;
        }
        let h = level_mean_curvature(f, p).ok()?;
        let t = f.value(p);
        let raw_b = profile.b(t);
        let clamped = raw_b < tolerances::SQRT_B_FLOOR;
        let b = raw_b.max(tolerances::SQRT_B_FLOOR);
        let rhs = laplacian(f, p) / grad_norm + profile.b_prime(t) / (2.0 * b.sqrt());
        Some(((h - rhs).abs(), clamped))
    });
    let mut b = ReportBuilder::new(
        format!("lemma1[{}]", f.label()),
        tolerances::LEMMA1,
        "h = Laplacian f/|grad f| + b'(f)/(2 sqrt b)",
    );
    for v in values {
        match v {
            Some((r, clamped)) => {
                if clamped {
                    b.flag();
                }
                b.push(r)
            }
            None => b.skip(),
        }
    }
    b.finish()
}
