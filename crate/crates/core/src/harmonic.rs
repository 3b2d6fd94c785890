//! Unit vector fields: Weingarten operator A_Z = −∇Z and its transpose,
//! L_Z, the pulled-back Sasaki metric, the energy, the ν_Z criterion for
//! harmonicity and the spectral conditions on the shape operator of a
//! geodesic field.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::connection::{cov_deriv, ricci};
use crate::contact::ContactMetricStructure;
use crate::dual::Scalar;
use crate::error::{GeometryError, Result};
use crate::field::{dot, jacobian_columns, project_ext, LinearField, NormalizedGradient, ProjectedConstant, ScalarField, VectorField};
use crate::par::par_map;
use crate::report::{pairwise_sum, ReportBuilder, ResidualReport};
use crate::sphere::{gram_schmidt_frame, metric, probe_rng, project, random_frame, sample_points, Frame, SpherePoint, TangentVector};
use crate::tolerances;

/// Predicate for points where a field is defined.
pub type Guard = Arc<dyn Fn(&SpherePoint) -> bool + Send + Sync>;

/// A tangent unit field together with the set where it is defined.
#[derive(Clone)]
pub struct UnitVectorField<V> {
    field: V,
    guard: Option<Guard>,
    label: String,
}

impl<V: VectorField> UnitVectorField<V> {
    pub fn new(field: V, label: impl Into<String>) -> Self {
        UnitVectorField { field, guard: None, label: label.into() }
    }

    pub fn with_guard(mut self, guard: Guard) -> Self {
        self.guard = Some(guard);
        self
    }

    pub fn field(&self) -> &V {
        &self.field
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn admits(&self, p: &SpherePoint) -> bool {
        self.guard.as_ref().is_none_or(|g| g(p))
    }

    pub fn check(&self, p: &SpherePoint) -> Result<()> {
        if self.admits(p) {
            Ok(())
        } else {
            Err(GeometryError::Regularity { norm: f64::NAN })
        }
    }

    pub fn value(&self, p: &SpherePoint) -> Result<TangentVector> {
        self.check(p)?;
        Ok(self.field.at(p))
    }
}

impl<V: VectorField> VectorField for UnitVectorField<V> {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        self.field.eval(x)
    }
    fn is_tangent(&self) -> bool {
        self.field.is_tangent()
    }
}

/// The Reeb field of a structure (defined everywhere).
pub fn reeb_field(s: &ContactMetricStructure) -> UnitVectorField<LinearField> {
    UnitVectorField::new(s.reeb().clone(), "reeb")
}

/// ∇f/‖∇f‖ restricted to |f| ≤ cutoff and ‖∇f‖ ≥ the regularity threshold.
pub fn normalized_gradient_field<F>(f: F, cutoff: f64) -> UnitVectorField<NormalizedGradient<F>>
where
    F: ScalarField + Clone + Send + 'static,
{
    let label = format!("N[{}]", f.label());
    let g = f.clone();
    let guard: Guard = Arc::new(move |p| {
        g.value(p).abs() <= cutoff && crate::calculus::gradient(&g, p).norm() >= tolerances::REGULARITY
    });
    UnitVectorField::new(NormalizedGradient::new(f), label).with_guard(guard)
}

/// Ambient matrix of A = −P·DṼ·P at q (rows, then columns).
fn a_matrix_ext<V: VectorField, S: Scalar>(field: &V, q: &[S]) -> Vec<Vec<S>> {
    let d = q.len();
    let cols = jacobian_columns(field, q);
    let qq = dot(q, q);
    // JP = J − (Jq)qᵀ/|q|²
    let jq: Vec<S> = (0..d).map(|r| (0..d).fold(S::zero(), |acc, k| acc + cols[k][r] * q[k])).collect();
    let jp: Vec<Vec<S>> = (0..d).map(|r| (0..d).map(|c| cols[c][r] - jq[r] * q[c] / qq).collect()).collect();
    // P·JP = JP − q(qᵀJP)/|q|²
    let qjp: Vec<S> = (0..d).map(|c| (0..d).fold(S::zero(), |acc, r| acc + q[r] * jp[r][c])).collect();
    (0..d).map(|r| (0..d).map(|c| -(jp[r][c] - q[r] * qjp[c] / qq)).collect()).collect()
}

/// Ambient matrix of A_Z at `p`; it kills the normal and maps into T_p.
pub fn a_matrix<V: VectorField>(z: &UnitVectorField<V>, p: &SpherePoint) -> Result<DMatrix<f64>> {
    z.check(p)?;
    let a = a_matrix_ext(&z.field, p.as_slice());
    let d = a.len();
    Ok(DMatrix::from_fn(d, d, |r, c| a[r][c]))
}

/// q ↦ A_Z(q)ᵗ x̃(q) with x̃ = P_q x.
struct TransposeApplied<'a, V> {
    field: &'a V,
    x: Vec<f64>,
}

impl<V: VectorField> VectorField for TransposeApplied<'_, V> {
    fn eval<S: Scalar>(&self, q: &[S]) -> Vec<S> {
        let xs: Vec<S> = self.x.iter().map(|&c| S::cst(c)).collect();
        let xt = project_ext(q, &xs);
        let a = a_matrix_ext(self.field, q);
        (0..q.len()).map(|c| (0..q.len()).fold(S::zero(), |acc, r| acc + a[r][c] * xt[r])).collect()
    }
    fn is_tangent(&self) -> bool {
        true
    }
}

/// q ↦ tr A_Z(q): the mean curvature h of the distribution Z^⊥.
pub struct MeanCurvatureField<V>(pub V);

impl<V: VectorField> ScalarField for MeanCurvatureField<V> {
    fn eval<S: Scalar>(&self, q: &[S]) -> S {
        let a = a_matrix_ext(&self.0, q);
        (0..q.len()).fold(S::zero(), |acc, k| acc + a[k][k])
    }
    fn label(&self) -> String {
        "mean_curvature".into()
    }
}

/// A_Z u = −∇_u Z.
pub fn weingarten<V: VectorField>(z: &UnitVectorField<V>, u: &TangentVector) -> Result<TangentVector> {
    z.check(u.base())?;
    Ok(cov_deriv(&z.field, u)?.scaled(-1.0))
}

/// A_Zᵗ u, the g-adjoint of A_Z.
pub fn weingarten_transpose<V: VectorField>(z: &UnitVectorField<V>, u: &TangentVector) -> Result<TangentVector> {
    let a = a_matrix(z, u.base())?;
    Ok(project(u.base(), &(a.transpose() * u.vec())))
}

/// L_Z u = u + A_Zᵗ(A_Z u).
pub fn l_operator<V: VectorField>(z: &UnitVectorField<V>, u: &TangentVector) -> Result<TangentVector> {
    let a = a_matrix(z, u.base())?;
    let au = &a * u.vec();
    Ok(project(u.base(), &(u.vec() + a.transpose() * au)))
}

/// Z*g_S(u,v) = g(u,v) + g(∇_u Z, ∇_v Z).
pub fn pullback_metric<V: VectorField>(z: &UnitVectorField<V>, u: &TangentVector, v: &TangentVector) -> Result<f64> {
    let au = weingarten(z, u)?;
    let av = weingarten(z, v)?;
    Ok(metric(u, v)? + metric(&au, &av)?)
}

/// ‖∇Z‖² at `p`.
pub fn nabla_norm_sq<V: VectorField>(z: &UnitVectorField<V>, p: &SpherePoint) -> Result<f64> {
    Ok(a_matrix(z, p)?.norm_squared())
}

/// tr L_Z = m + ‖∇Z‖².
pub fn trace_l<V: VectorField>(z: &UnitVectorField<V>, p: &SpherePoint) -> Result<f64> {
    Ok(p.dim() as f64 + nabla_norm_sq(z, p)?)
}

/// Vol(S^m) for odd m = 2n+1: 2π^{n+1}/n!.
pub fn sphere_volume(m: usize) -> Result<f64> {
    if m.is_multiple_of(2) || m < 1 {
        return Err(GeometryError::UnsupportedDimension(m));
    }
    let n = (m - 1) / 2;
    Ok(2.0 * PI.powi(n as i32 + 1) / crate::contact::factorial(n))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    /// Samples outside the guard, counted with integrand zero.
    pub skipped: usize,
}

impl EnergyEstimate {
    /// |value − target| within k standard errors, plus a relative
    /// round-off floor for integrands that are constant.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error + tolerances::ENERGY_FLOOR * target.abs()
    }

    /// Two independent estimates agree within k combined standard errors.
    pub fn agrees_with(&self, other: &EnergyEstimate, k: f64) -> bool {
        let se = (self.std_error.powi(2) + other.std_error.powi(2)).sqrt();
        let scale = self.value.abs().max(other.value.abs());
        (self.value - other.value).abs() <= k * se + tolerances::ENERGY_FLOOR * scale
    }
}

/// Monte Carlo estimate of E(Z) = ½∫ tr L_Z over the guarded domain.
pub fn energy<V: VectorField>(z: &UnitVectorField<V>, m: usize, samples: usize, seed: u64) -> Result<EnergyEstimate> {
    let vol = sphere_volume(m)?;
    let points = sample_points(m, samples, seed, None)?;
    let values: Vec<Option<f64>> = par_map(&points, |_, p| if z.admits(p) { trace_l(z, p).ok() } else { None });
    let skipped = values.iter().filter(|v| v.is_none()).count();
    let accepted = samples - skipped;
    if accepted == 0 || accepted * 100 < samples {
        return Err(GeometryError::SamplingExhausted { accepted, attempts: samples });
    }
    let xs: Vec<f64> = values.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    let mean = pairwise_sum(&xs) / samples as f64;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    let var = if samples > 1 { pairwise_sum(&dev) / (samples - 1) as f64 } else { 0.0 };
    Ok(EnergyEstimate {
        value: 0.5 * vol * mean,
        std_error: 0.5 * vol * (var / samples as f64).sqrt(),
        samples,
        skipped,
    })
}

/// ν_Z(x) = Σᵢ g((∇_{uᵢ}A_Zᵗ)x, uᵢ) over the canonical frame.
pub fn nu_form<V: VectorField>(z: &UnitVectorField<V>, x: &TangentVector) -> Result<f64> {
    let frame = gram_schmidt_frame(x.base(), &[])?;
    nu_form_in_frame(z, x, &frame)
}

/// ν_Z(x) traced over the given orthonormal frame.
pub fn nu_form_in_frame<V: VectorField>(z: &UnitVectorField<V>, x: &TangentVector, frame: &Frame) -> Result<f64> {
    let p = x.base();
    let zp = z.value(p)?;
    let overlap = metric(x, &zp)?;
    if overlap.abs() > 1e-8 {
        return Err(GeometryError::Precondition(format!("x is not orthogonal to the field (g = {overlap:e})")));
    }
    let t = TransposeApplied { field: &z.field, x: x.as_slice().to_vec() };
    let xt = ProjectedConstant::extending(x);
    let at = a_matrix(z, p)?.transpose();
    let mut acc = 0.0;
    for u in frame.vectors() {
        let first = cov_deriv(&t, u)?;
        let dx = cov_deriv(&xt, u)?;
        let second = project(p, &(&at * dx.vec()));
        acc += metric(&first.sub(&second)?, u)?;
    }
    Ok(acc)
}

/// max |ν_Z(x)| over an orthonormal basis of Z^⊥ at each point, with the
/// spread between two frames as a diagnostic.
pub fn nu_check<V: VectorField>(z: &UnitVectorField<V>, points: &[SpherePoint], name: &str) -> ResidualReport {
    let values = par_map(points, |i, p| {
        let zp = z.value(p).ok()?;
        let frame = gram_schmidt_frame(p, &[zp]).ok()?;
        let other = random_frame(p, &mut probe_rng(i));
        let mut worst: f64 = 0.0;
        let mut spread: f64 = 0.0;
        for (k, x) in frame.vectors()[1..].iter().enumerate() {
            let v = nu_form_in_frame(z, x, &frame).ok()?;
            worst = worst.max(v.abs());
            if k == 0 {
                let w = nu_form_in_frame(z, x, &other).ok()?;
                spread = spread.max((v - w).abs());
            }
        }
        Some((worst, spread))
    });
    let mut b = ReportBuilder::new(name, tolerances::NU_FORM, "nu_Z(x) = tr(u -> (nabla_u A_Z^t) x) = 0 for x orthogonal to Z");
    for v in values {
        match v {
            Some((w, s)) => {
                b.push(w);
                b.diagnostic_max("frame_dependence_max", s);
            }
            None => b.skip(),
        }
    }
    b.finish()
}

/// Eigen-decomposition of A_N on N^⊥ for a geodesic field.
#[derive(Clone, Debug)]
pub struct ShapeSpectrum {
    pub base: SpherePoint,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenframe: Vec<TangentVector>,
    pub mean_curvature: f64,
}

impl ShapeSpectrum {
    /// Smallest gap between consecutive eigenvalues (infinite if fewer than two).
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    pub fn is_simple(&self) -> bool {
        self.min_gap() >= tolerances::EIGEN_GAP
    }

    /// ‖A − Σλᵢ eᵢeᵢᵀ‖ on N^⊥ (max entry) against the given matrix of A.
    pub fn reconstruction_error(&self, a: &DMatrix<f64>) -> f64 {
        let d = self.base.ambient_dim();
        let mut r = DMatrix::zeros(d, d);
        for (l, e) in self.eigenvalues.iter().zip(&self.eigenframe) {
            r += e.vec() * e.vec().transpose() * *l;
        }
        let frame_proj: DMatrix<f64> = self.eigenframe.iter().fold(DMatrix::zeros(d, d), |acc, e| acc + e.vec() * e.vec().transpose());
        (&frame_proj * a * &frame_proj - r).amax()
    }
}

/// Matrix of A_N on the canonical frame of N^⊥, with that frame.
fn shape_matrix<V: VectorField>(n: &UnitVectorField<V>, p: &SpherePoint) -> Result<(DMatrix<f64>, Vec<TangentVector>)> {
    let np = n.value(p)?;
    let geo = weingarten(n, &np)?.norm();
    if geo > 1e-6 {
        return Err(GeometryError::Precondition(format!("field is not geodesic (|nabla_N N| = {geo:e})")));
    }
    let frame = gram_schmidt_frame(p, &[np])?.into_vectors().split_off(1);
    let a = a_matrix(n, p)?;
    let k = frame.len();
    let m = DMatrix::from_fn(k, k, |i, j| frame[i].vec().dot(&(&a * frame[j].vec())));
    Ok((m, frame))
}

pub fn shape_spectrum<V: VectorField>(n: &UnitVectorField<V>, p: &SpherePoint) -> Result<ShapeSpectrum> {
    let (m, frame) = shape_matrix(n, p)?;
    let asym = (&m - m.transpose()).amax();
    if asym > tolerances::SHAPE_SYMMETRY {
        return Err(GeometryError::Integrability { asym });
    }
    let eig = SymmetricEigen::new((&m + m.transpose()) * 0.5);
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenframe = order
        .iter()
        .map(|&k| {
            let mut v = DVector::zeros(p.ambient_dim());
            for (i, e) in frame.iter().enumerate() {
                v += e.vec() * eig.eigenvectors[(i, k)];
            }
            project(p, &v)
        })
        .collect();
    Ok(ShapeSpectrum { base: p.clone(), mean_curvature: eigenvalues.iter().sum(), eigenvalues, eigenframe })
}

/// (f(−2h) − 8f(−h) + 8f(h) − f(2h)) / 12h.
fn five_point(samples: [f64; 4], h: f64) -> f64 {
    (samples[0] - 8.0 * samples[1] + 8.0 * samples[2] - samples[3]) / (12.0 * h)
}

const STENCIL: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];

/// u(g) for a scalar g, differentiated along the geodesic with initial velocity u.
fn geodesic_derivative(u: &TangentVector, g: impl Fn(&SpherePoint) -> Result<f64>) -> Result<f64> {
    let h = tolerances::FD_STEP;
    let p = u.base();
    let mut s = [0.0; 4];
    for (k, t) in STENCIL.iter().enumerate() {
        s[k] = g(&p.geodesic(u, t * h))?;
    }
    Ok(five_point(s, h))
}

/// Spectrum at q with eigenpairs reordered to match `reference` by maximal
/// eigenvector overlap and signs aligned.
fn matched_spectrum<V: VectorField>(n: &UnitVectorField<V>, reference: &ShapeSpectrum, q: &SpherePoint) -> Result<(Vec<f64>, Vec<DVector<f64>>)> {
    let s = shape_spectrum(n, q)?;
    let mut vals = Vec::new();
    let mut vecs = Vec::new();
    for e in &reference.eigenframe {
        let (k, ov) = s
            .eigenframe
            .iter()
            .map(|f| f.vec().dot(e.vec()))
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .ok_or(GeometryError::Degenerate { gram: 0.0 })?;
        vals.push(s.eigenvalues[k]);
        vecs.push(s.eigenframe[k].vec() * ov.signum());
    }
    Ok((vals, vecs))
}

/// Per-j residuals of E_j(λ_j) + Σ_{i≠j}(λᵢ − λⱼ)g(∇_{Eᵢ}Eᵢ, Eⱼ), summed
/// over the eigenframe of N^⊥. `None` when the spectrum is not simple.
pub fn eq19_residual<V: VectorField>(n: &UnitVectorField<V>, p: &SpherePoint) -> Result<Option<Vec<f64>>> {
    let spec = shape_spectrum(n, p)?;
    if !spec.is_simple() {
        return Ok(None);
    }
    let h = tolerances::FD_STEP;
    let k = spec.eigenvalues.len();
    let mut lam_deriv = vec![0.0; k];
    let mut self_deriv = Vec::with_capacity(k);
    for (i, e) in spec.eigenframe.iter().enumerate() {
        let mut ls = [0.0; 4];
        let mut vs: Vec<DVector<f64>> = Vec::with_capacity(4);
        for (s, t) in STENCIL.iter().enumerate() {
            let (vals, vecs) = matched_spectrum(n, &spec, &p.geodesic(e, t * h))?;
            ls[s] = vals[i];
            vs.push(vecs[i].clone());
        }
        lam_deriv[i] = five_point(ls, h);
        let d = (&vs[0] - &vs[1] * 8.0 + &vs[2] * 8.0 - &vs[3]) / (12.0 * h);
        self_deriv.push(project(p, &d));
    }
    let out = (0..k)
        .map(|j| {
            let mut r = lam_deriv[j];
            for i in (0..k).filter(|&i| i != j) {
                r += (spec.eigenvalues[i] - spec.eigenvalues[j]) * metric(&self_deriv[i], &spec.eigenframe[j]).unwrap();
            }
            r.abs()
        })
        .collect();
    Ok(Some(out))
}

/// Per-j residuals |ρ(E_j, N) − E_j(h)|. `None` when the spectrum is not simple.
pub fn eq35_residual<V: VectorField>(n: &UnitVectorField<V>, p: &SpherePoint) -> Result<Option<Vec<f64>>> {
    let spec = shape_spectrum(n, p)?;
    if !spec.is_simple() {
        return Ok(None);
    }
    let np = n.value(p)?;
    let hf = MeanCurvatureField(&n.field);
    spec.eigenframe
        .iter()
        .map(|e| {
            let eh = geodesic_derivative(e, |q| Ok(hf.value(q)))?;
            Ok((ricci(e, &np)? - eh).abs())
        })
        .collect::<Result<Vec<f64>>>()
        .map(Some)
}

/// max over an orthonormal basis x of N^⊥ of |x(h) − ρ(x, N)|.
pub fn critical_condition_check<V: VectorField>(n: &UnitVectorField<V>, points: &[SpherePoint]) -> ResidualReport {
    let hf = MeanCurvatureField(&n.field);
    let values = par_map(points, |_, p| {
        let np = n.value(p).ok()?;
        let frame = gram_schmidt_frame(p, std::slice::from_ref(&np)).ok()?;
        let mut worst: f64 = 0.0;
        for x in &frame.vectors()[1..] {
            let xh = geodesic_derivative(x, |q| Ok(hf.value(q))).ok()?;
            worst = worst.max((xh - ricci(x, &np).ok()?).abs());
        }
        Some(worst)
    });
    let mut b = ReportBuilder::new("critical_condition", tolerances::CRITICAL_CONDITION, "X(h) = rho(X, N) for X orthogonal to N");
    for v in values {
        match v {
            Some(w) => b.push(w),
            None => b.skip(),
        }
    }
    b.finish()
}

/// Reports for the two spectral identities; points with a multiple
/// eigenvalue are skipped and flagged.
pub fn spectral_identity_check<V: VectorField>(n: &UnitVectorField<V>, points: &[SpherePoint]) -> (ResidualReport, ResidualReport) {
    let values = par_map(points, |_, p| {
        let a = eq19_residual(n, p).map(|o| o.map(|v| v.into_iter().fold(0.0, f64::max)));
        let b = eq35_residual(n, p).map(|o| o.map(|v| v.into_iter().fold(0.0, f64::max)));
        (a, b)
    });
    let mut r19 = ReportBuilder::new("shape_codazzi", tolerances::CRITICAL_CONDITION, "E_j(l_j) + sum (l_i - l_j) g(nabla_{E_i} E_i, E_j) = 0");
    let mut r35 = ReportBuilder::new("shape_ricci", tolerances::CRITICAL_CONDITION, "rho(E_j, N) = E_j(sum l_i)");
    for (a, b) in values {
        for (r, v) in [(&mut r19, a), (&mut r35, b)] {
            match v {
                Ok(Some(x)) => r.push(x),
                Ok(None) => {
                    r.skip();
                    r.flag();
                }
                Err(_) => r.skip(),
            }
        }
    }
    (r19.finish(), r35.finish())
}
