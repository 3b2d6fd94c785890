//! Double K-contact pairs (α, Z, β, X) on S^{2n+1} sharing the round metric,
//! the angle function f = g(X, Z), and the identities it satisfies.
//!
//! Naming: `J` is the transverse structure of α (φ_α) and `φ` that of β
//! (φ_β). With this pairing ∇f = 2JX = 2φZ, and ℋ is the orthogonal
//! complement of {Z, X, JX}.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::calculus::{check_transnormal, gradient, hessian, laplacian, TransnormalProfile};
use crate::connection::{lie_bracket, ricci, ricci_operator};
use crate::contact::{check_sasakian, ContactMetricStructure, PhiField};
use crate::dual::Scalar;
use crate::error::{GeometryError, Result};
use crate::field::{dot, ScalarField};
use crate::par::par_map;
use crate::report::{ReportBuilder, ResidualReport};
use crate::sphere::{complement_basis, gram_deviation, matvec, metric, probe_rng, random_tangent, OrthoComplexStructure, SpherePoint, TangentVector};
use crate::tolerances;

/// Distance from ±1 at which the angle function counts as critical.
const CRITICAL_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct DoubleKContact {
    alpha: ContactMetricStructure,
    beta: ContactMetricStructure,
    degenerate: bool,
    experimental: bool,
}

/// JSON descriptor `{dimension, J1_blocks, J2_blocks}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDescriptor {
    pub dimension: usize,
    #[serde(rename = "J1_blocks")]
    pub j1_blocks: Vec<i8>,
    #[serde(rename = "J2_blocks")]
    pub j2_blocks: Vec<i8>,
}

impl PairDescriptor {
    pub fn build(&self) -> Result<DoubleKContact> {
        if self.j1_blocks.len() != self.j2_blocks.len() || 2 * self.j1_blocks.len() != self.dimension + 1 {
            return Err(GeometryError::DimensionMismatch { expected: self.dimension + 1, got: 2 * self.j1_blocks.len() });
        }
        make_double(
            OrthoComplexStructure::from_blocks(&self.j1_blocks)?,
            OrthoComplexStructure::from_blocks(&self.j2_blocks)?,
        )
    }
}

/// Builds the pair from commuting generators J̃₁ (for α) and J̃₂ (for β).
pub fn make_double(j1: OrthoComplexStructure, j2: OrthoComplexStructure) -> Result<DoubleKContact> {
    if j1.ambient_dim() != j2.ambient_dim() {
        return Err(GeometryError::DimensionMismatch { expected: j1.ambient_dim(), got: j2.ambient_dim() });
    }
    if !j1.commutes_with(&j2, 1e-12) {
        return Err(GeometryError::Construction("generators do not commute, Reeb fields would not commute".into()));
    }
    let degenerate = j1 == j2;
    let experimental = j1.blocks().is_none() || j2.blocks().is_none();
    let alpha = ContactMetricStructure::build_from_complex_structure(j1)?;
    let beta = ContactMetricStructure::build_from_complex_structure(j2)?;
    Ok(DoubleKContact { alpha, beta, degenerate, experimental })
}

impl DoubleKContact {
    pub fn alpha(&self) -> &ContactMetricStructure {
        &self.alpha
    }

    pub fn beta(&self) -> &ContactMetricStructure {
        &self.beta
    }

    pub fn dim(&self) -> usize {
        self.alpha.dim()
    }

    pub fn n(&self) -> usize {
        self.alpha.n()
    }

    /// X = Z: the angle function is identically 1.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Generators outside the block-diagonal family.
    pub fn is_experimental(&self) -> bool {
        self.experimental
    }

    pub fn descriptor(&self) -> Option<PairDescriptor> {
        Some(PairDescriptor {
            dimension: self.dim(),
            j1_blocks: self.alpha.generator().blocks()?,
            j2_blocks: self.beta.generator().blocks()?,
        })
    }

    pub fn angle_function(&self) -> AngleFunction {
        AngleFunction {
            j1: self.alpha.generator().matrix().clone(),
            j2: self.beta.generator().matrix().clone(),
        }
    }

    pub fn z(&self, p: &SpherePoint) -> TangentVector {
        self.alpha.reeb_at(p)
    }

    pub fn x(&self, p: &SpherePoint) -> TangentVector {
        self.beta.reeb_at(p)
    }

    /// J = φ_α.
    pub fn j(&self, u: &TangentVector) -> TangentVector {
        self.alpha.phi(u)
    }

    /// φ = φ_β.
    pub fn phi(&self, u: &TangentVector) -> TangentVector {
        self.beta.phi(u)
    }

    /// JX = φ_α X, half the gradient of f.
    pub fn jx(&self, p: &SpherePoint) -> TangentVector {
        self.j(&self.x(p))
    }

    /// The field q ↦ φ_α(X(q)).
    pub fn jx_field(&self) -> PhiField<'_, &crate::field::LinearField> {
        PhiField { structure: &self.alpha, field: self.beta.reeb() }
    }

    /// JφE.
    pub fn j_phi(&self, u: &TangentVector) -> TangentVector {
        self.j(&self.phi(u))
    }

    /// φJE.
    pub fn phi_j(&self, u: &TangentVector) -> TangentVector {
        self.phi(&self.j(u))
    }

    pub fn is_regular(&self, p: &SpherePoint) -> bool {
        self.angle_function().value(p).abs() < 1.0 - CRITICAL_MARGIN
    }
}

/// f(p) = ⟨J̃₂p, J̃₁p⟩ = g(X, Z).
#[derive(Clone, Debug)]
pub struct AngleFunction {
    j1: DMatrix<f64>,
    j2: DMatrix<f64>,
}

impl ScalarField for AngleFunction {
    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        dot(&matvec(&self.j2, x), &matvec(&self.j1, x))
    }
    fn label(&self) -> String {
        "angle".into()
    }
}

/// Orthonormal basis of ℋ = {Z, X, JX}^⊥ at a point.
#[derive(Clone, Debug)]
pub struct HBundleBasis {
    base: SpherePoint,
    vectors: Vec<TangentVector>,
}

impl HBundleBasis {
    pub fn base(&self) -> &SpherePoint {
        &self.base
    }

    pub fn vectors(&self) -> &[TangentVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// The same subspace in another orthonormal basis (random rotation).
    pub fn rotated(&self, rng: &mut rand_chacha::ChaCha8Rng) -> HBundleBasis {
        let k = self.vectors.len();
        if k == 0 {
            return self.clone();
        }
        let g = DMatrix::from_fn(k, k, |_, _| rng.sample::<f64, _>(StandardNormal));
        let q = g.qr().q();
        let vectors = (0..k)
            .map(|j| {
                let mut acc = TangentVector::zero(&self.base);
                for i in 0..k {
                    acc = acc.add(&self.vectors[i].scaled(q[(i, j)])).unwrap();
                }
                acc
            })
            .collect();
        HBundleBasis { base: self.base.clone(), vectors }
    }
}

/// Canonical orthonormal basis of ℋ at `p` (projected ambient basis vectors
/// in index order).
pub fn hbundle_basis(d: &DoubleKContact, p: &SpherePoint) -> Result<HBundleBasis> {
    let f = d.angle_function().value(p);
    if f.abs() >= 1.0 - CRITICAL_MARGIN {
        return Err(GeometryError::Regularity { norm: (4.0 * (1.0 - f * f)).max(0.0).sqrt() });
    }
    let span = [d.z(p), d.x(p), d.jx(p)];
    let vectors = complement_basis(p, &span);
    if vectors.len() != 2 * d.n() - 2 {
        return Err(GeometryError::Regularity { norm: d.jx(p).norm() });
    }
    Ok(HBundleBasis { base: p.clone(), vectors })
}

/// Σ g(JφEᵢ, Eᵢ) over a basis of ℋ.
pub fn j_phi_trace(d: &DoubleKContact, basis: &HBundleBasis) -> f64 {
    basis.vectors().iter().map(|e| metric(&d.j_phi(e), e).unwrap()).sum()
}

/// Residuals of ∇f = 2·φ_α(X) and ∇f = 2·φ_β(Z).
#[derive(Clone, Debug)]
pub struct GradientIdentity {
    pub via_phi_alpha: ResidualReport,
    pub via_phi_beta: ResidualReport,
}

impl GradientIdentity {
    /// The better of the two pairings under the combined check name.
    pub fn combined(&self) -> ResidualReport {
        let best = if self.via_phi_alpha.max <= self.via_phi_beta.max { &self.via_phi_alpha } else { &self.via_phi_beta };
        let mut r = best.clone().renamed("gradient_identity");
        r.diagnostics.insert("max_via_phi_alpha_X".into(), self.via_phi_alpha.max);
        r.diagnostics.insert("max_via_phi_beta_Z".into(), self.via_phi_beta.max);
        r
    }
}

pub fn gradient_identity_check(d: &DoubleKContact, points: &[SpherePoint]) -> GradientIdentity {
    let f = d.angle_function();
    let values = par_map(points, |_, p| {
        let g = gradient(&f, p);
        let a = g.sub(&d.alpha.phi(&d.x(p)).scaled(2.0)).unwrap().norm();
        let b = g.sub(&d.beta.phi(&d.z(p)).scaled(2.0)).unwrap().norm();
        (a, b)
    });
    let mut ra = ReportBuilder::new("gradient_identity[phi_alpha(X)]", tolerances::GRADIENT_IDENTITY, "grad f = 2JX");
    let mut rb = ReportBuilder::new("gradient_identity[phi_beta(Z)]", tolerances::GRADIENT_IDENTITY, "grad f = 2 phi Z");
    for (a, b) in values {
        ra.push(a);
        rb.push(b);
    }
    GradientIdentity { via_phi_alpha: ra.finish(), via_phi_beta: rb.finish() }
}

/// ‖[X,Z]‖ per point.
pub fn check_reeb_bracket(d: &DoubleKContact, points: &[SpherePoint]) -> ResidualReport {
    let values = par_map(points, |_, p| lie_bracket(d.alpha.reeb(), d.beta.reeb(), p).norm());
    let mut b = ReportBuilder::new("reeb_bracket", tolerances::BRACKET, "commuting Reeb vector fields");
    values.into_iter().for_each(|v| b.push(v));
    b.finish()
}

/// ‖∇f‖² = 4(1 − f²).
pub fn transnormal_b_check(d: &DoubleKContact, points: &[SpherePoint]) -> ResidualReport {
    check_transnormal(&d.angle_function(), &TransnormalProfile::angle(), points)
        .renamed("transnormal")
}

/// Residual of Δf = (4n+4)f + 2Σ g(JφEᵢ,Eᵢ), plus a second report on the
/// basis independence of the trace term.
pub fn laplacian_formula_check(d: &DoubleKContact, points: &[SpherePoint]) -> (ResidualReport, ResidualReport) {
    let f = d.angle_function();
    let coeff = 4.0 * d.n() as f64 + 4.0;
    let values = par_map(points, |i, p| {
        let basis = hbundle_basis(d, p).ok()?;
        let trace = j_phi_trace(d, &basis);
        let other = j_phi_trace(d, &basis.rotated(&mut probe_rng(i)));
        let r = (laplacian(&f, p) - coeff * f.value(p) - 2.0 * trace).abs();
        Some((r, (trace - other).abs(), trace))
    });
    let mut main = ReportBuilder::new("laplacian_formula", tolerances::LAPLACIAN_FORMULA, "Laplacian f = (4n+4) f + 2 sum g(J phi E_i, E_i)");
    let mut frame = ReportBuilder::new("laplacian_trace_frame", tolerances::TRACE_FRAME, "trace term is basis independent");
    for v in values {
        match v {
            Some((r, fr, trace)) => {
                main.push(r);
                frame.push(fr);
                main.diagnostic_max("trace_max", trace);
                main.diagnostic_max("neg_trace_max", -trace);
            }
            None => {
                main.skip();
                frame.skip();
            }
        }
    }
    (main.finish(), frame.finish())
}

/// Δf = 8f in dimension 3; Δf = 12f + c₀ with constant |c₀| = 4 in dimension 5.
pub fn dim_theorem_check(d: &DoubleKContact, points: &[SpherePoint]) -> Result<ResidualReport> {
    let f = d.angle_function();
    let values: Vec<Option<(f64, f64)>> = par_map(points, |_, p| {
        let t = f.value(p);
        if t.abs() >= 1.0 - CRITICAL_MARGIN {
            None
        } else {
            Some((t, laplacian(&f, p)))
        }
    });
    match d.dim() {
        3 => {
            let mut b = ReportBuilder::new("dim_theorem", tolerances::DIM3_THEOREM, "Laplacian f = 8f on 3-manifolds");
            for v in values {
                match v {
                    Some((t, l)) => b.push((l - 8.0 * t).abs()),
                    None => b.skip(),
                }
            }
            Ok(b.finish())
        }
        5 => {
            let mut b = ReportBuilder::new("dim_theorem", tolerances::DIM5_THEOREM, "Laplacian f = 12f +- 4 on 5-manifolds");
            let c0 = values.iter().flatten().next().map(|(t, l)| l - 12.0 * t);
            if let Some(c0) = c0 {
                b.diagnostic("c0", c0);
            }
            for v in values {
                match (v, c0) {
                    (Some((t, l)), Some(c0)) => b.push((l - 12.0 * t - c0).abs().max((c0.abs() - 4.0).abs())),
                    _ => b.skip(),
                }
            }
            Ok(b.finish())
        }
        m => Err(GeometryError::UnsupportedDimension(m)),
    }
}

fn require_sasakian(d: &DoubleKContact) -> Result<()> {
    let pts = crate::sphere::sample_points(d.dim(), 20, 0x5a5a, None)?;
    let r = check_sasakian(&d.alpha, &pts);
    if r.pass {
        Ok(())
    } else {
        Err(GeometryError::Precondition(format!("alpha is not Sasakian (residual {:e})", r.max)))
    }
}

/// Lemma-4 spectrum data at one point.
#[derive(Clone, Debug)]
pub struct PhiJMatrix {
    /// Mᵢⱼ = g(φJ Eᵢ, Eⱼ).
    pub matrix: DMatrix<f64>,
    pub commutator: f64,
}

pub fn phi_j_matrix(d: &DoubleKContact, basis: &HBundleBasis) -> PhiJMatrix {
    let k = basis.len();
    let es = basis.vectors();
    let mut matrix = DMatrix::zeros(k, k);
    let mut commutator: f64 = 0.0;
    for i in 0..k {
        let pj = d.phi_j(&es[i]);
        let jp = d.j_phi(&es[i]);
        commutator = commutator.max(pj.sub(&jp).unwrap().norm());
        for j in 0..k {
            matrix[(i, j)] = metric(&pj, &es[j]).unwrap();
        }
    }
    PhiJMatrix { matrix, commutator }
}

/// On ℋ: φJ symmetric, φJ = Jφ, (φJ)² = Id and eigenvalues ±1. Returns
/// four reports (symmetry, commutation, square, spectrum).
pub fn lemma4_check(d: &DoubleKContact, points: &[SpherePoint]) -> Result<Vec<ResidualReport>> {
    require_sasakian(d)?;
    let values = par_map(points, |_, p| {
        let basis = hbundle_basis(d, p).ok()?;
        let PhiJMatrix { matrix, commutator } = phi_j_matrix(d, &basis);
        let k = matrix.nrows();
        if k == 0 {
            return Some((0.0, 0.0, 0.0, 0.0, 0usize));
        }
        let sym = (&matrix - matrix.transpose()).amax();
        let square = (&matrix * &matrix - DMatrix::identity(k, k)).amax();
        let eig = SymmetricEigen::new((&matrix + matrix.transpose()) * 0.5).eigenvalues;
        let spec = eig.iter().map(|l| (l - 1.0).abs().min((l + 1.0).abs())).fold(0.0, f64::max);
        let plus = eig.iter().filter(|l| **l > 0.0).count();
        Some((sym, commutator, square, spec, plus))
    });
    let prov = "phi J = J phi on H, symmetric, eigenvalues +-1";
    let mut sym = ReportBuilder::new("lemma4_symmetry", tolerances::LEMMA4_SYMMETRY, prov);
    let mut com = ReportBuilder::new("lemma4_commute", tolerances::LEMMA4_SYMMETRY, prov);
    let mut sq = ReportBuilder::new("lemma4_square", tolerances::LEMMA4_SYMMETRY, prov);
    let mut spec = ReportBuilder::new("lemma4_spectrum", tolerances::LEMMA4_SPECTRUM, prov);
    for v in values {
        match v {
            Some((a, b, c, e, plus)) => {
                sym.push(a);
                com.push(b);
                sq.push(c);
                spec.push(e);
                spec.diagnostic_max("plus_one_count_max", plus as f64);
                spec.diagnostic_max("neg_plus_one_count_min", -(plus as f64));
            }
            None => {
                sym.skip();
                com.skip();
                sq.skip();
                spec.skip();
            }
        }
    }
    Ok(vec![sym.finish(), com.finish(), sq.finish(), spec.finish()])
}

/// Hess_f(A,B) = −2α(X)g(A,B) − 2g(JφA,B) on ℋ×ℋ. The printed full-argument
/// form (with the 2g(A,X)g(Z,B) term) is evaluated on random tangent pairs
/// and only logged.
pub fn hess_formula_check(d: &DoubleKContact, points: &[SpherePoint]) -> Result<ResidualReport> {
    require_sasakian(d)?;
    let f = d.angle_function();
    let values = par_map(points, |i, p| {
        let basis = hbundle_basis(d, p).ok()?;
        let t = f.value(p);
        let es = basis.vectors();
        let mut worst: f64 = 0.0;
        let mut asym: f64 = 0.0;
        for a in es {
            for b in es {
                let rhs = -2.0 * t * metric(a, b).unwrap() - 2.0 * metric(&d.j_phi(a), b).unwrap();
                worst = worst.max((hessian(&f, a, b).unwrap() - rhs).abs());
                asym = asym.max((metric(&d.j_phi(a), b).unwrap() - metric(&d.j_phi(b), a).unwrap()).abs());
            }
        }
        let mut rng = probe_rng(i);
        let a = random_tangent(p, &mut rng);
        let b = random_tangent(p, &mut rng);
        let full = 2.0 * metric(&a, &d.x(p)).unwrap() * metric(&d.z(p), &b).unwrap()
            - 2.0 * t * metric(&a, &b).unwrap()
            - 2.0 * metric(&d.j_phi(&a), &b).unwrap();
        let full_res = (hessian(&f, &a, &b).unwrap() - full).abs();
        Some((worst, asym, full_res))
    });
    let mut b = ReportBuilder::new(
        "hess_formula",
        tolerances::HESS_FORMULA,
        "Hess f(A,B) = 2g(A,X)g(Z,B) - 2 alpha(X) g(A,B) - 2 g(J phi A, B), restricted to H",
    );
    for v in values {
        match v {
            Some((r, asym, full)) => {
                b.push(r);
                b.diagnostic_max("j_phi_asymmetry_on_H", asym);
                b.diagnostic_max("full_form_residual", full);
            }
            None => b.skip(),
        }
    }
    Ok(b.finish())
}

/// ρ(E, N) = 0 for E ⟂ N, and QJX = JQX. Returns both reports.
pub fn ricci_normal_check(d: &DoubleKContact, points: &[SpherePoint]) -> (ResidualReport, ResidualReport) {
    let f = d.angle_function();
    let values = par_map(points, |_, p| {
        let jx = d.jx(p);
        let commute = ricci_operator(&jx).unwrap().sub(&d.j(&ricci_operator(&d.x(p)).unwrap())).unwrap().amax();
        let normal = crate::calculus::normalized_gradient(&f, p).ok().map(|n| {
            let frame = crate::sphere::gram_schmidt_frame(p, std::slice::from_ref(&n)).unwrap();
            frame.vectors()[1..].iter().map(|e| ricci(e, &n).unwrap().abs()).fold(0.0, f64::max)
        });
        (normal, commute)
    });
    let mut rn = ReportBuilder::new("ricci_normal", tolerances::RICCI_NORMAL, "rho(E, N) = 0 for E orthogonal to N");
    let mut rc = ReportBuilder::new("ricci_commute", tolerances::RICCI_NORMAL, "QJX = JQX");
    for (normal, commute) in values {
        match normal {
            Some(v) => rn.push(v),
            None => rn.skip(),
        }
        rc.push(commute);
    }
    (rn.finish(), rc.finish())
}

/// Orthonormality and orthogonality-to-span residual of an ℋ basis.
pub fn hbundle_residual(d: &DoubleKContact, basis: &HBundleBasis) -> f64 {
    let p = basis.base();
    let span = [d.z(p), d.x(p), d.jx(p)];
    let orth = basis
        .vectors()
        .iter()
        .flat_map(|e| span.iter().map(move |s| metric(e, s).unwrap().abs()))
        .fold(0.0, f64::max);
    orth.max(gram_deviation(basis.vectors()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::sample_points;

    fn pair(b1: &[i8], b2: &[i8]) -> DoubleKContact {
        make_double(OrthoComplexStructure::from_blocks(b1).unwrap(), OrthoComplexStructure::from_blocks(b2).unwrap()).unwrap()
    }

    fn regular(d: &DoubleKContact, n: usize, seed: u64) -> Vec<SpherePoint> {
        let f = d.angle_function();
        sample_points(d.dim(), n, seed, Some(&move |p: &SpherePoint| f.value(p).abs() > 0.9)).unwrap()
    }

    #[test]
    fn angle_function_values() {
        let d = pair(&[1, 1], &[-1, 1]);
        let f = d.angle_function();
        assert_eq!(f.value(&SpherePoint::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap()), -1.0);
        assert_eq!(f.value(&SpherePoint::new(vec![0.0, 0.0, 1.0, 0.0]).unwrap()), 1.0);
        let d5 = pair(&[1, 1, 1], &[-1, 1, 1]);
        let p = SpherePoint::normalized(vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(d5.angle_function().value(&p).abs() < 1e-15);
    }

    #[test]
    fn non_commuting_generators_are_rejected() {
        let j1 = OrthoComplexStructure::from_blocks(&[1, 1]).unwrap();
        // a complex structure mixing the two planes
        let m = DMatrix::from_row_slice(4, 4, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let j2 = OrthoComplexStructure::new(m).unwrap();
        assert!(matches!(make_double(j1, j2), Err(GeometryError::Construction(_))));
    }

    #[test]
    fn degenerate_pair_is_flagged() {
        let d = pair(&[1, 1], &[1, 1]);
        assert!(d.is_degenerate());
        let pts = sample_points(3, 50, 1, None).unwrap();
        let f = d.angle_function();
        assert!(pts.iter().all(|p| (f.value(p) - 1.0).abs() < 1e-14));
        assert!(transnormal_b_check(&d, &pts).pass);
    }

    #[test]
    fn critical_locus_is_where_x_is_plus_minus_z() {
        let d = pair(&[1, 1], &[-1, 1]);
        for p in [SpherePoint::new(vec![0.6, 0.8, 0.0, 0.0]).unwrap(), SpherePoint::new(vec![0.0, 0.0, 0.8, -0.6]).unwrap()] {
            let f = d.angle_function().value(&p);
            assert!(f.abs() >= 1.0 - 1e-12);
            let diff = d.x(&p).sub(&d.z(&p).scaled(f.signum())).unwrap().norm();
            assert!(diff <= 1e-6);
            assert!(gradient(&d.angle_function(), &p).norm() < 1e-12);
        }
    }

    #[test]
    fn s3_hbundle_is_empty_and_s5_basis_is_orthogonal() {
        let d = pair(&[1, 1], &[-1, 1]);
        let p = SpherePoint::normalized(vec![1.0, 0.2, 1.0, 0.3]).unwrap();
        assert!(hbundle_basis(&d, &p).unwrap().is_empty());
        let d5 = pair(&[1, 1, 1], &[-1, 1, 1]);
        let p = SpherePoint::normalized(vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let b = hbundle_basis(&d5, &p).unwrap();
        assert_eq!(b.len(), 2);
        assert!(hbundle_residual(&d5, &b) < 1e-9);
        let crit = SpherePoint::new(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hbundle_basis(&d5, &crit), Err(GeometryError::Regularity { .. })));
    }

    #[test]
    fn s5_trace_term_is_minus_two() {
        let d5 = pair(&[1, 1, 1], &[-1, 1, 1]);
        for p in regular(&d5, 50, 3) {
            let b = hbundle_basis(&d5, &p).unwrap();
            assert!((j_phi_trace(&d5, &b) + 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn pair_checks_s3_s5() {
        for (b1, b2) in [(vec![1i8, 1], vec![-1i8, 1]), (vec![1, 1, 1], vec![-1, 1, 1])] {
            let d = pair(&b1, &b2);
            let pts = regular(&d, 100, 4);
            let gi = gradient_identity_check(&d, &pts);
            assert!(gi.via_phi_alpha.pass && gi.via_phi_beta.pass && gi.combined().pass);
            assert!(check_reeb_bracket(&d, &pts).max == 0.0);
            assert!(transnormal_b_check(&d, &pts).pass);
            let (l, fr) = laplacian_formula_check(&d, &pts);
            assert!(l.pass && fr.pass, "{l:?} {fr:?}");
            assert!(dim_theorem_check(&d, &pts).unwrap().pass);
            for r in lemma4_check(&d, &pts).unwrap() {
                assert!(r.pass, "{r:?}");
            }
            assert!(hess_formula_check(&d, &pts).unwrap().pass);
            let (rn, rc) = ricci_normal_check(&d, &pts);
            assert!(rn.pass && rc.pass);
        }
    }

    #[test]
    fn s5_constant_depends_on_sign_pattern() {
        let d = pair(&[1, 1, 1], &[-1, 1, 1]);
        let r = dim_theorem_check(&d, &regular(&d, 50, 5)).unwrap();
        assert!((r.diagnostics["c0"] + 4.0).abs() < 1e-9);
        let d = pair(&[1, 1, 1], &[-1, -1, 1]);
        let r = dim_theorem_check(&d, &regular(&d, 50, 5)).unwrap();
        assert!(r.pass);
        assert!((r.diagnostics["c0"] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn s5_hessian_on_h_is_two_minus_two_f() {
        let d = pair(&[1, 1, 1], &[-1, 1, 1]);
        let f = d.angle_function();
        for p in regular(&d, 20, 6) {
            let b = hbundle_basis(&d, &p).unwrap();
            let e = &b.vectors()[0];
            assert!((hessian(&f, e, e).unwrap() - (2.0 - 2.0 * f.value(&p))).abs() < 1e-9);
        }
    }

    #[test]
    fn s7_is_unsupported_for_dimension_theorem() {
        let d = pair(&[1, 1, 1, 1], &[-1, 1, 1, 1]);
        let pts = regular(&d, 5, 7);
        assert_eq!(dim_theorem_check(&d, &pts).unwrap_err(), GeometryError::UnsupportedDimension(7));
    }

    #[test]
    fn descriptor_round_trip() {
        let d = pair(&[1, 1, 1], &[-1, 1, 1]);
        let desc = d.descriptor().unwrap();
        assert_eq!(desc.j2_blocks, vec![-1, 1, 1]);
        let back: PairDescriptor = serde_json::from_str(&serde_json::to_string(&desc).unwrap()).unwrap();
        assert_eq!(back.build().unwrap().descriptor().unwrap(), desc);
    }
}
