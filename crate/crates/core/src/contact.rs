//! Contact metric structures on S^{2n+1} generated by an orthogonal complex
//! structure J̃ of R^{2n+2}: Z(p) = J̃p, α = g(·, Z), φu = σ(J̃u + α(u)p).
//!
//! The exterior derivative convention is dα(A,B) = Aα(B) − Bα(A) − α([A,B])
//! (no ½). The sign σ is selected once at build time so that
//! dα(A,B) = 2g(A,φB) holds; with this convention it comes out as σ = −1,
//! which also makes ∇Z = −φ.

use serde::{Deserialize, Serialize};

use crate::connection::{cov_deriv, lie_bracket, ricci_operator};
use crate::dual::Scalar;
use crate::error::{GeometryError, Result};
use crate::field::{directional_scalar, dot, InnerProduct, LinearField, ProjectedConstant, VectorField};
use crate::par::par_map;
use crate::report::{ReportBuilder, ResidualReport};
use crate::sphere::{gram_schmidt_frame, metric, probe_rng, project, random_tangent, sample_points, OrthoComplexStructure, SpherePoint, TangentVector};
use crate::tolerances;

/// Probe tangent vectors drawn per point by the checkers.
const PROBES: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct ContactMetricStructure {
    generator: OrthoComplexStructure,
    sigma: f64,
    n: usize,
    reeb: LinearField,
}

/// Reproducible JSON descriptor `{dimension, J_matrix, sigma}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureDescriptor {
    pub dimension: usize,
    #[serde(rename = "J_matrix")]
    pub j_matrix: Vec<Vec<f64>>,
    pub sigma: f64,
}

impl ContactMetricStructure {
    /// Builds the structure, choosing σ so that axiom iii) holds, then
    /// verifies axioms i)–iii) and the Killing property at 200 points.
    pub fn build_from_complex_structure(generator: OrthoComplexStructure) -> Result<Self> {
        let d = generator.ambient_dim();
        let probe = sample_points(d - 1, 20, 0x5157, None)?;
        let mut chosen = None;
        for sigma in [1.0, -1.0] {
            let s = Self::with_sigma(generator.clone(), sigma)?;
            if check_axiom_iii(&s, &probe).pass {
                chosen = Some(s);
                break;
            }
        }
        let s = chosen.ok_or_else(|| {
            GeometryError::Construction("neither orientation of phi satisfies d alpha = 2 g(., phi .)".into())
        })?;
        let pts = sample_points(d - 1, 200, 0xc0_47ac7, None)?;
        for r in [check_axiom_volume(&s, &pts), check_axiom_ii(&s, &pts), check_axiom_iii(&s, &pts), check_kcontact(&s, &pts)] {
            if !r.pass {
                return Err(GeometryError::Construction(format!("{} failed with max residual {:e}", r.check_name, r.max)));
            }
        }
        Ok(s)
    }

    /// A structure with an explicit σ; no axiom checks are run.
    pub fn with_sigma(generator: OrthoComplexStructure, sigma: f64) -> Result<Self> {
        if sigma != 1.0 && sigma != -1.0 {
            return Err(GeometryError::Construction(format!("sigma must be ±1, got {sigma}")));
        }
        let d = generator.ambient_dim();
        if d < 4 {
            return Err(GeometryError::UnsupportedDimension(d.saturating_sub(1)));
        }
        let reeb = LinearField::new(generator.matrix().clone());
        Ok(ContactMetricStructure { generator, sigma, n: (d - 2) / 2, reeb })
    }

    pub fn from_descriptor(desc: &StructureDescriptor) -> Result<Self> {
        let d = desc.j_matrix.len();
        if desc.dimension + 1 != d {
            return Err(GeometryError::DimensionMismatch { expected: desc.dimension + 1, got: d });
        }
        let flat: Vec<f64> = desc.j_matrix.iter().flatten().copied().collect();
        if flat.len() != d * d {
            return Err(GeometryError::Construction("J_matrix must be square".into()));
        }
        let j = OrthoComplexStructure::new(nalgebra::DMatrix::from_row_slice(d, d, &flat))?;
        let s = Self::with_sigma(j, desc.sigma)?;
        let pts = sample_points(d - 1, 20, 0x5157, None)?;
        if !check_axiom_iii(&s, &pts).pass {
            return Err(GeometryError::Construction("descriptor sigma violates axiom iii".into()));
        }
        Ok(s)
    }

    pub fn descriptor(&self) -> StructureDescriptor {
        let m = self.generator.matrix();
        StructureDescriptor {
            dimension: self.dim(),
            j_matrix: (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect(),
            sigma: self.sigma,
        }
    }

    pub fn generator(&self) -> &OrthoComplexStructure {
        &self.generator
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// n, with manifold dimension 2n+1.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    /// The Reeb field p ↦ J̃p.
    pub fn reeb(&self) -> &LinearField {
        &self.reeb
    }

    pub fn reeb_at(&self, p: &SpherePoint) -> TangentVector {
        self.reeb.at(p)
    }

    /// α(u) = g(u, Z).
    pub fn alpha(&self, u: &TangentVector) -> f64 {
        u.vec().dot(&self.generator.apply_f64(u.base().coords()))
    }

    /// φu = σ(J̃u + α(u)p).
    pub fn phi(&self, u: &TangentVector) -> TangentVector {
        let p = u.base();
        let v = (self.generator.apply_f64(u.vec()) + p.coords() * self.alpha(u)) * self.sigma;
        project(p, &v)
    }

    /// φ at an arbitrary (possibly dual) point, applied to `w`.
    pub fn phi_ext<S: Scalar>(&self, x: &[S], w: &[S]) -> Vec<S> {
        let jw = self.generator.apply(w);
        let jx = self.generator.apply(x);
        let a = dot(w, &jx) / dot(x, x);
        jw.iter().zip(x).map(|(&u, &xi)| (u + a * xi).scale(self.sigma)).collect()
    }

    /// dα(u,v), from the bracket formula with projected-constant extensions.
    pub fn d_alpha(&self, u: &TangentVector, v: &TangentVector) -> f64 {
        exterior_derivative(&self.reeb, u, v)
    }
}

/// q ↦ φ_q(W(q)).
pub struct PhiField<'a, W> {
    pub structure: &'a ContactMetricStructure,
    pub field: W,
}

impl<W: VectorField> VectorField for PhiField<'_, W> {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        self.structure.phi_ext(x, &self.field.eval(x))
    }
    fn is_tangent(&self) -> bool {
        true
    }
}

/// dω(u,v) = u(ω(Ṽ)) − v(ω(Ũ)) − ω([Ũ,Ṽ]) for the 1-form ω = ⟨covector(q), ·⟩.
pub fn exterior_derivative<A: VectorField>(covector: &A, u: &TangentVector, v: &TangentVector) -> f64 {
    let p = u.base();
    let eu = ProjectedConstant::extending(u);
    let ev = ProjectedConstant::extending(v);
    let x = p.as_slice();
    let u_of_wv = directional_scalar(&InnerProduct(covector, &ev), x, u.as_slice());
    let v_of_wu = directional_scalar(&InnerProduct(covector, &eu), x, v.as_slice());
    let bracket = lie_bracket(&eu, &ev, p);
    let a = covector.eval::<f64>(x);
    u_of_wv - v_of_wu - dot(&a, bracket.as_slice())
}

/// Pfaffian of a skew matrix given as nested rows (even size).
fn pfaffian(a: &[Vec<f64>]) -> f64 {
    let k = a.len();
    if k == 0 {
        return 1.0;
    }
    if k % 2 == 1 {
        return 0.0;
    }
    let mut acc = 0.0;
    for j in 1..k {
        if a[0][j] == 0.0 {
            continue;
        }
        let keep: Vec<usize> = (1..k).filter(|&i| i != j).collect();
        let minor: Vec<Vec<f64>> = keep.iter().map(|&r| keep.iter().map(|&c| a[r][c]).collect()).collect();
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * a[0][j] * pfaffian(&minor);
    }
    acc
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// (ω ∧ (dω)ⁿ)(e₁,…,e_m) on the given vectors, normalized so that an adapted
/// orthonormal frame of a contact metric structure gives ±n!·2ⁿ.
pub fn volume_form_value<A: VectorField>(covector: &A, frame: &[TangentVector]) -> f64 {
    let m = frame.len();
    let x = frame[0].base().as_slice();
    let a = covector.eval::<f64>(x);
    let omega: Vec<f64> = frame.iter().map(|e| dot(&a, e.as_slice())).collect();
    let mut d = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let v = exterior_derivative(covector, &frame[i], &frame[j]);
            d[i][j] = v;
            d[j][i] = -v;
        }
    }
    let n = (m - 1) / 2;
    let mut acc = 0.0;
    for i in 0..m {
        if omega[i] == 0.0 {
            continue;
        }
        let keep: Vec<usize> = (0..m).filter(|&r| r != i).collect();
        let minor: Vec<Vec<f64>> = keep.iter().map(|&r| keep.iter().map(|&c| d[r][c]).collect()).collect();
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * omega[i] * pfaffian(&minor);
    }
    acc * factorial(n)
}

/// n!·2ⁿ, the magnitude of α∧(dα)ⁿ on oriented orthonormal frames.
pub fn volume_golden(n: usize) -> f64 {
    factorial(n) * 2f64.powi(n as i32)
}

/// Axiom i) for an arbitrary 1-form: the normalized value v/c must stay
/// within 0.5 of the sign seen at the first point.
pub fn volume_report<A: VectorField>(covector: &A, n: usize, points: &[SpherePoint], name: &str) -> ResidualReport {
    let golden = volume_golden(n);
    let values = par_map(points, |_, p| {
        let frame = gram_schmidt_frame(p, &[]).expect("canonical frame").oriented();
        volume_form_value(covector, frame.vectors()) / golden
    });
    let sign = values.first().map(|v| v.signum()).unwrap_or(1.0);
    let mut b = ReportBuilder::new(name, tolerances::VOLUME_BAND, "alpha wedge (d alpha)^n is a volume form");
    b.diagnostic("golden_magnitude", golden);
    b.diagnostic("sign", sign);
    let mut min_abs = f64::INFINITY;
    for v in values {
        min_abs = min_abs.min(v.abs());
        b.push((v - sign).abs());
    }
    b.diagnostic("min_normalized_abs", min_abs);
    b.finish()
}

pub fn check_axiom_volume(s: &ContactMetricStructure, points: &[SpherePoint]) -> ResidualReport {
    volume_report(s.reeb(), s.n(), points, "axiom_volume")
}

/// ‖φ²u + u − α(u)Z‖ over Z and random tangent probes.
pub fn check_axiom_ii(s: &ContactMetricStructure, points: &[SpherePoint]) -> ResidualReport {
    let values = par_map(points, |i, p| {
        let mut rng = probe_rng(i);
        let mut probes: Vec<TangentVector> = (0..PROBES).map(|_| random_tangent(p, &mut rng)).collect();
        probes.push(s.reeb_at(p));
        let z = s.reeb_at(p);
        probes
            .iter()
            .map(|u| {
                let lhs = s.phi(&s.phi(u));
                let rhs = z.scaled(s.alpha(u)).sub(u).expect("same base");
                lhs.sub(&rhs).expect("same base").norm()
            })
            .fold(0.0, f64::max)
    });
    let mut b = ReportBuilder::new("axiom_ii", tolerances::AXIOM_II, "phi^2 A = -A + alpha(A) Z");
    values.into_iter().for_each(|v| b.push(v));
    b.finish()
}

/// |dα(u,v) − 2g(u,φv)| over random probe pairs (and the diagonal).
pub fn check_axiom_iii(s: &ContactMetricStructure, points: &[SpherePoint]) -> ResidualReport {
    let values = par_map(points, |i, p| {
        let mut rng = probe_rng(i);
        let probes: Vec<TangentVector> = (0..PROBES).map(|_| random_tangent(p, &mut rng)).collect();
        let mut worst: f64 = 0.0;
        for u in &probes {
            for v in &probes {
                let r = s.d_alpha(u, v) - 2.0 * metric(u, &s.phi(v)).expect("same base");
                worst = worst.max(r.abs());
            }
        }
        worst
    });
    let mut b = ReportBuilder::new("axiom_iii", tolerances::AXIOM_III, "d alpha(A,B) = 2 g(A, phi B)");
    values.into_iter().for_each(|v| b.push(v));
    b.finish()
}

/// |g(∇_u W, v) + g(u, ∇_v W)| for any tangent field W.
pub fn killing_residual<W: VectorField>(field: &W, points: &[SpherePoint], name: &str) -> ResidualReport {
    let values = par_map(points, |i, p| {
        let mut rng = probe_rng(i);
        let probes: Vec<TangentVector> = (0..PROBES).map(|_| random_tangent(p, &mut rng)).collect();
        let grads: Vec<TangentVector> = probes.iter().map(|u| cov_deriv(field, u).expect("tangent field")).collect();
        let mut worst: f64 = 0.0;
        for (u, du) in probes.iter().zip(&grads) {
            for (v, dv) in probes.iter().zip(&grads) {
                let r = metric(du, v).unwrap() + metric(u, dv).unwrap();
                worst = worst.max(r.abs());
            }
        }
        worst
    });
    let mut b = ReportBuilder::new(name, tolerances::KILLING, "Reeb field is an infinitesimal isometry");
    values.into_iter().for_each(|v| b.push(v));
    b.finish()
}

pub fn check_kcontact(s: &ContactMetricStructure, points: &[SpherePoint]) -> ResidualReport {
    killing_residual(s.reeb(), points, "kcontact")
}

/// (∇_u φ)v = ∇_u(φṼ) − φ(∇_u Ṽ).
pub fn phi_derivative(s: &ContactMetricStructure, u: &TangentVector, v: &TangentVector) -> TangentVector {
    let ext = ProjectedConstant::extending(v);
    let phi_v = PhiField { structure: s, field: &ext };
    let a = cov_deriv(&phi_v, u).expect("tangent");
    let b = s.phi(&cov_deriv(&ext, u).expect("tangent"));
    a.sub(&b).expect("same base")
}

/// ‖(∇_uφ)v − (g(u,v)Z − α(v)u)‖.
pub fn check_sasakian(s: &ContactMetricStructure, points: &[SpherePoint]) -> ResidualReport {
    let values = par_map(points, |i, p| {
        let mut rng = probe_rng(i);
        let mut probes: Vec<TangentVector> = (0..PROBES).map(|_| random_tangent(p, &mut rng)).collect();
        let z = s.reeb_at(p);
        probes.push(z.clone());
        let mut worst: f64 = 0.0;
        for u in &probes {
            for v in &probes {
                let lhs = phi_derivative(s, u, v);
                let rhs = z.scaled(metric(u, v).unwrap()).sub(&u.scaled(s.alpha(v))).unwrap();
                worst = worst.max(lhs.sub(&rhs).unwrap().norm());
            }
        }
        worst
    });
    let mut b = ReportBuilder::new("sasakian", tolerances::SASAKIAN, "(nabla_A phi)B = g(A,B)Z - alpha(B)A");
    values.into_iter().for_each(|v| b.push(v));
    b.finish()
}

/// |g(φu,v) + g(u,φv)|.
pub fn check_phi_skew(s: &ContactMetricStructure, points: &[SpherePoint]) -> ResidualReport {
    let values = par_map(points, |i, p| {
        let mut rng = probe_rng(i);
        let u = random_tangent(p, &mut rng);
        let v = random_tangent(p, &mut rng);
        (metric(&s.phi(&u), &v).unwrap() + metric(&u, &s.phi(&v)).unwrap()).abs()
    });
    let mut b = ReportBuilder::new("phi_skew", tolerances::AXIOM_II, "phi is metric-skew");
    values.into_iter().for_each(|v| b.push(v));
    b.finish()
}

/// max|QZ − 2nZ| componentwise.
pub fn check_reeb_ricci(s: &ContactMetricStructure, points: &[SpherePoint]) -> ResidualReport {
    let two_n = 2.0 * s.n() as f64;
    let values = par_map(points, |_, p| {
        let z = s.reeb_at(p);
        ricci_operator(&z).unwrap().sub(&z.scaled(two_n)).unwrap().amax()
    });
    let mut b = ReportBuilder::new("reeb_ricci", tolerances::RICCI, "QZ = 2nZ");
    values.into_iter().for_each(|v| b.push(v));
    b.finish()
}

/// max|Qφu − φQu| componentwise over random probes.
pub fn check_ricci_commutes(s: &ContactMetricStructure, points: &[SpherePoint]) -> ResidualReport {
    let values = par_map(points, |i, p| {
        let mut rng = probe_rng(i);
        (0..PROBES)
            .map(|_| {
                let u = random_tangent(p, &mut rng);
                let a = ricci_operator(&s.phi(&u)).unwrap();
                let b = s.phi(&ricci_operator(&u).unwrap());
                a.sub(&b).unwrap().amax()
            })
            .fold(0.0, f64::max)
    });
    let mut b = ReportBuilder::new("ricci_commutes_phi", tolerances::RICCI, "Q phi = phi Q");
    values.into_iter().for_each(|v| b.push(v));
    b.finish()
}

/// Projected constant as a (non-Killing) negative control field.
pub fn projected_constant_field(c: &[f64]) -> ProjectedConstant {
    ProjectedConstant::new(c.to_vec())
}
