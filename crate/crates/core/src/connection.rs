//! Levi-Civita connection of the round sphere via the Gauss formula,
//! Lie brackets, the curvature tensor and Ricci contraction.
//!
//! Conventions: R(A,B)C = ∇_A∇_B C − ∇_B∇_A C − ∇_{[A,B]}C and
//! ρ(u,v) = Σᵢ g(R(Eᵢ,u)v, Eᵢ), which gives Q = (m−1)·Id on the unit
//! sphere and hence QZ = 2nZ for every Reeb field.

use crate::error::{GeometryError, Result};
use crate::field::{directional_vec, to_dvector, CovariantDerivativeField, ProjectedConstant, VectorField};
use crate::sphere::{check_base, gram_schmidt_frame, metric, project, SpherePoint, TangentVector};

/// ∇_u V = P_p(D_u Ṽ).
pub fn cov_deriv<V: VectorField>(field: &V, u: &TangentVector) -> Result<TangentVector> {
    if !field.is_tangent() {
        return Err(GeometryError::NotTangent);
    }
    let p = u.base();
    let d = directional_vec(field, p.as_slice(), u.as_slice());
    Ok(project(p, &to_dvector(d)))
}

/// [V,W](p) = D_V W − D_W V.
pub fn lie_bracket<V: VectorField, W: VectorField>(v: &V, w: &W, p: &SpherePoint) -> TangentVector {
    let x = p.as_slice();
    let vp = v.eval::<f64>(x);
    let wp = w.eval::<f64>(x);
    let dvw = directional_vec(w, x, &vp);
    let dwv = directional_vec(v, x, &wp);
    let raw: Vec<f64> = dvw.iter().zip(&dwv).map(|(a, b)| a - b).collect();
    project(p, &to_dvector(raw))
}

/// R(u,v)w = g(v,w)u − g(u,w)v on the unit sphere.
pub fn curvature(u: &TangentVector, v: &TangentVector, w: &TangentVector) -> Result<TangentVector> {
    check_base(u, v)?;
    check_base(u, w)?;
    let a = metric(v, w)?;
    let b = metric(u, w)?;
    u.scaled(a).sub(&v.scaled(b))
}

/// R(u,v)w from second covariant derivatives of the projected-constant
/// extensions U, V, W.
pub fn curvature_numeric(u: &TangentVector, v: &TangentVector, w: &TangentVector) -> Result<TangentVector> {
    check_base(u, v)?;
    check_base(u, w)?;
    let fu = ProjectedConstant::extending(u);
    let fv = ProjectedConstant::extending(v);
    let fw = ProjectedConstant::extending(w);
    let nabla_v_w = CovariantDerivativeField { direction: &fv, field: &fw };
    let nabla_u_w = CovariantDerivativeField { direction: &fu, field: &fw };
    let first = cov_deriv(&nabla_v_w, u)?;
    let second = cov_deriv(&nabla_u_w, v)?;
    let bracket = lie_bracket(&fu, &fv, u.base());
    let third = cov_deriv(&fw, &bracket)?;
    first.sub(&second)?.sub(&third)
}

/// Frame-sum Ricci tensor ρ(u,v) = Σᵢ g(R(Eᵢ,u)v, Eᵢ).
pub fn ricci(u: &TangentVector, v: &TangentVector) -> Result<f64> {
    ricci_with(u, v, curvature)
}

/// Frame-sum Ricci tensor built on [`curvature_numeric`].
pub fn ricci_numeric(u: &TangentVector, v: &TangentVector) -> Result<f64> {
    ricci_with(u, v, curvature_numeric)
}

fn ricci_with(
    u: &TangentVector,
    v: &TangentVector,
    curv: fn(&TangentVector, &TangentVector, &TangentVector) -> Result<TangentVector>,
) -> Result<f64> {
    check_base(u, v)?;
    let frame = gram_schmidt_frame(u.base(), &[])?;
    let mut acc = 0.0;
    for e in frame.vectors() {
        acc += metric(&curv(e, u, v)?, e)?;
    }
    Ok(acc)
}

/// ρ = (m−1)g on the unit sphere.
pub fn ricci_analytic(u: &TangentVector, v: &TangentVector) -> Result<f64> {
    let m = u.base().dim() as f64;
    Ok((m - 1.0) * metric(u, v)?)
}

/// The Ricci endomorphism Q with ρ(A,B) = g(QA,B).
pub fn ricci_operator(u: &TangentVector) -> Result<TangentVector> {
    let frame = gram_schmidt_frame(u.base(), &[])?;
    let mut out = TangentVector::zero(u.base());
    for e in frame.vectors() {
        out = out.add(&e.scaled(ricci(u, e)?))?;
    }
    Ok(out)
}
