//! Ambient-formula fields and the differentiation engine.
//!
//! Fields are defined by formulas on a neighbourhood of the sphere and
//! evaluated on any [`Scalar`]; directional derivatives seed one dual layer.
//! Tangential derivatives only see the restriction to the sphere, so the
//! choice of extension never leaks into intrinsic quantities.

use nalgebra::{DMatrix, DVector};

use crate::dual::{self, Dual, Scalar};
use crate::sphere::{matvec, project, SpherePoint, TangentVector};

/// A smooth scalar function near the sphere.
pub trait ScalarField: Sync {
    fn eval<S: Scalar>(&self, x: &[S]) -> S;

    fn label(&self) -> String {
        "scalar".into()
    }

    fn value(&self, p: &SpherePoint) -> f64 {
        self.eval::<f64>(p.as_slice())
    }
}

/// A smooth ambient vector field near the sphere.
pub trait VectorField: Sync {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S>;

    /// Whether the field is tangent to the sphere at unit points.
    fn is_tangent(&self) -> bool;

    /// The value at `p` as a tangent vector (projected to clean round-off).
    fn at(&self, p: &SpherePoint) -> TangentVector {
        project(p, &DVector::from_vec(self.eval::<f64>(p.as_slice())))
    }

    fn ambient_at(&self, p: &SpherePoint) -> DVector<f64> {
        DVector::from_vec(self.eval::<f64>(p.as_slice()))
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        (**self).eval(x)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

impl<T: VectorField + ?Sized> VectorField for &T {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        (**self).eval(x)
    }
    fn is_tangent(&self) -> bool {
        (**self).is_tangent()
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Tangential projection valid off the sphere: v − ⟨v,x⟩x/|x|².
pub fn project_ext<S: Scalar>(x: &[S], v: &[S]) -> Vec<S> {
    let c = dot(v, x) / dot(x, x);
    v.iter().zip(x).map(|(&vi, &xi)| vi - c * xi).collect()
}

pub fn basis<S: Scalar>(d: usize, k: usize) -> Vec<S> {
    (0..d).map(|i| S::cst(if i == k { 1.0 } else { 0.0 })).collect()
}

/// D_dir F at x.
pub fn directional_vec<F: VectorField, S: Scalar>(field: &F, x: &[S], dir: &[S]) -> Vec<S> {
    field.eval(&dual::seed(x, dir)).into_iter().map(|d: Dual<S>| d.eps).collect()
}

/// D_dir f at x.
pub fn directional_scalar<F: ScalarField, S: Scalar>(f: &F, x: &[S], dir: &[S]) -> S {
    f.eval(&dual::seed(x, dir)).eps
}

/// Ambient gradient of f (one dual pass per coordinate).
pub fn ambient_gradient<F: ScalarField, S: Scalar>(f: &F, x: &[S]) -> Vec<S> {
    (0..x.len()).map(|k| directional_scalar(f, x, &basis(x.len(), k))).collect()
}

/// Columns ∂F/∂x_k.
pub fn jacobian_columns<F: VectorField, S: Scalar>(field: &F, x: &[S]) -> Vec<Vec<S>> {
    (0..x.len()).map(|k| directional_vec(field, x, &basis(x.len(), k))).collect()
}

/// Central finite difference D_dir F (step h), the cross-check oracle for
/// the dual-number path.
pub fn central_difference<F: VectorField>(field: &F, x: &[f64], dir: &[f64], h: f64) -> Vec<f64> {
    let plus: Vec<f64> = x.iter().zip(dir).map(|(a, b)| a + h * b).collect();
    let minus: Vec<f64> = x.iter().zip(dir).map(|(a, b)| a - h * b).collect();
    let fp = field.eval::<f64>(&plus);
    let fm = field.eval::<f64>(&minus);
    fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

pub(crate) fn to_dvector(v: Vec<f64>) -> DVector<f64> {
    DVector::from_vec(v)
}

/// p ↦ M p. Tangent exactly when M is skew.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearField {
    matrix: DMatrix<f64>,
    tangent: bool,
}

impl LinearField {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        let tangent = (matrix.transpose() + &matrix).amax() <= 1e-12;
        LinearField { matrix, tangent }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

impl VectorField for LinearField {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        matvec(&self.matrix, x)
    }
    fn is_tangent(&self) -> bool {
        self.tangent
    }
}

/// q ↦ P_q c, the tangential part of a constant vector.
#[derive(Clone, Debug)]
pub struct ProjectedConstant {
    c: Vec<f64>,
}

impl ProjectedConstant {
    pub fn new(c: Vec<f64>) -> Self {
        ProjectedConstant { c }
    }

    /// Tangent extension of a single tangent vector.
    pub fn extending(v: &TangentVector) -> Self {
        ProjectedConstant { c: v.as_slice().to_vec() }
    }
}

impl VectorField for ProjectedConstant {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        project_ext(x, &dual::to_scalar::<S>(&self.c))
    }
    fn is_tangent(&self) -> bool {
        true
    }
}

/// q ↦ f(q)·V(q).
pub struct ScaledField<F, V> {
    pub scale: F,
    pub field: V,
}

impl<F: ScalarField, V: VectorField> VectorField for ScaledField<F, V> {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let s = self.scale.eval(x);
        self.field.eval(x).into_iter().map(|v| v * s).collect()
    }
    fn is_tangent(&self) -> bool {
        self.field.is_tangent()
    }
}

/// q ↦ V(q)/|V(q)|.
pub struct Normalized<V>(pub V);

impl<V: VectorField> VectorField for Normalized<V> {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let v = self.0.eval(x);
        let n = dot(&v, &v).sqrt();
        v.into_iter().map(|c| c / n).collect()
    }
    fn is_tangent(&self) -> bool {
        self.0.is_tangent()
    }
}

/// q ↦ ⟨V(q), W(q)⟩.
pub struct InnerProduct<V, W>(pub V, pub W);

impl<V: VectorField, W: VectorField> ScalarField for InnerProduct<V, W> {
    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        dot(&self.0.eval(x), &self.1.eval(x))
    }
    fn label(&self) -> String {
        "inner_product".into()
    }
}

/// A constant function.
#[derive(Clone, Copy, Debug)]
pub struct Constant(pub f64);

impl ScalarField for Constant {
    fn eval<S: Scalar>(&self, _x: &[S]) -> S {
        S::cst(self.0)
    }
    fn label(&self) -> String {
        format!("constant({})", self.0)
    }
}

/// xᵀAx + b·x + c. Covers height functions, the angle functions, harmonic
/// quadratics and the non-transnormal control x₁ + x₁x₂.
#[derive(Clone, Debug)]
pub struct Quadratic {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: f64,
    label: String,
}

impl Quadratic {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: f64, label: impl Into<String>) -> Self {
        let sym = (&a + a.transpose()) * 0.5;
        Quadratic { a: sym, b, c, label: label.into() }
    }

    /// The coordinate function x_k on S^{d-1}.
    pub fn height(d: usize, k: usize) -> Self {
        let mut b = DVector::zeros(d);
        b[k] = 1.0;
        Quadratic::new(DMatrix::zeros(d, d), b, 0.0, format!("height_x{}", k + 1))
    }

    /// x₁ + x₁x₂ in the first two ambient coordinates.
    pub fn non_transnormal(d: usize) -> Self {
        let mut a = DMatrix::zeros(d, d);
        a[(0, 1)] = 0.5;
        a[(1, 0)] = 0.5;
        let mut b = DVector::zeros(d);
        b[0] = 1.0;
        Quadratic::new(a, b, 0.0, "x1_plus_x1x2")
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }
}

impl ScalarField for Quadratic {
    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        let ax = matvec(&self.a, x);
        let mut acc = dot(x, &ax) + S::cst(self.c);
        for (&xi, &bi) in x.iter().zip(self.b.iter()) {
            if bi != 0.0 {
                acc += xi.scale(bi);
            }
        }
        acc
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// q ↦ P_q ∇̃f(q), the Riemannian gradient of f as a field.
pub struct GradientField<F>(pub F);

impl<F: ScalarField> VectorField for GradientField<F> {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        project_ext(x, &ambient_gradient(&self.0, x))
    }
    fn is_tangent(&self) -> bool {
        true
    }
}

/// ∇f/‖∇f‖.
pub struct NormalizedGradient<F> {
    f: F,
    regularity: f64,
}

impl<F: ScalarField> NormalizedGradient<F> {
    pub fn new(f: F) -> Self {
        NormalizedGradient { f, regularity: crate::tolerances::REGULARITY }
    }

    pub fn with_regularity(f: F, regularity: f64) -> Self {
        NormalizedGradient { f, regularity }
    }

    pub fn function(&self) -> &F {
        &self.f
    }

    pub fn regularity(&self) -> f64 {
        self.regularity
    }
}

impl<F: ScalarField> VectorField for NormalizedGradient<F> {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let g = project_ext(x, &ambient_gradient(&self.f, x));
        let n = dot(&g, &g).sqrt();
        g.into_iter().map(|c| c / n).collect()
    }
    fn is_tangent(&self) -> bool {
        true
    }
}

/// q ↦ P_q D_{V(q)} W(q), i.e. ∇_V W as a field.
pub struct CovariantDerivativeField<V, W> {
    pub direction: V,
    pub field: W,
}

impl<V: VectorField, W: VectorField> VectorField for CovariantDerivativeField<V, W> {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let v = self.direction.eval(x);
        project_ext(x, &directional_vec(&self.field, x, &v))
    }
    fn is_tangent(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::sample_points;

    #[test]
    fn dual_directional_matches_finite_difference() {
        let f = NormalizedGradient::new(Quadratic::non_transnormal(4));
        let pts = sample_points(3, 20, 11, None).unwrap();
        let dir = [0.3, -0.2, 0.5, 0.1];
        for p in &pts {
            let ad = directional_vec(&f, p.as_slice(), &dir);
            let fd = central_difference(&f, p.as_slice(), &dir, 1e-5);
            for (a, b) in ad.iter().zip(&fd) {
                assert!((a - b).abs() < 1e-6, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn quadratic_eval() {
        let q = Quadratic::non_transnormal(4);
        assert!((q.eval::<f64>(&[0.5, 0.5, 0.0, 0.0]) - 0.75).abs() < 1e-15);
        let h = Quadratic::height(4, 0);
        assert_eq!(h.eval::<f64>(&[0.25, 1.0, 0.0, 0.0]), 0.25);
    }

    #[test]
    fn linear_field_tangent_flag() {
        assert!(LinearField::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])).is_tangent());
        assert!(!LinearField::new(DMatrix::identity(2, 2)).is_tangent());
    }
}
