//! The embedded round sphere S^m ⊂ R^{m+1}: points, tangent vectors,
//! orthonormal frames, orthogonal complex structures and seeded sampling.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dual::Scalar;
use crate::error::{GeometryError, Result};
use crate::tolerances;

/// A point of the unit sphere in ambient coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SpherePoint {
    coords: DVector<f64>,
}

impl SpherePoint {
    /// Accepts coordinates that are already unit length (within 1e-12).
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let coords = DVector::from_vec(coords);
        if coords.len() < 2 {
            return Err(GeometryError::InvalidPoint("need at least 2 coordinates".into()));
        }
        let err = (coords.norm() - 1.0).abs();
        if !err.is_finite() || err > tolerances::POINT_NORM {
            return Err(GeometryError::InvalidPoint(format!("norm deviates from 1 by {err:e}")));
        }
        Ok(SpherePoint { coords })
    }

    /// Radially projects a nonzero ambient vector onto the sphere.
    pub fn normalized(v: Vec<f64>) -> Result<Self> {
        let v = DVector::from_vec(v);
        let n = v.norm();
        if !(n > 1e-300) || !n.is_finite() || v.len() < 2 {
            return Err(GeometryError::InvalidPoint("cannot normalize".into()));
        }
        Ok(SpherePoint { coords: v / n })
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len()
    }

    /// Intrinsic dimension m.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// exp_p(t·v) along the great circle with initial velocity `v`.
    pub fn geodesic(&self, v: &TangentVector, t: f64) -> SpherePoint {
        let speed = v.norm();
        if speed == 0.0 || t == 0.0 {
            return self.clone();
        }
        let angle = speed * t;
        let c = &self.coords * angle.cos() + v.vec() * (angle.sin() / speed);
        // renormalize to stay on the sphere to machine precision
        let n = c.norm();
        SpherePoint { coords: c / n }
    }

    pub(crate) fn same_base(&self, other: &SpherePoint) -> bool {
        self.coords.len() == other.coords.len()
            && (&self.coords - &other.coords).amax() <= 1e-14
    }
}

/// A tangent vector in ambient representation.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: SpherePoint,
    vec: DVector<f64>,
}

impl TangentVector {
    /// Checks tangency within 1e-10.
    pub fn new(base: SpherePoint, vec: DVector<f64>) -> Result<Self> {
        if vec.len() != base.ambient_dim() {
            return Err(GeometryError::DimensionMismatch { expected: base.ambient_dim(), got: vec.len() });
        }
        if vec.dot(base.coords()).abs() > tolerances::TANGENCY * vec.norm().max(1.0) {
            return Err(GeometryError::NotTangent);
        }
        Ok(TangentVector { base, vec })
    }

    pub fn zero(base: &SpherePoint) -> Self {
        TangentVector { base: base.clone(), vec: DVector::zeros(base.ambient_dim()) }
    }

    pub fn base(&self) -> &SpherePoint {
        &self.base
    }

    pub fn vec(&self) -> &DVector<f64> {
        &self.vec
    }

    pub fn as_slice(&self) -> &[f64] {
        self.vec.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.vec.norm()
    }

    pub fn scaled(&self, k: f64) -> Self {
        TangentVector { base: self.base.clone(), vec: &self.vec * k }
    }

    pub fn normalized(&self) -> Self {
        self.scaled(1.0 / self.norm())
    }

    pub fn add(&self, other: &TangentVector) -> Result<Self> {
        check_base(self, other)?;
        Ok(TangentVector { base: self.base.clone(), vec: &self.vec + &other.vec })
    }

    pub fn sub(&self, other: &TangentVector) -> Result<Self> {
        check_base(self, other)?;
        Ok(TangentVector { base: self.base.clone(), vec: &self.vec - &other.vec })
    }

    /// Largest absolute component.
    pub fn amax(&self) -> f64 {
        self.vec.amax()
    }
}

pub(crate) fn check_base(u: &TangentVector, v: &TangentVector) -> Result<()> {
    if u.base.same_base(&v.base) {
        Ok(())
    } else {
        Err(GeometryError::BaseMismatch)
    }
}

/// v − ⟨v,p⟩p at base p.
pub fn project(p: &SpherePoint, v: &DVector<f64>) -> TangentVector {
    let c = v.dot(p.coords());
    TangentVector { base: p.clone(), vec: v - p.coords() * c }
}

/// The round metric: the ambient dot product of tangent vectors.
pub fn metric(u: &TangentVector, v: &TangentVector) -> Result<f64> {
    check_base(u, v)?;
    Ok(u.vec.dot(&v.vec))
}

/// An orthonormal frame of T_pS^m.
#[derive(Clone, Debug)]
pub struct Frame {
    base: SpherePoint,
    vectors: Vec<TangentVector>,
}

impl Frame {
    pub fn base(&self) -> &SpherePoint {
        &self.base
    }

    pub fn vectors(&self) -> &[TangentVector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<TangentVector> {
        self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// max |⟨e_i, e_j⟩ − δ_ij|.
    pub fn gram_deviation(&self) -> f64 {
        gram_deviation(&self.vectors)
    }

    /// Sign of det[p, e_1, …, e_m].
    pub fn orientation(&self) -> f64 {
        let d = self.base.ambient_dim();
        let mut m = DMatrix::zeros(d, d);
        m.set_column(0, self.base.coords());
        for (k, e) in self.vectors.iter().enumerate() {
            m.set_column(k + 1, e.vec());
        }
        m.determinant().signum()
    }

    /// The same frame with the last vector flipped if needed so that
    /// det[p, e_1, …, e_m] > 0.
    pub fn oriented(mut self) -> Self {
        if self.vectors.len() + 1 == self.base.ambient_dim() && self.orientation() < 0.0 {
            if let Some(last) = self.vectors.last_mut() {
                *last = last.scaled(-1.0);
            }
        }
        self
    }
}

pub fn gram_deviation(vs: &[TangentVector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.vec.dot(&b.vec) - target).abs());
        }
    }
    worst
}

fn orthogonalize_against(v: &mut DVector<f64>, basis: &[DVector<f64>]) {
    // two passes of modified Gram–Schmidt
    for _ in 0..2 {
        for b in basis {
            let c = v.dot(b);
            v.axpy(-c, b, 1.0);
        }
    }
}

/// Orthonormal vectors of T_p spanning the same flag as `seeds`, followed by
/// canonical completions (projected ambient basis vectors in index order)
/// until `target` vectors exist or the candidates run out.
pub(crate) fn orthonormal_completion(
    p: &SpherePoint,
    seeds: &[DVector<f64>],
    exclude: &[DVector<f64>],
    target: usize,
) -> Result<Vec<DVector<f64>>> {
    if !seeds.is_empty() {
        let k = seeds.len();
        let mut gram = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                gram[(i, j)] = seeds[i].dot(&seeds[j]);
            }
        }
        let det = gram.determinant();
        if !(det >= tolerances::GRAM_DET) {
            return Err(GeometryError::Degenerate { gram: det });
        }
    }
    // the normal direction and any excluded directions are removed first
    let mut blockers: Vec<DVector<f64>> = vec![p.coords().clone()];
    for e in exclude {
        let mut e = e.clone();
        orthogonalize_against(&mut e, &blockers);
        let n = e.norm();
        if n > tolerances::COMPLETION_DROP {
            blockers.push(e / n);
        }
    }
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(target);
    let mut all = blockers.clone();
    for s in seeds {
        let mut v = s.clone();
        orthogonalize_against(&mut v, &all);
        let n = v.norm();
        if n <= tolerances::COMPLETION_DROP {
            return Err(GeometryError::Degenerate { gram: n * n });
        }
        let v = v / n;
        all.push(v.clone());
        out.push(v);
    }
    let d = p.ambient_dim();
    for k in 0..d {
        if out.len() >= target {
            break;
        }
        let mut v = DVector::zeros(d);
        v[k] = 1.0;
        orthogonalize_against(&mut v, &all);
        let n = v.norm();
        if n > tolerances::COMPLETION_DROP {
            let v = v / n;
            all.push(v.clone());
            out.push(v);
        }
    }
    Ok(out)
}

/// Orthonormal frame at `p` whose leading vectors span the flag of `seeds`;
/// remaining vectors come from projected ambient basis vectors in index order.
pub fn gram_schmidt_frame(p: &SpherePoint, seeds: &[TangentVector]) -> Result<Frame> {
    for s in seeds {
        if !s.base.same_base(p) {
            return Err(GeometryError::BaseMismatch);
        }
    }
    let seeds: Vec<DVector<f64>> = seeds.iter().map(|s| project(p, &s.vec).vec).collect();
    let vecs = orthonormal_completion(p, &seeds, &[], p.dim())?;
    Ok(Frame {
        base: p.clone(),
        vectors: vecs.into_iter().map(|v| TangentVector { base: p.clone(), vec: v }).collect(),
    })
}

/// Orthonormal basis of the orthogonal complement of `span` inside T_p.
pub fn complement_basis(p: &SpherePoint, span: &[TangentVector]) -> Vec<TangentVector> {
    let span: Vec<DVector<f64>> = span.iter().map(|s| s.vec.clone()).collect();
    let target = p.dim();
    orthonormal_completion(p, &[], &span, target)
        .unwrap_or_default()
        .into_iter()
        .map(|v| TangentVector { base: p.clone(), vec: v })
        .collect()
}

/// An orthogonal, skew, square-root-of-−I matrix on R^{2n+2}.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoComplexStructure {
    mat: DMatrix<f64>,
}

impl OrthoComplexStructure {
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        let d = mat.nrows();
        if d != mat.ncols() || d < 2 || !d.is_multiple_of(2) {
            return Err(GeometryError::Construction("complex structure must be square of even size".into()));
        }
        let id = DMatrix::<f64>::identity(d, d);
        let orth = (&mat * mat.transpose() - &id).amax();
        let square = (&mat * &mat + &id).amax();
        let skew = (mat.transpose() + &mat).amax();
        let tol = 1e-12;
        if orth > tol || square > tol || skew > tol {
            return Err(GeometryError::Construction(format!(
                "not an orthogonal complex structure (orth {orth:e}, square {square:e}, skew {skew:e})"
            )));
        }
        Ok(OrthoComplexStructure { mat })
    }

    /// Block-diagonal structure with 2×2 blocks `sign·j`, where
    /// j(x, y) = (y, −x); `+1` reproduces y∂x − x∂y on that plane.
    pub fn from_blocks(blocks: &[i8]) -> Result<Self> {
        if blocks.is_empty() {
            return Err(GeometryError::Construction("no blocks".into()));
        }
        let d = 2 * blocks.len();
        let mut mat = DMatrix::zeros(d, d);
        for (k, &s) in blocks.iter().enumerate() {
            if s != 1 && s != -1 {
                return Err(GeometryError::Construction(format!("block sign must be ±1, got {s}")));
            }
            let s = s as f64;
            mat[(2 * k, 2 * k + 1)] = s;
            mat[(2 * k + 1, 2 * k)] = -s;
        }
        Self::new(mat)
    }

    /// Recovers block signs when the matrix is block-diagonal.
    pub fn blocks(&self) -> Option<Vec<i8>> {
        let d = self.mat.nrows();
        let mut out = Vec::with_capacity(d / 2);
        for k in 0..d / 2 {
            let s = self.mat[(2 * k, 2 * k + 1)];
            if s.abs() != 1.0 {
                return None;
            }
            out.push(s as i8);
        }
        match Self::from_blocks(&out) {
            Ok(b) if b.mat == self.mat => Some(out),
            _ => None,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn ambient_dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn apply<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        matvec(&self.mat, x)
    }

    pub fn apply_f64(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.mat * x
    }

    pub fn commutes_with(&self, other: &OrthoComplexStructure, tol: f64) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && (&self.mat * &other.mat - &other.mat * &self.mat).amax() <= tol
    }
}

/// Matrix with f64 entries applied to a generic vector.
pub fn matvec<S: Scalar>(m: &DMatrix<f64>, x: &[S]) -> Vec<S> {
    (0..m.nrows())
        .map(|i| {
            let mut acc = S::zero();
            for (j, &xj) in x.iter().enumerate() {
                let a = m[(i, j)];
                if a != 0.0 {
                    acc += xj.scale(a);
                }
            }
            acc
        })
        .collect()
}

/// Deterministic uniform points on S^m from normalized Gaussian draws.
/// `exclude` returns `true` for points to reject.
pub fn sample_points(
    dim: usize,
    count: usize,
    seed: u64,
    exclude: Option<&(dyn Fn(&SpherePoint) -> bool + Sync)>,
) -> Result<Vec<SpherePoint>> {
    if count == 0 {
        return Err(GeometryError::Precondition("count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        let p = gaussian_point(&mut rng, dim + 1);
        if exclude.is_some_and(|f| f(&p)) {
            if attempts >= 1000 && out.len() * 100 < attempts {
                return Err(GeometryError::SamplingExhausted { accepted: out.len(), attempts });
            }
            continue;
        }
        out.push(p);
    }
    Ok(out)
}

pub(crate) fn gaussian_point(rng: &mut ChaCha8Rng, d: usize) -> SpherePoint {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        if let Ok(p) = SpherePoint::normalized(v) {
            return p;
        }
    }
}

/// Seeded RNG for per-point probe vectors; index-keyed so parallel
/// evaluation sees the same probes as serial evaluation.
pub fn probe_rng(index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x6b6f_6e74_6163_7400 ^ index as u64)
}

/// A random unit tangent vector at `p`.
pub fn random_tangent(p: &SpherePoint, rng: &mut ChaCha8Rng) -> TangentVector {
    loop {
        let v: Vec<f64> = (0..p.ambient_dim()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let t = project(p, &DVector::from_vec(v));
        let n = t.norm();
        if n > 1e-3 {
            return t.scaled(1.0 / n);
        }
    }
}

/// Random orthonormal frame at `p` (Gram–Schmidt of random tangent seeds).
pub fn random_frame(p: &SpherePoint, rng: &mut ChaCha8Rng) -> Frame {
    loop {
        let seeds: Vec<TangentVector> = (0..p.dim()).map(|_| random_tangent(p, rng)).collect();
        if let Ok(f) = gram_schmidt_frame(p, &seeds) {
            return f;
        }
    }
}
