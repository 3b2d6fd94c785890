//! Thresholds used by the checkers. Each one is the gate value of the
//! corresponding check; suite overrides may only tighten them (or loosen up
//! to [`MAX_OVERRIDE`]).

/// Unit-norm tolerance for sphere points.
pub const POINT_NORM: f64 = 1e-12;
/// Tangency of vectors and of tangent-flagged fields.
pub const TANGENCY: f64 = 1e-10;
/// Orthonormality of produced frames.
pub const FRAME: f64 = 1e-10;
/// Gram determinant below which seeds are rank deficient.
pub const GRAM_DET: f64 = 1e-10;
/// Residual norm below which a canonical completion vector is dropped.
pub const COMPLETION_DROP: f64 = 1e-8;
/// Default regularity threshold for normalized gradients.
pub const REGULARITY: f64 = 1e-6;
/// Floor for b(f) inside the Lemma-1 residual.
pub const SQRT_B_FLOOR: f64 = 1e-14;

pub const CONNECTION: f64 = 1e-8;
pub const CURVATURE: f64 = 1e-8;
pub const RICCI: f64 = 1e-8;

pub const GEODESIC: f64 = 1e-7;
pub const TRANSNORMAL: f64 = 1e-9;
pub const ISOPARAMETRIC: f64 = 1e-7;
pub const ISOPARAMETRIC_FIT: f64 = 1e-6;
pub const LEMMA1: f64 = 1e-7;
pub const EIGENFUNCTION: f64 = 1e-7;

pub const AXIOM_II: f64 = 1e-9;
pub const AXIOM_III: f64 = 1e-8;
pub const KILLING: f64 = 1e-9;
pub const SASAKIAN: f64 = 1e-8;
/// Axiom i) passes when the normalized volume value stays within this band
/// of its sign at the first point, i.e. |value| >= 0.5 × golden constant.
pub const VOLUME_BAND: f64 = 0.5;

pub const BRACKET: f64 = 1e-10;
pub const GRADIENT_IDENTITY: f64 = 1e-9;
pub const LAPLACIAN_FORMULA: f64 = 1e-7;
pub const TRACE_FRAME: f64 = 1e-8;
pub const DIM3_THEOREM: f64 = 1e-7;
pub const DIM5_THEOREM: f64 = 1e-6;
pub const HBUNDLE: f64 = 1e-9;
pub const LEMMA4_SYMMETRY: f64 = 1e-8;
pub const LEMMA4_SPECTRUM: f64 = 1e-7;
pub const HESS_FORMULA: f64 = 1e-7;
pub const RICCI_NORMAL: f64 = 1e-8;

pub const NU_FORM: f64 = 1e-6;
pub const CRITICAL_CONDITION: f64 = 1e-5;
pub const SHAPE_SYMMETRY: f64 = 1e-7;
/// Minimum eigenvalue gap for the simple-spectrum diagnostics.
pub const EIGEN_GAP: f64 = 1e-4;
/// Arc-length step of the five-point stencils along geodesics.
pub const FD_STEP: f64 = 1e-3;
/// Relative round-off floor for the Monte Carlo 3σ gate.
pub const ENERGY_FLOOR: f64 = 1e-12;

/// Largest value a suite tolerance override may take.
pub const MAX_OVERRIDE: f64 = 1e-3;
