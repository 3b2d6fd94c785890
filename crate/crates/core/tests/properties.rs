use kontact::calculus::{check_transnormal, gradient, laplacian, TransnormalProfile};
use kontact::connection::{cov_deriv, curvature, curvature_numeric};
use kontact::contact::{killing_residual, projected_constant_field};
use kontact::field::{directional_scalar, InnerProduct, LinearField, ProjectedConstant, Quadratic, ScalarField, ScaledField, VectorField};
use kontact::harmonic::{critical_condition_check, normalized_gradient_field, nu_check, nu_form_in_frame};
use kontact::sphere::{gram_schmidt_frame, metric, project, random_frame, random_tangent, sample_points, OrthoComplexStructure};
use kontact::suite::{format_number, run_suite, to_json, Manifold, SuiteConfig};
use kontact::SpherePoint;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn coords(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, d).prop_filter("away from the origin", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
}

fn quadratic(entries: &[f64], d: usize) -> Quadratic {
    let a = DMatrix::from_fn(d, d, |i, j| entries[(i * d + j) % entries.len()]);
    let b = DVector::from_fn(d, |i, _| entries[(i + 3) % entries.len()]);
    Quadratic::new(a, b, 0.0, "random")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn connection_is_metric(x in coords(4), b in coords(4), c in coords(4), e in prop::collection::vec(-1.0f64..1.0, 16), seed in any::<u64>()) {
        let p = SpherePoint::normalized(x).unwrap();
        let v = ScaledField { scale: quadratic(&e, 4), field: ProjectedConstant::new(b) };
        let w = ScaledField { scale: quadratic(&c, 4), field: LinearField::new(OrthoComplexStructure::from_blocks(&[1, -1]).unwrap().matrix().clone()) };
        let u = random_tangent(&p, &mut ChaCha8Rng::seed_from_u64(seed));
        let lhs = directional_scalar(&InnerProduct(&v, &w), p.as_slice(), u.as_slice());
        let rhs = metric(&cov_deriv(&v, &u).unwrap(), &w.at(&p)).unwrap() + metric(&v.at(&p), &cov_deriv(&w, &u).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn connection_is_torsion_free(x in coords(6), b in coords(6), c in coords(6), e in prop::collection::vec(-1.0f64..1.0, 12)) {
        // g(∇_V W − ∇_W V, ∇f) = V(Wf) − W(Vf) for a test function f
        let p = SpherePoint::normalized(x).unwrap();
        let v = ScaledField { scale: quadratic(&e, 6), field: ProjectedConstant::new(b) };
        let w = ProjectedConstant::new(c);
        let f = quadratic(&e[3..], 6);
        let vp = v.at(&p);
        let wp = w.at(&p);
        let torsion_free = cov_deriv(&w, &vp).unwrap().sub(&cov_deriv(&v, &wp).unwrap()).unwrap();
        let grad = kontact::field::GradientField(&f);
        let wf = InnerProduct(&w, &grad);
        let vf = InnerProduct(&v, &grad);
        let bracket_f = directional_scalar(&wf, p.as_slice(), vp.as_slice()) - directional_scalar(&vf, p.as_slice(), wp.as_slice());
        let lhs = metric(&torsion_free, &gradient(&f, &p)).unwrap();
        prop_assert!((lhs - bracket_f).abs() <= 1e-8, "{} vs {}", lhs, bracket_f);
    }

    #[test]
    fn curvature_numeric_matches_analytic(x in coords(6), seed in any::<u64>()) {
        let p = SpherePoint::normalized(x).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (u, v, w) = (random_tangent(&p, &mut rng), random_tangent(&p, &mut rng), random_tangent(&p, &mut rng));
        let diff = curvature_numeric(&u, &v, &w).unwrap().sub(&curvature(&u, &v, &w).unwrap()).unwrap();
        prop_assert!(diff.amax() <= 1e-8);
    }

    #[test]
    fn harmonic_quadratics_are_eigenfunctions(k in 2usize..5, e in prop::collection::vec(-1.0f64..1.0, 64), x in coords(8)) {
        let d = 2 * k;
        let mut a = DMatrix::from_fn(d, d, |i, j| e[i * 8 + j]);
        a = (&a + a.transpose()) * 0.5;
        let shift = a.trace() / d as f64;
        for i in 0..d {
            a[(i, i)] -= shift;
        }
        let q = Quadratic::new(a, DVector::zeros(d), 0.0, "harmonic");
        let p = SpherePoint::normalized(x[..d].to_vec());
        prop_assume!(p.is_ok());
        let p = p.unwrap();
        let m = (d - 1) as f64;
        prop_assert!((laplacian(&q, &p) - 2.0 * (m + 1.0) * q.value(&p)).abs() <= 1e-7);
    }

    #[test]
    fn nu_is_frame_independent(seed in any::<u64>()) {
        let d = Manifold::S5.pair().unwrap();
        let f = d.angle_function();
        let g = f.clone();
        let pts = sample_points(5, 1, seed, Some(&move |p: &SpherePoint| g.value(p).abs() > 0.9)).unwrap();
        let p = &pts[0];
        let n = normalized_gradient_field(f, 0.9);
        let frame = gram_schmidt_frame(p, &[n.field().at(p)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let (f1, f2) = (random_frame(p, &mut rng), random_frame(p, &mut rng));
        for x in &frame.vectors()[1..] {
            let a = nu_form_in_frame(&n, x, &f1).unwrap();
            let b = nu_form_in_frame(&n, x, &f2).unwrap();
            prop_assert!((a - b).abs() <= 1e-7);
        }
    }

    #[test]
    fn seventeen_digits_round_trip(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let back: f64 = format_number(x).parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }
}

#[test]
fn non_transnormal_function_fails() {
    let f = Quadratic::non_transnormal(4);
    // same level f = 0, different |∇f|²
    let a = SpherePoint::new(vec![0.0, 0.0, 1.0, 0.0]).unwrap();
    let b = SpherePoint::new(vec![0.0, 1.0, 0.0, 0.0]).unwrap();
    assert_eq!(f.value(&a), 0.0);
    assert_eq!(f.value(&b), 0.0);
    assert!((gradient(&f, &a).norm().powi(2) - gradient(&f, &b).norm().powi(2)).abs() > 1.0);
    let pts = sample_points(3, 100, 3, None).unwrap();
    for profile in [TransnormalProfile::angle(), TransnormalProfile::height()] {
        assert!(!check_transnormal(&f, &profile, &pts).pass);
    }
}

#[test]
fn non_harmonic_field_fails() {
    let n = normalized_gradient_field(Quadratic::non_transnormal(6), f64::INFINITY);
    let pts = sample_points(5, 60, 4, None).unwrap();
    let r = nu_check(&n, &pts, "nu_control");
    assert!(!r.pass && r.max > 1e-3, "{r:?}");
    assert!(!critical_condition_check(&n, &pts).pass);
}

#[test]
fn projected_constant_is_not_killing() {
    let w = projected_constant_field(&[1.0, 0.5, -0.25, 0.0]);
    let pts = sample_points(3, 50, 5, None).unwrap();
    let r = killing_residual(&w, &pts, "control");
    assert!(!r.pass && r.max > 1e-2);
    // L_W g = −2⟨c,p⟩g
    let p = &pts[0];
    let u = project(p, &DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0]));
    let lw = 2.0 * metric(&cov_deriv(&w, &u).unwrap(), &u).unwrap();
    let c = DVector::from_vec(vec![1.0, 0.5, -0.25, 0.0]);
    assert!((lw + 2.0 * c.dot(p.coords()) * u.norm().powi(2)).abs() < 1e-12);
}

#[test]
fn suite_is_deterministic_across_thread_counts() {
    let cfg = SuiteConfig { samples: 16, energy_samples: 400, ..SuiteConfig::new(Manifold::S5) };
    let a = to_json(&run_suite(&cfg).unwrap());
    let b = to_json(&run_suite(&cfg).unwrap());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| to_json(&run_suite(&cfg).unwrap()));
    assert_eq!(a, b);
    assert_eq!(a, c);
    let other = SuiteConfig { seed: 43, ..cfg };
    assert_ne!(a, to_json(&run_suite(&other).unwrap()));
}
