//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Thresholds are written out here rather than taken from the
//! library so that loosening a library constant cannot turn this green.

use std::f64::consts::PI;
use std::process::ExitCode;

use kontact::calculus::{check_geodesic, check_transnormal, laplacian, lemma1_residual, level_mean_curvature, TransnormalProfile};
use kontact::connection::{cov_deriv, curvature, curvature_numeric};
use kontact::contact::{check_axiom_ii, check_axiom_iii, check_axiom_volume, check_kcontact, check_reeb_ricci, check_sasakian};
use kontact::double::{
    dim_theorem_check, hess_formula_check, laplacian_formula_check, lemma4_check, ricci_normal_check, DoubleKContact,
};
use kontact::field::{directional_scalar, InnerProduct, ProjectedConstant, Quadratic, ScalarField, ScaledField, VectorField};
use kontact::harmonic::{critical_condition_check, energy, normalized_gradient_field, nu_check, reeb_field};
use kontact::sphere::{metric, random_tangent, sample_points};
use kontact::suite::{regular_points, Manifold};
use kontact::{ResidualReport, SpherePoint};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POINTS: usize = 500;
const SEED: u64 = 42;

struct Gate {
    failures: usize,
}

impl Gate {
    fn criterion(&mut self, id: u32, title: &str, checks: Vec<(String, f64, f64)>) {
        let worst = checks.iter().filter(|(_, v, tol)| !(v <= tol)).collect::<Vec<_>>();
        let detail = checks
            .iter()
            .map(|(name, v, tol)| format!("{name}={v:.2e}/{tol:.0e}"))
            .collect::<Vec<_>>()
            .join(", ");
        if worst.is_empty() {
            println!("PASS {id:>2} {title}: {detail}");
        } else {
            self.failures += 1;
            println!("FAIL {id:>2} {title}: {detail}");
        }
    }
}

fn gated(r: &ResidualReport, label: &str, tol: f64) -> (String, f64, f64) {
    (label.to_string(), r.max, tol)
}

fn pair(m: Manifold) -> (DoubleKContact, Vec<SpherePoint>) {
    let d = m.pair().expect("pair builds");
    let pts = regular_points(&d, POINTS, SEED, 0.9).expect("regular points");
    (d, pts)
}

/// 0 if `ok`, else infinity.
fn boolean(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        f64::INFINITY
    }
}

fn main() -> ExitCode {
    let mut gate = Gate { failures: 0 };
    let (d3, r3) = pair(Manifold::S3);
    let (d5, r5) = pair(Manifold::S5);
    let all3 = sample_points(3, POINTS, SEED, None).unwrap();
    let all5 = sample_points(5, POINTS, SEED, None).unwrap();
    let f3 = d3.angle_function();
    let f5 = d5.angle_function();

    // 1
    let t3 = check_transnormal(&f3, &TransnormalProfile::angle(), &all3);
    let t5 = check_transnormal(&f5, &TransnormalProfile::angle(), &all5);
    gate.criterion(1, "transnormality b(t)=4(1-t^2)", vec![gated(&t3, "s3", 1e-9), gated(&t5, "s5", 1e-9)]);

    // 2
    let dim3 = dim_theorem_check(&d3, &r3).unwrap();
    gate.criterion(2, "dimension 3: Laplacian f = 8f", vec![gated(&dim3, "s3", 1e-7), ("count".into(), boolean(dim3.count == POINTS), 0.0)]);

    // 3
    let values: Vec<f64> = r5.iter().map(|p| laplacian(&f5, p) - 12.0 * f5.value(p)).collect();
    let c0 = values[0];
    let spread = values.iter().map(|v| (v - c0).abs()).fold(0.0, f64::max);
    let dim5 = dim_theorem_check(&d5, &r5).unwrap();
    gate.criterion(
        3,
        "dimension 5: Laplacian f = 12f + c0, |c0| = 4",
        vec![
            ("c0_spread".into(), spread, 1e-6),
            ("abs_c0_minus_4".into(), (c0.abs() - 4.0).abs(), 1e-6),
            ("c0_plus_4".into(), (c0 + 4.0).abs(), 1e-6),
            gated(&dim5, "report", 1e-6),
        ],
    );

    // 4
    let (l3, fr3) = laplacian_formula_check(&d3, &r3);
    let (l5, fr5) = laplacian_formula_check(&d5, &r5);
    gate.criterion(
        4,
        "Laplacian lemma (4n+4)f + 2 sum g(J phi E, E)",
        vec![gated(&l3, "s3", 1e-7), gated(&l5, "s5", 1e-7), gated(&fr3, "frame_s3", 1e-8), gated(&fr5, "frame_s5", 1e-8)],
    );

    // 5
    let h = Quadratic::height(4, 0);
    let hr = sample_points(3, POINTS, SEED, Some(&|p: &SpherePoint| p.as_slice()[0].abs() > 0.9)).unwrap();
    gate.criterion(
        5,
        "normalized gradient is geodesic",
        vec![
            gated(&check_geodesic(&f3, &r3), "angle_s3", 1e-7),
            gated(&check_geodesic(&f5, &r5), "angle_s5", 1e-7),
            gated(&check_geodesic(&h, &hr), "height_s3", 1e-7),
        ],
    );

    // 6
    let d7 = Manifold::S7.pair().unwrap();
    let r7 = regular_points(&d7, POINTS, SEED, 0.9).unwrap();
    let h5 = Quadratic::height(6, 2);
    let hr5 = sample_points(5, POINTS, SEED, Some(&|p: &SpherePoint| p.as_slice()[2].abs() > 0.9)).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let torus = SpherePoint::new(vec![s, 0.0, 0.0, s]).unwrap();
    let torus2 = SpherePoint::new(vec![0.0, s, s, 0.0]).unwrap();
    let minimal = level_mean_curvature(&f3, &torus).unwrap().abs().max(level_mean_curvature(&f3, &torus2).unwrap().abs());
    gate.criterion(
        6,
        "mean curvature of regular levels",
        vec![
            gated(&lemma1_residual(&f3, &TransnormalProfile::angle(), &r3), "angle_s3", 1e-7),
            gated(&lemma1_residual(&f5, &TransnormalProfile::angle(), &r5), "angle_s5", 1e-7),
            gated(&lemma1_residual(&d7.angle_function(), &TransnormalProfile::angle(), &r7), "angle_s7", 1e-7),
            gated(&lemma1_residual(&h, &TransnormalProfile::height(), &hr), "height_s3", 1e-7),
            gated(&lemma1_residual(&h5, &TransnormalProfile::height(), &hr5), "height_s5", 1e-7),
            ("clifford_h".into(), minimal, 1e-7),
            ("torus_level".into(), f3.value(&torus).abs(), 1e-15),
        ],
    );

    // 7
    let l4 = lemma4_check(&d5, &r5).unwrap();
    gate.criterion(
        7,
        "phi J on H: symmetric, involutive, eigenvalues +-1",
        vec![
            gated(&l4[0], "symmetry", 1e-8),
            gated(&l4[1], "commute", 1e-8),
            gated(&l4[2], "square", 1e-8),
            gated(&l4[3], "spectrum", 1e-7),
            ("count".into(), boolean(l4[3].count == POINTS), 0.0),
        ],
    );

    // 8
    gate.criterion(8, "Hessian formula on H x H", vec![gated(&hess_formula_check(&d5, &r5).unwrap(), "s5", 1e-7)]);

    // 9
    let n3 = normalized_gradient_field(f3.clone(), 0.9);
    let n5 = normalized_gradient_field(f5.clone(), 0.9);
    let nu3 = nu_check(&n3, &r3, "nu");
    let nu5 = nu_check(&n5, &r5, "nu");
    gate.criterion(
        9,
        "N is a harmonic unit vector field",
        vec![
            gated(&nu3, "nu_s3", 1e-6),
            gated(&nu5, "nu_s5", 1e-6),
            gated(&critical_condition_check(&n3, &r3), "critical_s3", 1e-5),
            gated(&critical_condition_check(&n5, &r5), "critical_s5", 1e-5),
            ("count".into(), boolean(nu3.count == POINTS && nu5.count == POINTS), 0.0),
        ],
    );

    // 10
    let (rn3, rc3) = ricci_normal_check(&d3, &r3);
    let (rn5, rc5) = ricci_normal_check(&d5, &r5);
    let mut q = Vec::new();
    for (tag, d, pts) in [("s3", &d3, &all3), ("s5", &d5, &all5)] {
        for s in [d.alpha(), d.beta()] {
            q.push(gated(&check_reeb_ricci(s, pts), &format!("QZ_{tag}"), 1e-8));
        }
    }
    q.extend([gated(&rn3, "rho_EN_s3", 1e-8), gated(&rn5, "rho_EN_s5", 1e-8), gated(&rc3, "QJX_s3", 1e-8), gated(&rc5, "QJX_s5", 1e-8)]);
    gate.criterion(10, "Ricci pinning", q);

    // 11
    let mut c = Vec::new();
    for (tag, d, pts) in [("s3", &d3, &all3), ("s5", &d5, &all5)] {
        for (which, s) in [("alpha", d.alpha()), ("beta", d.beta())] {
            let vol = check_axiom_volume(s, pts);
            let constant_sign = vol.pass && vol.diagnostics["min_normalized_abs"] > 0.5;
            c.push((format!("vol_{which}_{tag}"), boolean(constant_sign), 0.0));
            c.push(gated(&check_axiom_ii(s, pts), &format!("ii_{which}_{tag}"), 1e-9));
            c.push(gated(&check_axiom_iii(s, pts), &format!("iii_{which}_{tag}"), 1e-8));
            c.push(gated(&check_kcontact(s, pts), &format!("killing_{which}_{tag}"), 1e-9));
            c.push(gated(&check_sasakian(s, pts), &format!("sasaki_{which}_{tag}"), 1e-8));
        }
    }
    gate.criterion(11, "contact axioms, K-contact, Sasakian", c);

    // 12
    let z = reeb_field(d3.alpha());
    let golden = 5.0 * PI * PI;
    let e1 = energy(&z, 3, 100_000, SEED).unwrap();
    let e2 = energy(&z, 3, 100_000, SEED + 1).unwrap();
    gate.criterion(
        12,
        "Reeb energy on S3 = 5 pi^2",
        vec![
            ("within_3se".into(), boolean(e1.within(golden, 3.0)), 0.0),
            ("seeds_agree".into(), boolean(e1.agrees_with(&e2, 3.0)), 0.0),
            ("abs_error".into(), (e1.value - golden).abs(), 1e-9),
        ],
    );

    // 13
    gate.criterion(13, "property suites and negative controls", property_suites());

    if gate.failures == 0 {
        println!("acceptance: all 13 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", gate.failures);
        ExitCode::FAILURE
    }
}

fn property_suites() -> Vec<(String, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc);
    let mut compat: f64 = 0.0;
    let mut torsion: f64 = 0.0;
    let mut curv: f64 = 0.0;
    let mut eigen: f64 = 0.0;
    for (i, p) in sample_points(5, 200, 13, None).unwrap().iter().enumerate() {
        let rand_vec = |rng: &mut ChaCha8Rng| (0..6).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>();
        let a = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0));
        let scale = Quadratic::new(a, DVector::from_vec(rand_vec(&mut rng)), 0.0, "s");
        let v = ScaledField { scale, field: ProjectedConstant::new(rand_vec(&mut rng)) };
        let w = ProjectedConstant::new(rand_vec(&mut rng));
        let u = random_tangent(p, &mut rng);
        let lhs = directional_scalar(&InnerProduct(&v, &w), p.as_slice(), u.as_slice());
        let rhs = metric(&cov_deriv(&v, &u).unwrap(), &w.at(p)).unwrap() + metric(&v.at(p), &cov_deriv(&w, &u).unwrap()).unwrap();
        compat = compat.max((lhs - rhs).abs());

        let test_fn = Quadratic::new(DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0)), DVector::zeros(6), 0.0, "t");
        let grad = kontact::field::GradientField(&test_fn);
        let (vp, wp) = (v.at(p), w.at(p));
        let t = cov_deriv(&w, &vp).unwrap().sub(&cov_deriv(&v, &wp).unwrap()).unwrap();
        let bracket_f = directional_scalar(&InnerProduct(&w, &grad), p.as_slice(), vp.as_slice())
            - directional_scalar(&InnerProduct(&v, &grad), p.as_slice(), wp.as_slice());
        torsion = torsion.max((metric(&t, &kontact::calculus::gradient(&test_fn, p)).unwrap() - bracket_f).abs());

        let (x, y, zz) = (random_tangent(p, &mut rng), random_tangent(p, &mut rng), random_tangent(p, &mut rng));
        curv = curv.max(curvature_numeric(&x, &y, &zz).unwrap().sub(&curvature(&x, &y, &zz).unwrap()).unwrap().amax());

        let d = [4usize, 6, 8][i % 3];
        let mut h = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        h = (&h + h.transpose()) * 0.5;
        let tr = h.trace() / d as f64;
        for k in 0..d {
            h[(k, k)] -= tr;
        }
        let qh = Quadratic::new(h, DVector::zeros(d), 0.0, "harmonic");
        let pt = sample_points(d - 1, 1, i as u64, None).unwrap().remove(0);
        eigen = eigen.max((laplacian(&qh, &pt) - 2.0 * d as f64 * qh.value(&pt)).abs());
    }

    let nt = Quadratic::non_transnormal(4);
    let pts = sample_points(3, 100, 3, None).unwrap();
    let transnormal_fails = !check_transnormal(&nt, &TransnormalProfile::angle(), &pts).pass
        && !check_transnormal(&nt, &TransnormalProfile::height(), &pts).pass;
    let control = normalized_gradient_field(Quadratic::non_transnormal(4), f64::INFINITY);
    let nu_control = nu_check(&control, &pts, "control");
    let crit_control = critical_condition_check(&control, &pts);

    vec![
        ("metric_compat".into(), compat, 1e-8),
        ("torsion".into(), torsion, 1e-8),
        ("curvature".into(), curv, 1e-8),
        ("eigenfunction".into(), eigen, 1e-7),
        ("nontransnormal_fails".into(), boolean(transnormal_fails), 0.0),
        ("nonharmonic_nu_fails".into(), boolean(!nu_control.pass && nu_control.max > 1e-3), 0.0),
        ("nonharmonic_critical_fails".into(), boolean(!crit_control.pass), 0.0),
    ]
}
