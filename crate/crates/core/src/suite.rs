//! The verification suite behind the command-line driver: named example
//! pairs, configuration, the ordered list of checks and report encoding.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::calculus::{check_geodesic, fit_affine_profile, lemma1_residual, TransnormalProfile};
use crate::contact::{check_axiom_ii, check_axiom_iii, check_axiom_volume, check_kcontact, check_reeb_ricci, check_ricci_commutes, check_sasakian};
use crate::double::{
    check_reeb_bracket, dim_theorem_check, gradient_identity_check, hess_formula_check, laplacian_formula_check, lemma4_check, make_double,
    ricci_normal_check, transnormal_b_check, DoubleKContact,
};
use crate::error::{GeometryError, Result};
use crate::field::ScalarField;
use crate::harmonic::{critical_condition_check, energy, normalized_gradient_field, nu_check, reeb_field, spectral_identity_check, sphere_volume, EnergyEstimate};
use crate::report::{ReportBuilder, ResidualReport};
use crate::sphere::{sample_points, OrthoComplexStructure, SpherePoint};
use crate::tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Manifold {
    S3,
    S5,
    S7,
}

impl Manifold {
    pub const ALL: [Manifold; 3] = [Manifold::S3, Manifold::S5, Manifold::S7];

    pub fn dim(self) -> usize {
        match self {
            Manifold::S3 => 3,
            Manifold::S5 => 5,
            Manifold::S7 => 7,
        }
    }

    /// Block signs of (J̃₁, J̃₂).
    pub fn blocks(self) -> (Vec<i8>, Vec<i8>) {
        let k = self.dim().div_ceil(2);
        let j1 = vec![1; k];
        let mut j2 = vec![1; k];
        j2[0] = -1;
        (j1, j2)
    }

    pub fn pair(self) -> Result<DoubleKContact> {
        let (b1, b2) = self.blocks();
        make_double(OrthoComplexStructure::from_blocks(&b1)?, OrthoComplexStructure::from_blocks(&b2)?)
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.dim())
    }
}

impl FromStr for Manifold {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s3" => Ok(Manifold::S3),
            "s5" => Ok(Manifold::S5),
            "s7" => Ok(Manifold::S7),
            other => Err(GeometryError::InvalidConfig(format!("unknown manifold '{other}' (expected s3, s5 or s7)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(GeometryError::InvalidConfig(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub manifold: Manifold,
    pub samples: usize,
    pub seed: u64,
    pub tol_overrides: BTreeMap<String, f64>,
    /// Points with |f| above this are excluded from the regular sample.
    pub exclusion: f64,
    /// Monte Carlo sample size for the energy checks.
    pub energy_samples: usize,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl SuiteConfig {
    pub fn new(manifold: Manifold) -> Self {
        SuiteConfig {
            manifold,
            samples: 500,
            seed: 42,
            tol_overrides: BTreeMap::new(),
            exclusion: 0.9,
            energy_samples: 100_000,
            output_path: None,
            format: Format::Json,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(GeometryError::InvalidConfig("samples must be at least 1".into()));
        }
        if self.energy_samples < 2 {
            return Err(GeometryError::InvalidConfig("energy samples must be at least 2".into()));
        }
        if !(self.exclusion > 0.0 && self.exclusion < 1.0) {
            return Err(GeometryError::InvalidConfig(format!("exclusion must lie in (0,1), got {}", self.exclusion)));
        }
        let names = check_names(self.manifold);
        for (name, &tol) in &self.tol_overrides {
            if !(tol > 0.0 && tol <= tolerances::MAX_OVERRIDE) {
                return Err(GeometryError::InvalidConfig(format!(
                    "tolerance override {name}={tol} outside (0, {:e}]",
                    tolerances::MAX_OVERRIDE
                )));
            }
            if !names.iter().any(|n| n == name || base_name(n) == name) {
                return Err(GeometryError::InvalidConfig(format!("no check named '{name}' for {}", self.manifold)));
            }
        }
        Ok(())
    }
}

/// Name up to the first '@' or '['.
pub fn base_name(name: &str) -> &str {
    name.split(['@', '[']).next().unwrap_or(name)
}

/// Report names produced by [`run_suite`], in order.
pub fn check_names(manifold: Manifold) -> Vec<String> {
    let mut v: Vec<String> = Vec::new();
    for tag in ["alpha", "beta"] {
        for c in ["axiom_volume", "axiom_ii", "axiom_iii"] {
            v.push(format!("{c}@{tag}"));
        }
    }
    for c in ["kcontact", "sasakian"] {
        for tag in ["alpha", "beta"] {
            v.push(format!("{c}@{tag}"));
        }
    }
    v.extend(["reeb_bracket", "reeb_ricci@alpha", "reeb_ricci@beta", "ricci_commutes_phi@alpha", "ricci_commutes_phi@beta"].map(String::from));
    v.extend(["gradient_identity", "transnormal", "laplacian_formula", "laplacian_trace_frame"].map(String::from));
    v.push(if manifold.dim() <= 5 { "dim_theorem".into() } else { "isoparametric_fit".into() });
    if manifold.dim() >= 5 {
        v.extend(["lemma4_symmetry", "lemma4_commute", "lemma4_square", "lemma4_spectrum", "hess_formula"].map(String::from));
    }
    v.extend(
        [
            "geodesic",
            "lemma1",
            "ricci_normal",
            "ricci_commute",
            "nu_form",
            "critical_condition",
            "shape_codazzi",
            "shape_ricci",
            "energy_reeb",
            "energy_seed_agreement",
        ]
        .map(String::from),
    );
    v
}

/// 2·tr(J̃₁J̃₂): the constant c₀ in Δf = 2(m+1)f + c₀.
pub fn expected_c0(d: &DoubleKContact) -> f64 {
    2.0 * (d.alpha().generator().matrix() * d.beta().generator().matrix()).trace()
}

/// (m/2 + n)·Vol(S^m), since ‖∇Z‖² = 2n for every Reeb field here.
pub fn reeb_energy_golden(m: usize) -> Result<f64> {
    let n = (m - 1) / 2;
    Ok((m as f64 / 2.0 + n as f64) * sphere_volume(m)?)
}

pub fn convention_ledger() -> BTreeMap<String, String> {
    [
        ("curvature", "R(A,B)C = nabla_A nabla_B C - nabla_B nabla_A C - nabla_[A,B] C, so R(u,v)w = g(v,w)u - g(u,w)v"),
        ("ricci", "rho(u,v) = sum_i g(R(E_i,u)v, E_i), Q = 2n Id"),
        ("laplacian", "Delta = -div grad, nonnegative spectrum, degree-2 harmonics have eigenvalue 2(m+1)"),
        ("d_alpha", "d alpha(A,B) = A alpha(B) - B alpha(A) - alpha([A,B]), no factor 1/2"),
        ("phi", "phi u = sigma (J~u + alpha(u) p) with sigma = -1, so nabla Z = -phi and A_Z = phi"),
        ("phi_pairing", "J = phi_alpha, phi = phi_beta; grad f = 2 phi_alpha(X) = 2 phi_beta(Z)"),
        ("h_bundle", "H = orthogonal complement of {Z, X, JX}"),
        ("mean_curvature", "h = -sum_i g(nabla_{E_i} N, E_i) = tr A_N over N^perp"),
        ("weingarten", "A_Z u = -nabla_u Z, L_Z u = u + A_Z^t A_Z u"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

fn with_override(r: ResidualReport, overrides: &BTreeMap<String, f64>) -> ResidualReport {
    let tol = overrides.get(&r.check_name).or_else(|| overrides.get(base_name(&r.check_name))).copied();
    match tol {
        Some(t) => r.with_tolerance(t),
        None => r,
    }
}

/// Regular points: |f| ≤ exclusion.
pub fn regular_points(d: &DoubleKContact, count: usize, seed: u64, exclusion: f64) -> Result<Vec<SpherePoint>> {
    let f = d.angle_function();
    sample_points(d.dim(), count, seed, Some(&move |p: &SpherePoint| f.value(p).abs() > exclusion))
}

fn energy_reports(d: &DoubleKContact, cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let m = d.dim();
    let z = reeb_field(d.alpha());
    let golden = reeb_energy_golden(m)?;
    let e1 = energy(&z, m, cfg.energy_samples, cfg.seed)?;
    let e2 = energy(&z, m, cfg.energy_samples, cfg.seed.wrapping_add(1))?;
    let n = normalized_gradient_field(d.angle_function(), cfg.exclusion);
    let trunc = energy(&n, m, cfg.energy_samples, cfg.seed)?;

    let mut a = ReportBuilder::new(
        "energy_reeb",
        3.0 * e1.std_error + tolerances::ENERGY_FLOOR * golden,
        "E(Z) = 1/2 int tr L_Z dV, Monte Carlo within 3 standard errors",
    );
    a.push((e1.value - golden).abs());
    a.diagnostic("estimate", e1.value);
    a.diagnostic("std_error", e1.std_error);
    a.diagnostic("golden", golden);
    a.diagnostic("angle_normal_truncated_estimate", trunc.value);
    a.diagnostic("angle_normal_truncated_std_error", trunc.std_error);
    let se = (e1.std_error.powi(2) + e2.std_error.powi(2)).sqrt();
    let mut b = ReportBuilder::new(
        "energy_seed_agreement",
        3.0 * se + tolerances::ENERGY_FLOOR * e1.value.abs().max(e2.value.abs()),
        "two disjoint seeds agree within combined 3 sigma",
    );
    b.push((e1.value - e2.value).abs());
    b.diagnostic("estimate_second_seed", e2.value);
    Ok(vec![a.finish(), b.finish()])
}

/// Runs every check for the configured manifold, in declaration order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    cfg.validate()?;
    let d = cfg.manifold.pair()?;
    let m = d.dim();
    let all = sample_points(m, cfg.samples, cfg.seed, None)?;
    let regular = regular_points(&d, cfg.samples, cfg.seed ^ 0x5245_4755, cfg.exclusion)?;
    let f = d.angle_function();
    let mut out: Vec<ResidualReport> = Vec::new();

    for (tag, s) in [("alpha", d.alpha()), ("beta", d.beta())] {
        for r in [check_axiom_volume(s, &all), check_axiom_ii(s, &all), check_axiom_iii(s, &all)] {
            let name = format!("{}@{tag}", r.check_name);
            out.push(r.renamed(name));
        }
    }
    for check in [check_kcontact, check_sasakian] {
        for (tag, s) in [("alpha", d.alpha()), ("beta", d.beta())] {
            let r = check(s, &all);
            let name = format!("{}@{tag}", r.check_name);
            out.push(r.renamed(name));
        }
    }
    out.push(check_reeb_bracket(&d, &all));
    for check in [check_reeb_ricci, check_ricci_commutes] {
        for (tag, s) in [("alpha", d.alpha()), ("beta", d.beta())] {
            let r = check(s, &all);
            let name = format!("{}@{tag}", r.check_name);
            out.push(r.renamed(name));
        }
    }
    out.push(gradient_identity_check(&d, &regular).combined());
    out.push(transnormal_b_check(&d, &regular));
    let (lap, frame) = laplacian_formula_check(&d, &regular);
    out.push(lap);
    out.push(frame);
    if m <= 5 {
        out.push(dim_theorem_check(&d, &regular)?);
    } else {
        let fit = fit_affine_profile(&f, &regular);
        let slope = 4.0 * d.n() as f64 + 4.0;
        let c0 = expected_c0(&d);
        let mut b = ReportBuilder::new("isoparametric_fit", tolerances::ISOPARAMETRIC_FIT, "Laplacian f = (4n+4) f + c0");
        b.push(fit.residual.max((fit.slope - slope).abs()).max((fit.intercept - c0).abs()));
        b.diagnostic("slope", fit.slope);
        b.diagnostic("intercept", fit.intercept);
        b.diagnostic("expected_intercept", c0);
        out.push(b.finish());
    }
    if m >= 5 {
        out.extend(lemma4_check(&d, &regular)?);
        out.push(hess_formula_check(&d, &regular)?);
    }
    out.push(check_geodesic(&f, &regular).renamed("geodesic"));
    out.push(lemma1_residual(&f, &TransnormalProfile::angle(), &regular).renamed("lemma1"));
    let (rn, rc) = ricci_normal_check(&d, &regular);
    out.push(rn);
    out.push(rc);
    let n = normalized_gradient_field(f.clone(), cfg.exclusion);
    out.push(nu_check(&n, &regular, "nu_form"));
    out.push(critical_condition_check(&n, &regular));
    let (r19, r35) = spectral_identity_check(&n, &regular);
    out.push(r19);
    out.push(r35);
    out.extend(energy_reports(&d, cfg)?);

    Ok(out.into_iter().map(|r| with_override(r, &cfg.tol_overrides)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutput {
    pub config: SuiteConfig,
    pub convention_ledger: BTreeMap<String, String>,
    pub reports: Vec<ResidualReport>,
    /// Seconds since the Unix epoch; only present when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

impl SuiteOutput {
    pub fn new(config: SuiteConfig, reports: Vec<ResidualReport>) -> Self {
        SuiteOutput { config, convention_ledger: convention_ledger(), reports, generated_at: None }
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ResidualReport> {
        self.reports.iter().filter(|r| !r.pass)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Golden {
    pub laplacian_coefficient_dim3: f64,
    pub laplacian_coefficient_dim5: f64,
    pub laplacian_slope: f64,
    pub expected_c0: f64,
    pub reeb_energy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Description {
    pub manifold: Manifold,
    pub dimension: usize,
    #[serde(rename = "J1_blocks")]
    pub j1_blocks: Vec<i8>,
    #[serde(rename = "J2_blocks")]
    pub j2_blocks: Vec<i8>,
    pub sigma_alpha: f64,
    pub sigma_beta: f64,
    pub convention_ledger: BTreeMap<String, String>,
    pub golden: Golden,
}

pub fn describe(manifold: Manifold) -> Result<Description> {
    let d = manifold.pair()?;
    let (j1_blocks, j2_blocks) = manifold.blocks();
    let m = d.dim();
    Ok(Description {
        manifold,
        dimension: m,
        j1_blocks,
        j2_blocks,
        sigma_alpha: d.alpha().sigma(),
        sigma_beta: d.beta().sigma(),
        convention_ledger: convention_ledger(),
        golden: Golden {
            laplacian_coefficient_dim3: 8.0,
            laplacian_coefficient_dim5: 12.0,
            laplacian_slope: 2.0 * (m as f64 + 1.0),
            expected_c0: expected_c0(&d),
            reeb_energy: reeb_energy_golden(m)?,
        },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergySummary {
    pub manifold: Manifold,
    pub golden_reeb: f64,
    pub reeb: EnergyEstimate,
    pub reeb_second_seed: EnergyEstimate,
    /// ½∫ tr L_N over |f| ≤ exclusion (the full energy of N diverges).
    pub angle_normal_truncated: EnergyEstimate,
    pub exclusion: f64,
}

pub fn energy_summary(cfg: &SuiteConfig) -> Result<EnergySummary> {
    cfg.validate()?;
    let d = cfg.manifold.pair()?;
    let m = d.dim();
    let z = reeb_field(d.alpha());
    let n = normalized_gradient_field(d.angle_function(), cfg.exclusion);
    Ok(EnergySummary {
        manifold: cfg.manifold,
        golden_reeb: reeb_energy_golden(m)?,
        reeb: energy(&z, m, cfg.energy_samples, cfg.seed)?,
        reeb_second_seed: energy(&z, m, cfg.energy_samples, cfg.seed.wrapping_add(1))?,
        angle_normal_truncated: energy(&n, m, cfg.energy_samples, cfg.seed)?,
        exclusion: cfg.exclusion,
    })
}

/// 17 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn normalize_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_u64() || n.is_i64()) => match n.as_f64() {
            Some(x) => Value::Number(Number::from_str(&format_number(x)).expect("formatted float is a JSON number")),
            None => Value::Number(n),
        },
        Value::Array(xs) => Value::Array(xs.into_iter().map(normalize_numbers).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalize_numbers(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with every non-integer number written with 17 significant
/// digits; non-finite values become null.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable");
    let mut s = serde_json::to_string_pretty(&normalize_numbers(v)).expect("serializable");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub check_name: String,
    pub count: usize,
    pub skipped: usize,
    pub max: f64,
    pub mean: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn to_csv(reports: &[ResidualReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check_name", "count", "skipped", "max", "mean", "tolerance", "pass"]).expect("in-memory write");
    for r in reports {
        w.write_record([
            r.check_name.clone(),
            r.count.to_string(),
            r.skipped.to_string(),
            format_number(r.max),
            format_number(r.mean),
            format_number(r.tolerance),
            r.pass.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<CsvRow>, _>>()
        .map_err(|e| GeometryError::InvalidConfig(format!("malformed CSV: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn small(m: Manifold) -> SuiteConfig {
        SuiteConfig { samples: 12, energy_samples: 500, ..SuiteConfig::new(m) }
    }

    #[test]
    fn manifold_parsing() {
        assert_eq!("S5".parse::<Manifold>().unwrap(), Manifold::S5);
        assert!(matches!("s9".parse::<Manifold>(), Err(GeometryError::InvalidConfig(_))));
        assert_eq!(Manifold::S3.blocks(), (vec![1, 1], vec![-1, 1]));
    }

    #[test]
    fn config_validation() {
        let mut c = SuiteConfig::new(Manifold::S3);
        assert!(c.validate().is_ok());
        c.tol_overrides.insert("nu_form".into(), 1e-2);
        assert!(c.validate().is_err());
        c.tol_overrides.insert("nu_form".into(), 1e-12);
        assert!(c.validate().is_ok());
        c.tol_overrides.insert("lemma4_square".into(), 1e-9);
        assert!(c.validate().is_err());
        let c = SuiteConfig { exclusion: 1.0, ..SuiteConfig::new(Manifold::S3) };
        assert!(c.validate().is_err());
        let c = SuiteConfig { samples: 0, ..SuiteConfig::new(Manifold::S3) };
        assert!(c.validate().is_err());
    }

    #[test]
    fn report_names_follow_declaration() {
        for m in Manifold::ALL {
            let reports = run_suite(&small(m)).unwrap();
            let names: Vec<String> = reports.iter().map(|r| r.check_name.clone()).collect();
            assert_eq!(names, check_names(m));
            for r in &reports {
                assert!(r.pass, "{m} {r:?}");
            }
        }
    }

    #[test]
    fn override_tightens_single_check() {
        let mut c = small(Manifold::S3);
        c.tol_overrides.insert("nu_form".into(), 1e-30);
        let reports = run_suite(&c).unwrap();
        let failing: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.check_name.as_str()).collect();
        assert_eq!(failing, vec!["nu_form"]);
    }

    #[test]
    fn base_name_override_applies_to_both_structures() {
        let mut c = small(Manifold::S3);
        c.tol_overrides.insert("axiom_ii".into(), 1e-300);
        let reports = run_suite(&c).unwrap();
        let tols: Vec<f64> = reports.iter().filter(|r| base_name(&r.check_name) == "axiom_ii").map(|r| r.tolerance).collect();
        assert_eq!(tols, vec![1e-300, 1e-300]);
    }

    #[test]
    fn describe_pairs() {
        let d = describe(Manifold::S5).unwrap();
        assert_eq!(d.j2_blocks, vec![-1, 1, 1]);
        assert_eq!(d.golden.expected_c0, -4.0);
        assert_eq!(describe(Manifold::S3).unwrap().golden.expected_c0, 0.0);
        assert!((describe(Manifold::S3).unwrap().golden.reeb_energy - 5.0 * PI * PI).abs() < 1e-12);
        assert_eq!(describe(Manifold::S7).unwrap().golden.expected_c0, -8.0);
    }

    #[test]
    fn json_numbers_have_17_digits() {
        let mut b = ReportBuilder::new("x", 1e-7, "");
        b.push(0.1);
        let s = to_json(&vec![b.finish()]);
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"count\": 1,"));
    }

    #[test]
    fn csv_round_trip_matches_json() {
        let reports = run_suite(&small(Manifold::S3)).unwrap();
        let rows = parse_csv(&to_csv(&reports)).unwrap();
        let json: Value = serde_json::from_str(&to_json(&reports)).unwrap();
        for (row, (r, j)) in rows.iter().zip(reports.iter().zip(json.as_array().unwrap())) {
            assert_eq!(row.check_name, r.check_name);
            assert_eq!(row.max.to_bits(), r.max.to_bits());
            assert_eq!(row.mean.to_bits(), r.mean.to_bits());
            assert_eq!(j["max"].as_f64().unwrap().to_bits(), row.max.to_bits());
            assert_eq!(j["tolerance"].as_f64().unwrap().to_bits(), row.tolerance.to_bits());
        }
    }
}
