//! Whole-scenario verification: spectra at three refinement levels,
//! Richardson convergence records, and every applicable bound check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::{theorem_suite, BoundReport, Evidence, Measured, Status, Tolerances};
use crate::fem::assemble;
use crate::geometry::{
    gauss_bonnet_defect, integrate_scalar, make_scenario, mesh, FieldSelector, GalleryId, RadialQuadrature,
    Scenario,
};
use crate::spectra::{
    dirichlet_spectrum, dtn_matrix, morse_index, robin_spectrum, steklov_from_dtn, Problem,
};
use crate::Result;

/// Accepted band for observed convergence orders.
pub const ORDER_RANGE: (f64, f64) = (1.7, 2.3);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Richardson {
    pub order: Option<f64>,
    pub extrapolated: f64,
    pub error_estimate: f64,
}

/// Richardson extrapolation from three levels with mesh sizes `h`. The
/// refinement ratio is the geometric mean over the two steps. When the
/// differences do not shrink geometrically (or vanish) no order is reported
/// and the finest value is returned.
pub fn richardson(values: [f64; 3], h: [f64; 3]) -> Richardson {
    let [v0, v1, v2] = values;
    let (d0, d1) = (v0 - v1, v1 - v2);
    let scale = v2.abs().max(1.0);
    let ratio = d0 / d1;
    if d0.abs() <= 1e-12 * scale || d1.abs() <= 1e-12 * scale || !(ratio > 1.0) {
        return Richardson {
            order: None,
            extrapolated: v2,
            error_estimate: d1.abs(),
        };
    }
    let r = (h[0] / h[2]).sqrt();
    let p = ratio.ln() / r.ln();
    let extrapolated = v2 - d1 / (r.powf(p) - 1.0);
    Richardson {
        order: Some(p),
        extrapolated,
        error_estimate: (extrapolated - v2).abs(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub scenario: String,
    pub problem: Problem,
    /// Zero-based eigenvalue index.
    pub index: usize,
    pub levels: Vec<u32>,
    pub h: Vec<f64>,
    pub values: Vec<f64>,
    pub order: Option<f64>,
    pub extrapolated: f64,
    pub error_estimate: f64,
    /// The value is the same at every level (a discretely exact eigenpair).
    pub exact: bool,
    pub in_range: bool,
}

impl ConvergenceRecord {
    fn new(scenario: &str, problem: Problem, index: usize, levels: [u32; 3], h: [f64; 3], values: [f64; 3]) -> Self {
        let r = richardson(values, h);
        let exact = values
            .iter()
            .all(|v| (v - values[2]).abs() <= 1e-10 * values[2].abs().max(1.0));
        let in_range = exact || r.order.is_some_and(|p| (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&p));
        Self {
            scenario: scenario.to_string(),
            problem,
            index,
            levels: levels.to_vec(),
            h: h.to_vec(),
            values: values.to_vec(),
            order: r.order,
            extrapolated: r.extrapolated,
            error_estimate: r.error_estimate,
            exact,
            in_range,
        }
    }
}

/// Everything computed on one mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelData {
    pub level: u32,
    pub h: f64,
    pub vertices: usize,
    pub area: f64,
    pub boundary_measure: f64,
    pub chi: i64,
    pub genus: i64,
    pub boundary_loops: usize,
    pub k_min: f64,
    pub k_max: f64,
    pub integral_s_sigma: f64,
    pub integral_kappa: f64,
    pub gauss_bonnet_defect: f64,
    pub robin: Vec<f64>,
    pub morse_index: Option<usize>,
    pub dirichlet_lambda1: Option<f64>,
    pub steklov: Option<Vec<f64>>,
}

/// Meshes `s` at `level` and computes `count` Robin eigenvalues plus, on
/// bounded scenarios, `λ₁ᴰ` and (when well posed) `count` Steklov values.
pub fn level_data(s: &Scenario, level: u32, count: usize) -> Result<LevelData> {
    let m = mesh(s, level)?;
    let forms = assemble(&m)?;
    let robin = robin_spectrum(&forms, count)?;
    let closed = m.is_closed();
    let (dirichlet_lambda1, steklov) = if closed {
        (None, None)
    } else {
        let dtn = dtn_matrix(&forms)?;
        let steklov = if dtn.wellposed {
            Some(steklov_from_dtn(&forms, &dtn, count)?.eigenvalues)
        } else {
            None
        };
        (Some(dtn.dirichlet_lambda1), steklov)
    };
    let (k_min, k_max) = m
        .field
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| (lo.min(f.k), hi.max(f.k)));
    let boundary = |sel| if closed { Ok(0.0) } else { integrate_scalar(&m, sel) };
    Ok(LevelData {
        level,
        h: m.h,
        vertices: m.num_vertices(),
        area: integrate_scalar(&m, FieldSelector::One)?,
        boundary_measure: boundary(FieldSelector::BoundaryOne)?,
        chi: m.euler_characteristic(),
        genus: m.genus(),
        boundary_loops: m.boundary_loops.len(),
        k_min,
        k_max,
        integral_s_sigma: 2.0 * integrate_scalar(&m, FieldSelector::K)?,
        integral_kappa: boundary(FieldSelector::Kappa)?,
        gauss_bonnet_defect: gauss_bonnet_defect(&m),
        morse_index: morse_index(&robin).ok(),
        robin: robin.eigenvalues,
        dirichlet_lambda1,
        steklov,
    })
}

fn measured3(values: [f64; 3], h: [f64; 3]) -> Measured {
    let r = richardson(values, h);
    Measured {
        value: values[2],
        error: r.error_estimate,
    }
}

/// Error of the finer of two values, assuming second order under halving.
fn measured2(coarse: f64, fine: f64) -> Measured {
    Measured {
        value: fine,
        error: (fine - coarse).abs() / 3.0,
    }
}

fn pick<T: Copy>(data: &[LevelData], f: impl Fn(&LevelData) -> T) -> Vec<T> {
    data.iter().map(f).collect()
}

/// Evidence at the last level of `data`, with error estimates from the
/// preceding levels (Richardson for three, a second-order guess for two).
pub fn evidence_from_levels(data: &[LevelData]) -> Evidence {
    let last = data.last().expect("at least one level");
    let m = |f: &dyn Fn(&LevelData) -> f64| -> Measured {
        let v: Vec<f64> = data.iter().map(f).collect();
        match v.len() {
            0 | 1 => Measured::exact(v[v.len() - 1]),
            2 => measured2(v[0], v[1]),
            k => {
                let h = pick(data, |d| d.h);
                measured3([v[k - 3], v[k - 2], v[k - 1]], [h[k - 3], h[k - 2], h[k - 1]])
            }
        }
    };
    let opt = |f: &dyn Fn(&LevelData) -> Option<f64>| -> Option<Measured> {
        if data.iter().any(|d| f(d).is_none()) {
            return None;
        }
        Some(m(&|d| f(d).unwrap_or(f64::NAN)))
    };
    Evidence {
        level: last.level,
        lambda1: m(&|d| d.robin[0]),
        sigma1: opt(&|d| d.steklov.as_ref().map(|s| s[0])),
        dirichlet_lambda1: opt(&|d| d.dirichlet_lambda1),
        area: m(&|d| d.area),
        boundary_measure: m(&|d| d.boundary_measure),
        chi: last.chi,
        genus: last.genus,
        boundary_loops: last.boundary_loops,
        k_min: last.k_min,
        k_max: last.k_max,
        integral_s_sigma: m(&|d| d.integral_s_sigma),
        integral_boundary_h: m(&|d| d.integral_kappa),
    }
}

/// Evidence for a quadrature-only scenario: analytic spectral data and
/// radial quadrature of the closed-form fields.
pub fn evidence_from_quadrature(s: &Scenario, level: u32) -> Result<Evidence> {
    let fine = RadialQuadrature::new(s, level)?;
    let coarse = RadialQuadrature::new(s, level.saturating_sub(1))?;
    let kappa = s.kappa_boundary.unwrap_or(0.0);
    let both = |f: &dyn Fn(&RadialQuadrature) -> f64| measured2(f(&coarse), f(&fine));
    let exact = |x: Option<f64>| x.map(Measured::exact);
    Ok(Evidence {
        level,
        lambda1: Measured::exact(s.analytic_lambda1.unwrap_or(f64::NAN)),
        sigma1: exact(s.analytic_sigma1),
        dirichlet_lambda1: exact(s.analytic_dirichlet_lambda1),
        area: both(&|q| q.volume()),
        boundary_measure: both(&|q| q.boundary_measure()),
        chi: s.exact_euler.unwrap_or(if fine.closed { 0 } else { 1 }),
        genus: s.genus as i64,
        boundary_loops: s.boundary_components,
        k_min: s.k_intrinsic,
        k_max: s.k_intrinsic,
        integral_s_sigma: both(&|q| q.integrate(|_| s.s_sigma)),
        integral_boundary_h: both(&|q| q.integrate_boundary(|_| kappa)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Finest level; the two coarser levels are used for convergence.
    pub level: u32,
    pub count: usize,
    pub tolerances: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            level: 5,
            count: 6,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCheck {
    pub scenario: String,
    pub parameters: BTreeMap<String, f64>,
    pub n: usize,
    pub level: u32,
    pub levels: Vec<LevelData>,
    pub evidence: Evidence,
    pub reports: Vec<BoundReport>,
    /// The same checks one level coarser.
    pub previous_reports: Vec<BoundReport>,
    /// Equality flags and slack signs agree between the two levels.
    pub stable: bool,
    pub convergence: Vec<ConvergenceRecord>,
    pub pass: bool,
}

impl ScenarioCheck {
    pub fn report(&self, theorem: crate::bounds::Theorem) -> Option<&BoundReport> {
        self.reports.iter().find(|r| r.theorem == theorem)
    }
}

fn convergence_records(s: &Scenario, data: &[LevelData]) -> Vec<ConvergenceRecord> {
    let k = data.len();
    if k < 3 {
        return Vec::new();
    }
    let d = &data[k - 3..];
    let levels = [d[0].level, d[1].level, d[2].level];
    let h = [d[0].h, d[1].h, d[2].h];
    let mut out = Vec::new();
    let robin_len = d.iter().map(|x| x.robin.len()).min().unwrap_or(0);
    // First eigenvalue that actually moves under refinement.
    let moving = (0..robin_len).find(|&i| {
        let v = [d[0].robin[i], d[1].robin[i], d[2].robin[i]];
        v.iter().any(|x| (x - v[2]).abs() > 1e-10 * v[2].abs().max(1.0))
    });
    if let Some(i) = moving {
        out.push(ConvergenceRecord::new(&s.name, Problem::Robin, i, levels, h, [d[0].robin[i], d[1].robin[i], d[2].robin[i]]));
    }
    if let [Some(a), Some(b), Some(c)] = [d[0].dirichlet_lambda1, d[1].dirichlet_lambda1, d[2].dirichlet_lambda1] {
        out.push(ConvergenceRecord::new(&s.name, Problem::Dirichlet, 0, levels, h, [a, b, c]));
    }
    let certified = evidence_from_levels(d).dirichlet_certified();
    if let (true, [Some(a), Some(b), Some(c)]) = (certified, [&d[0].steklov, &d[1].steklov, &d[2].steklov]) {
        out.push(ConvergenceRecord::new(&s.name, Problem::Steklov, 0, levels, h, [a[0], b[0], c[0]]));
    }
    out
}

/// Slack sign with the equality band `|slack| ≤ eq_tol` counted as zero.
fn slack_class(r: &BoundReport) -> i8 {
    if r.slack > r.eq_tol {
        1
    } else if r.slack < -r.eq_tol {
        -1
    } else {
        0
    }
}

fn stable(now: &[BoundReport], before: &[BoundReport]) -> bool {
    now.iter().all(|r| {
        before.iter().find(|b| b.theorem == r.theorem).is_some_and(|b| {
            b.equality == r.equality && b.status == r.status && slack_class(b) == slack_class(r)
        })
    })
}

/// Runs every check on one scenario.
pub fn verify_scenario(s: &Scenario, config: &VerifyConfig) -> Result<ScenarioCheck> {
    let tol = &config.tolerances;
    let (levels, evidence, previous, convergence) = if s.quadrature_only() {
        let e = evidence_from_quadrature(s, config.level)?;
        let p = evidence_from_quadrature(s, config.level.saturating_sub(1))?;
        (Vec::new(), e, p, Vec::new())
    } else {
        let first = config.level.saturating_sub(2);
        let data = (first..=config.level)
            .map(|l| level_data(s, l, config.count))
            .collect::<Result<Vec<_>>>()?;
        let e = evidence_from_levels(&data);
        let p = evidence_from_levels(&data[..data.len() - 1]);
        let c = convergence_records(s, &data);
        (data, e, p, c)
    };
    let reports = theorem_suite(s, &evidence, tol);
    let previous_reports = theorem_suite(s, &previous, tol);
    let pass = reports.iter().all(|r| r.status != Status::Fail) && convergence.iter().all(|c| c.in_range);
    Ok(ScenarioCheck {
        scenario: s.name.clone(),
        parameters: s.parameters.clone(),
        n: s.n,
        level: config.level,
        stable: stable(&reports, &previous_reports),
        levels,
        evidence,
        reports,
        previous_reports,
        convergence,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySuiteReport {
    pub version: String,
    pub config: VerifyConfig,
    pub scenarios: Vec<ScenarioCheck>,
    pub pass: bool,
}

impl VerifySuiteReport {
    pub fn assemble(config: VerifyConfig, scenarios: Vec<ScenarioCheck>) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            pass: scenarios.iter().all(|s| s.pass),
            config,
            scenarios,
        }
    }

    pub fn scenario(&self, name: &str) -> Option<&ScenarioCheck> {
        self.scenarios.iter().find(|s| s.scenario == name)
    }
}

/// The gallery with its default parameters.
pub fn default_gallery() -> Vec<Scenario> {
    GalleryId::ALL
        .iter()
        .map(|id| make_scenario(id.name(), &id.default_params()).expect("gallery defaults are valid"))
        .collect()
}

/// Sequential suite over `scenarios`.
pub fn verify_suite(scenarios: &[Scenario], config: &VerifyConfig) -> Result<VerifySuiteReport> {
    let checks = scenarios
        .iter()
        .map(|s| verify_scenario(s, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifySuiteReport::assemble(config.clone(), checks))
}

/// One row of a parameter sweep of the Estimate1/Estimate3 bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub lambda1: f64,
    pub sigma1: Option<f64>,
    pub estimate1_rhs: f64,
    pub estimate3_rhs: Option<f64>,
    pub slack_estimate1: f64,
    pub slack_estimate3: Option<f64>,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str =
        "param,lambda1,sigma1,estimate1_rhs,estimate3_rhs,slack_estimate1,slack_estimate3";

    pub fn csv(&self) -> String {
        let f = |x: f64| crate::fmt_f64(x);
        let o = |x: Option<f64>| x.map_or_else(String::new, f);
        format!(
            "{},{},{},{},{},{},{}",
            f(self.param),
            f(self.lambda1),
            o(self.sigma1),
            f(self.estimate1_rhs),
            o(self.estimate3_rhs),
            f(self.slack_estimate1),
            o(self.slack_estimate3)
        )
    }
}

/// Evaluates `λ₁`, `σ₁` and the two bounds on a 2-dimensional scenario at
/// one parameter value, using exact hypothesis constants.
pub fn sweep_point(scenario: &str, param: &str, value: f64, level: u32) -> Result<SweepRow> {
    let mut params = BTreeMap::new();
    params.insert(param.to_string(), value);
    let s = make_scenario(scenario, &params)?;
    let m = mesh(&s, level)?;
    let forms = assemble(&m)?;
    let lambda1 = robin_spectrum(&forms, 1)?.first();
    let area = s.exact_area.unwrap_or(f64::NAN);
    let blen = s.exact_boundary_measure.unwrap_or(0.0);
    let chi = s.exact_euler.unwrap_or(m.euler_characteristic());
    let (a, b, h) = (s.inf_scalar(), s.inf_boundary_h(), s.mean_curvature);
    let e1 = crate::bounds::estimate1_rhs(a, b, h, chi, area, blen);
    let (sigma1, e3) = if s.has_boundary() {
        let d = dirichlet_spectrum(&forms, 1)?.first();
        let sigma = if d > 0.0 {
            Some(crate::spectra::steklov_spectrum(&forms, 1)?.first())
        } else {
            None
        };
        (sigma, crate::bounds::estimate3_rhs(a, b, h, chi, area, blen).ok())
    } else {
        (None, None)
    };
    Ok(SweepRow {
        param: value,
        lambda1,
        sigma1,
        estimate1_rhs: e1,
        estimate3_rhs: e3,
        slack_estimate1: e1 - lambda1,
        slack_estimate3: sigma1.zip(e3).map(|(s, r)| r - s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::Theorem;

    #[test]
    fn richardson_recovers_second_order() {
        let f = |h: f64| 3.0 + 0.7 * h * h + 0.1 * h.powi(4);
        let h = [0.4, 0.2, 0.1];
        let r = richardson([f(h[0]), f(h[1]), f(h[2])], h);
        assert!((r.order.unwrap() - 2.0).abs() < 0.05);
        assert!((r.extrapolated - 3.0).abs() < 1e-3);
        let flat = richardson([1.0, 1.0, 1.0], h);
        assert_eq!((flat.order, flat.extrapolated, flat.error_estimate), (None, 1.0, 0.0));
    }

    #[test]
    fn quadrature_scenarios_are_equalities() {
        let config = VerifyConfig {
            level: 3,
            ..Default::default()
        };
        for name in ["equatorial_s3_in_s4", "equatorial_b3_in_b4"] {
            let s = make_scenario(name, &Default::default()).unwrap();
            let c = verify_scenario(&s, &config).unwrap();
            assert!(c.pass && c.stable);
            let theorem = if name.contains("s4") { Theorem::T4 } else { Theorem::RigidityN };
            let r = c.report(theorem).unwrap();
            assert!(r.equality && r.status == Status::Pass, "{r:?}");
        }
    }

    #[test]
    fn coarse_disk_check() {
        let s = make_scenario("flat_disk_b3", &Default::default()).unwrap();
        let c = verify_scenario(&s, &VerifyConfig { level: 3, ..Default::default() }).unwrap();
        assert_eq!(c.levels.len(), 3);
        let e3 = c.report(Theorem::Estimate3).unwrap();
        assert!(e3.equality && e3.pass, "{e3:?}");
        assert!(c.convergence.iter().any(|r| r.problem == Problem::Robin && r.index == 0));
        let json = serde_json::to_string(&c).unwrap();
        let back: ScenarioCheck = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn sweep_row_csv() {
        let row = sweep_point("spherical_cap_b3", "rho", 1.0, 2).unwrap();
        assert!(row.slack_estimate1 > 0.0 && row.slack_estimate3.unwrap() > 0.0);
        assert_eq!(row.csv().split(',').count(), SweepRow::CSV_HEADER.split(',').count());
    }
}
