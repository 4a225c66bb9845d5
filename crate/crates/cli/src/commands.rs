use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use jacspec::bounds::{self, Status};
use jacspec::fem::assemble;
use jacspec::fmt_f64;
use jacspec::geometry::{make_scenario, mesh, GalleryId, RadialQuadrature, Scenario};
use jacspec::spectra::{
    dirichlet_spectrum, dtn_matrix, morse_index, robin_spectrum, steklov_from_dtn, Problem, SpectrumDump,
    SpectrumResult,
};
use jacspec::verify::{default_gallery, sweep_point, verify_scenario, SweepRow, VerifyConfig, VerifySuiteReport};
use jacspec::yamabe::{self, ChainCheck, QuotientReport, TestFunction};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{CommandKind, RunConfig};
use crate::plot::{convergence_svg, Series};
use crate::Failure;

pub fn run(config: &RunConfig) -> Result<u8, Failure> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = config.threads {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| Failure::usage(format!("thread pool: {e}")))?
    };
    pool.install(|| match config.command {
        CommandKind::List => list(config),
        CommandKind::Spectrum => spectrum(config),
        CommandKind::Verify => verify(config),
        CommandKind::Sweep => sweep(config),
        CommandKind::Dtn => dtn(config),
        CommandKind::Yamabe => yamabe_cmd(config),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn write_report<T: Serialize>(config: &RunConfig, value: &T) -> Result<String, Failure> {
    let json = to_json(value);
    if let Some(p) = &config.report {
        write_file(p, &json)?;
    }
    Ok(json)
}

fn scenario(config: &RunConfig) -> Result<Scenario, Failure> {
    let name = config
        .scenario
        .as_deref()
        .ok_or_else(|| Failure::usage("--scenario is required"))?;
    scenario_named(name, &config.params)
}

fn scenario_named(name: &str, params: &BTreeMap<String, f64>) -> Result<Scenario, Failure> {
    let id = GalleryId::from_name(name).ok_or_else(|| Failure::usage(format!("unknown scenario `{name}`")))?;
    let mut p = id.default_params();
    for (k, v) in params {
        if id.parameter() == Some(k.as_str()) {
            p.insert(k.clone(), *v);
        } else {
            return Err(Failure::usage(format!("scenario `{name}` does not take parameter `{k}`")));
        }
    }
    Ok(make_scenario(name, &p).map_err(jacspec::Error::from)?)
}

fn list(config: &RunConfig) -> Result<u8, Failure> {
    let gallery = default_gallery();
    let mut out = String::new();
    let _ = writeln!(out, "{:<22} {:>2} {:>4} {:>10} {:>10}  {:<8} parameter", "scenario", "n", "c", "H", "|A|^2", "boundary");
    for s in &gallery {
        let param = s
            .id
            .parameter()
            .map(|p| format!("{p} = {}", s.parameters[p]))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{:<22} {:>2} {:>4} {:>10.6} {:>10.6}  {:<8} {param}",
            s.name,
            s.n,
            s.ambient.c,
            s.mean_curvature,
            s.norm_a2,
            if s.has_boundary() { "yes" } else { "no" },
        );
    }
    print!("{out}");
    write_report(config, &gallery)?;
    Ok(0)
}

/// Evidence that the first Dirichlet eigenvalue is positive, from two
/// consecutive levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirichletCertificate {
    pub level: u32,
    pub dirichlet_lambda1: f64,
    pub coarse_level: u32,
    pub coarse_dirichlet_lambda1: f64,
    pub error_estimate: f64,
    pub certified: bool,
}

fn certificate(s: &Scenario, level: u32) -> Result<DirichletCertificate, Failure> {
    let coarse_level = level.saturating_sub(1);
    let other = if level == 0 { 1 } else { coarse_level };
    let value = |l: u32| -> Result<f64, Failure> {
        let forms = assemble(&mesh(s, l).map_err(jacspec::Error::from)?).map_err(jacspec::Error::from)?;
        Ok(dirichlet_spectrum(&forms, 1).map_err(jacspec::Error::from)?.first())
    };
    let (fine, coarse) = (value(level)?, value(other)?);
    let error_estimate = (fine - coarse).abs() / 3.0;
    Ok(DirichletCertificate {
        level,
        dirichlet_lambda1: fine,
        coarse_level: other,
        coarse_dirichlet_lambda1: coarse,
        error_estimate,
        certified: fine > 0.0 && fine > 10.0 * error_estimate,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub scenario: String,
    pub parameters: BTreeMap<String, f64>,
    pub vertices: usize,
    pub spectrum: SpectrumDump,
    pub morse_index: Option<usize>,
    pub dirichlet_certificate: Option<DirichletCertificate>,
}

fn residuals_ok(result: &SpectrumResult, tol: f64) -> bool {
    result
        .residual_norms
        .iter()
        .zip(&result.eigenvalues)
        .all(|(r, l)| *r <= tol * l.abs().max(1.0))
}

fn not_wellposed(config: &RunConfig, cert: &DirichletCertificate) -> Result<u8, Failure> {
    let json = write_report(config, cert)?;
    print!("{json}");
    Err(Failure {
        code: 4,
        message: format!(
            "Jacobi-Steklov problem is not certified well posed: lambda1_D = {} (error estimate {})",
            fmt_f64(cert.dirichlet_lambda1),
            fmt_f64(cert.error_estimate)
        ),
    })
}

fn spectrum(config: &RunConfig) -> Result<u8, Failure> {
    let s = scenario(config)?;
    let m = mesh(&s, config.level).map_err(jacspec::Error::from)?;
    let forms = assemble(&m).map_err(jacspec::Error::from)?;
    let mut cert = None;
    let result = match config.problem {
        Problem::Robin => robin_spectrum(&forms, config.count),
        Problem::Dirichlet => dirichlet_spectrum(&forms, config.count),
        Problem::Steklov => {
            if forms.is_closed() {
                return Err(Failure::usage(format!("`{}` has no boundary", s.name)));
            }
            let c = certificate(&s, config.level)?;
            if !c.certified {
                return not_wellposed(config, &c);
            }
            cert = Some(c);
            dtn_matrix(&forms).and_then(|d| steklov_from_dtn(&forms, &d, config.count))
        }
    }
    .map_err(jacspec::Error::from)?;
    let report = SpectrumReport {
        scenario: s.name.clone(),
        parameters: s.parameters.clone(),
        vertices: m.num_vertices(),
        spectrum: result.dump(),
        morse_index: (config.problem == Problem::Robin)
            .then(|| morse_index(&result).ok())
            .flatten(),
        dirichlet_certificate: cert,
    };
    let json = write_report(config, &report)?;
    print!("{json}");
    if let Some(p) = &config.csv {
        let mut csv = String::from("index,eigenvalue,residual\n");
        for (i, (l, r)) in result.eigenvalues.iter().zip(&result.residual_norms).enumerate() {
            let _ = writeln!(csv, "{i},{},{}", fmt_f64(*l), fmt_f64(*r));
        }
        write_file(p, &csv)?;
    }
    if !residuals_ok(&result, config.tolerances.solver_tol) {
        return Err(Failure {
            code: 3,
            message: format!("eigen-residuals {:?} exceed the solver tolerance", result.residual_norms),
        });
    }
    Ok(0)
}

fn suite_scenarios(config: &RunConfig) -> Result<Vec<Scenario>, Failure> {
    if config.suite == "all" {
        if !config.params.is_empty() {
            return Err(Failure::usage("scenario parameters need an explicit --suite list"));
        }
        return Ok(default_gallery());
    }
    config
        .suite
        .split(',')
        .map(|name| {
            let name = name.trim();
            let id = GalleryId::from_name(name).ok_or_else(|| Failure::usage(format!("unknown scenario `{name}`")))?;
            let params: BTreeMap<String, f64> = config
                .params
                .iter()
                .filter(|(k, _)| id.parameter() == Some(k.as_str()))
                .map(|(k, v)| (k.clone(), *v))
                .collect();
            scenario_named(name, &params)
        })
        .collect()
}

pub fn convergence_series(report: &VerifySuiteReport) -> Vec<Series> {
    report
        .scenarios
        .iter()
        .flat_map(|c| &c.convergence)
        .filter(|r| r.order.is_some())
        .map(|r| Series {
            label: format!("{} {}[{}]", r.scenario, r.problem.name(), r.index + 1),
            points: r
                .h
                .iter()
                .zip(&r.values)
                .map(|(h, v)| (*h, (v - r.extrapolated).abs()))
                .collect(),
        })
        .collect()
}

fn verify(config: &RunConfig) -> Result<u8, Failure> {
    let scenarios = suite_scenarios(config)?;
    let vc = VerifyConfig {
        level: config.level,
        count: config.count,
        tolerances: bounds::Tolerances {
            pass_tol: config.tolerances.pass_tol,
            eq_tol: config.tolerances.eq_tol,
        },
    };
    let checks = scenarios
        .par_iter()
        .map(|s| verify_scenario(s, &vc))
        .collect::<Result<Vec<_>, _>>()?;
    let report = VerifySuiteReport::assemble(vc, checks);
    write_report(config, &report)?;
    let mut out = String::new();
    for c in &report.scenarios {
        let _ = writeln!(out, "{} (level {}): {}", c.scenario, c.level, if c.pass { "pass" } else { "FAIL" });
        for r in &c.reports {
            let status = match r.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::NotApplicable => "n/a",
            };
            let _ = writeln!(
                out,
                "  {:<12} {:<5} lhs {:>+.6e}  rhs {:>+.6e}  slack {:>+.3e}{}",
                format!("{:?}", r.theorem),
                status,
                r.lhs,
                r.rhs,
                r.slack,
                if r.equality { "  equality" } else { "" }
            );
        }
        for r in &c.convergence {
            let order = r.order.map_or_else(|| "exact".to_string(), |p| format!("{p:.3}"));
            let _ = writeln!(
                out,
                "  convergence {}[{}]: order {order}, extrapolated {:+.9}",
                r.problem.name(),
                r.index + 1,
                r.extrapolated
            );
        }
    }
    let _ = writeln!(out, "overall: {}", if report.pass { "pass" } else { "FAIL" });
    print!("{out}");
    if let Some(p) = &config.csv {
        let mut csv = String::from("scenario,problem,index,level,h,value,extrapolated,order\n");
        for r in report.scenarios.iter().flat_map(|c| &c.convergence) {
            for ((l, h), v) in r.levels.iter().zip(&r.h).zip(&r.values) {
                let _ = writeln!(
                    csv,
                    "{},{},{},{l},{},{},{},{}",
                    r.scenario,
                    r.problem.name(),
                    r.index,
                    fmt_f64(*h),
                    fmt_f64(*v),
                    fmt_f64(r.extrapolated),
                    r.order.map_or_else(String::new, fmt_f64)
                );
            }
        }
        write_file(p, &csv)?;
    }
    if let Some(p) = &config.svg {
        let svg = convergence_svg(&convergence_series(&report)).map_err(Failure::io)?;
        write_file(p, &svg)?;
    }
    Ok(if report.pass { 0 } else { 1 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub scenario: String,
    pub param: String,
    pub level: u32,
    pub rows: Vec<SweepRow>,
    /// Estimate3 slack at the largest parameter value.
    pub final_slack_estimate3: Option<f64>,
    /// Estimate3 slack decreases along the sweep.
    pub monotone_estimate3: bool,
}

fn sweep(config: &RunConfig) -> Result<u8, Failure> {
    let name = config
        .scenario
        .as_deref()
        .ok_or_else(|| Failure::usage("--scenario is required"))?;
    let spec = config.sweep.as_ref().expect("sweep spec resolved");
    let id = GalleryId::from_name(name).ok_or_else(|| Failure::usage(format!("unknown scenario `{name}`")))?;
    if id.parameter() != Some(spec.param.as_str()) {
        return Err(Failure::usage(format!("scenario `{name}` has no parameter `{}`", spec.param)));
    }
    let rows = spec
        .values()
        .par_iter()
        .map(|&v| sweep_point(name, &spec.param, v, config.level))
        .collect::<Result<Vec<_>, _>>()?;
    let slacks: Vec<f64> = rows.iter().filter_map(|r| r.slack_estimate3).collect();
    let report = SweepReport {
        scenario: name.to_string(),
        param: spec.param.clone(),
        level: config.level,
        final_slack_estimate3: rows.last().and_then(|r| r.slack_estimate3),
        monotone_estimate3: slacks.len() == rows.len() && slacks.windows(2).all(|w| w[1] <= w[0]),
        rows,
    };
    write_report(config, &report)?;
    let mut csv = format!("{}\n", SweepRow::CSV_HEADER);
    for r in &report.rows {
        csv.push_str(&r.csv());
        csv.push('\n');
    }
    print!("{csv}");
    if let Some(p) = &config.csv {
        write_file(p, &csv)?;
    }
    Ok(0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DtnReport {
    pub scenario: String,
    pub parameters: BTreeMap<String, f64>,
    pub level: u32,
    pub boundary_vertices: Vec<usize>,
    pub dirichlet_certificate: DirichletCertificate,
    pub symmetry_defect: f64,
    /// Smallest Jacobi-Steklov eigenvalues `(Λ − Bw) h = σ Mb h`.
    pub steklov_eigenvalues: Vec<f64>,
    /// Row-major DtN matrix.
    pub matrix: Vec<Vec<f64>>,
}

fn dtn(config: &RunConfig) -> Result<u8, Failure> {
    let s = scenario(config)?;
    let forms = assemble(&mesh(&s, config.level).map_err(jacspec::Error::from)?).map_err(jacspec::Error::from)?;
    if forms.is_closed() {
        return Err(Failure::usage(format!("`{}` has no boundary", s.name)));
    }
    let cert = certificate(&s, config.level)?;
    if !cert.certified {
        return not_wellposed(config, &cert);
    }
    let d = dtn_matrix(&forms).map_err(jacspec::Error::from)?;
    let steklov = steklov_from_dtn(&forms, &d, config.count).map_err(jacspec::Error::from)?;
    let l = d.lambda_matrix.as_ref().expect("well posed");
    let n = l.nrows();
    let report = DtnReport {
        scenario: s.name.clone(),
        parameters: s.parameters.clone(),
        level: config.level,
        boundary_vertices: forms.boundary_idx.clone(),
        dirichlet_certificate: cert,
        symmetry_defect: d.symmetry_defect().unwrap_or(f64::NAN),
        steklov_eigenvalues: steklov.eigenvalues.clone(),
        matrix: (0..n).map(|i| (0..n).map(|j| l[(i, j)]).collect()).collect(),
    };
    write_report(config, &report)?;
    println!("scenario {} level {}: {} boundary vertices", report.scenario, report.level, n);
    println!("lambda1_D = {}", fmt_f64(report.dirichlet_certificate.dirichlet_lambda1));
    println!("symmetry defect = {}", fmt_f64(report.symmetry_defect));
    for (i, v) in report.steklov_eigenvalues.iter().enumerate() {
        println!("sigma_{} = {}", i + 1, fmt_f64(*v));
    }
    if let Some(p) = &config.csv {
        let mut csv = String::from("i,j,value\n");
        for i in 0..n {
            for j in 0..=i {
                let _ = writeln!(csv, "{i},{j},{}", fmt_f64(l[(i, j)]));
            }
        }
        write_file(p, &csv)?;
    }
    if !residuals_ok(&steklov, config.tolerances.solver_tol) {
        return Err(Failure {
            code: 3,
            message: "Steklov residuals exceed the solver tolerance".into(),
        });
    }
    Ok(0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: Option<f64>,
    pub status: String,
    pub message: Option<String>,
}

impl LowerBound {
    fn from(r: Result<f64, yamabe::YamabeError>) -> Self {
        match r {
            Ok(v) => Self {
                value: Some(v),
                status: "ok".into(),
                message: None,
            },
            Err(e) => Self {
                value: None,
                status: match e {
                    yamabe::YamabeError::NotApplicable(_) => "not_applicable",
                    _ => "hypothesis_violation",
                }
                .into(),
                message: Some(e.to_string()),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YamabeReport {
    pub quotient: QuotientReport,
    pub lambda1: f64,
    pub chain_202: ChainCheck,
    pub sigma1: Option<f64>,
    pub chain_305: Option<ChainCheck>,
    pub holder: ChainCheck,
    pub area_bound_201: Option<LowerBound>,
    pub boundary_bound_305: Option<LowerBound>,
}

fn yamabe_cmd(config: &RunConfig) -> Result<u8, Failure> {
    let s = scenario(config)?;
    if s.n < 3 {
        return Err(Failure::usage(format!("`{}` is two-dimensional; the quotients need n >= 3", s.name)));
    }
    let quad = RadialQuadrature::new(&s, config.level).map_err(jacspec::Error::from)?;
    let y = &config.yamabe;
    let phi = TestFunction::new(y.profile).scaled(y.amplitude);
    let err = |e: yamabe::YamabeError| Failure::from(jacspec::Error::from(e));
    let quotient = if s.has_boundary() {
        yamabe::y_quotient(&s, &quad, &phi)
    } else {
        yamabe::q_quotient(&s, &quad, &phi)
    }
    .map_err(err)?;
    let lambda1 = y
        .lambda1
        .or(s.analytic_lambda1)
        .ok_or_else(|| Failure::usage("--lambda1 is required for this scenario"))?;
    let sigma1 = y.sigma1.or(s.analytic_sigma1);
    let chain_305 = match (s.has_boundary(), sigma1) {
        (true, Some(sg)) => Some(yamabe::chain_check_305(&s, &quad, &phi, sg).map_err(err)?),
        _ => None,
    };
    let report = YamabeReport {
        chain_202: yamabe::chain_check_202(&s, &quad, &phi, lambda1).map_err(err)?,
        holder: yamabe::holder_check(&s, &quad, &phi).map_err(err)?,
        area_bound_201: y.sigma_invariant.map(|sv| {
            LowerBound::from(yamabe::area_bound_201(sv, lambda1, s.inf_scalar(), s.mean_curvature, s.n))
        }),
        boundary_bound_305: match (y.tau_invariant, sigma1) {
            (Some(t), Some(sg)) => Some(LowerBound::from(yamabe::boundary_bound_305(t, sg, s.inf_boundary_h(), s.n))),
            _ => None,
        },
        quotient,
        lambda1,
        sigma1,
        chain_305,
    };
    let json = write_report(config, &report)?;
    print!("{json}");
    if let Some(p) = &config.csv {
        let mut csv = String::from("r,phi,dphi\n");
        for &r in &quad.nodes {
            let _ = writeln!(csv, "{},{},{}", fmt_f64(r), fmt_f64(phi.value(r)), fmt_f64(phi.derivative(r)));
        }
        write_file(p, &csv)?;
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_report_round_trips() {
        let s = scenario_named("spherical_cap_b3", &BTreeMap::new()).unwrap();
        let forms = assemble(&mesh(&s, 2).unwrap()).unwrap();
        let result = robin_spectrum(&forms, 4).unwrap();
        let report = SpectrumReport {
            scenario: s.name.clone(),
            parameters: s.parameters.clone(),
            vertices: forms.k.nrows(),
            spectrum: result.dump(),
            morse_index: morse_index(&result).ok(),
            dirichlet_certificate: Some(certificate(&s, 2).unwrap()),
        };
        let json = to_json(&report);
        let back: SpectrumReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(to_json(&back), json);
    }
}
