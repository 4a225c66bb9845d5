//! Eigenvalue upper bounds, area and boundary-length inequalities, and the
//! residuals that identify their equality cases.
//!
//! Hypothesis constants (`a = inf S`, `b = inf H^{∂M}`, `χ`) are exact
//! scenario data. Spectral quantities and measured areas come in as
//! [`Measured`] values carrying a discretization error estimate, which sets
//! the default pass tolerance.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BoundaryKind, Scenario};

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("`{theorem:?}` needs a hypersurface with boundary")]
    NeedsBoundary { theorem: Theorem },
    #[error("`{theorem:?}` needs a closed hypersurface")]
    NeedsClosed { theorem: Theorem },
    #[error("`{theorem:?}` is stated for surfaces (n = 2)")]
    NeedsSurface { theorem: Theorem },
    #[error("missing evidence: {0}")]
    MissingEvidence(&'static str),
    #[error("area must be positive")]
    NonPositiveArea,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    Estimate1,
    Estimate2,
    CorollaryBS,
    Estimate3,
    T1,
    T2,
    T3,
    T4,
    T5,
    RigidityN,
}

impl Theorem {
    pub const ALL: [Theorem; 10] = [
        Theorem::Estimate1,
        Theorem::Estimate2,
        Theorem::CorollaryBS,
        Theorem::Estimate3,
        Theorem::T1,
        Theorem::T2,
        Theorem::T3,
        Theorem::T4,
        Theorem::T5,
        Theorem::RigidityN,
    ];
}

/// `−½(3H²/2 + a) − b·|∂Σ|/|Σ| + 2πχ/|Σ|`.
pub fn estimate1_rhs(a: f64, b: f64, h: f64, chi: i64, area: f64, blen: f64) -> f64 {
    -0.5 * (1.5 * h * h + a) - b * blen / area + 2.0 * PI * chi as f64 / area
}

/// `−½(H² + a) − b·|∂Σ|/|Σ| + 2πχ/|Σ|`.
pub fn estimate2_rhs(a: f64, b: f64, h: f64, chi: i64, area: f64, blen: f64) -> f64 {
    -0.5 * (h * h + a) - b * blen / area + 2.0 * PI * chi as f64 / area
}

/// Closed-surface form `−½(H² + a) + 2πχ/|Σ|`.
pub fn corollary_bs_rhs(a: f64, h: f64, chi: i64, area: f64) -> f64 {
    estimate2_rhs(a, 0.0, h, chi, area, 0.0)
}

/// `−(a/2 + 3H²/4)·|Σ|/|∂Σ| + 2πχ/|∂Σ| − b`.
pub fn estimate3_rhs(a: f64, b: f64, h: f64, chi: i64, area: f64, blen: f64) -> Result<f64, BoundsError> {
    if !(blen > 0.0) {
        return Err(BoundsError::NeedsBoundary {
            theorem: Theorem::Estimate3,
        });
    }
    Ok(-(0.5 * a + 0.75 * h * h) * area / blen + 2.0 * PI * chi as f64 / blen - b)
}

/// A computed quantity with its estimated discretization error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub error: f64,
}

impl Measured {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }
}

/// Everything the checks consume for one scenario at one refinement level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub level: u32,
    pub lambda1: Measured,
    pub sigma1: Option<Measured>,
    pub dirichlet_lambda1: Option<Measured>,
    /// Measured `|Σ|` and `|∂Σ|`.
    pub area: Measured,
    pub boundary_measure: Measured,
    pub chi: i64,
    pub genus: i64,
    pub boundary_loops: usize,
    /// Range of the sampled Gauss curvature.
    pub k_min: f64,
    pub k_max: f64,
    /// `∫ S_Σ` and `∮ H^{∂Σ,Σ}` by quadrature.
    pub integral_s_sigma: Measured,
    pub integral_boundary_h: Measured,
}

impl Evidence {
    /// `λ₁ᴰ` is certified positive when it exceeds ten times its own error
    /// estimate.
    pub fn dirichlet_certified(&self) -> bool {
        self.dirichlet_lambda1
            .is_some_and(|d| d.value > 0.0 && d.value > 10.0 * d.error)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Overrides the error-based pass tolerance when set.
    pub pass_tol: Option<f64>,
    pub eq_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pass_tol: None,
            eq_tol: 5e-3,
        }
    }
}

/// Smallest pass tolerance ever used.
pub const PASS_TOL_FLOOR: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `|A|² − H²/n`.
    pub umbilic_residual: f64,
    /// `|A|²`.
    pub geodesic_residual: f64,
    /// Spread of the sampled Gauss curvature.
    #[serde(rename = "constK_residual")]
    pub const_k_residual: f64,
    /// `|κ − b|`; absent on closed hypersurfaces.
    pub kappa_minus_b: Option<f64>,
    /// The Ricci identity of the theorem's equality case.
    pub ric_identity_residual: f64,
    /// `|II^{∂M}(N,N) − w|` where `w` is the boundary weight the equality
    /// case requires (`0`, or `−σ₁` for the Steklov bounds).
    pub boundary_weight_residual: Option<f64>,
}

impl Diagnostics {
    /// Whether every residual relevant to `theorem` is within `tol`.
    pub fn indicate_equality(&self, theorem: Theorem, tol: f64) -> bool {
        let ok = |x: f64| x.abs() <= tol;
        let opt = |x: Option<f64>| x.is_none_or(ok);
        let shape = match theorem {
            Theorem::Estimate2 | Theorem::CorollaryBS | Theorem::T1 | Theorem::T4 | Theorem::RigidityN => {
                ok(self.geodesic_residual)
            }
            _ => ok(self.umbilic_residual),
        };
        let kappa = match theorem {
            Theorem::Estimate1 | Theorem::Estimate2 | Theorem::T1 => opt(self.kappa_minus_b),
            _ => true,
        };
        shape
            && kappa
            && ok(self.const_k_residual)
            && ok(self.ric_identity_residual)
            && opt(self.boundary_weight_residual)
    }
}

/// Residuals of the equality conditions of `theorem`:
///
/// * Estimate1, T2, T3: `Ric(N,N) + λ₁ + H²/2`.
/// * Estimate2, CorollaryBS, T1: `Ric(N,N) + λ₁`.
/// * Estimate3, T5, RigidityN: `Ric(N,N) + H²/2`, with boundary weight `−σ₁`.
/// * T4: `Ric(N,N) − n`.
pub fn equality_diagnostics(scenario: &Scenario, evidence: &Evidence, theorem: Theorem) -> Diagnostics {
    let h = scenario.mean_curvature;
    let ric = scenario.ric_nn;
    let lambda1 = evidence.lambda1.value;
    let sigma1 = evidence.sigma1.map(|s| s.value);
    let steklov = matches!(theorem, Theorem::Estimate3 | Theorem::T5 | Theorem::RigidityN);
    let ric_identity_residual = match theorem {
        Theorem::Estimate1 | Theorem::T2 | Theorem::T3 => ric + lambda1 + 0.5 * h * h,
        Theorem::Estimate2 | Theorem::CorollaryBS | Theorem::T1 => ric + lambda1,
        Theorem::T4 => ric - scenario.n as f64,
        Theorem::Estimate3 | Theorem::T5 | Theorem::RigidityN => ric + 0.5 * h * h,
    }
    .abs();
    let target = if steklov { sigma1.map(|s| -s) } else { Some(0.0) };
    let boundary_weight_residual = target
        .filter(|_| scenario.has_boundary())
        .map(|t| (scenario.boundary_weight() - t).abs());
    Diagnostics {
        umbilic_residual: scenario.norm_a2 - h * h / scenario.n as f64,
        geodesic_residual: scenario.norm_a2,
        const_k_residual: evidence.k_max - evidence.k_min,
        kappa_minus_b: scenario
            .kappa_boundary
            .map(|k| (k - scenario.inf_boundary_h()).abs()),
        ric_identity_residual,
        boundary_weight_residual,
    }
}

/// Exact hypothesis constants of a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisConstants {
    pub a: f64,
    pub b: f64,
    pub chi: i64,
    pub area: f64,
    pub boundary_measure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub scenario: String,
    pub theorem: Theorem,
    #[serde(with = "crate::serde_nan")]
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs` for upper bounds on `lhs`; always oriented so that a
    /// valid inequality has `slack ≥ 0`.
    #[serde(with = "crate::serde_nan")]
    pub slack: f64,
    pub pass: bool,
    /// `|slack| ≤ eq_tol` on an applicable, passing check.
    pub equality: bool,
    pub status: Status,
    pub applicable: bool,
    pub gates: Vec<Gate>,
    /// Conclusions other than the inequality itself (topology).
    pub conclusions: Vec<Gate>,
    pub pass_tol: f64,
    pub eq_tol: f64,
    pub diagnostics: Diagnostics,
    /// Whether the diagnostics agree with the equality flag.
    pub diagnostics_agree: bool,
    pub hypothesis_constants: HypothesisConstants,
}

impl BoundReport {
    pub fn failed_gates(&self) -> Vec<&str> {
        self.gates
            .iter()
            .filter(|g| !g.holds)
            .map(|g| g.name.as_str())
            .collect()
    }
}

struct Check {
    theorem: Theorem,
    lhs: Measured,
    rhs: Measured,
    gates: Vec<Gate>,
    conclusions: Vec<Gate>,
}

fn gate(name: impl Into<String>, holds: bool) -> Gate {
    Gate {
        name: name.into(),
        holds,
    }
}

fn finish(scenario: &Scenario, evidence: &Evidence, tol: &Tolerances, c: Check) -> BoundReport {
    let slack = c.rhs.value - c.lhs.value;
    let pass_tol = tol
        .pass_tol
        .unwrap_or_else(|| (10.0 * (c.lhs.error + c.rhs.error)).max(PASS_TOL_FLOOR));
    let pass = slack >= -pass_tol;
    let applicable = c.gates.iter().all(|g| g.holds);
    let concluded = c.conclusions.iter().all(|g| g.holds);
    let equality = applicable && pass && slack.abs() <= tol.eq_tol;
    let status = match (applicable, pass && concluded) {
        (false, _) => Status::NotApplicable,
        (true, true) => Status::Pass,
        (true, false) => Status::Fail,
    };
    let diagnostics = equality_diagnostics(scenario, evidence, c.theorem);
    let diagnostics_agree = diagnostics.indicate_equality(c.theorem, tol.eq_tol) == equality;
    BoundReport {
        scenario: scenario.name.clone(),
        theorem: c.theorem,
        lhs: c.lhs.value,
        rhs: c.rhs.value,
        slack,
        pass,
        equality,
        status,
        applicable,
        gates: c.gates,
        conclusions: c.conclusions,
        pass_tol,
        eq_tol: tol.eq_tol,
        diagnostics,
        diagnostics_agree,
        hypothesis_constants: constants(scenario, evidence),
    }
}

fn constants(s: &Scenario, e: &Evidence) -> HypothesisConstants {
    HypothesisConstants {
        a: s.inf_scalar(),
        b: s.inf_boundary_h(),
        chi: s.exact_euler.unwrap_or(e.chi),
        area: s.exact_area.unwrap_or(e.area.value),
        boundary_measure: s.exact_boundary_measure.unwrap_or(e.boundary_measure.value),
    }
}

/// Smallest principal curvature of the ambient wall (all gallery walls are
/// umbilic).
fn wall_principal_curvature(s: &Scenario) -> Option<f64> {
    match s.ambient.boundary_kind {
        BoundaryKind::None => None,
        _ => Some(s.inf_boundary_h() / (s.ambient.dim - 1) as f64),
    }
}

fn require_surface(s: &Scenario, theorem: Theorem) -> Result<(), BoundsError> {
    if s.n == 2 {
        Ok(())
    } else {
        Err(BoundsError::NeedsSurface { theorem })
    }
}

fn upper_bound(scenario: &Scenario, evidence: &Evidence, tol: &Tolerances, theorem: Theorem) -> Result<BoundReport, BoundsError> {
    require_surface(scenario, theorem)?;
    let k = constants(scenario, evidence);
    if !(k.area > 0.0) {
        return Err(BoundsError::NonPositiveArea);
    }
    let h = scenario.mean_curvature;
    let mut gates = Vec::new();
    let (lhs, rhs) = match theorem {
        Theorem::Estimate1 => (
            evidence.lambda1,
            estimate1_rhs(k.a, k.b, h, k.chi, k.area, k.boundary_measure),
        ),
        Theorem::Estimate2 => (
            evidence.lambda1,
            estimate2_rhs(k.a, k.b, h, k.chi, k.area, k.boundary_measure),
        ),
        Theorem::CorollaryBS => {
            if scenario.has_boundary() {
                return Err(BoundsError::NeedsClosed { theorem });
            }
            (evidence.lambda1, corollary_bs_rhs(k.a, h, k.chi, k.area))
        }
        Theorem::Estimate3 => {
            if !scenario.has_boundary() {
                return Err(BoundsError::NeedsBoundary { theorem });
            }
            gates.push(gate("lambda1_dirichlet > 0 (certified)", evidence.dirichlet_certified()));
            let sigma = evidence
                .sigma1
                .unwrap_or(Measured::exact(f64::NAN));
            (sigma, estimate3_rhs(k.a, k.b, h, k.chi, k.area, k.boundary_measure)?)
        }
        _ => unreachable!("not an eigenvalue upper bound"),
    };
    Ok(finish(
        scenario,
        evidence,
        tol,
        Check {
            theorem,
            lhs,
            rhs: Measured::exact(rhs),
            gates,
            conclusions: Vec::new(),
        },
    ))
}

pub fn estimate1_check(s: &Scenario, e: &Evidence, tol: &Tolerances) -> Result<BoundReport, BoundsError> {
    upper_bound(s, e, tol, Theorem::Estimate1)
}

pub fn estimate2_check(s: &Scenario, e: &Evidence, tol: &Tolerances) -> Result<BoundReport, BoundsError> {
    upper_bound(s, e, tol, Theorem::Estimate2)
}

pub fn corollary_bs_check(s: &Scenario, e: &Evidence, tol: &Tolerances) -> Result<BoundReport, BoundsError> {
    upper_bound(s, e, tol, Theorem::CorollaryBS)
}

pub fn estimate3_check(s: &Scenario, e: &Evidence, tol: &Tolerances) -> Result<BoundReport, BoundsError> {
    upper_bound(s, e, tol, Theorem::Estimate3)
}

/// `n(n−1)|Σ| ≤ ∫S_Σ` under `S ≥ n(n+1)` and `λ₁ ≥ −n`.
pub fn t4_check(s: &Scenario, e: &Evidence, tol: &Tolerances) -> Result<BoundReport, BoundsError> {
    if s.has_boundary() {
        return Err(BoundsError::NeedsClosed {
            theorem: Theorem::T4,
        });
    }
    let n = s.n as f64;
    let lambda_tol = gate_tol(e.lambda1);
    let gates = vec![
        gate("S >= n(n+1)", s.inf_scalar() >= n * (n + 1.0)),
        gate("lambda1 >= -n", e.lambda1.value >= -n - lambda_tol),
    ];
    let factor = n * (n - 1.0);
    Ok(finish(
        s,
        e,
        tol,
        Check {
            theorem: Theorem::T4,
            lhs: Measured {
                value: factor * e.area.value,
                error: factor * e.area.error,
            },
            rhs: e.integral_s_sigma,
            gates,
            conclusions: Vec::new(),
        },
    ))
}

/// `2(n−1)|∂Σ| ≤ ∫S_Σ + 2∮H^{∂Σ,Σ}` under `S ≥ 0`, `H^{∂M} ≥ n`,
/// `λ₁ᴰ > 0` and `σ₁ ≥ −1`.
pub fn rigidity_n_check(s: &Scenario, e: &Evidence, tol: &Tolerances) -> Result<BoundReport, BoundsError> {
    if !s.has_boundary() {
        return Err(BoundsError::NeedsBoundary {
            theorem: Theorem::RigidityN,
        });
    }
    let n = s.n as f64;
    let sigma = e.sigma1.ok_or(BoundsError::MissingEvidence("sigma1"))?;
    let gates = vec![
        gate("S >= 0", s.inf_scalar() >= 0.0),
        gate("H_dM >= n", s.inf_boundary_h() >= n),
        gate("lambda1_dirichlet > 0 (certified)", e.dirichlet_certified()),
        gate("sigma1 >= -1", sigma.value >= -1.0 - gate_tol(sigma)),
    ];
    let factor = 2.0 * (n - 1.0);
    Ok(finish(
        s,
        e,
        tol,
        Check {
            theorem: Theorem::RigidityN,
            lhs: Measured {
                value: factor * e.boundary_measure.value,
                error: factor * e.boundary_measure.error,
            },
            rhs: Measured {
                value: e.integral_s_sigma.value + 2.0 * e.integral_boundary_h.value,
                error: e.integral_s_sigma.error + 2.0 * e.integral_boundary_h.error,
            },
            gates,
            conclusions: Vec::new(),
        },
    ))
}

/// Tolerance for hypotheses of the form `λ ≥ c` evaluated on a computed `λ`.
fn gate_tol(m: Measured) -> f64 {
    (10.0 * m.error).max(PASS_TOL_FLOOR)
}

fn area_theorem(s: &Scenario, e: &Evidence, tol: &Tolerances, theorem: Theorem) -> Result<BoundReport, BoundsError> {
    require_surface(s, theorem)?;
    let closed = !s.has_boundary();
    let h = s.mean_curvature;
    let lambda_ok = |c: f64| gate("lambda1 >= -2", e.lambda1.value >= c - gate_tol(e.lambda1));
    let genus0 = gate("genus = 0", e.genus == 0);
    let (gates, conclusions, lhs, bound) = match theorem {
        Theorem::T1 => {
            if closed {
                return Err(BoundsError::NeedsBoundary { theorem });
            }
            let gates = vec![
                gate("Ric_M >= 2", s.ambient.ricci() >= 2.0),
                gate("II_dM >= 0", wall_principal_curvature(s).is_some_and(|k| k >= 0.0)),
                lambda_ok(-2.0),
            ];
            let conclusions = vec![genus0, gate("one boundary component", e.boundary_loops == 1)];
            (gates, conclusions, e.area, 2.0 * PI)
        }
        Theorem::T2 | Theorem::T3 => {
            if !closed {
                return Err(BoundsError::NeedsClosed { theorem });
            }
            let (a_min, h_min, names) = if theorem == Theorem::T2 {
                (0.0, 2.0, ("S >= 0", "H >= 2"))
            } else {
                (-6.0, 2.0 * 2f64.sqrt(), ("S >= -6", "H >= 2*sqrt(2)"))
            };
            let gates = vec![
                gate(names.0, s.inf_scalar() >= a_min),
                gate(names.1, h >= h_min - 1e-12),
                lambda_ok(-2.0),
            ];
            (gates, vec![genus0], e.area, 4.0 * PI)
        }
        Theorem::T5 => {
            if closed {
                return Err(BoundsError::NeedsBoundary { theorem });
            }
            let sigma = e.sigma1.ok_or(BoundsError::MissingEvidence("sigma1"))?;
            let gates = vec![
                gate("Ric_M >= 0", s.ambient.ricci() >= 0.0),
                gate("II_dM >= 1", wall_principal_curvature(s).is_some_and(|k| k >= 1.0)),
                gate("lambda1_dirichlet > 0 (certified)", e.dirichlet_certified()),
                gate("sigma1 >= -1", sigma.value >= -1.0 - gate_tol(sigma)),
            ];
            let conclusions = vec![genus0, gate("one boundary component", e.boundary_loops == 1)];
            (gates, conclusions, e.boundary_measure, 2.0 * PI)
        }
        _ => unreachable!("not an area theorem"),
    };
    Ok(finish(
        s,
        e,
        tol,
        Check {
            theorem,
            lhs,
            rhs: Measured::exact(bound),
            gates,
            conclusions,
        },
    ))
}

pub fn t1_check(s: &Scenario, e: &Evidence, tol: &Tolerances) -> Result<BoundReport, BoundsError> {
    area_theorem(s, e, tol, Theorem::T1)
}

pub fn t2_check(s: &Scenario, e: &Evidence, tol: &Tolerances) -> Result<BoundReport, BoundsError> {
    area_theorem(s, e, tol, Theorem::T2)
}

pub fn t3_check(s: &Scenario, e: &Evidence, tol: &Tolerances) -> Result<BoundReport, BoundsError> {
    area_theorem(s, e, tol, Theorem::T3)
}

pub fn t5_check(s: &Scenario, e: &Evidence, tol: &Tolerances) -> Result<BoundReport, BoundsError> {
    area_theorem(s, e, tol, Theorem::T5)
}

pub fn check(theorem: Theorem, s: &Scenario, e: &Evidence, tol: &Tolerances) -> Result<BoundReport, BoundsError> {
    match theorem {
        Theorem::Estimate1 => estimate1_check(s, e, tol),
        Theorem::Estimate2 => estimate2_check(s, e, tol),
        Theorem::CorollaryBS => corollary_bs_check(s, e, tol),
        Theorem::Estimate3 => estimate3_check(s, e, tol),
        Theorem::T1 => t1_check(s, e, tol),
        Theorem::T2 => t2_check(s, e, tol),
        Theorem::T3 => t3_check(s, e, tol),
        Theorem::T4 => t4_check(s, e, tol),
        Theorem::T5 => t5_check(s, e, tol),
        Theorem::RigidityN => rigidity_n_check(s, e, tol),
    }
}

/// Every theorem whose setting (dimension, closed or bounded) matches the
/// scenario. Hypothesis failures are reported as not applicable.
pub fn theorem_suite(s: &Scenario, e: &Evidence, tol: &Tolerances) -> Vec<BoundReport> {
    Theorem::ALL
        .iter()
        .filter_map(|&t| check(t, s, e, tol).ok())
        .collect()
}

#[cfg(test)]
mod tests;
