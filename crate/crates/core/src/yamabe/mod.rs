//! Conformal quotients on the higher-dimensional gallery members and the
//! area and boundary lower bounds they feed.
//!
//! Test functions are radial in the quadrature variable `r` (Euclidean
//! radius on flat balls, geodesic distance from the pole on sphere regions),
//! so `|∇φ| = |φ′(r)|` in both cases.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{RadialQuadrature, Scenario};

#[derive(Debug, Error, PartialEq)]
pub enum YamabeError {
    #[error("conformal quotients need n >= 3, got n = {0}")]
    Dimension(usize),
    #[error("test function vanishes identically")]
    ZeroFunction,
    #[error("test function vanishes on the boundary")]
    ZeroOnBoundary,
    #[error("scenario `{0}` is closed; the boundary quotient is undefined")]
    Closed(String),
    #[error("quadrature belongs to `{quadrature}`, not `{scenario}`")]
    QuadratureMismatch { scenario: String, quadrature: String },
    #[error("not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Constant,
    /// `1 + c r²`.
    Quadratic { c: f64 },
    /// `e^{−r²}`.
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub profile: Profile,
    pub amplitude: f64,
}

impl TestFunction {
    pub fn constant() -> Self {
        Self::new(Profile::Constant)
    }

    pub fn new(profile: Profile) -> Self {
        Self {
            profile,
            amplitude: 1.0,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            amplitude: self.amplitude * factor,
            ..self
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.amplitude
            * match self.profile {
                Profile::Constant => 1.0,
                Profile::Quadratic { c } => 1.0 + c * r * r,
                Profile::Gaussian => (-r * r).exp(),
            }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.amplitude
            * match self.profile {
                Profile::Constant => 0.0,
                Profile::Quadratic { c } => 2.0 * c * r,
                Profile::Gaussian => -2.0 * r * (-r * r).exp(),
            }
    }
}

/// `a_n = 4(n−1)/(n−2)`.
pub fn a_n(n: usize) -> Result<f64, YamabeError> {
    if n < 3 {
        return Err(YamabeError::Dimension(n));
    }
    Ok(4.0 * (n - 1) as f64 / (n - 2) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Denominators {
    #[serde(rename = "interior_Lp")]
    pub interior_lp: f64,
    #[serde(rename = "boundary_Lp")]
    pub boundary_lp: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub scenario: String,
    pub phi: TestFunction,
    pub a_n: f64,
    #[serde(rename = "Q_value")]
    pub q_value: f64,
    #[serde(rename = "Y_value")]
    pub y_value: Option<f64>,
    pub numerator: f64,
    pub denominators: Denominators,
}

fn check_inputs(s: &Scenario, quad: &RadialQuadrature) -> Result<f64, YamabeError> {
    let a = a_n(s.n)?;
    if quad.scenario != s.name {
        return Err(YamabeError::QuadratureMismatch {
            scenario: s.name.clone(),
            quadrature: quad.scenario.clone(),
        });
    }
    Ok(a)
}

/// `∫(a_n|∇φ|² + S_Σφ²) + 2∮H^{∂Σ,Σ}φ²`.
fn numerator(s: &Scenario, quad: &RadialQuadrature, phi: &TestFunction, a: f64) -> f64 {
    let bulk = quad.integrate(|r| {
        let (v, d) = (phi.value(r), phi.derivative(r));
        a * d * d + s.s_sigma * v * v
    });
    let h = s.kappa_boundary.unwrap_or(0.0);
    bulk + 2.0 * h * quad.integrate_boundary(|r| phi.value(r).powi(2))
}

/// `(∫|φ|^{2n/(n−2)})^{(n−2)/n}`.
fn interior_lp(quad: &RadialQuadrature, phi: &TestFunction, n: usize) -> f64 {
    let p = 2.0 * n as f64 / (n - 2) as f64;
    quad.integrate(|r| phi.value(r).abs().powf(p)).powf(2.0 / p)
}

/// `(∮|φ|^{2(n−1)/(n−2)})^{(n−2)/(n−1)}`.
fn boundary_lp(quad: &RadialQuadrature, phi: &TestFunction, n: usize) -> f64 {
    let p = 2.0 * (n - 1) as f64 / (n - 2) as f64;
    quad.integrate_boundary(|r| phi.value(r).abs().powf(p))
        .powf(2.0 / p)
}

pub fn q_quotient(s: &Scenario, quad: &RadialQuadrature, phi: &TestFunction) -> Result<QuotientReport, YamabeError> {
    let a = check_inputs(s, quad)?;
    let den = interior_lp(quad, phi, s.n);
    if !(den > 0.0) {
        return Err(YamabeError::ZeroFunction);
    }
    let num = numerator(s, quad, phi, a);
    Ok(QuotientReport {
        scenario: s.name.clone(),
        phi: *phi,
        a_n: a,
        q_value: num / den,
        y_value: None,
        numerator: num,
        denominators: Denominators {
            interior_lp: den,
            boundary_lp: None,
        },
    })
}

/// Same numerator as [`q_quotient`] over the boundary norm; the report
/// carries both quotients.
pub fn y_quotient(s: &Scenario, quad: &RadialQuadrature, phi: &TestFunction) -> Result<QuotientReport, YamabeError> {
    check_inputs(s, quad)?;
    if !s.has_boundary() || quad.closed {
        return Err(YamabeError::Closed(s.name.clone()));
    }
    let mut report = q_quotient(s, quad, phi)?;
    let den = boundary_lp(quad, phi, s.n);
    if !(den > 0.0) {
        return Err(YamabeError::ZeroOnBoundary);
    }
    report.y_value = Some(report.numerator / den);
    report.denominators.boundary_lp = Some(den);
    Ok(report)
}

/// Area lower bound `(σ / (2λ₁ + a + H²))^{n/2}`.
pub fn area_bound_201(sigma_invariant: f64, lambda1: f64, a: f64, h: f64, n: usize) -> Result<f64, YamabeError> {
    if sigma_invariant >= 0.0 {
        return Err(YamabeError::NotApplicable("sigma invariant is not negative"));
    }
    let den = 2.0 * lambda1 + a + h * h;
    if den >= 0.0 {
        return Err(YamabeError::HypothesisViolation(format!(
            "2*lambda1 + a + H^2 = {den} is not negative"
        )));
    }
    Ok((sigma_invariant / den).powf(n as f64 / 2.0))
}

/// Boundary-measure lower bound `(τ / 2(σ₁ + b))^{n−1}`.
pub fn boundary_bound_305(tau_invariant: f64, sigma1: f64, b: f64, n: usize) -> Result<f64, YamabeError> {
    if tau_invariant >= 0.0 {
        return Err(YamabeError::NotApplicable("tau invariant is not negative"));
    }
    let den = 2.0 * (sigma1 + b);
    if den >= 0.0 {
        return Err(YamabeError::HypothesisViolation(format!(
            "sigma1 + b = {} is not negative",
            sigma1 + b
        )));
    }
    Ok((tau_invariant / den).powi(n as i32 - 1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tol: f64,
    pub holds: bool,
    pub hypotheses_hold: bool,
}

impl ChainCheck {
    fn new(lhs: f64, rhs: f64, hypotheses_hold: bool) -> Self {
        let tol = 1e-9 * lhs.abs().max(rhs.abs()).max(1.0);
        let slack = rhs - lhs;
        Self {
            lhs,
            rhs,
            slack,
            tol,
            holds: slack >= -tol,
            hypotheses_hold,
        }
    }
}

/// `(2λ₁ + a + H²)∫φ² ≤ Q(φ)·(∫φ^{2n/(n−2)})^{(n−2)/n}`, the right side
/// being the quotient's numerator.
pub fn chain_check_202(
    s: &Scenario,
    quad: &RadialQuadrature,
    phi: &TestFunction,
    lambda1: f64,
) -> Result<ChainCheck, YamabeError> {
    let q = q_quotient(s, quad, phi)?;
    let h = s.mean_curvature;
    let l2 = quad.integrate(|r| phi.value(r).powi(2));
    let lhs = (2.0 * lambda1 + s.inf_scalar() + h * h) * l2;
    Ok(ChainCheck::new(lhs, q.q_value * q.denominators.interior_lp, s.inf_boundary_h() >= 0.0))
}

/// `2(σ₁ + b)∮φ² ≤ Y(φ)·(∮φ^{2(n−1)/(n−2)})^{(n−2)/(n−1)}`.
pub fn chain_check_305(
    s: &Scenario,
    quad: &RadialQuadrature,
    phi: &TestFunction,
    sigma1: f64,
) -> Result<ChainCheck, YamabeError> {
    let y = y_quotient(s, quad, phi)?;
    let l2 = quad.integrate_boundary(|r| phi.value(r).powi(2));
    let lhs = 2.0 * (sigma1 + s.inf_boundary_h()) * l2;
    let rhs = y.y_value.unwrap_or(f64::NAN) * y.denominators.boundary_lp.unwrap_or(f64::NAN);
    Ok(ChainCheck::new(lhs, rhs, s.inf_scalar() >= 0.0))
}

/// Hölder step `∫φ² ≤ |Σ|^{2/n}(∫φ^{2n/(n−2)})^{(n−2)/n}`.
pub fn holder_check(s: &Scenario, quad: &RadialQuadrature, phi: &TestFunction) -> Result<ChainCheck, YamabeError> {
    check_inputs(s, quad)?;
    let lhs = quad.integrate(|r| phi.value(r).powi(2));
    let rhs = quad.volume().powf(2.0 / s.n as f64) * interior_lp(quad, phi, s.n);
    Ok(ChainCheck::new(lhs, rhs, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_scenario, GalleryId};
    use std::f64::consts::PI;

    fn setup(id: GalleryId, level: u32) -> (Scenario, RadialQuadrature) {
        let s = make_scenario(id.name(), &id.default_params()).unwrap();
        let q = RadialQuadrature::new(&s, level).unwrap();
        (s, q)
    }

    #[test]
    fn constant_on_flat_ball() {
        let (s, q) = setup(GalleryId::EquatorialB3InB4, 3);
        let r = y_quotient(&s, &q, &TestFunction::constant()).unwrap();
        assert!((r.a_n - 8.0).abs() < 1e-15);
        let want_q = 16.0 * PI / (4.0 * PI / 3.0).powf(1.0 / 3.0);
        assert!((r.q_value - want_q).abs() < 1e-12 * want_q);
        assert!((r.y_value.unwrap() - 8.0 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn constant_on_hemisphere() {
        let (s, q) = setup(GalleryId::HemisphereS4plus, 4);
        let r = q_quotient(&s, &q, &TestFunction::constant()).unwrap();
        let want = 6.0 * PI * PI / (PI * PI).powf(1.0 / 3.0);
        assert!((r.q_value - want).abs() < 1e-10 * want);
        let c = chain_check_202(&s, &q, &TestFunction::constant(), -3.0).unwrap();
        assert!(c.holds && c.hypotheses_hold && c.slack.abs() < 1e-9);
    }

    #[test]
    fn rescaling_leaves_quotients_unchanged() {
        let (s, q) = setup(GalleryId::EquatorialB3InB4, 4);
        let phi = TestFunction::new(Profile::Quadratic { c: 0.5 });
        let a = y_quotient(&s, &q, &phi).unwrap();
        let b = y_quotient(&s, &q, &phi.scaled(2.0)).unwrap();
        assert!((a.q_value - b.q_value).abs() < 1e-10 * a.q_value.abs());
        assert!((a.y_value.unwrap() - b.y_value.unwrap()).abs() < 1e-10 * a.y_value.unwrap().abs());
        assert!(chain_check_202(&s, &q, &phi, s.analytic_lambda1.unwrap()).unwrap().holds);
        assert!(chain_check_305(&s, &q, &phi, -1.0).unwrap().holds);
    }

    #[test]
    fn error_paths() {
        let (s, q) = setup(GalleryId::EquatorialS3InS4, 2);
        assert_eq!(
            y_quotient(&s, &q, &TestFunction::constant()),
            Err(YamabeError::Closed(s.name.clone()))
        );
        assert_eq!(
            q_quotient(&s, &q, &TestFunction::constant().scaled(0.0)),
            Err(YamabeError::ZeroFunction)
        );
        let (b, bq) = setup(GalleryId::EquatorialB3InB4, 2);
        let vanishing = TestFunction::new(Profile::Quadratic { c: -1.0 });
        assert_eq!(y_quotient(&b, &bq, &vanishing), Err(YamabeError::ZeroOnBoundary));
        assert!(matches!(q_quotient(&b, &q, &TestFunction::constant()), Err(YamabeError::QuadratureMismatch { .. })));
        let disk = make_scenario("flat_disk_b3", &Default::default()).unwrap();
        assert_eq!(q_quotient(&disk, &q, &TestFunction::constant()), Err(YamabeError::Dimension(2)));
    }

    #[test]
    fn algebraic_bounds() {
        assert!((area_bound_201(-1.0, -2.0, 0.0, 0.0, 3).unwrap() - 0.125).abs() < 1e-15);
        assert!(matches!(area_bound_201(-1.0, -1.0, 2.0, 0.0, 3), Err(YamabeError::HypothesisViolation(_))));
        assert!(matches!(area_bound_201(0.5, -2.0, 0.0, 0.0, 3), Err(YamabeError::NotApplicable(_))));
        assert!((boundary_bound_305(-2.0, -2.0, 1.0, 3).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(boundary_bound_305(-2.0, -1.0, 1.0, 3), Err(YamabeError::HypothesisViolation(_))));
        assert!(matches!(boundary_bound_305(0.0, -2.0, 1.0, 3), Err(YamabeError::NotApplicable(_))));
    }

    #[test]
    fn holder_step() {
        let (s, q) = setup(GalleryId::EquatorialB3InB4, 4);
        for phi in [
            TestFunction::constant(),
            TestFunction::new(Profile::Gaussian),
            TestFunction::new(Profile::Quadratic { c: 3.0 }),
        ] {
            assert!(holder_check(&s, &q, &phi).unwrap().holds);
        }
    }
}
