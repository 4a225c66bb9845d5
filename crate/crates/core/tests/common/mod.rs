//! Independent reference values for the acceptance and oracle tests.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Radial metric `dr² + g(r)² dθ²` of a rotationally symmetric surface.
#[derive(Clone, Copy, Debug)]
pub enum Radial {
    /// `g = r`.
    Flat,
    /// `g = sin r`.
    Sphere,
}

impl Radial {
    fn log_derivative(self, r: f64) -> f64 {
        match self {
            Radial::Flat => 1.0 / r,
            Radial::Sphere => r.cos() / r.sin(),
        }
    }
}

/// Value at `r_max` of the regular solution of `u″ + (g′/g)u′ + μu = 0`,
/// `u(0) = 1`, integrated with classical RK4.
fn shoot(metric: Radial, mu: f64, r_max: f64, steps: usize) -> f64 {
    let r0 = 1e-6;
    let (mut r, mut u, mut v) = (r0, 1.0 - 0.25 * mu * r0 * r0, -0.5 * mu * r0);
    let h = (r_max - r0) / steps as f64;
    let f = |r: f64, u: f64, v: f64| (v, -metric.log_derivative(r) * v - mu * u);
    for _ in 0..steps {
        let (k1u, k1v) = f(r, u, v);
        let (k2u, k2v) = f(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        let (k3u, k3v) = f(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        let (k4u, k4v) = f(r + h, u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        r += h;
    }
    u
}

/// First Dirichlet eigenvalue of `−Δ` on the geodesic disk of radius
/// `r_max`, by bisection on the shooting residual within `[lo, hi]`.
pub fn radial_dirichlet_eigenvalue(metric: Radial, r_max: f64, mut lo: f64, mut hi: f64) -> f64 {
    let steps = 20_000;
    let mut f_lo = shoot(metric, lo, r_max, steps);
    assert!(f_lo * shoot(metric, hi, r_max, steps) < 0.0, "bracket does not straddle a root");
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let f_mid = shoot(metric, mid, r_max, steps);
        if f_mid * f_lo > 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `j₀,₁²`, the first Dirichlet eigenvalue of the unit disk.
pub fn disk_dirichlet() -> f64 {
    radial_dirichlet_eigenvalue(Radial::Flat, 1.0, 1.0, 10.0)
}

/// First Dirichlet eigenvalue of `−Δ` on the unit hemisphere.
pub fn hemisphere_dirichlet() -> f64 {
    radial_dirichlet_eigenvalue(Radial::Sphere, PI / 2.0, 0.5, 5.0)
}

/// Smallest `count` Steklov eigenvalues of the unit disk with boundary
/// weight `b`: harmonic polynomials `r^k cos kθ`, `r^k sin kθ` give
/// `k − b`.
pub fn disk_steklov(b: f64, count: usize) -> Vec<f64> {
    let mut out = vec![-b];
    let mut k = 1.0;
    while out.len() < count {
        out.push(k - b);
        out.push(k - b);
        k += 1.0;
    }
    out.truncate(count);
    out
}

/// `Q(1)` on the flat unit 3-ball: `S_Σ = 0`, `H^{∂Σ} = 2`.
pub fn unit_ball_q_of_one() -> f64 {
    16.0 * PI / (4.0 * PI / 3.0).powf(1.0 / 3.0)
}

/// `Y(1)` on the flat unit 3-ball.
pub fn unit_ball_y_of_one() -> f64 {
    8.0 * PI.sqrt()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
