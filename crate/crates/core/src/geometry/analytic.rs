//! Closed-form spectral values of the flat gallery members, obtained from the
//! radial transcendental equations.

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    debug_assert!(flo * f(hi) < 0.0, "root not bracketed");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || hi - lo < 1e-16 * mid.abs().max(1.0) {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// Power series of I_0, I_1 and J_0; all converge quickly for |x| < 4.
fn bessel_i0(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for m in 1..60 {
        term *= y / (m * m) as f64;
        sum += term;
    }
    sum
}

fn bessel_i1(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let (mut term, mut sum) = (0.5 * x, 0.5 * x);
    for m in 1..60 {
        term *= y / (m * (m + 1)) as f64;
        sum += term;
    }
    sum
}

fn bessel_j0(x: f64) -> f64 {
    let y = -0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for m in 1..80 {
        term *= y / (m * m) as f64;
        sum += term;
    }
    sum
}

/// First eigenvalue of `Δu + λu = 0` on the unit disk with `∂_r u = u` on the
/// rim: `λ = −k²` with `k I₁(k) = I₀(k)`.
pub fn disk_robin_lambda1() -> f64 {
    let k = bisect(|k| k * bessel_i1(k) - bessel_i0(k), 0.5, 3.0);
    -k * k
}

/// First Dirichlet eigenvalue of the Laplacian on the unit disk, `j₀,₁²`.
pub fn disk_dirichlet_lambda1() -> f64 {
    let j = bisect(bessel_j0, 2.0, 3.0);
    j * j
}

/// First Robin eigenvalue of the unit 3-ball with `∂_r u = u`: the radial
/// eigenfunction is `sinh(kr)/r`, so `k coth k = 2` and `λ = −k²`.
pub fn ball_robin_lambda1() -> f64 {
    let k = bisect(|k| k / k.tanh() - 2.0, 0.5, 5.0);
    -k * k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_values() {
        // scipy: brentq(k*i1(k)-i0(k)), jn_zeros(0,1)[0]**2
        assert!((disk_robin_lambda1() + 2.586562859178093).abs() < 1e-12);
        assert!((disk_dirichlet_lambda1() - 5.783185962946783).abs() < 1e-12);
    }

    #[test]
    fn ball_value() {
        assert!((ball_robin_lambda1() + 3.667255824496625).abs() < 1e-12);
    }
}
