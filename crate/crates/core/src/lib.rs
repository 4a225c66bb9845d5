//! Spectral geometry of the Jacobi operator `J = Δ + Ric(N,N) + |A|²` on
//! constant-mean-curvature hypersurfaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] holds the gallery of canonical scenarios, their intrinsic
//!   triangulations and quadrature rules.
//! * [`fem`] assembles the piecewise-linear stiffness, mass, potential and
//!   boundary matrices that realise the second-variation form.
//! * [`spectra`] solves the Robin, Dirichlet and Jacobi–Steklov eigenproblems
//!   and builds the discrete Dirichlet-to-Neumann map.
//! * [`bounds`] evaluates the eigenvalue upper bounds and area/boundary
//!   rigidity inequalities and reports equality diagnostics.
//! * [`yamabe`] evaluates Escobar-type quotients and the related area and
//!   boundary lower bounds in dimension `n ≥ 3`.
//! * [`verify`] runs whole-scenario checks and convergence studies.

pub mod bounds;
pub mod fem;
pub mod geometry;
pub mod sparse;
pub mod spectra;
pub mod verify;
pub mod yamabe;

mod error;

pub use error::{Error, Result};

/// Formats a float with 17 significant digits, the precision used by every
/// text export in this crate.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes non-finite floats as `null` so JSON documents round-trip.
pub(crate) mod serde_nan {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}
