use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::analytic::{ball_robin_lambda1, disk_dirichlet_lambda1, disk_robin_lambda1};
use super::GeometryError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    None,
    TotallyGeodesicWall,
    UnitSphereWall,
}

/// A space form `M^{dim}` of constant sectional curvature `c`, possibly cut
/// off by a wall.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmbientSpace {
    pub dim: usize,
    pub c: f64,
    #[serde(rename = "scalar_S")]
    pub scalar_s: f64,
    pub boundary_kind: BoundaryKind,
    /// `II^{∂M}(N,N)` along the hypersurface boundary.
    #[serde(rename = "boundary_II_NN")]
    pub boundary_ii_nn: Option<f64>,
    /// Trace mean curvature `H^{∂M}` of the wall.
    #[serde(rename = "boundary_H")]
    pub boundary_h: Option<f64>,
}

impl AmbientSpace {
    pub fn space_form(dim: usize, c: f64, boundary_kind: BoundaryKind) -> Self {
        let (ii, h) = match boundary_kind {
            BoundaryKind::None => (None, None),
            BoundaryKind::TotallyGeodesicWall => (Some(0.0), Some(0.0)),
            BoundaryKind::UnitSphereWall => (Some(1.0), Some((dim - 1) as f64)),
        };
        Self {
            dim,
            c,
            scalar_s: (dim * (dim - 1)) as f64 * c,
            boundary_kind,
            boundary_ii_nn: ii,
            boundary_h: h,
        }
    }

    /// `Ric_M(v,v)` for any unit vector `v`.
    pub fn ricci(&self) -> f64 {
        (self.dim - 1) as f64 * self.c
    }

    fn check(&self) -> Result<(), GeometryError> {
        let s = (self.dim * (self.dim - 1)) as f64 * self.c;
        if self.scalar_s != s {
            return Err(GeometryError::Invariant(format!(
                "ambient scalar curvature {} != dim(dim-1)c = {s}",
                self.scalar_s
            )));
        }
        match self.boundary_kind {
            BoundaryKind::None => {}
            BoundaryKind::TotallyGeodesicWall => {
                if self.boundary_ii_nn != Some(0.0) || self.boundary_h != Some(0.0) {
                    return Err(GeometryError::Invariant(
                        "totally geodesic wall must have II = H = 0".into(),
                    ));
                }
            }
            BoundaryKind::UnitSphereWall => {
                if self.c != 0.0
                    || self.boundary_ii_nn != Some(1.0)
                    || self.boundary_h != Some((self.dim - 1) as f64)
                {
                    return Err(GeometryError::Invariant(
                        "unit sphere wall must sit in flat space with II = 1, H = dim-1".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GalleryId {
    CliffordTorus,
    EquatorialSphereS3,
    RoundSphereR3,
    GeodesicSphereH3,
    HemisphereS3plus,
    FlatDiskB3,
    SphericalCapB3,
    EquatorialS3InS4,
    EquatorialB3InB4,
    HemisphereS4plus,
}

impl GalleryId {
    pub const ALL: [GalleryId; 10] = [
        GalleryId::CliffordTorus,
        GalleryId::EquatorialSphereS3,
        GalleryId::RoundSphereR3,
        GalleryId::GeodesicSphereH3,
        GalleryId::HemisphereS3plus,
        GalleryId::FlatDiskB3,
        GalleryId::SphericalCapB3,
        GalleryId::EquatorialS3InS4,
        GalleryId::EquatorialB3InB4,
        GalleryId::HemisphereS4plus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GalleryId::CliffordTorus => "clifford_torus",
            GalleryId::EquatorialSphereS3 => "equatorial_sphere_s3",
            GalleryId::RoundSphereR3 => "round_sphere_r3",
            GalleryId::GeodesicSphereH3 => "geodesic_sphere_h3",
            GalleryId::HemisphereS3plus => "hemisphere_s3plus",
            GalleryId::FlatDiskB3 => "flat_disk_b3",
            GalleryId::SphericalCapB3 => "spherical_cap_b3",
            GalleryId::EquatorialS3InS4 => "equatorial_s3_in_s4",
            GalleryId::EquatorialB3InB4 => "equatorial_b3_in_b4",
            GalleryId::HemisphereS4plus => "hemisphere_s4plus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == name)
    }

    /// Name of the single shape parameter, if the scenario has one.
    pub fn parameter(self) -> Option<&'static str> {
        match self {
            GalleryId::RoundSphereR3 => Some("R"),
            GalleryId::GeodesicSphereH3 => Some("r"),
            GalleryId::SphericalCapB3 => Some("rho"),
            _ => None,
        }
    }

    /// Parameters of the model case used by the verification suite: unit
    /// sphere, `coth r = √2`, `ρ = 1`.
    pub fn default_params(self) -> BTreeMap<String, f64> {
        let mut p = BTreeMap::new();
        match self {
            GalleryId::RoundSphereR3 => {
                p.insert("R".to_string(), 1.0);
            }
            GalleryId::GeodesicSphereH3 => {
                p.insert("r".to_string(), (1.0 / SQRT_2).atanh());
            }
            GalleryId::SphericalCapB3 => {
                p.insert("rho".to_string(), 1.0);
            }
            _ => {}
        }
        p
    }

    pub fn is_quadrature_only(self) -> bool {
        matches!(
            self,
            GalleryId::EquatorialS3InS4 | GalleryId::EquatorialB3InB4 | GalleryId::HemisphereS4plus
        )
    }
}

impl fmt::Display for GalleryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Intrinsic model of the hypersurface, used for meshing and quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    /// Round 2-sphere of the given radius.
    Sphere { radius: f64 },
    /// Geodesic disk of angular radius `angle` on a round 2-sphere.
    Cap { radius: f64, angle: f64 },
    /// Square flat torus.
    FlatTorus { side: f64 },
    /// Flat disk.
    FlatDisk { radius: f64 },
    /// Flat `n`-ball (quadrature only).
    FlatBall { radius: f64 },
    /// Geodesic ball of radius `angle` on the unit `n`-sphere; `angle = π`
    /// is the whole sphere (quadrature only).
    SphereRegion { angle: f64 },
}

/// Closed-form description of a CMC hypersurface in a space form.
///
/// Every curvature is constant on the gallery members, so the fields are
/// plain scalars. `H` is the trace of the shape operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub id: GalleryId,
    pub n: usize,
    pub ambient: AmbientSpace,
    #[serde(rename = "H")]
    pub mean_curvature: f64,
    #[serde(rename = "normA2")]
    pub norm_a2: f64,
    #[serde(rename = "ricNN")]
    pub ric_nn: f64,
    #[serde(rename = "K_intrinsic")]
    pub k_intrinsic: f64,
    #[serde(rename = "S_sigma")]
    pub s_sigma: f64,
    /// Geodesic curvature of `∂Σ` in `Σ` (for `n ≥ 3`: trace mean curvature
    /// `H^{∂Σ,Σ}`).
    pub kappa_boundary: Option<f64>,
    pub exact_area: Option<f64>,
    pub exact_boundary_measure: Option<f64>,
    pub exact_euler: Option<i64>,
    pub analytic_lambda1: Option<f64>,
    pub analytic_sigma1: Option<f64>,
    pub analytic_dirichlet_lambda1: Option<f64>,
    pub parameters: BTreeMap<String, f64>,
    pub umbilical: bool,
    pub genus: usize,
    pub boundary_components: usize,
    pub model: Model,
}

impl Scenario {
    /// Jacobi potential `q = Ric_M(N,N) + |A|²`.
    pub fn potential(&self) -> f64 {
        self.ric_nn + self.norm_a2
    }

    pub fn has_boundary(&self) -> bool {
        self.boundary_components > 0
    }

    /// `II^{∂M}(N,N)`; zero for closed hypersurfaces.
    pub fn boundary_weight(&self) -> f64 {
        self.ambient.boundary_ii_nn.unwrap_or(0.0)
    }

    pub fn quadrature_only(&self) -> bool {
        self.id.is_quadrature_only()
    }

    /// Exact infimum of the ambient scalar curvature.
    pub fn inf_scalar(&self) -> f64 {
        self.ambient.scalar_s
    }

    /// Exact infimum of the wall mean curvature; zero when there is no wall.
    pub fn inf_boundary_h(&self) -> f64 {
        self.ambient.boundary_h.unwrap_or(0.0)
    }

    pub fn check_invariants(&self) -> Result<(), GeometryError> {
        self.ambient.check()?;
        let sy = ricci_from_gauss(
            self.ambient.scalar_s,
            self.s_sigma,
            self.mean_curvature,
            self.norm_a2,
        );
        if (sy - self.ric_nn).abs() > 1e-12 * (1.0 + self.ric_nn.abs()) {
            return Err(GeometryError::Invariant(format!(
                "Schoen-Yau identity fails: ½(S - S_Σ + H² - |A|²) = {sy}, Ric(N,N) = {}",
                self.ric_nn
            )));
        }
        if (self.ambient.ricci() - self.ric_nn).abs() > 1e-12 * (1.0 + self.ric_nn.abs()) {
            return Err(GeometryError::Invariant(
                "Ric(N,N) disagrees with the space form".into(),
            ));
        }
        let h2n = self.mean_curvature.powi(2) / self.n as f64;
        let tol = 1e-12 * (1.0 + self.norm_a2);
        if self.norm_a2 < h2n - tol {
            return Err(GeometryError::Invariant("|A|² < H²/n".into()));
        }
        if ((self.norm_a2 - h2n).abs() <= tol) != self.umbilical {
            return Err(GeometryError::Invariant(
                "umbilical flag disagrees with |A|² = H²/n".into(),
            ));
        }
        let s_from_k = (self.n * (self.n - 1)) as f64 * self.k_intrinsic;
        if (s_from_k - self.s_sigma).abs() > 1e-12 * (1.0 + self.s_sigma.abs()) {
            return Err(GeometryError::Invariant(
                "S_Σ != n(n-1)K for a constant-curvature hypersurface".into(),
            ));
        }
        if self.has_boundary() != (self.ambient.boundary_kind != BoundaryKind::None) {
            return Err(GeometryError::Invariant(
                "boundary components and ambient wall disagree".into(),
            ));
        }
        Ok(())
    }
}

/// Twice-traced Gauss equation: `Ric_M(N,N) = ½(S − S_Σ + H² − |A|²)`.
pub fn ricci_from_gauss(s: f64, s_sigma: f64, h: f64, norm_a2: f64) -> f64 {
    0.5 * (s - s_sigma + h * h - norm_a2)
}

fn positive_param(
    id: GalleryId,
    params: &BTreeMap<String, f64>,
) -> Result<Option<f64>, GeometryError> {
    if let Some(extra) = params.keys().find(|k| Some(k.as_str()) != id.parameter()) {
        return Err(GeometryError::UnexpectedParameter {
            scenario: id.name().into(),
            param: extra.clone(),
        });
    }
    let Some(name) = id.parameter() else {
        return Ok(None);
    };
    let value = *params
        .get(name)
        .ok_or_else(|| GeometryError::MissingParameter {
            scenario: id.name().into(),
            param: name.into(),
        })?;
    if !(value.is_finite() && value > 0.0) {
        return Err(GeometryError::InvalidParameter {
            param: name.into(),
            value,
            reason: "must be a positive finite real",
        });
    }
    Ok(Some(value))
}

struct Fields {
    n: usize,
    ambient: AmbientSpace,
    h: f64,
    a2: f64,
    k: f64,
    kappa: Option<f64>,
    area: f64,
    blen: Option<f64>,
    euler: Option<i64>,
    lambda1: Option<f64>,
    sigma1: Option<f64>,
    dirichlet: Option<f64>,
    genus: usize,
    loops: usize,
    model: Model,
}

/// Builds a gallery scenario with all closed-form constants filled in.
pub fn make_scenario(
    name: &str,
    params: &BTreeMap<String, f64>,
) -> Result<Scenario, GeometryError> {
    let id = GalleryId::from_name(name).ok_or_else(|| GeometryError::UnknownScenario(name.into()))?;
    let p = positive_param(id, params)?;
    let s3 = AmbientSpace::space_form(3, 1.0, BoundaryKind::None);
    let f = match id {
        GalleryId::CliffordTorus => Fields {
            n: 2,
            ambient: s3,
            h: 0.0,
            a2: 2.0,
            k: 0.0,
            kappa: None,
            area: 2.0 * PI * PI,
            blen: None,
            euler: Some(0),
            lambda1: Some(-4.0),
            sigma1: None,
            dirichlet: None,
            genus: 1,
            loops: 0,
            model: Model::FlatTorus { side: SQRT_2 * PI },
        },
        GalleryId::EquatorialSphereS3 => Fields {
            n: 2,
            ambient: s3,
            h: 0.0,
            a2: 0.0,
            k: 1.0,
            kappa: None,
            area: 4.0 * PI,
            blen: None,
            euler: Some(2),
            lambda1: Some(-2.0),
            sigma1: None,
            dirichlet: None,
            genus: 0,
            loops: 0,
            model: Model::Sphere { radius: 1.0 },
        },
        GalleryId::RoundSphereR3 => {
            let r = p.unwrap_or(1.0);
            Fields {
                n: 2,
                ambient: AmbientSpace::space_form(3, 0.0, BoundaryKind::None),
                h: 2.0 / r,
                a2: 2.0 / (r * r),
                k: 1.0 / (r * r),
                kappa: None,
                area: 4.0 * PI * r * r,
                blen: None,
                euler: Some(2),
                lambda1: Some(-2.0 / (r * r)),
                sigma1: None,
                dirichlet: None,
                genus: 0,
                loops: 0,
                model: Model::Sphere { radius: r },
            }
        }
        GalleryId::GeodesicSphereH3 => {
            let r = p.unwrap_or(1.0);
            let coth = 1.0 / r.tanh();
            let sh = r.sinh();
            Fields {
                n: 2,
                ambient: AmbientSpace::space_form(3, -1.0, BoundaryKind::None),
                h: 2.0 * coth,
                a2: 2.0 * coth * coth,
                k: 1.0 / (sh * sh),
                kappa: None,
                area: 4.0 * PI * sh * sh,
                blen: None,
                euler: Some(2),
                lambda1: Some(-2.0 / (sh * sh)),
                sigma1: None,
                dirichlet: None,
                genus: 0,
                loops: 0,
                model: Model::Sphere { radius: sh },
            }
        }
        GalleryId::HemisphereS3plus => Fields {
            n: 2,
            ambient: AmbientSpace::space_form(3, 1.0, BoundaryKind::TotallyGeodesicWall),
            h: 0.0,
            a2: 0.0,
            k: 1.0,
            kappa: Some(0.0),
            area: 2.0 * PI,
            blen: Some(2.0 * PI),
            euler: Some(1),
            lambda1: Some(-2.0),
            sigma1: None,
            // z = cos θ is the Dirichlet ground state with Δ-eigenvalue 2 = q.
            dirichlet: Some(0.0),
            genus: 0,
            loops: 1,
            model: Model::Cap {
                radius: 1.0,
                angle: FRAC_PI_2,
            },
        },
        GalleryId::FlatDiskB3 => Fields {
            n: 2,
            ambient: AmbientSpace::space_form(3, 0.0, BoundaryKind::UnitSphereWall),
            h: 0.0,
            a2: 0.0,
            k: 0.0,
            kappa: Some(1.0),
            area: PI,
            blen: Some(2.0 * PI),
            euler: Some(1),
            lambda1: Some(disk_robin_lambda1()),
            sigma1: Some(-1.0),
            dirichlet: Some(disk_dirichlet_lambda1()),
            genus: 0,
            loops: 1,
            model: Model::FlatDisk { radius: 1.0 },
        },
        GalleryId::SphericalCapB3 => {
            let rho = p.unwrap_or(1.0);
            // Sphere of radius ρ centred at distance √(1+ρ²): meets ∂B³
            // orthogonally, cap angle α with cos α = ρ/√(1+ρ²).
            let d = (1.0 + rho * rho).sqrt();
            Fields {
                n: 2,
                ambient: AmbientSpace::space_form(3, 0.0, BoundaryKind::UnitSphereWall),
                h: 2.0 / rho,
                a2: 2.0 / (rho * rho),
                k: 1.0 / (rho * rho),
                kappa: Some(1.0),
                area: 2.0 * PI * rho * rho * (1.0 - rho / d),
                blen: Some(2.0 * PI * rho / d),
                euler: Some(1),
                lambda1: None,
                sigma1: None,
                dirichlet: None,
                genus: 0,
                loops: 1,
                model: Model::Cap {
                    radius: rho,
                    angle: (1.0 / rho).atan(),
                },
            }
        }
        GalleryId::EquatorialS3InS4 => Fields {
            n: 3,
            ambient: AmbientSpace::space_form(4, 1.0, BoundaryKind::None),
            h: 0.0,
            a2: 0.0,
            k: 1.0,
            kappa: None,
            area: 2.0 * PI * PI,
            blen: None,
            euler: None,
            lambda1: Some(-3.0),
            sigma1: None,
            dirichlet: None,
            genus: 0,
            loops: 0,
            model: Model::SphereRegion { angle: PI },
        },
        GalleryId::EquatorialB3InB4 => Fields {
            n: 3,
            ambient: AmbientSpace::space_form(4, 0.0, BoundaryKind::UnitSphereWall),
            h: 0.0,
            a2: 0.0,
            k: 0.0,
            kappa: Some(2.0),
            area: 4.0 * PI / 3.0,
            blen: Some(4.0 * PI),
            euler: None,
            lambda1: Some(ball_robin_lambda1()),
            sigma1: Some(-1.0),
            dirichlet: Some(PI * PI),
            genus: 0,
            loops: 1,
            model: Model::FlatBall { radius: 1.0 },
        },
        GalleryId::HemisphereS4plus => Fields {
            n: 3,
            ambient: AmbientSpace::space_form(4, 1.0, BoundaryKind::TotallyGeodesicWall),
            h: 0.0,
            a2: 0.0,
            k: 1.0,
            kappa: Some(0.0),
            area: PI * PI,
            blen: Some(4.0 * PI),
            euler: None,
            lambda1: Some(-3.0),
            sigma1: None,
            dirichlet: Some(0.0),
            genus: 0,
            loops: 1,
            model: Model::SphereRegion { angle: FRAC_PI_2 },
        },
    };

    let n = f.n;
    let s_sigma = (n * (n - 1)) as f64 * f.k;
    let h2n = f.h * f.h / n as f64;
    let scenario = Scenario {
        name: id.name().to_string(),
        id,
        n,
        ric_nn: ricci_from_gauss(f.ambient.scalar_s, s_sigma, f.h, f.a2),
        ambient: f.ambient,
        mean_curvature: f.h,
        norm_a2: f.a2,
        k_intrinsic: f.k,
        s_sigma,
        kappa_boundary: f.kappa,
        exact_area: Some(f.area),
        exact_boundary_measure: f.blen,
        exact_euler: f.euler,
        analytic_lambda1: f.lambda1,
        analytic_sigma1: f.sigma1,
        analytic_dirichlet_lambda1: f.dirichlet,
        parameters: params.clone(),
        umbilical: (f.a2 - h2n).abs() <= 1e-12 * (1.0 + f.a2),
        genus: f.genus,
        boundary_components: f.loops,
        model: f.model,
    };
    scenario.check_invariants()?;
    Ok(scenario)
}
