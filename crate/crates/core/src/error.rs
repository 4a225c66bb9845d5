use thiserror::Error;

use crate::bounds::BoundsError;
use crate::fem::FemError;
use crate::geometry::GeometryError;
use crate::spectra::SpectraError;
use crate::yamabe::YamabeError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Yamabe(#[from] YamabeError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
