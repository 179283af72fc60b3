//! PT-symmetric potentials with first-order SUSY, order-two parasupersymmetry
//! and second-derivative SUSY, plus a non-Hermitian eigensolver used to check
//! the closed-form spectra.

pub mod io;
pub mod numerics;
pub mod operators;
pub mod potentials;
pub mod psusy;
pub mod special;
pub mod ssusy;
pub mod susy;

use thiserror::Error;

pub use io::{FormatError, SpectrumDocument, SCHEMA_VERSION};
pub use numerics::{Grid, NumericsError};
pub use potentials::{
    Family, LevelIndex, NMax, ParamError, PotentialError, PotentialParams, QuasiParity, ValidationMode,
};
pub use psusy::{Choice, Component, PsusyError, PsusyTriplet, SpectrumEntry};
pub use special::{SpecialError, C64};
pub use ssusy::{Charge, SsusyData, SsusyError};
pub use susy::{PartnerMap, PartnerSide, SuperpotentialSpec, SusyError, Variant};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Susy(#[from] SusyError),
    #[error(transparent)]
    Psusy(#[from] PsusyError),
    #[error(transparent)]
    Ssusy(#[from] SsusyError),
}
