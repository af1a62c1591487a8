//! Totally positive Hessenberg-Toeplitz (TPHT) matrices: symbols and their
//! truncations, total-positivity checks, closed-form LU and LU dynamics,
//! spectra and eigenvector oscillation, large-n limits of eigenvalue
//! averages, random-symbol ensembles, and normal forms under unipotent
//! conjugation.

pub mod dense;
pub mod ensemble;
pub mod error;
pub mod factorization;
pub mod gs_asymptotics;
pub mod matrices;
pub mod normal_forms;
pub mod spectra;
pub mod symbols;

pub use dense::{HessMatrix, Matrix};
pub use ensemble::{DistSpec, EnsembleConfig, EnsembleRun, MomentBounds, Mode};
pub use error::{Error, Result};
pub use factorization::{LuFactors, LuMethod, LusztigFactors3};
pub use gs_asymptotics::{GsLimit, GsMethod};
pub use matrices::{MinorIndex, TpMode, TpReport};
pub use normal_forms::NormalFormBundle;
pub use spectra::{OscillationReport, SpectrumResult};
pub use symbols::Symbol;
