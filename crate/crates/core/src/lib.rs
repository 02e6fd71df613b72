//! Forward and inverse spectral problems for the quadratic pencil
//! `−y'' + (2λ q1 + q0) y = λ² y` on `(0, π)` with Dirichlet conditions.

pub mod contour;
pub mod error;
pub mod experiments;
pub mod forward;
pub mod inverse;
pub mod io;
pub mod jet;
pub mod model;
pub mod quad;
pub mod spectral_data;

pub use error::{Error, ErrorKind, Result};
pub use experiments::{make_split_data, ExperimentRow, SplitExperimentConfig};
pub use forward::{ForwardOptions, PotentialPair};
pub use inverse::{run_algorithm1, InverseOptions, RecoveredPotentials};
pub use model::Background;
pub use spectral_data::{SpectralDataSet, SpectralEntry, Tail};
