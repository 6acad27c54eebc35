pub mod error;
pub mod experiment;
pub mod gaussian;
pub mod oracle;

pub use error::{Error, Result};
pub use experiment::{
    BranchedState, DetectorModel, EraserBasis, Geometry, NormalizationMode, Pattern, PatternKind,
};
pub use oracle::{compare_patterns, pattern_numeric, ComparisonReport, Grid1D, Grid2D};
pub use gaussian::{make_epr, project_particle1, BipartiteGaussianState, EvolutionParam, GaussianPacket, SymMatrix2};
