//! Brute-force grid verification of the closed-form pipeline.

mod compare;
mod grid;
mod pipeline;

pub use compare::{compare_patterns, compare_patterns_aligned, Alignment, ComparisonReport};
pub use grid::{
    momentum_space_propagate, momentum_space_propagate_2d, quadrature_project, sample_bipartite,
    sample_packet, Grid1D, Grid2D, LEAKAGE_TOLERANCE, MAX_POINTS,
};
pub use pipeline::{numeric_branches, pattern_numeric, NumericBranches};
