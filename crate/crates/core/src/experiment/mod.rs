//! Double-slit ghost-interference experiment built on Gaussian states.

mod detector;
mod geometry;
mod pattern;
mod slit;
mod visibility;

pub use detector::DetectorModel;
pub use geometry::Geometry;
pub use pattern::{
    coincidence_pattern, default_z2_range, duality_margin, duality_margin_from, eraser_pattern,
    exact_local_visibility, fringe_spacing, large_omega_eraser_pattern, large_omega_pattern,
    local_visibility, uniform_grid, EraserBasis, NormalizationMode, Pattern, PatternKind,
    PatternMeta,
};
pub use slit::{
    apply_double_slit, detector_plane_state, gamma_param, gamma_param_interpolating,
    propagate_branches, slit_image_center, slit_image_center_interpolating, slit_probes,
    state_at_slit, Branch, BranchedState, DetectorTag,
};
pub use visibility::{find_extrema, measured_visibility, peak_separation, Extrema, MeasuredVisibility};
