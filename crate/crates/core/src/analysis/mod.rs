//! Norms, spectrum-distance models and the grid suprema defining the power
//! bound, resolvent conditions, Kreiss and Hille–Yosida constants.

mod grid;
mod norms;
mod report;
mod resolvent;
mod spectrum;

pub use grid::{grid_sup, Accuracy, GridSpec, SupSearch, GOLDEN};
pub use norms::{
    norm_of, operator_norm, power_bound, power_bound_of, spectral_radius, SpectralRadius, DENSE_FALLBACK_DIM,
    NORM_SEED, OVERFLOW_GUARD,
};
pub use report::{BoundReport, Quantity, Verdict};
pub use resolvent::{
    hille_yosida_constant, hille_yosida_of, kreiss_constant, resolvent_condition, resolvent_condition_at,
    resolvent_condition_of,
    ResolventMode, ResolventSource, SCAN_MAX_RESTARTS, GRID_NORM_TOL,
};
pub use spectrum::{dist_to_spectrum, SpectrumModel};

