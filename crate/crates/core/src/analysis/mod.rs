//! Numerical checks of the zero, node and Wronskian structure of
//! eigenfunctions.

pub mod density;
pub mod report;
pub mod residual;
pub mod wronskian;
pub mod zeros;

pub use density::{density_profile, DensityProfile};
pub use report::{analyze_state, phase_sweep, PhaseSweep, StateAnalysis};
pub use residual::{residual_oracle, ResidualReport};
pub use wronskian::{wronskian_diagnostics, SignSummary, WronskianDiagnostics};
pub use zeros::{count_law_check, find_zeros, interlacing_check, zero_report, FirstKind, Violation, ZeroReport, ZeroSearch};
