//! Density evolution for the CW min-sum decoder and a genetic base-matrix optimizer.

pub mod de;
pub mod density;
pub mod ga;

pub use de::{cn_output_cw, cn_output_spc, de_error_after, de_threshold, de_trace, vn_app, vn_output, DeConfig, ProtoState, Search};
pub use density::{Density, Grid};
pub use ga::{optimize, GaConfig, GenerationLog, OptimizeResult, SnrSchedule};
