//! Experiment driver: configuration, parameter sweeps with Monte-Carlo SER
//! counting, and CSV output.

mod config;
mod report;
mod sweep;

pub use config::{parse_list, Detector, ExperimentConfig};
pub use report::{fmt_sig, write_csv, SweepReport, SweepRow, CSV_HEADER};
pub use sweep::{draw_trial, run_sweep, Trial};

pub use crate::num::dbm_to_linear;
