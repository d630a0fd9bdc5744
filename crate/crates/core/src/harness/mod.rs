//! Seeded experiments over the library and their JSON-lines reports.

pub mod affine_gap;
pub mod config;
pub mod decoder_check;
pub mod design_check;
pub mod line_gap;
pub mod report;
pub mod rng;
pub mod sweep;

pub use config::{Corruption, ExperimentConfig, ExperimentKind, LineSource, Mode};
pub use report::{ExperimentReport, Verdict};

use crate::error::Result;

/// Runs the experiment named by `cfg.experiment`.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    match cfg.experiment {
        ExperimentKind::LineGap => line_gap::run_line_gap(cfg),
        ExperimentKind::AffineGap => affine_gap::run_affine_gap(cfg),
        ExperimentKind::PinTest => pin_test::run_pin_test(cfg),
        ExperimentKind::DesignCheck => design_check::run_design_check(cfg),
        ExperimentKind::DecoderCheck => decoder_check::run_decoder_check(cfg),
        ExperimentKind::Trend => sweep::run_trend(cfg),
    }
}
