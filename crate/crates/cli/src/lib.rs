//! Experiment harness for the blocktree simulator: TOML experiment files,
//! CSV output, SVG figures and built-in verification checks.

pub mod balls;
pub mod config;
pub mod error;
pub mod experiment;
pub mod figure;
pub mod table;
pub mod verify;

pub use config::{ExperimentConfig, ExperimentKind, Series};
pub use error::{HarnessError, Result};
pub use experiment::{run_config, run_experiment, RunOptions};
pub use figure::{render_figure, FigureSpec};
pub use verify::{run_check, Assertion, Check};
