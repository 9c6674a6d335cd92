//! Scenario runner for entanglement dynamics: reads TOML scenarios, evolves the
//! initial state, evaluates concurrence estimators along the trajectory and
//! writes CSV or JSON tables. The canned `fig1` and `fig2` bundles and the
//! randomized property suite live here too, so tests and the binary share them.

pub mod bundles;
pub mod config;
mod error;
pub mod export;
pub mod fit;
pub mod oracle;
pub mod run;
pub mod validate;

pub use config::{EstimatorId, Scenario};
pub use error::{CliError, Result};
pub use export::Format;
pub use run::{run_scenario, TimeSeries, TimeSeriesRecord};
