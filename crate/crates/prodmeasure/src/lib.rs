//! Problem-file front end for `prodmeasure-core`.

pub mod checks;
pub mod codec;
pub mod commands;
pub mod error;
pub mod gen;
pub mod problem;

pub use commands::{run, Op, Options};
pub use error::{CliError, CliResult};
pub use problem::Problem;
