//! Studies and checks driving the `nlmg` solver: discretization-error
//! tables, property suites, timing and dense validation.

pub mod config;
pub mod error;
pub mod output;
pub mod scaling;
pub mod study;
pub mod validate;
pub mod verify;

pub use config::{Format, Mode, StudyConfig};
pub use error::{BenchError, Result};
pub use output::{parse_csv, read_csv, render_table, to_csv_string, write_csv, CSV_HEADER};
pub use scaling::{run_matvec_scaling, run_scaling, ScalingRow};
pub use study::{run_convergence, ConvergenceStudy, StudyRow};
pub use validate::{run_validate, ValidateRow};
pub use verify::{default_suites, run_verify, Fault, Suite, VerifyReport};
