//! Convergence studies: plans, Monte Carlo drivers, rates and CSV tables.

pub mod config;
pub mod oracle;
pub mod rates;
pub mod study;
pub mod table;

pub use config::{validate_config, Case, Diagnostics, ExperimentPlan, FailurePolicy, StudyKind};
pub use oracle::linear_oracle;
pub use rates::{beta_eff, beta_limit, eta, fitted_rate, pairwise_rates, theoretical_rate, TheoreticalRates};
pub use study::{error_norm, inject, run_spatial_study, run_study, run_temporal_study, StudyResult};
pub use table::{emit_table, read_table, write_table, ErrorTable, StudyDiagnostics, TableRow};
