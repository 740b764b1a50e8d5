//! Moment quadrature, configuration, and report emission.

mod config;
mod moments;
mod suite;

pub use config::{LabConfig, SuiteSelection};
pub use moments::{
    fourth_moment_leading, integrate_moment, interval_nodes, poly_moment, poly_moment_exact,
    second_moment_main_term, twisted_poly_moment, MomentEstimate,
};
pub use suite::{run_suite, CacheSummary, Check, SuiteBundle, SuiteReport};
