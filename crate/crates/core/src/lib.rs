//! Empirical copula processes: parametric families with exact derivatives and
//! samplers, rank-based estimators with exact integration, asymptotic
//! covariance evaluation of the two limiting processes, numerical dominance
//! certification, and a reproducible Monte Carlo harness for estimator
//! efficiency comparisons.

pub mod copula;
pub mod covariance;
pub mod empirical;
pub mod error;
pub mod fmt;
pub mod functionals;
pub mod montecarlo;
pub mod normal;
pub mod quadrature;
pub mod rng;
pub mod sample;

pub use copula::{ConditionReport, CopulaModel, DependenceCondition, CONDITION_TOL};
pub use covariance::{
    certify_dominance, cov_process_c, cov_process_chat, covariance_difference_independence,
    multivariate_independence_difference, CovarianceReport, DominanceCertificate, Proposition,
    CERTIFY_TOL,
};
pub use empirical::{GridFunction, GridKind};
pub use error::{Error, Result};
pub use functionals::{
    asymptotic_variance, asymptotic_variance_quadrature, kendall_tau, EstimatorKind, Functional,
    VarianceMethod, VarianceResult,
};
pub use montecarlo::{
    compare_to_asymptotics, run_experiment, ComparisonRow, ExperimentConfig, ExperimentResult,
    SummaryRow,
};
pub use sample::{MarginKind, PairSample};
