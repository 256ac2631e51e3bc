//! Per-user selection probabilities for opportunistic scheduling in an
//! underlay spectrum-sharing network.
//!
//! Secondary transmitters contend for one shared channel; the scheduler
//! picks the user with the largest ratio of direct-link to interference-link
//! gain. Under Rayleigh fading that ratio's distribution depends on a single
//! parameter per user, and this crate computes each user's probability of
//! being scheduled three independent ways:
//!
//! - closed forms for two and three users ([`analytics::closed_form_k2`],
//!   [`analytics::closed_form_k3`]),
//! - adaptive quadrature of the defining integral for any number of users
//!   ([`analytics::quadrature_selection`]),
//! - a seeded, reproducible Monte Carlo simulation
//!   ([`simulator::run_monte_carlo`]).

pub mod analytics;
pub mod channel;
pub mod error;
pub mod quadrature;
pub mod simulator;

pub use analytics::{
    cdf_metric, closed_form_k2, closed_form_k3, identity_i2, identity_i3, pdf_metric,
    quadrature_selection, selection_probabilities, AlphaVector, AnalyticMethod, Method,
    SelectionProbabilities, REL_GAP_THRESHOLD,
};
pub use channel::{
    alpha_of, gains_from_distance, instantaneous_snr, sample_exponential, transmit_power,
    PowerMode, PrimarySide, UserLink,
};
pub use error::{Error, Result};
pub use quadrature::{integrate_semi_infinite, integrate_unit_interval, QuadOutcome, QuadratureConfig};
pub use simulator::{
    compare_to_analytic, mc_vs_analytic, run_monte_carlo, select_user, ComparisonRow,
    McComparison, McReport, Scenario, DEFAULT_BETA, DEFAULT_SEED, DEFAULT_TRIALS,
};
