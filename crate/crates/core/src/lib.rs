//! Stationary equilibria of a search market in which a principal sells
//! information to an agent sampling i.i.d. options with discounting.
//!
//! The crate covers posterior-mean distributions and mean-preserving
//! contractions ([`dist`]), reservation values ([`search`]), the pass/fail
//! equilibrium and a verifier for arbitrary stationary contracts
//! ([`equilibrium`]), the extension with free public signals ([`public`]), a
//! Monte Carlo simulator ([`sim`]) and the `ps` command line ([`cli`]).
//!
//! ```
//! use persuaded_search::{equilibrium_passfail, Environment, Prior};
//!
//! let env = Environment::new(Prior::uniform(0.0, 1.0)?, 2.0 / 3.0)?;
//! let eq = equilibrium_passfail(&env)?;
//! assert!((eq.agent_value - 0.5).abs() < 1e-12);
//! assert!((eq.cutoff - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-9);
//! # Ok::<(), persuaded_search::Error>(())
//! ```

// `!(a < b)` is used on purpose so NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dist;
pub mod equilibrium;
pub mod error;
pub mod public;
pub mod roots;
pub mod search;
pub mod sim;

pub use dist::{is_mpc, Distribution, MpcReport, PmDist, Prior};
pub use equilibrium::{
    best_binary_cutoff, equilibrium_lower_censorship, equilibrium_passfail, principal_value,
    verify_stationary, Contract, EquilibriumSolution, Signal, VerificationReport,
};
pub use error::{Error, Result};
pub use public::{
    full_extraction_check, public_posterior_mean_dist, solve_public_equilibrium, FullExtraction,
    Outcome, OutcomeCase, PublicEquilibrium, PublicSignalModel,
};
pub use roots::SolverOptions;
pub use search::{
    benchmarks, never_searches, reservation_value, value_iteration_oracle, Benchmarks, Environment,
    SearchValues,
};
pub use sim::{simulate_public, simulate_stationary, SimulationReport};
