//! Exact posteriors, switching decisions and seeded simulations for the
//! two-envelope problem.
//!
//! Amounts are exact rationals throughout. Randomized routines take a `u64`
//! seed and derive one independent stream per trial, so their results do
//! not depend on the number of worker threads.

pub mod cli;
pub mod cover;
pub mod envelope;
pub mod error;
pub mod game;
pub mod lazy;
pub mod posterior;
pub mod prior;
pub mod rational;
pub mod simulate;
pub mod stats;
pub mod streams;

pub use cover::{estimate_win_rate, exact_win_probability, play_cover, Probe};
pub use envelope::{deal, make_pair, Amount, Assignment, EnvelopePair};
pub use error::{Error, Result};
pub use game::{cover_vs_arranger, exact_win_value, shift_adversary, ArrangerStrategy, PlayerStrategy};
pub use lazy::{lazy_compare, BitStream};
pub use posterior::{conditional_expectation, decide_expectation, decide_probability_of_larger, split_discrete, Decision};
pub use prior::{check_proper, find_half_half_violation, BroomePrior, ContinuousPrior, DiscretePrior};
pub use simulate::{run_alibaba, run_conditional_fill, run_fixed_pair, run_prior_conditioned, Schema};
pub use stats::SummaryStats;
