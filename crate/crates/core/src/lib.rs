//! Approximation algorithms for orienteering problems on integer metrics:
//! point-to-point orienteering, knapsack orienteering, stochastic
//! orienteering and orienteering with time windows, together with small
//! exact oracles used to measure them.

pub mod bench;
pub mod error;
pub mod generate;
pub mod io;
pub mod knap;
pub mod metric;
pub mod min_excess;
pub mod oracles;
pub mod p2p;
pub mod scalar;
pub mod stoch;
pub mod time_windows;

pub use error::{Error, Result};
pub use metric::{MetricSpace, Route, Walk};
pub use min_excess::{CountingMinExcess, ExactMinExcess, MinExcessSolution, MinExcessSolver};
pub use scalar::{Field, Reward};

/// Exact rational scalar used for probabilities and stochastic rewards.
pub type Rational = num_rational::BigRational;

/// Deterministic orienteering instance over integer rewards.
pub type P2PInstanceI64 = p2p::P2PInstance<i64>;
/// Knapsack orienteering with integer rewards and sizes.
pub type KnapInstanceI64 = knap::KnapOrientInstance<i64>;
/// Stochastic orienteering with exact rational probabilities.
pub type ExactStochInstance = stoch::StochOrientInstance<Rational>;
/// Stochastic orienteering with floating point probabilities.
pub type FloatStochInstance = stoch::StochOrientInstance<f64>;
/// Time-window instance with exact rational rewards.
pub type ExactTWInstance = time_windows::TWInstance<Rational>;
