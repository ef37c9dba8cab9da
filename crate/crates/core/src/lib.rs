//! Air-to-ground channel model, trajectory environments and tabular decision
//! procedures for a UAV acting as an aerial radio unit.
//!
//! The crate is `no_std` and only needs `alloc`. Every stochastic operation
//! takes the caller's random stream explicitly, so a seeded generator gives
//! bit-identical results across runs.
//!
//! - [`channel`]: geometry, path loss, SINR, spectral rate and the two-hop
//!   MIMO signal chain.
//! - [`environment`]: the four-action gridworld and the two-action ladder MDP
//!   with path-loss driven sigmoid rewards.
//! - [`agents`]: Q-learning, SARSA, value iteration, discount-factor
//!   selection and greedy trajectory extraction.
//! - [`objective`]: the network-throughput objective over UAV position and a
//!   grid-scan probe of its landscape.
#![no_std]

extern crate alloc;

pub mod agents;
pub mod channel;
pub mod environment;
mod error;
mod fmath;
pub mod objective;

pub use error::{Error, Result};
