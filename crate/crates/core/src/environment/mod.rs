//! Episodic decision environments over the service area.
//!
//! Both scenarios expose a tabular view through [`Environment`]: states and
//! actions are dense indices, and an explicit transition model can be
//! exported for exact planning.

mod grid;
mod ladder;
mod mdp;
mod reward;
mod trace;

pub use grid::{
    cell_path_loss, interference_at, placement_path_loss, GridAction, GridEnv, GridState, GridStepOutcome, GridWorld,
    UavPlacement,
};
pub use ladder::{ladder_step, LadderAction, LadderMdp, LadderStepOutcome, Rail};
pub use mdp::{Horizon, TabularMdp};
pub use reward::{channel_reward, normalize_pl, reward_inv_pl, reward_pl, RewardMode, RewardSpec};
pub use trace::{EpisodeTrace, StepRecord};

use rand::Rng;

use crate::Result;

/// Outcome of a single tabular step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub next_state: usize,
    pub reward: f64,
    pub done: bool,
}

/// Tabular episodic environment.
///
/// `step` sees the running episode trace so history-dependent shaping
/// (revisit penalties) can be applied without enlarging the state space.
pub trait Environment {
    fn num_states(&self) -> usize;
    fn num_actions(&self) -> usize;
    fn start_state(&self) -> usize;
    fn is_terminal(&self, state: usize) -> bool;

    fn step<R: Rng + ?Sized>(
        &self,
        state: usize,
        action: usize,
        trace: &EpisodeTrace,
        rng: &mut R,
    ) -> Result<Transition>;

    /// Distance flown per step, metres.
    fn step_length_m(&self) -> f64;

    /// Cruise speed, m/s.
    fn speed_mps(&self) -> f64;

    /// Explicit `(S, A, P, R)` description with expected rewards.
    fn to_mdp(&self) -> Result<TabularMdp>;

    fn new_trace(&self) -> EpisodeTrace {
        EpisodeTrace::new(self.start_state(), self.step_length_m(), self.speed_mps())
    }
}
