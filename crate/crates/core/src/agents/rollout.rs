use alloc::collections::BTreeSet;

use rand::Rng;

use super::qtable::QTable;
use super::value_iteration::Policy;
use crate::environment::{Environment, EpisodeTrace, StepRecord};
use crate::Result;

/// Anything that names a greedy action per state.
pub trait GreedyPolicy {
    /// `None` when the policy has nothing to do (terminal states).
    fn greedy_action(&self, state: usize) -> Option<usize>;
}

impl GreedyPolicy for QTable {
    fn greedy_action(&self, state: usize) -> Option<usize> {
        (state < self.num_states()).then(|| self.argmax(state))
    }
}

impl GreedyPolicy for Policy {
    fn greedy_action(&self, state: usize) -> Option<usize> {
        self.action_of.get(state).copied().flatten()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RolloutOutcome {
    ReachedTerminal,
    /// The rollout came back to a state it had already left.
    NonConvergent,
    /// The step budget ran out.
    Truncated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    pub trace: EpisodeTrace,
    pub outcome: RolloutOutcome,
}

/// Follows the greedy action from the start state until the terminal, a
/// repeated state, or `max_steps`.
pub fn greedy_trajectory<P, E, R>(policy: &P, env: &E, max_steps: usize, rng: &mut R) -> Result<Rollout>
where
    P: GreedyPolicy + ?Sized,
    E: Environment,
    R: Rng + ?Sized,
{
    let mut trace = env.new_trace();
    let mut state = env.start_state();
    let mut seen = BTreeSet::new();
    seen.insert(state);
    let mut outcome = RolloutOutcome::Truncated;
    while trace.step_count() < max_steps {
        let Some(action) = policy.greedy_action(state) else {
            outcome = RolloutOutcome::NonConvergent;
            break;
        };
        let t = env.step(state, action, &trace, rng)?;
        trace.push(StepRecord {
            state,
            action,
            reward: t.reward,
            next_state: t.next_state,
        });
        if t.done {
            outcome = RolloutOutcome::ReachedTerminal;
            break;
        }
        if !seen.insert(t.next_state) {
            outcome = RolloutOutcome::NonConvergent;
            break;
        }
        state = t.next_state;
    }
    Ok(Rollout { trace, outcome })
}
