//! Tabular learners, exact planning, and discount selection.

mod discount;
mod learn;
mod qtable;
mod rollout;
mod value_iteration;

pub use discount::{select_discount_factor, select_from_traces, settles_below, CandidateTrace, DiscountSelection};
pub use learn::{
    average_reward, episodes_to_criterion, final_smoothed_reward, q0_ar_ratio, run_agent, run_q_learning,
    run_q_learning_with_rng, run_sarsa, run_sarsa_with_rng, run_value_iteration_agent, smoothed_rewards, AgentRun,
    Algorithm, AverageReward, EpisodeMetrics, LearningConfig, RunMetrics,
};
pub use qtable::{argmax, epsilon_greedy, q_update, sarsa_update, QTable};
pub use rollout::{greedy_trajectory, GreedyPolicy, Rollout, RolloutOutcome};
pub use value_iteration::{bellman_residual, value_iteration, Policy};
