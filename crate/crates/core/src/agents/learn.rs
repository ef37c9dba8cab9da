use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::qtable::{epsilon_greedy, q_update, sarsa_update, QTable};
use super::rollout::{greedy_trajectory, RolloutOutcome};
use super::value_iteration::{value_iteration, Policy};
use crate::environment::{Environment, StepRecord};
use crate::{Error, Result};

/// Learning and evaluation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub episodes: usize,
    pub max_steps_per_episode: usize,
    /// Threshold on `|Q₀ − AR| / |Q₀ + AR|` for discount selection.
    pub delta: f64,
    pub gamma_candidates: Vec<f64>,
    pub seed: u64,
    /// Max-norm stopping tolerance for value iteration.
    pub vi_tolerance: f64,
}

impl Default for LearningConfig {
    fn default() -> Self {
        Self {
            alpha: 0.9,
            gamma: 0.8,
            epsilon: 0.3,
            episodes: 2000,
            max_steps_per_episode: 200,
            delta: 0.1,
            gamma_candidates: (0..10).map(|i| 0.5 + 0.05 * i as f64).collect(),
            seed: 0,
            vi_tolerance: 1e-9,
        }
    }
}

impl LearningConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = [("alpha", self.alpha), ("gamma", self.gamma), ("epsilon", self.epsilon)];
        for (field, v) in unit {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(field, format!("must lie in [0, 1], got {v}")));
            }
        }
        if self.episodes == 0 {
            return Err(Error::param("episodes", "must be >= 1"));
        }
        if self.max_steps_per_episode == 0 {
            return Err(Error::param("max_steps_per_episode", "must be >= 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param("delta", format!("must lie in (0, 1), got {}", self.delta)));
        }
        if let Some(g) = self.gamma_candidates.iter().find(|g| !(0.0..=1.0).contains(*g)) {
            return Err(Error::param("gamma_candidates", format!("{g} outside [0, 1]")));
        }
        if !(self.vi_tolerance.is_finite() && self.vi_tolerance > 0.0) {
            return Err(Error::param("vi_tolerance", "must be > 0"));
        }
        Ok(())
    }
}

/// Decision procedure driving the UAV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    QLearning,
    Sarsa,
    ValueIteration,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::QLearning, Algorithm::Sarsa, Algorithm::ValueIteration];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::QLearning => "qlearning",
            Algorithm::Sarsa => "sarsa",
            Algorithm::ValueIteration => "value_iteration",
        }
    }
}

/// Per-episode record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeMetrics {
    /// 1-based.
    pub episode: usize,
    pub total_reward: f64,
    /// Running mean of `total_reward` over episodes so far.
    pub average_reward: f64,
    /// `max_a Q(s_start, a)` before the episode's first step.
    pub q0: f64,
    pub q0_ar_ratio: f64,
    pub steps: usize,
    pub time_proxy_s: f64,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunMetrics {
    pub episodes: Vec<EpisodeMetrics>,
}

impl RunMetrics {
    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.episodes.iter().map(|e| e.q0_ar_ratio).collect()
    }

    /// Per-step average reward after each episode.
    pub fn step_average_rewards(&self) -> Vec<f64> {
        let mut reward = 0.0;
        let mut steps = 0usize;
        self.episodes
            .iter()
            .map(|e| {
                reward += e.total_reward;
                steps += e.steps;
                if steps == 0 {
                    0.0
                } else {
                    reward / steps as f64
                }
            })
            .collect()
    }
}

/// `|Q₀ − AR| / |Q₀ + AR|`; zero when the two coincide, infinite when they
/// cancel.
pub fn q0_ar_ratio(q0: f64, average_reward: f64) -> f64 {
    if q0 == average_reward {
        return 0.0;
    }
    let den = (q0 + average_reward).abs();
    if den == 0.0 {
        f64::INFINITY
    } else {
        (q0 - average_reward).abs() / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageReward {
    pub per_episode: f64,
    pub per_step: f64,
}

/// Average-reward objective over a run; `None` for an empty run.
pub fn average_reward(metrics: &RunMetrics) -> Option<AverageReward> {
    if metrics.is_empty() {
        return None;
    }
    let total: f64 = metrics.episodes.iter().map(|e| e.total_reward).sum();
    let steps: usize = metrics.episodes.iter().map(|e| e.steps).sum();
    Some(AverageReward {
        per_episode: total / metrics.len() as f64,
        per_step: if steps == 0 { 0.0 } else { total / steps as f64 },
    })
}

/// Trailing mean of `total_reward` over up to `window` episodes, one value
/// per episode.
pub fn smoothed_rewards(metrics: &RunMetrics, window: usize) -> Vec<f64> {
    let window = window.max(1);
    let rewards: Vec<f64> = metrics.episodes.iter().map(|e| e.total_reward).collect();
    (0..rewards.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(window);
            rewards[lo..=i].iter().sum::<f64>() / (i + 1 - lo) as f64
        })
        .collect()
}

/// Last value of [`smoothed_rewards`]; `None` for an empty run.
pub fn final_smoothed_reward(metrics: &RunMetrics, window: usize) -> Option<f64> {
    let n = metrics.len();
    if n == 0 {
        return None;
    }
    let lo = n.saturating_sub(window.max(1));
    let tail = &metrics.episodes[lo..];
    Some(tail.iter().map(|e| e.total_reward).sum::<f64>() / tail.len() as f64)
}

/// First 1-based episode from which every ratio stays `<= delta` through the
/// end of the run.
pub fn episodes_to_criterion(ratios: &[f64], delta: f64) -> Option<usize> {
    let tail = ratios.iter().rev().take_while(|&&r| r <= delta).count();
    (tail > 0).then(|| ratios.len() - tail + 1)
}

/// Result of one learning or planning run.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentRun {
    pub algorithm: Algorithm,
    /// Learned table, or the exact action values for value iteration.
    pub table: QTable,
    pub metrics: RunMetrics,
}

#[derive(Clone, Copy)]
enum TdRule {
    OffPolicy,
    OnPolicy,
}

struct Tally {
    reward: f64,
    steps: usize,
}

impl Tally {
    fn record(
        &mut self,
        index: usize,
        q0: f64,
        total: f64,
        steps: usize,
        time: f64,
        truncated: bool,
    ) -> EpisodeMetrics {
        self.reward += total;
        self.steps += steps;
        let step_ar = if self.steps == 0 {
            0.0
        } else {
            self.reward / self.steps as f64
        };
        EpisodeMetrics {
            episode: index + 1,
            total_reward: total,
            average_reward: self.reward / (index + 1) as f64,
            q0,
            q0_ar_ratio: q0_ar_ratio(q0, step_ar),
            steps,
            time_proxy_s: time,
            truncated,
        }
    }
}

fn run_td<E: Environment, R: Rng + ?Sized>(
    env: &E,
    config: &LearningConfig,
    rule: TdRule,
    rng: &mut R,
) -> Result<(QTable, RunMetrics)> {
    config.validate()?;
    let mut table = QTable::new(env.num_states(), env.num_actions());
    let mut metrics = RunMetrics::default();
    let mut tally = Tally { reward: 0.0, steps: 0 };
    let start = env.start_state();
    for ep in 0..config.episodes {
        let q0 = table.max(start);
        let mut trace = env.new_trace();
        let mut state = start;
        let mut action = epsilon_greedy(table.row(state), config.epsilon, rng)?;
        let mut done = false;
        while trace.step_count() < config.max_steps_per_episode {
            let t = env.step(state, action, &trace, rng)?;
            trace.push(StepRecord {
                state,
                action,
                reward: t.reward,
                next_state: t.next_state,
            });
            if t.done {
                // Terminal rows are never updated, so they bootstrap as zero.
                update(&mut table, rule, state, action, t.reward, t.next_state, 0, config)?;
                done = true;
                break;
            }
            // Chosen before the update so both rules see the same row.
            let next_action = epsilon_greedy(table.row(t.next_state), config.epsilon, rng)?;
            update(
                &mut table,
                rule,
                state,
                action,
                t.reward,
                t.next_state,
                next_action,
                config,
            )?;
            state = t.next_state;
            action = next_action;
        }
        metrics.episodes.push(tally.record(
            ep,
            q0,
            trace.total_reward(),
            trace.step_count(),
            trace.time_proxy_s(),
            !done,
        ));
    }
    Ok((table, metrics))
}

#[allow(clippy::too_many_arguments)]
fn update(
    table: &mut QTable,
    rule: TdRule,
    state: usize,
    action: usize,
    reward: f64,
    next_state: usize,
    next_action: usize,
    config: &LearningConfig,
) -> Result<f64> {
    match rule {
        TdRule::OffPolicy => q_update(table, state, action, reward, next_state, config.alpha, config.gamma),
        TdRule::OnPolicy => sarsa_update(
            table,
            state,
            action,
            reward,
            next_state,
            next_action,
            config.alpha,
            config.gamma,
        ),
    }
}

/// Tabular Q-learning with ε-greedy behavior, seeded from `config.seed`.
pub fn run_q_learning<E: Environment>(env: &E, config: &LearningConfig) -> Result<(QTable, RunMetrics)> {
    run_q_learning_with_rng(env, config, &mut ChaCha8Rng::seed_from_u64(config.seed))
}

pub fn run_q_learning_with_rng<E: Environment, R: Rng + ?Sized>(
    env: &E,
    config: &LearningConfig,
    rng: &mut R,
) -> Result<(QTable, RunMetrics)> {
    run_td(env, config, TdRule::OffPolicy, rng)
}

/// SARSA: bootstraps from the action the behavior policy actually takes.
pub fn run_sarsa<E: Environment>(env: &E, config: &LearningConfig) -> Result<(QTable, RunMetrics)> {
    run_sarsa_with_rng(env, config, &mut ChaCha8Rng::seed_from_u64(config.seed))
}

pub fn run_sarsa_with_rng<E: Environment, R: Rng + ?Sized>(
    env: &E,
    config: &LearningConfig,
    rng: &mut R,
) -> Result<(QTable, RunMetrics)> {
    run_td(env, config, TdRule::OnPolicy, rng)
}

/// Plans once with value iteration on the explicit model, then flies the
/// greedy policy every episode. `Q₀` is the planned value of the start.
pub fn run_value_iteration_agent<E: Environment>(env: &E, config: &LearningConfig) -> Result<(Policy, RunMetrics)> {
    config.validate()?;
    let mdp = env.to_mdp()?;
    let policy = value_iteration(&mdp, config.gamma, config.vi_tolerance)?;
    let q0 = policy.q_values.max(env.start_state());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut metrics = RunMetrics::default();
    let mut tally = Tally { reward: 0.0, steps: 0 };
    for ep in 0..config.episodes {
        let rollout = greedy_trajectory(&policy, env, config.max_steps_per_episode, &mut rng)?;
        let trace = &rollout.trace;
        metrics.episodes.push(tally.record(
            ep,
            q0,
            trace.total_reward(),
            trace.step_count(),
            trace.time_proxy_s(),
            rollout.outcome != RolloutOutcome::ReachedTerminal,
        ));
    }
    Ok((policy, metrics))
}

pub fn run_agent<E: Environment>(env: &E, config: &LearningConfig, algorithm: Algorithm) -> Result<AgentRun> {
    let (table, metrics) = match algorithm {
        Algorithm::QLearning => run_q_learning(env, config)?,
        Algorithm::Sarsa => run_sarsa(env, config)?,
        Algorithm::ValueIteration => {
            let (policy, metrics) = run_value_iteration_agent(env, config)?;
            (policy.q_values, metrics)
        }
    };
    Ok(AgentRun {
        algorithm,
        table,
        metrics,
    })
}
