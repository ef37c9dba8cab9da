use alloc::vec::Vec;

use super::learn::{run_agent, Algorithm, LearningConfig};
use crate::environment::Environment;
use crate::{Error, Result};

/// Ratio trace recorded for one candidate discount factor.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateTrace {
    pub gamma: f64,
    pub ratios: Vec<f64>,
    pub q0: Vec<f64>,
    /// Per-step running average reward.
    pub average_reward: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscountSelection {
    /// `None` when no candidate settles below the threshold.
    pub gamma_star: Option<f64>,
    pub traces: Vec<CandidateTrace>,
}

/// Whether every ratio over the final tenth of the trace (at least one
/// entry) is at or below `delta`.
pub fn settles_below(ratios: &[f64], delta: f64) -> bool {
    if ratios.is_empty() {
        return false;
    }
    let dwell = ratios.len().div_ceil(10);
    ratios[ratios.len() - dwell..].iter().all(|&r| r <= delta)
}

/// First trace, in the given order, that settles below `delta`.
pub fn select_from_traces(traces: Vec<CandidateTrace>, delta: f64) -> DiscountSelection {
    let gamma_star = traces.iter().find(|t| settles_below(&t.ratios, delta)).map(|t| t.gamma);
    DiscountSelection { gamma_star, traces }
}

/// Runs `algorithm` once per candidate in `config.gamma_candidates`, all
/// with `config.seed`, and picks the first whose `|Q₀ − AR| / |Q₀ + AR|`
/// stays within `config.delta` over the last tenth of the episodes.
pub fn select_discount_factor<E: Environment>(
    env: &E,
    config: &LearningConfig,
    algorithm: Algorithm,
) -> Result<DiscountSelection> {
    config.validate()?;
    if config.gamma_candidates.is_empty() {
        return Err(Error::param("gamma_candidates", "need at least one candidate"));
    }
    let mut traces = Vec::with_capacity(config.gamma_candidates.len());
    for &gamma in &config.gamma_candidates {
        let run_config = LearningConfig {
            gamma,
            ..config.clone()
        };
        let run = run_agent(env, &run_config, algorithm)?;
        traces.push(CandidateTrace {
            gamma,
            ratios: run.metrics.ratios(),
            q0: run.metrics.episodes.iter().map(|e| e.q0).collect(),
            average_reward: run.metrics.step_average_rewards(),
        });
    }
    Ok(select_from_traces(traces, config.delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn trace(gamma: f64, ratios: Vec<f64>) -> CandidateTrace {
        let n = ratios.len();
        CandidateTrace {
            gamma,
            ratios,
            q0: vec![0.0; n],
            average_reward: vec![0.0; n],
        }
    }

    #[test]
    fn identity_learner_takes_first_candidate() {
        let traces = vec![trace(0.5, vec![0.0; 20]), trace(0.8, vec![0.0; 20])];
        assert_eq!(select_from_traces(traces, 0.1).gamma_star, Some(0.5));
    }

    #[test]
    fn dwell_covers_final_tenth() {
        let mut late_spike = vec![0.0; 20];
        late_spike[18] = 0.5;
        assert!(!settles_below(&late_spike, 0.1));
        let mut early_spike = vec![0.0; 20];
        early_spike[17] = 0.5;
        assert!(settles_below(&early_spike, 0.1));
        assert!(settles_below(&[0.1], 0.1));
        assert!(!settles_below(&[], 0.1));
    }

    #[test]
    fn no_selection_keeps_traces() {
        let traces = vec![trace(0.5, vec![0.3; 10]), trace(0.9, vec![0.2; 10])];
        let sel = select_from_traces(traces, 0.1);
        assert_eq!(sel.gamma_star, None);
        assert_eq!(sel.traces.len(), 2);
    }

    #[test]
    fn empty_candidate_list_is_rejected() {
        let env = crate::environment::LadderMdp::default_with_mode(crate::environment::RewardMode::Pl).unwrap();
        let config = LearningConfig {
            gamma_candidates: vec![],
            episodes: 5,
            ..Default::default()
        };
        assert!(select_discount_factor(&env, &config, Algorithm::Sarsa).is_err());
    }
}
