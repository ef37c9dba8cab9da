use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::qtable::{argmax, QTable};
use crate::environment::{Horizon, TabularMdp};
use crate::{Error, Result};

/// Greedy policy with its state values.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    /// `None` for terminal states.
    pub action_of: Vec<Option<usize>>,
    pub value_of: Vec<f64>,
    /// Action values `r(s,a) + γ·E[v(s')]` under `value_of`.
    pub q_values: QTable,
    /// Sweeps performed; equals the number of stages for backward induction.
    pub sweeps: usize,
}

impl Policy {
    /// The action values as a table, for greedy rollouts.
    pub fn as_qtable(&self) -> &QTable {
        &self.q_values
    }
}

const MAX_SWEEPS: usize = 1_000_000;

/// Solves `mdp` exactly.
///
/// Discounted models iterate `v(s) ← max_a [r(s,a) + γ Σ P(s'|s,a) v(s')]`
/// until the max-norm change drops below `tolerance`. Staged models are
/// solved by backward induction over their layers, where `γ = 1` is allowed.
pub fn value_iteration(mdp: &TabularMdp, gamma: f64, tolerance: f64) -> Result<Policy> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::domain(format!("gamma must be >= 0, got {gamma}")));
    }
    let (values, sweeps) = match mdp.horizon() {
        Horizon::Infinite => {
            if gamma >= 1.0 {
                return Err(Error::domain(format!(
                    "infinite-horizon value iteration needs gamma < 1, got {gamma}"
                )));
            }
            if !(tolerance.is_finite() && tolerance > 0.0) {
                return Err(Error::domain(format!("tolerance must be > 0, got {tolerance}")));
            }
            iterate(mdp, gamma, tolerance)?
        }
        Horizon::Staged { stage_of } => {
            if gamma > 1.0 {
                return Err(Error::domain(format!("gamma must be <= 1, got {gamma}")));
            }
            backward_induction(mdp, gamma, stage_of)?
        }
    };
    Ok(greedy_policy(mdp, gamma, values, sweeps))
}

fn iterate(mdp: &TabularMdp, gamma: f64, tolerance: f64) -> Result<(Vec<f64>, usize)> {
    let n = mdp.num_states();
    let mut values = vec![0.0; n];
    let mut next = vec![0.0; n];
    for sweep in 1..=MAX_SWEEPS {
        let mut change: f64 = 0.0;
        for s in 0..n {
            next[s] = if mdp.is_terminal(s) {
                0.0
            } else {
                best_backup(mdp, s, gamma, &values)
            };
            change = change.max((next[s] - values[s]).abs());
        }
        core::mem::swap(&mut values, &mut next);
        if change < tolerance {
            return Ok((values, sweep));
        }
    }
    Err(Error::domain("value iteration did not converge"))
}

fn backward_induction(mdp: &TabularMdp, gamma: f64, stage_of: &[usize]) -> Result<(Vec<f64>, usize)> {
    let n = mdp.num_states();
    for s in (0..n).filter(|&s| !mdp.is_terminal(s)) {
        for a in 0..mdp.num_actions() {
            for &(next, _) in mdp.successors(s, a) {
                if stage_of[next] <= stage_of[s] {
                    return Err(Error::domain(format!(
                        "staged model has a transition {s} -> {next} that does not advance"
                    )));
                }
            }
        }
    }
    let last = stage_of.iter().copied().max().unwrap_or(0);
    let mut values = vec![0.0; n];
    for stage in (0..=last).rev() {
        for s in (0..n).filter(|&s| stage_of[s] == stage && !mdp.is_terminal(s)) {
            values[s] = best_backup(mdp, s, gamma, &values);
        }
    }
    Ok((values, last + 1))
}

fn best_backup(mdp: &TabularMdp, s: usize, gamma: f64, values: &[f64]) -> f64 {
    (0..mdp.num_actions())
        .map(|a| mdp.backup(s, a, gamma, values))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn greedy_policy(mdp: &TabularMdp, gamma: f64, values: Vec<f64>, sweeps: usize) -> Policy {
    let n = mdp.num_states();
    let m = mdp.num_actions();
    let mut q = Vec::with_capacity(n * m);
    let mut action_of = Vec::with_capacity(n);
    for s in 0..n {
        let row: Vec<f64> = if mdp.is_terminal(s) {
            vec![0.0; m]
        } else {
            (0..m).map(|a| mdp.backup(s, a, gamma, &values)).collect()
        };
        action_of.push((!mdp.is_terminal(s)).then(|| argmax(&row)));
        q.extend(row);
    }
    Policy {
        action_of,
        value_of: values,
        q_values: QTable::from_values(n, m, q).expect("backups of finite rewards are finite"),
        sweeps,
    }
}

/// `max_s |v(s) − max_a [r(s,a) + γ E v(s')]|` over non-terminal states.
pub fn bellman_residual(mdp: &TabularMdp, gamma: f64, values: &[f64]) -> f64 {
    (0..mdp.num_states())
        .filter(|&s| !mdp.is_terminal(s))
        .map(|s| (values[s] - best_backup(mdp, s, gamma, values)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{Environment, LadderAction, LadderMdp};
    use alloc::collections::BTreeSet;

    #[test]
    fn one_step_chain() {
        let mut mdp = TabularMdp::new(2, 1, Horizon::Infinite).unwrap();
        mdp.set_terminal(1).unwrap();
        mdp.set(0, 0, 1.0, vec![(1, 1.0)]).unwrap();
        let p = value_iteration(&mdp, 0.8, 1e-9).unwrap();
        assert_eq!(p.value_of, vec![1.0, 0.0]);
        assert_eq!(p.action_of, vec![Some(0), None]);
    }

    #[test]
    fn discounted_loop_matches_closed_form() {
        // Self-loop paying 1 forever: v = 1 / (1 - γ).
        let mut mdp = TabularMdp::new(1, 1, Horizon::Infinite).unwrap();
        mdp.set(0, 0, 1.0, vec![(0, 1.0)]).unwrap();
        let p = value_iteration(&mdp, 0.8, 1e-12).unwrap();
        assert!((p.value_of[0] - 5.0).abs() < 1e-10);
        assert!(bellman_residual(&mdp, 0.8, &p.value_of) < 1e-12);
    }

    #[test]
    fn rejects_undiscounted_infinite_horizon() {
        let mdp = TabularMdp::new(1, 1, Horizon::Infinite).unwrap();
        assert!(value_iteration(&mdp, 1.0, 1e-9).is_err());
        assert!(value_iteration(&mdp, 0.5, 0.0).is_err());
    }

    #[test]
    fn ladder_dominance_goes_up() {
        let rewards = vec![[0.0, 0.0], [0.1, 0.9], [0.2, 0.8], [0.3, 0.7]];
        let ladder = LadderMdp::new(rewards, BTreeSet::new(), -5.0).unwrap();
        let p = value_iteration(&ladder.to_mdp().unwrap(), 1.0, 1e-9).unwrap();
        for s in 0..6 {
            assert_eq!(p.action_of[s], Some(LadderAction::Up.index()));
        }
        assert!((p.value_of[0] - 2.4).abs() < 1e-12);
    }

    #[test]
    fn ladder_backward_induction_matches_enumeration() {
        let ladder = LadderMdp::default_with_mode(crate::environment::RewardMode::Pl).unwrap();
        let gamma = 0.8;
        let p = value_iteration(&ladder.to_mdp().unwrap(), gamma, 1e-9).unwrap();
        let moves = ladder.stages() - 1;
        let best = (0u32..1 << moves)
            .map(|bits| {
                (0..moves)
                    .map(|k| {
                        let a = if bits >> k & 1 == 1 {
                            LadderAction::Up
                        } else {
                            LadderAction::Down
                        };
                        libm::pow(gamma, k as f64) * ladder.entry_reward(k + 1, a.rail())
                    })
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((p.value_of[ladder.start_state()] - best).abs() < 1e-12);
    }
}
