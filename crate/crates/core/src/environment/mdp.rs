use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Planning horizon of an explicit MDP.
#[derive(Debug, Clone, PartialEq)]
pub enum Horizon {
    /// Discounted, solved by iterating to a fixed point.
    Infinite,
    /// Acyclic, layered model: `stage_of[s]` is the layer of state `s` and
    /// every transition goes from layer `k` to layer `k + 1`. Solved exactly
    /// by backward induction.
    Staged { stage_of: Vec<usize> },
}

/// Explicit `(S, A, P, R)` description with expected immediate rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularMdp {
    num_states: usize,
    num_actions: usize,
    rewards: Vec<f64>,
    transitions: Vec<Vec<(usize, f64)>>,
    terminal: Vec<bool>,
    horizon: Horizon,
}

impl TabularMdp {
    /// An MDP where every action self-loops with zero reward until set.
    pub fn new(num_states: usize, num_actions: usize, horizon: Horizon) -> Result<Self> {
        if num_states == 0 || num_actions == 0 {
            return Err(Error::shape("an MDP needs at least one state and one action"));
        }
        if let Horizon::Staged { stage_of } = &horizon {
            if stage_of.len() != num_states {
                return Err(Error::shape(format!(
                    "stage map has {} entries for {num_states} states",
                    stage_of.len()
                )));
            }
        }
        let transitions = (0..num_states * num_actions)
            .map(|i| vec![(i / num_actions, 1.0)])
            .collect();
        Ok(Self {
            num_states,
            num_actions,
            rewards: vec![0.0; num_states * num_actions],
            transitions,
            terminal: vec![false; num_states],
            horizon,
        })
    }

    pub fn set_terminal(&mut self, state: usize) -> Result<()> {
        self.check_state(state)?;
        self.terminal[state] = true;
        Ok(())
    }

    /// Sets `r(s, a)` and the successor distribution `P(· | s, a)`.
    pub fn set(&mut self, state: usize, action: usize, reward: f64, next: Vec<(usize, f64)>) -> Result<()> {
        self.check_state(state)?;
        self.check_action(action)?;
        if !reward.is_finite() {
            return Err(Error::domain("rewards must be finite"));
        }
        let mut total = 0.0;
        for &(s, p) in &next {
            self.check_state(s)?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!("transition probability {p} outside [0, 1]")));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("transition probabilities sum to {total}, not 1")));
        }
        let i = state * self.num_actions + action;
        self.rewards[i] = reward;
        self.transitions[i] = next;
        Ok(())
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn reward(&self, state: usize, action: usize) -> f64 {
        self.rewards[state * self.num_actions + action]
    }

    pub fn successors(&self, state: usize, action: usize) -> &[(usize, f64)] {
        &self.transitions[state * self.num_actions + action]
    }

    pub fn is_terminal(&self, state: usize) -> bool {
        self.terminal[state]
    }

    pub fn horizon(&self) -> &Horizon {
        &self.horizon
    }

    /// `r(s, a) + γ Σ P(s'|s,a) v(s')`.
    pub fn backup(&self, state: usize, action: usize, gamma: f64, values: &[f64]) -> f64 {
        let future: f64 = self.successors(state, action).iter().map(|&(s, p)| p * values[s]).sum();
        self.reward(state, action) + gamma * future
    }

    fn check_state(&self, s: usize) -> Result<()> {
        if s >= self.num_states {
            return Err(Error::domain(format!("state {s} out of range 0..{}", self.num_states)));
        }
        Ok(())
    }

    fn check_action(&self, a: usize) -> Result<()> {
        if a >= self.num_actions {
            return Err(Error::domain(format!(
                "action {a} out of range 0..{}",
                self.num_actions
            )));
        }
        Ok(())
    }
}
