//! Two-action ladder MDP.
//!
//! The UAV advances one stage per step and chooses the upper or lower rail
//! for the next stage. Some states are blocked and pay a penalty, so the
//! best route has to skip them.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::mdp::{Horizon, TabularMdp};
use super::reward::{channel_reward, RewardMode, RewardSpec};
use super::trace::EpisodeTrace;
use super::{Environment, Transition};
use crate::channel::{path_loss_db, ChannelParams, LinkGeometry};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rail {
    Lower = 0,
    Upper = 1,
}

impl Rail {
    pub fn index(self) -> usize {
        self as usize
    }

    fn from_index(i: usize) -> Self {
        if i == 0 {
            Rail::Lower
        } else {
            Rail::Upper
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LadderAction {
    Up,
    Down,
}

impl LadderAction {
    pub const ALL: [LadderAction; 2] = [LadderAction::Up, LadderAction::Down];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL
            .get(i)
            .copied()
            .ok_or_else(|| Error::domain(format!("ladder has 2 actions, got index {i}")))
    }

    pub fn rail(self) -> Rail {
        match self {
            LadderAction::Up => Rail::Upper,
            LadderAction::Down => Rail::Lower,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderStepOutcome {
    pub stage: usize,
    pub rail: Rail,
    pub reward: f64,
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderMdp {
    /// `rewards[stage][rail]`, paid on entering that state.
    rewards: Vec<[f64; 2]>,
    blocked: BTreeSet<(usize, Rail)>,
    blocked_penalty: f64,
    start_rail: Rail,
    stage_spacing_m: f64,
    speed_mps: f64,
}

impl LadderMdp {
    pub const DEFAULT_STAGES: usize = 8;
    pub const DEFAULT_BLOCKED_PENALTY: f64 = -5.0;

    pub fn new(rewards: Vec<[f64; 2]>, blocked: BTreeSet<(usize, Rail)>, blocked_penalty: f64) -> Result<Self> {
        if rewards.len() < 2 {
            return Err(Error::param(
                "stages",
                format!("need at least 2 stages, got {}", rewards.len()),
            ));
        }
        if rewards.iter().flatten().any(|r| !r.is_finite()) {
            return Err(Error::param("rewards", "reward table must be finite"));
        }
        if !blocked_penalty.is_finite() {
            return Err(Error::param("blocked_penalty", "must be finite"));
        }
        if let Some(&(stage, _)) = blocked.iter().find(|(s, _)| *s >= rewards.len()) {
            return Err(Error::param("blocked", format!("blocked stage {stage} out of range")));
        }
        Ok(Self {
            rewards,
            blocked,
            blocked_penalty,
            start_rail: Rail::Lower,
            stage_spacing_m: 80.0,
            speed_mps: 20.0,
        })
    }

    /// Ladder whose rewards come from path loss: stage `k` lies `k` spacings
    /// from a tower under stage 0, the lower rail flies at `altitudes.0` and
    /// the upper at `altitudes.1`. Normalization spans the whole table.
    pub fn from_path_loss(
        channel: &ChannelParams,
        stages: usize,
        stage_spacing_m: f64,
        altitudes: (f64, f64),
        mode: RewardMode,
        blocked: BTreeSet<(usize, Rail)>,
        blocked_penalty: f64,
    ) -> Result<Self> {
        let mut pl = Vec::with_capacity(stages);
        for k in 0..stages {
            let horizontal = k as f64 * stage_spacing_m;
            let lower = path_loss_db(&LinkGeometry::new(altitudes.0, horizontal)?, channel)?;
            let upper = path_loss_db(&LinkGeometry::new(altitudes.1, horizontal)?, channel)?;
            pl.push([lower, upper]);
        }
        let lo = pl.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        let hi = pl.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
        let spec = RewardSpec::new(mode, lo, hi)?;
        let rewards = pl
            .iter()
            .map(|row| [channel_reward(row[0], &spec), channel_reward(row[1], &spec)])
            .collect();
        let mut mdp = Self::new(rewards, blocked, blocked_penalty)?;
        mdp.stage_spacing_m = stage_spacing_m;
        Ok(mdp)
    }

    /// Eight stages over the default channel, 80 m apart at 100/200 m,
    /// with the lower rail blocked at stages 3 and 6.
    pub fn default_with_mode(mode: RewardMode) -> Result<Self> {
        let blocked = [(3, Rail::Lower), (6, Rail::Lower)].into_iter().collect();
        Self::from_path_loss(
            &ChannelParams::default(),
            Self::DEFAULT_STAGES,
            80.0,
            (100.0, 200.0),
            mode,
            blocked,
            Self::DEFAULT_BLOCKED_PENALTY,
        )
    }

    pub fn with_speed(mut self, speed_mps: f64) -> Self {
        self.speed_mps = speed_mps;
        self
    }

    pub fn stages(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_blocked(&self, stage: usize, rail: Rail) -> bool {
        self.blocked.contains(&(stage, rail))
    }

    pub fn blocked(&self) -> &BTreeSet<(usize, Rail)> {
        &self.blocked
    }

    /// Immediate reward for entering `(stage, rail)`.
    pub fn entry_reward(&self, stage: usize, rail: Rail) -> f64 {
        if self.is_blocked(stage, rail) {
            self.blocked_penalty
        } else {
            self.rewards[stage][rail.index()]
        }
    }

    pub fn state_index(&self, stage: usize, rail: Rail) -> usize {
        stage * 2 + rail.index()
    }

    pub fn state_at(&self, index: usize) -> (usize, Rail) {
        (index / 2, Rail::from_index(index % 2))
    }
}

/// Deterministic advance to the next stage on the rail the action selects.
pub fn ladder_step(mdp: &LadderMdp, stage: usize, action: LadderAction) -> Result<LadderStepOutcome> {
    if stage + 1 >= mdp.stages() {
        return Err(Error::domain(format!(
            "stage {stage} has no successor in a {}-stage ladder",
            mdp.stages()
        )));
    }
    let next = stage + 1;
    let rail = action.rail();
    Ok(LadderStepOutcome {
        stage: next,
        rail,
        reward: mdp.entry_reward(next, rail),
        done: next + 1 == mdp.stages(),
    })
}

impl Environment for LadderMdp {
    fn num_states(&self) -> usize {
        2 * self.stages()
    }

    fn num_actions(&self) -> usize {
        LadderAction::ALL.len()
    }

    fn start_state(&self) -> usize {
        self.state_index(0, self.start_rail)
    }

    fn is_terminal(&self, state: usize) -> bool {
        state / 2 + 1 == self.stages()
    }

    fn step<R: Rng + ?Sized>(
        &self,
        state: usize,
        action: usize,
        _trace: &EpisodeTrace,
        _rng: &mut R,
    ) -> Result<Transition> {
        if state >= self.num_states() {
            return Err(Error::domain(format!("state {state} out of range")));
        }
        let (stage, _) = self.state_at(state);
        let out = ladder_step(self, stage, LadderAction::from_index(action)?)?;
        Ok(Transition {
            next_state: self.state_index(out.stage, out.rail),
            reward: out.reward,
            done: out.done,
        })
    }

    fn step_length_m(&self) -> f64 {
        self.stage_spacing_m
    }

    fn speed_mps(&self) -> f64 {
        self.speed_mps
    }

    fn to_mdp(&self) -> Result<TabularMdp> {
        let n = self.num_states();
        let stage_of = (0..n).map(|s| s / 2).collect();
        let mut mdp = TabularMdp::new(n, 2, Horizon::Staged { stage_of })?;
        for s in 0..n {
            let (stage, _) = self.state_at(s);
            if stage + 1 == self.stages() {
                mdp.set_terminal(s)?;
                continue;
            }
            for action in LadderAction::ALL {
                let out = ladder_step(self, stage, action)?;
                let next = self.state_index(out.stage, out.rail);
                mdp.set(s, action.index(), out.reward, alloc::vec![(next, 1.0)])?;
            }
        }
        Ok(mdp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn two_stage_ladder() {
        let mdp = LadderMdp::new(vec![[0.0, 0.0], [0.0, 1.0]], BTreeSet::new(), -5.0).unwrap();
        let out = ladder_step(&mdp, 0, LadderAction::Up).unwrap();
        assert_eq!(out.reward, 1.0);
        assert!(out.done);
        assert!(ladder_step(&mdp, 1, LadderAction::Up).is_err());
    }

    #[test]
    fn blocked_state_pays_penalty() {
        let blocked = [(1, Rail::Upper)].into_iter().collect();
        let mdp = LadderMdp::new(vec![[0.0, 0.0], [0.2, 0.9], [0.0, 0.0]], blocked, -5.0).unwrap();
        assert_eq!(ladder_step(&mdp, 0, LadderAction::Up).unwrap().reward, -5.0);
        assert_eq!(ladder_step(&mdp, 0, LadderAction::Down).unwrap().reward, 0.2);
    }

    #[test]
    fn rejects_degenerate_tables() {
        assert!(LadderMdp::new(vec![[0.0, 0.0]], BTreeSet::new(), -1.0).is_err());
        assert!(LadderMdp::new(vec![[0.0, f64::NAN], [0.0, 0.0]], BTreeSet::new(), -1.0).is_err());
        let blocked = [(4, Rail::Upper)].into_iter().collect();
        assert!(LadderMdp::new(vec![[0.0, 0.0]; 3], blocked, -1.0).is_err());
    }

    #[test]
    fn default_has_an_unblocked_route() {
        // Enumerate all 2^(stages-1) rail sequences.
        let mdp = LadderMdp::default_with_mode(RewardMode::Pl).unwrap();
        let moves = mdp.stages() - 1;
        let clear = (0u32..1 << moves)
            .filter(|bits| {
                (0..moves).all(|k| {
                    let rail = if bits >> k & 1 == 1 { Rail::Upper } else { Rail::Lower };
                    !mdp.is_blocked(k + 1, rail)
                })
            })
            .count();
        assert!(clear > 0);
        assert_eq!(mdp.blocked().len(), 2);
    }

    #[test]
    fn mdp_export_is_staged() {
        let mdp = LadderMdp::default_with_mode(RewardMode::Pl).unwrap();
        let explicit = mdp.to_mdp().unwrap();
        assert_eq!(explicit.num_states(), 16);
        assert!(explicit.is_terminal(14) && explicit.is_terminal(15));
        assert!(matches!(explicit.horizon(), Horizon::Staged { .. }));
        assert_eq!(explicit.reward(4, LadderAction::Down.index()), -5.0);
    }
}
