use alloc::format;

use crate::fmath::sigmoid;
use crate::{Error, Result};

/// Which sigmoid of the normalized path loss is paid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RewardMode {
    /// `1 / (1 + e^{-x})`: higher path loss pays more.
    Pl,
    /// `1 / (1 + e^{-1/x})`.
    InvPl,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardSpec {
    pub mode: RewardMode,
    pub pl_min_db: f64,
    pub pl_max_db: f64,
    /// Paid when a move neither enters a new cell nor gets closer.
    pub step_penalty: f64,
    /// Added when re-entering a cell already visited in the episode.
    pub revisit_penalty: f64,
    /// Added on entering the terminal cell.
    pub terminal_bonus: f64,
}

impl RewardSpec {
    pub const DEFAULT_STEP_PENALTY: f64 = -1.0;
    pub const DEFAULT_REVISIT_PENALTY: f64 = -2.0;
    pub const DEFAULT_TERMINAL_BONUS: f64 = 20.0;

    pub fn new(mode: RewardMode, pl_min_db: f64, pl_max_db: f64) -> Result<Self> {
        let spec = Self {
            mode,
            pl_min_db,
            pl_max_db,
            step_penalty: Self::DEFAULT_STEP_PENALTY,
            revisit_penalty: Self::DEFAULT_REVISIT_PENALTY,
            terminal_bonus: Self::DEFAULT_TERMINAL_BONUS,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pl_min_db.is_finite() && self.pl_max_db.is_finite() && self.pl_min_db < self.pl_max_db) {
            return Err(Error::param(
                "pl_max_db",
                format!(
                    "need finite pl_min_db < pl_max_db, got [{}, {}]",
                    self.pl_min_db, self.pl_max_db
                ),
            ));
        }
        if !self.step_penalty.is_finite() {
            return Err(Error::param("step_penalty", "must be finite"));
        }
        if !(self.revisit_penalty.is_finite() && self.revisit_penalty <= self.step_penalty) {
            return Err(Error::param("revisit_penalty", "must be finite and <= step_penalty"));
        }
        if !self.terminal_bonus.is_finite() {
            return Err(Error::param("terminal_bonus", "must be finite"));
        }
        Ok(())
    }

    fn midpoint(&self) -> f64 {
        0.5 * (self.pl_min_db + self.pl_max_db)
    }
}

/// Maps `[pl_min, pl_max]` affinely onto `[-1, 1]`, clamping outside.
pub fn normalize_pl(pl_db: f64, spec: &RewardSpec) -> f64 {
    let x = 2.0 * (pl_db - spec.midpoint()) / (spec.pl_max_db - spec.pl_min_db);
    x.clamp(-1.0, 1.0)
}

pub fn reward_pl(x: f64) -> f64 {
    sigmoid(x)
}

pub fn reward_inv_pl(x: f64) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::domain(format!(
            "inverse path-loss reward is undefined at x = {x}"
        )));
    }
    Ok(sigmoid(1.0 / x))
}

/// Channel-derived reward for a sampled path loss under `spec`.
pub fn channel_reward(pl_db: f64, spec: &RewardSpec) -> f64 {
    let x = normalize_pl(pl_db, spec);
    match spec.mode {
        RewardMode::Pl => reward_pl(x),
        RewardMode::InvPl => {
            // The midpoint itself is the singularity; step just above it.
            let x = if x == 0.0 { 1e-9 } else { x };
            sigmoid(1.0 / x)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> RewardSpec {
        RewardSpec::new(RewardMode::Pl, 90.0, 110.0).unwrap()
    }

    #[test]
    fn normalization_endpoints() {
        let s = spec();
        assert_eq!(normalize_pl(100.0, &s), 0.0);
        assert_eq!(normalize_pl(110.0, &s), 1.0);
        assert_eq!(normalize_pl(90.0, &s), -1.0);
        assert_eq!(normalize_pl(500.0, &s), 1.0);
        assert_eq!(normalize_pl(0.0, &s), -1.0);
        assert_eq!(normalize_pl(95.0, &s), -0.5);
    }

    #[test]
    fn sigmoid_rewards() {
        assert_eq!(reward_pl(0.0), 0.5);
        assert!((reward_pl(20.0) - 1.0).abs() < 1e-8);
        assert!((reward_pl(1.0) - 0.731_058_578_630_004_9).abs() < 1e-15);
        assert!((reward_inv_pl(1.0).unwrap() - 0.731_058_578_630_004_9).abs() < 1e-15);
        assert!((reward_inv_pl(-1.0).unwrap() - 0.268_941_421_369_995_1).abs() < 1e-15);
        assert!(reward_inv_pl(0.0).is_err());
        for x in [0.1, 0.7, 3.0, -2.5] {
            let sum = reward_inv_pl(x).unwrap() + reward_inv_pl(-x).unwrap();
            assert!((sum - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn inverse_reward_at_midpoint_is_finite() {
        let s = RewardSpec {
            mode: RewardMode::InvPl,
            ..spec()
        };
        let r = channel_reward(100.0, &s);
        assert!(r.is_finite() && r > 0.99);
    }

    #[test]
    fn spec_validation() {
        assert!(RewardSpec::new(RewardMode::Pl, 100.0, 100.0).is_err());
        let s = RewardSpec {
            revisit_penalty: -0.5,
            ..spec()
        };
        assert!(s.validate().is_err());
        assert_eq!(spec().step_penalty, -1.0);
    }

    #[test]
    fn pl_mode_rewards_higher_path_loss() {
        let s = spec();
        let inv = RewardSpec {
            mode: RewardMode::InvPl,
            ..s
        };
        let mut prev_pl = channel_reward(90.5, &s);
        let mut prev_inv = channel_reward(100.5, &inv);
        for k in 1..19 {
            let pl = 90.5 + k as f64 * 0.5;
            let r = channel_reward(pl, &s);
            assert!(r > prev_pl);
            prev_pl = r;
            // Within one sign branch of x the inverse mode reverses the order.
            if pl > 100.5 {
                let ri = channel_reward(pl, &inv);
                assert!(ri < prev_inv);
                prev_inv = ri;
            }
        }
    }
}
