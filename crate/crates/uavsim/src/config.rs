//! Experiment configuration loaded from TOML.
//!
//! Every field has a default, so an empty document is a complete
//! configuration. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use uavsim_core::agents::{Algorithm, LearningConfig};
use uavsim_core::channel::ChannelParams;
use uavsim_core::environment::{GridEnv, GridState, GridWorld, LadderMdp, Rail, RewardMode, RewardSpec};
use uavsim_core::objective::{CuSite, NetworkLayout, PositionBox, Ue};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Gridworld,
    Ladder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmChoice {
    Qlearning,
    Sarsa,
    ValueIteration,
    All,
}

impl AlgorithmChoice {
    pub fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgorithmChoice::Qlearning => vec![Algorithm::QLearning],
            AlgorithmChoice::Sarsa => vec![Algorithm::Sarsa],
            AlgorithmChoice::ValueIteration => vec![Algorithm::ValueIteration],
            AlgorithmChoice::All => Algorithm::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RewardModeName {
    #[serde(rename = "PL")]
    Pl,
    #[serde(rename = "InvPL")]
    InvPl,
}

impl From<RewardModeName> for RewardMode {
    fn from(mode: RewardModeName) -> Self {
        match mode {
            RewardModeName::Pl => RewardMode::Pl,
            RewardModeName::InvPl => RewardMode::InvPl,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub cols: usize,
    pub rows: usize,
    pub cell_size_m: f64,
    pub start: [usize; 2],
    /// Defaults to the cell opposite the start corner.
    pub terminal: Option<[usize; 2]>,
    pub altitude_band_m: [f64; 2],
    pub nodes_per_cell: usize,
    pub node_tx_power_w: f64,
    pub speed_mps: f64,
    /// Tower ground positions; defaults to the start and terminal centers.
    pub towers: Option<Vec<[f64; 2]>>,
    pub step_penalty: f64,
    pub revisit_penalty: f64,
    pub terminal_bonus: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            cols: 5,
            rows: 5,
            cell_size_m: 80.0,
            start: [0, 0],
            terminal: None,
            altitude_band_m: [100.0, 200.0],
            nodes_per_cell: 2,
            node_tx_power_w: 0.1,
            speed_mps: 20.0,
            towers: None,
            step_penalty: RewardSpec::DEFAULT_STEP_PENALTY,
            revisit_penalty: RewardSpec::DEFAULT_REVISIT_PENALTY,
            terminal_bonus: RewardSpec::DEFAULT_TERMINAL_BONUS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderSection {
    pub stages: usize,
    pub stage_spacing_m: f64,
    /// Lower and upper rail altitudes.
    pub altitudes_m: [f64; 2],
    pub blocked_lower: Vec<usize>,
    pub blocked_upper: Vec<usize>,
    pub blocked_penalty: f64,
    pub speed_mps: f64,
}

impl Default for LadderSection {
    fn default() -> Self {
        Self {
            stages: LadderMdp::DEFAULT_STAGES,
            stage_spacing_m: 80.0,
            altitudes_m: [100.0, 200.0],
            blocked_lower: vec![3, 6],
            blocked_upper: Vec::new(),
            blocked_penalty: LadderMdp::DEFAULT_BLOCKED_PENALTY,
            speed_mps: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearningSection {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub episodes: usize,
    pub max_steps_per_episode: usize,
    pub delta: f64,
    pub gamma_candidates: Vec<f64>,
    /// Pick γ with the value-iteration agent before the runs.
    pub select_gamma: bool,
    pub vi_tolerance: f64,
    /// Window of the smoothed reward reported by `compare`.
    pub smoothing_window: usize,
}

impl Default for LearningSection {
    fn default() -> Self {
        let base = LearningConfig::default();
        Self {
            alpha: base.alpha,
            gamma: base.gamma,
            epsilon: base.epsilon,
            episodes: base.episodes,
            max_steps_per_episode: base.max_steps_per_episode,
            delta: base.delta,
            gamma_candidates: base.gamma_candidates,
            select_gamma: false,
            vi_tolerance: base.vi_tolerance,
            smoothing_window: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub mu: f64,
    pub psi: f64,
    pub eta_los_db: f64,
    pub eta_nlos_db: f64,
    pub carrier_hz: f64,
    pub light_speed_mps: f64,
    pub noise_power_w: f64,
    pub beta: f64,
    pub noise_sigma: f64,
}

impl Default for ChannelSection {
    fn default() -> Self {
        let p = ChannelParams::default();
        Self {
            mu: p.mu,
            psi: p.psi,
            eta_los_db: p.eta_los_db,
            eta_nlos_db: p.eta_nlos_db,
            carrier_hz: p.carrier_hz,
            light_speed_mps: p.light_speed,
            noise_power_w: p.noise_power_w,
            beta: p.beta,
            noise_sigma: p.noise_sigma,
        }
    }
}

/// Antenna counts of the two MIMO hops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AntennaSection {
    pub n_t_ue: usize,
    pub n_r_uav: usize,
    pub n_t_uav: usize,
    pub n_r_cu: usize,
}

impl Default for AntennaSection {
    fn default() -> Self {
        Self {
            n_t_ue: 2,
            n_r_uav: 2,
            n_t_uav: 2,
            n_r_cu: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UeEntry {
    pub x: f64,
    pub y: f64,
    #[serde(default = "default_ue_power")]
    pub tx_power_w: f64,
}

fn default_ue_power() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuEntry {
    pub x: f64,
    pub y: f64,
    #[serde(default = "default_cu_height")]
    pub height_m: f64,
}

fn default_cu_height() -> f64 {
    30.0
}

/// Ground network for the throughput probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSection {
    #[serde(default)]
    pub ues: Vec<UeEntry>,
    pub cu_sites: Vec<CuEntry>,
    #[serde(default = "default_uav_power")]
    pub uav_tx_power_w: f64,
}

fn default_uav_power() -> f64 {
    NetworkLayout::DEFAULT_UAV_TX_POWER_W
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSection {
    pub resolution: usize,
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub h_range: [f64; 2],
}

impl Default for ProbeSection {
    fn default() -> Self {
        let b = PositionBox::default();
        Self {
            resolution: 81,
            x_range: [b.x_range.0, b.x_range.1],
            y_range: [b.y_range.0, b.y_range.1],
            h_range: [b.h_range.0, b.h_range.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub algorithm: AlgorithmChoice,
    pub reward_mode: RewardModeName,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub grid: GridSection,
    pub ladder: LadderSection,
    pub learning: LearningSection,
    pub channel: ChannelSection,
    pub antennas: AntennaSection,
    pub layout: Option<LayoutSection>,
    pub probe: ProbeSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::Gridworld,
            algorithm: AlgorithmChoice::All,
            reward_mode: RewardModeName::Pl,
            seeds: vec![0],
            output_dir: PathBuf::from("out"),
            grid: GridSection::default(),
            ladder: LadderSection::default(),
            learning: LearningSection::default(),
            channel: ChannelSection::default(),
            antennas: AntennaSection::default(),
            layout: None,
            probe: ProbeSection::default(),
        }
    }
}

/// Parses and validates a configuration document.
pub fn load_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut config: ExperimentConfig = toml::from_str(text)?;
    config.resolve();
    config.validate()?;
    Ok(config)
}

pub fn load_config_file(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    load_config(&text)
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Prefixes a core validation error with its section.
fn in_section(section: &'static str) -> impl Fn(uavsim_core::Error) -> ConfigError {
    move |err| match err {
        uavsim_core::Error::InvalidParameter { field, reason } => invalid(format!("{section}.{field}"), reason),
        other => invalid(section, other.to_string()),
    }
}

impl ExperimentConfig {
    /// Fills defaults that depend on other fields.
    fn resolve(&mut self) {
        let g = &mut self.grid;
        if g.terminal.is_none() {
            g.terminal = Some([g.cols.saturating_sub(1), g.rows.saturating_sub(1)]);
        }
        if g.towers.is_none() {
            let center = |[c, r]: [usize; 2]| [(c as f64 + 0.5) * g.cell_size_m, (r as f64 + 0.5) * g.cell_size_m];
            g.towers = Some(vec![center(g.start), center(g.terminal.unwrap_or(g.start))]);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.seeds.is_empty() {
            return Err(invalid("seeds", "at least one seed is required"));
        }
        self.channel_params().validate().map_err(in_section("channel"))?;
        self.learning_config(self.seeds[0])
            .validate()
            .map_err(in_section("learning"))?;
        if self.learning.gamma_candidates.is_empty() {
            return Err(invalid("learning.gamma_candidates", "need at least one candidate"));
        }
        if self.learning.smoothing_window == 0 {
            return Err(invalid("learning.smoothing_window", "must be >= 1"));
        }
        let a = &self.antennas;
        for (field, n) in [
            ("n_t_ue", a.n_t_ue),
            ("n_r_uav", a.n_r_uav),
            ("n_t_uav", a.n_t_uav),
            ("n_r_cu", a.n_r_cu),
        ] {
            if n == 0 {
                return Err(invalid(format!("antennas.{field}"), "must be >= 1"));
            }
        }
        if self.channel.beta > 0.0 && a.n_t_ue != a.n_r_uav {
            return Err(invalid(
                "antennas.n_r_uav",
                "the nonlinear uplink term needs n_t_ue == n_r_uav",
            ));
        }
        match self.scenario {
            Scenario::Gridworld => {
                self.grid_env()?;
            }
            Scenario::Ladder => {
                self.ladder_mdp()?;
            }
        }
        self.position_box().validate().map_err(in_section("probe"))?;
        if self.probe.resolution < 3 {
            return Err(invalid("probe.resolution", "need at least 3 points per axis"));
        }
        if self.layout.is_some() {
            self.network_layout()?;
        }
        Ok(())
    }

    pub fn channel_params(&self) -> ChannelParams {
        let c = &self.channel;
        ChannelParams {
            mu: c.mu,
            psi: c.psi,
            eta_los_db: c.eta_los_db,
            eta_nlos_db: c.eta_nlos_db,
            carrier_hz: c.carrier_hz,
            light_speed: c.light_speed_mps,
            noise_power_w: c.noise_power_w,
            beta: c.beta,
            noise_sigma: c.noise_sigma,
        }
    }

    pub fn learning_config(&self, seed: u64) -> LearningConfig {
        let l = &self.learning;
        LearningConfig {
            alpha: l.alpha,
            gamma: l.gamma,
            epsilon: l.epsilon,
            episodes: l.episodes,
            max_steps_per_episode: l.max_steps_per_episode,
            delta: l.delta,
            gamma_candidates: l.gamma_candidates.clone(),
            seed,
            vi_tolerance: l.vi_tolerance,
        }
    }

    pub fn grid_world(&self) -> GridWorld {
        let g = &self.grid;
        let cell = |[c, r]: [usize; 2]| GridState::new(c, r);
        let terminal = g
            .terminal
            .unwrap_or([g.cols.saturating_sub(1), g.rows.saturating_sub(1)]);
        GridWorld {
            cols: g.cols,
            rows: g.rows,
            cell_size_m: g.cell_size_m,
            start: cell(g.start),
            terminal: cell(terminal),
            altitude_band_m: (g.altitude_band_m[0], g.altitude_band_m[1]),
            nodes_per_cell: g.nodes_per_cell,
            node_tx_power_w: g.node_tx_power_w,
            speed_mps: g.speed_mps,
            towers: g.towers.iter().flatten().map(|&[x, y]| (x, y)).collect(),
            channel: self.channel_params(),
        }
    }

    pub fn grid_env(&self) -> Result<GridEnv, ConfigError> {
        let grid = self.grid_world();
        grid.validate().map_err(in_section("grid"))?;
        let env = GridEnv::new(grid.clone(), self.reward_mode.into()).map_err(in_section("grid"))?;
        let spec = RewardSpec {
            step_penalty: self.grid.step_penalty,
            revisit_penalty: self.grid.revisit_penalty,
            terminal_bonus: self.grid.terminal_bonus,
            ..*env.reward_spec()
        };
        GridEnv::with_reward_spec(grid, spec).map_err(in_section("grid"))
    }

    pub fn ladder_mdp(&self) -> Result<LadderMdp, ConfigError> {
        let l = &self.ladder;
        let blocked = l
            .blocked_lower
            .iter()
            .map(|&s| (s, Rail::Lower))
            .chain(l.blocked_upper.iter().map(|&s| (s, Rail::Upper)))
            .collect();
        if !(l.speed_mps.is_finite() && l.speed_mps > 0.0) {
            return Err(invalid("ladder.speed_mps", "must be finite and > 0"));
        }
        if !(l.stage_spacing_m.is_finite() && l.stage_spacing_m > 0.0) {
            return Err(invalid("ladder.stage_spacing_m", "must be finite and > 0"));
        }
        let mdp = LadderMdp::from_path_loss(
            &self.channel_params(),
            l.stages,
            l.stage_spacing_m,
            (l.altitudes_m[0], l.altitudes_m[1]),
            self.reward_mode.into(),
            blocked,
            l.blocked_penalty,
        )
        .map_err(in_section("ladder"))?;
        Ok(mdp.with_speed(l.speed_mps))
    }

    pub fn position_box(&self) -> PositionBox {
        let p = &self.probe;
        PositionBox {
            x_range: (p.x_range[0], p.x_range[1]),
            y_range: (p.y_range[0], p.y_range[1]),
            h_range: (p.h_range[0], p.h_range[1]),
        }
    }

    /// The configured layout associated with its first site, if any.
    pub fn network_layout(&self) -> Result<Option<NetworkLayout>, ConfigError> {
        let Some(layout) = &self.layout else {
            return Ok(None);
        };
        let ues = layout
            .ues
            .iter()
            .map(|u| Ue {
                x: u.x,
                y: u.y,
                tx_power_w: u.tx_power_w,
            })
            .collect();
        let sites: Vec<CuSite> = layout
            .cu_sites
            .iter()
            .map(|c| CuSite {
                x: c.x,
                y: c.y,
                height_m: c.height_m,
            })
            .collect();
        let association = (0..sites.len()).map(|j| j == 0).collect();
        NetworkLayout::new(ues, sites, association, layout.uav_tx_power_w)
            .map(Some)
            .map_err(in_section("layout"))
    }

    /// SHA-256 over the canonical JSON form, ignoring `output_dir`.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Hash of the fields that define the environment, so runs from
    /// different configs can be checked for comparability.
    pub fn environment_hash(&self) -> String {
        let value = match self.scenario {
            Scenario::Gridworld => serde_json::json!({
                "scenario": self.scenario,
                "reward_mode": self.reward_mode,
                "grid": self.grid,
                "channel": self.channel,
            }),
            Scenario::Ladder => serde_json::json!({
                "scenario": self.scenario,
                "reward_mode": self.reward_mode,
                "ladder": self.ladder,
                "channel": self.channel,
            }),
        };
        let digest = Sha256::digest(value.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
