use alloc::collections::BTreeSet;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub next_state: usize,
}

/// Ordered record of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    steps: Vec<StepRecord>,
    visited: BTreeSet<usize>,
    total_reward: f64,
    step_length_m: f64,
    speed_mps: f64,
}

impl EpisodeTrace {
    pub fn new(start: usize, step_length_m: f64, speed_mps: f64) -> Self {
        let mut visited = BTreeSet::new();
        visited.insert(start);
        Self {
            steps: Vec::new(),
            visited,
            total_reward: 0.0,
            step_length_m,
            speed_mps,
        }
    }

    pub fn push(&mut self, record: StepRecord) {
        self.visited.insert(record.state);
        self.visited.insert(record.next_state);
        self.total_reward += record.reward;
        self.steps.push(record);
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    pub fn visited(&self) -> &BTreeSet<usize> {
        &self.visited
    }

    pub fn has_visited(&self, state: usize) -> bool {
        self.visited.contains(&state)
    }

    pub fn total_reward(&self) -> f64 {
        self.total_reward
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Flight-time proxy: steps × step length / speed.
    pub fn time_proxy_s(&self) -> f64 {
        self.steps.len() as f64 * self.step_length_m / self.speed_mps
    }

    /// States in visiting order, starting with the initial state.
    pub fn path(&self) -> Vec<usize> {
        let mut path = Vec::with_capacity(self.steps.len() + 1);
        if let Some(first) = self.steps.first() {
            path.push(first.state);
        }
        path.extend(self.steps.iter().map(|s| s.next_state));
        path
    }
}
