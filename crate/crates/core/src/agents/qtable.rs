use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::{Error, Result};

/// State × action value table, zero-initialized.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    num_states: usize,
    num_actions: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn new(num_states: usize, num_actions: usize) -> Self {
        Self {
            num_states,
            num_actions,
            values: vec![0.0; num_states * num_actions],
        }
    }

    pub fn from_values(num_states: usize, num_actions: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != num_states * num_actions {
            return Err(Error::shape(format!(
                "{num_states}x{num_actions} table needs {} values, got {}",
                num_states * num_actions,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("Q-values must be finite"));
        }
        Ok(Self {
            num_states,
            num_actions,
            values,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.values[state * self.num_actions + action]
    }

    pub fn row(&self, state: usize) -> &[f64] {
        let start = state * self.num_actions;
        &self.values[start..start + self.num_actions]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `max_a Q(s, a)`.
    pub fn max(&self, state: usize) -> f64 {
        self.row(state).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Greedy action, lowest index on ties.
    pub fn argmax(&self, state: usize) -> usize {
        argmax(self.row(state))
    }

    fn check(&self, state: usize, action: usize) -> Result<()> {
        if state >= self.num_states || action >= self.num_actions {
            return Err(Error::domain(format!(
                "(state {state}, action {action}) outside {}x{} table",
                self.num_states, self.num_actions
            )));
        }
        Ok(())
    }

    fn set(&mut self, state: usize, action: usize, value: f64) {
        self.values[state * self.num_actions + action] = value;
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}

fn check_rates(alpha: f64, gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::domain(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    Ok(())
}

fn move_toward(table: &mut QTable, state: usize, action: usize, target: f64, alpha: f64) -> f64 {
    let old = table.get(state, action);
    let new = old + alpha * (target - old);
    table.set(state, action, new);
    new
}

/// Off-policy TD step toward `r + γ·max_a' Q(s', a')`. Returns the new value.
#[allow(clippy::too_many_arguments)]
pub fn q_update(
    table: &mut QTable,
    state: usize,
    action: usize,
    reward: f64,
    next_state: usize,
    alpha: f64,
    gamma: f64,
) -> Result<f64> {
    table.check(state, action)?;
    table.check(next_state, 0)?;
    check_rates(alpha, gamma)?;
    let target = reward + gamma * table.max(next_state);
    Ok(move_toward(table, state, action, target, alpha))
}

/// On-policy TD step toward `r + γ·Q(s', a')` for the action actually taken.
#[allow(clippy::too_many_arguments)]
pub fn sarsa_update(
    table: &mut QTable,
    state: usize,
    action: usize,
    reward: f64,
    next_state: usize,
    next_action: usize,
    alpha: f64,
    gamma: f64,
) -> Result<f64> {
    table.check(state, action)?;
    table.check(next_state, next_action)?;
    check_rates(alpha, gamma)?;
    let target = reward + gamma * table.get(next_state, next_action);
    Ok(move_toward(table, state, action, target, alpha))
}

/// Greedy with probability `1 − ε`, uniform otherwise.
pub fn epsilon_greedy<R: Rng + ?Sized>(row: &[f64], epsilon: f64, rng: &mut R) -> Result<usize> {
    if row.is_empty() {
        return Err(Error::domain("cannot choose from an empty action row"));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::domain(format!("epsilon must lie in [0, 1], got {epsilon}")));
    }
    if rng.gen::<f64>() < epsilon {
        Ok(rng.gen_range(0..row.len()))
    } else {
        Ok(argmax(row))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn q_update_examples() {
        let mut t = QTable::new(3, 2);
        assert_eq!(q_update(&mut t, 0, 1, 1.0, 1, 0.9, 0.8).unwrap(), 0.9);
        assert_eq!(t.get(0, 1), 0.9);
        assert_eq!(t.values().iter().filter(|&&v| v != 0.0).count(), 1);

        let before = t.clone();
        q_update(&mut t, 1, 0, 5.0, 0, 0.0, 0.8).unwrap();
        assert_eq!(t, before);

        assert_eq!(q_update(&mut t, 2, 0, -3.25, 0, 1.0, 0.0).unwrap(), -3.25);
        assert!(q_update(&mut t, 3, 0, 0.0, 0, 0.5, 0.5).is_err());
        assert!(q_update(&mut t, 0, 2, 0.0, 0, 0.5, 0.5).is_err());
        assert!(q_update(&mut t, 0, 0, 0.0, 0, 1.5, 0.5).is_err());
    }

    #[test]
    fn sarsa_update_examples() {
        let mut t = QTable::new(2, 2);
        assert_eq!(sarsa_update(&mut t, 0, 0, 1.0, 1, 1, 0.9, 0.8).unwrap(), 0.9);

        let mut a = QTable::from_values(2, 2, alloc::vec![0.5, -1.0, 2.0, 3.0]).unwrap();
        let mut b = a.clone();
        let greedy = a.argmax(1);
        let qa = q_update(&mut a, 0, 0, 1.0, 1, 0.9, 0.8).unwrap();
        let qb = sarsa_update(&mut b, 0, 0, 1.0, 1, greedy, 0.9, 0.8).unwrap();
        assert_eq!(qa, qb);

        for next in 0..2 {
            let mut a = QTable::from_values(2, 2, alloc::vec![0.5, -1.0, 2.0, 3.0]).unwrap();
            let mut b = a.clone();
            let qa = q_update(&mut a, 0, 1, 0.7, 1, 0.9, 0.0).unwrap();
            let qb = sarsa_update(&mut b, 0, 1, 0.7, 1, next, 0.9, 0.0).unwrap();
            assert_eq!(qa, qb);
        }
        assert!(sarsa_update(&mut t, 0, 0, 1.0, 1, 2, 0.9, 0.8).is_err());
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[1.0, 1.0, 0.0, 0.0]), 0);
        assert_eq!(argmax(&[0.0, 2.0, 2.0]), 1);
    }

    #[test]
    fn epsilon_greedy_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            assert_eq!(epsilon_greedy(&[0.0, 3.0, 1.0], 0.0, &mut rng).unwrap(), 1);
            assert_eq!(epsilon_greedy(&[1.0, 1.0, 0.0, 0.0], 0.0, &mut rng).unwrap(), 0);
        }
        assert!(epsilon_greedy(&[], 0.1, &mut rng).is_err());
        assert!(epsilon_greedy(&[1.0], 1.1, &mut rng).is_err());
    }

    #[test]
    fn epsilon_one_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts = [0usize; 4];
        let n = 100_000;
        for _ in 0..n {
            counts[epsilon_greedy(&[5.0, 0.0, 0.0, 0.0], 1.0, &mut rng).unwrap()] += 1;
        }
        for c in counts {
            let freq = c as f64 / n as f64;
            // within 2% of the uniform frequency
            assert!((freq - 0.25).abs() < 0.02 * 0.25, "{freq}");
        }
    }
}
