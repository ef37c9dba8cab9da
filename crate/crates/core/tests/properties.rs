use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uavsim_core::agents::{
    argmax, bellman_residual, greedy_trajectory, q0_ar_ratio, q_update, run_q_learning, value_iteration,
    LearningConfig, QTable, RolloutOutcome,
};
use uavsim_core::channel::ChannelParams;
use uavsim_core::environment::{Environment, GridAction, GridEnv, GridState, GridWorld, LadderMdp, RewardMode};
use uavsim_core::objective::{
    nonconvexity_probe, throughput_objective, CuSite, NetworkLayout, Position, PositionBox, Ue,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ratio_identity_and_scaling(q0 in 1e-6f64..1e6, ar in 1e-6f64..1e6, c in 1e-3f64..1e3) {
        prop_assert_eq!(q0_ar_ratio(q0, q0), 0.0);
        let base = q0_ar_ratio(q0, ar);
        let scaled = q0_ar_ratio(c * q0, c * ar);
        prop_assert!((base - scaled).abs() <= 1e-12 * base.max(1.0));
    }

    #[test]
    fn ratio_identity_for_any_sign(v in -1e9f64..1e9) {
        prop_assert_eq!(q0_ar_ratio(v, v), 0.0);
    }
}

proptest! {
    #[test]
    fn q_update_contracts_toward_target(
        old in -100.0f64..100.0,
        next in prop::collection::vec(-100.0f64..100.0, 4),
        r in -10.0f64..10.0,
        alpha in 0.0f64..=1.0,
        gamma in 0.0f64..=1.0,
    ) {
        let mut values = vec![0.0; 8];
        values[1] = old;
        values[4..].copy_from_slice(&next);
        let mut table = QTable::from_values(2, 4, values).unwrap();
        let target = r + gamma * table.max(1);
        let new = q_update(&mut table, 0, 1, r, 1, alpha, gamma).unwrap();
        let expect = (1.0 - alpha) * (old - target).abs();
        prop_assert!(((new - target).abs() - expect).abs() <= 1e-9 * (1.0 + old.abs() + target.abs()));
    }

    #[test]
    fn a_step_moves_at_most_one_cell(col in 0usize..5, row in 0usize..5, a in 0usize..4) {
        let grid = GridWorld::default();
        let cell = GridState::new(col, row);
        let next = grid.apply(cell, GridAction::from_index(a).unwrap());
        let before = grid.distance_to_terminal(cell) as i64;
        let after = grid.distance_to_terminal(next) as i64;
        prop_assert!((after - before).abs() <= 1);
        prop_assert!(grid.contains(next));
    }

    #[test]
    fn objective_ignores_ue_order(
        ues in prop::collection::vec((0.0f64..400.0, 0.0f64..400.0, 0.01f64..1.0), 1..6),
        x in 0.0f64..400.0,
        y in 0.0f64..400.0,
        seed in any::<u64>(),
    ) {
        let cu = vec![CuSite { x: 200.0, y: 0.0, height_m: 30.0 }];
        let mk = |list: &[(f64, f64, f64)]| {
            let ues = list.iter().map(|&(x, y, p)| Ue { x, y, tx_power_w: p }).collect();
            NetworkLayout::with_first_cu(ues, cu.clone()).unwrap()
        };
        let mut shuffled = ues.clone();
        rand::seq::SliceRandom::shuffle(&mut shuffled[..], &mut ChaCha8Rng::seed_from_u64(seed));
        let p = ChannelParams::default();
        let uav = Position::new(x, y, 150.0);
        let a = throughput_objective(uav, &mk(&ues), &p).unwrap();
        let b = throughput_objective(uav, &mk(&shuffled), &p).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn argmax_survives_positive_scaling(rates in prop::collection::vec(0.0f64..50.0, 1..8), c in 1e-3f64..1e3) {
        let scaled: Vec<f64> = rates.iter().map(|r| r * c).collect();
        prop_assert_eq!(argmax(&rates), argmax(&scaled));
    }
}

#[test]
fn probe_maxima_are_rechecked_from_the_field() {
    let layout = uavsim_core::objective::two_cluster_layout();
    let report = nonconvexity_probe(&layout, &PositionBox::default(), 41, &ChannelParams::default()).unwrap();
    let n = report.resolution;
    for (k, point) in report.field.iter().enumerate() {
        let (ix, iy) = (k % n, k / n);
        let mut neighbors = Vec::new();
        if ix > 0 {
            neighbors.push(report.value_at(ix - 1, iy));
        }
        if ix + 1 < n {
            neighbors.push(report.value_at(ix + 1, iy));
        }
        if iy > 0 {
            neighbors.push(report.value_at(ix, iy - 1));
        }
        if iy + 1 < n {
            neighbors.push(report.value_at(ix, iy + 1));
        }
        let strict = neighbors.iter().all(|&v| point.value > v);
        assert_eq!(strict, report.local_maxima.contains(&k));
    }
}

#[test]
fn value_iteration_residual_is_below_tolerance() {
    let env = GridEnv::new(GridWorld::default(), RewardMode::Pl).unwrap();
    let mdp = env.to_mdp().unwrap();
    for gamma in [0.5, 0.8, 0.95] {
        let policy = value_iteration(&mdp, gamma, 1e-9).unwrap();
        assert!(bellman_residual(&mdp, gamma, &policy.value_of) < 1e-9);
    }
}

#[test]
fn learned_ladder_policy_matches_the_plan() {
    let env = LadderMdp::default_with_mode(RewardMode::Pl).unwrap();
    let config = LearningConfig {
        episodes: 2000,
        ..Default::default()
    };
    let (table, _) = run_q_learning(&env, &config).unwrap();
    let plan = value_iteration(&env.to_mdp().unwrap(), config.gamma, 1e-9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let rollout = greedy_trajectory(&table, &env, 100, &mut rng).unwrap();
    assert_eq!(rollout.outcome, RolloutOutcome::ReachedTerminal);
    for step in rollout.trace.steps() {
        assert_eq!(Some(step.action), plan.action_of[step.state]);
    }
}

#[test]
fn learned_grid_policy_matches_the_plan_along_its_path() {
    let env = GridEnv::new(GridWorld::default(), RewardMode::Pl).unwrap();
    let config = LearningConfig {
        seed: 3,
        ..Default::default()
    };
    let (table, _) = run_q_learning(&env, &config).unwrap();
    let plan = value_iteration(&env.to_mdp().unwrap(), config.gamma, 1e-9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let learned = greedy_trajectory(&table, &env, 100, &mut rng).unwrap();
    let planned = greedy_trajectory(&plan, &env, 100, &mut rng).unwrap();
    assert_eq!(learned.outcome, RolloutOutcome::ReachedTerminal);
    assert_eq!(learned.trace.step_count(), planned.trace.step_count());
}

#[test]
fn seeded_runs_are_bit_identical() {
    let env = GridEnv::new(GridWorld::default(), RewardMode::InvPl).unwrap();
    let config = LearningConfig {
        episodes: 300,
        seed: 99,
        ..Default::default()
    };
    let (a, ma) = run_q_learning(&env, &config).unwrap();
    let (b, mb) = run_q_learning(&env, &config).unwrap();
    assert_eq!(
        a.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        b.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
    assert_eq!(ma, mb);
}
