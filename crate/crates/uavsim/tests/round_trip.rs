use proptest::prelude::*;
use uavsim::artifacts::{read_csv, write_csv, FieldRow, MetricsRow};
use uavsim::load_config;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![any::<f64>().prop_filter("finite", |v| v.is_finite()), -1e3f64..1e3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metrics_rows_round_trip(values in prop::collection::vec((finite(), finite(), finite(), finite(), 0usize..500, finite()), 1..20)) {
        let rows: Vec<MetricsRow> = values
            .iter()
            .enumerate()
            .map(|(i, &(t, a, q, r, s, time))| MetricsRow {
                episode: i + 1,
                total_reward: t,
                average_reward: a,
                q0: q,
                q0_ar_ratio: r,
                steps: s,
                time_proxy_s: time,
            })
            .collect();
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("m.csv");
        write_csv(&path, &rows).unwrap();
        let back: Vec<MetricsRow> = read_csv(&path).unwrap();
        prop_assert_eq!(back, rows);
    }

    #[test]
    fn field_rows_round_trip(values in prop::collection::vec((finite(), finite(), finite()), 1..20)) {
        let rows: Vec<FieldRow> = values.iter().map(|&(x, y, value)| FieldRow { x, y, value }).collect();
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("f.csv");
        write_csv(&path, &rows).unwrap();
        let back: Vec<FieldRow> = read_csv(&path).unwrap();
        prop_assert_eq!(back, rows);
    }

    #[test]
    fn config_hash_tracks_meaningful_fields(epsilon in 0.0f64..=1.0, other in 0.0f64..=1.0, dir in "[a-z]{1,8}") {
        let base = load_config(&format!("[learning]\nepsilon = {epsilon:?}\n")).unwrap();
        let moved = load_config(&format!("output_dir = \"{dir}\"\n[learning]\nepsilon = {epsilon:?}\n")).unwrap();
        prop_assert_eq!(base.hash(), moved.hash());
        let changed = load_config(&format!("[learning]\nepsilon = {other:?}\n")).unwrap();
        prop_assert_eq!(base.hash() == changed.hash(), epsilon == other);
    }
}
