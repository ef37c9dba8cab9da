//! Cross-algorithm comparison of finished runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use uavsim_core::agents::episodes_to_criterion;

use crate::artifacts::{fmt_f64, read_csv, read_manifest, MetricsRow, OutputSet};
use crate::error::HarnessError;

pub const COMPARISON_FILE: &str = "comparison.csv";
pub const ORDERINGS_FILE: &str = "comparison_orderings.csv";

/// Per-seed outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedResult {
    pub seed: u64,
    /// `None` when the ratio never settles within the threshold.
    pub episodes_to_criterion: Option<usize>,
    pub final_smoothed_reward: f64,
    pub mean_steps: f64,
    pub mean_time_proxy_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub seeds: Vec<SeedResult>,
}

impl AlgorithmSummary {
    pub fn runs_reaching_criterion(&self) -> usize {
        self.seeds.iter().filter(|s| s.episodes_to_criterion.is_some()).count()
    }

    /// Slowest seed, `None` if any seed never reaches the criterion.
    pub fn worst_episodes_to_criterion(&self) -> Option<usize> {
        self.seeds
            .iter()
            .map(|s| s.episodes_to_criterion)
            .try_fold(0, |acc, e| e.map(|e| acc.max(e)))
    }

    fn mean(&self, f: impl Fn(&SeedResult) -> f64) -> f64 {
        self.seeds.iter().map(f).sum::<f64>() / self.seeds.len() as f64
    }

    pub fn final_smoothed_reward(&self) -> f64 {
        self.mean(|s| s.final_smoothed_reward)
    }

    pub fn mean_steps(&self) -> f64 {
        self.mean(|s| s.mean_steps)
    }

    pub fn mean_time_proxy_s(&self) -> f64 {
        self.mean(|s| s.mean_time_proxy_s)
    }
}

/// Strict orderings of algorithm `a` over algorithm `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ordering {
    pub a: String,
    pub b: String,
    /// On every shared seed `a` needs no more episodes than `b`, and fewer
    /// on at least one. Never reaching counts as infinitely many.
    pub reaches_criterion_sooner: bool,
    pub higher_average_reward: bool,
    pub less_flight_time: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub delta: f64,
    pub window: usize,
    pub algorithms: Vec<AlgorithmSummary>,
    pub orderings: Vec<Ordering>,
}

impl Comparison {
    pub fn summary(&self, algorithm: &str) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|a| a.algorithm == algorithm)
    }

    pub fn ordering(&self, a: &str, b: &str) -> Option<&Ordering> {
        self.orderings.iter().find(|o| o.a == a && o.b == b)
    }

    /// Whether `a` needs no more episodes than `b` on every shared seed.
    pub fn no_later_than(&self, a: &str, b: &str) -> Option<bool> {
        let (a, b) = (self.summary(a)?, self.summary(b)?);
        Some(shared(a, b).all(|(x, y)| rank(x.episodes_to_criterion) <= rank(y.episodes_to_criterion)))
    }
}

fn rank(e: Option<usize>) -> usize {
    e.unwrap_or(usize::MAX)
}

fn shared<'a>(
    a: &'a AlgorithmSummary,
    b: &'a AlgorithmSummary,
) -> impl Iterator<Item = (&'a SeedResult, &'a SeedResult)> {
    a.seeds
        .iter()
        .filter_map(move |x| b.seeds.iter().find(|y| y.seed == x.seed).map(|y| (x, y)))
}

/// Summarizes one run's metrics.
pub fn seed_result(seed: u64, rows: &[MetricsRow], delta: f64, window: usize) -> SeedResult {
    let ratios: Vec<f64> = rows.iter().map(|r| r.q0_ar_ratio).collect();
    let tail = &rows[rows.len().saturating_sub(window.max(1))..];
    let n = rows.len().max(1) as f64;
    SeedResult {
        seed,
        episodes_to_criterion: episodes_to_criterion(&ratios, delta),
        final_smoothed_reward: tail.iter().map(|r| r.total_reward).sum::<f64>() / tail.len().max(1) as f64,
        mean_steps: rows.iter().map(|r| r.steps as f64).sum::<f64>() / n,
        mean_time_proxy_s: rows.iter().map(|r| r.time_proxy_s).sum::<f64>() / n,
    }
}

/// Builds summaries and pairwise orderings from per-algorithm results.
pub fn compare(delta: f64, window: usize, mut algorithms: Vec<AlgorithmSummary>) -> Result<Comparison, HarnessError> {
    if algorithms.len() < 2 {
        return Err(HarnessError::Mismatch(format!(
            "need runs of at least 2 algorithms, got {}",
            algorithms.len()
        )));
    }
    algorithms.sort_by(|a, b| a.algorithm.cmp(&b.algorithm));
    for a in &mut algorithms {
        a.seeds.sort_by_key(|s| s.seed);
    }
    let mut orderings = Vec::new();
    for a in &algorithms {
        for b in &algorithms {
            if a.algorithm == b.algorithm {
                continue;
            }
            let pairs: Vec<_> = shared(a, b).collect();
            let sooner = !pairs.is_empty()
                && pairs
                    .iter()
                    .all(|(x, y)| rank(x.episodes_to_criterion) <= rank(y.episodes_to_criterion))
                && pairs
                    .iter()
                    .any(|(x, y)| rank(x.episodes_to_criterion) < rank(y.episodes_to_criterion));
            orderings.push(Ordering {
                a: a.algorithm.clone(),
                b: b.algorithm.clone(),
                reaches_criterion_sooner: sooner,
                higher_average_reward: a.final_smoothed_reward() > b.final_smoothed_reward(),
                less_flight_time: a.mean_time_proxy_s() < b.mean_time_proxy_s(),
            });
        }
    }
    Ok(Comparison {
        delta,
        window,
        algorithms,
        orderings,
    })
}

/// Reads the metrics listed in `manifests` and writes `comparison.csv` and
/// `comparison_orderings.csv` into `out_dir`.
pub fn compare_report(manifests: &[PathBuf], out_dir: &Path, window: usize) -> Result<Comparison, HarnessError> {
    let mut env_hash: Option<String> = None;
    let mut delta: Option<f64> = None;
    let mut by_algorithm: BTreeMap<String, Vec<SeedResult>> = BTreeMap::new();
    for manifest in manifests {
        let base = manifest.parent().unwrap_or(Path::new("."));
        for row in read_manifest(manifest)?.into_iter().filter(|r| r.kind == "metrics") {
            match &env_hash {
                Some(h) if *h != row.env_hash => {
                    return Err(HarnessError::Mismatch(format!(
                        "{} was run on a different environment",
                        manifest.display()
                    )))
                }
                _ => env_hash = Some(row.env_hash.clone()),
            }
            match delta {
                Some(d) if d != row.delta => {
                    return Err(HarnessError::Mismatch(format!(
                        "{} uses threshold {} instead of {d}",
                        manifest.display(),
                        row.delta
                    )))
                }
                _ => delta = Some(row.delta),
            }
            let seed = row.seed.ok_or_else(|| {
                HarnessError::Mismatch(format!("{} lists metrics without a seed", manifest.display()))
            })?;
            let rows: Vec<MetricsRow> = read_csv(&base.join(&row.path))?;
            let results = by_algorithm.entry(row.algorithm.clone()).or_default();
            if results.iter().any(|r| r.seed == seed) {
                return Err(HarnessError::Mismatch(format!(
                    "{} seed {seed} listed twice",
                    row.algorithm
                )));
            }
            results.push(seed_result(seed, &rows, row.delta, window));
        }
    }
    let delta = delta.ok_or_else(|| HarnessError::Mismatch("no metrics listed in the manifests".into()))?;
    let algorithms = by_algorithm
        .into_iter()
        .map(|(algorithm, seeds)| AlgorithmSummary { algorithm, seeds })
        .collect();
    let comparison = compare(delta, window, algorithms)?;
    write_comparison(&comparison, out_dir)?;
    Ok(comparison)
}

fn write_comparison(c: &Comparison, out_dir: &Path) -> Result<(), HarnessError> {
    let mut out = OutputSet::create(out_dir)?;
    let path = out.path(COMPARISON_FILE)?;
    let mut w = csv::Writer::from_path(&path).map_err(HarnessError::csv(&path))?;
    w.write_record([
        "algorithm",
        "runs",
        "runs_reaching_criterion",
        "worst_episodes_to_criterion",
        "final_smoothed_average_reward",
        "mean_steps",
        "mean_time_proxy_s",
        "delta",
        "window",
    ])
    .map_err(HarnessError::csv(&path))?;
    for a in &c.algorithms {
        w.write_record([
            a.algorithm.clone(),
            a.seeds.len().to_string(),
            a.runs_reaching_criterion().to_string(),
            a.worst_episodes_to_criterion()
                .map(|e| e.to_string())
                .unwrap_or_default(),
            fmt_f64(a.final_smoothed_reward()),
            fmt_f64(a.mean_steps()),
            fmt_f64(a.mean_time_proxy_s()),
            fmt_f64(c.delta),
            c.window.to_string(),
        ])
        .map_err(HarnessError::csv(&path))?;
    }
    w.flush().map_err(HarnessError::io(&path))?;

    let path = out.path(ORDERINGS_FILE)?;
    let mut w = csv::Writer::from_path(&path).map_err(HarnessError::csv(&path))?;
    w.write_record([
        "a",
        "b",
        "reaches_criterion_sooner",
        "higher_average_reward",
        "less_flight_time",
    ])
    .map_err(HarnessError::csv(&path))?;
    for o in &c.orderings {
        w.write_record([
            o.a.clone(),
            o.b.clone(),
            o.reaches_criterion_sooner.to_string(),
            o.higher_average_reward.to_string(),
            o.less_flight_time.to_string(),
        ])
        .map_err(HarnessError::csv(&path))?;
    }
    w.flush().map_err(HarnessError::io(&path))?;
    out.commit();
    Ok(())
}
