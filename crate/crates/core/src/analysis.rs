//! Metric series, EMA smoothing, rolling dispersion, reward/score
//! correlation and run summaries.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Default smoothing window for curves and error bands.
pub const DEFAULT_WINDOW: usize = 50;

/// One CSV row of a run's metrics file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub step: u64,
    pub metric: String,
    pub value: f64,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("empty series")]
    Empty,
    #[error("window must be at least 1")]
    Window,
    #[error("steps not strictly increasing in {name} (seed {seed}) at step {step}")]
    Unordered { name: String, seed: u64, step: u64 },
    #[error("insufficient overlap: {0} joined points, need at least 3")]
    Overlap(usize),
    #[error("correlation undefined: {0} has zero variance")]
    ZeroVariance(&'static str),
    #[error("no metrics found")]
    NoMetrics,
    #[error("corrupt metrics: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for AnalysisError {
    fn from(e: csv::Error) -> Self {
        AnalysisError::Corrupt(e.to_string())
    }
}

/// Values of one metric and seed, ordered by step. Steps may skip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub name: String,
    pub seed: u64,
    pub points: Vec<(u64, f64)>,
}

impl MetricSeries {
    pub fn new(name: impl Into<String>, seed: u64, points: Vec<(u64, f64)>) -> Result<Self, AnalysisError> {
        let name = name.into();
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(AnalysisError::Unordered { name, seed, step: w[1].0 });
            }
        }
        Ok(MetricSeries { name, seed, points })
    }

    /// Points at consecutive steps 0, 1, 2, ...
    pub fn from_values(name: impl Into<String>, values: &[f64]) -> Self {
        let points = values.iter().enumerate().map(|(i, v)| (i as u64, *v)).collect();
        MetricSeries { name: name.into(), seed: 0, points }
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn with_values(&self, name: String, values: Vec<f64>) -> MetricSeries {
        let points = self.points.iter().zip(values).map(|(p, v)| (p.0, v)).collect();
        MetricSeries { name, seed: self.seed, points }
    }
}

/// Groups rows into series keyed by (metric, seed).
pub fn series_from_rows(rows: &[MetricRow]) -> Result<BTreeMap<(String, u64), MetricSeries>, AnalysisError> {
    let mut grouped: BTreeMap<(String, u64), Vec<(u64, f64)>> = BTreeMap::new();
    for r in rows {
        grouped.entry((r.metric.clone(), r.seed)).or_default().push((r.step, r.value));
    }
    grouped
        .into_iter()
        .map(|((name, seed), pts)| Ok(((name.clone(), seed), MetricSeries::new(name, seed, pts)?)))
        .collect()
}

/// Exponential moving average with `alpha = 2 / (1 + window)`, seeded
/// with the first value. Non-finite values are gaps: they are skipped and
/// the previous average is carried over.
pub fn ema_smooth(series: &MetricSeries, window: usize) -> Result<MetricSeries, AnalysisError> {
    if window == 0 {
        return Err(AnalysisError::Window);
    }
    if series.points.iter().all(|p| !p.1.is_finite()) {
        return Err(AnalysisError::Empty);
    }
    let alpha = 2.0 / (1.0 + window as f64);
    let mut ema: Option<f64> = None;
    let mut out = Vec::with_capacity(series.len());
    for &(_, y) in &series.points {
        if y.is_finite() {
            ema = Some(match ema {
                None => y,
                Some(e) => (1.0 - alpha) * e + alpha * y,
            });
        }
        out.push(ema.unwrap_or(f64::NAN));
    }
    Ok(series.with_values(format!("{}_ema{window}", series.name), out))
}

/// Sample standard deviation over the trailing `window` finite values
/// (including the current one); 0 while fewer than two are available.
pub fn rolling_std(series: &MetricSeries, window: usize) -> Result<MetricSeries, AnalysisError> {
    if window == 0 {
        return Err(AnalysisError::Window);
    }
    if series.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let mut buf: Vec<f64> = Vec::new();
    let mut out = Vec::with_capacity(series.len());
    for &(_, y) in &series.points {
        if y.is_finite() {
            buf.push(y);
            if buf.len() > window {
                buf.remove(0);
            }
        }
        out.push(sample_std(&buf).unwrap_or(0.0));
    }
    Ok(series.with_values(format!("{}_std{window}", series.name), out))
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Standard deviation with n - 1 normalization; `None` below two values.
pub fn sample_std(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    Some((xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub pearson: f64,
    pub spearman: f64,
    pub n: usize,
}

/// Pearson and Spearman coefficients over the steps both series share.
pub fn correlate(a: &MetricSeries, b: &MetricSeries) -> Result<Correlation, AnalysisError> {
    let bmap: BTreeMap<u64, f64> = b.points.iter().copied().collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        a.points.iter().filter_map(|&(s, x)| bmap.get(&s).map(|&y| (x, y))).filter(|(x, y)| x.is_finite() && y.is_finite()).unzip();
    correlate_values(&xs, &ys)
}

pub fn correlate_values(xs: &[f64], ys: &[f64]) -> Result<Correlation, AnalysisError> {
    let n = xs.len().min(ys.len());
    if n < 3 {
        return Err(AnalysisError::Overlap(n));
    }
    let (xs, ys) = (&xs[..n], &ys[..n]);
    Ok(Correlation { pearson: pearson(xs, ys)?, spearman: pearson(&ranks(xs), &ranks(ys))?, n })
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, AnalysisError> {
    let (mx, my) = (mean(xs).unwrap(), mean(ys).unwrap());
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(AnalysisError::ZeroVariance("first series"));
    }
    if syy == 0.0 {
        return Err(AnalysisError::ZeroVariance("second series"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks, ties sharing their average rank.
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

pub fn write_metrics_csv(rows: &[MetricRow], out: impl Write) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_metrics_csv(input: impl Read) -> Result<Vec<MetricRow>, AnalysisError> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<Result<Vec<MetricRow>, _>>()?;
    Ok(rows)
}

/// Fraction of each seed's series averaged for the final-window figure.
pub const FINAL_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub final_mean: f64,
    /// Sample standard deviation inside the final window.
    pub final_std: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub metric: String,
    pub seeds: Vec<SeedSummary>,
    /// Mean over seeds of the per-seed final-window means.
    pub mean: f64,
    /// Sample standard deviation over seeds; null for a single seed.
    pub std: Option<f64>,
    /// "mean±std" with two decimals.
    pub display: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metrics: Vec<MetricSummary>,
    /// Per-seed correlation of synthesized return with true score.
    pub correlation: BTreeMap<u64, Option<Correlation>>,
    pub reward_traps: BTreeMap<u64, u64>,
    pub window: usize,
}

/// Last `FINAL_FRACTION` of the points (at least one).
pub fn final_window(values: &[f64]) -> &[f64] {
    let k = ((values.len() as f64 * FINAL_FRACTION).ceil() as usize).max(1).min(values.len());
    &values[values.len() - k..]
}

/// Per-seed and cross-seed statistics of every metric.
pub fn summarize(rows: &[MetricRow], window: usize) -> Result<Report, AnalysisError> {
    if rows.is_empty() {
        return Err(AnalysisError::NoMetrics);
    }
    let series = series_from_rows(rows)?;
    let names: BTreeSet<&String> = series.keys().map(|k| &k.0).collect();
    let mut metrics = Vec::new();
    for name in names {
        let seeds: Vec<SeedSummary> = series
            .iter()
            .filter(|(k, _)| &k.0 == name)
            .map(|((_, seed), s)| {
                let vals: Vec<f64> = s.values().into_iter().filter(|v| v.is_finite()).collect();
                let fin = final_window(&vals);
                SeedSummary {
                    seed: *seed,
                    final_mean: mean(fin).unwrap_or(f64::NAN),
                    final_std: sample_std(fin),
                    n: fin.len(),
                }
            })
            .collect();
        let finals: Vec<f64> = seeds.iter().map(|s| s.final_mean).collect();
        let m = mean(&finals).unwrap_or(f64::NAN);
        let std = sample_std(&finals);
        let display = match std {
            Some(s) => format!("{m:.2}±{s:.2}"),
            None => format!("{m:.2}"),
        };
        metrics.push(MetricSummary { metric: name.clone(), seeds, mean: m, std, display });
    }
    let mut correlation = BTreeMap::new();
    let mut reward_traps = BTreeMap::new();
    let seeds: BTreeSet<u64> = series.keys().map(|k| k.1).collect();
    for seed in seeds {
        let get = |n: &str| series.get(&(n.to_string(), seed));
        if let (Some(a), Some(b)) = (get(SYNTH_RETURN), get(TRUE_SCORE)) {
            correlation.insert(seed, correlate(a, b).ok());
        }
        if let Some(t) = get(REWARD_TRAPS) {
            reward_traps.insert(seed, t.points.last().map(|p| p.1 as u64).unwrap_or(0));
        }
    }
    Ok(Report { metrics, correlation, reward_traps, window })
}

pub const SYNTH_RETURN: &str = "synthesized_return";
pub const TRUE_SCORE: &str = "true_score";
pub const REWARD_TRAPS: &str = "reward_traps";

/// Reads `metrics.csv` from a run directory and writes `report.json`,
/// `report.csv` (metric, seed, mean, std, n) and `curves.csv` (smoothed
/// episode curves with rolling dispersion).
pub fn summarize_run(dir: &Path, window: usize) -> Result<Report, AnalysisError> {
    let path = dir.join("metrics.csv");
    if !path.is_file() {
        return Err(AnalysisError::NoMetrics);
    }
    let rows = read_metrics_csv(std::fs::File::open(&path)?)?;
    let report = summarize(&rows, window)?;
    std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report).unwrap() + "\n")?;

    let mut w = csv::Writer::from_path(dir.join("report.csv"))?;
    w.write_record(["metric", "seed", "mean", "std", "n"])?;
    for m in &report.metrics {
        for s in &m.seeds {
            let std = s.final_std.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([m.metric.clone(), s.seed.to_string(), s.final_mean.to_string(), std, s.n.to_string()])?;
        }
        let std = m.std.map(|s| s.to_string()).unwrap_or_default();
        w.write_record([m.metric.clone(), "all".into(), m.mean.to_string(), std, m.seeds.len().to_string()])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("curves.csv"))?;
    w.write_record(["metric", "seed", "step", "value", "ema", "rolling_std"])?;
    for ((name, seed), s) in series_from_rows(&rows)? {
        if name != SYNTH_RETURN && name != TRUE_SCORE {
            continue;
        }
        let (ema, sd) = (ema_smooth(&s, window)?, rolling_std(&s, window)?);
        for ((p, e), d) in s.points.iter().zip(&ema.points).zip(&sd.points) {
            w.write_record([name.clone(), seed.to_string(), p.0.to_string(), p.1.to_string(), e.1.to_string(), d.1.to_string()])?;
        }
    }
    w.flush()?;
    Ok(report)
}
