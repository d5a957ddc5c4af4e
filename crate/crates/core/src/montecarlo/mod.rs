//! Seeded Monte Carlo bias studies of the six estimator pairs.
//!
//! Replicate `r` of an experiment simulates with seed `base_seed + r`, so every
//! estimator pair sees the same data and reruns are bit-identical.

mod summary;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{
    connectivity, decompose_all, estimate_gamma, estimate_memory, EstimatorPair, MemoryEstimate,
    MemoryMethod,
};
use crate::matrix::Matrix;
use crate::simulate::{simulate_arfima, ArfimaSpec, Condition, SimulationOptions, DEFAULT_BURNIN};
use crate::wavelet::FilterKind;

pub use summary::{quantile_sorted, summarize, BoxSummary};

/// `q` memory parameters evenly spaced inside `(-1/2, 1/2)`:
/// `d_k = -1/2 + k / (q + 1)`. For `q = 4` this is `{-0.3, -0.1, 0.1, 0.3}`.
pub fn evenly_spaced_memory(q: usize) -> Vec<f64> {
    // single rounded division per value
    (1..=q)
        .map(|k| (2.0 * k as f64 - (q + 1) as f64) / (2.0 * (q + 1) as f64))
        .collect()
}

fn default_pairs() -> Vec<EstimatorPair> {
    EstimatorPair::all()
}

fn default_burnin() -> usize {
    DEFAULT_BURNIN
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub condition: Condition,
    /// Number of series.
    pub q: usize,
    /// Series length, a power of two.
    pub length: usize,
    pub reps: usize,
    /// Target correlation among series 2..q; required by 2A and 2B.
    #[serde(default)]
    pub rho: Option<f64>,
    /// Memory parameters cycled to length `q`; absent means
    /// [`evenly_spaced_memory`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_set: Option<Vec<f64>>,
    #[serde(default = "default_pairs")]
    pub estimator_pairs: Vec<EstimatorPair>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub filter: FilterKind,
    /// Decomposition depth; absent means `log2(length) - 3`.
    #[serde(default)]
    pub levels: Option<usize>,
    #[serde(default = "default_burnin")]
    pub burnin: usize,
    /// Also record `d_hat - d` for every series.
    #[serde(default)]
    pub score_memory: bool,
}

impl ExperimentConfig {
    pub fn new(condition: Condition, q: usize, length: usize, reps: usize, rho: Option<f64>) -> Self {
        Self {
            condition,
            q,
            length,
            reps,
            rho,
            d_set: None,
            estimator_pairs: default_pairs(),
            base_seed: 0,
            filter: FilterKind::La8,
            levels: None,
            burnin: DEFAULT_BURNIN,
            score_memory: false,
        }
    }

    /// Memory parameter of every series.
    pub fn memory_params(&self) -> Vec<f64> {
        match &self.d_set {
            Some(set) => set.iter().copied().cycle().take(self.q).collect(),
            None => evenly_spaced_memory(self.q),
        }
    }

    /// Checks every field, reporting the offending one by name.
    pub fn validate(&self) -> Result<()> {
        let schema = |path: &str, message: String| Error::Schema {
            path: path.into(),
            message,
        };
        if self.reps == 0 {
            return Err(schema("reps", "must be at least 1".into()));
        }
        if self.q < 2 {
            return Err(schema("q", format!("need at least 2 series, got {}", self.q)));
        }
        if self.condition.is_correlated() && self.q < 3 {
            return Err(schema(
                "q",
                format!("condition {} needs at least 3 series", self.condition),
            ));
        }
        if !self.length.is_power_of_two() || self.length < 128 {
            return Err(schema(
                "length",
                format!("must be a power of two >= 128, got {}", self.length),
            ));
        }
        if let Some(set) = &self.d_set {
            if set.is_empty() {
                return Err(schema("d_set", "must not be empty".into()));
            }
            if let Some((i, d)) = set.iter().enumerate().find(|(_, d)| !(d.abs() < 0.5)) {
                return Err(schema(&format!("d_set[{i}]"), format!("{d} is outside (-0.5, 0.5)")));
            }
        }
        if self.estimator_pairs.is_empty() {
            return Err(schema("estimator_pairs", "must not be empty".into()));
        }
        match (self.condition.is_correlated(), self.rho) {
            (true, None) => {
                return Err(schema(
                    "rho",
                    format!("condition {} requires a correlation", self.condition),
                ))
            }
            (_, Some(rho)) if !rho.is_finite() => {
                return Err(schema("rho", format!("{rho} is not finite")))
            }
            _ => {}
        }
        if let Some(levels) = self.levels {
            let max = self.length.trailing_zeros() as usize;
            if levels < 4 || levels > max {
                return Err(schema("levels", format!("must lie in 4..={max}, got {levels}")));
            }
        } else if self.length.trailing_zeros() < 7 {
            return Err(schema("length", "too short for the default depth".into()));
        }
        ArfimaSpec::from_condition(self.condition, &self.memory_params(), self.rho, 0)
            .map_err(|e| schema("rho", e.to_string()))?;
        Ok(())
    }

    /// Off-diagonal entries whose bias is scored. Correlated designs only
    /// score pairs among series 2..q.
    pub fn scored_pairs(&self) -> Vec<(usize, usize)> {
        let first = usize::from(self.condition.is_correlated());
        (first..self.q)
            .flat_map(|m| ((m + 1)..self.q).map(move |n| (m, n)))
            .collect()
    }

    fn replicate_spec(&self, replicate: usize) -> Result<ArfimaSpec> {
        ArfimaSpec::from_condition(
            self.condition,
            &self.memory_params(),
            self.rho,
            self.base_seed.wrapping_add(replicate as u64),
        )
    }
}

/// A replicate that could not be scored for one estimator pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateFailure {
    pub replicate: usize,
    pub seed: u64,
    pub message: String,
}

/// Bias samples of one estimator pair.
///
/// `samples` is replicate-major: entry `k` belongs to replicate
/// `replicates[k / P]` and scored pair `k % P`, where `P` is the number of
/// scored pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairBias {
    pub pair: EstimatorPair,
    pub replicates: Vec<usize>,
    pub samples: Vec<f64>,
    pub failures: Vec<ReplicateFailure>,
    pub summary: Option<BoxSummary>,
}

/// `d_hat - d` samples of one memory estimator, replicate-major over series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryBias {
    pub method: MemoryMethod,
    pub replicates: Vec<usize>,
    pub samples: Vec<f64>,
    pub failures: Vec<ReplicateFailure>,
    pub summary: Option<BoxSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunInfo {
    pub elapsed: Duration,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub config: ExperimentConfig,
    pub scored_pairs: Vec<(usize, usize)>,
    /// True nonfractal connectivity, row-major.
    pub truth: Vec<Vec<f64>>,
    pub estimators: Vec<PairBias>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub memory: Vec<MemoryBias>,
    /// Wall-clock data; kept out of the serialized form so reports stay
    /// byte-identical across runs.
    #[serde(skip)]
    pub run: RunInfo,
}

impl BiasReport {
    pub fn estimator(&self, pair: EstimatorPair) -> Option<&PairBias> {
        self.estimators.iter().find(|e| e.pair == pair)
    }

    /// Median of the bias samples of `pair`, if any replicate succeeded.
    pub fn median(&self, pair: EstimatorPair) -> Option<f64> {
        self.estimator(pair)?.summary.as_ref().map(|s| s.median)
    }

    pub fn iqr(&self, pair: EstimatorPair) -> Option<f64> {
        self.estimator(pair)?.summary.as_ref().map(|s| s.iqr)
    }

    /// Rebuilds every summary from the retained samples.
    pub fn resummarize(&self) -> Result<Vec<Option<BoxSummary>>> {
        self.estimators
            .iter()
            .map(|e| {
                if e.samples.is_empty() {
                    Ok(None)
                } else {
                    summarize(&e.samples).map(Some)
                }
            })
            .collect()
    }

    /// Flat CSV of every bias sample: `pair,replicate,m,n,bias`.
    pub fn samples_csv(&self) -> String {
        let p = self.scored_pairs.len().max(1);
        let mut out = String::from("pair,replicate,m,n,bias\n");
        for e in &self.estimators {
            for (k, bias) in e.samples.iter().enumerate() {
                let (m, n) = self.scored_pairs[k % p];
                let r = e.replicates[k / p];
                out.push_str(&format!("{},{r},{},{},{bias:.17e}\n", e.pair, m + 1, n + 1));
            }
        }
        out
    }
}

type PairOutcome = std::result::Result<Vec<f64>, String>;

struct ReplicateOutcome {
    pairs: Vec<PairOutcome>,
    memory: Vec<PairOutcome>,
}

fn run_replicate(
    config: &ExperimentConfig,
    memory_methods: &[MemoryMethod],
    scored: &[(usize, usize)],
    truth: &Matrix,
    replicate: usize,
) -> ReplicateOutcome {
    let fail_all = |msg: String| ReplicateOutcome {
        pairs: vec![Err(msg.clone()); config.estimator_pairs.len()],
        memory: vec![Err(msg); if config.score_memory { memory_methods.len() } else { 0 }],
    };
    let sim = config.replicate_spec(replicate).and_then(|spec| {
        simulate_arfima(
            &spec,
            config.length,
            SimulationOptions {
                burnin: config.burnin,
                keep_short_memory: false,
            },
        )
    });
    let sim = match sim {
        Ok(s) => s,
        Err(e) => return fail_all(e.to_string()),
    };
    let decomps = match decompose_all(&sim.series, config.filter, config.levels) {
        Ok(d) => d,
        Err(e) => return fail_all(e.to_string()),
    };
    let memory: Vec<(MemoryMethod, std::result::Result<MemoryEstimate, String>)> = memory_methods
        .iter()
        .map(|&m| (m, estimate_memory(&decomps, m).map_err(|e| e.to_string())))
        .collect();
    let memory_for = |method: MemoryMethod| &memory.iter().find(|(m, _)| *m == method).unwrap().1;

    let pairs = config
        .estimator_pairs
        .iter()
        .map(|pair| {
            let est = memory_for(pair.memory).as_ref().map_err(Clone::clone)?;
            let gamma = estimate_gamma(&decomps, &est.d_hat, pair.gamma).map_err(|e| e.to_string())?;
            let (d_hat, _) = connectivity(&gamma, &est.d_hat).map_err(|e| e.to_string())?;
            Ok(scored
                .iter()
                .map(|&(m, n)| d_hat[(m, n)] - truth[(m, n)])
                .collect())
        })
        .collect();

    let memory = if config.score_memory {
        memory
            .iter()
            .map(|(_, est)| {
                let est = est.as_ref().map_err(Clone::clone)?;
                Ok(est
                    .d_hat
                    .iter()
                    .zip(&sim.truth.d)
                    .map(|(a, b)| a - b)
                    .collect())
            })
            .collect()
    } else {
        Vec::new()
    };
    ReplicateOutcome { pairs, memory }
}

struct Collected {
    replicates: Vec<usize>,
    samples: Vec<f64>,
    failures: Vec<ReplicateFailure>,
}

fn collect<'a>(
    config: &ExperimentConfig,
    outcomes: impl Iterator<Item = (usize, &'a PairOutcome)>,
) -> Collected {
    let mut c = Collected {
        replicates: Vec::new(),
        samples: Vec::new(),
        failures: Vec::new(),
    };
    for (r, outcome) in outcomes {
        match outcome {
            Ok(values) => {
                c.replicates.push(r);
                c.samples.extend_from_slice(values);
            }
            Err(message) => c.failures.push(ReplicateFailure {
                replicate: r,
                seed: config.base_seed.wrapping_add(r as u64),
                message: message.clone(),
            }),
        }
    }
    c
}

fn summary_of(samples: &[f64]) -> Result<Option<BoxSummary>> {
    if samples.is_empty() {
        Ok(None)
    } else {
        summarize(samples).map(Some)
    }
}

/// Runs all replicates of `config` on the current rayon pool. Failed
/// replicates are recorded per estimator pair and never abort the batch.
pub fn run_experiment(config: &ExperimentConfig) -> Result<BiasReport> {
    config.validate()?;
    let started = Instant::now();
    let truth_spec = config.replicate_spec(0)?;
    let truth = truth_spec.short_memory_covariance()?.correlation();
    let scored = config.scored_pairs();
    let memory_methods: Vec<MemoryMethod> = {
        let mut set: BTreeSet<MemoryMethod> = config.estimator_pairs.iter().map(|p| p.memory).collect();
        if config.score_memory {
            set.extend(MemoryMethod::ALL);
        }
        set.into_iter().collect()
    };

    let outcomes: Vec<ReplicateOutcome> = (0..config.reps)
        .into_par_iter()
        .map(|r| run_replicate(config, &memory_methods, &scored, &truth, r))
        .collect();

    let estimators = config
        .estimator_pairs
        .iter()
        .enumerate()
        .map(|(i, &pair)| {
            let c = collect(config, outcomes.iter().enumerate().map(|(r, o)| (r, &o.pairs[i])));
            Ok(PairBias {
                pair,
                summary: summary_of(&c.samples)?,
                replicates: c.replicates,
                samples: c.samples,
                failures: c.failures,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let memory = if config.score_memory {
        memory_methods
            .iter()
            .enumerate()
            .map(|(i, &method)| {
                let c = collect(config, outcomes.iter().enumerate().map(|(r, o)| (r, &o.memory[i])));
                Ok(MemoryBias {
                    method,
                    summary: summary_of(&c.samples)?,
                    replicates: c.replicates,
                    samples: c.samples,
                    failures: c.failures,
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    Ok(BiasReport {
        config: config.clone(),
        scored_pairs: scored,
        truth: crate::matrix::to_rows(&truth),
        estimators,
        memory,
        run: RunInfo {
            elapsed: started.elapsed(),
            threads: rayon::current_num_threads(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Dimension,
    Length,
    Correlation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// The configuration for one sweep value. Dimension and length values must be
/// whole numbers.
pub fn sweep_config(axis: SweepAxis, value: f64, base: &ExperimentConfig) -> Result<ExperimentConfig> {
    let whole = |what: &str| -> Result<usize> {
        if value.fract() == 0.0 && (1.0..1e15).contains(&value) {
            Ok(value as usize)
        } else {
            Err(Error::Schema {
                path: "sweep.values".into(),
                message: format!("{what} value {value} is not a positive integer"),
            })
        }
    };
    let mut config = base.clone();
    match axis {
        SweepAxis::Dimension => config.q = whole("dimension")?,
        SweepAxis::Length => config.length = whole("length")?,
        SweepAxis::Correlation => config.rho = Some(value),
    }
    Ok(config)
}

/// One report per value, all sharing `base.base_seed` so replicate `r` uses the
/// same seed at every point of the sweep.
pub fn sweep(axis: SweepAxis, values: &[f64], base: &ExperimentConfig) -> Result<Vec<BiasReport>> {
    if values.is_empty() {
        return Err(Error::Schema {
            path: "sweep.values".into(),
            message: "must not be empty".into(),
        });
    }
    let configs = values
        .iter()
        .map(|&v| {
            let config = sweep_config(axis, v, base)?;
            config.validate()?;
            Ok(config)
        })
        .collect::<Result<Vec<_>>>()?;
    configs.iter().map(run_experiment).collect()
}
