//! Subcommand implementations behind the `fracconn` binary.
//!
//! Every command builds its complete [`OutputSet`] in memory before anything
//! is written, so a failing run leaves no partial outputs behind.

mod config;
mod ingest;
mod io;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{decompose_all, estimate_connectivity, ConnectivityResult, EstimateOptions, GammaMethod, MemoryMethod, LIN_MIN_COEFFICIENTS};
use crate::matrix::{asymmetry, from_rows, serialize_rows, Matrix};
use crate::model::{theoretical_connectivity, upsilon_grid, FinSpec, MemoryParams};
use crate::montecarlo::{run_experiment, sweep, BiasReport};
use crate::simulate::{simulate_arfima, ArfimaSpec, SimulationMeta, SimulationOptions};
use crate::wavelet::FilterKind;

pub use config::{load_json, parse_json, ExperimentPlan, SimulateConfig};
pub use ingest::{ingest_csv, parse_table, series_to_csv, Dataset, HeaderMode, IngestOptions, Orientation, Provenance, MIN_LENGTH};
pub use io::{
    format_value, matrix_to_csv, parse_matrix_csv, read_matrix_csv, vector_to_csv, write_all, LabeledMatrix,
    OutputSet,
};

/// Process exit status for an error: 2 for estimator failures, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_estimation_failure() {
        2
    } else {
        1
    }
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable output");
    text.push('\n');
    text.into_bytes()
}

/// Rewrites pair and series indices in an estimator error with their labels.
fn label_error(err: Error, labels: &[String]) -> Error {
    let name = |k: usize| labels.get(k).map_or("?", String::as_str).to_string();
    match err {
        Error::IllConditioned { m, n, reason } => Error::IllConditioned {
            reason: format!("{reason} [series {} and {}]", name(m), name(n)),
            m,
            n,
        },
        Error::NumericalRange { m, n, reason } => Error::NumericalRange {
            reason: format!("{reason} [series {} and {}]", name(m), name(n)),
            m,
            n,
        },
        Error::DegenerateSeries { index, reason } => Error::DegenerateSeries {
            reason: format!("{reason} [series {}]", name(index)),
            index,
        },
        other => other,
    }
}

#[derive(Debug, Serialize)]
struct ExcludedScales {
    memory: Vec<usize>,
    gamma: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct EstimateBundle<'a> {
    dataset: &'a Dataset,
    memory_method: MemoryMethod,
    gamma_method: GammaMethod,
    filter: FilterKind,
    levels: usize,
    excluded_scales: ExcludedScales,
    result: &'a ConnectivityResult,
}

/// `fracconn estimate`: the full estimation pipeline on one dataset.
pub fn cmd_estimate(dataset: &Dataset, options: EstimateOptions) -> Result<OutputSet> {
    let result = estimate_connectivity(&dataset.series, options).map_err(|e| label_error(e, &dataset.labels))?;
    let levels = result.levels;
    let (lo, hi) = result.memory.scale_interval;
    let memory_excluded: Vec<usize> = (1..=levels).filter(|j| *j < lo || *j > hi).collect();
    let gamma_excluded: Vec<usize> = if options.gamma == GammaMethod::Lin {
        let decomps = decompose_all(&dataset.series, options.filter, options.levels)?;
        (1..=levels)
            .filter(|&j| decomps[0].interior_detail(j).len() < LIN_MIN_COEFFICIENTS)
            .collect()
    } else {
        Vec::new()
    };
    let labels = &dataset.labels;
    let mut out = OutputSet::default();
    out.add("pearson.csv", matrix_to_csv(labels, &result.pearson));
    out.add("d_hat.csv", vector_to_csv("d_hat", labels, &result.d_hat));
    out.add("gamma_hat.csv", matrix_to_csv(labels, &result.gamma_hat));
    out.add("nonfractal.csv", matrix_to_csv(labels, &result.nonfractal));
    out.add("fractal.csv", matrix_to_csv(labels, &result.fractal));
    out.add(
        "estimate.json",
        json(&EstimateBundle {
            dataset,
            memory_method: options.memory,
            gamma_method: options.gamma,
            filter: options.filter,
            levels,
            excluded_scales: ExcludedScales {
                memory: memory_excluded,
                gamma: gamma_excluded,
            },
            result: &result,
        }),
    );
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeList {
    pub k: usize,
    pub edges: Vec<Edge>,
}

impl EdgeList {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("source,target,weight\n");
        for e in &self.edges {
            let row = csv_row(&[&e.source, &e.target]);
            out.push_str(&format!("{row},{}\n", format_value(e.weight)));
        }
        out
    }
}

fn csv_row(fields: &[&str]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(fields).expect("in-memory write");
    let mut s = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields");
    s.truncate(s.trim_end_matches(['\r', '\n']).len());
    s
}

/// Strongest `k` off-diagonal entries of a symmetric matrix, by absolute
/// weight. Ties keep the order of the labels in the matrix.
pub fn top_edges(matrix: &LabeledMatrix, k: usize) -> Result<EdgeList> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let m = &matrix.matrix;
    let asym = asymmetry(m);
    if asym > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "connectivity matrix is not symmetric (max deviation {asym:e})"
        )));
    }
    let q = m.nrows();
    let mut candidates: Vec<(usize, usize, f64)> = (0..q)
        .flat_map(|i| ((i + 1)..q).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, m[(i, j)]))
        .collect();
    // stable sort keeps index order among equal magnitudes
    candidates.sort_by(|a, b| b.2.abs().total_cmp(&a.2.abs()));
    candidates.truncate(k);
    Ok(EdgeList {
        k,
        edges: candidates
            .into_iter()
            .map(|(i, j, w)| Edge {
                source: matrix.labels[i].clone(),
                target: matrix.labels[j].clone(),
                weight: w,
            })
            .collect(),
    })
}

/// `fracconn graph`.
pub fn cmd_graph(matrix: &LabeledMatrix, k: usize) -> Result<OutputSet> {
    let edges = top_edges(matrix, k)?;
    let mut out = OutputSet::default();
    out.add("edges.csv", edges.to_csv());
    Ok(out)
}

pub const GRID_H_MIN: f64 = 0.05;
pub const GRID_H_MAX: f64 = 0.95;
pub const GRID_STEP: f64 = 0.0225;

/// `fracconn grid`: the Upsilon surface in long format `h1,h2,upsilon`.
pub fn cmd_grid() -> Result<OutputSet> {
    let cells = upsilon_grid(GRID_H_MIN, GRID_H_MAX, GRID_STEP)?;
    let mut text = String::from("h1,h2,upsilon\n");
    for c in &cells {
        text.push_str(&format!("{:.4},{:.4},{}\n", c.h1, c.h2, format_value(c.upsilon)));
    }
    let mut out = OutputSet::default();
    out.add("upsilon_grid.csv", text);
    Ok(out)
}

#[derive(Debug, Serialize)]
struct SimulationTruth<'a> {
    config: &'a SimulateConfig,
    labels: &'a [String],
    meta: SimulationMeta,
    #[serde(serialize_with = "serialize_rows")]
    gamma: &'a Matrix,
    #[serde(serialize_with = "serialize_rows")]
    nonfractal: &'a Matrix,
    #[serde(serialize_with = "serialize_rows")]
    fractal: &'a Matrix,
}

/// `fracconn simulate`: one seeded multivariate ARFIMA path plus its truth.
pub fn cmd_simulate(config: &SimulateConfig) -> Result<OutputSet> {
    config.validate()?;
    let spec = ArfimaSpec::from_condition(config.condition, &config.d, config.rho, config.seed)?;
    let sim = simulate_arfima(
        &spec,
        config.length,
        SimulationOptions {
            burnin: config.burnin,
            keep_short_memory: false,
        },
    )?;
    let fin = FinSpec::new(MemoryParams::new(config.d.clone())?, sim.truth.gamma.clone())?;
    let (nonfractal, fractal) = theoretical_connectivity(&fin)?;
    let labels = config.labels();
    let mut out = OutputSet::default();
    out.add("series.csv", series_to_csv(&labels, &sim.series));
    out.add("gamma_true.csv", matrix_to_csv(&labels, sim.truth.gamma.matrix()));
    out.add("nonfractal_true.csv", matrix_to_csv(&labels, &nonfractal));
    out.add("fractal_true.csv", matrix_to_csv(&labels, &fractal));
    out.add(
        "truth.json",
        json(&SimulationTruth {
            config,
            labels: &labels,
            meta: sim.meta,
            gamma: sim.truth.gamma.matrix(),
            nonfractal: &nonfractal,
            fractal: &fractal,
        }),
    );
    Ok(out)
}

fn summary_rows(report: &BiasReport, prefix: &str, out: &mut String) {
    for e in &report.estimators {
        let failed = e.failures.len();
        match &e.summary {
            Some(s) => out.push_str(&format!(
                "{prefix}{},{},{failed},{},{},{},{},{},{},{},{},{}\n",
                e.pair,
                s.count,
                format_value(s.median),
                format_value(s.q1),
                format_value(s.q3),
                format_value(s.iqr),
                format_value(s.lower_whisker),
                format_value(s.upper_whisker),
                format_value(s.mean),
                format_value(s.stdev),
                s.outliers.len(),
            )),
            None => out.push_str(&format!("{prefix}{},0,{failed},,,,,,,,,\n", e.pair)),
        }
    }
}

const SUMMARY_HEADER: &str =
    "pair,count,failed_replicates,median,q1,q3,iqr,lower_whisker,upper_whisker,mean,stdev,outliers";

/// `fracconn experiment`: a bias study, or a sweep of them.
pub fn cmd_experiment(plan: &ExperimentPlan) -> Result<OutputSet> {
    plan.validate()?;
    let mut out = OutputSet::default();
    match &plan.sweep {
        None => {
            let report = run_experiment(&plan.experiment)?;
            let mut summary = format!("{SUMMARY_HEADER}\n");
            summary_rows(&report, "", &mut summary);
            out.add("bias_report.json", json(&report));
            out.add("bias_samples.csv", report.samples_csv());
            out.add("bias_summary.csv", summary);
        }
        Some(spec) => {
            let reports = sweep(spec.axis, &spec.values, &plan.experiment)?;
            let mut summary = format!("value,{SUMMARY_HEADER}\n");
            for (value, report) in spec.values.iter().zip(&reports) {
                summary_rows(report, &format!("{value},"), &mut summary);
            }
            for (i, report) in reports.iter().enumerate() {
                out.add(format!("bias_report_{i}.json"), json(report));
                out.add(format!("bias_samples_{i}.csv"), report.samples_csv());
            }
            out.add("bias_summary.csv", summary);
        }
    }
    Ok(out)
}

/// Builds a square matrix from rows, for callers assembling matrices by hand.
pub fn labeled(labels: &[&str], rows: &[Vec<f64>]) -> Result<LabeledMatrix> {
    let matrix = from_rows(rows)?;
    if matrix.nrows() != labels.len() || matrix.ncols() != labels.len() {
        return Err(Error::InvalidInput("labels do not match the matrix size".into()));
    }
    Ok(LabeledMatrix {
        labels: labels.iter().map(|s| s.to_string()).collect(),
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn names(q: usize) -> Vec<String> {
        (1..=q).map(|k| format!("R{k:02}")).collect()
    }

    #[test]
    fn top_edges_counts() {
        let q = 15;
        let m = DMatrix::from_fn(q, q, |i, j| if i == j { 1.0 } else { 1.0 / (1.0 + (i + j) as f64) });
        let lm = LabeledMatrix { labels: names(q), matrix: m };
        assert_eq!(top_edges(&lm, 20).unwrap().edges.len(), 20);
        assert_eq!(top_edges(&lm, 105).unwrap().edges.len(), 105);
        assert_eq!(top_edges(&lm, 500).unwrap().edges.len(), 105);
        let e = top_edges(&lm, 3).unwrap().edges;
        assert_eq!((e[0].source.as_str(), e[0].target.as_str()), ("R01", "R02"));
        // 1/(1+3) twice: (0,3) before (1,2)
        assert_eq!((e[1].source.as_str(), e[1].target.as_str()), ("R01", "R03"));
        assert_eq!((e[2].source.as_str(), e[2].target.as_str()), ("R01", "R04"));
        assert!(top_edges(&lm, 0).is_err());
    }

    #[test]
    fn identity_edges_follow_label_order() {
        let lm = LabeledMatrix { labels: names(4), matrix: DMatrix::identity(4, 4) };
        let e = top_edges(&lm, 4).unwrap().edges;
        let pairs: Vec<(&str, &str)> = e.iter().map(|e| (e.source.as_str(), e.target.as_str())).collect();
        assert_eq!(pairs, vec![("R01", "R02"), ("R01", "R03"), ("R01", "R04"), ("R02", "R03")]);
        assert!(e.iter().all(|e| e.weight == 0.0));
    }

    #[test]
    fn negative_weights_rank_by_magnitude() {
        let lm = labeled(&["a", "b", "c"], &[vec![1.0, -0.9, 0.5], vec![-0.9, 1.0, 0.1], vec![0.5, 0.1, 1.0]]).unwrap();
        let e = top_edges(&lm, 1).unwrap().edges;
        assert_eq!(e[0].weight, -0.9);
    }

    #[test]
    fn graph_rejects_asymmetry() {
        let lm = labeled(&["a", "b"], &[vec![1.0, 0.5], vec![0.4, 1.0]]).unwrap();
        assert!(matches!(top_edges(&lm, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn grid_shape_and_diagonal() {
        let out = cmd_grid().unwrap();
        let text = String::from_utf8(out.get("upsilon_grid.csv").unwrap().to_vec()).unwrap();
        let rows: Vec<Vec<f64>> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 41 * 41);
        for r in &rows {
            if r[0] == r[1] {
                assert_eq!(r[2], 1.0);
            }
            assert!(r[2] > 0.0 && r[2] <= 1.0);
        }
        assert_eq!(rows[0][0], 0.05);
        assert_eq!(rows[rows.len() - 1][0], 0.95);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::EstimationFailed("x".into())), 2);
        assert_eq!(exit_code(&Error::IllConditioned { m: 0, n: 1, reason: String::new() }), 2);
        assert_eq!(exit_code(&Error::Schema { path: "reps".into(), message: String::new() }), 1);
        assert_eq!(exit_code(&Error::InvalidInput("x".into())), 1);
    }
}
