// Threshold an estimated connectivity matrix to its strongest edges.

use fracconn::cli::{cmd_graph, LabeledMatrix};
use fracconn::estimate::{estimate_connectivity, EstimateOptions};
use fracconn::simulate::{simulate_arfima, ArfimaSpec, Condition, SimulationOptions};

fn main() {
    let d: Vec<f64> = (0..8).map(|k| -0.35 + 0.1 * k as f64).collect();
    let spec = ArfimaSpec::from_condition(Condition::CorrelatedWhite, &d, Some(0.5), 5).expect("valid spec");
    let sim = simulate_arfima(&spec, 2048, SimulationOptions::default()).expect("simulation");
    let result = estimate_connectivity(&sim.series, EstimateOptions::default()).expect("estimation");
    let labels: Vec<String> = (1..=d.len()).map(|k| format!("ROI{k}")).collect();
    let matrix = LabeledMatrix {
        labels,
        matrix: result.nonfractal,
    };
    let out = cmd_graph(&matrix, 5).expect("symmetric input");
    print!("{}", String::from_utf8_lossy(out.get("edges.csv").expect("edge list")));
}
