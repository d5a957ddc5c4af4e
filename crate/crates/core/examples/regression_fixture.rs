// Regenerates the 15-series regression fixture used by the CLI tests.
//
// Prints a summary; set `FRACCONN_FIXTURE_OUT` to a path to write the CSV.

use fracconn::cli::series_to_csv;
use fracconn::simulate::{simulate_arfima, ArfimaSpec, Condition, SimulationOptions};

pub const FIXTURE_SEED: u64 = 2024;
pub const FIXTURE_ROWS: usize = 1200;

pub fn fixture_csv() -> String {
    let d: Vec<f64> = (0..15).map(|k| -0.35 + 0.05 * k as f64).collect();
    let spec = ArfimaSpec::from_condition(Condition::CorrelatedWhite, &d, Some(0.5), FIXTURE_SEED).expect("valid spec");
    let sim = simulate_arfima(&spec, 2048, SimulationOptions::default()).expect("simulation");
    let series: Vec<Vec<f64>> = sim.series.iter().map(|s| s[..FIXTURE_ROWS].to_vec()).collect();
    let labels: Vec<String> = (1..=15).map(|k| format!("ROI{k:02}")).collect();
    series_to_csv(&labels, &series)
}

fn main() {
    let csv = fixture_csv();
    match std::env::var_os("FRACCONN_FIXTURE_OUT") {
        Some(path) => std::fs::write(&path, &csv).expect("writable fixture path"),
        None => println!("{} lines, {} bytes", csv.lines().count(), csv.len()),
    }
}
