// Simulate each short-memory condition and compare the sample innovation
// correlation with the analytic truth.

use fracconn::estimate::pearson_correlation;
use fracconn::simulate::{simulate_arfima, ArfimaSpec, Condition, SimulationOptions};

fn main() {
    let d = [-0.3, -0.1, 0.1, 0.3];
    for condition in Condition::ALL {
        let rho = condition.is_correlated().then_some(0.3);
        let spec = ArfimaSpec::from_condition(condition, &d, rho, 3).expect("valid condition");
        let options = SimulationOptions {
            keep_short_memory: true,
            ..SimulationOptions::default()
        };
        let sim = simulate_arfima(&spec, 2048, options).expect("simulation");
        let u = sim.short_memory.as_ref().expect("short memory kept");
        let sample = pearson_correlation(u).expect("non-degenerate");
        println!(
            "{condition}: D(2,3) truth {:+.3} sample {:+.3}; D(1,2) truth {:+.3} sample {:+.3}",
            sim.truth.nonfractal[(1, 2)],
            sample[(1, 2)],
            sim.truth.nonfractal[(0, 1)],
            sample[(0, 1)],
        );
    }
}
