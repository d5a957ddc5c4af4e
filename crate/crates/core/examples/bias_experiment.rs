// A small Monte Carlo bias study of nonfractal connectivity.

use fracconn::montecarlo::{run_experiment, ExperimentConfig};
use fracconn::simulate::Condition;

fn main() {
    let mut config = ExperimentConfig::new(Condition::CorrelatedWhite, 4, 1024, 20, Some(0.3));
    config.score_memory = true;
    let report = run_experiment(&config).expect("valid config");
    println!("scored pairs (0-based): {:?}", report.scored_pairs);
    for e in &report.estimators {
        if let Some(s) = &e.summary {
            println!(
                "{:8} median {:+.4} IQR {:.4} samples {} failed replicates {}",
                e.pair,
                s.median,
                s.iqr,
                s.count,
                e.failures.len()
            );
        }
    }
    for m in &report.memory {
        if let Some(s) = &m.summary {
            println!("d bias {:3} median {:+.4} IQR {:.4}", m.method, s.median, s.iqr);
        }
    }
    assert_eq!(report.resummarize().expect("samples retained")[0], report.estimators[0].summary);
}
