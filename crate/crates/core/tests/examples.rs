// Runs every shipped example so they cannot silently rot.

macro_rules! example {
    ($name:ident, $path:literal) => {
        mod $name {
            include!($path);

            pub fn run() {
                main();
            }
        }
    };
}

example!(dwt, "../examples/dwt.rs");
example!(model_asymptotics, "../examples/model_asymptotics.rs");
example!(simulate, "../examples/simulate.rs");
example!(estimate_connectivity, "../examples/estimate_connectivity.rs");
example!(bias_experiment, "../examples/bias_experiment.rs");
example!(upsilon_grid, "../examples/upsilon_grid.rs");
example!(graph, "../examples/graph.rs");
example!(regression_fixture, "../examples/regression_fixture.rs");

#[test]
fn dwt_example() {
    dwt::run();
}

#[test]
fn model_asymptotics_example() {
    model_asymptotics::run();
}

#[test]
fn simulate_example() {
    simulate::run();
}

#[test]
fn estimate_connectivity_example() {
    estimate_connectivity::run();
}

#[test]
fn bias_experiment_example() {
    bias_experiment::run();
}

#[test]
fn upsilon_grid_example() {
    upsilon_grid::run();
}

#[test]
fn graph_example() {
    graph::run();
}

#[test]
fn regression_fixture_example() {
    regression_fixture::run();
}

#[test]
fn shipped_fixture_matches_its_generator() {
    let shipped = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/rois15.csv")).unwrap();
    assert_eq!(shipped, regression_fixture::fixture_csv());
    assert_eq!(shipped.lines().count(), regression_fixture::FIXTURE_ROWS + 1);
}
