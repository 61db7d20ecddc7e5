//! A small benchmark grid over the bundled machines, written as CSV.

use delaylearn::mdm::{make_random_mdm, DEFAULT_RATE_RANGE};
use delaylearn::models;
use delaylearn::pipeline::{run_benchmark_suite, write_csv, BenchGrid, ExperimentConfig, Method};

fn main() -> delaylearn::Result<()> {
    let machines: Vec<_> = models::bundled()
        .into_iter()
        .enumerate()
        .map(|(j, (name, m))| (name.to_string(), make_random_mdm(&m, j as u64, DEFAULT_RATE_RANGE)))
        .collect();
    let grid = BenchGrid {
        depths: vec![0, 1, 2],
        methods: vec![Method::SamplingLstar, Method::Expansion],
        unique_root: vec![false, true],
        base: ExperimentConfig {
            k: 200,
            seed: 42,
            ..ExperimentConfig::default()
        },
    };
    let rows = run_benchmark_suite(&machines, &grid);
    write_csv(&rows, std::io::stdout().lock(), false)
}
