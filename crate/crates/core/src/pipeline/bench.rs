use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::{simulate, ExperimentConfig, Method};
use crate::automata::{minimize, parse_dot};
use crate::error::Result;
use crate::mdm::{make_random_mdm, mdm_from_json, MealyDelayMachine, DEFAULT_RATE_RANGE};

/// Cells to run for every machine. Sampling L* ignores the root assumption
/// and only runs with `unique_root = false`.
#[derive(Clone, Debug)]
pub struct BenchGrid {
    pub depths: Vec<usize>,
    pub methods: Vec<Method>,
    pub unique_root: Vec<bool>,
    /// Shared settings; method, d, unique_root and seed are set per cell.
    pub base: ExperimentConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub machine: String,
    pub method: &'static str,
    pub d: usize,
    pub unique_root: bool,
    pub size_min: Option<usize>,
    pub size_expanded: Option<usize>,
    pub size_final: Option<usize>,
    pub inputs: u64,
    pub resets: u64,
    pub aborted: bool,
    pub seconds: f64,
}

/// Loads every `.dot` machine (given random delays from `seed`) and every
/// `.json` delay machine in `dir`, sorted by file name.
pub fn load_machine_dir(dir: &Path, seed: u64) -> Result<Vec<(String, MealyDelayMachine)>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|x| x.to_str()), Some("dot" | "json")))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let name = p.file_stem().and_then(|s| s.to_str()).unwrap_or("?").to_string();
        out.push((name, load_mdm(&p, seed)?));
    }
    Ok(out)
}

/// Reads a delay machine from JSON, or a plain machine from DOT and gives it
/// log-uniform random rates drawn with `seed`.
pub fn load_mdm(path: &Path, seed: u64) -> Result<MealyDelayMachine> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|x| x == "dot") {
        Ok(make_random_mdm(&parse_dot(&text)?, seed, DEFAULT_RATE_RANGE))
    } else {
        mdm_from_json(&text, path.parent())
    }
}

/// Runs every cell of the grid in parallel. A failing cell is reported on
/// stderr and marked aborted; it never stops the suite.
pub fn run_benchmark_suite(machines: &[(String, MealyDelayMachine)], grid: &BenchGrid) -> Vec<BenchRow> {
    let mut cells = Vec::new();
    for (name, mdm) in machines {
        for &d in &grid.depths {
            for &method in &grid.methods {
                for &unique_root in &grid.unique_root {
                    if method == Method::SamplingLstar && unique_root {
                        continue;
                    }
                    cells.push((name, mdm, d, method, unique_root));
                }
            }
        }
    }
    cells
        .par_iter()
        .map(|&(name, mdm, d, method, unique_root)| {
            let cfg = ExperimentConfig {
                method,
                d,
                unique_root,
                ..grid.base
            };
            match simulate(&cfg, mdm) {
                Ok(r) => BenchRow {
                    machine: name.clone(),
                    method: method.name(),
                    d,
                    unique_root,
                    size_min: r.size_min,
                    size_expanded: r.size_expanded,
                    size_final: r.size_final,
                    inputs: r.inputs,
                    resets: r.resets,
                    aborted: r.aborted,
                    seconds: r.seconds,
                },
                Err(e) => {
                    eprintln!("{name} {} d={d} unique_root={unique_root}: {e}", method.name());
                    BenchRow {
                        machine: name.clone(),
                        method: method.name(),
                        d,
                        unique_root,
                        size_min: Some(minimize(mdm.machine()).num_states()),
                        size_expanded: None,
                        size_final: None,
                        inputs: 0,
                        resets: 0,
                        aborted: true,
                        seconds: 0.0,
                    }
                }
            }
        })
        .collect()
}

/// Writes the rows as CSV. Without timing the `seconds` column is left
/// empty so reruns with the same seeds produce identical bytes.
pub fn write_csv<W: Write>(rows: &[BenchRow], out: W, timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "machine",
        "method",
        "d",
        "unique_root",
        "size_min",
        "size_expanded",
        "size_final",
        "inputs",
        "resets",
        "aborted",
        "seconds",
    ])?;
    let opt = |x: Option<usize>| x.map_or(String::new(), |v| v.to_string());
    for r in rows {
        w.write_record([
            r.machine.clone(),
            r.method.to_string(),
            r.d.to_string(),
            r.unique_root.to_string(),
            opt(r.size_min),
            opt(r.size_expanded),
            opt(r.size_final),
            r.inputs.to_string(),
            r.resets.to_string(),
            r.aborted.to_string(),
            if timing { format!("{:.3}", r.seconds) } else { String::new() },
        ])?;
    }
    w.flush()?;
    Ok(())
}
