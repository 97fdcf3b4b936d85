//! wasm-bindgen entry points for the static page in `www/`.
//!
//! Every export takes plain text and numbers and returns a JSON string, or
//! an error message on bad input.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use qdtree::compare::q_tree;
use qdtree::criterion::{exhaustive_best_partition, objective_table, ContingencyTable, Partition};
use qdtree::dataset::{Dataset, Schema};
use qdtree::qaoa::{calibrate_angles, expectation_landscape, grid_points, qaoa_best_partition, run_circuit, Calibration, QaoaConfig};
use qdtree::tree::{Backend, GrowParams, TreeGrower};
use qdtree::tree_file::{RunMetadata, TreeFile};

/// One row per category, one whitespace- or comma-separated count per class.
pub fn parse_table(text: &str) -> Result<ContingencyTable, String> {
    let rows: Vec<Vec<u64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u64>().map_err(|_| format!("row {}: `{t}` is not a count", i + 1)))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    ContingencyTable::from_counts(&rows).map_err(|e| e.to_string())
}

fn config(p: usize, shots: usize, seed: u64, grid: usize) -> QaoaConfig {
    QaoaConfig {
        p,
        shots,
        seed,
        calibration: Calibration::RampGrid { resolution: grid },
    }
}

#[derive(Serialize)]
struct SplitJson {
    value: f64,
    first: Vec<usize>,
    second: Vec<usize>,
}

fn split_json(value: f64, partition: Option<Partition>) -> SplitJson {
    let (first, second) = partition.map_or((vec![], vec![]), |p| (p.first().collect(), p.second().collect()));
    SplitJson { value, first, second }
}

#[derive(Serialize)]
struct TableReport {
    objective: Vec<f64>,
    mean: f64,
    exhaustive: SplitJson,
    gammas: Vec<f64>,
    betas: Vec<f64>,
    probabilities: Vec<f64>,
    expectation: f64,
    qaoa: SplitJson,
}

/// Objective table, exhaustive optimum, calibrated QAOA state and the
/// best sampled partition for a user-supplied contingency table.
#[wasm_bindgen]
pub fn analyze_table(table: &str, p: usize, shots: usize, seed: u64) -> Result<String, String> {
    let table = parse_table(table)?;
    if table.n_values() < 2 {
        return Err("need at least two category rows".into());
    }
    let f = objective_table(&table).map_err(|e| e.to_string())?;
    let cfg = config(p, shots, seed, 16);
    cfg.validate().map_err(|e| e.to_string())?;
    let angles = calibrate_angles(&f, &cfg).map_err(|e| e.to_string())?;
    let state = run_circuit(&f, &angles).map_err(|e| e.to_string())?;
    let expectation = state.expectation(&f).map_err(|e| e.to_string())?;
    let best = exhaustive_best_partition(&table);
    let sampled = qaoa_best_partition(&table, &angles, shots, seed).map_err(|e| e.to_string())?;
    let report = TableReport {
        mean: f.iter().sum::<f64>() / f.len() as f64,
        exhaustive: split_json(best.value, best.partition),
        gammas: angles.gammas().to_vec(),
        betas: angles.betas().to_vec(),
        probabilities: state.probabilities(),
        expectation,
        qaoa: split_json(sampled.value, sampled.partition),
        objective: f,
    };
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Landscape {
    gamma_max: Vec<f64>,
    beta_max: Vec<f64>,
    /// Rows follow `gamma_max`, columns `beta_max`.
    expectation: Vec<Vec<f64>>,
}

/// Expected objective over the ramp-schedule calibration grid.
#[wasm_bindgen]
pub fn landscape(table: &str, p: usize, resolution: usize) -> Result<String, String> {
    let table = parse_table(table)?;
    if table.n_values() < 2 {
        return Err("need at least two category rows".into());
    }
    config(p, 1, 0, resolution).validate().map_err(|e| e.to_string())?;
    let f = objective_table(&table).map_err(|e| e.to_string())?;
    let values = expectation_landscape(&f, p, resolution).map_err(|e| e.to_string())?;
    serde_json::to_string(&Landscape {
        gamma_max: grid_points(std::f64::consts::PI, resolution),
        beta_max: grid_points(std::f64::consts::FRAC_PI_2, resolution),
        expectation: values,
    })
    .map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct GrowReport {
    exhaustive_tree: String,
    qaoa_tree: String,
    nodes: usize,
    q: f64,
    comparison: String,
    training_accuracy: f64,
}

/// Grows exhaustive and QAOA trees on a CSV/schema pair and compares them.
#[wasm_bindgen]
pub fn grow_trees(schema: &str, csv: &str, height: usize, p: usize, shots: usize, seed: u64) -> Result<String, String> {
    let schema = Schema::parse(schema, "schema").map_err(|e| e.to_string())?;
    let dataset = Dataset::from_reader(csv.as_bytes(), schema, "data").map_err(|e| e.to_string())?;
    let name = dataset.schema().name.clone().unwrap_or_else(|| "demo".into());
    let build = |backend: Backend| -> Result<TreeFile, String> {
        let params = GrowParams::new(height, backend);
        let grower = TreeGrower::new(&dataset, params.clone()).map_err(|e| e.to_string())?;
        let root = grower.grow().map_err(|e| e.to_string())?;
        Ok(TreeFile {
            schema: dataset.schema().clone(),
            metadata: RunMetadata {
                dataset: name.clone(),
                height,
                split_mode: params.split_mode,
                backend: params.backend,
                angles: grower.angles().cloned(),
            },
            root,
        })
    };
    let classical = build(Backend::Exhaustive)?;
    let quantum = build(Backend::Qaoa(config(p, shots, seed, 16)))?;
    let report = q_tree(&classical.root, &quantum.root);
    let correct = (0..dataset.n_rows())
        .filter(|&r| quantum.root.predict(&dataset.row(r)) == dataset.classes()[r] as usize)
        .count();
    serde_json::to_string(&GrowReport {
        exhaustive_tree: classical.to_text(),
        qaoa_tree: quantum.to_text(),
        nodes: classical.root.node_count(),
        q: report.q(),
        comparison: report.render(&classical.root, Some(&classical.schema)),
        training_accuracy: if dataset.n_rows() == 0 { 0.0 } else { correct as f64 / dataset.n_rows() as f64 },
    })
    .map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const TABLE: &str = "30 2\n25 5\n3 28\n1 30";

    #[test]
    fn table_parsing() {
        let t = parse_table("1, 2\n\n3 4\n").unwrap();
        assert_eq!((t.n_values(), t.n_classes(), t.total()), (2, 2, 10));
        assert!(parse_table("1 x").is_err());
        assert!(parse_table("1 2\n3").is_err());
    }

    #[test]
    fn analysis_finds_the_optimum() {
        let v: Value = serde_json::from_str(&analyze_table(TABLE, 5, 1024, 42).unwrap()).unwrap();
        assert_eq!(v["objective"].as_array().unwrap().len(), 16);
        assert_eq!(v["exhaustive"]["first"], serde_json::json!([0, 1]));
        assert_eq!(v["qaoa"]["value"], v["exhaustive"]["value"]);
        let total: f64 = v["probabilities"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(v["expectation"].as_f64().unwrap() >= v["mean"].as_f64().unwrap());
        assert!(analyze_table("5 5", 5, 10, 1).is_err());
    }

    #[test]
    fn landscape_shape() {
        let v: Value = serde_json::from_str(&landscape(TABLE, 2, 6).unwrap()).unwrap();
        assert_eq!(v["expectation"].as_array().unwrap().len(), 6);
        assert_eq!(v["expectation"][0].as_array().unwrap().len(), 6);
        assert!(landscape(TABLE, 2, 1).is_err());
    }

    #[test]
    fn toy_trees_agree() {
        let schema = include_str!("../../../data/toy.schema");
        let csv = include_str!("../../../data/toy.data");
        let v: Value = serde_json::from_str(&grow_trees(schema, csv, 3, 5, 1024, 42).unwrap()).unwrap();
        assert_eq!(v["q"], 1.0);
        assert_eq!(v["training_accuracy"], 1.0);
        assert!(v["qaoa_tree"].as_str().unwrap().starts_with("twoing-tree 1\n"));
        assert!(grow_trees("class c a b", "x,a", 2, 5, 16, 1).is_err());
    }
}
