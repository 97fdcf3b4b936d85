//! Classical-versus-QAOA tree comparison over a list of heights.
//!
//! For every height the same dataset is grown twice, once with exhaustive
//! partition search and once with QAOA, and the QAOA tree is scored against
//! the exhaustive one.
//!
//! An experiment can be one of the built-in presets or a TOML file:
//!
//! ```toml
//! name = "car"
//! data = "car.data"       # relative to the spec file
//! schema = "car.schema"
//! heights = [3, 5, 7]
//!
//! [qaoa]                  # optional; these are the defaults
//! p = 5
//! shots = 1024
//! seed = 42
//! grid = 16
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;

use crate::compare::{q_tree, ComparisonReport};
use crate::dataset::{load_schema, Dataset};
use crate::error::{Error, Result};
use crate::qaoa::{Calibration, QaoaConfig};
use crate::tree::{Backend, GrowParams, SplitMode, TreeGrower};
use crate::tree_file::{RunMetadata, TreeFile};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub data: PathBuf,
    pub schema: PathBuf,
    pub heights: Vec<usize>,
    pub qaoa: QaoaConfig,
}

pub const PRESETS: [&str; 4] = ["car", "nursery", "abalone", "connect-4"];

/// Built-in experiment, reading `<name>.data` and `<name>.schema` from `data_dir`.
pub fn preset(name: &str, data_dir: &Path) -> Option<ExperimentSpec> {
    let heights = match name {
        "car" => vec![3, 5, 7],
        "nursery" | "abalone" => vec![3, 5, 7, 10],
        "connect-4" => vec![3, 5, 7, 10, 15],
        _ => return None,
    };
    Some(ExperimentSpec {
        name: name.to_string(),
        data: data_dir.join(format!("{name}.data")),
        schema: data_dir.join(format!("{name}.schema")),
        heights,
        qaoa: QaoaConfig::default(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    name: String,
    data: PathBuf,
    schema: PathBuf,
    heights: Vec<usize>,
    #[serde(default)]
    qaoa: QaoaSection,
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct QaoaSection {
    p: usize,
    shots: usize,
    seed: u64,
    grid: usize,
}

impl Default for QaoaSection {
    fn default() -> Self {
        let d = QaoaConfig::default();
        let Calibration::RampGrid { resolution } = d.calibration else {
            unreachable!("default calibration is a grid search")
        };
        QaoaSection {
            p: d.p,
            shots: d.shots,
            seed: d.seed,
            grid: resolution,
        }
    }
}

impl ExperimentSpec {
    /// Parses a TOML spec; relative paths are resolved against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: SpecFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let spec = ExperimentSpec {
            name: raw.name,
            data: base_dir.join(raw.data),
            schema: base_dir.join(raw.schema),
            heights: raw.heights,
            qaoa: QaoaConfig {
                p: raw.qaoa.p,
                shots: raw.qaoa.shots,
                seed: raw.qaoa.seed,
                calibration: Calibration::RampGrid {
                    resolution: raw.qaoa.grid,
                },
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new("")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.heights.is_empty() {
            return Err(Error::Config("an experiment needs at least one height".into()));
        }
        if self.heights.contains(&0) {
            return Err(Error::Config("heights must be at least 1".into()));
        }
        self.qaoa.validate()
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Where to write `<name>-h<height>-{exhaustive,qaoa}.tree`.
    pub out_dir: Option<PathBuf>,
    pub jobs: usize,
}

#[derive(Debug, Clone)]
pub struct HeightResult {
    pub classical: TreeFile,
    pub quantum: TreeFile,
    pub report: ComparisonReport,
    pub classical_secs: f64,
    pub qaoa_secs: f64,
}

#[derive(Debug)]
pub struct ExperimentRow {
    pub height: usize,
    pub outcome: std::result::Result<HeightResult, String>,
}

#[derive(Debug)]
pub struct ExperimentReport {
    pub name: String,
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentReport {
    pub fn all_equal(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.outcome.as_ref().is_ok_and(|h| h.report.is_equal()))
    }

    /// Aligned plain-text table, one row per height.
    pub fn table(&self) -> String {
        let header = ["dataset", "h", "q", "B", "B_eq", "nodes_qaoa", "t_exh_s", "t_qaoa_s"];
        let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            let mut cells = vec![self.name.clone(), r.height.to_string()];
            match &r.outcome {
                Ok(h) => cells.extend([
                    format!("{:.6}", h.report.q()),
                    h.report.b.to_string(),
                    h.report.b_eq.to_string(),
                    h.quantum.root.node_count().to_string(),
                    format!("{:.3}", h.classical_secs),
                    format!("{:.3}", h.qaoa_secs),
                ]),
                Err(e) => cells.push(format!("error: {e}")),
            }
            rows.push(cells);
        }
        let mut widths = vec![0; header.len()];
        for row in &rows {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        for row in rows {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(i, c)| if i < widths.len() && row.len() == widths.len() { format!("{c:>w$}", w = widths[i]) } else { c.clone() })
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    /// Comma-separated dump with a header row; failed rows carry the error.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record(["dataset", "h", "q", "B", "B_eq", "nodes_qaoa", "t_exh_s", "t_qaoa_s", "error"]);
        for r in &self.rows {
            let record: Vec<String> = match &r.outcome {
                Ok(h) => vec![
                    self.name.clone(),
                    r.height.to_string(),
                    h.report.q().to_string(),
                    h.report.b.to_string(),
                    h.report.b_eq.to_string(),
                    h.quantum.root.node_count().to_string(),
                    h.classical_secs.to_string(),
                    h.qaoa_secs.to_string(),
                    String::new(),
                ],
                Err(e) => {
                    let mut v = vec![self.name.clone(), r.height.to_string()];
                    v.extend(std::iter::repeat_n(String::new(), 6));
                    v.push(e.clone());
                    v
                }
            };
            let _ = w.write_record(&record);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }
}

/// Grows one tree and packages it with its run metadata.
pub fn build_tree(dataset: &Dataset, name: &str, params: GrowParams) -> Result<TreeFile> {
    let grower = TreeGrower::new(dataset, params.clone())?;
    let root = grower.grow()?;
    Ok(TreeFile {
        schema: dataset.schema().clone(),
        metadata: RunMetadata {
            dataset: name.to_string(),
            height: params.max_height,
            split_mode: params.split_mode,
            backend: params.backend,
            angles: grower.angles().cloned(),
        },
        root,
    })
}

fn run_height(spec: &ExperimentSpec, dataset: &Dataset, height: usize, options: &RunOptions) -> Result<HeightResult> {
    let params = |backend| GrowParams {
        max_height: height,
        backend,
        split_mode: SplitMode::Multiway,
        jobs: options.jobs.max(1),
    };
    let start = Instant::now();
    let classical = build_tree(dataset, &spec.name, params(Backend::Exhaustive))?;
    let classical_secs = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let quantum = build_tree(dataset, &spec.name, params(Backend::Qaoa(spec.qaoa.clone())))?;
    let qaoa_secs = start.elapsed().as_secs_f64();
    if let Some(dir) = &options.out_dir {
        classical.save(dir.join(format!("{}-h{height}-exhaustive.tree", spec.name)))?;
        quantum.save(dir.join(format!("{}-h{height}-qaoa.tree", spec.name)))?;
    }
    let report = q_tree(&classical.root, &quantum.root);
    Ok(HeightResult {
        classical,
        quantum,
        report,
        classical_secs,
        qaoa_secs,
    })
}

/// Runs every height; a failing height is recorded and the rest still run.
pub fn run_experiment(spec: &ExperimentSpec, options: &RunOptions) -> Result<ExperimentReport> {
    spec.validate()?;
    if let Some(dir) = &options.out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let dataset = load_schema(&spec.schema).and_then(|schema| Dataset::load_csv(&spec.data, schema));
    let rows = spec
        .heights
        .iter()
        .map(|&height| ExperimentRow {
            height,
            outcome: match &dataset {
                Ok(ds) => run_height(spec, ds, height, options).map_err(|e| e.to_string()),
                Err(e) => Err(e.to_string()),
            },
        })
        .collect();
    Ok(ExperimentReport {
        name: spec.name.clone(),
        rows,
    })
}
