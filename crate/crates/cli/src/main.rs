use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qdtree::compare::compare_files;
use qdtree::dataset::{load_schema, read_feature_rows, Dataset};
use qdtree::experiment::{build_tree, preset, run_experiment, ExperimentSpec, RunOptions, PRESETS};
use qdtree::qaoa::{Calibration, QaoaConfig};
use qdtree::tree::{Backend, GrowParams, SplitMode};
use qdtree::tree_file::TreeFile;

#[derive(Parser)]
#[command(name = "qdtree", version, about = "Twoing decision trees with exhaustive or simulated-QAOA split search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow a tree and write it as a tree file.
    Train(TrainArgs),
    /// Score a candidate tree against a reference tree.
    Compare(CompareArgs),
    /// Print the predicted class of every row of a data file.
    Predict(PredictArgs),
    /// Grow exhaustive and QAOA trees for each height of an experiment and compare them.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exhaustive,
    Qaoa,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitModeArg {
    Multiway,
    Binary,
}

#[derive(Args)]
struct QaoaArgs {
    /// QAOA layers.
    #[arg(long, default_value_t = 5)]
    p: usize,
    /// Measurement shots per partition search.
    #[arg(long, default_value_t = 1024)]
    shots: usize,
    /// Master seed for measurement sampling.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Points per axis of the ramp-schedule calibration grid.
    #[arg(long, default_value_t = 16)]
    grid: usize,
}

impl QaoaArgs {
    fn config(&self) -> QaoaConfig {
        QaoaConfig {
            p: self.p,
            shots: self.shots,
            seed: self.seed,
            calibration: Calibration::RampGrid { resolution: self.grid },
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    schema: PathBuf,
    /// Maximum node depth; the root is at depth 0.
    #[arg(long)]
    height: usize,
    #[arg(long, value_enum, default_value = "exhaustive")]
    backend: BackendArg,
    #[arg(long, value_enum, default_value = "multiway")]
    split_mode: SplitModeArg,
    #[command(flatten)]
    qaoa: QaoaArgs,
    /// Worker threads; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Reference tree file; its node count is the denominator.
    reference: PathBuf,
    candidate: PathBuf,
    /// Exit with status 1 unless the trees are identical.
    #[arg(long)]
    require_equal: bool,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    tree: PathBuf,
    /// Rows with or without the class column.
    #[arg(long)]
    data: PathBuf,
    /// Optional schema the data file follows; must match the tree's.
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Preset name (car, nursery, abalone, connect-4) or a TOML spec file.
    spec: String,
    /// Directory holding `<name>.data` and `<name>.schema` for presets.
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
    /// Directory for the grown tree files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the results table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Override the spec's shot count.
    #[arg(long)]
    shots: Option<usize>,
    /// Override the spec's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Exit with status 1 unless every height gives q = 1.
    #[arg(long)]
    require_equal: bool,
}

enum Outcome {
    Ok,
    Unequal,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => train(a),
        Command::Compare(a) => compare(a),
        Command::Predict(a) => predict(a),
        Command::Experiment(a) => experiment(a),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Unequal) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qdtree: {e}");
            ExitCode::from(2)
        }
    }
}

fn dataset_name(schema_name: Option<&str>, data: &Path) -> String {
    schema_name
        .map(str::to_string)
        .or_else(|| data.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "data".into())
}

fn train(a: TrainArgs) -> qdtree::Result<Outcome> {
    let schema = load_schema(&a.schema)?;
    let dataset = Dataset::load_csv(&a.data, schema)?;
    let params = GrowParams {
        max_height: a.height,
        backend: match a.backend {
            BackendArg::Exhaustive => Backend::Exhaustive,
            BackendArg::Qaoa => Backend::Qaoa(a.qaoa.config()),
        },
        split_mode: match a.split_mode {
            SplitModeArg::Multiway => SplitMode::Multiway,
            SplitModeArg::Binary => SplitMode::Binary,
        },
        jobs: a.jobs.max(1),
    };
    let name = dataset_name(dataset.schema().name.as_deref(), &a.data);
    let start = Instant::now();
    let tree = build_tree(&dataset, &name, params)?;
    let elapsed = start.elapsed().as_secs_f64();
    tree.save(&a.out)?;
    println!("nodes {}", tree.root.node_count());
    println!("elapsed {elapsed:.3}s");
    Ok(Outcome::Ok)
}

fn compare(a: CompareArgs) -> qdtree::Result<Outcome> {
    let reference = TreeFile::load(&a.reference)?;
    let candidate = TreeFile::load(&a.candidate)?;
    let report = compare_files(&reference, &candidate)?;
    print!("{}", report.render(&reference.root, Some(&reference.schema)));
    Ok(if a.require_equal && !report.is_equal() {
        Outcome::Unequal
    } else {
        Outcome::Ok
    })
}

fn predict(a: PredictArgs) -> qdtree::Result<Outcome> {
    let tree = TreeFile::load(&a.tree)?;
    if let Some(path) = &a.schema {
        if load_schema(path)? != tree.schema {
            return Err(qdtree::Error::SchemaMismatch(format!(
                "{} does not match the tree's schema",
                path.display()
            )));
        }
    }
    let file = File::open(&a.data).map_err(|e| qdtree::Error::Io {
        path: a.data.clone(),
        source: e,
    })?;
    let rows = read_feature_rows(file, &tree.schema, &a.data.display().to_string())?;
    let mut out = String::new();
    for row in rows {
        out.push_str(&tree.schema.class_labels[tree.root.predict(&row)]);
        out.push('\n');
    }
    print!("{out}");
    Ok(Outcome::Ok)
}

fn experiment(a: ExperimentArgs) -> qdtree::Result<Outcome> {
    let mut spec = match preset(&a.spec, &a.data_dir) {
        Some(s) => s,
        None if Path::new(&a.spec).is_file() => ExperimentSpec::load(&a.spec)?,
        None => {
            return Err(qdtree::Error::Config(format!(
                "`{}` is neither a preset ({}) nor a spec file",
                a.spec,
                PRESETS.join(", ")
            )))
        }
    };
    if let Some(shots) = a.shots {
        spec.qaoa.shots = shots;
    }
    if let Some(seed) = a.seed {
        spec.qaoa.seed = seed;
    }
    let report = run_experiment(
        &spec,
        &RunOptions {
            out_dir: a.out,
            jobs: a.jobs.max(1),
        },
    )?;
    print!("{}", report.table());
    if let Some(path) = &a.csv {
        std::fs::write(path, report.to_csv()).map_err(|e| qdtree::Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    Ok(if a.require_equal && !report.all_equal() {
        Outcome::Unequal
    } else {
        Outcome::Ok
    })
}
