//! Top-down tree growing with the twoing criterion.
//!
//! Every categorical attribute is scored by its best two-way partition,
//! found either exhaustively or with simulated QAOA. A categorical winner
//! then splits multiway, one child per domain value (the default), or
//! two-way along the winning partition. Real attributes always split on a
//! threshold, `< t` first and `>= t` second.
//!
//! The root sits at depth 0 and no node is deeper than `max_height`.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::criterion::{exhaustive_best_partition, objective_table, twoing_from_histograms, Partition, SplitScore};
use crate::dataset::{AttributeKind, AttributeSchema, Cell, Column, Dataset, SubsetView};
use crate::error::{Error, Result};
use crate::qaoa::{calibrate_angles, qaoa_best_partition, QaoaAngles, QaoaConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    Exhaustive,
    Qaoa(QaoaConfig),
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Exhaustive => "exhaustive",
            Backend::Qaoa(_) => "qaoa",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitMode {
    #[default]
    Multiway,
    Binary,
}

impl SplitMode {
    pub fn name(&self) -> &'static str {
        match self {
            SplitMode::Multiway => "multiway",
            SplitMode::Binary => "binary",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowParams {
    pub max_height: usize,
    pub backend: Backend,
    pub split_mode: SplitMode,
    /// Worker threads; the grown tree does not depend on it.
    pub jobs: usize,
}

impl GrowParams {
    pub fn new(max_height: usize, backend: Backend) -> Self {
        GrowParams {
            max_height,
            backend,
            split_mode: SplitMode::Multiway,
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_height == 0 {
            return Err(Error::Config("height must be at least 1".into()));
        }
        if let Backend::Qaoa(config) = &self.backend {
            config.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Test {
    /// One child per category, in domain order.
    Multiway,
    /// Two children: categories in the partition's first side, then the rest.
    Partition(Partition),
    /// Two children: `cell < t`, then `cell >= t`.
    Threshold(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf { label: usize },
    Internal { attr: usize, test: Test, children: Vec<TreeNode> },
}

impl TreeNode {
    pub fn node_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { children, .. } => 1 + children.iter().map(TreeNode::node_count).sum::<usize>(),
        }
    }

    /// Depth of the deepest node; a lone leaf has height 0.
    pub fn height(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { children, .. } => 1 + children.iter().map(TreeNode::height).max().unwrap_or(0),
        }
    }

    pub fn predict(&self, row: &[Cell]) -> usize {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { label } => return *label,
                TreeNode::Internal { attr, test, children } => {
                    let branch = match (test, row[*attr]) {
                        (Test::Multiway, Cell::Category(v)) => v,
                        (Test::Partition(p), Cell::Category(v)) => usize::from(!p.contains(v)),
                        (Test::Threshold(t), Cell::Real(x)) => usize::from(x >= *t),
                        _ => panic!("row cell {attr} does not match the tree's attribute kind"),
                    };
                    node = &children[branch];
                }
            }
        }
    }
}

/// Labels of the outgoing edges of a node testing `attr` with `test`.
pub fn edge_labels(test: &Test, attr: &AttributeSchema) -> Vec<String> {
    match test {
        Test::Multiway => attr.categories.clone(),
        Test::Partition(_) => vec!["in".into(), "out".into()],
        Test::Threshold(_) => vec!["<".into(), ">=".into()],
    }
}

pub fn predict(tree: &TreeNode, row: &[Cell]) -> usize {
    tree.predict(row)
}

/// Leaf when the view is empty, pure, or at the height limit.
pub fn stop_criterion(view: &SubsetView, depth: usize, max_height: usize) -> bool {
    view.is_empty() || view.is_pure() || depth >= max_height
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitPayload {
    Categorical(Option<Partition>),
    Threshold(Option<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttributeSplit {
    pub value: f64,
    pub payload: SplitPayload,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestSplit {
    pub attr: usize,
    pub value: f64,
    pub payload: SplitPayload,
}

/// Best threshold on a real attribute: candidates are midpoints between
/// consecutive distinct values, scanned in ascending order; the first maximum
/// wins. Fewer than two distinct values give `(0, None)`.
pub fn process_real(view: &SubsetView, attr: usize) -> (f64, Option<f64>) {
    let dataset = view.dataset();
    let Column::Real(col) = dataset.column(attr) else {
        panic!("attribute {attr} is categorical, expected real-valued");
    };
    let classes = dataset.classes();
    let mut pairs: Vec<(f64, usize)> = view
        .rows()
        .iter()
        .map(|&r| (col[r as usize], classes[r as usize] as usize))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut below = vec![0u64; dataset.schema().n_classes()];
    let mut above = view.class_histogram();
    let mut best: Option<(f64, f64)> = None;
    for i in 0..pairs.len().saturating_sub(1) {
        let (x, c) = pairs[i];
        below[c] += 1;
        above[c] -= 1;
        let next = pairs[i + 1].0;
        if next == x {
            continue;
        }
        let value = twoing_from_histograms(&below, &above);
        if best.is_none_or(|(v, _)| value > v) {
            best = Some((value, midpoint(x, next)));
        }
    }
    match best {
        Some((value, threshold)) => (value, Some(threshold)),
        None => (0.0, None),
    }
}

/// A threshold strictly above `lo` and at most `hi`.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    if m > lo && m <= hi {
        m
    } else {
        hi
    }
}

/// SplitMix64 finalizer.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Sampling seed for one partition search, fixed by the master seed, the
/// node's child-index path from the root, and the attribute.
pub fn derive_seed(master: u64, path: &[u32], attr: usize) -> u64 {
    let mut s = mix(master);
    for &step in path {
        s = mix(s ^ mix(step as u64 + 1));
    }
    mix(s ^ mix(attr as u64 ^ 0xA77A_0000_0000_0000))
}

/// Grows trees for one dataset and parameter set. QAOA angles are fixed
/// once, at construction, and reused for every partition search.
pub struct TreeGrower<'a> {
    dataset: &'a Dataset,
    params: GrowParams,
    angles: Option<QaoaAngles>,
}

impl<'a> TreeGrower<'a> {
    pub fn new(dataset: &'a Dataset, params: GrowParams) -> Result<Self> {
        params.validate()?;
        let angles = match &params.backend {
            Backend::Exhaustive => None,
            Backend::Qaoa(config) => calibration_angles(dataset, config)?,
        };
        Ok(TreeGrower { dataset, params, angles })
    }

    pub fn params(&self) -> &GrowParams {
        &self.params
    }

    /// Calibrated QAOA angles, if the backend is QAOA and some attribute
    /// needed a partition search.
    pub fn angles(&self) -> Option<&QaoaAngles> {
        self.angles.as_ref()
    }

    pub fn grow(&self) -> Result<TreeNode> {
        let root = SubsetView::full(self.dataset);
        let majority = root.majority_class().unwrap_or(0);
        self.in_pool(|| self.tree_growing(&root, 0, majority, &[]))
    }

    #[cfg(feature = "parallel")]
    fn in_pool<R: Send>(&self, job: impl FnOnce() -> R + Send) -> R {
        if self.params.jobs <= 1 {
            return job();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(self.params.jobs).build() {
            Ok(pool) => pool.install(job),
            Err(_) => job(),
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn in_pool<R>(&self, job: impl FnOnce() -> R) -> R {
        job()
    }

    #[cfg(feature = "parallel")]
    fn ordered_map<T: Send, R: Send>(&self, items: Vec<T>, f: impl Fn(T) -> R + Sync + Send) -> Vec<R> {
        if self.params.jobs > 1 {
            items.into_par_iter().map(f).collect()
        } else {
            items.into_iter().map(f).collect()
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn ordered_map<T, R>(&self, items: Vec<T>, f: impl Fn(T) -> R) -> Vec<R> {
        items.into_iter().map(f).collect()
    }

    pub fn tree_growing(&self, view: &SubsetView<'a>, depth: usize, parent_majority: usize, path: &[u32]) -> Result<TreeNode> {
        let majority = view.majority_class().unwrap_or(parent_majority);
        if stop_criterion(view, depth, self.params.max_height) {
            return Ok(TreeNode::Leaf { label: majority });
        }
        let Some(best) = self.choose_split(view, path)? else {
            return Ok(TreeNode::Leaf { label: majority });
        };
        let (test, subsets) = match best.payload {
            SplitPayload::Categorical(partition) => match (self.params.split_mode, partition) {
                (SplitMode::Binary, Some(p)) => {
                    let (d1, d2) = view.subset_by_partition(best.attr, &p);
                    (Test::Partition(p), vec![d1, d2])
                }
                _ => (Test::Multiway, view.partition_by_category(best.attr)),
            },
            SplitPayload::Threshold(Some(t)) => {
                let (lo, hi) = view.subset_by_threshold(best.attr, t);
                (Test::Threshold(t), vec![lo, hi])
            }
            SplitPayload::Threshold(None) => return Ok(TreeNode::Leaf { label: majority }),
        };
        let jobs: Vec<(u32, SubsetView<'a>)> = subsets.into_iter().enumerate().map(|(i, s)| (i as u32, s)).collect();
        let children = self
            .ordered_map(jobs, |(i, sub)| {
                let mut child_path = path.to_vec();
                child_path.push(i);
                self.tree_growing(&sub, depth + 1, majority, &child_path)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(TreeNode::Internal {
            attr: best.attr,
            test,
            children,
        })
    }

    /// Scans attributes in schema order and keeps a candidate only when it is
    /// strictly better, so the earliest attribute wins ties. Returns `None`
    /// when no attribute scores above zero.
    pub fn choose_split(&self, view: &SubsetView<'a>, path: &[u32]) -> Result<Option<BestSplit>> {
        let attrs: Vec<usize> = (0..self.dataset.schema().n_attributes()).collect();
        let scored = self.ordered_map(attrs, |a| self.split_criterion(a, view, path).map(|s| (a, s)));
        let mut best: Option<BestSplit> = None;
        let mut max = 0.0;
        for entry in scored {
            let (attr, split) = entry?;
            if split.value > max {
                max = split.value;
                best = Some(BestSplit {
                    attr,
                    value: split.value,
                    payload: split.payload,
                });
            }
        }
        Ok(best)
    }

    pub fn split_criterion(&self, attr: usize, view: &SubsetView<'a>, path: &[u32]) -> Result<AttributeSplit> {
        match self.dataset.schema().attributes[attr].kind {
            AttributeKind::Categorical => {
                let score = self.process_categorical(view, attr, path)?;
                Ok(AttributeSplit {
                    value: score.value,
                    payload: SplitPayload::Categorical(score.partition),
                })
            }
            AttributeKind::Real => {
                let (value, threshold) = process_real(view, attr);
                Ok(AttributeSplit {
                    value,
                    payload: SplitPayload::Threshold(threshold),
                })
            }
        }
    }

    pub fn process_categorical(&self, view: &SubsetView<'a>, attr: usize, path: &[u32]) -> Result<SplitScore> {
        let table = view.contingency(attr);
        if table.n_values() < 2 {
            return Ok(SplitScore {
                value: 0.0,
                partition: None,
            });
        }
        match (&self.params.backend, &self.angles) {
            (Backend::Qaoa(config), Some(angles)) => {
                qaoa_best_partition(&table, angles, config.shots, derive_seed(config.seed, path, attr))
            }
            (Backend::Qaoa(_), None) => unreachable!("angles are calibrated whenever a multi-valued attribute exists"),
            (Backend::Exhaustive, _) => Ok(exhaustive_best_partition(&table)),
        }
    }
}

/// Angles for the whole build: fixed angles as given, or a ramp-grid
/// calibration on the root table of the first categorical attribute with at
/// least two values.
fn calibration_angles(dataset: &Dataset, config: &QaoaConfig) -> Result<Option<QaoaAngles>> {
    let Some(attr) = dataset
        .schema()
        .attributes
        .iter()
        .position(|a| a.is_categorical() && a.n_values() >= 2)
    else {
        return Ok(None);
    };
    let table = SubsetView::full(dataset).contingency(attr);
    let f = objective_table(&table)?;
    calibrate_angles(&f, config).map(Some)
}

/// Convenience wrapper: calibrate (if needed) and grow from the full dataset.
pub fn grow_tree(dataset: &Dataset, params: GrowParams) -> Result<(TreeNode, Option<QaoaAngles>)> {
    let grower = TreeGrower::new(dataset, params)?;
    let root = grower.grow()?;
    Ok((root, grower.angles))
}
