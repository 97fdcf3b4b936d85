//! The twoing binary split criterion and the exhaustive search over
//! two-way partitions of a categorical domain.

use crate::error::{Error, Result};
use crate::qsim::MAX_QUBITS;

/// Value-by-class counts for one categorical attribute over a sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    n_values: usize,
    n_classes: usize,
    counts: Vec<u64>,
    value_totals: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    pub fn zeros(n_values: usize, n_classes: usize) -> Self {
        ContingencyTable {
            n_values,
            n_classes,
            counts: vec![0; n_values * n_classes],
            value_totals: vec![0; n_values],
            total: 0,
        }
    }

    /// Builds a table from `counts[value][class]`. Rows must have equal length.
    pub fn from_counts(counts: &[Vec<u64>]) -> Result<Self> {
        let n_classes = counts.first().map_or(0, Vec::len);
        if counts.is_empty() || n_classes == 0 || counts.iter().any(|r| r.len() != n_classes) {
            return Err(Error::Config("contingency counts must be a non-empty rectangle".into()));
        }
        let mut table = ContingencyTable::zeros(counts.len(), n_classes);
        for (v, row) in counts.iter().enumerate() {
            for (c, &n) in row.iter().enumerate() {
                table.counts[v * n_classes + c] = n;
                table.value_totals[v] += n;
                table.total += n;
            }
        }
        Ok(table)
    }

    pub(crate) fn add(&mut self, value: usize, class: usize) {
        self.counts[value * self.n_classes + class] += 1;
        self.value_totals[value] += 1;
        self.total += 1;
    }

    pub fn n_values(&self) -> usize {
        self.n_values
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn count(&self, value: usize, class: usize) -> u64 {
        self.counts[value * self.n_classes + class]
    }

    pub fn value_row(&self, value: usize) -> &[u64] {
        &self.counts[value * self.n_classes..(value + 1) * self.n_classes]
    }

    pub fn value_total(&self, value: usize) -> u64 {
        self.value_totals[value]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Per-class totals (the class histogram of the sample).
    pub fn class_totals(&self) -> Vec<u64> {
        let mut out = vec![0; self.n_classes];
        for v in 0..self.n_values {
            for (o, &n) in out.iter_mut().zip(self.value_row(v)) {
                *o += n;
            }
        }
        out
    }
}

/// A two-way split of a categorical domain. Bit `v` of `mask` is set iff
/// category `v` belongs to the first subdomain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Partition {
    mask: u64,
    n_values: usize,
}

impl Partition {
    pub fn new(mask: u64, n_values: usize) -> Self {
        assert!((1..64).contains(&n_values), "unsupported domain size {n_values}");
        assert!(mask <= full_mask(n_values), "mask {mask:#b} wider than {n_values} values");
        Partition { mask, n_values }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn n_values(&self) -> usize {
        self.n_values
    }

    pub fn contains(&self, value: usize) -> bool {
        self.mask >> value & 1 == 1
    }

    pub fn complement(&self) -> Self {
        Partition {
            mask: full_mask(self.n_values) ^ self.mask,
            n_values: self.n_values,
        }
    }

    /// The representative with category 0 in the first subdomain.
    pub fn canonical(&self) -> Self {
        if self.mask & 1 == 1 {
            *self
        } else {
            self.complement()
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.mask == 0 || self.mask == full_mask(self.n_values)
    }

    pub fn first(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_values).filter(|&v| self.contains(v))
    }

    pub fn second(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_values).filter(|&v| !self.contains(v))
    }
}

pub(crate) fn full_mask(n_values: usize) -> u64 {
    (1u64 << n_values) - 1
}

/// Best split of one attribute: the criterion value and the partition that
/// attains it. `partition` is `None` when the domain has a single value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitScore {
    pub value: f64,
    pub partition: Option<Partition>,
}

/// Twoing value of a split whose two sides have class histograms `h1` and `h2`.
///
/// A side with no rows yields 0. The expression is symmetric in its arguments
/// bit for bit, so a partition and its complement always score identically.
pub fn twoing_from_histograms(h1: &[u64], h2: &[u64]) -> f64 {
    debug_assert_eq!(h1.len(), h2.len());
    let n1: u64 = h1.iter().sum();
    let n2: u64 = h2.iter().sum();
    if n1 == 0 || n2 == 0 {
        return 0.0;
    }
    let (f1, f2) = (n1 as f64, n2 as f64);
    let total = (n1 + n2) as f64;
    let spread: f64 = h1
        .iter()
        .zip(h2)
        .map(|(&a, &b)| (a as f64 / f1 - b as f64 / f2).abs())
        .sum();
    0.25 * ((n1 * n2) as f64 / (total * total)) * spread * spread
}

/// Class histograms of the two subdomains selected by `mask`.
pub fn partition_histograms(table: &ContingencyTable, mask: u64) -> (Vec<u64>, Vec<u64>) {
    let mut h1 = vec![0; table.n_classes()];
    let mut h2 = vec![0; table.n_classes()];
    fill_histograms(table, mask, &mut h1, &mut h2);
    (h1, h2)
}

fn fill_histograms(table: &ContingencyTable, mask: u64, h1: &mut [u64], h2: &mut [u64]) {
    h1.fill(0);
    h2.fill(0);
    for v in 0..table.n_values() {
        let side = if mask >> v & 1 == 1 { &mut *h1 } else { &mut *h2 };
        for (s, &n) in side.iter_mut().zip(table.value_row(v)) {
            *s += n;
        }
    }
}

pub fn twoing_of_partition(table: &ContingencyTable, mask: u64) -> f64 {
    let (h1, h2) = partition_histograms(table, mask);
    twoing_from_histograms(&h1, &h2)
}

/// Enumerates every canonical nontrivial partition (category 0 on the first
/// side, 2^(T-1) - 1 candidates) and returns the best one. Ties go to the
/// numerically smallest mask.
pub fn exhaustive_best_partition(table: &ContingencyTable) -> SplitScore {
    let t = table.n_values();
    if t < 2 {
        return SplitScore {
            value: 0.0,
            partition: None,
        };
    }
    let full = full_mask(t);
    let mut h1 = vec![0; table.n_classes()];
    let mut h2 = vec![0; table.n_classes()];
    let mut best = (f64::NEG_INFINITY, 1u64);
    let mut mask = 1u64;
    while mask < full {
        fill_histograms(table, mask, &mut h1, &mut h2);
        let value = twoing_from_histograms(&h1, &h2);
        if value > best.0 {
            best = (value, mask);
        }
        mask += 2;
    }
    SplitScore {
        value: best.0,
        partition: Some(Partition::new(best.1, t)),
    }
}

/// The objective over all 2^T bitstrings: `f[z]` is the twoing value of the
/// partition with mask `z`. Trivial masks map to 0.
pub fn objective_table(table: &ContingencyTable) -> Result<Vec<f64>> {
    let t = table.n_values();
    if t == 0 || t > MAX_QUBITS {
        return Err(Error::QubitCap(t));
    }
    let mut h1 = vec![0; table.n_classes()];
    let mut h2 = vec![0; table.n_classes()];
    Ok((0..1u64 << t)
        .map(|z| {
            fill_histograms(table, z, &mut h1, &mut h2);
            twoing_from_histograms(&h1, &h2)
        })
        .collect())
}
