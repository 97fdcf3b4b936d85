//! Tabular training data: schema files, CSV loading and row-index views.
//!
//! A schema file lists the columns of the data file in order, one record per
//! line:
//!
//! ```text
//! # comments and blank lines are ignored
//! dataset car
//! attribute buying categorical vhigh high med low
//! attribute length real
//! class acceptability unacc acc good vgood
//! ```
//!
//! `dataset` is optional and may appear once, before any column. Exactly one
//! `class` record is required; its position among the column records is the
//! position of the class column in the data file. Category labels are the
//! category universe of the attribute, in domain order, and may not contain
//! whitespace, `,` or `#`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;

use crate::criterion::{ContingencyTable, Partition};
use crate::error::{Error, Result};

/// Largest category count supported per attribute; partitions are `u64` masks.
pub const MAX_CATEGORIES: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeKind {
    Categorical,
    Real,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSchema {
    pub name: String,
    pub kind: AttributeKind,
    /// Empty for real attributes.
    pub categories: Vec<String>,
}

impl AttributeSchema {
    pub fn categorical(name: &str, categories: &[&str]) -> Self {
        AttributeSchema {
            name: name.to_string(),
            kind: AttributeKind::Categorical,
            categories: categories.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn real(name: &str) -> Self {
        AttributeSchema {
            name: name.to_string(),
            kind: AttributeKind::Real,
            categories: Vec::new(),
        }
    }

    pub fn is_categorical(&self) -> bool {
        self.kind == AttributeKind::Categorical
    }

    pub fn n_values(&self) -> usize {
        self.categories.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub name: Option<String>,
    pub attributes: Vec<AttributeSchema>,
    pub class_name: String,
    pub class_labels: Vec<String>,
    /// Column index of the class among the `attributes.len() + 1` data columns.
    pub class_column: usize,
}

fn valid_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == ',' || c == '#')
}

impl Schema {
    /// Builds a schema with the class as the last data column.
    pub fn new(attributes: Vec<AttributeSchema>, class_name: &str, class_labels: &[&str]) -> Result<Self> {
        let class_column = attributes.len();
        let schema = Schema {
            name: None,
            attributes,
            class_name: class_name.to_string(),
            class_labels: class_labels.iter().map(|s| s.to_string()).collect(),
            class_column,
        };
        schema.validate("<schema>")?;
        Ok(schema)
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    fn validate(&self, source_name: &str) -> Result<()> {
        let err = |msg: String| Error::Schema {
            source_name: source_name.to_string(),
            line: 0,
            msg,
        };
        if self.class_column > self.attributes.len() {
            return Err(err("class column out of range".into()));
        }
        if self.class_labels.is_empty() {
            return Err(err("class label list is empty".into()));
        }
        check_distinct(&self.class_labels).map_err(|d| err(format!("duplicate class label `{d}`")))?;
        let mut names: Vec<&str> = vec![self.class_name.as_str()];
        for a in &self.attributes {
            if names.contains(&a.name.as_str()) {
                return Err(err(format!("duplicate column name `{}`", a.name)));
            }
            names.push(&a.name);
            match a.kind {
                AttributeKind::Categorical if a.categories.is_empty() => {
                    return Err(err(format!("categorical attribute `{}` has no categories", a.name)))
                }
                AttributeKind::Categorical if a.categories.len() > MAX_CATEGORIES => {
                    return Err(err(format!(
                        "attribute `{}` has {} categories, at most {MAX_CATEGORIES} supported",
                        a.name,
                        a.categories.len()
                    )))
                }
                AttributeKind::Real if !a.categories.is_empty() => {
                    return Err(err(format!("real attribute `{}` lists categories", a.name)))
                }
                _ => {}
            }
            check_distinct(&a.categories)
                .map_err(|d| err(format!("duplicate category `{d}` in attribute `{}`", a.name)))?;
        }
        Ok(())
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut name = None;
        let mut attributes = Vec::new();
        let mut class: Option<(String, Vec<String>, usize)> = None;
        let mut seen_names: Vec<String> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: String| Error::Schema {
                source_name: source_name.to_string(),
                line,
                msg,
            };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tokens = content.split_whitespace();
            let keyword = tokens.next().unwrap_or_default();
            let rest: Vec<&str> = tokens.collect();
            if let Some(bad) = rest.iter().find(|t| !valid_token(t)) {
                return Err(err(format!("invalid token `{bad}`")));
            }
            match keyword {
                "dataset" => {
                    if name.is_some() || !attributes.is_empty() || class.is_some() {
                        return Err(err("`dataset` must appear once, before any column".into()));
                    }
                    match rest.as_slice() {
                        [n] => name = Some(n.to_string()),
                        _ => return Err(err("expected `dataset <name>`".into())),
                    }
                }
                "attribute" => {
                    let (col_name, kind, labels) = match rest.as_slice() {
                        [n, "real"] => (n, AttributeKind::Real, Vec::new()),
                        [_, "real", ..] => return Err(err("real attribute cannot list categories".into())),
                        [_, "categorical"] => return Err(err("categorical attribute has an empty category list".into())),
                        [n, "categorical", labels @ ..] => {
                            (n, AttributeKind::Categorical, labels.iter().map(|s| s.to_string()).collect())
                        }
                        [_, other, ..] => return Err(err(format!("unknown attribute kind `{other}`"))),
                        _ => return Err(err("expected `attribute <name> <kind> [labels...]`".into())),
                    };
                    if seen_names.iter().any(|s| s == col_name) {
                        return Err(err(format!("duplicate attribute name `{col_name}`")));
                    }
                    if kind == AttributeKind::Categorical && labels.len() > MAX_CATEGORIES {
                        return Err(err(format!("more than {MAX_CATEGORIES} categories")));
                    }
                    check_distinct(&labels).map_err(|d| err(format!("duplicate category `{d}`")))?;
                    seen_names.push(col_name.to_string());
                    attributes.push(AttributeSchema {
                        name: col_name.to_string(),
                        kind,
                        categories: labels,
                    });
                }
                "class" => {
                    if class.is_some() {
                        return Err(err("class column declared twice".into()));
                    }
                    let (col_name, labels) = match rest.as_slice() {
                        [n, labels @ ..] if !labels.is_empty() => (n, labels),
                        _ => return Err(err("expected `class <name> <labels...>`".into())),
                    };
                    if seen_names.iter().any(|s| s == col_name) {
                        return Err(err(format!("duplicate column name `{col_name}`")));
                    }
                    let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
                    check_distinct(&labels).map_err(|d| err(format!("duplicate class label `{d}`")))?;
                    seen_names.push(col_name.to_string());
                    class = Some((col_name.to_string(), labels, attributes.len()));
                }
                other => return Err(err(format!("unknown record `{other}`"))),
            }
        }

        let Some((class_name, class_labels, class_column)) = class else {
            return Err(Error::Schema {
                source_name: source_name.to_string(),
                line: text.lines().count(),
                msg: "missing `class` record".into(),
            });
        };
        Ok(Schema {
            name,
            attributes,
            class_name,
            class_labels,
            class_column,
        })
    }

    /// Canonical text form; `parse(to_text())` reproduces the schema.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            let _ = writeln!(out, "dataset {name}");
        }
        for col in 0..=self.attributes.len() {
            if col == self.class_column {
                let _ = writeln!(out, "class {} {}", self.class_name, self.class_labels.join(" "));
            }
            if let Some(a) = self.attributes.get(col) {
                match a.kind {
                    AttributeKind::Real => {
                        let _ = writeln!(out, "attribute {} real", a.name);
                    }
                    AttributeKind::Categorical => {
                        let _ = writeln!(out, "attribute {} categorical {}", a.name, a.categories.join(" "));
                    }
                }
            }
        }
        out
    }
}

fn check_distinct(labels: &[String]) -> std::result::Result<(), String> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(l.clone());
        }
    }
    Ok(())
}

pub fn load_schema(path: impl AsRef<Path>) -> Result<Schema> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Schema::parse(&text, &path.display().to_string())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Category(usize),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Categorical(Vec<u32>),
    Real(Vec<f64>),
}

impl Column {
    fn len(&self) -> usize {
        match self {
            Column::Categorical(v) => v.len(),
            Column::Real(v) => v.len(),
        }
    }
}

/// Immutable training data, stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    columns: Vec<Column>,
    classes: Vec<u32>,
}

struct CellParser<'s> {
    schema: &'s Schema,
    lookups: Vec<HashMap<&'s str, usize>>,
    class_lookup: HashMap<&'s str, usize>,
}

impl<'s> CellParser<'s> {
    fn new(schema: &'s Schema) -> Self {
        let index = |labels: &'s [String]| labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        CellParser {
            schema,
            lookups: schema.attributes.iter().map(|a| index(&a.categories)).collect(),
            class_lookup: index(&schema.class_labels),
        }
    }

    fn attribute(&self, attr: usize, raw: &str) -> std::result::Result<Cell, String> {
        let a = &self.schema.attributes[attr];
        match a.kind {
            AttributeKind::Categorical => self.lookups[attr]
                .get(raw)
                .map(|&v| Cell::Category(v))
                .ok_or_else(|| format!("unknown category `{raw}` for attribute `{}`", a.name)),
            AttributeKind::Real => match raw.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(Cell::Real(x)),
                Ok(_) => Err(format!("non-finite value `{raw}` for attribute `{}`", a.name)),
                Err(_) => Err(format!("unparseable real value `{raw}` for attribute `{}`", a.name)),
            },
        }
    }

    fn class(&self, raw: &str) -> std::result::Result<usize, String> {
        self.class_lookup
            .get(raw)
            .copied()
            .ok_or_else(|| format!("unknown class label `{raw}`"))
    }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

impl Dataset {
    pub fn new(schema: Schema, columns: Vec<Column>, classes: Vec<u32>) -> Result<Self> {
        let bad = |msg: String| Error::Data {
            source_name: "<memory>".into(),
            row: 0,
            msg,
        };
        if columns.len() != schema.n_attributes() {
            return Err(bad(format!("{} columns for {} attributes", columns.len(), schema.n_attributes())));
        }
        if classes.is_empty() {
            return Err(bad("dataset has no rows".into()));
        }
        for (j, (col, a)) in columns.iter().zip(&schema.attributes).enumerate() {
            if col.len() != classes.len() {
                return Err(bad(format!("column {j} has {} rows, expected {}", col.len(), classes.len())));
            }
            match (col, a.kind) {
                (Column::Categorical(v), AttributeKind::Categorical) => {
                    if let Some(x) = v.iter().find(|&&x| x as usize >= a.n_values()) {
                        return Err(bad(format!("category index {x} out of range in column {j}")));
                    }
                }
                (Column::Real(v), AttributeKind::Real) => {
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(bad(format!("non-finite value in column {j}")));
                    }
                }
                _ => return Err(bad(format!("column {j} kind does not match schema"))),
            }
        }
        if let Some(c) = classes.iter().find(|&&c| c as usize >= schema.n_classes()) {
            return Err(bad(format!("class index {c} out of range")));
        }
        Ok(Dataset { schema, columns, classes })
    }

    pub fn from_reader<R: Read>(reader: R, schema: Schema, source_name: &str) -> Result<Self> {
        let d = schema.n_attributes();
        let mut columns: Vec<Column> = schema
            .attributes
            .iter()
            .map(|a| match a.kind {
                AttributeKind::Categorical => Column::Categorical(Vec::new()),
                AttributeKind::Real => Column::Real(Vec::new()),
            })
            .collect();
        let mut classes = Vec::new();
        {
            let parser = CellParser::new(&schema);
            let mut record = csv::StringRecord::new();
            let mut rdr = csv_reader(reader);
            loop {
                let more = rdr.read_record(&mut record).map_err(|e| Error::Data {
                    source_name: source_name.to_string(),
                    row: e.position().map_or(0, |p| p.line() as usize),
                    msg: e.to_string(),
                })?;
                if !more {
                    break;
                }
                let row = record.position().map_or(0, |p| p.line() as usize);
                let err = |msg: String| Error::Data {
                    source_name: source_name.to_string(),
                    row,
                    msg,
                };
                if record.len() != d + 1 {
                    return Err(err(format!("expected {} columns, found {}", d + 1, record.len())));
                }
                let mut attr = 0;
                for (col, raw) in record.iter().enumerate() {
                    if col == schema.class_column {
                        classes.push(parser.class(raw).map_err(err)? as u32);
                        continue;
                    }
                    match (parser.attribute(attr, raw).map_err(err)?, &mut columns[attr]) {
                        (Cell::Category(v), Column::Categorical(c)) => c.push(v as u32),
                        (Cell::Real(x), Column::Real(c)) => c.push(x),
                        _ => unreachable!("parser follows the schema"),
                    }
                    attr += 1;
                }
            }
        }
        if classes.is_empty() {
            return Err(Error::Data {
                source_name: source_name.to_string(),
                row: 0,
                msg: "data file contains no rows".into(),
            });
        }
        Ok(Dataset { schema, columns, classes })
    }

    pub fn load_csv(path: impl AsRef<Path>, schema: Schema) -> Result<Self> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file, schema, &path.display().to_string())
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.classes.len()
    }

    pub fn column(&self, attr: usize) -> &Column {
        &self.columns[attr]
    }

    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn cell(&self, row: usize, attr: usize) -> Cell {
        match &self.columns[attr] {
            Column::Categorical(v) => Cell::Category(v[row] as usize),
            Column::Real(v) => Cell::Real(v[row]),
        }
    }

    pub fn row(&self, row: usize) -> Vec<Cell> {
        (0..self.columns.len()).map(|a| self.cell(row, a)).collect()
    }

    /// Writes the data back in the file layout it was loaded from. Real cells
    /// use the shortest decimal that round-trips.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.n_rows() {
            let mut attr = 0;
            for col in 0..=self.columns.len() {
                if col > 0 {
                    out.push(',');
                }
                if col == self.schema.class_column {
                    out.push_str(&self.schema.class_labels[self.classes[r] as usize]);
                    continue;
                }
                match self.cell(r, attr) {
                    Cell::Category(v) => out.push_str(&self.schema.attributes[attr].categories[v]),
                    Cell::Real(x) => {
                        let _ = write!(out, "{x}");
                    }
                }
                attr += 1;
            }
            out.push('\n');
        }
        out
    }
}

/// Reads attribute rows for prediction. Each line may carry either just the
/// attribute columns, or the full training layout (the class cell is skipped).
pub fn read_feature_rows<R: Read>(reader: R, schema: &Schema, source_name: &str) -> Result<Vec<Vec<Cell>>> {
    let d = schema.n_attributes();
    let parser = CellParser::new(schema);
    let mut rows = Vec::new();
    let mut record = csv::StringRecord::new();
    let mut rdr = csv_reader(reader);
    loop {
        let more = rdr.read_record(&mut record).map_err(|e| Error::Data {
            source_name: source_name.to_string(),
            row: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        if !more {
            break;
        }
        let row = record.position().map_or(0, |p| p.line() as usize);
        let err = |msg: String| Error::Data {
            source_name: source_name.to_string(),
            row,
            msg,
        };
        let skip = match record.len() {
            n if n == d => None,
            n if n == d + 1 => Some(schema.class_column),
            n => return Err(err(format!("expected {d} or {} columns, found {n}", d + 1))),
        };
        let cells = record
            .iter()
            .enumerate()
            .filter(|(col, _)| Some(*col) != skip)
            .enumerate()
            .map(|(attr, (_, raw))| parser.attribute(attr, raw).map_err(err))
            .collect::<Result<Vec<_>>>()?;
        rows.push(cells);
    }
    Ok(rows)
}

/// A subset of dataset rows, held as sorted row indices.
#[derive(Debug, Clone)]
pub struct SubsetView<'a> {
    dataset: &'a Dataset,
    rows: Vec<u32>,
}

impl<'a> SubsetView<'a> {
    pub fn full(dataset: &'a Dataset) -> Self {
        SubsetView {
            dataset,
            rows: (0..dataset.n_rows() as u32).collect(),
        }
    }

    /// Returns `None` unless `rows` is strictly increasing and in range.
    pub fn from_rows(dataset: &'a Dataset, rows: Vec<u32>) -> Option<Self> {
        let sorted = rows.windows(2).all(|w| w[0] < w[1]);
        let in_range = rows.last().is_none_or(|&r| (r as usize) < dataset.n_rows());
        (sorted && in_range).then_some(SubsetView { dataset, rows })
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn categorical(&self, attr: usize) -> &'a [u32] {
        match self.dataset.column(attr) {
            Column::Categorical(v) => v,
            Column::Real(_) => panic!("attribute {attr} is real-valued, expected categorical"),
        }
    }

    fn real(&self, attr: usize) -> &'a [f64] {
        match self.dataset.column(attr) {
            Column::Real(v) => v,
            Column::Categorical(_) => panic!("attribute {attr} is categorical, expected real-valued"),
        }
    }

    fn filtered(&self, keep: impl Fn(u32) -> bool) -> Self {
        SubsetView {
            dataset: self.dataset,
            rows: self.rows.iter().copied().filter(|&r| keep(r)).collect(),
        }
    }

    /// Rows whose categorical cell equals `value`.
    ///
    /// Panics if `attr` is real-valued.
    pub fn subset_by_category(&self, attr: usize, value: usize) -> Self {
        let col = self.categorical(attr);
        self.filtered(|r| col[r as usize] as usize == value)
    }

    /// One view per category of `attr`, in domain order, built in a single pass.
    pub fn partition_by_category(&self, attr: usize) -> Vec<Self> {
        let col = self.categorical(attr);
        let t = self.dataset.schema().attributes[attr].n_values();
        let mut parts = vec![Vec::new(); t];
        for &r in &self.rows {
            parts[col[r as usize] as usize].push(r);
        }
        parts
            .into_iter()
            .map(|rows| SubsetView {
                dataset: self.dataset,
                rows,
            })
            .collect()
    }

    /// Splits into rows with `cell < threshold` and rows with `cell >= threshold`.
    ///
    /// Panics if `attr` is categorical.
    pub fn subset_by_threshold(&self, attr: usize, threshold: f64) -> (Self, Self) {
        let col = self.real(attr);
        let (lo, hi): (Vec<u32>, Vec<u32>) = self.rows.iter().partition(|&&r| col[r as usize] < threshold);
        (
            SubsetView {
                dataset: self.dataset,
                rows: lo,
            },
            SubsetView {
                dataset: self.dataset,
                rows: hi,
            },
        )
    }

    /// Splits into rows whose category lies in `d1` and the rest.
    pub fn subset_by_partition(&self, attr: usize, partition: &Partition) -> (Self, Self) {
        let col = self.categorical(attr);
        let (d1, d2): (Vec<u32>, Vec<u32>) = self
            .rows
            .iter()
            .partition(|&&r| partition.contains(col[r as usize] as usize));
        (
            SubsetView {
                dataset: self.dataset,
                rows: d1,
            },
            SubsetView {
                dataset: self.dataset,
                rows: d2,
            },
        )
    }

    pub fn class_histogram(&self) -> Vec<u64> {
        let classes = self.dataset.classes();
        let mut counts = vec![0u64; self.dataset.schema().n_classes()];
        for &r in &self.rows {
            counts[classes[r as usize] as usize] += 1;
        }
        counts
    }

    /// Most frequent class, lowest index on ties; `None` for an empty view.
    pub fn majority_class(&self) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        majority_of(&self.class_histogram())
    }

    pub fn is_pure(&self) -> bool {
        let classes = self.dataset.classes();
        match self.rows.first() {
            None => true,
            Some(&first) => {
                let c = classes[first as usize];
                self.rows.iter().all(|&r| classes[r as usize] == c)
            }
        }
    }

    /// Value-by-class counts of a categorical attribute over this view.
    pub fn contingency(&self, attr: usize) -> ContingencyTable {
        let col = self.categorical(attr);
        let classes = self.dataset.classes();
        let t = self.dataset.schema().attributes[attr].n_values();
        let m = self.dataset.schema().n_classes();
        let mut table = ContingencyTable::zeros(t, m);
        for &r in &self.rows {
            table.add(col[r as usize] as usize, classes[r as usize] as usize);
        }
        table
    }
}

/// Index of the largest count, lowest index on ties.
pub fn majority_of(histogram: &[u64]) -> Option<usize> {
    let mut best: Option<(usize, u64)> = None;
    for (c, &n) in histogram.iter().enumerate() {
        if best.is_none_or(|(_, b)| n > b) {
            best = Some((c, n));
        }
    }
    best.map(|(c, _)| c)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAR_SCHEMA: &str = "dataset car\n\
        attribute buying categorical vhigh high med low\n\
        attribute maint categorical vhigh high med low\n\
        attribute doors categorical 2 3 4 5more\n\
        attribute persons categorical 2 4 more\n\
        attribute lug_boot categorical small med big\n\
        attribute safety categorical low med high\n\
        class acceptability unacc acc good vgood\n";

    fn toy() -> Dataset {
        let schema = Schema::new(
            vec![AttributeSchema::categorical("a", &["x", "y", "z"]), AttributeSchema::real("r")],
            "cls",
            &["p", "q"],
        )
        .unwrap();
        Dataset::new(
            schema,
            vec![
                Column::Categorical(vec![0, 1, 0, 2]),
                Column::Real(vec![1.0, 2.0, 3.0, 2.0]),
            ],
            vec![0, 0, 1, 1],
        )
        .unwrap()
    }

    #[test]
    fn schema_with_six_categorical_attributes() {
        let s = Schema::parse(CAR_SCHEMA, "car.schema").unwrap();
        assert_eq!(s.n_attributes(), 6);
        let names: Vec<_> = s.attributes.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, ["buying", "maint", "doors", "persons", "lug_boot", "safety"]);
        assert_eq!(s.class_labels, ["unacc", "acc", "good", "vgood"]);
        assert_eq!(s.class_column, 6);
        assert!(s.attributes.iter().all(|a| a.is_categorical()));
    }

    #[test]
    fn real_attribute_has_no_categories() {
        let s = Schema::parse("attribute len real\nclass c a b\n", "s").unwrap();
        assert_eq!(s.attributes[0].kind, AttributeKind::Real);
        assert!(s.attributes[0].categories.is_empty());
    }

    #[test]
    fn schema_errors_carry_line_numbers() {
        let e = Schema::parse("attribute a real\n\nattribute a real\nclass c x\n", "s").unwrap_err();
        assert!(matches!(e, Error::Schema { line: 3, .. }), "{e}");
        let e = Schema::parse("attribute a categorical\nclass c x\n", "s").unwrap_err();
        assert!(matches!(e, Error::Schema { line: 1, .. }), "{e}");
        let e = Schema::parse("attribute a categorical u u\nclass c x\n", "s").unwrap_err();
        assert!(matches!(e, Error::Schema { line: 1, .. }), "{e}");
        let e = Schema::parse("attribute a real\n", "s").unwrap_err();
        assert!(e.to_string().contains("class"));
        let e = Schema::parse("class c x\nclass d y\n", "s").unwrap_err();
        assert!(matches!(e, Error::Schema { line: 2, .. }));
        let e = Schema::parse("attribute a real 1 2\nclass c x\n", "s").unwrap_err();
        assert!(matches!(e, Error::Schema { line: 1, .. }));
    }

    #[test]
    fn class_position_is_declared() {
        let s = Schema::parse("class c yes no\nattribute a categorical u v\n", "s").unwrap();
        assert_eq!(s.class_column, 0);
        let ds = Dataset::from_reader("yes,u\nno,v\n".as_bytes(), s, "d").unwrap();
        assert_eq!(ds.classes(), &[0, 1]);
        assert_eq!(ds.to_csv(), "yes,u\nno,v\n");
    }

    #[test]
    fn schema_text_round_trips() {
        let s = Schema::parse(CAR_SCHEMA, "car.schema").unwrap();
        assert_eq!(s.to_text(), CAR_SCHEMA);
        assert_eq!(Schema::parse(&s.to_text(), "again").unwrap(), s);
    }

    #[test]
    fn load_errors_report_rows() {
        let s = Schema::parse("attribute a categorical u v\nattribute r real\nclass c x y\n", "s").unwrap();
        let cases = [
            ("u,1.0,x\nu,2.0\n", "expected 3 columns"),
            ("u,1.0,x\nw,2.0,x\n", "unknown category"),
            ("u,abc,x\n", "unparseable"),
            ("u,inf,x\n", "non-finite"),
            ("u,1,z\n", "unknown class"),
        ];
        for (text, needle) in cases {
            let e = Dataset::from_reader(text.as_bytes(), s.clone(), "d").unwrap_err();
            assert!(e.to_string().contains(needle), "{e}");
            assert!(matches!(e, Error::Data { row: 1 | 2, .. }));
        }
        let e = Dataset::from_reader("".as_bytes(), s, "d").unwrap_err();
        assert!(e.to_string().contains("no rows"));
    }

    #[test]
    fn full_view_indices() {
        let ds = toy();
        assert_eq!(SubsetView::full(&ds).rows(), &[0, 1, 2, 3]);
    }

    #[test]
    fn category_subsets() {
        let ds = toy();
        let v = SubsetView::full(&ds);
        assert_eq!(v.subset_by_category(0, 0).rows(), &[0, 2]);
        let only_x = v.subset_by_category(0, 0);
        assert!(only_x.subset_by_category(0, 1).is_empty());
        let parts = v.partition_by_category(0);
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[2].rows(), &[3]);
    }

    #[test]
    #[should_panic(expected = "real-valued")]
    fn category_subset_rejects_real_attribute() {
        let ds = toy();
        SubsetView::full(&ds).subset_by_category(1, 0);
    }

    #[test]
    fn threshold_subsets() {
        let ds = toy();
        let v =SubsetView::from_rows(&ds, vec![0, 1, 2]).unwrap();
        let (lo, hi) = v.subset_by_threshold(1, 2.0);
        assert_eq!(lo.rows(), &[0]);
        assert_eq!(hi.rows(), &[1, 2]);
        let (lo, hi) = v.subset_by_threshold(1, 0.5);
        assert!(lo.is_empty());
        assert_eq!(hi.len(), 3);
        let (lo, hi) = v.subset_by_threshold(1, 10.0);
        assert_eq!(lo.len(), 3);
        assert!(hi.is_empty());
    }

    #[test]
    fn histograms_and_majority() {
        let ds = toy();
        let v = SubsetView::from_rows(&ds, vec![0, 1, 2]).unwrap();
        assert_eq!(v.class_histogram(), vec![2, 1]);
        assert_eq!(v.majority_class(), Some(0));
        let empty = SubsetView::from_rows(&ds, vec![]).unwrap();
        assert_eq!(empty.class_histogram(), vec![0, 0]);
        assert_eq!(empty.majority_class(), None);
        assert_eq!(majority_of(&[3, 3]), Some(0));
        assert_eq!(majority_of(&[0, 5, 5]), Some(1));
    }

    #[test]
    fn contingency_counts() {
        let ds = toy();
        let v = SubsetView::from_rows(&ds, vec![0, 2, 3]).unwrap();
        let t = v.contingency(0);
        assert_eq!(t.count(0, 0), 1);
        assert_eq!(t.count(0, 1), 1);
        assert_eq!(t.count(2, 1), 1);
        assert_eq!(t.total(), 3);
        let empty = SubsetView::from_rows(&ds, vec![]).unwrap().contingency(0);
        assert_eq!(empty.total(), 0);
    }

    #[test]
    fn from_rows_validates() {
        let ds = toy();
        assert!(SubsetView::from_rows(&ds, vec![1, 0]).is_none());
        assert!(SubsetView::from_rows(&ds, vec![0, 4]).is_none());
        assert!(SubsetView::from_rows(&ds, vec![1, 1]).is_none());
    }

    #[test]
    fn feature_rows_accept_both_layouts() {
        let s = Schema::parse("attribute a categorical u v\nclass c x y\nattribute r real\n", "s").unwrap();
        let rows = read_feature_rows("u,x,1.5\nv,2\n".as_bytes(), &s, "p").unwrap();
        assert_eq!(rows, vec![vec![Cell::Category(0), Cell::Real(1.5)], vec![Cell::Category(1), Cell::Real(2.0)]]);
        assert!(read_feature_rows("".as_bytes(), &s, "p").unwrap().is_empty());
        assert!(read_feature_rows("u\n".as_bytes(), &s, "p").is_err());
    }
}
