//! Canonical text form of a grown tree.
//!
//! ```text
//! twoing-tree 1
//! dataset toy
//! backend qaoa
//! split_mode multiway
//! height 3
//! p 2
//! shots 1024
//! seed 42
//! calibration grid 16
//! rng chacha8
//! gammas 1.9634954084936207e-1 3.9269908169872414e-1
//! betas 7.8539816339744828e-1 3.9269908169872414e-1
//! schema-begin
//! attribute colour categorical red green blue
//! attribute size real
//! class fruit apple pear
//! schema-end
//! nodes 6
//! node 0 internal attr=colour test=multiway edges=red,green,blue
//! node 1 leaf label=apple
//! node 2 internal attr=size test=threshold:2.5000000000000000e0 edges=<,>=
//! node 3 leaf label=apple
//! node 4 leaf label=pear
//! node 5 leaf label=pear
//! ```
//!
//! Nodes are listed in pre-order with children in branch order. A partition
//! test lists the categories of its first subdomain in domain order, e.g.
//! `test=partition:red,blue edges=in,out`. Reals are written with 17
//! significant digits, so parsing restores them bit for bit. The `p` through
//! `betas` lines appear only for the QAOA backend; `gammas` and `betas` are
//! omitted when no partition search needed angles.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::criterion::Partition;
use crate::dataset::{AttributeKind, Schema};
use crate::error::{Error, Result};
use crate::qaoa::{Calibration, QaoaAngles, QaoaConfig};
use crate::qsim::RNG_NAME;
use crate::tree::{edge_labels, Backend, SplitMode, Test, TreeNode};

const MAGIC: &str = "twoing-tree 1";

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub dataset: String,
    pub height: usize,
    pub split_mode: SplitMode,
    pub backend: Backend,
    /// Angles actually used by the QAOA backend.
    pub angles: Option<QaoaAngles>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeFile {
    pub schema: Schema,
    pub metadata: RunMetadata,
    pub root: TreeNode,
}

impl TreeFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        deserialize(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn to_text(&self) -> String {
        serialize(&self.schema, &self.root, &self.metadata)
    }
}

/// Threshold and angle formatting: 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn serialize(schema: &Schema, root: &TreeNode, meta: &RunMetadata) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "dataset {}", meta.dataset);
    let _ = writeln!(out, "backend {}", meta.backend.name());
    let _ = writeln!(out, "split_mode {}", meta.split_mode.name());
    let _ = writeln!(out, "height {}", meta.height);
    if let Backend::Qaoa(config) = &meta.backend {
        let _ = writeln!(out, "p {}", config.p);
        let _ = writeln!(out, "shots {}", config.shots);
        let _ = writeln!(out, "seed {}", config.seed);
        match &config.calibration {
            Calibration::RampGrid { resolution } => {
                let _ = writeln!(out, "calibration grid {resolution}");
            }
            Calibration::Fixed(_) => {
                let _ = writeln!(out, "calibration fixed");
            }
        }
        let _ = writeln!(out, "rng {RNG_NAME}");
        if let Some(angles) = &meta.angles {
            let _ = writeln!(out, "gammas {}", join_reals(angles.gammas()));
            let _ = writeln!(out, "betas {}", join_reals(angles.betas()));
        }
    }
    out.push_str("schema-begin\n");
    out.push_str(&schema.to_text());
    out.push_str("schema-end\n");
    let _ = writeln!(out, "nodes {}", root.node_count());
    let mut next_id = 0;
    write_node(&mut out, schema, root, &mut next_id);
    out
}

fn join_reals(xs: &[f64]) -> String {
    xs.iter().map(|&x| format_real(x)).collect::<Vec<_>>().join(" ")
}

fn write_node(out: &mut String, schema: &Schema, node: &TreeNode, next_id: &mut usize) {
    let id = *next_id;
    *next_id += 1;
    match node {
        TreeNode::Leaf { label } => {
            let _ = writeln!(out, "node {id} leaf label={}", schema.class_labels[*label]);
        }
        TreeNode::Internal { attr, test, children } => {
            let a = &schema.attributes[*attr];
            let payload = match test {
                Test::Multiway => "multiway".to_string(),
                Test::Threshold(t) => format!("threshold:{}", format_real(*t)),
                Test::Partition(p) => {
                    let labels: Vec<&str> = p.first().map(|v| a.categories[v].as_str()).collect();
                    format!("partition:{}", labels.join(","))
                }
            };
            let _ = writeln!(
                out,
                "node {id} internal attr={} test={payload} edges={}",
                a.name,
                edge_labels(test, a).join(",")
            );
            for child in children {
                write_node(out, schema, child, next_id);
            }
        }
    }
}

struct Lines<'t> {
    inner: std::iter::Enumerate<std::str::Lines<'t>>,
    line: usize,
}

impl<'t> Lines<'t> {
    fn next(&mut self) -> Result<&'t str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => Err(Error::TreeFormat {
                line: self.line + 1,
                msg: "unexpected end of file".into(),
            }),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::TreeFormat {
            line: self.line,
            msg: msg.into(),
        }
    }

    /// Next line as `key value`; fails unless the key matches.
    fn field(&mut self, key: &str) -> Result<&'t str> {
        let l = self.next()?;
        match l.split_once(' ') {
            Some((k, v)) if k == key => Ok(v),
            _ if l == key => Ok(""),
            _ => Err(self.err(format!("expected `{key}`, found `{l}`"))),
        }
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.field(key)?;
        v.parse().map_err(|_| self.err(format!("invalid {key} `{v}`")))
    }

    fn reals(&mut self, key: &str) -> Result<Vec<f64>> {
        let v = self.field(key)?;
        v.split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| self.err(format!("invalid number `{t}`"))))
            .collect()
    }
}

pub fn deserialize(text: &str) -> Result<TreeFile> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    if lines.next()? != MAGIC {
        return Err(lines.err(format!("expected `{MAGIC}`")));
    }
    let dataset = lines.field("dataset")?.to_string();
    let backend_name = lines.field("backend")?.to_string();
    if !matches!(backend_name.as_str(), "exhaustive" | "qaoa") {
        return Err(lines.err(format!("unknown backend `{backend_name}`")));
    }
    let split_mode = match lines.field("split_mode")? {
        "multiway" => SplitMode::Multiway,
        "binary" => SplitMode::Binary,
        other => return Err(lines.err(format!("unknown split mode `{other}`"))),
    };
    let height: usize = lines.parsed("height")?;

    let mut angles = None;
    let backend = match backend_name.as_str() {
        "exhaustive" => Backend::Exhaustive,
        "qaoa" => {
            let p: usize = lines.parsed("p")?;
            let shots: usize = lines.parsed("shots")?;
            let seed: u64 = lines.parsed("seed")?;
            let calibration = lines.field("calibration")?.to_string();
            let rng = lines.field("rng")?;
            if rng != RNG_NAME {
                return Err(lines.err(format!("unsupported generator `{rng}`")));
            }
            let mut next = lines.next()?;
            if next.starts_with("gammas") {
                let gammas = parse_list(next, "gammas", &lines)?;
                let betas = lines.reals("betas")?;
                let a = QaoaAngles::new(gammas, betas).map_err(|e| lines.err(e.to_string()))?;
                if a.p() != p {
                    return Err(lines.err(format!("{} angle layers but p = {p}", a.p())));
                }
                angles = Some(a);
                next = lines.next()?;
            }
            let calibration = match calibration.split_once(' ') {
                Some(("grid", r)) => Calibration::RampGrid {
                    resolution: r.parse().map_err(|_| lines.err(format!("invalid grid `{r}`")))?,
                },
                None if calibration == "fixed" => match &angles {
                    Some(a) => Calibration::Fixed(a.clone()),
                    None => return Err(lines.err("fixed calibration without angles")),
                },
                _ => return Err(lines.err(format!("unknown calibration `{calibration}`"))),
            };
            if next != "schema-begin" {
                return Err(lines.err("expected `schema-begin`"));
            }
            Backend::Qaoa(QaoaConfig { p, shots, seed, calibration })
        }
        _ => unreachable!("backend name checked above"),
    };
    if backend == Backend::Exhaustive && lines.next()? != "schema-begin" {
        return Err(lines.err("expected `schema-begin`"));
    }

    let schema_start = lines.line + 1;
    let mut schema_text = String::new();
    loop {
        let l = lines.next()?;
        if l == "schema-end" {
            break;
        }
        schema_text.push_str(l);
        schema_text.push('\n');
    }
    let schema = Schema::parse(&schema_text, "embedded schema").map_err(|e| match e {
        Error::Schema { line, msg, .. } => Error::TreeFormat {
            line: schema_start + line - 1,
            msg,
        },
        other => other,
    })?;

    let count: usize = lines.parsed("nodes")?;
    let mut next_id = 0;
    let root = read_node(&mut lines, &schema, &mut next_id)?;
    if next_id != count {
        return Err(lines.err(format!("header announces {count} nodes, found {next_id}")));
    }
    if let Some((i, l)) = lines.inner.find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::TreeFormat {
            line: i + 1,
            msg: format!("trailing content `{l}`"),
        });
    }
    Ok(TreeFile {
        schema,
        metadata: RunMetadata {
            dataset,
            height,
            split_mode,
            backend,
            angles,
        },
        root,
    })
}

fn parse_list(line: &str, key: &str, lines: &Lines) -> Result<Vec<f64>> {
    line.strip_prefix(key)
        .unwrap_or_default()
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| lines.err(format!("invalid number `{t}`"))))
        .collect()
}

fn read_node(lines: &mut Lines, schema: &Schema, next_id: &mut usize) -> Result<TreeNode> {
    let l = lines.next()?;
    let mut tok = l.split(' ');
    let id = *next_id;
    *next_id += 1;
    if tok.next() != Some("node") || tok.next() != Some(id.to_string().as_str()) {
        return Err(lines.err(format!("expected record `node {id}`")));
    }
    let kind = tok.next();
    let mut fields = std::collections::HashMap::new();
    for t in tok {
        let (k, v) = t.split_once('=').ok_or_else(|| lines.err(format!("malformed field `{t}`")))?;
        fields.insert(k, v);
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| lines.err(format!("missing field `{k}`")));
    match kind {
        Some("leaf") => {
            let name = get("label")?;
            let label = schema
                .class_labels
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| lines.err(format!("unknown class label `{name}`")))?;
            Ok(TreeNode::Leaf { label })
        }
        Some("internal") => {
            let name = get("attr")?;
            let attr = schema
                .attribute_index(name)
                .ok_or_else(|| lines.err(format!("unknown attribute `{name}`")))?;
            let a = &schema.attributes[attr];
            let payload = get("test")?;
            let test = match (payload.split_once(':'), a.kind) {
                (None, AttributeKind::Categorical) if payload == "multiway" => Test::Multiway,
                (Some(("threshold", t)), AttributeKind::Real) => {
                    Test::Threshold(t.parse().map_err(|_| lines.err(format!("invalid threshold `{t}`")))?)
                }
                (Some(("partition", labels)), AttributeKind::Categorical) => {
                    let mut mask = 0u64;
                    for lab in labels.split(',') {
                        let v = a
                            .categories
                            .iter()
                            .position(|c| c == lab)
                            .ok_or_else(|| lines.err(format!("unknown category `{lab}`")))?;
                        mask |= 1 << v;
                    }
                    let p = Partition::new(mask, a.n_values());
                    if p.is_trivial() {
                        return Err(lines.err("partition must leave both sides non-empty"));
                    }
                    Test::Partition(p)
                }
                _ => return Err(lines.err(format!("test `{payload}` does not fit attribute `{name}`"))),
            };
            let expected = edge_labels(&test, a);
            if get("edges")? != expected.join(",") {
                return Err(lines.err(format!("edges must be `{}`", expected.join(","))));
            }
            let children = (0..expected.len())
                .map(|_| read_node(lines, schema, next_id))
                .collect::<Result<Vec<_>>>()?;
            Ok(TreeNode::Internal { attr, test, children })
        }
        _ => Err(lines.err("node kind must be `leaf` or `internal`")),
    }
}
