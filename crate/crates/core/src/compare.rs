//! Structural similarity of two trees grown on the same schema.
//!
//! `q = B_eq / B`, where `B` counts the nodes of the reference tree and
//! `B_eq` counts reference nodes reproduced by the candidate. Both trees are
//! walked together from the roots; the walk only descends below a pair of
//! matching nodes, so a divergent test discards the whole subtree beneath it.

use std::fmt::Write as _;

use crate::dataset::Schema;
use crate::error::{Error, Result};
use crate::tree::{edge_labels, Test, TreeNode};
use crate::tree_file::{format_real, TreeFile};

/// Shallow equality: same leaf label, or same attribute and test.
/// Thresholds compare by their serialized form, partitions by canonical mask.
pub fn node_equal(a: &TreeNode, b: &TreeNode) -> bool {
    match (a, b) {
        (TreeNode::Leaf { label: x }, TreeNode::Leaf { label: y }) => x == y,
        (
            TreeNode::Internal { attr: a1, test: t1, .. },
            TreeNode::Internal { attr: a2, test: t2, .. },
        ) => a1 == a2 && test_equal(t1, t2),
        _ => false,
    }
}

fn test_equal(a: &Test, b: &Test) -> bool {
    match (a, b) {
        (Test::Multiway, Test::Multiway) => true,
        (Test::Threshold(x), Test::Threshold(y)) => format_real(*x) == format_real(*y),
        (Test::Partition(p), Test::Partition(q)) => p.canonical() == q.canonical(),
        _ => false,
    }
}

/// The parts of a node that `node_equal` looks at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeSummary {
    Leaf { label: usize },
    Internal { attr: usize, test: Test },
}

impl NodeSummary {
    fn of(node: &TreeNode) -> Self {
        match node {
            TreeNode::Leaf { label } => NodeSummary::Leaf { label: *label },
            TreeNode::Internal { attr, test, .. } => NodeSummary::Internal { attr: *attr, test: *test },
        }
    }

    fn describe(&self, schema: Option<&Schema>) -> String {
        match (self, schema) {
            (NodeSummary::Leaf { label }, Some(s)) => format!("leaf {}", s.class_labels[*label]),
            (NodeSummary::Leaf { label }, None) => format!("leaf #{label}"),
            (NodeSummary::Internal { attr, test }, _) => {
                let name = schema.map_or_else(|| format!("#{attr}"), |s| s.attributes[*attr].name.clone());
                let payload = match test {
                    Test::Multiway => "multiway".to_string(),
                    Test::Threshold(t) => format!("< {}", format_real(*t)),
                    Test::Partition(p) => match schema {
                        Some(s) => {
                            let labels: Vec<&str> =
                                p.canonical().first().map(|v| s.attributes[*attr].categories[v].as_str()).collect();
                            format!("in {{{}}}", labels.join(","))
                        }
                        None => format!("mask {:#b}", p.canonical().mask()),
                    },
                };
                format!("{name} {payload}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    /// Branch indices from the root to the mismatched pair.
    pub path: Vec<usize>,
    pub reference: NodeSummary,
    pub candidate: NodeSummary,
    /// Nodes in the reference subtree rooted here.
    pub lost: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub b: usize,
    pub b_eq: usize,
    pub mismatches: Vec<Mismatch>,
}

impl ComparisonReport {
    pub fn q(&self) -> f64 {
        self.b_eq as f64 / self.b as f64
    }

    pub fn is_equal(&self) -> bool {
        self.b_eq == self.b
    }

    /// Report text; with a schema, paths and payloads use names.
    pub fn render(&self, reference: &TreeNode, schema: Option<&Schema>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "B {}", self.b);
        let _ = writeln!(out, "B_eq {}", self.b_eq);
        let _ = writeln!(out, "q {:.6}", self.q());
        for m in &self.mismatches {
            let _ = writeln!(
                out,
                "mismatch {}: reference {} vs candidate {} ({} node{} unmatched)",
                path_text(reference, &m.path, schema),
                m.reference.describe(schema),
                m.candidate.describe(schema),
                m.lost,
                if m.lost == 1 { "" } else { "s" }
            );
        }
        out
    }
}

/// `/attr=edge/...` along a path of branch indices; `/` for the root.
pub fn path_text(root: &TreeNode, path: &[usize], schema: Option<&Schema>) -> String {
    if path.is_empty() {
        return "/".into();
    }
    let mut out = String::new();
    let mut node = root;
    for &branch in path {
        let TreeNode::Internal { attr, test, children } = node else {
            panic!("path runs past a leaf");
        };
        match schema {
            Some(s) => {
                let a = &s.attributes[*attr];
                let _ = write!(out, "/{}={}", a.name, edge_labels(test, a)[branch]);
            }
            None => {
                let _ = write!(out, "/#{attr}={branch}");
            }
        }
        node = &children[branch];
    }
    out
}

pub fn q_tree(reference: &TreeNode, candidate: &TreeNode) -> ComparisonReport {
    let mut report = ComparisonReport {
        b: reference.node_count(),
        b_eq: 0,
        mismatches: Vec::new(),
    };
    let mut path = Vec::new();
    walk(reference, candidate, &mut path, &mut report);
    report
}

fn walk(r: &TreeNode, c: &TreeNode, path: &mut Vec<usize>, report: &mut ComparisonReport) {
    if !node_equal(r, c) {
        report.mismatches.push(Mismatch {
            path: path.clone(),
            reference: NodeSummary::of(r),
            candidate: NodeSummary::of(c),
            lost: r.node_count(),
        });
        return;
    }
    report.b_eq += 1;
    if let (TreeNode::Internal { children: rc, .. }, TreeNode::Internal { children: cc, .. }) = (r, c) {
        // Equal tests imply equal edge labels, child for child.
        for (i, (rn, cn)) in rc.iter().zip(cc).enumerate() {
            path.push(i);
            walk(rn, cn, path, report);
            path.pop();
        }
    }
}

/// Compares two tree files, refusing trees built on different schemas.
pub fn compare_files(reference: &TreeFile, candidate: &TreeFile) -> Result<ComparisonReport> {
    if reference.schema != candidate.schema {
        return Err(Error::SchemaMismatch("the two trees were built on different schemas".into()));
    }
    Ok(q_tree(&reference.root, &candidate.root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::Partition;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn leaf(label: usize) -> TreeNode {
        TreeNode::Leaf { label }
    }

    fn split(attr: usize, children: Vec<TreeNode>) -> TreeNode {
        TreeNode::Internal {
            attr,
            test: Test::Multiway,
            children,
        }
    }

    fn seven() -> TreeNode {
        split(0, vec![split(1, vec![leaf(0), leaf(1)]), split(1, vec![leaf(1), leaf(0)])])
    }

    #[test]
    fn node_equal_examples() {
        assert!(node_equal(&leaf(1), &leaf(1)));
        assert!(!node_equal(&leaf(1), &leaf(0)));
        let t = |x: f64| TreeNode::Internal {
            attr: 2,
            test: Test::Threshold(x),
            children: vec![leaf(0), leaf(1)],
        };
        assert!(node_equal(&t(2.5), &t(2.5)));
        assert!(!node_equal(&t(2.5), &t(2.5000000000000004)));
        assert!(!node_equal(&leaf(0), &t(2.5)));
        let p = |m: u64| TreeNode::Internal {
            attr: 0,
            test: Test::Partition(Partition::new(m, 3)),
            children: vec![leaf(0), leaf(1)],
        };
        assert!(node_equal(&p(0b001), &p(0b110)));
        assert!(!node_equal(&p(0b001), &p(0b011)));
        // children are not part of shallow equality
        assert!(node_equal(&split(0, vec![leaf(0)]), &split(0, vec![leaf(1)])));
    }

    #[test]
    fn one_leaf_off_in_seven() {
        let a = seven();
        let b = split(0, vec![split(1, vec![leaf(0), leaf(1)]), split(1, vec![leaf(1), leaf(1)])]);
        let r = q_tree(&a, &b);
        assert_eq!((r.b, r.b_eq), (7, 6));
        assert_eq!(r.q(), 6.0 / 7.0);
        assert_eq!(r.mismatches.len(), 1);
        assert_eq!(r.mismatches[0].path, vec![1, 1]);
        assert_eq!(r.render(&a, None), "B 7\nB_eq 6\nq 0.857143\nmismatch /#0=1/#1=1: reference leaf #0 vs candidate leaf #1 (1 node unmatched)\n");
    }

    #[test]
    fn root_mismatch_scores_zero() {
        let r = q_tree(&seven(), &split(1, vec![leaf(0), leaf(1)]));
        assert_eq!((r.b, r.b_eq), (7, 0));
        assert_eq!(r.mismatches[0].lost, 7);
    }

    #[test]
    fn denominator_is_the_reference() {
        let r = q_tree(&leaf(0), &seven());
        assert_eq!((r.b, r.b_eq), (1, 0));
        let r = q_tree(&split(0, vec![leaf(0), leaf(1)]), &seven());
        assert_eq!((r.b, r.b_eq), (3, 1));
    }

    fn arb_tree() -> impl Strategy<Value = TreeNode> {
        let leaf = (0usize..2).prop_map(|label| TreeNode::Leaf { label });
        leaf.prop_recursive(3, 20, 3, |inner| {
            // attribute `a` has `a + 2` categories, as in a real schema
            (0usize..2, proptest::collection::vec(inner, 3)).prop_map(|(attr, mut children)| {
                children.truncate(attr + 2);
                TreeNode::Internal {
                    attr,
                    test: Test::Multiway,
                    children,
                }
            })
        })
    }

    /// Every node keyed by its branch path.
    fn path_map(node: &TreeNode, path: Vec<usize>, out: &mut HashMap<Vec<usize>, TreeNode>) {
        out.insert(path.clone(), node.clone());
        if let TreeNode::Internal { children, .. } = node {
            for (i, c) in children.iter().enumerate() {
                let mut p = path.clone();
                p.push(i);
                path_map(c, p, out);
            }
        }
    }

    /// A reference node counts when it and every ancestor match the candidate
    /// node at the same path.
    fn brute_force_b_eq(r: &TreeNode, c: &TreeNode) -> usize {
        let (mut rm, mut cm) = (HashMap::new(), HashMap::new());
        path_map(r, vec![], &mut rm);
        path_map(c, vec![], &mut cm);
        rm.keys()
            .filter(|p| {
                (0..=p.len()).all(|k| {
                    let prefix = &p[..k];
                    cm.get(prefix).is_some_and(|cn| node_equal(&rm[prefix], cn))
                })
            })
            .count()
    }

    proptest! {
        #[test]
        fn traversal_matches_path_sets(a in arb_tree(), b in arb_tree()) {
            let r = q_tree(&a, &b);
            prop_assert_eq!(r.b_eq, brute_force_b_eq(&a, &b));
            prop_assert!(r.b_eq <= r.b && r.b >= 1);
            prop_assert_eq!(r.b_eq + r.mismatches.iter().map(|m| m.lost).sum::<usize>(), r.b);
        }

        #[test]
        fn self_similarity_is_one(a in arb_tree()) {
            let r = q_tree(&a, &a);
            prop_assert_eq!(r.q(), 1.0);
            prop_assert!(r.mismatches.is_empty());
        }
    }
}
