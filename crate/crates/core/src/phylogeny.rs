//! Separation times, UPGMA trees, calibration to calendar years, and Newick
//! output.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;

pub const DEFAULT_SCALE: f64 = 1000.0;
pub const DEFAULT_ROOT_YEAR: i32 = 650;
pub const DEFAULT_COLLECTION_YEAR: i32 = 2010;

/// Human-readable statement of the distance-to-time rule, for output metadata.
pub const TIME_RULE: &str = "T = -scale * ln(1 - D)";

/// Pairwise separation times derived from lexical distances.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationTimeMatrix {
    times: DistanceMatrix,
    scale: f64,
}

impl SeparationTimeMatrix {
    pub fn matrix(&self) -> &DistanceMatrix {
        &self.times
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn into_matrix(self) -> DistanceMatrix {
        self.times
    }
}

/// Maps every lexical distance D to `-scale * ln(1 - D)`.
pub fn to_separation_times(m: &DistanceMatrix, scale: f64) -> Result<SeparationTimeMatrix> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::contract(format!(
            "scale must be a positive finite number, got {scale}"
        )));
    }
    for i in 0..m.len() {
        for j in 0..i {
            let d = m.get(i, j);
            if d >= 1.0 {
                return Err(Error::Saturated {
                    a: m.labels()[j].clone(),
                    b: m.labels()[i].clone(),
                    value: d,
                });
            }
        }
    }
    Ok(SeparationTimeMatrix {
        times: m.map(|d| -scale * (-d).ln_1p()),
        scale,
    })
}

#[derive(Debug, Clone, PartialEq)]
struct Node {
    label: Option<String>,
    /// Row of the input matrix, for leaves.
    leaf: Option<usize>,
    children: Option<[usize; 2]>,
    height: f64,
}

/// Rooted, strictly binary tree with node heights; leaves sit at height 0.
///
/// Children of every internal node are stored in canonical order: by the
/// lexicographically smallest leaf label of each subtree.
#[derive(Debug, Clone, PartialEq)]
pub struct PhyloTree {
    nodes: Vec<Node>,
    root: usize,
}

impl PhyloTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.children.is_none()).count()
    }

    pub fn height(&self, node: usize) -> f64 {
        self.nodes[node].height
    }

    pub fn root_height(&self) -> f64 {
        self.nodes[self.root].height
    }

    pub fn children(&self, node: usize) -> Option<[usize; 2]> {
        self.nodes[node].children
    }

    pub fn label(&self, node: usize) -> Option<&str> {
        self.nodes[node].label.as_deref()
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.nodes[node].children.is_none()
    }

    /// Leaf labels ordered by input row.
    pub fn leaf_labels(&self) -> Vec<String> {
        let mut leaves: Vec<(usize, &str)> = self
            .nodes
            .iter()
            .filter_map(|n| Some((n.leaf?, n.label.as_deref()?)))
            .collect();
        leaves.sort();
        leaves.into_iter().map(|(_, l)| l.to_owned()).collect()
    }

    /// Input rows of the leaves under `node`, sorted.
    pub fn leaf_indices(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            match self.nodes[n].children {
                Some([a, b]) => stack.extend([a, b]),
                None => out.extend(self.nodes[n].leaf),
            }
        }
        out.sort_unstable();
        out
    }

    /// Internal node heights in merge order, i.e. the order UPGMA created them.
    pub fn merge_heights(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .filter(|n| n.children.is_some())
            .map(|n| n.height)
            .collect()
    }

    /// Internal nodes as (sorted leaf rows, height) pairs, in creation order.
    pub fn clusters(&self) -> Vec<(Vec<usize>, f64)> {
        (0..self.nodes.len())
            .filter(|&i| !self.is_leaf(i))
            .map(|i| (self.leaf_indices(i), self.height(i)))
            .collect()
    }

    /// Tree-induced distances: twice the height of each pair's lowest common
    /// ancestor, labelled by input row.
    pub fn cophenetic(&self) -> DistanceMatrix {
        let mut m = DistanceMatrix::zeros(self.leaf_labels());
        for node in &self.nodes {
            if let Some([a, b]) = node.children {
                let left = self.leaf_indices(a);
                let right = self.leaf_indices(b);
                for &i in &left {
                    for &j in &right {
                        m.set(i, j, 2.0 * node.height);
                    }
                }
            }
        }
        m
    }

    fn min_label(&self, node: usize) -> &str {
        match self.nodes[node].children {
            Some([a, _]) => self.min_label(a),
            None => self.nodes[node].label.as_deref().unwrap_or(""),
        }
    }

    fn push_internal(&mut self, a: usize, b: usize, height: f64) -> usize {
        let children = if self.min_label(b) < self.min_label(a) {
            [b, a]
        } else {
            [a, b]
        };
        self.nodes.push(Node {
            label: None,
            leaf: None,
            children: Some(children),
            height,
        });
        self.nodes.len() - 1
    }

    /// Newick with branch lengths equal to parent height minus child height.
    pub fn to_newick(&self) -> String {
        self.newick_with(|n| self.nodes[n].height)
    }

    /// Newick without branch lengths.
    pub fn topology(&self) -> String {
        let mut out = String::new();
        self.write_newick(self.root, None::<&dyn Fn(usize) -> f64>, &mut out);
        out.push(';');
        out
    }

    fn newick_with(&self, height: impl Fn(usize) -> f64) -> String {
        let mut out = String::new();
        self.write_newick(self.root, Some(&height), &mut out);
        out.push(';');
        out
    }

    fn write_newick<F: Fn(usize) -> f64 + ?Sized>(&self, node: usize, height: Option<&F>, out: &mut String) {
        match self.nodes[node].children {
            Some(children) => {
                out.push('(');
                for (k, c) in children.into_iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    self.write_newick(c, height, out);
                    if let Some(h) = height {
                        let _ = write!(out, ":{}", branch_length(h(node) - h(c)));
                    }
                }
                out.push(')');
            }
            None => out.push_str(&quote_label(self.nodes[node].label.as_deref().unwrap_or(""))),
        }
    }
}

/// Drops the sign of negative zero so output reads `0` rather than `-0`.
fn branch_length(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn quote_label(label: &str) -> String {
    let plain = !label.is_empty() && !label.chars().any(|c| c.is_whitespace() || "()[]':;,".contains(c));
    if plain {
        label.to_owned()
    } else {
        format!("'{}'", label.replace('\'', "''"))
    }
}

/// Average-linkage (UPGMA) tree over a symmetric matrix.
///
/// Each step merges the pair of clusters with the smallest mean cross-pair
/// distance at half that distance. Exact ties go to the pair whose smaller
/// member row is least, then to the smaller second row. A merge height below
/// a child's height (only possible through rounding) is lifted to it, so
/// heights never decrease towards the root.
pub fn upgma(m: &DistanceMatrix) -> Result<PhyloTree> {
    let n = m.len();
    if n < 2 {
        return Err(Error::TooFew {
            what: "taxa",
            needed: 2,
            got: n,
        });
    }
    let mut tree = PhyloTree {
        nodes: m
            .labels()
            .iter()
            .enumerate()
            .map(|(i, l)| Node {
                label: Some(l.clone()),
                leaf: Some(i),
                children: None,
                height: 0.0,
            })
            .collect(),
        root: 0,
    };

    // slot i holds the cluster whose smallest row is i
    let mut dist: Vec<f64> = (0..n * n).map(|k| m.get(k / n, k % n)).collect();
    let mut size = vec![1usize; n];
    let mut node_of: Vec<usize> = (0..n).collect();
    let mut active: Vec<usize> = (0..n).collect();

    while active.len() > 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for (x, &a) in active.iter().enumerate() {
            for &b in &active[x + 1..] {
                let d = dist[a * n + b];
                if d < best.0 {
                    best = (d, a, b);
                }
            }
        }
        let (d, a, b) = best;
        if !d.is_finite() {
            return Err(Error::contract("non-finite distance in UPGMA input"));
        }
        let (na, nb) = (node_of[a], node_of[b]);
        let height = (d / 2.0).max(tree.nodes[na].height).max(tree.nodes[nb].height);
        node_of[a] = tree.push_internal(na, nb, height);

        let (sa, sb) = (size[a] as f64, size[b] as f64);
        active.retain(|&k| k != b);
        for &k in &active {
            if k != a {
                let v = (sa * dist[a * n + k] + sb * dist[b * n + k]) / (sa + sb);
                dist[a * n + k] = v;
                dist[k * n + a] = v;
            }
        }
        size[a] += size[b];
    }
    tree.root = node_of[active[0]];
    Ok(tree)
}

/// UPGMA over raw rows, rejecting input that is not a symmetric matrix with a
/// zero diagonal as a contract violation.
pub fn upgma_rows(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<PhyloTree> {
    let m = DistanceMatrix::from_rows(labels, rows).map_err(|e| Error::contract(e.to_string()))?;
    upgma(&m)
}

/// Pins the leaves to the collection year and the root to the root year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Calibration {
    collection_year: i32,
    root_year: i32,
}

impl Calibration {
    pub fn new(collection_year: i32, root_year: i32) -> Result<Self> {
        if root_year >= collection_year {
            return Err(Error::InvalidCalibration {
                root: root_year,
                collection: collection_year,
            });
        }
        Ok(Calibration {
            collection_year,
            root_year,
        })
    }

    pub fn collection_year(&self) -> i32 {
        self.collection_year
    }

    pub fn root_year(&self) -> i32 {
        self.root_year
    }
}

impl Default for Calibration {
    fn default() -> Self {
        Calibration {
            collection_year: DEFAULT_COLLECTION_YEAR,
            root_year: DEFAULT_ROOT_YEAR,
        }
    }
}

/// A tree whose nodes carry calendar years (CE, fractional).
#[derive(Debug, Clone, PartialEq)]
pub struct DatedTree {
    tree: PhyloTree,
    calibration: Calibration,
    dates: Vec<f64>,
}

/// Maps heights affinely onto years: height 0 to the collection year, the
/// root height to the root year.
pub fn calibrate(tree: &PhyloTree, calibration: Calibration) -> Result<DatedTree> {
    let top = tree.root_height();
    if top.is_nan() || top <= 0.0 {
        return Err(Error::DegenerateTree);
    }
    let leaf_year = f64::from(calibration.collection_year);
    let span = f64::from(calibration.collection_year - calibration.root_year);
    let dates = tree.nodes.iter().map(|n| leaf_year - span * (n.height / top)).collect();
    Ok(DatedTree {
        tree: tree.clone(),
        calibration,
        dates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeRecord {
    pub id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub children: Option<[usize; 2]>,
    pub height: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub date: Option<f64>,
}

/// Serializable view of a tree: topology, heights and, if calibrated, dates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeDump {
    pub topology: String,
    pub root: usize,
    pub nodes: Vec<NodeRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<Calibration>,
}

impl DatedTree {
    pub fn tree(&self) -> &PhyloTree {
        &self.tree
    }

    pub fn calibration(&self) -> Calibration {
        self.calibration
    }

    pub fn date(&self, node: usize) -> f64 {
        self.dates[node]
    }

    pub fn root_date(&self) -> f64 {
        self.dates[self.tree.root]
    }

    /// Dates of the leaves, ordered by input row.
    pub fn leaf_dates(&self) -> Vec<f64> {
        let mut v: Vec<(usize, f64)> = self
            .tree
            .nodes
            .iter()
            .zip(&self.dates)
            .filter_map(|(n, &d)| Some((n.leaf?, d)))
            .collect();
        v.sort_by_key(|&(i, _)| i);
        v.into_iter().map(|(_, d)| d).collect()
    }

    /// Newick with branch lengths in years.
    pub fn to_newick(&self) -> String {
        self.tree.newick_with(|n| -self.dates[n])
    }

    pub fn dump(&self) -> TreeDump {
        let mut d = self.tree.dump();
        for rec in &mut d.nodes {
            rec.date = Some(self.dates[rec.id]);
        }
        d.calibration = Some(self.calibration);
        d
    }
}

impl PhyloTree {
    pub fn dump(&self) -> TreeDump {
        TreeDump {
            topology: self.topology(),
            root: self.root,
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, n)| NodeRecord {
                    id,
                    label: n.label.clone(),
                    children: n.children,
                    height: n.height,
                    date: None,
                })
                .collect(),
            calibration: None,
        }
    }

    /// Reads a strictly binary Newick tree with branch lengths.
    ///
    /// Node heights are recovered as the root-to-deepest-leaf length minus
    /// each node's depth, so an ultrametric input comes back with leaves at
    /// height zero (up to rounding). Leaf rows follow order of appearance.
    pub fn parse_newick(text: &str) -> Result<PhyloTree> {
        let mut p = NewickParser {
            src: text.trim().as_bytes(),
            pos: 0,
            nodes: Vec::new(),
            depth: Vec::new(),
        };
        let root = p.subtree(0.0)?;
        p.expect(b';')?;
        if p.pos != p.src.len() {
            return Err(p.error("trailing input after ';'"));
        }
        let top = p.depth.iter().copied().fold(0.0, f64::max);
        let mut tree = PhyloTree { nodes: p.nodes, root };
        for (node, depth) in tree.nodes.iter_mut().zip(&p.depth) {
            node.height = if node.children.is_none() {
                0.0
            } else {
                (top - depth).max(0.0)
            };
        }
        Ok(tree)
    }
}

struct NewickParser<'a> {
    src: &'a [u8],
    pos: usize,
    nodes: Vec<Node>,
    depth: Vec<f64>,
}

impl NewickParser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Newick {
            pos: self.pos,
            message: message.to_owned(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {:?}", c as char)))
        }
    }

    fn subtree(&mut self, parent_depth: f64) -> Result<usize> {
        let id = self.nodes.len();
        self.nodes.push(Node {
            label: None,
            leaf: None,
            children: None,
            height: 0.0,
        });
        self.depth.push(parent_depth);
        let mut kids = Vec::new();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            // placeholder depth; fixed once this node's length is known
            loop {
                kids.push(self.subtree(0.0)?);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected ',' or ')'")),
                }
            }
            if kids.len() != 2 {
                return Err(self.error("only strictly binary trees are supported"));
            }
        }
        let label = self.label()?;
        let length = if self.peek() == Some(b':') {
            self.pos += 1;
            self.number()?
        } else {
            0.0
        };
        let depth = parent_depth + length;
        self.depth[id] = depth;
        if kids.is_empty() {
            let label = label.ok_or_else(|| self.error("leaf without a label"))?;
            let row = self.nodes.iter().filter(|n| n.leaf.is_some()).count();
            self.nodes[id].label = Some(label);
            self.nodes[id].leaf = Some(row);
        } else {
            self.nodes[id].children = Some([kids[0], kids[1]]);
            for k in kids {
                self.shift_depth(k, depth);
            }
        }
        Ok(id)
    }

    fn shift_depth(&mut self, node: usize, by: f64) {
        self.depth[node] += by;
        if let Some([a, b]) = self.nodes[node].children {
            self.shift_depth(a, by);
            self.shift_depth(b, by);
        }
    }

    fn label(&mut self) -> Result<Option<String>> {
        if self.peek() == Some(b'\'') {
            self.pos += 1;
            let mut out = Vec::new();
            loop {
                match self.src.get(self.pos) {
                    Some(b'\'') if self.src.get(self.pos + 1) == Some(&b'\'') => {
                        out.push(b'\'');
                        self.pos += 2;
                    }
                    Some(b'\'') => {
                        self.pos += 1;
                        break;
                    }
                    Some(&c) => {
                        out.push(c);
                        self.pos += 1;
                    }
                    None => return Err(self.error("unterminated quoted label")),
                }
            }
            return String::from_utf8(out)
                .map(Some)
                .map_err(|_| self.error("label is not UTF-8"));
        }
        let start = self.pos;
        while let Some(&c) = self.src.get(self.pos) {
            if c.is_ascii_whitespace() || b"()[]':;,".contains(&c) {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .map(|s| Some(s.to_owned()))
            .map_err(|_| self.error("label is not UTF-8"))
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit() || b"+-.eE".contains(c))
        {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("bad branch length"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(labels: &[&str], lower: &[f64]) -> DistanceMatrix {
        DistanceMatrix::from_lower_triangle(labels.iter().map(|s| s.to_string()).collect(), lower).unwrap()
    }

    fn abc() -> DistanceMatrix {
        // d(A,B)=2, d(A,C)=8, d(B,C)=4
        matrix(&["A", "B", "C"], &[2.0, 8.0, 4.0])
    }

    #[test]
    fn separation_time_examples() {
        let t = to_separation_times(&matrix(&["a", "b"], &[0.0]), 1000.0).unwrap();
        assert_eq!(t.matrix().get(0, 1), 0.0);

        let d = 1.0 - (-1.0f64).exp();
        let t = to_separation_times(&matrix(&["a", "b"], &[d]), 1.0).unwrap();
        assert!((t.matrix().get(0, 1) - 1.0).abs() < 1e-15);

        let t = to_separation_times(&matrix(&["a", "b"], &[0.5]), 1000.0).unwrap();
        // -1000 ln 0.5 = 1000 ln 2
        assert!((t.matrix().get(0, 1) - 693.147_180_559_945_3).abs() < 1e-9);
    }

    #[test]
    fn saturated_distance_names_pair() {
        let err = to_separation_times(&matrix(&["a", "b", "c"], &[0.2, 1.0, 0.3]), 1000.0).unwrap_err();
        assert!(
            matches!(err, Error::Saturated { ref a, ref b, .. } if a == "a" && b == "c"),
            "{err}"
        );
    }

    #[test]
    fn bad_scale_rejected() {
        assert!(to_separation_times(&matrix(&["a", "b"], &[0.2]), 0.0).is_err());
        assert!(to_separation_times(&matrix(&["a", "b"], &[0.2]), f64::NAN).is_err());
    }

    #[test]
    fn three_leaf_hand_example() {
        let t = upgma(&abc()).unwrap();
        assert_eq!(t.clusters(), vec![(vec![0, 1], 1.0), (vec![0, 1, 2], 3.0)]);
        assert_eq!(t.to_newick(), "((A:1,B:1):2,C:3);");
    }

    #[test]
    fn two_leaves() {
        let t = upgma(&matrix(&["A", "B"], &[2.0])).unwrap();
        assert_eq!(t.root_height(), 1.0);
        assert_eq!(t.to_newick(), "(A:1,B:1);");
    }

    #[test]
    fn needs_two_taxa() {
        assert!(matches!(
            upgma(&matrix(&["A"], &[])).unwrap_err(),
            Error::TooFew { got: 1, .. }
        ));
    }

    #[test]
    fn asymmetric_rows_are_contract_violation() {
        let err = upgma_rows(vec!["a".into(), "b".into()], vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn ties_merge_lowest_rows_first() {
        // all pairs equidistant: (0,1) first, then (0,1) with 2, then with 3
        let t = upgma(&matrix(&["w", "x", "y", "z"], &[1.0; 6])).unwrap();
        let c = t.clusters();
        assert_eq!(c[0].0, vec![0, 1]);
        assert_eq!(c[1].0, vec![0, 1, 2]);
        assert_eq!(c[2].0, vec![0, 1, 2, 3]);
    }

    #[test]
    fn zero_distance_pairs_merge_first_at_zero() {
        let t = upgma(&matrix(&["a", "b", "c"], &[0.4, 0.0, 0.4])).unwrap();
        assert_eq!(t.clusters()[0], (vec![0, 2], 0.0));
    }

    #[test]
    fn children_ordered_by_smallest_label() {
        let t = upgma(&matrix(&["z", "b", "a"], &[1.0, 5.0, 5.0])).unwrap();
        assert_eq!(t.topology(), "(a,(b,z));");
    }

    #[test]
    fn cophenetic_of_hand_example() {
        let c = upgma(&abc()).unwrap().cophenetic();
        assert_eq!(c.get(0, 1), 2.0);
        assert_eq!(c.get(0, 2), 6.0);
        assert_eq!(c.get(1, 2), 6.0);
    }

    #[test]
    fn calibration_midpoint() {
        let t = upgma(&matrix(&["a", "b", "c"], &[2.0, 4.0, 4.0])).unwrap();
        let dated = calibrate(&t, Calibration::default()).unwrap();
        assert_eq!(dated.root_date(), 650.0);
        assert!(dated.leaf_dates().iter().all(|&d| d == 2010.0));
        let inner = t.clusters().iter().position(|c| c.0 == vec![0, 1]).unwrap();
        let id = (0..t.node_count()).filter(|&i| !t.is_leaf(i)).nth(inner).unwrap();
        assert_eq!(dated.date(id), 1330.0);
    }

    #[test]
    fn calibration_rejects_degenerate_inputs() {
        let flat = upgma(&matrix(&["a", "b"], &[0.0])).unwrap();
        assert!(matches!(
            calibrate(&flat, Calibration::default()).unwrap_err(),
            Error::DegenerateTree
        ));
        assert!(matches!(
            Calibration::new(2010, 2200).unwrap_err(),
            Error::InvalidCalibration { root: 2200, .. }
        ));
        assert!(Calibration::new(2010, 2010).is_err());
    }

    #[test]
    fn dated_newick_uses_years() {
        let dated = calibrate(&upgma(&abc()).unwrap(), Calibration::new(2000, 800).unwrap()).unwrap();
        assert_eq!(dated.to_newick(), "((A:400,B:400):800,C:1200);");
    }

    #[test]
    fn labels_with_specials_are_quoted() {
        let t = upgma(&matrix(&["Merina (Antananarivo)", "it's"], &[1.0])).unwrap();
        let s = t.to_newick();
        assert_eq!(s, "('Merina (Antananarivo)':0.5,'it''s':0.5);");
        let back = PhyloTree::parse_newick(&s).unwrap();
        assert_eq!(back.leaf_labels(), vec!["Merina (Antananarivo)", "it's"]);
    }

    #[test]
    fn newick_reparse_preserves_cophenetic() {
        let t = upgma(&abc()).unwrap();
        let back = PhyloTree::parse_newick(&t.to_newick()).unwrap();
        assert_eq!(back.cophenetic(), t.cophenetic());
        assert_eq!(back.to_newick(), t.to_newick());
    }

    #[test]
    fn newick_errors() {
        assert!(PhyloTree::parse_newick("(A:1,B:1)").is_err());
        assert!(PhyloTree::parse_newick("(A:1,B:1,C:1);").is_err());
        assert!(PhyloTree::parse_newick("(A:1,:1);").is_err());
        assert!(PhyloTree::parse_newick("(A:x,B:1);").is_err());
        assert!(PhyloTree::parse_newick("(A:1,B:1);x").is_err());
    }

    #[test]
    fn dump_carries_dates() {
        let dated = calibrate(&upgma(&abc()).unwrap(), Calibration::default()).unwrap();
        let d = dated.dump();
        assert_eq!(d.topology, "((A,B),C);");
        assert_eq!(d.nodes[d.root].date, Some(650.0));
        assert_eq!(d.nodes.iter().filter(|n| n.label.is_some()).count(), 3);
    }
}
