use std::fmt::Write as _;

use petgraph::algo::is_isomorphic;
use petgraph::graph::UnGraph;
use serde::Serialize;

use super::blowup::ResolutionRecord;

/// Intersection graph of the curves of self-intersection -2.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DynkinGraph {
    /// Record indices of the nodes.
    pub nodes: Vec<usize>,
    pub names: Vec<String>,
    /// Node-position pairs `(i, j)`, `i < j`, of intersecting curves.
    pub edges: Vec<(usize, usize)>,
    /// Matched template, or `unclassified`.
    pub label: String,
}

fn graph(n: usize, edges: &[(usize, usize)]) -> UnGraph<(), ()> {
    let mut g = UnGraph::new_undirected();
    let idx: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for &(a, b) in edges {
        g.add_edge(idx[a], idx[b], ());
    }
    g
}

fn path(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i - 1, i)).collect()
}

/// Star with a center and arms of the given lengths.
fn star(arms: &[usize]) -> (usize, Vec<(usize, usize)>) {
    let mut edges = Vec::new();
    let mut next = 1;
    for &len in arms {
        let mut prev = 0;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    (next, edges)
}

/// Affine Dynkin diagrams `(label, node count, edges)` with simple edges:
/// `A_n^(1)` for `2 ≤ n ≤ 8`, `D_n^(1)` for `4 ≤ n ≤ 8`, and `E_6^(1)`, `E_7^(1)`, `E_8^(1)`.
pub fn affine_templates() -> Vec<(String, usize, Vec<(usize, usize)>)> {
    let mut out = Vec::new();
    for n in 2..=8 {
        let mut e = path(n + 1);
        e.push((n, 0));
        out.push((format!("A{n}^(1)"), n + 1, e));
    }
    out.push(("D4^(1)".into(), 5, vec![(0, 1), (0, 2), (0, 3), (0, 4)]));
    for n in 5..=8 {
        // spine of n-1 nodes, two leaves at each end
        let mut e = path(n - 1);
        e.extend([(1, n - 1), (n - 3, n)]);
        e.push((0, 1));
        e.retain(|&(a, b)| a != b);
        e.sort();
        e.dedup();
        out.push((format!("D{n}^(1)"), n + 1, e));
    }
    for (label, arms) in [("E6^(1)", [2, 2, 2]), ("E7^(1)", [1, 3, 3]), ("E8^(1)", [1, 2, 5])] {
        let (n, e) = star(&arms);
        out.push((label.into(), n, e));
    }
    out
}

/// Classifies the -2 curves of a record against the affine templates.
pub fn dynkin(rec: &ResolutionRecord) -> DynkinGraph {
    let nodes = rec.curves_with_square(-2);
    let names = nodes.iter().map(|&i| rec.curves[i].name.clone()).collect();
    let mut edges = Vec::new();
    let mut double = false;
    for a in 0..nodes.len() {
        for b in a + 1..nodes.len() {
            let m = rec.matrix[nodes[a]][nodes[b]];
            if m > 0 {
                edges.push((a, b));
                double |= m > 1;
            }
        }
    }
    let label = if nodes.len() == 2 && edges.len() == 1 && rec.matrix[nodes[0]][nodes[1]] == 2 {
        "A1^(1)".to_string()
    } else if double || nodes.is_empty() {
        "unclassified".to_string()
    } else {
        let g = graph(nodes.len(), &edges);
        affine_templates()
            .into_iter()
            .find(|(_, n, e)| *n == nodes.len() && e.len() == edges.len() && is_isomorphic(&g, &graph(*n, e)))
            .map(|(l, _, _)| l)
            .unwrap_or_else(|| "unclassified".into())
    };
    DynkinGraph { nodes, names, edges, label }
}

impl DynkinGraph {
    /// Graphviz text, one node per curve labelled by its record name.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph dynkin {\n");
        let _ = writeln!(s, "  label=\"{}\";", self.label);
        for (i, n) in self.names.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{n}\"];");
        }
        for (a, b) in &self.edges {
            let _ = writeln!(s, "  n{a} -- n{b};");
        }
        s.push_str("}\n");
        s
    }
}
