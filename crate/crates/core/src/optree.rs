//! Construction trees: leaves are base graphs, inner nodes substitute or
//! glue. A tree both *is* a membership witness for the corresponding
//! closure class (which operations appear determines the class) and
//! realizes a concrete graph with deterministic hierarchical vertex ids.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{graph_from_text, FormatError, Graph, GraphError, VertexId, VertexSet};
use crate::oracle;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpTree {
    /// A graph taken directly from the base class named by `class_tag`.
    Leaf { graph: Graph, class_tag: String },
    /// Simultaneous substitution: every base vertex is replaced by its
    /// child's realization, joined completely along base edges.
    Substitute { base: Graph, children: BTreeMap<VertexId, OpTree> },
    /// Union of the two realizations, which must overlap exactly on
    /// `shared`, a clique in both.
    CliqueGlue { left: Box<OpTree>, right: Box<OpTree>, shared: VertexSet },
    /// Union of the two realizations overlapping on at most k vertices.
    KGlue { k: u32, left: Box<OpTree>, right: Box<OpTree>, shared: VertexSet },
}

impl OpTree {
    pub fn leaf(graph: Graph, class_tag: &str) -> OpTree {
        OpTree::Leaf { graph, class_tag: class_tag.to_string() }
    }

    pub fn substitute(base: Graph, children: Vec<(VertexId, OpTree)>) -> OpTree {
        OpTree::Substitute { base, children: children.into_iter().collect() }
    }

    pub fn clique_glue(left: OpTree, right: OpTree, shared: VertexSet) -> OpTree {
        OpTree::CliqueGlue { left: Box::new(left), right: Box::new(right), shared }
    }

    pub fn k_glue(k: u32, left: OpTree, right: OpTree, shared: VertexSet) -> OpTree {
        OpTree::KGlue { k, left: Box::new(left), right: Box::new(right), shared }
    }

    /// Vertex ids the tree realizes, without building the graph.
    pub fn vertex_set(&self) -> VertexSet {
        match self {
            OpTree::Leaf { graph, .. } => graph.vertex_set(),
            OpTree::Substitute { children, .. } => {
                let mut out = VertexSet::new();
                for (v, child) in children {
                    for w in child.vertex_set() {
                        out.insert(VertexId::scoped(v.as_str(), w.as_str()));
                    }
                }
                out
            }
            OpTree::CliqueGlue { left, right, .. } | OpTree::KGlue { left, right, .. } => {
                let mut out = left.vertex_set();
                out.extend(right.vertex_set());
                out
            }
        }
    }

    /// Largest k on any KGlue node, None when no KGlue appears.
    pub fn max_glue_width(&self) -> Option<u32> {
        match self {
            OpTree::Leaf { .. } => None,
            OpTree::Substitute { children, .. } => {
                children.values().filter_map(|c| c.max_glue_width()).max()
            }
            OpTree::CliqueGlue { left, right, .. } => {
                left.max_glue_width().max(right.max_glue_width())
            }
            OpTree::KGlue { k, left, right, .. } => Some(
                (*k).max(left.max_glue_width().unwrap_or(0))
                    .max(right.max_glue_width().unwrap_or(0)),
            ),
        }
    }
}

/// One violated invariant, located by a /-separated path of `left`,
/// `right` and `child(v)` steps from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub path: String,
    pub invariant: &'static str,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: [{}] {}", self.path, self.invariant, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub issues: Vec<Issue>,
}

impl Diagnostics {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            writeln!(f, "{issue}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("tree fails validation with {} issue(s), first: {}", .0.issues.len(),
            .0.issues.first().map(|i| i.to_string()).unwrap_or_default())]
    Invalid(Diagnostics),
    #[error("operation does not accept {0} nodes")]
    UnsupportedNode(&'static str),
    #[error("leaves carry distinct class tags {0:?} and {1:?}")]
    MixedLeafClasses(String, String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Check every structural invariant bottom-up. Empty output means the
/// tree is legal and `realize` will succeed.
pub fn validate(t: &OpTree) -> Diagnostics {
    let mut diags = Diagnostics::default();
    build(t, "/", &mut diags);
    diags
}

/// The graph the tree denotes. Substitution children live in fresh
/// `basevertex/...` namespaces; glued operands share ids literally.
pub fn realize(t: &OpTree) -> Result<Graph, TreeError> {
    let mut diags = Diagnostics::default();
    let built = build(t, "/", &mut diags);
    if !diags.is_empty() {
        return Err(TreeError::Invalid(diags));
    }
    Ok(built.expect("clean diagnostics imply a built graph"))
}

pub(crate) fn join_path(path: &str, seg: &str) -> String {
    if path == "/" {
        format!("/{seg}")
    } else {
        format!("{path}/{seg}")
    }
}

fn push_issue(diags: &mut Diagnostics, path: &str, invariant: &'static str, message: String) {
    diags.issues.push(Issue { path: path.to_string(), invariant, message });
}

fn build(t: &OpTree, path: &str, diags: &mut Diagnostics) -> Option<Graph> {
    match t {
        OpTree::Leaf { graph, class_tag } => {
            if class_tag.is_empty() {
                push_issue(diags, path, "leaf-class-empty", "leaf has no class tag".to_string());
            }
            Some(graph.clone())
        }
        OpTree::Substitute { base, children } => {
            if base.is_empty() {
                push_issue(diags, path, "empty-base", "substitution base has no vertices".to_string());
                return None;
            }
            let mut complete = true;
            for v in base.vertices() {
                if !children.contains_key(v) {
                    push_issue(diags, path, "missing-child", format!("base vertex {v} has no child"));
                    complete = false;
                }
            }
            for v in children.keys() {
                if !base.has_vertex(v) {
                    push_issue(diags, path, "unknown-child", format!("child keyed by {v}, not a base vertex"));
                    complete = false;
                }
            }
            if !complete {
                return None;
            }
            let mut scoped: BTreeMap<VertexId, Graph> = BTreeMap::new();
            for (v, child) in children {
                let child_path = join_path(path, &format!("child({v})"));
                let g = build(child, &child_path, diags)?;
                if g.is_empty() {
                    push_issue(diags, &child_path, "empty-child", format!("child of base vertex {v} realizes no vertices"));
                }
                scoped.insert(v.clone(), g.scoped(v.as_str()));
            }
            // Scoping with distinct prefixes almost always separates the
            // children; ids containing '/' can still collide, so check.
            let mut union = Graph::empty();
            for g in scoped.values() {
                match union.disjoint_union(g) {
                    Ok(u) => union = u,
                    Err(GraphError::UnionOverlap(v)) => {
                        push_issue(diags, path, "child-overlap", format!("vertex {v} realized by two children"));
                        return None;
                    }
                    Err(e) => unreachable!("scoped union can only overlap: {e}"),
                }
            }
            let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
            for (u, w) in base.edges() {
                for a in scoped[u].vertices() {
                    for b in scoped[w].vertices() {
                        edges.push((a.clone(), b.clone()));
                    }
                }
            }
            let g = Graph::new(union.vertices().cloned(), edges.into_iter())
                .expect("join edges connect existing vertices");
            Some(merge_graphs(&union, &g))
        }
        OpTree::CliqueGlue { left, right, shared } => {
            glue_node(left, right, shared, None, path, diags)
        }
        OpTree::KGlue { k, left, right, shared } => {
            if *k == 0 {
                push_issue(diags, path, "k-not-positive", "gluing width k must be at least 1".to_string());
            }
            glue_node(left, right, shared, Some(*k), path, diags)
        }
    }
}

fn glue_node(
    left: &OpTree,
    right: &OpTree,
    shared: &VertexSet,
    k: Option<u32>,
    path: &str,
    diags: &mut Diagnostics,
) -> Option<Graph> {
    let gl = build(left, &join_path(path, "left"), diags);
    let gr = build(right, &join_path(path, "right"), diags);
    let (gl, gr) = (gl?, gr?);
    let (vl, vr) = (gl.vertex_set(), gr.vertex_set());
    if vl.is_subset(&vr) || vr.is_subset(&vl) {
        push_issue(diags, path, "sides-nested", "operand vertex sets must be inclusion-wise incomparable".to_string());
    }
    let inter: VertexSet = vl.intersection(&vr).cloned().collect();
    if &inter != shared {
        push_issue(
            diags,
            path,
            "shared-mismatch",
            format!("declared shared set has {} vertices, actual overlap has {}", shared.len(), inter.len()),
        );
    } else {
        let il = gl.induced_subgraph(shared).expect("shared lies in both sides");
        let ir = gr.induced_subgraph(shared).expect("shared lies in both sides");
        if il != ir {
            push_issue(diags, path, "shared-induced-differs", "operands disagree on edges inside the shared set".to_string());
        }
        match k {
            None => {
                if !il.is_complete() || !ir.is_complete() {
                    push_issue(diags, path, "shared-not-clique", "shared set is not a clique on both sides".to_string());
                }
            }
            Some(k) => {
                if shared.len() as u64 > u64::from(k) {
                    push_issue(
                        diags,
                        path,
                        "shared-exceeds-k",
                        format!("|shared| = {} exceeds k = {k}", shared.len()),
                    );
                }
            }
        }
    }
    Some(merge_graphs(&gl, &gr))
}

/// Union of vertices and edges; shared ids coincide literally.
fn merge_graphs(a: &Graph, b: &Graph) -> Graph {
    let vertices: VertexSet = a.vertex_set().union(&b.vertex_set()).cloned().collect();
    let edges = a
        .edges()
        .chain(b.edges())
        .map(|(u, v)| (u.clone(), v.clone()));
    Graph::new(vertices.into_iter(), edges).expect("operand graphs are valid")
}

/// Depth of this representation: -1 for the empty leaf, 0 for other
/// leaves; a substitution adds one level except through isolated base
/// vertices, which splice their child in at the same level (this is
/// what makes chained disjoint unions depth-neutral).
pub fn substitution_depth(t: &OpTree) -> Result<i64, TreeError> {
    match t {
        OpTree::Leaf { graph, .. } => Ok(if graph.is_empty() { -1 } else { 0 }),
        OpTree::Substitute { base, children } => {
            let mut depth = -1;
            for (v, child) in children {
                let d = substitution_depth(child)?;
                let step = if base.degree(v) == 0 { d } else { d + 1 };
                depth = depth.max(step);
            }
            Ok(depth)
        }
        OpTree::CliqueGlue { .. } => Err(TreeError::UnsupportedNode("CliqueGlue")),
        OpTree::KGlue { .. } => Err(TreeError::UnsupportedNode("KGlue")),
    }
}

/// Clique number computed on the tree: leaves ask the search oracle,
/// substitution is a max-weight clique of the base weighted by child
/// clique numbers, and gluing takes the max of the sides (no clique
/// straddles a glue cut, because the off-shared parts are anti-complete).
pub fn tree_clique_number(t: &OpTree) -> u64 {
    match t {
        OpTree::Leaf { graph, .. } => u64::from(oracle::clique_number(graph)),
        OpTree::Substitute { base, children } => {
            let weights: BTreeMap<VertexId, u64> = children
                .iter()
                .map(|(v, c)| (v.clone(), tree_clique_number(c)))
                .collect();
            oracle::max_weight_clique(base, &weights)
        }
        OpTree::CliqueGlue { left, right, .. } | OpTree::KGlue { left, right, .. } => {
            tree_clique_number(left).max(tree_clique_number(right))
        }
    }
}

/// Rewrite a Leaf/CliqueGlue/KGlue tree so no CliqueGlue sits above a
/// KGlue, preserving the realized graph vertex-for-vertex. Clique glues
/// sink into whichever glue side contains their shared clique and merge
/// into single leaves at the bottom; a clique glue whose shared set is
/// one full operand collapses to the other operand.
pub fn normalize_glue_order(t: &OpTree) -> Result<OpTree, TreeError> {
    uniform_leaf_tag(t)?;
    let diags = validate(t);
    if !diags.is_empty() {
        return Err(TreeError::Invalid(diags));
    }
    normalize(t)
}

fn uniform_leaf_tag(t: &OpTree) -> Result<Option<&str>, TreeError> {
    match t {
        OpTree::Leaf { class_tag, .. } => Ok(Some(class_tag)),
        OpTree::Substitute { .. } => Err(TreeError::UnsupportedNode("Substitute")),
        OpTree::CliqueGlue { left, right, .. } | OpTree::KGlue { left, right, .. } => {
            match (uniform_leaf_tag(left)?, uniform_leaf_tag(right)?) {
                (Some(a), Some(b)) if a != b => {
                    Err(TreeError::MixedLeafClasses(a.to_string(), b.to_string()))
                }
                (a, b) => Ok(a.or(b)),
            }
        }
    }
}

fn normalize(t: &OpTree) -> Result<OpTree, TreeError> {
    match t {
        OpTree::Leaf { .. } => Ok(t.clone()),
        OpTree::KGlue { k, left, right, shared } => Ok(OpTree::k_glue(
            *k,
            normalize(left)?,
            normalize(right)?,
            shared.clone(),
        )),
        OpTree::CliqueGlue { left, right, shared } => {
            let l = normalize(left)?;
            let r = normalize(right)?;
            push_clique_glue(l, r, shared)
        }
        OpTree::Substitute { .. } => Err(TreeError::UnsupportedNode("Substitute")),
    }
}

/// Sink CliqueGlue(a, b, shared) below any KGlue roots. Both operands
/// are already normalized. The shared set is a clique of each side, so
/// it cannot straddle a KGlue cut; descending one side per step
/// terminates at a leaf-leaf merge or an operand collapse.
fn push_clique_glue(a: OpTree, b: OpTree, shared: &VertexSet) -> Result<OpTree, TreeError> {
    if &a.vertex_set() == shared {
        return Ok(b);
    }
    if &b.vertex_set() == shared {
        return Ok(a);
    }
    if let OpTree::KGlue { k, left, right, shared: s } = a {
        return if shared.is_subset(&left.vertex_set()) {
            Ok(OpTree::k_glue(k, push_clique_glue(*left, b, shared)?, *right, s))
        } else if shared.is_subset(&right.vertex_set()) {
            Ok(OpTree::k_glue(k, *left, push_clique_glue(*right, b, shared)?, s))
        } else {
            Err(TreeError::Internal(
                "shared clique straddles a glue cut".to_string(),
            ))
        };
    }
    if let OpTree::KGlue { k, left, right, shared: s } = b {
        return if shared.is_subset(&left.vertex_set()) {
            Ok(OpTree::k_glue(k, push_clique_glue(*left, a, shared)?, *right, s))
        } else if shared.is_subset(&right.vertex_set()) {
            Ok(OpTree::k_glue(k, *left, push_clique_glue(*right, a, shared)?, s))
        } else {
            Err(TreeError::Internal(
                "shared clique straddles a glue cut".to_string(),
            ))
        };
    }
    match (a, b) {
        (OpTree::Leaf { graph: ga, class_tag }, OpTree::Leaf { graph: gb, .. }) => {
            Ok(OpTree::Leaf { graph: merge_graphs(&ga, &gb), class_tag })
        }
        _ => Err(TreeError::Internal("normalized operand is neither leaf nor k-glue".to_string())),
    }
}

/// Split along minimum vertex cutsets of size at most k until every
/// piece is complete or has no such cutset, returning a KGlue tree that
/// realizes `g` exactly. Leaves carry the tag "atom".
pub fn decompose_small_cutsets(g: &Graph, k: u32) -> OpTree {
    assert!(k >= 1, "cut width must be positive");
    assert!(!g.is_empty(), "cannot decompose the empty graph");
    let found = oracle::min_vertex_cutset(g, k);
    if !found.found {
        return OpTree::leaf(g.clone(), "atom");
    }
    let (side_a, side_b) = found.sides.expect("found cutsets report sides");
    let left: VertexSet = side_a.union(&found.cutset).cloned().collect();
    let right: VertexSet = side_b.union(&found.cutset).cloned().collect();
    let gl = g.induced_subgraph(&left).expect("cut sides are vertices of g");
    let gr = g.induced_subgraph(&right).expect("cut sides are vertices of g");
    OpTree::k_glue(
        k,
        decompose_small_cutsets(&gl, k),
        decompose_small_cutsets(&gr, k),
        found.cutset,
    )
}

// ---------------------------------------------------------------------------
// JSON format. One document per tree; canonical output has sorted keys
// and inline graphs, so serialize(parse(x)) is a fixed point.

#[derive(Debug, Error)]
pub enum TreeIoError {
    #[error("tree json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Text(#[from] FormatError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    edges: Vec<(String, String)>,
    vertices: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GraphField {
    Inline(GraphJson),
    Text(String),
}

#[derive(Serialize, Deserialize)]
enum NodeJson {
    #[serde(rename = "leaf")]
    Leaf(LeafJson),
    #[serde(rename = "substitute")]
    Substitute(SubstituteJson),
    #[serde(rename = "clique_glue")]
    CliqueGlue(GlueJson),
    #[serde(rename = "k_glue")]
    KGlue(KGlueJson),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeafJson {
    class: String,
    graph: GraphField,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubstituteJson {
    base: GraphJson,
    children: BTreeMap<String, NodeJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GlueJson {
    left: Box<NodeJson>,
    right: Box<NodeJson>,
    shared: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KGlueJson {
    k: u32,
    left: Box<NodeJson>,
    right: Box<NodeJson>,
    shared: Vec<String>,
}

fn graph_to_json(g: &Graph) -> GraphJson {
    GraphJson {
        edges: g.edges().into_iter().map(|(u, v)| (u.to_string(), v.to_string())).collect(),
        vertices: g.vertices().map(|v| v.to_string()).collect(),
    }
}

fn graph_from_json(j: &GraphJson) -> Result<Graph, GraphError> {
    Graph::new(
        j.vertices.iter().map(|s| VertexId::from(s.as_str())),
        j.edges
            .iter()
            .map(|(u, v)| (VertexId::from(u.as_str()), VertexId::from(v.as_str()))),
    )
}

fn tree_to_node(t: &OpTree) -> NodeJson {
    match t {
        OpTree::Leaf { graph, class_tag } => NodeJson::Leaf(LeafJson {
            class: class_tag.clone(),
            graph: GraphField::Inline(graph_to_json(graph)),
        }),
        OpTree::Substitute { base, children } => NodeJson::Substitute(SubstituteJson {
            base: graph_to_json(base),
            children: children
                .iter()
                .map(|(v, c)| (v.to_string(), tree_to_node(c)))
                .collect(),
        }),
        OpTree::CliqueGlue { left, right, shared } => NodeJson::CliqueGlue(GlueJson {
            left: Box::new(tree_to_node(left)),
            right: Box::new(tree_to_node(right)),
            shared: shared.iter().map(|v| v.to_string()).collect(),
        }),
        OpTree::KGlue { k, left, right, shared } => NodeJson::KGlue(KGlueJson {
            k: *k,
            left: Box::new(tree_to_node(left)),
            right: Box::new(tree_to_node(right)),
            shared: shared.iter().map(|v| v.to_string()).collect(),
        }),
    }
}

fn node_to_tree(n: &NodeJson) -> Result<OpTree, TreeIoError> {
    Ok(match n {
        NodeJson::Leaf(body) => OpTree::Leaf {
            graph: match &body.graph {
                GraphField::Inline(j) => graph_from_json(j)?,
                GraphField::Text(s) => graph_from_text(s)?,
            },
            class_tag: body.class.clone(),
        },
        NodeJson::Substitute(body) => OpTree::Substitute {
            base: graph_from_json(&body.base)?,
            children: body
                .children
                .iter()
                .map(|(v, c)| Ok((VertexId::from(v.as_str()), node_to_tree(c)?)))
                .collect::<Result<_, TreeIoError>>()?,
        },
        NodeJson::CliqueGlue(body) => OpTree::CliqueGlue {
            left: Box::new(node_to_tree(&body.left)?),
            right: Box::new(node_to_tree(&body.right)?),
            shared: body.shared.iter().map(|s| VertexId::from(s.as_str())).collect(),
        },
        NodeJson::KGlue(body) => OpTree::KGlue {
            k: body.k,
            left: Box::new(node_to_tree(&body.left)?),
            right: Box::new(node_to_tree(&body.right)?),
            shared: body.shared.iter().map(|s| VertexId::from(s.as_str())).collect(),
        },
    })
}

pub fn tree_to_json(t: &OpTree) -> String {
    serde_json::to_string(&tree_to_node(t)).expect("tree serialization cannot fail")
}

pub fn tree_from_json(s: &str) -> Result<OpTree, TreeIoError> {
    let node: NodeJson = serde_json::from_str(s)?;
    node_to_tree(&node)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::are_isomorphic;
    use crate::oracle::{chromatic_number, clique_number, Budget};

    fn vs(ids: &[&str]) -> VertexSet {
        ids.iter().map(|s| VertexId::from(*s)).collect()
    }

    fn k3(a: &str, b: &str, c: &str) -> Graph {
        Graph::build(&[a, b, c], &[(a, b), (a, c), (b, c)])
    }

    fn c5_of_k2s() -> OpTree {
        let base = Graph::cycle(5);
        let children = base
            .vertices()
            .map(|v| (v.clone(), OpTree::leaf(Graph::complete(2), "base")))
            .collect();
        OpTree::Substitute { base, children }
    }

    #[test]
    fn leaf_realizes_to_itself() {
        let t = OpTree::leaf(Graph::cycle(5), "base");
        assert!(validate(&t).is_empty());
        assert_eq!(realize(&t).unwrap(), Graph::cycle(5));
    }

    #[test]
    fn substitution_matches_lexicographic_product() {
        let t = c5_of_k2s();
        assert!(validate(&t).is_empty());
        let g = realize(&t).unwrap();
        let lex = Graph::cycle(5).lex_product(&Graph::complete(2)).unwrap();
        // Same id scheme, so this is graph equality, not just isomorphism.
        assert_eq!(g, lex);
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(clique_number(&g), 4);
        assert!(are_isomorphic(&g, &lex));
    }

    #[test]
    fn clique_glue_realizes_the_union() {
        let t = OpTree::clique_glue(
            OpTree::leaf(k3("a", "b", "x"), "base"),
            OpTree::leaf(k3("x", "c", "d"), "base"),
            vs(&["x"]),
        );
        assert!(validate(&t).is_empty());
        let g = realize(&t).unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.degree(&"x".into()), 4);
    }

    #[test]
    fn empty_shared_set_is_a_disjoint_union() {
        let t = OpTree::clique_glue(
            OpTree::leaf(k3("a", "b", "c"), "base"),
            OpTree::leaf(Graph::cycle(5), "base"),
            VertexSet::new(),
        );
        assert!(validate(&t).is_empty());
        assert_eq!(realize(&t).unwrap().vertex_count(), 8);
    }

    #[test]
    fn validation_pinpoints_violations() {
        let too_wide = OpTree::k_glue(
            1,
            OpTree::leaf(k3("a", "b", "x"), "base"),
            OpTree::leaf(k3("a", "b", "y"), "base"),
            vs(&["a", "b"]),
        );
        let d = validate(&too_wide);
        assert_eq!(d.issues.len(), 1);
        assert_eq!(d.issues[0].invariant, "shared-exceeds-k");
        assert!(realize(&too_wide).is_err());

        let not_clique = OpTree::clique_glue(
            OpTree::leaf(Graph::build(&["u", "v", "w"], &[("u", "w"), ("v", "w")]), "base"),
            OpTree::leaf(Graph::build(&["u", "v", "z"], &[("u", "z"), ("v", "z")]), "base"),
            vs(&["u", "v"]),
        );
        let d = validate(&not_clique);
        assert!(d.issues.iter().any(|i| i.invariant == "shared-not-clique"));

        // Same shared ids, different edges inside the shared set.
        let induced_differs = OpTree::k_glue(
            2,
            OpTree::leaf(k3("u", "v", "w"), "base"),
            OpTree::leaf(Graph::build(&["u", "v", "z"], &[("u", "z"), ("v", "z")]), "base"),
            vs(&["u", "v"]),
        );
        let d = validate(&induced_differs);
        assert_eq!(d.issues.len(), 1);
        assert_eq!(d.issues[0].invariant, "shared-induced-differs");

        let nested = OpTree::clique_glue(
            OpTree::leaf(k3("a", "b", "c"), "base"),
            OpTree::leaf(Graph::build(&["a", "b"], &[("a", "b")]), "base"),
            vs(&["a", "b"]),
        );
        assert!(validate(&nested).issues.iter().any(|i| i.invariant == "sides-nested"));

        let wrong_shared = OpTree::k_glue(
            2,
            OpTree::leaf(k3("a", "b", "x"), "base"),
            OpTree::leaf(k3("x", "c", "d"), "base"),
            vs(&["a", "x"]),
        );
        assert!(validate(&wrong_shared).issues.iter().any(|i| i.invariant == "shared-mismatch"));

        let mut missing = match c5_of_k2s() {
            OpTree::Substitute { base, mut children } => {
                children.remove(&VertexId::from("v3"));
                OpTree::Substitute { base, children }
            }
            _ => unreachable!(),
        };
        assert!(validate(&missing).issues.iter().any(|i| i.invariant == "missing-child"));
        missing = OpTree::substitute(
            Graph::complete(2),
            vec![
                ("v0".into(), OpTree::leaf(Graph::complete(1), "base")),
                ("v1".into(), OpTree::leaf(Graph::complete(1), "base")),
                ("v9".into(), OpTree::leaf(Graph::complete(1), "base")),
            ],
        );
        assert!(validate(&missing).issues.iter().any(|i| i.invariant == "unknown-child"));

        // Slash-bearing ids can make two scopes collide: a/(b/c) vs (a/b)/c.
        let collide = OpTree::substitute(
            Graph::new(
                [VertexId::from("a"), VertexId::from("a/b")].into_iter(),
                std::iter::empty(),
            )
            .unwrap(),
            vec![
                (
                    "a".into(),
                    OpTree::leaf(
                        Graph::new([VertexId::from("b/c")].into_iter(), std::iter::empty()).unwrap(),
                        "base",
                    ),
                ),
                (
                    "a/b".into(),
                    OpTree::leaf(
                        Graph::new([VertexId::from("c")].into_iter(), std::iter::empty()).unwrap(),
                        "base",
                    ),
                ),
            ],
        );
        assert!(validate(&collide).issues.iter().any(|i| i.invariant == "child-overlap"));
    }

    #[test]
    fn depth_follows_the_isolated_vertex_rule() {
        assert_eq!(substitution_depth(&OpTree::leaf(Graph::complete(3), "base")).unwrap(), 0);
        assert_eq!(substitution_depth(&OpTree::leaf(Graph::empty(), "base")).unwrap(), -1);
        assert_eq!(substitution_depth(&c5_of_k2s()).unwrap(), 1);

        // Both base vertices isolated: disjoint union adds no depth.
        let union = OpTree::substitute(
            Graph::edgeless(2),
            vec![
                ("v0".into(), OpTree::leaf(Graph::complete(3), "base")),
                ("v1".into(), c5_of_k2s()),
            ],
        );
        assert_eq!(substitution_depth(&union).unwrap(), 1);

        // Non-isolated base: the deeper child now counts one more level.
        let joined = OpTree::substitute(
            Graph::complete(2),
            vec![
                ("v0".into(), OpTree::leaf(Graph::complete(3), "base")),
                ("v1".into(), c5_of_k2s()),
            ],
        );
        assert_eq!(substitution_depth(&joined).unwrap(), 2);

        let glue = OpTree::clique_glue(
            OpTree::leaf(k3("a", "b", "c"), "base"),
            OpTree::leaf(k3("c", "d", "e"), "base"),
            vs(&["c"]),
        );
        assert!(matches!(substitution_depth(&glue), Err(TreeError::UnsupportedNode(_))));
    }

    #[test]
    fn tree_clique_number_agrees_with_the_oracle() {
        let trees = vec![
            OpTree::leaf(Graph::cycle(7), "base"),
            c5_of_k2s(),
            OpTree::substitute(
                Graph::path(3),
                vec![
                    ("v0".into(), OpTree::leaf(Graph::complete(2), "base")),
                    ("v1".into(), c5_of_k2s()),
                    ("v2".into(), OpTree::leaf(Graph::cycle(5), "base")),
                ],
            ),
            OpTree::k_glue(
                2,
                OpTree::leaf(Graph::complete(4), "base"),
                OpTree::leaf(
                    Graph::build(&["v0", "v1", "x", "y"], &[("v0", "v1"), ("v0", "x"), ("v1", "y"), ("x", "y")]),
                    "base",
                ),
                vs(&["v0", "v1"]),
            ),
        ];
        for t in &trees {
            assert!(validate(t).is_empty());
            let g = realize(t).unwrap();
            assert_eq!(tree_clique_number(t), u64::from(clique_number(&g)));
        }
    }

    #[test]
    fn clique_sum_bound_holds_on_substitution() {
        // For every clique Q of the realization, the child clique numbers
        // of the base vertices Q touches sum to at least |Q|.
        let t = c5_of_k2s();
        let g = realize(&t).unwrap();
        let (base, children) = match &t {
            OpTree::Substitute { base, children } => (base, children),
            _ => unreachable!(),
        };
        let verts: Vec<VertexId> = g.vertices().cloned().collect();
        for mask in 1u32..(1 << verts.len()) {
            let q: Vec<&VertexId> = (0..verts.len()).filter(|i| mask >> i & 1 == 1).map(|i| &verts[i]).collect();
            let is_clique = q.iter().enumerate().all(|(i, u)| q[i + 1..].iter().all(|w| g.has_edge(u, w)));
            if !is_clique {
                continue;
            }
            let touched: VertexSet = q
                .iter()
                .map(|v| VertexId::from(v.as_str().split_once('/').unwrap().0))
                .collect();
            let total: u64 = touched
                .iter()
                .map(|b| {
                    assert!(base.has_vertex(b));
                    tree_clique_number(&children[b])
                })
                .sum();
            assert!(total >= q.len() as u64);
        }
    }

    #[test]
    fn normalize_swaps_glue_order() {
        let a = OpTree::leaf(k3("x", "p", "y"), "base");
        let b = OpTree::leaf(k3("x", "q", "r"), "base");
        let inner = OpTree::k_glue(1, a, b, vs(&["x"]));
        let c = OpTree::leaf(k3("y", "s", "t"), "base");
        let t = OpTree::clique_glue(inner, c, vs(&["y"]));
        assert!(validate(&t).is_empty());

        let n = normalize_glue_order(&t).unwrap();
        match &n {
            OpTree::KGlue { k, left, right, shared } => {
                assert_eq!(*k, 1);
                assert_eq!(shared, &vs(&["x"]));
                assert!(matches!(**left, OpTree::Leaf { .. }));
                assert_eq!(left.vertex_set(), vs(&["p", "s", "t", "x", "y"]));
                assert_eq!(right.vertex_set(), vs(&["q", "r", "x"]));
            }
            other => panic!("expected a k-glue root, got {other:?}"),
        }
        assert_eq!(realize(&n).unwrap(), realize(&t).unwrap());
        assert!(validate(&n).is_empty());
    }

    #[test]
    fn normalize_collapses_a_fully_shared_operand() {
        // Left operand: path x-y-z as a width-1 glue of two edges. The
        // clique glue shares exactly the {x,y} side, so that side is
        // replaced by the other operand outright.
        let al = OpTree::leaf(Graph::build(&["x", "y"], &[("x", "y")]), "base");
        let ar = OpTree::leaf(Graph::build(&["y", "z"], &[("y", "z")]), "base");
        let a = OpTree::k_glue(1, al, ar.clone(), vs(&["y"]));
        let b = OpTree::leaf(k3("x", "y", "b"), "base");
        let t = OpTree::clique_glue(a, b.clone(), vs(&["x", "y"]));
        assert!(validate(&t).is_empty());

        let n = normalize_glue_order(&t).unwrap();
        assert_eq!(n, OpTree::k_glue(1, b, ar, vs(&["y"])));
        assert_eq!(realize(&n).unwrap(), realize(&t).unwrap());
    }

    #[test]
    fn normalize_rejects_mixed_classes_and_substitution() {
        let t = OpTree::clique_glue(
            OpTree::leaf(k3("a", "b", "x"), "red"),
            OpTree::leaf(k3("x", "c", "d"), "blue"),
            vs(&["x"]),
        );
        assert!(matches!(normalize_glue_order(&t), Err(TreeError::MixedLeafClasses(..))));
        assert!(matches!(
            normalize_glue_order(&c5_of_k2s()),
            Err(TreeError::UnsupportedNode(_))
        ));
    }

    #[test]
    fn decompose_finds_atoms() {
        let leaf = decompose_small_cutsets(&Graph::complete(5), 2);
        assert!(matches!(&leaf, OpTree::Leaf { class_tag, .. } if class_tag == "atom"));

        let c5 = decompose_small_cutsets(&Graph::cycle(5), 1);
        assert!(matches!(c5, OpTree::Leaf { .. }));

        let bowtie = Graph::build(
            &["a", "b", "x", "c", "d"],
            &[("a", "b"), ("a", "x"), ("b", "x"), ("c", "d"), ("c", "x"), ("d", "x")],
        );
        let t = decompose_small_cutsets(&bowtie, 1);
        match &t {
            OpTree::KGlue { k, left, right, shared } => {
                assert_eq!(*k, 1);
                assert_eq!(shared, &vs(&["x"]));
                assert_eq!(left.vertex_set(), vs(&["a", "b", "x"]));
                assert_eq!(right.vertex_set(), vs(&["c", "d", "x"]));
            }
            other => panic!("expected a glue at x, got {other:?}"),
        }
        assert!(validate(&t).is_empty());
        assert_eq!(realize(&t).unwrap(), bowtie);

        // A longer path splits repeatedly and still realizes exactly.
        let p6 = Graph::path(6);
        let t = decompose_small_cutsets(&p6, 1);
        assert!(validate(&t).is_empty());
        assert_eq!(realize(&t).unwrap(), p6);
        fn leaves_small(t: &OpTree) -> bool {
            match t {
                OpTree::Leaf { graph, .. } => graph.vertex_count() <= 2,
                OpTree::KGlue { left, right, .. } => leaves_small(left) && leaves_small(right),
                _ => false,
            }
        }
        assert!(leaves_small(&t));
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let t = OpTree::k_glue(
            2,
            OpTree::clique_glue(
                OpTree::leaf(k3("a", "b", "x"), "base"),
                OpTree::leaf(k3("x", "c", "d"), "base"),
                vs(&["x"]),
            ),
            OpTree::leaf(Graph::build(&["x", "d", "e"], &[("x", "d"), ("d", "e")]), "base"),
            vs(&["d", "x"]),
        );
        let s1 = tree_to_json(&t);
        let back = tree_from_json(&s1).unwrap();
        assert_eq!(back, t);
        assert_eq!(tree_to_json(&back), s1);

        let sub = c5_of_k2s();
        assert_eq!(tree_from_json(&tree_to_json(&sub)).unwrap(), sub);
    }

    #[test]
    fn json_accepts_text_graphs_and_rejects_junk() {
        let text = "p 3 2\nv a\nv b\nv c\ne a b\ne b c\n";
        let doc = format!(
            "{{\"leaf\":{{\"class\":\"base\",\"graph\":{}}}}}",
            serde_json::to_string(text).unwrap()
        );
        let t = tree_from_json(&doc).unwrap();
        assert_eq!(realize(&t).unwrap().edge_count(), 2);
        // Canonical form inlines the graph; parsing it again is stable.
        let canon = tree_to_json(&t);
        assert!(canon.contains("\"vertices\""));
        assert_eq!(tree_to_json(&tree_from_json(&canon).unwrap()), canon);

        let unknown_key = "{\"leaf\":{\"class\":\"base\",\"graph\":{\"edges\":[],\"vertices\":[]},\"extra\":1}}";
        assert!(tree_from_json(unknown_key).is_err());
        let unknown_node = "{\"mystery\":{}}";
        assert!(tree_from_json(unknown_node).is_err());
    }

    #[test]
    fn glue_trees_color_within_their_width() {
        // Sanity link to the color workflow: gluing complete graphs along
        // one vertex keeps the chromatic number at the widest side.
        let t = OpTree::k_glue(
            1,
            OpTree::leaf(Graph::complete(4), "atom"),
            OpTree::leaf(
                Graph::build(&["v0", "p", "q"], &[("v0", "p"), ("p", "q"), ("q", "v0")]),
                "atom",
            ),
            vs(&["v0"]),
        );
        let g = realize(&t).unwrap();
        assert_eq!(chromatic_number(&g, Budget::default()).unwrap(), 4);
        assert_eq!(tree_clique_number(&t), 4);
    }
}
