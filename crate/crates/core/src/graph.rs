//! Undirected graphs with string vertex ids and deterministic iteration order.
//!
//! Everything downstream (tree realization, oracles, certificates) relies on
//! iterating a graph twice giving the same order, so adjacency lives in
//! ordered maps rather than hash maps. Graphs are immutable after
//! construction; operations return new graphs.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Color values are opaque: only equality and the number of distinct values
/// in a coloring matter.
pub type ColorId = u64;

/// Vertex id: a non-empty string without whitespace. Composite constructions
/// (substitution, Mycielskian, lexicographic product) join ids with `/` so
/// the provenance of a vertex stays readable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(String);

impl VertexId {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `parent/child` id used when a construction embeds one namespace in another.
    pub fn scoped(prefix: &str, inner: &str) -> VertexId {
        VertexId(format!("{prefix}/{inner}"))
    }

    fn check(s: &str) -> Result<(), GraphError> {
        if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c.is_control()) {
            return Err(GraphError::BadVertexId(s.to_string()));
        }
        Ok(())
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_string())
    }
}

impl From<String> for VertexId {
    fn from(s: String) -> Self {
        VertexId(s)
    }
}

impl Borrow<str> for VertexId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub type VertexSet = BTreeSet<VertexId>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex id {0:?} is empty or contains whitespace")]
    BadVertexId(String),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("self loop at {0}")]
    SelfLoop(VertexId),
    #[error("vertex {0} appears on both sides of a disjoint union")]
    UnionOverlap(VertexId),
    #[error("{0} requires a non-empty input")]
    EmptyInput(&'static str),
    #[error("constructed ids collide at {0}; rename the input vertices")]
    IdCollision(VertexId),
    #[error("vertex {0} has no color")]
    UncoloredVertex(VertexId),
    #[error("colored vertex {0} is not in the graph")]
    ColorDomainMismatch(VertexId),
}

/// Immutable undirected graph. No self loops, no parallel edges.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
    m: usize,
}

impl Graph {
    pub fn empty() -> Graph {
        Graph {
            adj: BTreeMap::new(),
            m: 0,
        }
    }

    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Graph, GraphError> {
        let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
        for v in vertices {
            VertexId::check(&v.0)?;
            if adj.insert(v.clone(), BTreeSet::new()).is_some() {
                return Err(GraphError::DuplicateVertex(v));
            }
        }
        let mut m = 0;
        let add = |adj: &mut BTreeMap<VertexId, BTreeSet<VertexId>>,
                       u: VertexId,
                       v: VertexId|
         -> Result<bool, GraphError> {
            if !adj.contains_key(&v) {
                return Err(GraphError::UnknownVertex(v));
            }
            Ok(adj.get_mut(&u).unwrap().insert(v))
        };
        for (u, v) in edges {
            if !adj.contains_key(&u) {
                return Err(GraphError::UnknownVertex(u));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let fresh = add(&mut adj, u.clone(), v.clone())?;
            add(&mut adj, v, u)?;
            if fresh {
                m += 1;
            }
        }
        Ok(Graph { adj, m })
    }

    /// Test and pool convenience; panics on invalid input.
    pub fn build(vertices: &[&str], edges: &[(&str, &str)]) -> Graph {
        Graph::new(
            vertices.iter().map(|s| VertexId::from(*s)),
            edges
                .iter()
                .map(|(u, v)| (VertexId::from(*u), VertexId::from(*v))),
        )
        .expect("valid literal graph")
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.adj.keys()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.adj.keys().cloned().collect()
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.adj.contains_key(v)
    }

    pub fn has_edge(&self, u: &VertexId, v: &VertexId) -> bool {
        self.adj.get(u).is_some_and(|n| n.contains(v))
    }

    /// Panics if `v` is not a vertex.
    pub fn neighbors(&self, v: &VertexId) -> &BTreeSet<VertexId> {
        self.adj
            .get(v)
            .unwrap_or_else(|| panic!("no vertex {v} in graph"))
    }

    pub fn degree(&self, v: &VertexId) -> usize {
        self.neighbors(v).len()
    }

    /// Edges as ordered pairs (u, v) with u < v, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId)> {
        self.adj
            .iter()
            .flat_map(|(u, ns)| ns.iter().filter(move |v| u < *v).map(move |v| (u, v)))
    }

    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<Graph, GraphError> {
        for v in s {
            if !self.has_vertex(v) {
                return Err(GraphError::UnknownVertex(v.clone()));
            }
        }
        let mut adj = BTreeMap::new();
        let mut m = 0;
        for v in s {
            let kept: BTreeSet<VertexId> = self.adj[v].intersection(s).cloned().collect();
            m += kept.len();
            adj.insert(v.clone(), kept);
        }
        Ok(Graph { adj, m: m / 2 })
    }

    pub fn disjoint_union(&self, other: &Graph) -> Result<Graph, GraphError> {
        if let Some(v) = self.adj.keys().find(|v| other.has_vertex(v)) {
            return Err(GraphError::UnionOverlap(v.clone()));
        }
        let mut adj = self.adj.clone();
        adj.extend(other.adj.iter().map(|(k, v)| (k.clone(), v.clone())));
        Ok(Graph {
            adj,
            m: self.m + other.m,
        })
    }

    /// Same graph with every id replaced by `prefix/id`.
    pub fn scoped(&self, prefix: &str) -> Graph {
        let ren = |v: &VertexId| VertexId::scoped(prefix, &v.0);
        let adj = self
            .adj
            .iter()
            .map(|(v, ns)| (ren(v), ns.iter().map(&ren).collect()))
            .collect();
        Graph { adj, m: self.m }
    }

    /// Mycielskian M(G). Original vertices become `v/x`, their shadows `w/x`,
    /// and the apex is `z`. Keeps the clique number of a triangle-free graph
    /// at 2 while forcing one more color.
    pub fn mycielskian(&self) -> Result<Graph, GraphError> {
        if self.is_empty() {
            return Err(GraphError::EmptyInput("mycielskian"));
        }
        let mut vertices: Vec<VertexId> = Vec::new();
        let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
        let orig = |x: &VertexId| VertexId::scoped("v", &x.0);
        let shadow = |x: &VertexId| VertexId::scoped("w", &x.0);
        let apex = VertexId::from("z");
        for x in self.vertices() {
            vertices.push(orig(x));
            vertices.push(shadow(x));
        }
        vertices.push(apex.clone());
        for (u, v) in self.edges() {
            edges.push((orig(u), orig(v)));
            edges.push((shadow(u), orig(v)));
            edges.push((orig(u), shadow(v)));
        }
        for x in self.vertices() {
            edges.push((shadow(x), apex.clone()));
        }
        Graph::new(vertices, edges)
    }

    /// Lexicographic product: one copy of `inner` per vertex of `self`, copies
    /// joined completely whenever the outer vertices are adjacent. Vertex
    /// (u, x) is named `u/x`.
    pub fn lex_product(&self, inner: &Graph) -> Result<Graph, GraphError> {
        if self.is_empty() || inner.is_empty() {
            return Err(GraphError::EmptyInput("lex_product"));
        }
        let name = |u: &VertexId, x: &VertexId| VertexId::scoped(&u.0, &x.0);
        let mut vertices = Vec::new();
        for u in self.vertices() {
            for x in inner.vertices() {
                vertices.push(name(u, x));
            }
        }
        let want = self.vertex_count() * inner.vertex_count();
        let distinct: BTreeSet<&VertexId> = vertices.iter().collect();
        if distinct.len() != want {
            let mut seen = BTreeSet::new();
            let dup = vertices.iter().find(|v| !seen.insert((*v).clone())).unwrap();
            return Err(GraphError::IdCollision(dup.clone()));
        }
        let mut edges = Vec::new();
        for u in self.vertices() {
            for (x, y) in inner.edges() {
                edges.push((name(u, x), name(u, y)));
            }
        }
        for (u, v) in self.edges() {
            for x in inner.vertices() {
                for y in inner.vertices() {
                    edges.push((name(u, x), name(v, y)));
                }
            }
        }
        Graph::new(vertices, edges)
    }

    /// True when every vertex outside `s` is adjacent to all of `s` or to
    /// none of it.
    pub fn is_homogeneous(&self, s: &VertexSet) -> Result<bool, GraphError> {
        if s.is_empty() {
            return Err(GraphError::EmptyInput("is_homogeneous"));
        }
        for v in s {
            if !self.has_vertex(v) {
                return Err(GraphError::UnknownVertex(v.clone()));
            }
        }
        for u in self.vertices() {
            if s.contains(u) {
                continue;
            }
            let hits = self.adj[u].intersection(s).count();
            if hits != 0 && hits != s.len() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First monochromatic edge in lexicographic order, if any. The coloring
    /// must assign a color to every vertex and nothing else.
    pub fn improper_edge(
        &self,
        coloring: &Coloring,
    ) -> Result<Option<(VertexId, VertexId)>, GraphError> {
        for v in coloring.domain() {
            if !self.has_vertex(v) {
                return Err(GraphError::ColorDomainMismatch(v.clone()));
            }
        }
        for v in self.vertices() {
            if coloring.get(v).is_none() {
                return Err(GraphError::UncoloredVertex(v.clone()));
            }
        }
        for (u, v) in self.edges() {
            if coloring.get(u) == coloring.get(v) {
                return Ok(Some((u.clone(), v.clone())));
            }
        }
        Ok(None)
    }

    pub fn is_proper(&self, coloring: &Coloring) -> Result<bool, GraphError> {
        Ok(self.improper_edge(coloring)?.is_none())
    }

    pub fn complement_edges(&self) -> Vec<(VertexId, VertexId)> {
        let vs: Vec<&VertexId> = self.vertices().collect();
        let mut out = Vec::new();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                if !self.has_edge(vs[i], vs[j]) {
                    out.push((vs[i].clone(), vs[j].clone()));
                }
            }
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        let n = self.vertex_count();
        n == 0 || self.m == n * (n - 1) / 2
    }

    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        self.component_of(self.vertices().next().unwrap()).len() == self.vertex_count()
    }

    fn component_of(&self, start: &VertexId) -> VertexSet {
        let mut seen: VertexSet = BTreeSet::new();
        let mut stack = vec![start.clone()];
        while let Some(v) = stack.pop() {
            if !seen.insert(v.clone()) {
                continue;
            }
            for u in &self.adj[&v] {
                if !seen.contains(u) {
                    stack.push(u.clone());
                }
            }
        }
        seen
    }

    /// Vertex sets of the connected components, ordered by their least vertex.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut out: Vec<VertexSet> = Vec::new();
        let mut seen: VertexSet = BTreeSet::new();
        for v in self.vertices() {
            if seen.contains(v) {
                continue;
            }
            let comp = self.component_of(v);
            seen.extend(comp.iter().cloned());
            out.push(comp);
        }
        out
    }

    // Small named graphs with ids v0, v1, ... Used by pools and tests.

    pub fn complete(n: usize) -> Graph {
        let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((
                    VertexId::from(ids[i].clone()),
                    VertexId::from(ids[j].clone()),
                ));
            }
        }
        Graph::new(ids.into_iter().map(VertexId::from), edges).unwrap()
    }

    pub fn edgeless(n: usize) -> Graph {
        Graph::new((0..n).map(|i| VertexId::from(format!("v{i}"))), []).unwrap()
    }

    pub fn path(n: usize) -> Graph {
        let edges = (1..n).map(|i| {
            (
                VertexId::from(format!("v{}", i - 1)),
                VertexId::from(format!("v{i}")),
            )
        });
        Graph::new((0..n).map(|i| VertexId::from(format!("v{i}"))), edges).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges = (0..n).map(|i| {
            (
                VertexId::from(format!("v{i}")),
                VertexId::from(format!("v{}", (i + 1) % n)),
            )
        });
        Graph::new((0..n).map(|i| VertexId::from(format!("v{i}"))), edges).unwrap()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={})", self.vertex_count(), self.edge_count())
    }
}

/// Total assignment of colors to vertices. Stored sorted by vertex id so the
/// file form and the in-memory iteration agree.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Coloring {
    map: BTreeMap<VertexId, ColorId>,
}

impl Coloring {
    pub fn new() -> Coloring {
        Coloring::default()
    }

    pub fn from_map(map: BTreeMap<VertexId, ColorId>) -> Coloring {
        Coloring { map }
    }

    pub fn set(&mut self, v: VertexId, c: ColorId) {
        self.map.insert(v, c);
    }

    pub fn get(&self, v: &VertexId) -> Option<ColorId> {
        self.map.get(v).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, ColorId)> {
        self.map.iter().map(|(v, c)| (v, *c))
    }

    pub fn domain(&self) -> impl Iterator<Item = &VertexId> {
        self.map.keys()
    }

    pub fn color_set(&self) -> BTreeSet<ColorId> {
        self.map.values().copied().collect()
    }

    /// Number of distinct colors.
    pub fn colors_used(&self) -> u64 {
        self.color_set().len() as u64
    }

    /// Keep only the vertices in `s`.
    pub fn restricted(&self, s: &VertexSet) -> Coloring {
        Coloring {
            map: self
                .map
                .iter()
                .filter(|(v, _)| s.contains(*v))
                .map(|(v, c)| (v.clone(), *c))
                .collect(),
        }
    }

    /// One `<vertex-id> <color>` line per vertex, sorted by id.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, c) in &self.map {
            out.push_str(&format!("{v} {c}\n"));
        }
        out
    }

    pub fn parse_text(input: &str) -> Result<Coloring, FormatError> {
        let mut map = BTreeMap::new();
        for (idx, raw) in input.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (id, color) = match (parts.next(), parts.next(), parts.next()) {
                (Some(id), Some(c), None) => (id, c),
                _ => return Err(FormatError::at(idx + 1, "expected `<vertex-id> <color>`")),
            };
            let color: ColorId = color
                .parse()
                .map_err(|_| FormatError::at(idx + 1, "color is not a non-negative integer"))?;
            if map.insert(VertexId::from(id), color).is_some() {
                return Err(FormatError::at(idx + 1, "vertex colored twice"));
            }
        }
        Ok(Coloring { map })
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl FormatError {
    fn at(line: usize, message: impl Into<String>) -> FormatError {
        FormatError {
            line,
            message: message.into(),
        }
    }
}

/// Graph text format:
/// ```text
/// p <n> <m>
/// v <id>        (one per vertex, lexicographic)
/// e <id> <id>   (one per edge, endpoints sorted, pairs lexicographic)
/// ```
pub fn graph_to_text(g: &Graph) -> String {
    let mut out = format!("p {} {}\n", g.vertex_count(), g.edge_count());
    for v in g.vertices() {
        out.push_str(&format!("v {v}\n"));
    }
    for (u, v) in g.edges() {
        out.push_str(&format!("e {u} {v}\n"));
    }
    out
}

pub fn graph_from_text(input: &str) -> Result<Graph, FormatError> {
    let mut header: Option<(usize, usize)> = None;
    let mut vertices: Vec<VertexId> = Vec::new();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let n = idx + 1;
        let mut parts = line.split_whitespace();
        match parts.next().unwrap() {
            "p" => {
                if header.is_some() {
                    return Err(FormatError::at(n, "second p line"));
                }
                let (nv, ne) = match (parts.next(), parts.next(), parts.next()) {
                    (Some(nv), Some(ne), None) => (nv, ne),
                    _ => return Err(FormatError::at(n, "expected `p <n> <m>`")),
                };
                let nv = nv
                    .parse()
                    .map_err(|_| FormatError::at(n, "bad vertex count"))?;
                let ne = ne
                    .parse()
                    .map_err(|_| FormatError::at(n, "bad edge count"))?;
                header = Some((nv, ne));
            }
            "v" => match (parts.next(), parts.next()) {
                (Some(id), None) => vertices.push(VertexId::from(id)),
                _ => return Err(FormatError::at(n, "expected `v <id>`")),
            },
            "e" => match (parts.next(), parts.next(), parts.next()) {
                (Some(u), Some(v), None) => {
                    edges.push((VertexId::from(u), VertexId::from(v)));
                }
                _ => return Err(FormatError::at(n, "expected `e <id> <id>`")),
            },
            other => {
                return Err(FormatError::at(n, format!("unknown record {other:?}")));
            }
        }
    }
    let (nv, ne) = header.ok_or_else(|| FormatError::at(1, "missing p line"))?;
    if vertices.len() != nv {
        return Err(FormatError::at(
            1,
            format!("p line promises {nv} vertices, found {}", vertices.len()),
        ));
    }
    let g = Graph::new(vertices, edges).map_err(|e| FormatError::at(1, e.to_string()))?;
    if g.edge_count() != ne {
        return Err(FormatError::at(
            1,
            format!("p line promises {ne} edges, found {}", g.edge_count()),
        ));
    }
    Ok(g)
}

/// Exhaustive isomorphism test with degree pruning. Meant for small graphs
/// in tests; cost grows factorially.
pub fn are_isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    let mut da: Vec<usize> = a.vertices().map(|v| a.degree(v)).collect();
    let mut db: Vec<usize> = b.vertices().map(|v| b.degree(v)).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }

    let av: Vec<&VertexId> = a.vertices().collect();
    let bv: Vec<&VertexId> = b.vertices().collect();
    let n = av.len();
    // Map high-degree vertices first; they constrain the search most.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(a.degree(av[i])));

    let mut assign: Vec<Option<usize>> = vec![None; n]; // a-index -> b-index
    let mut used = vec![false; n];

    fn extend(
        pos: usize,
        order: &[usize],
        av: &[&VertexId],
        bv: &[&VertexId],
        a: &Graph,
        b: &Graph,
        assign: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let i = order[pos];
        for j in 0..bv.len() {
            if used[j] || a.degree(av[i]) != b.degree(bv[j]) {
                continue;
            }
            let ok = order[..pos].iter().all(|&k| {
                let l = assign[k].unwrap();
                a.has_edge(av[i], av[k]) == b.has_edge(bv[j], bv[l])
            });
            if !ok {
                continue;
            }
            assign[i] = Some(j);
            used[j] = true;
            if extend(pos + 1, order, av, bv, a, b, assign, used) {
                return true;
            }
            assign[i] = None;
            used[j] = false;
        }
        false
    }

    extend(0, &order, &av, &bv, a, b, &mut assign, &mut used)
}
