//! Builds proper colorings of realized operation trees, together with
//! certificates pinning the color count against a symbolic bound.
//!
//! Each entry point walks a validated [`OpTree`] bottom-up: pair codes
//! under substitution, geometric weight buckets for the polynomial
//! route, constraint passing across bounded overlaps. Nothing is taken
//! on faith at runtime; properness, palette budgets, and the final
//! count-versus-bound comparison are re-checked on the actual output,
//! and any breach surfaces as an error instead of a wrong certificate.

use std::collections::{BTreeMap, BTreeSet};

use num::bigint::BigInt;
use num::BigUint;
use serde_json::{json, Value};
use thiserror::Error;

use crate::bounds::{
    self, check_value, floor_eval, kglue_bound, poly_star_bound, supermult_star_bound, BoundError,
    BoundFn, Verdict, MAX_PRECISION_BITS,
};
use crate::graph::{ColorId, Coloring, Graph, GraphError, VertexId, VertexSet};
use crate::optree::{
    join_path, realize, substitution_depth, tree_clique_number, OpTree, TreeError,
};
use crate::oracle::{self, Budget, OracleError};
use crate::Rational;

/// Reductions realize the whole tree and solve exact chromatic numbers
/// on every glued piece, so they stay strictly desk-sized.
const REDUCTION_LIMIT: usize = 20;
/// Palettes are materialized as explicit color sets; anything beyond
/// this is a sign the bound was evaluated somewhere absurd.
const PALETTE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{found} nodes are unsupported here; this operation accepts {accepts} trees")]
    UnsupportedNode { accepts: &'static str, found: &'static str },
    #[error("leaf at {path} needs {chi} colors, above the class bound {bound} at clique number {omega}")]
    LeafBoundViolated { path: String, chi: u64, omega: u64, bound: String },
    #[error("precision exhausted while comparing against {bound} at {at}")]
    Inconclusive { bound: String, at: u64 },
    #[error("cannot raise {bound} to the power {exponent} inside the bound grammar")]
    PowerNotRepresentable { bound: String, exponent: u32 },
    #[error("constraint rejected: {0}")]
    BadConstraint(String),
    #[error("colorings cannot merge: {0}")]
    MergeRejected(String),
    #[error("reduction handles at most {limit} realized vertices, got {got}")]
    ReductionTooLarge { got: usize, limit: usize },
    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

// ---------------------------------------------------------------------------
// Constraints carried through the gluing recursion.

/// Palette, precoloring, and per-vertex forbidden lists that a coloring
/// must respect. The budget (precolored vertices weighted by k, plus
/// every forbidden entry) is what keeps the recursion solvable: as long
/// as it stays under 2k^2 - 1 the palette never runs dry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColoringConstraint {
    pub palette: BTreeSet<ColorId>,
    pub precoloring: Coloring,
    pub forbidden: BTreeMap<VertexId, BTreeSet<ColorId>>,
}

impl ColoringConstraint {
    /// No pins, no bans, palette {0, .., size-1}.
    pub fn open(size: u64) -> ColoringConstraint {
        ColoringConstraint { palette: (0..size).collect(), ..ColoringConstraint::default() }
    }

    /// k per precolored vertex plus every forbidden entry.
    pub fn budget(&self, k: u32) -> u64 {
        let pinned = self.precoloring.len() as u64 * u64::from(k);
        let listed: u64 = self.forbidden.values().map(|s| s.len() as u64).sum();
        pinned + listed
    }

    fn check(&self, g: &Graph) -> Result<(), SynthesisError> {
        for (v, c) in self.precoloring.iter() {
            if !g.has_vertex(v) {
                return Err(SynthesisError::BadConstraint(format!(
                    "precolored vertex {v} is not in the graph"
                )));
            }
            if !self.palette.contains(&c) {
                return Err(SynthesisError::BadConstraint(format!(
                    "precolored vertex {v} uses a color outside the palette"
                )));
            }
        }
        let pinned: VertexSet = self.precoloring.domain().cloned().collect();
        if let Some((u, v)) =
            g.induced_subgraph(&pinned)?.improper_edge(&self.precoloring)?
        {
            return Err(SynthesisError::BadConstraint(format!(
                "precoloring repeats a color across the edge {u} ~ {v}"
            )));
        }
        for (v, banned) in &self.forbidden {
            if !g.has_vertex(v) {
                return Err(SynthesisError::BadConstraint(format!(
                    "forbidden list for {v}, which is not in the graph"
                )));
            }
            if pinned.contains(v) {
                return Err(SynthesisError::BadConstraint(format!(
                    "vertex {v} is both precolored and restricted"
                )));
            }
            if !banned.is_subset(&self.palette) {
                return Err(SynthesisError::BadConstraint(format!(
                    "forbidden list for {v} mentions colors outside the palette"
                )));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Certificates and traces.

/// What a synthesis run promises about its output: the coloring uses
/// `colors_used` colors on a graph of clique number `omega`, compared
/// against `bound(omega)` with the stated verdict. Traces expose the
/// intermediate bookkeeping so the promise can be audited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub bound: BoundFn,
    pub omega: u64,
    pub colors_used: u64,
    pub verdict: Verdict,
    pub trace: Option<TraceData>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceData {
    Poly(PolyTrace),
    Constraint(ConstraintTrace),
}

/// One entry per connected component that went through the bucket
/// construction of [`color_poly`], in recursion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyTrace {
    pub a: u32,
    pub nodes: Vec<PolyNode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyNode {
    pub path: String,
    pub component: usize,
    pub omega: u64,
    /// Number of geometric steps between omega/2 and 1.
    pub m: u32,
    /// Bucket per base vertex: 0 holds the heavy blocks colored last,
    /// m+1 the weight-one blocks, 1..=m the geometric ranges.
    pub buckets: BTreeMap<VertexId, u32>,
    /// Distinct colors each bucket actually used, indexed by bucket.
    pub bucket_colors: Vec<u64>,
    pub blocks: Vec<HeavyBlock>,
}

/// A block whose clique number exceeds half the component's. Heavy
/// blocks are pairwise non-adjacent and are colored one at a time by
/// reusing colors absent from their realized neighborhoods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeavyBlock {
    pub vertex: VertexId,
    pub omega_i: u64,
    /// Smallest bucket whose members may neighbor this block; nearer
    /// buckets hold blocks too big to fit beside it in a clique.
    pub s_i: u32,
    /// Relative clique-number gap 1 - omega_i/omega.
    pub gap: Rational,
    pub colors_on_block: u64,
    /// Everything this block can see: its own colors plus those of all
    /// buckets from s_i outward. Must stay within the certified bound.
    pub ledger: u64,
}

/// Budget bookkeeping along the gluing recursion of [`color_kglue`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintTrace {
    pub k: u32,
    pub nodes: Vec<ConstraintNode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintNode {
    pub path: String,
    /// Constraint budget on arrival at this node.
    pub budget: u64,
    /// Measured weight of the lighter side at a glue node; None at leaves.
    pub lighter_budget: Option<u64>,
}

impl Certificate {
    /// Canonical JSON: object keys sort lexicographically, rationals
    /// render as strings, the bound as its grammar expression.
    pub fn to_json(&self) -> String {
        let trace = match &self.trace {
            None => Value::Null,
            Some(TraceData::Poly(p)) => json!({
                "kind": "poly",
                "a": p.a,
                "nodes": p.nodes.iter().map(poly_node_json).collect::<Vec<_>>(),
            }),
            Some(TraceData::Constraint(c)) => json!({
                "kind": "constraint",
                "k": c.k,
                "nodes": c.nodes.iter().map(|n| json!({
                    "path": n.path,
                    "budget": n.budget,
                    "lighter_budget": n.lighter_budget,
                })).collect::<Vec<_>>(),
            }),
        };
        let root = json!({
            "bound": self.bound.to_string(),
            "omega": self.omega,
            "colors_used": self.colors_used,
            "verdict": self.verdict.to_string(),
            "trace": trace,
        });
        serde_json::to_string_pretty(&root).expect("certificates are plain data")
    }
}

fn poly_node_json(n: &PolyNode) -> Value {
    let buckets: serde_json::Map<String, Value> =
        n.buckets.iter().map(|(v, j)| (v.to_string(), Value::from(*j))).collect();
    json!({
        "path": n.path,
        "component": n.component,
        "omega": n.omega,
        "m": n.m,
        "buckets": buckets,
        "bucket_colors": n.bucket_colors,
        "blocks": n.blocks.iter().map(|b| json!({
            "vertex": b.vertex.to_string(),
            "omega_i": b.omega_i,
            "s_i": b.s_i,
            "gap": b.gap.to_string(),
            "colors_on_block": b.colors_on_block,
            "ledger": b.ledger,
        })).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------------------
// Depth-driven pair coloring.

/// Colors a substitution tree with pair codes: every non-isolated base
/// vertex contributes (base color, child color), children of isolated
/// base vertices reuse the palette outright. The color count is then at
/// most f(omega)^(d+1) for a tree of substitution depth d whose leaves
/// are chromatically bounded by f, which is what the certificate checks.
pub fn color_by_depth(
    t: &OpTree,
    f: &BoundFn,
) -> Result<(Coloring, Certificate), SynthesisError> {
    f.validate()?;
    reject_glue(t)?;
    let g = realize(t)?;
    let depth = substitution_depth(t)?;
    let exponent = u32::try_from(depth + 1)
        .map_err(|_| SynthesisError::Invariant("substitution depth out of range".to_string()))?;
    let omega = tree_clique_number(t);
    let mut check =
        |path: &str, leaf_omega: u64, chi: u64| interval_leaf_check(f, leaf_omega, chi, path);
    let coloring = depth_color_node(t, "/", &mut check)?;
    assert_proper(&g, &coloring)?;
    let bound = f.pow_symbolic(exponent).ok_or_else(|| SynthesisError::PowerNotRepresentable {
        bound: f.to_string(),
        exponent,
    })?;
    let colors_used = coloring.colors_used();
    let verdict = check_value(&bound, omega, colors_used, MAX_PRECISION_BITS)?;
    Ok((coloring, Certificate { bound, omega, colors_used, verdict, trace: None }))
}

fn depth_color_node(
    t: &OpTree,
    path: &str,
    leaf_check: &mut dyn FnMut(&str, u64, u64) -> Result<(), SynthesisError>,
) -> Result<Coloring, SynthesisError> {
    match t {
        OpTree::Leaf { graph, .. } => {
            let (col, n) = oracle_color(graph)?;
            leaf_check(path, u64::from(oracle::clique_number(graph)), n)?;
            Ok(col)
        }
        OpTree::Substitute { base, children } => {
            let (base_col, _) = oracle_color(base)?;
            let mut paired: Vec<(&VertexId, Coloring, u64)> = Vec::new();
            let mut lone: Vec<Coloring> = Vec::new();
            for (v, child) in children {
                let sub =
                    depth_color_node(child, &join_path(path, &format!("child({v})")), leaf_check)?;
                let (sub, n) = renumber(&sub);
                let sub = scoped_coloring(&sub, v.as_str());
                if base.degree(v) == 0 {
                    lone.push(sub);
                } else {
                    paired.push((v, sub, n));
                }
            }
            let width = paired.iter().map(|(_, _, n)| *n).max().unwrap_or(0);
            let mut out = Coloring::new();
            for (v, sub, _) in &paired {
                let code = base_col.get(v).expect("base coloring is total");
                for (x, c) in sub.iter() {
                    out.set(x.clone(), code * width + c);
                }
            }
            // isolated base vertices see no outside edges, so their
            // children restart from color 0 instead of taking pair codes
            for sub in &lone {
                for (x, c) in sub.iter() {
                    out.set(x.clone(), c);
                }
            }
            Ok(out)
        }
        OpTree::CliqueGlue { .. } | OpTree::KGlue { .. } => {
            unreachable!("glue nodes rejected before synthesis")
        }
    }
}

// ---------------------------------------------------------------------------
// Polynomial synthesis via geometric weight buckets.

/// Colors a substitution tree whose leaves obey chi <= omega^A, using
/// at most omega^(3A+11) colors. Components of the base split into
/// buckets by their subtree clique numbers; buckets take disjoint
/// palettes, and the oversized blocks left over are squeezed back in by
/// reusing colors their neighborhoods cannot see.
pub fn color_poly(t: &OpTree, a: u32) -> Result<(Coloring, Certificate), SynthesisError> {
    if a == 0 {
        return Err(SynthesisError::BadConstraint(
            "the leaf bound exponent must be at least 1".to_string(),
        ));
    }
    reject_glue(t)?;
    let g = realize(t)?;
    let omega = tree_clique_number(t);
    let mut nodes = Vec::new();
    let coloring = poly_node(t, a, "/", &mut nodes)?;
    assert_proper(&g, &coloring)?;
    let bound = poly_star_bound(a);
    let colors_used = coloring.colors_used();
    let verdict = check_value(&bound, omega, colors_used, MAX_PRECISION_BITS)?;
    let trace = Some(TraceData::Poly(PolyTrace { a, nodes }));
    Ok((coloring, Certificate { bound, omega, colors_used, verdict, trace }))
}

fn poly_node(
    t: &OpTree,
    a: u32,
    path: &str,
    nodes: &mut Vec<PolyNode>,
) -> Result<Coloring, SynthesisError> {
    match t {
        OpTree::Leaf { graph, .. } => {
            let (col, n) = oracle_color(graph)?;
            power_leaf_check(a, path, u64::from(oracle::clique_number(graph)), n)?;
            Ok(col)
        }
        OpTree::Substitute { base, children } => {
            let depth = substitution_depth(t)?;
            let omega = tree_clique_number(t);
            if depth <= 2 || omega <= 3 {
                // shallow or sparse enough that pair codes already fit
                // inside the advertised polynomial
                let mut check = |p: &str, om: u64, chi: u64| power_leaf_check(a, p, om, chi);
                return depth_color_node(t, path, &mut check);
            }
            let mut out = Coloring::new();
            for (component, comp) in base.components().into_iter().enumerate() {
                let col = poly_component(base, children, &comp, a, path, component, nodes)?;
                absorb(&mut out, &col);
            }
            Ok(out)
        }
        OpTree::CliqueGlue { .. } | OpTree::KGlue { .. } => {
            unreachable!("glue nodes rejected before synthesis")
        }
    }
}

fn poly_component(
    base: &Graph,
    children: &BTreeMap<VertexId, OpTree>,
    comp: &VertexSet,
    a: u32,
    path: &str,
    component: usize,
    nodes: &mut Vec<PolyNode>,
) -> Result<Coloring, SynthesisError> {
    let child_of =
        |v: &VertexId| children.get(v).expect("validated tree has a child per base vertex");
    if comp.len() == 1 {
        // a lone base vertex adds no pair structure; splice the block in
        let v = comp.iter().next().expect("components are nonempty");
        let sub = poly_node(child_of(v), a, &join_path(path, &format!("child({v})")), nodes)?;
        let (sub, _) = renumber(&sub);
        return Ok(scoped_coloring(&sub, v.as_str()));
    }
    let skeleton = base.induced_subgraph(comp)?;
    let weights: BTreeMap<VertexId, u64> =
        comp.iter().map(|v| (v.clone(), tree_clique_number(child_of(v)))).collect();
    let omega = oracle::max_weight_clique(&skeleton, &weights);
    if omega <= 3 {
        // too small for geometric buckets; pair codes fit the bound here
        let sub_children: Vec<(VertexId, OpTree)> =
            comp.iter().map(|v| (v.clone(), child_of(v).clone())).collect();
        let sub_tree = OpTree::substitute(skeleton, sub_children);
        let mut check = |p: &str, om: u64, chi: u64| power_leaf_check(a, p, om, chi);
        return depth_color_node(&sub_tree, path, &mut check);
    }
    let mut blocks: BTreeMap<VertexId, BlockInfo> = BTreeMap::new();
    for v in comp {
        let child_path = join_path(path, &format!("child({v})"));
        let sub = poly_node(child_of(v), a, &child_path, nodes)?;
        let (sub, n) = renumber(&sub);
        let omega_i = weights[v];
        if omega_i >= omega {
            return Err(SynthesisError::Invariant(format!(
                "block {v} alone carries clique number {omega_i} of {omega}"
            )));
        }
        blocks.insert(v.clone(), BlockInfo { col: scoped_coloring(&sub, v.as_str()), n, omega_i });
    }
    let m = alpha_steps(omega);
    let mut buckets: BTreeMap<VertexId, u32> = BTreeMap::new();
    for v in comp {
        buckets.insert(v.clone(), bucket_index(omega, blocks[v].omega_i, m)?);
    }
    let heavy: Vec<VertexId> = comp.iter().filter(|v| buckets[*v] == 0).cloned().collect();
    for (i, u) in heavy.iter().enumerate() {
        for w in &heavy[i + 1..] {
            if skeleton.has_edge(u, w) {
                return Err(SynthesisError::Invariant(format!(
                    "heavy blocks {u} and {w} are adjacent, contradicting the weighted clique number"
                )));
            }
        }
    }
    let budget = big(omega).pow(3 * a + 11);
    // a middle bucket may not hide a skeleton clique past its cap, or
    // its pair palette would outgrow the geometric series
    for j in 1..=m {
        let members: VertexSet = comp.iter().filter(|v| buckets[*v] == j).cloned().collect();
        if members.is_empty() {
            continue;
        }
        let found = u64::from(oracle::clique_number(&skeleton.induced_subgraph(&members)?));
        if big(found).pow(m) * big(2).pow(j) > big(2).pow(m) * big(omega).pow(j) {
            return Err(SynthesisError::Invariant(format!(
                "bucket {j} holds a skeleton clique of {found}, past its cap"
            )));
        }
    }
    let mut out = Coloring::new();
    let mut offset: u64 = 0;
    let mut bucket_colors: Vec<u64> = vec![0; m as usize + 2];
    for j in 1..=m + 1 {
        let members: VertexSet = comp.iter().filter(|v| buckets[*v] == j).cloned().collect();
        if members.is_empty() {
            continue;
        }
        let frame = skeleton.induced_subgraph(&members)?;
        let (frame_col, frame_n) = oracle_color(&frame)?;
        let width = members.iter().map(|v| blocks[v].n).max().unwrap_or(0);
        let mut used: BTreeSet<ColorId> = BTreeSet::new();
        for v in &members {
            let code = frame_col.get(v).expect("frame coloring is total");
            for (x, c) in blocks[v].col.iter() {
                let color = offset + code * width + c;
                out.set(x.clone(), color);
                used.insert(color);
            }
        }
        bucket_colors[j as usize] = used.len() as u64;
        offset += frame_n * width;
    }
    let spent = bucket_colors.iter().map(|c| big(*c)).sum::<BigUint>();
    if spent > budget {
        return Err(SynthesisError::Invariant(
            "bucket palettes overran the certified total".to_string(),
        ));
    }
    // heavy blocks go one at a time, biggest first, each reusing the
    // smallest colors its realized neighborhood leaves open
    let mut order = heavy;
    order.sort_by(|u, w| blocks[w].omega_i.cmp(&blocks[u].omega_i).then_with(|| u.cmp(w)));
    let mut records: Vec<HeavyBlock> = Vec::new();
    for v in order {
        let info = &blocks[&v];
        let s = near_bucket(omega, info.omega_i, m)?;
        let mut forbidden: BTreeSet<ColorId> = BTreeSet::new();
        for u in skeleton.neighbors(&v) {
            let j = buckets[u];
            if j != m + 1 && j < s {
                return Err(SynthesisError::Invariant(format!(
                    "heavy block {v} touches bucket {j}, nearer than its horizon {s}"
                )));
            }
            for (x, _) in blocks[u].col.iter() {
                forbidden.insert(out.get(x).expect("bucket phase colored the neighborhood"));
            }
        }
        let mut chosen: Vec<ColorId> = Vec::with_capacity(info.n as usize);
        let mut candidate: ColorId = 0;
        while (chosen.len() as u64) < info.n {
            if !forbidden.contains(&candidate) {
                chosen.push(candidate);
            }
            candidate += 1;
        }
        for (x, c) in info.col.iter() {
            out.set(x.clone(), chosen[c as usize]);
        }
        let mut ledger = info.n;
        for j in s..=m {
            ledger += bucket_colors[j as usize];
        }
        ledger += bucket_colors[m as usize + 1];
        if big(ledger) > budget {
            return Err(SynthesisError::Invariant(format!(
                "heavy block {v} can see {ledger} colors, past the certified total"
            )));
        }
        records.push(HeavyBlock {
            vertex: v.clone(),
            omega_i: info.omega_i,
            s_i: s,
            gap: Rational::new(BigInt::from(omega - info.omega_i), BigInt::from(omega)),
            colors_on_block: info.n,
            ledger,
        });
    }
    nodes.push(PolyNode {
        path: path.to_string(),
        component,
        omega,
        m,
        buckets,
        bucket_colors,
        blocks: records,
    });
    Ok(out)
}

struct BlockInfo {
    col: Coloring,
    n: u64,
    omega_i: u64,
}

/// Smallest m >= 1 with (5/4)^m <= omega/2 <= (3/2)^m, tested as
/// 5^m * 2 <= 4^m * omega <= 6^m * 2 in exact integers. Defined for
/// omega >= 4, where the first m passing the upper fence also passes
/// the lower one.
fn alpha_steps(omega: u64) -> u32 {
    debug_assert!(omega >= 4);
    let mut m = 1u32;
    loop {
        let lower_ok = big(5).pow(m) * big(2) <= big(4).pow(m) * big(omega);
        let upper_ok = big(4).pow(m) * big(omega) <= big(6).pow(m) * big(2);
        if lower_ok && upper_ok {
            return m;
        }
        m += 1;
        assert!(m <= 128, "geometric step search diverged");
    }
}

/// Bucket of a block: 0 when 2*omega_i > omega (heavy), m+1 when
/// omega_i == 1, otherwise the smallest j >= 1 with
/// (2 omega_i)^m omega^j > omega^m 2^j, the m-th power of the defining
/// comparison against omega / (2 alpha^j).
fn bucket_index(omega: u64, omega_i: u64, m: u32) -> Result<u32, SynthesisError> {
    if 2 * omega_i > omega {
        return Ok(0);
    }
    if omega_i == 1 {
        return Ok(m + 1);
    }
    let lhs = big(2 * omega_i).pow(m);
    let rhs = big(omega).pow(m);
    for j in 1..=m {
        if lhs.clone() * big(omega).pow(j) > rhs.clone() * big(2).pow(j) {
            return Ok(j);
        }
    }
    Err(SynthesisError::Invariant(format!(
        "no bucket admits a block of clique number {omega_i} under {omega}"
    )))
}

/// Smallest s >= 1 with omega / (2 alpha^s) < omega - omega_i, again as
/// an exact m-th power comparison. Blocks in buckets nearer than s are
/// too big to sit beside a heavy block of clique number omega_i.
fn near_bucket(omega: u64, omega_i: u64, m: u32) -> Result<u32, SynthesisError> {
    let gap = big(omega - omega_i).pow(m);
    for s in 1..=m + 1 {
        if big(omega).pow(m) * big(2).pow(s) < big(2).pow(m) * gap.clone() * big(omega).pow(s) {
            return Ok(s);
        }
    }
    Err(SynthesisError::Invariant(format!(
        "no bucket horizon for a block of clique number {omega_i} under {omega}"
    )))
}

// ---------------------------------------------------------------------------
// Supermultiplicative synthesis.

/// Colors a substitution tree against f(x) * x^(log2 x), where f must
/// be supermultiplicative and non-decreasing (both are verified on the
/// relevant range first). Blocks of equal clique number share a pair
/// palette; the heavy blocks, being pairwise non-adjacent, all share
/// one region at the end.
pub fn color_supermult(
    t: &OpTree,
    f: &BoundFn,
) -> Result<(Coloring, Certificate), SynthesisError> {
    f.validate()?;
    reject_glue(t)?;
    let g = realize(t)?;
    let omega = tree_clique_number(t);
    let horizon = omega.max(4);
    if !bounds::is_non_decreasing_on(f, horizon)? {
        return Err(SynthesisError::BadConstraint(format!(
            "{f} is not non-decreasing up to {horizon}"
        )));
    }
    if !bounds::check_supermultiplicative(f, horizon)? {
        return Err(SynthesisError::BadConstraint(format!(
            "{f} is not supermultiplicative up to {horizon}"
        )));
    }
    let coloring = supermult_node(t, f, "/")?;
    assert_proper(&g, &coloring)?;
    let bound = supermult_star_bound(f.clone());
    let colors_used = coloring.colors_used();
    let verdict = check_value(&bound, omega, colors_used, MAX_PRECISION_BITS)?;
    Ok((coloring, Certificate { bound, omega, colors_used, verdict, trace: None }))
}

fn supermult_node(t: &OpTree, f: &BoundFn, path: &str) -> Result<Coloring, SynthesisError> {
    match t {
        OpTree::Leaf { graph, .. } => {
            let (col, n) = oracle_color(graph)?;
            interval_leaf_check(f, u64::from(oracle::clique_number(graph)), n, path)?;
            Ok(col)
        }
        OpTree::Substitute { base, children } => {
            let mut out = Coloring::new();
            for comp in base.components() {
                let col = supermult_component(base, children, &comp, f, path)?;
                absorb(&mut out, &col);
            }
            Ok(out)
        }
        OpTree::CliqueGlue { .. } | OpTree::KGlue { .. } => {
            unreachable!("glue nodes rejected before synthesis")
        }
    }
}

fn supermult_component(
    base: &Graph,
    children: &BTreeMap<VertexId, OpTree>,
    comp: &VertexSet,
    f: &BoundFn,
    path: &str,
) -> Result<Coloring, SynthesisError> {
    let child_of =
        |v: &VertexId| children.get(v).expect("validated tree has a child per base vertex");
    if comp.len() == 1 {
        let v = comp.iter().next().expect("components are nonempty");
        let sub = supermult_node(child_of(v), f, &join_path(path, &format!("child({v})")))?;
        let (sub, _) = renumber(&sub);
        return Ok(scoped_coloring(&sub, v.as_str()));
    }
    let skeleton = base.induced_subgraph(comp)?;
    let weights: BTreeMap<VertexId, u64> =
        comp.iter().map(|v| (v.clone(), tree_clique_number(child_of(v)))).collect();
    let omega = oracle::max_weight_clique(&skeleton, &weights);
    let mut blocks: BTreeMap<VertexId, BlockInfo> = BTreeMap::new();
    for v in comp {
        let child_path = join_path(path, &format!("child({v})"));
        let sub = supermult_node(child_of(v), f, &child_path)?;
        let (sub, n) = renumber(&sub);
        let omega_i = weights[v];
        if omega_i >= omega {
            return Err(SynthesisError::Invariant(format!(
                "block {v} alone carries clique number {omega_i} of {omega}"
            )));
        }
        blocks.insert(v.clone(), BlockInfo { col: scoped_coloring(&sub, v.as_str()), n, omega_i });
    }
    let mut out = Coloring::new();
    let mut offset: u64 = 0;
    for j in 1..=omega / 2 {
        let members: VertexSet =
            comp.iter().filter(|v| blocks[*v].omega_i == j).cloned().collect();
        if members.is_empty() {
            continue;
        }
        let frame = skeleton.induced_subgraph(&members)?;
        let (frame_col, frame_n) = oracle_color(&frame)?;
        let width = members.iter().map(|v| blocks[v].n).max().unwrap_or(0);
        for v in &members {
            let code = frame_col.get(v).expect("frame coloring is total");
            for (x, c) in blocks[v].col.iter() {
                out.set(x.clone(), offset + code * width + c);
            }
        }
        offset += frame_n * width;
    }
    // everything past omega/2 is pairwise non-adjacent (two such blocks
    // beside each other would beat the weighted clique number), so one
    // shared region suffices for all of it
    let heavy: Vec<VertexId> =
        comp.iter().filter(|v| 2 * blocks[*v].omega_i > omega).cloned().collect();
    for (i, u) in heavy.iter().enumerate() {
        for w in &heavy[i + 1..] {
            if skeleton.has_edge(u, w) {
                return Err(SynthesisError::Invariant(format!(
                    "heavy blocks {u} and {w} are adjacent, contradicting the weighted clique number"
                )));
            }
        }
    }
    for v in &heavy {
        for (x, c) in blocks[v].col.iter() {
            out.set(x.clone(), offset + c);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Merging colored sides of a clique overlap.

/// Combines proper colorings of two graph sides that overlap exactly in
/// a clique, relabeling the right side so the overlap agrees and the
/// total stays at max(left, right) colors. The graph must have no edge
/// between the private parts of the two sides.
pub fn merge_on_clique(
    g: &Graph,
    left: &Coloring,
    right: &Coloring,
    shared: &VertexSet,
) -> Result<Coloring, SynthesisError> {
    let lv: VertexSet = left.domain().cloned().collect();
    let rv: VertexSet = right.domain().cloned().collect();
    let overlap: VertexSet = lv.intersection(&rv).cloned().collect();
    if overlap != *shared {
        return Err(SynthesisError::MergeRejected(
            "the shared set must be exactly where the two colorings overlap".to_string(),
        ));
    }
    let union: VertexSet = lv.union(&rv).cloned().collect();
    if union != g.vertex_set() {
        return Err(SynthesisError::MergeRejected(
            "the two colorings must cover the graph between them".to_string(),
        ));
    }
    if !g.induced_subgraph(shared)?.is_complete() {
        return Err(SynthesisError::MergeRejected(
            "the shared set must induce a clique".to_string(),
        ));
    }
    for (u, v) in g.edges() {
        let u_left_only = lv.contains(u) && !rv.contains(u);
        let u_right_only = rv.contains(u) && !lv.contains(u);
        let v_left_only = lv.contains(v) && !rv.contains(v);
        let v_right_only = rv.contains(v) && !lv.contains(v);
        if (u_left_only && v_right_only) || (u_right_only && v_left_only) {
            return Err(SynthesisError::MergeRejected(format!(
                "edge {u} ~ {v} crosses between the private sides"
            )));
        }
    }
    for (col, dom, name) in [(left, &lv, "left"), (right, &rv, "right")] {
        if let Some((u, v)) = g.induced_subgraph(dom)?.improper_edge(col)? {
            return Err(SynthesisError::MergeRejected(format!(
                "the {name} coloring repeats a color across the edge {u} ~ {v}"
            )));
        }
    }
    // a proper coloring is injective on a clique, so the overlap defines
    // a partial bijection of color names; extend it by reusing the left
    // palette smallest-first, then minting fresh colors
    let mut relabel: BTreeMap<ColorId, ColorId> = BTreeMap::new();
    for v in shared {
        relabel.insert(
            right.get(v).expect("overlap is inside the right domain"),
            left.get(v).expect("overlap is inside the left domain"),
        );
    }
    let left_palette = left.color_set();
    let mut taken: BTreeSet<ColorId> = relabel.values().copied().collect();
    let mut reusable = left_palette.iter().copied();
    let mut fresh: ColorId = 0;
    for c in right.color_set() {
        if relabel.contains_key(&c) {
            continue;
        }
        let target = loop {
            match reusable.next() {
                Some(candidate) if taken.contains(&candidate) => continue,
                Some(candidate) => break candidate,
                None => {
                    let candidate = fresh;
                    fresh += 1;
                    if !left_palette.contains(&candidate) && !taken.contains(&candidate) {
                        break candidate;
                    }
                }
            }
        };
        taken.insert(target);
        relabel.insert(c, target);
    }
    let mut merged = left.clone();
    for (v, c) in right.iter() {
        merged.set(v.clone(), relabel[&c]);
    }
    assert_proper(g, &merged)?;
    let expected = left.colors_used().max(right.colors_used());
    if merged.colors_used() != expected {
        return Err(SynthesisError::Invariant(format!(
            "merge produced {} colors, expected {expected}",
            merged.colors_used()
        )));
    }
    Ok(merged)
}

// ---------------------------------------------------------------------------
// Gluing synthesis with constraint passing.

/// Colors a tree of leaves glued along at most k shared vertices, using
/// at most f(omega) + 2k^2 - 1 colors. At every glue node the side with
/// more constraint weight goes first; its overlap colors become pins
/// for the other side, and the budget arithmetic keeps every leaf
/// solvable inside the fixed palette.
pub fn color_kglue(
    t: &OpTree,
    f: &BoundFn,
    constraint: Option<&ColoringConstraint>,
) -> Result<(Coloring, Certificate), SynthesisError> {
    f.validate()?;
    require_glue_tree(t)?;
    let g = realize(t)?;
    let omega = tree_clique_number(t);
    let k = t.max_glue_width().unwrap_or(1).max(1);
    if !bounds::is_non_decreasing_on(f, omega.max(1))? {
        return Err(SynthesisError::BadConstraint(format!(
            "{f} is not non-decreasing up to {omega}"
        )));
    }
    let slack = 2 * u64::from(k) * u64::from(k) - 1;
    let floor = floor_eval(f, omega, MAX_PRECISION_BITS)?
        .ok_or_else(|| SynthesisError::Inconclusive { bound: f.to_string(), at: omega })?;
    let floor = u64::try_from(&floor)
        .ok()
        .filter(|v| *v <= PALETTE_LIMIT)
        .ok_or_else(|| {
            SynthesisError::BadConstraint(format!(
                "a palette of {floor} colors is past the {PALETTE_LIMIT} cap"
            ))
        })?;
    let need = floor + slack;
    let top = match constraint {
        None => ColoringConstraint::open(need),
        Some(c) => {
            c.check(&g)?;
            if (c.palette.len() as u64) < need {
                return Err(SynthesisError::BadConstraint(format!(
                    "palette holds {} colors, the construction needs {need}",
                    c.palette.len()
                )));
            }
            if c.budget(k) > slack {
                return Err(SynthesisError::BadConstraint(format!(
                    "constraint budget {} exceeds the solvable limit {slack}",
                    c.budget(k)
                )));
            }
            c.clone()
        }
    };
    let mut trace = ConstraintTrace { k, nodes: Vec::new() };
    let coloring = kglue_node(t, f, k, &top, "/", &mut trace.nodes)?;
    for (v, c) in top.precoloring.iter() {
        if coloring.get(v) != Some(c) {
            return Err(SynthesisError::Invariant(format!(
                "output recolors the pinned vertex {v}"
            )));
        }
    }
    for (v, banned) in &top.forbidden {
        if let Some(c) = coloring.get(v) {
            if banned.contains(&c) {
                return Err(SynthesisError::Invariant(format!(
                    "output gives {v} a forbidden color"
                )));
            }
        }
    }
    assert_proper(&g, &coloring)?;
    let bound = kglue_bound(f.clone(), k);
    let colors_used = coloring.colors_used();
    let verdict = check_value(&bound, omega, colors_used, MAX_PRECISION_BITS)?;
    let trace = Some(TraceData::Constraint(trace));
    Ok((coloring, Certificate { bound, omega, colors_used, verdict, trace }))
}

fn kglue_node(
    t: &OpTree,
    f: &BoundFn,
    k: u32,
    con: &ColoringConstraint,
    path: &str,
    nodes: &mut Vec<ConstraintNode>,
) -> Result<Coloring, SynthesisError> {
    let slack = 2 * u64::from(k) * u64::from(k) - 1;
    let budget = con.budget(k);
    if budget > slack {
        return Err(SynthesisError::Invariant(format!(
            "constraint budget {budget} at {path} exceeds {slack}"
        )));
    }
    match t {
        OpTree::Leaf { graph, .. } => {
            nodes.push(ConstraintNode {
                path: path.to_string(),
                budget,
                lighter_budget: None,
            });
            let pinned: VertexSet = con.precoloring.domain().cloned().collect();
            for v in &pinned {
                if !graph.has_vertex(v) {
                    return Err(SynthesisError::Invariant(format!(
                        "pinned vertex {v} escaped its leaf at {path}"
                    )));
                }
            }
            let chi = u64::from(oracle::chromatic_number(graph, Budget::new(u64::MAX))?);
            interval_leaf_check(f, u64::from(oracle::clique_number(graph)), chi, path)?;
            // one pooled ban set: pinned colors plus every forbidden
            // entry, subtracted from the palette wholesale
            let mut banned: BTreeSet<ColorId> = con.precoloring.iter().map(|(_, c)| c).collect();
            for set in con.forbidden.values() {
                banned.extend(set.iter().copied());
            }
            let open: Vec<ColorId> =
                con.palette.iter().copied().filter(|c| !banned.contains(c)).collect();
            let free: VertexSet =
                graph.vertices().filter(|v| !pinned.contains(*v)).cloned().collect();
            let rest = graph.induced_subgraph(&free)?;
            let (col, n) = oracle_color(&rest)?;
            if n > open.len() as u64 {
                return Err(SynthesisError::Invariant(format!(
                    "palette ran dry at {path}: {n} classes, {} open colors",
                    open.len()
                )));
            }
            let mut out = con.precoloring.clone();
            for (v, c) in col.iter() {
                out.set(v.clone(), open[c as usize]);
            }
            Ok(out)
        }
        OpTree::KGlue { left, right, shared, .. } => {
            let lv = left.vertex_set();
            let rv = right.vertex_set();
            let pinned: VertexSet = con.precoloring.domain().cloned().collect();
            let weigh = |private: &VertexSet| -> u64 {
                private
                    .iter()
                    .map(|v| {
                        if pinned.contains(v) {
                            u64::from(k)
                        } else {
                            con.forbidden.get(v).map_or(0, |s| s.len() as u64)
                        }
                    })
                    .sum()
            };
            let left_private: VertexSet = lv.difference(shared).cloned().collect();
            let right_private: VertexSet = rv.difference(shared).cloned().collect();
            let (wl, wr) = (weigh(&left_private), weigh(&right_private));
            // heavier private side first; ties keep tree order
            let left_first = wl >= wr;
            let (first, first_seg, first_vs, second, second_seg, second_private, lighter) =
                if left_first {
                    (left, "left", &lv, right, "right", &right_private, wr)
                } else {
                    (right, "right", &rv, left, "left", &left_private, wl)
                };
            nodes.push(ConstraintNode {
                path: path.to_string(),
                budget,
                lighter_budget: Some(lighter),
            });
            let cap = u64::from(k) * u64::from(k) - 1;
            if lighter > cap {
                return Err(SynthesisError::Invariant(format!(
                    "lighter side at {path} weighs {lighter}, over the {cap} cap"
                )));
            }
            let pinned_second: VertexSet =
                pinned.intersection(second_private).cloned().collect();
            if pinned_second.len() as u64 > u64::from(k) - 1 {
                return Err(SynthesisError::Invariant(format!(
                    "{} pins wait on the lighter side at {path}, k = {k}",
                    pinned_second.len()
                )));
            }
            // pins waiting on the far side leak into the overlap as bans
            let leak: BTreeSet<ColorId> = pinned_second
                .iter()
                .map(|v| con.precoloring.get(v).expect("pinned vertices carry colors"))
                .collect();
            let mut first_forbidden: BTreeMap<VertexId, BTreeSet<ColorId>> = BTreeMap::new();
            for v in first_vs.iter() {
                if pinned.contains(v) {
                    continue;
                }
                let mut set = con.forbidden.get(v).cloned().unwrap_or_default();
                if shared.contains(v) {
                    set.extend(leak.iter().copied());
                }
                if !set.is_empty() {
                    first_forbidden.insert(v.clone(), set);
                }
            }
            let first_con = ColoringConstraint {
                palette: con.palette.clone(),
                precoloring: con.precoloring.restricted(first_vs),
                forbidden: first_forbidden,
            };
            let first_col =
                kglue_node(first, f, k, &first_con, &join_path(path, first_seg), nodes)?;
            // hand the finished overlap to the second side as pins
            let mut second_pre = first_col.restricted(shared);
            for v in &pinned_second {
                second_pre.set(
                    v.clone(),
                    con.precoloring.get(v).expect("pinned vertices carry colors"),
                );
            }
            let second_graph = realize(second)?;
            let pre_dom: VertexSet = second_pre.domain().cloned().collect();
            if let Some((u, v)) =
                second_graph.induced_subgraph(&pre_dom)?.improper_edge(&second_pre)?
            {
                return Err(SynthesisError::Invariant(format!(
                    "handover precoloring collides across {u} ~ {v} at {path}"
                )));
            }
            let mut second_forbidden: BTreeMap<VertexId, BTreeSet<ColorId>> = BTreeMap::new();
            for v in second_private.iter() {
                if pinned.contains(v) {
                    continue;
                }
                if let Some(set) = con.forbidden.get(v) {
                    if !set.is_empty() {
                        second_forbidden.insert(v.clone(), set.clone());
                    }
                }
            }
            let second_con = ColoringConstraint {
                palette: con.palette.clone(),
                precoloring: second_pre,
                forbidden: second_forbidden,
            };
            let second_col =
                kglue_node(second, f, k, &second_con, &join_path(path, second_seg), nodes)?;
            let mut out = first_col;
            for (v, c) in second_col.iter() {
                if let Some(prev) = out.get(v) {
                    if prev != c {
                        return Err(SynthesisError::Invariant(format!(
                            "sides disagree on {v} at {path}"
                        )));
                    }
                }
                out.set(v.clone(), c);
            }
            Ok(out)
        }
        OpTree::Substitute { .. } | OpTree::CliqueGlue { .. } => {
            unreachable!("substitution nodes rejected before gluing synthesis")
        }
    }
}

// ---------------------------------------------------------------------------
// Reduction of clique gluing to plain substitution.

/// Collapses every clique-gluing region to its chromatically heaviest
/// glued piece (leftmost on ties), yielding an induced subgraph that a
/// gluing-free tree realizes with the same chromatic number. Returns
/// the witness graph and the identity embedding of its vertices into
/// the input's realization.
pub fn reduce_to_base(
    t: &OpTree,
) -> Result<(Graph, BTreeMap<VertexId, VertexId>), SynthesisError> {
    reject_kglue(t)?;
    let full = realize(t)?;
    if full.vertex_count() > REDUCTION_LIMIT {
        return Err(SynthesisError::ReductionTooLarge {
            got: full.vertex_count(),
            limit: REDUCTION_LIMIT,
        });
    }
    let mut cur = t.clone();
    while let Some(next) = collapse_one(&cur)? {
        cur = next;
    }
    let witness = realize(&cur)?;
    let embedding: BTreeMap<VertexId, VertexId> =
        witness.vertices().map(|v| (v.clone(), v.clone())).collect();
    Ok((witness, embedding))
}

/// One rewrite step: find the topmost gluing region (a maximal run of
/// glue nodes) and keep only its best piece. Regions are collapsed
/// wholesale because rewriting below a glue node could strip vertices
/// out of an ancestor's declared overlap; a region's root, by contrast,
/// sits under a substitution node or at the top, where a block may be
/// swapped for an equal-chromatic induced piece without side effects.
fn collapse_one(t: &OpTree) -> Result<Option<OpTree>, SynthesisError> {
    match t {
        OpTree::Leaf { .. } => Ok(None),
        OpTree::CliqueGlue { .. } => {
            let mut pieces = Vec::new();
            region_pieces(t, &mut pieces);
            let mut best: Option<(u32, &OpTree)> = None;
            for piece in pieces {
                let chi = oracle::chromatic_number(&realize(piece)?, Budget::new(u64::MAX))?;
                if best.as_ref().is_none_or(|(top, _)| chi > *top) {
                    best = Some((chi, piece));
                }
            }
            let (_, keep) = best.expect("a glue region has at least two pieces");
            Ok(Some(keep.clone()))
        }
        OpTree::Substitute { base, children } => {
            for (v, child) in children {
                if let Some(next) = collapse_one(child)? {
                    let rebuilt: Vec<(VertexId, OpTree)> = children
                        .iter()
                        .map(|(u, c)| {
                            (u.clone(), if u == v { next.clone() } else { c.clone() })
                        })
                        .collect();
                    return Ok(Some(OpTree::substitute(base.clone(), rebuilt)));
                }
            }
            Ok(None)
        }
        OpTree::KGlue { .. } => unreachable!("rejected before reduction"),
    }
}

fn region_pieces<'a>(t: &'a OpTree, out: &mut Vec<&'a OpTree>) {
    match t {
        OpTree::CliqueGlue { left, right, .. } => {
            region_pieces(left, out);
            region_pieces(right, out);
        }
        other => out.push(other),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing.

fn reject_glue(t: &OpTree) -> Result<(), SynthesisError> {
    match t {
        OpTree::Leaf { .. } => Ok(()),
        OpTree::Substitute { children, .. } => children.values().try_for_each(reject_glue),
        OpTree::CliqueGlue { .. } => Err(SynthesisError::UnsupportedNode {
            accepts: "substitution",
            found: "CliqueGlue",
        }),
        OpTree::KGlue { .. } => Err(SynthesisError::UnsupportedNode {
            accepts: "substitution",
            found: "KGlue",
        }),
    }
}

fn require_glue_tree(t: &OpTree) -> Result<(), SynthesisError> {
    match t {
        OpTree::Leaf { .. } => Ok(()),
        OpTree::KGlue { left, right, .. } => {
            require_glue_tree(left)?;
            require_glue_tree(right)
        }
        OpTree::Substitute { .. } => Err(SynthesisError::UnsupportedNode {
            accepts: "bounded-overlap gluing",
            found: "Substitute",
        }),
        OpTree::CliqueGlue { .. } => Err(SynthesisError::UnsupportedNode {
            accepts: "bounded-overlap gluing",
            found: "CliqueGlue",
        }),
    }
}

fn reject_kglue(t: &OpTree) -> Result<(), SynthesisError> {
    match t {
        OpTree::Leaf { .. } => Ok(()),
        OpTree::Substitute { children, .. } => children.values().try_for_each(reject_kglue),
        OpTree::CliqueGlue { left, right, .. } => {
            reject_kglue(left)?;
            reject_kglue(right)
        }
        OpTree::KGlue { .. } => Err(SynthesisError::UnsupportedNode {
            accepts: "substitution and clique-gluing",
            found: "KGlue",
        }),
    }
}

fn oracle_color(g: &Graph) -> Result<(Coloring, u64), SynthesisError> {
    let (col, chi) = oracle::optimal_coloring(g, Budget::new(u64::MAX))?;
    let (col, n) = renumber(&col);
    debug_assert_eq!(n, u64::from(chi));
    Ok((col, n))
}

/// Same coloring with classes renamed to 0..n-1, order preserving.
fn renumber(col: &Coloring) -> (Coloring, u64) {
    let classes = col.color_set();
    let index: BTreeMap<ColorId, u64> =
        classes.iter().enumerate().map(|(i, c)| (*c, i as u64)).collect();
    let mut out = Coloring::new();
    for (v, c) in col.iter() {
        out.set(v.clone(), index[&c]);
    }
    (out, classes.len() as u64)
}

fn scoped_coloring(col: &Coloring, prefix: &str) -> Coloring {
    let mut out = Coloring::new();
    for (v, c) in col.iter() {
        out.set(VertexId::scoped(prefix, v.as_str()), c);
    }
    out
}

fn absorb(dst: &mut Coloring, src: &Coloring) {
    for (v, c) in src.iter() {
        dst.set(v.clone(), c);
    }
}

fn assert_proper(g: &Graph, col: &Coloring) -> Result<(), SynthesisError> {
    match g.improper_edge(col) {
        Ok(None) => Ok(()),
        Ok(Some((u, v))) => Err(SynthesisError::Invariant(format!(
            "synthesized coloring repeats a color across the edge {u} ~ {v}"
        ))),
        Err(e) => Err(SynthesisError::Invariant(format!(
            "synthesized coloring does not match the graph: {e}"
        ))),
    }
}

fn interval_leaf_check(
    f: &BoundFn,
    omega: u64,
    chi: u64,
    path: &str,
) -> Result<(), SynthesisError> {
    match check_value(f, omega, chi, MAX_PRECISION_BITS)? {
        Verdict::Pass => Ok(()),
        Verdict::Fail => Err(SynthesisError::LeafBoundViolated {
            path: path.to_string(),
            chi,
            omega,
            bound: f.to_string(),
        }),
        Verdict::InconclusivePrecision => {
            Err(SynthesisError::Inconclusive { bound: f.to_string(), at: omega })
        }
    }
}

fn power_leaf_check(a: u32, path: &str, omega: u64, chi: u64) -> Result<(), SynthesisError> {
    if BigUint::from(chi) <= BigUint::from(omega).pow(a) {
        Ok(())
    } else {
        Err(SynthesisError::LeafBoundViolated {
            path: path.to_string(),
            chi,
            omega,
            bound: BoundFn::power(a).to_string(),
        })
    }
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ratio;

    fn leaf(g: Graph) -> OpTree {
        OpTree::leaf(g, "test")
    }

    fn complete_on(ids: &[&str]) -> Graph {
        let vs: Vec<VertexId> = ids.iter().map(|s| VertexId::from(*s)).collect();
        let mut edges = Vec::new();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                edges.push((vs[i].clone(), vs[j].clone()));
            }
        }
        Graph::new(vs, edges).unwrap()
    }

    fn vid(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn vset(ids: &[&str]) -> VertexSet {
        ids.iter().map(|s| vid(s)).collect()
    }

    // join(K2, K1) as a depth-1 tree: realize K3
    fn join_k2_k1() -> OpTree {
        OpTree::substitute(
            Graph::complete(2),
            vec![(vid("v0"), leaf(Graph::complete(2))), (vid("v1"), leaf(Graph::complete(1)))],
        )
    }

    // depth-2 tree realizing K4
    fn depth2_k4() -> OpTree {
        OpTree::substitute(
            Graph::complete(2),
            vec![(vid("v0"), join_k2_k1()), (vid("v1"), leaf(Graph::complete(1)))],
        )
    }

    // depth-2 tree realizing K5 (inner K4 from two K2 children)
    fn depth2_k5() -> OpTree {
        let inner = OpTree::substitute(
            Graph::complete(2),
            vec![(vid("v0"), leaf(Graph::complete(2))), (vid("v1"), leaf(Graph::complete(2)))],
        );
        OpTree::substitute(
            Graph::complete(2),
            vec![(vid("v0"), inner), (vid("v1"), leaf(Graph::complete(1)))],
        )
    }

    #[test]
    fn depth_handles_a_single_leaf() {
        let t = leaf(Graph::complete(3));
        let (col, cert) = color_by_depth(&t, &BoundFn::identity()).unwrap();
        assert_eq!(col.colors_used(), 3);
        assert_eq!(cert.omega, 3);
        assert_eq!(cert.colors_used, 3);
        assert_eq!(cert.verdict, Verdict::Pass);
        assert_eq!(cert.bound, BoundFn::identity());
        assert!(cert.trace.is_none());
    }

    #[test]
    fn depth_pairs_base_and_child_colors_on_a_cycle_blowup() {
        let t = OpTree::substitute(
            Graph::cycle(5),
            (0..5).map(|i| (vid(&format!("v{i}")), leaf(Graph::complete(2)))).collect(),
        );
        let f = bounds::parse_bound("poly(3,1)").unwrap();
        let (col, cert) = color_by_depth(&t, &f).unwrap();
        let g = realize(&t).unwrap();
        assert_eq!(g, Graph::cycle(5).lex_product(&Graph::complete(2)).unwrap());
        assert!(g.is_proper(&col).unwrap());
        assert_eq!(col.colors_used(), 6);
        assert_eq!(cert.omega, 4);
        // (x+3)^2 expands to poly(9,6,1), and 6 <= 49 certifies
        assert_eq!(cert.bound, bounds::parse_bound("poly(9,6,1)").unwrap());
        assert_eq!(cert.verdict, Verdict::Pass);
        let (chi_col, chi) = oracle::optimal_coloring(&g, Budget::new(u64::MAX)).unwrap();
        assert!(g.is_proper(&chi_col).unwrap());
        assert_eq!(chi, 5);
    }

    #[test]
    fn depth_rejects_glue_nodes_and_flags_leaf_violations() {
        let shared = vset(&["v0"]);
        let glued = OpTree::clique_glue(
            leaf(complete_on(&["v0", "v1", "v2"])),
            leaf(complete_on(&["v0", "w1", "w2"])),
            shared,
        );
        assert!(matches!(
            color_by_depth(&glued, &BoundFn::identity()),
            Err(SynthesisError::UnsupportedNode { found: "CliqueGlue", .. })
        ));

        let odd_hole = leaf(Graph::cycle(5));
        match color_by_depth(&odd_hole, &BoundFn::identity()) {
            Err(SynthesisError::LeafBoundViolated { path, chi, omega, .. }) => {
                assert_eq!(path, "/");
                assert_eq!(chi, 3);
                assert_eq!(omega, 2);
            }
            other => panic!("expected a leaf bound violation, got {other:?}"),
        }
    }

    #[test]
    fn geometric_bucket_arithmetic_matches_hand_calculations() {
        assert_eq!(alpha_steps(4), 2);
        assert_eq!(alpha_steps(5), 3);
        assert_eq!(alpha_steps(6), 3);
        assert_eq!(alpha_steps(8), 4);
        // (2*2)^2 * 4^1 = 64 > 32 = 4^2 * 2^1, so the block lands in bucket 1
        assert_eq!(bucket_index(4, 2, 2).unwrap(), 1);
        assert_eq!(bucket_index(4, 1, 2).unwrap(), 3);
        assert_eq!(bucket_index(4, 3, 2).unwrap(), 0);
        assert_eq!(near_bucket(6, 5, 3).unwrap(), 4);
        assert_eq!(near_bucket(8, 5, 4).unwrap(), 1);
    }

    #[test]
    fn poly_runs_the_bucket_construction_on_a_deep_join() {
        // join(K5, K1) = K6 at substitution depth 3
        let t = OpTree::substitute(
            Graph::complete(2),
            vec![(vid("v0"), depth2_k5()), (vid("v1"), leaf(Graph::complete(1)))],
        );
        let (col, cert) = color_poly(&t, 1).unwrap();
        assert_eq!(col.colors_used(), 6);
        assert_eq!(cert.omega, 6);
        assert_eq!(cert.verdict, Verdict::Pass);
        assert_eq!(cert.bound, poly_star_bound(1));
        let Some(TraceData::Poly(trace)) = &cert.trace else {
            panic!("poly synthesis must leave a poly trace")
        };
        assert_eq!(trace.a, 1);
        assert_eq!(trace.nodes.len(), 1);
        let node = &trace.nodes[0];
        assert_eq!(node.path, "/");
        assert_eq!(node.omega, 6);
        assert_eq!(node.m, 3);
        assert_eq!(node.bucket_colors, vec![0, 0, 0, 0, 1]);
        assert_eq!(node.buckets[&vid("v0")], 0);
        assert_eq!(node.buckets[&vid("v1")], 4);
        assert_eq!(node.blocks.len(), 1);
        let block = &node.blocks[0];
        assert_eq!(block.vertex, vid("v0"));
        assert_eq!(block.omega_i, 5);
        assert_eq!(block.s_i, 4);
        assert_eq!(block.gap, ratio(1, 6));
        assert_eq!(block.colors_on_block, 5);
        assert_eq!(block.ledger, 6);
    }

    #[test]
    fn poly_places_a_middle_bucket_next_to_a_heavy_block() {
        // join(K5, K3) = K8; the K3 block lands in bucket 1 and its
        // colors are exactly what the heavy block must avoid
        let t = OpTree::substitute(
            Graph::complete(2),
            vec![(vid("v0"), depth2_k5()), (vid("v1"), leaf(Graph::complete(3)))],
        );
        let (col, cert) = color_poly(&t, 1).unwrap();
        assert_eq!(col.colors_used(), 8);
        assert_eq!(cert.omega, 8);
        assert_eq!(cert.verdict, Verdict::Pass);
        let Some(TraceData::Poly(trace)) = &cert.trace else { panic!("missing trace") };
        let node = &trace.nodes[0];
        assert_eq!(node.m, 4);
        assert_eq!(node.bucket_colors, vec![0, 3, 0, 0, 0, 0]);
        assert_eq!(node.buckets[&vid("v1")], 1);
        let block = &node.blocks[0];
        assert_eq!(block.s_i, 1);
        assert_eq!(block.ledger, 8);
        let g = realize(&t).unwrap();
        assert_eq!(oracle::chromatic_number(&g, Budget::new(u64::MAX)).unwrap(), 8);
    }

    #[test]
    fn poly_reuses_colors_across_anticomplete_heavy_blocks() {
        let t = OpTree::substitute(
            Graph::path(3),
            vec![
                (vid("v0"), depth2_k4()),
                (vid("v1"), leaf(Graph::complete(1))),
                (vid("v2"), depth2_k4()),
            ],
        );
        let (col, cert) = color_poly(&t, 1).unwrap();
        assert_eq!(col.colors_used(), 5);
        assert_eq!(cert.omega, 5);
        assert_eq!(cert.verdict, Verdict::Pass);
        let Some(TraceData::Poly(trace)) = &cert.trace else { panic!("missing trace") };
        let node = &trace.nodes[0];
        assert_eq!(node.m, 3);
        assert_eq!(node.blocks.len(), 2);
        for block in &node.blocks {
            assert_eq!(block.omega_i, 4);
            assert_eq!(block.s_i, 4);
            assert_eq!(block.colors_on_block, 4);
            assert_eq!(block.ledger, 5);
        }
        // both heavy blocks sit beside only the weight-one block, so
        // they draw the same four colors
        let colors_of = |prefix: &str| -> BTreeSet<ColorId> {
            col.iter()
                .filter(|(v, _)| v.as_str().starts_with(prefix))
                .map(|(_, c)| c)
                .collect()
        };
        assert_eq!(colors_of("v0/"), colors_of("v2/"));
        assert_eq!(colors_of("v0/").len(), 4);
    }

    #[test]
    fn poly_falls_back_to_pair_codes_on_shallow_or_sparse_trees() {
        let t = OpTree::substitute(
            Graph::cycle(5),
            (0..5).map(|i| (vid(&format!("v{i}")), leaf(Graph::complete(1)))).collect(),
        );
        let (col, cert) = color_poly(&t, 1).unwrap();
        assert_eq!(col.colors_used(), 3);
        assert_eq!(cert.omega, 2);
        assert_eq!(cert.verdict, Verdict::Pass);
        let Some(TraceData::Poly(trace)) = &cert.trace else { panic!("missing trace") };
        assert!(trace.nodes.is_empty());

        assert!(matches!(
            color_poly(&t, 0),
            Err(SynthesisError::BadConstraint(_))
        ));

        // a pentagon leaf breaks chi <= omega^1, and the path names it
        let nested = OpTree::substitute(
            Graph::complete(2),
            vec![
                (vid("v0"), leaf(Graph::cycle(5))),
                (vid("v1"), leaf(Graph::complete(1))),
            ],
        );
        match color_poly(&nested, 1) {
            Err(SynthesisError::LeafBoundViolated { path, chi, omega, .. }) => {
                assert_eq!(path, "/child(v0)");
                assert_eq!(chi, 3);
                assert_eq!(omega, 2);
            }
            other => panic!("expected a leaf bound violation, got {other:?}"),
        }
    }

    #[test]
    fn supermult_colors_a_cycle_blowup_within_the_star_bound() {
        let t = OpTree::substitute(
            Graph::cycle(5),
            (0..5).map(|i| (vid(&format!("v{i}")), leaf(Graph::complete(2)))).collect(),
        );
        let f = bounds::parse_bound("2^(1*(x-1))").unwrap();
        let (col, cert) = color_supermult(&t, &f).unwrap();
        assert_eq!(col.colors_used(), 6);
        assert_eq!(cert.omega, 4);
        assert_eq!(cert.verdict, Verdict::Pass);
        // f(4) * 4^(log2 4) = 8 * 16 evaluates exactly at a power of two
        let window = cert.bound.eval(4).unwrap();
        assert!(window.is_point());
        assert_eq!(*window.lo(), ratio(128, 1));
    }

    #[test]
    fn supermult_shares_one_region_across_heavy_blocks() {
        let t = OpTree::substitute(
            Graph::path(3),
            vec![
                (vid("v0"), leaf(Graph::complete(3))),
                (vid("v1"), leaf(Graph::complete(1))),
                (vid("v2"), leaf(Graph::complete(3))),
            ],
        );
        let f = bounds::parse_bound("2^(1*(x-1))").unwrap();
        let (col, cert) = color_supermult(&t, &f).unwrap();
        assert_eq!(col.colors_used(), 4);
        assert_eq!(cert.verdict, Verdict::Pass);
        let colors_of = |prefix: &str| -> BTreeSet<ColorId> {
            col.iter()
                .filter(|(v, _)| v.as_str().starts_with(prefix))
                .map(|(_, c)| c)
                .collect()
        };
        assert_eq!(colors_of("v0/"), colors_of("v2/"));

        // x + 1 fails supermultiplicativity at 2 * 2 (9 > 5)
        let g = bounds::parse_bound("poly(1,1)").unwrap();
        assert!(matches!(
            color_supermult(&t, &g),
            Err(SynthesisError::BadConstraint(_))
        ));
    }

    #[test]
    fn merge_relabels_the_right_side_onto_the_shared_clique() {
        // K3 on {a,b,c} and K4 on {b,c,d,e} glued along the edge bc
        let mut vs = vec![vid("a"), vid("b"), vid("c"), vid("d"), vid("e")];
        vs.sort();
        let mut edges = vec![
            (vid("a"), vid("b")),
            (vid("a"), vid("c")),
            (vid("b"), vid("c")),
        ];
        for pair in [("b", "d"), ("b", "e"), ("c", "d"), ("c", "e"), ("d", "e")] {
            edges.push((vid(pair.0), vid(pair.1)));
        }
        let g = Graph::new(vs, edges).unwrap();
        let mut left = Coloring::new();
        left.set(vid("a"), 0);
        left.set(vid("b"), 1);
        left.set(vid("c"), 2);
        let mut right = Coloring::new();
        right.set(vid("b"), 0);
        right.set(vid("c"), 1);
        right.set(vid("d"), 2);
        right.set(vid("e"), 3);
        let merged = merge_on_clique(&g, &left, &right, &vset(&["b", "c"])).unwrap();
        assert_eq!(merged.colors_used(), 4);
        assert!(g.is_proper(&merged).unwrap());
        assert_eq!(merged.get(&vid("b")), Some(1));
        assert_eq!(merged.get(&vid("c")), Some(2));
    }

    #[test]
    fn merge_accepts_empty_overlaps_and_rejects_bad_geometry() {
        let g = Graph::complete(2).disjoint_union(&Graph::complete(2).scoped("r")).unwrap();
        let mut left = Coloring::new();
        left.set(vid("v0"), 0);
        left.set(vid("v1"), 1);
        let mut right = Coloring::new();
        right.set(vid("r/v0"), 5);
        right.set(vid("r/v1"), 9);
        let merged = merge_on_clique(&g, &left, &right, &VertexSet::new()).unwrap();
        assert_eq!(merged.colors_used(), 2);

        // shared set that is not the actual overlap
        assert!(matches!(
            merge_on_clique(&g, &left, &right, &vset(&["v0"])),
            Err(SynthesisError::MergeRejected(_))
        ));

        // overlap of two non-adjacent cycle vertices is not a clique
        let c4 = Graph::cycle(4);
        let mut cl = Coloring::new();
        cl.set(vid("v0"), 0);
        cl.set(vid("v1"), 1);
        cl.set(vid("v2"), 0);
        let mut cr = Coloring::new();
        cr.set(vid("v0"), 0);
        cr.set(vid("v3"), 1);
        cr.set(vid("v2"), 0);
        assert!(matches!(
            merge_on_clique(&c4, &cl, &cr, &vset(&["v0", "v2"])),
            Err(SynthesisError::MergeRejected(_))
        ));

        // private sides joined by an edge cannot merge independently
        let k2 = Graph::complete(2);
        let mut single_l = Coloring::new();
        single_l.set(vid("v0"), 0);
        let mut single_r = Coloring::new();
        single_r.set(vid("v1"), 0);
        assert!(matches!(
            merge_on_clique(&k2, &single_l, &single_r, &VertexSet::new()),
            Err(SynthesisError::MergeRejected(_))
        ));
    }

    #[test]
    fn kglue_colors_two_triangles_through_a_cut_vertex() {
        let t = OpTree::k_glue(
            1,
            leaf(complete_on(&["v0", "v1", "v2"])),
            leaf(complete_on(&["v0", "w1", "w2"])),
            vset(&["v0"]),
        );
        let (col, cert) = color_kglue(&t, &BoundFn::identity(), None).unwrap();
        assert_eq!(col.colors_used(), 3);
        assert_eq!(cert.omega, 3);
        assert_eq!(cert.bound, kglue_bound(BoundFn::identity(), 1));
        assert_eq!(cert.verdict, Verdict::Pass);
        let Some(TraceData::Constraint(trace)) = &cert.trace else {
            panic!("gluing synthesis must leave a constraint trace")
        };
        assert_eq!(trace.k, 1);
        let seen: Vec<(&str, u64, Option<u64>)> = trace
            .nodes
            .iter()
            .map(|n| (n.path.as_str(), n.budget, n.lighter_budget))
            .collect();
        assert_eq!(
            seen,
            vec![("/", 0, Some(0)), ("/left", 0, None), ("/right", 1, None)]
        );
    }

    #[test]
    fn kglue_extends_a_caller_constraint() {
        let t = OpTree::k_glue(
            1,
            leaf(complete_on(&["v0", "v1", "v2"])),
            leaf(complete_on(&["v0", "w1", "w2"])),
            vset(&["v0"]),
        );
        let mut pre = Coloring::new();
        pre.set(vid("v1"), 10);
        let con = ColoringConstraint {
            palette: [10, 20, 30, 40].into_iter().collect(),
            precoloring: pre,
            forbidden: BTreeMap::new(),
        };
        let (col, cert) = color_kglue(&t, &BoundFn::identity(), Some(&con)).unwrap();
        assert_eq!(col.get(&vid("v1")), Some(10));
        assert!(col.color_set().is_subset(&con.palette));
        assert_eq!(col.colors_used(), 3);
        assert_eq!(cert.verdict, Verdict::Pass);

        // palette too small for f(omega) + 2k^2 - 1 = 4
        let small = ColoringConstraint::open(3);
        assert!(matches!(
            color_kglue(&t, &BoundFn::identity(), Some(&small)),
            Err(SynthesisError::BadConstraint(_))
        ));

        // two pins cost 2 > 2k^2 - 1 = 1
        let mut heavy_pre = Coloring::new();
        heavy_pre.set(vid("v1"), 0);
        heavy_pre.set(vid("w1"), 1);
        let heavy = ColoringConstraint {
            palette: (0..10).collect(),
            precoloring: heavy_pre,
            forbidden: BTreeMap::new(),
        };
        assert!(matches!(
            color_kglue(&t, &BoundFn::identity(), Some(&heavy)),
            Err(SynthesisError::BadConstraint(_))
        ));
    }

    #[test]
    fn kglue_walks_a_chain_heavier_side_first() {
        let inner = OpTree::k_glue(
            1,
            leaf(complete_on(&["a0", "a1", "s1"])),
            leaf(complete_on(&["s1", "b1", "s2"])),
            vset(&["s1"]),
        );
        let t = OpTree::k_glue(1, inner, leaf(complete_on(&["s2", "c1", "c2"])), vset(&["s2"]));
        let (col, cert) = color_kglue(&t, &BoundFn::identity(), None).unwrap();
        assert_eq!(col.colors_used(), 3);
        assert_eq!(cert.verdict, Verdict::Pass);
        let Some(TraceData::Constraint(trace)) = &cert.trace else { panic!("missing trace") };
        let paths: Vec<&str> = trace.nodes.iter().map(|n| n.path.as_str()).collect();
        assert_eq!(paths, vec!["/", "/left", "/left/left", "/left/right", "/right"]);
        for node in &trace.nodes {
            assert!(node.budget <= 1);
            assert!(node.lighter_budget.unwrap_or(0) == 0);
        }
    }

    #[test]
    fn kglue_handles_a_two_vertex_overlap() {
        let t = OpTree::k_glue(
            2,
            leaf(complete_on(&["s0", "s1", "a", "b"])),
            leaf(complete_on(&["s0", "s1", "c", "d"])),
            vset(&["s0", "s1"]),
        );
        let (col, cert) = color_kglue(&t, &BoundFn::identity(), None).unwrap();
        assert_eq!(col.colors_used(), 4);
        assert_eq!(cert.omega, 4);
        assert_eq!(cert.verdict, Verdict::Pass);
        // identity bound at omega 4 with k = 2 allows 4 + 7 colors
        assert_eq!(*cert.bound.eval(4).unwrap().lo(), ratio(11, 1));
    }

    #[test]
    fn kglue_rejects_substitution_trees() {
        assert!(matches!(
            color_kglue(&join_k2_k1(), &BoundFn::identity(), None),
            Err(SynthesisError::UnsupportedNode { found: "Substitute", .. })
        ));
        let glued = OpTree::clique_glue(
            leaf(complete_on(&["v0", "v1"])),
            leaf(complete_on(&["v0", "w1"])),
            vset(&["v0"]),
        );
        assert!(matches!(
            color_kglue(&glued, &BoundFn::identity(), None),
            Err(SynthesisError::UnsupportedNode { found: "CliqueGlue", .. })
        ));
    }

    #[test]
    fn reduce_keeps_the_heavier_glued_piece() {
        // base K2 joins a single vertex with a bowtie; the kept triangle
        // turns the realization into K4 with the same chromatic number
        let bowtie = OpTree::clique_glue(
            leaf(complete_on(&["x", "y", "z"])),
            leaf(complete_on(&["x", "p", "q"])),
            vset(&["x"]),
        );
        let t = OpTree::substitute(
            Graph::complete(2),
            vec![(vid("v0"), leaf(Graph::complete(1))), (vid("v1"), bowtie)],
        );
        let full = realize(&t).unwrap();
        let (witness, embedding) = reduce_to_base(&t).unwrap();
        assert_eq!(witness.vertex_count(), 4);
        assert_eq!(witness, full.induced_subgraph(&witness.vertex_set()).unwrap());
        assert!(witness.has_vertex(&vid("v1/x")));
        assert!(witness.has_vertex(&vid("v1/y")));
        let chi_full = oracle::chromatic_number(&full, Budget::new(u64::MAX)).unwrap();
        let chi_witness = oracle::chromatic_number(&witness, Budget::new(u64::MAX)).unwrap();
        assert_eq!(chi_full, 4);
        assert_eq!(chi_witness, 4);
        for (from, to) in &embedding {
            assert_eq!(from, to);
            assert!(full.has_vertex(from));
        }
    }

    #[test]
    fn reduce_collapses_nested_regions_and_leaves_glue_free_trees_alone() {
        let inner_glue = OpTree::clique_glue(
            leaf(complete_on(&["x", "y", "z"])),
            leaf(complete_on(&["x", "w"])),
            vset(&["x"]),
        );
        let a = OpTree::substitute(Graph::complete(1), vec![(vid("v0"), inner_glue)]);
        let b = leaf(complete_on(&["v0/x", "u"]));
        let t = OpTree::clique_glue(a, b, vset(&["v0/x"]));
        let full = realize(&t).unwrap();
        let (witness, _) = reduce_to_base(&t).unwrap();
        assert_eq!(witness.vertex_set(), vset(&["v0/x", "v0/y", "v0/z"]));
        assert_eq!(
            oracle::chromatic_number(&witness, Budget::new(u64::MAX)).unwrap(),
            oracle::chromatic_number(&full, Budget::new(u64::MAX)).unwrap(),
        );

        let plain = join_k2_k1();
        let (witness, embedding) = reduce_to_base(&plain).unwrap();
        assert_eq!(witness, realize(&plain).unwrap());
        assert_eq!(embedding.len(), 3);

        assert!(matches!(
            reduce_to_base(&leaf(Graph::complete(21))),
            Err(SynthesisError::ReductionTooLarge { got: 21, limit: 20 })
        ));
        let kglue = OpTree::k_glue(
            1,
            leaf(complete_on(&["v0", "v1"])),
            leaf(complete_on(&["v0", "w1"])),
            vset(&["v0"]),
        );
        assert!(matches!(
            reduce_to_base(&kglue),
            Err(SynthesisError::UnsupportedNode { found: "KGlue", .. })
        ));
    }

    #[test]
    fn certificates_serialize_to_canonical_json() {
        let t = OpTree::k_glue(
            1,
            leaf(complete_on(&["v0", "v1", "v2"])),
            leaf(complete_on(&["v0", "w1", "w2"])),
            vset(&["v0"]),
        );
        let (_, cert) = color_kglue(&t, &BoundFn::identity(), None).unwrap();
        let text = cert.to_json();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["verdict"], "pass");
        assert_eq!(parsed["omega"], 3);
        assert_eq!(parsed["trace"]["kind"], "constraint");
        assert_eq!(parsed["trace"]["nodes"][0]["path"], "/");
        assert_eq!(bounds::parse_bound(parsed["bound"].as_str().unwrap()).unwrap(), cert.bound);
        // serialization is deterministic
        assert_eq!(text, cert.to_json());

        let deep = OpTree::substitute(
            Graph::complete(2),
            vec![(vid("v0"), depth2_k5()), (vid("v1"), leaf(Graph::complete(1)))],
        );
        let (_, cert) = color_poly(&deep, 1).unwrap();
        let parsed: Value = serde_json::from_str(&cert.to_json()).unwrap();
        assert_eq!(parsed["trace"]["kind"], "poly");
        assert_eq!(parsed["trace"]["nodes"][0]["m"], 3);
        assert_eq!(parsed["trace"]["nodes"][0]["blocks"][0]["gap"], "1/6");
    }
}
