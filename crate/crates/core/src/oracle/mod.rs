//! Brute-force reference computations: clique number, chromatic number,
//! maximal stable sets, fractional chromatic number, minimum vertex cutsets.
//!
//! These are the ground truth that the constructive colorings and their
//! certificates are checked against, so they stay independent of the
//! synthesis code: everything here works directly on the graph.
//!
//! All searches are exact and deterministic. The exponential ones take a
//! step budget and fail with a resource error instead of running away;
//! the practical size limit is around 25 vertices for chromatic number
//! and 128 vertices overall (adjacency lives in single-word bitsets).

mod flow;
mod simplex;

use std::collections::BTreeMap;

use num::{BigRational, One, Zero};
use thiserror::Error;

use crate::graph::{ColorId, Coloring, Graph, VertexId, VertexSet};
use crate::Rational;

/// Step allowance for one oracle call. A step is one elementary unit of
/// search work: a branch attempt, an enumeration node, or a simplex pivot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub steps: u64,
}

impl Budget {
    pub const DEFAULT_STEPS: u64 = 10_000_000;

    pub fn new(steps: u64) -> Budget {
        Budget { steps }
    }
}

impl Default for Budget {
    fn default() -> Budget {
        Budget::new(Budget::DEFAULT_STEPS)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{op} exceeded its step budget of {budget}")]
    BudgetExceeded { op: &'static str, budget: u64 },
    #[error("graph has {n} vertices; oracles support at most {MAX_VERTICES}")]
    TooLarge { n: usize },
}

pub const MAX_VERTICES: usize = 128;

pub(crate) struct Meter {
    left: u64,
    budget: u64,
    op: &'static str,
}

impl Meter {
    pub(crate) fn new(budget: Budget, op: &'static str) -> Meter {
        Meter {
            left: budget.steps,
            budget: budget.steps,
            op,
        }
    }

    pub(crate) fn tick(&mut self) -> Result<(), OracleError> {
        if self.left == 0 {
            return Err(OracleError::BudgetExceeded {
                op: self.op,
                budget: self.budget,
            });
        }
        self.left -= 1;
        Ok(())
    }
}

/// Bitset adjacency view. Vertex i is the i-th id in sorted order.
struct Bits {
    ids: Vec<VertexId>,
    adj: Vec<u128>,
}

impl Bits {
    fn build(g: &Graph) -> Result<Bits, OracleError> {
        let n = g.vertex_count();
        if n > MAX_VERTICES {
            return Err(OracleError::TooLarge { n });
        }
        let ids: Vec<VertexId> = g.vertices().cloned().collect();
        let index: BTreeMap<&VertexId, usize> =
            ids.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut adj = vec![0u128; n];
        for (u, v) in g.edges() {
            let (i, j) = (index[u], index[v]);
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        Ok(Bits { ids, adj })
    }

    fn n(&self) -> usize {
        self.ids.len()
    }

    fn set_of(&self, mask: u128) -> VertexSet {
        (0..self.n())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.ids[i].clone())
            .collect()
    }
}

fn full_mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Size of a largest clique. Branch and bound over candidate sets; the
/// popcount of the remaining candidates bounds every extension.
///
/// Panics if the graph exceeds [`MAX_VERTICES`]; gate large inputs first.
pub fn clique_number(g: &Graph) -> u32 {
    let b = Bits::build(g).expect("graph within oracle size limit");
    let weights = vec![1u64; b.n()];
    max_weight_clique_impl(&b, &weights) as u32
}

/// Largest total weight of a clique, all weights >= 1. The map must assign
/// a weight to every vertex. Used for clique numbers of substitution trees,
/// where base vertices carry the clique numbers of their children.
pub fn max_weight_clique(g: &Graph, weights: &BTreeMap<VertexId, u64>) -> u64 {
    let b = Bits::build(g).expect("graph within oracle size limit");
    let w: Vec<u64> = b
        .ids
        .iter()
        .map(|v| *weights.get(v).unwrap_or_else(|| panic!("no weight for {v}")))
        .collect();
    assert!(w.iter().all(|&x| x >= 1), "weights must be positive");
    max_weight_clique_impl(&b, &w)
}

fn max_weight_clique_impl(b: &Bits, weights: &[u64]) -> u64 {
    fn expand(adj: &[u128], weights: &[u64], cur: u64, mut cand: u128, best: &mut u64) {
        let mut rest: u64 = (0..adj.len())
            .filter(|i| cand >> i & 1 == 1)
            .map(|i| weights[i])
            .sum();
        while cand != 0 {
            if cur + rest <= *best {
                return;
            }
            let v = cand.trailing_zeros() as usize;
            cand &= !(1u128 << v);
            rest -= weights[v];
            let with_v = cur + weights[v];
            if with_v > *best {
                *best = with_v;
            }
            expand(adj, weights, with_v, cand & adj[v], best);
        }
    }
    let mut best = 0;
    expand(&b.adj, weights, 0, full_mask(b.n()), &mut best);
    best
}

/// Chromatic number; see [`optimal_coloring`].
pub fn chromatic_number(g: &Graph, budget: Budget) -> Result<u32, OracleError> {
    optimal_coloring(g, budget).map(|(_, k)| k)
}

/// An optimal proper coloring and its color count. Branch and bound over
/// color classes in a fixed largest-degree-first vertex order; a vertex may
/// only open one new color (so the first vertex always gets color 0, which
/// removes color permutations from the search). The clique number is the
/// lower bound, a greedy pass the initial upper bound.
pub fn optimal_coloring(g: &Graph, budget: Budget) -> Result<(Coloring, u32), OracleError> {
    let b = Bits::build(g)?;
    let n = b.n();
    if n == 0 {
        return Ok((Coloring::new(), 0));
    }
    let mut meter = Meter::new(budget, "chromatic_number");

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(b.adj[i].count_ones()), b.ids[i].clone()));

    // Greedy upper bound along the same order.
    let mut greedy = vec![usize::MAX; n];
    let mut greedy_classes: Vec<u128> = Vec::new();
    for &v in &order {
        let c = (0..greedy_classes.len())
            .find(|&c| greedy_classes[c] & b.adj[v] == 0)
            .unwrap_or_else(|| {
                greedy_classes.push(0);
                greedy_classes.len() - 1
            });
        greedy_classes[c] |= 1 << v;
        greedy[v] = c;
    }
    let mut best_count = greedy_classes.len();
    let mut best = greedy;

    let lb = clique_number(g) as usize;

    if lb < best_count {
        let mut classes: Vec<u128> = Vec::new();
        let mut assign = vec![usize::MAX; n];

        fn dfs(
            pos: usize,
            order: &[usize],
            adj: &[u128],
            classes: &mut Vec<u128>,
            assign: &mut Vec<usize>,
            best: &mut Vec<usize>,
            best_count: &mut usize,
            lb: usize,
            meter: &mut Meter,
        ) -> Result<(), OracleError> {
            if *best_count == lb {
                return Ok(());
            }
            if pos == order.len() {
                *best_count = classes.len();
                best.copy_from_slice(assign);
                return Ok(());
            }
            let v = order[pos];
            let open = classes.len();
            let limit = open.min(*best_count - 1);
            for c in 0..limit {
                meter.tick()?;
                if classes[c] & adj[v] != 0 {
                    continue;
                }
                classes[c] |= 1 << v;
                assign[v] = c;
                dfs(pos + 1, order, adj, classes, assign, best, best_count, lb, meter)?;
                classes[c] &= !(1u128 << v);
            }
            if open + 1 < *best_count {
                meter.tick()?;
                classes.push(1 << v);
                assign[v] = open;
                dfs(pos + 1, order, adj, classes, assign, best, best_count, lb, meter)?;
                classes.pop();
            }
            Ok(())
        }

        dfs(
            0,
            &order,
            &b.adj,
            &mut classes,
            &mut assign,
            &mut best,
            &mut best_count,
            lb,
            &mut meter,
        )?;
    }

    let mut coloring = Coloring::new();
    for (i, id) in b.ids.iter().enumerate() {
        coloring.set(id.clone(), best[i] as ColorId);
    }
    Ok((coloring, best_count as u32))
}

/// All maximal stable sets, sorted. Bron-Kerbosch with pivoting on the
/// complement graph.
pub fn maximal_stable_sets(g: &Graph, budget: Budget) -> Result<Vec<VertexSet>, OracleError> {
    let mut meter = Meter::new(budget, "maximal_stable_sets");
    let b = Bits::build(g)?;
    let masks = maximal_stable_set_masks(&b, &mut meter)?;
    let mut out: Vec<VertexSet> = masks.iter().map(|&m| b.set_of(m)).collect();
    out.sort();
    Ok(out)
}

fn maximal_stable_set_masks(b: &Bits, meter: &mut Meter) -> Result<Vec<u128>, OracleError> {
    let n = b.n();
    let full = full_mask(n);
    let co: Vec<u128> = (0..n)
        .map(|i| !b.adj[i] & full & !(1u128 << i))
        .collect();

    fn bk(
        r: u128,
        mut p: u128,
        mut x: u128,
        co: &[u128],
        out: &mut Vec<u128>,
        meter: &mut Meter,
    ) -> Result<(), OracleError> {
        meter.tick()?;
        if p == 0 && x == 0 {
            out.push(r);
            return Ok(());
        }
        // Pivot on the candidate covering most of P; fewest branches remain.
        let mut pivot = usize::MAX;
        let mut cover = -1i32;
        let mut px = p | x;
        while px != 0 {
            let u = px.trailing_zeros() as usize;
            px &= !(1u128 << u);
            let c = (p & co[u]).count_ones() as i32;
            if c > cover {
                cover = c;
                pivot = u;
            }
        }
        let mut branch = p & !co[pivot];
        while branch != 0 {
            let v = branch.trailing_zeros() as usize;
            let bit = 1u128 << v;
            branch &= !bit;
            bk(r | bit, p & co[v], x & co[v], co, out, meter)?;
            p &= !bit;
            x |= bit;
        }
        Ok(())
    }

    let mut out = Vec::new();
    bk(0, full, 0, &co, &mut out, meter)?;
    Ok(out)
}

/// Fractional chromatic number as an exact rational: the optimum of the
/// covering program  min sum(lambda_S)  over maximal stable sets S with
/// sum(lambda_S : v in S) >= 1 for every vertex, lambda >= 0.
pub fn fractional_chromatic_number(g: &Graph, budget: Budget) -> Result<Rational, OracleError> {
    let mut meter = Meter::new(budget, "fractional_chromatic_number");
    let b = Bits::build(g)?;
    let n = b.n();
    if n == 0 {
        return Ok(Rational::zero());
    }
    let sets = maximal_stable_set_masks(&b, &mut meter)?;
    let one = BigRational::one();
    let a: Vec<Vec<Rational>> = (0..n)
        .map(|v| {
            sets.iter()
                .map(|&s| {
                    if s >> v & 1 == 1 {
                        one.clone()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let problem = simplex::LpProblem {
        a,
        b: vec![one.clone(); n],
        c: vec![one.clone(); sets.len()],
        ge: true,
        maximize: false,
    };
    match simplex::solve(&problem, &mut meter)? {
        simplex::LpOutcome::Optimal { value, x } => {
            // Re-check the cover against the raw constraint data. A solver
            // bug surfaces here instead of as a silently wrong optimum.
            for v in 0..n {
                let covered: Rational = sets
                    .iter()
                    .zip(&x)
                    .filter(|(&s, _)| s >> v & 1 == 1)
                    .map(|(_, w)| w.clone())
                    .sum();
                assert!(covered >= one, "returned weights fail to cover vertex {v}");
            }
            assert_eq!(x.iter().cloned().sum::<Rational>(), value);
            Ok(value)
        }
        // Taking every maximal stable set once covers each vertex.
        other => unreachable!("covering program is always feasible and bounded: {other:?}"),
    }
}

/// Optimum of the packing program  max sum(y_v)  with sum(y_v : v in S) <= 1
/// for every maximal stable set S, y >= 0. Linear programming duality makes
/// this equal to the fractional chromatic number; tests compare the two
/// routes rather than trusting either alone.
pub fn fractional_clique_number(g: &Graph, budget: Budget) -> Result<Rational, OracleError> {
    let mut meter = Meter::new(budget, "fractional_clique_number");
    let b = Bits::build(g)?;
    let n = b.n();
    if n == 0 {
        return Ok(Rational::zero());
    }
    let sets = maximal_stable_set_masks(&b, &mut meter)?;
    let one = BigRational::one();
    let a: Vec<Vec<Rational>> = sets
        .iter()
        .map(|&s| {
            (0..n)
                .map(|v| {
                    if s >> v & 1 == 1 {
                        one.clone()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let problem = simplex::LpProblem {
        a,
        b: vec![one.clone(); sets.len()],
        c: vec![one.clone(); n],
        ge: false,
        maximize: true,
    };
    match simplex::solve(&problem, &mut meter)? {
        simplex::LpOutcome::Optimal { value, .. } => Ok(value),
        other => unreachable!("packing program is always feasible and bounded: {other:?}"),
    }
}

#[cfg(test)]
pub(crate) fn big(n: u64) -> num::BigInt {
    num::BigInt::from(n)
}

#[cfg(test)]
pub(crate) fn ratio(n: u64, d: u64) -> Rational {
    Rational::new(big(n), big(d))
}

/// Outcome of a bounded minimum vertex cutset search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutsetResult {
    /// False when the graph is complete or every cutset is larger than the limit.
    pub found: bool,
    /// Lexicographically least minimum cutset when found, empty otherwise.
    pub cutset: VertexSet,
    /// The two parts left after deleting the cutset: the component containing
    /// the least remaining vertex, and everything else. Anti-complete to each
    /// other; both non-empty.
    pub sides: Option<(VertexSet, VertexSet)>,
}

impl CutsetResult {
    fn none() -> CutsetResult {
        CutsetResult {
            found: false,
            cutset: VertexSet::new(),
            sides: None,
        }
    }
}

/// Smallest vertex set whose removal disconnects the graph, if its size is
/// within `limit`. Connectivity is established by max-flow on the standard
/// vertex-split network over all non-adjacent pairs; the returned cutset is
/// then the lexicographically least one of that size, found by scanning
/// subsets in order (the sizes involved are tiny).
pub fn min_vertex_cutset(g: &Graph, limit: u32) -> CutsetResult {
    let n = g.vertex_count();
    if n < 2 || g.is_complete() {
        return CutsetResult::none();
    }
    let b = Bits::build(g).expect("graph within oracle size limit");

    let kappa = match flow::vertex_connectivity(&b.adj) {
        Some(k) => k,
        None => return CutsetResult::none(), // complete; already handled, defensive
    };
    if kappa > limit {
        return CutsetResult::none();
    }

    let cut_mask = least_disconnecting_subset(&b.adj, kappa as usize)
        .expect("a cutset of size kappa exists");
    let cutset = b.set_of(cut_mask);

    let rest: VertexSet = g
        .vertices()
        .filter(|v| !cutset.contains(*v))
        .cloned()
        .collect();
    let residual = g.induced_subgraph(&rest).unwrap();
    let comps = residual.components();
    debug_assert!(comps.len() >= 2);
    let side_a = comps[0].clone();
    let side_b: VertexSet = comps[1..].iter().flatten().cloned().collect();
    CutsetResult {
        found: true,
        cutset,
        sides: Some((side_a, side_b)),
    }
}

/// First subset of the given size, in lexicographic order over the sorted
/// vertex list, whose removal disconnects the graph. Size 0 means the graph
/// is already disconnected.
fn least_disconnecting_subset(adj: &[u128], size: usize) -> Option<u128> {
    let n = adj.len();
    let full = full_mask(n);

    fn disconnected(adj: &[u128], keep: u128) -> bool {
        if keep == 0 {
            return false;
        }
        let start = keep.trailing_zeros() as usize;
        let mut seen = 1u128 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0u128;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= !(1u128 << v);
                next |= adj[v] & keep & !seen;
            }
            seen |= next;
            frontier = next;
        }
        seen != keep
    }

    fn next_combination(idx: &mut [usize], n: usize) -> bool {
        let k = idx.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] != i + n - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    if size > n {
        return None;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        let mask: u128 = idx.iter().map(|&i| 1u128 << i).sum();
        if disconnected(adj, full & !mask) {
            return Some(mask);
        }
        if !next_combination(&mut idx, n) {
            return None;
        }
    }
}
