//! Deterministic graph and tree families: Mycielski towers, the parity-gated
//! Mycielski alternation, lexicographic powers, and seeded random operation
//! trees for property tests.

use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId, VertexSet};
use crate::optree::{realize, OpTree};
use crate::oracle::{self, Budget, OracleError};

/// Generated family members stay at or below this many vertices, so the
/// exact oracles remain usable on every artifact.
pub const VERTEX_LIMIT: usize = 100;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("{what} would realize {vertices} vertices, above the limit of {VERTEX_LIMIT}")]
    TooLarge { what: &'static str, vertices: u64 },
    #[error("lexicographic powers start at exponent 1")]
    ZeroPower,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

fn tower_order(t: u32) -> u64 {
    if t >= 32 {
        return u64::MAX;
    }
    3 * (1u64 << t) - 1
}

/// K2 with the Mycielskian applied `t` times: 3·2^t - 1 vertices, clique
/// number stuck at 2, chromatic number t+2.
pub fn mycielski_tower(t: u32) -> Result<Graph, GenError> {
    let vertices = tower_order(t);
    if vertices > VERTEX_LIMIT as u64 {
        return Err(GenError::TooLarge { what: "mycielski_tower", vertices });
    }
    let mut g = Graph::complete(2);
    for _ in 0..t {
        g = g.mycielskian()?;
    }
    Ok(g)
}

/// Starting from K2, apply the two parity-gated Mycielski operators in
/// alternation, odd-gate first: the odd-gate maps G to M(G) when χ(G) is
/// odd and leaves it alone otherwise, the even-gate when χ(G) is even.
/// `t` counts operator applications, not Mycielskians actually applied;
/// each pair of applications raises the chromatic number by exactly one
/// while the graphs stay triangle-free.
pub fn alternate_o1_o2(t: u32) -> Result<Graph, GenError> {
    let mut g = Graph::complete(2);
    for step in 0..t {
        let chi = oracle::chromatic_number(&g, Budget::new(u64::MAX))?;
        let odd_gate = step % 2 == 0;
        if (chi % 2 == 1) == odd_gate {
            let vertices = 2 * g.vertex_count() as u64 + 1;
            if vertices > VERTEX_LIMIT as u64 {
                return Err(GenError::TooLarge { what: "alternate_o1_o2", vertices });
            }
            g = g.mycielskian()?;
        }
    }
    Ok(g)
}

/// F_1 = f, F_{i+1} = F_i with every vertex blown up into a copy of f.
/// Products are nested on the left; every nesting gives isomorphic graphs,
/// this one is fixed so vertex ids are reproducible.
pub fn lex_power(f: &Graph, i: u32) -> Result<Graph, GenError> {
    if i == 0 {
        return Err(GenError::ZeroPower);
    }
    let vertices = (f.vertex_count() as u64).checked_pow(i).unwrap_or(u64::MAX);
    if vertices > VERTEX_LIMIT as u64 {
        return Err(GenError::TooLarge { what: "lex_power", vertices });
    }
    let mut acc = f.clone();
    for _ in 1..i {
        acc = acc.lex_product(f)?;
    }
    Ok(acc)
}

/// Splitmix-style generator: 64-bit state, one additive step and two
/// xor-multiply mixes per draw. Fixed constants keep corpora reproducible
/// across platforms; statistical strength is not a goal here.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform draw from 0..n. The modulo bias is immaterial at the range
    /// sizes used for generation.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "draw from an empty range");
        self.next_u64() % n
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

/// Relative weights of the internal node kinds drawn while growing a tree.
/// All-zero weights make every tree a single leaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeMix {
    pub substitute: u32,
    pub clique_glue: u32,
    pub k_glue: u32,
    /// Width stamped on generated KGlue nodes.
    pub k: u32,
}

impl NodeMix {
    pub fn leaves_only() -> NodeMix {
        NodeMix { substitute: 0, clique_glue: 0, k_glue: 0, k: 1 }
    }

    pub fn substitute_only() -> NodeMix {
        NodeMix { substitute: 1, clique_glue: 0, k_glue: 0, k: 1 }
    }

    pub fn k_glue_only(k: u32) -> NodeMix {
        NodeMix { substitute: 0, clique_glue: 0, k_glue: 1, k }
    }

    /// Both gluing kinds, no substitution.
    pub fn glue_only(k: u32) -> NodeMix {
        NodeMix { substitute: 0, clique_glue: 1, k_glue: 1, k }
    }

    pub fn substitute_and_clique_glue() -> NodeMix {
        NodeMix { substitute: 2, clique_glue: 1, k_glue: 0, k: 1 }
    }

    pub fn all(k: u32) -> NodeMix {
        NodeMix { substitute: 2, clique_glue: 1, k_glue: 1, k }
    }

    fn total(&self) -> u64 {
        u64::from(self.substitute) + u64::from(self.clique_glue) + u64::from(self.k_glue)
    }
}

/// Where leaf graphs come from. Every pool member has at least one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafPool {
    /// Complete graphs on 1..=5 vertices.
    Completes,
    /// Completes, paths and cycles on at most six vertices.
    Mixed,
}

impl LeafPool {
    /// Class tag stamped on every leaf; uniform per pool so glue-order
    /// normalization applies to generated trees.
    pub fn tag(&self) -> &'static str {
        match self {
            LeafPool::Completes => "complete",
            LeafPool::Mixed => "mixed",
        }
    }

    /// A pool member with at most `budget` vertices.
    fn draw(&self, rng: &mut SplitMix64, budget: usize) -> Graph {
        debug_assert!(budget >= 1);
        match self {
            LeafPool::Completes => {
                Graph::complete(1 + rng.below(budget.min(5) as u64) as usize)
            }
            LeafPool::Mixed => {
                let cap = budget.min(6);
                match rng.below(3) {
                    0 => Graph::complete(1 + rng.below(cap.min(5) as u64) as usize),
                    _ if cap < 3 => Graph::path(1 + rng.below(cap as u64) as usize),
                    1 => Graph::path(1 + rng.below(cap as u64) as usize),
                    _ => Graph::cycle(3 + rng.below((cap - 2) as u64) as usize),
                }
            }
        }
    }

    /// Widest shared set a generated glue node may use: arbitrary pool
    /// members can only be made to agree on a single vertex, completes on
    /// any small clique.
    fn max_shared(&self) -> usize {
        match self {
            LeafPool::Completes => 3,
            LeafPool::Mixed => 1,
        }
    }
}

/// Everything a tree draw depends on; equal configs give equal trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    /// Upper bound on realized vertex count.
    pub max_vertices: usize,
    /// Upper bound on the nesting of internal nodes.
    pub max_depth: u32,
    pub mix: NodeMix,
    pub pool: LeafPool,
}

/// Grow a tree that passes validation by construction: shared sets are
/// cliques taken from the realized left operand, fresh ids come from a
/// per-tree counter, and vertex budgets are split before recursing.
pub fn random_optree(cfg: &GenConfig) -> OpTree {
    let mut state = GenState {
        rng: SplitMix64::new(cfg.seed),
        fresh: 0,
        pool: cfg.pool,
        mix: cfg.mix,
    };
    state.node(cfg.max_depth, cfg.max_vertices.max(1))
}

struct GenState {
    rng: SplitMix64,
    fresh: u64,
    pool: LeafPool,
    mix: NodeMix,
}

impl GenState {
    fn scope(&mut self) -> String {
        let s = format!("g{}", self.fresh);
        self.fresh += 1;
        s
    }

    fn leaf(&mut self, budget: usize) -> OpTree {
        let g = self.pool.draw(&mut self.rng, budget);
        let scope = self.scope();
        OpTree::leaf(g.scoped(&scope), self.pool.tag())
    }

    fn node(&mut self, depth: u32, budget: usize) -> OpTree {
        // One chance in three of stopping early keeps depth statistics
        // varied under a fixed cap.
        if depth == 0 || budget < 2 || self.mix.total() == 0 || self.rng.chance(1, 3) {
            return self.leaf(budget);
        }
        let mut draw = self.rng.below(self.mix.total());
        if draw < u64::from(self.mix.substitute) {
            return self.substitute(depth, budget);
        }
        draw -= u64::from(self.mix.substitute);
        if draw < u64::from(self.mix.clique_glue) {
            return self.glue(depth, budget, None);
        }
        self.glue(depth, budget, Some(self.mix.k.max(1)))
    }

    fn substitute(&mut self, depth: u32, budget: usize) -> OpTree {
        let base = self.pool.draw(&mut self.rng, budget).scoped(&self.scope());
        let order = base.vertex_count();
        let mut rest = budget;
        let mut waiting = order;
        let mut children = Vec::with_capacity(order);
        for v in base.vertex_set() {
            waiting -= 1;
            // Each child still waiting needs at least one vertex.
            let cap = rest - waiting;
            let take = 1 + self.rng.below(cap as u64) as usize;
            let child = self.node(depth - 1, take);
            rest -= child.vertex_set().len();
            children.push((v, child));
        }
        OpTree::substitute(base, children)
    }

    /// Left side grows recursively; the right side is a fresh leaf arranged
    /// to overlap it exactly on a clique drawn from the realized graph.
    fn glue(&mut self, depth: u32, budget: usize, k: Option<u32>) -> OpTree {
        let left = self.node(depth - 1, budget - 1);
        let lg = realize(&left).expect("generated subtrees pass validation");
        let width = match k {
            Some(k) => (k as usize).min(self.pool.max_shared()),
            None => self.pool.max_shared(),
        };
        // A shared set equal to the whole left side would nest the
        // operands, so keep it strictly smaller.
        let shared = self.shared_clique(&lg, width.min(lg.vertex_count() - 1));
        let right = self.right_leaf(&shared, budget - lg.vertex_count());
        match k {
            Some(k) => OpTree::k_glue(k, left, right, shared),
            None => OpTree::clique_glue(left, right, shared),
        }
    }

    /// A clique of at most `max_size` vertices in `g`, grown greedily from
    /// random picks among the common neighbors.
    fn shared_clique(&mut self, g: &Graph, max_size: usize) -> VertexSet {
        let mut shared = VertexSet::new();
        if max_size == 0 {
            return shared;
        }
        let target = self.rng.below(max_size as u64 + 1) as usize;
        for _ in 0..target {
            let candidates: Vec<&VertexId> = g
                .vertices()
                .filter(|v| !shared.contains(*v) && shared.iter().all(|s| g.has_edge(v, s)))
                .collect();
            if candidates.is_empty() {
                break;
            }
            let v = candidates[self.rng.below(candidates.len() as u64) as usize];
            shared.insert(v.clone());
        }
        shared
    }

    fn right_leaf(&mut self, shared: &VertexSet, fresh_budget: usize) -> OpTree {
        debug_assert!(fresh_budget >= 1);
        let graph = match self.pool {
            LeafPool::Completes => {
                // A complete graph induces a clique on any overlap, so any
                // shared clique agrees with it; cap the order at the pool's.
                let cap = fresh_budget.min(5usize.saturating_sub(shared.len())).max(1);
                let fresh = 1 + self.rng.below(cap as u64) as usize;
                let scope = self.scope();
                let ids: Vec<VertexId> = shared
                    .iter()
                    .cloned()
                    .chain((0..fresh).map(|i| VertexId::scoped(&scope, &format!("v{i}"))))
                    .collect();
                complete_on(&ids)
            }
            LeafPool::Mixed => {
                // Arbitrary pool members agree with anything on at most one
                // vertex; rename their first vertex to the shared one.
                debug_assert!(shared.len() <= 1);
                let mut h = self.pool.draw(&mut self.rng, fresh_budget + shared.len());
                if !shared.is_empty() && h.vertex_count() < 2 {
                    h = Graph::path(2);
                }
                let h = h.scoped(&self.scope());
                match shared.iter().next() {
                    None => h,
                    Some(s) => rename_first_vertex(&h, s),
                }
            }
        };
        OpTree::leaf(graph, self.pool.tag())
    }
}

fn complete_on(ids: &[VertexId]) -> Graph {
    let mut edges = Vec::new();
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            edges.push((ids[i].clone(), ids[j].clone()));
        }
    }
    Graph::new(ids.iter().cloned(), edges).expect("shared and fresh ids are distinct")
}

fn rename_first_vertex(g: &Graph, to: &VertexId) -> Graph {
    let first = g.vertices().next().expect("pool members are non-empty").clone();
    let map = |v: &VertexId| if *v == first { to.clone() } else { v.clone() };
    Graph::new(
        g.vertices().map(map),
        g.edges().map(|(u, v)| (map(u), map(v))),
    )
    .expect("renaming one vertex to a fresh id keeps the graph well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::are_isomorphic;
    use crate::optree::{tree_to_json, validate};

    #[test]
    fn tower_matches_known_orders() {
        let t0 = mycielski_tower(0).unwrap();
        assert_eq!(t0.vertex_count(), 2);
        assert!(t0.is_complete());
        let t1 = mycielski_tower(1).unwrap();
        assert!(are_isomorphic(&t1, &Graph::cycle(5)));
        assert_eq!(mycielski_tower(3).unwrap().vertex_count(), 23);
        assert_eq!(mycielski_tower(5).unwrap().vertex_count(), 95);
        assert_eq!(
            mycielski_tower(6),
            Err(GenError::TooLarge { what: "mycielski_tower", vertices: 191 })
        );
    }

    #[test]
    fn tower_grows_chromatic_number_without_triangles() {
        let t2 = mycielski_tower(2).unwrap();
        assert_eq!(t2.vertex_count(), 11);
        assert_eq!(oracle::clique_number(&t2), 2);
        assert_eq!(oracle::chromatic_number(&t2, Budget::new(u64::MAX)).unwrap(), 4);
    }

    #[test]
    fn alternation_gates_on_parity() {
        // Odd-gate on K2 (χ = 2) is the identity.
        assert_eq!(alternate_o1_o2(1).unwrap(), Graph::complete(2));
        // From then on the parities line up and every application fires,
        // so step t matches tower level t-1.
        assert!(are_isomorphic(&alternate_o1_o2(2).unwrap(), &Graph::cycle(5)));
        assert_eq!(alternate_o1_o2(3).unwrap(), mycielski_tower(2).unwrap());
        assert_eq!(alternate_o1_o2(4).unwrap(), mycielski_tower(3).unwrap());
        assert_eq!(oracle::clique_number(&alternate_o1_o2(4).unwrap()), 2);
    }

    #[test]
    fn lex_power_small_cases() {
        let c5 = Graph::cycle(5);
        assert_eq!(lex_power(&c5, 1).unwrap(), c5);
        let f2 = lex_power(&c5, 2).unwrap();
        assert_eq!(f2.vertex_count(), 25);
        assert_eq!(oracle::clique_number(&f2), 4);
        assert!(are_isomorphic(&lex_power(&Graph::complete(2), 2).unwrap(), &Graph::complete(4)));
        assert_eq!(lex_power(&c5, 0), Err(GenError::ZeroPower));
        assert_eq!(
            lex_power(&c5, 3),
            Err(GenError::TooLarge { what: "lex_power", vertices: 125 })
        );
    }

    #[test]
    fn random_trees_validate_clean_across_seeds() {
        for pool in [LeafPool::Completes, LeafPool::Mixed] {
            for seed in 0..500 {
                let cfg = GenConfig {
                    seed,
                    max_vertices: 24,
                    max_depth: 3,
                    mix: NodeMix::all(2),
                    pool,
                };
                let t = random_optree(&cfg);
                let diags = validate(&t);
                assert!(diags.is_empty(), "seed {seed} ({pool:?}): {diags}");
                assert!(realize(&t).unwrap().vertex_count() <= 24, "seed {seed} over budget");
            }
        }
    }

    #[test]
    fn random_trees_are_deterministic_in_the_seed() {
        let cfg = GenConfig {
            seed: 41,
            max_vertices: 20,
            max_depth: 3,
            mix: NodeMix::all(3),
            pool: LeafPool::Mixed,
        };
        assert_eq!(tree_to_json(&random_optree(&cfg)), tree_to_json(&random_optree(&cfg)));
        let other = GenConfig { seed: 42, ..cfg.clone() };
        assert_ne!(tree_to_json(&random_optree(&cfg)), tree_to_json(&random_optree(&other)));
    }

    #[test]
    fn substitution_of_completes_realizes_perfect_graphs() {
        for seed in 0..50 {
            let cfg = GenConfig {
                seed,
                max_vertices: 12,
                max_depth: 3,
                mix: NodeMix::substitute_only(),
                pool: LeafPool::Completes,
            };
            let g = realize(&random_optree(&cfg)).unwrap();
            let omega = oracle::clique_number(&g);
            let chi = oracle::chromatic_number(&g, Budget::new(u64::MAX)).unwrap();
            assert_eq!(chi, omega, "seed {seed}");
        }
    }

    #[test]
    fn zero_depth_or_zero_mix_gives_a_single_leaf() {
        let leaf_cfg = GenConfig {
            seed: 7,
            max_vertices: 15,
            max_depth: 0,
            mix: NodeMix::all(2),
            pool: LeafPool::Mixed,
        };
        assert!(matches!(random_optree(&leaf_cfg), OpTree::Leaf { .. }));
        let no_mix = GenConfig { max_depth: 4, mix: NodeMix::leaves_only(), ..leaf_cfg };
        assert!(matches!(random_optree(&no_mix), OpTree::Leaf { .. }));
    }

    #[test]
    fn k_glue_trees_respect_the_declared_width() {
        let mut saw_glue = false;
        for seed in 0..100 {
            let cfg = GenConfig {
                seed,
                max_vertices: 16,
                max_depth: 4,
                mix: NodeMix::k_glue_only(1),
                pool: LeafPool::Completes,
            };
            let t = random_optree(&cfg);
            assert!(validate(&t).is_empty(), "seed {seed}");
            match t.max_glue_width() {
                Some(w) => {
                    assert_eq!(w, 1, "seed {seed}");
                    saw_glue = true;
                }
                None => {} // the early-stop chance produced a bare leaf
            }
        }
        assert!(saw_glue, "no seed produced a glue node");
    }
}
