//! Vertex connectivity by max-flow on the vertex-split network.
//!
//! Every vertex v becomes an arc in_v -> out_v of capacity 1; edges become
//! arcs of effectively infinite capacity in both directions. By Menger, the
//! max flow from out_s to in_t over non-adjacent s, t equals the smallest
//! vertex set separating s from t, and the minimum over all non-adjacent
//! pairs is the connectivity of a non-complete graph.

/// Connectivity of the graph given as bitset adjacency rows. `None` means the
/// graph has no non-adjacent pair, i.e. it is complete (or has < 2 vertices).
pub(crate) fn vertex_connectivity(adj: &[u128]) -> Option<u32> {
    let n = adj.len();
    let mut best: Option<u32> = None;
    for s in 0..n {
        for t in s + 1..n {
            if adj[s] >> t & 1 == 1 {
                continue;
            }
            let f = max_flow_split(adj, s, t);
            if best.is_none_or(|b| f < b) {
                best = Some(f);
            }
            if best == Some(0) {
                return best;
            }
        }
    }
    best
}

/// Max flow from out_s to in_t in the vertex-split network. Node 2v is in_v,
/// node 2v+1 is out_v.
fn max_flow_split(adj: &[u128], s: usize, t: usize) -> u32 {
    let n = adj.len();
    let nodes = 2 * n;
    let big = n as u32 + 1;
    let mut res = vec![vec![0u32; nodes]; nodes];
    for v in 0..n {
        res[2 * v][2 * v + 1] = if v == s || v == t { big } else { 1 };
    }
    for u in 0..n {
        let mut ns = adj[u];
        while ns != 0 {
            let v = ns.trailing_zeros() as usize;
            ns &= !(1u128 << v);
            res[2 * u + 1][2 * v] = big;
        }
    }
    let src = 2 * s + 1;
    let sink = 2 * t;

    let mut flow = 0;
    loop {
        // BFS for a shortest augmenting path.
        let mut parent = vec![usize::MAX; nodes];
        parent[src] = src;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            if u == sink {
                break;
            }
            for v in 0..nodes {
                if parent[v] == usize::MAX && res[u][v] > 0 {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[sink] == usize::MAX {
            return flow;
        }
        let mut bottleneck = u32::MAX;
        let mut v = sink;
        while v != src {
            let u = parent[v];
            bottleneck = bottleneck.min(res[u][v]);
            v = u;
        }
        let mut v = sink;
        while v != src {
            let u = parent[v];
            res[u][v] -= bottleneck;
            res[v][u] += bottleneck;
            v = u;
        }
        flow += bottleneck;
    }
}
