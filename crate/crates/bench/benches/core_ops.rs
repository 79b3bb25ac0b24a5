use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use chibound::bounds::BoundFn;
use chibound::generators::mycielski_tower;
use chibound::graph::{Graph, VertexId, VertexSet};
use chibound::optree::OpTree;
use chibound::oracle::{self, Budget};
use chibound::synthesis::{color_kglue, color_poly};

fn complete_on(ids: &[String]) -> Graph {
    let vs: Vec<VertexId> = ids.iter().map(|s| VertexId::from(s.as_str())).collect();
    let mut edges = Vec::new();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            edges.push((vs[i].clone(), vs[j].clone()));
        }
    }
    Graph::new(vs, edges).unwrap()
}

/// n triangles glued in a path, consecutive ones sharing one vertex.
fn triangle_chain(n: usize) -> OpTree {
    let triangle = |i: usize| {
        complete_on(&[format!("s{i}"), format!("a{i}"), format!("s{}", i + 1)])
    };
    let mut acc = OpTree::leaf(triangle(0), "bench");
    for i in 1..n {
        let shared: VertexSet = [VertexId::from(format!("s{i}"))].into_iter().collect();
        acc = OpTree::k_glue(1, acc, OpTree::leaf(triangle(i), "bench"), shared);
    }
    acc
}

/// Substitution tree realizing the join of K5 and K3 at depth 3, deep
/// enough to reach the bucket construction.
fn bucket_tree() -> OpTree {
    let k = |n: usize| OpTree::leaf(Graph::complete(n), "bench");
    let join = |left: OpTree, right: OpTree| {
        OpTree::substitute(
            Graph::complete(2),
            vec![(VertexId::from("v0"), left), (VertexId::from("v1"), right)],
        )
    };
    let k4 = join(k(2), k(2));
    let k5 = join(k4, k(1));
    join(k5, k(3))
}

fn oracle_benches(c: &mut Criterion) {
    let tower = mycielski_tower(2).unwrap();
    c.bench_function("chromatic number of the second tower", |b| {
        b.iter(|| oracle::chromatic_number(black_box(&tower), Budget::new(u64::MAX)).unwrap())
    });
    c.bench_function("fractional chromatic number of the second tower", |b| {
        b.iter(|| {
            oracle::fractional_chromatic_number(black_box(&tower), Budget::new(u64::MAX)).unwrap()
        })
    });
}

fn synthesis_benches(c: &mut Criterion) {
    let chain = triangle_chain(8);
    let f = BoundFn::identity();
    c.bench_function("gluing synthesis over eight chained triangles", |b| {
        b.iter(|| color_kglue(black_box(&chain), &f, None).unwrap())
    });
    let deep = bucket_tree();
    c.bench_function("bucket synthesis over a depth-3 join", |b| {
        b.iter(|| color_poly(black_box(&deep), 1).unwrap())
    });
}

criterion_group!(benches, oracle_benches, synthesis_benches);
criterion_main!(benches);
