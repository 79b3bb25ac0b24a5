//! Drives the built binary end to end through temp files: generate,
//! color, realize, verify, and the documented exit codes.

use std::path::Path;
use std::process::{Command, Output};

use chibound::graph::{Graph, VertexId, VertexSet};
use chibound::optree::{tree_to_json, OpTree};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chibound"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_c5(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("c5.txt");
    std::fs::write(
        &p,
        "p 5 5\nv v0\nv v1\nv v2\nv v3\nv v4\ne v0 v1\ne v0 v4\ne v1 v2\ne v2 v3\ne v3 v4\n",
    )
    .unwrap();
    p
}

fn two_triangles(dir: &Path) -> std::path::PathBuf {
    let vid = |s: &str| VertexId::from(s);
    let complete_on = |ids: &[&str]| {
        let vs: Vec<VertexId> = ids.iter().map(|s| vid(s)).collect();
        let mut edges = Vec::new();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                edges.push((vs[i].clone(), vs[j].clone()));
            }
        }
        Graph::new(vs, edges).unwrap()
    };
    let shared: VertexSet = [vid("v0")].into_iter().collect();
    let t = OpTree::k_glue(
        1,
        OpTree::leaf(complete_on(&["v0", "v1", "v2"]), "test"),
        OpTree::leaf(complete_on(&["v0", "w1", "w2"]), "test"),
        shared,
    );
    let p = dir.join("triangles.json");
    std::fs::write(&p, tree_to_json(&t)).unwrap();
    p
}

#[test]
fn gluing_example_colors_within_four_and_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let tree = two_triangles(dir.path());
    let coloring = dir.path().join("out.col");
    let cert = dir.path().join("cert.json");
    let graph = dir.path().join("g.txt");

    let out = run(&[
        "color",
        path_str(&tree),
        "--method",
        "kglue",
        "--bound",
        "kglue(x,1)",
        "-o",
        path_str(&coloring),
        "--cert",
        path_str(&cert),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&coloring).unwrap();
    let distinct: std::collections::BTreeSet<&str> = text
        .lines()
        .map(|l| l.split_whitespace().nth(1).unwrap())
        .collect();
    assert!(distinct.len() <= 4, "used {} colors", distinct.len());

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(report["verdict"], "pass");

    let out = run(&["realize", path_str(&tree), "-o", path_str(&graph)]);
    assert_eq!(code(&out), 0);
    let out = run(&[
        "verify",
        path_str(&graph),
        path_str(&coloring),
        "--bound",
        report["bound"].as_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn depth_coloring_verifies_under_its_own_certificate_bound() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("t.json");
    let coloring = dir.path().join("out.col");
    let cert = dir.path().join("cert.json");
    let graph = dir.path().join("g.txt");

    let out = run(&[
        "gen", "tree", "--seed", "11", "--mix", "substitute", "--max-vertices", "12", "-o",
        path_str(&tree),
    ]);
    assert_eq!(code(&out), 0);
    let out = run(&[
        "color",
        path_str(&tree),
        "--method",
        "depth",
        "--bound",
        "x",
        "-o",
        path_str(&coloring),
        "--cert",
        path_str(&cert),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // same inputs, same bytes
    let first = std::fs::read(&coloring).unwrap();
    let out = run(&[
        "color",
        path_str(&tree),
        "--method",
        "depth",
        "--bound",
        "x",
        "-o",
        path_str(&coloring),
        "--cert",
        path_str(&cert),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(first, std::fs::read(&coloring).unwrap());

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let out = run(&["realize", path_str(&tree), "-o", path_str(&graph)]);
    assert_eq!(code(&out), 0);
    let out = run(&[
        "verify",
        path_str(&graph),
        path_str(&coloring),
        "--bound",
        report["bound"].as_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn verify_flags_a_monochromatic_edge_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let coloring = dir.path().join("bad.col");
    std::fs::write(&graph, "p 2 1\nv a\nv b\ne a b\n").unwrap();
    std::fs::write(&coloring, "a 0\nb 0\n").unwrap();
    let out = run(&["verify", path_str(&graph), path_str(&coloring), "--bound", "x"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn fractional_oracle_prints_the_exact_pentagon_power_value() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = write_c5(dir.path());
    let squared = dir.path().join("p2.txt");
    let out = run(&["gen", "lexpow", path_str(&c5), "2", "-o", path_str(&squared)]);
    assert_eq!(code(&out), 0);
    let out = run(&["oracle", path_str(&squared), "--chif"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "25/4");
}

#[test]
fn input_problems_exit_two_and_tight_budgets_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = run(&["validate", path_str(&bad)]);
    assert_eq!(code(&out), 2);

    let tree = two_triangles(dir.path());
    let out = run(&[
        "color", path_str(&tree), "--method", "poly", "--bound", "2^(1*(x-1))",
    ]);
    assert_eq!(code(&out), 2, "poly needs a power bound");

    let c5 = write_c5(dir.path());
    let squared = dir.path().join("p2.txt");
    let out = run(&["gen", "lexpow", path_str(&c5), "2", "-o", path_str(&squared)]);
    assert_eq!(code(&out), 0);
    let out = run(&["oracle", path_str(&squared), "--chi", "--budget", "5"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn normalize_and_reduce_emit_canonical_files() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("t.json");
    let out = run(&[
        "gen", "tree", "--seed", "3", "--mix", "glue", "--k", "2", "-o", path_str(&tree),
    ]);
    assert_eq!(code(&out), 0);
    let normalized = dir.path().join("n.json");
    let out = run(&["normalize", path_str(&tree), "-o", path_str(&normalized)]);
    assert_eq!(code(&out), 0);
    // normalization output parses and re-normalizes to the same bytes
    let once = std::fs::read(&normalized).unwrap();
    let twice = dir.path().join("n2.json");
    let out = run(&["normalize", path_str(&normalized), "-o", path_str(&twice)]);
    assert_eq!(code(&out), 0);
    assert_eq!(once, std::fs::read(&twice).unwrap());

    let subst = dir.path().join("s.json");
    let out = run(&[
        "gen", "tree", "--seed", "4", "--mix", "substitute-clique-glue", "--max-vertices", "14",
        "-o", path_str(&subst),
    ]);
    assert_eq!(code(&out), 0);
    let witness = dir.path().join("w.txt");
    let out = run(&["reduce", path_str(&subst), "-o", path_str(&witness)]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&witness).unwrap().starts_with("p "));
}
