use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rankw_core::graph::parse_graph;
use rankw_core::{isomorphic, Layout};
use tempfile::TempDir;

fn rankw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankw")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = rankw(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn c5(dir: &TempDir) -> String {
    let p = path(dir, "c5.rg");
    ok(&["encode", "--from", "undirected", "--edges", "v1-v2,v2-v3,v3-v4,v4-v5,v5-v1", "--output", &p]);
    p
}

#[test]
fn width_of_c5() {
    let dir = TempDir::new().unwrap();
    let g = c5(&dir);
    let nwk = path(&dir, "c5.nwk");
    let out = ok(&["width", "--input", &g, "--param", "rank", "--emit-layout", &nwk]);
    assert!(out.starts_with("width 2\n"), "{out}");
    let file = parse_graph(&fs::read_to_string(&g).unwrap()).unwrap();
    let (_, w) = Layout::parse_newick(&fs::read_to_string(&nwk).unwrap(), file.graph.labels()).unwrap();
    assert_eq!(w, Some(2));
    assert!(ok(&["width", "--input", &g, "--k", "1"]).starts_with("width <= 1: no"));
    assert!(ok(&["width", "--input", &g, "--param", "birank"]).starts_with("width 4\n"));
}

#[test]
fn json_mirrors_width() {
    let dir = TempDir::new().unwrap();
    let g = c5(&dir);
    let v: serde_json::Value = serde_json::from_str(&ok(&["--json", "width", "--input", &g])).unwrap();
    assert_eq!(v["width"], 2);
    assert!(v["witness"].as_str().unwrap().ends_with(';'));
    assert_eq!(v["cuts"].as_array().unwrap().len(), 7);
}

#[test]
fn output_independent_of_jobs() {
    let dir = TempDir::new().unwrap();
    let p = path(&dir, "g.rg");
    ok(&[
        "encode",
        "--from",
        "undirected",
        "--edges",
        "a-b,b-c,c-d,d-e,e-f,f-g,g-a,a-d,b-f,c-g",
        "--output",
        &p,
    ]);
    let one = ok(&["width", "--input", &p]);
    let four = ok(&["--jobs", "4", "width", "--input", &p]);
    assert_eq!(one, four);
}

#[test]
fn lambda_on_triangle() {
    let dir = TempDir::new().unwrap();
    let p = path(&dir, "k3.rg");
    ok(&["encode", "--from", "undirected", "--edges", "v1-v2,v2-v3,v3-v1", "--output", &p]);
    assert_eq!(ok(&["cut", "--input", &p, "--set", "v1", "--kind", "lambda"]), "3\n");
    assert_eq!(ok(&["cut", "--input", &p, "--set", "v1,v2", "--kind", "bicutrk"]), "2\n");
}

#[test]
fn directed_encoding() {
    let out = ok(&["encode", "--from", "directed", "--arcs", "x>y"]);
    assert!(out.contains("field 2 2\n") && out.contains("sigma frob-inv\n"));
    assert!(out.contains("edge x y 2\n") && out.contains("edge y x 3\n"));
    let back = parse_graph(&out).unwrap();
    assert_eq!(back.sigma_graph().unwrap().n(), 2);
    let oriented = ok(&["encode", "--from", "oriented", "--arcs", "x>y"]);
    assert!(oriented.contains("edge x y 1\n") && oriented.contains("edge y x 2\n"));
}

#[test]
fn emitted_graphs_reparse() {
    let dir = TempDir::new().unwrap();
    let g = c5(&dir);
    let dot = path(&dir, "c5.dot");
    let text = ok(&["transform", "--input", &g, "--local", "v1", "--lambda", "1", "--emit-dot", &dot]);
    let h = parse_graph(&text).unwrap();
    assert_eq!(rankw_core::graph::write_graph(&h.graph, h.sigma.as_ref()), text);
    assert!(fs::read_to_string(&dot).unwrap().starts_with("digraph G {"));
    let once = path(&dir, "once.rg");
    fs::write(&once, &text).unwrap();
    let twice = ok(&["transform", "--input", &once, "--local", "v1", "--lambda", "1"]);
    assert_eq!(twice, fs::read_to_string(&g).unwrap());
}

#[test]
fn term_round_trip() {
    let dir = TempDir::new().unwrap();
    let g = c5(&dir);
    let t = path(&dir, "c5.term");
    ok(&["term", "compile", "--input", &g, "--output", &t]);
    let text = ok(&["term", "eval", "--input", &t, "--field", "2", "1", "--sigma", "id"]);
    let a = parse_graph(&text).unwrap().graph;
    let b = parse_graph(&fs::read_to_string(&g).unwrap()).unwrap().graph;
    assert!(isomorphic(&a, &b).unwrap().is_some());

    let d = path(&dir, "d.rg");
    ok(&["encode", "--from", "directed", "--arcs", "a>b,b>c,c>a,c>d", "--output", &d]);
    let file = parse_graph(&fs::read_to_string(&d).unwrap()).unwrap();
    let plain = path(&dir, "plain.rg");
    fs::write(&plain, rankw_core::graph::write_graph(&file.graph, None)).unwrap();
    let bt = path(&dir, "d.term");
    ok(&["term", "compile", "--input", &plain, "--param", "birank", "--output", &bt]);
    let text = ok(&["term", "eval", "--input", &bt, "--field", "2", "2"]);
    let back = parse_graph(&text).unwrap().graph;
    assert!(isomorphic(&back, &file.graph).unwrap().is_some());
}

#[test]
fn obstruction_files() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("obs");
    let text = ok(&[
        "obstructions", "--field", "2", "1", "--sigma", "id", "--relation", "vertex", "--k", "1", "--max-n", "6", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(text.contains("3 obstructions"), "{text}");
    let index = fs::read_to_string(out.join("index.txt")).unwrap();
    assert_eq!(index.lines().count(), 3);
    for line in index.lines() {
        let name = line.split_whitespace().next().unwrap();
        let g = parse_graph(&fs::read_to_string(Path::new(&out).join(name)).unwrap()).unwrap();
        assert_eq!(g.graph.n(), 5);
    }
}

#[test]
fn minor_test() {
    let dir = TempDir::new().unwrap();
    let g = c5(&dir);
    let k3 = path(&dir, "k3.rg");
    ok(&["encode", "--from", "undirected", "--edges", "v1-v2,v2-v3,v3-v1", "--output", &k3]);
    assert!(ok(&["transform", "--input", &g, "--contains", &k3]).starts_with("found on"));
    // pivots keep a bipartite graph bipartite
    let p4 = path(&dir, "p4.rg");
    ok(&["encode", "--from", "undirected", "--edges", "a-b,b-c,c-d", "--output", &p4]);
    assert!(ok(&["transform", "--input", &p4, "--contains", &k3]).starts_with("found on"));
    assert!(ok(&["transform", "--input", &p4, "--contains", &k3, "--relation", "pivot"]).starts_with("absent"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let g = c5(&dir);
    assert_eq!(rankw(&["width", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(rankw(&["nonsense"]).status.code(), Some(2));
    assert_eq!(rankw(&["width", "--input", &path(&dir, "missing.rg")]).status.code(), Some(1));
    let o = rankw(&["transform", "--input", &g, "--pivot", "v1,v3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not adjacent"));
    let plain = path(&dir, "plain.rg");
    ok(&["encode", "--from", "directed", "--arcs", "a>b", "--output", &plain]);
    let text = fs::read_to_string(&plain).unwrap().replace("sigma frob-inv\n", "");
    fs::write(&plain, text).unwrap();
    assert_eq!(rankw(&["width", "--input", &plain]).status.code(), Some(1));
    assert_eq!(rankw(&["obstructions", "--field", "4", "1", "--k", "1", "--max-n", "4"]).status.code(), Some(1));
}

#[test]
fn selfcheck_passes() {
    let out = ok(&["selfcheck", "--seed", "3"]);
    assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(out.contains("0 failed"));
}
