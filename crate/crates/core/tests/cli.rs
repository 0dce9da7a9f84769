use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hycolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hycolor")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_lines(path: &Path) -> Vec<serde_json::Value> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn proper(edges: &[(usize, usize)], coloring: &[serde_json::Value]) -> bool {
    edges.iter().all(|&(u, v)| coloring[u] != coloring[v])
}

struct Trained {
    _dir: tempfile::TempDir,
    corpus: PathBuf,
    model: PathBuf,
}

fn trained() -> Trained {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.csv");
    let model = dir.path().join("model.bin");
    let o =
        hycolor(&["gen-corpus", "--count", "30", "--n-min", "4", "--n-max", "12", "--seed", "5", "--out", s(&corpus)]);
    assert!(o.status.success(), "{o:?}");
    let o =
        hycolor(&["train", "--input", s(&corpus), "--out", s(&model), "--epochs", "2", "--hidden", "8", "--seed", "3"]);
    assert!(o.status.success(), "{o:?}");
    Trained { _dir: dir, corpus, model }
}

#[test]
fn exact_and_heuristic_on_fixtures() {
    let o = hycolor(&["exact", "--input", &fixture("chvatal.col")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("chromatic number 4"));
    for method in ["dsatur", "rlf", "greedy"] {
        let o = hycolor(&["heuristic", "--input", &fixture("queen5_5.col"), "--baseline", method]);
        assert!(o.status.success());
        assert!(stdout(&o).contains(&format!("{method} used")));
    }
}

#[test]
fn gen_corpus_and_train_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let corpus = dir.path().join(format!("{tag}.csv"));
        let model = dir.path().join(format!("{tag}.bin"));
        let gen = ["gen-corpus", "--count", "12", "--n-min", "3", "--n-max", "9", "--seed", "11", "--out", s(&corpus)];
        assert!(hycolor(&gen).status.success());
        let train =
            ["train", "--input", s(&corpus), "--out", s(&model), "--epochs", "2", "--hidden", "4", "--layers", "2"];
        assert!(hycolor(&train).status.success());
        let read = |suffix: &str| std::fs::read(dir.path().join(format!("{tag}{suffix}"))).unwrap();
        (read(".csv"), read(".bin"), read(".bin.loss.csv"))
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    let loss = String::from_utf8(a.2).unwrap();
    assert_eq!(loss.lines().next().unwrap(), "epoch,mean_mape,last_batch_mape");
    assert_eq!(loss.lines().count(), 3);
    let manifest = std::fs::read_to_string(dir.path().join("a.csv.manifest.csv")).unwrap();
    assert_eq!(manifest.lines().count(), 13);
}

#[test]
fn color_reports_and_is_proper() {
    let t = trained();
    let report = t._dir.path().join("color.jsonl");
    let input = fixture("petersen.col");
    let o = hycolor(&["color", "--model", s(&t.model), "--input", &input, "--report", s(&report)]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("corrected"));
    let rec = &json_lines(&report)[0];
    let g = hycolor::io::parse_dimacs(&std::fs::read_to_string(&input).unwrap()).unwrap();
    let edges: Vec<_> = g.edges().collect();
    assert!(proper(&edges, rec["coloring"].as_array().unwrap()));
    assert_eq!(rec["nodes"], 10);
    assert!(rec["colors_after"].as_u64().unwrap() >= 3);

    // ensemble and BFS ordering over a CSV of graphs
    let report = t._dir.path().join("color2.jsonl");
    let o = hycolor(&[
        "color",
        "--model",
        s(&t.model),
        "--model",
        s(&t.model),
        "--bfs",
        "--input",
        s(&t.corpus),
        "--report",
        s(&report),
    ]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(json_lines(&report).len(), 30);
}

#[test]
fn color_intervals_and_edgeless() {
    let t = trained();
    let intervals = t._dir.path().join("live.txt");
    std::fs::write(&intervals, "# A, B overlap; C is alone\nvreg 0 0 10\nvreg 1 5 15\nvreg 2 20 30\n").unwrap();
    let report = t._dir.path().join("r.jsonl");
    let o = hycolor(&["color", "--model", s(&t.model), "--input", s(&intervals), "--report", s(&report)]);
    assert!(o.status.success(), "{o:?}");
    let rec = &json_lines(&report)[0];
    assert_eq!(rec["nodes"], 3);
    assert_eq!(rec["edges"], 1);
    assert!(rec["colors_after"].as_u64().unwrap() <= 2);
    assert!(proper(&[(0, 1)], rec["coloring"].as_array().unwrap()));

    let edgeless = t._dir.path().join("e.col");
    std::fs::write(&edgeless, "p edge 4 0\n").unwrap();
    let o = hycolor(&[
        "color",
        "--model",
        s(&t.model),
        "--input",
        s(&edgeless),
        "--format",
        "dimacs",
        "--report",
        s(&report),
    ]);
    assert!(o.status.success());
    let rec = &json_lines(&report)[0];
    assert_eq!(rec["colors_before"], rec["colors_after"]);
    assert_eq!(rec["invalid_pct"], 0.0);
}

#[test]
fn evaluate_and_compare() {
    let t = trained();
    let report = t._dir.path().join("eval.jsonl");
    let o = hycolor(&["evaluate", "--model", s(&t.model), "--input", s(&t.corpus), "--report", s(&report)]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert!(out.contains("match optimal"));
    let buckets: serde_json::Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
    assert_eq!(buckets["total_graphs"], 30);
    assert_eq!(buckets["pct_proper_after_correction"], 100.0);
    assert_eq!(json_lines(&report).len(), 30);

    let store = t._dir.path().join("feedback.csv");
    let report = t._dir.path().join("cmp.jsonl");
    let o = hycolor(&[
        "compare",
        "--model",
        s(&t.model),
        "--input",
        s(&t.corpus),
        "--store",
        s(&store),
        "--report",
        s(&report),
    ]);
    assert!(o.status.success(), "{o:?}");
    let records = json_lines(&report);
    let losses = records.iter().filter(|r| r["winner"] == "dsatur").count();
    for r in &records {
        let chosen = r["coloring"].as_array().unwrap();
        let mut distinct: Vec<_> = chosen.iter().map(|c| c.as_u64().unwrap()).collect();
        distinct.sort_unstable();
        distinct.dedup();
        let best = r["hybrid_colors"].as_u64().unwrap().min(r["baseline_colors"].as_u64().unwrap());
        assert!(distinct.len() as u64 <= best);
    }
    let stored = std::fs::read_to_string(&store).unwrap().lines().count();
    assert_eq!(stored, losses);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(hycolor(&["--help"]).status.code(), Some(0));
    assert_eq!(hycolor(&["--version"]).status.code(), Some(0));
    assert_eq!(hycolor(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(hycolor(&["exact"]).status.code(), Some(1));
    let out = dir.path().join("c.csv");
    assert_eq!(hycolor(&["gen-corpus", "--n-min", "9", "--n-max", "3", "--out", s(&out)]).status.code(), Some(1));
    assert_eq!(hycolor(&["exact", "--input", "/definitely/not/here.col"]).status.code(), Some(2));

    let bad = dir.path().join("bad.col");
    std::fs::write(&bad, "e 1 2\n").unwrap();
    assert_eq!(hycolor(&["exact", "--input", s(&bad)]).status.code(), Some(2));

    let corpus = dir.path().join("corpus.csv");
    assert!(hycolor(&["gen-corpus", "--count", "3", "--n-max", "6", "--out", s(&corpus)]).status.success());
    let mut text = std::fs::read_to_string(&corpus).unwrap();
    text.push_str("7,1,0\n");
    std::fs::write(&corpus, text).unwrap();
    let o = hycolor(&["train", "--input", s(&corpus), "--out", s(&dir.path().join("m.bin")), "--epochs", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));

    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let o = hycolor(&["train", "--input", s(&empty), "--out", s(&dir.path().join("m.bin"))]);
    assert_eq!(o.status.code(), Some(2));

    let model = dir.path().join("garbage.bin");
    std::fs::write(&model, "not a model").unwrap();
    let o = hycolor(&["color", "--model", s(&model), "--input", &fixture("petersen.col")]);
    assert_eq!(o.status.code(), Some(2));

    let big = dir.path().join("big.col");
    std::fs::write(&big, "p edge 101 0\n").unwrap();
    assert_eq!(hycolor(&["heuristic", "--input", s(&big)]).status.code(), Some(2));
}
