use std::fs;
use std::io::Write;
use std::process::{Command, Output, Stdio};

fn atlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atlab")).args(args).output().unwrap()
}

fn atlab_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_atlab"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn index_exact_and_json() {
    let o = atlab(&["index", "BANANA"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("index: 4 (exact)"));
    let o = atlab(&["index", "--json", "ABRACADABRA"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["index"], 7);
    assert_eq!(v["exact"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(atlab(&["index", ""]).status.code(), Some(2));
    assert_eq!(atlab(&["index", "ÄB"]).status.code(), Some(2));
    assert_eq!(atlab(&["index", &"AB".repeat(10)]).status.code(), Some(3));
    assert_eq!(atlab(&["index", "--split-branch", &"AB".repeat(10)]).status.code(), Some(0));
    assert_eq!(atlab(&["compress", "--scheme", "zip", "AB"]).status.code(), Some(2));
    assert_eq!(atlab(&["diverge", "--n-max", "3"]).status.code(), Some(2));
    assert_eq!(atlab_stdin(&["sat", "encode"], b"ABCDABCDAB").status.code(), Some(3));
    assert_eq!(atlab_stdin(&["sat", "decode"], b"SAT1\x01").status.code(), Some(2));
    assert_eq!(atlab_stdin(&["sat", "decode"], b"nope").status.code(), Some(2));
}

#[test]
fn grammar_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("w.dot");
    let o = atlab(&["grammar", "AA", "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("N_A -> 'A'\nN_AA -> N_A N_A\n"));
    assert!(fs::read_to_string(dot).unwrap().contains("digraph"));
}

#[test]
fn compress_golden() {
    let o = stdout(&atlab(&["compress", "--scheme", "lz78", "AB"]));
    assert!(o.contains("factors: 2") && o.contains("hex: 541a10"), "{o}");
    let o = stdout(&atlab(&["compress", "--scheme", "rle", "AAAABB"]));
    assert!(o.contains("runs: Ax4 Bx2"));
}

#[test]
fn sat_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (src, sat, back) = (dir.path().join("x.txt"), dir.path().join("x.sat"), dir.path().join("y.txt"));
    fs::write(&src, "BANANA\n").unwrap();
    let p = |q: &std::path::PathBuf| q.to_str().unwrap().to_string();
    assert!(atlab(&["sat", "encode", "--in", &p(&src), "--out", &p(&sat)]).status.success());
    assert!(fs::read(&sat).unwrap().starts_with(b"SAT1"));
    assert!(atlab(&["sat", "decode", "--in", &p(&sat), "--out", &p(&back)]).status.success());
    assert_eq!(fs::read_to_string(back).unwrap().trim(), "BANANA");
}

#[test]
fn ensemble_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("c.json");
    fs::write(
        &cat,
        r#"[{"items":[{"object":"AB","copies":2}]},{"items":[{"object":"BANANA","copies":3},{"object":"AA","copies":1}]}]"#,
    )
    .unwrap();
    let o = atlab(&["ensemble", "stats", "--catalog", cat.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = atlab(&["ensemble", "code", "--catalog", cat.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("object_set_hash,assembly_number,measure,length,codeword"));
    fs::write(&cat, "{").unwrap();
    assert_eq!(atlab(&["ensemble", "stats", "--catalog", cat.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--steps", "50", "--bias", "2", "--seed", "9"];
    let (a, b) = (atlab(&args), atlab(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bench_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, csv, svg) = (dir.path().join("c.txt"), dir.path().join("r.csv"), dir.path().join("r.svg"));
    fs::write(&corpus, "AAAA\nABAB\nBANANA\n\nABRACADABRA\nABABABABABABABABABAB\n").unwrap();
    let p = |q: &std::path::PathBuf| q.to_str().unwrap().to_string();
    let o = atlab(&["bench", "--corpus", &p(&corpus), "--out", &p(&csv), "--plot", &p(&svg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(csv).unwrap();
    assert_eq!(table.lines().count(), 6);
    assert!(table.contains("split-branch"));
    assert!(fs::read_to_string(svg).unwrap().contains("<svg"));
}

#[test]
fn diverge_table() {
    let o = stdout(&atlab(&["diverge", "--n-max", "64"]));
    let rows: Vec<Vec<i64>> =
        o.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 64);
    assert_eq!(rows[3][1], 8);
    assert_eq!(rows[63][5] - rows[7][5], 6);
}
