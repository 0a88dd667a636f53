use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ab-polya"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn gap_chain_closes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain.json");
    let o = run(&["certify", "gap", "--from", "5/2", "--to", "9", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["status"], "certified");
    assert_eq!(doc["steps"][0]["e_low"], "7/16");
    assert!(doc["steps"].as_array().unwrap().len() <= 30);
}

#[test]
fn gap_usage_and_math_errors() {
    assert_eq!(run(&["certify", "gap", "--from", "9", "--to", "5/2"]).status.code(), Some(2));
    let o = run(&["certify", "gap", "--from", "1/10", "--to", "1/5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no-positive-margin at 1/10"));
}

#[test]
fn output_is_byte_deterministic() {
    let a = run(&["certify", "gap", "--from", "5/2", "--to", "4"]);
    let b = run(&["certify", "gap", "--from", "5/2", "--to", "4"]);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["check", "neumann", "--alpha", "0,1/2", "--nmax", "50", "--jobs", "2"]);
    let b = run(&["check", "neumann", "--alpha", "0,1/2", "--nmax", "50", "--jobs", "1"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn endpoint_certificates() {
    for cmd in ["small-lambda", "large-lambda"] {
        let o = run(&["certify", cmd]);
        assert_eq!(o.status.code(), Some(0));
        let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(doc["status"], "certified");
        assert!(doc["inequalities"].as_array().unwrap().iter().all(|i| i["holds"] == true));
    }
}

#[test]
fn table_validation() {
    let o = run(&["validate", "table"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all 15 rows pass"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    let text = ab_fixture().replace("4,4,1,8/17", "4,4,2,8/17");
    std::fs::write(&bad, text).unwrap();
    let o = run(&["validate", "table", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("row 4 lambda=4 FAIL check (a)"));

    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(run(&["validate", "table", empty.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["validate", "table", "/nonexistent/table.csv"]).status.code(), Some(2));
}

fn ab_fixture() -> String {
    std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/table1.csv")).unwrap()
}

#[test]
fn polya_checks() {
    let o = run(&["check", "dirichlet", "--alpha", "0,1/4,1/2", "--nmax", "500", "--jobs", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = run(&["check", "neumann", "--alpha", "1/2", "--nmax", "500", "--lambda-grid", "0.5:10:0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sandwich-neumann,1/2,20,0,"));
    assert_eq!(run(&["check", "neumann", "--alpha", "3/4"]).status.code(), Some(2));
}

#[test]
fn emitters() {
    let o = run(&["emit", "gfun", "--lambda", "5", "--samples", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let g: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(g.len(), 101);
    assert!(g.windows(2).all(|w| w[1] <= w[0]));

    let o = run(&["emit", "zeros-vs-alpha", "--kmax", "3", "--mmax", "3", "--steps", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("alpha,m,branch,nu,k,zero\n"));

    let o = run(&["emit", "counts", "--side", "neumann", "--lambda", "2.5:9:0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<String> = stdout(&o).lines().skip(1).map(String::from).collect();
    assert_eq!(rows.len(), 651);
    // Q - lambda^2/4 stays positive on [5/2, 9]
    assert!(rows.iter().all(|r| r.rsplit(',').next().unwrap().parse::<f64>().unwrap() > 0.0));

    let o = run(&["emit", "spectra", "--side", "dirichlet", "--alpha", "0", "--lambda-max", "5"]);
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("dirichlet,0,0,1,5.78318596294"));
}
