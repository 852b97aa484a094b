use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arbdot-bench"))
        .args(args)
        .env_remove("ARBDOT_MAX_SIZE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bench_prints_header_and_row() {
    let o = run(&["bench", "--op", "dot_ball", "--n", "20", "--prec", "128", "--profile", "uniform", "--reps", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "operation,N,p,profile,ns_per_term,ratio_vs_naive,blocks");
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&fields[..4], &["dot_ball", "20", "128", "uniform"]);
    assert!(fields[4].parse::<f64>().unwrap() > 0.0);
    assert_eq!(fields[6], "");
}

#[test]
fn matmul_rows_report_blocks() {
    let o = run(&["bench", "--op", "matmul_block", "--n", "32", "--prec", "64", "--reps", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("matmul_block,32,64,uniform,"));
    assert!(row.ends_with(",1"), "{row}");
}

#[test]
fn csv_file_gets_header_once() {
    let path = std::env::temp_dir().join(format!("arbdot-cli-{}.csv", std::process::id()));
    let _ = std::fs::remove_file(&path);
    let p = path.to_str().unwrap();
    for _ in 0..2 {
        let o = run(&["bench", "--op", "poly_mul", "--n", "8", "--prec", "53", "--reps", "1", "--csv", p]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("operation,"));
    assert!(lines[1].starts_with("poly_mul,8,53,uniform,"));
}

#[test]
fn verify_is_deterministic_and_succeeds() {
    let a = run(&["verify", "--suite", "dot", "--trials", "30", "--seed", "5"]);
    let b = run(&["verify", "--suite", "dot", "--trials", "30", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("total failures 0"));
}

#[test]
fn usage_errors_exit_with_2() {
    for args in [
        &["bench", "--op", "nope", "--n", "4", "--prec", "53"][..],
        &["bench", "--op", "dot_ball", "--n", "4"],
        &["bench", "--op", "dot_ball", "--n", "0", "--prec", "53"],
        &["bench", "--op", "dot_complex", "--n", "4", "--prec", "53", "--profile", "uniform"],
        &["verify", "--suite", "everything"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn size_cap_is_enforced() {
    let o = Command::new(env!("CARGO_BIN_EXE_arbdot-bench"))
        .args(["bench", "--op", "dot_ball", "--n", "500", "--prec", "53", "--reps", "1"])
        .env("ARBDOT_MAX_SIZE", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ARBDOT_MAX_SIZE"));
}
