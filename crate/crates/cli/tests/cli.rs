use std::fs;
use std::process::{Command, Output};

use vlasov_cli::parse_config;

fn vlasov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vlasov")).args(args).output().expect("binary runs")
}

fn tiny_config(dir: &std::path::Path, extra: &str) -> String {
    let path = dir.join("tiny.cfg");
    fs::write(&path, format!("# small grid\nnx = 8\nnv1 = 16\nnv2 = 16\nt_final = 0.3\ndt = 0.1\n{extra}")).unwrap();
    path.display().to_string()
}

#[test]
fn dumped_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path(), "case = weibel\n");
    let dump = dir.path().join("effective.cfg");
    let first = dir.path().join("a.csv");
    let out = vlasov(&[
        "run", "--config", &cfg, "--scheme", "valis", "--set", "beta=2e-4", "--dump-config",
        dump.to_str().unwrap(), "--out", first.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = fs::read_to_string(&dump).unwrap();
    let parsed = parse_config(&text).unwrap();
    assert_eq!(parsed.dump(), text);
    assert!(text.contains("scheme = valis") && text.contains("beta = 0.0002"));

    let second = dir.path().join("b.csv");
    let out = vlasov(&["run", "--config", dump.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    assert_eq!(fs::read_to_string(&first).unwrap().lines().count(), 5);
}

#[test]
fn stdout_output_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = vlasov(&["run", "--config", &tiny_config(dir.path(), ""), "--out", "-"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("time,e_pot,e_mag,e_kin,e_tot,mass,poisson_residual,abs_E1_k,abs_E2_k,abs_B_k\n"));
}

#[test]
fn configuration_errors_exit_2_with_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let out = vlasov(&["run", "--config", &tiny_config(dir.path(), "dt = -1\nwhat = 3\n"), "--set", "nx"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for needle in ["dt", "unknown key 'what'", "--set #1"] {
        assert!(err.contains(needle), "{err}");
    }
    assert_eq!(vlasov(&["run", "--case", "plasma"]).status.code(), Some(2));
    assert_eq!(vlasov(&["order-study", "--ladder", "0.1,0.2"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = vlasov(&["run", "--config", &tiny_config(dir.path(), "case = weibel\nbeta = 100\n"), "--out", "-"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn io_failures_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path(), "");
    assert_eq!(vlasov(&["run", "--config", &cfg, "--out", "/nonexistent/dir/x.csv"]).status.code(), Some(4));
    assert_eq!(vlasov(&["plot", "/nonexistent/run.csv", "e_pot"]).status.code(), Some(4));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_vlasov"))
        .args(["run", "--set", "t_final=0"])
        .env("VLASOV_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plot_script_for_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    assert!(vlasov(&["run", "--config", &tiny_config(dir.path(), ""), "--out", csv.to_str().unwrap()]).status.success());
    let script = dir.path().join("plot.gp");
    let out = vlasov(&["plot", csv.to_str().unwrap(), "e_tot", "--out", script.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(&script).unwrap();
    assert!(text.contains("set logscale y") && text.contains("using 1:5 "));
}

#[test]
fn order_study_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path(), "case = weibel\n");
    let out = vlasov(&["order-study", "--config", &cfg, "--scheme", "strang", "--ladder", "0.2,0.1", "--t-final", "0.4", "--out", "-"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "stepsize,l1_error,order");
    let order: f64 = lines[2].split(',').nth(2).unwrap().parse().unwrap();
    assert!((order - 2.0).abs() < 0.3, "{order}");
}
