use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_theta-gsp4")).args(args).current_dir(env!("CARGO_MANIFEST_DIR")).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classgroup_tsv() {
    let o = run(&["classgroup", "-23"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("kind\tindex\tform\torder\n"));
    assert!(s.contains("summary\th\t3\tgroup law pass"));
}

#[test]
fn mass_json() {
    let o = run(&["--json", "mass", "1", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["coefficient"], "1/270");
    assert_eq!(v[0]["pi_power"], "3");
}

#[test]
fn mass_rejects_square_factor() {
    let o = run(&["mass", "4", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_subset_is_deterministic() {
    let a = run(&["verify", "mass", "hecke"]);
    let b = run(&["verify", "hecke", "mass"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn verify_reports_deviation_with_nonzero_exit() {
    let o = run(&["verify", "bessel"]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("\tdeviation\t"));
    assert!(s.contains("steinberg: series = closed form with L(3/2, eps sigma^-1)"));
}

#[test]
fn verify_unknown_group() {
    assert_eq!(run(&["verify", "nope"]).status.code(), Some(2));
}

#[test]
fn factor_tables() {
    let o = run(&["factors", "tau"]);
    assert!(stdout(&o).contains("inert\t(q)/(q + 1)"));
    let o = run(&["factors", "euler", "kappa=2", "c_max=1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("c(nu)=1\t"));
    assert_eq!(run(&["factors", "euler", "kappa"]).status.code(), Some(2));
}

#[test]
fn theta_from_coefficient_file() {
    let o = run(&["theta", "7", "3", "1", "1", "--coeffs", "data/theta_7_3.txt"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert_eq!(s.lines().filter(|l| l.starts_with("theta\t")).count(), 4);
    assert!(s.contains("check\tfiber identity\t4 sigma\tpass"));
    assert!(s.contains("check\tpushforward master identity\tn=1\tpass"));
}

#[test]
fn interp_from_config() {
    let o = run(&["interp", "--config", "data/interp_7_3.conf"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("factor\teps_N+(pi)\t-1"));
    assert!(s.contains("normalization\tintro / global\t-1 * alpha_P^6"));
}
