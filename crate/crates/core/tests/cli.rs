use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use string_damping::even_field::to_traveling_wave;
use string_damping::experiment::{gen_initial, record_from_csv, record_to_csv, RECORD_HEADER, SUMMARY_HEADER};
use string_damping::friction_solver::trajectory_rho;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_string-damping"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("string-damping-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn summary_row(text: &str) -> Vec<String> {
    let mut lines = text.lines().skip_while(|l| *l != SUMMARY_HEADER);
    assert_eq!(lines.next(), Some(SUMMARY_HEADER));
    lines.next().unwrap().split(',').map(str::to_owned).collect()
}

#[test]
fn identical_runs_write_identical_csv() {
    let (a, b) = (scratch("det_a.csv"), scratch("det_b.csv"));
    for out in [&a, &b] {
        let o = bin(&["simulate", "--seed", "5", "--amplitude", "3", "--horizon", "6pi", "--grid", "256", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (x, y) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(x, y);
    assert!(String::from_utf8(x).unwrap().starts_with(RECORD_HEADER));
}

#[test]
fn constant_profile_decays_at_unit_rate() {
    // g ≡ 50 is f1 ≡ 50
    let o = bin(&["decay", "--f1", "0=50", "--horizon", "80pi", "--grid", "512"]);
    assert!(o.status.success());
    let row = summary_row(&String::from_utf8(o.stdout).unwrap());
    let rate: f64 = row[3].parse().unwrap();
    assert!((rate - 1.0).abs() <= 1e-12, "rate {rate}");
}

#[test]
fn decay_writes_summary_next_to_output() {
    let out = scratch("decay.csv");
    let o = bin(&["decay", "--f1", "0=3", "--horizon", "4pi", "--grid", "64", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let summary = fs::read_to_string(scratch("decay.summary.csv")).unwrap();
    assert_eq!(summary.lines().next(), Some(SUMMARY_HEADER));
    let rec = record_from_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rec.rho_stop[0], 3.0 * std::f64::consts::TAU);
}

#[test]
fn emitted_csv_round_trips_exactly() {
    let g = to_traveling_wave(&gen_initial(9, 4.0, 1.0, 10), 128).unwrap();
    let rec = trajectory_rho(&g, 9.3).unwrap();
    let text = record_to_csv(&rec);
    assert_eq!(record_from_csv(&text).unwrap(), rec);
    assert_eq!(record_to_csv(&record_from_csv(&text).unwrap()), text);
}

#[test]
fn support_prints_both_values_and_ratio() {
    let o = bin(&["support", "--psi", "0=1", "--horizon", "2pi"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("T,H_D(T),H_Omega,ratio"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((row[1] - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!((row[2] - 1.0).abs() < 1e-12);
}

#[test]
fn config_errors_exit_with_two_and_name_the_key() {
    let cases: [(&[&str], &str); 4] = [
        (&["simulate", "--grid", "7"], "grid"),
        (&["simulate", "--horizon", "-1"], "horizon"),
        (&["simulate", "--problem", "sideways"], "problem"),
        (&["simulate", "--set", "colour=blue"], "colour"),
    ];
    for (args, key) in cases {
        let o = bin(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert!(err.contains(&format!("`{key}`")), "{err}");
    }
}

#[test]
fn inadmissible_control_file_is_rejected() {
    let path = scratch("controls.csv");
    fs::write(&path, "start,end,u\n0,3,0.5\n3,20,1.5\n").unwrap();
    let o = bin(&[
        "bound-check", "--f1", "0=5", "--horizon", "2pi", "--grid", "64",
        "--set", &format!("control_file={}", path.display()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("control_file"));
}

#[test]
fn bound_check_accepts_an_admissible_control_file() {
    let path = scratch("controls_ok.csv");
    fs::write(&path, "start,end,u\n0,3,0.5\n3,20,-1\n").unwrap();
    let o = bin(&[
        "bound-check", "--f1", "0=5", "--horizon", "2pi", "--grid", "64",
        "--set", "controls=5", "--set", &format!("control_file={}", path.display()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("index,rate,level,bound,within\ndry-friction,"));
    assert_eq!(text.lines().filter(|l| l.ends_with(",true")).count(), 7);
}

#[test]
fn oracle_blow_up_exits_with_three() {
    let o = bin(&["oracle", "--f1", "1=5", "--horizon", "2000", "--set", "oracle_dt=0.5"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_file_and_flags_combine() {
    let cfg = scratch("run.cfg");
    fs::write(&cfg, "# constant profile\nf1 = 0:2\nhorizon = 2pi\ngrid = 32\n").unwrap();
    let o = bin(&["decay", "--config", cfg.to_str().unwrap(), "--horizon", "4pi"]);
    assert!(o.status.success());
    let row = summary_row(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(row[2].parse::<f64>().unwrap(), 4.0 * std::f64::consts::PI);
}
