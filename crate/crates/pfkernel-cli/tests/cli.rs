use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use num_complex::Complex64;
use pfkernel::ensembles::EnsembleSpec;
use pfkernel::finite_kernel::WeightedPreKernel;
use pfkernel::limit_kernel::{one_point, UniversalityClass};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfkernel")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pfkernel-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Data rows (after the comment header and the column line) split on commas.
fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

fn header(text: &str) -> Vec<&str> {
    text.lines().take_while(|l| l.starts_with('#')).collect()
}

#[test]
fn density_ah_bulk_grid_matches_library() {
    let out = stdout(&["density", "--class", "ah-bulk", "--ctilde", "1", "--grid", "-3:3:121,0:2:81"]);
    let h = header(&out);
    assert_eq!(h[0], format!("# pfkernel {} density", pfkernel::VERSION));
    assert!(h.contains(&"# ctilde=1") && h.contains(&"# grid=-3:3:121,0:2:81"));
    assert_eq!(out.lines().find(|l| !l.starts_with('#')), Some("x,y,R"));
    let r = rows(&out);
    assert_eq!(r.len(), 121 * 81);
    let class = UniversalityClass::ah_bulk(1.0, 0.0).unwrap();
    for row in r.iter().step_by(997) {
        let want = one_point(&class, Complex64::new(row[0], row[1])).unwrap();
        assert_eq!(row[2], want);
    }
    // translation invariance along the real axis, zero on it
    assert!(r.iter().filter(|v| v[1] == 0.0).all(|v| v[2] == 0.0));
    let at = |x: f64, y: f64| r.iter().find(|v| (v[0] - x).abs() < 1e-9 && (v[1] - y).abs() < 1e-9).unwrap()[2];
    assert!((at(-1.0, 0.5) - at(1.0, 0.5)).abs() < 1e-12);
}

#[test]
fn density_finite_edge_keyword() {
    let out = stdout(&["density", "--finite", "--potential", "softhard", "--n", "100", "--p", "edge", "--grid", "-4:0:5,0.5:1.5:3"]);
    assert!(header(&out).contains(&"# p=1.4142135623730951"));
    let k = WeightedPreKernel::new(&EnsembleSpec::soft_hard(100, 2f64.sqrt()).unwrap()).unwrap();
    for row in rows(&out) {
        assert_eq!(row[2], k.correlation(&[Complex64::new(row[0], row[1])]).unwrap());
    }
}

#[test]
fn density_usage_errors() {
    assert_eq!(code(&["density", "--class", "ah-bulk", "--grid", "0:1:2,0:1:2"]), 2);
    assert_eq!(code(&["density", "--class", "bogus", "--grid", "0:1:2,0:1:2"]), 2);
    assert_eq!(code(&["density", "--class", "ah-edge", "--grid", "0:1:2,0:1:2"]), 2);
    assert_eq!(code(&["density", "--class", "nh-bulk", "--grid", "0:1"]), 2);
    assert_eq!(code(&["density", "--grid", "0:1:2,0:1:2"]), 2);
    assert_eq!(code(&["density", "--finite", "--potential", "hard", "--n", "5", "--grid", "0:1:2,0:1:2"]), 2);
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let a = tmp("a.csv");
    let b = tmp("b.csv");
    for path in [&a, &b] {
        let p = path.to_str().unwrap();
        assert_eq!(code(&["density", "--class", "ah-edge", "--c", "1", "--grid", "-3:1:9,0:2:5", "--out", p]), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    for path in [&a, &b] {
        let p = path.to_str().unwrap();
        let args = ["sample", "--potential", "elliptic", "--tau", "0.3", "--n", "4", "--sweeps", "20000", "--seed", "3", "--chains", "3", "--out", p];
        assert_eq!(code(&args), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn converge_examples() {
    let fit = |args: &[&str]| -> f64 {
        let out = stdout(args);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        let head: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(head["command"], "converge");
        let v: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(v["n_values"], serde_json::json!([50, 100, 200, 400]));
        v["exponent"].as_f64().unwrap()
    };
    let r = fit(&["converge", "--family", "softhard", "--z", "-1+1i", "--n", "50,100,200,400"]);
    assert!((r - 0.5).abs() <= 0.15, "{r}");
    let r = fit(&["converge", "--family", "hard", "--rho", "0.5", "--z", "-1+1i"]);
    assert!((r - 0.75).abs() <= 0.15, "{r}");
    assert_eq!(code(&["converge", "--family", "softhard", "--z", "-1+1i", "--n", "100"]), 2);
    assert_eq!(code(&["converge", "--family", "hard", "--z", "-1+1i"]), 2);
    assert_eq!(code(&["converge", "--family", "ah-edge", "--c", "20", "--z", "-1+1i"]), 2);
}

#[test]
fn converge_profile_file() {
    let p = tmp("profile.csv");
    let args = [
        "converge", "--family", "softhard", "--z", "-1+1i", "--format", "csv", "--profile", "h:1:-3:-0.5:6", "--profile-out",
        p.to_str().unwrap(),
    ];
    let out = stdout(&args);
    assert_eq!(rows(&out).len(), 4);
    let prof = fs::read_to_string(&p).unwrap();
    assert!(header(&prof).contains(&"# profile-n=400"));
    // the fit header replays as a config
    let cfg = tmp("converge.cfg");
    let echoed: String = header(&out).iter().skip(1).map(|l| format!("{}\n", &l[2..])).collect();
    fs::write(&cfg, echoed).unwrap();
    assert_eq!(stdout(&["converge", "--config", cfg.to_str().unwrap()]), out);
    let r = rows(&prof);
    assert_eq!(r.len(), 6);
    assert!(r.iter().all(|v| v[1] == 1.0 && v[2] > 0.0));
    assert_eq!(code(&["converge", "--family", "softhard", "--z", "-1+1i", "--profile", "h:1:-3:0:4"]), 2);
}

#[test]
fn check_examples() {
    let out = stdout(&["check", "cd-skew", "--n", "1..20", "--tau", "0.3", "--samples", "10"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 1 + 200);
    for l in &lines[1..] {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert_eq!(v["name"], "cd_skew");
        assert_eq!(v["params"]["tau"], 0.3);
        assert!(v["residual"].as_f64().unwrap() < 1e-8);
    }
    assert_eq!(code(&["check", "limit-ode", "--class", "ah-edge", "--c", "1"]), 0);
    assert_eq!(code(&["check", "limit-ode", "--class", "ah-bulk", "--ctilde", "2"]), 0);
    assert_eq!(code(&["check", "cdi-limit", "--class", "ah-edge", "--c", "2"]), 0);
    for id in ["cd-orthogonal", "rn12", "transformed", "sweep"] {
        assert_eq!(code(&["check", id, "--n", "1..12", "--samples", "3"]), 0, "{id}");
    }
    assert_eq!(code(&["check", "no-such-identity"]), 2);
    assert_eq!(code(&["check", "limit-ode", "--class", "hard"]), 2);
    assert_eq!(code(&["check", "cd-skew", "--n", "0..3"]), 2);
    // an impossible threshold turns the same run into a check failure
    assert_eq!(code(&["check", "cd-skew", "--n", "3", "--samples", "2", "--threshold", "1e-300"]), 1);
}

#[test]
fn check_csv_layout() {
    let out = stdout(&["check", "rn12", "--n", "4", "--samples", "2", "--format", "csv"]);
    let body: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "name,params,residual,lhs_re,lhs_im,rhs_re,rhs_im");
    assert_eq!(body.len(), 1 + 4);
    assert!(body[1].split(',').nth(1).unwrap().contains("n=4"));
}

#[test]
fn sample_compare_example() {
    let p = tmp("n8.csv");
    let args = [
        "sample", "--potential", "elliptic", "--tau", "0", "--n", "8", "--sweeps", "2000000", "--seed", "7", "--compare", "--out",
        p.to_str().unwrap(),
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("max |z|"));
    let text = fs::read_to_string(&p).unwrap();
    assert_eq!(text.lines().find(|l| !l.starts_with('#')), Some("x,y,intensity,stderr,expected,z"));
    let r = rows(&text);
    assert_eq!(r.len(), 50);
    assert!(r.iter().all(|v| v[4] >= 0.0 && v[5].abs() < 4.0));
}

#[test]
fn sample_usage_errors_and_dump() {
    assert_eq!(code(&["sample", "--potential", "elliptic", "--tau", "0", "--n", "0"]), 2);
    assert_eq!(code(&["sample", "--potential", "elliptic", "--n", "3"]), 2);
    assert_eq!(code(&["sample", "--potential", "elliptic", "--tau", "0", "--n", "3", "--sweeps", "0"]), 2);
    let d = tmp("dump.csv");
    let ds = d.to_str().unwrap();
    assert_eq!(code(&["sample", "--potential", "elliptic", "--tau", "0", "--n", "3", "--chains", "2", "--samples-out", ds]), 2);
    let args = ["sample", "--potential", "hard", "--rho", "0.5", "--n", "3", "--sweeps", "1000", "--thin", "10", "--samples-out", ds];
    assert_eq!(code(&args), 0);
    let text = fs::read_to_string(&d).unwrap();
    assert!(header(&text).contains(&"# coordinates=zeta"));
    let r = rows(&text);
    assert_eq!(r.len(), 3 * 90);
    assert!(r.iter().all(|v| v[0] as u64 % 10 == 0 && v[3] > 0.0 && v[2].hypot(v[3]) <= 2f64.sqrt() * 0.5 * (1.0 + 1e-12)));
}

#[test]
fn config_file_defaults_and_overrides() {
    let cfg = tmp("run.cfg");
    fs::write(&cfg, "# density of the edge\nclass=ah-edge c=2\ngrid=-2:0:3,0.5:1:2\n").unwrap();
    let c = cfg.to_str().unwrap();
    let base = stdout(&["density", "--config", c]);
    assert!(header(&base).contains(&"# c=2"));
    let over = stdout(&["--config", c, "density", "--c", "1"]);
    assert!(header(&over).contains(&"# c=1"));
    let direct = stdout(&["density", "--class", "ah-edge", "--c", "1", "--grid", "-2:0:3,0.5:1:2"]);
    assert_eq!(over, direct);
    // the header of an output is itself a valid config reproducing it
    let echoed: String = header(&direct).iter().skip(1).map(|l| format!("{}\n", &l[2..])).collect();
    fs::write(&cfg, echoed).unwrap();
    assert_eq!(stdout(&["density", "--config", c]), direct);
    fs::write(&cfg, "potential=elliptic tau=0.5 n=6 p=0 theta=0\nfinite=true grid=-1:1:3,0.5:0.5:1\n").unwrap();
    let fin = stdout(&["density", "--config", c]);
    assert_eq!(rows(&fin).len(), 3);
    fs::write(&cfg, "no_such_option=1\n").unwrap();
    assert_eq!(code(&["density", "--config", c]), 2);
    assert_eq!(code(&["density", "--config", tmp("missing.cfg").to_str().unwrap()]), 2);
}

#[test]
fn json_format_has_header_object() {
    let out = stdout(&["density", "--class", "nh-edge", "--grid", "-1:0:2,1:1:1", "--format", "json"]);
    let lines: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["pfkernel"], pfkernel::VERSION);
    assert_eq!(lines[0]["config"]["class"], "nh-edge");
    let want = one_point(&UniversalityClass::NHEdge, Complex64::new(-1.0, 1.0)).unwrap();
    assert_eq!(lines[1]["R"].as_f64().unwrap(), want);
}

#[test]
fn eval_and_special_tables() {
    let out = stdout(&["eval", "--class", "nh-bulk", "--z", "0.5i,-1+0.2i", "--kernel", "raw"]);
    let r = rows(&out);
    assert_eq!(r.len(), 2);
    // (z, z̄) pairs by default
    assert_eq!((r[1][0], r[1][1], r[1][2], r[1][3]), (-1.0, 0.2, -1.0, -0.2));
    let out = stdout(&["eval", "--finite", "--potential", "elliptic", "--tau", "0.2", "--n", "5", "--z", "0.1+0.3i", "--w", "1i,-1i,0.2"]);
    assert_eq!(rows(&out).len(), 3);
    assert_eq!(code(&["eval", "--finite", "--potential", "elliptic", "--tau", "0.2", "--n", "5", "--z", "1i", "--kernel", "complex"]), 2);
    let out = stdout(&["special", "erfc", "--z", "1+1i"]);
    let v = &rows(&out)[0];
    let want = pfkernel::specfun::erfc(Complex64::new(1.0, 1.0));
    assert_eq!((v[3], v[4]), (want.re, want.im));
    let out = stdout(&["special", "hermite", "--z", "2", "--n", "3"]);
    let h: Vec<f64> = rows(&out).iter().map(|v| v[3]).collect();
    assert_eq!(h.len(), 4);
    for (got, want) in h.iter().zip([1.0, 4.0, 14.0, 40.0]) {
        assert!((got - want).abs() < 1e-12 * want, "{got} {want}");
    }
    assert_eq!(code(&["special", "lower-gamma", "--z", "1"]), 2);
}
