use std::process::Command;

const EXAMPLE_A: &str = "1,0,0,0;0,2,0,0;0,0,3,0;0,0,0,4";
const EXAMPLE_U: &str = "0.5,0.5,0.5,0.5";

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ranktwo")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

/// Header and data rows of a CSV output, comment lines dropped.
fn table(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn spectrum_reproduces_worked_example() {
    let (code, out, _) = run(&["spectrum", "--a", EXAMPLE_A, "--u", EXAMPLE_U, "--s", "1.1", "--t", "1.2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# config "));
    let (h, rows) = table(&out);
    let col = |name: &str| h.iter().position(|c| c == name).unwrap();
    let eig: Vec<f64> = (1..=4).map(|k| num(&rows[0][col(&format!("eig{k}_re"))])).collect();
    for (x, y) in eig.iter().zip([-3.25, 1.38, 2.50, 3.61]) {
        assert!((x - y).abs() < 0.01);
    }
    assert!((num(&rows[0][col("x0")]) + 3.37).abs() < 0.01);
    assert_eq!(rows[0][col("interlaces")], "true");
}

#[test]
fn spectrum_at_zero_is_spectrum_of_a() {
    let (_, out, _) = run(&["spectrum", "--a", EXAMPLE_A, "--u", EXAMPLE_U]);
    let (_, rows) = table(&out);
    let eig: Vec<f64> = [2, 4, 6, 8].iter().map(|&k| num(&rows[0][k])).collect();
    for (x, y) in eig.iter().zip([1.0, 2.0, 3.0, 4.0]) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn spectrum_grid_has_one_row_per_point_in_order() {
    let (_, out, _) = run(&["spectrum", "--a", EXAMPLE_A, "--u", EXAMPLE_U, "--grid", "s=-3:3:13", "--t", "0.5"]);
    let (_, rows) = table(&out);
    assert_eq!(rows.len(), 13);
    let s: Vec<f64> = rows.iter().map(|r| num(&r[0])).collect();
    assert!(s.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for sub in [
        vec!["spectrum", "--random", "6", "--grid", "s=-2:2:21", "--grid", "t=-1:1:5"],
        vec!["svsweep", "--random", "10"],
        vec!["density", "--transform", "t", "--tau", "0.5,1,2", "--grid", "x=-3:3:121"],
    ] {
        let mut files = Vec::new();
        let path = dir.path().join(format!("{}.csv", sub[0]));
        for _ in 0..2 {
            let mut args = sub.clone();
            let p = path.to_str().unwrap().to_string();
            args.extend(["--seed", "7", "--out", &p]);
            assert_eq!(run(&args).0, 0);
            files.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(files[0], files[1], "{}", sub[0]);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["spectrum", "--a", "1,2;3", "--u", "1,0"]).0, 2);
    assert_eq!(run(&["spectrum", "--a", "1,0;0,1", "--u", "1,0,0"]).0, 2);
    assert_eq!(run(&["spectrum", "--grid", "s=0:1"]).0, 2);
    assert_eq!(run(&["nonsense"]).0, 2);
    // singular B
    let (code, _, err) = run(&["svsweep", "--b", "1,0;0,0", "--u", "1,0", "--v", "0,1"]);
    assert_eq!(code, 3, "{err}");
    // interlacing needs a Hermitian matrix
    assert_eq!(run(&["interlace", "--a", "1,2;0,1", "--u", "1,0"]).0, 3);
}

#[test]
fn svsweep_slopes_and_tau_zero() {
    let (_, out, _) = run(&["svsweep", "--random", "10", "--seed", "1"]);
    let slopes: Vec<f64> = out.lines().find(|l| l.starts_with("# slopes")).unwrap()[9..].split(',').map(num).collect();
    assert_eq!(slopes.len(), 9);
    assert!(slopes.iter().all(|s| (-1.2..=-0.8).contains(s)), "{slopes:?}");
    let (_, out, _) = run(&["svsweep", "--b", "3,0;0,2", "--u", "1,0", "--v", "0,1", "--taus", "0"]);
    let (_, rows) = table(&out);
    assert_eq!((num(&rows[0][1]), num(&rows[0][2])), (3.0, 2.0));
}

#[test]
fn svsweep_vanishing_branch_column() {
    // u* B^{-1} v = 0 for diagonal B, u = e1, v = e2
    let (_, out, _) = run(&["svsweep", "--b", "3,0;0,2", "--u", "1,0", "--v", "0,1"]);
    let (h, rows) = table(&out);
    let k = h.iter().position(|c| c == "sigma_n_tau").unwrap();
    let last = num(&rows.last().unwrap()[k]);
    assert!(out.contains("# branch vanishing"));
    // 1 / (|B^{-1} v| |B^{-*} u|) = 6
    assert!((last - 6.0).abs() < 1e-3, "{last}");
}

#[test]
fn density_identity_t_transform() {
    let (_, out, _) = run(&["density", "--transform", "t", "--tau", "1", "--grid", "x=-1.9:1.9:39"]);
    let (_, rows) = table(&out);
    for r in rows.iter().filter(|r| r[1] == "density") {
        let x = num(&r[2]);
        let exact = (4.0 - x * x).sqrt() / (2.0 * std::f64::consts::PI);
        assert!((num(&r[3]) - exact).abs() < 1e-4);
    }
}

#[test]
fn density_u_atoms() {
    let (_, out, _) = run(&["density", "--transform", "u", "--p", "3", "--q", "4", "--grid", "x=-4:4:81"]);
    let (_, rows) = table(&out);
    let atoms: Vec<f64> = rows.iter().filter(|r| r[1] == "atom").map(|r| num(&r[2])).collect();
    let x = 4.0 / 3f64.sqrt();
    assert_eq!(atoms.len(), 2);
    assert!((atoms[0] + x).abs() < 1e-6 && (atoms[1] - x).abs() < 1e-6);
}

#[test]
fn density_w_matches_closed_form() {
    let (_, out, _) = run(&["density", "--transform", "w", "--s", "0.5", "--t", "0.5", "--grid", "x=-2:2:201", "--eps", "1e-7,1e-9,1e-11"]);
    let (_, rows) = table(&out);
    for r in rows.iter().filter(|r| r[1] == "density") {
        let x = num(&r[2]);
        assert!((num(&r[3]) - ranktwo::measures::wigner_w_density(0.5, 0.5, x)).abs() < 1e-4, "x = {x}");
    }
}

#[test]
fn interlace_sign_changes_match_spectrum() {
    for (s, t) in [("1.1", "1.2"), ("-2", "-3")] {
        let (_, out, _) = run(&["interlace", "--a", EXAMPLE_A, "--u", EXAMPLE_U, "--s", s, "--t", t, "--grid", "x=-5:17:22001"]);
        let (_, rows) = table(&out);
        let perturbed: Vec<f64> = rows.iter().filter(|r| r[0] == "perturbed").map(|r| num(&r[1])).collect();
        let mut crossings = Vec::new();
        let mut prev: Option<f64> = None;
        for r in rows.iter().filter(|r| r[0] == "curve") {
            if r[2].is_empty() || r[3].is_empty() {
                prev = None;
                continue;
            }
            let d = num(&r[2]) - num(&r[3]);
            // a sign change across a pole jumps; a root does not
            if prev.is_some_and(|p| p * d < 0.0 && (d - p).abs() < 1.0) {
                crossings.push(num(&r[1]));
            }
            prev = Some(d);
        }
        assert_eq!(crossings.len(), perturbed.len());
        for (x, y) in crossings.iter().zip(&perturbed) {
            assert!((x - y).abs() < 0.01);
        }
    }
}

#[test]
fn interlace_trivial_parameters_and_masking() {
    let (_, out, _) = run(&["interlace", "--a", EXAMPLE_A, "--u", EXAMPLE_U, "--grid", "x=0:5:5001"]);
    let (_, rows) = table(&out);
    let curve: Vec<&Vec<String>> = rows.iter().filter(|r| r[0] == "curve").collect();
    assert!(curve.iter().all(|r| r[5] == "-1" && r[3].is_empty()));
    // grid points on the eigenvalues are masked, none are NaN
    assert!(curve.iter().filter(|r| r[2].is_empty()).count() >= 4);
    assert!(!out.contains("NaN") && !out.contains("inf"));
}

#[test]
fn json_output_shape() {
    let (_, out, _) = run(&["spectrum", "--a", "2,1;1,2", "--u", "1,0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["config"].is_object());
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn json_and_csv_input_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("in.json");
    std::fs::write(&json, r#"{"a": {"re": [[1, 0], [0, 2]], "im": [[0, 0.5], [-0.5, 0]]}, "u": [0.6, 0.8]}"#).unwrap();
    let (code, out, err) = run(&["spectrum", "--input", json.to_str().unwrap(), "--s", "0.2", "--t", "0.2"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(table(&out).1.len(), 1);
    let csv = dir.path().join("a.csv");
    std::fs::write(&csv, "1,0\n0,2\n").unwrap();
    let (code, _, err) = run(&["interlace", "--input", csv.to_str().unwrap(), "--u", "0.6,0.8", "--s", "0.5", "--t", "0.5"]);
    assert_eq!(code, 0, "{err}");
}
