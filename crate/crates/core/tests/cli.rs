use std::process::{Command, Output};

use hpstm::fracseries::TimePowerSeries;
use hpstm::report::{
    bundled_problem, reference_fixtures, run_comparison, write_csv, ComparisonConfig, FixtureKind,
};
use hpstm::solvers::hpstm_solve;

fn hpstm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpstm"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn fixture_listing() {
    let o = hpstm(&["fixtures"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 101);
    assert_eq!(
        text.lines().next(),
        Some("table,label,example,kind,alpha,method,value")
    );
    assert!(text.contains("\n9,fisher_compare,3,value,0.7,HPSTM,0.2898\n"));
    assert!(text.contains("\n4,heat_results,2,value,0.8,ADM,0.9345\n"));
    assert!(text.contains("\n2,porous_error,1,abs_error,0.8,HPSTM,0.0147\n"));
}

#[test]
fn fixtures_are_verbatim() {
    let f = reference_fixtures();
    let get = |table: u8, alpha: f64, method: &str| {
        f.iter()
            .find(|r| r.table == table && r.alpha == alpha && r.method == method)
            .map(|r| r.value)
    };
    assert_eq!(get(9, 0.7, "HPSTM"), Some(0.2898));
    assert_eq!(get(6, 0.8, "ADM"), Some(0.9345));
    assert_eq!(get(2, 0.8, "HPSTM"), Some(1.47e-2));
    assert!(f.iter().all(|r| !r.source().is_empty()));
    assert_eq!(
        f.iter().filter(|r| r.kind == FixtureKind::AbsError).count(),
        12
    );
}

#[test]
fn compare_reports_the_known_discrepancy() {
    let o = hpstm(&["compare", "example1", "--alpha", "1.0", "--alpha", "0.9"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("alpha,method,value,fixture,abs_discrepancy,fixture_table\n"));
    let row = text
        .lines()
        .find(|l| l.starts_with("0.9,HPSTM,"))
        .expect("α = 0.9 HPSTM row");
    let cols: Vec<&str> = row.split(',').collect();
    let value: f64 = cols[2].parse().unwrap();
    assert!((value - 1.5572).abs() < 1e-4);
    assert_eq!(cols[3], "1.478");
    assert!((cols[4].parse::<f64>().unwrap() - 0.0792).abs() < 1e-4);
    assert_eq!(cols[5], "T3 porous_compare");
    assert!(text.contains("\n1.0,HPSTM,1.5,1.5,0.0,T3 porous_compare\n"));
    // the ill-conditioned RBF run leaves an empty value, not an aborted report
    assert!(text.contains("\n1.0,RBF,,1.5,,T3 porous_compare\n"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("RBF"));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("run{i}.csv"));
            let o = hpstm(&[
                "compare",
                "example3",
                "--rbf-centers",
                "20",
                "--fdm-grid",
                "40",
                "--out",
                path.to_str().unwrap(),
            ]);
            assert!(o.status.success());
            std::fs::read(&path).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let a = stdout(&hpstm(&["sensitivity", "example2"]));
    let b = stdout(&hpstm(&["sensitivity", "example2"]));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 1 + 4 * 3);
}

#[test]
fn figure_data() {
    let o = hpstm(&["figures", "example1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("t,alpha_1.0,alpha_0.9,alpha_0.8,alpha_0.7")
    );
    assert_eq!(text.lines().count(), 102);
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "1.0");
    assert_eq!(last[1], "2.0");
}

#[test]
fn solve_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["example1", "example2", "example3"] {
        let path = dir.path().join(format!("{name}.json"));
        let o = hpstm(&["solve", name, "--out", path.to_str().unwrap()]);
        assert!(o.status.success());
        assert!(stdout(&o).contains("u1 = "));
        let file = bundled_problem(name).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let docs: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
        assert_eq!(docs.len(), file.alphas.len());
        for (doc, alpha) in docs.iter().zip(&file.alphas) {
            let back = TimePowerSeries::from_json(&doc.to_string()).unwrap();
            let sol = hpstm_solve(&file.problem.with_alpha(*alpha), file.terms).unwrap();
            // reparsed trees regroup sums, so agreement is to rounding under the
            // usual coefficient-equality tolerance
            assert!(back.approx_eq(&sol.partial_sum, 1e-10), "{name} α={alpha}");
            for (x, t) in [(1.0, 0.5), (0.3, 0.1), (1.7, 0.0)] {
                let (a, b) = (back.evaluate(x, t).unwrap(), sol.evaluate(x, t).unwrap());
                assert!(
                    (a - b).abs() < 1e-10 * (1.0 + b.abs()),
                    "{name} α={alpha} ({x}, {t}): {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let malformed = dir.path().join("bad.toml");
    std::fs::write(&malformed, "name = \"bad\"\nalpha = [1.0\n").unwrap();
    let o = hpstm(&["solve", malformed.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.toml:"), "{err}");

    assert_eq!(hpstm(&["solve", "example7"]).status.code(), Some(2));
    assert_eq!(
        hpstm(&["compare", "example1", "--point", "9,0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hpstm(&["solve", "example1", "--alpha", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hpstm(&["solve", "example1", "--point", "1"]).status.code(),
        Some(2)
    );

    // the square root is undefined at the evaluation point
    let rooty = dir.path().join("root.toml");
    std::fs::write(
        &rooty,
        "name = \"root\"\nalpha = [0.5]\nic = \"x^(1/2)\"\ndomain = [-1.0, 1.0]\n\n[[nonlinear]]\nmonomial = \"u^2\"\ncoeff = \"1\"\n",
    )
    .unwrap();
    assert!(
        hpstm(&["solve", rooty.to_str().unwrap(), "--point", "0.5,0.1"])
            .status
            .success()
    );
    let o = hpstm(&["solve", rooty.to_str().unwrap(), "--point=-0.5,0.1"]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn empty_report_is_header_only() {
    let p = bundled_problem("example1").unwrap().problem;
    let r = run_comparison(&p, &[], (1.0, 0.5), &ComparisonConfig::default()).unwrap();
    let mut buf = Vec::new();
    write_csv(&r, &mut buf).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap(),
        "alpha,method,value,fixture,abs_discrepancy,fixture_table\n"
    );
}
