//! Exit-code contract and file outputs of the command-line entry point.

use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_cavity-duet");

fn run(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn unknown_subcommand_prints_usage_and_fails_to_parse() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn help_is_success() {
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn figure_fig1_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&["figure", "fig1", "--out", out, "--tau-max", "5"]), 0);
    let csv = std::fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    assert!(csv.starts_with(
        "tau,n1_A,n1_N,n2_A,n2_N,sz1_A,sz1_N,sz2_A,sz2_N,m1_A,m1_N,m2_A,m2_N,mtot_A,mtot_N,d_n1,d_n2,d_sz1,d_sz2\n"
    ));
    assert_eq!(csv.lines().count(), 1 + 101);
    let svg = std::fs::read_to_string(dir.path().join("fig1.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="panel""#).count(), 2);
}

#[test]
fn figure_outputs_are_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert_eq!(
            code(&[
                "figure",
                "fig2",
                "--out",
                d.path().to_str().unwrap(),
                "--tau-max",
                "3"
            ]),
            0
        );
    }
    for f in ["fig2.csv", "fig2.svg"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let svg = std::fs::read_to_string(a.path().join("fig2.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="panel""#).count(), 4);
}

#[test]
fn table_prints_five_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args([
            "table",
            "--tau-max",
            "2",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .env("CAVITY_DUET_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6, "{text}");
}

#[test]
fn bad_thread_cap_is_a_validation_error() {
    let out = Command::new(BIN)
        .args(["table", "--tau-max", "1"])
        .env("CAVITY_DUET_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_errors_map_to_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = d.to_str().unwrap();
    let malformed = write(d, "bad.toml", "preset = \"fig1\"\ntau_max = = 1\n");
    let r = run(&["run", "--config", &malformed, "--out", out]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("line 2"));

    let incomplete = write(
        d,
        "inc.toml",
        "omega2 = 1.25\nqubit1 = 1\nqubit2 = 1\ng1 = 0\ng2 = 0\nlambda = 0\n",
    );
    assert_eq!(code(&["run", "--config", &incomplete, "--out", out]), 3);
    assert_eq!(code(&["run", "--out", out]), 3);
    assert_eq!(code(&["run", "--preset", "fig9", "--out", out]), 3);
    assert_eq!(
        code(&[
            "run",
            "--config",
            d.join("missing.toml").to_str().unwrap(),
            "--out",
            out
        ]),
        6
    );
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    assert_eq!(
        code(&[
            "figure",
            "fig1",
            "--tau-max",
            "1",
            "--out",
            blocker.to_str().unwrap()
        ]),
        6
    );
}

#[test]
fn resonant_hopping_past_the_pole_is_a_breakdown() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "pole.toml",
        "omega2 = 1\nqubit1 = 0.999\nqubit2 = 0.999\ng1 = 0.04\ng2 = 0.04\nlambda = 0.25\ntau_max = 2\n",
    );
    let out = dir.path().join("out");
    assert_eq!(
        code(&[
            "run",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--csv"
        ]),
        5
    );
    assert!(!out.join("run.csv").exists());
}

#[test]
fn run_with_ghz_config_and_coeff_dump() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "ghz.toml",
        "units = \"ghz\"\nomega1 = 4\nomega2 = 5\nqubit1 = 3.996\nqubit2 = 4.995\ng1 = 0.16\ng2 = 0.2\n\
         lambda = 0.004\ntau_max = 2\ncsv = true\nsvg = true\ncoeffs = true\n",
    );
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&["run", "--config", &cfg, "--out", out]), 0);
    for f in ["run.csv", "run.svg", "run_coeffs.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let coeffs = std::fs::read_to_string(dir.path().join("run_coeffs.csv")).unwrap();
    let header = coeffs.lines().next().unwrap();
    assert!(
        header.starts_with("tau,g1_re,g1_im,g2_re,g2_im,g3_re,g3_im,b1_m1_z_re"),
        "{header}"
    );
    assert!(header.contains("b2_m2_m_im"));
}

#[test]
fn coeffs_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        code(&["coeffs", "--preset", "fig3", "--tau-max", "1", "--out", out]),
        0
    );
    let text = std::fs::read_to_string(dir.path().join("fig3_coeffs.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 21);
}
