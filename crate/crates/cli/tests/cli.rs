//! End-to-end tests of the `chemotaxis` binary: exit codes, file formats,
//! snapshot round trips.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chemotaxis"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

const HEADER: &str =
    "t,mass_u,min_u,max_u,min_v,max_v,energy,grad_z_l2sq,grad_z_l4,consumption_diss,g_mass,v_lower_bound_ref";

#[test]
fn no_arguments_is_usage_error() {
    let out = bin().output().unwrap();
    assert_exit(&out, 2);
}

#[test]
fn unknown_command_is_usage_error() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_exit(&out, 2);
}

#[test]
fn missing_config_file_is_config_error() {
    let out = bin().args(["run", "/nonexistent/path.cfg"]).output().unwrap();
    assert_exit(&out, 2);
}

#[test]
fn invalid_s_reports_line_number_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "dim=1\nn=8\nextent=1\nt_end=0\ns=0.5\n");
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_exit(&out, 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 5"), "{err}");
    assert!(err.contains("s must be >= 1"), "{err}");
}

#[test]
fn zero_t_end_writes_exactly_one_data_row() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("out");
    let cfg = write(
        dir.path(),
        "zero.cfg",
        &format!(
            "dim=1\nn=16\nextent=1\nt_end=0\nu0=constant 2\nv0=constant 3\noutdir={}\n",
            outdir.display()
        ),
    );
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_exit(&out, 0);
    let csv = std::fs::read_to_string(outdir.join("diagnostics.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 2, "{csv}");
}

#[test]
fn homogeneous_run_final_row_matches_ode_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("out");
    let dt = 1e-3;
    let t_end = 0.5_f64;
    let cfg = write(
        dir.path(),
        "h.cfg",
        &format!(
            "dim=1\nn=32\nextent=1\nt_end={t_end}\ndt={dt}\ns=2\nm=8\nu0=constant 2\nv0=constant 3\nevery=50\noutdir={}\n",
            outdir.display()
        ),
    );
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_exit(&out, 0);
    let csv = std::fs::read_to_string(outdir.join("diagnostics.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    let cols: Vec<f64> = last.split(',').map(|c| c.parse().unwrap()).collect();
    let (min_v, max_v) = (cols[4], cols[5]);
    assert!((min_v - max_v).abs() <= 1e-12, "{last}");
    let exact = 3.0 * (-4.0 * t_end).exp();
    assert!((min_v - exact).abs() <= 5.0 * dt, "v {min_v} vs {exact}");
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for run in 0..2 {
        let outdir = dir.path().join(format!("out{run}"));
        let cfg = write(
            dir.path(),
            &format!("d{run}.cfg"),
            &format!(
                "dim=1\nn=48\nextent=1\nt_end=0.05\ndt=5e-4\ns=1.5\nm=4\nu0=eigen 1 0.5 1\nv0=eigen 1 0.5 2\nevery=10\noutdir={}\n",
                outdir.display()
            ),
        );
        let out = bin().arg("run").arg(&cfg).output().unwrap();
        assert_exit(&out, 0);
        csvs.push(std::fs::read(outdir.join("diagnostics.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn snapshot_round_trips_through_file_initial_condition() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("out");
    let cfg = write(
        dir.path(),
        "snap.cfg",
        &format!(
            "dim=2\nn=12\nextent=1\nt_end=0.01\ndt=1e-3\ns=2\nm=4\nu0=eigen 1 0.5 1\nv0=constant 1\nsnapshots=true\noutdir={}\n",
            outdir.display()
        ),
    );
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_exit(&out, 0);
    assert!(outdir.join("u_final.snap").exists());
    assert!(outdir.join("v_final.snap").exists());

    // feed the final u back in as an initial condition for a zero-step run
    let outdir2 = dir.path().join("out2");
    let cfg2 = write(
        dir.path(),
        "snap2.cfg",
        &format!(
            "dim=2\nn=12\nextent=1\nt_end=0\nu0=file {}\nv0=constant 1\noutdir={}\n",
            outdir.join("u_final.snap").display(),
            outdir2.display()
        ),
    );
    let out2 = bin().arg("run").arg(&cfg2).output().unwrap();
    assert_exit(&out2, 0);
    let first = std::fs::read_to_string(outdir.join("diagnostics.csv")).unwrap();
    let second = std::fs::read_to_string(outdir2.join("diagnostics.csv")).unwrap();
    // mass of the reloaded u equals the final mass of the source run
    let last_mass: f64 = first.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    let reloaded_mass: f64 = second.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(last_mass, reloaded_mass);
}

#[test]
fn csv_values_survive_parse_and_reprint() {
    // full round-trip precision: every printed value re-parses to a float
    // that prints back to the same token
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("out");
    let cfg = write(
        dir.path(),
        "rt.cfg",
        &format!(
            "dim=1\nn=40\nextent=1\nt_end=0.03\ndt=1e-3\ns=1.5\nm=3\nu0=eigen 1 0.5 1\nv0=eigen 1 0.25 2\nevery=6\noutdir={}\n",
            outdir.display()
        ),
    );
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_exit(&out, 0);
    let csv = std::fs::read_to_string(outdir.join("diagnostics.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), HEADER);
    let mut data_rows = 0;
    for line in lines {
        assert_eq!(line.split(',').count(), HEADER.split(',').count());
        for token in line.split(',') {
            let v: f64 = token.parse().unwrap();
            assert_eq!(v.to_string(), token, "lossy token {token}");
        }
        data_rows += 1;
    }
    assert!(data_rows > 2);
}

#[test]
fn sweep_with_one_level_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.cfg", "dim=1\nn=8\nextent=1\nt_end=0\n");
    let out = bin().arg("sweep-m").arg(&cfg).args(["--m", "4"]).output().unwrap();
    assert_exit(&out, 2);
}

#[test]
fn sweep_reports_no_claim_when_truncation_is_active() {
    // sup u ~ 2 > m = 1, so the m = 1 run does not qualify
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.cfg",
        "dim=1\nn=32\nextent=1\nt_end=0.02\ndt=1e-3\ns=1\nu0=eigen 2 0.5 1\nv0=eigen 1 0.5 1\nevery=5\n",
    );
    let out = bin().arg("sweep-m").arg(&cfg).args(["--m", "1,8"]).output().unwrap();
    assert_exit(&out, 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("NO-CLAIM"), "{text}");
    assert!(!text.contains("PASS:"), "{text}");
}

#[test]
fn sweep_passes_for_dominating_levels() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.cfg",
        "dim=1\nn=32\nextent=1\nt_end=0.02\ndt=1e-3\ns=2\nu0=eigen 1 0.5 1\nv0=eigen 1 0.5 1\nevery=5\n",
    );
    let out = bin().arg("sweep-m").arg(&cfg).args(["--m", "4,8"]).output().unwrap();
    assert_exit(&out, 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn convergence_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.cfg",
        "dim=1\nn=16\nextent=1\nt_end=0.01\nu0=constant 1\nv0=constant 1\n",
    );
    // levels = 1
    let out = bin()
        .arg("convergence")
        .arg(&cfg)
        .args(["--axis", "time", "--levels", "1"])
        .output()
        .unwrap();
    assert_exit(&out, 2);
    // non-oracle config for the space axis
    let out = bin()
        .arg("convergence")
        .arg(&cfg)
        .args(["--axis", "space", "--levels", "3"])
        .output()
        .unwrap();
    assert_exit(&out, 2);
    // bad axis
    let out = bin()
        .arg("convergence")
        .arg(&cfg)
        .args(["--axis", "sideways", "--levels", "3"])
        .output()
        .unwrap();
    assert_exit(&out, 2);
}

#[test]
fn convergence_space_axis_on_decoupled_u() {
    // v = 0 decouples u into the heat equation
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "hu.cfg",
        "dim=1\nn=16\nextent=1\nt_end=0.05\ndt=2e-3\ns=2\nm=4\nu0=eigen 1 0.5 1\nv0=constant 0\n",
    );
    let out = bin()
        .arg("convergence")
        .arg(&cfg)
        .args(["--axis", "space", "--levels", "3"])
        .output()
        .unwrap();
    assert_exit(&out, 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn verify_needs_two_resolutions() {
    let out = bin().args(["verify", "--n", "32"]).output().unwrap();
    assert_exit(&out, 2);
}

#[test]
fn verify_passes_on_refinement_triple() {
    let out = bin().args(["verify", "--n", "16,32,64"]).output().unwrap();
    assert_exit(&out, 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}
