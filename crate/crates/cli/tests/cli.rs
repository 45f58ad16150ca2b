use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rotflow::io::{self, SnapshotParams};
use rotflow::{Grid2, VectorField};

fn rotflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotflow"))
        .args(args)
        .env_remove("ROTFLOW_OUTPUT_ROOT")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_grid_field_exits_one_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.cfg",
        "equation.kind = rotburgers2d\nequation.dt = 1e-3\nequation.t_end = 1\noutput.dir = out\n",
    );
    let o = rotflow(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("grid.n"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "typo.cfg",
        "equation.kind = rotkse2d\nequation.lambda = 1\nequation.dt = 1e-3\nequation.t_end = 1\n\
         grid.n = 16\noutput.dir = out\nequation.lamda = 2\n",
    );
    let o = rotflow(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("equation.lamda"));
}

#[test]
fn completed_run_exits_zero_with_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "forced.cfg",
        "equation.kind = rotburgers2d\nequation.nu = 0.05\nequation.cfl = 0.2\nequation.t_end = 0.8\n\
         equation.snapshot_every = 10\nequation.diag_every = 1\ngrid.n = 64\nforcing.kind = spectral\nforcing.seed = 1\n\
         forcing.kmin = 0.5\nforcing.kmax = 2.5\nforcing.grashof = 20\noutput.dir = forced\n",
    );
    let o = rotflow(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("forced");
    let diag = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    let records = io::parse_diagnostics_csv(&diag, &out).unwrap();
    assert!(records.len() > 2);
    assert!(records.iter().all(|r| r.l2.is_finite() && r.energy_residual.is_some()));
    assert!(fs::read_to_string(out.join("spectra.csv")).unwrap().starts_with("step,t,k,E_k\n"));
    for name in ["snap_00000000.rbsn", "snap_00000010.rbsn", "final.rbsn", "last_good.rbsn"] {
        assert!(out.join(name).exists(), "{name}");
    }
}

#[test]
fn output_root_override_relocates_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let root = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "kse.cfg",
        "equation.kind = rotkse2d\nequation.lambda = 1\nequation.dt = 1e-2\nequation.t_end = 0.1\n\
         grid.n = 32\ninitial.kind = profile\ninitial.profile = taylor-green\noutput.dir = nested/kse\n",
    );
    let o = Command::new(env!("CARGO_BIN_EXE_rotflow"))
        .args(["run", &cfg])
        .env("ROTFLOW_OUTPUT_ROOT", root.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(root.path().join("nested/kse/final.rbsn").exists());
}

#[test]
fn inviscid_shock_run_stops_on_guard_before_the_shock_clears() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "shock.cfg",
        "equation.kind = rotburgers2d\nequation.dt = 1e-3\nequation.t_end = 1.5\ngrid.n = 128\n\
         initial.kind = profile\ninitial.profile = shear-cos\noutput.dir = shock\n",
    );
    let o = rotflow(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    let (_, p) = io::read_snapshot::<2>(&dir.path().join("shock/last_good.rbsn")).unwrap();
    assert!(p.t > 0.5 && p.t < 1.1, "last good t={}", p.t);
}

#[test]
fn verify_unknown_suite_exits_one() {
    let o = rotflow(&["verify", "no-such-suite"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown suite"));
}

#[test]
fn verify_core_identities_passes() {
    let o = rotflow(&["verify", "core-identities"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS  lamb-identities"));
}

#[test]
fn forcing_gen_is_byte_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["a.rbsn", "b.rbsn"] {
        let out = dir.path().join(name);
        let o = rotflow(&[
            "forcing-gen", "--seed", "42", "--kmin", "0.5", "--kmax", "2.5", "--grashof", "20", "--nu", "0.005",
            "--n", "32", "--dim", "2", "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        files.push(fs::read(&out).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let (f, p) = io::read_snapshot::<2>(&dir.path().join("a.rbsn")).unwrap();
    assert_eq!((p.t, p.nu), (0.0, 0.005));
    assert!((rotflow::norms::norm_l2(&f) - 20.0 * 0.005 * 0.005).abs() < 1e-15);
}

#[test]
fn spectrum_of_cosine_and_zero_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid2::new(16).unwrap();
    let cos = dir.path().join("cos.rbsn");
    io::write_snapshot(&cos, &VectorField::from_fn(g, |x| [x[0].cos(), 0.0]), SnapshotParams::default()).unwrap();
    let o = rotflow(&["spectrum", cos.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<(usize, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (k, e) = l.split_once(',').unwrap();
            (k.parse().unwrap(), e.parse().unwrap())
        })
        .collect();
    assert_eq!(text.lines().next(), Some("k,E_k"));
    assert_eq!(rows.len(), 8);
    for (k, e) in rows {
        let want = if k == 1 { 0.5f64.sqrt() } else { 0.0 };
        assert!((e - want).abs() < 1e-15, "k={k} E={e}");
    }

    let zero = dir.path().join("zero.rbsn");
    io::write_snapshot(&zero, &VectorField::<2>::zeros(g), SnapshotParams::default()).unwrap();
    let text = stdout(&rotflow(&["spectrum", zero.to_str().unwrap()]));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0.0000000000000000e0")));
}

#[test]
fn corrupt_snapshot_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("junk.rbsn");
    fs::write(&p, b"NOPE-this-is-not-a-snapshot-file-at-all-0123456789").unwrap();
    let o = rotflow(&["spectrum", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("format error"), "{}", stderr(&o));
}
