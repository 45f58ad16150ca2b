//! Executes a [`RunConfig`] and writes its outputs.
//!
//! An output directory receives `diagnostics.csv`, `spectra.csv`, one
//! `snap_{step:08}.rbsn` per snapshot, `last_good.rbsn` and `final.rbsn`.
//! The two state files differ only when the run diverged.

use std::fs;
use std::path::{Path, PathBuf};

use crate::burgers2d;
use crate::burgers3d;
use crate::config::{Equation, ForcingSource, InitialSource, RunConfig};
use crate::driver::{Divergence, Trajectory};
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::forcing::{self, ForceField};
use crate::grid::Grid;
use crate::io::{self, SnapshotParams};
use crate::kse;

/// What a finished run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub steps: usize,
    pub t: f64,
    pub diverged: Option<Divergence>,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    pub fn completed(&self) -> bool {
        self.diverged.is_none()
    }
}

fn load_force<const D: usize>(cfg: &RunConfig, grid: Grid<D>) -> Result<ForceField<D>> {
    match &cfg.forcing {
        ForcingSource::None => Ok(ForceField::zero(grid)),
        ForcingSource::Spectral(spec) => forcing::generate(spec, grid),
        ForcingSource::File(path) => {
            let (f, _) = io::read_snapshot::<D>(path)?;
            if f.grid() != grid {
                return Err(Error::config(
                    "forcing.path",
                    format!("force has n={}, grid.n is {}", f.grid().n(), grid.n()),
                ));
            }
            Ok(ForceField::from_field(f))
        }
    }
}

fn load_initial<const D: usize>(cfg: &RunConfig, grid: Grid<D>) -> Result<VectorField<D>> {
    match &cfg.initial {
        InitialSource::Zero => Ok(VectorField::zeros(grid)),
        InitialSource::Profile(p) => p.build(grid),
        InitialSource::Snapshot(path) => {
            let (u, _) = io::read_snapshot::<D>(path)?;
            if u.grid() != grid {
                return Err(Error::config(
                    "initial.path",
                    format!("snapshot has n={}, grid.n is {}", u.grid().n(), grid.n()),
                ));
            }
            Ok(u)
        }
    }
}

fn write_outputs<const D: usize>(
    dir: &Path,
    traj: &Trajectory<D>,
    base: SnapshotParams,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    let mut emit_text = |name: &str, text: String| -> Result<()> {
        let p = dir.join(name);
        io::write_text(&p, &text)?;
        files.push(p);
        Ok(())
    };
    emit_text("diagnostics.csv", io::diagnostics_csv(&traj.records))?;
    emit_text("spectra.csv", io::spectra_csv(&traj.spectra))?;
    let named = traj
        .snapshots
        .iter()
        .map(|s| (format!("snap_{:08}.rbsn", s.step), s))
        .chain([
            ("last_good.rbsn".to_string(), &traj.last_good),
            ("final.rbsn".to_string(), &traj.final_state),
        ]);
    for (name, snap) in named {
        let p = dir.join(name);
        io::write_snapshot(&p, &snap.u, SnapshotParams { t: snap.t, ..base })?;
        files.push(p);
    }
    Ok(files)
}

fn finish<const D: usize>(cfg: &RunConfig, traj: Trajectory<D>, base: SnapshotParams) -> Result<RunSummary> {
    let dir = cfg.resolved_output_dir();
    let files = write_outputs(&dir, &traj, base)?;
    Ok(RunSummary {
        output_dir: dir,
        steps: traj.final_state.step,
        t: traj.final_state.t,
        diverged: traj.diverged,
        files,
    })
}

/// Runs `cfg` to completion or divergence and writes every output file.
pub fn run_config(cfg: &RunConfig) -> Result<RunSummary> {
    cfg.validate()?;
    match cfg.equation {
        Equation::Burgers2(sim) => {
            let grid = Grid::<2>::new(cfg.n)?;
            let f = load_force(cfg, grid)?;
            let u0 = load_initial(cfg, grid)?;
            let traj = burgers2d::simulate(&u0, &sim, &f)?;
            let base = SnapshotParams { t: 0.0, nu: sim.nu, gamma: sim.gamma, lambda: 0.0 };
            finish(cfg, traj, base)
        }
        Equation::Burgers3(sim) => {
            let grid = Grid::<3>::new(cfg.n)?;
            let f = load_force(cfg, grid)?;
            let u0 = load_initial(cfg, grid)?;
            let traj = burgers3d::simulate3(&u0, &sim, &f)?;
            let base = SnapshotParams { t: 0.0, nu: sim.nu, gamma: sim.gamma, lambda: 0.0 };
            finish(cfg, traj, base)
        }
        Equation::Kse(k) => {
            let grid = Grid::<2>::new(cfg.n)?;
            let u0 = load_initial(cfg, grid)?;
            let traj = kse::simulate_kse(&u0, &k)?;
            let base = SnapshotParams { t: 0.0, nu: 0.0, gamma: 0.0, lambda: k.lambda };
            finish(cfg, traj, base)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_kse_run_writes_every_file() {
        let dir = tempfile::tempdir().unwrap();
        let text = format!(
            "equation.kind = rotkse2d\nequation.lambda = 2\nequation.dt = 1e-3\nequation.t_end = 0.02\n\
             equation.snapshot_every = 10\ngrid.n = 16\ninitial.kind = profile\ninitial.profile = taylor-green\n\
             output.dir = {}\n",
            dir.path().join("out").display()
        );
        let cfg = RunConfig::parse(&text, Path::new(".")).unwrap();
        let s = run_config(&cfg).unwrap();
        assert!(s.completed());
        assert_eq!(s.steps, 20);
        let names: Vec<String> = s
            .files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        for want in ["diagnostics.csv", "spectra.csv", "snap_00000000.rbsn", "snap_00000010.rbsn", "snap_00000020.rbsn", "final.rbsn", "last_good.rbsn"] {
            assert!(names.iter().any(|n| n == want), "{want} missing from {names:?}");
        }
        let (u, p) = io::read_snapshot::<2>(&s.output_dir.join("final.rbsn")).unwrap();
        assert_eq!(u.grid().n(), 16);
        assert_eq!((p.t, p.lambda), (0.02, 2.0));
    }
}
