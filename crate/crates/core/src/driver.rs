//! Time loop shared by every solver: step scheduling, divergence guards,
//! diagnostics cadence and snapshot capture.
//!
//! Step `m` ends at `t_m = m·Δt` and every step uses exactly `Δt`, except a
//! final partial step that lands the run on `t_end`.

use crate::diagnostics::{DiagnosticsRecord, Monitor, Spectrum};
use crate::error::{Error, Result};
use crate::field::VectorField;

/// Default bound on `sup|u|` before a run is declared divergent.
pub const DEFAULT_MAX_SPEED: f64 = 1e6;
/// Default bound on the spectral tail ratio before a run is declared unresolved.
pub const DEFAULT_MAX_TAIL: f64 = 1e-4;

/// How the time step is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    /// `Δt = c·(Δx)²/ν` with `0 < c ≤ 0.25`.
    ViscousCfl { safety: f64 },
}

impl DtPolicy {
    pub fn resolve(&self, dx: f64, nu: f64) -> Result<f64> {
        match *self {
            DtPolicy::Fixed(dt) => {
                if dt > 0.0 && dt.is_finite() {
                    Ok(dt)
                } else {
                    Err(Error::config("dt", format!("must be positive, got {dt}")))
                }
            }
            DtPolicy::ViscousCfl { safety } => {
                if !(nu > 0.0) {
                    return Err(Error::config("dt", "the viscous CFL policy needs nu > 0"));
                }
                if !(safety > 0.0 && safety <= 0.25) {
                    return Err(Error::config(
                        "cfl",
                        format!("safety factor must lie in (0, 0.25], got {safety}"),
                    ));
                }
                Ok(safety * dx * dx / nu)
            }
        }
    }
}

/// Conditions that stop a run early.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Guard {
    pub max_speed: f64,
    /// Largest tolerated tail ratio at diagnostics samples; `None` disables the check.
    pub max_tail_ratio: Option<f64>,
}

impl Default for Guard {
    fn default() -> Self {
        Guard {
            max_speed: DEFAULT_MAX_SPEED,
            max_tail_ratio: Some(DEFAULT_MAX_TAIL),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DivergenceReason {
    NonFinite,
    SpeedExceeded { sup: f64 },
    Underresolved { tail_ratio: f64 },
}

impl std::fmt::Display for DivergenceReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DivergenceReason::NonFinite => write!(f, "non-finite values"),
            DivergenceReason::SpeedExceeded { sup } => write!(f, "sup|u| = {sup:e} exceeds the guard"),
            DivergenceReason::Underresolved { tail_ratio } => {
                write!(f, "spectral tail ratio {tail_ratio:e} exceeds the guard")
            }
        }
    }
}

/// Where and why a run stopped early.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Divergence {
    pub step: usize,
    pub t: f64,
    pub reason: DivergenceReason,
}

/// Step size, horizon and output cadence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub dt: f64,
    pub t_end: f64,
    pub diag_every: usize,
    pub snapshot_every: usize,
    pub guard: Guard,
}

impl Schedule {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Schedule {
            dt,
            t_end,
            diag_every: 10,
            snapshot_every: 1000,
            guard: Guard::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::config("t_end", format!("must be positive, got {}", self.t_end)));
        }
        if self.diag_every == 0 {
            return Err(Error::config("diag_every", "must be at least 1"));
        }
        if self.snapshot_every == 0 {
            return Err(Error::config("snapshot_every", "must be at least 1"));
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_end`.
    pub fn step_count(&self) -> usize {
        ((self.t_end / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    /// End time of step `m` (1-based).
    pub fn time_of(&self, m: usize) -> f64 {
        if m >= self.step_count() {
            self.t_end
        } else {
            m as f64 * self.dt
        }
    }
}

/// A state captured at a given step.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot<const D: usize> {
    pub step: usize,
    pub t: f64,
    pub u: VectorField<D>,
}

/// The output of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<const D: usize> {
    pub dt: f64,
    /// Snapshots on the snapshot cadence, starting with the initial state.
    pub snapshots: Vec<Snapshot<D>>,
    pub records: Vec<DiagnosticsRecord>,
    /// Shell spectra on the diagnostics cadence.
    pub spectra: Vec<(usize, f64, Spectrum)>,
    pub diverged: Option<Divergence>,
    /// Last state that passed every guard.
    pub last_good: Snapshot<D>,
    /// Last state computed (equal to `last_good` unless the run diverged).
    pub final_state: Snapshot<D>,
}

pub type Trajectory2 = Trajectory<2>;
pub type Trajectory3 = Trajectory<3>;

impl<const D: usize> Trajectory<D> {
    pub fn completed(&self) -> bool {
        self.diverged.is_none()
    }

    /// Snapshot taken at exactly `step`, if any.
    pub fn snapshot_at_step(&self, step: usize) -> Option<&Snapshot<D>> {
        self.snapshots.iter().find(|s| s.step == step)
    }
}

/// `(all finite, sup|u|)` in one pass.
fn speed_check<const D: usize>(u: &VectorField<D>) -> (bool, f64) {
    let len = u.grid().len();
    let mut sup2 = 0.0f64;
    let mut finite = true;
    for i in 0..len {
        let s: f64 = u.components().iter().map(|c| c.values()[i] * c.values()[i]).sum();
        if !s.is_finite() {
            finite = false;
            break;
        }
        sup2 = sup2.max(s);
    }
    (finite, sup2.sqrt())
}

/// Advances `u0` with `step(u, h)` under `schedule`, sampling `monitor`.
pub fn integrate<const D: usize>(
    u0: VectorField<D>,
    schedule: &Schedule,
    monitor: &mut Monitor<D>,
    mut step: impl FnMut(&VectorField<D>, f64) -> VectorField<D>,
) -> Result<Trajectory<D>> {
    schedule.validate()?;
    if u0.grid() != monitor.grid() {
        return Err(Error::GridMismatch {
            left: u0.grid().n(),
            right: monitor.grid().n(),
        });
    }
    let (finite, _) = speed_check(&u0);
    if !finite {
        return Err(Error::NonFinite { step: 0, t: 0.0 });
    }
    let total = schedule.step_count();
    let mut records = Vec::new();
    let mut spectra = Vec::new();
    let (r, s) = monitor.record(0, 0.0, &u0);
    records.push(r);
    spectra.push((0, 0.0, s));
    let initial = Snapshot { step: 0, t: 0.0, u: u0 };
    let mut snapshots = vec![initial.clone()];
    let mut current = initial;
    let mut diverged = None;
    let mut failed_state = None;
    for m in 1..=total {
        let t0 = current.t;
        let t1 = schedule.time_of(m);
        let h = if m < total || (total as f64 * schedule.dt - schedule.t_end).abs() <= 1e-12 * schedule.t_end {
            schedule.dt
        } else {
            t1 - t0
        };
        let next = step(&current.u, h);
        let (finite, sup) = speed_check(&next);
        let reason = if !finite {
            Some(DivergenceReason::NonFinite)
        } else if sup > schedule.guard.max_speed {
            Some(DivergenceReason::SpeedExceeded { sup })
        } else {
            None
        };
        let next = Snapshot { step: m, t: t1, u: next };
        if let Some(reason) = reason {
            diverged = Some(Divergence { step: m, t: t1, reason });
            failed_state = Some(next);
            break;
        }
        if m % schedule.diag_every == 0 || m == total {
            let (r, s) = monitor.record(m, t1, &next.u);
            let tail = r.tail_ratio;
            records.push(r);
            spectra.push((m, t1, s));
            if let Some(limit) = schedule.guard.max_tail_ratio {
                if tail > limit {
                    diverged = Some(Divergence {
                        step: m,
                        t: t1,
                        reason: DivergenceReason::Underresolved { tail_ratio: tail },
                    });
                    failed_state = Some(next);
                    break;
                }
            }
        }
        if m % schedule.snapshot_every == 0 {
            snapshots.push(next.clone());
        }
        current = next;
    }
    let final_state = failed_state.unwrap_or_else(|| current.clone());
    Ok(Trajectory {
        dt: schedule.dt,
        snapshots,
        records,
        spectra,
        diverged,
        last_good: current,
        final_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2;

    #[test]
    fn cfl_policy_rules() {
        assert!(DtPolicy::ViscousCfl { safety: 0.2 }.resolve(0.1, 0.0).is_err());
        assert!(DtPolicy::ViscousCfl { safety: 0.3 }.resolve(0.1, 1.0).is_err());
        let dt = DtPolicy::ViscousCfl { safety: 0.2 }.resolve(0.1, 0.01).unwrap();
        assert!((dt - 0.2).abs() < 1e-15);
        assert!(DtPolicy::Fixed(-1.0).resolve(0.1, 0.0).is_err());
    }

    #[test]
    fn step_times_land_on_t_end() {
        let s = Schedule::new(0.3, 1.0);
        assert_eq!(s.step_count(), 4);
        assert_eq!(s.time_of(3), 3.0 * 0.3);
        assert_eq!(s.time_of(4), 1.0);
        let s = Schedule::new(1e-3, 1.0);
        assert_eq!(s.step_count(), 1000);
    }

    #[test]
    fn guard_stops_growth() {
        let g = Grid2::new(8).unwrap();
        let u0 = VectorField::from_fn(g, |_| [1.0, 0.0]);
        let mut m = Monitor::new(g, 0.0, 0.0, None);
        let mut sched = Schedule::new(1.0, 100.0);
        sched.guard.max_tail_ratio = None;
        let traj = integrate(u0, &sched, &mut m, |u, _| u.scaled(10.0)).unwrap();
        let d = traj.diverged.unwrap();
        assert_eq!(d.step, 7);
        assert!(matches!(d.reason, DivergenceReason::SpeedExceeded { .. }));
        assert_eq!(traj.last_good.step, 6);
    }

    #[test]
    fn nan_is_caught() {
        let g = Grid2::new(8).unwrap();
        let u0 = VectorField::zeros(g);
        let mut m = Monitor::new(g, 0.0, 0.0, None);
        let traj = integrate(u0, &Schedule::new(0.1, 1.0), &mut m, |u, _| u.scaled(f64::NAN)).unwrap();
        assert_eq!(traj.diverged.unwrap().reason, DivergenceReason::NonFinite);
        assert_eq!(traj.last_good.step, 0);
    }
}
