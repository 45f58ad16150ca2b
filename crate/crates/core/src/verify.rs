//! Named verification suites shared by the command line and the acceptance tests.
//!
//! Each check runs a small experiment, compares it against a closed-form or
//! convergence expectation and reports pass/fail with the measured numbers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::blowup::{self, Profile1D};
use crate::burgers2d::{self, Rotation2, SimConfig2};
use crate::burgers3d::{self, SimConfig3};
use crate::config::RunConfig;
use crate::diagnostics::{self, DiagnosticsRecord};
use crate::driver::{DtPolicy, Guard};
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::forcing::{self, ForceField, ForcingSpec};
use crate::grid::{Grid2, Grid3};
use crate::initial::{self, Profile};
use crate::kse::{self, KseConfig};
use crate::norms;
use crate::ops;
use crate::runner;

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check { name, passed, detail }
    }

    /// `PASS name: detail` (first detail line only).
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let first = self.detail.lines().next().unwrap_or("");
        format!("{status} {}: {first}", self.name)
    }
}

/// A suite's checks, in run order.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Pass/fail table followed by any multi-line details.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let first = c.detail.lines().next().unwrap_or("");
            writeln!(out, "{status}  {:width$}  {first}", c.name).unwrap();
        }
        for c in &self.checks {
            let rest: Vec<&str> = c.detail.lines().skip(1).collect();
            if !rest.is_empty() {
                writeln!(out, "\n{}:", c.name).unwrap();
                for l in rest {
                    writeln!(out, "  {l}").unwrap();
                }
            }
        }
        out
    }
}

pub const SUITES: &[&str] = &[
    "core-identities",
    "scheme-2d",
    "blowup",
    "damped-absorbing",
    "kse",
    "helicity-3d",
    "headline",
    "determinism",
];

/// Runs the suite called `name`.
pub fn run_suite(name: &str) -> Result<SuiteReport> {
    let checks = match name {
        "core-identities" => vec![lamb_identities()?, l2_orthogonality()?],
        "scheme-2d" => vec![rotation_conservation()?, max_principle()?, energy_balance()?],
        "blowup" => vec![blowup_reproduction()?],
        "damped-absorbing" => vec![damped_absorbing()?],
        "kse" => vec![kse_gronwall()?],
        "helicity-3d" => vec![helicity_conservation()?],
        "headline" => vec![headline()?],
        "determinism" => vec![determinism()?],
        other => {
            return Err(Error::config(
                "suite",
                format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")),
            ))
        }
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        checks,
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn ulp(x: f64) -> f64 {
    let x = x.abs();
    f64::from_bits(x.to_bits() + 1) - x
}

/// Lamb vector of a closed-form field and two periodic fields with known Lamb vectors.
pub fn lamb_identities() -> Result<Check> {
    let start = Instant::now();
    // u = (y, 0, x) has ω = (0, −1, −1) and ω×u = (−x, −y, y) everywhere.
    let mut pointwise = 0.0f64;
    for &x in &[-2.5, -0.75, 0.0, 0.3, 1.0, 3.125] {
        for &y in &[-1.5, 0.0, 0.5, 2.75] {
            let l = ops::lamb_pointwise([y, 0.0, x], [0.0, -1.0, -1.0]);
            pointwise = pointwise.max((l[0] + x).abs()).max((l[1] + y).abs()).max((l[2] - y).abs());
        }
    }
    let g = Grid3::new(32)?;
    let u = VectorField::from_fn(g, |p| [p[1].sin(), 0.0, p[0].sin()]);
    let exact = VectorField::from_fn(g, |p| {
        [
            -p[0].sin() * p[0].cos(),
            -p[1].sin() * p[1].cos(),
            p[0].cos() * p[1].sin(),
        ]
    });
    let periodic = ops::lamb3(&u, true).max_diff(&exact);
    let abc = Profile::Abc.build(g)?;
    let beltrami = ops::lamb3(&abc, true).max_speed();
    let secs = start.elapsed().as_secs_f64();
    let passed = pointwise == 0.0 && periodic <= 1e-11 && beltrami <= 1e-11 && secs < 5.0;
    Ok(Check::new(
        "lamb-identities",
        passed,
        format!(
            "pointwise {pointwise:.1e} (exact), periodic {periodic:.2e} <= 1e-11, ABC {beltrami:.2e} <= 1e-11, {secs:.2}s < 5s"
        ),
    ))
}

/// `|(lamb(u), u)| / (‖u‖‖lamb(u)‖ + ε)` for 20 random fields in 2D and 3D.
pub fn l2_orthogonality() -> Result<Check> {
    const EPS: f64 = 1e-300;
    let mut worst2 = 0.0f64;
    let mut worst3 = 0.0f64;
    let g2 = Grid2::new(128)?;
    let g3 = Grid3::new(32)?;
    for seed in 0..20u64 {
        let u = initial::random_smooth(g2, 100 + seed, 6.0, 1.0)?;
        let l = ops::lamb2(&u, true);
        worst2 = worst2.max(l.inner(&u).abs() / (norms::norm_l2(&u) * norms::norm_l2(&l) + EPS));
        let u = initial::random_smooth(g3, 200 + seed, 4.0, 1.0)?;
        let l = ops::lamb3(&u, true);
        worst3 = worst3.max(l.inner(&u).abs() / (norms::norm_l2(&u) * norms::norm_l2(&l) + EPS));
    }
    Ok(Check::new(
        "l2-orthogonality",
        worst2 <= 1e-12 && worst3 <= 1e-12,
        format!("worst ratio 2D n=128 {worst2:.2e}, 3D n=32 {worst3:.2e} (limit 1e-12)"),
    ))
}

/// Inviscid rotation scheme: energy drift and per-point speed over 1000 steps.
pub fn rotation_conservation() -> Result<Check> {
    let g = Grid2::new(128)?;
    let mut u = initial::random_smooth(g, 7, 4.0, 0.1)?;
    let e0 = u.energy();
    let mut scheme = Rotation2::new(g, true);
    let mut worst_ulps = 0.0f64;
    for _ in 0..1000 {
        let next = scheme.step_inviscid(&u, 1e-3);
        for i in 0..g.len() {
            let (a, b) = (u.speed_at(i), next.speed_at(i));
            if a > 0.0 {
                worst_ulps = worst_ulps.max((b - a).abs() / ulp(a));
            }
        }
        u = next;
    }
    let drift = rel(u.energy(), e0);
    Ok(Check::new(
        "rotation-conservation",
        drift <= 1e-11 && worst_ulps <= 4.0,
        format!("relative energy drift {drift:.2e} <= 1e-11, worst per-step speed change {worst_ulps} ulp <= 4"),
    ))
}

/// Unforced viscous run: `sup|u|` non-increasing step by step.
pub fn max_principle() -> Result<Check> {
    let g = Grid2::new(128)?;
    let u0 = initial::random_smooth(g, 11, 4.0, 0.2)?;
    let mut cfg = SimConfig2::viscous(0.01, 0.0);
    cfg.diag_every = 1;
    cfg.snapshot_every = usize::MAX;
    let dt = cfg.dt(g)?;
    cfg.t_end = 10_000.0 * dt;
    let traj = burgers2d::simulate(&u0, &cfg, &ForceField::zero(g))?;
    let steps = traj.final_state.step;
    let worst = traj
        .records
        .windows(2)
        .map(|w| (w[1].sup - w[0].sup) / w[0].sup)
        .fold(f64::NEG_INFINITY, f64::max);
    let (s0, s1) = (traj.records[0].sup, traj.records.last().expect("records").sup);
    let passed = traj.completed() && steps == 10_000 && worst <= 1e-8 && s1 < s0;
    Ok(Check::new(
        "max-principle",
        passed,
        format!(
            "{steps} steps, worst relative per-step sup increase {worst:.2e} <= 1e-8, sup {s0:.4e} -> {s1:.4e}"
        ),
    ))
}

fn balance_run(dt: f64) -> Result<f64> {
    let g = Grid2::new(128)?;
    let nu = 0.05;
    let f = forcing::generate(&ForcingSpec::new(5, 0.5, 2.5, 100.0, nu), g)?;
    let u0 = initial::random_smooth(g, 13, 4.0, 0.5)?;
    let mut cfg = SimConfig2::viscous(nu, 1.0);
    cfg.dt_policy = DtPolicy::Fixed(dt);
    cfg.diag_every = 1;
    cfg.snapshot_every = usize::MAX;
    let traj = burgers2d::simulate(&u0, &cfg, &f)?;
    if !traj.completed() {
        return Err(Error::Domain(format!("balance run at dt={dt} diverged")));
    }
    diagnostics::energy_balance_residual(&traj.records, nu, 0.0)
}

/// Forced viscous run: the energy-balance defect halves with the step.
pub fn energy_balance() -> Result<Check> {
    let coarse = balance_run(2e-3)?;
    let fine = balance_run(1e-3)?;
    let ratio = fine / coarse;
    Ok(Check::new(
        "energy-balance",
        (0.4..=0.6).contains(&ratio),
        format!("residual {coarse:.3e} at dt=2e-3, {fine:.3e} at dt=1e-3, ratio {ratio:.3} in [0.4, 0.6]"),
    ))
}

/// Shock formation for the planar family against the characteristics oracle.
pub fn blowup_reproduction() -> Result<Check> {
    let t_star = blowup::shock_time(&Profile1D::cos());
    let g = Grid2::new(512)?;
    let u0 = Profile::ShearCos.build(g)?;
    let f = ForceField::zero(g);

    let mut coarse = SimConfig2::inviscid(1e-4, 1.1);
    coarse.snapshot_every = 2500;
    let traj = burgers2d::simulate(&u0, &coarse, &f)?;
    let mut table = String::from("t       L∞ error (dt=1e-4)");
    let mut err_half = f64::NAN;
    for step in [2500, 5000, 7500] {
        let snap = traj
            .snapshot_at_step(step)
            .ok_or_else(|| Error::MissingSamples(format!("no snapshot at step {step}")))?;
        let e = blowup::compare_solver_vs_oracle(snap, snap.t, blowup::family2d)?;
        write!(table, "\n{:.2}    {e:.3e}", snap.t).unwrap();
        if step == 5000 {
            err_half = e;
        }
    }
    let guard_t = traj.diverged.as_ref().map(|d| d.t);

    let mut fine = SimConfig2::inviscid(5e-5, 0.5);
    fine.snapshot_every = 10_000;
    let traj_fine = burgers2d::simulate(&u0, &fine, &f)?;
    let snap = traj_fine
        .snapshot_at_step(10_000)
        .ok_or_else(|| Error::MissingSamples("no snapshot at t=0.5".into()))?;
    let err_fine = blowup::compare_solver_vs_oracle(snap, snap.t, blowup::family2d)?;
    write!(table, "\n0.50    {err_fine:.3e} (dt=5e-5)").unwrap();
    let ratio = err_fine / err_half;
    let guard_ok = matches!(guard_t, Some(t) if t < 1.1);
    if let Some(d) = &traj.diverged {
        write!(table, "\nguard: {} at t={:.4}", d.reason, d.t).unwrap();
    }
    let passed = (t_star - 1.0).abs() <= 1e-10
        && err_half <= 1e-3
        && (0.4..=0.6).contains(&ratio)
        && guard_ok;
    Ok(Check::new(
        "blowup",
        passed,
        format!(
            "t*={t_star:.12}, error at t=0.5 {err_half:.3e} <= 1e-3, halving ratio {ratio:.3} in [0.4, 0.6], guard at t={}\n{table}",
            guard_t.map_or("none".to_string(), |t| format!("{t:.4}"))
        ),
    ))
}

/// Damped forced run: the trajectory stays in both absorbing balls after their entry times.
pub fn damped_absorbing() -> Result<Check> {
    let start = Instant::now();
    let g = Grid2::new(128)?;
    let (nu, gamma) = (0.1, 0.5);
    let f = forcing::generate(&ForcingSpec::new(17, 0.5, 2.5, 5.0, nu), g)?;
    let u0 = initial::random_smooth(g, 19, 3.0, 1.0)?;
    let b = diagnostics::absorbing_ball_bounds(&f, nu, gamma, u0.energy().sqrt(), u0.max_speed())?;
    let mut cfg = SimConfig2::viscous(nu, b.t2.max(b.tinf) + 5.0);
    cfg.gamma = gamma;
    cfg.snapshot_every = usize::MAX;
    let traj = burgers2d::simulate(&u0, &cfg, &f)?;
    let secs = start.elapsed().as_secs_f64();
    let worst = |after: f64, margin: fn(&DiagnosticsRecord) -> Option<f64>| {
        traj.records
            .iter()
            .filter(|r| r.t >= after)
            .filter_map(margin)
            .fold(f64::INFINITY, f64::min)
    };
    let m0 = worst(b.t2, |r| r.rho0_margin);
    let minf = worst(b.tinf, |r| r.rhoinf_margin);
    let passed = traj.completed() && u0.energy() > b.rho0 && m0 >= 0.0 && minf >= 0.0 && secs < 120.0;
    Ok(Check::new(
        "damped-absorbing",
        passed,
        format!(
            "‖u0‖²={:.3e} > ρ0={:.3e}; min ρ0 margin after t2={:.2} is {m0:.3e}; min ρ∞ margin after t∞={:.2} is {minf:.3e}; {secs:.1}s",
            u0.energy(),
            b.rho0,
            b.t2,
            b.tinf
        ),
    ))
}

fn helicity_run(dt: f64) -> Result<(f64, f64)> {
    let g = Grid3::new(32)?;
    // Strong enough that the RK4 defect sits well above round-off at both steps.
    let u0 = initial::random_smooth(g, 23, 3.0, 10.0)?;
    let (h0, e0) = (burgers3d::helicity(&u0), u0.energy());
    let mut cfg = SimConfig3::inviscid(dt, 0.1);
    cfg.snapshot_every = usize::MAX;
    // The truncated system conserves both invariants at any resolution.
    cfg.guard.max_tail_ratio = None;
    let traj = burgers3d::simulate3(&u0, &cfg, &ForceField::zero(g))?;
    let u = &traj.final_state.u;
    if !traj.completed() {
        return Err(Error::Domain(format!("helicity run at dt={dt} diverged")));
    }
    Ok((rel(burgers3d::helicity(u), h0), rel(u.energy(), e0)))
}

/// Inviscid 3D RK4: helicity and energy drift, fourth-order in the step.
pub fn helicity_conservation() -> Result<Check> {
    let (h1, e1) = helicity_run(1e-3)?;
    let (h2, e2) = helicity_run(5e-4)?;
    let (rh, re) = (h1 / h2, e1 / e2);
    let band = 16.0 * 0.7..=16.0 * 1.3;
    let passed = h1 <= 1e-8 && e1 <= 1e-8 && band.contains(&rh) && band.contains(&re);
    Ok(Check::new(
        "helicity-3d",
        passed,
        format!(
            "dt=1e-3: helicity drift {h1:.2e}, energy drift {e1:.2e} (<= 1e-8); shrink on halving: helicity {rh:.2}x, energy {re:.2}x (16 ± 30%)"
        ),
    ))
}

/// Rotational KSE: Grönwall envelope for λ=4 and decay for λ=1/2.
pub fn kse_gronwall() -> Result<Check> {
    let g = Grid2::new(128)?;
    // Gradient modes at |k|² = 2 grow like e^{4t} unopposed, so the amplitude
    // rises by about e^{40} over the run; starting near 1e-16 keeps the final
    // state O(1) and resolvable at this step while the nonlinearity still acts.
    let u0 = initial::random_smooth(g, 29, 4.0, 1e-16)?;
    let mut cfg = KseConfig::new(4.0, 1e-3, 10.0);
    cfg.snapshot_every = usize::MAX;
    let traj = kse::simulate_kse(&u0, &cfg)?;
    let e0 = u0.energy();
    let worst = traj
        .records
        .iter()
        .filter_map(|r| r.kse_margin.map(|m| m / ((cfg.lambda * cfg.lambda * r.t).exp() * e0)))
        .fold(f64::INFINITY, f64::min);

    let mut slow = KseConfig::new(0.5, 1e-3, 20.0);
    slow.snapshot_every = usize::MAX;
    let small = initial::random_smooth(g, 29, 4.0, 0.01)?;
    let decay = kse::simulate_kse(&small, &slow)?;
    let (n0, n1) = (small.energy().sqrt(), decay.final_state.u.energy().sqrt());
    let passed = traj.completed() && decay.completed() && worst >= -1e-6 && n1 < n0;
    Ok(Check::new(
        "kse-gronwall",
        passed,
        format!(
            "λ=4: worst relative margin {worst:.3e} >= -1e-6 over {} samples, ‖u(10)‖²={:.3e}; λ=0.5: ‖u‖ {n0:.3e} -> {n1:.3e}",
            traj.records.len(),
            traj.final_state.u.energy()
        ),
    ))
}

/// Desk-scale analogue of the long forced run: completes resolved and bounded.
pub fn headline() -> Result<Check> {
    let start = Instant::now();
    let g = Grid2::new(256)?;
    let nu = 0.005;
    let f = forcing::generate(&ForcingSpec::new(42, 0.5, 2.5, 20.0, nu), g)?;
    let mut cfg = SimConfig2::viscous(nu, 200.0);
    cfg.snapshot_every = usize::MAX;
    cfg.diag_every = 50;
    let traj = burgers2d::simulate(&VectorField::zeros(g), &cfg, &f)?;
    let worst_tail = traj.records.iter().map(|r| r.tail_ratio).fold(0.0f64, f64::max);
    let bounded = traj.records.iter().all(|r| {
        [r.l2, r.grad_l2, r.div_l2, r.curl_l2, r.sup]
            .iter()
            .all(|v| v.is_finite() && *v < Guard::default().max_speed)
    });
    let last = traj.records.last().expect("records");
    let secs = start.elapsed().as_secs_f64();
    let passed = traj.completed() && worst_tail <= diagnostics::RESOLVED_TAIL && bounded;
    Ok(Check::new(
        "headline",
        passed,
        format!(
            "{} steps to t={:.1}, worst tail ratio {worst_tail:.2e} <= 1e-12, bounded norms {bounded}, final ‖u‖={:.4e} sup={:.4e}, {secs:.1}s",
            traj.final_state.step, traj.final_state.t, last.l2, last.sup
        ),
    ))
}

const DETERMINISM_CONFIGS: [&str; 2] = [
    "equation.kind = rotburgers2d\nequation.nu = 0.05\nequation.t_end = 0.5\nequation.cfl = 0.2\n\
     equation.snapshot_every = 20\ngrid.n = 64\nforcing.kind = spectral\nforcing.seed = 99\n\
     forcing.kmin = 0.5\nforcing.kmax = 2.5\nforcing.grashof = 50\ninitial.kind = profile\n\
     initial.profile = random\ninitial.seed = 3\ninitial.kmax = 4\ninitial.amplitude = 0.5\n",
    "equation.kind = rotkse2d\nequation.lambda = 4\nequation.dt = 1e-3\nequation.t_end = 0.2\n\
     equation.snapshot_every = 50\ngrid.n = 32\ninitial.kind = profile\ninitial.profile = random\n\
     initial.seed = 5\ninitial.kmax = 3\ninitial.amplitude = 0.1\n",
];

fn scratch_dir() -> PathBuf {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_nanos());
    std::env::temp_dir().join(format!("rotflow-determinism-{}-{nanos}", std::process::id()))
}

fn dir_bytes(dir: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let p = entry.map_err(|e| Error::io(dir, e))?.path();
        let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
        out.push((p.file_name().unwrap_or_default().to_string_lossy().into_owned(), bytes));
    }
    out.sort();
    Ok(out)
}

/// Runs each config twice into separate directories and compares every byte.
pub fn determinism_in(root: &Path) -> Result<Check> {
    let mut compared = 0usize;
    let mut mismatched = Vec::new();
    for (i, text) in DETERMINISM_CONFIGS.iter().enumerate() {
        let mut listings = Vec::new();
        for rep in 0..2 {
            let dir = root.join(format!("cfg{i}-run{rep}"));
            let full = format!("{text}output.dir = {}\n", dir.display());
            let cfg = RunConfig::parse(&full, root)?;
            runner::run_config(&cfg)?;
            listings.push(dir_bytes(&dir)?);
        }
        let (a, b) = (&listings[0], &listings[1]);
        if a.len() != b.len() {
            mismatched.push(format!("cfg{i}: {} vs {} files", a.len(), b.len()));
        }
        for (fa, fb) in a.iter().zip(b) {
            compared += 1;
            if fa != fb {
                mismatched.push(format!("cfg{i}: {}", fa.0));
            }
        }
    }
    Ok(Check::new(
        "determinism",
        mismatched.is_empty() && compared > 0,
        format!("{compared} files compared byte for byte, mismatches: {mismatched:?}"),
    ))
}

pub fn determinism() -> Result<Check> {
    let root = scratch_dir();
    fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
    let out = determinism_in(&root);
    let _ = fs::remove_dir_all(&root);
    out
}
