//! Rotation-matrix integrator for the 2D rotational Burgers equation
//! `u_t + ω u^⊥ = νΔu − γu + f`, `ω = ∂ₓu₂ − ∂_y u₁`, `u^⊥ = (−u₂, u₁)`.
//!
//! One step is `u^{n+1} = R(Δt·ωⁿ)·[uⁿ + Δt(νΔuⁿ − γuⁿ + f)]` with
//! `R(θ) = [[cos θ, sin θ], [−sin θ, cos θ]]`. The angle is built from the
//! pre-step vorticity; the rotation acts pointwise on the untruncated
//! bracket, so without viscosity, damping and forcing every grid value keeps
//! its Euclidean length. With dealiasing on, ω and the Laplacian see only the
//! modes inside the 2/3 cutoff.

use rustfft::num_complex::Complex64;

use crate::diagnostics::Monitor;
use crate::driver::{self, DtPolicy, Guard, Schedule, Trajectory2};
use crate::error::{Error, Result};
use crate::fft;
use crate::field::{RealField, VectorField};
use crate::forcing::ForceField2;
use crate::grid::Grid2;
use crate::ops;

/// Parameters of a 2D run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig2 {
    pub nu: f64,
    pub gamma: f64,
    pub t_end: f64,
    pub dt_policy: DtPolicy,
    pub dealias: bool,
    pub snapshot_every: usize,
    pub diag_every: usize,
    pub guard: Guard,
}

/// Default CFL safety factor for viscous runs.
pub const DEFAULT_CFL: f64 = 0.2;

impl SimConfig2 {
    /// Inviscid, unforced-ready configuration with a fixed step.
    pub fn inviscid(dt: f64, t_end: f64) -> Self {
        SimConfig2 {
            nu: 0.0,
            gamma: 0.0,
            t_end,
            dt_policy: DtPolicy::Fixed(dt),
            dealias: true,
            snapshot_every: 1000,
            diag_every: 10,
            guard: Guard::default(),
        }
    }

    /// Viscous configuration on the CFL policy with the default safety factor.
    pub fn viscous(nu: f64, t_end: f64) -> Self {
        SimConfig2 {
            nu,
            dt_policy: DtPolicy::ViscousCfl { safety: DEFAULT_CFL },
            ..SimConfig2::inviscid(1.0, t_end)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(Error::config("nu", "must be finite and non-negative"));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::config("gamma", "must be finite and non-negative"));
        }
        if self.nu == 0.0 && !matches!(self.dt_policy, DtPolicy::Fixed(_)) {
            return Err(Error::config("dt", "inviscid runs need a fixed time step"));
        }
        Ok(())
    }

    /// Time step on `grid`.
    pub fn dt(&self, grid: Grid2) -> Result<f64> {
        self.validate()?;
        self.dt_policy.resolve(grid.dx(), self.nu)
    }

    pub fn schedule(&self, grid: Grid2) -> Result<Schedule> {
        let s = Schedule {
            dt: self.dt(grid)?,
            t_end: self.t_end,
            diag_every: self.diag_every,
            snapshot_every: self.snapshot_every,
            guard: self.guard,
        };
        s.validate()?;
        Ok(s)
    }
}

/// `R(θ)·u`.
pub fn rotate(u: [f64; 2], theta: f64) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    [c * u[0] + s * u[1], -s * u[0] + c * u[1]]
}

/// Reusable tables and buffers for the rotation scheme on one grid.
#[derive(Clone, Debug)]
pub struct Rotation2 {
    grid: Grid2,
    dealias: bool,
    kx: Vec<f64>,
    ky: Vec<f64>,
    keep: Vec<bool>,
    lap: Vec<f64>,
    neg: Vec<usize>,
    packed: Vec<Complex64>,
    work: Vec<Complex64>,
    omega: Vec<f64>,
}

impl Rotation2 {
    pub fn new(grid: Grid2, dealias: bool) -> Self {
        let table = ops::derivative_table(grid);
        let keep = if dealias {
            ops::dealias_mask(grid)
        } else {
            vec![true; grid.len()]
        };
        let lap = ops::laplacian_symbol(grid)
            .into_iter()
            .zip(&keep)
            .map(|(l, &k)| if k { l } else { 0.0 })
            .collect();
        Rotation2 {
            grid,
            dealias,
            kx: table.iter().map(|k| k[0]).collect(),
            ky: table.iter().map(|k| k[1]).collect(),
            keep,
            lap,
            neg: fft::negation_table(grid),
            packed: vec![Complex64::new(0.0, 0.0); grid.len()],
            work: vec![Complex64::new(0.0, 0.0); grid.len()],
            omega: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> Grid2 {
        self.grid
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    /// Leaves the coefficients of `u₁ + iu₂` in `packed` and ω in `omega`.
    pub(crate) fn load(&mut self, u: &VectorField<2>) {
        assert_eq!(u.grid(), self.grid, "field and scheme grids differ");
        let (u1, u2) = (u.component(0).values(), u.component(1).values());
        for (z, (&a, &b)) in self.packed.iter_mut().zip(u1.iter().zip(u2)) {
            *z = Complex64::new(a, b);
        }
        fft::forward_buffer(self.grid, &mut self.packed);
        let z = &self.packed;
        for (i, w) in self.work.iter_mut().enumerate() {
            if !self.keep[i] {
                *w = Complex64::new(0.0, 0.0);
                continue;
            }
            // û₁ = (Z + Z̃)/2, û₂ = (Z − Z̃)/2i with Z̃ = conj Z(−k).
            let zc = z[self.neg[i]].conj();
            let d = z[i] - zc;
            let s = z[i] + zc;
            *w = 0.5 * Complex64::new(self.kx[i] * d.re + self.ky[i] * s.im, self.kx[i] * d.im - self.ky[i] * s.re);
        }
        fft::inverse_buffer(self.grid, &mut self.work);
        for (o, w) in self.omega.iter_mut().zip(&self.work) {
            *o = w.re;
        }
    }

    pub(crate) fn packed(&self) -> &[Complex64] {
        &self.packed
    }

    pub(crate) fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub(crate) fn keep(&self) -> &[bool] {
        &self.keep
    }

    /// The vorticity used for the rotation angle.
    pub fn vorticity(&mut self, u: &VectorField<2>) -> RealField<2> {
        self.load(u);
        RealField::from_values(self.grid, self.omega.clone()).expect("sized to grid")
    }

    fn rotate_into(&self, dt: f64, b1: &[f64], b2: &[f64]) -> VectorField<2> {
        let len = self.grid.len();
        let mut o1 = Vec::with_capacity(len);
        let mut o2 = Vec::with_capacity(len);
        for i in 0..len {
            let (s, c) = (dt * self.omega[i]).sin_cos();
            o1.push(c * b1[i] + s * b2[i]);
            o2.push(-s * b1[i] + c * b2[i]);
        }
        VectorField::from_components([
            RealField::from_values(self.grid, o1).expect("sized to grid"),
            RealField::from_values(self.grid, o2).expect("sized to grid"),
        ])
        .expect("shared grid")
    }

    /// `u^{n+1} = R(Δt·ωⁿ) uⁿ`.
    pub fn step_inviscid(&mut self, u: &VectorField<2>, dt: f64) -> VectorField<2> {
        self.load(u);
        self.rotate_into(dt, u.component(0).values(), u.component(1).values())
    }

    /// `u^{n+1} = R(Δt·ωⁿ)[uⁿ + Δt(νΔuⁿ − γuⁿ + f)]`; absent terms are skipped.
    pub fn step_viscous(
        &mut self,
        u: &VectorField<2>,
        dt: f64,
        nu: f64,
        gamma: f64,
        f: Option<&VectorField<2>>,
    ) -> VectorField<2> {
        self.load(u);
        let (u1, u2) = (u.component(0).values(), u.component(1).values());
        let len = self.grid.len();
        let mut b1 = u1.to_vec();
        let mut b2 = u2.to_vec();
        if nu == 0.0 && gamma == 0.0 && f.is_none() {
            return self.rotate_into(dt, &b1, &b2);
        }
        if nu != 0.0 {
            // νΔ(u₁ + iu₂) in one inverse transform: the symbol is real and even.
            for ((w, z), l) in self.work.iter_mut().zip(&self.packed).zip(&self.lap) {
                *w = (nu * l) * z;
            }
            fft::inverse_buffer(self.grid, &mut self.work);
        }
        let (f1, f2) = match f {
            Some(f) => (Some(f.component(0).values()), Some(f.component(1).values())),
            None => (None, None),
        };
        for i in 0..len {
            let mut r1 = 0.0;
            let mut r2 = 0.0;
            if nu != 0.0 {
                r1 += self.work[i].re;
                r2 += self.work[i].im;
            }
            if gamma != 0.0 {
                r1 -= gamma * u1[i];
                r2 -= gamma * u2[i];
            }
            if let (Some(f1), Some(f2)) = (f1, f2) {
                r1 += f1[i];
                r2 += f2[i];
            }
            b1[i] = u1[i] + dt * r1;
            b2[i] = u2[i] + dt * r2;
        }
        self.rotate_into(dt, &b1, &b2)
    }
}

/// One inviscid rotation step.
pub fn step_inviscid(u: &VectorField<2>, dt: f64, dealias: bool) -> Result<VectorField<2>> {
    check_step(u, dt)?;
    Ok(Rotation2::new(u.grid(), dealias).step_inviscid(u, dt))
}

/// One viscous, damped, forced rotation step.
pub fn step_viscous(
    u: &VectorField<2>,
    dt: f64,
    nu: f64,
    gamma: f64,
    f: &ForceField2,
    dealias: bool,
) -> Result<VectorField<2>> {
    check_step(u, dt)?;
    u.check_same_grid(f.field())?;
    let force = (!f.is_zero()).then(|| f.field());
    Ok(Rotation2::new(u.grid(), dealias).step_viscous(u, dt, nu, gamma, force))
}

fn check_step(u: &VectorField<2>, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::config("dt", format!("must be positive, got {dt}")));
    }
    if !u.is_finite() {
        return Err(Error::NonFinite { step: 0, t: f64::NAN });
    }
    Ok(())
}

/// Advances `u0` to `cfg.t_end` under force `f`.
pub fn simulate(u0: &VectorField<2>, cfg: &SimConfig2, f: &ForceField2) -> Result<Trajectory2> {
    let grid = u0.grid();
    u0.check_same_grid(f.field())?;
    let schedule = cfg.schedule(grid)?;
    let mut monitor = Monitor::for_run(grid, cfg.nu, cfg.gamma, f, u0);
    let mut scheme = Rotation2::new(grid, cfg.dealias);
    let force = (!f.is_zero()).then(|| f.field());
    let (nu, gamma) = (cfg.nu, cfg.gamma);
    driver::integrate(u0.clone(), &schedule, &mut monitor, |u, h| {
        scheme.step_viscous(u, h, nu, gamma, force)
    })
}

/// Max-norm gap between the last state and `R(Σ Δt·ωᵐ)` applied to the first,
/// for consecutive inviscid states a step `dt` apart.
pub fn rotation_representation_residual(
    states: &[VectorField<2>],
    dt: f64,
    dealias: bool,
) -> Result<f64> {
    let first = states
        .first()
        .ok_or_else(|| Error::MissingSamples("no states".into()))?;
    let grid = first.grid();
    let mut scheme = Rotation2::new(grid, dealias);
    let mut theta = vec![0.0; grid.len()];
    for s in &states[..states.len() - 1] {
        let w = scheme.vorticity(s);
        for (t, &wi) in theta.iter_mut().zip(w.values()) {
            *t += dt * wi;
        }
    }
    let last = states.last().expect("non-empty");
    Ok((0..grid.len())
        .map(|i| {
            let r = rotate(first.at(i), theta[i]);
            let l = last.at(i);
            (r[0] - l[0]).abs().max((r[1] - l[1]).abs())
        })
        .fold(0.0, f64::max))
}

/// The rotation representation check on a trajectory saved at every step.
pub fn rotation_representation_check(traj: &Trajectory2, dealias: bool) -> Result<f64> {
    for (m, s) in traj.snapshots.iter().enumerate() {
        if s.step != m {
            return Err(Error::MissingSamples(
                "the representation check needs a snapshot at every step".into(),
            ));
        }
    }
    let states: Vec<VectorField<2>> = traj.snapshots.iter().map(|s| s.u.clone()).collect();
    rotation_representation_residual(&states, traj.dt, dealias)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn quarter_turn_at_a_point() {
        let r = rotate([1.0, 0.0], FRAC_PI_2);
        assert!(r[0].abs() < 1e-16);
        assert!((r[1] + 1.0).abs() < 1e-16);
    }

    #[test]
    fn gradient_field_is_fixed() {
        let g = Grid2::new(32).unwrap();
        let u = ops::gradient(&RealField::from_fn(g, |x| x[0].sin() * x[1].cos()));
        let v = step_inviscid(&u, 0.1, true).unwrap();
        assert!(v.max_diff(&u) < 1e-13);
    }

    #[test]
    fn viscous_step_reduces_to_inviscid() {
        let g = Grid2::new(32).unwrap();
        let u = VectorField::from_fn(g, |x| [x[1].sin() + 0.3 * x[0].cos(), (2.0 * x[0]).sin()]);
        let a = step_inviscid(&u, 1e-2, true).unwrap();
        let b = step_viscous(&u, 1e-2, 0.0, 0.0, &ForceField2::zero(g), true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_state_picks_up_the_force() {
        let g = Grid2::new(16).unwrap();
        let f = ForceField2::from_field(VectorField::from_fn(g, |x| [x[1].cos(), x[0].sin()]));
        let u = step_viscous(&VectorField::zeros(g), 0.01, 0.1, 0.0, &f, true).unwrap();
        assert!(u.max_diff(&f.field().scaled(0.01)) < 1e-17);
    }

    #[test]
    fn small_single_mode_decays_linearly() {
        let g = Grid2::new(32).unwrap();
        let (eps, k, nu, dt) = (1e-6, 3.0, 0.1, 1e-3);
        let u = VectorField::from_fn(g, |x| [0.0, eps * (k * x[0]).cos()]);
        let v = step_viscous(&u, dt, nu, 0.0, &ForceField2::zero(g), true).unwrap();
        let expected = u.scaled(1.0 - nu * k * k * dt);
        assert!(v.max_diff(&expected) < 1e-2 * eps * eps + 1e-20);
    }

    #[test]
    fn cfl_rules() {
        let mut c = SimConfig2::viscous(0.0, 1.0);
        assert!(c.validate().is_err());
        c.nu = 0.01;
        let g = Grid2::new(64).unwrap();
        let dt = c.dt(g).unwrap();
        assert!((dt - 0.2 * g.dx() * g.dx() / 0.01).abs() < 1e-15);
    }

    #[test]
    fn zero_initial_data_stays_zero() {
        let g = Grid2::new(16).unwrap();
        let traj = simulate(&VectorField::zeros(g), &SimConfig2::inviscid(0.01, 0.1), &ForceField2::zero(g)).unwrap();
        assert!(traj.completed());
        assert_eq!(traj.final_state.u, VectorField::zeros(g));
    }
}
