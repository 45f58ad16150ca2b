//! Classical RK4 integration of the 3D rotational Burgers equation
//! `u_t = −(∇×u)×u + νΔu − γu + f` and of its curl-curl variant, where
//! `νΔu` is replaced by `−ν∇×(∇×u)`.
//!
//! With dealiasing on, the Lamb vector is formed from the truncated velocity,
//! and both it and the viscous term are truncated to the 2/3 modes. The
//! semi-discrete energy and helicity are then conserved exactly when
//! `ν = γ = 0` and `f = 0`, so any drift is time-stepping error.

use rustfft::num_complex::Complex64;

use crate::diagnostics::Monitor;
use crate::driver::{self, DtPolicy, Guard, Schedule, Trajectory3};
use crate::error::{Error, Result};
use crate::fft;
use crate::field::{RealField, SpectralField, VectorField};
use crate::forcing::ForceField3;
use crate::grid::Grid3;
use crate::ops;

/// Which dissipative operator the right-hand side uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rhs3Variant {
    /// `−ω×u + νΔu + f`.
    Rotational,
    /// `−ω×u − ν∇×ω + f`.
    CurlCurl,
}

/// Parameters of a 3D run; the integrator is always RK4.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig3 {
    pub nu: f64,
    pub gamma: f64,
    pub t_end: f64,
    pub dt_policy: DtPolicy,
    pub dealias: bool,
    pub snapshot_every: usize,
    pub diag_every: usize,
    pub guard: Guard,
    pub variant: Rhs3Variant,
}

impl SimConfig3 {
    pub fn inviscid(dt: f64, t_end: f64) -> Self {
        SimConfig3 {
            nu: 0.0,
            gamma: 0.0,
            t_end,
            dt_policy: DtPolicy::Fixed(dt),
            dealias: true,
            snapshot_every: 1000,
            diag_every: 10,
            guard: Guard::default(),
            variant: Rhs3Variant::Rotational,
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

    pub fn schedule(&self, grid: Grid3) -> Result<Schedule> {
        self.validate()?;
        let s = Schedule {
            dt: self.dt_policy.resolve(grid.dx(), self.nu)?,
            t_end: self.t_end,
            diag_every: self.diag_every,
            snapshot_every: self.snapshot_every,
            guard: self.guard,
        };
        s.validate()?;
        Ok(s)
    }
}

/// Right-hand side evaluator with precomputed tables.
#[derive(Clone, Debug)]
pub struct Rhs3 {
    grid: Grid3,
    nu: f64,
    gamma: f64,
    force: Option<VectorField<3>>,
    variant: Rhs3Variant,
    dealias: bool,
    keep: Vec<bool>,
    lap: Vec<f64>,
}

impl Rhs3 {
    pub fn new(
        grid: Grid3,
        nu: f64,
        gamma: f64,
        force: Option<&ForceField3>,
        variant: Rhs3Variant,
        dealias: bool,
    ) -> Self {
        let keep = if dealias {
            ops::dealias_mask(grid)
        } else {
            vec![true; grid.len()]
        };
        Rhs3 {
            grid,
            nu,
            gamma,
            force: force.filter(|f| !f.is_zero()).map(|f| f.field().clone()),
            variant,
            dealias,
            lap: ops::laplacian_symbol(grid),
            keep,
        }
    }

    pub fn eval(&self, u: &VectorField<3>) -> VectorField<3> {
        let grid = self.grid;
        let mut s = fft::forward_vector(u);
        if self.dealias {
            for c in s.iter_mut() {
                ops::apply_mask(c, &self.keep);
            }
        }
        let w_hat = ops::curl3_spectral(&s);
        let w = fft::inverse_vector(&w_hat);
        let ud = if self.dealias {
            fft::inverse_vector(&s)
        } else {
            u.clone()
        };
        let mut lamb = VectorField::zeros(grid);
        for i in 0..grid.len() {
            let l = ops::cross(w.at(i), ud.at(i));
            for (c, lc) in l.into_iter().enumerate() {
                lamb.component_mut(c).values_mut()[i] = lc;
            }
        }
        let lamb_hat = fft::forward_vector(&lamb);
        let viscous: Option<[SpectralField<3>; 3]> = (self.nu != 0.0).then(|| match self.variant {
            Rhs3Variant::Rotational => std::array::from_fn(|c| {
                let mut v = s[c].clone();
                for (z, l) in v.coeffs_mut().iter_mut().zip(&self.lap) {
                    *z *= self.nu * l;
                }
                v
            }),
            Rhs3Variant::CurlCurl => {
                let mut cc = ops::curl3_spectral(&w_hat);
                for c in cc.iter_mut() {
                    c.scale(-self.nu);
                }
                cc
            }
        });
        let total: [SpectralField<3>; 3] = std::array::from_fn(|c| {
            let mut t = lamb_hat[c].clone();
            for (i, z) in t.coeffs_mut().iter_mut().enumerate() {
                if !self.keep[i] {
                    *z = Complex64::new(0.0, 0.0);
                    continue;
                }
                *z = -*z;
                if let Some(v) = &viscous {
                    *z += v[c].coeffs()[i];
                }
            }
            t
        });
        let mut out = fft::inverse_vector(&total);
        if self.gamma != 0.0 {
            out = out.axpy(-self.gamma, u);
        }
        if let Some(f) = &self.force {
            out = out.axpy(1.0, f);
        }
        out
    }

    /// One classical RK4 step.
    pub fn rk4_step(&self, u: &VectorField<3>, dt: f64) -> VectorField<3> {
        let k1 = self.eval(u);
        let k2 = self.eval(&u.axpy(0.5 * dt, &k1));
        let k3 = self.eval(&u.axpy(0.5 * dt, &k2));
        let k4 = self.eval(&u.axpy(dt, &k3));
        let len = self.grid.len();
        let comps: [RealField<3>; 3] = std::array::from_fn(|c| {
            let (a, b, d, e) = (
                k1.component(c).values(),
                k2.component(c).values(),
                k3.component(c).values(),
                k4.component(c).values(),
            );
            let base = u.component(c).values();
            let vals = (0..len)
                .map(|i| base[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * d[i] + e[i]))
                .collect();
            RealField::from_values(self.grid, vals).expect("sized to grid")
        });
        VectorField::from_components(comps).expect("shared grid")
    }
}

/// The right-hand side at `u`.
pub fn rhs3(
    u: &VectorField<3>,
    nu: f64,
    f: &ForceField3,
    variant: Rhs3Variant,
    dealias: bool,
) -> Result<VectorField<3>> {
    u.check_same_grid(f.field())?;
    Ok(Rhs3::new(u.grid(), nu, 0.0, Some(f), variant, dealias).eval(u))
}

/// One RK4 step under `cfg`.
pub fn rk4_step(u: &VectorField<3>, dt: f64, cfg: &SimConfig3, f: &ForceField3) -> Result<VectorField<3>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::config("dt", format!("must be positive, got {dt}")));
    }
    u.check_same_grid(f.field())?;
    let rhs = Rhs3::new(u.grid(), cfg.nu, cfg.gamma, Some(f), cfg.variant, cfg.dealias);
    Ok(rhs.rk4_step(u, dt))
}

/// Advances `u0` to `cfg.t_end` under force `f`.
pub fn simulate3(u0: &VectorField<3>, cfg: &SimConfig3, f: &ForceField3) -> Result<Trajectory3> {
    let grid = u0.grid();
    u0.check_same_grid(f.field())?;
    let schedule = cfg.schedule(grid)?;
    let mut monitor = Monitor::for_run(grid, cfg.nu, cfg.gamma, f, u0);
    let rhs = Rhs3::new(grid, cfg.nu, cfg.gamma, Some(f), cfg.variant, cfg.dealias);
    driver::integrate(u0.clone(), &schedule, &mut monitor, |u, h| rhs.rk4_step(u, h))
}

/// Helicity `(u, ∇×u)_{L²}`.
pub fn helicity(u: &VectorField<3>) -> f64 {
    u.inner(&ops::curl3(u))
}
