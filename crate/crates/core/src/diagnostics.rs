//! Norms, shell spectra, balance residuals and bound monitors.
//!
//! Physical-space integrals use rectangle-rule quadrature; gradient,
//! divergence, curl and helicity are evaluated from the spectrum. Time
//! integrals use the trapezoid rule over consecutive records.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{RealField, SpectralField, VectorField};
use crate::forcing::ForceField;
use crate::grid::Grid;
use crate::ops;

/// Number of shells below the dealias cutoff inspected by the tail checks.
pub const TAIL_SHELLS: i64 = 10;
/// Tail ratio at or below which a spectrum counts as resolved.
pub const RESOLVED_TAIL: f64 = 1e-12;

/// One diagnostics sample. `None` marks a quantity that does not apply.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub t: f64,
    pub l2: f64,
    pub grad_l2: f64,
    pub div_l2: f64,
    pub curl_l2: f64,
    pub sup: f64,
    pub mean: Vec<f64>,
    pub helicity: Option<f64>,
    /// `(f, u)_{L²}`.
    pub forcing_work: f64,
    /// Signed cumulative energy-balance residual since the first record.
    pub energy_residual: Option<f64>,
    /// `ρ₀ − ‖u‖²`.
    pub rho0_margin: Option<f64>,
    /// `ρ∞ − sup|u|`.
    pub rhoinf_margin: Option<f64>,
    /// `e^{λ²t}‖u₀‖² − ‖u‖²`.
    pub kse_margin: Option<f64>,
    pub tail_ratio: f64,
}

/// Shell energies `E_k` for `k = 0..n/2−1`; modes with `|ℓ| ≥ n/2` fall beyond the last shell.
pub type Spectrum = Vec<f64>;

fn isqrt(m: u64) -> u64 {
    let mut s = (m as f64).sqrt() as u64;
    while s * s > m {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= m {
        s += 1;
    }
    s
}

/// Shell index `floor(|ℓ|)` of every flat index.
fn shell_table<const D: usize>(grid: Grid<D>) -> Vec<usize> {
    (0..grid.len())
        .map(|i| {
            let m2: i64 = grid.mode(i).iter().map(|k| k * k).sum();
            isqrt(m2 as u64) as usize
        })
        .collect()
}

fn spectrum_from<const D: usize>(spec: &[SpectralField<D>; D], shells: &[usize]) -> Spectrum {
    let n_shells = spec[0].grid().n() / 2;
    let mut acc = vec![0.0; n_shells];
    for (i, &s) in shells.iter().enumerate() {
        if s < n_shells {
            acc[s] += spec.iter().map(|c| c.coeffs()[i].norm_sqr()).sum::<f64>();
        }
    }
    acc.into_iter().map(f64::sqrt).collect()
}

/// `E_k = (Σ_{k ≤ |ℓ| < k+1} |û_ℓ|²)^{1/2}` with `|û_ℓ|²` summed over components.
pub fn energy_spectrum<const D: usize>(u: &VectorField<D>) -> Spectrum {
    let spec = fft::forward_vector(u);
    spectrum_from(&spec, &shell_table(u.grid()))
}

/// `max E_k / max_k E_k` over the shells `k ∈ [max(k_c − 9, ⌈k_c/2⌉), k_c]`, `k_c = floor(n/3)`.
///
/// The window never reaches the lower half of the resolved band, so coarse
/// grids are judged on their tail rather than their energy-containing shells.
pub fn tail_ratio(spectrum: &[f64], dealias_cutoff: i64) -> f64 {
    let peak = spectrum.iter().fold(0.0f64, |m, &e| m.max(e));
    if peak == 0.0 {
        return 0.0;
    }
    let hi = (dealias_cutoff as usize).min(spectrum.len() - 1);
    let lo = (dealias_cutoff - TAIL_SHELLS + 1).max((dealias_cutoff + 1) / 2).max(0) as usize;
    spectrum[lo..=hi].iter().fold(0.0f64, |m, &e| m.max(e)) / peak
}

/// Whether the spectral tail below the dealias cutoff sits at round-off level.
pub fn is_resolved(spectrum: &[f64], dealias_cutoff: i64) -> bool {
    tail_ratio(spectrum, dealias_cutoff) <= RESOLVED_TAIL
}

/// Absorbing-ball radii and entry times for the damped system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbsorbingBounds {
    /// L² radius (squared norm) `5‖f‖²_{H⁻¹}/(2νγ)`.
    pub rho0: f64,
    /// L∞ radius `3‖f‖_{L∞}/(2γ)`.
    pub rhoinf: f64,
    /// Entry time into the L² ball from `‖u₀‖ = R`.
    pub t2: f64,
    /// Entry time into the L∞ ball from `sup|u₀| = R∞`.
    pub tinf: f64,
}

/// Radii and absorption times; `r2` bounds `‖u₀‖_{L²}`, `rinf` bounds `sup|u₀|`.
pub fn absorbing_ball_bounds<const D: usize>(
    f: &ForceField<D>,
    nu: f64,
    gamma: f64,
    r2: f64,
    rinf: f64,
) -> Result<AbsorbingBounds> {
    if !(gamma > 0.0) {
        return Err(Error::config("gamma", "absorbing bounds need gamma > 0"));
    }
    if !(nu > 0.0) {
        return Err(Error::config("nu", "absorbing bounds need nu > 0"));
    }
    let h = f.norm_hminus1()?;
    let finf = f.norm_linf();
    let rho0 = 5.0 * h * h / (2.0 * nu * gamma);
    let rhoinf = 3.0 * finf / (2.0 * gamma);
    let t2 = if h == 0.0 {
        if r2 == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        (1.0 / (2.0 * gamma)) * (2.0 * nu * gamma * r2 * r2 / (h * h)).max(1.0).ln()
    };
    let tinf = if finf == 0.0 {
        if rinf == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        (1.0 / gamma) * (2.0 * gamma * rinf / finf).max(1.0).ln()
    };
    Ok(AbsorbingBounds {
        rho0,
        rhoinf,
        t2,
        tinf,
    })
}

/// Running state that turns field samples into [`DiagnosticsRecord`]s.
#[derive(Clone, Debug)]
pub struct Monitor<const D: usize> {
    grid: Grid<D>,
    nu: f64,
    gamma: f64,
    force: Option<VectorField<D>>,
    bounds: Option<AbsorbingBounds>,
    kse: Option<(f64, f64)>,
    derivative: Vec<[f64; D]>,
    shells: Vec<usize>,
    track_balance: bool,
    balance: Option<BalanceState>,
}

#[derive(Clone, Copy, Debug)]
struct BalanceState {
    e0: f64,
    t: f64,
    integrand: f64,
    integral: f64,
}

impl<const D: usize> Monitor<D> {
    /// `nu` and `gamma` enter the energy balance; `force` may be zero.
    pub fn new(grid: Grid<D>, nu: f64, gamma: f64, force: Option<&ForceField<D>>) -> Self {
        Monitor {
            grid,
            nu,
            gamma,
            force: force.filter(|f| !f.is_zero()).map(|f| f.field().clone()),
            bounds: None,
            kse: None,
            derivative: ops::derivative_table(grid),
            shells: shell_table(grid),
            track_balance: true,
            balance: None,
        }
    }

    /// Drops the energy-balance column (for equations it does not describe).
    pub fn without_balance(mut self) -> Self {
        self.track_balance = false;
        self
    }

    /// Monitor for a forced run from `u0`; absorbing-ball margins are added
    /// when `ν > 0`, `γ > 0` and the force is mean-free.
    pub fn for_run(
        grid: Grid<D>,
        nu: f64,
        gamma: f64,
        force: &ForceField<D>,
        u0: &VectorField<D>,
    ) -> Self {
        let m = Monitor::new(grid, nu, gamma, Some(force));
        if nu > 0.0 && gamma > 0.0 {
            if let Ok(b) = absorbing_ball_bounds(force, nu, gamma, u0.energy().sqrt(), u0.max_speed()) {
                return m.with_bounds(b);
            }
        }
        m
    }

    /// Adds absorbing-ball margins to every record.
    pub fn with_bounds(mut self, bounds: AbsorbingBounds) -> Self {
        self.bounds = Some(bounds);
        self
    }

    /// Adds the Grönwall margin `e^{λ²t}‖u₀‖² − ‖u‖²`.
    pub fn with_kse_bound(mut self, lambda: f64, initial_energy: f64) -> Self {
        self.kse = Some((lambda, initial_energy));
        self
    }

    pub fn grid(&self) -> Grid<D> {
        self.grid
    }

    /// Samples `u` at `(step, t)` and returns the record and shell spectrum.
    pub fn record(&mut self, step: usize, t: f64, u: &VectorField<D>) -> (DiagnosticsRecord, Spectrum) {
        let spec = fft::forward_vector(u);
        let vol = self.grid.volume();
        let mut grad = 0.0;
        let mut div = 0.0;
        for (i, k) in self.derivative.iter().enumerate() {
            let k2: f64 = k.iter().map(|x| x * x).sum();
            let mut d = Complex64::new(0.0, 0.0);
            for (a, c) in spec.iter().enumerate() {
                let z = c.coeffs()[i];
                grad += k2 * z.norm_sqr();
                d += Complex64::new(-k[a] * z.im, k[a] * z.re);
            }
            div += d.norm_sqr();
        }
        let (curl2, helicity) = curl_and_helicity(&spec, &self.derivative);
        let energy = u.energy();
        let forcing_work = self.force.as_ref().map_or(0.0, |f| f.inner(u));
        let integrand = 2.0 * self.nu * grad * vol + 2.0 * self.gamma * energy - 2.0 * forcing_work;
        let bal = match self.balance {
            None => BalanceState {
                e0: energy,
                t,
                integrand,
                integral: 0.0,
            },
            Some(b) => BalanceState {
                e0: b.e0,
                t,
                integrand,
                integral: b.integral + 0.5 * (t - b.t) * (b.integrand + integrand),
            },
        };
        self.balance = Some(bal);
        let sup = u.max_speed();
        let spectrum = spectrum_from(&spec, &self.shells);
        let record = DiagnosticsRecord {
            step,
            t,
            l2: energy.sqrt(),
            grad_l2: (grad * vol).sqrt(),
            div_l2: (div * vol).sqrt(),
            curl_l2: (curl2 * vol).sqrt(),
            sup,
            mean: u.mean().to_vec(),
            helicity: helicity.map(|h| h * vol),
            forcing_work,
            energy_residual: self.track_balance.then(|| energy + bal.integral - bal.e0),
            rho0_margin: self.bounds.map(|b| b.rho0 - energy),
            rhoinf_margin: self.bounds.map(|b| b.rhoinf - sup),
            kse_margin: self.kse.map(|(l, e0)| (l * l * t).exp() * e0 - energy),
            tail_ratio: tail_ratio(&spectrum, self.grid.dealias_cutoff()),
        };
        (record, spectrum)
    }
}

/// `Σ|curl û|²` and, in 3D, `Σ Re(conj(û)·curl û)`.
fn curl_and_helicity<const D: usize>(
    spec: &[SpectralField<D>; D],
    table: &[[f64; D]],
) -> (f64, Option<f64>) {
    let ik = |k: f64, z: Complex64| Complex64::new(-k * z.im, k * z.re);
    let mut curl = 0.0;
    let mut hel = 0.0;
    for (i, k) in table.iter().enumerate() {
        match D {
            2 => {
                let w = ik(k[0], spec[1].coeffs()[i]) - ik(k[1], spec[0].coeffs()[i]);
                curl += w.norm_sqr();
            }
            3 => {
                let u = [spec[0].coeffs()[i], spec[1].coeffs()[i], spec[2].coeffs()[i]];
                let w = [
                    ik(k[1], u[2]) - ik(k[2], u[1]),
                    ik(k[2], u[0]) - ik(k[0], u[2]),
                    ik(k[0], u[1]) - ik(k[1], u[0]),
                ];
                for c in 0..3 {
                    curl += w[c].norm_sqr();
                    hel += (u[c].conj() * w[c]).re;
                }
            }
            _ => {}
        }
    }
    (curl, (D == 3).then_some(hel))
}

/// `|‖u(T)‖² + 2ν∫‖∇u‖² + 2γ∫‖u‖² − ‖u₀‖² − 2∫(f,u)|` over consecutive-step records.
pub fn energy_balance_residual(records: &[DiagnosticsRecord], nu: f64, gamma: f64) -> Result<f64> {
    let first = records
        .first()
        .ok_or_else(|| Error::MissingSamples("no diagnostics records".into()))?;
    let mut integral = 0.0;
    let g = |r: &DiagnosticsRecord| {
        2.0 * nu * r.grad_l2 * r.grad_l2 + 2.0 * gamma * r.l2 * r.l2 - 2.0 * r.forcing_work
    };
    for w in records.windows(2) {
        if w[1].step != w[0].step + 1 {
            return Err(Error::MissingSamples(format!(
                "records jump from step {} to {}; the balance needs every step",
                w[0].step, w[1].step
            )));
        }
        integral += 0.5 * (w[1].t - w[0].t) * (g(&w[0]) + g(&w[1]));
    }
    let last = records.last().expect("non-empty");
    Ok((last.l2 * last.l2 + integral - first.l2 * first.l2).abs())
}

/// Largest excess of `sup|u|` over its maximum-principle envelope between
/// consecutive records: `sup(t₁) − e^{−γΔ}sup(t₀) − w(Δ)‖f‖∞` with
/// `w = (1 − e^{−γΔ})/γ` (`= Δ` when `γ = 0`).
pub fn max_principle_monitor(records: &[DiagnosticsRecord], f_linf: f64, gamma: f64) -> f64 {
    records
        .windows(2)
        .map(|w| {
            let dt = w[1].t - w[0].t;
            let (decay, weight) = if gamma > 0.0 {
                let e = (-gamma * dt).exp();
                (e, -(-gamma * dt).exp_m1() / gamma)
            } else {
                (1.0, dt)
            };
            w[1].sup - decay * w[0].sup - weight * f_linf
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Residual of the mean-drift identity `d/dt ∫u = ∫(∇·u)u + ∫f` across one step.
/// The identity has no damping term, so it applies to undamped (`γ = 0`) steps.
pub fn mean_drift_residual<const D: usize>(
    before: &VectorField<D>,
    after: &VectorField<D>,
    dt: f64,
    f: Option<&ForceField<D>>,
) -> f64 {
    let vol = before.grid().volume();
    let m0 = before.mean();
    let m1 = after.mean();
    let d = ops::div(before);
    let mut worst = 0.0f64;
    for c in 0..D {
        let drift = (m1[c] - m0[c]) * vol / dt;
        let source: f64 = d
            .values()
            .iter()
            .zip(before.component(c).values())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * before.grid().cell_volume();
        let forced = f.map_or(0.0, |f| f.field().component(c).integral());
        worst = worst.max((drift - source - forced).abs());
    }
    worst
}

/// `u·∇D − |ω|² + |∇u|² − ½Δ|u|²` at every grid point.
fn divergence_source(u: &VectorField<3>) -> Vec<f64> {
    let grid = u.grid();
    let s = fft::forward_vector(u);
    let partial: Vec<Vec<RealField<3>>> = (0..3)
        .map(|i| (0..3).map(|j| fft::inverse(&ops::deriv(&s[i], j))).collect())
        .collect();
    let div = {
        let mut acc = SpectralField::zeros(grid);
        for (a, c) in s.iter().enumerate() {
            for (x, y) in acc.coeffs_mut().iter_mut().zip(ops::deriv(c, a).coeffs()) {
                *x += y;
            }
        }
        acc
    };
    let grad_div: Vec<RealField<3>> = (0..3).map(|a| fft::inverse(&ops::deriv(&div, a))).collect();
    let speed2 = RealField::from_values(
        grid,
        (0..grid.len()).map(|i| u.at(i).iter().map(|x| x * x).sum()).collect(),
    )
    .expect("sized to grid");
    let lap_speed2 = ops::laplacian_scalar(&speed2);
    (0..grid.len())
        .map(|x| {
            let p = |i: usize, j: usize| partial[i][j].values()[x];
            let w = [p(2, 1) - p(1, 2), p(0, 2) - p(2, 0), p(1, 0) - p(0, 1)];
            let w2: f64 = w.iter().map(|v| v * v).sum();
            let g2: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| p(i, j) * p(i, j)).sum();
            let adv: f64 = (0..3).map(|a| u.component(a).values()[x] * grad_div[a].values()[x]).sum();
            adv - w2 + g2 - 0.5 * lap_speed2.values()[x]
        })
        .collect()
}

/// Max-norm residual of `∂_tD + u·∇D − |ω|² + |∇u|² − ½Δ|u|²` at the middle
/// state, with `∂_tD` from a centered difference of spacing `h`.
pub fn divergence_residual_centered(
    before: &VectorField<3>,
    mid: &VectorField<3>,
    after: &VectorField<3>,
    h: f64,
) -> f64 {
    let source = divergence_source(mid);
    let d0 = ops::div(before);
    let d1 = ops::div(after);
    (0..mid.grid().len())
        .map(|i| ((d1.values()[i] - d0.values()[i]) / (2.0 * h) + source[i]).abs())
        .fold(0.0, f64::max)
}

/// Residual with `∂_tD` supplied directly (for instance from the divergence of the RHS).
pub fn divergence_residual_with_rate(u: &VectorField<3>, dt_div: &RealField<3>) -> f64 {
    let source = divergence_source(u);
    dt_div
        .values()
        .iter()
        .zip(&source)
        .map(|(a, b)| (a + b).abs())
        .fold(0.0, f64::max)
}

/// Residuals at snapshot spacings `h` and `2h` and the observed order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivergenceReport {
    pub h: f64,
    pub residual_h: f64,
    pub residual_2h: Option<f64>,
    pub order: Option<f64>,
}

/// Divergence-dynamics residual at the middle of equally spaced snapshots.
pub fn divergence_dynamics_residual(states: &[VectorField<3>], h: f64) -> Result<DivergenceReport> {
    if states.len() < 3 {
        return Err(Error::MissingSamples(format!(
            "divergence dynamics needs at least 3 snapshots, got {}",
            states.len()
        )));
    }
    let m = states.len() / 2;
    let residual_h = divergence_residual_centered(&states[m - 1], &states[m], &states[m + 1], h);
    let residual_2h = (m >= 2 && m + 2 < states.len())
        .then(|| divergence_residual_centered(&states[m - 2], &states[m], &states[m + 2], 2.0 * h));
    Ok(DivergenceReport {
        h,
        residual_h,
        residual_2h,
        order: residual_2h.map(|r2| (r2 / residual_h).log2()),
    })
}

/// Max-norm gap between `iψLψ` (`ψ = u₁ + iu₂`, `Lψ = ∂_y Re ψ + i∂_x Im ψ`)
/// and the vector right-hand side `−ω u^⊥` read as a complex field.
pub fn complex_form_residual(u: &VectorField<2>) -> f64 {
    let grid = u.grid();
    let dy_u1 = ops::deriv_real(u.component(0), 1);
    let dx_u2 = ops::deriv_real(u.component(1), 0);
    let w = ops::curl2(u);
    (0..grid.len())
        .map(|i| {
            let psi = Complex64::new(u.component(0).values()[i], u.component(1).values()[i]);
            let l = Complex64::new(dy_u1.values()[i], dx_u2.values()[i]);
            let candidate = Complex64::new(0.0, 1.0) * psi * l;
            let wi = w.values()[i];
            let rhs = Complex64::new(wi * psi.im, -wi * psi.re);
            (candidate - rhs).norm()
        })
        .fold(0.0, f64::max)
}

/// Largest `|Σ_k Ê_k² − ‖u‖²/(2π)^D|` relative to `‖u‖²`, for Parseval checks.
pub fn parseval_defect<const D: usize>(u: &VectorField<D>) -> f64 {
    let spec = fft::forward_vector(u);
    let total: f64 = spec.iter().map(|c| c.sum_sq()).sum::<f64>() * u.grid().volume();
    let e = u.energy();
    if e == 0.0 {
        total
    } else {
        (total - e).abs() / e
    }
}
