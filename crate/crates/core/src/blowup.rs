//! Exact pre-shock solutions of the x-only blow-up families, by the method
//! of characteristics.
//!
//! For `u_t + u u_x = 0` the solution is `u(x,t) = u₀(ξ)` where the foot
//! `ξ` solves `ξ + t·u₀(ξ) = x`. Before the shock time
//! `t* = −1/min u₀′` the map `ξ ↦ ξ + t·u₀(ξ)` is strictly increasing, so the
//! foot is bracketed by `[x − t·max u₀, x − t·min u₀]` and found by bisection
//! followed by Newton polishing.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use crate::driver::Snapshot;
use crate::error::{Error, Result};
use crate::field::VectorField;

/// Uniform samples used for extrema and the shock-time search.
const SAMPLES: usize = 10_000;
/// Bisection stops once the bracket is this narrow.
const BRACKET_WIDTH: f64 = 1e-13;
const NEWTON_STEPS: usize = 3;
/// Accepted mismatch between the supplied derivative and central differences.
const DERIVATIVE_TOL: f64 = 1e-6;

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A smooth 2π-periodic profile together with its derivative.
#[derive(Clone)]
pub struct Profile1D {
    f: Scalar,
    df: Scalar,
    min: f64,
    max: f64,
    min_slope: f64,
}

impl std::fmt::Debug for Profile1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Profile1D")
            .field("min", &self.min)
            .field("max", &self.max)
            .field("min_slope", &self.min_slope)
            .finish()
    }
}

fn golden_min(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    g(0.5 * (a + b)).min(gc).min(gd)
}

impl Profile1D {
    /// Validates periodicity and the derivative against central differences.
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let f: Scalar = Arc::new(f);
        let df: Scalar = Arc::new(df);
        let xs: Vec<f64> = (0..SAMPLES).map(|j| -PI + TAU * j as f64 / SAMPLES as f64).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let slopes: Vec<f64> = xs.iter().map(|&x| df(x)).collect();
        if vals.iter().chain(&slopes).any(|v| !v.is_finite()) {
            return Err(Error::Domain("profile is not finite on the period".into()));
        }
        let scale = 1.0 + vals.iter().chain(&slopes).fold(0.0f64, |m, v| m.max(v.abs()));
        for &x in xs.iter().step_by(SAMPLES / 64) {
            if (f(x + TAU) - f(x)).abs() > 1e-9 * scale {
                return Err(Error::Domain(format!("profile is not 2π-periodic near x={x}")));
            }
            let h = 1e-4;
            let fd = (f(x + h) - f(x - h)) / (2.0 * h);
            if (fd - df(x)).abs() > DERIVATIVE_TOL * scale {
                return Err(Error::Domain(format!(
                    "derivative disagrees with finite differences near x={x}"
                )));
            }
        }
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (jmin, _) = slopes
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bj, bv), (j, &v)| if v < bv { (j, v) } else { (bj, bv) });
        let h = TAU / SAMPLES as f64;
        let dfc = df.clone();
        let min_slope = golden_min(&move |x| dfc(x), xs[jmin] - h, xs[jmin] + h).min(slopes[jmin]);
        Ok(Profile1D {
            f,
            df,
            min,
            max,
            min_slope,
        })
    }

    pub fn sin() -> Self {
        Self::new(f64::sin, f64::cos).expect("valid profile")
    }

    pub fn cos() -> Self {
        Self::new(f64::cos, |x| -x.sin()).expect("valid profile")
    }

    /// `a·sin(x)`.
    pub fn scaled_sin(a: f64) -> Self {
        Self::new(move |x| a * x.sin(), move |x| a * x.cos()).expect("valid profile")
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, |_| 0.0).expect("valid profile")
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn slope(&self, x: f64) -> f64 {
        (self.df)(x)
    }

    /// Smallest derivative over the period (sampled, then refined).
    pub fn min_slope(&self) -> f64 {
        self.min_slope
    }
}

/// `t* = −1/min u₀′`, or `+∞` when the sampled derivative never goes negative.
pub fn shock_time(u0: &Profile1D) -> f64 {
    if u0.min_slope >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / u0.min_slope
    }
}

/// Foot `ξ` of the characteristic through `(x, t)`.
pub fn characteristic_foot(u0: &Profile1D, x: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("negative time t={t}")));
    }
    let t_star = shock_time(u0);
    if t >= t_star {
        return Err(Error::PostShock { t, t_star });
    }
    if t == 0.0 {
        return Ok(x);
    }
    let g = |xi: f64| xi + t * u0.value(xi) - x;
    let pad = 1e-3 * (u0.max - u0.min + 1.0) * t;
    let mut lo = x - t * u0.max - pad;
    let mut hi = x - t * u0.min + pad;
    while g(lo) > 0.0 {
        lo -= pad;
    }
    while g(hi) < 0.0 {
        hi += pad;
    }
    while hi - lo > BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut xi = 0.5 * (lo + hi);
    for _ in 0..NEWTON_STEPS {
        let d = 1.0 + t * u0.slope(xi);
        let step = g(xi) / d;
        if !step.is_finite() {
            break;
        }
        xi -= step;
    }
    Ok(xi)
}

/// Solution of `u_t + u u_x = 0` with data `u0` at `(x, t)`, before the shock.
pub fn burgers_characteristics(u0: &Profile1D, x: f64, t: f64) -> Result<f64> {
    Ok(u0.value(characteristic_foot(u0, x, t)?))
}

/// The planar family with data `(cos x, sin x)`: returns `(cos ξ, sin ξ)`
/// where `x = ξ + t·cos ξ`.
pub fn family2d(x: f64, t: f64) -> Result<(f64, f64)> {
    thread_local! {
        static COS: Profile1D = Profile1D::cos();
    }
    let xi = COS.with(|p| characteristic_foot(p, x, t))?;
    Ok((xi.cos(), xi.sin()))
}

/// Spatial family `(v, v, w)` with `v` solving inviscid Burgers from `v0`
/// and `w = sign·√(2(v₀² − v²) + w₀²)` evaluated at `x`.
#[derive(Clone, Debug)]
pub struct BlowupFamily3D {
    pub v0: Profile1D,
    pub w0: Profile1D,
    pub sign: f64,
}

impl BlowupFamily3D {
    pub fn new(v0: Profile1D, w0: Profile1D, sign: f64) -> Result<Self> {
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::Domain(format!("sign must be ±1, got {sign}")));
        }
        Ok(BlowupFamily3D { v0, w0, sign })
    }

    /// `v₀ = a·sin x` with `w₀ = √(c − 2v₀²)`, so `2v₀² + w₀² = c` everywhere.
    pub fn conserved_sine(a: f64, c: f64) -> Result<Self> {
        if c <= 2.0 * a * a {
            return Err(Error::Domain(format!(
                "c={c} must exceed 2a²={} to keep w₀ away from zero",
                2.0 * a * a
            )));
        }
        let w0 = Profile1D::new(
            move |x| (c - 2.0 * a * a * x.sin().powi(2)).sqrt(),
            move |x| -2.0 * a * a * x.sin() * x.cos() / (c - 2.0 * a * a * x.sin().powi(2)).sqrt(),
        )?;
        Self::new(Profile1D::scaled_sin(a), w0, 1.0)
    }

    /// `2v₀² + w₀²` at `x`.
    pub fn invariant(&self, x: f64) -> f64 {
        let v = self.v0.value(x);
        let w = self.w0.value(x);
        2.0 * v * v + w * w
    }

    /// Largest spatial variation of `2v₀² + w₀²` over uniform samples.
    pub fn invariant_spread(&self) -> f64 {
        let vals: Vec<f64> = (0..SAMPLES / 10)
            .map(|j| self.invariant(-PI + TAU * j as f64 / (SAMPLES / 10) as f64))
            .collect();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }

    /// Whether the family solves the equations exactly (invariant constant to 1e-12).
    pub fn is_exact_solution(&self) -> bool {
        self.invariant_spread() <= 1e-12 * self.invariant(0.0).abs().max(1.0)
    }

    pub fn min_inf_w0(&self) -> f64 {
        (0..SAMPLES)
            .map(|j| self.w0.value(-PI + TAU * j as f64 / SAMPLES as f64).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `(v, v, w)` of `fam` at `(x, t)`.
pub fn family3d(x: f64, t: f64, fam: &BlowupFamily3D) -> Result<(f64, f64, f64)> {
    let v = burgers_characteristics(&fam.v0, x, t)?;
    let v0 = fam.v0.value(x);
    let w0 = fam.w0.value(x);
    let radicand = 2.0 * (v0 * v0 - v * v) + w0 * w0;
    if radicand < 0.0 {
        return Err(Error::Domain(format!(
            "negative radicand {radicand:e} at x={x}, t={t}"
        )));
    }
    Ok((v, v, fam.sign * radicand.sqrt()))
}

/// Max-norm gap between a 2D snapshot and an x-only oracle `(x, t) ↦ (u₁, u₂)`.
pub fn compare_solver_vs_oracle(
    snap: &Snapshot<2>,
    t: f64,
    oracle: impl Fn(f64, f64) -> Result<(f64, f64)>,
) -> Result<f64> {
    if (snap.t - t).abs() > 1e-12 * t.abs().max(1.0) {
        return Err(Error::Domain(format!(
            "snapshot time {} does not match query time {t}",
            snap.t
        )));
    }
    compare_field_vs_oracle(&snap.u, t, oracle)
}

/// As [`compare_solver_vs_oracle`] for a bare field at time `t`.
pub fn compare_field_vs_oracle(
    u: &VectorField<2>,
    t: f64,
    oracle: impl Fn(f64, f64) -> Result<(f64, f64)>,
) -> Result<f64> {
    let grid = u.grid();
    let n = grid.n();
    let cols: Vec<(f64, f64)> = (0..n)
        .map(|j| oracle(grid.coordinate(j), t))
        .collect::<Result<_>>()?;
    let (u1, u2) = (u.component(0).values(), u.component(1).values());
    let mut worst = 0.0f64;
    for i in 0..grid.len() {
        let (a, b) = cols[i % n];
        worst = worst.max((u1[i] - a).abs()).max((u2[i] - b).abs());
    }
    Ok(worst)
}

/// Largest deviation of any row from the first row (zero for x-only fields).
pub fn row_spread(u: &VectorField<2>) -> f64 {
    let n = u.grid().n();
    let mut worst = 0.0f64;
    for c in u.components() {
        let v = c.values();
        for (i, &x) in v.iter().enumerate() {
            worst = worst.max((x - v[i % n]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shock_times_of_trig_profiles() {
        assert!((shock_time(&Profile1D::sin()) - 1.0).abs() < 1e-10);
        assert!((shock_time(&Profile1D::cos()) - 1.0).abs() < 1e-10);
        assert!((shock_time(&Profile1D::scaled_sin(2.5)) - 0.4).abs() < 1e-10);
        assert_eq!(shock_time(&Profile1D::constant(1.0)), f64::INFINITY);
    }

    #[test]
    fn characteristics_basics() {
        let s = Profile1D::sin();
        assert_eq!(burgers_characteristics(&s, 0.7, 0.0).unwrap(), 0.7f64.sin());
        assert!(burgers_characteristics(&s, 0.0, 0.9).unwrap().abs() < 1e-15);
        assert!(matches!(
            burgers_characteristics(&s, 0.0, 1.0),
            Err(Error::PostShock { .. })
        ));
    }

    #[test]
    fn characteristic_residual_is_tiny() {
        let s = Profile1D::cos();
        for &t in &[0.1, 0.5, 0.9, 0.99] {
            for j in 0..50 {
                let x = -PI + TAU * j as f64 / 50.0;
                let u = burgers_characteristics(&s, x, t).unwrap();
                assert!((u - (x - u * t).cos()).abs() <= 1e-12, "x={x} t={t}");
            }
        }
    }

    #[test]
    fn family2d_is_on_the_unit_circle() {
        for &t in &[0.0, 0.3, 0.8] {
            for j in 0..20 {
                let x = -PI + TAU * j as f64 / 20.0;
                let (u, v) = family2d(x, t).unwrap();
                assert!((u * u + v * v - 1.0).abs() < 1e-15);
                let b = burgers_characteristics(&Profile1D::cos(), x, t).unwrap();
                assert!((u - b).abs() <= 1e-12);
                if t == 0.0 {
                    assert_eq!((u, v), (x.cos(), x.sin()));
                }
            }
        }
    }

    #[test]
    fn steady_family() {
        let fam = BlowupFamily3D::new(Profile1D::constant(0.0), Profile1D::constant(1.5), 1.0).unwrap();
        for &t in &[0.0, 1.0, 10.0] {
            assert_eq!(family3d(0.4, t, &fam).unwrap(), (0.0, 0.0, 1.5));
        }
    }

    #[test]
    fn conserved_family_invariant() {
        let fam = BlowupFamily3D::conserved_sine(0.5, 2.0).unwrap();
        assert!(fam.is_exact_solution());
        let (v, _, w) = family3d(0.3, 0.0, &fam).unwrap();
        assert_eq!(v, 0.5 * 0.3f64.sin());
        assert!((w - fam.w0.value(0.3)).abs() < 1e-15);
    }

    #[test]
    fn bad_derivative_is_rejected() {
        assert!(Profile1D::new(f64::sin, f64::sin).is_err());
        assert!(Profile1D::new(|x| x, |_| 1.0).is_err());
    }
}
