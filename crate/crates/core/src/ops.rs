//! Spectral differential operators, dealiasing, projection and the Lamb
//! vector.
//!
//! First derivatives multiply `û_k` by `i·k_axis` and zero the Nyquist entry
//! `k_axis = -n/2`. The Laplacian uses the same per-axis wavenumbers, so
//! `(Δu, u) = -‖∇u‖²` holds exactly on the grid.

use rustfft::num_complex::Complex64;

use crate::field::{RealField, SpectralField, VectorField};
use crate::fft;
use crate::grid::Grid;

/// Per-axis derivative wavenumber of every flat index (Nyquist mapped to 0).
pub(crate) fn derivative_table<const D: usize>(grid: Grid<D>) -> Vec<[f64; D]> {
    let kd = grid.derivative_wavenumbers();
    (0..grid.len())
        .map(|i| grid.multi_index(i).map(|j| kd[j]))
        .collect()
}

/// Laplacian symbol `-Σ k_i²` with Nyquist entries zeroed per axis.
pub(crate) fn laplacian_symbol<const D: usize>(grid: Grid<D>) -> Vec<f64> {
    derivative_table(grid)
        .into_iter()
        .map(|k| -k.iter().map(|x| x * x).sum::<f64>())
        .collect()
}

/// `true` where every `|k_i| ≤ floor(n/3)`.
pub fn dealias_mask<const D: usize>(grid: Grid<D>) -> Vec<bool> {
    let kc = grid.dealias_cutoff();
    (0..grid.len())
        .map(|i| grid.mode(i).iter().all(|k| k.abs() <= kc))
        .collect()
}

/// Spectral first derivative along `axis`.
pub fn deriv<const D: usize>(f: &SpectralField<D>, axis: usize) -> SpectralField<D> {
    assert!(axis < D, "axis {axis} out of range for dimension {D}");
    let grid = f.grid();
    let kd = grid.derivative_wavenumbers();
    let mut out = f.clone();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        let k = kd[grid.multi_index(i)[axis]];
        *c = Complex64::new(-k * c.im, k * c.re);
    }
    out
}

/// Physical-space derivative of a real field along `axis`.
pub fn deriv_real<const D: usize>(f: &RealField<D>, axis: usize) -> RealField<D> {
    fft::inverse(&deriv(&fft::forward(f), axis))
}

/// Gradient of a scalar field.
pub fn gradient<const D: usize>(f: &RealField<D>) -> VectorField<D> {
    let s = fft::forward(f);
    let spec: [SpectralField<D>; D] = std::array::from_fn(|a| deriv(&s, a));
    fft::inverse_vector(&spec)
}

/// Scalar vorticity `ω = ∂ₓu₂ − ∂_y u₁`.
pub fn curl2(v: &VectorField<2>) -> RealField<2> {
    let [s1, s2] = fft::forward_vector(v);
    curl2_spectral(&s1, &s2)
}

pub(crate) fn curl2_spectral(s1: &SpectralField<2>, s2: &SpectralField<2>) -> RealField<2> {
    let mut w = deriv(s2, 0);
    let d1 = deriv(s1, 1);
    for (a, b) in w.coeffs_mut().iter_mut().zip(d1.coeffs()) {
        *a -= b;
    }
    fft::inverse(&w)
}

/// Spectral curl of a 3D field.
pub fn curl3(v: &VectorField<3>) -> VectorField<3> {
    let s = fft::forward_vector(v);
    fft::inverse_vector(&curl3_spectral(&s))
}

pub(crate) fn curl3_spectral(s: &[SpectralField<3>; 3]) -> [SpectralField<3>; 3] {
    let diff = |a: SpectralField<3>, b: SpectralField<3>| {
        let mut a = a;
        for (x, y) in a.coeffs_mut().iter_mut().zip(b.coeffs()) {
            *x -= y;
        }
        a
    };
    [
        diff(deriv(&s[2], 1), deriv(&s[1], 2)),
        diff(deriv(&s[0], 2), deriv(&s[2], 0)),
        diff(deriv(&s[1], 0), deriv(&s[0], 1)),
    ]
}

/// Spectral divergence.
pub fn div<const D: usize>(v: &VectorField<D>) -> RealField<D> {
    let s = fft::forward_vector(v);
    let mut acc = SpectralField::zeros(v.grid());
    for (a, comp) in s.iter().enumerate() {
        let d = deriv(comp, a);
        for (x, y) in acc.coeffs_mut().iter_mut().zip(d.coeffs()) {
            *x += y;
        }
    }
    fft::inverse(&acc)
}

/// Applies the Laplacian symbol to a spectrum.
pub fn laplacian_spectral<const D: usize>(f: &SpectralField<D>) -> SpectralField<D> {
    let sym = laplacian_symbol(f.grid());
    let mut out = f.clone();
    for (c, s) in out.coeffs_mut().iter_mut().zip(sym) {
        *c *= s;
    }
    out
}

/// Scalar Laplacian.
pub fn laplacian_scalar<const D: usize>(f: &RealField<D>) -> RealField<D> {
    fft::inverse(&laplacian_spectral(&fft::forward(f)))
}

/// Componentwise vector Laplacian.
pub fn laplacian<const D: usize>(v: &VectorField<D>) -> VectorField<D> {
    let s = fft::forward_vector(v);
    let spec: [SpectralField<D>; D] = std::array::from_fn(|c| laplacian_spectral(&s[c]));
    fft::inverse_vector(&spec)
}

/// Zeros every coefficient with some `|k_i| > floor(n/3)`.
pub fn dealias_two_thirds<const D: usize>(f: &SpectralField<D>) -> SpectralField<D> {
    let mask = dealias_mask(f.grid());
    let mut out = f.clone();
    apply_mask(&mut out, &mask);
    out
}

pub(crate) fn apply_mask<const D: usize>(f: &mut SpectralField<D>, mask: &[bool]) {
    for (c, &keep) in f.coeffs_mut().iter_mut().zip(mask) {
        if !keep {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Radial Galerkin projection `P_N`: zeros coefficients with `|k| > N`.
pub fn project_pn<const D: usize>(f: &SpectralField<D>, n_max: f64) -> SpectralField<D> {
    let grid = f.grid();
    let n2 = n_max * n_max;
    let mut out = f.clone();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        let k2: i64 = grid.mode(i).iter().map(|k| k * k).sum();
        if k2 as f64 > n2 {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    out
}

/// Low-pass of a vector field through the dealias mask.
pub fn dealias_field<const D: usize>(v: &VectorField<D>) -> VectorField<D> {
    let mask = dealias_mask(v.grid());
    let mut s = fft::forward_vector(v);
    for c in s.iter_mut() {
        apply_mask(c, &mask);
    }
    fft::inverse_vector(&s)
}

/// `ω u^⊥ = (−ω u₂, ω u₁)`.
///
/// With `dealias` the velocity is truncated before forming ω and the
/// product, and the product is truncated again.
pub fn lamb2(v: &VectorField<2>, dealias: bool) -> VectorField<2> {
    let grid = v.grid();
    let mask = dealias_mask(grid);
    let [mut s1, mut s2] = fft::forward_vector(v);
    if dealias {
        apply_mask(&mut s1, &mask);
        apply_mask(&mut s2, &mask);
    }
    let w = curl2_spectral(&s1, &s2);
    let u = if dealias {
        fft::inverse_vector(&[s1, s2])
    } else {
        v.clone()
    };
    let (u1, u2) = (u.component(0).values(), u.component(1).values());
    let wv = w.values();
    let a: Vec<f64> = (0..grid.len()).map(|i| -wv[i] * u2[i]).collect();
    let b: Vec<f64> = (0..grid.len()).map(|i| wv[i] * u1[i]).collect();
    let out = VectorField::from_components([
        RealField::from_values(grid, a).expect("sized to grid"),
        RealField::from_values(grid, b).expect("sized to grid"),
    ])
    .expect("shared grid");
    if dealias {
        dealias_field(&out)
    } else {
        out
    }
}

/// Pointwise cross product `a × b`.
pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Lamb vector `(∇×u)×u` from a velocity and a supplied vorticity.
pub fn lamb_pointwise(u: [f64; 3], omega: [f64; 3]) -> [f64; 3] {
    cross(omega, u)
}

/// `(∇×u)×u` with a spectral curl and a pointwise cross product.
pub fn lamb3(v: &VectorField<3>, dealias: bool) -> VectorField<3> {
    let grid = v.grid();
    let mask = dealias_mask(grid);
    let mut s = fft::forward_vector(v);
    if dealias {
        for c in s.iter_mut() {
            apply_mask(c, &mask);
        }
    }
    let w = fft::inverse_vector(&curl3_spectral(&s));
    let u = if dealias {
        fft::inverse_vector(&s)
    } else {
        v.clone()
    };
    let mut out = VectorField::zeros(grid);
    for i in 0..grid.len() {
        let l = cross(w.at(i), u.at(i));
        for (c, lc) in l.into_iter().enumerate() {
            out.component_mut(c).values_mut()[i] = lc;
        }
    }
    if dealias {
        dealias_field(&out)
    } else {
        out
    }
}

/// Lamb vector from the expanded form
/// `u·∇u − ∇(|u|²/2)`, i.e. `Σ_j u_j ∂_j u_i − Σ_j u_j ∂_i u_j`,
/// evaluated with spectral partials and no cross product.
pub fn lamb3_expanded(v: &VectorField<3>) -> VectorField<3> {
    let grid = v.grid();
    let s = fft::forward_vector(v);
    // partials[i][j] = ∂_j u_i
    let partials: Vec<Vec<RealField<3>>> = (0..3)
        .map(|i| (0..3).map(|j| fft::inverse(&deriv(&s[i], j))).collect())
        .collect();
    let mut out = VectorField::zeros(grid);
    for (i, p_i) in partials.iter().enumerate() {
        let vals: Vec<f64> = (0..grid.len())
            .map(|x| {
                (0..3)
                    .map(|j| {
                        let uj = v.component(j).values()[x];
                        uj * (p_i[j].values()[x] - partials[j][i].values()[x])
                    })
                    .sum()
            })
            .collect();
        *out.component_mut(i) = RealField::from_values(grid, vals).expect("sized to grid");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid2, Grid3};

    #[test]
    fn derivative_of_sine_and_constant() {
        let g = Grid2::new(32).unwrap();
        let d = deriv_real(&RealField::from_fn(g, |x| x[0].sin()), 0);
        let e = RealField::from_fn(g, |x| x[0].cos());
        assert!(d.max_diff(&e) < 1e-12);
        let z = deriv_real(&RealField::from_fn(g, |_| 2.0), 1);
        assert!(z.max_abs() < 1e-15);
    }

    #[test]
    fn mixed_mode_derivative() {
        let g = Grid2::new(32).unwrap();
        let f = RealField::from_fn(g, |x| (3.0 * x[0]).sin() * (2.0 * x[1]).cos());
        let e = RealField::from_fn(g, |x| -2.0 * (3.0 * x[0]).sin() * (2.0 * x[1]).sin());
        assert!(deriv_real(&f, 1).max_diff(&e) < 1e-12);
    }

    #[test]
    fn nyquist_derivative_is_zero() {
        let g = Grid2::new(8).unwrap();
        let f = RealField::from_fn(g, |x| (4.0 * x[0]).cos());
        assert!(deriv_real(&f, 0).max_abs() < 1e-15);
    }

    #[test]
    fn curl2_examples() {
        let g = Grid2::new(32).unwrap();
        let v = VectorField::from_fn(g, |x| [-x[1].sin(), x[0].sin()]);
        let e = RealField::from_fn(g, |x| x[0].cos() + x[1].cos());
        assert!(curl2(&v).max_diff(&e) < 1e-12);
        let grad = gradient(&RealField::from_fn(g, |x| x[0].sin() * x[1].sin()));
        assert!(curl2(&grad).max_abs() < 1e-12);
    }

    #[test]
    fn curl3_example() {
        let g = Grid3::new(16).unwrap();
        let v = VectorField::from_fn(g, |x| [x[1].sin(), 0.0, x[0].sin()]);
        let e = VectorField::from_fn(g, |x| [0.0, -x[0].cos(), -x[1].cos()]);
        assert!(curl3(&v).max_diff(&e) < 1e-12);
    }

    #[test]
    fn laplacian_eigenfunction() {
        let g = Grid2::new(16).unwrap();
        let v = VectorField::from_fn(g, |x| [(2.0 * x[0]).cos(), 0.0]);
        let e = VectorField::from_fn(g, |x| [-4.0 * (2.0 * x[0]).cos(), 0.0]);
        assert!(laplacian(&v).max_diff(&e) < 1e-12);
    }

    #[test]
    fn dealias_threshold_n12() {
        let g = Grid2::new(12).unwrap();
        let mut s = SpectralField::zeros(g);
        for c in s.coeffs_mut() {
            *c = Complex64::new(1.0, 0.0);
        }
        let d = dealias_two_thirds(&s);
        for i in 0..g.len() {
            let k = g.mode(i);
            let kept = d.coeffs()[i].re == 1.0;
            assert_eq!(kept, k[0].abs() <= 4 && k[1].abs() <= 4, "k={k:?}");
        }
    }

    #[test]
    fn projection_limits() {
        let g = Grid2::new(16).unwrap();
        let f = RealField::from_fn(g, |x| 1.0 + x[0].cos() + (3.0 * x[1]).sin());
        let s = fft::forward(&f);
        assert_eq!(project_pn(&s, 100.0), s);
        let p0 = project_pn(&s, 0.0);
        assert!((p0.coefficient([0, 0]).re - 1.0).abs() < 1e-15);
        assert!(p0.coeffs().iter().skip(1).all(|c| c.norm() == 0.0));
    }

    #[test]
    fn lamb_of_linear_field_pointwise() {
        for &(x, y) in &[(0.3, -1.2), (2.0, 0.5), (-0.7, 0.0)] {
            let l = lamb_pointwise([y, 0.0, x], [0.0, -1.0, -1.0]);
            assert_eq!(l, [-x, -y, y]);
        }
    }

    #[test]
    fn lamb2_example() {
        let g = Grid2::new(32).unwrap();
        let v = VectorField::from_fn(g, |x| [-x[1].sin(), x[0].sin()]);
        let e = VectorField::from_fn(g, |x| {
            let w = x[0].cos() + x[1].cos();
            [-w * x[0].sin(), -w * x[1].sin()]
        });
        assert!(lamb2(&v, true).max_diff(&e) < 1e-11);
        assert!(lamb2(&v, false).max_diff(&e) < 1e-11);
    }
}
