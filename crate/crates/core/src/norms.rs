//! Lebesgue and Sobolev norms of vector fields.
//!
//! `H⁻¹` carries the inhomogeneous weight `(1+|k|²)⁻¹`.

use crate::error::{Error, Result};
use crate::fft;
use crate::field::VectorField;

/// Relative size of the mean coefficient tolerated as round-off.
const MEAN_FREE_TOL: f64 = 1e-12;

/// `‖u‖_{L²}` by rectangle-rule quadrature.
pub fn norm_l2<const D: usize>(u: &VectorField<D>) -> f64 {
    u.energy().sqrt()
}

/// `sup_x |u(x)|` over the grid.
pub fn norm_linf<const D: usize>(u: &VectorField<D>) -> f64 {
    u.max_speed()
}

/// `‖∇u‖_{L²}`, from the spectral derivative symbol.
pub fn norm_grad_l2<const D: usize>(u: &VectorField<D>) -> f64 {
    let grid = u.grid();
    let table = crate::ops::derivative_table(grid);
    let s = fft::forward_vector(u);
    let sum: f64 = s
        .iter()
        .map(|c| {
            c.coeffs()
                .iter()
                .zip(&table)
                .map(|(z, k)| z.norm_sqr() * k.iter().map(|x| x * x).sum::<f64>())
                .sum::<f64>()
        })
        .sum();
    (grid.volume() * sum).sqrt()
}

/// `( (2π)^D Σ_k (1+|k|²)⁻¹ |û_k|² )^{1/2}` for mean-free `u`.
pub fn norm_hminus1<const D: usize>(u: &VectorField<D>) -> Result<f64> {
    let grid = u.grid();
    let s = fft::forward_vector(u);
    let mean = s.iter().map(|c| c.coeffs()[0].norm_sqr()).sum::<f64>().sqrt();
    let total = s.iter().map(|c| c.sum_sq()).sum::<f64>().sqrt();
    if mean > MEAN_FREE_TOL * total.max(f64::MIN_POSITIVE) {
        return Err(Error::NotMeanFree(mean));
    }
    let sum: f64 = s
        .iter()
        .map(|c| {
            c.coeffs()
                .iter()
                .enumerate()
                .map(|(i, z)| {
                    let k2: i64 = grid.mode(i).iter().map(|k| k * k).sum();
                    z.norm_sqr() / (1.0 + k2 as f64)
                })
                .sum::<f64>()
        })
        .sum();
    Ok((grid.volume() * sum).sqrt())
}
