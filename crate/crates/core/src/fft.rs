//! Forward and inverse transforms between grid samples and Fourier-series
//! coefficients.
//!
//! The forward transform divides by `n` per axis and removes the phase
//! introduced by the box origin at `-π`, so the returned coefficients are
//! exactly the `û_k` of `u(x) = Σ_k û_k e^{ik·x}`. Multi-dimensional
//! transforms are built from batched 1D `rustfft` plans applied axis by axis.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::field::{RealField, SpectralField, VectorField};
use crate::grid::Grid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Lines gathered per batch when transforming a strided axis.
const BATCH: usize = 8;

/// Unnormalized DFT along every axis, in place.
///
/// Axis 0 is contiguous. For a strided axis, batches of neighbouring lines
/// are gathered into a contiguous buffer, transformed and scattered back.
fn transform_in_place<const D: usize>(grid: Grid<D>, buf: &mut [Complex64], inverse: bool) {
    let n = grid.n();
    let p = plans(n);
    let fft = if inverse { &p.inverse } else { &p.forward };
    let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
    fft.process_with_scratch(buf, &mut scratch);
    let mut tmp = vec![ZERO; BATCH * n];
    for axis in 1..D {
        let stride = n.pow(axis as u32);
        for chunk in buf.chunks_mut(stride * n) {
            for i0 in (0..stride).step_by(BATCH) {
                let width = BATCH.min(stride - i0);
                let lines = &mut tmp[..width * n];
                for j in 0..n {
                    let row = &chunk[j * stride + i0..j * stride + i0 + width];
                    for (c, &z) in row.iter().enumerate() {
                        lines[c * n + j] = z;
                    }
                }
                fft.process_with_scratch(lines, &mut scratch);
                for j in 0..n {
                    let row = &mut chunk[j * stride + i0..j * stride + i0 + width];
                    for (c, z) in row.iter_mut().enumerate() {
                        *z = lines[c * n + j];
                    }
                }
            }
        }
    }
}

/// Multiplies entry `j` by `scale·(-1)^{Σ j_i}`.
fn apply_checkerboard<const D: usize>(grid: Grid<D>, buf: &mut [Complex64], scale: f64) {
    let n = grid.n();
    for (r, row) in buf.chunks_mut(n).enumerate() {
        let mut digits = 0;
        let mut q = r;
        for _ in 1..D {
            digits += q % n;
            q /= n;
        }
        let base = if digits % 2 == 0 { scale } else { -scale };
        for (j, c) in row.iter_mut().enumerate() {
            *c *= if j % 2 == 0 { base } else { -base };
        }
    }
}

/// Flat index of `-k` for every lattice index.
pub(crate) fn negation_table<const D: usize>(grid: Grid<D>) -> Vec<usize> {
    (0..grid.len()).map(|i| grid.negated_index(i)).collect()
}

pub(crate) fn forward_buffer<const D: usize>(grid: Grid<D>, buf: &mut [Complex64]) {
    transform_in_place(grid, buf, false);
    apply_checkerboard(grid, buf, 1.0 / grid.len() as f64);
}

pub(crate) fn inverse_buffer<const D: usize>(grid: Grid<D>, buf: &mut [Complex64]) {
    apply_checkerboard(grid, buf, 1.0);
    transform_in_place(grid, buf, true);
}

/// Fourier-series coefficients of a real field.
pub fn forward<const D: usize>(f: &RealField<D>) -> SpectralField<D> {
    let grid = f.grid();
    let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward_buffer(grid, &mut buf);
    SpectralField::from_coeffs(grid, buf).expect("buffer sized to grid")
}

/// Coefficients of two real fields from a single complex transform of `a + ib`.
pub fn forward_pair<const D: usize>(
    a: &RealField<D>,
    b: &RealField<D>,
) -> Result<(SpectralField<D>, SpectralField<D>)> {
    let grid = a.grid();
    if b.grid() != grid {
        return Err(crate::Error::GridMismatch {
            left: grid.n(),
            right: b.grid().n(),
        });
    }
    let mut buf: Vec<Complex64> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| Complex64::new(x, y))
        .collect();
    forward_buffer(grid, &mut buf);
    let neg = negation_table(grid);
    let mut fa = Vec::with_capacity(buf.len());
    let mut fb = Vec::with_capacity(buf.len());
    for (i, &z) in buf.iter().enumerate() {
        let zc = buf[neg[i]].conj();
        fa.push(0.5 * (z + zc));
        let d = z - zc;
        fb.push(Complex64::new(0.5 * d.im, -0.5 * d.re));
    }
    Ok((
        SpectralField::from_coeffs(grid, fa)?,
        SpectralField::from_coeffs(grid, fb)?,
    ))
}

/// Real part of the inverse transform.
pub fn inverse<const D: usize>(f: &SpectralField<D>) -> RealField<D> {
    inverse_with_residue(f).0
}

/// Inverse transform returning the real part and the largest `|Im|`
/// (zero up to round-off for Hermitian-symmetric input).
pub fn inverse_with_residue<const D: usize>(f: &SpectralField<D>) -> (RealField<D>, f64) {
    let grid = f.grid();
    let mut buf = f.coeffs().to_vec();
    inverse_buffer(grid, &mut buf);
    let residue = buf.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    let values = buf.iter().map(|c| c.re).collect();
    (
        RealField::from_values(grid, values).expect("buffer sized to grid"),
        residue,
    )
}

/// Inverse transforms of two Hermitian spectra through one transform of `A + iB`.
pub fn inverse_pair<const D: usize>(
    a: &SpectralField<D>,
    b: &SpectralField<D>,
) -> Result<(RealField<D>, RealField<D>)> {
    let grid = a.grid();
    if b.grid() != grid {
        return Err(crate::Error::GridMismatch {
            left: grid.n(),
            right: b.grid().n(),
        });
    }
    let mut buf: Vec<Complex64> = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(&x, &y)| x + Complex64::new(-y.im, y.re))
        .collect();
    inverse_buffer(grid, &mut buf);
    let ra = buf.iter().map(|c| c.re).collect();
    let rb = buf.iter().map(|c| c.im).collect();
    Ok((
        RealField::from_values(grid, ra)?,
        RealField::from_values(grid, rb)?,
    ))
}

/// Coefficients of every component of a vector field.
pub fn forward_vector<const D: usize>(v: &VectorField<D>) -> [SpectralField<D>; D] {
    let comps = v.components();
    let mut out: Vec<SpectralField<D>> = Vec::with_capacity(D);
    let mut c = 0;
    while c + 1 < D {
        let (a, b) = forward_pair(&comps[c], &comps[c + 1]).expect("components share a grid");
        out.push(a);
        out.push(b);
        c += 2;
    }
    if c < D {
        out.push(forward(&comps[c]));
    }
    out.try_into().unwrap_or_else(|_| unreachable!())
}

/// Inverse transform of a spectral vector.
pub fn inverse_vector<const D: usize>(spec: &[SpectralField<D>; D]) -> VectorField<D> {
    let mut out: Vec<RealField<D>> = Vec::with_capacity(D);
    let mut c = 0;
    while c + 1 < D {
        let (a, b) = inverse_pair(&spec[c], &spec[c + 1]).expect("components share a grid");
        out.push(a);
        out.push(b);
        c += 2;
    }
    if c < D {
        out.push(inverse(&spec[c]));
    }
    let comps: [RealField<D>; D] = out.try_into().unwrap_or_else(|_| unreachable!());
    VectorField::from_components(comps).expect("components share a grid")
}
