//! Uniform grids on the 2π-periodic box `[-π, π)^D`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// A uniform grid with `n` points per axis on `[-π, π)^D`.
///
/// Sample points are `x_j = -π + j·dx` with `dx = 2π/n`. Wavenumbers
/// along each axis follow FFT order: index `j < n/2` maps to `k = j`,
/// index `j >= n/2` maps to `k = j - n`, so the lattice is `{-n/2, …, n/2-1}`.
/// Flat indices are row-major with x fastest: `i = i_x + n·(i_y + n·i_z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Grid<const D: usize> {
    n: usize,
}

pub type Grid2 = Grid<2>;
pub type Grid3 = Grid<3>;

impl<const D: usize> Grid<D> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidGrid(format!("n={n} must be at least 8")));
        }
        if n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("n={n} must be even")));
        }
        Ok(Grid { n })
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of grid points, `n^D`.
    pub fn len(&self) -> usize {
        self.n.pow(D as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        TAU / self.n as f64
    }

    /// Rectangle-rule quadrature weight `(2π/n)^D`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(D as i32)
    }

    /// Box volume `(2π)^D`.
    pub fn volume(&self) -> f64 {
        TAU.powi(D as i32)
    }

    /// Coordinate of sample `j` along any axis.
    pub fn coordinate(&self, j: usize) -> f64 {
        -PI + j as f64 * self.dx()
    }

    /// Signed wavenumber of FFT index `j`.
    pub fn wavenumber(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// The Nyquist wavenumber `-n/2`.
    pub fn nyquist(&self) -> i64 {
        -(self.n as i64) / 2
    }

    /// Largest retained wavenumber of the 2/3 rule, `floor(n/3)`.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Per-axis multi-index of a flat index.
    pub fn multi_index(&self, mut index: usize) -> [usize; D] {
        let mut out = [0; D];
        for slot in out.iter_mut() {
            *slot = index % self.n;
            index /= self.n;
        }
        out
    }

    pub fn flat_index(&self, idx: [usize; D]) -> usize {
        idx.iter().rev().fold(0, |acc, &j| acc * self.n + j)
    }

    /// Wavenumber vector of a flat index.
    pub fn mode(&self, index: usize) -> [i64; D] {
        self.multi_index(index).map(|j| self.wavenumber(j))
    }

    /// Flat index of a wavenumber vector, if it lies on the lattice.
    pub fn index_of_mode(&self, k: [i64; D]) -> Option<usize> {
        let half = (self.n / 2) as i64;
        let mut idx = [0usize; D];
        for (slot, &ki) in idx.iter_mut().zip(k.iter()) {
            if ki < -half || ki >= half {
                return None;
            }
            *slot = ki.rem_euclid(self.n as i64) as usize;
        }
        Some(self.flat_index(idx))
    }

    /// Flat index of the mode `-k` (aliased back onto the lattice).
    pub fn negated_index(&self, index: usize) -> usize {
        let idx = self.multi_index(index).map(|j| (self.n - j) % self.n);
        self.flat_index(idx)
    }

    /// Physical coordinates of a flat index.
    pub fn point(&self, index: usize) -> [f64; D] {
        self.multi_index(index).map(|j| self.coordinate(j))
    }

    /// Wavenumbers along one axis in FFT order, as floats.
    pub fn axis_wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.wavenumber(j) as f64).collect()
    }

    /// Wavenumbers used for first derivatives: the Nyquist entry is zero.
    pub fn derivative_wavenumbers(&self) -> Vec<f64> {
        (0..self.n)
            .map(|j| {
                let k = self.wavenumber(j);
                if k == self.nyquist() {
                    0.0
                } else {
                    k as f64
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_small_sizes() {
        assert!(Grid2::new(7).is_err());
        assert!(Grid2::new(9).is_err());
        assert!(Grid2::new(6).is_err());
        assert!(Grid3::new(8).is_ok());
    }

    #[test]
    fn points_and_wavenumbers() {
        let g = Grid2::new(8).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.coordinate(0), -PI);
        assert!((g.coordinate(4)).abs() < 1e-15);
        let ks: Vec<i64> = (0..8).map(|j| g.wavenumber(j)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.nyquist(), -4);
        assert_eq!(g.derivative_wavenumbers()[4], 0.0);
    }

    #[test]
    fn index_round_trips() {
        let g = Grid3::new(8).unwrap();
        for index in [0, 1, 9, 77, 511] {
            let k = g.mode(index);
            assert_eq!(g.index_of_mode(k), Some(index));
            let neg = g.negated_index(index);
            let kn = g.mode(neg);
            for a in 0..3 {
                if k[a] != g.nyquist() {
                    assert_eq!(kn[a], -k[a]);
                } else {
                    assert_eq!(kn[a], k[a]);
                }
            }
        }
        assert_eq!(g.index_of_mode([4, 0, 0]), None);
    }

    #[test]
    fn dealias_cutoff_is_floor_n_over_three() {
        assert_eq!(Grid2::new(12).unwrap().dealias_cutoff(), 4);
        assert_eq!(Grid2::new(128).unwrap().dealias_cutoff(), 42);
        assert_eq!(Grid2::new(256).unwrap().dealias_cutoff(), 85);
    }
}
