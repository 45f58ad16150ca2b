//! Real, vector and spectral fields on a [`Grid`].

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Real samples at the grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct RealField<const D: usize> {
    grid: Grid<D>,
    values: Vec<f64>,
}

pub type RealField2 = RealField<2>;
pub type RealField3 = RealField<3>;

impl<const D: usize> RealField<D> {
    pub fn zeros(grid: Grid<D>) -> Self {
        RealField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: Grid<D>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(RealField { grid, values })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: Grid<D>, f: impl Fn([f64; D]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        RealField { grid, values }
    }

    pub fn grid(&self) -> Grid<D> {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Rectangle-rule integral over the box.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `max_i |self_i - other_i|`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// A velocity-like field with `D` components on a `D`-dimensional grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<const D: usize> {
    comps: [RealField<D>; D],
}

pub type VectorField2 = VectorField<2>;
pub type VectorField3 = VectorField<3>;

impl<const D: usize> VectorField<D> {
    pub fn zeros(grid: Grid<D>) -> Self {
        VectorField {
            comps: std::array::from_fn(|_| RealField::zeros(grid)),
        }
    }

    pub fn from_components(comps: [RealField<D>; D]) -> Result<Self> {
        let g = comps[0].grid();
        for c in &comps[1..] {
            if c.grid() != g {
                return Err(Error::GridMismatch {
                    left: g.n(),
                    right: c.grid().n(),
                });
            }
        }
        Ok(VectorField { comps })
    }

    /// Samples a vector-valued function at every grid point.
    pub fn from_fn(grid: Grid<D>, f: impl Fn([f64; D]) -> [f64; D]) -> Self {
        let mut out = Self::zeros(grid);
        for i in 0..grid.len() {
            let v = f(grid.point(i));
            for (c, vc) in out.comps.iter_mut().zip(v) {
                c.values[i] = vc;
            }
        }
        out
    }

    pub fn grid(&self) -> Grid<D> {
        self.comps[0].grid()
    }

    pub fn component(&self, i: usize) -> &RealField<D> {
        &self.comps[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut RealField<D> {
        &mut self.comps[i]
    }

    pub fn components(&self) -> &[RealField<D>; D] {
        &self.comps
    }

    pub fn into_components(self) -> [RealField<D>; D] {
        self.comps
    }

    /// Vector at a flat grid index.
    pub fn at(&self, index: usize) -> [f64; D] {
        std::array::from_fn(|c| self.comps[c].values[index])
    }

    /// Euclidean magnitude `|u|` at a flat index.
    pub fn speed_at(&self, index: usize) -> f64 {
        self.comps
            .iter()
            .map(|c| c.values[index] * c.values[index])
            .sum::<f64>()
            .sqrt()
    }

    /// `sup_x |u(x)|` over the grid.
    pub fn max_speed(&self) -> f64 {
        (0..self.grid().len()).fold(0.0, |m, i| m.max(self.speed_at(i)))
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.is_finite())
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch {
                left: self.grid().n(),
                right: other.grid().n(),
            });
        }
        Ok(())
    }

    /// `self + a·other`, componentwise.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        VectorField {
            comps: std::array::from_fn(|c| RealField {
                grid: self.grid(),
                values: self.comps[c]
                    .values
                    .iter()
                    .zip(&other.comps[c].values)
                    .map(|(x, y)| x + a * y)
                    .collect(),
            }),
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        VectorField {
            comps: std::array::from_fn(|c| self.comps[c].map(|v| a * v)),
        }
    }

    /// Largest componentwise difference.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .fold(0.0, |m, (a, b)| m.max(a.max_diff(b)))
    }

    /// `(u, v)` by rectangle-rule quadrature.
    pub fn inner(&self, other: &Self) -> f64 {
        let s: f64 = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| {
                a.values
                    .iter()
                    .zip(&b.values)
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
            })
            .sum();
        s * self.grid().cell_volume()
    }

    /// `‖u‖²_{L²}` by rectangle-rule quadrature.
    pub fn energy(&self) -> f64 {
        self.inner(self)
    }

    /// Mean vector `∫u dx / (2π)^D`.
    pub fn mean(&self) -> [f64; D] {
        let len = self.grid().len() as f64;
        std::array::from_fn(|c| self.comps[c].values.iter().sum::<f64>() / len)
    }
}

/// Fourier coefficients over the full wavenumber lattice, in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField<const D: usize> {
    grid: Grid<D>,
    coeffs: Vec<Complex64>,
}

pub type SpectralField2 = SpectralField<2>;
pub type SpectralField3 = SpectralField<3>;

impl<const D: usize> SpectralField<D> {
    pub fn zeros(grid: Grid<D>) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_coeffs(grid: Grid<D>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub fn grid(&self) -> Grid<D> {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at wavenumber `k`, zero if `k` is off the lattice.
    pub fn coefficient(&self, k: [i64; D]) -> Complex64 {
        self.grid
            .index_of_mode(k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Largest `|F(k) - conj F(-k)|` over the lattice.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len()).fold(0.0, |m, i| {
            let j = self.grid.negated_index(i);
            m.max((self.coeffs[i] - self.coeffs[j].conj()).norm())
        })
    }

    /// Replaces `F(k)` by `(F(k) + conj F(-k)) / 2`.
    pub fn symmetrize(&mut self) {
        let orig = self.coeffs.clone();
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            let j = self.grid.negated_index(i);
            *c = 0.5 * (orig[i] + orig[j].conj());
        }
    }

    /// `Σ_k |F(k)|²`.
    pub fn sum_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&mut self, a: f64) {
        for c in &mut self.coeffs {
            *c *= a;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}
