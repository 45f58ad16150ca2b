//! Deterministic random body forces supported on a wavenumber annulus and
//! scaled to a prescribed Grashof number `G = ‖f‖_{L²}/(λ₁ν²)`.
//!
//! Coefficients are drawn from a SplitMix64 stream mapped to standard
//! normals by Box–Muller. Draws walk the canonical half-lattice (first
//! nonzero component positive) in lexicographic order with `k_x` slowest,
//! components in index order, real part before imaginary part; the other
//! half is filled by conjugate mirroring. Annulus points that do not fit the
//! grid still consume their draws, so the force restricted to the common
//! modes is independent of `n`.

use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{SpectralField, VectorField};
use crate::grid::Grid;
use crate::norms;

/// SplitMix64 pseudo-random generator.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Standard normal deviates by the Box–Muller transform.
#[derive(Clone, Debug)]
pub struct NormalStream {
    rng: SplitMix64,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        NormalStream {
            rng: SplitMix64::new(seed),
            spare: None,
        }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - u lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - self.rng.next_f64();
        let u2 = self.rng.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Seeded annulus forcing with Grashof scaling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForcingSpec {
    pub seed: u64,
    pub k_min: f64,
    pub k_max: f64,
    pub grashof: f64,
    pub nu: f64,
    /// Smallest positive Laplacian eigenvalue; 1 on the 2π-torus.
    pub lambda1: f64,
}

impl ForcingSpec {
    pub fn new(seed: u64, k_min: f64, k_max: f64, grashof: f64, nu: f64) -> Self {
        ForcingSpec {
            seed,
            k_min,
            k_max,
            grashof,
            nu,
            lambda1: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_min >= 0.0 && self.k_min < self.k_max && self.k_max.is_finite()) {
            return Err(Error::config(
                "forcing.kmin/kmax",
                format!("need 0 <= kmin < kmax, got {} and {}", self.k_min, self.k_max),
            ));
        }
        if !(self.grashof > 0.0 && self.grashof.is_finite()) {
            return Err(Error::config("forcing.grashof", "must be positive"));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::config("forcing.nu", "must be positive"));
        }
        if !(self.lambda1 > 0.0) {
            return Err(Error::config("forcing.lambda1", "must be positive"));
        }
        Ok(())
    }

    /// Target `‖f‖_{L²} = G·λ₁·ν²`.
    pub fn target_l2(&self) -> f64 {
        self.grashof * self.lambda1 * self.nu * self.nu
    }
}

/// A time-independent body force.
#[derive(Clone, Debug, PartialEq)]
pub struct ForceField<const D: usize> {
    field: VectorField<D>,
    spec: Option<ForcingSpec>,
}

pub type ForceField2 = ForceField<2>;
pub type ForceField3 = ForceField<3>;

impl<const D: usize> ForceField<D> {
    pub fn zero(grid: Grid<D>) -> Self {
        ForceField {
            field: VectorField::zeros(grid),
            spec: None,
        }
    }

    /// Wraps an externally supplied force (for instance read from disk).
    pub fn from_field(field: VectorField<D>) -> Self {
        ForceField { field, spec: None }
    }

    pub fn field(&self) -> &VectorField<D> {
        &self.field
    }

    pub fn spec(&self) -> Option<&ForcingSpec> {
        self.spec.as_ref()
    }

    pub fn grid(&self) -> Grid<D> {
        self.field.grid()
    }

    /// `true` when every sample is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.field
            .components()
            .iter()
            .all(|c| c.values().iter().all(|&v| v == 0.0))
    }

    pub fn norm_l2(&self) -> f64 {
        norms::norm_l2(&self.field)
    }

    pub fn norm_linf(&self) -> f64 {
        norms::norm_linf(&self.field)
    }

    pub fn norm_hminus1(&self) -> Result<f64> {
        norms::norm_hminus1(&self.field)
    }
}

/// Lattice points of the annulus on the canonical half-lattice, in draw order.
fn canonical_annulus<const D: usize>(k_min: f64, k_max: f64) -> Vec<[i64; D]> {
    let r = k_max.floor() as i64;
    let side = (2 * r + 1) as usize;
    let mut out = Vec::new();
    let total = side.pow(D as u32);
    for lin in 0..total {
        // Decode with axis 0 slowest so the walk is lexicographic in (k_x, k_y, k_z).
        let mut k = [0i64; D];
        let mut q = lin;
        for a in (0..D).rev() {
            k[a] = (q % side) as i64 - r;
            q /= side;
        }
        let first = k.iter().find(|&&c| c != 0);
        if !matches!(first, Some(&c) if c > 0) {
            continue;
        }
        let m2 = k.iter().map(|c| (c * c) as f64).sum::<f64>();
        if m2 >= k_min * k_min && m2 <= k_max * k_max {
            out.push(k);
        }
    }
    out
}

/// Number of lattice modes (counting both `k` and `-k`) the force occupies on `grid`.
pub fn forced_mode_count<const D: usize>(spec: &ForcingSpec, grid: Grid<D>) -> usize {
    let half = (grid.n() / 2) as i64;
    2 * canonical_annulus::<D>(spec.k_min, spec.k_max)
        .iter()
        .filter(|k| k.iter().all(|c| c.abs() < half))
        .count()
}

/// Annulus force spectrum before Grashof scaling.
pub fn raw_spectrum<const D: usize>(
    spec: &ForcingSpec,
    grid: Grid<D>,
) -> Result<[SpectralField<D>; D]> {
    spec.validate()?;
    let half = (grid.n() / 2) as i64;
    let mut stream = NormalStream::new(spec.seed);
    let mut out: [SpectralField<D>; D] = std::array::from_fn(|_| SpectralField::zeros(grid));
    let mut placed = 0usize;
    for k in canonical_annulus::<D>(spec.k_min, spec.k_max) {
        let draws: [Complex64; D] = std::array::from_fn(|_| {
            let re = stream.next_normal();
            let im = stream.next_normal();
            Complex64::new(re, im)
        });
        if k.iter().any(|c| c.abs() >= half) {
            continue;
        }
        let i = grid.index_of_mode(k).expect("inside the lattice");
        let j = grid.index_of_mode(k.map(|c| -c)).expect("inside the lattice");
        for (comp, z) in out.iter_mut().zip(draws) {
            comp.coeffs_mut()[i] = z;
            comp.coeffs_mut()[j] = z.conj();
        }
        placed += 1;
    }
    if placed == 0 {
        return Err(Error::NoForcedModes {
            k_min: spec.k_min,
            k_max: spec.k_max,
        });
    }
    Ok(out)
}

/// Generates the force for `spec` on `grid`.
pub fn generate<const D: usize>(spec: &ForcingSpec, grid: Grid<D>) -> Result<ForceField<D>> {
    let spectrum = raw_spectrum(spec, grid)?;
    let raw = fft::inverse_vector(&spectrum);
    let scale = spec.target_l2() / norms::norm_l2(&raw);
    Ok(ForceField {
        field: raw.scaled(scale),
        spec: Some(*spec),
    })
}
