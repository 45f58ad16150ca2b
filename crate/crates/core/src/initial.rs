//! Named analytic initial data and seeded random smooth fields.

use crate::error::{Error, Result};
use crate::fft;
use crate::field::VectorField;
use crate::forcing::{self, ForcingSpec};
use crate::grid::Grid;

/// An initial condition that can be named in a run configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// `(cos x, sin x)`, the planar shock-forming data (2D only).
    ShearCos,
    /// `(sin x cos y, −cos x sin y)`, third component zero in 3D.
    TaylorGreen,
    /// Arnold–Beltrami–Childress flow with `A = B = C = 1` (3D only).
    Abc,
    /// Band-limited Gaussian field on `1/2 ≤ |k| ≤ k_max`, scaled to `sup|u| = amplitude`.
    Random { seed: u64, k_max: f64, amplitude: f64 },
}

impl Profile {
    /// Parses a profile name; `Random` takes its parameters separately.
    pub fn from_name(name: &str) -> Option<Profile> {
        match name {
            "shear-cos" => Some(Profile::ShearCos),
            "taylor-green" => Some(Profile::TaylorGreen),
            "abc" => Some(Profile::Abc),
            _ => None,
        }
    }

    pub fn build<const D: usize>(&self, grid: Grid<D>) -> Result<VectorField<D>> {
        match *self {
            Profile::ShearCos => {
                if D != 2 {
                    return Err(Error::config("initial.profile", "shear-cos is two-dimensional"));
                }
                Ok(VectorField::from_fn(grid, |x| {
                    std::array::from_fn(|i| if i == 0 { x[0].cos() } else { x[0].sin() })
                }))
            }
            Profile::TaylorGreen => Ok(VectorField::from_fn(grid, |x| {
                std::array::from_fn(|i| match i {
                    0 => x[0].sin() * x[1].cos(),
                    1 => -x[0].cos() * x[1].sin(),
                    _ => 0.0,
                })
            })),
            Profile::Abc => {
                if D != 3 {
                    return Err(Error::config("initial.profile", "abc is three-dimensional"));
                }
                Ok(VectorField::from_fn(grid, |x| {
                    let (a, b, c) = (x[0], x[1], x[D - 1]);
                    std::array::from_fn(|i| match i {
                        0 => c.sin() + b.cos(),
                        1 => a.sin() + c.cos(),
                        _ => b.sin() + a.cos(),
                    })
                }))
            }
            Profile::Random { seed, k_max, amplitude } => random_smooth(grid, seed, k_max, amplitude),
        }
    }
}

/// Seeded mean-free random field with modes `1/2 ≤ |k| ≤ k_max`, scaled to `sup|u| = amplitude`.
///
/// Uses the same draw sequence as the spectral force, so equal seeds give
/// fields of identical shape.
pub fn random_smooth<const D: usize>(
    grid: Grid<D>,
    seed: u64,
    k_max: f64,
    amplitude: f64,
) -> Result<VectorField<D>> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::config("initial.amplitude", "must be finite and non-negative"));
    }
    let spec = ForcingSpec::new(seed, 0.5, k_max, 1.0, 1.0);
    let raw = fft::inverse_vector(&forcing::raw_spectrum(&spec, grid)?);
    let sup = raw.max_speed();
    Ok(raw.scaled(amplitude / sup))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid2, Grid3};
    use crate::ops;

    #[test]
    fn random_field_is_scaled_and_reproducible() {
        let g = Grid2::new(32).unwrap();
        let a = random_smooth(g, 9, 4.0, 0.7).unwrap();
        let b = random_smooth(g, 9, 4.0, 0.7).unwrap();
        assert_eq!(a, b);
        assert!((a.max_speed() - 0.7).abs() < 1e-15);
        assert!(a.mean().iter().all(|m| m.abs() < 1e-15));
        assert_ne!(a, random_smooth(g, 10, 4.0, 0.7).unwrap());
    }

    #[test]
    fn abc_is_beltrami() {
        let g = Grid3::new(16).unwrap();
        let u = Profile::Abc.build(g).unwrap();
        assert!(ops::curl3(&u).max_diff(&u) < 1e-12);
        assert!(Profile::Abc.build(Grid2::new(16).unwrap()).is_err());
    }

    #[test]
    fn shear_profile_matches_blowup_data() {
        let g = Grid2::new(16).unwrap();
        let u = Profile::ShearCos.build(g).unwrap();
        for i in 0..g.len() {
            let x = g.point(i)[0];
            assert_eq!(u.at(i), [x.cos(), x.sin()]);
        }
    }
}
