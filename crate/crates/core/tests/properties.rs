//! Property tests over random fields, seeds and parameters.

use std::path::Path;

use proptest::prelude::*;

use rotflow::burgers2d::Rotation2;
use rotflow::config::RunConfig;
use rotflow::diagnostics::{self, DiagnosticsRecord};
use rotflow::field::RealField;
use rotflow::initial::random_smooth;
use rotflow::io::{self, SnapshotFile, SnapshotParams};
use rotflow::kse::{linear_symbol, Etd1};
use rotflow::{fft, ops, Error, Grid2, Grid3, VectorField};

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(32)
}

/// Independent L² inner product by direct quadrature.
fn inner<const D: usize>(a: &VectorField<D>, b: &VectorField<D>) -> f64 {
    let cell = a.grid().cell_volume();
    (0..D)
        .map(|c| {
            a.component(c)
                .values()
                .iter()
                .zip(b.component(c).values())
                .map(|(x, y)| x * y)
                .sum::<f64>()
        })
        .sum::<f64>()
        * cell
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn fft_round_trip(n in prop::sample::select(vec![8usize, 12, 16]), values in prop::collection::vec(-1e3f64..1e3, 256)) {
        let g = Grid2::new(n).unwrap();
        let f = RealField::from_values(g, values[..g.len()].to_vec()).unwrap();
        let back = fft::inverse(&fft::forward(&f));
        prop_assert!(back.max_diff(&f) <= 1e-12 * f.max_abs().max(1.0));
    }

    #[test]
    fn fft_round_trip_3d(values in prop::collection::vec(-1.0f64..1.0, 512)) {
        let g = Grid3::new(8).unwrap();
        let f = RealField::from_values(g, values).unwrap();
        prop_assert!(fft::inverse(&fft::forward(&f)).max_diff(&f) <= 1e-14);
    }

    #[test]
    fn spectral_coefficients_satisfy_parseval(seed in any::<u64>(), kmax in 1.0f64..8.0) {
        let u = random_smooth(Grid2::new(24).unwrap(), seed, kmax, 1.0).unwrap();
        prop_assert!(diagnostics::parseval_defect(&u) <= 1e-13);
    }

    #[test]
    fn lamb2_is_orthogonal_to_u(seed in any::<u64>(), kmax in 1.0f64..10.0, dealias in any::<bool>()) {
        let u = random_smooth(Grid2::new(32).unwrap(), seed, kmax, 1.0).unwrap();
        let l = ops::lamb2(&u, dealias);
        let scale = inner(&l, &l).sqrt() * inner(&u, &u).sqrt();
        prop_assert!(inner(&l, &u).abs() <= 1e-13 * scale, "{} vs {}", inner(&l, &u), scale);
    }

    #[test]
    fn lamb3_is_orthogonal_to_u(seed in any::<u64>(), kmax in 1.0f64..5.0, dealias in any::<bool>()) {
        let u = random_smooth(Grid3::new(16).unwrap(), seed, kmax, 1.0).unwrap();
        let l = ops::lamb3(&u, dealias);
        let scale = inner(&l, &l).sqrt() * inner(&u, &u).sqrt();
        prop_assert!(inner(&l, &u).abs() <= 1e-13 * scale);
    }

    #[test]
    fn rotation_step_preserves_energy(seed in any::<u64>(), kmax in 1.0f64..8.0, amp in 0.01f64..10.0, dt in 1e-4f64..0.5) {
        let g = Grid2::new(32).unwrap();
        let u = random_smooth(g, seed, kmax, amp).unwrap();
        let v = Rotation2::new(g, true).step_inviscid(&u, dt);
        let (e0, e1) = (inner(&u, &u), inner(&v, &v));
        prop_assert!((e1 - e0).abs() <= 1e-13 * e0);
        // Each point is rotated, so the pointwise speed is kept too.
        for i in 0..g.len() {
            prop_assert!((u.speed_at(i) - v.speed_at(i)).abs() <= 1e-13 * amp);
        }
    }

    #[test]
    fn snapshot_bytes_round_trip(seed in any::<u64>(), t in 0.0f64..1e3, nu in 0.0f64..1.0, gamma in 0.0f64..1.0, lambda in 0.0f64..10.0) {
        let u = random_smooth(Grid2::new(8).unwrap(), seed, 3.0, 1.0).unwrap();
        let params = SnapshotParams { t, nu, gamma, lambda };
        let bytes = SnapshotFile::from_field(&u, params).to_bytes();
        let back = SnapshotFile::from_bytes(&bytes, Path::new("mem")).unwrap();
        prop_assert_eq!(back.to_bytes(), bytes);
        prop_assert_eq!(back.to_field::<2>().unwrap(), u);
        prop_assert_eq!(back.params, params);
    }

    #[test]
    fn diagnostics_csv_round_trip_is_bit_exact(
        xs in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO | prop::num::f64::SUBNORMAL, 12),
        opts in prop::collection::vec(prop::option::of(prop::num::f64::NORMAL), 5),
        step in any::<u32>(),
    ) {
        let record = DiagnosticsRecord {
            step: step as usize,
            t: xs[0],
            l2: xs[1],
            grad_l2: xs[2],
            div_l2: xs[3],
            curl_l2: xs[4],
            sup: xs[5],
            mean: xs[6..9].to_vec(),
            helicity: opts[0],
            forcing_work: xs[9],
            energy_residual: opts[1],
            rho0_margin: opts[2],
            rhoinf_margin: opts[3],
            kse_margin: opts[4],
            tail_ratio: xs[10],
        };
        let text = io::diagnostics_csv(std::slice::from_ref(&record));
        let back = io::parse_diagnostics_csv(&text, Path::new("mem")).unwrap();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(format!("{:?}", back[0]), format!("{:?}", record));
        prop_assert_eq!(io::diagnostics_csv(&back), text);
    }

    #[test]
    fn unknown_config_keys_are_rejected(section in prop::sample::select(vec!["equation", "grid", "forcing", "initial", "output"]), name in "zz[a-z_]{1,10}") {
        let key = format!("{section}.{name}");
        let text = format!(
            "equation.kind = rotburgers2d\nequation.nu = 0.1\nequation.dt = 1e-3\nequation.t_end = 1\ngrid.n = 16\noutput.dir = out\n{key} = 1\n"
        );
        match RunConfig::parse(&text, Path::new(".")) {
            Err(Error::InvalidConfig { field, .. }) => prop_assert_eq!(field, key),
            other => prop_assert!(false, "expected rejection, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn kse_linear_subflow_is_exponential(k1 in -4i64..=4, k2 in -4i64..=4, lambda in 0.0f64..5.0, dt in 1e-4f64..1e-2, steps in 1usize..20) {
        prop_assume!((k1, k2) != (0, 0));
        let g = Grid2::new(16).unwrap();
        let u = VectorField::from_fn(g, |x| {
            let p = k1 as f64 * x[0] + k2 as f64 * x[1];
            [p.cos(), 0.5 * p.sin()]
        });
        let mut etd = Etd1::new(g, lambda, true, false);
        let mut v = u.clone();
        for _ in 0..steps {
            v = etd.step(&v, dt);
        }
        let growth = (linear_symbol([k1, k2], lambda) * dt * steps as f64).exp();
        prop_assert!(v.max_diff(&u.scaled(growth)) <= 1e-12 * growth.max(1.0));
    }

    #[test]
    fn kse_without_instability_never_gains_energy(seed in any::<u64>(), kmax in 1.0f64..5.0, dt in 1e-4f64..1e-1) {
        let g = Grid2::new(16).unwrap();
        let mut u = random_smooth(g, seed, kmax, 1.0).unwrap();
        let mut etd = Etd1::new(g, 0.0, true, false);
        for _ in 0..10 {
            let v = etd.step(&u, dt);
            prop_assert!(v.energy() <= u.energy());
            u = v;
        }
    }
}
