//! Acceptance criteria, one line each. The heavy runs (n = 512 blow-up,
//! n = 256 headline) make this target take several minutes even with the optimised test profile.
//!
//! Lines go straight to stderr so they show even when output is captured.

use std::io::Write;

use rotflow::verify::{self, Check};

type Criterion = (&'static str, fn() -> rotflow::Result<Check>);

const CRITERIA: &[Criterion] = &[
    ("C1 Lamb vector identities", verify::lamb_identities),
    ("C2 L2 orthogonality of the nonlinearity", verify::l2_orthogonality),
    ("C3 rotation step conserves energy", verify::rotation_conservation),
    ("C4 inviscid blow-up reproduction", verify::blowup_reproduction),
    ("C5 maximum principle", verify::max_principle),
    ("C6 discrete energy balance", verify::energy_balance),
    ("C7 damped absorbing balls", verify::damped_absorbing),
    ("C8 3D helicity and energy conservation", verify::helicity_conservation),
    ("C9 KSE Gronwall bound", verify::kse_gronwall),
    ("C10 headline forced run", verify::headline),
    ("C11 bitwise determinism", verify::determinism),
];

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    for (label, run) in CRITERIA {
        let started = std::time::Instant::now();
        let (ok, detail) = match run() {
            Ok(c) => (c.passed, c.line()),
            Err(e) => (false, format!("error: {e}")),
        };
        let status = if ok { "PASS" } else { "FAIL" };
        let line = format!("{status} {label} [{:.1}s] {detail}\n", started.elapsed().as_secs_f64());
        std::io::stderr().write_all(line.as_bytes()).unwrap();
        if !ok {
            failed.push(*label);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
