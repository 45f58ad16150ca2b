//! Run configuration files: flat `key = value` lines with section prefixes.
//!
//! ```text
//! # comments and blank lines are ignored
//! equation.kind = rotburgers2d
//! equation.nu = 0.005
//! equation.t_end = 200
//! equation.cfl = 0.2
//! grid.n = 256
//! forcing.kind = spectral
//! forcing.seed = 42
//! forcing.kmin = 0.5
//! forcing.kmax = 2.5
//! forcing.grashof = 20
//! initial.kind = zero
//! output.dir = headline
//! ```
//!
//! Every key must be known and applicable to the chosen equation, and may
//! appear once. Relative paths resolve against the directory of the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::burgers2d::SimConfig2;
use crate::burgers3d::{Rhs3Variant, SimConfig3};
use crate::driver::{DtPolicy, Guard};
use crate::error::{Error, Result};
use crate::forcing::ForcingSpec;
use crate::initial::Profile;
use crate::kse::{self, KseConfig};

/// Environment variable that relocates every run's output directory.
pub const OUTPUT_ROOT_ENV: &str = "ROTFLOW_OUTPUT_ROOT";

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Equation {
    Burgers2(SimConfig2),
    Burgers3(SimConfig3),
    Kse(KseConfig),
}

impl Equation {
    pub fn name(&self) -> &'static str {
        match self {
            Equation::Burgers2(_) => "rotburgers2d",
            Equation::Burgers3(_) => "rotburgers3d",
            Equation::Kse(_) => "rotkse2d",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Equation::Burgers3(_) => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ForcingSource {
    None,
    Spectral(ForcingSpec),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialSource {
    Zero,
    Snapshot(PathBuf),
    Profile(Profile),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub equation: Equation,
    pub n: usize,
    pub forcing: ForcingSource,
    pub initial: InitialSource,
    /// As written in the file, before the output-root override.
    pub output_dir: PathBuf,
    /// Directory that relative paths in the file are resolved against.
    pub base_dir: PathBuf,
}

const COMMON_KEYS: &[&str] = &[
    "equation.kind",
    "equation.t_end",
    "equation.dt",
    "equation.dealias",
    "equation.diag_every",
    "equation.snapshot_every",
    "equation.max_speed",
    "equation.max_tail_ratio",
    "grid.n",
    "initial.kind",
    "initial.path",
    "initial.profile",
    "initial.seed",
    "initial.kmax",
    "initial.amplitude",
    "output.dir",
];
const BURGERS_KEYS: &[&str] = &[
    "equation.nu",
    "equation.gamma",
    "equation.cfl",
    "forcing.kind",
    "forcing.seed",
    "forcing.kmin",
    "forcing.kmax",
    "forcing.grashof",
    "forcing.path",
];
const BURGERS3_KEYS: &[&str] = &["equation.variant"];
const KSE_KEYS: &[&str] = &["equation.lambda", "equation.nonlinear"];

/// Parsed `key = value` pairs with line numbers, consumed field by field.
struct Entries {
    map: BTreeMap<String, (usize, String)>,
    base: PathBuf,
}

impl Entries {
    fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}", i + 1), "expected key = value"))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if let Some((first, _)) = map.get(&k) {
                return Err(Error::config(k, format!("duplicate key (first on line {first})")));
            }
            map.insert(k, (i + 1, v));
        }
        Ok(Entries {
            map,
            base: base.to_path_buf(),
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|(_, v)| v.as_str())
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| Error::config(key, format!("{v:?}: {e}"))))
            .transpose()
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.parsed(key)?.ok_or_else(|| Error::config(key, "missing"))
    }

    fn or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    fn path(&self, key: &str) -> Result<PathBuf> {
        let p = PathBuf::from(self.raw(key).ok_or_else(|| Error::config(key, "missing"))?);
        let p = if p.is_relative() { self.base.join(p) } else { p };
        if !p.exists() {
            return Err(Error::config(key, format!("{} does not exist", p.display())));
        }
        Ok(p)
    }

    fn reject_unknown(&self, allowed: &[&[&str]], kind: &str) -> Result<()> {
        for key in self.map.keys() {
            if !allowed.iter().any(|set| set.contains(&key.as_str())) {
                let known = [COMMON_KEYS, BURGERS_KEYS, BURGERS3_KEYS, KSE_KEYS]
                    .iter()
                    .any(|set| set.contains(&key.as_str()));
                let reason = if known {
                    format!("not applicable to {kind}")
                } else {
                    "unknown key".to_string()
                };
                return Err(Error::config(key.clone(), reason));
            }
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses config text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let e = Entries::parse(text, base)?;
        let kind: String = e.required("equation.kind")?;
        let allowed: &[&[&str]] = match kind.as_str() {
            "rotburgers2d" => &[COMMON_KEYS, BURGERS_KEYS],
            "rotburgers3d" => &[COMMON_KEYS, BURGERS_KEYS, BURGERS3_KEYS],
            "rotkse2d" => &[COMMON_KEYS, KSE_KEYS],
            other => {
                return Err(Error::config(
                    "equation.kind",
                    format!("{other:?} is not rotburgers2d, rotburgers3d or rotkse2d"),
                ))
            }
        };
        e.reject_unknown(allowed, &kind)?;

        let n: usize = e.required("grid.n")?;
        if n < 8 || n % 2 != 0 {
            return Err(Error::config("grid.n", format!("{n} must be even and at least 8")));
        }
        let t_end: f64 = e.required("equation.t_end")?;
        let dealias = e.or("equation.dealias", true)?;
        let diag_every = e.or("equation.diag_every", 10usize)?;
        let snapshot_every = e.or("equation.snapshot_every", 1000usize)?;
        let mut guard = if kind == "rotkse2d" {
            kse::default_guard()
        } else {
            Guard::default()
        };
        guard.max_speed = e.or("equation.max_speed", guard.max_speed)?;
        if let Some(v) = e.raw("equation.max_tail_ratio") {
            guard.max_tail_ratio = if v == "none" {
                None
            } else {
                Some(e.required("equation.max_tail_ratio")?)
            };
        }

        let equation = match kind.as_str() {
            "rotkse2d" => Equation::Kse(KseConfig {
                lambda: e.required("equation.lambda")?,
                t_end,
                dt: e.required("equation.dt")?,
                dealias,
                nonlinear: e.or("equation.nonlinear", true)?,
                snapshot_every,
                diag_every,
                guard,
            }),
            _ => {
                let nu: f64 = e.or("equation.nu", 0.0)?;
                let gamma: f64 = e.or("equation.gamma", 0.0)?;
                let dt_policy = match (e.parsed::<f64>("equation.dt")?, e.parsed::<f64>("equation.cfl")?) {
                    (Some(dt), None) => DtPolicy::Fixed(dt),
                    (None, Some(safety)) => DtPolicy::ViscousCfl { safety },
                    (Some(_), Some(_)) => return Err(Error::config("equation.dt", "give either dt or cfl, not both")),
                    (None, None) => return Err(Error::config("equation.dt", "missing (or set equation.cfl)")),
                };
                if kind == "rotburgers2d" {
                    Equation::Burgers2(SimConfig2 {
                        nu,
                        gamma,
                        t_end,
                        dt_policy,
                        dealias,
                        snapshot_every,
                        diag_every,
                        guard,
                    })
                } else {
                    let variant = match e.raw("equation.variant").unwrap_or("rotational") {
                        "rotational" => Rhs3Variant::Rotational,
                        "curlcurl" => Rhs3Variant::CurlCurl,
                        other => {
                            return Err(Error::config(
                                "equation.variant",
                                format!("{other:?} is not rotational or curlcurl"),
                            ))
                        }
                    };
                    Equation::Burgers3(SimConfig3 {
                        nu,
                        gamma,
                        t_end,
                        dt_policy,
                        dealias,
                        snapshot_every,
                        diag_every,
                        guard,
                        variant,
                    })
                }
            }
        };

        let forcing = match e.raw("forcing.kind").unwrap_or("none") {
            "none" => ForcingSource::None,
            "spectral" => {
                let nu = match equation {
                    Equation::Burgers2(c) => c.nu,
                    Equation::Burgers3(c) => c.nu,
                    Equation::Kse(_) => unreachable!("forcing keys are rejected for rotkse2d"),
                };
                let spec = ForcingSpec::new(
                    e.required("forcing.seed")?,
                    e.required("forcing.kmin")?,
                    e.required("forcing.kmax")?,
                    e.required("forcing.grashof")?,
                    nu,
                );
                spec.validate()?;
                ForcingSource::Spectral(spec)
            }
            "file" => ForcingSource::File(e.path("forcing.path")?),
            other => {
                return Err(Error::config(
                    "forcing.kind",
                    format!("{other:?} is not none, spectral or file"),
                ))
            }
        };

        let initial = match e.raw("initial.kind").unwrap_or("zero") {
            "zero" => InitialSource::Zero,
            "snapshot" => InitialSource::Snapshot(e.path("initial.path")?),
            "profile" => {
                let name: String = e.required("initial.profile")?;
                let profile = if name == "random" {
                    Profile::Random {
                        seed: e.required("initial.seed")?,
                        k_max: e.required("initial.kmax")?,
                        amplitude: e.required("initial.amplitude")?,
                    }
                } else {
                    Profile::from_name(&name).ok_or_else(|| {
                        Error::config(
                            "initial.profile",
                            format!("{name:?} is not shear-cos, taylor-green, abc or random"),
                        )
                    })?
                };
                InitialSource::Profile(profile)
            }
            other => {
                return Err(Error::config(
                    "initial.kind",
                    format!("{other:?} is not zero, snapshot or profile"),
                ))
            }
        };

        let output_dir = PathBuf::from(e.raw("output.dir").ok_or_else(|| Error::config("output.dir", "missing"))?);
        let cfg = RunConfig {
            equation,
            n,
            forcing,
            initial,
            output_dir,
            base_dir: base.to_path_buf(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the solver parameters; errors name the config key.
    pub fn validate(&self) -> Result<()> {
        self.validate_solver().map_err(|e| match e {
            Error::InvalidConfig { field, reason } if !field.contains('.') => Error::InvalidConfig {
                field: format!("equation.{field}"),
                reason,
            },
            other => other,
        })
    }

    fn validate_solver(&self) -> Result<()> {
        let grid2 = || crate::grid::Grid2::new(self.n);
        match &self.equation {
            Equation::Burgers2(c) => {
                c.schedule(grid2()?)?;
            }
            Equation::Burgers3(c) => {
                c.schedule(crate::grid::Grid3::new(self.n)?)?;
            }
            Equation::Kse(c) => {
                c.schedule()?;
            }
        }
        Ok(())
    }

    /// Output directory: under the environment's output root when set,
    /// otherwise relative to the config file.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(root) if !root.is_empty() => {
                let rel = self.output_dir.strip_prefix("/").unwrap_or(&self.output_dir);
                PathBuf::from(root).join(rel)
            }
            _ => self.base_dir.join(&self.output_dir),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADLINE: &str = "\
equation.kind = rotburgers2d
equation.nu = 0.005   # viscosity
equation.t_end = 200
equation.cfl = 0.2
grid.n = 256
forcing.kind = spectral
forcing.seed = 42
forcing.kmin = 0.5
forcing.kmax = 2.5
forcing.grashof = 20
output.dir = out
";

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::parse(text, Path::new("."))
    }

    fn reason_field(r: Result<RunConfig>) -> String {
        match r {
            Err(Error::InvalidConfig { field, .. }) => field,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn headline_config_parses() {
        let c = parse(HEADLINE).unwrap();
        assert_eq!(c.n, 256);
        assert_eq!(c.initial, InitialSource::Zero);
        match c.equation {
            Equation::Burgers2(s) => {
                assert_eq!(s.nu, 0.005);
                assert_eq!(s.dt_policy, DtPolicy::ViscousCfl { safety: 0.2 });
            }
            other => panic!("{other:?}"),
        }
        match c.forcing {
            ForcingSource::Spectral(s) => assert_eq!((s.seed, s.grashof, s.nu), (42, 20.0, 0.005)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_grid_is_named() {
        let text = HEADLINE.replace("grid.n = 256\n", "");
        assert_eq!(reason_field(parse(&text)), "grid.n");
    }

    #[test]
    fn unknown_and_misplaced_keys_are_rejected() {
        assert_eq!(reason_field(parse(&format!("{HEADLINE}grid.nn = 3\n"))), "grid.nn");
        assert_eq!(reason_field(parse(&format!("{HEADLINE}equation.lambda = 3\n"))), "equation.lambda");
        assert_eq!(reason_field(parse(&format!("{HEADLINE}grid.n = 128\n"))), "grid.n");
    }

    #[test]
    fn bad_values_are_rejected() {
        assert_eq!(reason_field(parse(&HEADLINE.replace("256", "255"))), "grid.n");
        assert_eq!(reason_field(parse(&HEADLINE.replace("= 0.2", "= 0.5"))), "equation.cfl");
        assert_eq!(reason_field(parse(&HEADLINE.replace("rotburgers2d", "navier"))), "equation.kind");
        let text = HEADLINE.replace("output.dir = out\n", "initial.kind = snapshot\ninitial.path = /nonexistent.rbsn\noutput.dir = o\n");
        assert_eq!(reason_field(parse(&text)), "initial.path");
    }

    #[test]
    fn kse_config() {
        let text = "equation.kind = rotkse2d\nequation.lambda = 4\nequation.dt = 1e-3\nequation.t_end = 10\n\
                    grid.n = 128\ninitial.kind = profile\ninitial.profile = random\ninitial.seed = 3\n\
                    initial.kmax = 4\ninitial.amplitude = 0.01\noutput.dir = kse\nequation.max_tail_ratio = none\n";
        let c = parse(text).unwrap();
        match c.equation {
            Equation::Kse(k) => {
                assert_eq!(k.lambda, 4.0);
                assert!(k.nonlinear);
                assert_eq!(k.guard.max_tail_ratio, None);
                assert_eq!(k.guard.max_speed, f64::INFINITY);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(reason_field(parse(&format!("{text}forcing.kind = none\n"))), "forcing.kind");
    }
}
