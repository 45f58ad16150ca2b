//! On-disk formats: binary snapshots and CSV diagnostics.
//!
//! A snapshot is a 43-byte header followed by the component payload:
//!
//! ```text
//! "RBSN" | version u8 = 1 | dim u8 | ncomp u8 | n u32 | t f64 | ν f64 | γ f64 | λ f64
//! ```
//!
//! then `ncomp · n^dim` binary64 values, component by component, x fastest.
//! All multi-byte values are little-endian.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::diagnostics::{DiagnosticsRecord, Spectrum};
use crate::error::{Error, Result};
use crate::field::{RealField, VectorField};
use crate::grid::Grid;

pub const MAGIC: &[u8; 4] = b"RBSN";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 4 + 3 + 4 + 4 * 8;

/// Physical parameters stored alongside a field.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SnapshotParams {
    pub t: f64,
    pub nu: f64,
    pub gamma: f64,
    pub lambda: f64,
}

/// A decoded snapshot whose dimension is only known at run time.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotFile {
    pub dim: u8,
    pub ncomp: u8,
    pub n: u32,
    pub params: SnapshotParams,
    pub payload: Vec<f64>,
}

impl SnapshotFile {
    pub fn from_field<const D: usize>(u: &VectorField<D>, params: SnapshotParams) -> Self {
        let n = u.grid().n();
        let mut payload = Vec::with_capacity(D * u.grid().len());
        for c in u.components() {
            payload.extend_from_slice(c.values());
        }
        SnapshotFile {
            dim: D as u8,
            ncomp: D as u8,
            n: n as u32,
            params,
            payload,
        }
    }

    /// Reinterprets the payload as a `D`-dimensional vector field.
    pub fn to_field<const D: usize>(&self) -> Result<VectorField<D>> {
        if self.dim as usize != D || self.ncomp as usize != D {
            return Err(Error::Domain(format!(
                "snapshot holds {} components in {}D, expected a {D}D vector field",
                self.ncomp, self.dim
            )));
        }
        let grid = Grid::<D>::new(self.n as usize)?;
        let len = grid.len();
        let comps: Vec<RealField<D>> = self
            .payload
            .chunks_exact(len)
            .map(|c| RealField::from_values(grid, c.to_vec()))
            .collect::<Result<_>>()?;
        let comps: [RealField<D>; D] = comps.try_into().map_err(|v: Vec<_>| Error::SizeMismatch {
            expected: D,
            got: v.len(),
        })?;
        VectorField::from_components(comps)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.payload.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&[VERSION, self.dim, self.ncomp]);
        out.extend_from_slice(&self.n.to_le_bytes());
        for v in [self.params.t, self.params.nu, self.params.gamma, self.params.lambda] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in &self.payload {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Decodes `bytes`; `path` only labels errors.
    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Format {
            path: path.to_path_buf(),
            reason,
        };
        if bytes.len() < HEADER_LEN {
            return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
        }
        if &bytes[..4] != MAGIC {
            return Err(bad(format!("bad magic {:?}", &bytes[..4])));
        }
        if bytes[4] != VERSION {
            return Err(bad(format!("unsupported version {}", bytes[4])));
        }
        let (dim, ncomp) = (bytes[5], bytes[6]);
        if !(dim == 2 || dim == 3) {
            return Err(bad(format!("dimension {dim} is not 2 or 3")));
        }
        let n = u32::from_le_bytes(bytes[7..11].try_into().unwrap());
        let f = |at: usize| f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
        let params = SnapshotParams {
            t: f(11),
            nu: f(19),
            gamma: f(27),
            lambda: f(35),
        };
        let count = (ncomp as u64)
            .checked_mul((n as u64).pow(dim as u32))
            .ok_or_else(|| bad("payload size overflows".into()))?;
        let body = &bytes[HEADER_LEN..];
        if body.len() as u64 != count * 8 {
            return Err(bad(format!(
                "payload is {} bytes, header implies {}",
                body.len(),
                count * 8
            )));
        }
        let payload = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(SnapshotFile {
            dim,
            ncomp,
            n,
            params,
            payload,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes, path)
    }
}

pub fn write_snapshot<const D: usize>(path: &Path, u: &VectorField<D>, params: SnapshotParams) -> Result<()> {
    SnapshotFile::from_field(u, params).write(path)
}

pub fn read_snapshot<const D: usize>(path: &Path) -> Result<(VectorField<D>, SnapshotParams)> {
    let s = SnapshotFile::read(path)?;
    Ok((s.to_field()?, s.params))
}

/// Column names of the diagnostics CSV, one per record field.
pub const DIAGNOSTICS_HEADER: [&str; 17] = [
    "step",
    "t",
    "l2",
    "grad_l2",
    "div_l2",
    "curl_l2",
    "sup",
    "mean_1",
    "mean_2",
    "mean_3",
    "helicity",
    "forcing_work",
    "energy_residual",
    "rho0_margin",
    "rhoinf_margin",
    "kse_margin",
    "tail_ratio",
];

/// 17 significant digits: enough to round-trip every binary64.
fn fmt_f64(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").unwrap();
}

fn fmt_opt(out: &mut String, v: Option<f64>) {
    if let Some(v) = v {
        fmt_f64(out, v);
    }
}

pub fn diagnostics_csv(records: &[DiagnosticsRecord]) -> String {
    let mut out = DIAGNOSTICS_HEADER.join(",");
    out.push('\n');
    for r in records {
        write!(out, "{}", r.step).unwrap();
        for v in [r.t, r.l2, r.grad_l2, r.div_l2, r.curl_l2, r.sup] {
            out.push(',');
            fmt_f64(&mut out, v);
        }
        for i in 0..3 {
            out.push(',');
            fmt_opt(&mut out, r.mean.get(i).copied());
        }
        for v in [r.helicity, Some(r.forcing_work), r.energy_residual] {
            out.push(',');
            fmt_opt(&mut out, v);
        }
        for v in [r.rho0_margin, r.rhoinf_margin, r.kse_margin] {
            out.push(',');
            fmt_opt(&mut out, v);
        }
        out.push(',');
        fmt_f64(&mut out, r.tail_ratio);
        out.push('\n');
    }
    out
}

pub fn parse_diagnostics_csv(text: &str, path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let bad = |line: usize, reason: String| Error::Format {
        path: path.to_path_buf(),
        reason: format!("line {line}: {reason}"),
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file".into()))?;
    if header != DIAGNOSTICS_HEADER.join(",") {
        return Err(bad(1, format!("unexpected header {header:?}")));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let ln = i + 2;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != DIAGNOSTICS_HEADER.len() {
            return Err(bad(ln, format!("{} cells, expected {}", cells.len(), DIAGNOSTICS_HEADER.len())));
        }
        let opt = |j: usize| -> Result<Option<f64>> {
            if cells[j].is_empty() {
                return Ok(None);
            }
            cells[j]
                .parse::<f64>()
                .map(Some)
                .map_err(|e| bad(ln, format!("{}: {e}", DIAGNOSTICS_HEADER[j])))
        };
        let req = |j: usize| -> Result<f64> {
            opt(j)?.ok_or_else(|| bad(ln, format!("{} is empty", DIAGNOSTICS_HEADER[j])))
        };
        let step = cells[0].parse().map_err(|e| bad(ln, format!("step: {e}")))?;
        let mean = (7..10).map(opt).collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
        records.push(DiagnosticsRecord {
            step,
            t: req(1)?,
            l2: req(2)?,
            grad_l2: req(3)?,
            div_l2: req(4)?,
            curl_l2: req(5)?,
            sup: req(6)?,
            mean,
            helicity: opt(10)?,
            forcing_work: req(11)?,
            energy_residual: opt(12)?,
            rho0_margin: opt(13)?,
            rhoinf_margin: opt(14)?,
            kse_margin: opt(15)?,
            tail_ratio: req(16)?,
        });
    }
    Ok(records)
}

/// `k,E_k` rows for one spectrum.
pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    let mut out = String::from("k,E_k\n");
    for (k, e) in spectrum.iter().enumerate() {
        write!(out, "{k},").unwrap();
        fmt_f64(&mut out, *e);
        out.push('\n');
    }
    out
}

/// `step,t,k,E_k` rows for a spectrum time series.
pub fn spectra_csv(spectra: &[(usize, f64, Spectrum)]) -> String {
    let mut out = String::from("step,t,k,E_k\n");
    for (step, t, spectrum) in spectra {
        for (k, e) in spectrum.iter().enumerate() {
            write!(out, "{step},").unwrap();
            fmt_f64(&mut out, *t);
            write!(out, ",{k},").unwrap();
            fmt_f64(&mut out, *e);
            out.push('\n');
        }
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2;

    fn sample_record() -> DiagnosticsRecord {
        DiagnosticsRecord {
            step: 7,
            t: 0.1 + 0.2,
            l2: std::f64::consts::PI,
            grad_l2: 1e-300,
            div_l2: 0.0,
            curl_l2: -0.0,
            sup: f64::MIN_POSITIVE,
            mean: vec![1.0 / 3.0, -2.0 / 7.0],
            helicity: None,
            forcing_work: 5e-324,
            energy_residual: Some(-1.25e-17),
            rho0_margin: None,
            rhoinf_margin: Some(12.5),
            kse_margin: None,
            tail_ratio: 3.3e-14,
        }
    }

    #[test]
    fn header_is_43_bytes() {
        assert_eq!(HEADER_LEN, 43);
        let g = Grid2::new(8).unwrap();
        let s = SnapshotFile::from_field(&VectorField::zeros(g), SnapshotParams::default());
        assert_eq!(s.to_bytes().len(), 43 + 2 * 64 * 8);
    }

    #[test]
    fn snapshot_round_trip_is_byte_exact() {
        let g = Grid2::new(8).unwrap();
        let u = VectorField::from_fn(g, |x| [x[0].sin() * 1.0 / 3.0, (x[1] * 2.0).cos()]);
        let p = SnapshotParams {
            t: 0.123,
            nu: 1e-3,
            gamma: 0.5,
            lambda: 4.0,
        };
        let bytes = SnapshotFile::from_field(&u, p).to_bytes();
        let back = SnapshotFile::from_bytes(&bytes, Path::new("mem")).unwrap();
        assert_eq!(back.params, p);
        let v: VectorField<2> = back.to_field().unwrap();
        assert_eq!(v, u);
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn corrupt_snapshots_are_rejected() {
        let g = Grid2::new(8).unwrap();
        let mut bytes = SnapshotFile::from_field(&VectorField::zeros(g), SnapshotParams::default()).to_bytes();
        let p = Path::new("x.rbsn");
        assert!(matches!(SnapshotFile::from_bytes(&bytes[..bytes.len() - 1], p), Err(Error::Format { .. })));
        bytes[4] = 2;
        assert!(matches!(SnapshotFile::from_bytes(&bytes, p), Err(Error::Format { .. })));
        bytes[4] = 1;
        bytes[0] = b'X';
        assert!(matches!(SnapshotFile::from_bytes(&bytes, p), Err(Error::Format { .. })));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let g = Grid2::new(8).unwrap();
        let s = SnapshotFile::from_field(&VectorField::zeros(g), SnapshotParams::default());
        assert!(s.to_field::<3>().is_err());
    }

    #[test]
    fn diagnostics_round_trip_is_bit_exact() {
        let recs = vec![sample_record(), DiagnosticsRecord { step: 8, helicity: Some(-1.0), mean: vec![0.0; 3], ..sample_record() }];
        let text = diagnostics_csv(&recs);
        let back = parse_diagnostics_csv(&text, Path::new("d.csv")).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in recs.iter().zip(&back) {
            assert_eq!(a.step, b.step);
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            assert_eq!(a.curl_l2.to_bits(), b.curl_l2.to_bits());
            assert_eq!(a.forcing_work.to_bits(), b.forcing_work.to_bits());
            assert_eq!(format!("{a:?}"), format!("{b:?}"));
        }
        assert_eq!(diagnostics_csv(&back), text);
    }

    #[test]
    fn spectrum_rows() {
        let text = spectrum_csv(&vec![0.0, 0.5]);
        assert_eq!(text, "k,E_k\n0,0.0000000000000000e0\n1,5.0000000000000000e-1\n");
    }
}
