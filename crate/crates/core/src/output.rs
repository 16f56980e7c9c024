//! Artifact writers. Every CSV starts with a `# config_hash=... version=...`
//! comment line; every JSON document carries a `provenance` object.
//!
//! Floats are written in Rust's shortest round-trip form, so values reload
//! bit-exactly and identical runs produce identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::moments::MomentState;
use crate::soliton::{SolitonProfile, StabilityReport};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub version: String,
}

impl Provenance {
    pub fn new(config_hash: impl Into<String>) -> Self {
        Self { config_hash: config_hash.into(), version: CODE_VERSION.to_string() }
    }

    pub fn header_line(&self) -> String {
        format!("# config_hash={} version={}", self.config_hash, self.version)
    }
}

/// Round-trip exact float formatting; non-finite values as `NaN`, `inf`, `-inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:?}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Writes an RFC 4180 table preceded by the provenance comment line.
pub fn write_csv<I, R>(path: &Path, provenance: &Provenance, header: &[&str], rows: I) -> std::io::Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut file = BufWriter::new(File::create(path)?);
    write!(file, "{}\r\n", provenance.header_line())?;
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(file);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row.into_iter().collect::<Vec<_>>())?;
    }
    writer.flush()?;
    Ok(())
}

/// Pretty JSON with a `provenance` field merged into the top-level object.
pub fn write_json<T: Serialize>(path: &Path, provenance: &Provenance, value: &T) -> std::io::Result<()> {
    let mut doc = serde_json::to_value(value)?;
    match doc.as_object_mut() {
        Some(obj) => {
            obj.insert("provenance".into(), serde_json::to_value(provenance)?);
        }
        None => doc = json!({ "value": doc, "provenance": provenance }),
    }
    let mut file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut file, &doc)?;
    writeln!(file)?;
    file.flush()
}

/// `{omega, kind, beta, residual, stable, max_growth_rate}`.
pub fn profile_document(profile: &SolitonProfile, stability: &StabilityReport) -> Value {
    json!({
        "omega": profile.omega,
        "kind": profile.kind,
        "beta": profile.beta,
        "residual": profile.residual,
        "stable": stability.is_stable(),
        "max_growth_rate": stability.max_growth_rate,
    })
}

pub fn write_profile_csv(path: &Path, provenance: &Provenance, profile: &SolitonProfile) -> std::io::Result<()> {
    let rows = profile.beta.iter().enumerate().map(|(k, b)| vec![k.to_string(), fmt_f64(*b)]);
    write_csv(path, provenance, &["site", "beta"], rows)
}

pub fn write_stability_csv(path: &Path, provenance: &Provenance, report: &StabilityReport) -> std::io::Result<()> {
    let rows = report.eigenvalues.iter().map(|l| vec![fmt_f64(l.re), fmt_f64(l.im)]);
    write_csv(path, provenance, &["re", "im"], rows)
}

/// Long-format site table: `(z, k, |alpha_k|^2, delta_n_kk_real)`.
pub fn write_site_trajectory_csv(path: &Path, provenance: &Provenance, states: &[MomentState]) -> std::io::Result<()> {
    let rows = states.iter().flat_map(|s| {
        (0..s.n_sites()).map(move |k| {
            vec![fmt_f64(s.z), k.to_string(), fmt_f64(s.alpha[k].norm_sqr()), fmt_f64(s.delta_n[(k, k)].re)]
        })
    });
    write_csv(path, provenance, &["z", "k", "|alpha_k|^2", "delta_n_kk_real"], rows)
}

fn matrix_rows(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
}

/// Full moment matrices at selected distances; complex numbers as `[re, im]`.
pub fn snapshots_document(states: &[MomentState]) -> Value {
    let snaps: Vec<Value> = states
        .iter()
        .map(|s| {
            json!({
                "z": s.z,
                "quantum_scale": s.quantum_scale,
                "alpha": s.alpha,
                "delta_n": matrix_rows(&s.delta_n),
                "delta_a": matrix_rows(&s.delta_a),
            })
        })
        .collect();
    json!({ "snapshots": snaps })
}

/// Dense `N x N` real matrix under a `site_0, site_1, ...` header row.
pub fn write_matrix_csv(path: &Path, provenance: &Provenance, m: &DMatrix<f64>) -> std::io::Result<()> {
    let header: Vec<String> = (0..m.ncols()).map(|c| format!("site_{c}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (0..m.nrows()).map(|r| m.row(r).iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>());
    write_csv(path, provenance, &header, rows)
}

/// Two-column `(z, value)` series.
pub fn write_series_csv(path: &Path, provenance: &Provenance, name: &str, z: &[f64], values: &[f64]) -> std::io::Result<()> {
    let rows = z.iter().zip(values).map(|(z, v)| vec![fmt_f64(*z), fmt_f64(*v)]);
    write_csv(path, provenance, &["z", name], rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(f64::NAN), "NaN");
        assert_eq!(fmt_opt(None), "");
    }

    #[test]
    fn csv_has_provenance_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let prov = Provenance::new("abc");
        write_series_csv(&path, &prov, "E_N", &[0.0, 0.5], &[0.0, 1.25]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("# config_hash=abc version={CODE_VERSION}"));
        assert_eq!(lines.next().unwrap(), "z,E_N");
        assert_eq!(lines.next().unwrap(), "0.0,0.0");
        assert_eq!(lines.next().unwrap(), "0.5,1.25");
    }

    #[test]
    fn json_carries_provenance() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        write_json(&path, &Provenance::new("h"), &json!({ "x": 1 })).unwrap();
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["x"], 1);
        assert_eq!(v["provenance"]["config_hash"], "h");
    }

    #[test]
    fn snapshot_matrices_are_row_major() {
        let mut s = MomentState::coherent(vec![Complex64::new(1.0, 0.0); 2], 0.1);
        s.delta_n[(0, 1)] = Complex64::new(0.5, -0.25);
        let doc = snapshots_document(&[s]);
        assert_eq!(doc["snapshots"][0]["delta_n"][0][1], json!([0.5, -0.25]));
    }
}
