//! File formats: JSON states, density matrices and reports; CSV curves.
//!
//! Complex numbers are `[re, im]` pairs. A state file is
//! `{"n_qubits": n, "amplitudes": [[re, im], ...]}` and a density file is
//! `{"n_qubits": n, "matrix": [[[re, im], ...], ...]}` (row-major).

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::charcurve::{CharacteristicCurve, ConvexCurve};
use crate::error::{Error, Result};
use crate::pencil::ProjectivePoint;
use crate::roof::{Decomposition, RoofCertificate};
use crate::states::{DensityMatrix, PureState};
use crate::zeropoly::{ZeroInterval, ZeroPolytope};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    n_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityFile {
    n_qubits: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

/// Parses a state file. Amplitudes must already be normalized.
pub fn parse_state(text: &str) -> Result<PureState> {
    let file: StateFile = parse_json(text, "state file")?;
    let dim = 1usize.checked_shl(file.n_qubits as u32).unwrap_or(0);
    if file.amplitudes.len() != dim {
        return Err(Error::Parse(format!(
            "state file: field `amplitudes` has {} entries, expected 2^{} = {dim}",
            file.amplitudes.len(),
            file.n_qubits
        )));
    }
    let state = PureState::new(file.n_qubits, file.amplitudes.into_iter().map(complex).collect())?;
    if (state.norm_sqr() - 1.0).abs() > crate::tangles::NORMALIZATION_TOL {
        return Err(Error::Normalization {
            norm_sqr: state.norm_sqr(),
        });
    }
    Ok(state)
}

pub fn parse_density(text: &str) -> Result<DensityMatrix> {
    let file: DensityFile = parse_json(text, "density file")?;
    let dim = 1usize.checked_shl(file.n_qubits as u32).unwrap_or(0);
    if file.matrix.len() != dim {
        return Err(Error::Parse(format!(
            "density file: field `matrix` has {} rows, expected {dim}",
            file.matrix.len()
        )));
    }
    if let Some((i, row)) = file.matrix.iter().enumerate().find(|(_, r)| r.len() != dim) {
        return Err(Error::Parse(format!(
            "density file: row {i} of `matrix` has {} entries, expected {dim}",
            row.len()
        )));
    }
    let m = DMatrix::from_fn(dim, dim, |i, j| complex(file.matrix[i][j]));
    DensityMatrix::new(file.n_qubits, m)
}

fn read_text(path: &Path) -> Result<String> {
    let mut text = String::new();
    std::fs::File::open(path)?.read_to_string(&mut text)?;
    Ok(text)
}

pub fn read_state(path: impl AsRef<Path>) -> Result<PureState> {
    parse_state(&read_text(path.as_ref())?)
}

pub fn read_density(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    parse_density(&read_text(path.as_ref())?)
}

pub fn state_json(state: &PureState) -> Value {
    json!(StateFile {
        n_qubits: state.n_qubits(),
        amplitudes: state.amplitudes().iter().cloned().map(pair).collect(),
    })
}

pub fn density_json(rho: &DensityMatrix) -> Value {
    let m = rho.matrix();
    json!(DensityFile {
        n_qubits: rho.n_qubits(),
        matrix: (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect())
            .collect(),
    })
}

pub fn decomposition_json(dec: &Decomposition) -> Value {
    json!({
        "weights": dec.weights,
        "states": dec.states.iter().map(state_json).collect::<Vec<_>>(),
    })
}

pub fn certificate_json(cert: &RoofCertificate) -> Value {
    json!({
        "p": cert.p,
        "lower": cert.lower,
        "upper": cert.upper,
        "gap": cert.gap,
        "status": cert.status,
        "reconstruction_error": cert.reconstruction_error,
        "decomposition": decomposition_json(&cert.decomposition),
    })
}

pub fn zeropoly_json(polytope: &ZeroPolytope, interval: &ZeroInterval) -> Value {
    let corners: Vec<Value> = polytope
        .corners
        .iter()
        .map(|c| {
            let z = match c.root {
                ProjectivePoint::Finite(z) => json!([z.re, z.im]),
                ProjectivePoint::Infinity => json!("inf"),
            };
            json!({
                "z": z,
                "multiplicity": c.multiplicity,
                "q": c.weight,
                "phi": c.phase,
                "amplitudes": state_json(&c.state)["amplitudes"],
                "bloch": c.bloch,
            })
        })
        .collect();
    json!({
        "degree": polytope.degree,
        "corners": corners,
        "intervals": interval.intervals,
    })
}

/// One line of a curve file.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub q: f64,
    pub tau_tilde: f64,
    pub phi_star: f64,
    pub tau_star: f64,
    /// `τ(q, φ)` for each requested phase.
    pub tau_phi: Vec<f64>,
}

/// Grid samples plus the refined hull vertices, sorted by `q`. Including the
/// vertices lets a reader rebuild the same envelope from the file.
pub fn curve_rows(curve: &CharacteristicCurve, hull: &ConvexCurve, phases: &[f64]) -> Vec<CurveRow> {
    let m = curve.minimizer();
    let row = |q: f64, tau_tilde: f64, phi_star: f64| CurveRow {
        q,
        tau_tilde,
        phi_star,
        tau_star: hull.evaluate(q),
        tau_phi: phases.iter().map(|&phi| m.tangle_at(q, phi)).collect(),
    };
    let mut rows: Vec<CurveRow> = curve
        .samples
        .iter()
        .map(|s| row(s.q, s.tau_tilde, s.phi_star))
        .collect();
    for &(q, _) in &hull.vertices {
        if curve.samples.iter().all(|s| s.q != q) {
            let (tau, phi) = m.minimize(q);
            rows.push(row(q, tau, phi));
        }
    }
    rows.sort_by(|a, b| a.q.total_cmp(&b.q));
    rows
}

fn phase_column(phi: f64) -> String {
    format!("tau_phi_{phi:.16e}")
}

pub fn write_curve_csv<W: Write>(rows: &[CurveRow], phases: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["q".to_string(), "tau_tilde".into(), "phi_star".into(), "tau_star".into()];
    header.extend(phases.iter().map(|&p| phase_column(p)));
    w.write_record(&header).map_err(csv_error)?;
    for r in rows {
        let mut fields = vec![r.q, r.tau_tilde, r.phi_star, r.tau_star];
        fields.extend(&r.tau_phi);
        w.write_record(fields.iter().map(|x| format!("{x:.16e}")))
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("curve file: {e}"))
}

/// Reads a file written by [`write_curve_csv`]. Extra `tau_phi_*` columns
/// are collected in order.
pub fn read_curve_csv<R: Read>(input: R) -> Result<Vec<CurveRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_error)?.clone();
    let expected = ["q", "tau_tilde", "phi_star", "tau_star"];
    for (k, name) in expected.iter().enumerate() {
        if header.get(k) != Some(name) {
            return Err(Error::Parse(format!(
                "curve file: column {k} is {:?}, expected {name:?}",
                header.get(k).unwrap_or("")
            )));
        }
    }
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let values = record
            .iter()
            .enumerate()
            .map(|(k, f)| {
                f.trim().parse::<f64>().map_err(|e| {
                    Error::Parse(format!(
                        "curve file line {}: column {:?}: {e}",
                        line + 2,
                        header.get(k).unwrap_or("")
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(CurveRow {
            q: values[0],
            tau_tilde: values[1],
            phi_star: values[2],
            tau_star: values[3],
            tau_phi: values[4..].to_vec(),
        });
    }
    Ok(rows)
}

pub fn curve_json(rows: &[CurveRow], phases: &[f64]) -> Value {
    json!({
        "phases": phases,
        "rows": rows.iter().map(|r| json!({
            "q": r.q,
            "tau_tilde": r.tau_tilde,
            "phi_star": r.phi_star,
            "tau_star": r.tau_star,
            "tau_phi": r.tau_phi,
        })).collect::<Vec<_>>(),
    })
}
