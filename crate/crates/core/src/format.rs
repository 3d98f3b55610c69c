//! File formats shared by the CLI and the fixtures.
//!
//! - Matrix: `{"dim": n, "entries": [[re, im], ...]}`, row-major, `n²` pairs.
//! - Circuit: JSON list of `{"kind", "targets", "theta"?, "unitary"?}`.
//! - Wigner grid: CSV `q,p,w` (q-major), JSON, or an ASCII heatmap.
//! - Spectral series: CSV `E,phi,g` or JSON.
//!
//! Every printed number uses [`fmt_sig`]: 12 significant digits, no locale.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, GateOp};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, UnitaryOperator};
use crate::phasespace::WignerGrid;
use crate::spectrometer::{SeriesKind, SpectralSeries};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Heatmap characters from `−1/2N` (first) to `+1/2N` (last); zero maps to
/// the blank in the middle.
pub const HEATMAP_RAMP: [char; 10] = ['#', 'x', '=', '-', '.', ' ', ':', '+', '*', '@'];

/// `%.12g`-style formatting; `-0` prints as `0`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIGNIFICANT_DIGITS as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to what [`fmt_sig`] would print.
pub fn round_sig(x: f64) -> f64 {
    fmt_sig(x).parse().unwrap_or(x)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixFile {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            dim: m.dim(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<MatrixFile> for ComplexMatrix {
    type Error = Error;

    fn try_from(f: MatrixFile) -> Result<Self> {
        let entries = f
            .entries
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::from_entries(f.dim, entries)
    }
}

pub fn parse_matrix(json: &str) -> Result<ComplexMatrix> {
    let file: MatrixFile =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("matrix file: {e}")))?;
    file.try_into()
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string(&MatrixFile::from(m)).expect("plain data serialises")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateRecord {
    pub kind: String,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<MatrixFile>,
}

impl From<&GateOp> for GateRecord {
    fn from(g: &GateOp) -> Self {
        let (theta, unitary) = match &g.kind {
            GateKind::PhaseShift(t) | GateKind::ControlledPhase(t) => (Some(*t), None),
            GateKind::ControlledUnitary(u) => (None, Some(MatrixFile::from(u.matrix()))),
            _ => (None, None),
        };
        Self {
            kind: g.kind.name().to_string(),
            targets: g.targets.clone(),
            theta,
            unitary,
        }
    }
}

impl TryFrom<GateRecord> for GateOp {
    type Error = Error;

    fn try_from(r: GateRecord) -> Result<Self> {
        let theta = |name: &str| {
            r.theta
                .ok_or_else(|| Error::Parse(format!("gate '{name}' needs a 'theta' field")))
        };
        let kind = match r.kind.as_str() {
            "hadamard" => GateKind::Hadamard,
            "pauli_x" => GateKind::PauliX,
            "pauli_y" => GateKind::PauliY,
            "pauli_z" => GateKind::PauliZ,
            "phase_shift" => GateKind::PhaseShift(theta("phase_shift")?),
            "cnot" => GateKind::Cnot,
            "toffoli" => GateKind::Toffoli,
            "controlled_phase" => GateKind::ControlledPhase(theta("controlled_phase")?),
            "controlled_unitary" => {
                let m = r.unitary.ok_or_else(|| {
                    Error::Parse("gate 'controlled_unitary' needs a 'unitary' field".into())
                })?;
                GateKind::ControlledUnitary(UnitaryOperator::new(m.try_into()?)?)
            }
            other => return Err(Error::Parse(format!("unknown gate kind '{other}'"))),
        };
        GateOp::new(kind, r.targets)
    }
}

pub fn circuit_to_json(c: &Circuit) -> String {
    let records: Vec<GateRecord> = c.gates().iter().map(GateRecord::from).collect();
    serde_json::to_string_pretty(&records).expect("plain data serialises")
}

/// Parses a gate list and validates it against a register of `num_qubits`.
pub fn parse_circuit(json: &str, num_qubits: usize) -> Result<Circuit> {
    let records: Vec<GateRecord> =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("circuit file: {e}")))?;
    let gates = records
        .into_iter()
        .map(GateOp::try_from)
        .collect::<Result<Vec<_>>>()?;
    Circuit::from_gates(num_qubits, gates)
}

pub fn grid_to_csv(w: &WignerGrid) -> String {
    let mut out = String::from("q,p,w\n");
    for (q, p, v) in w.points() {
        writeln!(out, "{q},{p},{}", fmt_sig(v)).unwrap();
    }
    out
}

pub fn grid_from_csv(csv: &str) -> Result<WignerGrid> {
    let mut lines = csv
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some(h) if h.trim() == "q,p,w" => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header 'q,p,w', got {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || Error::Parse(format!("grid row {}: '{line}'", i + 1));
        if fields.len() != 3 {
            return Err(bad());
        }
        let q: usize = fields[0].parse().map_err(|_| bad())?;
        let p: usize = fields[1].parse().map_err(|_| bad())?;
        let v: f64 = fields[2].parse().map_err(|_| bad())?;
        rows.push((q, p, v));
    }
    let side = (rows.len() as f64).sqrt() as usize;
    if side * side != rows.len() || side % 2 == 1 {
        return Err(Error::Parse(format!(
            "{} rows do not form a 2N x 2N grid",
            rows.len()
        )));
    }
    let mut values = vec![f64::NAN; rows.len()];
    for (q, p, v) in rows {
        if q >= side || p >= side {
            return Err(Error::Parse(format!(
                "point ({q}, {p}) outside the {side}x{side} grid"
            )));
        }
        values[q * side + p] = v;
    }
    WignerGrid::new(side / 2, values)
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    n: usize,
    /// `values[q][p]`
    values: Vec<Vec<f64>>,
}

pub fn grid_to_json(w: &WignerGrid) -> String {
    let side = w.side();
    let values = (0..side)
        .map(|q| (0..side).map(|p| round_sig(w.get(q, p))).collect())
        .collect();
    serde_json::to_string(&GridJson { n: w.n(), values }).expect("plain data serialises")
}

pub fn grid_from_json(json: &str) -> Result<WignerGrid> {
    let g: GridJson =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("grid file: {e}")))?;
    if g.values.len() != 2 * g.n || g.values.iter().any(|row| row.len() != 2 * g.n) {
        return Err(Error::Parse(format!(
            "grid for N = {} must be {}x{}",
            g.n,
            2 * g.n,
            2 * g.n
        )));
    }
    WignerGrid::new(g.n, g.values.into_iter().flatten().collect())
}

/// Heatmap with `q` across and `p` up (top line is `p = 2N−1`), so the
/// strips of a basis state appear as vertical columns. The scale is fixed
/// at `±1/2N`, the largest possible magnitude.
pub fn grid_to_ascii(w: &WignerGrid) -> String {
    let side = w.side();
    let bound = 1.0 / side as f64;
    let levels = HEATMAP_RAMP.len();
    let mut out = String::new();
    for p in (0..side).rev() {
        for q in 0..side {
            let t = (w.get(q, p) + bound) / (2.0 * bound);
            let idx = ((t * levels as f64).floor().max(0.0) as usize).min(levels - 1);
            out.push(HEATMAP_RAMP[idx]);
        }
        out.push('\n');
    }
    out
}

fn kind_name(kind: SeriesKind) -> &'static str {
    match kind {
        SeriesKind::SpectralDensity => "spectral_density",
        SeriesKind::StructureFunction => "structure_function",
    }
}

pub fn series_to_csv(s: &SpectralSeries) -> String {
    let mut out = String::from("E,phi,g\n");
    for (e, v) in s.bins.iter().enumerate() {
        writeln!(out, "{e},{},{}", fmt_sig(s.phase(e)), fmt_sig(*v)).unwrap();
    }
    out
}

#[derive(Serialize)]
struct SeriesBin {
    #[serde(rename = "E")]
    e: usize,
    phi: f64,
    g: f64,
}

#[derive(Serialize)]
struct SeriesJson {
    kind: &'static str,
    n1: usize,
    terms: usize,
    bins: Vec<SeriesBin>,
}

pub fn series_to_json(s: &SpectralSeries) -> String {
    let bins = s
        .bins
        .iter()
        .enumerate()
        .map(|(e, v)| SeriesBin {
            e,
            phi: round_sig(s.phase(e)),
            g: round_sig(*v),
        })
        .collect();
    serde_json::to_string(&SeriesJson {
        kind: kind_name(s.kind),
        n1: s.n1,
        terms: s.terms(),
        bins,
    })
    .expect("plain data serialises")
}
