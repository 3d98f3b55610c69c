//! Prints per-kind gate counts of the synthesized phase-point circuits on
//! the N×N subgrid as JSON.
//!
//! Usage: cargo run -p qscatter --example gate_counts -- [N]

use qscatter::phasespace::PhasePoint;
use qscatter::synthesis::synth_phase_point_circuit;
use serde_json::{json, Map, Value};

fn main() -> qscatter::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map_or(Ok(4), |s| s.parse())
        .map_err(|e| qscatter::Error::Parse(format!("{e}")))?;
    let mut points = Vec::new();
    for q in 0..n {
        for p in 0..n {
            let seq = synth_phase_point_circuit(PhasePoint::new(q, p, n)?)?;
            let counts: Map<String, Value> = seq
                .counts()
                .into_iter()
                .map(|(k, v)| (k.to_string(), json!(v)))
                .collect();
            points.push(json!({"q": q, "p": p, "total": seq.len(), "counts": counts}));
        }
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({"n": n, "points": points}))?
    );
    Ok(())
}
