//! Gate-level phase-point circuits against the dense operators.

use qscatter::phasespace::{phase_point_unitary, wigner_direct, PhasePoint};
use qscatter::random::{random_density, seeded_rng};
use qscatter::scattering::scatter_through;
use qscatter::synthesis::synth_phase_point_circuit;
use rand::Rng;
use serde_json::Value;

fn fixture(name: &str) -> Value {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gate_counts_match_fixture() {
    let expected = fixture("gate_counts_n4.json");
    let n = expected["n"].as_u64().unwrap() as usize;
    let points = expected["points"].as_array().unwrap();
    assert_eq!(points.len(), n * n);
    for entry in points {
        let (q, p) = (
            entry["q"].as_u64().unwrap() as usize,
            entry["p"].as_u64().unwrap() as usize,
        );
        let seq = synth_phase_point_circuit(PhasePoint::new(q, p, n).unwrap()).unwrap();
        assert_eq!(
            seq.len() as u64,
            entry["total"].as_u64().unwrap(),
            "total at ({q},{p})"
        );
        let counts = entry["counts"].as_object().unwrap();
        assert_eq!(seq.counts().len(), counts.len(), "kinds at ({q},{p})");
        for (kind, count) in seq.counts() {
            assert_eq!(
                Some(count as u64),
                counts[kind].as_u64(),
                "{kind} at ({q},{p})"
            );
        }
    }
}

#[test]
fn eight_dimensional_random_points() {
    let n = 8;
    let mut rng = seeded_rng(88);
    let rho = random_density(n, &mut rng);
    let w = wigner_direct(&rho).unwrap();
    for _ in 0..16 {
        let (q, p) = (rng.random_range(0..2 * n), rng.random_range(0..2 * n));
        let alpha = PhasePoint::new(q, p, n).unwrap();
        let seq = synth_phase_point_circuit(alpha).unwrap();
        assert!(
            seq.verify_against(&phase_point_unitary(alpha)).unwrap() < 1e-10,
            "({q},{p})"
        );
        let out = scatter_through(&rho, seq.circuit()).unwrap();
        assert!((out.sigma_z / (2 * n) as f64 - w.get(q, p)).abs() < 1e-10);
        assert!(out.sigma_x.abs() < 1e-10);
    }
}
