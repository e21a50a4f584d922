//! Build circuits by hand, round-trip them through the JSON format and
//! compare the simulated winding with the enclosed singular points.
//!
//! cargo run --release --example custom_circuit

use geomphase::circuits::{trace_circuit, Circuit};
use geomphase::io::{circuit_from_json, circuit_to_json};
use geomphase::phase::winding;
use geomphase::spinsys::PropagationSettings;

fn main() -> geomphase::Result<()> {
    let circuits = [
        (
            "around S1",
            Circuit::rectangle((0.0, 2.0), (-0.5, 0.5), 50)?,
        ),
        (
            "around S2",
            Circuit::rectangle((-2.0, 0.0), (-0.5, 0.5), 50)?,
        ),
        (
            "around both",
            Circuit::rectangle((-2.0, 2.0), (-0.5, 0.5), 50)?,
        ),
        ("empty", Circuit::rectangle((2.0, 3.0), (-1.0, 1.0), 50)?),
        (
            "figure eight",
            Circuit::new(
                vec![
                    (0.0, 0.0),
                    (2.0, -0.5),
                    (2.0, 0.5),
                    (0.0, 0.0),
                    (-2.0, -0.5),
                    (-2.0, 0.5),
                ],
                40,
            )?,
        ),
    ];
    let settings = PropagationSettings::default().with_steps(8000);
    for (label, circuit) in circuits {
        let json = circuit_to_json(&circuit)?;
        assert_eq!(
            circuit_from_json(&json)?,
            Circuit {
                name: None,
                ..circuit.clone()
            }
        );
        let trace = trace_circuit(&circuit, 40.0, 1, &settings, true)?;
        println!(
            "{label:<13} samples={:>4} enclosed charge {:+} winding {:?}",
            trace.len(),
            circuit.enclosed_charge(),
            winding(&trace)
        );
    }
    Ok(())
}
