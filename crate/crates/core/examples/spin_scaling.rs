//! Windings for higher spins around SPQRS at gamma = 40.
//!
//! cargo run --release --example spin_scaling

use geomphase::circuits::{preset_circuit, trace_circuit, Preset};
use geomphase::phase::winding;
use geomphase::spinsys::PropagationSettings;

fn main() -> geomphase::Result<()> {
    let (circuit, _) = preset_circuit(Preset::Spqrs);
    let settings = PropagationSettings::default();
    for two_j in 1..=6 {
        let trace = trace_circuit(&circuit, 40.0, two_j, &settings, false)?;
        println!(
            "J = {two_j}/2: winding {:?}, delta alpha / 2pi = {:+.6}",
            winding(&trace),
            trace.total_change() / std::f64::consts::TAU
        );
    }
    Ok(())
}
