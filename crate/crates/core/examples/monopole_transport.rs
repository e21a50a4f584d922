//! A current loop carried around a monopole: thin and thick Dirac strings.
//!
//! cargo run --release --example monopole_transport

use std::f64::consts::PI;

use geomphase::circuits::{preset_circuit, sample_circuit, Preset};
use geomphase::geometry::{monopole_transport_trace, MonopoleScene};

fn main() -> geomphase::Result<()> {
    let (circuit, _) = preset_circuit(Preset::Abcda);
    let points = sample_circuit(&circuit);
    for g in [-0.5, -1.5] {
        for thickness in [0.0, 0.1, 0.5] {
            let scene = MonopoleScene::new(g).with_thickness(thickness);
            let phase = monopole_transport_trace(&points, &scene)?;
            let net = phase[phase.len() - 1] - phase[0];
            println!(
                "g={g:+} thickness={thickness:<3}: net phase {:+.6} pi",
                net / PI
            );
        }
    }
    Ok(())
}
