//! Solid angle of the field loop and the adiabatic phase it predicts.
//!
//! cargo run --release --example solid_angle_oracle

use std::f64::consts::TAU;

use geomphase::circuits::{preset_circuit, sample_circuit, Preset};
use geomphase::geometry::{oracle_phase_trace, polygon_solid_angle, solid_angle, LoopGeometry};

fn main() -> geomphase::Result<()> {
    println!("axisymmetric loops (b1 = 0):");
    for h in [0.0, 0.1, 1.0, 5.0] {
        let omega = solid_angle(&LoopGeometry::new(0.0, h))?;
        let cap = TAU * (1.0 - h / (1.0 + h * h).sqrt());
        println!("  bz={h:<4} omega={omega:.12} cap={cap:.12}");
    }

    let near = LoopGeometry::new(1.05, 0.02);
    for n in [256, 1024, 4096] {
        let plain = polygon_solid_angle(&near.points(n))?;
        let extrapolated = solid_angle(&near.with_samples(n))?;
        println!("near S1, n={n:>4}: polygon {plain:.10} extrapolated {extrapolated:.10}");
    }

    for preset in Preset::ALL {
        let (c, _) = preset_circuit(preset);
        let oracle = oracle_phase_trace(&sample_circuit(&c), 1)?;
        let marks: Vec<String> = [0, 50, 100, 200, 250, 300, 400]
            .iter()
            .map(|&k| format!("{k}:{:+.3}", oracle[k]))
            .collect();
        println!("{preset}: {}", marks.join(" "));
    }
    Ok(())
}
