//! Read the relative phase two ways: from the overlap directly and by
//! scanning a phase shifter in one arm for maximum intensity.
//!
//! cargo run --release --example interference

use std::f64::consts::TAU;

use geomphase::phase::{intensity, interference_scan, pancharatnam};
use geomphase::spinsys::{evolve_arms, FieldParams, PropagationSettings};

fn main() -> geomphase::Result<()> {
    let settings = PropagationSettings::default();
    println!(
        "{:>6} {:>6} {:>10} {:>10} {:>10} {:>8}",
        "b1", "bz", "c", "alpha", "scan", "I(0)"
    );
    for (b1, bz) in [
        (0.5, 0.1),
        (0.9, 0.1),
        (1.0, 0.1),
        (1.1, 0.1),
        (1.5, 0.1),
        (1.0, -0.1),
    ] {
        let (a1, a2) = evolve_arms(&FieldParams::new(b1, bz, 200.0), &settings)?;
        let r = pancharatnam(&a1.state, &a2.state)?;
        // the shifter maximum sits at -alpha
        let scan = -interference_scan(&a1.state, &a2.state, 360)?;
        let scan = scan - TAU * ((scan - r.alpha_wrapped) / TAU).round();
        println!(
            "{b1:>6} {bz:>6} {:>10.6} {:>+10.6} {:>+10.6} {:>8.5}",
            r.modulus_c,
            r.alpha_wrapped,
            scan,
            intensity(&a1.state, &a2.state)
        );
    }
    Ok(())
}
