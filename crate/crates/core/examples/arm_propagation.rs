//! Propagate both arms at one (b1, bz) point and inspect the final states.
//!
//! cargo run --release --example arm_propagation -- 1.2 0.05 200

use geomphase::phase::pancharatnam;
use geomphase::spinsys::{
    evolve_arms, initial_state, FieldParams, PropagationSettings, SamplingRule,
};

fn main() -> geomphase::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let (b1, bz, beta) = match args[..] {
        [b1, bz, beta, ..] => (b1, bz, beta),
        _ => (1.2, 0.05, 200.0),
    };
    let params = FieldParams::new(b1, bz, beta);
    println!("b1={b1} bz={bz} beta={beta} gamma={}", params.gamma());
    println!(
        "starting state: {:?}",
        initial_state(&params)?.amplitudes().as_slice()
    );

    for rule in [SamplingRule::LeftEndpoint, SamplingRule::Midpoint] {
        for n in [2500, 5000, 10_000, 20_000] {
            let settings = PropagationSettings {
                sampling_rule: rule,
                ..PropagationSettings::default().with_steps(n)
            };
            let (a1, a2) = evolve_arms(&params, &settings)?;
            let r = pancharatnam(&a1.state, &a2.state)?;
            println!(
                "{rule:?} n={n:>6}: c={:.9} alpha={:+.9} |psi1|-1={:.1e}",
                r.modulus_c,
                r.alpha_wrapped,
                a1.state.norm() - 1.0
            );
        }
    }
    Ok(())
}
