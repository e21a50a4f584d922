//! Unwrapped phase around the three preset circuits, optionally written as
//! CSV for plotting.
//!
//! cargo run --release --example circuit_trace -- /tmp/traces

use std::path::PathBuf;

use geomphase::circuits::{preset_circuit, trace_circuit, Preset};
use geomphase::io::{trace_to_csv, write_output};
use geomphase::phase::winding;
use geomphase::spinsys::PropagationSettings;

fn main() -> geomphase::Result<()> {
    let out_dir = std::env::args().nth(1).map(PathBuf::from);
    let settings = PropagationSettings::default();
    for preset in Preset::ALL {
        let (circuit, beta) = preset_circuit(preset);
        let trace = trace_circuit(&circuit, beta, 1, &settings, false)?;
        let steps: Vec<f64> = trace
            .samples
            .windows(2)
            .map(|w| (w[1].alpha_unwrapped - w[0].alpha_unwrapped).abs())
            .collect();
        let (k, big) =
            steps.iter().enumerate().fold(
                (0, 0.0),
                |acc, (k, &d)| if d > acc.1 { (k, d) } else { acc },
            );
        println!(
            "{preset} beta={beta}: delta alpha = {:+.6}, winding {:?}, largest step {big:.3} at sample {k}, max |sim - oracle| {:.2e}",
            trace.total_change(),
            winding(&trace),
            trace.max_oracle_deviation().unwrap_or(f64::NAN)
        );
        if let Some(dir) = &out_dir {
            std::fs::create_dir_all(dir)?;
            write_output(
                &dir.join(format!("{}.csv", preset.name().to_lowercase())),
                &trace_to_csv(&trace),
            )?;
        }
    }
    Ok(())
}
