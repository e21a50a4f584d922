//! CSV/JSON output of traces and sweeps, and the circuit file format.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuits::{Circuit, SweepGrid};
use crate::error::{Error, Result};
use crate::phase::PhaseTrace;

pub const CSV_HEADER: &str = "index,b1,bz,c,alpha_wrapped,alpha_unwrapped,oracle_unwrapped";

/// Scientific notation with 17 significant digits; empty when undefined.
fn field(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

fn row(out: &mut String, index: usize, b1: f64, bz: f64, cols: [Option<f64>; 4]) {
    let [c, wrapped, unwrapped, oracle] = cols.map(field);
    writeln!(
        out,
        "{index},{},{},{c},{wrapped},{unwrapped},{oracle}",
        field(Some(b1)),
        field(Some(bz))
    )
    .expect("writing to a String");
}

pub fn trace_to_csv(trace: &PhaseTrace) -> String {
    let mut out = String::with_capacity(160 * (trace.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &trace.samples {
        row(
            &mut out,
            s.index,
            s.b1,
            s.bz,
            [
                Some(s.modulus_c),
                Some(s.alpha_wrapped),
                Some(s.alpha_unwrapped),
                s.oracle_unwrapped,
            ],
        );
    }
    out
}

pub fn trace_to_json(trace: &PhaseTrace) -> Result<String> {
    Ok(serde_json::to_string_pretty(trace)? + "\n")
}

/// Sweep cells in row-major order under the trace header; there is no
/// unwrapped phase on a grid, so that column stays empty.
pub fn sweep_to_csv(grid: &SweepGrid) -> String {
    let mut out = String::with_capacity(128 * (grid.cells.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (i, cell) in grid.cells.iter().enumerate() {
        row(
            &mut out,
            i,
            cell.b1,
            cell.bz,
            [cell.modulus_c, cell.alpha_wrapped, None, None],
        );
    }
    out
}

pub fn sweep_to_json(grid: &SweepGrid) -> Result<String> {
    Ok(serde_json::to_string_pretty(grid)? + "\n")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitFile {
    vertices: Vec<[f64; 2]>,
    points_per_segment: usize,
}

pub fn circuit_from_json(text: &str) -> Result<Circuit> {
    let file: CircuitFile = serde_json::from_str(text)?;
    Circuit::new(
        file.vertices.into_iter().map(|[b1, bz]| (b1, bz)).collect(),
        file.points_per_segment,
    )
}

/// Serialized form drops the name; floats round-trip exactly.
pub fn circuit_to_json(circuit: &Circuit) -> Result<String> {
    let file = CircuitFile {
        vertices: circuit.vertices.iter().map(|&(b1, bz)| [b1, bz]).collect(),
        points_per_segment: circuit.points_per_segment,
    };
    Ok(serde_json::to_string_pretty(&file)? + "\n")
}

/// Load a circuit file, naming the circuit after the file stem.
pub fn load_circuit(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path)?;
    let circuit = circuit_from_json(&text)?;
    Ok(match path.file_stem().and_then(|s| s.to_str()) {
        Some(stem) => circuit.named(stem),
        None => circuit,
    })
}

pub fn write_output(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(Error::from)
}
