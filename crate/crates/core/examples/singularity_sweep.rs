//! Map of the overlap modulus around S1; the dark cell marks the point where
//! the two arm states become orthogonal.
//!
//! cargo run --release --example singularity_sweep

use geomphase::circuits::sweep_plane;
use geomphase::spinsys::PropagationSettings;

fn main() -> geomphase::Result<()> {
    let settings = PropagationSettings::default();
    let grid = sweep_plane((0.5, 1.5), (-0.1, 0.1), (21, 21), 200.0, 1, &settings)?;
    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    for j in (0..grid.ny).rev() {
        let row: String = (0..grid.nx)
            .map(|i| match grid.cell(i, j).modulus_c {
                Some(c) => shades[((c / 2.0) * 9.0).round().clamp(0.0, 9.0) as usize],
                None => '?',
            })
            .collect();
        println!("{:+.2} |{row}|", grid.cell(0, j).bz);
    }
    if let Some((_, cell)) = grid.min_modulus() {
        println!(
            "minimum c = {:.4} at ({}, {})",
            cell.modulus_c.unwrap_or(f64::NAN),
            cell.b1,
            cell.bz
        );
    }
    Ok(())
}
