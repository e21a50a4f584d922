//! Spin matrices from ladder operators and their commutators.
//!
//! cargo run --example spin_operators -- 3

use geomphase::spinsys::{spin_matrices, CMatrix};
use num_complex::Complex64;

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn main() -> geomphase::Result<()> {
    let two_j: u32 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(2);
    let s = spin_matrices(two_j)?;
    let i = Complex64::new(0.0, 1.0);
    println!("J = {}/2, dimension {}", two_j, two_j + 1);
    println!(
        "Sz diagonal: {:?}",
        s.sz.diagonal().iter().map(|z| z.re).collect::<Vec<_>>()
    );
    println!("Sx =\n{}", s.sx.map(|z| z.re));
    println!("Sy / i =\n{}", s.sy.map(|z| z.im));

    let comm = |a: &CMatrix, b: &CMatrix| a * b - b * a;
    println!(
        "|[Sx,Sy] - i Sz| = {:.1e}",
        max_abs(&(comm(&s.sx, &s.sy) - &s.sz * i))
    );
    println!(
        "|[Sy,Sz] - i Sx| = {:.1e}",
        max_abs(&(comm(&s.sy, &s.sz) - &s.sx * i))
    );
    println!(
        "|[Sz,Sx] - i Sy| = {:.1e}",
        max_abs(&(comm(&s.sz, &s.sx) - &s.sy * i))
    );

    let j = f64::from(two_j) / 2.0;
    let casimir = &s.sx * &s.sx + &s.sy * &s.sy + &s.sz * &s.sz;
    let expect = CMatrix::identity(s.sz.nrows(), s.sz.nrows()) * Complex64::new(j * (j + 1.0), 0.0);
    println!("|S^2 - J(J+1)| = {:.1e}", max_abs(&(casimir - expect)));
    Ok(())
}
