use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::{CMatrix, ExpMethod};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// max |H - H^dagger|
pub fn hermiticity_deviation(h: &CMatrix) -> f64 {
    let n = h.nrows();
    let mut dev = 0.0_f64;
    for r in 0..n {
        for c in r..n {
            dev = dev.max((h[(r, c)] - h[(c, r)].conj()).norm());
        }
    }
    dev
}

/// exp(-i H dt) with the method picked from the dimension.
pub fn step_unitary(h: &CMatrix, dt: f64) -> Result<CMatrix> {
    step_unitary_with(h, dt, ExpMethod::Auto)
}

pub fn step_unitary_with(h: &CMatrix, dt: f64, method: ExpMethod) -> Result<CMatrix> {
    if !h.is_square() || h.nrows() == 0 {
        return Err(Error::InvalidParameter(
            "H must be a nonempty square matrix".into(),
        ));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    let scale = h.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
    let deviation = hermiticity_deviation(h);
    if !(deviation <= HERMITIAN_TOL * scale) {
        return Err(Error::NonHermitianInput { deviation });
    }
    Ok(match resolve(method, h.nrows())? {
        ExpMethod::Exact2x2 => exp_2x2(h, dt),
        ExpMethod::Eigendecomposition => exp_eigen(h, dt),
        _ => {
            let n = h.nrows();
            let mut out = CMatrix::zeros(n, n);
            SeriesWorkspace::new(n).exp_into(h, dt, &mut out);
            out
        }
    })
}

/// Replace `Auto` by a concrete method and reject impossible combinations.
pub(super) fn resolve(method: ExpMethod, dim: usize) -> Result<ExpMethod> {
    match (method, dim) {
        (ExpMethod::Auto, 2) => Ok(ExpMethod::Exact2x2),
        (ExpMethod::Auto, _) => Ok(ExpMethod::ScaledSeries),
        (ExpMethod::SpinRepresentation, _) => Err(Error::InvalidParameter(
            "the spin representation applies to whole-arm propagation only".into(),
        )),
        (ExpMethod::Exact2x2, d) if d != 2 => Err(Error::InvalidParameter(format!(
            "exact 2x2 exponential requested for dimension {d}"
        ))),
        (m, _) => Ok(m),
    }
}

/// Axis-angle form: H = a0 + a.sigma gives
/// exp(-i H dt) = e^{-i a0 dt} (cos|a|dt - i sin|a|dt (a/|a|).sigma).
fn exp_2x2(h: &CMatrix, dt: f64) -> CMatrix {
    let a0 = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let az = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
    let ax = h[(1, 0)].re;
    let ay = h[(1, 0)].im;
    let u = su2_step(ax, ay, az, dt);
    let global = Complex64::from_polar(1.0, -a0 * dt);
    CMatrix::from_row_slice(2, 2, &u).map(|z| z * global)
}

/// Row-major entries of exp(-i dt (ax sx + ay sy + az sz)) for Pauli matrices.
#[inline]
pub(super) fn su2_step(ax: f64, ay: f64, az: f64, dt: f64) -> [Complex64; 4] {
    let norm = (ax * ax + ay * ay + az * az).sqrt();
    let theta = norm * dt;
    let (sin, cos) = theta.sin_cos();
    // sin(theta) / |a|, with the |a| -> 0 limit dt
    let s = if norm > 0.0 { sin / norm } else { dt };
    [
        Complex64::new(cos, -s * az),
        Complex64::new(-s * ay, -s * ax),
        Complex64::new(s * ay, -s * ax),
        Complex64::new(cos, s * az),
    ]
}

/// Spin-J matrix of the SU(2) element `u` (row-major 2x2), basis
/// m = J, ..., -J. |J, m> is the normalized symmetric monomial
/// x^(J+m) y^(J-m) / sqrt((J+m)! (J-m)!) in the spin-1/2 basis vectors x, y.
pub fn spin_representation(u: &[Complex64; 4], two_j: u32) -> CMatrix {
    let n = two_j as usize;
    let d = n + 1;
    let [a, b, c, dd] = *u;
    let fact: Vec<f64> = (0..=n)
        .scan(1.0, |f, k| {
            if k > 0 {
                *f *= k as f64;
            }
            Some(*f)
        })
        .collect();
    let binom = |n: usize, k: usize| fact[n] / (fact[k] * fact[n - k]);
    let pow = |z: Complex64, k: usize| z.powu(k as u32);
    let mut out = CMatrix::zeros(d, d);
    // column for source exponent p of x (row/column index = n - p)
    for p in 0..=n {
        let q = n - p;
        let norm_in = (fact[p] * fact[q]).sqrt();
        for i in 0..=p {
            for k in 0..=q {
                // x -> a x + c y, y -> b x + dd y
                let coeff = pow(a, i)
                    * pow(c, p - i)
                    * pow(b, k)
                    * pow(dd, q - k)
                    * (binom(p, i) * binom(q, k));
                let p_out = i + k;
                let norm_out = (fact[p_out] * fact[n - p_out]).sqrt();
                out[(n - p_out, n - p)] += coeff * (norm_out / norm_in);
            }
        }
    }
    out
}

fn exp_eigen(h: &CMatrix, dt: f64) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * dt));
    let mut scaled = v.clone();
    for (mut col, p) in scaled.column_iter_mut().zip(phases.iter()) {
        col *= *p;
    }
    scaled * v.adjoint()
}

/// Scratch buffers for the scaling-and-squaring Taylor exponential, so the
/// propagation loop does not allocate per step.
pub(super) struct SeriesWorkspace {
    x: CMatrix,
    term: CMatrix,
    tmp: CMatrix,
}

impl SeriesWorkspace {
    pub(super) fn new(n: usize) -> Self {
        SeriesWorkspace {
            x: CMatrix::zeros(n, n),
            term: CMatrix::zeros(n, n),
            tmp: CMatrix::zeros(n, n),
        }
    }

    /// out = exp(-i H dt)
    pub(super) fn exp_into(&mut self, h: &CMatrix, dt: f64, out: &mut CMatrix) {
        let n = h.nrows();
        // X = -i dt H
        for (x, z) in self.x.iter_mut().zip(h.iter()) {
            *x = Complex64::new(z.im * dt, -z.re * dt);
        }
        let norm1 = (0..n)
            .map(|c| self.x.column(c).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let squarings = if norm1 > 0.5 {
            (norm1 / 0.5).log2().ceil() as i32
        } else {
            0
        };
        if squarings > 0 {
            self.x *= Complex64::new(0.5_f64.powi(squarings), 0.0);
        }

        out.fill_with_identity();
        self.term.fill_with_identity();
        for k in 1..=40 {
            self.term.mul_to(&self.x, &mut self.tmp);
            self.tmp /= Complex64::new(k as f64, 0.0);
            std::mem::swap(&mut self.term, &mut self.tmp);
            *out += &self.term;
            let size = self.term.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
            if size <= 1e-18 {
                break;
            }
        }
        for _ in 0..squarings {
            out.mul_to(out, &mut self.tmp);
            out.copy_from(&self.tmp);
        }
    }
}
