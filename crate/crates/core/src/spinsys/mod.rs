//! Spin operators, the counter-rotating field Hamiltonian and arm propagation.
//!
//! Units: hbar = 1, |omega| = 1 and B0 = 1, so one arm takes time T = pi and
//! the coupling mu equals the adiabaticity parameter beta. The Hamiltonian
//! seen on an arm is
//!
//! ```text
//! H(t) = 2 beta [ (b1 + cos t) Sx + arm * omega_sign * sin t Sy + bz Sz ]
//! ```
//!
//! which for spin 1/2 (two_j = 1) is exactly beta (sigma . b).

mod expm;
mod propagate;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use expm::{hermiticity_deviation, spin_representation, step_unitary, step_unitary_with};
pub use propagate::{evolve_arm, evolve_arms, ArmEvolution};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Magnitude of the field at t = 0 below which the starting eigenstate is
/// considered undefined.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Which half of the ring a particle travels through.
///
/// Arm 1 sees the field rotate with `+sin t` in y, arm 2 with `-sin t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArmSense {
    Arm1,
    Arm2,
}

impl ArmSense {
    pub fn value(self) -> f64 {
        match self {
            ArmSense::Arm1 => 1.0,
            ArmSense::Arm2 => -1.0,
        }
    }
}

/// Dimensionless Hamiltonian parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    /// x offset of the field circle, B1 / B0.
    pub b1: f64,
    /// z field, Bz / B0.
    pub bz: f64,
    /// mu B0 / (hbar omega).
    pub beta: f64,
    /// n, with spin J = n / 2.
    pub two_j: u32,
    /// Sign of omega T = +-pi.
    pub omega_sign: i8,
}

impl FieldParams {
    /// Spin-1/2 parameters with the default rotation sense.
    pub fn new(b1: f64, bz: f64, beta: f64) -> Self {
        FieldParams {
            b1,
            bz,
            beta,
            two_j: 1,
            omega_sign: 1,
        }
    }

    pub fn with_spin(mut self, two_j: u32) -> Self {
        self.two_j = two_j;
        self
    }

    pub fn with_omega_sign(mut self, omega_sign: i8) -> Self {
        self.omega_sign = omega_sign;
        self
    }

    pub fn at(mut self, b1: f64, bz: f64) -> Self {
        self.b1 = b1;
        self.bz = bz;
        self
    }

    /// gamma = mu Bz / (hbar omega) = bz * beta.
    pub fn gamma(&self) -> f64 {
        self.bz * self.beta
    }

    pub fn spin(&self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.two_j == 0 {
            return Err(Error::InvalidSpin(self.two_j));
        }
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beta must be finite and >= 0, got {}",
                self.beta
            )));
        }
        if !self.b1.is_finite() || !self.bz.is_finite() {
            return Err(Error::InvalidParameter("b1 and bz must be finite".into()));
        }
        if self.omega_sign != 1 && self.omega_sign != -1 {
            return Err(Error::InvalidParameter(format!(
                "omega_sign must be +1 or -1, got {}",
                self.omega_sign
            )));
        }
        Ok(())
    }

    /// Dimensionless field b(t) seen on `arm` at time t.
    pub fn field_at(&self, t: f64, arm: ArmSense) -> [f64; 3] {
        let (sin, cos) = t.sin_cos();
        [
            self.b1 + cos,
            arm.value() * f64::from(self.omega_sign) * sin,
            self.bz,
        ]
    }
}

/// Sample point of the Hamiltonian inside each time step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingRule {
    #[default]
    LeftEndpoint,
    Midpoint,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpMethod {
    /// Closed form for dimension 2. Single steps of larger matrices use the
    /// scaled series; whole-arm propagation uses the spin representation.
    #[default]
    Auto,
    /// Axis-angle closed form; dimension 2 only.
    Exact2x2,
    Eigendecomposition,
    ScaledSeries,
    /// Propagate the spin-1/2 problem and lift the product to spin J.
    /// Exact here because H is linear in the spin operators; whole-arm
    /// propagation only.
    SpinRepresentation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagationSettings {
    pub n_steps: usize,
    pub sampling_rule: SamplingRule,
    pub exp_method: ExpMethod,
    /// Index of the starting eigenstate of H(0), counted from the lowest.
    pub eigen_branch: usize,
}

impl Default for PropagationSettings {
    fn default() -> Self {
        PropagationSettings {
            n_steps: 20_000,
            sampling_rule: SamplingRule::LeftEndpoint,
            exp_method: ExpMethod::Auto,
            eigen_branch: 0,
        }
    }
}

impl PropagationSettings {
    pub fn with_steps(mut self, n_steps: usize) -> Self {
        self.n_steps = n_steps;
        self
    }

    /// Time step; the total evolved time is always pi.
    pub fn dt(&self) -> f64 {
        std::f64::consts::PI / self.n_steps as f64
    }

    /// Time at which H is sampled for step `k`.
    pub fn sample_time(&self, k: usize) -> f64 {
        let dt = self.dt();
        match self.sampling_rule {
            SamplingRule::LeftEndpoint => k as f64 * dt,
            SamplingRule::Midpoint => (k as f64 + 0.5) * dt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::InvalidParameter("n_steps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Normalized spin wavefunction in the |J, m> basis ordered m = J, J-1, ..., -J.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinState(CVector);

impl SpinState {
    pub fn new(amplitudes: CVector) -> Self {
        SpinState(amplitudes)
    }

    pub fn from_slice(amplitudes: &[Complex64]) -> Self {
        SpinState(CVector::from_column_slice(amplitudes))
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    pub fn into_inner(self) -> CVector {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// <self|other>
    pub fn inner(&self, other: &SpinState) -> Complex64 {
        self.0.dotc(&other.0)
    }

    /// Multiply by a global phase e^{i theta}.
    pub fn with_phase(&self, theta: f64) -> SpinState {
        SpinState(&self.0 * Complex64::from_polar(1.0, theta))
    }
}

/// Cartesian spin operators for one value of J.
#[derive(Clone, Debug)]
pub struct SpinMatrices {
    pub sx: CMatrix,
    pub sy: CMatrix,
    pub sz: CMatrix,
}

/// Spin operators of spin J = two_j / 2 from the ladder construction.
pub fn spin_matrices(two_j: u32) -> Result<SpinMatrices> {
    if two_j == 0 {
        return Err(Error::InvalidSpin(two_j));
    }
    let dim = two_j as usize + 1;
    let j = f64::from(two_j) / 2.0;
    let m = |k: usize| j - k as f64;

    let mut raise = DMatrix::<f64>::zeros(dim, dim);
    for k in 1..dim {
        let mk = m(k);
        raise[(k - 1, k)] = (j * (j + 1.0) - mk * (mk + 1.0)).sqrt();
    }
    let lower = raise.transpose();

    let sx = (&raise + &lower).map(|x| Complex64::new(x / 2.0, 0.0));
    // (S+ - S-) / 2i = -i (S+ - S-) / 2
    let sy = (&raise - &lower).map(|x| Complex64::new(0.0, -x / 2.0));
    let sz = CMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new(m(r), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(SpinMatrices { sx, sy, sz })
}

/// Cached spin operators for repeated evaluation of H(t).
#[derive(Clone, Debug)]
pub struct SpinHamiltonian {
    params: FieldParams,
    spin: SpinMatrices,
}

impl SpinHamiltonian {
    pub fn new(params: FieldParams) -> Result<Self> {
        params.validate()?;
        Ok(SpinHamiltonian {
            spin: spin_matrices(params.two_j)?,
            params,
        })
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn at(&self, t: f64, arm: ArmSense) -> CMatrix {
        let d = self.params.dim();
        let mut h = CMatrix::zeros(d, d);
        self.fill(t, arm, &mut h);
        h
    }

    /// Write H(t) into `out` without allocating.
    pub fn fill(&self, t: f64, arm: ArmSense, out: &mut CMatrix) {
        let [bx, by, bz] = self.params.field_at(t, arm);
        let scale = 2.0 * self.params.beta;
        let (sx, sy, sz) = (&self.spin.sx, &self.spin.sy, &self.spin.sz);
        for (i, o) in out.iter_mut().enumerate() {
            *o = (sx[i] * bx + sy[i] * by + sz[i] * bz) * scale;
        }
    }
}

/// H(t) on `arm` for the given parameters.
pub fn hamiltonian_at(params: &FieldParams, t: f64, arm: ArmSense) -> Result<CMatrix> {
    Ok(SpinHamiltonian::new(*params)?.at(t, arm))
}

/// Lowest-energy eigenstate of H(0), phase-fixed so its largest component is
/// real and positive.
pub fn initial_state(params: &FieldParams) -> Result<SpinState> {
    initial_state_branch(params, 0)
}

/// Eigenstate `branch` of H(0), counted upwards from the lowest eigenvalue.
///
/// The eigenvectors are taken from the field direction alone, so beta = 0
/// still yields a well-defined start.
pub fn initial_state_branch(params: &FieldParams, branch: usize) -> Result<SpinState> {
    params.validate()?;
    if branch >= params.dim() {
        return Err(Error::InvalidParameter(format!(
            "eigen branch {branch} out of range for dimension {}",
            params.dim()
        )));
    }
    let bx = params.b1 + 1.0;
    let bz = params.bz;
    if bx.hypot(bz) < DEGENERACY_TOL {
        return Err(Error::DegenerateStart);
    }

    // H(0) / 2 beta = bx Sx + bz Sz is real symmetric.
    let spin = spin_matrices(params.two_j)?;
    let field_op =
        (&spin.sx * Complex64::new(bx, 0.0) + &spin.sz * Complex64::new(bz, 0.0)).map(|z| z.re);
    let eig = nalgebra::SymmetricEigen::new(field_op);
    let mut order: Vec<usize> = (0..params.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let v = eig.eigenvectors.column(order[branch]).into_owned();
    let v = &v / v.norm();

    let max = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let pivot = v
        .iter()
        .position(|x| x.abs() >= max - 1e-12)
        .expect("nonempty eigenvector");
    let v = if v[pivot] < 0.0 { -v } else { v };
    Ok(SpinState(v.map(|x| Complex64::new(x, 0.0))))
}
