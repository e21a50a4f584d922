use num_complex::Complex64;

use super::expm::{resolve, spin_representation, su2_step, SeriesWorkspace};
use super::{
    initial_state_branch, ArmSense, CMatrix, ExpMethod, FieldParams, PropagationSettings,
    SpinHamiltonian, SpinState,
};
use crate::error::Result;

/// Result of propagating one arm over the full period.
#[derive(Clone, Debug)]
pub struct ArmEvolution {
    /// Time-ordered product U_{n-1} ... U_1 U_0.
    pub unitary: CMatrix,
    pub initial: SpinState,
    pub state: SpinState,
}

/// Propagate the starting eigenstate through one arm.
pub fn evolve_arm(
    params: &FieldParams,
    arm: ArmSense,
    settings: &PropagationSettings,
) -> Result<ArmEvolution> {
    settings.validate()?;
    let psi0 = initial_state_branch(params, settings.eigen_branch)?;
    let unitary = arm_unitary(params, arm, settings)?;
    let state = SpinState::new(&unitary * psi0.amplitudes());
    Ok(ArmEvolution {
        unitary,
        initial: psi0,
        state,
    })
}

/// Both arms from the same starting state, as (arm 1, arm 2).
pub fn evolve_arms(
    params: &FieldParams,
    settings: &PropagationSettings,
) -> Result<(ArmEvolution, ArmEvolution)> {
    settings.validate()?;
    let psi0 = initial_state_branch(params, settings.eigen_branch)?;
    let run = |arm| -> Result<ArmEvolution> {
        let unitary = arm_unitary(params, arm, settings)?;
        let state = SpinState::new(&unitary * psi0.amplitudes());
        Ok(ArmEvolution {
            unitary,
            initial: psi0.clone(),
            state,
        })
    };
    Ok((run(ArmSense::Arm1)?, run(ArmSense::Arm2)?))
}

fn arm_unitary(
    params: &FieldParams,
    arm: ArmSense,
    settings: &PropagationSettings,
) -> Result<CMatrix> {
    params.validate()?;
    let method = match (settings.exp_method, params.dim()) {
        (ExpMethod::Auto, d) if d > 2 => ExpMethod::SpinRepresentation,
        (ExpMethod::SpinRepresentation, _) => ExpMethod::SpinRepresentation,
        (m, d) => resolve(m, d)?,
    };
    match method {
        ExpMethod::Exact2x2 => Ok(spin_half_product(params, arm, settings)),
        ExpMethod::SpinRepresentation => {
            let u = spin_half_product(params, arm, settings);
            let u = [u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]];
            Ok(spin_representation(&u, params.two_j))
        }
        method => general_product(params, arm, settings, method),
    }
}

/// Spin-1/2 product on plain arrays; H = beta (b . sigma), whatever the
/// spin in `params`.
fn spin_half_product(
    params: &FieldParams,
    arm: ArmSense,
    settings: &PropagationSettings,
) -> CMatrix {
    let dt = settings.dt();
    let beta = params.beta;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut u = [one, zero, zero, one];
    for k in 0..settings.n_steps {
        let [bx, by, bz] = params.field_at(settings.sample_time(k), arm);
        let m = su2_step(beta * bx, beta * by, beta * bz, dt);
        u = [
            m[0] * u[0] + m[1] * u[2],
            m[0] * u[1] + m[1] * u[3],
            m[2] * u[0] + m[3] * u[2],
            m[2] * u[1] + m[3] * u[3],
        ];
    }
    CMatrix::from_row_slice(2, 2, &u)
}

fn general_product(
    params: &FieldParams,
    arm: ArmSense,
    settings: &PropagationSettings,
    method: ExpMethod,
) -> Result<CMatrix> {
    let ham = SpinHamiltonian::new(*params)?;
    let d = params.dim();
    let dt = settings.dt();
    let mut h = CMatrix::zeros(d, d);
    let mut step = CMatrix::zeros(d, d);
    let mut total = CMatrix::identity(d, d);
    let mut tmp = CMatrix::zeros(d, d);
    let mut ws = SeriesWorkspace::new(d);
    for k in 0..settings.n_steps {
        ham.fill(settings.sample_time(k), arm, &mut h);
        match method {
            ExpMethod::Eigendecomposition => {
                step = super::step_unitary_with(&h, dt, ExpMethod::Eigendecomposition)?;
            }
            _ => ws.exp_into(&h, dt, &mut step),
        }
        step.mul_to(&total, &mut tmp);
        std::mem::swap(&mut total, &mut tmp);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinsys::{spin_matrices, SamplingRule};
    use nalgebra::SymmetricEigen;

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    fn unitarity_error(u: &CMatrix) -> f64 {
        max_abs(&(u.adjoint() * u - CMatrix::identity(u.nrows(), u.ncols())))
    }

    /// exp(-i A t) for Hermitian A by direct diagonalisation (test oracle).
    fn expm_oracle(a: &CMatrix, t: f64) -> CMatrix {
        let eig = SymmetricEigen::new(a.clone());
        let d =
            CMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t)));
        &eig.eigenvectors * d * eig.eigenvectors.adjoint()
    }

    #[test]
    fn zero_beta_is_identity() {
        for two_j in 1..=3 {
            let p = FieldParams::new(0.4, 0.2, 0.0).with_spin(two_j);
            let evo = evolve_arm(
                &p,
                ArmSense::Arm1,
                &PropagationSettings::default().with_steps(100),
            )
            .unwrap();
            assert_eq!(evo.state, evo.initial);
        }
    }

    /// At b1 = bz = 0 the field rotates rigidly about z. In the frame
    /// co-rotating with it, H' = 2 beta Sx - arm Sz is constant, so
    /// psi(pi) = exp(-i arm Sz pi) exp(-i H' pi) psi(0).
    #[test]
    fn rotating_frame_solution() {
        let settings = PropagationSettings::default();
        for two_j in [1, 2] {
            let s = spin_matrices(two_j).unwrap();
            for beta in [0.3, 1.0, 4.0, 20.0] {
                for arm in [ArmSense::Arm1, ArmSense::Arm2] {
                    let p = FieldParams::new(0.0, 0.0, beta).with_spin(two_j);
                    let evo = evolve_arm(&p, arm, &settings).unwrap();
                    let a = arm.value();
                    let h_rot =
                        &s.sx * Complex64::new(2.0 * beta, 0.0) - &s.sz * Complex64::new(a, 0.0);
                    let frame =
                        expm_oracle(&(&s.sz * Complex64::new(a, 0.0)), std::f64::consts::PI);
                    let exact = frame
                        * expm_oracle(&h_rot, std::f64::consts::PI)
                        * evo.initial.amplitudes();
                    let overlap = exact.dotc(evo.state.amplitudes()).norm();
                    assert!(
                        overlap > 1.0 - 1e-6,
                        "two_j={two_j} beta={beta} overlap={overlap}"
                    );
                }
            }
        }
    }

    #[test]
    fn general_path_matches_fast_path() {
        let p = FieldParams::new(0.7, 0.3, 15.0);
        let fast = evolve_arm(
            &p,
            ArmSense::Arm2,
            &PropagationSettings::default().with_steps(2000),
        )
        .unwrap();
        for method in [ExpMethod::Eigendecomposition, ExpMethod::ScaledSeries] {
            let settings = PropagationSettings {
                exp_method: method,
                ..PropagationSettings::default().with_steps(2000)
            };
            let slow = evolve_arm(&p, ArmSense::Arm2, &settings).unwrap();
            assert!(
                max_abs(&(&slow.unitary - &fast.unitary)) < 1e-10,
                "{method:?}"
            );
        }
    }

    #[test]
    fn representation_matches_direct_product() {
        for two_j in [2, 3, 4] {
            let p = FieldParams::new(0.9, 0.2, 12.0).with_spin(two_j);
            let base = PropagationSettings::default().with_steps(3000);
            let lifted = evolve_arm(&p, ArmSense::Arm1, &base).unwrap();
            let direct = evolve_arm(
                &p,
                ArmSense::Arm1,
                &PropagationSettings {
                    exp_method: ExpMethod::ScaledSeries,
                    ..base
                },
            )
            .unwrap();
            assert!(
                max_abs(&(&lifted.unitary - &direct.unitary)) < 1e-10,
                "two_j={two_j}"
            );
        }
    }

    #[test]
    fn unitarity_and_norm() {
        for two_j in 1..=3 {
            let p = FieldParams::new(1.2, -0.05, 200.0).with_spin(two_j);
            let evo = evolve_arm(
                &p,
                ArmSense::Arm1,
                &PropagationSettings::default().with_steps(4000),
            )
            .unwrap();
            assert!(unitarity_error(&evo.unitary) < 1e-10);
            assert!((evo.state.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn step_count_convergence_is_monotone() {
        for rule in [SamplingRule::LeftEndpoint, SamplingRule::Midpoint] {
            let p = FieldParams::new(0.3, 0.5, 20.0);
            let run = |n| {
                let settings = PropagationSettings {
                    sampling_rule: rule,
                    ..PropagationSettings::default().with_steps(n)
                };
                evolve_arm(&p, ArmSense::Arm1, &settings)
                    .unwrap()
                    .state
                    .into_inner()
            };
            let gaps: Vec<f64> = [2500, 5000, 10_000]
                .iter()
                .map(|&n| (run(n) - run(2 * n)).norm())
                .collect();
            assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{rule:?}: {gaps:?}");
        }
    }

    #[test]
    fn exact_2x2_rejected_for_spin_one() {
        let p = FieldParams::new(0.0, 0.5, 1.0).with_spin(2);
        let settings = PropagationSettings {
            exp_method: ExpMethod::Exact2x2,
            ..PropagationSettings::default().with_steps(10)
        };
        assert!(evolve_arm(&p, ArmSense::Arm1, &settings).is_err());
    }

    #[test]
    fn propagates_degenerate_start() {
        let p = FieldParams::new(-1.0, 0.0, 1.0);
        assert!(matches!(
            evolve_arm(&p, ArmSense::Arm1, &PropagationSettings::default()),
            Err(crate::Error::DegenerateStart)
        ));
    }
}
