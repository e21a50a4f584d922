//! Pancharatnam phase between the two arm states, interference intensity,
//! continuous unwrapping along a circuit and winding extraction.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spinsys::{FieldParams, PropagationSettings, SpinState};

/// Below this |<psi2|psi1>| the relative phase is treated as undefined.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// Largest allowed distance of delta alpha / 2pi from an integer.
pub const WINDING_RESIDUAL_TOL: f64 = 0.05;

/// Map an angle into (-pi, pi].
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Modulus and phase of the interference term 2 <psi2|psi1>.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PancharatnamReading {
    pub modulus_c: f64,
    pub alpha_wrapped: f64,
}

pub fn pancharatnam(psi1: &SpinState, psi2: &SpinState) -> Result<PancharatnamReading> {
    let overlap = psi2.inner(psi1);
    if overlap.norm() < ORTHOGONALITY_TOL {
        return Err(Error::OrthogonalStates { index: None });
    }
    Ok(PancharatnamReading {
        modulus_c: 2.0 * overlap.norm(),
        alpha_wrapped: wrap_phase(overlap.arg()),
    })
}

/// ||psi1 + psi2||^2 = 2 + c cos(alpha) for normalized states.
pub fn intensity(psi1: &SpinState, psi2: &SpinState) -> f64 {
    (psi1.amplitudes() + psi2.amplitudes()).norm_squared()
}

/// Phase-shifter measurement of the relative phase: the setting phi in
/// [0, 2pi) maximizing ||e^{i phi} psi1 + psi2||^2, located on a grid of
/// `n_phases` points and refined by a parabola through the best point and
/// its neighbours. The maximum sits at phi = -alpha.
pub fn interference_scan(psi1: &SpinState, psi2: &SpinState, n_phases: usize) -> Result<f64> {
    if n_phases < 8 {
        return Err(Error::InvalidParameter(format!(
            "n_phases must be >= 8, got {n_phases}"
        )));
    }
    if psi2.inner(psi1).norm() < ORTHOGONALITY_TOL {
        return Err(Error::OrthogonalStates { index: None });
    }
    let step = TAU / n_phases as f64;
    let signal: Vec<f64> = (0..n_phases)
        .map(|k| intensity(&psi1.with_phase(k as f64 * step), psi2))
        .collect();
    let best = (0..n_phases)
        .max_by(|&a, &b| signal[a].total_cmp(&signal[b]))
        .expect("n_phases >= 8");
    let left = signal[(best + n_phases - 1) % n_phases];
    let mid = signal[best];
    let right = signal[(best + 1) % n_phases];
    let curvature = left - 2.0 * mid + right;
    let offset = if curvature < 0.0 {
        0.5 * (left - right) / curvature
    } else {
        0.0
    };
    Ok(((best as f64 + offset) * step).rem_euclid(TAU))
}

/// One point of a phase trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSample {
    pub index: usize,
    pub b1: f64,
    pub bz: f64,
    pub modulus_c: f64,
    pub alpha_wrapped: f64,
    pub alpha_unwrapped: f64,
    pub oracle_unwrapped: Option<f64>,
}

/// Run parameters recorded alongside a trace.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub circuit: Option<String>,
    pub params: Option<FieldParams>,
    pub settings: Option<PropagationSettings>,
    pub refined: bool,
}

/// Continuously unwrapped phase along an ordered sequence of parameter points.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTrace {
    pub samples: Vec<PhaseSample>,
    pub meta: TraceMeta,
}

impl PhaseTrace {
    pub fn new(meta: TraceMeta) -> Self {
        PhaseTrace {
            samples: Vec::new(),
            meta,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Append a reading taken at (b1, bz), choosing the branch of the phase
    /// closest to the previous sample.
    pub fn unwrap_append(&mut self, point: (f64, f64), reading: &PancharatnamReading) {
        let alpha_unwrapped = match self.samples.last() {
            None => reading.alpha_wrapped,
            Some(prev) => {
                prev.alpha_unwrapped + wrap_phase(reading.alpha_wrapped - prev.alpha_wrapped)
            }
        };
        self.samples.push(PhaseSample {
            index: self.samples.len(),
            b1: point.0,
            bz: point.1,
            modulus_c: reading.modulus_c,
            alpha_wrapped: reading.alpha_wrapped,
            alpha_unwrapped,
            oracle_unwrapped: None,
        });
    }

    pub fn alpha_unwrapped(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.alpha_unwrapped).collect()
    }

    /// Total change of the unwrapped phase from first to last sample.
    pub fn total_change(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.alpha_unwrapped - a.alpha_unwrapped,
            _ => 0.0,
        }
    }

    /// Largest |alpha_unwrapped - oracle_unwrapped| over samples that carry
    /// an oracle value.
    pub fn max_oracle_deviation(&self) -> Option<f64> {
        self.samples
            .iter()
            .filter_map(|s| s.oracle_unwrapped.map(|o| (s.alpha_unwrapped - o).abs()))
            .reduce(f64::max)
    }

    /// Same points traversed backwards, re-unwrapped from the new start.
    pub fn reversed(&self) -> PhaseTrace {
        let mut out = PhaseTrace::new(self.meta.clone());
        for s in self.samples.iter().rev() {
            out.unwrap_append(
                (s.b1, s.bz),
                &PancharatnamReading {
                    modulus_c: s.modulus_c,
                    alpha_wrapped: s.alpha_wrapped,
                },
            );
        }
        out
    }
}

/// Free-function form of [`PhaseTrace::unwrap_append`].
pub fn unwrap_append(
    mut trace: PhaseTrace,
    point: (f64, f64),
    reading: &PancharatnamReading,
) -> PhaseTrace {
    trace.unwrap_append(point, reading);
    trace
}

/// Integer winding and its residual from a total phase change.
pub fn winding_of_change(delta: f64) -> Result<(i64, f64)> {
    let ratio = delta / TAU;
    let w = ratio.round();
    let residual = (ratio - w).abs();
    if !(residual < WINDING_RESIDUAL_TOL) {
        return Err(Error::NonQuantizedWinding { ratio, residual });
    }
    Ok((w as i64, residual))
}

/// Number of 2pi turns accumulated over a closed trace.
pub fn winding(trace: &PhaseTrace) -> Result<i64> {
    winding_of_change(trace.total_change()).map(|(w, _)| w)
}
