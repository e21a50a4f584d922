//! Closed circuits in the (b1, bz) plane and the drivers that trace the
//! simulated phase along them.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{unwrapped_solid_angles, ORACLE_SIGN};
use crate::phase::{
    pancharatnam, wrap_phase, PancharatnamReading, PhaseTrace, TraceMeta, ORTHOGONALITY_TOL,
};
use crate::spinsys::{evolve_arms, FieldParams, PropagationSettings};

/// Guard radius around S1 and S2 inside which a sample is rejected.
pub const SINGULAR_GUARD: f64 = 1e-6;

/// Consecutive wrapped-phase change that triggers bisection.
pub const REFINE_TRIGGER: f64 = std::f64::consts::FRAC_PI_2;

pub const MAX_REFINE_DEPTH: u32 = 8;

/// Preset b1 extent; its midpoint sits on S1.
pub const PRESET_B1_RANGE: (f64, f64) = (0.0, 2.0);

/// gamma = bz * beta shared by all presets.
pub const PRESET_GAMMA: f64 = 20.0;

/// Point where the field circle passes through zero field at t = 0 or t = pi
/// and the two arm states become orthogonal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularPoint {
    pub location: (f64, f64),
    /// Phase winding (in units of two_j turns) picked up per counterclockwise
    /// loop around this point in standard (b1 right, bz up) axes.
    pub charge: i64,
}

pub const S1: SingularPoint = SingularPoint {
    location: (1.0, 0.0),
    charge: 1,
};

pub const S2: SingularPoint = SingularPoint {
    location: (-1.0, 0.0),
    charge: -1,
};

pub const SINGULAR_POINTS: [SingularPoint; 2] = [S1, S2];

/// Closed polygon in (b1, bz); the last vertex connects back to the first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub vertices: Vec<(f64, f64)>,
    pub points_per_segment: usize,
    pub name: Option<String>,
}

impl Circuit {
    pub fn new(vertices: Vec<(f64, f64)>, points_per_segment: usize) -> Result<Self> {
        let c = Circuit {
            vertices,
            points_per_segment,
            name: None,
        };
        c.validate()?;
        Ok(c)
    }

    /// Rectangle traversed (lo, top) -> (hi, top) -> (hi, bottom) -> (lo, bottom),
    /// the vertex order of the presets.
    pub fn rectangle(
        b1_range: (f64, f64),
        bz_range: (f64, f64),
        points_per_segment: usize,
    ) -> Result<Self> {
        let (lo, hi) = b1_range;
        let (bottom, top) = bz_range;
        Circuit::new(
            vec![(lo, top), (hi, top), (hi, bottom), (lo, bottom)],
            points_per_segment,
        )
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(Error::InvalidCircuit(format!(
                "need at least 3 vertices, got {n}"
            )));
        }
        if self.points_per_segment == 0 {
            return Err(Error::InvalidCircuit(
                "points_per_segment must be >= 1".into(),
            ));
        }
        for (i, &(b1, bz)) in self.vertices.iter().enumerate() {
            if !b1.is_finite() || !bz.is_finite() {
                return Err(Error::InvalidCircuit(format!("vertex {i} is not finite")));
            }
            if self.vertices[(i + 1) % n] == (b1, bz) {
                return Err(Error::InvalidCircuit(format!(
                    "vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        Ok(())
    }

    /// Same polygon traversed the other way, from the same starting vertex.
    pub fn reversed(&self) -> Circuit {
        let mut vertices = vec![self.vertices[0]];
        vertices.extend(self.vertices[1..].iter().rev());
        Circuit {
            vertices,
            points_per_segment: self.points_per_segment,
            name: self.name.as_ref().map(|n| format!("{n}-reversed")),
        }
    }

    /// Geometric winding number of the polygon around `point`
    /// (counterclockwise positive in standard axes).
    pub fn winding_about(&self, point: (f64, f64)) -> i64 {
        let (px, py) = point;
        let n = self.vertices.len();
        let mut wn = 0;
        for i in 0..n {
            let (x0, y0) = self.vertices[i];
            let (x1, y1) = self.vertices[(i + 1) % n];
            let side = (x1 - x0) * (py - y0) - (px - x0) * (y1 - y0);
            if y0 <= py {
                if y1 > py && side > 0.0 {
                    wn += 1;
                }
            } else if y1 <= py && side < 0.0 {
                wn -= 1;
            }
        }
        wn
    }

    /// Sum over singular points of charge times winding: the expected phase
    /// winding per unit of two_j.
    pub fn enclosed_charge(&self) -> i64 {
        SINGULAR_POINTS
            .iter()
            .map(|s| s.charge * self.winding_about(s.location))
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    Abcda,
    Efghe,
    Spqrs,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Abcda, Preset::Efghe, Preset::Spqrs];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Abcda => "ABCDA",
            Preset::Efghe => "EFGHE",
            Preset::Spqrs => "SPQRS",
        }
    }

    pub fn beta(self) -> f64 {
        match self {
            Preset::Abcda => 2000.0,
            Preset::Efghe => 200.0,
            Preset::Spqrs => 20.0,
        }
    }

    /// |bz| of the horizontal legs.
    pub fn half_height(self) -> f64 {
        PRESET_GAMMA / self.beta()
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "abcda" => Ok(Preset::Abcda),
            "efghe" => Ok(Preset::Efghe),
            "spqrs" => Ok(Preset::Spqrs),
            _ => Err(Error::InvalidParameter(format!(
                "unknown preset circuit '{s}'"
            ))),
        }
    }
}

/// Preset rectangle around S1 and its beta.
pub fn preset_circuit(preset: Preset) -> (Circuit, f64) {
    let h = preset.half_height();
    let circuit = Circuit::rectangle(PRESET_B1_RANGE, (-h, h), 100)
        .expect("preset rectangles are valid")
        .named(preset.name());
    (circuit, preset.beta())
}

/// Equally spaced points along each segment (start vertex included, end
/// excluded), closed by repeating the first point.
pub fn sample_circuit(circuit: &Circuit) -> Vec<(f64, f64)> {
    let n = circuit.vertices.len();
    let per = circuit.points_per_segment;
    let mut out = Vec::with_capacity(n * per + 1);
    for i in 0..n {
        let (a0, a1) = circuit.vertices[i];
        let (b0, b1) = circuit.vertices[(i + 1) % n];
        for k in 0..per {
            let f = k as f64 / per as f64;
            out.push((a0 + (b0 - a0) * f, a1 + (b1 - a1) * f));
        }
    }
    out.push(out[0]);
    out
}

/// <psi2|psi1> of the two arm states at one parameter point.
pub fn arm_overlap(params: &FieldParams, settings: &PropagationSettings) -> Result<Complex64> {
    let (arm1, arm2) = evolve_arms(params, settings)?;
    Ok(arm2.state.inner(&arm1.state))
}

fn near_singular(p: (f64, f64)) -> bool {
    SINGULAR_POINTS
        .iter()
        .any(|s| (p.0 - s.location.0).hypot(p.1 - s.location.1) < SINGULAR_GUARD)
}

fn read_point(
    template: &FieldParams,
    settings: &PropagationSettings,
    point: (f64, f64),
    index: usize,
) -> Result<PancharatnamReading> {
    if near_singular(point) {
        return Err(Error::OrthogonalStates { index: Some(index) });
    }
    let (arm1, arm2) = evolve_arms(&template.at(point.0, point.1), settings)?;
    pancharatnam(&arm1.state, &arm2.state).map_err(|e| match e {
        Error::OrthogonalStates { .. } => Error::OrthogonalStates { index: Some(index) },
        other => other,
    })
}

/// Bisect (a, b) until every wrapped-phase step is at most the trigger;
/// returns the inserted points in order.
#[allow(clippy::too_many_arguments)]
fn refine_segment(
    template: &FieldParams,
    settings: &PropagationSettings,
    a: ((f64, f64), PancharatnamReading),
    b: ((f64, f64), PancharatnamReading),
    depth: u32,
    index: usize,
    out: &mut Vec<((f64, f64), PancharatnamReading)>,
) -> Result<()> {
    if wrap_phase(b.1.alpha_wrapped - a.1.alpha_wrapped).abs() <= REFINE_TRIGGER {
        return Ok(());
    }
    if depth >= MAX_REFINE_DEPTH {
        return Err(Error::RefinementDepthExceeded { index });
    }
    let mid_point = (0.5 * (a.0 .0 + b.0 .0), 0.5 * (a.0 .1 + b.0 .1));
    let mid = (mid_point, read_point(template, settings, mid_point, index)?);
    refine_segment(template, settings, a, mid, depth + 1, index, out)?;
    out.push(mid);
    refine_segment(template, settings, mid, b, depth + 1, index, out)
}

/// Trace the unwrapped Pancharatnam phase around a circuit for spin
/// two_j / 2 at the given beta.
pub fn trace_circuit(
    circuit: &Circuit,
    beta: f64,
    two_j: u32,
    settings: &PropagationSettings,
    refine: bool,
) -> Result<PhaseTrace> {
    let template = FieldParams::new(0.0, 0.0, beta).with_spin(two_j);
    trace_circuit_with(circuit, &template, settings, refine)
}

/// [`trace_circuit`] with every Hamiltonian parameter except (b1, bz) taken
/// from `template`.
pub fn trace_circuit_with(
    circuit: &Circuit,
    template: &FieldParams,
    settings: &PropagationSettings,
    refine: bool,
) -> Result<PhaseTrace> {
    circuit.validate()?;
    template.validate()?;
    settings.validate()?;
    let points = sample_circuit(circuit);

    // samples are independent; collect keeps the order
    let readings: Vec<PancharatnamReading> = points
        .par_iter()
        .enumerate()
        .map(|(i, &p)| read_point(template, settings, p, i))
        .collect::<Result<_>>()?;

    let mut chain: Vec<((f64, f64), PancharatnamReading)> = Vec::with_capacity(points.len());
    for (i, (&p, &r)) in points.iter().zip(&readings).enumerate() {
        if refine && i > 0 {
            let prev = *chain.last().expect("chain nonempty after first sample");
            refine_segment(template, settings, prev, (p, r), 0, i - 1, &mut chain)?;
        }
        chain.push((p, r));
    }

    let mut trace = PhaseTrace::new(TraceMeta {
        circuit: circuit.name.clone(),
        params: Some(*template),
        settings: Some(*settings),
        refined: refine,
    });
    for (p, r) in &chain {
        trace.unwrap_append(*p, r);
    }

    let final_points: Vec<(f64, f64)> = chain.iter().map(|(p, _)| *p).collect();
    let oracle = branch_oracle(&final_points, template, settings.eigen_branch)?;
    let start = trace.samples[0].alpha_unwrapped;
    for (s, o) in trace.samples.iter_mut().zip(oracle) {
        s.oracle_unwrapped = Some(start + o);
    }
    Ok(trace)
}

/// Oracle phase for an arbitrary starting branch: the state with magnetic
/// quantum number m = -J + branch along the field picks up -m times the
/// solid angle, and reversing the rotation sense swaps the arms.
fn branch_oracle(points: &[(f64, f64)], template: &FieldParams, branch: usize) -> Result<Vec<f64>> {
    let omega = unwrapped_solid_angles(points)?;
    let first = omega[0];
    let factor = (f64::from(template.two_j) - 2.0 * branch as f64) / 2.0;
    let sense = f64::from(template.omega_sign);
    Ok(omega
        .iter()
        .map(|o| ORACLE_SIGN * sense * factor * (o - first))
        .collect())
}

/// Oracle prediction alone along the circuit samples, relative to the
/// first sample; the modulus is that of identical states.
pub fn oracle_trace(
    circuit: &Circuit,
    template: &FieldParams,
    branch: usize,
) -> Result<PhaseTrace> {
    circuit.validate()?;
    template.validate()?;
    let points = sample_circuit(circuit);
    let oracle = branch_oracle(&points, template, branch)?;
    let mut trace = PhaseTrace::new(TraceMeta {
        circuit: circuit.name.clone(),
        params: Some(*template),
        settings: None,
        refined: false,
    });
    for (p, o) in points.iter().zip(oracle) {
        trace.unwrap_append(
            *p,
            &PancharatnamReading {
                modulus_c: 2.0,
                alpha_wrapped: wrap_phase(o),
            },
        );
        trace
            .samples
            .last_mut()
            .expect("just pushed")
            .oracle_unwrapped = Some(o);
    }
    Ok(trace)
}

/// One cell of a parameter-plane sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub b1: f64,
    pub bz: f64,
    /// None when the starting eigenstate is undefined.
    pub modulus_c: Option<f64>,
    /// None when the states are (numerically) orthogonal.
    pub alpha_wrapped: Option<f64>,
}

/// Row-major grid: `cells[i * ny + j]` is (b1_i, bz_j).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn cell(&self, i: usize, j: usize) -> &SweepCell {
        &self.cells[i * self.ny + j]
    }

    /// Cell with the smallest defined modulus.
    pub fn min_modulus(&self) -> Option<(usize, &SweepCell)> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.modulus_c.is_some())
            .min_by(|a, b| a.1.modulus_c.unwrap().total_cmp(&b.1.modulus_c.unwrap()))
    }
}

fn linspace(range: (f64, f64), n: usize, k: usize) -> f64 {
    range.0 + (range.1 - range.0) * k as f64 / (n - 1) as f64
}

/// Pancharatnam readings over a rectangular grid; singular cells are
/// recorded rather than aborting the sweep.
pub fn sweep_plane(
    b1_range: (f64, f64),
    bz_range: (f64, f64),
    grid: (usize, usize),
    beta: f64,
    two_j: u32,
    settings: &PropagationSettings,
) -> Result<SweepGrid> {
    let (nx, ny) = grid;
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidParameter(format!(
            "sweep grid must be at least 2x2, got {nx}x{ny}"
        )));
    }
    let template = FieldParams::new(0.0, 0.0, beta).with_spin(two_j);
    template.validate()?;
    settings.validate()?;

    let cells = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let (b1, bz) = (
                linspace(b1_range, nx, idx / ny),
                linspace(bz_range, ny, idx % ny),
            );
            match arm_overlap(&template.at(b1, bz), settings) {
                Ok(o) => Ok(SweepCell {
                    b1,
                    bz,
                    modulus_c: Some(2.0 * o.norm()),
                    alpha_wrapped: (o.norm() >= ORTHOGONALITY_TOL).then(|| wrap_phase(o.arg())),
                }),
                Err(Error::DegenerateStart) => Ok(SweepCell {
                    b1,
                    bz,
                    modulus_c: None,
                    alpha_wrapped: None,
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepGrid { nx, ny, cells })
}
