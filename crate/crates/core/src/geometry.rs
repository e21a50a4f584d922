//! Solid angle of the field cycle seen from the degeneracy, the
//! adiabatic-limit phase oracle built from it, and the Aharonov-Bohm phase of
//! a current loop carried around a Dirac monopole.
//!
//! The field cycle for parameters (b1, bz) is the unit circle centred at
//! (b1, 0, bz) in the plane z = bz. The same circle, read as a position in
//! real space, is the current loop of the monopole problem, with the monopole
//! at the origin.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Global sign relating the oracle to the simulated Pancharatnam phase of
/// the lowest branch, fixed against the simulated SPQRS trace.
pub const ORACLE_SIGN: f64 = 1.0;

/// Default discretisation of a loop.
pub const DEFAULT_LOOP_SAMPLES: usize = 4096;

const MIN_LOOP_SAMPLES: usize = 64;
const CONTACT_TOL: f64 = 1e-9;
const PLANE_TOL: f64 = 1e-12;

/// Unit circle centred at (b1, 0, bz) parallel to the x-y plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopGeometry {
    pub b1: f64,
    pub bz: f64,
    pub n_samples: usize,
    /// Traverse clockwise about +z instead of counterclockwise.
    pub reversed: bool,
}

impl LoopGeometry {
    pub fn new(b1: f64, bz: f64) -> Self {
        LoopGeometry {
            b1,
            bz,
            n_samples: DEFAULT_LOOP_SAMPLES,
            reversed: false,
        }
    }

    pub fn with_samples(mut self, n_samples: usize) -> Self {
        self.n_samples = n_samples;
        self
    }

    pub fn reverse(mut self) -> Self {
        self.reversed = !self.reversed;
        self
    }

    pub fn center(&self) -> Vector3<f64> {
        Vector3::new(self.b1, 0.0, self.bz)
    }

    /// Unit normal given by the traversal sense.
    pub fn normal(&self) -> Vector3<f64> {
        if self.reversed {
            -Vector3::z()
        } else {
            Vector3::z()
        }
    }

    /// Distance from the origin to the circle.
    pub fn clearance(&self) -> f64 {
        (self.b1.abs() - 1.0).hypot(self.bz)
    }

    pub fn points(&self, n: usize) -> Vec<Vector3<f64>> {
        let sense = if self.reversed { -1.0 } else { 1.0 };
        (0..n)
            .map(|k| {
                let theta = sense * TAU * k as f64 / n as f64;
                Vector3::new(self.b1 + theta.cos(), theta.sin(), self.bz)
            })
            .collect()
    }

    fn check(&self) -> Result<()> {
        if self.n_samples < MIN_LOOP_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "loop needs at least {MIN_LOOP_SAMPLES} samples, got {}",
                self.n_samples
            )));
        }
        if !(self.clearance() >= CONTACT_TOL) {
            return Err(Error::DegenerateLoop);
        }
        Ok(())
    }
}

/// Signed solid angle of a closed polygon seen from the origin.
///
/// Fan triangulation from the polygon centroid; each triangle contributes
/// `2 atan2(a.(b x c), abc + (a.b)c + (a.c)b + (b.c)a)`. An observer lying
/// in the polygon's plane and inside it gets 2pi (the value is only defined
/// modulo 4pi there).
pub fn polygon_solid_angle(points: &[Vector3<f64>]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(
            "polygon needs at least 3 points".into(),
        ));
    }
    let n = points.len();
    for i in 0..n {
        if segment_distance(&points[i], &points[(i + 1) % n]) < CONTACT_TOL {
            return Err(Error::DegenerateLoop);
        }
    }
    let apex = points.iter().sum::<Vector3<f64>>() / n as f64;

    // Newell normal; observer in plane when the plane passes through 0.
    let mut normal = Vector3::zeros();
    for i in 0..n {
        normal += points[i].cross(&points[(i + 1) % n]);
    }
    let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if normal.norm() > 0.0 && normal.normalize().dot(&apex).abs() < PLANE_TOL * scale.max(1.0) {
        return Ok(if origin_inside_planar(points, &normal) {
            TAU
        } else {
            0.0
        });
    }

    let a = apex;
    let la = a.norm();
    let mut total = 0.0;
    for i in 0..n {
        let b = points[i];
        let c = points[(i + 1) % n];
        let (lb, lc) = (b.norm(), c.norm());
        let num = a.dot(&b.cross(&c));
        let den = la * lb * lc + a.dot(&b) * lc + a.dot(&c) * lb + b.dot(&c) * la;
        total += 2.0 * num.atan2(den);
    }
    Ok(total)
}

fn segment_distance(p: &Vector3<f64>, q: &Vector3<f64>) -> f64 {
    let d = q - p;
    let len2 = d.norm_squared();
    let t = if len2 > 0.0 {
        (-p.dot(&d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p + d * t).norm()
}

fn origin_inside_planar(points: &[Vector3<f64>], normal: &Vector3<f64>) -> bool {
    // project onto the plane's dominant axes and count the winding
    let k = normal.iamax();
    let (i, j) = ((k + 1) % 3, (k + 2) % 3);
    let n = points.len();
    let mut wind = 0.0;
    for m in 0..n {
        let (p, q) = (points[m], points[(m + 1) % n]);
        wind += (p[i] * q[j] - p[j] * q[i]).atan2(p[i] * q[i] + p[j] * q[j]);
    }
    wind.abs() > PI
}

/// Signed solid angle subtended at the origin by the loop.
///
/// The inscribed n-gon underestimates the circle by O(1/n^2); the n- and
/// 2n-gon values are combined by Richardson extrapolation.
pub fn solid_angle(lp: &LoopGeometry) -> Result<f64> {
    lp.check()?;
    let coarse = polygon_solid_angle(&lp.points(lp.n_samples))?;
    let fine = polygon_solid_angle(&lp.points(2 * lp.n_samples))?;
    // both are 2pi in the in-plane case, and extrapolation keeps that
    Ok(fine + (fine - coarse) / 3.0)
}

fn wrap_4pi(x: f64) -> f64 {
    // into (-2pi, 2pi]
    let r = x.rem_euclid(2.0 * TAU);
    if r > TAU {
        r - 2.0 * TAU
    } else {
        r
    }
}

/// Solid angles along a sequence of loop centres, made continuous by
/// choosing the branch (mod 4pi) nearest the previous value. Starts at the
/// principal value of the first loop.
pub fn unwrapped_solid_angles(samples: &[(f64, f64)]) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = Vec::with_capacity(samples.len());
    for &(b1, bz) in samples {
        let omega = solid_angle(&LoopGeometry::new(b1, bz))?;
        let next = match out.last() {
            None => omega,
            Some(&prev) => prev + wrap_4pi(omega - prev),
        };
        out.push(next);
    }
    Ok(out)
}

/// Adiabatic-limit prediction of the Pancharatnam phase along a circuit:
/// `ORACLE_SIGN * two_j * (Omega_k - Omega_0) / 2`.
pub fn oracle_phase_trace(samples: &[(f64, f64)], two_j: u32) -> Result<Vec<f64>> {
    if two_j == 0 {
        return Err(Error::InvalidSpin(two_j));
    }
    let omega = unwrapped_solid_angles(samples)?;
    let first = omega.first().copied().unwrap_or(0.0);
    Ok(omega
        .iter()
        .map(|o| ORACLE_SIGN * f64::from(two_j) * (o - first) / 2.0)
        .collect())
}

/// Monopole at the origin with an attached Dirac string.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonopoleScene {
    /// g = n/2, signed.
    pub strength: f64,
    /// Unit vector along which the string leaves the origin.
    pub string_direction: [f64; 3],
    /// 0 for an infinitely thin string.
    pub string_thickness: f64,
}

impl MonopoleScene {
    pub fn new(strength: f64) -> Self {
        MonopoleScene {
            strength,
            string_direction: [0.0, 0.0, -1.0],
            string_thickness: 0.0,
        }
    }

    pub fn with_thickness(mut self, thickness: f64) -> Self {
        self.string_thickness = thickness;
        self
    }

    pub fn with_direction(mut self, direction: [f64; 3]) -> Self {
        self.string_direction = direction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let twice = 2.0 * self.strength;
        if !(twice.is_finite() && twice != 0.0 && (twice - twice.round()).abs() < 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "monopole strength must be a nonzero half-integer, got {}",
                self.strength
            )));
        }
        let d = Vector3::from(self.string_direction);
        if !((d.norm() - 1.0).abs() < 1e-9) {
            return Err(Error::InvalidParameter(
                "string direction must be a unit vector".into(),
            ));
        }
        if !(self.string_thickness >= 0.0) || !self.string_thickness.is_finite() {
            return Err(Error::InvalidParameter(
                "string thickness must be >= 0".into(),
            ));
        }
        Ok(())
    }

    fn direction(&self) -> Vector3<f64> {
        Vector3::from(self.string_direction)
    }
}

/// Aharonov-Bohm phase of the loop: g times its solid angle.
pub fn ab_phase(lp: &LoopGeometry, scene: &MonopoleScene) -> Result<f64> {
    scene.validate()?;
    Ok(scene.strength * solid_angle(lp)?)
}

/// Where the string ray meets the loop's plane, if it does.
fn string_hit(lp: &LoopGeometry, d: &Vector3<f64>) -> Option<Vector3<f64>> {
    if d.z.abs() < 1e-15 {
        return None;
    }
    let t = lp.bz / d.z;
    (t > 0.0).then(|| d * t)
}

/// Whether the string passes through the open disk bounded by the loop.
pub fn string_pierces_loop(lp: &LoopGeometry, scene: &MonopoleScene) -> Result<bool> {
    scene.validate()?;
    let Some(hit) = string_hit(lp, &scene.direction()) else {
        return Ok(false);
    };
    let rho = (hit.x - lp.b1).hypot(hit.y);
    if (rho - 1.0).abs() < CONTACT_TOL {
        return Err(Error::StringOnBoundary);
    }
    Ok(rho < 1.0)
}

/// Area of the intersection of a unit disk and a disk of radius r whose
/// centres are `dist` apart, as a fraction of the small disk's area.
fn footprint_overlap(dist: f64, r: f64) -> f64 {
    if dist >= 1.0 + r {
        return 0.0;
    }
    if dist <= (1.0 - r).abs() {
        return if r <= 1.0 { 1.0 } else { 1.0 / (r * r) };
    }
    let alpha = ((dist * dist + 1.0 - r * r) / (2.0 * dist))
        .clamp(-1.0, 1.0)
        .acos();
    let beta = ((dist * dist + r * r - 1.0) / (2.0 * dist * r))
        .clamp(-1.0, 1.0)
        .acos();
    let kite = 0.5
        * ((-dist + 1.0 + r) * (dist + 1.0 - r) * (dist - 1.0 + r) * (dist + 1.0 + r))
            .max(0.0)
            .sqrt();
    (alpha + r * r * beta - kite) / (PI * r * r)
}

/// Fraction of the string's flux passing through the loop disk, signed by
/// the flux direction relative to the loop normal.
fn string_flux_fraction(lp: &LoopGeometry, scene: &MonopoleScene) -> f64 {
    let d = scene.direction();
    let Some(hit) = string_hit(lp, &d) else {
        return 0.0;
    };
    // return flux runs along -d toward the monopole
    let sign = (-d).dot(&lp.normal()).signum();
    let rho = (hit.x - lp.b1).hypot(hit.y);
    sign * footprint_overlap(rho, scene.string_thickness)
}

/// Phase of the loop's two-path interference as the loop is carried through
/// `samples`.
///
/// A thin string changes the phase by 4 pi g = 2 pi n when crossed, which is
/// invisible, so the trace is g times the continuously unwrapped solid angle
/// and a closed circuit around the monopole picks up +-2 n pi. A thick
/// string's flux enters the loop gradually; the phase is then the single
/// valued total flux g (Omega + 4 pi f) and every closed circuit nets zero.
pub fn monopole_transport_trace(samples: &[(f64, f64)], scene: &MonopoleScene) -> Result<Vec<f64>> {
    scene.validate()?;
    let g = scene.strength;
    if scene.string_thickness == 0.0 {
        return Ok(unwrapped_solid_angles(samples)?
            .into_iter()
            .map(|o| g * o)
            .collect());
    }
    samples
        .iter()
        .map(|&(b1, bz)| {
            let lp = LoopGeometry::new(b1, bz);
            let omega = solid_angle(&lp)?;
            Ok(g * (omega + 2.0 * TAU * string_flux_fraction(&lp, scene)))
        })
        .collect()
}
