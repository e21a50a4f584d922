//! Invariants beyond the acceptance criteria: mirror symmetry, winding
//! quantization, spin scaling, oracle and monopole closure, determinism.

use std::f64::consts::TAU;

use geomphase::circuits::{
    arm_overlap, preset_circuit, sample_circuit, trace_circuit, trace_circuit_with, Circuit, Preset,
};
use geomphase::geometry::{
    monopole_transport_trace, oracle_phase_trace, solid_angle, LoopGeometry, MonopoleScene,
};
use geomphase::phase::{winding, wrap_phase};
use geomphase::spinsys::{FieldParams, PropagationSettings};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::with_cases(200)
    }
}

fn distance_to_polygon(c: &Circuit, p: (f64, f64)) -> f64 {
    let n = c.vertices.len();
    (0..n)
        .map(|i| {
            let (a, b) = (c.vertices[i], c.vertices[(i + 1) % n]);
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
            (a.0 + t * dx - p.0).hypot(a.1 + t * dy - p.1)
        })
        .fold(f64::INFINITY, f64::min)
}

fn clear_of_singularities(c: &Circuit) -> bool {
    [(1.0, 0.0), (-1.0, 0.0)]
        .iter()
        .all(|&s| distance_to_polygon(c, s) >= 0.05)
}

/// Random triangles and quadrilaterals (possibly self-intersecting) that keep
/// 0.05 away from S1 and S2.
fn polygon() -> impl Strategy<Value = Circuit> {
    prop::collection::vec((-2.5..2.5f64, -1.5..1.5f64), 3..=4).prop_filter_map(
        "near a singular point",
        |v| {
            let c = Circuit::new(v, 20).ok()?;
            clear_of_singularities(&c).then_some(c)
        },
    )
}

fn rectangle() -> impl Strategy<Value = Circuit> {
    (-3.0..3.0f64, 0.2..3.0f64, -1.5..1.5f64, 0.2..2.0f64).prop_filter_map(
        "near a singular point",
        |(x, w, y, h)| {
            let c = Circuit::rectangle((x, x + w), (y, y + h), 20).ok()?;
            clear_of_singularities(&c).then_some(c)
        },
    )
}

proptest! {
    #![proptest_config(config())]

    /// A pi rotation about x maps (bz, arm 1, arm 2) to (-bz, arm 2, arm 1),
    /// so the overlap at -bz is the conjugate of the overlap at bz.
    #[test]
    fn mirror_symmetry_in_bz(b1 in -3.0..3.0f64, bz in 1e-3..2.0f64, beta in 0.1..300.0f64, two_j in 1u32..=3) {
        let settings = PropagationSettings::default().with_steps(2000);
        let p = FieldParams::new(b1, bz, beta).with_spin(two_j);
        let up = arm_overlap(&p, &settings).unwrap();
        let down = arm_overlap(&p.at(b1, -bz), &settings).unwrap();
        prop_assert!((up.norm() - down.norm()).abs() < 1e-9);
        if up.norm() > 1e-6 {
            prop_assert!(wrap_phase(up.arg() + down.arg()).abs() < 1e-7);
        }
    }

    /// The simulated winding equals the charge-weighted point-in-polygon count.
    #[test]
    fn winding_matches_enclosed_charge(c in polygon(), beta in 20.0..40.0f64) {
        let settings = PropagationSettings::default().with_steps(4000);
        let t = trace_circuit(&c, beta, 1, &settings, true).unwrap();
        prop_assert_eq!(winding(&t).unwrap(), c.enclosed_charge());
    }

    /// delta oracle / (2 pi two_j) is an integer equal to the enclosed charge.
    #[test]
    fn oracle_quantization(c in polygon(), two_j in 1u32..=4) {
        let o = oracle_phase_trace(&sample_circuit(&c), two_j).unwrap();
        let ratio = o[o.len() - 1] / (TAU * f64::from(two_j));
        prop_assert!((ratio - ratio.round()).abs() < 1e-4, "ratio {ratio}");
        prop_assert_eq!(ratio.round() as i64, c.enclosed_charge());
    }

    #[test]
    fn thick_string_circuits_close(c in rectangle(), thickness in 0.01..0.5f64, two_g in prop::sample::select(vec![-3, -1, 1, 2])) {
        let scene = MonopoleScene::new(f64::from(two_g) / 2.0).with_thickness(thickness);
        let tr = monopole_transport_trace(&sample_circuit(&c), &scene).unwrap();
        prop_assert!((tr[tr.len() - 1] - tr[0]).abs() < 1e-6);
    }

    #[test]
    fn thin_string_net_is_quantized(c in rectangle(), two_g in prop::sample::select(vec![-3, -1, 1, 2])) {
        let g = f64::from(two_g) / 2.0;
        let tr = monopole_transport_trace(&sample_circuit(&c), &MonopoleScene::new(g)).unwrap();
        let net = tr[tr.len() - 1] - tr[0];
        prop_assert!((net - 2.0 * TAU * g * c.enclosed_charge() as f64).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..config() })]

    #[test]
    fn solid_angle_converges(b1 in -3.0..3.0f64, bz in -2.0..2.0f64) {
        let lp = LoopGeometry::new(b1, bz);
        prop_assume!(lp.clearance() >= 0.05);
        let coarse = solid_angle(&lp.with_samples(4096)).unwrap();
        let fine = solid_angle(&lp.with_samples(8192)).unwrap();
        prop_assert!((coarse - fine).abs() < 1e-6);
    }
}

#[test]
fn spin_scaling_of_windings() {
    let settings = PropagationSettings::default().with_steps(8000);
    let (spqrs, _) = preset_circuit(Preset::Spqrs);
    let around_s2 = Circuit::rectangle((-2.0, 0.0), (-1.0, 1.0), 50).unwrap();
    let both = Circuit::rectangle((-2.0, 2.0), (-1.0, 1.0), 50).unwrap();
    for c in [spqrs, around_s2, both] {
        let base = winding(&trace_circuit(&c, 40.0, 1, &settings, true).unwrap()).unwrap();
        assert_eq!(base, c.enclosed_charge());
        for two_j in 2..=4u32 {
            let w = winding(&trace_circuit(&c, 40.0, two_j, &settings, true).unwrap()).unwrap();
            assert_eq!(w, i64::from(two_j) * base, "{:?} two_j={two_j}", c.vertices);
        }
    }
}

#[test]
fn figure_eight_contributions_add() {
    // counterclockwise around S1, clockwise around S2: charges +1 and -1 both add +1
    let eight = Circuit::new(
        vec![
            (0.0, 0.3),
            (2.0, -0.6),
            (2.0, 0.6),
            (0.0, -0.3),
            (-2.0, -0.6),
            (-2.0, 0.6),
        ],
        40,
    )
    .unwrap();
    assert_eq!(eight.enclosed_charge(), 2);
    let settings = PropagationSettings::default().with_steps(8000);
    let t = trace_circuit(&eight, 40.0, 1, &settings, true).unwrap();
    assert_eq!(winding(&t).unwrap(), 2);
}

#[test]
fn reversed_rotation_sense_flips_winding() {
    let (c, _) = preset_circuit(Preset::Spqrs);
    let settings = PropagationSettings::default().with_steps(8000);
    let template = FieldParams::new(0.0, 0.0, 20.0).with_omega_sign(-1);
    let t = trace_circuit_with(&c, &template, &settings, false).unwrap();
    assert_eq!(winding(&t).unwrap(), 1);
    assert!(t.max_oracle_deviation().unwrap() < 0.15);
}

#[test]
fn upper_branches_wind_by_their_magnetic_number() {
    // branch b has m = b - J along the field and winds by -2m times the S1 charge
    let (c, _) = preset_circuit(Preset::Spqrs);
    for (two_j, branch, expect) in [(1u32, 1usize, 1i64), (2, 1, 0), (2, 2, 2), (3, 1, -1)] {
        let settings = PropagationSettings {
            eigen_branch: branch,
            ..PropagationSettings::default().with_steps(8000)
        };
        let t = trace_circuit(&c, 40.0, two_j, &settings, false).unwrap();
        assert_eq!(
            winding(&t).unwrap(),
            expect,
            "two_j={two_j} branch={branch}"
        );
        assert!(t.max_oracle_deviation().unwrap() < 0.15);
    }
}

#[test]
fn traces_are_independent_of_thread_count() {
    let (c, beta) = preset_circuit(Preset::Efghe);
    let settings = PropagationSettings::default().with_steps(3000);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| trace_circuit(&c, beta, 1, &settings, true).unwrap())
    };
    let serial = run(1);
    assert_eq!(serial, run(3));
    assert_eq!(serial, run(1));
}

#[test]
fn oracle_sign_matches_simulation_at_gamma_20() {
    let t = trace_circuit(
        &preset_circuit(Preset::Spqrs).0,
        20.0,
        1,
        &PropagationSettings::default(),
        false,
    )
    .unwrap();
    for s in &t.samples {
        assert!((s.alpha_unwrapped - s.oracle_unwrapped.unwrap()).abs() < 0.15);
    }
    assert!(
        (t.samples.last().unwrap().oracle_unwrapped.unwrap() - t.samples[0].alpha_unwrapped + TAU)
            .abs()
            < 1e-9
    );
}
