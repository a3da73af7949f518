mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_relative_eq;
use casimir_core::force::{
    delta_k_inner, delta_k_outer, parallel_plate_force_1d, per_direction_force, quadrature_nodes,
    regularize_sum_minus_integral, regularized_mode_balance, total_force, ForceSettings, ModeGeometry, QuadratureSpec,
    Regularization, Sequence,
};
use casimir_core::hemisphere::CavityGeometry;
use casimir_core::reflection::{trace_iterative, RayState};
use casimir_core::Error;
use common::{random_interior, random_unit, rng, v};
use proptest::prelude::*;

fn quad(nodes: usize, seed: u64) -> QuadratureSpec {
    QuadratureSpec { nodes, seed, sequence: Sequence::Halton }
}

#[test]
fn balance_examples() {
    let reg = Regularization::default();
    assert_relative_eq!(regularized_mode_balance(1.0, &reg).unwrap(), -PI / 12.0, max_relative = 1e-3);
    assert_relative_eq!(regularized_mode_balance(2.0, &reg).unwrap(), -PI / 24.0, max_relative = 1e-3);
    assert!(matches!(regularized_mode_balance(0.0, &reg), Err(Error::NonPositive { .. })));
}

/// The extrapolated finite part for weights `n^k` is ζ(−k); the integral of
/// `x^k e^{−εx}` is `k!/ε^{k+1}`.
#[test]
fn zeta_values_reproduced() {
    let reg = Regularization { eps0: 0.5, levels: 8, tolerance: 1e-7 };
    let cases: [(i32, f64, f64); 3] = [(0, 1.0, -0.5), (1, 1.0, -1.0 / 12.0), (3, 6.0, 1.0 / 120.0)];
    for (k, fact, zeta) in cases {
        let got = regularize_sum_minus_integral(|n| n.powi(k), |e| fact / e.powi(k + 1), &reg).unwrap();
        assert_relative_eq!(got.value, zeta, max_relative = 1e-6);
    }
}

#[test]
fn per_direction_grid_is_attractive_and_matches_closed_form() {
    let s = ForceSettings::default();
    for &theta in &[0.0, 0.3, 0.6, 0.9, 1.2, 1.5] {
        for &l in &[0.1, 0.3, 1.0, 3.0, 10.0] {
            let mg = ModeGeometry { quantization_length: l, incidence_angle: theta, mode_cutoff: 10_000 };
            let f = per_direction_force(&mg, &s).unwrap().per_direction_force;
            let oracle = -PI * theta.cos() / (6.0 * l);
            assert!(f < 0.0);
            assert_relative_eq!(f, oracle, max_relative = 5e-3);
        }
    }
}

#[test]
fn per_direction_examples() {
    let s = ForceSettings::default();
    let mg = ModeGeometry { quantization_length: 1.0, incidence_angle: 0.0, mode_cutoff: 10_000 };
    let r0 = per_direction_force(&mg, &s).unwrap();
    assert_relative_eq!(r0.per_direction_force, -PI / 6.0, max_relative = 1e-3);
    let r3 = per_direction_force(&ModeGeometry { incidence_angle: PI / 3.0, ..mg }, &s).unwrap();
    assert_relative_eq!(r3.per_direction_force, 0.5 * r0.per_direction_force, max_relative = 1e-12);
    // Raw parts are huge and of the same sign; only their difference is finite.
    assert!(r0.raw_sum_part > 1e7 && r0.integral_part > 1e7);
    assert!(matches!(
        per_direction_force(&ModeGeometry { incidence_angle: PI / 2.0, ..mg }, &s),
        Err(Error::Grazing { .. })
    ));
}

#[test]
fn plate_force_examples() {
    let s = ForceSettings::default();
    let f1 = parallel_plate_force_1d(1.0, &s).unwrap();
    assert_relative_eq!(f1, -PI / 24.0, max_relative = 1e-3);
    assert_relative_eq!(parallel_plate_force_1d(2.0, &s).unwrap() / f1, 0.25, max_relative = 1e-12);
    for d in [0.01, 0.5, 7.0] {
        assert!(parallel_plate_force_1d(d, &s).unwrap() < 0.0);
    }
}

#[test]
fn delta_k_identity_on_random_traces() {
    let mut g = rng(31);
    for _ in 0..1000 {
        let o = random_interior(&mut g, 1.0, 0.99);
        let k = random_unit(&mut g);
        let t = trace_iterative(&RayState::new(v(o), v(k)).unwrap(), 1.0, 3).unwrap();
        for n in 1..4u32 {
            let d = delta_k_inner(&t, n).unwrap();
            let ratio = d.norm() * t.chord_length / (4.0 * PI * f64::from(n));
            assert!((ratio - t.incidence_angle.cos()).abs() < 1e-12);
            // Points back toward the center.
            assert!(d.dot(t.points[0]) < 0.0);
            assert!(delta_k_outer(t.incidence_angle, 1.0, t.points[0].normalize().unwrap()).dot(d) < 0.0);
        }
    }
}

#[test]
fn sphere_total_force_is_symmetric_and_attractive() {
    let s = ForceSettings::default();
    let res = total_force(&CavityGeometry::sphere(1.0), &quad(4096, 7), &s).unwrap();
    let mean_abs = res.nodes.iter().map(|n| n.force.abs()).sum::<f64>() / res.nodes.len() as f64;
    assert!(res.net_vector.norm() < 1e-6 * mean_abs);
    assert!(res.mean_radial_stress < 0.0);
    for n in &res.nodes {
        assert!((n.quantization_length - 2.0 * n.incidence_angle.cos()).abs() < 1e-10);
    }
}

#[test]
fn random_sequence_also_pairs() {
    let nodes = quadrature_nodes(
        &CavityGeometry::sphere(1.0),
        &QuadratureSpec { nodes: 64, seed: 2, sequence: Sequence::Random },
    )
    .unwrap();
    for p in nodes.chunks(2) {
        assert_eq!(p[0].entry, -p[1].entry);
    }
    let res = total_force(
        &CavityGeometry::sphere(1.0),
        &QuadratureSpec { nodes: 64, seed: 2, sequence: Sequence::Random },
        &ForceSettings::default(),
    )
    .unwrap();
    assert!(res.net_vector.norm() < 1e-12);
}

#[test]
fn wide_gap_plate_matches_hemisphere_exactly() {
    let s = ForceSettings::default();
    let q = quad(512, 9);
    let h = total_force(&CavityGeometry::hemisphere(1.0), &q, &s).unwrap();
    for gap in [1.01, 2.0, 10.0] {
        let p = total_force(&CavityGeometry::plate_hemisphere(1.0, gap), &q, &s).unwrap();
        assert_eq!(p.mean_radial_stress, h.mean_radial_stress);
        assert_eq!(p.net_vector, h.net_vector);
        assert!(p.nodes.iter().all(|n| !n.plate_limited));
    }
}

#[test]
fn close_plate_shortens_quantization_length() {
    let s = ForceSettings::default();
    let q = quad(512, 9);
    let h = total_force(&CavityGeometry::hemisphere(1.0), &q, &s).unwrap();
    let p = total_force(&CavityGeometry::plate_hemisphere(1.0, 0.05), &q, &s).unwrap();
    let limited: Vec<_> = p.nodes.iter().filter(|n| n.plate_limited).collect();
    assert!(!limited.is_empty());
    for n in &limited {
        assert!(n.quantization_length < 2.0 * n.incidence_angle.cos());
    }
    assert_ne!(p.mean_radial_stress, h.mean_radial_stress);
    assert!(p.mean_radial_stress.abs() > h.mean_radial_stress.abs());
}

#[test]
fn doubling_nodes_is_stable() {
    let s = ForceSettings::default();
    let g = CavityGeometry::plate_hemisphere(1.0, 0.3);
    let a = total_force(&g, &quad(1024, 4), &s).unwrap().mean_radial_stress;
    let b = total_force(&g, &quad(2048, 4), &s).unwrap().mean_radial_stress;
    assert!(((a - b) / b).abs() < 0.01, "{a} vs {b}");
}

#[test]
fn same_seed_same_bits() {
    let s = ForceSettings::default();
    let g = CavityGeometry::plate_hemisphere(1.0, 0.4);
    let a = total_force(&g, &quad(300, 5), &s).unwrap();
    let b = total_force(&g, &quad(300, 5), &s).unwrap();
    assert_eq!(a.mean_radial_stress.to_bits(), b.mean_radial_stress.to_bits());
    let c = total_force(&g, &quad(300, 6), &s).unwrap();
    assert_ne!(a.nodes[0].entry, c.nodes[0].entry);
}

#[test]
fn empty_quadrature_is_an_error() {
    let r = total_force(&CavityGeometry::sphere(1.0), &quad(0, 1), &ForceSettings::default());
    assert_eq!(r.unwrap_err(), Error::EmptyQuadrature);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn force_is_negative_and_scales_inversely(theta in 0.0f64..(FRAC_PI_2 - 1e-4), l in 0.1f64..10.0) {
        let s = ForceSettings::default();
        let mg = ModeGeometry { quantization_length: l, incidence_angle: theta, mode_cutoff: 100 };
        let f = per_direction_force(&mg, &s).unwrap().per_direction_force;
        let f2 = per_direction_force(&ModeGeometry { quantization_length: 2.0 * l, ..mg }, &s).unwrap().per_direction_force;
        prop_assert!(f < 0.0 || theta.cos() == 0.0);
        prop_assert!((f2 * 2.0 - f).abs() <= 5e-3 * f.abs());
    }
}
