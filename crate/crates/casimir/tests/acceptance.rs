//! The eleven acceptance criteria, each checked against an independent
//! oracle at its stated tolerance. One PASS/FAIL line is printed per
//! criterion (run with `--nocapture` to see them).

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use casimir_core::dynamics::{
    dynamical_force_3d, dynamical_force_from_derivatives, evolve_plates, integrate_reference, principal_matrix, Drive,
    FieldQuantization, Method, PlateState, PlateSystem1D, Propagation,
};
use casimir_core::force::{
    parallel_plate_force_1d, per_direction_force, regularized_mode_balance, total_force, ForceSettings, ModeGeometry,
    QuadratureSpec, Regularization, Sequence,
};
use casimir_core::hemisphere::{
    classify_reflection, max_reflections, plate_reflection_point, trace_hemisphere, CavityGeometry, Plate, Reentry,
    ReflectionClass,
};
use casimir_core::reflection::{closed_form_nth_point, trace_iterative, RayState};
use casimir_core::{Error, FrameTranslation, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

// ---- independent oracles --------------------------------------------------

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn axpy(a: [f64; 3], k: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] + s * k[0], a[1] + s * k[1], a[2] + s * k[2]]
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

fn random_unit(g: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let p: [f64; 3] = std::array::from_fn(|_| g.gen_range(-1.0..1.0));
        let n2 = dot(p, p);
        if n2 > 1e-6 && n2 <= 1.0 {
            return unit(p);
        }
    }
}

fn random_interior(g: &mut ChaCha8Rng, r: f64) -> [f64; 3] {
    loop {
        let p: [f64; 3] = std::array::from_fn(|_| g.gen_range(-1.0..1.0));
        if dot(p, p) < 1.0 {
            return p.map(|x| x * 0.99 * r);
        }
    }
}

fn random_entry(g: &mut ChaCha8Rng, r: f64) -> ([f64; 3], [f64; 3]) {
    let rho = r * g.gen::<f64>().sqrt() * 0.999_999;
    let a = g.gen_range(0.0..std::f64::consts::TAU);
    let mut k = random_unit(g);
    k[1] = k[1].abs().max(1e-3);
    ([rho * a.cos(), 0.0, rho * a.sin()], unit(k))
}

/// Forward root of `|p + t k| = r`, cancellation-free.
fn sphere_hit(p: [f64; 3], k: [f64; 3], r: f64) -> f64 {
    let b = 2.0 * dot(p, k);
    let c = dot(p, p) - r * r;
    let disc = (b * b - 4.0 * c).max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * disc);
    if q == 0.0 {
        0.0
    } else {
        (q).max(c / q)
    }
}

fn mirror(k: [f64; 3], n: [f64; 3]) -> [f64; 3] {
    axpy(k, n, -2.0 * dot(k, n))
}

/// Wall strikes inside the dome `y ≥ 0` and the final outgoing direction.
fn dome_strikes(p0: [f64; 3], k0: [f64; 3], r: f64) -> (Vec<[f64; 3]>, [f64; 3]) {
    let (mut p, mut k, mut out) = (p0, k0, Vec::new());
    loop {
        let next = axpy(p, k, sphere_hit(p, k, r));
        if next[1] < 0.0 || out.len() > 1_000_000 {
            return (out, k);
        }
        p = next;
        out.push(p);
        k = mirror(k, unit(p));
    }
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Whether the forward line `p + t k` crosses the opening disk, by Cramer's
/// rule on `p + t k = s x̂ + u ẑ`; also the crossing radius.
fn line_disk(p: [f64; 3], k: [f64; 3], r: f64) -> Option<(bool, f64)> {
    let m = [[k[0], -1.0, 0.0], [k[1], 0.0, 0.0], [k[2], 0.0, -1.0]];
    let rhs = [-p[0], -p[1], -p[2]];
    let d = det3(m);
    if d.abs() < 1e-14 {
        return None;
    }
    let solve = |j: usize| {
        let mut mm = m;
        for (row, &v) in mm.iter_mut().zip(&rhs) {
            row[j] = v;
        }
        det3(mm) / d
    };
    let (t, s, u) = (solve(0), solve(1), solve(2));
    let rho = (s * s + u * u).sqrt();
    Some((t > 0.0 && rho < r, rho))
}

fn ray(o: [f64; 3], k: [f64; 3]) -> RayState {
    RayState::new(Vec3::from_array(o), Vec3::from_array(k)).unwrap()
}

// ---- criteria -------------------------------------------------------------

fn c1_closed_form_reflections() -> Outcome {
    let mut g = ChaCha8Rng::seed_from_u64(101);
    let (mut worst, mut singular, mut compared) = (0.0f64, 0, 0);
    for _ in 0..1000 {
        let r = 0.5 + g.gen::<f64>();
        let ry = ray(random_interior(&mut g, r), random_unit(&mut g));
        let trace = trace_iterative(&ry, r, 10).map_err(|e| e.to_string())?;
        for (i, p) in trace.points.iter().enumerate() {
            match closed_form_nth_point(&ry, r, i as u32 + 1) {
                Ok(q) => {
                    worst = worst.max(q.distance(*p));
                    compared += 1;
                }
                Err(Error::SingularSystem { .. }) => singular += 1,
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    let detail = format!("max deviation {worst:.3e} over {compared} points ({singular} singular skipped)");
    if worst < 1e-9 && compared > 9000 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c2_geometric_invariants() -> Outcome {
    let mut g = ChaCha8Rng::seed_from_u64(101);
    let (mut chord, mut angle, mut plane, mut radius) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let r = 0.5 + g.gen::<f64>();
        let o = random_interior(&mut g, r);
        let k = random_unit(&mut g);
        let trace = trace_iterative(&ray(o, k), r, 10).map_err(|e| e.to_string())?;
        let normal = Vec3::from_array(o).cross(Vec3::from_array(k));
        let n_hat = if normal.norm() > 1e-9 { Some(normal / normal.norm()) } else { None };
        let expected_chord = 2.0 * r * trace.incidence_angle.cos();
        for w in trace.points.windows(2) {
            chord = chord.max((w[1].distance(w[0]) - expected_chord).abs() / r);
        }
        for (p, a) in trace.points.iter().zip(&trace.incidence_angles) {
            angle = angle.max((a.cos() - trace.incidence_angle.cos()).abs());
            radius = radius.max((p.norm() - r).abs() / r);
            if let Some(n) = n_hat {
                plane = plane.max(n.dot(*p).abs() / r);
            }
        }
    }
    let worst = chord.max(angle).max(plane).max(radius);
    let detail = format!("chord {chord:.2e}, angle {angle:.2e}, coplanarity {plane:.2e}, on-sphere {radius:.2e}");
    if worst < 1e-10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c3_hemisphere_counts() -> Outcome {
    let mut g = ChaCha8Rng::seed_from_u64(103);
    let (mut boundary, mut grazing, mut mismatches) = (0, 0, 0);
    for _ in 0..1000 {
        let r = 0.5 + g.gen::<f64>();
        let (o, k) = random_entry(&mut g, r);
        let count = match max_reflections(&ray(o, k), &CavityGeometry::hemisphere(r)) {
            Ok(c) => c,
            Err(Error::Grazing { .. }) => {
                grazing += 1;
                continue;
            }
            Err(e) => return Err(e.to_string()),
        };
        if count.boundary {
            boundary += 1;
            continue;
        }
        if count.count as usize != dome_strikes(o, k, r).0.len() {
            mismatches += 1;
        }
    }
    let detail = format!("{mismatches} mismatches, {boundary} boundary and {grazing} grazing excluded");
    if mismatches == 0 && boundary + grazing < 100 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn plate_scene(g: &mut ChaCha8Rng) -> CavityGeometry {
    let r = 0.5 + g.gen::<f64>();
    let gap = r * (0.05 + 1.5 * g.gen::<f64>());
    let mut geom = CavityGeometry::plate_hemisphere(r, gap);
    geom.plate = Some(Plate {
        theta: FRAC_PI_2 + g.gen_range(-0.35..0.35),
        phi: FRAC_PI_2 + g.gen_range(-0.35..0.35),
        center: FrameTranslation::new(Vec3::new(0.0, -gap, 0.0)),
    });
    geom
}

fn c4_classification() -> Outcome {
    let mut g = ChaCha8Rng::seed_from_u64(104);
    let mut class_bad = 0;
    for _ in 0..1000 {
        let r = 0.5 + g.gen::<f64>();
        let (o, k) = random_entry(&mut g, r);
        let geom = CavityGeometry::hemisphere(r);
        let (Ok(count), Ok(class)) = (max_reflections(&ray(o, k), &geom), classify_reflection(&ray(o, k), &geom))
        else {
            continue;
        };
        if !count.boundary && ((class.class == ReflectionClass::SingleReflection) != (count.count == 1)) {
            class_bad += 1;
        }
    }

    let (mut checked, mut reentry_bad, mut rim, mut reenters) = (0, 0, 0, 0);
    while checked < 1000 {
        let geom = plate_scene(&mut g);
        let r = geom.inner_radius;
        let (o, k) = random_entry(&mut g, r);
        let Ok(t) = trace_hemisphere(&ray(o, k), &geom, 1_000_000) else { continue };
        let Ok(hit) = plate_reflection_point(&t.exit_ray(), &geom) else { continue };
        let plate = geom.plate.unwrap();
        let start = t.last_strike().to_array();
        let kx = t.exit_direction.to_array();
        let n = plate.normal().to_array();
        let c = plate.center.offset.to_array();
        let foot = axpy(start, kx, dot(n, axpy(c, start, -1.0)) / dot(n, kx));
        let (pierces, rho) = line_disk(foot, mirror(kx, n), r).unwrap_or((false, f64::INFINITY));
        if (rho - r).abs() <= 1e-9 * r || hit.rim_boundary {
            rim += 1;
            continue;
        }
        let want = if pierces { Reentry::Reenters } else { Reentry::Escapes };
        if hit.reentry != want {
            reentry_bad += 1;
        }
        reenters += usize::from(pierces);
        checked += 1;
    }
    let detail = format!(
        "{class_bad} class mismatches; re-entry {reentry_bad} mismatches over {checked} scenes ({reenters} re-enter, {rim} rim cases skipped)"
    );
    if class_bad == 0 && reentry_bad == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c5_regularization() -> Outcome {
    let reg = Regularization::default();
    let t = Instant::now();
    let balance = regularized_mode_balance(1.0, &reg).map_err(|e| e.to_string())?;
    let t_balance = t.elapsed();
    let t = Instant::now();
    let plates = parallel_plate_force_1d(1.0, &ForceSettings::default()).map_err(|e| e.to_string())?;
    let t_plates = t.elapsed();
    let e1 = (balance / (-PI / 12.0) - 1.0).abs();
    let e2 = (plates / (-PI / 24.0) - 1.0).abs();
    let detail = format!(
        "balance rel err {e1:.2e} in {:.1} ms, plate force rel err {e2:.2e} in {:.1} ms",
        t_balance.as_secs_f64() * 1e3,
        t_plates.as_secs_f64() * 1e3
    );
    if e1 < 1e-3 && e2 < 1e-3 && t_balance < Duration::from_secs(1) && t_plates < Duration::from_secs(1) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c6_attraction() -> Outcome {
    let s = ForceSettings::default();
    let (mut worst, mut positive) = (0.0f64, 0);
    for i in 0..=15 {
        let theta = 0.1 * i as f64;
        for l in [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let mg = ModeGeometry { quantization_length: l, incidence_angle: theta, mode_cutoff: 1000 };
            let f = per_direction_force(&mg, &s).map_err(|e| e.to_string())?.per_direction_force;
            positive += usize::from(f >= 0.0 || f.is_nan());
            let closed = -PI * theta.cos() / (6.0 * l);
            worst = worst.max((f / closed - 1.0).abs());
        }
    }
    let detail = format!("{positive} non-negative forces, worst closed-form deviation {worst:.2e}");
    if positive == 0 && worst < 5e-3 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c7_sphere_symmetry() -> Outcome {
    let t = Instant::now();
    let quad = QuadratureSpec { nodes: 4096, seed: 7, sequence: Sequence::Halton };
    let f = total_force(&CavityGeometry::sphere(1.0), &quad, &ForceSettings::default()).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let mean_abs = f.nodes.iter().map(|n| n.force.abs()).sum::<f64>() / f.nodes.len() as f64;
    let ratio = f.net_vector.norm() / mean_abs;
    let detail = format!(
        "net/mean ratio {ratio:.2e}, mean radial stress {:.6e}, {} nodes in {:.2} s",
        f.mean_radial_stress,
        f.nodes.len(),
        elapsed.as_secs_f64()
    );
    if ratio < 1e-6 && f.mean_radial_stress < 0.0 && f.nodes.len() == 4096 && elapsed < Duration::from_secs(30) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c8_plate_gap_rule() -> Outcome {
    let s = ForceSettings::default();
    let quad = QuadratureSpec { nodes: 512, seed: 8, sequence: Sequence::Halton };
    let hemi = total_force(&CavityGeometry::hemisphere(1.0), &quad, &s).map_err(|e| e.to_string())?;
    for gap in [1.001, 1.5, 4.0] {
        let p = total_force(&CavityGeometry::plate_hemisphere(1.0, gap), &quad, &s).map_err(|e| e.to_string())?;
        if p.nodes != hemi.nodes || p.mean_radial_stress.to_bits() != hemi.mean_radial_stress.to_bits() {
            return Err(format!("gap {gap}: plate changed the force"));
        }
    }
    let close = total_force(&CavityGeometry::plate_hemisphere(1.0, 0.05), &quad, &s).map_err(|e| e.to_string())?;
    let limited: Vec<_> = close.nodes.iter().filter(|n| n.plate_limited).collect();
    let shorter = limited.iter().all(|n| n.quantization_length < 2.0 * n.incidence_angle.cos());
    let detail = format!(
        "identical above the radius; at gap 0.05 {} nodes plate-limited, stress {:.4e} vs {:.4e}",
        limited.len(),
        close.mean_radial_stress,
        hemi.mean_radial_stress
    );
    if !limited.is_empty() && shorter && close.mean_radial_stress != hemi.mean_radial_stress {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_system(g: &mut ChaCha8Rng) -> PlateSystem1D {
    loop {
        let eta: [f64; 4] = std::array::from_fn(|_| g.gen_range(-1.5..1.5));
        let drive = [
            Drive::Sinusoid {
                amplitude: g.gen_range(-1.0..1.0),
                omega: g.gen_range(0.5..4.0),
                phase: g.gen_range(0.0..6.0),
            },
            Drive::Constant(g.gen_range(-1.0..1.0)),
        ];
        let state = PlateState {
            positions: [g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0)],
            velocities: [g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0)],
        };
        let sys = PlateSystem1D::from_eta(eta, drive, state);
        if principal_matrix(0.0, 0.0, &sys).is_ok() {
            return sys;
        }
    }
}

fn c9_ode() -> Outcome {
    let mut g = ChaCha8Rng::seed_from_u64(109);
    let mut psi_res = 0.0f64;
    for _ in 0..100 {
        let sys = random_system(&mut g);
        let (t0, t) = (g.gen_range(-0.5..0.5), g.gen_range(-1.0..1.0));
        let h = 1e-6;
        let p = principal_matrix(t, t0, &sys).map_err(|e| e.to_string())?;
        let pp = principal_matrix(t + h, t0, &sys).map_err(|e| e.to_string())?;
        let pm = principal_matrix(t - h, t0, &sys).map_err(|e| e.to_string())?;
        let m = sys.matrix();
        let (mut res, mut size) = (0.0f64, 0.0f64);
        for i in 0..2 {
            for j in 0..2 {
                let deriv = (pp[i][j] - pm[i][j]) / (2.0 * h);
                res = res.max((deriv - (m[i][0] * p[0][j] + m[i][1] * p[1][j])).abs());
                size = size.max(p[i][j].abs());
            }
        }
        psi_res = psi_res.max(res / size);
    }

    let rel =
        |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()) / b[0].abs().max(b[1].abs()).max(1.0);
    let (mut evolve_err, mut exact) = (0.0f64, true);
    for _ in 0..20 {
        let sys = random_system(&mut g);
        for t in [0.25, 0.5, 0.75, 1.0] {
            let e = evolve_plates(&sys, 0.0, t, Propagation::ClosedForm).map_err(|e| e.to_string())?;
            if e.method != Method::PrincipalMatrix {
                return Err("closed form was not used".into());
            }
            let r = integrate_reference(&sys, 0.0, t, 1e-4).map_err(|e| e.to_string())?;
            evolve_err = evolve_err.max(rel(e.state.velocities, r.velocities)).max(rel(e.state.positions, r.positions));
        }
        let start = evolve_plates(&sys, 0.0, 0.0, Propagation::ClosedForm).map_err(|e| e.to_string())?;
        exact &= start.state.velocities == sys.state.velocities;
    }
    let detail = format!("psi residual {psi_res:.2e}, evolution vs RK4 {evolve_err:.2e}, initial state exact: {exact}");
    if psi_res < 1e-8 && evolve_err < 1e-6 && exact {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn field(modes: [u32; 3]) -> FieldQuantization {
    FieldQuantization {
        occupation: 0,
        polarization_dof: 1,
        mode_numbers: modes,
        lengths: [1.0, 1.1, 1.2],
        mode_cutoff: 2,
    }
}

/// Central differences of `H = (n+½)·dof·|k|` in `k`.
fn numeric_derivatives(q: &FieldQuantization) -> ([f64; 3], [[f64; 3]; 3]) {
    let pre = (f64::from(q.occupation) + 0.5) * f64::from(q.polarization_dof);
    let k0: [f64; 3] = std::array::from_fn(|i| f64::from(q.mode_numbers[i]) * PI / q.lengths[i]);
    let h_of = |k: [f64; 3]| pre * dot(k, k).sqrt();
    let shift = |k: [f64; 3], i: usize, s: f64| {
        let mut k = k;
        k[i] += s;
        k
    };
    let g = std::array::from_fn(|i| (h_of(shift(k0, i, 1e-6)) - h_of(shift(k0, i, -1e-6))) / 2e-6);
    let h = 1e-4;
    let hess = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let f = |a: f64, b: f64| h_of(shift(shift(k0, i, a), j, b));
            (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h)
        })
    });
    (g, hess)
}

fn c10_dynamical_force() -> Outcome {
    let k = Default::default();
    let q = field([1, 2, 1]);
    let mut g = ChaCha8Rng::seed_from_u64(110);
    let mut superposition = 0.0f64;
    for _ in 0..200 {
        let a: [f64; 3] = std::array::from_fn(|_| g.gen_range(-1.0..1.0));
        let b: [f64; 3] = std::array::from_fn(|_| g.gen_range(-1.0..1.0));
        let s = g.gen_range(-3.0..3.0);
        let f = |r: [f64; 3]| dynamical_force_3d(&q, r, &k);
        let (fa, fb) = (f(a).map_err(|e| e.to_string())?, f(b).map_err(|e| e.to_string())?);
        let fab = f(std::array::from_fn(|i| a[i] + s * b[i])).map_err(|e| e.to_string())?;
        let scale = fa.max_abs() + s.abs() * fb.max_abs() + 1e-300;
        superposition = superposition.max((fab - (fa + fb * s)).max_abs() / scale);
    }
    let one_d = dynamical_force_3d(&field([2, 0, 0]), [0.3, -0.2, 0.5], &k).map_err(|e| e.to_string())?;

    let (mut chain, mut checked, mut outside) = (0.0f64, 0, 0);
    for a in 0..=2 {
        for b in 0..=2 {
            for c in 0..=2 {
                let modes = [a, b, c];
                if modes.iter().filter(|&&n| n > 0).count() < 2 {
                    continue;
                }
                let q = field(modes);
                let analytic = match dynamical_force_3d(&q, [0.01, 0.0, 0.0], &k) {
                    Ok(f) => f,
                    Err(Error::CoefficientDomain { .. }) => {
                        outside += 1;
                        continue;
                    }
                    Err(e) => return Err(e.to_string()),
                };
                let (gr, he) = numeric_derivatives(&q);
                let numeric =
                    dynamical_force_from_derivatives(&q, [0.01, 0.0, 0.0], &gr, &he, &k).map_err(|e| e.to_string())?;
                chain = chain.max((analytic - numeric).max_abs() / analytic.max_abs().max(1e-300));
                checked += 1;
            }
        }
    }
    let detail = format!(
        "superposition {superposition:.2e}, 1D force {:?}, chain rule {chain:.2e} on {checked} mode sets ({outside} outside the coefficient domain)",
        one_d.to_array()
    );
    if superposition < 1e-10 && one_d == Vec3::ZERO && chain < 1e-4 && checked >= 3 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("scene.toml");
    std::fs::write(
        &config,
        "[geometry]\nkind = \"plate_hemisphere\"\ngap = 0.4\n[quadrature]\nnodes = 256\nseed = 11\n\
         [dynamics]\ninitial_velocities = [0.2, -0.1]\n",
    )
    .map_err(|e| e.to_string())?;
    let runs: [&[&str]; 5] = [&["trace"], &["classify"], &["force"], &["plates1d"], &["dyncas", "--verify"]];
    let mut compared = 0;
    for args in runs {
        let mut outputs = Vec::new();
        for (i, threads) in ["1", "4"].iter().enumerate() {
            let out = dir.path().join(format!("{}-{i}.csv", args[0]));
            let status = Command::new(env!("CARGO_BIN_EXE_casimir"))
                .args(args)
                .arg("--config")
                .arg(&config)
                .arg("--out")
                .arg(&out)
                .env("RAYON_NUM_THREADS", threads)
                .env_remove("SOURCE_DATE_EPOCH")
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{} exited with {status}", args[0]));
            }
            let csv = std::fs::read(&out).map_err(|e| e.to_string())?;
            let meta = std::fs::read(casimir::output::metadata_path(&out)).map_err(|e| e.to_string())?;
            outputs.push((csv, meta));
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{} output differs between runs", args[0]));
        }
        compared += 1;
    }
    Ok(format!("{compared} subcommands byte-identical across repeated runs on 1 and 4 threads"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("1 closed-form reflections vs iterative trace", c1_closed_form_reflections),
        ("2 geometric invariants", c2_geometric_invariants),
        ("3 hemisphere reflection count", c3_hemisphere_counts),
        ("4 classification and re-entry", c4_classification),
        ("5 regularization", c5_regularization),
        ("6 attraction sign", c6_attraction),
        ("7 sphere symmetry", c7_sphere_symmetry),
        ("8 plate-gap rule", c8_plate_gap_rule),
        ("9 plate ODE", c9_ode),
        ("10 3D dynamical force", c10_dynamical_force),
        ("11 determinism", c11_determinism),
    ];
    let time_limits = [(1usize, 5.0f64), (7, 30.0)];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let secs = start.elapsed().as_secs_f64();
        if let Some((_, limit)) = time_limits.iter().find(|(n, _)| *n == i + 1) {
            if secs >= *limit {
                outcome = Err(format!("took {secs:.2} s, limit {limit} s"));
            }
        }
        match &outcome {
            Ok(d) => println!("PASS  criterion {name}: {d} [{secs:.2} s]"),
            Err(d) => {
                println!("FAIL  criterion {name}: {d} [{secs:.2} s]");
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
