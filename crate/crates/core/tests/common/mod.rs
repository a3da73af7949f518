//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the crate's own geometry routines.
#![allow(dead_code)]

use casimir_core::Vec3;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn v(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

/// Uniform direction on the unit sphere by rejection from the cube.
pub fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let p: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        if n2 > 1e-6 && n2 <= 1.0 {
            let n = n2.sqrt();
            return [p[0] / n, p[1] / n, p[2] / n];
        }
    }
}

/// Uniform point in the ball of radius `scale * r`.
pub fn random_interior(rng: &mut ChaCha8Rng, r: f64, scale: f64) -> [f64; 3] {
    loop {
        let p: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if p[0] * p[0] + p[1] * p[1] + p[2] * p[2] < 1.0 {
            return [p[0] * r * scale, p[1] * r * scale, p[2] * r * scale];
        }
    }
}

/// Entry point on the opening disk `y = 0` and a direction with `k_y > 0`.
pub fn random_entry(rng: &mut ChaCha8Rng, r: f64) -> ([f64; 3], [f64; 3]) {
    let rho = r * rng.gen::<f64>().sqrt() * 0.999_999;
    let a = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut k = random_unit(rng);
    k[1] = k[1].abs().max(1e-3);
    let n = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    ([rho * a.cos(), 0.0, rho * a.sin()], [k[0] / n, k[1] / n, k[2] / n])
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn add(a: [f64; 3], b: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

pub fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Larger root of `|p + t k|² = r²`, written with the cancellation-free
/// quadratic formula.
pub fn quadratic_hit(p: [f64; 3], k: [f64; 3], r: f64) -> f64 {
    let a = dot(k, k);
    let b = 2.0 * dot(p, k);
    let c = dot(p, p) - r * r;
    let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * disc);
    let (t1, t2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    t1.max(t2)
}

/// Householder mirror `k − 2(n·k)n`.
pub fn householder(k: [f64; 3], n: [f64; 3]) -> [f64; 3] {
    add(k, n, -2.0 * dot(n, k))
}

/// Successive wall strikes inside a full sphere.
pub fn brute_strikes(p0: [f64; 3], k0: [f64; 3], r: f64, count: usize) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(count);
    let (mut p, mut k) = (p0, k0);
    for _ in 0..count {
        let t = quadratic_hit(p, k, r);
        p = add(p, k, t);
        out.push(p);
        let n = norm(p);
        k = householder(k, [p[0] / n, p[1] / n, p[2] / n]);
    }
    out
}

/// Strikes inside the dome `y ≥ 0` until a leg drops below the opening
/// plane. Returns the strikes and the final outgoing direction.
pub fn brute_hemisphere(p0: [f64; 3], k0: [f64; 3], r: f64, limit: usize) -> (Vec<[f64; 3]>, [f64; 3]) {
    let (mut p, mut k) = (p0, k0);
    let mut strikes = Vec::new();
    loop {
        let t = quadratic_hit(p, k, r);
        let next = add(p, k, t);
        if next[1] < 0.0 || strikes.len() >= limit {
            return (strikes, k);
        }
        p = next;
        strikes.push(p);
        let n = norm(p);
        k = householder(k, [p[0] / n, p[1] / n, p[2] / n]);
    }
}

/// Parameter where `p + t k` meets the plane through `c` with normal `n`.
pub fn line_plane(p: [f64; 3], k: [f64; 3], c: [f64; 3], n: [f64; 3]) -> f64 {
    dot(n, add(c, p, -1.0)) / dot(n, k)
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Solve `p + t k = s x̂ + u ẑ` by Cramer's rule and report whether the
/// forward line crosses the disk of radius `r` in `y = 0`, together with the
/// crossing radius.
pub fn line_disk(p: [f64; 3], k: [f64; 3], r: f64) -> Option<(bool, f64)> {
    // Columns: t, s, u. Equation rows: x, y, z.
    let m = [[k[0], -1.0, 0.0], [k[1], 0.0, 0.0], [k[2], 0.0, -1.0]];
    let rhs = [-p[0], -p[1], -p[2]];
    let d = det3(m);
    if d.abs() < 1e-14 {
        return None;
    }
    let col = |j: usize| {
        let mut mm = m;
        for i in 0..3 {
            mm[i][j] = rhs[i];
        }
        det3(mm) / d
    };
    let (t, s, u) = (col(0), col(1), col(2));
    let rho = (s * s + u * u).sqrt();
    Some((t > 0.0 && rho < r, rho))
}

/// Composite Simpson on `[a, b]` with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}
