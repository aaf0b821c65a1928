//! Gauss-Legendre rules, spherical product grids and order-stable summation.
//!
//! Every grid in the crate is built from these rules with a fixed node
//! ordering, so sums over a grid are reproducible bit for bit regardless of
//! how the per-node work is scheduled.

use num_complex::Complex64;
use std::f64::consts::PI;

pub type Vec3 = [f64; 3];

/// Gauss-Legendre nodes and weights on `[a, b]`, nodes ascending.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut out = Vec::with_capacity(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = -(PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((mid + half * x, half * w));
    }
    out.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Node counts for a spherical product rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SphericalRule {
    pub radial: usize,
    pub polar: usize,
    pub azimuthal: usize,
}

impl SphericalRule {
    pub const fn new(radial: usize, polar: usize, azimuthal: usize) -> Self {
        Self {
            radial,
            polar,
            azimuthal,
        }
    }

    pub fn len(&self) -> usize {
        self.radial * self.polar * self.azimuthal
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A ball of radius `radius` around `center`, discretized with Gauss-Legendre
/// in radius and cos(theta) and the uniform rule in phi.
#[derive(Debug, Clone)]
pub struct SphericalGrid {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl SphericalGrid {
    pub fn new(center: Vec3, radius: f64, rule: SphericalRule) -> Self {
        let radial = gauss_legendre(rule.radial, 0.0, radius);
        let polar = gauss_legendre(rule.polar, -1.0, 1.0);
        let dphi = 2.0 * PI / rule.azimuthal as f64;
        let mut points = Vec::with_capacity(rule.len());
        let mut weights = Vec::with_capacity(rule.len());
        for &(r, wr) in &radial {
            for &(ct, wt) in &polar {
                let st = (1.0 - ct * ct).max(0.0).sqrt();
                for k in 0..rule.azimuthal {
                    // Half-step offset keeps nodes off the xz-plane.
                    let phi = (k as f64 + 0.5) * dphi;
                    points.push([
                        center[0] + r * st * phi.cos(),
                        center[1] + r * st * phi.sin(),
                        center[2] + r * ct,
                    ]);
                    weights.push(wr * r * r * wt * dphi);
                }
            }
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Pairwise (cascade) summation in fixed index order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_c(xs: &[Complex64]) -> Complex64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_c(&xs[..mid]) + pairwise_sum_c(&xs[mid..])
}

#[inline]
pub fn norm2(p: Vec3) -> f64 {
    p[0] * p[0] + p[1] * p[1] + p[2] * p[2]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// On-shell energy sqrt(m^2 + |p|^2).
#[inline]
pub fn omega(m: f64, p: Vec3) -> f64 {
    (m * m + norm2(p)).sqrt()
}


#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
