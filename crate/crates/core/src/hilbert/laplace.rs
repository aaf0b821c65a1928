//! Laplace transforms of the C-infinity bump time profiles.
//!
//! A profile with center `c` and half-width `w` is
//! `h(tau) = b((tau - c) / w) / w` with `b(s) = exp(-1/(1-s^2)) / Z` on
//! `(-1, 1)`, so `int h = 1`. Its Laplace transform factors as
//! `h_hat(omega) = exp(-omega c) B(omega w)` with `B(k) = int b(s) exp(-k s) ds`
//! depending on the single scaled variable `k`. `ln B` is tabulated once on a
//! uniform grid and interpolated with cubic Lagrange stencils; arguments off
//! the table fall back to direct quadrature.

use once_cell::sync::Lazy;

const TABLE_HALF_RANGE: f64 = 64.0;
const TABLE_STEP: f64 = 1.0 / 64.0;
const DIRECT_NODES: usize = 2048;

/// Raw (unnormalized) bump `exp(-1/(1-s^2))` on `(-1, 1)`.
#[inline]
pub fn raw_bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// Derivative of the raw bump.
#[inline]
pub fn raw_bump_derivative(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let d = 1.0 - s * s;
        raw_bump(s) * (-2.0 * s / (d * d))
    }
}

/// Interior trapezoid nodes on (-1, 1); the bump and all its derivatives
/// vanish at the endpoints so the rule converges faster than any power.
fn trapezoid_nodes(n: usize) -> impl Iterator<Item = (f64, f64)> {
    let h = 2.0 / n as f64;
    (1..n).map(move |i| (-1.0 + i as f64 * h, h))
}

/// `Z = int raw_bump`.
pub static BUMP_NORMALIZATION: Lazy<f64> =
    Lazy::new(|| trapezoid_nodes(DIRECT_NODES).map(|(s, w)| w * raw_bump(s)).sum());

/// `B(k) = int b(s) e^{-k s} ds` with unit-normalized `b`, by direct quadrature.
pub fn scaled_transform_direct(k: f64) -> f64 {
    // Factor out the dominant exponential to avoid overflow for large |k|.
    let shift = k.abs();
    let acc: f64 = trapezoid_nodes(DIRECT_NODES)
        .map(|(s, w)| w * raw_bump(s) * (-k * s - shift).exp())
        .sum();
    acc * shift.exp() / *BUMP_NORMALIZATION
}

/// `int b'(s) e^{-k s} ds`, used to evaluate the Hamiltonian action on
/// profiles without integrating by parts.
pub fn scaled_derivative_transform_direct(k: f64) -> f64 {
    let shift = k.abs();
    let acc: f64 = trapezoid_nodes(DIRECT_NODES)
        .map(|(s, w)| w * raw_bump_derivative(s) * (-k * s - shift).exp())
        .sum();
    acc * shift.exp() / *BUMP_NORMALIZATION
}

struct LogTable {
    values: Vec<f64>,
}

static LOG_TABLE: Lazy<LogTable> = Lazy::new(|| {
    let n = (2.0 * TABLE_HALF_RANGE / TABLE_STEP).round() as usize + 1;
    let values = (0..n)
        .map(|i| scaled_transform_direct(-TABLE_HALF_RANGE + i as f64 * TABLE_STEP).ln())
        .collect();
    LogTable { values }
});

/// `ln B(k)` from the cached table (cubic interpolation) or direct quadrature.
pub fn log_scaled_transform(k: f64) -> f64 {
    let table = &*LOG_TABLE;
    let u = (k + TABLE_HALF_RANGE) / TABLE_STEP;
    let i = u.floor() as isize;
    if i < 1 || i as usize + 2 >= table.values.len() {
        return scaled_transform_direct(k).ln();
    }
    let i = i as usize;
    let t = u - i as f64;
    let (y0, y1, y2, y3) = (
        table.values[i - 1],
        table.values[i],
        table.values[i + 1],
        table.values[i + 2],
    );
    // Four-point Lagrange through nodes -1, 0, 1, 2.
    let c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    c0 * y0 + c1 * y1 + c2 * y2 + c3 * y3
}

/// Laplace transform of a bump profile with the given center and half-width.
#[inline]
pub fn profile_transform(omega: f64, center: f64, half_width: f64) -> f64 {
    (log_scaled_transform(omega * half_width) - omega * center).exp()
}

/// Direct-quadrature Laplace transform, independent of the cache.
pub fn profile_transform_direct(omega: f64, center: f64, half_width: f64) -> f64 {
    scaled_transform_direct(omega * half_width) * (-omega * center).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_bump_has_unit_transform_at_zero() {
        assert!((scaled_transform_direct(0.0) - 1.0).abs() < 1e-14);
        assert!((log_scaled_transform(0.0)).abs() < 1e-13);
    }

    #[test]
    fn direct_rule_is_converged() {
        for &k in &[-30.0, -3.0, 0.7, 12.0, 50.0] {
            let shift = f64::abs(k);
            let coarse: f64 = trapezoid_nodes(DIRECT_NODES / 2)
                .map(|(s, w)| w * raw_bump(s) * (-k * s - shift).exp())
                .sum::<f64>()
                * shift.exp()
                / trapezoid_nodes(DIRECT_NODES / 2).map(|(s, w)| w * raw_bump(s)).sum::<f64>();
            let fine = scaled_transform_direct(k);
            assert!((coarse - fine).abs() / fine < 1e-12, "k={k}");
        }
    }

    #[test]
    fn table_interpolation_matches_direct() {
        let mut worst: f64 = 0.0;
        for i in 0..997 {
            let k = -60.0 + 120.0 * i as f64 / 997.0 + 1e-3;
            let a = log_scaled_transform(k).exp();
            let b = scaled_transform_direct(k);
            worst = worst.max((a - b).abs() / b);
        }
        assert!(worst < 1e-10, "worst relative interpolation error {worst:e}");
    }

    #[test]
    fn support_bound_holds() {
        // h >= 0, int h = 1, support in [c - w, c + w]  =>  h_hat(omega) <= e^{-omega (c - w)}
        for &om in &[0.5, 1.0, 3.0, 10.0] {
            let v = profile_transform(om, 1.0, 0.25);
            assert!(v > 0.0 && v <= (-om * 0.75f64).exp());
        }
    }

    #[test]
    fn derivative_transform_integrates_by_parts() {
        // int b'(s) e^{-ks} ds = k int b e^{-ks} ds
        for &k in &[-4.0, 0.3, 2.0, 9.0] {
            let lhs = scaled_derivative_transform_direct(k);
            let rhs = k * scaled_transform_direct(k);
            assert!((lhs - rhs).abs() < 1e-11 * rhs.abs().max(1.0));
        }
    }
}
