//! Uniform polynomial approximation of `exp(2 i n x)` on `[0, 1]`.
//!
//! The fit interpolates at Chebyshev-Gauss nodes of the mapped variable
//! `y = 2x - 1` and raises the degree until the error on a dense uniform
//! grid drops below the tolerance. Evaluation uses the Chebyshev series
//! (Clenshaw); the monomial coefficients in `x` are produced with
//! double-double arithmetic for export and for the literal time-shift route.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const DEFAULT_DEGREE_CAP: usize = 512;
pub const VERIFICATION_POINTS: usize = 10_000;
pub const CERTIFICATION_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevApprox {
    pub phase_parameter: u32,
    pub degree: usize,
    /// Coefficients of `T_k(2x - 1)`.
    pub chebyshev: Vec<Complex64>,
    /// Coefficients of `x^k`; entries that overflow double precision are
    /// reported as infinite.
    pub coefficients: Vec<Complex64>,
    pub sup_error: f64,
    pub tolerance: f64,
}

fn target(n: u32, x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * n as f64 * x)
}

fn interpolate(n: u32, degree: usize) -> Vec<Complex64> {
    let m = degree + 1;
    let nodes: Vec<f64> = (0..m).map(|j| (PI * (j as f64 + 0.5) / m as f64).cos()).collect();
    let values: Vec<Complex64> = nodes.iter().map(|&y| target(n, 0.5 * (y + 1.0))).collect();
    (0..m)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                acc += v * (PI * k as f64 * (j as f64 + 0.5) / m as f64).cos();
            }
            let s = if k == 0 { 1.0 } else { 2.0 };
            acc * (s / m as f64)
        })
        .collect()
}

/// Clenshaw evaluation of `sum_k c_k T_k(2x - 1)`.
#[inline]
pub fn clenshaw(c: &[Complex64], x: f64) -> Complex64 {
    let y = 2.0 * x - 1.0;
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * y) - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + b1 * y - b2
}

fn sup_error_on_grid(n: u32, c: &[Complex64], points: usize) -> f64 {
    (0..points)
        .map(|i| {
            let x = i as f64 / (points - 1) as f64;
            (target(n, x) - clenshaw(c, x)).norm()
        })
        .fold(0.0, f64::max)
}

impl ChebyshevApprox {
    #[inline]
    pub fn eval(&self, x: f64) -> Complex64 {
        clenshaw(&self.chebyshev, x)
    }

    /// Maximum error on `samples` uniform random points of `[0, 1]`.
    pub fn certify(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| {
                let x: f64 = rng.gen();
                (target(self.phase_parameter, x) - self.eval(x)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Monomial evaluation `sum_k a_k x^k` (Horner); only meaningful at low
    /// degree where the coefficients are representable without cancellation.
    pub fn eval_monomial(&self, x: f64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * x + a)
    }
}

pub fn chebyshev_approx(n: u32, eps: f64) -> Result<ChebyshevApprox> {
    chebyshev_approx_capped(n, eps, DEFAULT_DEGREE_CAP)
}

pub fn chebyshev_approx_capped(n: u32, eps: f64, cap: usize) -> Result<ChebyshevApprox> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("tolerance {eps} must be positive")));
    }
    let fit = |d: usize| {
        let c = interpolate(n, d);
        let e = sup_error_on_grid(n, &c, VERIFICATION_POINTS);
        (c, e)
    };
    // Grow geometrically to bracket the degree, then bisect.
    let mut hi = 0usize;
    let mut best;
    loop {
        best = fit(hi);
        if best.1 < eps {
            break;
        }
        if hi >= cap {
            return Err(Error::DegreeCap {
                cap,
                best_error: best.1,
            });
        }
        hi = if hi == 0 { 1 } else { (hi * 2).min(cap) };
    }
    let mut lo = hi / 2;
    if hi > 1 {
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let trial = fit(mid);
            if trial.1 < eps {
                hi = mid;
                best = trial;
            } else {
                lo = mid;
            }
        }
    }
    let (chebyshev, sup_error) = best;
    let coefficients = monomial_from_chebyshev(&chebyshev);
    Ok(ChebyshevApprox {
        phase_parameter: n,
        degree: hi,
        chebyshev,
        coefficients,
        sup_error,
        tolerance: eps,
    })
}

/// Double-double number `hi + lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (o.hi - bb);
        let lo = err + self.lo + o.lo;
        let hi = s + lo;
        Dd { hi, lo: lo - (hi - s) }
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn mul_f(self, b: f64) -> Dd {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p);
        let lo = e + self.lo * b;
        let hi = p + lo;
        Dd { hi, lo: lo - (hi - p) }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Re-expands `sum_k c_k T_k(2x - 1)` in powers of `x`.
fn monomial_from_chebyshev(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    let mut re = vec![Dd::ZERO; n];
    let mut im = vec![Dd::ZERO; n];
    // Shifted Chebyshev polynomials T*_k(x) as monomial coefficient vectors.
    let mut prev = vec![Dd::ZERO; n];
    let mut cur = vec![Dd::ZERO; n];
    prev[0] = Dd::from(1.0);
    if n > 1 {
        cur[0] = Dd::from(-1.0);
        cur[1] = Dd::from(2.0);
    }
    for k in 0..n {
        let t = if k == 0 { &prev } else { &cur };
        for (i, tk) in t.iter().enumerate() {
            re[i] = re[i].add(tk.mul_f(c[k].re));
            im[i] = im[i].add(tk.mul_f(c[k].im));
        }
        if k >= 1 && k + 1 < n {
            // T*_{k+1} = (4x - 2) T*_k - T*_{k-1}
            let mut next = vec![Dd::ZERO; n];
            for i in 0..n {
                let mut v = cur[i].mul_f(-2.0).add(prev[i].neg());
                if i > 0 {
                    v = v.add(cur[i - 1].mul_f(4.0));
                }
                next[i] = v;
            }
            prev = std::mem::replace(&mut cur, next);
        }
    }
    re.iter()
        .zip(&im)
        .map(|(r, i)| Complex64::new(r.value(), i.value()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_phase_is_the_constant_one() {
        let a = chebyshev_approx(0, 1e-12).unwrap();
        assert_eq!(a.degree, 0);
        assert_eq!(a.sup_error, 0.0);
        assert_eq!(a.coefficients, vec![Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn ten_digit_fit_for_unit_phase() {
        let a = chebyshev_approx(1, 1e-10).unwrap();
        assert!(a.sup_error < 1e-10);
        assert!(a.certify(CERTIFICATION_POINTS, 1) < 1e-10);
        // low degree: the monomial form agrees with the series
        for x in [0.0, 0.3, 0.77, 1.0] {
            assert!((a.eval_monomial(x) - a.eval(x)).norm() < 1e-12);
        }
    }

    #[test]
    fn degree_grows_linearly() {
        let d: Vec<usize> = [1, 2, 4, 8].iter().map(|&n| chebyshev_approx(n, 1e-10).unwrap().degree).collect();
        for w in d.windows(2) {
            assert!(w[1] > w[0]);
        }
        // increments settle to roughly 2 per unit of n at large n
        let slope = (d[3] - d[2]) as f64 / 4.0;
        assert!(slope > 0.5 && slope < 4.0, "{d:?}");
    }

    #[test]
    fn degree_cap_reports_best_error() {
        match chebyshev_approx_capped(64, 1e-10, 16) {
            Err(Error::DegreeCap { cap, best_error }) => {
                assert_eq!(cap, 16);
                assert!(best_error > 1e-10);
            }
            other => panic!("{other:?}"),
        }
        assert!(chebyshev_approx(1, 0.0).is_err());
    }

    #[test]
    fn shifted_chebyshev_expansion() {
        // T_3(2x-1) = 32x^3 - 48x^2 + 18x - 1
        let c = vec![Complex64::new(0.0, 0.0); 3]
            .into_iter()
            .chain([Complex64::new(1.0, 0.0)])
            .collect::<Vec<_>>();
        let m = monomial_from_chebyshev(&c);
        let expect = [-1.0, 18.0, -48.0, 32.0];
        for (a, b) in m.iter().zip(expect) {
            assert_eq!(a.re, b);
        }
    }
}
