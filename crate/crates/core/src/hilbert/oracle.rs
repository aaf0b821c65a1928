//! Brute-force reference evaluations used to validate the spherical engine.

use super::{product_gaussian, TimeProfile, WavePacket3};
use crate::quadrature::omega;
use num_complex::Complex64;
use rayon::prelude::*;

/// `int conj(psi_f) psi_g h_f h_g / (2 omega) d^3p` by the trapezoid rule on
/// a cube of `n^3` points spanning `box_sigmas` product widths around the
/// product-Gaussian center. Spectrally accurate for Gaussian packets.
pub fn one_particle_cartesian(
    f: (&WavePacket3, &TimeProfile),
    g: (&WavePacket3, &TimeProfile),
    m: f64,
    n: usize,
    box_sigmas: f64,
) -> Complex64 {
    let (c, s) = product_gaussian(f.0, g.0);
    let half = box_sigmas * s * std::f64::consts::SQRT_2;
    let step = 2.0 * half / (n - 1) as f64;
    let planes: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                for k in 0..n {
                    let q = [
                        c[0] - half + i as f64 * step,
                        c[1] - half + j as f64 * step,
                        c[2] - half + k as f64 * step,
                    ];
                    let om = omega(m, q);
                    acc += f.0.eval(q, m).conj() * g.0.eval(q, m) * (f.1.laplace(om) * g.1.laplace(om) / (2.0 * om));
                }
            }
            acc
        })
        .collect();
    planes.iter().sum::<Complex64>() * (step * step * step)
}
