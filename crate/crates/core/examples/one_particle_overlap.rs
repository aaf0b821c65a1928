//! Spherical-quadrature one-particle overlap against a Cartesian trapezoid.

use euclid_rp::hilbert::oracle::one_particle_cartesian;
use euclid_rp::hilbert::{one_particle_overlap, TimeProfile, WavePacket3};
use num_complex::Complex64;

fn main() -> euclid_rp::Result<()> {
    let f = (WavePacket3::gaussian([0.0, 0.0, 0.3], 0.15)?, TimeProfile::new(1.0, 0.2)?);
    let g = (WavePacket3::new([0.1, 0.0, 0.25], 0.2, Complex64::new(0.0, 1.0))?, TimeProfile::new(0.8, 0.3)?);
    let v = one_particle_overlap((&f.0, &f.1), (&g.0, &g.1), 1.0)?;
    let o = one_particle_cartesian((&f.0, &f.1), (&g.0, &g.1), 1.0, 121, 10.0);
    println!("spherical {v:.12e}");
    println!("cartesian {o:.12e}");
    println!("relative difference {:.2e}", (v - o).norm() / o.norm());
    Ok(())
}
