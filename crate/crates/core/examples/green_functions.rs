//! Free two-point function, a Widder kernel and on-shell kernel positivity.

use euclid_rp::green_models::{
    check_kernel_positivity, eval_two_point_momentum, widder_kernel, ConnectedKernel, DensityShape, SpectralDensity,
};

fn main() -> euclid_rp::Result<()> {
    println!("1/(p^2 + m^2) at p = (1,0,0,0), m = 1: {}", eval_two_point_momentum([1.0, 0.0, 0.0, 0.0], 1.0)?);

    let rho = SpectralDensity::new(2.2, 6.2, DensityShape::Bump, 32)?;
    for tau in [0.5, 1.0, 2.0] {
        println!("Widder kernel K({tau}, {tau}) = {:.6e}", widder_kernel(&rho, tau, tau)?);
    }

    let grid: Vec<([f64; 3], f64)> = (0..8)
        .map(|i| ([0.1 * i as f64, 0.0, if i % 2 == 0 { 0.3 } else { -0.3 }], 1.0))
        .collect();
    let fixed = ([0.0; 3], 4.2);
    let good = ConnectedKernel::separable_gaussian(1.0, 1.0, 1.0, 2.2, 6.2, 32)?;
    let bad = ConnectedKernel::broken(1.0, 1.0, 1.0, 2.2, 6.2, 32)?;
    println!("separable kernel min eigenvalue {:.3e}", check_kernel_positivity(&good, &grid, fixed)?);
    println!("broken kernel min eigenvalue    {:.3e}", check_kernel_positivity(&bad, &grid, fixed)?);
    Ok(())
}
