//! Gram-matrix certificates for random families and the broken-kernel probe.

use euclid_rp::cli::probe_family;
use euclid_rp::green_models::{ConnectedKernel, FourPointModel, TwoPointModel};
use euclid_rp::hilbert::{random_two_point_family, InnerProduct, QuadratureConfig};
use rand::SeedableRng;

fn main() -> euclid_rp::Result<()> {
    let ip = InnerProduct::new(FourPointModel::default_interacting(1.0)?, QuadratureConfig::default());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for size in [2, 4, 6] {
        let fam = random_two_point_family(&mut rng, size);
        let c = ip.rp_certificate(&fam)?;
        println!("size {size}: eigenvalues in [{:.3e}, {:.3e}] pass={}", c.min_eigenvalue, c.max_eigenvalue, c.pass);
    }

    let k = ConnectedKernel::broken(2000.0, 1.0, 1.0, 2.2, 6.2, 8)?;
    let broken = FourPointModel::new(TwoPointModel::new(1.0)?, TwoPointModel::new(1.0)?, Some(k))?;
    let c = InnerProduct::new(broken, QuadratureConfig::default()).rp_certificate(&probe_family())?;
    println!("broken kernel: min/max = {:.3} pass={}", c.min_eigenvalue / c.max_eigenvalue, c.pass);
    Ok(())
}
