//! Boosts, Wigner D matrices and the spin-j reflection-positivity check.

use euclid_rp::quadrature::SphericalRule;
use euclid_rp::spin::{
    canonical_boost, random_spin_family, sigma_dot_p, spin_rp_certificate, spin_rp_certificate_with, wigner_d_matrix,
    FourMomentum, SpinKernelKind,
};
use num_complex::Complex64;
use rand::SeedableRng;

fn main() -> euclid_rp::Result<()> {
    let (m, p) = (1.0, [0.3, -0.2, 0.5]);
    let sp = sigma_dot_p(&FourMomentum::on_shell(m, p)?)?;
    let b = canonical_boost(m, p)?;
    println!("|B B^dag - sigma.p/m| = {:.2e}", (b.0 * b.0.adjoint() - sp / Complex64::new(m, 0.0)).norm());
    for two_j in [1, 2, 3] {
        let d = wigner_d_matrix(&sp, two_j)?;
        println!("D^{two_j}/2 (sigma.p): dimension {}", d.matrix.nrows());
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for two_j in [0, 1, 2] {
        let fam = random_spin_family(&mut rng, 6, two_j as usize + 1);
        let c = spin_rp_certificate(&fam, m, two_j)?;
        println!("2j = {two_j}: eigenvalues [{:.3e}, {:.3e}] pass={}", c.min_eigenvalue, c.max_eigenvalue, c.pass);
    }
    let fam = random_spin_family(&mut rng, 6, 2);
    let c = spin_rp_certificate_with(&fam, m, 1, SpinKernelKind::FlippedEnergy, SphericalRule::new(48, 24, 24))?;
    println!("flipped energy kernel: pass={}", c.pass);
    Ok(())
}
