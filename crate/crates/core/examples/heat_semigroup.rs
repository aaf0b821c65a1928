//! Euclidean time evolution as a profile shift, and H, M^2 expectations.

use euclid_rp::evolve::{hamiltonian_expectation, heat_matrix_element, mass_squared_expectation};
use euclid_rp::green_models::FourPointModel;
use euclid_rp::hilbert::{EuclideanTestFunction, InnerProduct, QuadratureConfig, TimeProfile, WavePacket3};

fn main() -> euclid_rp::Result<()> {
    let ip = InnerProduct::new(FourPointModel::default_interacting(1.0)?, QuadratureConfig::default());
    let one = EuclideanTestFunction::one_point(WavePacket3::gaussian([0.0; 3], 0.1)?, TimeProfile::new(1.0, 0.25)?)?;
    let pair = EuclideanTestFunction::two_point(
        WavePacket3::gaussian([0.0, 0.0, 0.3], 0.2)?,
        TimeProfile::new(1.0, 0.25)?,
        WavePacket3::gaussian([0.0, 0.0, -0.3], 0.2)?,
        TimeProfile::new(2.0, 0.25)?,
    )?;
    for beta in [0.0, 0.5, 1.0, 2.0] {
        println!("beta {beta}: <f|exp(-beta H)|f> = {:.6e}", heat_matrix_element(&ip, &pair, &pair, beta)?.re);
    }
    println!("one particle: <H> = {:.8}, <M^2> = {:.8}", hamiltonian_expectation(&ip, &one, 1e-4)?, mass_squared_expectation(&ip, &one)?);
    println!("pair:         <H> = {:.8}, <M^2> = {:.8}", hamiltonian_expectation(&ip, &pair, 1e-4)?, mass_squared_expectation(&ip, &pair)?);
    Ok(())
}
