//! Invariance-principle S-matrix element in the free theory equals the overlap.

use euclid_rp::green_models::FourPointModel;
use euclid_rp::hilbert::{InnerProduct, QuadratureConfig};
use euclid_rp::scatter::{free_overlap, smatrix_element, AsymptoticState};

fn main() -> euclid_rp::Result<()> {
    let ip = InnerProduct::new(FourPointModel::free(1.0, 1.0)?, QuadratureConfig::default());
    let f = AsymptoticState::head_on(0.2, 0.4, 1.0)?;
    let i = AsymptoticState::head_on(0.25, 0.35, 1.0)?;
    let overlap = free_overlap(&ip, &f, &i)?;
    println!("<f|i> = {overlap:.12e}");
    for n in [4, 8, 16] {
        let s = smatrix_element(&ip, &f, &i, n, 1.0, 1e-8)?;
        println!("n = {n:2}: S = {s:.12e}, |S - <f|i>| = {:.2e}", (s - overlap).norm());
    }
    Ok(())
}
