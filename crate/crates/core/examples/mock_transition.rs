//! Finite-dimensional scattering mock: pipeline against diagonalization and
//! sharp-momentum transition extraction.

use euclid_rp::scatter::mock::MockModel;

fn main() -> euclid_rp::Result<()> {
    let m = MockModel::friedrichs(50, 0.15, 1.0)?;
    let psi = m.packet(0.25, 0.04);
    for n in [4, 8, 16] {
        let a = m.smatrix_pipeline(&psi, &psi, n, 1e-11)?;
        let b = m.smatrix_oracle(&psi, &psi, n);
        println!("n = {n:2}: pipeline {a:.10}, diagonalization {b:.10}");
    }
    let exact = m.exact_t_matrix(0.25)?;
    println!("exact T(0.25) = {exact:.6}");
    for width in [0.08, 0.04, 0.02] {
        let r = m.extract_transition(&m.packet(0.25, width), &m.packet(0.25, width), 128, 1e-11)?;
        println!("width {width}: T = {:.6}, relative error {:.3e}", r.t_matrix, (r.t_matrix - exact).norm() / exact.norm());
    }
    Ok(())
}
