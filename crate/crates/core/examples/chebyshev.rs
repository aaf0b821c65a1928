//! Uniform polynomial approximation of exp(2inx) on [0, 1].

use euclid_rp::evolve::chebyshev::{chebyshev_approx, CERTIFICATION_POINTS};

fn main() -> euclid_rp::Result<()> {
    for n in [0, 1, 2, 4, 8, 10] {
        let a = chebyshev_approx(n, 1e-10)?;
        println!(
            "n = {n:2}: degree {:2}, sup error {:.2e}, certified {:.2e}",
            a.degree,
            a.sup_error,
            a.certify(CERTIFICATION_POINTS, 7)
        );
    }
    print!("{}", euclid_rp::io::chebyshev_csv(&chebyshev_approx(1, 1e-10)?));
    Ok(())
}
