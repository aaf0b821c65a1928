//! Hermitian spectra for Gram-type matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues (ascending) of the Hermitian part `(A + A^†)/2`.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    assert!(a.is_square(), "eigenvalues need a square matrix");
    if a.nrows() == 0 {
        return Vec::new();
    }
    let h = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching unitary whose columns are eigenvectors.
pub fn hermitian_eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Largest relative deviation from Hermiticity, `max|A - A^†| / max|A|`.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_known_hermitian() {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(2.0, 0.0),
            ],
        );
        let v = hermitian_eigenvalues(&a);
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
        let (vals, vecs) = hermitian_eigh(&a);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            2,
            vals.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        let back = &vecs * d * vecs.adjoint();
        assert!((back - a).norm() < 1e-13);
    }
}
