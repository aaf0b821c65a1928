//! SL(2,C) boosts, Wigner `D^j` by symmetric tensor powers, and the
//! covariant spin-`j` two-point kernel with its positivity check.
//!
//! Spins are carried as `two_j = 2j`. The standard basis of the spin-`j`
//! space is `e_m = u1^(j+m) u2^(j-m) / sqrt((j+m)! (j-m)!)`, ordered
//! `m = j, j-1, ..., -j`, on which `A` acts by `(T_A P)(u) = P(A^T u)`.

use crate::error::{domain, Error, Result};
use crate::hilbert::{TimeProfile, WavePacket3, TOL_RP};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::quadrature::{norm2, omega, SphericalGrid, SphericalRule, Vec3};
use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const DEFAULT_TWO_J_MAX: u32 = 8;

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// Pauli matrices.
pub fn pauli() -> [Matrix2<C>; 3] {
    let (o, l, i) = (c(0.0), c(1.0), C::new(0.0, 1.0));
    [
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(l, o, o, -l),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourMomentum {
    pub energy: f64,
    pub spatial: Vec3,
}

impl FourMomentum {
    /// On-shell positive-energy momentum of mass `m`.
    pub fn on_shell(m: f64, p: Vec3) -> Result<Self> {
        if !(m > 0.0) {
            return domain(format!("mass {m} must be positive"));
        }
        Ok(Self {
            energy: omega(m, p),
            spatial: p,
        })
    }

    /// `p0^2 - |p|^2`.
    pub fn invariant(&self) -> f64 {
        self.energy * self.energy - norm2(self.spatial)
    }

    pub fn is_timelike_future(&self) -> bool {
        self.energy > 0.0 && self.invariant() > 0.0
    }
}

/// A 2x2 complex matrix, unimodular when built by the constructors here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl2cMatrix(pub Matrix2<C>);

impl Sl2cMatrix {
    pub fn new(m: Matrix2<C>) -> Result<Self> {
        let d = m.determinant();
        if (d - c(1.0)).norm() > 1e-12 {
            return Err(Error::Construction(format!("determinant {d} is not one")));
        }
        Ok(Self(m))
    }

    /// Rescales an invertible matrix to unit determinant.
    pub fn normalized(m: Matrix2<C>) -> Result<Self> {
        let d = m.determinant();
        if d.norm() < 1e-300 {
            return Err(Error::Singular("matrix is not invertible".into()));
        }
        Ok(Self(m / d.sqrt()))
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    /// Rotation by `angle` about the unit axis `n`: `exp(-i angle n.sigma / 2)`.
    pub fn rotation(axis: Vec3, angle: f64) -> Self {
        let len = norm2(axis).sqrt();
        let s = pauli();
        let ns = (s[0] * c(axis[0]) + s[1] * c(axis[1]) + s[2] * c(axis[2])) / c(len);
        Self(Matrix2::identity() * c((angle / 2.0).cos()) - ns * C::new(0.0, (angle / 2.0).sin()))
    }

    pub fn det(&self) -> C {
        self.0.determinant()
    }

    pub fn mul(&self, o: &Sl2cMatrix) -> Sl2cMatrix {
        Sl2cMatrix(self.0 * o.0)
    }

    pub fn adjoint(&self) -> Sl2cMatrix {
        Sl2cMatrix(self.0.adjoint())
    }
}

/// `p0 1 + p.sigma`; eigenvalues `p0 +- |p|`.
pub fn sigma_dot_p(p: &FourMomentum) -> Result<Matrix2<C>> {
    if !p.is_timelike_future() {
        return domain("sigma.p needs a timelike future momentum");
    }
    Ok(sigma_contract(c(p.energy), p.spatial))
}

fn sigma_contract(p0: C, p: Vec3) -> Matrix2<C> {
    let s = pauli();
    Matrix2::identity() * p0 + s[0] * c(p[0]) + s[1] * c(p[1]) + s[2] * c(p[2])
}

/// Euclidean contraction `p_e.sigma_e = -i p_e0 1 + p.sigma`, which becomes
/// `omega 1 + p.sigma` at the pole `p_e0 = i omega`.
pub fn euclidean_sigma(p0: C, p: Vec3) -> Matrix2<C> {
    sigma_contract(C::new(0.0, -1.0) * p0, p)
}

/// Square root of a 2x2 positive Hermitian matrix.
fn sqrt_positive(m: &Matrix2<C>) -> Matrix2<C> {
    let s = m.determinant().re.max(0.0).sqrt();
    let t = (m.trace().re + 2.0 * s).sqrt();
    (m + Matrix2::identity() * c(s)) / c(t)
}

/// Canonical boost `P(p) = exp(rho.sigma / 2)` with rapidity along `p`.
pub fn canonical_boost(m: f64, p: Vec3) -> Result<Sl2cMatrix> {
    if !(m > 0.0) {
        return domain(format!("mass {m} must be positive"));
    }
    let w = omega(m, p);
    let num = sigma_contract(c(w + m), p);
    Ok(Sl2cMatrix(num / c((2.0 * m * (w + m)).sqrt())))
}

/// `A = P R` with `P = (A A^dagger)^(1/2)` positive and `R` unitary.
pub fn polar_decompose(a: &Sl2cMatrix) -> Result<(Matrix2<C>, Matrix2<C>)> {
    if a.det().norm() < 1e-300 {
        return Err(Error::Singular("polar decomposition of a singular matrix".into()));
    }
    let p = sqrt_positive(&(a.0 * a.0.adjoint()));
    let pinv = p.try_inverse().ok_or_else(|| Error::Singular("positive factor not invertible".into()))?;
    Ok((p, pinv * a.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerD {
    pub two_j: u32,
    pub matrix: CMatrix,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn poly_mul(a: &[C], b: &[C]) -> Vec<C> {
    let mut out = vec![c(0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `D^j(A)` for any 2x2 matrix (not necessarily unimodular). Homogeneous of
/// degree `2j` in `A`.
pub fn wigner_d_matrix(a: &Matrix2<C>, two_j: u32) -> Result<WignerD> {
    wigner_d_capped(a, two_j, DEFAULT_TWO_J_MAX)
}

pub fn wigner_d_capped(a: &Matrix2<C>, two_j: u32, two_j_max: u32) -> Result<WignerD> {
    if two_j > two_j_max {
        return domain(format!("spin {}/2 above the cap {}/2", two_j, two_j_max));
    }
    let n = two_j as usize + 1;
    // (A^T u)_1 = A11 u1 + A21 u2, (A^T u)_2 = A12 u1 + A22 u2; polynomials in
    // u1 / u2 stored by power of u2.
    let first = [a[(0, 0)], a[(1, 0)]];
    let second = [a[(0, 1)], a[(1, 1)]];
    let mut matrix = CMatrix::zeros(n, n);
    for col in 0..n {
        // column index k corresponds to m = j - k: powers u1^(2j-k) u2^k
        let p1 = (two_j as usize - col) as u32;
        let p2 = col as u32;
        let mut poly = vec![c(1.0)];
        for _ in 0..p1 {
            poly = poly_mul(&poly, &first);
        }
        for _ in 0..p2 {
            poly = poly_mul(&poly, &second);
        }
        let norm_col = (factorial(p1) * factorial(p2)).sqrt();
        for (row, coef) in poly.iter().enumerate() {
            let q1 = two_j - row as u32;
            let norm_row = (factorial(q1) * factorial(row as u32)).sqrt();
            matrix[(row, col)] = coef * (norm_row / norm_col);
        }
    }
    Ok(WignerD { two_j, matrix })
}

pub fn wigner_d(a: &Sl2cMatrix, two_j: u32) -> Result<WignerD> {
    wigner_d_matrix(&a.0, two_j)
}

/// `2m D^j(p_e.sigma_e) / (p_e^2 + m^2)` at a Euclidean 4-momentum.
pub fn spin_two_point_kernel(p_e: [f64; 4], m: f64, two_j: u32) -> Result<CMatrix> {
    if !(m > 0.0) {
        return domain(format!("mass {m} must be positive"));
    }
    let s = euclidean_sigma(c(p_e[0]), [p_e[1], p_e[2], p_e[3]]);
    let d = wigner_d_matrix(&s, two_j)?;
    let p2: f64 = p_e.iter().map(|x| x * x).sum();
    Ok(d.matrix * c(2.0 * m / (p2 + m * m)))
}

/// Numerator matrix of the kernel at the energy pole `p_e0 = i omega`.
pub fn pole_numerator(m: f64, p: Vec3, two_j: u32) -> Result<CMatrix> {
    let s = euclidean_sigma(C::new(0.0, omega(m, p)), p);
    Ok(wigner_d_matrix(&s, two_j)?.matrix * c(2.0 * m))
}

/// Which 2x2 matrix enters the spin kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpinKernelKind {
    /// `D^j(sigma.p)`.
    Covariant,
    /// `D^j(sigma.p) + D^j(omega - p.sigma)` as a direct sum.
    Doubled,
    /// `D^j(-omega + p.sigma)`, indefinite; a counterexample.
    FlippedEnergy,
}

impl SpinKernelKind {
    pub fn components(&self, two_j: u32) -> usize {
        let n = two_j as usize + 1;
        match self {
            SpinKernelKind::Doubled => 2 * n,
            _ => n,
        }
    }

    fn matrix(&self, m: f64, p: Vec3, two_j: u32) -> Result<CMatrix> {
        let w = omega(m, p);
        Ok(match self {
            SpinKernelKind::Covariant => wigner_d_matrix(&sigma_contract(c(w), p), two_j)?.matrix,
            SpinKernelKind::FlippedEnergy => wigner_d_matrix(&sigma_contract(c(-w), p), two_j)?.matrix,
            SpinKernelKind::Doubled => {
                let r = wigner_d_matrix(&sigma_contract(c(w), p), two_j)?.matrix;
                let l = wigner_d_matrix(&sigma_contract(c(w), [-p[0], -p[1], -p[2]]), two_j)?.matrix;
                let n = r.nrows();
                let mut out = CMatrix::zeros(2 * n, 2 * n);
                out.view_mut((0, 0), (n, n)).copy_from(&r);
                out.view_mut((n, n), (n, n)).copy_from(&l);
                out
            }
        })
    }
}

/// Multi-component test function: one packet and profile per spin component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinTestFunction {
    pub components: Vec<(WavePacket3, TimeProfile)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinCertificate {
    pub two_j: u32,
    pub mass: f64,
    pub family_size: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub pass: bool,
}

fn family_grid(family: &[SpinTestFunction], rule: SphericalRule) -> SphericalGrid {
    let pts: Vec<&WavePacket3> = family.iter().flat_map(|f| f.components.iter().map(|(p, _)| p)).collect();
    let n = pts.len() as f64;
    let mut center = [0.0; 3];
    for p in &pts {
        for d in 0..3 {
            center[d] += p.center[d] / n;
        }
    }
    let radius = pts
        .iter()
        .map(|p| norm2(crate::quadrature::sub(p.center, center)).sqrt() + 8.0 * p.width)
        .fold(0.0, f64::max);
    SphericalGrid::new(center, radius, rule)
}

/// Gram matrix of `int d^3p psi_f^dagger K(p) psi_g 2m / (2 omega)` with
/// `psi_alpha(p) = packet_alpha(p) h_alpha_hat(omega)`.
pub fn spin_gram_matrix(
    family: &[SpinTestFunction],
    m: f64,
    two_j: u32,
    kind: SpinKernelKind,
    rule: SphericalRule,
) -> Result<CMatrix> {
    if family.is_empty() {
        return domain("empty spin family");
    }
    if !(m > 0.0) {
        return domain(format!("mass {m} must be positive"));
    }
    let dim = kind.components(two_j);
    for f in family {
        if f.components.len() != dim {
            return domain(format!("spin test function has {} components, expected {dim}", f.components.len()));
        }
    }
    let grid = family_grid(family, rule);
    let n = family.len();
    let mut gram = CMatrix::zeros(n, n);
    for (p, w) in grid.points.iter().zip(&grid.weights) {
        let om = omega(m, *p);
        let k = kind.matrix(m, *p, two_j)?;
        let psi: Vec<Vec<C>> = family
            .iter()
            .map(|f| f.components.iter().map(|(pk, h)| pk.eval(*p, m) * h.laplace(om)).collect())
            .collect();
        let kpsi: Vec<Vec<C>> = psi
            .iter()
            .map(|v| (0..dim).map(|a| (0..dim).map(|b| k[(a, b)] * v[b]).sum()).collect())
            .collect();
        let scale = w * 2.0 * m / (2.0 * om);
        for i in 0..n {
            for jx in i..n {
                let v: C = psi[i].iter().zip(&kpsi[jx]).map(|(a, b)| a.conj() * b).sum();
                gram[(i, jx)] += v * scale;
            }
        }
    }
    for i in 0..n {
        for jx in 0..i {
            gram[(i, jx)] = gram[(jx, i)].conj();
        }
    }
    Ok(gram)
}

pub fn spin_rp_certificate(family: &[SpinTestFunction], m: f64, two_j: u32) -> Result<SpinCertificate> {
    spin_rp_certificate_with(family, m, two_j, SpinKernelKind::Covariant, SphericalRule::new(48, 24, 24))
}

pub fn spin_rp_certificate_with(
    family: &[SpinTestFunction],
    m: f64,
    two_j: u32,
    kind: SpinKernelKind,
    rule: SphericalRule,
) -> Result<SpinCertificate> {
    let g = spin_gram_matrix(family, m, two_j, kind, rule)?;
    let eig = hermitian_eigenvalues(&g);
    let (min, max) = (eig[0], *eig.last().unwrap());
    Ok(SpinCertificate {
        two_j,
        mass: m,
        family_size: family.len(),
        min_eigenvalue: min,
        max_eigenvalue: max,
        pass: max > 0.0 && min >= -TOL_RP * max,
    })
}

/// Random spinor packets near the origin, one profile per function.
pub fn random_spin_family(rng: &mut impl rand::Rng, n: usize, components: usize) -> Vec<SpinTestFunction> {
    (0..n)
        .map(|_| {
            let t = rng.gen_range(0.6..1.4);
            let h = TimeProfile::new(t, 0.25).unwrap();
            SpinTestFunction {
                components: (0..components)
                    .map(|_| {
                        let center = [rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4)];
                        let amp = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        (WavePacket3::new(center, rng.gen_range(0.15..0.3), amp).unwrap(), h)
                    })
                    .collect(),
            }
        })
        .collect()
}
