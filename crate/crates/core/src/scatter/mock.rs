//! Finite-dimensional stand-in for the scattering pipeline.
//!
//! A Hermitian `H` on `C^d`, a diagonal free Hamiltonian `H_0` in the
//! asymptotic basis and an explicit injection `Phi` replace the Green
//! function matrix elements. The pipeline forms `X = exp(-beta H)` and applies
//! the Chebyshev polynomial by a Clenshaw recurrence on vectors; the oracle
//! diagonalizes `H` and applies `exp(2 i n exp(-beta lambda))` exactly.
//!
//! The discretized Friedrichs model `H = diag(E_j) + g v v^T` with
//! `v_j = sqrt(v^2(E_j) D)` on `N` levels of spacing `D` has the continuum
//! on-shell amplitude `T(E) = g v^2(E) / (1 - g F(E + i0))`.

use super::TransitionResult;
use crate::error::{domain, Error, Result};
use crate::evolve::chebyshev::{chebyshev_approx, ChebyshevApprox};
use crate::linalg::{hermitian_eigh, hermiticity_defect, CMatrix};
use crate::quadrature::gauss_legendre;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub type CVector = DVector<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Friedrichs {
    coupling: f64,
    lower: f64,
    upper: f64,
}

#[derive(Debug, Clone)]
pub struct MockModel {
    pub h: CMatrix,
    /// Diagonal of `H_0` in the asymptotic basis.
    pub free_energies: Vec<f64>,
    pub phi: CMatrix,
    pub beta: f64,
    friedrichs: Option<Friedrichs>,
}

/// Smooth form factor vanishing at both band edges.
fn form_factor_sq(e: f64, lower: f64, upper: f64) -> f64 {
    let mid = 0.5 * (lower + upper);
    let u = (e - mid) / (0.5 * (upper - lower));
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - u.powi(4)).powi(2)
    }
}

impl MockModel {
    pub fn new(h: CMatrix, free_energies: Vec<f64>, phi: CMatrix, beta: f64) -> Result<Self> {
        let d = free_energies.len();
        if h.nrows() != d || h.ncols() != d || phi.nrows() != d || phi.ncols() != d {
            return Err(Error::Construction(format!("mock dimensions disagree with {d} free levels")));
        }
        if hermiticity_defect(&h) > 1e-12 {
            return Err(Error::Construction("mock Hamiltonian is not Hermitian".into()));
        }
        if !(beta > 0.0) {
            return domain(format!("beta {beta} must be positive"));
        }
        let (vals, _) = hermitian_eigh(&h);
        if vals.iter().any(|&v| v < 0.0) || free_energies.iter().any(|&v| v < 0.0) {
            return domain("mock spectra must be non-negative");
        }
        Ok(Self {
            h,
            free_energies,
            phi,
            beta,
            friedrichs: None,
        })
    }

    /// `levels` equally spaced states on `[0, 0.5]` GeV coupled through the
    /// form factor, with `Phi = 1`.
    pub fn friedrichs(levels: usize, coupling: f64, beta: f64) -> Result<Self> {
        let (lower, upper) = (0.0, 0.5);
        let spacing = (upper - lower) / levels as f64;
        let e: Vec<f64> = (0..levels).map(|j| lower + (j as f64 + 0.5) * spacing).collect();
        let v: Vec<f64> = e.iter().map(|&x| (form_factor_sq(x, lower, upper) * spacing).sqrt()).collect();
        let h = CMatrix::from_fn(levels, levels, |i, j| {
            let diag = if i == j { e[i] } else { 0.0 };
            Complex64::new(diag + coupling * v[i] * v[j], 0.0)
        });
        let mut m = Self::new(h, e, CMatrix::identity(levels, levels), beta)?;
        m.friedrichs = Some(Friedrichs { coupling, lower, upper });
        Ok(m)
    }

    /// Random Hermitian `H` with spectrum in `[0.05, 2.05]`, random free
    /// levels in `[0, 2]` and a random unitary `Phi`.
    pub fn random(dim: usize, seed: u64, beta: f64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gauss = || {
            // Box-Muller
            let (u, v): (f64, f64) = (rng.gen::<f64>().max(1e-300), rng.gen());
            let r = (-2.0 * u.ln()).sqrt();
            Complex64::new(r * (2.0 * PI * v).cos(), r * (2.0 * PI * v).sin())
        };
        let g = CMatrix::from_fn(dim, dim, |_, _| gauss());
        let a = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
        let (vals, _) = hermitian_eigh(&a);
        let (lo, hi) = (vals[0], vals[vals.len() - 1]);
        let s = 2.0 / (hi - lo);
        let h = CMatrix::from_fn(dim, dim, |i, j| {
            let shift = if i == j { -lo * s + 0.05 } else { 0.0 };
            a[(i, j)] * s + shift
        });
        let q = CMatrix::from_fn(dim, dim, |_, _| gauss()).qr().q();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let e0: Vec<f64> = (0..dim).map(|_| 2.0 * rng.gen::<f64>()).collect();
        Self::new(h, e0, q, beta)
    }

    pub fn dim(&self) -> usize {
        self.free_energies.len()
    }

    /// Normalized Gaussian energy packet `exp(-(E - e0)^2 / (4 sigma^2))` on
    /// the free levels.
    pub fn packet(&self, e0: f64, sigma: f64) -> CVector {
        let v = CVector::from_iterator(
            self.dim(),
            self.free_energies
                .iter()
                .map(|&e| Complex64::new((-(e - e0).powi(2) / (4.0 * sigma * sigma)).exp(), 0.0)),
        );
        let n = v.norm();
        v / Complex64::new(n, 0.0)
    }

    /// `exp(i c exp(-beta H_0)) psi`.
    pub fn asymptotic_phase(&self, c: f64, psi: &CVector) -> CVector {
        CVector::from_iterator(
            self.dim(),
            psi.iter()
                .zip(&self.free_energies)
                .map(|(p, &e)| p * Complex64::from_polar(1.0, c * (-self.beta * e).exp())),
        )
    }

    fn injected(&self, c: f64, psi: &CVector) -> CVector {
        &self.phi * self.asymptotic_phase(c, psi)
    }

    /// `P(X) v` with `P = sum c_k T_k(2X - 1)` by the vector Clenshaw recurrence.
    fn apply_polynomial(x: &CMatrix, approx: &ChebyshevApprox, v: &CVector) -> CVector {
        let y = |u: &CVector| -> CVector { (x * u) * Complex64::new(2.0, 0.0) - u };
        let c = &approx.chebyshev;
        let zero = CVector::zeros(v.len());
        let (mut b1, mut b2) = (zero.clone(), zero);
        for ck in c.iter().skip(1).rev() {
            let b0 = v * *ck + y(&b1) * Complex64::new(2.0, 0.0) - &b2;
            b2 = b1;
            b1 = b0;
        }
        v * c[0] + y(&b1) - b2
    }

    /// Pipeline value of the S-matrix element at phase parameter `n`.
    pub fn smatrix_pipeline(&self, psi_f: &CVector, psi_i: &CVector, n: u32, eps: f64) -> Result<Complex64> {
        let approx = chebyshev_approx(n, eps)?;
        self.smatrix_with(psi_f, psi_i, n, &approx)
    }

    pub fn smatrix_with(&self, psi_f: &CVector, psi_i: &CVector, n: u32, approx: &ChebyshevApprox) -> Result<Complex64> {
        let x = (&self.h * Complex64::new(-self.beta, 0.0)).exp();
        let bra = self.injected(n as f64, psi_f);
        let ket = self.injected(-(n as f64), psi_i);
        Ok(bra.dotc(&Self::apply_polynomial(&x, approx, &ket)))
    }

    /// Same element by diagonalization of `H`.
    pub fn smatrix_oracle(&self, psi_f: &CVector, psi_i: &CVector, n: u32) -> Complex64 {
        let (vals, u) = hermitian_eigh(&self.h);
        let bra = u.adjoint() * self.injected(n as f64, psi_f);
        let ket = u.adjoint() * self.injected(-(n as f64), psi_i);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, lam) in vals.iter().enumerate() {
            acc += bra[k].conj() * ket[k] * Complex64::from_polar(1.0, 2.0 * n as f64 * (-self.beta * lam).exp());
        }
        acc
    }

    /// Energy-shell overlap on the discrete levels. With amplitudes on levels
    /// of spacing `D` and couplings scaled by `sqrt(D)`, the level spacing
    /// cancels against the continuum normalization of `T`.
    pub fn energy_delta(&self, psi_f: &CVector, psi_i: &CVector) -> Complex64 {
        psi_f.dotc(psi_i)
    }

    pub fn extract_transition(&self, psi_f: &CVector, psi_i: &CVector, n: u32, eps: f64) -> Result<TransitionResult> {
        let approx = chebyshev_approx(n, eps)?;
        let s = self.smatrix_with(psi_f, psi_i, n, &approx)?;
        let s2 = self.smatrix_pipeline(psi_f, psi_i, 2 * n, eps)?;
        let overlap = (&self.phi * psi_f).dotc(&(&self.phi * psi_i));
        let delta = self.energy_delta(psi_f, psi_i);
        TransitionResult::assemble(s, s2, overlap, delta, n, approx.degree, eps * psi_f.norm() * psi_i.norm())
    }

    /// Continuum on-shell amplitude of the Friedrichs model.
    pub fn exact_t_matrix(&self, e: f64) -> Result<Complex64> {
        let Some(fr) = self.friedrichs else {
            return domain("exact T is available for the Friedrichs mock only");
        };
        let (a, b) = (fr.lower, fr.upper);
        if !(e > a && e < b) {
            return domain(format!("energy {e} outside the band ({a}, {b})"));
        }
        let v2 = |x: f64| form_factor_sq(x, a, b);
        // Principal value with the pole subtracted.
        let pv: f64 = gauss_legendre(2000, a, b)
            .iter()
            .map(|&(x, w)| w * (v2(x) - v2(e)) / (e - x))
            .sum::<f64>()
            + v2(e) * ((e - a) / (b - e)).ln();
        let f = Complex64::new(pv, -PI * v2(e));
        Ok(fr.coupling * v2(e) / (Complex64::new(1.0, 0.0) - f * fr.coupling))
    }
}
