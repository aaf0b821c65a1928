//! Model Euclidean Green functions: free scalar two-point functions,
//! Laplace-form (Widder) one-dimensional kernels and the connected
//! four-point family built from a positive on-shell kernel.
//!
//! The connected kernel evaluated at the propagator poles is
//!
//! ```text
//! v(m_a, p1; m_c, p2; m_b, p3) = g * sum_t c_t a_t(m_a, p1) conj(b_t(m_b, p3)) w_t(m_c, p2)
//! ```
//!
//! a finite sum of separable terms. A term with `a_t == b_t` and `c_t >= 0`
//! is a rank-one positive form; any sum of such terms is positive, which is
//! the reflection-positivity condition on the connected four-point function.
//! Kernels with cross terms (`a_t != b_t`) are allowed so that indefinite
//! counterexamples can be built and detected.

use crate::error::{domain, Error, Result};
use crate::hilbert::laplace::raw_bump;
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::quadrature::{gauss_legendre, norm2, Vec3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Shape of a spectral density on its support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DensityShape {
    /// Constant density.
    Uniform(f64),
    /// C-infinity bump normalized to unit total mass.
    Bump,
}

/// Positive spectral density with a fixed Gauss-Legendre discretization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `(node, weight, density(node))`, nodes strictly increasing.
    nodes: Vec<(f64, f64, f64)>,
}

impl SpectralDensity {
    pub fn new(lambda_min: f64, lambda_max: f64, shape: DensityShape, n: usize) -> Result<Self> {
        if !(lambda_min.is_finite() && lambda_max.is_finite()) || lambda_max <= lambda_min {
            return Err(Error::Construction(format!(
                "spectral support [{lambda_min}, {lambda_max}] is empty"
            )));
        }
        if n == 0 {
            return Err(Error::Construction("spectral density needs at least one node".into()));
        }
        let rule = gauss_legendre(n, lambda_min, lambda_max);
        let half = 0.5 * (lambda_max - lambda_min);
        let mid = 0.5 * (lambda_max + lambda_min);
        let nodes: Vec<(f64, f64, f64)> = match shape {
            DensityShape::Uniform(value) => {
                if value < 0.0 {
                    return Err(Error::Construction("density must be nonnegative".into()));
                }
                rule.iter().map(|&(x, w)| (x, w, value)).collect()
            }
            DensityShape::Bump => {
                let raw: Vec<f64> = rule.iter().map(|&(x, _)| raw_bump((x - mid) / half)).collect();
                let total: f64 = rule.iter().zip(&raw).map(|(&(_, w), r)| w * r).sum();
                rule.iter()
                    .zip(&raw)
                    .map(|(&(x, w), r)| (x, w, r / total))
                    .collect()
            }
        };
        Ok(Self {
            lambda_min,
            lambda_max,
            nodes,
        })
    }

    /// A single mass with unit weight (a discrete Lehmann weight).
    pub fn point_mass(lambda: f64, weight: f64) -> Result<Self> {
        if weight < 0.0 {
            return Err(Error::Construction("point mass weight must be nonnegative".into()));
        }
        Ok(Self {
            lambda_min: lambda,
            lambda_max: lambda,
            nodes: vec![(lambda, 1.0, weight)],
        })
    }

    /// `(node, weight * density)` pairs.
    pub fn weighted_nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().map(|&(x, w, d)| (x, w * d))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, lambda: f64) -> bool {
        lambda >= self.lambda_min && lambda <= self.lambda_max
    }

    pub fn total_mass(&self) -> f64 {
        self.weighted_nodes().map(|(_, w)| w).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPointModel {
    pub mass: f64,
}

impl TwoPointModel {
    pub fn new(mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::Construction(format!("mass {mass} must be positive")));
        }
        Ok(Self { mass })
    }
}

/// A momentum-dependent factor of a separable kernel term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MomentumFactor {
    /// `exp(-|p|^2 / cutoff^2)`.
    Gaussian { cutoff: f64 },
    /// Gaussian with its sign flipped on the half space `p_z < 0`.
    SignFlippedGaussian { cutoff: f64 },
    Constant(f64),
}

impl MomentumFactor {
    #[inline]
    pub fn eval(&self, _mass: f64, p: Vec3) -> f64 {
        match *self {
            MomentumFactor::Gaussian { cutoff } => (-norm2(p) / (cutoff * cutoff)).exp(),
            MomentumFactor::SignFlippedGaussian { cutoff } => {
                let g = (-norm2(p) / (cutoff * cutoff)).exp();
                if p[2] < 0.0 {
                    -g
                } else {
                    g
                }
            }
            MomentumFactor::Constant(c) => c,
        }
    }

    pub fn is_bounded(&self) -> bool {
        true
    }
}

/// Nonnegative exchange weight `w(m_c, p2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExchangeWeight {
    Constant(f64),
    /// `exp(-|p2|^2 / cutoff^2)`.
    Gaussian { cutoff: f64 },
}

impl ExchangeWeight {
    #[inline]
    pub fn eval(&self, _mass_c: f64, p2: Vec3) -> f64 {
        match *self {
            ExchangeWeight::Constant(c) => c,
            ExchangeWeight::Gaussian { cutoff } => (-norm2(p2) / (cutoff * cutoff)).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelTerm {
    pub coefficient: Complex64,
    pub left: MomentumFactor,
    pub right: MomentumFactor,
    pub exchange: ExchangeWeight,
}

impl KernelTerm {
    /// Rank-one positive term `u(p1) conj(u(p3)) w`.
    pub fn positive(factor: MomentumFactor, exchange: ExchangeWeight) -> Self {
        Self {
            coefficient: Complex64::new(1.0, 0.0),
            left: factor,
            right: factor,
            exchange,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectedKernel {
    pub coupling: f64,
    pub mass_a: f64,
    pub mass_b: f64,
    pub mass_c_spectrum: SpectralDensity,
    pub terms: Vec<KernelTerm>,
}

impl ConnectedKernel {
    pub fn new(
        coupling: f64,
        mass_a: f64,
        mass_b: f64,
        mass_c_spectrum: SpectralDensity,
        terms: Vec<KernelTerm>,
    ) -> Result<Self> {
        if coupling < 0.0 || !coupling.is_finite() {
            return Err(Error::Construction(format!("coupling {coupling} must be >= 0")));
        }
        if !(mass_a > 0.0 && mass_b > 0.0) {
            return Err(Error::Construction("propagator masses must be positive".into()));
        }
        if mass_c_spectrum.lambda_min <= mass_a + mass_b {
            return Err(Error::Construction(format!(
                "exchange spectrum starts at {} which is not above m_a + m_b = {}",
                mass_c_spectrum.lambda_min,
                mass_a + mass_b
            )));
        }
        for t in &terms {
            if let ExchangeWeight::Constant(c) = t.exchange {
                if c < 0.0 {
                    return Err(Error::Construction("exchange weight must be nonnegative".into()));
                }
            }
        }
        Ok(Self {
            coupling,
            mass_a,
            mass_b,
            mass_c_spectrum,
            terms,
        })
    }

    /// Gaussian rank-one kernel with the exchange spectrum carried by a
    /// normalized bump on `[lambda_min, lambda_max]`.
    pub fn separable_gaussian(
        coupling: f64,
        mass: f64,
        cutoff: f64,
        lambda_min: f64,
        lambda_max: f64,
        nodes: usize,
    ) -> Result<Self> {
        let spectrum = SpectralDensity::new(lambda_min, lambda_max, DensityShape::Bump, nodes)?;
        Self::new(
            coupling,
            mass,
            mass,
            spectrum,
            vec![KernelTerm::positive(
                MomentumFactor::Gaussian { cutoff },
                ExchangeWeight::Constant(1.0),
            )],
        )
    }

    /// Indefinite kernel `u(p1) s(p3) + s(p1) u(p3)` where `s` is `u` with its
    /// sign flipped on half of momentum space; the exchange weight is a constant.
    pub fn broken(
        coupling: f64,
        mass: f64,
        cutoff: f64,
        lambda_min: f64,
        lambda_max: f64,
        nodes: usize,
    ) -> Result<Self> {
        let spectrum = SpectralDensity::new(lambda_min, lambda_max, DensityShape::Bump, nodes)?;
        let u = MomentumFactor::Gaussian { cutoff };
        let s = MomentumFactor::SignFlippedGaussian { cutoff };
        let w = ExchangeWeight::Constant(1.0);
        let one = Complex64::new(1.0, 0.0);
        Self::new(
            coupling,
            mass,
            mass,
            spectrum,
            vec![
                KernelTerm {
                    coefficient: one,
                    left: u,
                    right: s,
                    exchange: w,
                },
                KernelTerm {
                    coefficient: one,
                    left: s,
                    right: u,
                    exchange: w,
                },
            ],
        )
    }

    /// Every term is of the manifestly positive form `a == b`, `c >= 0`.
    pub fn is_manifestly_positive(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.left == t.right && t.coefficient.im == 0.0 && t.coefficient.re >= 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourPointModel {
    pub leg1: TwoPointModel,
    pub leg2: TwoPointModel,
    pub connected: Option<ConnectedKernel>,
}

impl FourPointModel {
    pub fn new(leg1: TwoPointModel, leg2: TwoPointModel, connected: Option<ConnectedKernel>) -> Result<Self> {
        if let Some(k) = &connected {
            let threshold = leg1.mass + leg2.mass;
            if k.mass_c_spectrum.lambda_min <= threshold {
                return Err(Error::Construction(format!(
                    "exchange spectrum starts at {} which is not above the two-body threshold {threshold}",
                    k.mass_c_spectrum.lambda_min
                )));
            }
            // The a-line joins the two final points and the b-line the two
            // initial ones; the form is Hermitian only if they carry one mass.
            if k.mass_a != k.mass_b {
                return Err(Error::Construction(format!(
                    "m_a = {} and m_b = {} must agree for a Hermitian connected form",
                    k.mass_a, k.mass_b
                )));
            }
        }
        Ok(Self {
            leg1,
            leg2,
            connected,
        })
    }

    /// Free legs only.
    pub fn free(m1: f64, m2: f64) -> Result<Self> {
        Self::new(TwoPointModel::new(m1)?, TwoPointModel::new(m2)?, None)
    }

    /// Equal unit masses with the separable Gaussian kernel: cutoff 1 GeV,
    /// exchange spectrum [2.2, 6.2] GeV on 32 nodes.
    pub fn default_interacting(coupling: f64) -> Result<Self> {
        let k = ConnectedKernel::separable_gaussian(coupling, 1.0, 1.0, 2.2, 6.2, 32)?;
        Self::new(TwoPointModel::new(1.0)?, TwoPointModel::new(1.0)?, Some(k))
    }

    pub fn without_connected(&self) -> Self {
        Self {
            connected: None,
            ..self.clone()
        }
    }

    pub fn coupling(&self) -> f64 {
        self.connected.as_ref().map_or(0.0, |k| k.coupling)
    }
}

/// Free scalar Euclidean propagator `1 / (p^2 + m^2)`.
pub fn eval_two_point_momentum(p: [f64; 4], m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return domain(format!("mass {m} must be positive"));
    }
    let p2 = p.iter().map(|x| x * x).sum::<f64>();
    Ok(1.0 / (p2 + m * m))
}

/// `int exp(-lambda (tau + tau')) rho(lambda) d lambda` on the density's nodes.
pub fn widder_kernel(rho: &SpectralDensity, tau: f64, tau_prime: f64) -> Result<f64> {
    if !(tau > 0.0 && tau_prime > 0.0) {
        return domain(format!("Euclidean times ({tau}, {tau_prime}) must be positive"));
    }
    Ok(rho
        .weighted_nodes()
        .map(|(l, w)| w * (-l * (tau + tau_prime)).exp())
        .sum())
}

/// On-shell kernel value `v(m_a, p1; m_c, p2; m_b, p3)`.
pub fn kernel_v_on_shell(
    k: &ConnectedKernel,
    p1: Vec3,
    m_a: f64,
    p2: Vec3,
    m_c: f64,
    p3: Vec3,
    m_b: f64,
) -> Result<Complex64> {
    if !(m_a > 0.0 && m_b > 0.0 && m_c > 0.0) {
        return domain("kernel masses must be positive");
    }
    if !k.mass_c_spectrum.contains(m_c) {
        return domain(format!(
            "m_c = {m_c} outside exchange spectrum [{}, {}]",
            k.mass_c_spectrum.lambda_min, k.mass_c_spectrum.lambda_max
        ));
    }
    let mut v = Complex64::new(0.0, 0.0);
    for t in &k.terms {
        v += t.coefficient * t.left.eval(m_a, p1) * t.right.eval(m_b, p3) * t.exchange.eval(m_c, p2);
    }
    Ok(v * k.coupling)
}

/// Minimum eigenvalue of the Hermitian part of `M_ij = v(x_i; fixed; x_j)`
/// over a sample grid of `(p, m)` pairs.
pub fn check_kernel_positivity(k: &ConnectedKernel, grid: &[(Vec3, f64)], fixed: (Vec3, f64)) -> Result<f64> {
    if grid.is_empty() {
        return domain("kernel positivity grid is empty");
    }
    let n = grid.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, &(pi, mi)) in grid.iter().enumerate() {
        for (j, &(pj, mj)) in grid.iter().enumerate() {
            m[(i, j)] = kernel_v_on_shell(k, pi, mi, fixed.0, fixed.1, pj, mj)?;
        }
    }
    Ok(hermitian_eigenvalues(&m)[0])
}

/// Range of the kernel matrix spectrum, for scale-relative checks.
pub fn kernel_spectrum(k: &ConnectedKernel, grid: &[(Vec3, f64)], fixed: (Vec3, f64)) -> Result<Vec<f64>> {
    let n = grid.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, &(pi, mi)) in grid.iter().enumerate() {
        for (j, &(pj, mj)) in grid.iter().enumerate() {
            m[(i, j)] = kernel_v_on_shell(k, pi, mi, fixed.0, fixed.1, pj, mj)?;
        }
    }
    Ok(hermitian_eigenvalues(&m))
}
