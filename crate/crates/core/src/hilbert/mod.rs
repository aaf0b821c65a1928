//! Euclidean test functions and the physical inner product.
//!
//! Test functions are products of Gaussian momentum-space packets and
//! bump time profiles at strictly ordered positive times. The inner product
//! pairs a reflected bra with a ket through the model Green functions; all
//! Euclidean time integrals reduce to Laplace transforms of the profiles
//! evaluated on the mass shell, so only 3-momentum quadratures remain.
//!
//! Conventions: the one-particle overlap is
//! `int d^3p conj(psi_f) psi_g h_f(w) h_g(w) / (2 w)` and every `(2 pi)`
//! factor of the Fourier conventions is absorbed into [`FOURIER_CONSTANT`],
//! set to one. Reported quantities that matter physically are ratios.

pub mod laplace;
pub mod oracle;
mod connected;
#[cfg(test)]
mod tests;

pub use connected::{connected_norm_contribution, ExchangeGrid};

use crate::error::{domain, Error, Result};
use crate::green_models::FourPointModel;
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect, CMatrix};
use crate::quadrature::{add, dot, norm2, omega, scale, sub, SphericalGrid, SphericalRule, Vec3};
use laplace::{profile_transform, profile_transform_direct, BUMP_NORMALIZATION};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Product of all `(2 pi)` factors in the momentum-space reduction.
pub const FOURIER_CONSTANT: f64 = 1.0;

/// Default reflection-positivity tolerance relative to the largest eigenvalue.
pub const TOL_RP: f64 = 1e-10;

/// Gaussian momentum-space packet
/// `N exp(-|p - c|^2 / (2 w^2)) exp(-i p.x0) exp(r omega_m(p))`.
///
/// The position `x0` translates the packet in space. The energy rate `r`
/// carries phase modulations: `r = -i t` is free evolution over time `t`,
/// real `r` compensates a heat shift of the matching time profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacket3 {
    pub center: Vec3,
    pub width: f64,
    pub normalization: Complex64,
    #[serde(default)]
    pub position: Vec3,
    #[serde(default)]
    pub energy_rate: Complex64,
}

impl WavePacket3 {
    pub fn new(center: Vec3, width: f64, normalization: Complex64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::Construction(format!("packet width {width} must be positive")));
        }
        Ok(Self {
            center,
            width,
            normalization,
            position: [0.0; 3],
            energy_rate: Complex64::new(0.0, 0.0),
        })
    }

    pub fn gaussian(center: Vec3, width: f64) -> Result<Self> {
        Self::new(center, width, Complex64::new(1.0, 0.0))
    }

    pub fn with_position(mut self, position: Vec3) -> Self {
        self.position = position;
        self
    }

    /// Multiplies the packet by `exp(rate * omega_m(p))`.
    pub fn modulated(mut self, rate: Complex64) -> Self {
        self.energy_rate += rate;
        self
    }

    pub fn translated(mut self, a: Vec3) -> Self {
        self.position = add(self.position, a);
        self
    }

    pub fn scaled(mut self, alpha: Complex64) -> Self {
        self.normalization *= alpha;
        self
    }

    #[inline]
    pub fn eval(&self, p: Vec3, m: f64) -> Complex64 {
        let q = norm2(sub(p, self.center)) / (2.0 * self.width * self.width);
        let w = omega(m, p);
        let arg = Complex64::new(-q + self.energy_rate.re * w, -dot(p, self.position) + self.energy_rate.im * w);
        self.normalization * arg.exp()
    }

    /// `int |psi|^2 d^3p` for the unmodulated Gaussian.
    pub fn l2_norm_squared(&self) -> f64 {
        self.normalization.norm_sqr() * (std::f64::consts::PI * self.width * self.width).powf(1.5)
    }
}

/// Bump time profile on `[center - half_width, center + half_width]`.
///
/// With `unit_integral` the profile integrates to one; otherwise its peak
/// value is one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeProfile {
    pub center: f64,
    pub half_width: f64,
    pub unit_integral: bool,
}

impl TimeProfile {
    pub fn new(center: f64, half_width: f64) -> Result<Self> {
        let p = Self {
            center,
            half_width,
            unit_integral: true,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_peak_normalization(mut self) -> Self {
        self.unit_integral = false;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(Error::Construction(format!(
                "profile half-width {} must be positive",
                self.half_width
            )));
        }
        if !(self.center - self.half_width > 0.0) {
            return Err(Error::Construction(format!(
                "profile support [{}, {}] must lie at positive time",
                self.center - self.half_width,
                self.center + self.half_width
            )));
        }
        Ok(())
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    /// `int h`.
    pub fn integral(&self) -> f64 {
        if self.unit_integral {
            1.0
        } else {
            self.half_width * *BUMP_NORMALIZATION * std::f64::consts::E
        }
    }

    pub fn value(&self, tau: f64) -> f64 {
        let s = (tau - self.center) / self.half_width;
        let raw = laplace::raw_bump(s);
        if self.unit_integral {
            raw / (*BUMP_NORMALIZATION * self.half_width)
        } else {
            raw * std::f64::consts::E
        }
    }

    /// `h_hat(omega) = int h(tau) exp(-omega tau) d tau`.
    #[inline]
    pub fn laplace(&self, omega: f64) -> f64 {
        self.integral() * profile_transform(omega, self.center, self.half_width)
    }

    pub fn laplace_direct(&self, omega: f64) -> f64 {
        self.integral() * profile_transform_direct(omega, self.center, self.half_width)
    }

    /// `int h'(tau) exp(-omega tau) d tau` by direct quadrature of the
    /// derivative profile; equals `omega h_hat(omega)` after integration by parts.
    pub fn derivative_laplace_direct(&self, omega: f64) -> f64 {
        self.integral() * (-omega * self.center).exp() * laplace::scaled_derivative_transform_direct(omega * self.half_width)
            / self.half_width
    }

    pub fn reflected(&self) -> Self {
        Self {
            center: -self.center,
            ..*self
        }
    }

    /// Shift by `beta`, which may be negative as long as the support stays
    /// at positive time.
    pub(crate) fn shifted(&self, beta: f64) -> Result<Self> {
        let p = Self {
            center: self.center + beta,
            ..*self
        };
        p.validate()?;
        Ok(p)
    }
}

/// Cached Laplace transform of a time profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceProfile {
    pub profile: TimeProfile,
}

impl LaplaceProfile {
    pub fn new(profile: TimeProfile) -> Self {
        // Force the shared table so that later evaluations are lookups.
        let _ = profile.laplace(1.0);
        Self { profile }
    }

    #[inline]
    pub fn eval(&self, omega: f64) -> f64 {
        self.profile.laplace(omega)
    }
}

/// Pair-energy phase `exp(i coefficient exp(-beta (omega_1 + omega_2)))`
/// applied to a two-point function in the momentum representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairPhase {
    pub coefficient: f64,
    pub beta: f64,
}

impl PairPhase {
    #[inline]
    pub fn eval(&self, energy: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.coefficient * (-self.beta * energy).exp())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanTestFunction {
    pub points: Vec<(WavePacket3, TimeProfile)>,
    #[serde(default)]
    pub pair_phases: Vec<PairPhase>,
}

impl EuclideanTestFunction {
    pub fn new(points: Vec<(WavePacket3, TimeProfile)>) -> Result<Self> {
        let f = Self {
            points,
            pair_phases: Vec::new(),
        };
        f.validate()?;
        Ok(f)
    }

    pub fn one_point(packet: WavePacket3, profile: TimeProfile) -> Result<Self> {
        Self::new(vec![(packet, profile)])
    }

    pub fn two_point(p1: WavePacket3, h1: TimeProfile, p2: WavePacket3, h2: TimeProfile) -> Result<Self> {
        Self::new(vec![(p1, h1), (p2, h2)])
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::Construction("test function has no points".into()));
        }
        for (_, h) in &self.points {
            h.validate()?;
        }
        for w in self.points.windows(2) {
            let (_, hi) = w[0].1.support();
            let (lo, _) = w[1].1.support();
            if !(hi < lo) {
                return Err(Error::Construction(format!(
                    "time supports must be disjoint and increasing: {hi} >= {lo}"
                )));
            }
        }
        if !self.pair_phases.is_empty() && self.points.len() != 2 {
            return Err(Error::Construction("pair phases need a two-point function".into()));
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.points.len()
    }

    pub fn with_pair_phase(mut self, phase: PairPhase) -> Self {
        self.pair_phases.push(phase);
        self
    }

    pub fn translated(&self, a: Vec3) -> Self {
        let mut f = self.clone();
        for (p, _) in &mut f.points {
            *p = p.translated(a);
        }
        f
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        let mut f = self.clone();
        f.points[0].0 = f.points[0].0.scaled(alpha);
        f
    }

    /// Shift every profile by `beta` (either sign) keeping positive support.
    pub(crate) fn time_shifted(&self, beta: f64) -> Result<Self> {
        let mut f = self.clone();
        for (_, h) in &mut f.points {
            *h = h.shifted(beta)?;
        }
        Ok(f)
    }

    /// Pair amplitude `psi_1(k1) psi_2(k2) (phases)` of a two-point function.
    #[inline]
    pub(crate) fn pair_amplitude(&self, k1: Vec3, m1: f64, k2: Vec3, m2: f64) -> Complex64 {
        let mut v = self.points[0].0.eval(k1, m1) * self.points[1].0.eval(k2, m2);
        if !self.pair_phases.is_empty() {
            let e = omega(m1, k1) + omega(m2, k2);
            for ph in &self.pair_phases {
                v *= ph.eval(e);
            }
        }
        v
    }
}

/// Time reflection `tau -> -tau` of every profile. The result has support
/// at negative times and is not a valid ket; it is returned for inspection.
pub fn time_reflect(f: &EuclideanTestFunction) -> EuclideanTestFunction {
    let mut r = f.clone();
    for (_, h) in &mut r.points {
        *h = h.reflected();
    }
    r
}

/// Quadrature resolution of the inner-product engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// One-particle overlaps, centered on the product Gaussian.
    pub one_particle: SphericalRule,
    /// Ball radius in units of the product-Gaussian width.
    pub one_particle_sigmas: f64,
    /// Total-momentum grid of the connected part, centered at the origin.
    pub exchange: SphericalRule,
    pub exchange_sigmas: f64,
    /// Relative-momentum grid of the connected amplitudes.
    pub relative: SphericalRule,
    pub relative_sigmas: f64,
    /// Per-leg grids of the six-dimensional disconnected quadrature used when
    /// the integrand does not factor.
    pub pair: SphericalRule,
    pub pair_sigmas: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            one_particle: SphericalRule::new(48, 24, 24),
            one_particle_sigmas: 8.0,
            exchange: SphericalRule::new(12, 8, 8),
            exchange_sigmas: 6.0,
            relative: SphericalRule::new(12, 8, 8),
            relative_sigmas: 6.0,
            pair: SphericalRule::new(16, 8, 8),
            pair_sigmas: 7.0,
        }
    }
}

/// Multiplier of the intermediate-state sector.
#[derive(Clone, Copy)]
pub enum SectorWeight<'a> {
    Unit,
    /// A function of the total energy.
    Energy(&'a (dyn Fn(f64) -> Complex64 + Sync)),
    /// Invariant mass squared `E^2 - |P|^2`.
    MassSquared,
}

impl SectorWeight<'_> {
    fn is_unit(&self) -> bool {
        matches!(self, SectorWeight::Unit)
    }
}

/// Product-Gaussian center and width of `conj(psi_f) psi_g`.
pub(crate) fn product_gaussian(f: &WavePacket3, g: &WavePacket3) -> (Vec3, f64) {
    let (af, ag) = (1.0 / (f.width * f.width), 1.0 / (g.width * g.width));
    let prec = 0.5 * (af + ag);
    let c = scale(add(scale(f.center, 0.5 * af), scale(g.center, 0.5 * ag)), 1.0 / prec);
    (c, (1.0 / (2.0 * prec)).sqrt())
}

fn leg_grid(f: &WavePacket3, g: &WavePacket3, rule: SphericalRule, sigmas: f64) -> SphericalGrid {
    let (c, s) = product_gaussian(f, g);
    // exp(-|p-c|^2 / (2 s^2)) written in terms of the product width
    SphericalGrid::new(c, sigmas * s * std::f64::consts::SQRT_2, rule)
}

/// Weighted one-particle overlap `int conj(psi_f) psi_g h_f h_g / (2 omega) * weight`.
pub(crate) fn leg_overlap_weighted(
    f: (&WavePacket3, &TimeProfile),
    g: (&WavePacket3, &TimeProfile),
    m: f64,
    quad: &QuadratureConfig,
    weight: impl Fn(f64, Vec3) -> f64,
) -> Complex64 {
    let grid = leg_grid(f.0, g.0, quad.one_particle, quad.one_particle_sigmas);
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, w) in grid.points.iter().zip(&grid.weights) {
        let om = omega(m, *p);
        let v = f.0.eval(*p, m).conj() * g.0.eval(*p, m) * (f.1.laplace(om) * g.1.laplace(om) / (2.0 * om));
        acc += v * (w * weight(om, *p));
    }
    acc * FOURIER_CONSTANT
}

/// Free one-particle contribution to `<f|g>`.
pub fn one_particle_overlap_with(
    f: (&WavePacket3, &TimeProfile),
    g: (&WavePacket3, &TimeProfile),
    m: f64,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    if !(m > 0.0) {
        return domain(format!("mass {m} must be positive"));
    }
    Ok(leg_overlap_weighted(f, g, m, quad, |_, _| 1.0))
}

pub fn one_particle_overlap(
    f: (&WavePacket3, &TimeProfile),
    g: (&WavePacket3, &TimeProfile),
    m: f64,
) -> Result<Complex64> {
    one_particle_overlap_with(f, g, m, &QuadratureConfig::default())
}

/// Inner-product engine: a model together with its quadrature resolution.
#[derive(Debug, Clone)]
pub struct InnerProduct {
    pub model: FourPointModel,
    pub quadrature: QuadratureConfig,
}

impl InnerProduct {
    pub fn new(model: FourPointModel, quadrature: QuadratureConfig) -> Self {
        Self { model, quadrature }
    }

    fn masses(&self) -> (f64, f64) {
        (self.model.leg1.mass, self.model.leg2.mass)
    }

    fn check_rank(f: &EuclideanTestFunction) -> Result<()> {
        if f.rank() > 2 {
            return domain(format!("{}-point test functions are outside the model", f.rank()));
        }
        Ok(())
    }

    /// Disconnected (product of free legs) contribution.
    pub fn disconnected(&self, f: &EuclideanTestFunction, g: &EuclideanTestFunction, w: SectorWeight) -> Result<Complex64> {
        Self::check_rank(f)?;
        Self::check_rank(g)?;
        if f.rank() != g.rank() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let (m1, m2) = self.masses();
        let q = &self.quadrature;
        let leg = |i: usize| {
            let (pf, hf) = &f.points[i];
            let (pg, hg) = &g.points[i];
            ((pf, hf), (pg, hg))
        };
        if f.rank() == 1 {
            let (a, b) = leg(0);
            return Ok(match w {
                SectorWeight::Unit => leg_overlap_weighted(a, b, m1, q, |_, _| 1.0),
                SectorWeight::MassSquared => leg_overlap_weighted(a, b, m1, q, |_, _| m1 * m1),
                SectorWeight::Energy(s) => {
                    let grid = leg_grid(a.0, b.0, q.one_particle, q.one_particle_sigmas);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (p, wt) in grid.points.iter().zip(&grid.weights) {
                        let om = omega(m1, *p);
                        let v = a.0.eval(*p, m1).conj() * b.0.eval(*p, m1) * (a.1.laplace(om) * b.1.laplace(om) / (2.0 * om));
                        acc += v * s(om) * *wt;
                    }
                    acc * FOURIER_CONSTANT
                }
            });
        }
        let separable = f.pair_phases.is_empty() && g.pair_phases.is_empty();
        if separable && w.is_unit() {
            let (a, b) = leg(0);
            let o1 = leg_overlap_weighted(a, b, m1, q, |_, _| 1.0);
            let (a, b) = leg(1);
            let o2 = leg_overlap_weighted(a, b, m2, q, |_, _| 1.0);
            return Ok(o1 * o2);
        }
        if separable {
            if let SectorWeight::MassSquared = w {
                return Ok(self.disconnected_mass_squared(f, g));
            }
        }
        Ok(self.disconnected_pair_quadrature(f, g, w))
    }

    /// `(omega1 + omega2)^2 - |k1 + k2|^2` expanded into per-leg moments.
    fn disconnected_mass_squared(&self, f: &EuclideanTestFunction, g: &EuclideanTestFunction) -> Complex64 {
        let (m1, m2) = self.masses();
        let q = &self.quadrature;
        let moments = |i: usize, m: f64| {
            let a = (&f.points[i].0, &f.points[i].1);
            let b = (&g.points[i].0, &g.points[i].1);
            let o = leg_overlap_weighted(a, b, m, q, |_, _| 1.0);
            let e = leg_overlap_weighted(a, b, m, q, |w, _| w);
            let k = [0, 1, 2].map(|c| leg_overlap_weighted(a, b, m, q, |_, p| p[c]));
            (o, e, k)
        };
        let (o1, e1, k1) = moments(0, m1);
        let (o2, e2, k2) = moments(1, m2);
        // omega^2 - |k|^2 = m^2 on each leg
        let mut v = o1 * o2 * (m1 * m1 + m2 * m2) + e1 * e2 * 2.0;
        for c in 0..3 {
            v -= k1[c] * k2[c] * 2.0;
        }
        v
    }

    fn disconnected_pair_quadrature(&self, f: &EuclideanTestFunction, g: &EuclideanTestFunction, w: SectorWeight) -> Complex64 {
        let (m1, m2) = self.masses();
        let q = &self.quadrature;
        let g1 = leg_grid(&f.points[0].0, &g.points[0].0, q.pair, q.pair_sigmas);
        let g2 = leg_grid(&f.points[1].0, &g.points[1].0, q.pair, q.pair_sigmas);
        let (hf1, hg1) = (f.points[0].1, g.points[0].1);
        let (hf2, hg2) = (f.points[1].1, g.points[1].1);
        let leg2: Vec<(Vec3, f64, f64)> = g2
            .points
            .iter()
            .zip(&g2.weights)
            .map(|(p, wt)| {
                let om = omega(m2, *p);
                (*p, om, wt * hf2.laplace(om) * hg2.laplace(om) / (2.0 * om))
            })
            .collect();
        let rows: Vec<Complex64> = g1
            .points
            .par_iter()
            .zip(g1.weights.par_iter())
            .map(|(k1, wt1)| {
                let o1 = omega(m1, *k1);
                let base = wt1 * hf1.laplace(o1) * hg1.laplace(o1) / (2.0 * o1);
                let mut acc = Complex64::new(0.0, 0.0);
                for &(k2, o2, wt2) in &leg2 {
                    let amp = f.pair_amplitude(*k1, m1, k2, m2).conj() * g.pair_amplitude(*k1, m1, k2, m2);
                    let s = match w {
                        SectorWeight::Unit => Complex64::new(1.0, 0.0),
                        SectorWeight::Energy(s) => s(o1 + o2),
                        SectorWeight::MassSquared => {
                            let e = o1 + o2;
                            Complex64::new(e * e - norm2(add(*k1, k2)), 0.0)
                        }
                    };
                    acc += amp * s * wt2;
                }
                acc * base
            })
            .collect();
        rows.iter().sum::<Complex64>() * (FOURIER_CONSTANT * FOURIER_CONSTANT)
    }

    /// Connected contribution with an intermediate-sector weight.
    pub fn connected(&self, f: &EuclideanTestFunction, g: &EuclideanTestFunction, w: SectorWeight) -> Result<Complex64> {
        Self::check_rank(f)?;
        Self::check_rank(g)?;
        let Some(k) = &self.model.connected else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        if f.rank() != 2 || g.rank() != 2 || k.coupling == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let grid = ExchangeGrid::for_family(&[f, g], &self.model, &self.quadrature);
        let af = grid.amplitudes(f, &self.model, &self.quadrature);
        let ag = grid.amplitudes(g, &self.model, &self.quadrature);
        Ok(grid.contract(&af, &ag, k, w))
    }

    pub fn inner_product_weighted(&self, f: &EuclideanTestFunction, g: &EuclideanTestFunction, w: SectorWeight) -> Result<Complex64> {
        Ok(self.disconnected(f, g, w)? + self.connected(f, g, w)?)
    }

    pub fn inner_product(&self, f: &EuclideanTestFunction, g: &EuclideanTestFunction) -> Result<Complex64> {
        self.inner_product_weighted(f, g, SectorWeight::Unit)
    }

    pub fn norm_squared(&self, f: &EuclideanTestFunction) -> Result<f64> {
        Ok(self.inner_product(f, f)?.re)
    }

    pub fn gram_matrix(&self, family: &[EuclideanTestFunction]) -> Result<GramMatrix> {
        let w = SectorWeight::Unit;
        if family.is_empty() {
            return domain("Gram matrix of an empty family");
        }
        for f in family {
            Self::check_rank(f)?;
        }
        let n = family.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let disc: Vec<Result<Complex64>> = pairs
            .par_iter()
            .map(|&(i, j)| self.disconnected(&family[i], &family[j], w))
            .collect();
        let mut entries = CMatrix::zeros(n, n);
        for (&(i, j), v) in pairs.iter().zip(disc) {
            let v = v?;
            entries[(i, j)] = v;
            entries[(j, i)] = v.conj();
        }
        if let Some(k) = &self.model.connected {
            let twos: Vec<usize> = (0..n).filter(|&i| family[i].rank() == 2).collect();
            if k.coupling != 0.0 && !twos.is_empty() {
                let members: Vec<&EuclideanTestFunction> = twos.iter().map(|&i| &family[i]).collect();
                let grid = ExchangeGrid::for_family(&members, &self.model, &self.quadrature);
                let amps: Vec<_> = members
                    .par_iter()
                    .map(|f| grid.amplitudes(f, &self.model, &self.quadrature))
                    .collect();
                for (a, &i) in twos.iter().enumerate() {
                    for (b, &j) in twos.iter().enumerate().skip(a) {
                        let v = grid.contract(&amps[a], &amps[b], k, w);
                        entries[(i, j)] += v;
                        if i != j {
                            entries[(j, i)] += v.conj();
                        }
                    }
                }
            }
        }
        for i in 0..n {
            entries[(i, i)].im = 0.0;
        }
        Ok(GramMatrix {
            entries,
            basis_labels: (0..n).map(|i| format!("f{i}")).collect(),
        })
    }

    pub fn rp_certificate(&self, family: &[EuclideanTestFunction]) -> Result<RpCertificate> {
        Ok(self.gram_matrix(family)?.certificate(TOL_RP))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub entries: CMatrix,
    pub basis_labels: Vec<String>,
}

impl GramMatrix {
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.entries)
    }

    pub fn certificate(&self, tol: f64) -> RpCertificate {
        let eig = self.eigenvalues();
        let min = eig[0];
        let max = *eig.last().unwrap();
        RpCertificate {
            min_eigenvalue: min,
            max_eigenvalue: max,
            pass: max > 0.0 && min >= -tol * max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RpCertificate {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub pass: bool,
}

/// Random two-point functions with packets near the origin and ordered,
/// well separated time profiles.
pub fn random_two_point_family(rng: &mut impl rand::Rng, n: usize) -> Vec<EuclideanTestFunction> {
    (0..n)
        .map(|_| {
            let mut center = || [rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4)];
            let (c1, c2) = (center(), center());
            let w1 = rng.gen_range(0.15..0.3);
            let w2 = rng.gen_range(0.15..0.3);
            let t1 = rng.gen_range(0.6..1.2);
            let t2 = t1 + rng.gen_range(0.6..1.2);
            let phase = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            EuclideanTestFunction::two_point(
                WavePacket3::new(c1, w1, phase).unwrap(),
                TimeProfile::new(t1, 0.25).unwrap(),
                WavePacket3::gaussian(c2, w2).unwrap(),
                TimeProfile::new(t2, 0.25).unwrap(),
            )
            .unwrap()
        })
        .collect()
}

pub fn inner_product(f: &EuclideanTestFunction, g: &EuclideanTestFunction, model: &FourPointModel) -> Result<Complex64> {
    InnerProduct::new(model.clone(), QuadratureConfig::default()).inner_product(f, g)
}

pub fn gram_matrix(family: &[EuclideanTestFunction], model: &FourPointModel) -> Result<GramMatrix> {
    InnerProduct::new(model.clone(), QuadratureConfig::default()).gram_matrix(family)
}

pub fn rp_certificate(family: &[EuclideanTestFunction], model: &FourPointModel) -> Result<RpCertificate> {
    InnerProduct::new(model.clone(), QuadratureConfig::default()).rp_certificate(family)
}
