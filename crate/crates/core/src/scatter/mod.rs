//! Two-body asymptotic states, their injection into the Euclidean Hilbert
//! space, the Cook integrand, and S-matrix and transition elements built
//! from polynomials in `exp(-beta H)`.

pub mod cook;
pub mod mock;

use crate::error::{domain, Error, Result};
use crate::evolve::chebyshev::chebyshev_approx;
use crate::evolve::polynomial_operator_element;
use crate::green_models::FourPointModel;
use crate::hilbert::{EuclideanTestFunction, InnerProduct, PairPhase, SectorWeight, TimeProfile, WavePacket3};
use crate::quadrature::{gauss_legendre, norm2, omega};
use rayon::prelude::*;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub use cook::{
    cook_decay_exponent, cook_decay_exponent_with, cook_integrand, cook_integrand_with, cook_scan, disconnected_cancellation,
    cook_scan_fast, cook_scan_with_fast, fit_decay, geometric_grid, stationary_phase_radial, CancellationCheck, CookConfig,
    CookSample, CookScan, DecayFit,
};

pub const DEFAULT_ETA: f64 = 0.01;

/// Product state `psi_1 (x) psi_2` together with the time profiles used to
/// inject it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticState {
    pub packet1: WavePacket3,
    pub packet2: WavePacket3,
    pub profile1: TimeProfile,
    pub profile2: TimeProfile,
    pub m1: f64,
    pub m2: f64,
}

impl AsymptoticState {
    pub fn new(
        packet1: WavePacket3,
        profile1: TimeProfile,
        packet2: WavePacket3,
        profile2: TimeProfile,
        m1: f64,
        m2: f64,
    ) -> Result<Self> {
        let s = Self {
            packet1,
            packet2,
            profile1,
            profile2,
            m1,
            m2,
        };
        s.validate()?;
        Ok(s)
    }

    /// Head-on pair `+-k0 z` with Gaussian width `w` at the default profiles.
    pub fn head_on(k0: f64, width: f64, m: f64) -> Result<Self> {
        Self::new(
            WavePacket3::gaussian([0.0, 0.0, k0], width)?,
            TimeProfile::new(1.0, 0.25)?,
            WavePacket3::gaussian([0.0, 0.0, -k0], width)?,
            TimeProfile::new(2.0, 0.25)?,
            m,
            m,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m1 > 0.0 && self.m2 > 0.0) {
            return Err(Error::Construction(format!("masses {} {} must be positive", self.m1, self.m2)));
        }
        let (a0, a1) = self.profile1.support();
        let (b0, b1) = self.profile2.support();
        if a0 <= 0.0 || b0 <= 0.0 {
            return Err(Error::Construction("profiles must be supported at positive time".into()));
        }
        if !(a1 < b0 || b1 < a0) {
            return Err(Error::Construction(format!(
                "profile supports [{a0}, {a1}] and [{b0}, {b1}] overlap"
            )));
        }
        Ok(())
    }

    pub fn check_model(&self, model: &FourPointModel) -> Result<()> {
        if (self.m1 - model.leg1.mass).abs() > 1e-12 || (self.m2 - model.leg2.mass).abs() > 1e-12 {
            return domain(format!(
                "state masses ({}, {}) differ from the model legs ({}, {})",
                self.m1, self.m2, model.leg1.mass, model.leg2.mass
            ));
        }
        Ok(())
    }

    /// Two-body energy `omega_1(p1) + omega_2(p2)`.
    #[inline]
    pub fn energy(&self, p1: [f64; 3], p2: [f64; 3]) -> f64 {
        omega(self.m1, p1) + omega(self.m2, p2)
    }

    pub fn with_profiles(&self, profile1: TimeProfile, profile2: TimeProfile) -> Result<Self> {
        Self::new(self.packet1, profile1, self.packet2, profile2, self.m1, self.m2)
    }

    pub fn translated(&self, a: [f64; 3]) -> Self {
        let mut s = self.clone();
        s.packet1 = s.packet1.translated(a);
        s.packet2 = s.packet2.translated(a);
        s
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        let mut s = self.clone();
        s.packet1 = s.packet1.scaled(alpha);
        s
    }
}

/// The two-point test function `h_1(x_1^0) psi_1 h_2(x_2^0) psi_2`.
///
/// The point with the earlier profile comes first; for equal masses the
/// legs are exchanged when needed.
pub fn inject(state: &AsymptoticState) -> Result<EuclideanTestFunction> {
    state.validate()?;
    if state.profile1.center < state.profile2.center {
        EuclideanTestFunction::two_point(state.packet1, state.profile1, state.packet2, state.profile2)
    } else if (state.m1 - state.m2).abs() <= 1e-12 {
        EuclideanTestFunction::two_point(state.packet2, state.profile2, state.packet1, state.profile1)
    } else {
        Err(Error::Construction(
            "for unequal masses profile1 must precede profile2".into(),
        ))
    }
}

/// `exp(-i H_0 t)` acting on both packets; negative `t` gives the other sign.
pub fn free_evolve(state: &AsymptoticState, t: f64) -> AsymptoticState {
    let rate = Complex64::new(0.0, -t);
    let mut s = state.clone();
    s.packet1 = s.packet1.modulated(rate);
    s.packet2 = s.packet2.modulated(rate);
    s
}

/// `exp(i c exp(-beta H_0))` in the momentum representation.
pub fn asymptotic_phase(coefficient: f64, beta: f64) -> PairPhase {
    PairPhase { coefficient, beta }
}

/// Approximation to `<psi_f|S|psi_i>` at phase parameter `n`:
/// `<f| e^{-in e^{-beta H0}} Phi^dag e^{2in e^{-beta H}} Phi e^{-in e^{-beta H0}} |i>`.
pub fn smatrix_element(
    ip: &InnerProduct,
    final_state: &AsymptoticState,
    initial: &AsymptoticState,
    n: u32,
    beta: f64,
    eps: f64,
) -> Result<Complex64> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    if !(beta > 0.0) {
        return domain(format!("beta {beta} must be positive"));
    }
    final_state.check_model(&ip.model)?;
    initial.check_model(&ip.model)?;
    let approx = chebyshev_approx(n, eps)?;
    // The bra carries the conjugate phase so that it contributes exp(-in x).
    let f = inject(final_state)?.with_pair_phase(asymptotic_phase(n as f64, beta));
    let g = inject(initial)?.with_pair_phase(asymptotic_phase(-(n as f64), beta));
    polynomial_operator_element(ip, &f, &g, &approx, beta)
}

/// Free overlap `<Phi f|Phi i>` of the injected states; the identity term of
/// `S - I`. It is evaluated on the same six-dimensional pair quadrature as
/// the S-matrix element so that quadrature error cancels in `S - I`.
pub fn free_overlap(ip: &InnerProduct, final_state: &AsymptoticState, initial: &AsymptoticState) -> Result<Complex64> {
    let free = InnerProduct::new(ip.model.without_connected(), ip.quadrature);
    let one = |_: f64| Complex64::new(1.0, 0.0);
    free.inner_product_weighted(&inject(final_state)?, &inject(initial)?, SectorWeight::Energy(&one))
}

/// Angular integral `int dOmega A(p n)` of one leg's weighted amplitude
/// `A = psi h(omega) / sqrt(2 omega)`, tabulated on a uniform grid in `|p|`.
struct LegShell {
    m: f64,
    step: f64,
    values: Vec<Complex64>,
}

impl LegShell {
    fn new(psi: &WavePacket3, h: &TimeProfile, m: f64, p_max: f64, n: usize, angular: (usize, usize)) -> Self {
        let polar = gauss_legendre(angular.0, -1.0, 1.0);
        let dphi = 2.0 * PI / angular.1 as f64;
        let step = p_max / (n - 1) as f64;
        let values = (0..n)
            .map(|i| {
                let p = i as f64 * step;
                let om = omega(m, [0.0, 0.0, p]);
                let mut acc = Complex64::new(0.0, 0.0);
                for &(ct, wt) in &polar {
                    let st = (1.0 - ct * ct).max(0.0).sqrt();
                    for k in 0..angular.1 {
                        let phi = (k as f64 + 0.5) * dphi;
                        let v = [p * st * phi.cos(), p * st * phi.sin(), p * ct];
                        acc += psi.eval(v, m) * (wt * dphi);
                    }
                }
                acc * (h.laplace(om) / (2.0 * om).sqrt())
            })
            .collect();
        Self { m, step, values }
    }

    fn p_max(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    /// Cubic Lagrange interpolation; zero beyond the table.
    fn at(&self, p: f64) -> Complex64 {
        let u = p / self.step;
        let n = self.values.len();
        if u >= (n - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let i = (u.floor() as usize).clamp(1, n - 3);
        let t = u - i as f64;
        let (y0, y1, y2, y3) = (self.values[i - 1], self.values[i], self.values[i + 1], self.values[i + 2]);
        let c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        y0 * c0 + y1 * c1 + y2 * c2 + y3 * c3
    }
}

/// Energy density `rho(E) = int d^3p1 d^3p2 A1 A2 delta(E - omega1 - omega2)`
/// of one state on a uniform energy grid. The radial `p1` integral runs in
/// `v = sqrt(p1_max(E) - p1)` which removes the square-root edge of the
/// second leg's shell.
fn pair_energy_density(state: &AsymptoticState, e0: f64, de: f64, n: usize) -> Vec<Complex64> {
    let reach = |psi: &WavePacket3| norm2(psi.center).sqrt() + 8.0 * psi.width;
    let (r1, r2) = (reach(&state.packet1), reach(&state.packet2));
    let leg1 = LegShell::new(&state.packet1, &state.profile1, state.m1, r1, 2001, (32, 16));
    let leg2 = LegShell::new(&state.packet2, &state.profile2, state.m2, r2, 2001, (32, 16));
    let rule = gauss_legendre(96, 0.0, 1.0);
    (0..n)
        .into_par_iter()
        .map(|j| {
            let e = e0 + j as f64 * de;
            let w1_max = e - state.m2;
            if w1_max <= state.m1 {
                return Complex64::new(0.0, 0.0);
            }
            let p1_edge = (w1_max * w1_max - state.m1 * state.m1).sqrt();
            let v_lo = (p1_edge - leg1.p_max()).max(0.0).sqrt();
            let v_hi = p1_edge.sqrt();
            let mut acc = Complex64::new(0.0, 0.0);
            for &(x, w) in &rule {
                let v = v_lo + x * (v_hi - v_lo);
                let p1 = p1_edge - v * v;
                let w1 = omega(leg1.m, [0.0, 0.0, p1]);
                let w2 = e - w1;
                let p2 = (w2 * w2 - state.m2 * state.m2).max(0.0).sqrt();
                if p2 > leg2.p_max() {
                    continue;
                }
                // d^3p2 delta(E - ...) = p2 omega2 dOmega2
                let jac = 2.0 * v * (v_hi - v_lo) * w;
                acc += leg1.at(p1) * leg2.at(p2) * (p1 * p1 * p2 * w2 * jac);
            }
            acc
        })
        .collect()
}

/// `<psi_f| delta(E_f - E_i) |psi_i>` as `int dE conj(rho_f) rho_i` with the
/// energy densities smoothed by a Gaussian kernel of width `eta`.
pub fn energy_delta_element(final_state: &AsymptoticState, initial: &AsymptoticState, eta: f64) -> Result<Complex64> {
    if !(eta > 0.0) {
        return domain(format!("kernel width {eta} must be positive"));
    }
    let top = |s: &AsymptoticState| {
        let reach = |psi: &WavePacket3, m: f64| omega(m, [0.0, 0.0, norm2(psi.center).sqrt() + 8.0 * psi.width]);
        reach(&s.packet1, s.m1) + reach(&s.packet2, s.m2)
    };
    let e0 = (final_state.m1 + final_state.m2).min(initial.m1 + initial.m2);
    let e1 = top(final_state).max(top(initial));
    let de = (eta / 8.0).min((e1 - e0) / 400.0);
    let n = ((e1 - e0) / de).ceil() as usize + 1;
    let rf = pair_energy_density(final_state, e0, de, n);
    let ri = pair_energy_density(initial, e0, de, n);
    let support = |r: &[Complex64]| {
        let peak = r.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let idx: Vec<usize> = (0..r.len()).filter(|&j| r[j].norm() > 1e-10 * peak).collect();
        (idx.first().copied().unwrap_or(0), idx.last().copied().unwrap_or(0))
    };
    let (fl, fh) = support(&rf);
    let (il, ih) = support(&ri);
    let gap = 6.0 * eta / de;
    if (fh as f64) + gap < il as f64 || (ih as f64) + gap < fl as f64 {
        eprintln!("warning: initial and final energy supports are disjoint; delta element set to 0");
        return Ok(Complex64::new(0.0, 0.0));
    }
    // The two smoothings combine into one Gaussian of width sqrt(2) eta.
    let s = std::f64::consts::SQRT_2 * eta;
    let reach = (6.0 * s / de).ceil() as isize;
    let kernel: Vec<f64> = (-reach..=reach)
        .map(|k| {
            let u = k as f64 * de / s;
            (-0.5 * u * u).exp() / ((2.0 * PI).sqrt() * s)
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in fl..=fh {
        let mut inner = Complex64::new(0.0, 0.0);
        for (k, g) in kernel.iter().enumerate() {
            let idx = j as isize + k as isize - reach;
            if idx >= 0 && (idx as usize) < ri.len() {
                inner += ri[idx as usize] * *g;
            }
        }
        acc += rf[j].conj() * inner;
    }
    Ok(acc * de * de)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionResult {
    pub smatrix_element: Complex64,
    pub s_minus_identity: Complex64,
    pub energy_delta: Complex64,
    pub t_matrix: Complex64,
    pub n_used: u32,
    pub degree_used: usize,
    pub error_estimate: f64,
}

impl TransitionResult {
    /// `t = (i / 2 pi) (S - I) / delta`, with the error from the Chebyshev
    /// tolerance and the change of `S` between `n` and `2n`.
    pub fn assemble(
        s: Complex64,
        s_refined: Complex64,
        overlap: Complex64,
        delta: Complex64,
        n: u32,
        degree: usize,
        eps_scale: f64,
    ) -> Result<Self> {
        if delta.norm() < 1e-300 {
            return Err(Error::NoSharedEnergyShell);
        }
        let smi = s - overlap;
        let t = Complex64::new(0.0, 1.0 / (2.0 * PI)) * smi / delta;
        let error = (eps_scale + (s_refined - s).norm()) / (2.0 * PI * delta.norm());
        Ok(Self {
            smatrix_element: s,
            s_minus_identity: smi,
            energy_delta: delta,
            t_matrix: t,
            n_used: n,
            degree_used: degree,
            error_estimate: error,
        })
    }
}

pub fn extract_transition(
    ip: &InnerProduct,
    final_state: &AsymptoticState,
    initial: &AsymptoticState,
    n: u32,
    beta: f64,
    eps: f64,
    eta: f64,
) -> Result<TransitionResult> {
    let delta = energy_delta_element(final_state, initial, eta)?;
    if delta.norm() < 1e-300 {
        return Err(Error::NoSharedEnergyShell);
    }
    let s = smatrix_element(ip, final_state, initial, n, beta, eps)?;
    let s2 = smatrix_element(ip, final_state, initial, 2 * n, beta, eps)?;
    let overlap = free_overlap(ip, final_state, initial)?;
    let nf = ip.inner_product(&inject(final_state)?, &inject(final_state)?)?.re.max(0.0).sqrt();
    let ni = ip.inner_product(&inject(initial)?, &inject(initial)?)?.re.max(0.0).sqrt();
    let degree = chebyshev_approx(n, eps)?.degree;
    TransitionResult::assemble(s, s2, overlap, delta, n, degree, eps * nf * ni)
}

#[cfg(test)]
mod tests;
