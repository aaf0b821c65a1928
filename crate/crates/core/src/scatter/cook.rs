//! The Cook integrand `||(H Phi - Phi H_0) e^{-i H_0 t} psi||`.
//!
//! In the disconnected sector `H` and `H_0` both act as `omega_1 + omega_2`
//! and cancel. In the connected sector `H` acts as `omega_c` on the
//! exchanged line, so the integrand is the connected Gram form evaluated on
//!
//! ```text
//! F_t(p2, m_c) = int d^3q Psi(p2 - q, q) e^{-i E t} (omega_c - E) a(q)
//!                h_2(omega_a(q)) h_1(omega_c - omega_a(q)) / (2 omega_a(q))
//! ```
//!
//! with `E = omega_1(p2 - q) + omega_2(q)`. The relative grid is centered
//! on the stationary point `q = p2 m2 / (m1 + m2)` with its polar axis
//! along `p2`, and its radial resolution grows with `t R^2`.

use super::{inject, AsymptoticState};
use crate::error::{domain, Result};
use crate::green_models::{ConnectedKernel, FourPointModel, MomentumFactor};
use crate::quadrature::{add, cross, dot, gauss_legendre, norm2, omega, scale, sub, SphericalGrid, SphericalRule, Vec3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Quadrature resolution of the Cook integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CookConfig {
    pub exchange: SphericalRule,
    /// Total-momentum radius in units of `sqrt(w1^2 + w2^2)` beyond `|c1 + c2|`.
    pub exchange_sigmas: f64,
    pub relative_polar: usize,
    pub relative_azimuthal: usize,
    pub relative_radial_min: usize,
    /// Extra radial nodes per radian of `t_max R^2`.
    pub radial_nodes_per_radian: f64,
    pub relative_sigmas: f64,
}

impl Default for CookConfig {
    fn default() -> Self {
        Self {
            exchange: SphericalRule::new(10, 8, 8),
            exchange_sigmas: 3.5,
            relative_polar: 24,
            relative_azimuthal: 12,
            relative_radial_min: 32,
            radial_nodes_per_radian: 0.2,
            relative_sigmas: 5.0,
        }
    }
}

impl CookConfig {
    /// Lower resolution for quick scans and tests.
    pub fn coarse() -> Self {
        Self {
            exchange: SphericalRule::new(6, 6, 6),
            exchange_sigmas: 3.0,
            relative_polar: 12,
            relative_azimuthal: 8,
            relative_radial_min: 16,
            radial_nodes_per_radian: 0.3,
            relative_sigmas: 4.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CookSample {
    pub t: f64,
    pub integrand_value: f64,
}

/// Full and reduced evaluations on a common time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CookScan {
    pub samples: Vec<CookSample>,
    /// Reduced form: the `p2 = 0` amplitude times the total-momentum volume.
    pub fast: Vec<f64>,
    pub momentum_volume: f64,
}

struct Engine<'a> {
    state: AsymptoticState,
    kernel: &'a ConnectedKernel,
    ma: f64,
    mc: Vec<(f64, f64)>,
    factors: Vec<MomentumFactor>,
    term_factors: Vec<(usize, usize)>,
    sigma: f64,
}

fn frame(axis: Vec3) -> [Vec3; 3] {
    let n = norm2(axis).sqrt();
    if n < 1e-12 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    let e3 = scale(axis, 1.0 / n);
    let helper = if e3[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = {
        let v = sub(helper, scale(e3, dot(helper, e3)));
        scale(v, 1.0 / norm2(v).sqrt())
    };
    [e1, cross(e3, e1), e3]
}

impl<'a> Engine<'a> {
    fn new(state: AsymptoticState, kernel: &'a ConnectedKernel) -> Self {
        let mut factors: Vec<MomentumFactor> = Vec::new();
        let mut index = |f: MomentumFactor| match factors.iter().position(|x| *x == f) {
            Some(i) => i,
            None => {
                factors.push(f);
                factors.len() - 1
            }
        };
        let term_factors = kernel.terms.iter().map(|t| (index(t.left), index(t.right))).collect();
        let (a1, a2) = (
            1.0 / (state.packet1.width * state.packet1.width),
            1.0 / (state.packet2.width * state.packet2.width),
        );
        Self {
            state,
            kernel,
            ma: kernel.mass_a,
            mc: kernel.mass_c_spectrum.weighted_nodes().collect(),
            factors,
            term_factors,
            sigma: (1.0 / (a1 + a2)).sqrt(),
        }
    }

    fn stationary_point(&self, p2: Vec3) -> Vec3 {
        scale(p2, self.state.m2 / (self.state.m1 + self.state.m2))
    }

    fn gaussian_peak(&self, p2: Vec3) -> Vec3 {
        let s = &self.state;
        let (a1, a2) = (
            1.0 / (s.packet1.width * s.packet1.width),
            1.0 / (s.packet2.width * s.packet2.width),
        );
        scale(
            add(scale(s.packet2.center, a2), scale(sub(p2, s.packet1.center), a1)),
            self.sigma * self.sigma,
        )
    }

    fn relative_radius(&self, p2: Vec3, cfg: &CookConfig) -> f64 {
        norm2(sub(self.gaussian_peak(p2), self.stationary_point(p2))).sqrt() + cfg.relative_sigmas * self.sigma
    }

    fn radial_nodes(&self, radius: f64, t_max: f64, cfg: &CookConfig) -> usize {
        cfg.relative_radial_min + (cfg.radial_nodes_per_radian * t_max * radius * radius).ceil() as usize
    }

    /// Amplitudes at one total momentum for every time, laid out
    /// `[factor][time][m_c]`.
    fn amplitudes(&self, p2: Vec3, times: &[f64], cfg: &CookConfig, unit: &UnitGrids) -> Vec<Complex64> {
        let s = &self.state;
        let (h1, h2) = (&s.profile1, &s.profile2);
        let (nt, nmc, nf) = (times.len(), self.mc.len(), self.factors.len());
        let center = self.stationary_point(p2);
        let radius = self.relative_radius(p2, cfg);
        let t_max = times.iter().cloned().fold(0.0, f64::max);
        let grid = unit.get(self.radial_nodes(radius, t_max, cfg));
        let axes = frame(p2);
        let omega_c: Vec<f64> = self.mc.iter().map(|&(m, _)| omega(m, p2)).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); nf * nt * nmc];
        let mut x = vec![Complex64::new(0.0, 0.0); nt];
        let mut c = vec![0.0; nmc];
        let mut fac = vec![0.0; nf];
        for (u, wu) in grid.points.iter().zip(&grid.weights) {
            let d = add(add(scale(axes[0], u[0]), scale(axes[1], u[1])), scale(axes[2], u[2]));
            let q = add(center, scale(d, radius));
            let k1 = sub(p2, q);
            let e = omega(s.m1, k1) + omega(s.m2, q);
            let oa = omega(self.ma, q);
            let amp = s.packet1.eval(k1, s.m1)
                * s.packet2.eval(q, s.m2)
                * (wu * radius * radius * radius * h2.laplace(oa) / (2.0 * oa));
            if amp.norm() == 0.0 {
                continue;
            }
            for (xt, &t) in x.iter_mut().zip(times) {
                *xt = amp * Complex64::from_polar(1.0, -e * t);
            }
            for (cj, &oc) in c.iter_mut().zip(&omega_c) {
                *cj = (oc - e) * h1.laplace(oc - oa);
            }
            for (f, a) in fac.iter_mut().zip(&self.factors) {
                *f = a.eval(self.ma, q);
            }
            for (qi, &f) in fac.iter().enumerate() {
                for (ti, &xt) in x.iter().enumerate() {
                    let xf = xt * f;
                    let row = &mut out[(qi * nt + ti) * nmc..(qi * nt + ti + 1) * nmc];
                    for (o, &cj) in row.iter_mut().zip(&c) {
                        *o += xf * cj;
                    }
                }
            }
        }
        out
    }

    /// Connected Gram form of the amplitudes at one total momentum, per time.
    fn contract(&self, p2: Vec3, amps: &[Complex64], nt: usize) -> Vec<f64> {
        let nmc = self.mc.len();
        let mut out = vec![0.0; nt];
        for (t, &(l, r)) in self.kernel.terms.iter().zip(&self.term_factors) {
            for (ti, o) in out.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &(m, rw)) in self.mc.iter().enumerate() {
                    let base = rw / (2.0 * omega(m, p2)) * t.exchange.eval(m, p2);
                    acc += amps[(l * nt + ti) * nmc + j].conj() * amps[(r * nt + ti) * nmc + j] * base;
                }
                *o += (t.coefficient * acc).re;
            }
        }
        out.iter().map(|v| v * self.kernel.coupling).collect()
    }

    fn exchange_grid(&self, cfg: &CookConfig) -> SphericalGrid {
        let s = &self.state;
        let total = add(s.packet1.center, s.packet2.center);
        let spread = (s.packet1.width.powi(2) + s.packet2.width.powi(2)).sqrt();
        SphericalGrid::new([0.0; 3], norm2(total).sqrt() + cfg.exchange_sigmas * spread, cfg.exchange)
    }

    /// Squared integrand summed over the total-momentum grid, per time.
    fn quadratic_form(&self, times: &[f64], cfg: &CookConfig) -> Vec<f64> {
        let grid = self.exchange_grid(cfg);
        let unit = UnitGrids::new(cfg);
        let nt = times.len();
        let parts: Vec<Vec<f64>> = grid
            .points
            .par_iter()
            .zip(&grid.weights)
            .map(|(&p2, &w)| {
                let amps = self.amplitudes(p2, times, cfg, &unit);
                self.contract(p2, &amps, nt).into_iter().map(|v| v * w).collect()
            })
            .collect();
        let mut total = vec![0.0; nt];
        for row in &parts {
            for (t, v) in total.iter_mut().zip(row) {
                *t += v;
            }
        }
        total
    }

    fn quadratic_form_at_rest(&self, times: &[f64], cfg: &CookConfig) -> Vec<f64> {
        let unit = UnitGrids::new(cfg);
        let amps = self.amplitudes([0.0; 3], times, cfg, &unit);
        self.contract([0.0; 3], &amps, times.len())
    }
}

/// Unit-ball rules at varying radial resolution, built on demand.
struct UnitGrids {
    polar: usize,
    azimuthal: usize,
    cache: std::sync::Mutex<Vec<(usize, std::sync::Arc<SphericalGrid>)>>,
}

impl UnitGrids {
    fn new(cfg: &CookConfig) -> Self {
        Self {
            polar: cfg.relative_polar,
            azimuthal: cfg.relative_azimuthal,
            cache: std::sync::Mutex::new(Vec::new()),
        }
    }

    fn get(&self, radial: usize) -> std::sync::Arc<SphericalGrid> {
        let mut cache = self.cache.lock().expect("grid cache");
        if let Some((_, g)) = cache.iter().find(|(n, _)| *n == radial) {
            return g.clone();
        }
        let g = std::sync::Arc::new(SphericalGrid::new(
            [0.0; 3],
            1.0,
            SphericalRule::new(radial, self.polar, self.azimuthal),
        ));
        cache.push((radial, g.clone()));
        g
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0)) {
        return domain(format!("time {t} must be non-negative"));
    }
    Ok(())
}

fn prepare<'a>(state: &AsymptoticState, model: &'a FourPointModel) -> Result<Option<Engine<'a>>> {
    state.check_model(model)?;
    // Injection orders the legs by profile time; follow the same order.
    let f = inject(state)?;
    let Some(k) = model.connected.as_ref().filter(|k| k.coupling != 0.0) else {
        return Ok(None);
    };
    let ordered = AsymptoticState::new(f.points[0].0, f.points[0].1, f.points[1].0, f.points[1].1, state.m1, state.m2)?;
    Ok(Some(Engine::new(ordered, k)))
}

pub fn cook_scan(state: &AsymptoticState, model: &FourPointModel, times: &[f64], cfg: &CookConfig) -> Result<Vec<CookSample>> {
    check_times(times)?;
    let values = match prepare(state, model)? {
        None => vec![0.0; times.len()],
        Some(engine) => engine.quadratic_form(times, cfg),
    };
    Ok(times
        .iter()
        .zip(values)
        .map(|(&t, v)| CookSample {
            t,
            integrand_value: v.max(0.0).sqrt(),
        })
        .collect())
}

/// Full scan together with the reduced form. The reduced form keeps only the
/// zero-total-momentum amplitude and restores the total-momentum integral
/// with the volume `V = Q(0) / Q_rest(0)` of the unevolved state.
pub fn cook_scan_with_fast(
    state: &AsymptoticState,
    model: &FourPointModel,
    times: &[f64],
    cfg: &CookConfig,
) -> Result<CookScan> {
    let samples = cook_scan(state, model, times, cfg)?;
    let Some(engine) = prepare(state, model)? else {
        return Ok(CookScan {
            samples,
            fast: vec![0.0; times.len()],
            momentum_volume: 0.0,
        });
    };
    let fast = cook_scan_fast_with(&engine, times, cfg);
    Ok(CookScan {
        samples,
        fast: fast.0,
        momentum_volume: fast.1,
    })
}

fn cook_scan_fast_with(engine: &Engine, times: &[f64], cfg: &CookConfig) -> (Vec<f64>, f64) {
    let full0 = engine.quadratic_form(&[0.0], cfg)[0];
    let rest0 = engine.quadratic_form_at_rest(&[0.0], cfg)[0];
    let volume = if rest0 > 0.0 { full0 / rest0 } else { 0.0 };
    let rest = engine.quadratic_form_at_rest(times, cfg);
    (rest.iter().map(|v| (v * volume).max(0.0).sqrt()).collect(), volume)
}

/// Reduced-form scan only.
pub fn cook_scan_fast(state: &AsymptoticState, model: &FourPointModel, times: &[f64], cfg: &CookConfig) -> Result<Vec<f64>> {
    check_times(times)?;
    Ok(match prepare(state, model)? {
        None => vec![0.0; times.len()],
        Some(engine) => cook_scan_fast_with(&engine, times, cfg).0,
    })
}

pub fn cook_integrand_with(state: &AsymptoticState, t: f64, model: &FourPointModel, cfg: &CookConfig) -> Result<f64> {
    Ok(cook_scan(state, model, &[t], cfg)?[0].integrand_value)
}

pub fn cook_integrand(state: &AsymptoticState, t: f64, model: &FourPointModel) -> Result<f64> {
    cook_integrand_with(state, t, model, &CookConfig::default())
}

/// The disconnected piece of the Cook quadratic form evaluated numerically,
/// against the connected piece at the same time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CancellationCheck {
    pub disconnected: f64,
    pub connected: f64,
    pub ratio: f64,
}

/// Evaluates the disconnected sector of `||(H Phi - Phi H_0) psi_t||^2`
/// without using the cancellation: `H` acts through the transform of the
/// profile derivatives and `H_0` multiplies the packets by the energy.
pub fn disconnected_cancellation(
    state: &AsymptoticState,
    model: &FourPointModel,
    t: f64,
    cfg: &CookConfig,
) -> Result<CancellationCheck> {
    let evolved = super::free_evolve(state, t);
    let rule = SphericalRule::new(48, 24, 24);
    // Per leg: <h h>, <d h>, <d d> with d = (H - omega) h and measure
    // |psi|^2 / (2 omega).
    let leg = |psi: &crate::hilbert::WavePacket3, h: &crate::hilbert::TimeProfile, m: f64| -> [f64; 3] {
        let grid = SphericalGrid::new(psi.center, 8.0 * psi.width, rule);
        let mut acc = [0.0; 3];
        for (p, w) in grid.points.iter().zip(&grid.weights) {
            let om = omega(m, *p);
            let hh = h.laplace_direct(om);
            let d = h.derivative_laplace_direct(om) - om * hh;
            let mu = psi.eval(*p, m).norm_sqr() * w / (2.0 * om);
            acc[0] += mu * hh * hh;
            acc[1] += mu * d * hh;
            acc[2] += mu * d * d;
        }
        acc
    };
    let l1 = leg(&evolved.packet1, &evolved.profile1, evolved.m1);
    let l2 = leg(&evolved.packet2, &evolved.profile2, evolved.m2);
    let disconnected = l1[2] * l2[0] + 2.0 * l1[1] * l2[1] + l1[0] * l2[2];
    let connected = cook_integrand_with(state, t, model, cfg)?.powi(2);
    Ok(CancellationCheck {
        disconnected,
        connected,
        ratio: if connected > 0.0 { disconnected.abs() / connected } else { f64::INFINITY },
    })
}

/// `n` points `a r^k` from `a` to `b`.
pub fn geometric_grid(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if !(a > 0.0 && b > a) || n < 2 {
        return domain(format!("geometric grid needs 0 < a < b and n >= 2, got ({a}, {b}, {n})"));
    }
    let r = (b / a).ln() / (n - 1) as f64;
    Ok((0..n).map(|k| a * (r * k as f64).exp()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub samples: Vec<CookSample>,
    /// Trapezoid integral over the samples plus the fitted power-law tail.
    pub tail_integral: f64,
    /// Integrable with margin: `slope <= -1.2`.
    pub certified: bool,
    pub warnings: Vec<String>,
}

/// Least-squares fit `ln y = intercept + slope ln t` of sampled values;
/// samples below `1e-300` are dropped with a warning.
pub fn fit_decay(samples: Vec<CookSample>) -> Result<DecayFit> {
    let mut warnings = Vec::new();
    let kept: Vec<CookSample> = samples.iter().copied().filter(|s| s.integrand_value >= 1e-300).collect();
    if kept.len() < samples.len() {
        warnings.push(format!(
            "{} samples underflowed and were dropped from the fit",
            samples.len() - kept.len()
        ));
    }
    if kept.len() < 2 {
        return domain("fewer than two usable samples for the decay fit");
    }
    let xs: Vec<f64> = kept.iter().map(|s| s.t.ln()).collect();
    let ys: Vec<f64> = kept.iter().map(|s| s.integrand_value.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let mut integral = 0.0;
    for w in kept.windows(2) {
        integral += 0.5 * (w[1].t - w[0].t) * (w[0].integrand_value + w[1].integrand_value);
    }
    if slope < -1.0 {
        let last = kept.last().expect("non-empty").t;
        integral += intercept.exp() * last.powf(slope + 1.0) / (-slope - 1.0);
    } else {
        integral = f64::INFINITY;
    }
    Ok(DecayFit {
        slope,
        intercept,
        residual,
        samples,
        tail_integral: integral,
        certified: slope <= -1.2,
        warnings,
    })
}

pub fn cook_decay_exponent_with(
    state: &AsymptoticState,
    model: &FourPointModel,
    t_grid: &[f64],
    cfg: &CookConfig,
) -> Result<DecayFit> {
    if t_grid.len() < 8 {
        return domain(format!("decay fit needs at least 8 times, got {}", t_grid.len()));
    }
    if let Some(t) = t_grid.iter().find(|t| !(**t >= 10.0)) {
        return domain(format!("decay fit times must be at least 10, got {t}"));
    }
    fit_decay(cook_scan(state, model, t_grid, cfg)?)
}

pub fn cook_decay_exponent(state: &AsymptoticState, model: &FourPointModel, t_grid: &[f64]) -> Result<DecayFit> {
    cook_decay_exponent_with(state, model, t_grid, &CookConfig::default())
}

/// `|int_0^k_max 4 pi k^2 g(k) exp(-omega_m(k) (tau + 2 i t)) dk|` by
/// composite Gauss-Legendre with panels finer than the local oscillation.
pub fn stationary_phase_radial(g: impl Fn(f64) -> f64, m: f64, tau: f64, t: f64, k_max: f64) -> f64 {
    let panels = 8 + (2.0 * t * k_max * k_max / (2.0 * m * PI)).ceil() as usize;
    let rule = gauss_legendre(16, 0.0, 1.0);
    let h = k_max / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..panels {
        let a = i as f64 * h;
        for &(x, w) in &rule {
            let k = a + x * h;
            let om = (m * m + k * k).sqrt();
            acc += Complex64::new(-om * tau, -2.0 * om * t).exp() * (4.0 * PI * k * k * g(k) * w * h);
        }
    }
    acc.norm()
}
