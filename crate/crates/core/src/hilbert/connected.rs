//! Connected four-point contribution to the inner product.
//!
//! After the energy contours are closed on the propagator poles, the bra
//! side of the connected term depends on the test function only through
//!
//! ```text
//! F_f(p2, m_c) = int d^3p1 Psi_f(p2 - p1, p1) a(p1)
//!                h_f2(w_a(p1)) h_f1(w_c(p2) - w_a(p1)) / (2 w_a(p1))
//! ```
//!
//! (the a-line joins the two final points, the c-line carries the total
//! momentum `p2` across the reflection plane), and similarly for the ket.
//! The connected term is then
//! `g sum_t c_t int d^3p2 dm_c rho(m_c) w_t conj(F_f^{a_t}) F_g^{b_t} / (2 w_c)`,
//! a manifest Gram form for rank-one positive kernels.

use super::{EuclideanTestFunction, QuadratureConfig, SectorWeight, FOURIER_CONSTANT};
use crate::error::Result;
use crate::green_models::{ConnectedKernel, FourPointModel, MomentumFactor};
use crate::quadrature::{add, norm2, omega, scale, sub, SphericalGrid, SphericalRule, Vec3};
use num_complex::Complex64;
use rayon::prelude::*;

/// Shared total-momentum and exchange-mass grid for a family of functions.
#[derive(Debug, Clone)]
pub struct ExchangeGrid {
    p2: Vec<Vec3>,
    mc: Vec<(f64, f64)>,
    omega_c: Vec<f64>,
    /// `w(p2) rho(m_c) dm_c / (2 omega_c)`, row-major in `(p2, m_c)`.
    base_weight: Vec<f64>,
    factors: Vec<MomentumFactor>,
    /// Per kernel term, the indices of its left and right factors.
    term_factors: Vec<(usize, usize)>,
    relative_unit: SphericalGrid,
    relative_sigmas: f64,
}

/// Connected amplitudes of one test function, `[factor][p2 * n_mc + m_c]`.
#[derive(Debug, Clone)]
pub struct Amplitudes {
    values: Vec<Vec<Complex64>>,
}

fn pair_widths(f: &EuclideanTestFunction) -> (f64, f64) {
    (f.points[0].0.width, f.points[1].0.width)
}

impl ExchangeGrid {
    pub fn for_family(family: &[&EuclideanTestFunction], model: &FourPointModel, quad: &QuadratureConfig) -> Self {
        let k = model.connected.as_ref().expect("connected kernel");
        let mut radius: f64 = 0.0;
        for f in family {
            let total = add(f.points[0].0.center, f.points[1].0.center);
            let (w1, w2) = pair_widths(f);
            radius = radius.max(norm2(total).sqrt() + quad.exchange_sigmas * (w1 * w1 + w2 * w2).sqrt());
        }
        Self::new(radius, quad.exchange, k, quad)
    }

    pub fn new(radius: f64, rule: SphericalRule, k: &ConnectedKernel, quad: &QuadratureConfig) -> Self {
        let grid = SphericalGrid::new([0.0; 3], radius, rule);
        let mc: Vec<(f64, f64)> = k.mass_c_spectrum.weighted_nodes().collect();
        let mut omega_c = Vec::with_capacity(grid.len() * mc.len());
        let mut base_weight = Vec::with_capacity(grid.len() * mc.len());
        for (p, w) in grid.points.iter().zip(&grid.weights) {
            for &(m, rw) in &mc {
                let oc = omega(m, *p);
                omega_c.push(oc);
                base_weight.push(w * rw / (2.0 * oc));
            }
        }
        let mut factors: Vec<MomentumFactor> = Vec::new();
        let mut index = |f: MomentumFactor| match factors.iter().position(|x| *x == f) {
            Some(i) => i,
            None => {
                factors.push(f);
                factors.len() - 1
            }
        };
        let term_factors = k.terms.iter().map(|t| (index(t.left), index(t.right))).collect();
        Self {
            p2: grid.points,
            mc,
            omega_c,
            base_weight,
            factors,
            term_factors,
            relative_unit: SphericalGrid::new([0.0; 3], 1.0, quad.relative),
            relative_sigmas: quad.relative_sigmas,
        }
    }

    pub fn len(&self) -> usize {
        self.base_weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base_weight.is_empty()
    }

    pub fn amplitudes(&self, f: &EuclideanTestFunction, model: &FourPointModel, _quad: &QuadratureConfig) -> Amplitudes {
        let k = model.connected.as_ref().expect("connected kernel");
        let (m1, m2) = (model.leg1.mass, model.leg2.mass);
        let ma = k.mass_a;
        let (psi1, h1) = (&f.points[0].0, &f.points[0].1);
        let (psi2, h2) = (&f.points[1].0, &f.points[1].1);
        let (a1, a2) = (1.0 / (psi1.width * psi1.width), 1.0 / (psi2.width * psi2.width));
        let sigma = (1.0 / (a1 + a2)).sqrt();
        let r1 = self.relative_sigmas * sigma;
        let nmc = self.mc.len();
        let nf = self.factors.len();
        let per_p2: Vec<Vec<Complex64>> = self
            .p2
            .par_iter()
            .enumerate()
            .map(|(i, &p2)| {
                // Peak of psi_1(p2 - p1) psi_2(p1) in p1.
                let center = scale(add(scale(psi2.center, a2), scale(sub(p2, psi1.center), a1)), sigma * sigma);
                let oc = &self.omega_c[i * nmc..(i + 1) * nmc];
                let mut out = vec![Complex64::new(0.0, 0.0); nf * nmc];
                let mut fac = vec![0.0; nf];
                for (u, wu) in self.relative_unit.points.iter().zip(&self.relative_unit.weights) {
                    let p1 = add(center, scale(*u, r1));
                    let leg1 = sub(p2, p1);
                    let oa = omega(ma, p1);
                    let amp = f.pair_amplitude(leg1, m1, p1, m2) * (wu * r1 * r1 * r1 * h2.laplace(oa) / (2.0 * oa));
                    for (x, a) in fac.iter_mut().zip(&self.factors) {
                        *x = a.eval(ma, p1);
                    }
                    for (j, &w) in oc.iter().enumerate() {
                        let v = amp * h1.laplace(w - oa);
                        for (q, x) in fac.iter().enumerate() {
                            out[q * nmc + j] += v * *x;
                        }
                    }
                }
                out
            })
            .collect();
        let mut values = vec![Vec::with_capacity(self.len()); nf];
        for row in &per_p2 {
            for (q, v) in values.iter_mut().enumerate() {
                v.extend(row[q * nmc..(q + 1) * nmc].iter().map(|x| x * FOURIER_CONSTANT));
            }
        }
        Amplitudes { values }
    }

    pub fn contract(&self, af: &Amplitudes, ag: &Amplitudes, k: &ConnectedKernel, w: SectorWeight) -> Complex64 {
        let nmc = self.mc.len();
        let mut total = Complex64::new(0.0, 0.0);
        for (t, &(l, r)) in k.terms.iter().zip(&self.term_factors) {
            let (fl, gr) = (&af.values[l], &ag.values[r]);
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, p2) in self.p2.iter().enumerate() {
                for (j, &(m, _)) in self.mc.iter().enumerate() {
                    let idx = i * nmc + j;
                    let s = match w {
                        SectorWeight::Unit => Complex64::new(1.0, 0.0),
                        SectorWeight::Energy(s) => s(self.omega_c[idx]),
                        SectorWeight::MassSquared => Complex64::new(m * m, 0.0),
                    };
                    acc += fl[idx].conj() * gr[idx] * s * (self.base_weight[idx] * t.exchange.eval(m, *p2));
                }
            }
            total += t.coefficient * acc;
        }
        total * k.coupling
    }
}

/// Connected contribution to `<f|g>` at default quadrature resolution.
pub fn connected_norm_contribution(
    f: &EuclideanTestFunction,
    g: &EuclideanTestFunction,
    model: &FourPointModel,
) -> Result<Complex64> {
    super::InnerProduct::new(model.clone(), QuadratureConfig::default()).connected(f, g, SectorWeight::Unit)
}
