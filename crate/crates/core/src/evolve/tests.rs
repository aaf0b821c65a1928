use super::*;
use crate::green_models::FourPointModel;
use crate::hilbert::{QuadratureConfig, TimeProfile, WavePacket3};
use crate::quadrature::{gauss_legendre, SphericalRule};

fn free_ip() -> InnerProduct {
    InnerProduct::new(FourPointModel::free(1.0, 1.0).unwrap(), QuadratureConfig::default())
}

fn at_rest(width: f64) -> EuclideanTestFunction {
    EuclideanTestFunction::one_point(
        WavePacket3::gaussian([0.0; 3], width).unwrap(),
        TimeProfile::new(1.0, 0.25).unwrap(),
    )
    .unwrap()
}

/// `int 4 pi p^2 dp |psi|^2 h^2 F(omega) / (2 omega)` for a packet at rest.
fn radial(width: f64, h: &TimeProfile, weight: impl Fn(f64) -> Complex64) -> Complex64 {
    gauss_legendre(400, 0.0, 12.0 * width)
        .into_iter()
        .map(|(p, w)| {
            let om = (1.0 + p * p).sqrt();
            let hh = h.laplace_direct(om);
            weight(om) * (w * 4.0 * std::f64::consts::PI * p * p * (-p * p / (width * width)).exp() * hh * hh / (2.0 * om))
        })
        .sum()
}

#[test]
fn heat_shift_is_a_semigroup() {
    let f = at_rest(0.1);
    assert_eq!(heat_shift(&f, 0.0).unwrap(), f);
    let a = heat_shift(&heat_shift(&f, 0.3).unwrap(), 0.7).unwrap();
    let b = heat_shift(&f, 1.0).unwrap();
    assert!((a.points[0].1.center - b.points[0].1.center).abs() <= 1e-15);
    assert!(heat_shift(&f, -0.1).is_err());
    assert!(HeatShift::new(-1.0).is_err());
}

#[test]
fn one_particle_heat_ratio_matches_radial_quadrature() {
    let ip = free_ip();
    let f = at_rest(0.1);
    let h = f.points[0].1;
    let ratio = heat_matrix_element(&ip, &f, &f, 1.0).unwrap().re / ip.norm_squared(&f).unwrap();
    let oracle = radial(0.1, &h, |w| Complex64::new((-w).exp(), 0.0)).re / radial(0.1, &h, |_| Complex64::new(1.0, 0.0)).re;
    assert!(((ratio - oracle) / oracle).abs() < 1e-8, "{ratio} vs {oracle}");
}

#[test]
fn heat_elements_decrease_and_obey_cauchy_schwarz() {
    let ip = InnerProduct::new(
        FourPointModel::default_interacting(1.0).unwrap(),
        QuadratureConfig {
            exchange: SphericalRule::new(8, 6, 6),
            relative: SphericalRule::new(8, 6, 6),
            one_particle: SphericalRule::new(24, 12, 12),
            ..QuadratureConfig::default()
        },
    );
    let f = EuclideanTestFunction::two_point(
        WavePacket3::gaussian([0.0, 0.0, 0.3], 0.2).unwrap(),
        TimeProfile::new(1.0, 0.25).unwrap(),
        WavePacket3::gaussian([0.0, 0.0, -0.3], 0.2).unwrap(),
        TimeProfile::new(2.0, 0.25).unwrap(),
    )
    .unwrap();
    let v: Vec<Complex64> = [0.0, 0.5, 1.0, 2.0]
        .iter()
        .map(|&b| heat_matrix_element(&ip, &f, &f, b).unwrap())
        .collect();
    for w in v.windows(2) {
        assert!(w[0].re > w[1].re && w[1].re > 0.0);
    }
    for x in &v {
        assert!(x.im.abs() < 1e-12 * x.re);
    }
    // <e^{-2}> <1> >= <e^{-1}>^2 with beta = 1
    assert!(v[3].re * v[0].re >= v[2].re * v[2].re);
}

#[test]
fn one_particle_mass_is_exact() {
    let ip = free_ip();
    let mut f = at_rest(0.2);
    f.points[0].0.center = [0.3, 0.1, -0.2];
    let m2 = mass_squared_expectation(&ip, &f).unwrap();
    assert!((m2 - 1.0).abs() < 1e-10);
}

#[test]
fn pair_invariant_mass_matches_kinematics() {
    let ip = free_ip();
    let k = 0.5;
    let w = 0.01;
    let f = EuclideanTestFunction::two_point(
        WavePacket3::gaussian([0.0, 0.0, k], w).unwrap(),
        TimeProfile::new(1.0, 0.25).unwrap(),
        WavePacket3::gaussian([0.0, 0.0, -k], w).unwrap(),
        TimeProfile::new(2.0, 0.25).unwrap(),
    )
    .unwrap();
    let m2 = mass_squared_expectation(&ip, &f).unwrap();
    let expect = 4.0 * (1.0 + k * k);
    // finite width adds O(w^2) relative momentum spread
    assert!((m2 - expect).abs() < 10.0 * w * w, "{m2} vs {expect}");
    let moved = f.translated([3.0, -1.0, 2.0]);
    let m2b = mass_squared_expectation(&ip, &moved).unwrap();
    assert!((m2 - m2b).abs() <= 1e-10 * m2);
}

#[test]
fn null_vectors_are_reported() {
    let ip = free_ip();
    let f = at_rest(0.1).scaled(Complex64::new(0.0, 0.0));
    assert!(matches!(mass_squared_expectation(&ip, &f), Err(Error::NullVector(_))));
    assert!(matches!(hamiltonian_expectation(&ip, &f, DEFAULT_STEP), Err(Error::NullVector(_))));
}

#[test]
fn energy_from_heat_derivative() {
    let ip = free_ip();
    let f = at_rest(0.05);
    let h = f.points[0].1;
    let e = hamiltonian_expectation(&ip, &f, DEFAULT_STEP).unwrap();
    let oracle = radial(0.05, &h, |w| Complex64::new(w, 0.0)).re / radial(0.05, &h, |_| Complex64::new(1.0, 0.0)).re;
    assert!((e - oracle).abs() < 1e-6, "{e} vs {oracle}");
    assert!(e >= 1.0);
    let e2 = hamiltonian_second_moment(&ip, &f, 1e-3).unwrap();
    assert!(e2 >= e * e * (1.0 - 1e-9));
}

fn scalar_oracle(width: f64, h: &TimeProfile, n: u32, beta: f64) -> Complex64 {
    radial(width, h, |w| Complex64::from_polar(1.0, 2.0 * n as f64 * (-beta * w).exp()))
}

#[test]
fn polynomial_element_matches_scalar_spectral_oracle() {
    let ip = free_ip();
    let f = at_rest(0.1);
    let h = f.points[0].1;
    let norm = ip.norm_squared(&f).unwrap();
    let zero = chebyshev_approx(0, 1e-10).unwrap();
    let v0 = polynomial_operator_element(&ip, &f, &f, &zero, 1.0).unwrap();
    assert!((v0.re - norm).abs() < 1e-14 * norm && v0.im == 0.0);
    let mut last = f64::INFINITY;
    for eps in [1e-2, 5e-3, 2.5e-3, 1.25e-3] {
        let a = chebyshev_approx(4, eps).unwrap();
        let v = polynomial_operator_element(&ip, &f, &f, &a, 1.0).unwrap();
        let dev = (v - scalar_oracle(0.1, &h, 4, 1.0)).norm();
        assert!(dev <= a.sup_error * norm * (1.0 + 1e-6) + 1e-12 * norm);
        assert!(dev <= last * (1.0 + 1e-9) + 1e-13 * norm, "{dev} after {last}");
        assert!(v.norm() <= (1.0 + a.sup_error) * norm * (1.0 + 1e-12));
        last = dev;
    }
}

#[test]
fn shift_route_agrees_at_low_degree() {
    let ip = free_ip();
    let f = at_rest(0.2);
    let a = chebyshev_approx(1, 1e-6).unwrap();
    assert!(a.degree <= 16);
    let s = polynomial_operator_element(&ip, &f, &f, &a, 0.5).unwrap();
    let m = polynomial_operator_element_by_shifts(&ip, &f, &f, &a, 0.5).unwrap();
    assert!((s - m).norm() < 1e-9 * s.norm(), "{s} vs {m}");
}
