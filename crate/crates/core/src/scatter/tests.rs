use super::*;
use crate::hilbert::{one_particle_overlap, QuadratureConfig};

fn free_ip() -> InnerProduct {
    InnerProduct::new(FourPointModel::free(1.0, 1.0).unwrap(), QuadratureConfig::default())
}

fn default_state() -> AsymptoticState {
    AsymptoticState::head_on(0.2, 0.4, 1.0).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn overlapping_profiles_are_rejected() {
    let s = default_state();
    let bad = s.with_profiles(TimeProfile::new(1.0, 0.3).unwrap(), TimeProfile::new(1.5, 0.3).unwrap());
    assert!(matches!(bad, Err(Error::Construction(_))));
}

#[test]
fn injected_norm_factorizes_at_zero_coupling() {
    let s = default_state();
    let ip = free_ip();
    let n = ip.norm_squared(&inject(&s).unwrap()).unwrap();
    let o1 = one_particle_overlap((&s.packet1, &s.profile1), (&s.packet1, &s.profile1), 1.0).unwrap();
    let o2 = one_particle_overlap((&s.packet2, &s.profile2), (&s.packet2, &s.profile2), 1.0).unwrap();
    assert!(rel(n, (o1 * o2).re) < 1e-12);
}

#[test]
fn injection_is_linear() {
    let s = default_state();
    let ip = free_ip();
    let alpha = Complex64::new(0.6, -1.3);
    let a = ip.norm_squared(&inject(&s).unwrap()).unwrap();
    let b = ip.norm_squared(&inject(&s.scaled(alpha)).unwrap()).unwrap();
    assert!(rel(b, alpha.norm_sqr() * a) < 1e-12);
}

#[test]
fn profile_choice_gives_the_same_ray_for_narrow_packets() {
    let s = AsymptoticState::head_on(0.2, 0.01, 1.0).unwrap();
    let t = s
        .with_profiles(TimeProfile::new(1.1, 0.2).unwrap(), TimeProfile::new(2.2, 0.3).unwrap())
        .unwrap();
    let ip = free_ip();
    let (f, g) = (inject(&s).unwrap(), inject(&t).unwrap());
    let c = ip.inner_product(&f, &g).unwrap().norm() / (ip.norm_squared(&f).unwrap() * ip.norm_squared(&g).unwrap()).sqrt();
    assert!((c - 1.0).abs() < 1e-6, "{c}");
}

#[test]
fn free_evolution_is_unitary_and_composes() {
    let s = default_state();
    let ip = free_ip();
    assert_eq!(free_evolve(&s, 0.0), s);
    let n0 = ip.norm_squared(&inject(&s).unwrap()).unwrap();
    let n50 = ip.norm_squared(&inject(&free_evolve(&s, 50.0)).unwrap()).unwrap();
    assert!(rel(n50, n0) < 1e-10);
    let a = free_evolve(&free_evolve(&s, 3.0), 4.5);
    let b = free_evolve(&s, 7.5);
    for p in [[0.1, -0.2, 0.3], [0.0, 0.0, 0.5]] {
        assert!((a.packet1.eval(p, 1.0) - b.packet1.eval(p, 1.0)).norm() < 1e-14);
    }
}

#[test]
fn asymptotic_phase_preserves_packet_norms() {
    let s = default_state();
    let ip = free_ip();
    let f = inject(&s).unwrap();
    let one = |_: f64| Complex64::new(1.0, 0.0);
    let a = ip.inner_product_weighted(&f, &f, SectorWeight::Energy(&one)).unwrap();
    let g = f.clone().with_pair_phase(asymptotic_phase(-7.0, 1.0));
    let b = ip.inner_product_weighted(&g, &g, SectorWeight::Energy(&one)).unwrap();
    assert!((a - b).norm() / a.norm() < 1e-12);
}

#[test]
fn free_theory_smatrix_is_identity() {
    let ip = free_ip();
    let f = default_state();
    let i = AsymptoticState::head_on(0.25, 0.35, 1.0).unwrap();
    let eps = 1e-8;
    let overlap = free_overlap(&ip, &f, &i).unwrap();
    let nf = ip.norm_squared(&inject(&f).unwrap()).unwrap().sqrt();
    let ni = ip.norm_squared(&inject(&i).unwrap()).unwrap().sqrt();
    for n in [4, 8, 16] {
        let s = smatrix_element(&ip, &f, &i, n, 1.0, eps).unwrap();
        assert!((s - overlap).norm() <= eps * nf * ni, "n={n}");
    }
}

#[test]
fn free_theory_transition_vanishes() {
    let ip = free_ip();
    let s = AsymptoticState::head_on(0.2, 0.1, 1.0).unwrap();
    let r = extract_transition(&ip, &s, &s, 4, 1.0, 1e-8, DEFAULT_ETA).unwrap();
    assert!(r.t_matrix.norm() <= 1e-8 * ip.norm_squared(&inject(&s).unwrap()).unwrap() / r.energy_delta.norm());
}

#[test]
fn energy_delta_is_positive_and_hermitian() {
    let a = AsymptoticState::head_on(0.2, 0.05, 1.0).unwrap();
    let b = AsymptoticState::head_on(0.21, 0.06, 1.0).unwrap().translated([0.5, 0.0, 0.0]);
    let d = energy_delta_element(&a, &a, DEFAULT_ETA).unwrap();
    assert!(d.re > 0.0 && d.im.abs() < 1e-12 * d.re);
    let x = energy_delta_element(&a, &b, DEFAULT_ETA).unwrap();
    let y = energy_delta_element(&b, &a, DEFAULT_ETA).unwrap();
    assert!((x - y.conj()).norm() < 1e-12 * x.norm());
}

#[test]
fn energy_delta_converges_in_kernel_width() {
    let s = default_state();
    let v: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&eta| energy_delta_element(&s, &s, eta).unwrap().re)
        .collect();
    assert!(rel(v[1], v[0]) < 0.01 && rel(v[2], v[1]) < 0.01, "{v:?}");
}

#[test]
fn disjoint_energy_shells_give_zero() {
    let a = AsymptoticState::head_on(0.0, 0.05, 1.0).unwrap();
    let b = AsymptoticState::head_on(3.0, 0.05, 1.0).unwrap();
    assert_eq!(energy_delta_element(&a, &b, DEFAULT_ETA).unwrap(), Complex64::new(0.0, 0.0));
    let ip = free_ip();
    assert!(matches!(
        extract_transition(&ip, &a, &b, 4, 1.0, 1e-8, DEFAULT_ETA),
        Err(Error::NoSharedEnergyShell)
    ));
}

#[test]
fn cook_vanishes_without_coupling() {
    let s = default_state();
    let free = FourPointModel::default_interacting(0.0).unwrap();
    assert_eq!(cook_integrand_with(&s, 10.0, &free, &CookConfig::coarse()).unwrap(), 0.0);
    let none = FourPointModel::free(1.0, 1.0).unwrap();
    assert_eq!(cook_integrand_with(&s, 10.0, &none, &CookConfig::coarse()).unwrap(), 0.0);
}

#[test]
fn cook_is_translation_invariant() {
    let model = FourPointModel::default_interacting(1.0).unwrap();
    let s = default_state();
    let cfg = CookConfig::coarse();
    let a = cook_integrand_with(&s, 10.0, &model, &cfg).unwrap();
    let b = cook_integrand_with(&s.translated([3.0, -1.0, 2.0]), 10.0, &model, &cfg).unwrap();
    assert!(rel(b, a) < 1e-12);
}

#[test]
fn cook_is_finite_and_positive() {
    let model = FourPointModel::default_interacting(1.0).unwrap();
    let s = default_state();
    let v = cook_scan(&s, &model, &[0.0, 10.0, 100.0], &CookConfig::coarse()).unwrap();
    for x in &v {
        assert!(x.integrand_value.is_finite() && x.integrand_value > 0.0, "{x:?}");
    }
}

#[test]
fn disconnected_piece_cancels() {
    let model = FourPointModel::default_interacting(1.0).unwrap();
    let c = disconnected_cancellation(&default_state(), &model, 0.0, &CookConfig::coarse()).unwrap();
    assert!(c.ratio <= 1e-8, "{c:?}");
}

#[test]
fn stationary_phase_oracle_decays_as_three_halves() {
    let ts = geometric_grid(20.0, 200.0, 12).unwrap();
    let samples = ts
        .iter()
        .map(|&t| CookSample {
            t,
            integrand_value: stationary_phase_radial(|k| (-k * k).exp() * (1.0 + 0.3 * k * k), 1.0, 1.0, t, 6.0),
        })
        .collect();
    let fit = cook::fit_decay(samples).unwrap();
    assert!((fit.slope + 1.5).abs() < 0.05, "{}", fit.slope);
}

#[test]
fn decay_fit_recovers_a_power_law() {
    let ts = geometric_grid(10.0, 100.0, 9).unwrap();
    let samples = ts.iter().map(|&t| CookSample { t, integrand_value: 3.0 * t.powf(-1.5) }).collect();
    let fit = cook::fit_decay(samples).unwrap();
    assert!((fit.slope + 1.5).abs() < 1e-12 && (fit.intercept - 3f64.ln()).abs() < 1e-12);
    assert!(fit.residual < 1e-12 && fit.certified && fit.tail_integral.is_finite());
}

#[test]
fn decay_fit_drops_underflow() {
    let mut samples: Vec<CookSample> = geometric_grid(10.0, 100.0, 9)
        .unwrap()
        .iter()
        .map(|&t| CookSample { t, integrand_value: t.powf(-2.0) })
        .collect();
    samples[8].integrand_value = 0.0;
    let fit = cook::fit_decay(samples).unwrap();
    assert_eq!(fit.warnings.len(), 1);
    assert!((fit.slope + 2.0).abs() < 1e-12);
}

#[test]
fn decay_grid_preconditions() {
    let model = FourPointModel::default_interacting(1.0).unwrap();
    let s = default_state();
    assert!(cook_decay_exponent(&s, &model, &[20.0, 30.0]).is_err());
    assert!(cook_decay_exponent(&s, &model, &geometric_grid(5.0, 50.0, 8).unwrap()).is_err());
}
