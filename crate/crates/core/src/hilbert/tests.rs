use super::*;
use crate::green_models::{ConnectedKernel, FourPointModel, TwoPointModel};
use crate::quadrature::gauss_legendre;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn quick() -> QuadratureConfig {
    QuadratureConfig {
        one_particle: SphericalRule::new(24, 12, 12),
        exchange: SphericalRule::new(8, 6, 6),
        relative: SphericalRule::new(8, 6, 6),
        pair: SphericalRule::new(10, 6, 6),
        ..QuadratureConfig::default()
    }
}

fn small_kernel_model(g: f64) -> FourPointModel {
    kernel_model_with_nodes(g, 8)
}

fn kernel_model_with_nodes(g: f64, nodes: usize) -> FourPointModel {
    let k = ConnectedKernel::separable_gaussian(g, 1.0, 1.0, 2.2, 6.2, nodes).unwrap();
    FourPointModel::new(TwoPointModel::new(1.0).unwrap(), TwoPointModel::new(1.0).unwrap(), Some(k)).unwrap()
}

fn pair_state(width: f64, k: f64, t1: f64, t2: f64, hw: f64) -> EuclideanTestFunction {
    EuclideanTestFunction::two_point(
        WavePacket3::gaussian([0.0, 0.0, k], width).unwrap(),
        TimeProfile::new(t1, hw).unwrap(),
        WavePacket3::gaussian([0.0, 0.0, -k], width).unwrap(),
        TimeProfile::new(t2, hw).unwrap(),
    )
    .unwrap()
}

#[test]
fn reflection_is_an_involution() {
    let f = pair_state(0.2, 0.3, 1.0, 2.0, 0.25);
    let r = time_reflect(&f);
    assert_eq!(r.points[0].1.center, -1.0);
    assert_eq!(r.points[1].1.center, -2.0);
    assert!(r.points[0].1.center > r.points[1].1.center);
    assert_eq!(time_reflect(&r), f);
}

#[test]
fn construction_rejects_bad_supports() {
    assert!(TimeProfile::new(0.2, 0.25).is_err());
    assert!(TimeProfile::new(1.0, 0.0).is_err());
    assert!(WavePacket3::gaussian([0.0; 3], 0.0).is_err());
    let p = WavePacket3::gaussian([0.0; 3], 0.2).unwrap();
    let overlapping = EuclideanTestFunction::two_point(
        p,
        TimeProfile::new(1.0, 0.25).unwrap(),
        p,
        TimeProfile::new(1.4, 0.25).unwrap(),
    );
    assert!(overlapping.is_err());
    let reversed = EuclideanTestFunction::two_point(
        p,
        TimeProfile::new(2.0, 0.25).unwrap(),
        p,
        TimeProfile::new(1.0, 0.25).unwrap(),
    );
    assert!(reversed.is_err());
}

#[test]
fn profile_integrates_to_one() {
    let h = TimeProfile::new(1.0, 0.25).unwrap();
    let rule = gauss_legendre(400, 0.75, 1.25);
    let total: f64 = rule.iter().map(|&(t, w)| w * h.value(t)).sum();
    assert!((total - 1.0).abs() < 1e-8);
    assert!((h.laplace(0.0) - 1.0).abs() < 1e-12);
    let peak = h.with_peak_normalization();
    assert!((peak.value(1.0) - 1.0).abs() < 1e-15);
    let total: f64 = rule.iter().map(|&(t, w)| w * peak.value(t)).sum();
    assert!((total - peak.integral()).abs() < 1e-8);
}

#[test]
fn laplace_profile_support_bound() {
    let h = LaplaceProfile::new(TimeProfile::new(1.0, 0.25).unwrap());
    for w in [0.5, 1.0, 3.0, 10.0, 20.0] {
        let v = h.eval(w);
        assert!(v > 0.0 && v <= (-w * 0.75f64).exp());
    }
}

#[test]
fn one_particle_overlap_is_positive() {
    let p = WavePacket3::gaussian([0.1, -0.2, 0.3], 0.2).unwrap();
    let h = TimeProfile::new(1.0, 0.25).unwrap();
    let v = one_particle_overlap((&p, &h), (&p, &h), 1.0).unwrap();
    assert!(v.re > 0.0 && v.im.abs() < 1e-15 * v.re);
    assert!(one_particle_overlap((&p, &h), (&p, &h), 0.0).is_err());
}

#[test]
fn one_particle_overlap_matches_cartesian_trapezoid() {
    let p = WavePacket3::gaussian([0.0, 0.0, 0.5], 0.1).unwrap();
    let h = TimeProfile::new(1.0, 0.05).unwrap();
    let v = one_particle_overlap((&p, &h), (&p, &h), 1.0).unwrap();
    // Trapezoid on a box of +-10 widths; spectrally accurate for the Gaussian.
    let n = 121;
    let half = 1.0;
    let step = 2.0 * half / (n - 1) as f64;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let q = [
                    -half + i as f64 * step,
                    -half + j as f64 * step,
                    0.5 - half + k as f64 * step,
                ];
                let om = omega(1.0, q);
                let hh = h.laplace(om);
                acc += p.eval(q, 1.0).norm_sqr() * hh * hh / (2.0 * om);
            }
        }
    }
    acc *= step * step * step;
    assert!(((v.re - acc) / acc).abs() < 1e-8, "{} vs {acc}", v.re);
}

#[test]
fn heat_compensated_copy_has_the_same_overlaps() {
    let beta = 0.4;
    let p = WavePacket3::gaussian([0.0, 0.1, 0.2], 0.15).unwrap();
    let h = TimeProfile::new(1.0, 0.25).unwrap();
    let p2 = p.modulated(c(beta));
    let h2 = h.shifted(beta).unwrap();
    let g = WavePacket3::gaussian([0.1, 0.0, 0.0], 0.25).unwrap();
    let hg = TimeProfile::new(0.8, 0.2).unwrap();
    let a = one_particle_overlap((&p, &h), (&g, &hg), 1.0).unwrap();
    let b = one_particle_overlap((&p2, &h2), (&g, &hg), 1.0).unwrap();
    assert!((a - b).norm() < 1e-12 * a.norm());
}

#[test]
fn connected_part_vanishes_without_coupling() {
    let f = pair_state(0.2, 0.3, 0.5, 1.0, 0.2);
    let ip = InnerProduct::new(small_kernel_model(0.0), quick());
    assert_eq!(ip.connected(&f, &f, SectorWeight::Unit).unwrap(), c(0.0));
    let free = InnerProduct::new(FourPointModel::free(1.0, 1.0).unwrap(), quick());
    assert_eq!(free.connected(&f, &f, SectorWeight::Unit).unwrap(), c(0.0));
}

/// Independent evaluation of the connected term: Cartesian Gauss-Legendre
/// boxes for both momenta and direct nested quadrature of the Euclidean time
/// integrals against the pole-reduced propagators.
fn connected_oracle(f: &EuclideanTestFunction, model: &FourPointModel) -> Complex64 {
    let k = model.connected.as_ref().unwrap();
    let (m1, m2, ma) = (model.leg1.mass, model.leg2.mass, k.mass_a);
    let box_rule = |center: Vec3, half: f64, n: usize| -> Vec<(Vec3, f64)> {
        let r: Vec<Vec<(f64, f64)>> = (0..3).map(|d| gauss_legendre(n, center[d] - half, center[d] + half)).collect();
        let mut out = Vec::new();
        for &(x, wx) in &r[0] {
            for &(y, wy) in &r[1] {
                for &(z, wz) in &r[2] {
                    out.push(([x, y, z], wx * wy * wz));
                }
            }
        }
        out
    };
    let time_rule = |h: &TimeProfile| -> Vec<(f64, f64)> {
        let n = 24;
        let (lo, hi) = h.support();
        let step = (hi - lo) / n as f64;
        (1..n).map(|i| (lo + i as f64 * step, step * h.value(lo + i as f64 * step))).collect()
    };
    let t1 = time_rule(&f.points[0].1);
    let t2 = time_rule(&f.points[1].1);
    let (c1, c2) = (f.points[0].0.center, f.points[1].0.center);
    let (w1, w2) = (f.points[0].0.width, f.points[1].0.width);
    let spread = (w1 * w1 + w2 * w2).sqrt();
    let sigma = 1.0 / (1.0 / (w1 * w1) + 1.0 / (w2 * w2)).sqrt();
    let p2_box = box_rule(add(c1, c2), 3.6 * spread, 14);
    let mc: Vec<(f64, f64)> = k.mass_c_spectrum.weighted_nodes().collect();
    let u = k.terms[0].left;
    let mut total = c(0.0);
    for &(p2, q2) in &p2_box {
        let peak = scale(add(scale(c2, 1.0 / (w2 * w2)), scale(sub(p2, c1), 1.0 / (w1 * w1))), sigma * sigma);
        let p1_box = box_rule(peak, 5.0 * sigma, 14);
        for &(mcv, rw) in &mc {
            let oc = omega(mcv, p2);
            let mut amp = c(0.0);
            for &(p1, q1) in &p1_box {
                let oa = omega(ma, p1);
                // int dx1 dx2 h1(x1) h2(x2) exp(-oa (x2 - x1)) exp(-oc x1)
                let outer: f64 = t2.iter().map(|&(x2, a2)| a2 * (-oa * x2).exp()).sum();
                let inner: f64 = t1.iter().map(|&(x1, a1)| a1 * ((oa - oc) * x1).exp()).sum();
                let time = outer * inner;
                amp += f.pair_amplitude(sub(p2, p1), m1, p1, m2) * (q1 * u.eval(ma, p1) * time / (2.0 * oa));
            }
            total += c(amp.norm_sqr() * q2 * rw / (2.0 * oc));
        }
    }
    total * k.coupling
}

#[test]
fn connected_part_matches_time_domain_oracle() {
    let f = pair_state(0.2, 0.3, 0.5, 1.0, 0.2);
    let model = kernel_model_with_nodes(1.0, 4);
    let ip = InnerProduct::new(model.clone(), QuadratureConfig::default());
    let v = ip.connected(&f, &f, SectorWeight::Unit).unwrap();
    let oracle = connected_oracle(&f, &model);
    assert!(v.re > 0.0);
    assert!(((v - oracle) / oracle).norm() < 1e-3, "{v} vs {oracle}");
}

#[test]
fn free_inner_product_factorizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let fam = random_two_point_family(&mut rng, 2);
    let ip = InnerProduct::new(small_kernel_model(0.0), quick());
    let v = ip.inner_product(&fam[0], &fam[1]).unwrap();
    let o1 = one_particle_overlap_with(
        (&fam[0].points[0].0, &fam[0].points[0].1),
        (&fam[1].points[0].0, &fam[1].points[0].1),
        1.0,
        &quick(),
    )
    .unwrap();
    let o2 = one_particle_overlap_with(
        (&fam[0].points[1].0, &fam[0].points[1].1),
        (&fam[1].points[1].0, &fam[1].points[1].1),
        1.0,
        &quick(),
    )
    .unwrap();
    assert!((v - o1 * o2).norm() <= 1e-15 * v.norm());
}

#[test]
fn mixed_ranks_are_orthogonal() {
    let p = WavePacket3::gaussian([0.0; 3], 0.2).unwrap();
    let one = EuclideanTestFunction::one_point(p, TimeProfile::new(1.0, 0.25).unwrap()).unwrap();
    let two = pair_state(0.2, 0.3, 1.0, 2.0, 0.25);
    let ip = InnerProduct::new(small_kernel_model(1.0), quick());
    assert_eq!(ip.inner_product(&one, &two).unwrap(), c(0.0));
}

#[test]
fn inner_product_is_conjugate_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ip = InnerProduct::new(small_kernel_model(1.0), quick());
    for _ in 0..5 {
        let fam = random_two_point_family(&mut rng, 2);
        let a = ip.inner_product(&fam[0], &fam[1]).unwrap();
        let b = ip.inner_product(&fam[1], &fam[0]).unwrap();
        assert!((a - b.conj()).norm() <= 1e-12 * a.norm(), "{a} {b}");
    }
}

#[test]
fn spatial_translation_is_invisible() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let fam = random_two_point_family(&mut rng, 2);
    let ip = InnerProduct::new(small_kernel_model(1.0), quick());
    let a = ip.inner_product(&fam[0], &fam[1]).unwrap();
    let shift = [0.7, -1.3, 2.1];
    let b = ip.inner_product(&fam[0].translated(shift), &fam[1].translated(shift)).unwrap();
    assert!((a - b).norm() <= 1e-10 * a.norm());
}

#[test]
fn connected_part_clusters() {
    let ip = InnerProduct::new(small_kernel_model(1.0), quick());
    let mut last = f64::INFINITY;
    for d in [0.0, 5.0, 10.0, 20.0] {
        let mut f = pair_state(0.2, 0.3, 1.0, 2.0, 0.25);
        f.points[1].0 = f.points[1].0.with_position([0.0, 0.0, d]);
        let v = ip.connected(&f, &f, SectorWeight::Unit).unwrap().re;
        assert!(v >= 0.0 && v < last, "d = {d}: {v} after {last}");
        last = v;
    }
}

#[test]
fn gram_matrix_is_positive_for_the_separable_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let fam = random_two_point_family(&mut rng, 6);
    let ip = InnerProduct::new(small_kernel_model(1.0), quick());
    let g = ip.gram_matrix(&fam).unwrap();
    assert!(g.hermiticity_defect() <= 1e-12);
    let cert = g.certificate(TOL_RP);
    assert!(cert.pass, "{cert:?}");
    let single = ip.gram_matrix(&fam[..1]).unwrap();
    assert!(single.entries[(0, 0)].re > 0.0);
}

#[test]
fn broken_kernel_fails_certification() {
    let k = ConnectedKernel::broken(2000.0, 1.0, 1.0, 2.2, 6.2, 8).unwrap();
    let model = FourPointModel::new(TwoPointModel::new(1.0).unwrap(), TwoPointModel::new(1.0).unwrap(), Some(k)).unwrap();
    let ip = InnerProduct::new(model, quick());
    // Packets above and below the sign flip.
    let f = |z: f64| {
        EuclideanTestFunction::two_point(
            WavePacket3::gaussian([0.0, 0.0, -z], 0.15).unwrap(),
            TimeProfile::new(0.5, 0.2).unwrap(),
            WavePacket3::gaussian([0.0, 0.0, z], 0.15).unwrap(),
            TimeProfile::new(1.0, 0.2).unwrap(),
        )
        .unwrap()
    };
    let fam = vec![f(0.4), f(-0.4)];
    let cert = ip.rp_certificate(&fam).unwrap();
    assert!(!cert.pass && cert.min_eigenvalue < 0.0, "{cert:?}");
}

#[test]
fn heat_compensated_copy_is_a_null_direction() {
    let f = pair_state(0.2, 0.3, 1.0, 2.0, 0.25);
    let beta = 0.5;
    let mut g = f.clone();
    g.points[1].0 = g.points[1].0.modulated(c(beta));
    g.points[1].1 = g.points[1].1.shifted(beta).unwrap();
    let ip = InnerProduct::new(small_kernel_model(1.0), quick());
    let gram = ip.gram_matrix(&[f, g]).unwrap();
    let eig = gram.eigenvalues();
    assert!(eig[0].abs() <= 1e-8 * eig[1], "{eig:?}");
}
