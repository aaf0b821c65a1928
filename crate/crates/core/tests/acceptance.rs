//! Acceptance criteria, one line each. Run alone with
//! `cargo test --release --test acceptance [-- <criterion numbers>]`.

use euclid_rp::cli::{probe_family, run_suite, Command};
use euclid_rp::config::ExperimentConfig;
use euclid_rp::evolve::chebyshev::{chebyshev_approx, CERTIFICATION_POINTS};
use euclid_rp::evolve::heat_matrix_element;
use euclid_rp::green_models::{check_kernel_positivity, kernel_spectrum, ConnectedKernel, FourPointModel, TwoPointModel};
use euclid_rp::hilbert::oracle::one_particle_cartesian;
use euclid_rp::hilbert::{
    one_particle_overlap, random_two_point_family, EuclideanTestFunction, InnerProduct, QuadratureConfig, TimeProfile,
    WavePacket3,
};
use euclid_rp::scatter::mock::{CVector, MockModel};
use euclid_rp::scatter::{
    cook_scan_with_fast, fit_decay, free_overlap, geometric_grid, inject, smatrix_element, AsymptoticState,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::time::Instant;

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn reflection_positivity() -> Outcome {
    let cfg = ExperimentConfig::default();
    let dir = tempfile::tempdir()?;
    let start = Instant::now();
    run_suite(Command::RpCheck, &cfg, dir.path())?;
    let secs = start.elapsed().as_secs_f64();
    let table = std::fs::read_to_string(dir.path().join("rp.csv"))?;
    // family, size, min, max, ratio, defect; the last row is the probe family
    let rows: Vec<Vec<f64>> = table
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let random = &rows[..rows.len() - 1];
    let worst = random.iter().map(|r| r[2] / r[3]).fold(f64::INFINITY, f64::min);
    let largest = random.iter().map(|r| r[1] as usize).max().unwrap_or(0);
    let ok = random.len() == 50 && largest <= 12 && random.iter().all(|r| r[2] >= -1e-10 * r[3]);
    Ok((
        ok,
        format!("{} families up to size {largest}, worst min/max {worst:.3e} (bound -1e-10), {secs:.0} s", random.len()),
    ))
}

fn positivity_falsification() -> Outcome {
    let k = ConnectedKernel::broken(2000.0, 1.0, 1.0, 2.2, 6.2, 8)?;
    let model = FourPointModel::new(TwoPointModel::new(1.0)?, TwoPointModel::new(1.0)?, Some(k.clone()))?;
    let ip = InnerProduct::new(model, QuadratureConfig::default());
    let cert = ip.rp_certificate(&probe_family())?;
    let ratio = cert.min_eigenvalue / cert.max_eigenvalue;
    let grid: Vec<([f64; 3], f64)> = (0..8)
        .map(|i| ([0.1 * i as f64, 0.0, if i % 2 == 0 { 0.3 } else { -0.3 }], 1.0))
        .collect();
    let fixed = ([0.0; 3], 4.2);
    let kmin = check_kernel_positivity(&k, &grid, fixed)?;
    let kmax = *kernel_spectrum(&k, &grid, fixed)?.last().unwrap();
    let flagged = kmin < -1e-10 * kmax;
    Ok((
        ratio < -1e-4 && !cert.pass && flagged,
        format!("Gram min/max {ratio:.3e} (bound -1e-4), kernel check min {kmin:.3e} flagged={flagged}"),
    ))
}

fn chebyshev_accuracy() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut degrees = Vec::new();
    for n in 1..=10u32 {
        let a = chebyshev_approx(n, 1e-10)?;
        let c = a.certify(CERTIFICATION_POINTS, 1000 + n as u64);
        worst = worst.max(c).max(a.sup_error);
        degrees.push(a.degree);
    }
    Ok((
        worst < 1e-10,
        format!("n = 1..10, worst error {worst:.3e} on 1e5 random points, degrees {degrees:?}"),
    ))
}

fn cook_decay() -> Outcome {
    let model = FourPointModel::default_interacting(1.0)?;
    let state = AsymptoticState::head_on(0.2, 0.4, 1.0)?;
    let times = geometric_grid(20.0, 200.0, 12)?;
    let start = Instant::now();
    let scan = cook_scan_with_fast(&state, &model, &times, &Default::default())?;
    let secs = start.elapsed().as_secs_f64();
    let fit = fit_decay(scan.samples.clone())?;
    let dev = scan
        .samples
        .iter()
        .zip(&scan.fast)
        .map(|(s, f)| (f / s.integrand_value - 1.0).abs())
        .fold(0.0, f64::max);
    Ok((
        (fit.slope + 1.5).abs() <= 0.1 && dev <= 0.05,
        format!("slope {:.4} (target -1.5 +- 0.1), fast path max deviation {:.2}% (bound 5%), {secs:.0} s", fit.slope, 100.0 * dev),
    ))
}

fn free_identity() -> Outcome {
    let ip = InnerProduct::new(FourPointModel::free(1.0, 1.0)?, QuadratureConfig::default());
    let f = AsymptoticState::head_on(0.2, 0.4, 1.0)?;
    let i = AsymptoticState::head_on(0.25, 0.35, 1.0)?;
    let eps = 1e-8;
    let overlap = free_overlap(&ip, &f, &i)?;
    let scale = (ip.norm_squared(&inject(&f)?)? * ip.norm_squared(&inject(&i)?)?).sqrt();
    let mut worst: f64 = 0.0;
    for n in [4, 8, 16] {
        let s = smatrix_element(&ip, &f, &i, n, 1.0, eps)?;
        worst = worst.max((s - overlap).norm() / scale);
    }
    Ok((worst <= eps, format!("max |S - <f|i>| / (|f| |i|) = {worst:.3e} for n = 4, 8, 16 (bound 1e-8)")))
}

fn unit(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    v.unscale(v.norm())
}

fn mock_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let m = MockModel::random(50, seed, 1.0)?;
        let (a, b) = (unit(&mut rng, 50), unit(&mut rng, 50));
        for n in [4, 8, 16] {
            worst = worst.max((m.smatrix_pipeline(&a, &b, n, 1e-11)? - m.smatrix_oracle(&a, &b, n)).norm());
        }
    }
    let fried = MockModel::friedrichs(50, 0.15, 1.0)?;
    let exact = fried.exact_t_matrix(0.25)?;
    let psi = fried.packet(0.25, 0.02);
    let r = fried.extract_transition(&psi, &psi, 128, 1e-11)?;
    let terr = (r.t_matrix - exact).norm() / exact.norm();
    Ok((
        worst <= 1e-8 && terr < 0.01,
        format!("pipeline vs diagonalization {worst:.3e} (bound 1e-8), T at width 0.02 off by {:.3}% (bound 1%)", 100.0 * terr),
    ))
}

fn random_leg(rng: &mut ChaCha8Rng) -> (WavePacket3, TimeProfile) {
    let c = [rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4)];
    let p = WavePacket3::new(c, rng.gen_range(0.08..0.3), Complex64::from_polar(1.0, rng.gen_range(0.0..6.0))).unwrap();
    let hw = rng.gen_range(0.05..0.3);
    (p, TimeProfile::new(hw + rng.gen_range(0.1..1.5), hw).unwrap())
}

fn quadrature_fidelity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (f, g) = (random_leg(&mut rng), random_leg(&mut rng));
        let v = one_particle_overlap((&f.0, &f.1), (&g.0, &g.1), 1.0)?;
        let o = one_particle_cartesian((&f.0, &f.1), (&g.0, &g.1), 1.0, 121, 10.0);
        worst = worst.max((v - o).norm() / o.norm());
    }
    let ip = InnerProduct::new(FourPointModel::default_interacting(1.0)?, QuadratureConfig::default());
    let mut states = random_two_point_family(&mut rng, 4);
    let (p, h) = random_leg(&mut rng);
    states.push(EuclideanTestFunction::one_point(p, h)?);
    let betas = [0.0, 0.5, 1.0, 2.0];
    let (mut monotone, mut schwarz) = (true, true);
    for f in &states {
        let v: Vec<f64> = betas.iter().map(|&b| heat_matrix_element(&ip, f, f, b).map(|z| z.re)).collect::<Result<_, _>>()?;
        monotone &= v.iter().all(|x| *x > 0.0) && v.windows(2).all(|w| w[1] < w[0]);
        for (k, &b) in betas.iter().enumerate().skip(1) {
            let d = heat_matrix_element(&ip, f, f, 2.0 * b)?.re;
            schwarz &= d * v[0] >= v[k] * v[k];
        }
    }
    Ok((
        worst <= 1e-8 && monotone && schwarz,
        format!("overlap vs Cartesian oracle {worst:.3e} (bound 1e-8), heat monotone={monotone}, Cauchy-Schwarz={schwarz}"),
    ))
}

fn spin_suite() -> Outcome {
    let dir = tempfile::tempdir()?;
    let r = run_suite(Command::SpinCheck, &ExperimentConfig::default(), dir.path())?;
    let s = &r.summary;
    let spin = read_json(&dir.path().join("spin.json"));
    let certs = spin["certificates"].as_array().unwrap();
    let two_j: Vec<u64> = certs.iter().map(|c| c["two_j"].as_u64().unwrap()).collect();
    let certs_pass = two_j == [0, 1, 2] && certs.iter().all(|c| c["pass"] == true);
    let counter_fails = spin["counterexample"]["pass"] == false;
    let eig = s["min_relative_eigenvalue"].as_f64().unwrap();
    let boost = s["boost_error"].as_f64().unwrap();
    let rep = s["representation_error"].as_f64().unwrap();
    Ok((
        eig > 0.0 && boost <= 1e-12 && rep <= 1e-10 && certs_pass && counter_fails,
        format!(
            "min eig/|D| {eig:.2e}, |BB^dag - sigma.p/m| {boost:.1e} (bound 1e-12), D(AB) - D(A)D(B) {rep:.1e} (bound 1e-10), j in {{0, 1/2, 1}} pass={certs_pass}, counterexample rejected={counter_fails}"
        ),
    ))
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn determinism() -> Outcome {
    let cfg = repo().join("configs/quick.ini");
    let mut differing = Vec::new();
    let mut count = 0;
    for c in ["rp-check", "norm", "heat", "cook", "smatrix", "spin-check"] {
        let runs: Vec<Vec<(String, Vec<u8>)>> = ["1", "3"]
            .iter()
            .map(|t| {
                let out = tempfile::tempdir().unwrap();
                std::process::Command::new(env!("CARGO_BIN_EXE_euclid-rp"))
                    .args([c, "--seed", "7", "--threads", t, "--config"])
                    .arg(&cfg)
                    .arg("--out")
                    .arg(out.path())
                    .output()
                    .unwrap();
                files(out.path())
            })
            .collect();
        count += runs[0].len();
        if runs[0].is_empty() || runs[0] != runs[1] {
            differing.push(c);
        }
    }
    Ok((
        differing.is_empty(),
        format!("{count} files from 6 suites at --threads 1 and 3, differing suites {differing:?}"),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("reflection positivity", reflection_positivity),
        ("positivity falsification", positivity_falsification),
        ("Chebyshev accuracy", chebyshev_accuracy),
        ("Cook decay", cook_decay),
        ("free theory S = I", free_identity),
        ("mock oracle equivalence", mock_oracle),
        ("one-particle quadrature fidelity", quadrature_fidelity),
        ("spin suite", spin_suite),
        ("determinism", determinism),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let (ok, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        println!("criterion {id} {} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
