//! Experiment suites behind the command-line tool.
//!
//! Each suite reads an [`ExperimentConfig`], writes `results.json` plus its
//! own tables into the output directory and reports whether every verdict
//! passed. Nothing that depends on the thread count or the wall clock is
//! written, so equal configurations give byte-identical files.

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::evolve::chebyshev::{chebyshev_approx, CERTIFICATION_POINTS};
use crate::evolve::heat_matrix_element;
use crate::green_models::{check_kernel_positivity, kernel_spectrum, FourPointModel};
use crate::hilbert::oracle::one_particle_cartesian;
use crate::hilbert::{
    one_particle_overlap_with, random_two_point_family, EuclideanTestFunction, InnerProduct, TimeProfile, WavePacket3,
};
use crate::io::{chebyshev_csv, csv_table, family_text, gram_csv, write_json, write_text};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect, CMatrix};
use crate::quadrature::{SphericalRule, Vec3};
use crate::scatter::mock::{CVector, MockModel};
use crate::scatter::{
    cook_scan_with_fast, disconnected_cancellation, extract_transition, fit_decay, free_overlap, geometric_grid,
    inject, smatrix_element,
};
use crate::spin::{
    canonical_boost, random_spin_family, sigma_dot_p, spin_rp_certificate_with, wigner_d, wigner_d_matrix,
    FourMomentum, Sl2cMatrix, SpinKernelKind,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    RpCheck,
    Norm,
    Heat,
    Cook,
    Smatrix,
    SpinCheck,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::RpCheck,
        Command::Norm,
        Command::Heat,
        Command::Cook,
        Command::Smatrix,
        Command::SpinCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::RpCheck => "rp-check",
            Command::Norm => "norm",
            Command::Heat => "heat",
            Command::Cook => "cook",
            Command::Smatrix => "smatrix",
            Command::SpinCheck => "spin-check",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command `{s}`")))
    }
}

/// Command-line settings that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub pass: bool,
    pub verdicts: Vec<Verdict>,
    pub summary: Value,
    pub parameters: ExperimentConfig,
}

struct Suite {
    verdicts: Vec<Verdict>,
    summary: serde_json::Map<String, Value>,
}

impl Suite {
    fn new() -> Self {
        Self {
            verdicts: Vec::new(),
            summary: serde_json::Map::new(),
        }
    }

    fn verdict(&mut self, name: &str, pass: bool) {
        self.verdicts.push(Verdict { name: name.into(), pass });
    }

    fn put(&mut self, key: &str, v: Value) {
        self.summary.insert(key.into(), v);
    }

    fn finish(self, command: Command, cfg: &ExperimentConfig) -> Report {
        Report {
            command: command.name(),
            pass: self.verdicts.iter().all(|v| v.pass),
            verdicts: self.verdicts,
            summary: Value::Object(self.summary),
            parameters: cfg.clone(),
        }
    }
}

/// Loads the config, applies overrides, runs the suite in a pool of the
/// requested size and maps the outcome to an exit code.
pub fn run(command: Command, config_path: &Path, overrides: &Overrides) -> i32 {
    let outcome = (|| -> Result<Report> {
        let mut cfg = ExperimentConfig::load(config_path)?;
        if let Some(seed) = overrides.seed {
            cfg.output.seed = seed;
        }
        let out = overrides.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(k) = overrides.threads {
            if k == 0 {
                return Err(Error::Config("--threads must be at least 1".into()));
            }
            pool = pool.num_threads(k);
        }
        let pool = pool.build().map_err(|e| Error::Config(e.to_string()))?;
        pool.install(|| run_suite(command, &cfg, &out))
    })();
    match outcome {
        Ok(r) => {
            for v in &r.verdicts {
                println!("{:<4} {}", if v.pass { "ok" } else { "FAIL" }, v.name);
            }
            if r.pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

/// Runs one suite and writes its artifacts into `out`.
pub fn run_suite(command: Command, cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    std::fs::create_dir_all(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    let report = match command {
        Command::RpCheck => rp_check(cfg, out)?,
        Command::Norm => norm(cfg, out)?,
        Command::Heat => heat(cfg, out)?,
        Command::Cook => cook(cfg, out)?,
        Command::Smatrix => smatrix(cfg, out)?,
        Command::SpinCheck => spin_check(cfg, out)?,
    };
    write_json(&out.join("results.json"), &report)?;
    Ok(report)
}

fn inner_product(cfg: &ExperimentConfig) -> Result<InnerProduct> {
    Ok(InnerProduct::new(cfg.four_point_model()?, cfg.quadrature()))
}

fn rng(cfg: &ExperimentConfig, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.output.seed);
    r.set_stream(stream);
    r
}

/// Two-point functions straddling `p_z = 0`, where a sign-flipped kernel
/// factor changes sign.
pub fn probe_family() -> Vec<EuclideanTestFunction> {
    let f = |z: f64| {
        EuclideanTestFunction::two_point(
            WavePacket3::gaussian([0.0, 0.0, -z], 0.15).unwrap(),
            TimeProfile::new(0.5, 0.2).unwrap(),
            WavePacket3::gaussian([0.0, 0.0, z], 0.15).unwrap(),
            TimeProfile::new(1.0, 0.2).unwrap(),
        )
        .unwrap()
    };
    vec![f(0.4), f(-0.4)]
}

fn kernel_grid(m: f64) -> Vec<(Vec3, f64)> {
    (0..8)
        .map(|i| ([0.1 * i as f64, 0.0, if i % 2 == 0 { 0.3 } else { -0.3 }], m))
        .collect()
}

fn rp_check(cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    let ip = inner_product(cfg)?;
    let h = &cfg.hilbert;
    let mut rng = rng(cfg, 1);
    let mut suite = Suite::new();
    let mut rows = Vec::new();
    let mut worst: Option<(f64, Vec<EuclideanTestFunction>, crate::hilbert::GramMatrix)> = None;
    let mut all_pass = true;
    let mut families: Vec<Vec<EuclideanTestFunction>> = (0..h.families)
        .map(|_| {
            let size = rng.gen_range(h.min_family_size..=h.max_family_size);
            random_two_point_family(&mut rng, size)
        })
        .collect();
    families.push(probe_family());
    let probe_index = families.len() - 1;
    let mut probe = json!(null);
    for (idx, fam) in families.into_iter().enumerate() {
        let g = ip.gram_matrix(&fam)?;
        let cert = g.certificate(h.tol_rp);
        let ratio = cert.min_eigenvalue / cert.max_eigenvalue;
        let defect = g.hermiticity_defect();
        rows.push(vec![idx as f64, fam.len() as f64, cert.min_eigenvalue, cert.max_eigenvalue, ratio, defect]);
        if idx == probe_index {
            probe = json!({"min_eigenvalue": cert.min_eigenvalue, "max_eigenvalue": cert.max_eigenvalue, "ratio": ratio});
            suite.verdict("probe family Gram matrix is positive", cert.pass);
        } else {
            all_pass &= cert.pass;
        }
        if worst.as_ref().map_or(true, |(r, _, _)| ratio < *r) {
            worst = Some((ratio, fam, g));
        }
    }
    suite.verdict("random family Gram matrices are positive", all_pass);
    let k = ip.model.connected.as_ref().expect("configured models carry a kernel");
    let fixed = ([0.0; 3], 0.5 * (cfg.model.lambda_min + cfg.model.lambda_max));
    let grid = kernel_grid(cfg.model.m1);
    let kmin = check_kernel_positivity(k, &grid, fixed)?;
    let kmax = *kernel_spectrum(k, &grid, fixed)?.last().unwrap();
    suite.verdict("kernel matrix is positive", kmin >= -h.tol_rp * kmax.abs());
    let (ratio, fam, g) = worst.unwrap();
    write_text(&out.join("gram.csv"), &gram_csv(&g))?;
    write_text(&out.join("family.txt"), &family_text(&fam))?;
    write_text(
        &out.join("rp.csv"),
        &csv_table(&["family", "size", "min_eigenvalue", "max_eigenvalue", "ratio", "hermiticity_defect"], &rows),
    )?;
    let min_ratio = rows[..probe_index].iter().map(|r| r[4]).fold(f64::INFINITY, f64::min);
    suite.put("kernel", json!(cfg.model.kernel));
    suite.put("families", json!(probe_index));
    suite.put("min_ratio_random", json!(min_ratio));
    suite.put("worst_ratio", json!(ratio));
    suite.put("probe", probe);
    suite.put("kernel_min_eigenvalue", json!(kmin));
    suite.put("kernel_max_eigenvalue", json!(kmax));
    Ok(suite.finish(Command::RpCheck, cfg))
}

fn random_leg(rng: &mut ChaCha8Rng) -> (WavePacket3, TimeProfile) {
    let c = [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)];
    let phase = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    let p = WavePacket3::new(c, rng.gen_range(0.1..0.3), phase).unwrap();
    let hw = rng.gen_range(0.1..0.3);
    let h = TimeProfile::new(hw + rng.gen_range(0.2..1.0), hw).unwrap();
    (p, h)
}

fn norm(cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    let h = &cfg.hilbert;
    let m = cfg.model.m1;
    let quad = cfg.quadrature();
    let mut rng = rng(cfg, 2);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for k in 0..h.oracle_pairs {
        let (f, g) = (random_leg(&mut rng), random_leg(&mut rng));
        let v = one_particle_overlap_with((&f.0, &f.1), (&g.0, &g.1), m, &quad)?;
        let o = one_particle_cartesian((&f.0, &f.1), (&g.0, &g.1), m, h.oracle_points, 10.0);
        let rel = (v - o).norm() / o.norm();
        worst = worst.max(rel);
        rows.push(vec![k as f64, v.re, v.im, o.re, o.im, rel]);
    }
    write_text(
        &out.join("norm.csv"),
        &csv_table(&["pair", "overlap_re", "overlap_im", "oracle_re", "oracle_im", "relative_error"], &rows),
    )?;
    let mut suite = Suite::new();
    suite.verdict("one-particle overlap matches the Cartesian oracle", worst <= h.oracle_tolerance);
    suite.put("pairs", json!(h.oracle_pairs));
    suite.put("max_relative_error", json!(worst));
    Ok(suite.finish(Command::Norm, cfg))
}

fn heat(cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    let ip = inner_product(cfg)?;
    let h = &cfg.hilbert;
    let mut rng = rng(cfg, 3);
    let mut states = random_two_point_family(&mut rng, h.heat_states);
    let (p, t) = random_leg(&mut rng);
    states.push(EuclideanTestFunction::one_point(p, t)?);
    let mut rows = Vec::new();
    let (mut monotone, mut schwarz) = (true, true);
    for (s, f) in states.iter().enumerate() {
        let values: Vec<Complex64> = h
            .heat_betas
            .iter()
            .map(|&b| heat_matrix_element(&ip, f, f, b))
            .collect::<Result<_>>()?;
        let n0 = ip.norm_squared(f)?;
        for (b, v) in h.heat_betas.iter().zip(&values) {
            let doubled = heat_matrix_element(&ip, f, f, 2.0 * b)?.re;
            rows.push(vec![s as f64, *b, v.re, v.im, doubled]);
            monotone &= v.re > 0.0 && v.im.abs() <= 1e-12 * v.re;
            schwarz &= doubled * n0 >= v.re * v.re * (1.0 - 1e-12);
        }
        monotone &= values.windows(2).all(|w| w[1].re <= w[0].re);
    }
    write_text(&out.join("heat.csv"), &csv_table(&["state", "beta", "value_re", "value_im", "value_at_2beta"], &rows))?;
    let mut cheb_rows = Vec::new();
    let mut certified = true;
    for n in 1..=h.chebyshev_n_max {
        let a = chebyshev_approx(n, h.chebyshev_epsilon)?;
        let c = a.certify(CERTIFICATION_POINTS, cfg.output.seed.wrapping_add(n as u64));
        certified &= a.sup_error < h.chebyshev_epsilon && c < h.chebyshev_epsilon;
        cheb_rows.push(vec![n as f64, a.degree as f64, a.sup_error, c]);
    }
    write_text(
        &out.join("cheb_cert.csv"),
        &csv_table(&["n", "degree", "sup_error", "certified_error"], &cheb_rows),
    )?;
    let mut suite = Suite::new();
    suite.verdict("heat matrix elements are positive and decreasing", monotone);
    suite.verdict("Cauchy-Schwarz spectral inequality holds", schwarz);
    suite.verdict("Chebyshev fits certified on an independent grid", certified);
    suite.put("states", json!(states.len()));
    suite.put("max_certified_error", json!(cheb_rows.iter().map(|r| r[3]).fold(0.0, f64::max)));
    suite.put("degrees", json!(cheb_rows.iter().map(|r| r[1] as usize).collect::<Vec<_>>()));
    Ok(suite.finish(Command::Heat, cfg))
}

fn cook(cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    let s = &cfg.scatter;
    let model = cfg.four_point_model()?;
    let state = cfg.scattering_state(s.k0, s.width)?;
    let times = geometric_grid(s.t_start, s.t_stop, s.t_points)?;
    if times.len() < 8 || s.t_start < 10.0 {
        return Err(Error::Config(format!(
            "[scatter] a decay fit needs t_points >= 8 and t_start >= 10, got {} points from {}",
            s.t_points, s.t_start
        )));
    }
    let cc = cfg.cook_config();
    let scan = cook_scan_with_fast(&state, &model, &times, &cc)?;
    let fit = fit_decay(scan.samples.clone())?;
    let cancel = disconnected_cancellation(&state, &model, 0.0, &cc)?;
    let rows: Vec<Vec<f64>> = scan
        .samples
        .iter()
        .zip(&scan.fast)
        .map(|(x, f)| vec![x.t, x.integrand_value, *f, f / x.integrand_value])
        .collect();
    let worst = rows.iter().map(|r| (r[3] - 1.0).abs()).fold(0.0, f64::max);
    write_text(&out.join("cook.csv"), &csv_table(&["t", "integrand", "fast", "fast_over_full"], &rows))?;
    let mut suite = Suite::new();
    suite.verdict("decay exponent within 0.1 of -3/2", (fit.slope + 1.5).abs() <= 0.1);
    suite.verdict("reduced form agrees pointwise", worst <= s.fast_tolerance);
    suite.verdict("disconnected part cancels", cancel.ratio <= 1e-8);
    suite.put("fit", serde_json::to_value(&fit).map_err(|e| Error::Io(e.to_string()))?);
    suite.put("max_fast_deviation", json!(worst));
    suite.put("momentum_volume", json!(scan.momentum_volume));
    suite.put("cancellation", serde_json::to_value(cancel).map_err(|e| Error::Io(e.to_string()))?);
    Ok(suite.finish(Command::Cook, cfg))
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> CVector {
    let v = CVector::from_fn(dim, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    v.unscale(v.norm())
}

fn smatrix(cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    let s = &cfg.scatter;
    let mut suite = Suite::new();

    let free = InnerProduct::new(FourPointModel::free(cfg.model.m1, cfg.model.m2)?, cfg.quadrature());
    let f = cfg.scattering_state(s.k0, s.width)?;
    let i = cfg.scattering_state(1.25 * s.k0, 0.875 * s.width)?;
    let overlap = free_overlap(&free, &f, &i)?;
    let nf = free.norm_squared(&inject(&f)?)?.sqrt();
    let ni = free.norm_squared(&inject(&i)?)?.sqrt();
    let mut free_dev: f64 = 0.0;
    for &n in &s.n {
        let v = smatrix_element(&free, &f, &i, n, s.beta, s.epsilon)?;
        free_dev = free_dev.max((v - overlap).norm() / (nf * ni));
    }
    suite.verdict("free theory S equals the identity", free_dev <= s.epsilon);
    suite.put("free_max_relative_deviation", json!(free_dev));

    let mut rng = rng(cfg, 4);
    let mut mock_dev: f64 = 0.0;
    for k in 0..s.mock_seeds {
        let m = MockModel::random(s.mock_dim, cfg.output.seed.wrapping_add(k as u64), s.mock_beta)?;
        let (a, b) = (unit_vector(&mut rng, s.mock_dim), unit_vector(&mut rng, s.mock_dim));
        for &n in &s.n {
            let d = (m.smatrix_pipeline(&a, &b, n, s.mock_epsilon)? - m.smatrix_oracle(&a, &b, n)).norm();
            mock_dev = mock_dev.max(d);
        }
    }
    suite.verdict("mock pipeline matches diagonalization", mock_dev <= 1e-8);
    suite.put("mock_max_deviation", json!(mock_dev));

    let fried = MockModel::friedrichs(s.mock_dim, s.mock_coupling, s.mock_beta)?;
    let exact = fried.exact_t_matrix(s.mock_energy)?;
    let mut widths = Vec::new();
    for &w in &s.mock_widths {
        let psi = fried.packet(s.mock_energy, w);
        let r = fried.extract_transition(&psi, &psi, s.mock_n, s.mock_epsilon)?;
        widths.push(json!({"width": w, "t_re": r.t_matrix.re, "t_im": r.t_matrix.im,
            "relative_error": (r.t_matrix - exact).norm() / exact.norm()}));
    }
    let narrowest = s
        .mock_widths
        .iter()
        .zip(&widths)
        .min_by(|a, b| a.0.total_cmp(b.0))
        .map(|(_, v)| v["relative_error"].as_f64().unwrap_or(f64::INFINITY))
        .unwrap_or(f64::INFINITY);
    suite.verdict("mock transition recovers the exact T within 1%", narrowest < 0.01);
    suite.put("mock_exact_t", json!({"re": exact.re, "im": exact.im}));
    suite.put("mock_transition", Value::Array(widths));

    let ip = inner_product(cfg)?;
    let state = cfg.scattering_state(s.transition_k0, s.transition_width)?;
    let r = extract_transition(&ip, &state, &state, s.transition_n, s.beta, s.epsilon, s.eta)?;
    write_json(&out.join("transition.json"), &r)?;
    write_text(&out.join("cheb.csv"), &chebyshev_csv(&chebyshev_approx(s.transition_n, s.epsilon)?))?;
    suite.put("transition", serde_json::to_value(r).map_err(|e| Error::Io(e.to_string()))?);
    Ok(suite.finish(Command::Smatrix, cfg))
}

fn random_sl2c(rng: &mut ChaCha8Rng) -> Sl2cMatrix {
    loop {
        let mut z = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let m = nalgebra::Matrix2::new(z(), z(), z(), z());
        if let Ok(a) = Sl2cMatrix::normalized(m) {
            if m.determinant().norm() > 1e-3 {
                return a;
            }
        }
    }
}

fn spin_check(cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    let sp = &cfg.spin;
    let mut rng = rng(cfg, 5);
    let mut suite = Suite::new();
    let mut min_eigenvalue = f64::INFINITY;
    let (mut boost_err, mut rep_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..sp.momenta {
        // |p| <= 2m keeps D^4 well inside double-precision conditioning.
        let m = rng.gen_range(0.5..2.0);
        let p = loop {
            let u: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            if u.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                break [2.0 * m * u[0], 2.0 * m * u[1], 2.0 * m * u[2]];
            }
        };
        let k = FourMomentum::on_shell(m, p)?;
        let sp_mat = sigma_dot_p(&k)?;
        for two_j in 0..=sp.two_j_max.min(8) {
            let d = wigner_d_matrix(&sp_mat, two_j)?.matrix;
            let scale = d.norm();
            let e = if hermiticity_defect(&d) <= 1e-12 * scale { hermitian_eigenvalues(&d)[0] / scale } else { -1.0 };
            min_eigenvalue = min_eigenvalue.min(e);
        }
        let b = canonical_boost(m, p)?;
        let bb = b.0 * b.0.adjoint();
        boost_err = boost_err.max((bb - sp_mat / Complex64::new(m, 0.0)).norm());
        let (a1, a2) = (random_sl2c(&mut rng), random_sl2c(&mut rng));
        for two_j in 0..=sp.two_j_max.min(8) {
            let lhs = wigner_d(&a1.mul(&a2), two_j)?.matrix;
            let rhs: CMatrix = wigner_d(&a1, two_j)?.matrix * wigner_d(&a2, two_j)?.matrix;
            rep_err = rep_err.max((lhs - &rhs).norm() / rhs.norm().max(1.0));
        }
    }
    suite.verdict("D^j(sigma.p) is positive definite", min_eigenvalue > 0.0);
    suite.verdict("B B^dagger equals sigma.p / m", boost_err <= 1e-12);
    suite.verdict("Wigner D is multiplicative", rep_err <= 1e-10);
    let rule = SphericalRule::new(cfg.hilbert.radial_nodes, cfg.hilbert.polar_nodes, cfg.hilbert.azimuthal_nodes);
    let mut certs = Vec::new();
    let mut all = true;
    for &two_j in &sp.two_j {
        let fam = random_spin_family(&mut rng, sp.family_size, sp.kernel.components(two_j));
        let c = spin_rp_certificate_with(&fam, sp.mass, two_j, sp.kernel, rule)?;
        all &= c.pass;
        certs.push(c);
    }
    suite.verdict("spin Gram matrices are positive", all);
    let fam = random_spin_family(&mut rng, sp.family_size, 2);
    let counter = spin_rp_certificate_with(&fam, sp.mass, 1, SpinKernelKind::FlippedEnergy, rule)?;
    suite.verdict("indefinite counterexample is rejected", !counter.pass);
    write_json(&out.join("spin.json"), &json!({"certificates": certs, "counterexample": counter}))?;
    suite.put("min_relative_eigenvalue", json!(min_eigenvalue));
    suite.put("boost_error", json!(boost_err));
    suite.put("representation_error", json!(rep_err));
    Ok(suite.finish(Command::SpinCheck, cfg))
}

