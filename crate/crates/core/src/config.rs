//! Experiment configuration: flat INI sections with typed values.
//!
//! ```text
//! [model]
//! m1 = 1.0
//! kernel = separable
//! [scatter]
//! n = 4, 8, 16
//! ```
//!
//! Every key has a default, so an empty file is a complete configuration.
//! Unknown sections or keys, duplicates and type mismatches are rejected
//! with the offending line number.

use crate::error::{Error, Result};
use crate::green_models::{ConnectedKernel, FourPointModel, TwoPointModel};
use crate::hilbert::{QuadratureConfig, TimeProfile};
use crate::quadrature::SphericalRule;
use crate::scatter::{AsymptoticState, CookConfig};
use crate::spin::SpinKernelKind;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Int,
    Float,
    Str,
    FloatList,
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Int(i64),
    Float(f64),
    Str(String),
    FloatList(Vec<f64>),
}

const SCHEMA: &[(&str, &[(&str, Kind)])] = &[
    (
        "model",
        &[
            ("m1", Kind::Float),
            ("m2", Kind::Float),
            ("coupling", Kind::Float),
            ("cutoff", Kind::Float),
            ("lambda_min", Kind::Float),
            ("lambda_max", Kind::Float),
            ("mc_nodes", Kind::Int),
            ("kernel", Kind::Str),
        ],
    ),
    (
        "hilbert",
        &[
            ("families", Kind::Int),
            ("min_family_size", Kind::Int),
            ("max_family_size", Kind::Int),
            ("radial_nodes", Kind::Int),
            ("polar_nodes", Kind::Int),
            ("azimuthal_nodes", Kind::Int),
            ("sigmas", Kind::Float),
            ("tol_rp", Kind::Float),
            ("oracle_pairs", Kind::Int),
            ("oracle_points", Kind::Int),
            ("oracle_tolerance", Kind::Float),
            ("heat_betas", Kind::FloatList),
            ("heat_states", Kind::Int),
            ("chebyshev_n_max", Kind::Int),
            ("chebyshev_epsilon", Kind::Float),
        ],
    ),
    (
        "scatter",
        &[
            ("n", Kind::FloatList),
            ("beta", Kind::Float),
            ("epsilon", Kind::Float),
            ("t_start", Kind::Float),
            ("t_stop", Kind::Float),
            ("t_points", Kind::Int),
            ("eta", Kind::Float),
            ("k0", Kind::Float),
            ("width", Kind::Float),
            ("profile1_center", Kind::Float),
            ("profile2_center", Kind::Float),
            ("profile_half_width", Kind::Float),
            ("cook_grid", Kind::Str),
            ("fast_tolerance", Kind::Float),
            ("transition_k0", Kind::Float),
            ("transition_width", Kind::Float),
            ("transition_n", Kind::Int),
            ("mock_dim", Kind::Int),
            ("mock_seeds", Kind::Int),
            ("mock_beta", Kind::Float),
            ("mock_epsilon", Kind::Float),
            ("mock_n", Kind::Int),
            ("mock_energy", Kind::Float),
            ("mock_coupling", Kind::Float),
            ("mock_widths", Kind::FloatList),
        ],
    ),
    (
        "spin",
        &[
            ("two_j", Kind::FloatList),
            ("two_j_max", Kind::Int),
            ("mass", Kind::Float),
            ("family_size", Kind::Int),
            ("momenta", Kind::Int),
            ("kernel", Kind::Str),
        ],
    ),
    ("output", &[("dir", Kind::Str), ("seed", Kind::Int)]),
];

fn kind_of(section: &str, key: &str) -> Option<Kind> {
    SCHEMA
        .iter()
        .find(|(s, _)| *s == section)
        .and_then(|(_, keys)| keys.iter().find(|(k, _)| *k == key).map(|(_, t)| *t))
}

fn parse_value(kind: Kind, raw: &str) -> std::result::Result<Value, String> {
    let float = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", s.trim()));
    match kind {
        Kind::Int => raw
            .parse::<i64>()
            .map(Value::Int)
            .map_err(|_| format!("`{raw}` is not an integer")),
        Kind::Float => float(raw).map(Value::Float),
        Kind::Str => {
            let s = raw.trim_matches('"');
            if s.is_empty() {
                Err("empty string".into())
            } else {
                Ok(Value::Str(s.to_string()))
            }
        }
        Kind::FloatList => {
            let inner = raw.trim_start_matches('[').trim_end_matches(']');
            if inner.trim().is_empty() {
                return Err("empty list".into());
            }
            inner.split(',').map(float).collect::<std::result::Result<_, _>>().map(Value::FloatList)
        }
    }
}

/// Parsed key-value entries with their source lines.
#[derive(Debug, Default)]
struct Entries {
    map: BTreeMap<(String, String), (Value, usize)>,
}

fn parse_entries(text: &str) -> Result<Entries> {
    let mut out = Entries::default();
    let mut section: Option<String> = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::Config(format!("line {lineno}: unterminated section header")))?
                .trim();
            if !SCHEMA.iter().any(|(s, _)| *s == name) {
                return Err(Error::Config(format!("line {lineno}: unknown section [{name}]")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, raw) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {lineno}: expected `key = value`")))?;
        let (key, raw) = (key.trim(), raw.trim());
        let sec = section
            .as_deref()
            .ok_or_else(|| Error::Config(format!("line {lineno}: key `{key}` outside any section")))?;
        let kind =
            kind_of(sec, key).ok_or_else(|| Error::Config(format!("line {lineno}: unknown key `{key}` in [{sec}]")))?;
        let value = parse_value(kind, raw).map_err(|e| Error::Config(format!("line {lineno}: [{sec}] {key}: {e}")))?;
        let slot = (sec.to_string(), key.to_string());
        if let Some((_, first)) = out.map.get(&slot) {
            return Err(Error::Config(format!(
                "line {lineno}: duplicate key `{key}` in [{sec}], first set on line {first}"
            )));
        }
        out.map.insert(slot, (value, lineno));
    }
    Ok(out)
}

impl Entries {
    fn get(&self, sec: &str, key: &str) -> Option<&(Value, usize)> {
        self.map.get(&(sec.to_string(), key.to_string()))
    }

    fn float(&self, sec: &str, key: &str, default: f64) -> f64 {
        match self.get(sec, key) {
            Some((Value::Float(v), _)) => *v,
            _ => default,
        }
    }

    fn int(&self, sec: &str, key: &str, default: i64) -> i64 {
        match self.get(sec, key) {
            Some((Value::Int(v), _)) => *v,
            _ => default,
        }
    }

    fn string(&self, sec: &str, key: &str, default: &str) -> String {
        match self.get(sec, key) {
            Some((Value::Str(v), _)) => v.clone(),
            _ => default.to_string(),
        }
    }

    fn list(&self, sec: &str, key: &str, default: &[f64]) -> Vec<f64> {
        match self.get(sec, key) {
            Some((Value::FloatList(v), _)) => v.clone(),
            _ => default.to_vec(),
        }
    }

    fn line(&self, sec: &str, key: &str) -> String {
        self.get(sec, key).map_or("default".into(), |(_, l)| format!("line {l}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelChoice {
    Separable,
    Broken,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSection {
    pub m1: f64,
    pub m2: f64,
    pub coupling: f64,
    pub cutoff: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub mc_nodes: usize,
    pub kernel: KernelChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HilbertSection {
    pub families: usize,
    pub min_family_size: usize,
    pub max_family_size: usize,
    pub radial_nodes: usize,
    pub polar_nodes: usize,
    pub azimuthal_nodes: usize,
    pub sigmas: f64,
    pub tol_rp: f64,
    pub oracle_pairs: usize,
    pub oracle_points: usize,
    pub oracle_tolerance: f64,
    pub heat_betas: Vec<f64>,
    pub heat_states: usize,
    pub chebyshev_n_max: u32,
    pub chebyshev_epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CookGrid {
    Default,
    Coarse,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterSection {
    pub n: Vec<u32>,
    pub beta: f64,
    pub epsilon: f64,
    pub t_start: f64,
    pub t_stop: f64,
    pub t_points: usize,
    pub eta: f64,
    pub k0: f64,
    pub width: f64,
    pub profile1_center: f64,
    pub profile2_center: f64,
    pub profile_half_width: f64,
    pub cook_grid: CookGrid,
    pub fast_tolerance: f64,
    pub transition_k0: f64,
    pub transition_width: f64,
    pub transition_n: u32,
    pub mock_dim: usize,
    pub mock_seeds: usize,
    pub mock_beta: f64,
    pub mock_epsilon: f64,
    pub mock_n: u32,
    pub mock_energy: f64,
    pub mock_coupling: f64,
    pub mock_widths: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinSection {
    pub kernel: SpinKernelKind,
    pub two_j: Vec<u32>,
    pub two_j_max: u32,
    pub mass: f64,
    pub family_size: usize,
    pub momenta: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSection {
    /// Not echoed into results, so that runs into different directories
    /// produce identical files.
    #[serde(skip)]
    pub dir: String,
    pub seed: u64,
}

/// Validated configuration of every experiment suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    pub hilbert: HilbertSection,
    pub scatter: ScatterSection,
    pub spin: SpinSection,
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::parse("").expect("defaults validate")
    }
}

struct Checker<'a> {
    e: &'a Entries,
    errors: Vec<String>,
}

impl Checker<'_> {
    fn require(&mut self, ok: bool, sec: &str, key: &str, value: impl std::fmt::Display, constraint: &str) {
        if !ok {
            self.errors
                .push(format!("{} [{sec}] {key} = {value}: {constraint}", self.e.line(sec, key)));
        }
    }

    fn count(&mut self, sec: &str, key: &str, default: i64, min: i64) -> usize {
        let v = self.e.int(sec, key, default);
        self.require(v >= min, sec, key, v, &format!("must be >= {min}"));
        v.max(min) as usize
    }

    fn positive(&mut self, sec: &str, key: &str, default: f64) -> f64 {
        let v = self.e.float(sec, key, default);
        self.require(v > 0.0 && v.is_finite(), sec, key, v, "must be positive");
        v
    }

    fn integers(&mut self, sec: &str, key: &str, default: &[f64], min: f64, max: f64) -> Vec<u32> {
        let v = self.e.list(sec, key, default);
        let ok = v.iter().all(|x| x.fract() == 0.0 && *x >= min && *x <= max);
        self.require(ok, sec, key, format!("{v:?}"), &format!("entries must be integers in [{min}, {max}]"));
        v.iter().map(|x| x.clamp(min, max) as u32).collect()
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let e = parse_entries(text)?;
        let mut c = Checker { e: &e, errors: Vec::new() };

        let m1 = c.positive("model", "m1", 1.0);
        let m2 = c.positive("model", "m2", 1.0);
        let coupling = e.float("model", "coupling", 1.0);
        c.require(coupling >= 0.0 && coupling.is_finite(), "model", "coupling", coupling, "must be >= 0");
        let cutoff = c.positive("model", "cutoff", 1.0);
        let lambda_min = e.float("model", "lambda_min", 2.2);
        c.require(lambda_min > m1 + m2, "model", "lambda_min", lambda_min, &format!("must exceed m1 + m2 = {}", m1 + m2));
        let lambda_max = e.float("model", "lambda_max", lambda_min + 4.0);
        c.require(lambda_max > lambda_min, "model", "lambda_max", lambda_max, "must exceed lambda_min");
        let mc_nodes = c.count("model", "mc_nodes", 32, 1);
        let kernel_name = e.string("model", "kernel", "separable");
        let kernel = match kernel_name.as_str() {
            "broken" => KernelChoice::Broken,
            other => {
                c.require(other == "separable", "model", "kernel", other, "must be `separable` or `broken`");
                KernelChoice::Separable
            }
        };
        if kernel == KernelChoice::Broken {
            c.require(m1 == m2, "model", "m2", m2, "the broken kernel needs m1 = m2");
        }

        let families = c.count("hilbert", "families", 50, 1);
        let min_family_size = c.count("hilbert", "min_family_size", 2, 1);
        let max_family_size = c.count("hilbert", "max_family_size", 12, 1);
        c.require(
            max_family_size >= min_family_size,
            "hilbert",
            "max_family_size",
            max_family_size,
            "must be >= min_family_size",
        );
        let radial_nodes = c.count("hilbert", "radial_nodes", 48, 1);
        let polar_nodes = c.count("hilbert", "polar_nodes", 24, 1);
        let azimuthal_nodes = c.count("hilbert", "azimuthal_nodes", 24, 1);
        let sigmas = c.positive("hilbert", "sigmas", 8.0);
        let tol_rp = c.positive("hilbert", "tol_rp", 1e-10);
        let oracle_pairs = c.count("hilbert", "oracle_pairs", 10, 1);
        let oracle_points = c.count("hilbert", "oracle_points", 121, 3);
        let oracle_tolerance = c.positive("hilbert", "oracle_tolerance", 1e-8);
        let heat_betas = e.list("hilbert", "heat_betas", &[0.0, 0.5, 1.0, 2.0]);
        let sorted = heat_betas.windows(2).all(|w| w[0] < w[1]) && heat_betas.iter().all(|b| *b >= 0.0);
        c.require(sorted, "hilbert", "heat_betas", format!("{heat_betas:?}"), "must be nonnegative and increasing");
        let heat_states = c.count("hilbert", "heat_states", 4, 1);
        let chebyshev_n_max = c.count("hilbert", "chebyshev_n_max", 10, 0) as u32;
        let chebyshev_epsilon = c.positive("hilbert", "chebyshev_epsilon", 1e-10);

        let n = c.integers("scatter", "n", &[4.0, 8.0, 16.0], 1.0, 4096.0);
        let beta = c.positive("scatter", "beta", 1.0);
        let epsilon = c.positive("scatter", "epsilon", 1e-8);
        let t_start = c.positive("scatter", "t_start", 20.0);
        let t_stop = e.float("scatter", "t_stop", 200.0);
        c.require(t_stop > t_start, "scatter", "t_stop", t_stop, "must exceed t_start");
        let t_points = c.count("scatter", "t_points", 12, 2);
        let eta = c.positive("scatter", "eta", crate::scatter::DEFAULT_ETA);
        let k0 = e.float("scatter", "k0", 0.2);
        let width = c.positive("scatter", "width", 0.4);
        let profile1_center = e.float("scatter", "profile1_center", 1.0);
        let profile2_center = e.float("scatter", "profile2_center", 2.0);
        let profile_half_width = c.positive("scatter", "profile_half_width", 0.25);
        let (lo1, hi1) = (profile1_center - profile_half_width, profile1_center + profile_half_width);
        let (lo2, hi2) = (profile2_center - profile_half_width, profile2_center + profile_half_width);
        c.require(lo1 > 0.0, "scatter", "profile1_center", profile1_center, "profile support must lie at positive time");
        c.require(lo2 > 0.0, "scatter", "profile2_center", profile2_center, "profile support must lie at positive time");
        c.require(
            hi1 < lo2 || hi2 < lo1,
            "scatter",
            "profile2_center",
            profile2_center,
            &format!("profile supports [{lo1}, {hi1}] and [{lo2}, {hi2}] must be disjoint"),
        );
        let cook_name = e.string("scatter", "cook_grid", "default");
        let cook_grid = match cook_name.as_str() {
            "coarse" => CookGrid::Coarse,
            other => {
                c.require(other == "default", "scatter", "cook_grid", other, "must be `default` or `coarse`");
                CookGrid::Default
            }
        };
        let fast_tolerance = c.positive("scatter", "fast_tolerance", 0.05);
        let transition_k0 = e.float("scatter", "transition_k0", 0.2);
        let transition_width = c.positive("scatter", "transition_width", 0.1);
        let transition_n = c.count("scatter", "transition_n", 4, 1) as u32;
        let mock_dim = c.count("scatter", "mock_dim", 50, 2);
        let mock_seeds = c.count("scatter", "mock_seeds", 10, 1);
        let mock_beta = c.positive("scatter", "mock_beta", 1.0);
        let mock_epsilon = c.positive("scatter", "mock_epsilon", 1e-11);
        let mock_n = c.count("scatter", "mock_n", 128, 1) as u32;
        let mock_energy = e.float("scatter", "mock_energy", 0.25);
        c.require(
            mock_energy > 0.0 && mock_energy < 0.5,
            "scatter",
            "mock_energy",
            mock_energy,
            "must lie inside the continuum (0, 0.5)",
        );
        let mock_coupling = e.float("scatter", "mock_coupling", 0.15);
        let mock_widths = e.list("scatter", "mock_widths", &[0.08, 0.04, 0.02]);
        c.require(
            mock_widths.iter().all(|w| *w > 0.0),
            "scatter",
            "mock_widths",
            format!("{mock_widths:?}"),
            "must be positive",
        );

        let two_j_max = c.count("spin", "two_j_max", 8, 0) as u32;
        let two_j = c.integers("spin", "two_j", &[0.0, 1.0, 2.0], 0.0, two_j_max as f64);
        let mass = c.positive("spin", "mass", 1.0);
        let family_size = c.count("spin", "family_size", 8, 1);
        let momenta = c.count("spin", "momenta", 100, 1);
        let spin_kernel_name = e.string("spin", "kernel", "covariant");
        let spin_kernel = match spin_kernel_name.as_str() {
            "doubled" => SpinKernelKind::Doubled,
            "flipped" => SpinKernelKind::FlippedEnergy,
            other => {
                c.require(other == "covariant", "spin", "kernel", other, "must be `covariant`, `doubled` or `flipped`");
                SpinKernelKind::Covariant
            }
        };

        let dir = e.string("output", "dir", "out");
        let seed = e.int("output", "seed", 42);
        c.require(seed >= 0, "output", "seed", seed, "must be >= 0");

        if !c.errors.is_empty() {
            return Err(Error::Config(c.errors.join("\n")));
        }
        Ok(Self {
            model: ModelSection {
                m1,
                m2,
                coupling,
                cutoff,
                lambda_min,
                lambda_max,
                mc_nodes,
                kernel,
            },
            hilbert: HilbertSection {
                families,
                min_family_size,
                max_family_size,
                radial_nodes,
                polar_nodes,
                azimuthal_nodes,
                sigmas,
                tol_rp,
                oracle_pairs,
                oracle_points,
                oracle_tolerance,
                heat_betas,
                heat_states,
                chebyshev_n_max,
                chebyshev_epsilon,
            },
            scatter: ScatterSection {
                n,
                beta,
                epsilon,
                t_start,
                t_stop,
                t_points,
                eta,
                k0,
                width,
                profile1_center,
                profile2_center,
                profile_half_width,
                cook_grid,
                fast_tolerance,
                transition_k0,
                transition_width,
                transition_n,
                mock_dim,
                mock_seeds,
                mock_beta,
                mock_epsilon,
                mock_n,
                mock_energy,
                mock_coupling,
                mock_widths,
            },
            spin: SpinSection {
                kernel: spin_kernel,
                two_j,
                two_j_max,
                mass,
                family_size,
                momenta,
            },
            output: OutputSection { dir, seed: seed as u64 },
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}:\n{msg}", path.display())),
            other => other,
        })
    }

    pub fn four_point_model(&self) -> Result<FourPointModel> {
        let m = &self.model;
        let k = match m.kernel {
            KernelChoice::Separable => {
                ConnectedKernel::separable_gaussian(m.coupling, m.m1, m.cutoff, m.lambda_min, m.lambda_max, m.mc_nodes)?
            }
            KernelChoice::Broken => {
                ConnectedKernel::broken(m.coupling, m.m1, m.cutoff, m.lambda_min, m.lambda_max, m.mc_nodes)?
            }
        };
        FourPointModel::new(TwoPointModel::new(m.m1)?, TwoPointModel::new(m.m2)?, Some(k))
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        let h = &self.hilbert;
        QuadratureConfig {
            one_particle: SphericalRule::new(h.radial_nodes, h.polar_nodes, h.azimuthal_nodes),
            one_particle_sigmas: h.sigmas,
            ..QuadratureConfig::default()
        }
    }

    pub fn cook_config(&self) -> CookConfig {
        match self.scatter.cook_grid {
            CookGrid::Default => CookConfig::default(),
            CookGrid::Coarse => CookConfig::coarse(),
        }
    }

    /// Head-on pair `(+k0 z, -k0 z)` with the configured packets and profiles.
    pub fn scattering_state(&self, k0: f64, width: f64) -> Result<AsymptoticState> {
        let s = &self.scatter;
        AsymptoticState::head_on(k0, width, self.model.m1)?.with_profiles(
            TimeProfile::new(s.profile1_center, s.profile_half_width)?,
            TimeProfile::new(s.profile2_center, s.profile_half_width)?,
        )
    }
}
