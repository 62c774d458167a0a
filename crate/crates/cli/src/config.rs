//! Run configuration: file loading, command-line overrides and validation.

use crate::error::{CliError, CliResult};
use relkac_core::estimator::{McParams, ProbeFunction, Sampler};
use relkac_core::fields::{FieldSpec, Gauge, ScalarPotential, VectorPotential};
use relkac_core::lattice::{Lattice, Variant};
use relkac_core::MassDim;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    pub vector: VectorPotential,
    pub scalar: ScalarPotential,
    pub gauge: Gauge,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self { vector: VectorPotential::Zero, scalar: ScalarPotential::Zero, gauge: Gauge::Zero }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub n: usize,
    pub length: f64,
    /// Oracle tolerance for `compare`; the free periodization study when absent.
    pub tolerance: Option<f64>,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { n: 256, length: 20.0, tolerance: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    pub radii: Vec<f64>,
    pub times: Vec<f64>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        let radii = (0..40).map(|k| 0.01 * 10f64.powf(k as f64 * 3.0 / 39.0)).collect();
        Self { radii, times: vec![0.1, 0.5, 1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    pub paths: usize,
    pub steps: usize,
    pub sampler: Sampler,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self { paths: 16, steps: 64, sampler: Sampler::Subordinated }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub mass: f64,
    pub dim: usize,
    pub variant: Variant,
    /// Evaluation point; the origin when absent.
    pub x: Option<Vec<f64>>,
    pub t: f64,
    pub field: FieldConfig,
    /// Initial data; a unit Gaussian at the origin when absent.
    pub probe: Option<ProbeFunction>,
    pub lattice: LatticeConfig,
    pub mc: McParams,
    pub kernel: KernelConfig,
    pub sample: SampleConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            mass: 1.0,
            dim: 1,
            variant: Variant::H1,
            x: None,
            t: 0.5,
            field: FieldConfig::default(),
            probe: None,
            lattice: LatticeConfig::default(),
            mc: McParams::default(),
            kernel: KernelConfig::default(),
            sample: SampleConfig::default(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub variant: Option<String>,
    pub field: Option<String>,
    pub potential: Option<String>,
    pub x: Option<Vec<f64>>,
    pub t: Option<f64>,
    pub mass: Option<f64>,
    pub dim: Option<usize>,
    pub paths: Option<usize>,
    pub slices: Option<usize>,
    pub cutoff: Option<f64>,
    pub grid: Option<(usize, f64)>,
}

/// Parses `N,L`.
pub fn parse_grid(s: &str) -> Result<(usize, f64), String> {
    let (n, l) = s.split_once(',').ok_or_else(|| format!("expected N,L, got '{s}'"))?;
    let n = n.trim().parse().map_err(|e| format!("bad N in '{s}': {e}"))?;
    let l = l.trim().parse().map_err(|e| format!("bad L in '{s}': {e}"))?;
    Ok((n, l))
}

/// Parses a comma-separated point.
pub fn parse_point(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|c| c.trim().parse::<f64>().map_err(|e| format!("bad coordinate '{c}': {e}"))).collect()
}

pub fn named_vector(name: &str, dim: usize) -> CliResult<VectorPotential> {
    Ok(match name {
        "zero" => VectorPotential::Zero,
        "constant" => VectorPotential::Constant { value: vec![0.5; dim] },
        "tanh" => VectorPotential::Tanh { amplitude: 1.0, scale: 1.0 },
        "quadratic" => VectorPotential::Quadratic { axis: dim - 1, coeff: 1.0 },
        "magnetic" => {
            if dim < 2 {
                return Err(CliError::Config("field 'magnetic' needs dim >= 2".into()));
            }
            let mut matrix = vec![vec![0.0; dim]; dim];
            matrix[0][1] = -0.25;
            matrix[1][0] = 0.25;
            VectorPotential::Linear { matrix }
        }
        other => return Err(CliError::Config(format!("unknown field '{other}' (zero, constant, tanh, quadratic, magnetic)"))),
    })
}

pub fn named_scalar(name: &str) -> CliResult<ScalarPotential> {
    Ok(match name {
        "zero" => ScalarPotential::Zero,
        "harmonic" => ScalarPotential::HarmonicCapped { coeff: 1.0, cap: 10.0 },
        "well" => ScalarPotential::GaussianWell { depth: 1.0, width: 1.0 },
        other => return Err(CliError::Config(format!("unknown potential '{other}' (zero, harmonic, well)"))),
    })
}

impl RunConfig {
    /// Reads TOML or JSON, chosen by extension; other extensions try JSON, then TOML.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
        match ext.as_str() {
            "toml" => Self::from_toml(&text),
            "json" => Self::from_json(&text),
            _ => Self::from_json(&text).or_else(|_| Self::from_toml(&text)),
        }
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid TOML config: {e}")))
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON config: {e}")))
    }

    pub fn apply(&mut self, o: &Overrides) -> CliResult<()> {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = o.dim {
            self.dim = d;
        }
        if let Some(v) = &o.variant {
            self.variant = Variant::parse(v).ok_or_else(|| CliError::Config(format!("unknown variant '{v}' (h0, h1, h2, h3, nr)")))?;
        }
        if let Some(f) = &o.field {
            self.field.vector = named_vector(f, self.dim)?;
        }
        if let Some(p) = &o.potential {
            self.field.scalar = named_scalar(p)?;
        }
        if let Some(x) = &o.x {
            self.x = Some(x.clone());
        }
        if let Some(t) = o.t {
            self.t = t;
        }
        if let Some(m) = o.mass {
            self.mass = m;
        }
        if let Some(n) = o.paths {
            self.mc.n_paths = n;
            self.sample.paths = n;
        }
        if let Some(n) = o.slices {
            self.mc.n_slices = n;
            self.mc.control_slices = 2 * n;
            self.sample.steps = n;
        }
        if let Some(e) = o.cutoff {
            self.mc.eps_cut = e;
        }
        if let Some((n, l)) = o.grid {
            self.lattice.n = n;
            self.lattice.length = l;
        }
        Ok(())
    }

    /// Fills the defaulted point and probe and checks every section.
    pub fn resolve(mut self) -> CliResult<Resolved> {
        let md = MassDim::new(self.mass, self.dim).map_err(|e| CliError::Config(e.to_string()))?;
        let x = self.x.get_or_insert_with(|| vec![0.0; self.dim]).clone();
        if x.len() != self.dim {
            return Err(CliError::Config(format!("x has {} coordinates, dim is {}", x.len(), self.dim)));
        }
        let probe = self.probe.get_or_insert_with(|| ProbeFunction::gaussian(vec![0.0; self.dim], 1.0)).clone();
        probe.validate(self.dim).map_err(|e| CliError::Config(e.to_string()))?;
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(CliError::Config(format!("t must be positive, got {}", self.t)));
        }
        let fs = FieldSpec::new(self.dim, self.field.vector.clone(), self.field.scalar.clone(), self.field.gauge.clone())
            .map_err(|e| CliError::Config(e.to_string()))?;
        if self.kernel.radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) || self.kernel.times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(CliError::Config("kernel radii must be >= 0 and times > 0".into()));
        }
        if self.sample.paths == 0 || self.sample.steps == 0 {
            return Err(CliError::Config("sample.paths and sample.steps must be positive".into()));
        }
        if let Some(tol) = self.lattice.tolerance {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(CliError::Config(format!("lattice.tolerance must be >= 0, got {tol}")));
            }
        }
        Ok(Resolved { md, fs, x, probe, config: self })
    }
}

/// A validated configuration with its derived objects.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub md: MassDim,
    pub fs: FieldSpec,
    pub x: Vec<f64>,
    pub probe: ProbeFunction,
}

impl Resolved {
    pub fn lattice(&self) -> CliResult<Lattice> {
        Lattice::new(self.config.dim, self.config.lattice.n, self.config.lattice.length).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn mc(&self) -> CliResult<McParams> {
        self.config.mc.validate(self.config.variant).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(self.config.mc.clone())
    }
}
