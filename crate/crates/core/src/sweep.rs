//! Parameter sweeps: configuration, the reference presets, parallel
//! evaluation and CSV / plot-data output.
//!
//! A sweep evaluates every scheme at every swept value, once per variant.
//! Variants override base fields (for instance `mu` or `p_u_db`) to draw
//! several curves for one scheme; the overrides are appended to the scheme
//! label as `OMA@mu=1/4`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::expectation::{ExpectationPolicy, FailureModel};
use crate::numfmt::format_sig;
use crate::params::{parse_cable_bandwidth, SystemParams};
use crate::point::{evaluate_point, Scheme};
use crate::scalar::db_to_linear;

pub const CSV_HEADER: &str =
    "swept_param,swept_value,scheme,R_U_bits,R_B_bits,feasible,eps_U_D,mc_std_err,seed";
const CSV_DIGITS: usize = 9;

/// Base operating point with powers in dB and squared gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaseConfig {
    pub cells: usize,
    pub n_f: usize,
    pub n_t: usize,
    pub l_s: usize,
    /// Exact fraction such as `"1/4"`.
    pub mu: String,
    pub alpha_sq: f64,
    pub beta_sq: f64,
    pub gamma_sq: f64,
    pub p_b_db: f64,
    pub p_u_db: f64,
    pub p_c_db: f64,
    pub q: f64,
    pub eps_u: f64,
    pub l_u: usize,
    pub rho_sq: f64,
}

impl Default for BaseConfig {
    fn default() -> Self {
        Self {
            cells: 6,
            n_f: 60,
            n_t: 100,
            l_s: 4,
            mu: "1".to_string(),
            alpha_sq: 0.2,
            beta_sq: 1.0,
            gamma_sq: 0.5,
            p_b_db: 7.0,
            p_u_db: 10.0,
            p_c_db: 7.0,
            q: 1e-3,
            eps_u: 1e-3,
            l_u: 2,
            rho_sq: 0.0,
        }
    }
}

const INTEGER_FIELDS: [&str; 5] = ["cells", "n_f", "n_t", "l_s", "l_u"];
const REAL_FIELDS: [&str; 9] =
    ["alpha_sq", "beta_sq", "gamma_sq", "p_b_db", "p_u_db", "p_c_db", "q", "eps_u", "rho_sq"];

/// Canonical field name; `L_U` and friends are accepted case-insensitively.
fn canonical_field(key: &str) -> Result<&'static str> {
    let k = key.trim().to_ascii_lowercase();
    INTEGER_FIELDS
        .iter()
        .chain(REAL_FIELDS.iter())
        .chain(std::iter::once(&"mu"))
        .find(|f| **f == k)
        .copied()
        .ok_or_else(|| Error::Config(format!("unknown parameter '{key}'")))
}

impl BaseConfig {
    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let field = canonical_field(key)?;
        let value = value.trim();
        let bad = |e: &dyn std::fmt::Display| Error::Config(format!("invalid value '{value}' for {field}: {e}"));
        if field == "mu" {
            parse_cable_bandwidth(value)?;
            self.mu = value.to_string();
            return Ok(());
        }
        if INTEGER_FIELDS.contains(&field) {
            let v: usize = value.parse().map_err(|e| bad(&e))?;
            match field {
                "cells" => self.cells = v,
                "n_f" => self.n_f = v,
                "n_t" => self.n_t = v,
                "l_s" => self.l_s = v,
                _ => self.l_u = v,
            }
            return Ok(());
        }
        let v: f64 = value.parse().map_err(|e| bad(&e))?;
        if !v.is_finite() {
            return Err(bad(&"not finite"));
        }
        *self.real_field_mut(field) = v;
        Ok(())
    }

    fn real_field_mut(&mut self, field: &str) -> &mut f64 {
        match field {
            "alpha_sq" => &mut self.alpha_sq,
            "beta_sq" => &mut self.beta_sq,
            "gamma_sq" => &mut self.gamma_sq,
            "p_b_db" => &mut self.p_b_db,
            "p_u_db" => &mut self.p_u_db,
            "p_c_db" => &mut self.p_c_db,
            "q" => &mut self.q,
            "eps_u" => &mut self.eps_u,
            _ => &mut self.rho_sq,
        }
    }

    /// Sets a swept field from a numeric value; integer fields need an
    /// integral value.
    pub fn set_numeric(&mut self, key: &str, value: f64) -> Result<()> {
        let field = canonical_field(key)?;
        if field == "mu" {
            return Err(Error::Config("mu cannot be swept numerically; use variants".into()));
        }
        if INTEGER_FIELDS.contains(&field) {
            if value.fract() != 0.0 || value < 0.0 {
                return Err(Error::Config(format!("{field} needs non-negative integer values, got {value}")));
            }
            return self.set(field, &format!("{}", value as u64));
        }
        self.set(field, &value.to_string())
    }

    /// Linear-scale model parameters. Only structural and range checks are
    /// applied here; access-mode checks happen per scheme.
    pub fn to_params(&self) -> Result<SystemParams<f64>> {
        if self.alpha_sq < 0.0 || self.gamma_sq < 0.0 || self.rho_sq < 0.0 {
            return Err(Error::domain("squared gains must be non-negative"));
        }
        let p = SystemParams {
            cells: self.cells,
            n_f: self.n_f,
            n_t: self.n_t,
            l_s: self.l_s,
            mu: parse_cable_bandwidth(&self.mu)?,
            alpha: self.alpha_sq.sqrt(),
            beta_sq: self.beta_sq,
            gamma: self.gamma_sq.sqrt(),
            p_b: db_to_linear(self.p_b_db),
            p_u: db_to_linear(self.p_u_db),
            p_c: db_to_linear(self.p_c_db),
            q: self.q,
            eps_u: self.eps_u,
            l_u: self.l_u,
            rho: self.rho_sq.sqrt(),
        };
        p.validate()?;
        Ok(p)
    }
}

/// Base-field overrides for one family of curves.
pub type Variant = BTreeMap<String, Value>;

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), fmt_value),
        other => other.to_string(),
    }
}

fn variant_suffix(v: &Variant) -> String {
    if v.is_empty() {
        return String::new();
    }
    let parts: Vec<String> = v.iter().map(|(k, x)| format!("{k}={}", value_text(x))).collect();
    format!("@{}", parts.join(","))
}

fn one_variant() -> Vec<Variant> {
    vec![Variant::new()]
}

/// A full sweep description, loadable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub base: BaseConfig,
    pub swept_parameter: String,
    pub values: Vec<f64>,
    pub schemes: Vec<Scheme>,
    #[serde(default = "one_variant")]
    pub variants: Vec<Variant>,
    #[serde(default)]
    pub policy: ExpectationPolicy,
    #[serde(default)]
    pub failure_model: FailureModel,
    #[serde(default)]
    pub output_path: Option<String>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("sweep config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let field = canonical_field(&self.swept_parameter)?;
        if field == "mu" {
            return Err(Error::Config("mu cannot be swept numerically; use variants".into()));
        }
        if self.values.is_empty() {
            return Err(Error::Config("values must not be empty".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("values must be finite".into()));
        }
        let up = self.values.windows(2).all(|w| w[0] < w[1]);
        let down = self.values.windows(2).all(|w| w[0] > w[1]);
        if !(up || down) {
            return Err(Error::Config("values must be strictly monotone".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("schemes must not be empty".into()));
        }
        if self.variants.is_empty() {
            return Err(Error::Config("variants must not be empty (use [{}] for none)".into()));
        }
        let mut suffixes: Vec<String> = self.variants.iter().map(variant_suffix).collect();
        suffixes.sort();
        suffixes.dedup();
        if suffixes.len() != self.variants.len() {
            return Err(Error::Config("duplicate variants".into()));
        }
        self.policy.validate().map_err(|e| Error::Config(e.to_string()))?;
        for variant in &self.variants {
            let mut base = self.variant_base(variant)?;
            base.set_numeric(field, self.values[0])?;
        }
        self.base.to_params()?;
        Ok(())
    }

    fn variant_base(&self, variant: &Variant) -> Result<BaseConfig> {
        let mut base = self.base.clone();
        for (k, v) in variant {
            base.set(k, &value_text(v))?;
        }
        Ok(base)
    }

    /// Replaces the variants by their product with one `p_u_db` value each.
    pub fn with_urllc_powers_db(mut self, p_u_db: &[f64]) -> Self {
        if p_u_db.is_empty() {
            return self;
        }
        let mut out = Vec::new();
        for v in &self.variants {
            for &p in p_u_db {
                let mut v = v.clone();
                v.insert("p_u_db".into(), Value::from(p));
                out.push(v);
            }
        }
        self.variants = out;
        self
    }
}

/// Named reference sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Gamma,
    Q,
    Rho,
    Latency,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gamma" => Ok(Preset::Gamma),
            "q" => Ok(Preset::Q),
            "rho" => Ok(Preset::Rho),
            "latency" => Ok(Preset::Latency),
            _ => Err(Error::Config(format!("unknown preset '{s}' (gamma, q, rho, latency)"))),
        }
    }
}

fn mu_variants(values: &[&str]) -> Vec<Variant> {
    values.iter().map(|m| Variant::from([("mu".to_string(), Value::from(*m))])).collect()
}

/// The reference configurations.
///
/// * `gamma`: `γ² = 0, 0.05, …, 1` at `μ ∈ {1/4, 1}`, OMA and puncturing
///   with their ideal-fronthaul baselines.
/// * `q`: 13 log-spaced `q = 10^(−4 + k/3)`, `μ = 1`, `γ² = 1`, all four
///   eMBB schemes (SIC with perfect cancellation).
/// * `rho`: `ρ² = 0, 0.1, …, 1` at `q = 0.3`, `α² = 0.4`, `γ² = 0.5`,
///   `μ = 1`, SIC against TIN and ideal SIC, one curve per URLLC power
///   (10 dB unless overridden).
/// * `latency`: `L_U = 1..8`, OMA and puncturing at `μ ∈ {1/4, 1}`.
pub fn preset(which: Preset) -> SweepConfig {
    let base = BaseConfig::default();
    match which {
        Preset::Gamma => SweepConfig {
            base,
            swept_parameter: "gamma_sq".into(),
            values: (0..=20).map(|k| k as f64 / 20.0).collect(),
            schemes: vec![Scheme::Oma, Scheme::NomaPunct, Scheme::IdealOma, Scheme::IdealPunct],
            variants: mu_variants(&["1/4", "1"]),
            policy: ExpectationPolicy::default(),
            failure_model: FailureModel::Conditional,
            output_path: None,
        },
        Preset::Q => SweepConfig {
            base: BaseConfig { gamma_sq: 1.0, ..base },
            swept_parameter: "q".into(),
            values: (0..=12).map(|k| 10f64.powf(-4.0 + k as f64 / 3.0)).collect(),
            schemes: vec![Scheme::Oma, Scheme::NomaPunct, Scheme::NomaTin, Scheme::NomaSic],
            variants: one_variant(),
            policy: ExpectationPolicy::default(),
            failure_model: FailureModel::Conditional,
            output_path: None,
        },
        Preset::Rho => SweepConfig {
            base: BaseConfig { q: 0.3, alpha_sq: 0.4, ..base },
            swept_parameter: "rho_sq".into(),
            values: (0..=10).map(|k| k as f64 / 10.0).collect(),
            schemes: vec![Scheme::NomaSic, Scheme::NomaTin, Scheme::IdealSic],
            variants: one_variant(),
            policy: ExpectationPolicy::default(),
            failure_model: FailureModel::Conditional,
            output_path: None,
        }
        .with_urllc_powers_db(&[10.0]),
        Preset::Latency => SweepConfig {
            base,
            swept_parameter: "l_u".into(),
            values: (1..=8).map(f64::from).collect(),
            schemes: vec![Scheme::Oma, Scheme::NomaPunct],
            variants: mu_variants(&["1/4", "1"]),
            policy: ExpectationPolicy::default(),
            failure_model: FailureModel::Conditional,
            output_path: None,
        },
    }
}

/// One CSV row. Points where the scheme is undefined (OMA at `L_U = 1`)
/// carry NaN rates and `feasible = false`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub swept_value: f64,
    pub scheme: String,
    pub r_u: f64,
    pub r_b: f64,
    pub feasible: bool,
    pub eps_u_d: f64,
    pub mc_std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub config: SweepConfig,
    pub seed: u64,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub swept_param: String,
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

fn fmt_value(x: f64) -> String {
    format_sig(x, CSV_DIGITS)
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                self.swept_param,
                fmt_value(r.swept_value),
                r.scheme,
                fmt_value(r.r_u),
                fmt_value(r.r_b),
                r.feasible,
                fmt_value(r.eps_u_d),
                fmt_value(r.mc_std_err),
                self.metadata.seed
            );
        }
        out
    }

    /// Whitespace-separated `swept_value R_U R_B` columns, one data set per
    /// scheme label.
    pub fn plot_data(&self) -> BTreeMap<String, String> {
        let mut out: BTreeMap<String, String> = BTreeMap::new();
        for r in &self.rows {
            let text = out.entry(r.scheme.clone()).or_insert_with(|| {
                format!("# {} {}\n# {} R_U_bits R_B_bits\n", r.scheme, self.swept_param, self.swept_param)
            });
            let _ = writeln!(text, "{} {} {}", fmt_value(r.swept_value), fmt_value(r.r_u), fmt_value(r.r_b));
        }
        out
    }

    /// Writes the CSV and a `<csv>.meta.json` sidecar.
    pub fn write(&self, csv_path: &Path) -> Result<()> {
        write_file(csv_path, &self.to_csv())?;
        let meta = serde_json::to_string_pretty(&self.metadata)
            .map_err(|e| Error::Io(format!("serializing metadata: {e}")))?;
        write_file(&sidecar_path(csv_path), &(meta + "\n"))
    }

    /// Writes one `.dat` file per scheme label into `dir`; returns the paths.
    pub fn write_plot_files(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("creating {}: {e}", dir.display())))?;
        let mut paths = Vec::new();
        for (label, text) in self.plot_data() {
            let name: String = label
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
                .collect();
            let path = dir.join(format!("{}_{name}.dat", self.swept_param));
            write_file(&path, &text)?;
            paths.push(path);
        }
        Ok(paths)
    }
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    let mut s = csv_path.as_os_str().to_os_string();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("writing {}: {e}", path.display())))
}

struct Task {
    value_index: usize,
    value: f64,
    label: String,
    scheme: Scheme,
    base: BaseConfig,
}

fn evaluate_task(task: &Task, config: &SweepConfig) -> Result<SweepRow> {
    let nan_row = || SweepRow {
        swept_value: task.value,
        scheme: task.label.clone(),
        r_u: f64::NAN,
        r_b: f64::NAN,
        feasible: false,
        eps_u_d: f64::NAN,
        mc_std_err: f64::NAN,
    };
    let params = match task.base.to_params() {
        Ok(p) => p,
        Err(Error::Domain(_) | Error::Dimension(_)) => return Ok(nan_row()),
        Err(e) => return Err(e),
    };
    match evaluate_point(&params, task.scheme, &config.policy, config.failure_model) {
        Ok(p) => Ok(SweepRow {
            swept_value: task.value,
            scheme: task.label.clone(),
            mc_std_err: p.mc_std_err(),
            r_u: p.r_u,
            r_b: p.r_b,
            feasible: p.urllc_feasible,
            eps_u_d: p.eps_u_d,
        }),
        Err(Error::Domain(_) | Error::Dimension(_)) => Ok(nan_row()),
        Err(e) => Err(e),
    }
}

/// Evaluates the sweep on at most `jobs` threads (all cores when `None`).
/// Rows are ordered by swept value, then scheme label, whatever the
/// completion order.
pub fn run_sweep(config: &SweepConfig, jobs: Option<usize>) -> Result<SweepResult> {
    config.validate()?;
    let field = canonical_field(&config.swept_parameter)?;
    let mut tasks = Vec::new();
    for variant in &config.variants {
        let base = config.variant_base(variant)?;
        let suffix = variant_suffix(variant);
        for (value_index, &value) in config.values.iter().enumerate() {
            let mut b = base.clone();
            b.set_numeric(field, value)?;
            for &scheme in &config.schemes {
                tasks.push(Task {
                    value_index,
                    value,
                    label: format!("{}{suffix}", scheme.label()),
                    scheme,
                    base: b.clone(),
                });
            }
        }
    }
    tasks.sort_by(|a, b| (a.value_index, &a.label).cmp(&(b.value_index, &b.label)));

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows: Vec<SweepRow> =
        pool.install(|| tasks.par_iter().map(|t| evaluate_task(t, config)).collect::<Result<_>>())?;

    Ok(SweepResult {
        swept_param: field.to_string(),
        rows,
        metadata: SweepMetadata {
            config: config.clone(),
            seed: config.policy.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        },
    })
}
