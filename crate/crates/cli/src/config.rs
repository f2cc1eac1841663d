use anyhow::{anyhow, bail, Result};
use serde::Serialize;
use spintor_core::action::CouplingForm;
use spintor_core::dynamics::SolverConfig;
use spintor_core::geometry::{ChartPreset, Lattice, MetricChart};
use spintor_core::sig::Signature;
use std::collections::BTreeMap;
use std::path::Path;

pub const RUN_SCHEMA_VERSION: u32 = 1;

/// Fully resolved run configuration. Parsed from a flat key = value TOML
/// file plus command-line overrides; every invalid entry is reported in one
/// aggregated error.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub schema_version: u32,
    pub chart: String,
    pub chart_param: f64,
    pub dims: Vec<usize>,
    pub h: f64,
    pub p: usize,
    pub q: usize,
    pub eps: i8,
    pub form: String,
    pub coupling_g: f64,
    pub method: String,
    pub tol: f64,
    pub max_iter: usize,
    pub step: f64,
    pub seed: u64,
    pub psi_init: String,
    pub psi_amplitude: f64,
    pub a_init: String,
    pub a_amplitude: f64,
    pub wave_steps: usize,
    pub wave_dt: f64,
    pub wave_mode: i64,
    pub wave_axis: usize,
    /// Optional snapshot path for the initial potential.
    pub a_snapshot: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: RUN_SCHEMA_VERSION,
            chart: "flat".into(),
            chart_param: 0.0,
            dims: vec![4, 4, 4, 4],
            h: 1.0,
            p: 4,
            q: 0,
            eps: 1,
            form: "rescaled".into(),
            coupling_g: 0.1,
            method: "nonlinear_cg".into(),
            tol: 1e-8,
            max_iter: 10_000,
            step: 0.25,
            seed: 1,
            psi_init: "zero".into(),
            psi_amplitude: 0.1,
            a_init: "zero".into(),
            a_amplitude: 0.01,
            wave_steps: 1000,
            wave_dt: 0.2,
            wave_mode: 1,
            wave_axis: 0,
            a_snapshot: None,
        }
    }
}

fn parse_usize_list(v: &toml::Value) -> Option<Vec<usize>> {
    v.as_array().map(|arr| {
        arr.iter()
            .filter_map(|x| x.as_integer().map(|i| i as usize))
            .collect()
    })
}

impl RunConfig {
    /// Load from a TOML file (flat key = value pairs) and apply
    /// `key=value` overrides.
    pub fn load(path: Option<&Path>, overrides: &[String], seed_flag: Option<u64>) -> Result<Self> {
        let mut table: BTreeMap<String, toml::Value> = BTreeMap::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)
                .map_err(|e| anyhow!("cannot read config {}: {e}", p.display()))?;
            let parsed: toml::Table = text
                .parse()
                .map_err(|e| anyhow!("config {} is not valid TOML: {e}", p.display()))?;
            for (k, v) in parsed {
                table.insert(k, v);
            }
        }
        for ov in overrides {
            let (k, v) = ov
                .split_once('=')
                .ok_or_else(|| anyhow!("override '{ov}' is not key=value"))?;
            let parsed: toml::Value = v
                .parse()
                .unwrap_or_else(|_| toml::Value::String(v.to_string()));
            table.insert(k.trim().to_string(), parsed);
        }

        let mut cfg = RunConfig::default();
        let mut errors: Vec<String> = Vec::new();
        let mut known = |k: &str| -> Option<toml::Value> { table.remove(k) };

        macro_rules! take {
            ($key:literal, $field:expr, $conv:expr) => {
                if let Some(v) = known($key) {
                    match $conv(&v) {
                        Some(x) => $field = x,
                        None => errors.push(format!("key '{}' has the wrong type", $key)),
                    }
                }
            };
        }

        take!("chart", cfg.chart, |v: &toml::Value| v
            .as_str()
            .map(|s| s.to_string()));
        take!("chart_param", cfg.chart_param, |v: &toml::Value| v.as_float().or(v.as_integer().map(|i| i as f64)));
        take!("dims", cfg.dims, parse_usize_list);
        take!("h", cfg.h, |v: &toml::Value| v.as_float().or(v.as_integer().map(|i| i as f64)));
        take!("p", cfg.p, |v: &toml::Value| v.as_integer().map(|i| i as usize));
        take!("q", cfg.q, |v: &toml::Value| v.as_integer().map(|i| i as usize));
        take!("eps", cfg.eps, |v: &toml::Value| v.as_integer().map(|i| i as i8));
        take!("form", cfg.form, |v: &toml::Value| v.as_str().map(|s| s.to_string()));
        take!("coupling_g", cfg.coupling_g, |v: &toml::Value| v.as_float().or(v.as_integer().map(|i| i as f64)));
        take!("method", cfg.method, |v: &toml::Value| v.as_str().map(|s| s.to_string()));
        take!("tol", cfg.tol, |v: &toml::Value| v.as_float());
        take!("max_iter", cfg.max_iter, |v: &toml::Value| v.as_integer().map(|i| i as usize));
        take!("step", cfg.step, |v: &toml::Value| v.as_float().or(v.as_integer().map(|i| i as f64)));
        take!("seed", cfg.seed, |v: &toml::Value| v.as_integer().map(|i| i as u64));
        take!("psi_init", cfg.psi_init, |v: &toml::Value| v.as_str().map(|s| s.to_string()));
        take!("psi_amplitude", cfg.psi_amplitude, |v: &toml::Value| v.as_float().or(v.as_integer().map(|i| i as f64)));
        take!("a_init", cfg.a_init, |v: &toml::Value| v.as_str().map(|s| s.to_string()));
        take!("a_amplitude", cfg.a_amplitude, |v: &toml::Value| v.as_float().or(v.as_integer().map(|i| i as f64)));
        take!("wave_steps", cfg.wave_steps, |v: &toml::Value| v.as_integer().map(|i| i as usize));
        take!("wave_dt", cfg.wave_dt, |v: &toml::Value| v.as_float());
        take!("wave_mode", cfg.wave_mode, |v: &toml::Value| v.as_integer());
        take!("wave_axis", cfg.wave_axis, |v: &toml::Value| v.as_integer().map(|i| i as usize));
        take!("a_snapshot", cfg.a_snapshot, |v: &toml::Value| v
            .as_str()
            .map(|s| Some(s.to_string())));

        if let Some(s) = seed_flag {
            cfg.seed = s;
        }
        for k in table.keys() {
            errors.push(format!("unknown key '{k}'"));
        }
        cfg.validate_into(&mut errors);
        if !errors.is_empty() {
            bail!("configuration rejected:\n  - {}", errors.join("\n  - "));
        }
        Ok(cfg)
    }

    fn validate_into(&self, errors: &mut Vec<String>) {
        if let Err(e) = Signature::new(self.p, self.q, self.eps) {
            errors.push(format!("signature: {e}"));
        }
        if ChartPreset::parse(&self.chart, self.chart_param).is_err() {
            errors.push(format!(
                "chart '{}' (known: {:?})",
                self.chart,
                ChartPreset::names()
            ));
        }
        if self.dims.len() != self.p + self.q {
            errors.push(format!(
                "dims rank {} does not match n = {}",
                self.dims.len(),
                self.p + self.q
            ));
        }
        if self.dims.iter().any(|&d| d < 4) {
            errors.push("each lattice extent must be at least 4".into());
        }
        if !(self.h > 0.0) {
            errors.push("h must be positive".into());
        }
        if CouplingForm::parse(&self.form).is_err() {
            errors.push(format!("unknown coupling form '{}'", self.form));
        }
        if !(self.coupling_g > 0.0) {
            errors.push("coupling_g must be positive".into());
        }
        if let Err(e) = (SolverConfig {
            method: self.method.clone(),
            tol: self.tol,
            max_iter: self.max_iter,
            step: self.step,
            seed: self.seed,
        })
        .validate()
        {
            errors.push(format!("solver: {e}"));
        }
        if !["zero", "constant", "modulated", "random"].contains(&self.psi_init.as_str()) {
            errors.push(format!("unknown psi_init '{}'", self.psi_init));
        }
        if !["zero", "random", "coexact", "plane_wave", "snapshot"].contains(&self.a_init.as_str())
        {
            errors.push(format!("unknown a_init '{}'", self.a_init));
        }
        if self.a_init == "snapshot" && self.a_snapshot.is_none() {
            errors.push("a_init = snapshot needs a_snapshot".into());
        }
        if self.wave_axis >= self.dims.len().max(1) {
            errors.push("wave_axis out of range".into());
        }
    }

    pub fn signature(&self) -> Result<Signature> {
        Ok(Signature::new(self.p, self.q, self.eps)?)
    }

    pub fn build_chart(&self) -> Result<MetricChart> {
        let sig = self.signature()?;
        let preset = ChartPreset::parse(&self.chart, self.chart_param)?;
        let lat = Lattice::new(self.dims.clone(), vec![self.h; self.dims.len()]);
        Ok(MetricChart::build(preset, lat, sig)?)
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            method: self.method.clone(),
            tol: self.tol,
            max_iter: self.max_iter,
            step: self.step,
            seed: self.seed,
        }
    }

    pub fn coupling_form(&self) -> Result<CouplingForm> {
        Ok(CouplingForm::parse(&self.form)?)
    }
}
