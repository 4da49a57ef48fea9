//! `key = value` run configuration. Flags given on the command line win
//! over the file, which wins over built-in defaults.

use std::path::Path;

use kksym::{IntegratorConfig, MetricParams};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub params: MetricParams,
    pub integrator: IntegratorConfig,
    pub seed: u64,
}

/// Values read from a config file; unset keys stay `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileValues {
    pub mass: Option<f64>,
    pub charge: Option<f64>,
    pub r_inf: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub s_end: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

pub fn parse(text: &str) -> Result<FileValues, String> {
    let mut out = FileValues::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let float = || {
            value
                .parse::<f64>()
                .map_err(|_| format!("line {}: `{key}` needs a number, got `{value}`", n + 1))
        };
        let int = || {
            value.parse::<u64>().map_err(|_| {
                format!(
                    "line {}: `{key}` needs a non-negative integer, got `{value}`",
                    n + 1
                )
            })
        };
        match key {
            "M" => out.mass = Some(float()?),
            "q" => out.charge = Some(float()?),
            "r_inf" => out.r_inf = Some(float()?),
            "rel_tol" => out.rel_tol = Some(float()?),
            "abs_tol" => out.abs_tol = Some(float()?),
            "s_end" => out.s_end = Some(float()?),
            "samples" => out.samples = Some(int()? as usize),
            "seed" => out.seed = Some(int()?),
            _ => return Err(format!("line {}: unknown key `{key}`", n + 1)),
        }
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<FileValues, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

impl FileValues {
    /// Overlays `other` on top of `self`.
    pub fn overlay(self, other: FileValues) -> FileValues {
        FileValues {
            mass: other.mass.or(self.mass),
            charge: other.charge.or(self.charge),
            r_inf: other.r_inf.or(self.r_inf),
            rel_tol: other.rel_tol.or(self.rel_tol),
            abs_tol: other.abs_tol.or(self.abs_tol),
            s_end: other.s_end.or(self.s_end),
            samples: other.samples.or(self.samples),
            seed: other.seed.or(self.seed),
        }
    }

    pub fn resolve(&self) -> Result<RunConfig, String> {
        let d = RunConfig::default();
        let params = MetricParams::new(
            self.mass.unwrap_or(d.params.mass),
            self.charge.unwrap_or(d.params.charge),
            self.r_inf.unwrap_or(d.params.r_inf),
        )
        .map_err(|e| e.to_string())?;
        let integrator = IntegratorConfig {
            rel_tol: self.rel_tol.unwrap_or(d.integrator.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.integrator.abs_tol),
            s_end: self.s_end.unwrap_or(d.integrator.s_end),
            samples: self.samples.unwrap_or(d.integrator.samples),
            ..d.integrator
        };
        integrator.validate().map_err(|e| e.to_string())?;
        Ok(RunConfig {
            params,
            integrator,
            seed: self.seed.unwrap_or(d.seed),
        })
    }
}
