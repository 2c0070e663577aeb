//! key=value configuration file, overridden by command-line flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use maasslift::numerics::NumBudget;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => bail!("unknown format '{s}' (json or csv)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub budget: NumBudget,
    pub horizon: i64,
    pub format: Format,
}

impl Default for Config {
    fn default() -> Self {
        Config { budget: NumBudget::default(), horizon: 30, format: Format::Json }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').with_context(|| format!("line {}: expected key=value", i + 1))?;
            c.set(k.trim(), v.trim()).with_context(|| format!("line {}", i + 1))?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let b = &mut self.budget;
        match key {
            "kloosterman_c_max" => b.kloosterman_c_max = v.parse()?,
            "coset_c_max" => b.coset_c_max = v.parse()?,
            "series_terms" => b.series_terms = v.parse()?,
            "quad_depth" => b.quad_depth = v.parse()?,
            "tol" => b.tol = v.parse()?,
            "horizon" => self.horizon = v.parse()?,
            "format" => self.format = v.parse()?,
            _ => bail!("unknown config key '{key}'"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.budget.validate()?;
        if self.horizon < 0 {
            bail!("horizon must be non-negative");
        }
        Ok(())
    }
}
