use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::table::Format;
use kfpq_core::symbols::Alpha;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{field}: {message}")]
    Field { field: &'static str, message: String },
    #[error("config file {path}: {message}")]
    File { path: PathBuf, message: String },
}

pub fn field_err(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum AlphaArg {
    #[value(name = "0")]
    #[serde(rename = "0")]
    Zero,
    #[value(name = "pi2")]
    #[serde(rename = "pi2")]
    HalfPi,
}

impl AlphaArg {
    pub fn alpha(self) -> Alpha {
        match self {
            AlphaArg::Zero => Alpha::Zero,
            AlphaArg::HalfPi => Alpha::HalfPi,
        }
    }
}

/// Flags shared by every command; each overrides the matching config key.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat key-value JSON file with the same keys as the long options.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated list of curvatures.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub nu: Option<Vec<f64>>,
    #[arg(long)]
    pub alpha: Option<AlphaArg>,
    /// Comma-separated list of slopes for the degenerate model.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda1: Option<Vec<f64>>,
    /// Time grid `min:max:count:log|lin`.
    #[arg(long)]
    pub t: Option<String>,
    /// Hermite truncation per mode; enables the Galerkin oracle.
    #[arg(long)]
    pub dims: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    nu: Option<OneOrMany>,
    alpha: Option<AlphaArg>,
    lambda1: Option<OneOrMany>,
    t: Option<String>,
    dims: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl TGrid {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(field_err("t", format!("expected min:max:count:log|lin, got `{s}`")));
        }
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| field_err("t", format!("`{x}` is not a number")));
        let (min, max) = (num(parts[0])?, num(parts[1])?);
        let count: usize = parts[2].trim().parse().map_err(|_| field_err("t", format!("count `{}` is not an integer", parts[2])))?;
        let spacing = match parts[3].trim() {
            "log" => Spacing::Log,
            "lin" => Spacing::Linear,
            other => return Err(field_err("t", format!("spacing must be log or lin, got `{other}`"))),
        };
        if count == 0 {
            return Err(field_err("t", "empty grid (count = 0)"));
        }
        if !(min.is_finite() && max.is_finite()) || min > max {
            return Err(field_err("t", format!("need finite min <= max, got {min}:{max}")));
        }
        if count > 1 && min == max {
            return Err(field_err("t", "min equals max with count > 1"));
        }
        if spacing == Spacing::Log && min <= 0.0 {
            return Err(field_err("t", "log spacing needs min > 0"));
        }
        Ok(Self { min, max, count, spacing })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                let s = k as f64 / n;
                match self.spacing {
                    Spacing::Linear => self.min + s * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + s * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

/// Fully resolved sweep settings.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub nu: Option<Vec<f64>>,
    pub alpha: Option<AlphaArg>,
    pub lambda1: Option<Vec<f64>>,
    pub t: Option<TGrid>,
    pub dims: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

fn read_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::File { path: path.into(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| ConfigError::File { path: path.into(), message: e.to_string() })
}

fn sorted(field: &'static str, v: Vec<f64>) -> Result<Vec<f64>, ConfigError> {
    if v.is_empty() {
        return Err(field_err(field, "empty list"));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite()) {
        return Err(field_err(field, format!("non-finite value {x}")));
    }
    let mut v = v;
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

impl SweepConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, ConfigError> {
        let file = match &args.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let nu = args.nu.clone().or(file.nu.map(OneOrMany::into_vec)).map(|v| sorted("nu", v)).transpose()?;
        let lambda1 = args.lambda1.clone().or(file.lambda1.map(OneOrMany::into_vec)).map(|v| sorted("lambda1", v)).transpose()?;
        let t = args.t.clone().or(file.t).map(|s| TGrid::parse(&s)).transpose()?;
        Ok(Self {
            nu,
            alpha: args.alpha.or(file.alpha),
            lambda1,
            t,
            dims: args.dims.or(file.dims),
            out: args.out.clone().or(file.out),
            format: args.format.or(file.format).unwrap_or(Format::Csv),
            seed: args.seed.or(file.seed).unwrap_or(0),
        })
    }

    pub fn nus(&self) -> Result<&[f64], ConfigError> {
        self.nu.as_deref().ok_or_else(|| field_err("nu", "required for this command"))
    }

    /// Curvatures that must all exceed `floor`.
    pub fn nus_above(&self, floor: f64) -> Result<&[f64], ConfigError> {
        let nus = self.nus()?;
        if let Some(x) = nus.iter().find(|&&x| x <= floor) {
            return Err(field_err("nu", format!("must exceed {floor}, got {x}")));
        }
        Ok(nus)
    }

    pub fn ts(&self) -> Result<Vec<f64>, ConfigError> {
        self.t.map(|g| g.points()).ok_or_else(|| field_err("t", "required for this command"))
    }

    /// Grid points that must be strictly positive.
    pub fn positive_ts(&self) -> Result<Vec<f64>, ConfigError> {
        let ts = self.ts()?;
        if ts[0] <= 0.0 {
            return Err(field_err("t", "grid must be strictly positive for this command"));
        }
        Ok(ts)
    }

    pub fn lambda1s(&self) -> Result<&[f64], ConfigError> {
        self.lambda1.as_deref().ok_or_else(|| field_err("lambda1", "required for this command"))
    }

    pub fn dims_at_least(&self, min: usize) -> Result<Option<usize>, ConfigError> {
        match self.dims {
            Some(d) if d < min => Err(field_err("dims", format!("must be at least {min}, got {d}"))),
            d => Ok(d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = TGrid::parse("0.1:10:3:log").unwrap();
        let p = g.points();
        assert!((p[1] - 1.0).abs() < 1e-15 && (p[2] - 10.0).abs() < 1e-14);
        assert_eq!(TGrid::parse("0:1:5:lin").unwrap().points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        for bad in ["0.1:5:0:log", "0:5:4:log", "1:2:3", "2:1:3:lin", "1:2:3:cubic", "1:1:2:lin"] {
            let e = TGrid::parse(bad).unwrap_err();
            assert!(e.to_string().starts_with("t:"), "{bad}: {e}");
        }
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("kfpq-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.json");
        std::fs::write(&path, r#"{"nu": [4, 1], "t": "0.1:1:2:lin", "seed": 7, "format": "json"}"#).unwrap();
        let args = CommonArgs { config: Some(path.clone()), seed: Some(3), ..Default::default() };
        let c = SweepConfig::resolve(&args).unwrap();
        assert_eq!(c.nu.as_deref(), Some(&[1.0, 4.0][..]));
        assert_eq!((c.seed, c.format), (3, Format::Json));
        std::fs::write(&path, r#"{"nus": 1}"#).unwrap();
        assert!(SweepConfig::resolve(&args).is_err());
        std::fs::remove_dir_all(dir).unwrap();
    }
}
