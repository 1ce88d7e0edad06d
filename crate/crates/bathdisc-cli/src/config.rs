//! TOML run-configuration schema. The whole tree is validated before any
//! computation starts: unknown keys, missing required keys, and keys that do
//! not belong to the selected family or method are rejected with the key path
//! in the message.

use std::fs;
use std::path::{Path, PathBuf};

use bathdisc::{BathError, Precision, Result, SpectralDensity};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub density: DensitySection,
    pub discretization: Option<DiscretizationSection>,
    #[serde(default)]
    pub model: ModelSection,
    pub time: TimeSection,
    #[serde(default)]
    pub error: ErrorSection,
    #[serde(default)]
    pub mastereq: MasterEqSection,
    #[serde(default)]
    pub precision: PrecisionChoice,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Parse and validate `path`; returns the config together with the raw
    /// file bytes (hashed into every output header).
    pub fn load(path: &Path) -> Result<(RunConfig, Vec<u8>)> {
        let raw = fs::read(path)?;
        let text = std::str::from_utf8(&raw)
            .map_err(|_| BathError::Parse(format!("{}: not UTF-8", path.display())))?;
        let config: RunConfig =
            toml::from_str(text).map_err(|e| BathError::Parse(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok((config, raw))
    }

    fn validate(&self) -> Result<()> {
        self.density.validate()?;
        if let Some(disc) = &self.discretization {
            disc.validate()?;
        }
        self.model.validate()?;
        self.time.validate()?;
        self.error.validate()?;
        self.mastereq.validate()?;
        Ok(())
    }

    /// The discretization section, required by every command except a
    /// continuum-source mastereq run.
    pub fn discretization(&self) -> Result<&DiscretizationSection> {
        self.discretization
            .as_ref()
            .ok_or_else(|| BathError::Parse("missing [discretization] section".into()))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    pub family: String,
    pub alpha: Option<f64>,
    pub s: Option<f64>,
    pub omega_c: Option<f64>,
    pub omega_max: Option<f64>,
    pub centers: Option<Vec<f64>>,
    pub eta: Option<f64>,
    pub height: Option<f64>,
    pub support: Option<[f64; 2]>,
    pub grid_file: Option<PathBuf>,
}

impl DensitySection {
    fn validate(&self) -> Result<()> {
        let allowed: &[&str] = match self.family.as_str() {
            "caldeira_leggett" => &["alpha", "s", "omega_c", "omega_max"],
            "gaussian_mix" => &["centers", "eta", "support"],
            "flat" => &["height", "support"],
            "tabulated" => &["grid_file"],
            other => {
                return Err(BathError::Parse(format!(
                    "density.family '{other}' is not one of caldeira_leggett, gaussian_mix, flat, tabulated"
                )))
            }
        };
        let present: [(&str, bool); 8] = [
            ("alpha", self.alpha.is_some()),
            ("s", self.s.is_some()),
            ("omega_c", self.omega_c.is_some()),
            ("omega_max", self.omega_max.is_some()),
            ("centers", self.centers.is_some()),
            ("eta", self.eta.is_some()),
            ("height", self.height.is_some()),
            ("grid_file", self.grid_file.is_some()),
        ];
        for (key, set) in present {
            if set && !allowed.contains(&key) {
                return Err(BathError::Parse(format!(
                    "density.{key} is not valid for family={}",
                    self.family
                )));
            }
        }
        if self.support.is_some() && !allowed.contains(&"support") {
            return Err(BathError::Parse(format!(
                "density.support is not valid for family={}",
                self.family
            )));
        }
        Ok(())
    }

    /// Construct the density; `base` resolves a relative grid_file.
    pub fn build(&self, base: &Path) -> Result<SpectralDensity> {
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| {
                BathError::Parse(format!("density.{key} required for family={}", self.family))
            })
        };
        match self.family.as_str() {
            "caldeira_leggett" => SpectralDensity::caldeira_leggett(
                need(self.alpha, "alpha")?,
                need(self.s, "s")?,
                need(self.omega_c, "omega_c")?,
                need(self.omega_max, "omega_max")?,
            ),
            "gaussian_mix" => {
                let centers = self
                    .centers
                    .clone()
                    .ok_or_else(|| BathError::Parse("density.centers required".into()))?;
                let support = self
                    .support
                    .ok_or_else(|| BathError::Parse("density.support required".into()))?;
                SpectralDensity::gaussian_mix(
                    centers,
                    self.eta.unwrap_or(0.5),
                    (support[0], support[1]),
                )
            }
            "flat" => {
                let support = self
                    .support
                    .ok_or_else(|| BathError::Parse("density.support required".into()))?;
                SpectralDensity::flat(need(self.height, "height")?, (support[0], support[1]))
            }
            "tabulated" => {
                let rel = self
                    .grid_file
                    .as_ref()
                    .ok_or_else(|| BathError::Parse("density.grid_file required".into()))?;
                let path = if rel.is_absolute() {
                    rel.clone()
                } else {
                    base.join(rel)
                };
                let text = fs::read_to_string(&path)?;
                let mut grid = Vec::new();
                let mut values = Vec::new();
                for (i, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let fields: Vec<&str> = line.split_whitespace().collect();
                    if fields.len() != 2 {
                        return Err(BathError::Parse(format!(
                            "{}:{}: expected 'x value'",
                            path.display(),
                            i + 1
                        )));
                    }
                    let parse = |s: &str| -> Result<f64> {
                        s.parse().map_err(|_| {
                            BathError::Parse(format!(
                                "{}:{}: bad number '{s}'",
                                path.display(),
                                i + 1
                            ))
                        })
                    };
                    grid.push(parse(fields[0])?);
                    values.push(parse(fields[1])?);
                }
                SpectralDensity::tabulated(grid, values)
            }
            _ => unreachable!("validated family"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Trapezoid,
    Linear,
    Log,
    Mean,
    EqualWeight,
    Bsdo,
    Legendre,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Trapezoid => "trapezoid",
            Method::Linear => "linear",
            Method::Log => "log",
            Method::Mean => "mean",
            Method::EqualWeight => "equal_weight",
            Method::Bsdo => "bsdo",
            Method::Legendre => "legendre",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationSection {
    pub method: String,
    pub n_b: Option<usize>,
    pub n_b_list: Option<Vec<usize>>,
    pub lambda_disc: Option<f64>,
    pub x_accum: Option<f64>,
}

impl DiscretizationSection {
    fn validate(&self) -> Result<()> {
        self.method()?;
        match (&self.n_b, &self.n_b_list) {
            (None, None) => {
                return Err(BathError::Parse(
                    "discretization needs n_b or n_b_list".into(),
                ))
            }
            (Some(_), Some(_)) => {
                return Err(BathError::Parse(
                    "discretization.n_b and n_b_list are mutually exclusive".into(),
                ))
            }
            (_, Some(list)) if list.is_empty() => {
                return Err(BathError::Parse("discretization.n_b_list is empty".into()))
            }
            _ => {}
        }
        if self.method()? == Method::Log {
            if self.lambda_disc.is_none() || self.x_accum.is_none() {
                return Err(BathError::Parse(
                    "method=log requires discretization.lambda_disc and x_accum".into(),
                ));
            }
        } else if self.lambda_disc.is_some() || self.x_accum.is_some() {
            return Err(BathError::Parse(
                "discretization.lambda_disc/x_accum are only valid for method=log".into(),
            ));
        }
        Ok(())
    }

    pub fn method(&self) -> Result<Method> {
        Ok(match self.method.as_str() {
            "trapezoid" => Method::Trapezoid,
            "linear" => Method::Linear,
            "log" => Method::Log,
            "mean" => Method::Mean,
            "equal_weight" => Method::EqualWeight,
            "bsdo" => Method::Bsdo,
            "legendre" => Method::Legendre,
            other => {
                return Err(BathError::Parse(format!(
                    "discretization.method '{other}' is not one of trapezoid, linear, log, mean, equal_weight, bsdo, legendre"
                )))
            }
        })
    }

    /// A single mode count (scan commands accept lists; everything else
    /// requires exactly one value).
    pub fn single_n_b(&self) -> Result<usize> {
        match (&self.n_b, &self.n_b_list) {
            (Some(n), None) => Ok(*n),
            (None, Some(list)) if list.len() == 1 => Ok(list[0]),
            _ => Err(BathError::Parse(
                "this command needs a single discretization.n_b".into(),
            )),
        }
    }

    pub fn n_b_values(&self) -> Vec<usize> {
        match (&self.n_b, &self.n_b_list) {
            (Some(n), None) => vec![*n],
            (None, Some(list)) => list.clone(),
            _ => unreachable!("validated"),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    /// System level ε0 (doubles as ω_s for the master equation).
    pub eps0: f64,
    pub u: f64,
    pub geometry: String,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            eps0: 0.0,
            u: 0.0,
            geometry: "star".into(),
        }
    }
}

impl ModelSection {
    fn validate(&self) -> Result<()> {
        match self.geometry.as_str() {
            "star" | "chain" => Ok(()),
            other => Err(BathError::Parse(format!(
                "model.geometry '{other}' is not star or chain"
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    pub t_end: f64,
}

impl TimeSection {
    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(BathError::Parse(format!("time.dt = {} must be > 0", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(BathError::Parse(format!(
                "time.t_end = {} must be > 0",
                self.t_end
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErrorSection {
    /// Threshold defining the empirical validity horizon.
    pub threshold: f64,
    /// Mode count of the quasi-continuum reference.
    pub n_ref: usize,
}

impl Default for ErrorSection {
    fn default() -> Self {
        ErrorSection {
            threshold: 0.004,
            n_ref: 1000,
        }
    }
}

impl ErrorSection {
    fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0) {
            return Err(BathError::Parse(format!(
                "error.threshold = {} must be > 0",
                self.threshold
            )));
        }
        if self.n_ref < 4 {
            return Err(BathError::Parse(format!(
                "error.n_ref = {} must be >= 4",
                self.n_ref
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MasterEqSection {
    /// Inverse temperature; `inf` is zero temperature.
    pub beta: f64,
    /// sigma_x (default) or sigma_minus.
    pub coupling: String,
    /// continuum (default) integrates J directly; discrete uses the
    /// [discretization] section's bath.
    pub source: String,
}

impl Default for MasterEqSection {
    fn default() -> Self {
        MasterEqSection {
            beta: f64::INFINITY,
            coupling: "sigma_x".into(),
            source: "continuum".into(),
        }
    }
}

impl MasterEqSection {
    fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(BathError::Parse(format!(
                "mastereq.beta = {} must be > 0 (inf for zero temperature)",
                self.beta
            )));
        }
        match self.coupling.as_str() {
            "sigma_x" | "sigma_minus" => {}
            other => {
                return Err(BathError::Parse(format!(
                    "mastereq.coupling '{other}' is not sigma_x or sigma_minus"
                )))
            }
        }
        match self.source.as_str() {
            "continuum" | "discrete" => Ok(()),
            other => Err(BathError::Parse(format!(
                "mastereq.source '{other}' is not continuum or discrete"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionChoice {
    #[default]
    Double,
    Extended,
}

impl PrecisionChoice {
    pub fn to_precision(self) -> Precision {
        match self {
            PrecisionChoice::Double => Precision::Double,
            PrecisionChoice::Extended => Precision::Extended,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            PrecisionChoice::Double => "double",
            PrecisionChoice::Extended => "extended",
        }
    }
}
