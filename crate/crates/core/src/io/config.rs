//! TOML run configuration.
//!
//! ```toml
//! [scenario]
//! case = "cantilever"        # or "staircase"
//! freeze_at = "100d"         # optional case overrides
//!
//! [scheme]
//! type = "fs"                # "fim" or "fs"
//! fs_iterations = 1
//! fs_form = "stress_rate"    # or "porosity"
//!
//! [stabilization]
//! enabled = true
//! c = 1.0
//!
//! [[schedule]]
//! dt = "1d"
//! steps = 10
//!
//! [output]
//! dir = "out/cantilever"
//! snapshot_stride = 1
//! ```
//!
//! Unknown keys anywhere are errors.

use std::fmt;
use std::path::PathBuf;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analysis::{OSCILLATORY_THRESHOLD, SMOOTH_THRESHOLD};
use crate::cases::{build_cantilever, build_staircase, CantileverOptions, Scenario, StaircaseOptions};
use crate::error::{Error, Result};
use crate::io::units::Duration;
use crate::materials::{Modulus, StabilizationConfig};
use crate::steppers::{FsForm, Scheme, SchemeConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    Cantilever,
    Staircase,
}

impl Case {
    pub fn token(self) -> &'static str {
        match self {
            Case::Cantilever => "cantilever",
            Case::Staircase => "staircase",
        }
    }
}

/// A bulk modulus in Pa, or the word `"incompressible"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusValue(pub Modulus<f64>);

impl Serialize for ModulusValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Modulus::Finite(v) => s.serialize_f64(v),
            Modulus::Incompressible => s.serialize_str("incompressible"),
        }
    }
}

impl<'de> Deserialize<'de> for ModulusValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ModulusValue;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a modulus in Pa or \"incompressible\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ModulusValue, E> {
                Ok(ModulusValue(Modulus::Finite(v)))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ModulusValue, E> {
                Ok(ModulusValue(Modulus::Finite(v as f64)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ModulusValue, E> {
                match v {
                    "incompressible" | "inf" => Ok(ModulusValue(Modulus::Incompressible)),
                    _ => Err(E::custom(format!("expected a number or \"incompressible\", got \"{v}\""))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Case selection plus optional overrides of the case defaults. Keys that
/// do not belong to the selected case are rejected at validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub case: Case,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_dr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub viscosity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_f: Option<f64>,

    // cantilever
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nz: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_s: Option<ModulusValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_f: Option<ModulusValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permeability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub force: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<Duration>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freeze_at: Option<Duration>,

    // staircase
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel_permeability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel_phi0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier_phi0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub injection_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub injection_duration: Option<Duration>,
}

impl ScenarioSection {
    pub fn new(case: Case) -> Self {
        ScenarioSection {
            case,
            k_dr: None,
            nu: None,
            viscosity: None,
            rho_f: None,
            nx: None,
            nz: None,
            length: None,
            height: None,
            thickness: None,
            k_s: None,
            k_f: None,
            phi0: None,
            permeability: None,
            force: None,
            period: None,
            freeze_at: None,
            n: None,
            cell_size: None,
            channel_permeability: None,
            channel_phi0: None,
            barrier_phi0: None,
            injection_rate: None,
            injection_duration: None,
        }
    }

    fn foreign_keys(&self) -> Vec<&'static str> {
        let cantilever = [
            ("nx", self.nx.is_some()),
            ("nz", self.nz.is_some()),
            ("length", self.length.is_some()),
            ("height", self.height.is_some()),
            ("thickness", self.thickness.is_some()),
            ("k_s", self.k_s.is_some()),
            ("k_f", self.k_f.is_some()),
            ("phi0", self.phi0.is_some()),
            ("permeability", self.permeability.is_some()),
            ("force", self.force.is_some()),
            ("period", self.period.is_some()),
            ("freeze_at", self.freeze_at.is_some()),
        ];
        let staircase = [
            ("n", self.n.is_some()),
            ("cell_size", self.cell_size.is_some()),
            ("channel_permeability", self.channel_permeability.is_some()),
            ("channel_phi0", self.channel_phi0.is_some()),
            ("barrier_phi0", self.barrier_phi0.is_some()),
            ("injection_rate", self.injection_rate.is_some()),
            ("injection_duration", self.injection_duration.is_some()),
        ];
        let other: &[(&'static str, bool)] = match self.case {
            Case::Cantilever => &staircase,
            Case::Staircase => &cantilever,
        };
        other.iter().filter(|(_, set)| *set).map(|(k, _)| *k).collect()
    }

    pub fn build(&self) -> Result<Scenario<f64>> {
        if let Some(k) = self.foreign_keys().first() {
            return Err(Error::config(format!("scenario.{k}: not a {} parameter", self.case.token())));
        }
        match self.case {
            Case::Cantilever => {
                let d = CantileverOptions::default();
                let opts = CantileverOptions {
                    nx: self.nx.unwrap_or(d.nx),
                    nz: self.nz.unwrap_or(d.nz),
                    length: self.length.unwrap_or(d.length),
                    height: self.height.unwrap_or(d.height),
                    thickness: self.thickness.unwrap_or(d.thickness),
                    k_dr: self.k_dr.unwrap_or(d.k_dr),
                    nu: self.nu.unwrap_or(d.nu),
                    k_s: self.k_s.map_or(d.k_s, |m| m.0),
                    k_f: self.k_f.map_or(d.k_f, |m| m.0),
                    phi0: self.phi0.unwrap_or(d.phi0),
                    permeability: self.permeability.unwrap_or(d.permeability),
                    viscosity: self.viscosity.unwrap_or(d.viscosity),
                    rho_f: self.rho_f.unwrap_or(d.rho_f),
                    force: self.force.unwrap_or(d.force),
                    period: self.period.map_or(d.period, Duration::seconds),
                    freeze_at: self.freeze_at.map(Duration::seconds).or(d.freeze_at),
                };
                build_cantilever(&opts)
            }
            Case::Staircase => {
                let d = StaircaseOptions::default();
                let opts = StaircaseOptions {
                    n: self.n.unwrap_or(d.n),
                    cell_size: self.cell_size.unwrap_or(d.cell_size),
                    k_dr: self.k_dr.unwrap_or(d.k_dr),
                    nu: self.nu.unwrap_or(d.nu),
                    channel_permeability: self.channel_permeability.unwrap_or(d.channel_permeability),
                    channel_phi0: self.channel_phi0.unwrap_or(d.channel_phi0),
                    barrier_phi0: self.barrier_phi0.unwrap_or(d.barrier_phi0),
                    viscosity: self.viscosity.unwrap_or(d.viscosity),
                    rho_f: self.rho_f.unwrap_or(d.rho_f),
                    injection_rate: self.injection_rate.unwrap_or(d.injection_rate),
                    injection_duration: self.injection_duration.map_or(d.injection_duration, Duration::seconds),
                };
                build_staircase(&opts)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Fim,
    Fs,
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fim" => Ok(SchemeKind::Fim),
            "fs" => Ok(SchemeKind::Fs),
            _ => Err(Error::config(format!("unknown scheme '{s}' (use fim or fs)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FsFormKind {
    StressRate,
    Porosity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    #[serde(rename = "type")]
    pub kind: SchemeKind,
    #[serde(default = "one")]
    pub fs_iterations: usize,
    #[serde(default = "stress_rate")]
    pub fs_form: FsFormKind,
}

fn one() -> usize {
    1
}

fn stress_rate() -> FsFormKind {
    FsFormKind::StressRate
}

impl Default for SchemeSection {
    fn default() -> Self {
        SchemeSection { kind: SchemeKind::Fim, fs_iterations: 1, fs_form: FsFormKind::StressRate }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilizationSection {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "unit")]
    pub c: f64,
    /// Region ids; defaults to the scenario's own stabilization regions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<Vec<usize>>,
}

fn unit() -> f64 {
    1.0
}

impl Default for StabilizationSection {
    fn default() -> Self {
        StabilizationSection { enabled: false, c: 1.0, regions: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    pub dt: Duration,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Write a snapshot every this many steps; 0 writes none.
    #[serde(default = "one")]
    pub snapshot_stride: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: None, snapshot_stride: 1 }
    }
}

/// Thresholds used to label runs in manifests and summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    #[serde(default = "oscillatory")]
    pub oscillatory_threshold: f64,
    #[serde(default = "smooth")]
    pub smooth_threshold: f64,
}

fn oscillatory() -> f64 {
    OSCILLATORY_THRESHOLD
}

fn smooth() -> f64 {
    SMOOTH_THRESHOLD
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection { oscillatory_threshold: OSCILLATORY_THRESHOLD, smooth_threshold: SMOOTH_THRESHOLD }
    }
}

impl AnalysisSection {
    pub fn label(&self, index: f64) -> &'static str {
        if index > self.oscillatory_threshold {
            "oscillatory"
        } else if index < self.smooth_threshold {
            "smooth"
        } else {
            "intermediate"
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub scheme: SchemeSection,
    #[serde(default)]
    pub stabilization: StabilizationSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub schedule: Vec<ScheduleEntry>,
}

/// Command-line overrides applied on top of a parsed config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub scheme: Option<SchemeKind>,
    pub dt: Option<Duration>,
    pub steps: Option<usize>,
    pub stabilization: Option<bool>,
    pub c: Option<f64>,
    pub out: Option<PathBuf>,
}

/// Parses and validates a config.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn new(case: Case) -> Self {
        RunConfig {
            scenario: ScenarioSection::new(case),
            scheme: SchemeSection::default(),
            stabilization: StabilizationSection::default(),
            analysis: AnalysisSection::default(),
            output: OutputSection::default(),
            schedule: Vec::new(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Checks everything that does not need a run: keys, ranges, and that
    /// the scenario builds.
    pub fn validate(&self) -> Result<()> {
        if self.scheme.fs_iterations == 0 {
            return Err(Error::config("scheme.fs_iterations: must be at least 1"));
        }
        if self.stabilization.enabled && !(self.stabilization.c > 0.0 && self.stabilization.c.is_finite()) {
            return Err(Error::config(format!("stabilization.c: must be positive, got {}", self.stabilization.c)));
        }
        for (i, e) in self.schedule.iter().enumerate() {
            if !(e.dt.seconds() > 0.0) || !e.dt.seconds().is_finite() {
                return Err(Error::config(format!("schedule[{i}].dt: must be positive, got {}", e.dt)));
            }
            if e.steps == 0 {
                return Err(Error::config(format!("schedule[{i}].steps: must be at least 1")));
            }
        }
        let a = &self.analysis;
        if !(a.smooth_threshold >= 0.0 && a.smooth_threshold <= a.oscillatory_threshold && a.oscillatory_threshold <= 1.0) {
            return Err(Error::config("analysis: need 0 <= smooth_threshold <= oscillatory_threshold <= 1"));
        }
        let scenario = self.scenario.build()?;
        if let Some(regions) = &self.stabilization.regions {
            if let Some(r) = regions.iter().find(|&&r| r >= scenario.materials.len()) {
                return Err(Error::config(format!("stabilization.regions: region {r} does not exist")));
            }
        }
        Ok(())
    }

    /// Applies command-line overrides. `--dt`/`--steps` replace the schedule
    /// only when the config has none; otherwise the schedule is ambiguous.
    pub fn apply(mut self, o: &Overrides) -> Result<Self> {
        if let Some(kind) = o.scheme {
            self.scheme.kind = kind;
        }
        if let Some(on) = o.stabilization {
            self.stabilization.enabled = on;
        }
        if let Some(c) = o.c {
            self.stabilization.c = c;
        }
        if let Some(dir) = &o.out {
            self.output.dir = Some(dir.clone());
        }
        match (o.dt, o.steps) {
            (None, None) => {}
            _ if !self.schedule.is_empty() => {
                return Err(Error::config("ambiguous schedule: --dt/--steps given but the config already has [[schedule]]"));
            }
            (Some(dt), Some(steps)) => self.schedule = vec![ScheduleEntry { dt, steps }],
            _ => return Err(Error::config("--dt and --steps must be given together")),
        }
        self.validate()?;
        Ok(self)
    }

    pub fn scenario(&self) -> Result<Scenario<f64>> {
        self.scenario.build()
    }

    pub fn scheme_config(&self, scenario: &Scenario<f64>) -> SchemeConfig<f64> {
        let stabilization = if self.stabilization.enabled {
            StabilizationConfig {
                enabled: true,
                c: self.stabilization.c,
                region_mask: self.stabilization.regions.clone().unwrap_or_else(|| scenario.stabilization_regions.clone()),
            }
        } else {
            StabilizationConfig::disabled()
        };
        SchemeConfig {
            scheme: match self.scheme.kind {
                SchemeKind::Fim => Scheme::FullyImplicit,
                SchemeKind::Fs => Scheme::FixedStress,
            },
            fs_iterations: self.scheme.fs_iterations,
            fs_form: match self.scheme.fs_form {
                FsFormKind::StressRate => FsForm::StressRate,
                FsFormKind::Porosity => FsForm::Porosity,
            },
            stabilization,
        }
    }

    /// `[(δt, steps)]`, erroring if empty.
    pub fn schedule(&self) -> Result<Vec<(f64, usize)>> {
        if self.schedule.is_empty() {
            return Err(Error::config("schedule: empty; add [[schedule]] entries or pass --dt and --steps"));
        }
        Ok(self.schedule.iter().map(|e| (e.dt.seconds(), e.steps)).collect())
    }

    pub fn total_time(&self) -> f64 {
        self.schedule.iter().map(|e| e.dt.seconds() * e.steps as f64).sum()
    }
}
