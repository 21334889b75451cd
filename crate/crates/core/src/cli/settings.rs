//! Effective run settings: command-line flags layered over an optional TOML
//! config file whose keys mirror the flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use super::format::fmt_g;
use super::CliError;
use crate::channel::{preset, NoiseParams, Preset, PresetKind};
use crate::optimize::KappaPolicy;

/// `--kappa`: a fixed Schmidt coefficient or `opt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaChoice {
    Value(f64),
    Opt,
}

impl KappaChoice {
    pub fn policy(self) -> KappaPolicy {
        match self {
            KappaChoice::Value(k) => KappaPolicy::Fixed(k),
            KappaChoice::Opt => KappaPolicy::OptimalPerN,
        }
    }
}

impl FromStr for KappaChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("opt") {
            return Ok(KappaChoice::Opt);
        }
        s.parse::<f64>()
            .map(KappaChoice::Value)
            .map_err(|_| format!("expected a real number or `opt`, got `{s}`"))
    }
}

impl fmt::Display for KappaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KappaChoice::Value(k) => f.write_str(&fmt_g(*k)),
            KappaChoice::Opt => f.write_str("opt"),
        }
    }
}

impl Serialize for KappaChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            KappaChoice::Value(k) => s.serialize_f64(*k),
            KappaChoice::Opt => s.serialize_str("opt"),
        }
    }
}

impl<'de> Deserialize<'de> for KappaChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(k) => Ok(KappaChoice::Value(k)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// What a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Variable {
    /// The preset's scalar parameter.
    Param,
    /// The probe size.
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// Sweep output columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Column {
    /// Fisher information at (n, n_active, kappa).
    Qfi,
    /// Same with every qubit active.
    QfiFull,
    /// Same with one inactive qubit.
    QfiInactive,
    /// `n_active μ2²`.
    QfiSeparable,
    /// Schmidt coefficient used for `qfi`.
    Kappa,
    Beta0,
    Beta1,
    NOpt,
    NOptAnalytic,
    KappaOpt,
    FqMax,
    /// Large-N form evaluated at `n_opt`.
    FqMaxAsymptotic,
    Ratio,
    PerQubit,
    PerQubitSeparable,
    FqOverNSq,
    PartialVsMaximal,
}

impl Column {
    pub fn name(self) -> &'static str {
        match self {
            Column::Qfi => "qfi",
            Column::QfiFull => "qfi_full",
            Column::QfiInactive => "qfi_inactive",
            Column::QfiSeparable => "qfi_separable",
            Column::Kappa => "kappa",
            Column::Beta0 => "beta0",
            Column::Beta1 => "beta1",
            Column::NOpt => "n_opt",
            Column::NOptAnalytic => "n_opt_analytic",
            Column::KappaOpt => "kappa_opt",
            Column::FqMax => "fq_max",
            Column::FqMaxAsymptotic => "fq_max_asymptotic",
            Column::Ratio => "ratio",
            Column::PerQubit => "per_qubit",
            Column::PerQubitSeparable => "per_qubit_separable",
            Column::FqOverNSq => "fq_over_n_sq",
            Column::PartialVsMaximal => "partial_vs_maximal",
        }
    }

    /// Whether the column needs a scan over the probe size.
    pub fn needs_optimum(self) -> bool {
        matches!(
            self,
            Column::NOpt
                | Column::KappaOpt
                | Column::FqMax
                | Column::FqMaxAsymptotic
                | Column::Ratio
                | Column::PerQubit
                | Column::FqOverNSq
        )
    }
}

/// Every setting a subcommand may read. Flag and config key names coincide
/// (with `-` spelled `_` in the config).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub preset: Option<PresetKind>,
    pub param: Option<f64>,
    pub mu: Option<f64>,
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
    pub omega_t: Option<f64>,
    pub n: Option<usize>,
    pub n_active: Option<usize>,
    pub kappa: Option<KappaChoice>,
    pub n_max: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub time: Option<f64>,
    pub inactive: Option<bool>,
    pub budget: Option<usize>,
    pub trials: Option<usize>,
    pub variable: Option<Variable>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub steps: Option<usize>,
    pub spacing: Option<Spacing>,
    pub params: Option<Vec<f64>>,
    pub columns: Option<Vec<Column>>,
}

macro_rules! overlay_fields {
    ($top:ident, $base:ident; $($f:ident),*) => {
        Settings { $($f: $top.$f.or($base.$f)),* }
    };
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Field-wise: values set in `self` win over `base`.
    pub fn over(self, base: Settings) -> Settings {
        overlay_fields!(self, base; preset, param, mu, mu1, mu2, omega_t, n, n_active, kappa, n_max,
            out, seed, time, inactive, budget, trials, variable, start, stop, steps, spacing, params, columns)
    }

    /// `key=value` pairs for the CSV metadata header. Paths are left out so
    /// that the same run writes the same bytes wherever it is written to.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                parts.push(format!("{k}={v}"));
            }
        };
        push("preset", self.preset.map(|p| p.to_string()));
        push("param", self.param.map(fmt_g));
        push("mu", self.mu.map(fmt_g));
        push("mu1", self.mu1.map(fmt_g));
        push("mu2", self.mu2.map(fmt_g));
        push("omega_t", self.omega_t.map(fmt_g));
        push("n", self.n.map(|v| v.to_string()));
        push("n_active", self.n_active.map(|v| v.to_string()));
        push("kappa", self.kappa.map(|v| v.to_string()));
        push("n_max", self.n_max.map(|v| v.to_string()));
        push("time", self.time.map(fmt_g));
        push("inactive", self.inactive.map(|v| v.to_string()));
        push("budget", self.budget.map(|v| v.to_string()));
        push("trials", self.trials.map(|v| v.to_string()));
        push("variable", self.variable.map(|v| value_name(&v)));
        push("start", self.start.map(fmt_g));
        push("stop", self.stop.map(fmt_g));
        push("steps", self.steps.map(|v| v.to_string()));
        push("spacing", self.spacing.map(|v| value_name(&v)));
        push(
            "params",
            self.params
                .as_ref()
                .map(|p| p.iter().map(|v| fmt_g(*v)).collect::<Vec<_>>().join(";")),
        );
        push(
            "columns",
            self.columns
                .as_ref()
                .map(|c| c.iter().map(|v| v.name()).collect::<Vec<_>>().join(";")),
        );
        parts.join(" ")
    }

    /// Noise channel, with `param` standing for the preset's scalar parameter.
    pub fn noise_at(&self, param: Option<f64>) -> Result<NoiseParams, CliError> {
        let kind = match self.preset {
            Some(k) => k,
            None if self.mu1.is_some() || self.mu2.is_some() => PresetKind::Custom,
            None => return Err(CliError::Usage("missing --preset".into())),
        };
        let need_param =
            || param.ok_or_else(|| CliError::Usage(format!("preset `{kind}` needs --param")));
        if !kind.takes_param() && param.is_some() {
            return Err(CliError::Usage(format!("preset `{kind}` takes no --param")));
        }
        let custom_only = self.mu1.is_some() || self.mu2.is_some() || self.omega_t.is_some();
        if kind != PresetKind::Custom && custom_only {
            return Err(CliError::Usage(format!(
                "--mu1, --mu2 and --omega-t only apply to the custom preset, not `{kind}`"
            )));
        }
        if self.mu.is_some() && !matches!(kind, PresetKind::Custom | PresetKind::Gad) {
            return Err(CliError::Usage(format!(
                "--mu does not apply to preset `{kind}`"
            )));
        }
        let p = match kind {
            PresetKind::Noiseless => Preset::Noiseless,
            PresetKind::Depolarizing => Preset::Depolarizing(need_param()?),
            PresetKind::PhaseFlip => Preset::PhaseFlip(need_param()?),
            PresetKind::AmplitudeDamping => Preset::AmplitudeDamping(need_param()?),
            PresetKind::Gad => Preset::GeneralizedAmplitudeDamping {
                mu1: need_param()?,
                mu: self
                    .mu
                    .ok_or_else(|| CliError::Usage("preset `gad` needs --mu".into()))?,
            },
            PresetKind::Custom => {
                let get = |v: Option<f64>, name: &str| {
                    v.ok_or_else(|| CliError::Usage(format!("custom noise needs --{name}")))
                };
                Preset::Custom {
                    mu: get(self.mu, "mu")?,
                    mu1: get(self.mu1, "mu1")?,
                    mu2: get(self.mu2, "mu2")?,
                    omega_t: self.omega_t.unwrap_or(0.0),
                }
            }
        };
        Ok(preset(p)?)
    }

    pub fn noise(&self) -> Result<NoiseParams, CliError> {
        self.noise_at(self.param)
    }
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_owned())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_choice_parses() {
        assert_eq!("opt".parse::<KappaChoice>().unwrap(), KappaChoice::Opt);
        assert_eq!(
            "0.25".parse::<KappaChoice>().unwrap(),
            KappaChoice::Value(0.25)
        );
        assert!("half".parse::<KappaChoice>().is_err());
    }

    #[test]
    fn config_round_trip_and_overlay() {
        let text = r#"
            preset = "amplitude-damping"
            kappa = "opt"
            n = 3
            n_active = 2
            variable = "param"
            start = 0.01
            stop = 0.99
            steps = 99
            spacing = "linear"
            columns = ["qfi_full", "qfi_inactive", "qfi_separable"]
        "#;
        let cfg: Settings = toml::from_str(text).unwrap();
        assert_eq!(cfg.preset, Some(PresetKind::AmplitudeDamping));
        assert_eq!(cfg.kappa, Some(KappaChoice::Opt));
        assert_eq!(cfg.columns.as_ref().unwrap()[1], Column::QfiInactive);

        let flags = Settings {
            n: Some(4),
            kappa: Some(KappaChoice::Value(0.5)),
            ..Settings::default()
        };
        let merged = flags.over(cfg);
        assert_eq!(merged.n, Some(4));
        assert_eq!(merged.n_active, Some(2));
        assert_eq!(merged.kappa, Some(KappaChoice::Value(0.5)));

        let numeric: Settings = toml::from_str("kappa = 1").unwrap();
        assert_eq!(numeric.kappa, Some(KappaChoice::Value(1.0)));
        assert!(toml::from_str::<Settings>("bogus = 1").is_err());
    }

    #[test]
    fn noise_from_flags() {
        let s = Settings {
            preset: Some(PresetKind::Depolarizing),
            param: Some(0.8),
            ..Settings::default()
        };
        assert_eq!(s.noise().unwrap().mu2(), 0.8);
        let custom = Settings {
            mu: Some(0.5),
            mu1: Some(0.6),
            mu2: Some(0.7),
            ..Settings::default()
        };
        assert_eq!(custom.noise().unwrap().mu(), 0.5);
        let missing = Settings {
            preset: Some(PresetKind::Depolarizing),
            ..Settings::default()
        };
        assert!(missing.noise().is_err());
        let stray = Settings {
            preset: Some(PresetKind::Noiseless),
            param: Some(0.3),
            ..Settings::default()
        };
        assert!(stray.noise().is_err());
    }

    #[test]
    fn column_names_agree_with_flag_values() {
        for c in Column::value_variants() {
            assert_eq!(c.name(), value_name(c));
        }
    }
}
