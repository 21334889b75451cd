//! `qfi sweep`: one CSV row per grid point.

use rayon::prelude::*;

use super::format::fmt_g;
use super::settings::{Column, KappaChoice, Settings, Spacing, Variable};
use super::CliError;
use crate::channel::NoiseParams;
use crate::closedform::{
    betas, kappa_opt, n_opt_analytic, qfi, qfi_asymptotic, qfi_separable, ProbeConfig,
};
use crate::optimize::{optimize_n, partial_vs_maximal_entanglement, OptimalSetting, DEFAULT_N_MAX};

const DEFAULT_COLUMNS: [Column; 2] = [Column::Qfi, Column::QfiSeparable];

#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    param: Option<f64>,
    n: usize,
}

/// Validated sweep description.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    settings: Settings,
    points: Vec<Point>,
    columns: Vec<Column>,
    kappa: KappaChoice,
    n_max: usize,
    inactive: bool,
    has_param: bool,
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("sweep needs --{name}")))
}

/// `steps` values from `start` to `stop` inclusive.
pub fn grid_values(
    start: f64,
    stop: f64,
    steps: usize,
    spacing: Spacing,
) -> Result<Vec<f64>, CliError> {
    if steps < 2 {
        return Err(CliError::Usage(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    if !(start.is_finite() && stop.is_finite() && start < stop) {
        return Err(CliError::Usage(format!(
            "need start < stop, got [{start}, {stop}]"
        )));
    }
    let last = (steps - 1) as f64;
    let values = match spacing {
        Spacing::Linear => (0..steps)
            .map(|i| {
                if i == steps - 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / last
                }
            })
            .collect(),
        Spacing::Log => {
            if start <= 0.0 {
                return Err(CliError::Usage(format!(
                    "log spacing needs start > 0, got {start}"
                )));
            }
            let (a, b) = (start.ln(), stop.ln());
            (0..steps)
                .map(|i| match i {
                    0 => start,
                    i if i == steps - 1 => stop,
                    i => (a + (b - a) * i as f64 / last).exp(),
                })
                .collect()
        }
    };
    Ok(values)
}

impl SweepPlan {
    pub fn new(settings: Settings) -> Result<Self, CliError> {
        let variable = need(settings.variable, "variable")?;
        let start = need(settings.start, "start")?;
        let stop = need(settings.stop, "stop")?;
        let spacing = settings.spacing.unwrap_or(Spacing::Linear);
        let columns = settings
            .columns
            .clone()
            .unwrap_or_else(|| DEFAULT_COLUMNS.to_vec());
        if columns.is_empty() {
            return Err(CliError::Usage("no output columns selected".into()));
        }
        let kappa = settings.kappa.unwrap_or(KappaChoice::Value(0.5));
        let n_max = settings.n_max.unwrap_or(DEFAULT_N_MAX);
        let has_param = settings.preset.is_some_and(|k| k.takes_param());

        let points: Vec<Point> = match variable {
            Variable::Param => {
                if !has_param {
                    return Err(CliError::Usage(
                        "variable = param needs a preset with a scalar parameter".into(),
                    ));
                }
                if settings.param.is_some() || settings.params.is_some() {
                    return Err(CliError::Usage(
                        "--param/--params conflict with variable = param".into(),
                    ));
                }
                let steps = need(settings.steps, "steps")?;
                let n = settings.n.unwrap_or(1);
                grid_values(start, stop, steps, spacing)?
                    .into_iter()
                    .map(|p| Point { param: Some(p), n })
                    .collect()
            }
            Variable::N => {
                if settings.n.is_some() {
                    return Err(CliError::Usage("--n conflicts with variable = n".into()));
                }
                if start < 1.0 {
                    return Err(CliError::Usage(format!(
                        "probe sizes start at 1, got {start}"
                    )));
                }
                let sizes: Vec<usize> = match settings.steps {
                    None if spacing == Spacing::Linear => {
                        (start.round() as usize..=stop.round() as usize).collect()
                    }
                    None => return Err(CliError::Usage("log spacing over n needs --steps".into())),
                    Some(steps) => {
                        let mut v: Vec<usize> = grid_values(start, stop, steps, spacing)?
                            .into_iter()
                            .map(|x| x.round() as usize)
                            .collect();
                        v.dedup();
                        v
                    }
                };
                let params: Vec<Option<f64>> = match (&settings.params, settings.param) {
                    (Some(_), Some(_)) => {
                        return Err(CliError::Usage("give --param or --params, not both".into()))
                    }
                    (Some(list), None) => list.iter().map(|&p| Some(p)).collect(),
                    (None, p) => vec![p],
                };
                params
                    .into_iter()
                    .flat_map(|param| sizes.iter().map(move |&n| Point { param, n }))
                    .collect()
            }
        };
        if points.is_empty() {
            return Err(CliError::Usage("empty sweep grid".into()));
        }
        let plan = Self {
            inactive: settings.inactive.unwrap_or(false),
            settings,
            points,
            columns,
            kappa,
            n_max,
            has_param,
        };
        // surface range errors before any output is produced
        for p in &plan.points {
            plan.settings.noise_at(p.param)?;
            if let Some(n1) = plan.settings.n_active {
                if n1 == 0 || n1 > p.n {
                    return Err(CliError::Usage(format!(
                        "n_active = {n1} does not fit a probe of n = {}",
                        p.n
                    )));
                }
            }
        }
        if let KappaChoice::Value(k) = kappa {
            if !(0.0..=1.0).contains(&k) {
                return Err(CliError::Usage(format!("kappa = {k} is outside [0, 1]")));
            }
        }
        Ok(plan)
    }

    pub fn header(&self) -> String {
        let mut cols = Vec::new();
        if self.has_param {
            cols.push("param");
        }
        cols.extend(["n", "n_active"]);
        cols.extend(self.columns.iter().map(|c| c.name()));
        cols.join(",")
    }

    fn kappa_for(
        &self,
        noise: &NoiseParams,
        n_total: usize,
        n_active: usize,
    ) -> crate::Result<f64> {
        match self.kappa {
            KappaChoice::Value(k) => Ok(k),
            KappaChoice::Opt => kappa_opt(noise, n_total, n_active),
        }
    }

    fn qfi_at(&self, noise: &NoiseParams, n_total: usize, n_active: usize) -> crate::Result<f64> {
        let k = self.kappa_for(noise, n_total, n_active)?;
        Ok(qfi(noise, &ProbeConfig::new(n_total, n_active, k)?).value)
    }

    fn row(&self, point: Point) -> Result<String, CliError> {
        let noise = self.settings.noise_at(point.param)?;
        let n = point.n;
        let n_active = self.settings.n_active.unwrap_or(n);
        let kappa = self.kappa_for(&noise, n, n_active)?;
        let probe = ProbeConfig::new(n, n_active, kappa)?;
        let best: Option<OptimalSetting> = if self.columns.iter().any(|c| c.needs_optimum()) {
            Some(optimize_n(
                &noise,
                self.kappa.policy(),
                self.n_max,
                self.inactive,
            )?)
        } else {
            None
        };
        let best = || best.expect("optimum computed for these columns");

        let mut cells = Vec::with_capacity(self.columns.len() + 3);
        if self.has_param {
            cells.push(fmt_g(point.param.expect("param preset")));
        }
        cells.push(n.to_string());
        cells.push(n_active.to_string());
        for &col in &self.columns {
            let cell = match col {
                Column::Qfi => fmt_g(qfi(&noise, &probe).value),
                Column::QfiFull => fmt_g(self.qfi_at(&noise, n, n)?),
                Column::QfiInactive => {
                    if n < 2 {
                        fmt_g(f64::NAN)
                    } else {
                        fmt_g(self.qfi_at(&noise, n, n - 1)?)
                    }
                }
                Column::QfiSeparable => fmt_g(qfi_separable(&noise, n_active)),
                Column::Kappa => fmt_g(kappa),
                Column::Beta0 => fmt_g(betas(&noise, &probe).beta0),
                Column::Beta1 => fmt_g(betas(&noise, &probe).beta1),
                Column::NOpt => best().n_opt.to_string(),
                Column::NOptAnalytic => fmt_g(analytic_n_opt(&noise)),
                Column::KappaOpt => fmt_g(best().kappa_opt),
                Column::FqMax => fmt_g(best().fq_max),
                Column::FqMaxAsymptotic => {
                    let b = best();
                    if self.inactive {
                        fmt_g(f64::NAN)
                    } else {
                        fmt_g(asymptotic(&noise, b.kappa_opt, b.n_opt))
                    }
                }
                Column::Ratio => fmt_g(best().ratio_vs_separable.unwrap_or(f64::NAN)),
                Column::PerQubit => fmt_g(best().fq_per_qubit),
                Column::PerQubitSeparable => fmt_g(noise.mu2() * noise.mu2()),
                Column::FqOverNSq => fmt_g(best().fq_over_n_sq),
                Column::PartialVsMaximal => {
                    fmt_g(partial_vs_maximal_entanglement(&noise, self.n_max)?)
                }
            };
            cells.push(cell);
        }
        Ok(cells.join(","))
    }

    /// Full CSV text: metadata, header and rows in grid order.
    pub fn render(&self) -> Result<String, CliError> {
        let rows = self
            .points
            .par_iter()
            .map(|&p| self.row(p))
            .collect::<Result<Vec<String>, CliError>>()?;
        let mut out = super::metadata("sweep", &self.settings);
        out.push_str(&self.header());
        out.push('\n');
        for r in rows {
            out.push_str(&r);
            out.push('\n');
        }
        Ok(out)
    }
}

/// Large-N optimum, using the mirror symmetry when `μ0 < 0`.
fn analytic_n_opt(noise: &NoiseParams) -> f64 {
    let n = if noise.mu0() < 0.0 {
        noise.mirrored()
    } else {
        *noise
    };
    n_opt_analytic(&n).unwrap_or(f64::NAN)
}

fn asymptotic(noise: &NoiseParams, kappa: f64, n: usize) -> f64 {
    let r = if noise.mu0() < 0.0 {
        qfi_asymptotic(&noise.mirrored(), 1.0 - kappa, n)
    } else {
        qfi_asymptotic(noise, kappa, n)
    };
    r.unwrap_or(f64::NAN)
}
