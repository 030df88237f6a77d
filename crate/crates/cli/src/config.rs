//! Run configuration: a single JSON document with a version field.
//!
//! A run is either a named scenario or an inline spec. All tolerances and
//! steps live here with documented defaults; unknown keys are rejected.

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use twistcal_core::expr::Expr;
use twistcal_core::grid::GridSpec;
use twistcal_core::immersion::Immersion;
use twistcal_core::scenarios::{self, Scenario};
use twistcal_core::twist::{
    default_fibre_samples, AsdFrameSource, NumericOptions, SpinorFrameSource, TwistSpec,
};

pub const CONFIG_VERSION: u32 = 1;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_STEP: f64 = 1e-5;
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fibre_samples: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub richardson: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecConfig {
    pub geometry: GeometryTag,
    pub immersion: ImmersionConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub one_form: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames: Option<FramesConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spinor_gauge: Option<SpinorGaugeConfig>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryTag {
    SpecialLagrangian,
    Associative,
    Coassociative,
    Cayley,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImmersionConfig {
    pub variables: Vec<String>,
    pub components: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FramesConfig {
    Adapted,
    /// Three fields of three component expressions each, in the fixed basis.
    Explicit(Vec<Vec<String>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinorGaugeConfig {
    GramSchmidt,
    /// Clifford-aligned with an explicit anti-self-dual field (3 components).
    Clifford(Vec<String>),
}

/// A fully resolved run: spec, grids, numeric options.
pub struct ResolvedRun {
    pub name: String,
    pub spec: TwistSpec,
    pub grid: GridSpec,
    pub fibre_samples: Vec<Vec<f64>>,
    pub tolerance: f64,
    pub expected_pass: Option<bool>,
    pub opts: NumericOptions,
    pub seed: u64,
    pub jobs: Option<usize>,
    /// The resolved configuration, echoed into reports.
    pub echo: serde_json::Value,
}

impl RunConfig {
    pub fn from_scenario_name(name: &str) -> RunConfig {
        RunConfig {
            version: CONFIG_VERSION,
            scenario: Some(name.to_string()),
            spec: None,
            grid: None,
            fibre_samples: None,
            tolerance: None,
            step: None,
            richardson: None,
            seed: None,
            jobs: None,
        }
    }

    pub fn parse(text: &str) -> anyhow::Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text).context("invalid configuration")?;
        if cfg.version != CONFIG_VERSION {
            bail!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                cfg.version
            );
        }
        if cfg.scenario.is_some() == cfg.spec.is_some() {
            bail!("config must set exactly one of 'scenario' or 'spec'");
        }
        Ok(cfg)
    }

    pub fn resolve(&self) -> anyhow::Result<ResolvedRun> {
        let seed = self.seed.unwrap_or(DEFAULT_SEED);
        let opts = NumericOptions {
            step: self.step.unwrap_or(DEFAULT_STEP),
            richardson: self.richardson.unwrap_or(true),
        };

        let (name, spec, grid, fibre, tol, expected) = if let Some(scn) = &self.scenario {
            let Scenario {
                name,
                spec,
                base_grid,
                fibre_samples,
                expected_pass,
                tolerance,
                ..
            } = scenarios::get(scn)?;
            (
                name.to_string(),
                spec,
                self.grid.clone().unwrap_or(base_grid),
                self.fibre_samples.clone().unwrap_or(fibre_samples),
                self.tolerance.unwrap_or(tolerance),
                Some(expected_pass),
            )
        } else {
            let sc = self.spec.as_ref().expect("validated");
            let spec = sc.build()?;
            let grid = self
                .grid
                .clone()
                .unwrap_or_else(|| GridSpec::square(-0.5, 0.5, 5));
            let fibre = self
                .fibre_samples
                .clone()
                .unwrap_or_else(|| default_fibre_samples(spec.fibre_dim(), seed));
            (
                "inline".to_string(),
                spec,
                grid,
                fibre,
                self.tolerance.unwrap_or(DEFAULT_TOLERANCE),
                None,
            )
        };

        Ok(ResolvedRun {
            name,
            spec,
            grid,
            fibre_samples: fibre,
            tolerance: tol,
            expected_pass: expected,
            opts,
            seed,
            jobs: self.jobs,
            echo: serde_json::to_value(self)?,
        })
    }
}

impl SpecConfig {
    pub fn build_immersion(&self) -> anyhow::Result<Immersion> {
        let vars: Vec<&str> = self.immersion.variables.iter().map(|s| s.as_str()).collect();
        let comps: Vec<&str> = self.immersion.components.iter().map(|s| s.as_str()).collect();
        Ok(Immersion::new(&vars, &comps)?)
    }

    fn asd_frames(&self, vars: &[&str]) -> anyhow::Result<AsdFrameSource> {
        match &self.frames {
            None | Some(FramesConfig::Adapted) => Ok(AsdFrameSource::Adapted),
            Some(FramesConfig::Explicit(rows)) => {
                if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
                    bail!("explicit frames need 3 fields of 3 components each");
                }
                let parse_row = |row: &Vec<String>| -> anyhow::Result<Vec<Expr>> {
                    row.iter()
                        .map(|s| Ok(Expr::parse(s, vars)?))
                        .collect()
                };
                Ok(AsdFrameSource::Explicit {
                    omega: [
                        parse_row(&rows[0])?,
                        parse_row(&rows[1])?,
                        parse_row(&rows[2])?,
                    ],
                })
            }
        }
    }

    pub fn build(&self) -> anyhow::Result<TwistSpec> {
        let imm = self.build_immersion()?;
        let vars: Vec<&str> = self.immersion.variables.iter().map(|s| s.as_str()).collect();
        match self.geometry {
            GeometryTag::SpecialLagrangian => {
                let mu = self
                    .one_form
                    .as_ref()
                    .ok_or_else(|| anyhow!("special-lagrangian spec needs 'one_form'"))?;
                let mu_refs: Vec<&str> = mu.iter().map(|s| s.as_str()).collect();
                let theta = self
                    .theta
                    .ok_or_else(|| anyhow!("special-lagrangian spec needs 'theta'"))?;
                Ok(TwistSpec::special_lagrangian(imm, &mu_refs, theta)?)
            }
            GeometryTag::Associative => {
                let alpha = self.alpha.as_deref().ok_or_else(|| anyhow!("needs 'alpha'"))?;
                let beta = self.beta.as_deref().ok_or_else(|| anyhow!("needs 'beta'"))?;
                Ok(TwistSpec::associative(imm, alpha, beta, self.asd_frames(&vars)?)?)
            }
            GeometryTag::Coassociative => {
                let gamma = self.gamma.as_deref().ok_or_else(|| anyhow!("needs 'gamma'"))?;
                Ok(TwistSpec::coassociative(imm, gamma, self.asd_frames(&vars)?)?)
            }
            GeometryTag::Cayley => {
                let alpha = self.alpha.as_deref().ok_or_else(|| anyhow!("needs 'alpha'"))?;
                let beta = self.beta.as_deref().ok_or_else(|| anyhow!("needs 'beta'"))?;
                let gauge = match &self.spinor_gauge {
                    None | Some(SpinorGaugeConfig::GramSchmidt) => SpinorFrameSource::GramSchmidt,
                    Some(SpinorGaugeConfig::Clifford(row)) => {
                        if row.len() != 3 {
                            bail!("clifford gauge needs 3 components");
                        }
                        SpinorFrameSource::CliffordAligned {
                            omega2: row
                                .iter()
                                .map(|s| Expr::parse(s, &vars))
                                .collect::<Result<_, _>>()?,
                        }
                    }
                };
                Ok(TwistSpec::cayley(imm, alpha, beta, gauge)?)
            }
        }
    }
}
