//! TOML run configuration.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use transport_fem::cases::{DataSide, ProblemCase, Velocity};
use transport_fem::formulations::{Formulation, Method, StabilizationConfig};
use transport_fem::mesh::Perturbation;
use transport_fem::space::Continuity;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseKind {
    Smooth,
    Discontinuous,
    Zero,
    Polynomial,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSection {
    pub name: CaseKind,
    /// Velocity id 1, 2 or 3; ignored by `discontinuous` and `polynomial`.
    #[serde(default = "default_velocity")]
    pub velocity: u32,
    pub eps: Option<f64>,
    /// Constant velocity of the polynomial case.
    pub beta: Option<[f64; 2]>,
    /// Constant reaction of the polynomial case.
    pub sigma: Option<f64>,
    /// Coefficients of `c0 + c1 x + c2 y + c3 x² + c4 xy + c5 y²`.
    pub coeffs: Option<[f64; 6]>,
    pub speed_floor: Option<f64>,
}

fn default_velocity() -> u32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Gls,
    Cip,
    Dg,
}

impl From<MethodName> for Method {
    fn from(m: MethodName) -> Self {
        match m {
            MethodName::Gls => Method::Gls,
            MethodName::Cip => Method::Cip,
            MethodName::Dg => Method::Dg,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulationName {
    Standard,
    PrimalDual,
}

impl From<FormulationName> for Formulation {
    fn from(f: FormulationName) -> Self {
        match f {
            FormulationName::Standard => Formulation::Standard,
            FormulationName::PrimalDual => Formulation::PrimalDual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceName {
    Continuous,
    Discontinuous,
}

impl From<SpaceName> for Continuity {
    fn from(s: SpaceName) -> Self {
        match s {
            SpaceName::Continuous => Continuity::Continuous,
            SpaceName::Discontinuous => Continuity::Discontinuous,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideName {
    Inflow,
    Outflow,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSection {
    pub name: MethodName,
    pub formulation: FormulationName,
    #[serde(default = "default_degree")]
    pub degree: usize,
    /// Defaults to the space the method needs.
    pub space: Option<SpaceName>,
    pub gamma: Option<f64>,
    pub gamma_bc: Option<f64>,
    #[serde(default = "default_side")]
    pub data_side: SideName,
}

fn default_degree() -> usize {
    1
}

fn default_side() -> SideName {
    SideName::Inflow
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    pub levels: Vec<u32>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSection {
    pub amplitude: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub vtk: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub eps: Vec<f64>,
    pub gamma: Vec<f64>,
    #[serde(default = "default_sweep_n")]
    pub n: usize,
    #[serde(default = "default_sweep_formulations")]
    pub formulations: Vec<FormulationName>,
    /// Failed solves are reported in the table instead of failing the run.
    #[serde(default)]
    pub expect_failures: bool,
}

fn default_sweep_n() -> usize {
    64
}

fn default_sweep_formulations() -> Vec<FormulationName> {
    vec![FormulationName::PrimalDual, FormulationName::Standard]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: CaseSection,
    pub method: MethodSection,
    pub study: Option<StudySection>,
    pub perturbation: Option<PerturbationSection>,
    #[serde(default)]
    pub output: OutputSection,
    pub sweep: Option<SweepSection>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<(), CliError> {
        let m = &self.method;
        if !(1..=2).contains(&m.degree) {
            return Err(invalid(format!("degree must be 1 or 2, got {}", m.degree)));
        }
        let method = Method::from(m.name);
        if let Some(space) = m.space {
            let space = Continuity::from(space);
            if space != method.continuity() {
                return Err(CliError::Incompatible(format!(
                    "method {} requires a {} space, but space = {}",
                    method.name(),
                    continuity_name(method.continuity()),
                    continuity_name(space)
                )));
            }
        }
        if let Some(p) = self.perturbation {
            if !(0.0..0.3).contains(&p.amplitude) {
                return Err(invalid(format!(
                    "perturbation amplitude must lie in [0, 0.3), got {}",
                    p.amplitude
                )));
            }
        }
        if let Some(study) = &self.study {
            if study.levels.is_empty() {
                return Err(invalid("study.levels is empty".into()));
            }
            check_levels(&study.levels)?;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.eps.is_empty() || sweep.gamma.is_empty() || sweep.formulations.is_empty() {
                return Err(invalid(
                    "sweep needs non-empty eps, gamma and formulations".into(),
                ));
            }
            if method != Method::Cip {
                return Err(invalid(
                    "sweeps vary the CIP parameter; set method.name = \"cip\"".into(),
                ));
            }
            if sweep.n == 0 {
                return Err(invalid("sweep.n must be positive".into()));
            }
        } else if self.study.is_none() {
            return Err(invalid(
                "config needs a [study] or a [sweep] section".into(),
            ));
        }
        self.problem_case()?;
        Ok(())
    }

    pub fn problem_case(&self) -> Result<ProblemCase, CliError> {
        let c = &self.case;
        let mut case = match c.name {
            CaseKind::Smooth => ProblemCase::smooth(self.velocity()?),
            CaseKind::Zero => ProblemCase::zero(self.velocity()?),
            CaseKind::Discontinuous => ProblemCase::discontinuous(),
            CaseKind::Polynomial => {
                let (Some(beta), Some(sigma), Some(coeffs)) = (c.beta, c.sigma, c.coeffs) else {
                    return Err(invalid(
                        "polynomial case needs beta, sigma and coeffs".into(),
                    ));
                };
                ProblemCase::polynomial(beta, sigma, coeffs)
            }
        };
        if let Some(floor) = c.speed_floor {
            if !floor.is_finite() || floor <= 0.0 {
                return Err(invalid(format!(
                    "speed_floor must be positive, got {floor}"
                )));
            }
            case.speed_floor = floor;
        }
        Ok(case.with_data_side(self.data_side()))
    }

    fn velocity(&self) -> Result<Velocity, CliError> {
        let eps = self.case.eps.unwrap_or(0.05);
        Velocity::from_id(self.case.velocity, eps).map_err(|e| invalid(e.to_string()))
    }

    pub fn data_side(&self) -> DataSide {
        match self.method.data_side {
            SideName::Inflow => DataSide::Inflow,
            SideName::Outflow => DataSide::Outflow,
        }
    }

    pub fn stabilization(&self) -> StabilizationConfig {
        self.stabilization_for(self.method.formulation.into())
    }

    pub fn stabilization_for(&self, formulation: Formulation) -> StabilizationConfig {
        let m = &self.method;
        let mut cfg = StabilizationConfig::defaults(m.name.into(), formulation, m.degree)
            .with_data_side(self.data_side());
        if let Some(g) = m.gamma {
            cfg = cfg.with_gamma(g);
        }
        if let Some(g) = m.gamma_bc {
            cfg = cfg.with_gamma_bc(g);
        }
        cfg
    }

    pub fn perturbation(&self) -> Option<Perturbation> {
        self.perturbation.map(|p| Perturbation {
            amplitude: p.amplitude,
            seed: p.seed,
        })
    }
}

pub(crate) fn check_levels(levels: &[u32]) -> Result<(), CliError> {
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid(format!(
            "levels must be strictly ascending, got {levels:?}"
        )));
    }
    if let Some(l) = levels.iter().find(|&&l| l > 10) {
        return Err(invalid(format!("level {l} is too fine (at most 10)")));
    }
    Ok(())
}

fn continuity_name(c: Continuity) -> &'static str {
    match c {
        Continuity::Continuous => "continuous",
        Continuity::Discontinuous => "discontinuous",
    }
}

fn invalid(msg: String) -> CliError {
    CliError::Config(msg)
}
