//! Run configuration: a TOML file merged under command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use jacspec::spectra::{Problem, SOLVER_TOL};
use jacspec::yamabe::Profile;
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    List,
    Spectrum,
    Verify,
    Sweep,
    Dtn,
    Yamabe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Constant,
    Quadratic,
    Gaussian,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesFile {
    pub pass_tol: Option<f64>,
    pub eq_tol: Option<f64>,
    pub solver_tol: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub param: Option<String>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputFile {
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YamabeFile {
    pub profile: Option<ProfileKind>,
    pub c: Option<f64>,
    pub amplitude: Option<f64>,
    pub lambda1: Option<f64>,
    pub sigma1: Option<f64>,
    pub sigma_invariant: Option<f64>,
    pub tau_invariant: Option<f64>,
}

/// The config file layout. Every key is optional; flags win.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<CommandKind>,
    pub scenario: Option<String>,
    pub suite: Option<String>,
    pub params: Option<BTreeMap<String, f64>>,
    pub level: Option<u32>,
    pub count: Option<usize>,
    pub problem: Option<Problem>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub tolerances: TolerancesFile,
    #[serde(default)]
    pub sweep: SweepFile,
    #[serde(default)]
    pub output: OutputFile,
    #[serde(default)]
    pub yamabe: YamabeFile,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::usage(format!("invalid config {}: {e}", path.display())))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub pass_tol: Option<f64>,
    pub eq_tol: f64,
    /// Largest accepted relative eigen-residual.
    pub solver_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| self.from + (self.to - self.from) * i as f64 / n as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct YamabeSpec {
    pub profile: Profile,
    pub amplitude: f64,
    pub lambda1: Option<f64>,
    pub sigma1: Option<f64>,
    pub sigma_invariant: Option<f64>,
    pub tau_invariant: Option<f64>,
}

/// Fully resolved configuration of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub scenario: Option<String>,
    pub suite: String,
    pub params: BTreeMap<String, f64>,
    pub level: u32,
    pub count: usize,
    pub problem: Problem,
    pub tolerances: Tolerances,
    pub sweep: Option<SweepSpec>,
    pub yamabe: YamabeSpec,
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Flag values; `None` means "not given".
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub scenario: Option<String>,
    pub suite: Option<String>,
    pub params: Vec<(String, f64)>,
    pub level: Option<u32>,
    pub count: Option<usize>,
    pub problem: Option<Problem>,
    pub pass_tol: Option<f64>,
    pub eq_tol: Option<f64>,
    pub solver_tol: Option<f64>,
    pub sweep_param: Option<String>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: Option<usize>,
    pub profile: Option<ProfileKind>,
    pub c: Option<f64>,
    pub amplitude: Option<f64>,
    pub lambda1: Option<f64>,
    pub sigma1: Option<f64>,
    pub sigma_invariant: Option<f64>,
    pub tau_invariant: Option<f64>,
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub threads: Option<usize>,
}

fn default_level(command: CommandKind) -> u32 {
    match command {
        CommandKind::Verify => 5,
        CommandKind::Sweep => 3,
        _ => 4,
    }
}

pub fn resolve(command: CommandKind, file: FileConfig, o: Overrides) -> Result<RunConfig, Failure> {
    let mut params = file.params.unwrap_or_default();
    params.extend(o.params);
    let sweep = match command {
        CommandKind::Sweep => {
            let missing = |k: &str| Failure::usage(format!("sweep needs --{k}"));
            let spec = SweepSpec {
                param: o.sweep_param.or(file.sweep.param).ok_or_else(|| missing("param"))?,
                from: o.from.or(file.sweep.from).ok_or_else(|| missing("from"))?,
                to: o.to.or(file.sweep.to).ok_or_else(|| missing("to"))?,
                steps: o.steps.or(file.sweep.steps).ok_or_else(|| missing("steps"))?,
            };
            if !(spec.from < spec.to) || spec.steps < 2 {
                return Err(Failure::usage("sweep needs from < to and steps >= 2"));
            }
            Some(spec)
        }
        _ => None,
    };
    let y = file.yamabe;
    let c = o.c.or(y.c).unwrap_or(0.5);
    let profile = match o.profile.or(y.profile).unwrap_or(ProfileKind::Constant) {
        ProfileKind::Constant => Profile::Constant,
        ProfileKind::Quadratic => Profile::Quadratic { c },
        ProfileKind::Gaussian => Profile::Gaussian,
    };
    let t = file.tolerances;
    let config = RunConfig {
        command,
        scenario: o.scenario.or(file.scenario),
        suite: o.suite.or(file.suite).unwrap_or_else(|| "all".into()),
        params,
        level: o.level.or(file.level).unwrap_or(default_level(command)),
        count: o.count.or(file.count).unwrap_or(6),
        problem: o.problem.or(file.problem).unwrap_or(Problem::Robin),
        tolerances: Tolerances {
            pass_tol: o.pass_tol.or(t.pass_tol),
            eq_tol: o.eq_tol.or(t.eq_tol).unwrap_or(5e-3),
            solver_tol: o.solver_tol.or(t.solver_tol).unwrap_or(10.0 * SOLVER_TOL),
        },
        sweep,
        yamabe: YamabeSpec {
            profile,
            amplitude: o.amplitude.or(y.amplitude).unwrap_or(1.0),
            lambda1: o.lambda1.or(y.lambda1),
            sigma1: o.sigma1.or(y.sigma1),
            sigma_invariant: o.sigma_invariant.or(y.sigma_invariant),
            tau_invariant: o.tau_invariant.or(y.tau_invariant),
        },
        report: o.report.or(file.output.report),
        csv: o.csv.or(file.output.csv),
        svg: o.svg.or(file.output.svg),
        threads: o.threads.or(file.threads),
    };
    if config.count == 0 {
        return Err(Failure::usage("--count must be at least 1"));
    }
    if config.threads == Some(0) {
        return Err(Failure::usage("--threads must be at least 1"));
    }
    for (name, x) in [("eq-tol", Some(config.tolerances.eq_tol)), ("pass-tol", config.tolerances.pass_tol), ("solver-tol", Some(config.tolerances.solver_tol))] {
        if x.is_some_and(|x| !(x.is_finite() && x >= 0.0)) {
            return Err(Failure::usage(format!("--{name} must be a non-negative number")));
        }
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str(
            "command = \"sweep\"\nlevel = 2\n[sweep]\nparam = \"rho\"\nfrom = 0.5\nto = 8.0\nsteps = 4\n[tolerances]\neq_tol = 0.01\n",
        )
        .unwrap();
        let o = Overrides {
            level: Some(3),
            ..Default::default()
        };
        let c = resolve(CommandKind::Sweep, file, o).unwrap();
        assert_eq!(c.level, 3);
        assert_eq!(c.tolerances.eq_tol, 0.01);
        assert_eq!(c.sweep.unwrap().values(), vec![0.5, 3.0, 5.5, 8.0]);
    }

    #[test]
    fn invalid_sweep_is_usage_error() {
        let o = Overrides {
            sweep_param: Some("rho".into()),
            from: Some(2.0),
            to: Some(1.0),
            steps: Some(3),
            ..Default::default()
        };
        assert_eq!(resolve(CommandKind::Sweep, FileConfig::default(), o).unwrap_err().code, 2);
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
    }
}
