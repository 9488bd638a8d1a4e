use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    PolytopeInfo,
    PolytopeEhrhart,
    BpGrid,
    RegionGrid,
    SzegoConverge,
    SzegoMassGrid,
    CharacterTable,
    CharacterTodd1d,
    PsiGrid,
    PsiRankMap,
    PsiBkCheck,
    EnsembleM1,
    EnsembleTentacles,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub rho_min: f64,
    pub rho_max: f64,
    /// Points per axis.
    pub steps: usize,
}

impl Grid {
    /// Row-major points of the grid in `ρ ∈ [rho_min, rho_max]^m`, last axis fastest.
    pub fn points(&self, m: usize) -> Vec<Vec<f64>> {
        let axis: Vec<f64> = (0..self.steps)
            .map(|i| {
                if self.steps == 1 {
                    0.5 * (self.rho_min + self.rho_max)
                } else {
                    self.rho_min + (self.rho_max - self.rho_min) * i as f64 / (self.steps - 1) as f64
                }
            })
            .collect();
        let mut out = vec![Vec::new()];
        for _ in 0..m {
            out = out
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_threshold: Option<f64>,
}

impl Tolerances {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

/// Everything needed to reproduce one output file. The output path is
/// accepted on input but never echoed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polytope_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(default, rename = "N_list", skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Evaluation point in `ρ = log|z|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    /// Complex exponent `w` as `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facet: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Tolerances::is_empty")]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing)]
    pub out_path: Option<String>,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            polytope_path: None,
            grid: None,
            n: None,
            n_list: None,
            seed: None,
            samples: None,
            point: None,
            w: None,
            interval: None,
            max_order: None,
            facet: None,
            resolution: None,
            tolerances: Tolerances::default(),
            out_path: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    /// Canonical one-line JSON echo.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        use Command::*;
        let missing = |what: &str| Err(CliError::Config(format!("{:?} requires `{what}`", self.command)));
        if self.command != CharacterTodd1d && self.polytope_path.is_none() {
            return missing("polytope_path");
        }
        let needs_grid = matches!(self.command, BpGrid | RegionGrid | SzegoMassGrid | PsiGrid | PsiRankMap);
        if needs_grid {
            match &self.grid {
                None => return missing("grid"),
                Some(g) if g.steps == 0 || g.steps > 100_000 => {
                    return Err(CliError::Config(format!("grid.steps = {} out of range", g.steps)));
                }
                Some(g) if !(g.rho_min.is_finite() && g.rho_max.is_finite() && g.rho_min <= g.rho_max) => {
                    return Err(CliError::Config("grid needs finite rho_min ≤ rho_max".into()));
                }
                _ => {}
            }
        }
        if matches!(self.command, SzegoConverge | SzegoMassGrid | CharacterTable) {
            match &self.n_list {
                None => return missing("N_list"),
                Some(l) if l.is_empty() || l.iter().any(|&n| n < 1) => {
                    return Err(CliError::Config("N_list entries must be ≥ 1".into()));
                }
                _ => {}
            }
        }
        if matches!(self.command, CharacterTodd1d | EnsembleM1 | EnsembleTentacles) {
            match self.n {
                None => return missing("N"),
                Some(n) if n < 1 => return Err(CliError::Config("N must be ≥ 1".into())),
                _ => {}
            }
        }
        if matches!(self.command, EnsembleM1 | EnsembleTentacles) {
            if self.seed.is_none() {
                return missing("seed");
            }
            match self.samples {
                None => return missing("samples"),
                Some(0) => return Err(CliError::Config("samples must be ≥ 1".into())),
                _ => {}
            }
        }
        if self.command == SzegoConverge && self.point.is_none() {
            return missing("point");
        }
        if matches!(self.command, CharacterTable | CharacterTodd1d) && self.w.is_none() {
            return missing("w");
        }
        if self.command == CharacterTodd1d {
            if self.interval.is_none() {
                return missing("interval");
            }
            if self.w.as_ref().map(Vec::len) != Some(1) {
                return Err(CliError::Config("character-todd1d takes exactly one w".into()));
            }
        }
        if self.command == PsiBkCheck && self.resolution == Some(0) {
            return Err(CliError::Config("resolution must be ≥ 1".into()));
        }
        for (name, v) in [
            ("transition", self.tolerances.transition),
            ("fd_step", self.tolerances.fd_step),
            ("rank_threshold", self.tolerances.rank_threshold),
        ] {
            if let Some(x) = v {
                if !(x.is_finite() && x > 0.0) {
                    return Err(CliError::Config(format!("tolerance {name} must be positive")));
                }
            }
        }
        Ok(())
    }
}
