use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::analysis::{default_degiorgi_exponent, SobolevConstants};
use crate::solver::NewtonConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    #[default]
    Convergence,
    Degradation,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    /// Cells per side of the base grid; 4 in 2D and 2 in 3D when unset.
    pub n: Option<usize>,
    /// Zigzag shear of interior rows; 0 gives the regular grid.
    pub shear: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserConstant {
    pub p: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    /// Overrides of `C_s(p)`, recorded as user-supplied.
    pub sobolev: Vec<UserConstant>,
    /// Hölder exponent for the De Giorgi bound; 8 in 2D and 6 in 3D when unset.
    pub degiorgi_p: Option<u32>,
    /// Regularity exponents of the exact and dual solutions, echoed in reports.
    pub regularity_s: f64,
    pub regularity_t: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        Self {
            sobolev: Vec::new(),
            degiorgi_p: None,
            regularity_s: 2.0,
            regularity_t: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DegradationConfig {
    /// Shortest-edge bisections between solves.
    pub batch_size: usize,
    pub batches: usize,
}

impl Default for DegradationConfig {
    fn default() -> Self {
        Self {
            batch_size: 5,
            batches: 12,
        }
    }
}

/// Study configuration. Every field is optional in the JSON file.
///
/// | field | default |
/// |---|---|
/// | `study` | `"convergence"` |
/// | `dim` | 2 |
/// | `p` | 11 in 2D, 5 in 3D |
/// | `mesh.n` | 4 in 2D, 2 in 3D |
/// | `mesh.shear` | 0 |
/// | `levels` | 5 in 2D, 3 in 3D |
/// | `newton` | solver defaults |
/// | `constants` | shipped unit-domain constants |
/// | `degradation` | 12 batches of 5 bisections |
/// | `probe_samples` | 64 |
/// | `seed` | 0 |
/// | `output_path` | none |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub study: StudyKind,
    pub dim: usize,
    pub p: Option<u32>,
    pub mesh: MeshConfig,
    pub levels: Option<usize>,
    pub newton: NewtonConfig,
    pub constants: ConstantsConfig,
    pub degradation: DegradationConfig,
    /// Random test functions per level for the Lipschitz probe; 0 disables it.
    pub probe_samples: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            study: StudyKind::Convergence,
            dim: 2,
            p: None,
            mesh: MeshConfig::default(),
            levels: None,
            newton: NewtonConfig::default(),
            constants: ConstantsConfig::default(),
            degradation: DegradationConfig::default(),
            probe_samples: 64,
            seed: 0,
            output_path: None,
        }
    }
}

impl StudyConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn p(&self) -> u32 {
        self.p.unwrap_or(if self.dim == 3 { 5 } else { 11 })
    }

    pub fn base_n(&self) -> usize {
        self.mesh.n.unwrap_or(if self.dim == 3 { 2 } else { 4 })
    }

    pub fn levels(&self) -> usize {
        self.levels.unwrap_or(if self.dim == 3 { 3 } else { 5 })
    }

    pub fn degiorgi_p(&self) -> u32 {
        self.constants.degiorgi_p.unwrap_or(default_degiorgi_exponent(self.dim))
    }

    /// Shipped unit-domain constants with the configured overrides applied.
    pub fn sobolev_constants(&self) -> SobolevConstants {
        let mut c = SobolevConstants::unit_domain(self.dim);
        for u in &self.constants.sobolev {
            c.set_user(u.p, u.value);
        }
        c
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |m: String| Err(HarnessError::Config(m));
        if self.dim != 2 && self.dim != 3 {
            return err(format!("dim must be 2 or 3, got {}", self.dim));
        }
        let p = self.p();
        if p < 1 {
            return err("p must be at least 1".into());
        }
        if p % 2 == 0 {
            return err(format!("even p = {p} makes b(s) = s^p non-monotone; use an odd exponent"));
        }
        if self.dim == 3 && p > 5 {
            return err(format!("p = {p} exceeds the critical growth exponent 5 in 3D"));
        }
        if self.levels() == 0 {
            return err("levels must be at least 1".into());
        }
        if self.base_n() == 0 {
            return err("mesh.n must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.mesh.shear) {
            return err(format!("mesh.shear must lie in [0, 1), got {}", self.mesh.shear));
        }
        if self.study == StudyKind::Degradation {
            if self.dim != 2 {
                return err("the degradation study requires dim = 2".into());
            }
            if self.degradation.batch_size == 0 {
                return err("degradation.batch_size must be at least 1".into());
            }
        }
        let dp = self.degiorgi_p();
        if (self.dim == 2 && dp <= 4) || (self.dim == 3 && dp != 6) {
            return err(format!("De Giorgi exponent {dp} is not admissible in {}D", self.dim));
        }
        self.newton.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        self.sobolev_constants()
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))
    }
}
