use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Where a Sobolev constant comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ExactEigenvalue,
    UserSupplied,
    ConservativeEstimate,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ExactEigenvalue => "exact-eigenvalue",
            Self::UserSupplied => "user-supplied",
            Self::ConservativeEstimate => "conservative-estimate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevEntry {
    pub p: u32,
    pub value: f64,
    pub provenance: Provenance,
}

/// Constants of `‖u‖_{L^p} ≤ C_s(p) ‖∇u‖_{L^2}` on `H¹₀(Ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevConstants {
    pub entries: Vec<SobolevEntry>,
}

/// Hölder exponent used for the De Giorgi bound: 8 in 2D, 6 in 3D.
pub fn default_degiorgi_exponent(dim: usize) -> u32 {
    if dim == 2 {
        8
    } else {
        6
    }
}

impl SobolevConstants {
    /// Shipped constants for the unit square (`dim = 2`) or unit cube (`dim = 3`).
    ///
    /// `C_s(2) = 1/√λ₁` with `λ₁ = dπ²`. In 2D `C_s(8) = √2` follows from the
    /// Gagliardo inequality `‖w‖₂ ≤ ‖∇w‖₁/(2√2)` applied to `w = |u|⁴` and
    /// Hölder on a domain of unit measure. In 3D `C_s(6)` is the sharp
    /// whole-space constant `(3π)^{-1/2} (4/√π)^{1/3}`, valid for functions
    /// extended by zero.
    pub fn unit_domain(dim: usize) -> Self {
        let c2 = 1.0 / (PI * (dim as f64).sqrt());
        let higher = if dim == 2 {
            SobolevEntry {
                p: 8,
                value: 2.0_f64.sqrt(),
                provenance: Provenance::ConservativeEstimate,
            }
        } else {
            SobolevEntry {
                p: 6,
                value: (4.0 / PI.sqrt()).cbrt() / (3.0 * PI).sqrt(),
                provenance: Provenance::ConservativeEstimate,
            }
        };
        Self {
            entries: vec![
                SobolevEntry {
                    p: 2,
                    value: c2,
                    provenance: Provenance::ExactEigenvalue,
                },
                higher,
            ],
        }
    }

    pub fn get(&self, p: u32) -> Result<SobolevEntry, AnalysisError> {
        self.entries
            .iter()
            .find(|e| e.p == p)
            .copied()
            .ok_or(AnalysisError::MissingConstant { p })
    }

    pub fn c_s_2(&self) -> Result<f64, AnalysisError> {
        Ok(self.get(2)?.value)
    }

    /// Inserts or replaces `C_s(p)` as a user-supplied value.
    pub fn set_user(&mut self, p: u32, value: f64) {
        let entry = SobolevEntry {
            p,
            value,
            provenance: Provenance::UserSupplied,
        };
        match self.entries.iter_mut().find(|e| e.p == p) {
            Some(e) => *e = entry,
            None => self.entries.push(entry),
        }
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        for e in &self.entries {
            if !(e.value > 0.0 && e.value.is_finite()) {
                return Err(AnalysisError::InvalidInput(format!("C_s({}) = {} is not positive", e.p, e.value)));
            }
            if e.p < 2 {
                return Err(AnalysisError::InvalidInput(format!("exponent p = {} below 2", e.p)));
            }
        }
        Ok(())
    }
}
