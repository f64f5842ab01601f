//! The De Giorgi iteration lemma: if a non-negative, non-increasing `ψ`
//! satisfies `ψ(s) ≤ (A/(s - r))^α ψ(r)^β` for all `s > r ≥ s₀` with `β > 1`,
//! then `ψ` vanishes beyond `s₀ + A 2^{β/(β-1)} ψ(s₀)^{(β-1)/α}`.

use serde::Serialize;

use super::AnalysisError;

/// Relative slack for floating-point comparisons against the lemma's inequalities.
const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeGiorgiLemmaInput {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub s0: f64,
    pub psi0: f64,
}

impl DeGiorgiLemmaInput {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        if !(self.beta > 1.0) {
            return Err(AnalysisError::InvalidInput(format!(
                "lemma requires beta > 1, got {}",
                self.beta
            )));
        }
        if !(self.a > 0.0 && self.alpha > 0.0 && self.psi0 >= 0.0 && self.s0.is_finite()) {
            return Err(AnalysisError::InvalidInput(format!(
                "lemma requires A > 0, alpha > 0, psi0 >= 0 (got A = {}, alpha = {}, psi0 = {})",
                self.a, self.alpha, self.psi0
            )));
        }
        Ok(())
    }

    /// `t = A 2^{β/(β-1)} ψ₀^{(β-1)/α}`
    fn step(&self) -> f64 {
        self.a * 2.0_f64.powf(self.beta / (self.beta - 1.0)) * self.psi0.powf((self.beta - 1.0) / self.alpha)
    }
}

/// `s* = s₀ + A 2^{β/(β-1)} ψ₀^{(β-1)/α}`.
pub fn degiorgi_threshold(input: &DeGiorgiLemmaInput) -> Result<f64, AnalysisError> {
    input.validate()?;
    Ok(input.s0 + input.step())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    Negative { s: f64, psi: f64 },
    Increasing { s: f64, psi: f64, previous: f64 },
    /// The hypothesis fails for the pair `r < s`.
    Hypothesis { s: f64, r: f64, lhs: f64, rhs: f64 },
    /// `ψ(s_k) > r^k ψ(s₀)`.
    Reduction { k: usize, s_k: f64, psi: f64, bound: f64 },
    /// `ψ(s*) > 0`.
    Threshold { s_star: f64, psi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeGiorgiReport {
    pub threshold: f64,
    pub t: f64,
    /// Per-step decay factor `2^{-α/(β-1)}`.
    pub decay: f64,
    /// `(k, s_k, ψ(s_k), decay^k ψ(s₀))`.
    pub steps: Vec<(usize, f64, f64, f64)>,
    pub violations: Vec<Violation>,
}

impl DeGiorgiReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the lemma's hypothesis on `grid` (points at or above `s₀`) and
/// its conclusions at the iteration levels `s_k = s₀ + t - t/2^k`,
/// `k = 0..=k_max`, and at `s*`.
///
/// `input.psi0` must equal `psi(s₀)`.
pub fn degiorgi_iterate_verify<F>(
    input: &DeGiorgiLemmaInput,
    psi: F,
    grid: &[f64],
    k_max: usize,
) -> Result<DeGiorgiReport, AnalysisError>
where
    F: Fn(f64) -> f64,
{
    input.validate()?;
    let psi_s0 = psi(input.s0);
    if (psi_s0 - input.psi0).abs() > SLACK * psi_s0.abs().max(1.0) {
        return Err(AnalysisError::InvalidInput(format!(
            "psi0 = {} does not match psi(s0) = {psi_s0}",
            input.psi0
        )));
    }
    let mut violations = Vec::new();

    let mut points: Vec<f64> = grid.iter().copied().filter(|s| *s >= input.s0).collect();
    points.push(input.s0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let table: Vec<f64> = points.iter().map(|&s| psi(s)).collect();
    for (i, (&s, &v)) in points.iter().zip(&table).enumerate() {
        if v < 0.0 {
            violations.push(Violation::Negative { s, psi: v });
        }
        if i > 0 && v > table[i - 1] * (1.0 + SLACK) {
            violations.push(Violation::Increasing {
                s,
                psi: v,
                previous: table[i - 1],
            });
        }
    }
    for j in 0..points.len() {
        for i in j + 1..points.len() {
            let (r, s) = (points[j], points[i]);
            let lhs = table[i];
            if lhs <= 0.0 {
                continue;
            }
            let rhs = (input.a / (s - r)).powf(input.alpha) * table[j].max(0.0).powf(input.beta);
            if lhs > rhs * (1.0 + SLACK) {
                violations.push(Violation::Hypothesis { s, r, lhs, rhs });
            }
        }
    }

    let t = input.step();
    let decay = 2.0_f64.powf(-input.alpha / (input.beta - 1.0));
    let mut steps = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let s_k = input.s0 + t - t / 2.0_f64.powi(k as i32);
        let value = psi(s_k);
        let bound = decay.powi(k as i32) * input.psi0;
        if value > bound * (1.0 + SLACK) + f64::MIN_POSITIVE {
            violations.push(Violation::Reduction {
                k,
                s_k,
                psi: value,
                bound,
            });
        }
        steps.push((k, s_k, value, bound));
    }
    let threshold = input.s0 + t;
    let at_threshold = psi(threshold);
    if at_threshold > SLACK * input.psi0 {
        violations.push(Violation::Threshold {
            s_star: threshold,
            psi: at_threshold,
        });
    }
    Ok(DeGiorgiReport {
        threshold,
        t,
        decay,
        steps,
        violations,
    })
}
