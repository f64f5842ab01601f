use std::fmt::Write as _;

use serde::Serialize;

use super::{default_degiorgi_exponent, AnalysisError, SobolevConstants};
use crate::fem::Nonlinearity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    DeGiorgi,
    Barrier,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AprioriBounds {
    pub lower: f64,
    pub upper: f64,
    pub method: BoundMethod,
    /// De Giorgi constant `C` and the exponent `p` it was built with.
    pub constant_c: Option<f64>,
    pub exponent: Option<u32>,
    /// `R = 2 C_s(2) ‖f‖ / m`, when the data to compute it was available.
    pub energy_radius: Option<f64>,
}

/// `C = C_s(p)² / m · |Ω|^{(p-4)/(2p)} · 2^{(p-2)/(p-4)}`.
pub fn degiorgi_constant(c_s_p: f64, p: u32, m: f64, domain_volume: f64) -> f64 {
    let pf = p as f64;
    c_s_p * c_s_p / m * domain_volume.powf((pf - 4.0) / (2.0 * pf)) * 2.0_f64.powf((pf - 2.0) / (pf - 4.0))
}

/// Energy radius `2 C_s(2) ‖f‖ / m`.
pub fn energy_radius(c_s_2: f64, m: f64, f_l2: f64) -> f64 {
    2.0 * c_s_2 * f_l2 / m
}

/// De Giorgi bounds with the default exponent for `dim`.
pub fn degiorgi_bounds(
    f_l2: f64,
    g_min: f64,
    g_max: f64,
    m: f64,
    consts: &SobolevConstants,
    domain_volume: f64,
    dim: usize,
) -> Result<AprioriBounds, AnalysisError> {
    degiorgi_bounds_with_exponent(f_l2, g_min, g_max, m, consts, domain_volume, dim, default_degiorgi_exponent(dim))
}

/// `ū = max{0, sup g} + C ‖f‖`, `u̲ = min{0, inf g} - C ‖f‖`.
#[allow(clippy::too_many_arguments)]
pub fn degiorgi_bounds_with_exponent(
    f_l2: f64,
    g_min: f64,
    g_max: f64,
    m: f64,
    consts: &SobolevConstants,
    domain_volume: f64,
    dim: usize,
    p: u32,
) -> Result<AprioriBounds, AnalysisError> {
    if !(m > 0.0) || !(domain_volume > 0.0) || !(f_l2 >= 0.0) || g_min > g_max {
        return Err(AnalysisError::InvalidInput(format!(
            "need m > 0, |Ω| > 0, ‖f‖ ≥ 0 and inf g ≤ sup g (m = {m}, |Ω| = {domain_volume}, ‖f‖ = {f_l2})"
        )));
    }
    match dim {
        2 if p <= 4 => {
            return Err(AnalysisError::InvalidInput(format!("2D De Giorgi exponent must exceed 4, got {p}")));
        }
        3 if p != 6 => {
            return Err(AnalysisError::InvalidInput(format!("3D De Giorgi exponent must be 6, got {p}")));
        }
        2 | 3 => {}
        _ => return Err(AnalysisError::InvalidInput(format!("dimension {dim}"))),
    }
    let c_s_p = consts.get(p)?.value;
    let c = degiorgi_constant(c_s_p, p, m, domain_volume);
    let energy = consts.get(2).ok().map(|e| energy_radius(e.value, m, f_l2));
    Ok(AprioriBounds {
        lower: g_min.min(0.0) - c * f_l2,
        upper: g_max.max(0.0) + c * f_l2,
        method: BoundMethod::DeGiorgi,
        constant_c: Some(c),
        exponent: Some(p),
        energy_radius: energy,
    })
}

/// `ū = max{β, sup g}`, `u̲ = min{α, inf g}` for a nonlinearity with barrier pair `(α, β)`.
pub fn barrier_bounds(nl: &Nonlinearity, g_min: f64, g_max: f64) -> Result<AprioriBounds, AnalysisError> {
    let barrier = nl.barrier.ok_or(AnalysisError::NoBarrier)?;
    if barrier.alpha > barrier.beta {
        return Err(AnalysisError::InvalidInput("barrier requires alpha <= beta".into()));
    }
    Ok(AprioriBounds {
        lower: barrier.alpha.min(g_min),
        upper: barrier.beta.max(g_max),
        method: BoundMethod::Barrier,
        constant_c: None,
        exponent: None,
        energy_radius: None,
    })
}

/// Plain `key: value` report of bounds and the constants behind them.
pub fn bounds_report(bounds: &AprioriBounds, consts: &SobolevConstants, context: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in context {
        let _ = writeln!(out, "{k}: {v}");
    }
    for e in &consts.entries {
        let _ = writeln!(out, "C_s({}): {:.16e} [{}]", e.p, e.value, e.provenance);
    }
    let method = match bounds.method {
        BoundMethod::DeGiorgi => "de-giorgi",
        BoundMethod::Barrier => "barrier",
    };
    let _ = writeln!(out, "method: {method}");
    if let Some(p) = bounds.exponent {
        let _ = writeln!(out, "degiorgi_exponent: {p}");
    }
    if let Some(c) = bounds.constant_c {
        let _ = writeln!(out, "constant_C: {c:.16e}");
    }
    let _ = writeln!(out, "lower_bound: {:.16e}", bounds.lower);
    let _ = writeln!(out, "upper_bound: {:.16e}", bounds.upper);
    if let Some(r) = bounds.energy_radius {
        let _ = writeln!(out, "energy_radius: {r:.16e}");
    }
    out
}
