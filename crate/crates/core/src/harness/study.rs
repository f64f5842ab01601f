use std::sync::Arc;

use serde::Serialize;

use super::csv::{self, float, opt_float};
use super::{manufactured_problem, HarnessError, StudyConfig, StudyKind};
use crate::analysis::{
    bounds_report, degiorgi_bounds_with_exponent, eoc, error_norms, l2_norm_of, lipschitz_probe, ErrorTriple,
};
use crate::fem::{gradient_norm_sq, FeFunction, ProblemSpec, MAX_DEGREE_2D, MAX_DEGREE_3D};
use crate::mesh::{bisect_shortest_edge, build_structured_mesh, mesh_stats, uniform_refine, Domain, SimplexMesh};
use crate::solver::{newton_solve, SolverError};

/// Slack on the discrete energy bound.
const ENERGY_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h_max: f64,
    pub h_min: f64,
    pub n_dofs: usize,
    pub err_h1: f64,
    pub err_l2: f64,
    pub err_linf: f64,
    pub eoc_h1: Option<f64>,
    pub eoc_l2: Option<f64>,
    pub eoc_linf: Option<f64>,
    pub newton_iters: usize,
    pub min_angle_deg: f64,
    pub min_quality: f64,
    pub linf_uh: f64,
    pub energy_norm_uh: f64,
    pub lipschitz_probe: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        csv::document(
            "convergence",
            csv::CONVERGENCE_HEADER,
            self.rows.iter().map(|r| {
                [
                    r.level.to_string(),
                    float(r.h_max),
                    float(r.h_min),
                    r.n_dofs.to_string(),
                    float(r.err_h1),
                    float(r.err_l2),
                    float(r.err_linf),
                    opt_float(r.eoc_h1),
                    opt_float(r.eoc_l2),
                    opt_float(r.eoc_linf),
                    r.newton_iters.to_string(),
                    float(r.min_angle_deg),
                    float(r.min_quality),
                    float(r.linf_uh),
                    float(r.energy_norm_uh),
                    opt_float(r.lipschitz_probe),
                ]
                .join(",")
            }),
        )
    }

    pub fn last(&self) -> Option<&ConvergenceRow> {
        self.rows.last()
    }
}

#[derive(Debug, Clone)]
pub struct LevelData {
    pub mesh: Arc<SimplexMesh>,
    pub solution: FeFunction,
    /// `‖f‖_{L²}` on this level's mesh.
    pub f_l2: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceOutcome {
    pub table: ConvergenceTable,
    pub levels: Vec<LevelData>,
    /// Energy-bound right-hand side `C_s(2)/m ‖f‖` used for the per-level check.
    pub energy_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegradationRow {
    pub step: usize,
    pub min_angle_deg: f64,
    pub n_cells: usize,
    pub linf_uh: f64,
    pub newton_iters: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DegradationTable {
    pub rows: Vec<DegradationRow>,
}

impl DegradationTable {
    pub fn to_csv(&self) -> String {
        csv::document(
            "degradation",
            csv::DEGRADATION_HEADER,
            self.rows.iter().map(|r| {
                format!(
                    "{},{},{},{},{},{}",
                    r.step,
                    float(r.min_angle_deg),
                    r.n_cells,
                    float(r.linf_uh),
                    r.newton_iters,
                    r.converged
                )
            }),
        )
    }
}

fn max_degree(dim: usize) -> usize {
    if dim == 2 {
        MAX_DEGREE_2D
    } else {
        MAX_DEGREE_3D
    }
}

fn source_norm(spec: &ProblemSpec, mesh: &SimplexMesh) -> Result<f64, HarnessError> {
    let f = &spec.source;
    Ok(l2_norm_of(mesh, |x| f(x), max_degree(mesh.dim()))?)
}

fn base_mesh(cfg: &StudyConfig) -> Result<SimplexMesh, HarnessError> {
    Ok(build_structured_mesh(
        Domain::for_dim(cfg.dim)?,
        cfg.base_n(),
        cfg.mesh.shear,
    )?)
}

/// Solves on `levels` uniformly refined meshes, measures errors and rates, and
/// checks the discrete energy and L∞ bounds on every level.
///
/// The CSV (when `output_path` is set) is written even when a level fails.
pub fn run_convergence_study(cfg: &StudyConfig) -> Result<ConvergenceOutcome, HarnessError> {
    cfg.validate()?;
    if cfg.study != StudyKind::Convergence {
        return Err(HarnessError::Config("configuration describes a degradation study".into()));
    }
    let spec = manufactured_problem(cfg.dim, cfg.p())?;
    let exact = spec.exact.clone().expect("manufactured problems carry an exact solution");
    let consts = cfg.sobolev_constants();
    let c_s_2 = consts.c_s_2()?;
    let m = spec.diffusion.lower;

    let mut table = ConvergenceTable::default();
    let mut levels = Vec::new();
    let mut errors: Vec<ErrorTriple> = Vec::new();
    let mut mesh = base_mesh(cfg)?;
    let mut failures = Vec::new();
    let mut energy_bound = 0.0;

    let result: Result<(), HarnessError> = (|| {
        for level in 0..cfg.levels() {
            if level > 0 {
                mesh = uniform_refine(&mesh);
            }
            let m_arc = Arc::new(mesh.clone());
            let stats = mesh_stats(&m_arc);
            let solved = newton_solve(&spec, &m_arc, &cfg.newton).map_err(|e| HarnessError::Level {
                level,
                source: Box::new(e.into()),
            })?;
            let uh = solved.solution;
            let (u, g) = (exact.value.clone(), exact.gradient.clone());
            let err = error_norms(&uh, |x| u(x), |x| g(x))?;
            let probe = if cfg.probe_samples > 0 {
                Some(lipschitz_probe(
                    &spec.nonlinearity,
                    |x| u(x),
                    |x| g(x),
                    &uh,
                    cfg.probe_samples,
                    cfg.seed.wrapping_add(level as u64),
                )?)
            } else {
                None
            };
            errors.push(err);
            let h: Vec<f64> = table.rows.iter().map(|r| r.h_max).chain([stats.h_max]).collect();
            let rate = |sel: fn(&ErrorTriple) -> f64| {
                let e: Vec<f64> = errors.iter().map(sel).collect();
                eoc(&e, &h).last().copied().flatten()
            };
            let f_l2 = source_norm(&spec, &m_arc)?;
            let energy = gradient_norm_sq(&uh).sqrt();
            let linf_uh = uh.max_abs();

            energy_bound = c_s_2 / m * f_l2;
            if energy > energy_bound + ENERGY_SLACK {
                failures.push(format!(
                    "level {level}: energy norm {energy:.6e} exceeds C_s/m ‖f‖ = {energy_bound:.6e}"
                ));
            }
            let linf_bound = 1.0 + errors[0].linf;
            if linf_uh > linf_bound {
                failures.push(format!(
                    "level {level}: ‖u_h‖_∞ = {linf_uh:.6e} exceeds ‖u‖_∞ + err_linf(0) = {linf_bound:.6e}"
                ));
            }

            table.rows.push(ConvergenceRow {
                level,
                h_max: stats.h_max,
                h_min: stats.h_min,
                n_dofs: stats.n_interior_dofs,
                err_h1: err.h1_semi,
                err_l2: err.l2,
                err_linf: err.linf,
                eoc_h1: if level > 0 { rate(|e| e.h1_semi) } else { None },
                eoc_l2: if level > 0 { rate(|e| e.l2) } else { None },
                eoc_linf: if level > 0 { rate(|e| e.linf) } else { None },
                newton_iters: solved.iterations,
                min_angle_deg: stats.min_angle_deg,
                min_quality: stats.min_quality,
                linf_uh,
                energy_norm_uh: energy,
                lipschitz_probe: probe,
            });
            log::info!(
                "level {level}: h = {:.4e}, err_h1 = {:.4e}, err_linf = {:.4e}, newton {}",
                stats.h_max,
                err.h1_semi,
                err.linf,
                solved.iterations
            );
            levels.push(LevelData {
                mesh: m_arc,
                solution: uh,
                f_l2,
            });
        }
        Ok(())
    })();

    if let Some(path) = &cfg.output_path {
        csv::write(path, &table.to_csv())?;
    }
    result?;
    if !failures.is_empty() {
        return Err(HarnessError::Assertion(failures.join("; ")));
    }
    Ok(ConvergenceOutcome {
        table,
        levels,
        energy_bound,
    })
}

/// Re-solves after each batch of shortest-edge bisections of the base mesh
/// and records `‖u_h‖_∞` against the minimum angle. Newton failures are
/// recorded as unconverged rows.
pub fn run_degradation_study(cfg: &StudyConfig) -> Result<DegradationTable, HarnessError> {
    cfg.validate()?;
    if cfg.study != StudyKind::Degradation {
        return Err(HarnessError::Config("configuration describes a convergence study".into()));
    }
    let spec = manufactured_problem(cfg.dim, cfg.p())?;
    let mut mesh = base_mesh(cfg)?;
    let mut table = DegradationTable::default();
    for batch in 0..=cfg.degradation.batches {
        if batch > 0 {
            mesh = bisect_shortest_edge(&mesh, cfg.degradation.batch_size)?;
        }
        let m_arc = Arc::new(mesh.clone());
        let stats = mesh_stats(&m_arc);
        let row = match newton_solve(&spec, &m_arc, &cfg.newton) {
            Ok(res) => DegradationRow {
                step: batch * cfg.degradation.batch_size,
                min_angle_deg: stats.min_angle_deg,
                n_cells: stats.n_cells,
                linf_uh: res.solution.max_abs(),
                newton_iters: res.iterations,
                converged: true,
            },
            Err(e) => {
                log::warn!("degradation step {}: {e}", batch * cfg.degradation.batch_size);
                let (iters, last) = match &e {
                    SolverError::Diverged { history, last, .. } | SolverError::LineSearch { history, last, .. } => {
                        (history.len().saturating_sub(1), last.iter().fold(0.0_f64, |m, c| m.max(c.abs())))
                    }
                    _ => (0, f64::NAN),
                };
                DegradationRow {
                    step: batch * cfg.degradation.batch_size,
                    min_angle_deg: stats.min_angle_deg,
                    n_cells: stats.n_cells,
                    linf_uh: last,
                    newton_iters: iters,
                    converged: false,
                }
            }
        };
        table.rows.push(row);
    }
    if let Some(path) = &cfg.output_path {
        csv::write(path, &table.to_csv())?;
    }
    Ok(table)
}

/// Bounds report for the configured manufactured problem.
pub fn bounds_for_config(cfg: &StudyConfig) -> Result<String, HarnessError> {
    cfg.validate()?;
    let spec = manufactured_problem(cfg.dim, cfg.p())?;
    let consts = cfg.sobolev_constants();
    // a fine reference mesh makes the quadrature error in ‖f‖ negligible
    let reference = build_structured_mesh(Domain::for_dim(cfg.dim)?, if cfg.dim == 2 { 64 } else { 16 }, 0.0)?;
    let f_l2 = source_norm(&spec, &reference)?;
    let m = spec.diffusion.lower;
    let volume = 1.0;
    let bounds = degiorgi_bounds_with_exponent(f_l2, 0.0, 0.0, m, &consts, volume, cfg.dim, cfg.degiorgi_p())?;
    let context = [
        ("problem", format!("-Δu + u^{} = f, u = Π sin(π x_i)", cfg.p())),
        ("dim", cfg.dim.to_string()),
        ("domain_volume", float(volume)),
        ("m", float(m)),
        ("f_l2", float(f_l2)),
        ("g_min", float(0.0)),
        ("g_max", float(0.0)),
        ("regularity_s", float(cfg.constants.regularity_s)),
        ("regularity_t", float(cfg.constants.regularity_t)),
    ];
    Ok(bounds_report(&bounds, &consts, &context))
}
