//! Deterministic CSV output: comma-delimited, LF line endings, floats with 17
//! significant digits, empty fields for undefined values.

use std::fmt::Write as _;
use std::path::Path;

use super::HarnessError;

pub const CSV_VERSION: u32 = 1;

pub const CONVERGENCE_HEADER: &str = "level,h_max,h_min,n_dofs,err_h1,err_l2,err_linf,eoc_h1,eoc_l2,eoc_linf,\
newton_iters,min_angle_deg,min_quality,linf_uh,energy_norm_uh,lipschitz_probe";

pub const DEGRADATION_HEADER: &str = "step,min_angle_deg,n_cells,linf_uh,newton_iters,converged";

pub(crate) fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub(crate) fn document(kind: &str, header: &str, rows: impl Iterator<Item = String>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# semilin {kind} v{CSV_VERSION}");
    let _ = writeln!(out, "{header}");
    for r in rows {
        let _ = writeln!(out, "{r}");
    }
    out
}

pub(crate) fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(1.0), "1.0000000000000000e0");
        assert_eq!(opt_float(None), "");
    }

    #[test]
    fn document_layout() {
        let d = document("test", "a,b", ["1,2".to_string()].into_iter());
        assert_eq!(d, "# semilin test v1\na,b\n1,2\n");
    }
}
