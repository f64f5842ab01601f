use std::f64::consts::PI;
use std::sync::Arc;

use super::HarnessError;
use crate::fem::{DiffusionTensor, ExactSolution, Nonlinearity, ProblemSpec};

/// `-Δu + u^p = f` on the unit square or cube with exact solution
/// `u = Π sin(π x_i)` and zero boundary data.
pub fn manufactured_problem(dim: usize, p: u32) -> Result<ProblemSpec, HarnessError> {
    if dim != 2 && dim != 3 {
        return Err(HarnessError::Config(format!("dim must be 2 or 3, got {dim}")));
    }
    if p == 0 || p % 2 == 0 {
        return Err(HarnessError::Config(format!("p must be a positive odd integer, got {p}")));
    }
    if dim == 3 && p > 5 {
        return Err(HarnessError::Config(format!("p = {p} exceeds the critical growth exponent 5 in 3D")));
    }
    let u = move |x: &[f64; 3]| (0..dim).map(|k| (PI * x[k]).sin()).product::<f64>();
    let grad = move |x: &[f64; 3]| {
        let mut g = [0.0; 3];
        for (k, gk) in g.iter_mut().enumerate().take(dim) {
            *gk = (0..dim)
                .map(|j| if j == k { PI * (PI * x[j]).cos() } else { (PI * x[j]).sin() })
                .product();
        }
        g
    };
    let pi2 = dim as f64 * PI * PI;
    let pp = p as i32;
    Ok(ProblemSpec {
        dim,
        diffusion: DiffusionTensor::identity(dim),
        nonlinearity: Nonlinearity::power(p),
        source: Arc::new(move |x| {
            let v = u(x);
            pi2 * v + v.powi(pp)
        }),
        dirichlet: Arc::new(|_| 0.0),
        exact: Some(ExactSolution {
            value: Arc::new(u),
            gradient: Arc::new(grad),
        }),
    })
}
