//! Steady Darcy flow: −∇·(a(x)∇u) = f on the unit square with zero
//! Dirichlet boundary, discretized by the conservative five-point scheme
//! with arithmetic-mean interface coefficients and solved by conjugate
//! gradients.  The sign convention keeps u ≥ 0 for f ≥ 0.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Fields live on the inclusive (n+1)×(n+1) node grid, spacing h = 1/n.
/// Boundary values of u are zero; interior unknowns are solved to the given
/// relative residual.
pub fn solve_darcy(a: &Array2<f64>, f: &Array2<f64>, rel_tol: f64) -> Result<Array2<f64>> {
    let (rows, cols) = a.dim();
    if rows != cols || rows < 3 {
        return Err(Error::Shape(format!(
            "coefficient grid {rows}×{cols} must be square with at least 3 nodes"
        )));
    }
    if f.dim() != a.dim() {
        return Err(Error::Shape("forcing grid differs from coefficient grid".into()));
    }
    let amin = a.iter().cloned().fold(f64::INFINITY, f64::min);
    if amin <= 0.0 {
        return Err(Error::Ellipticity(format!(
            "coefficient minimum {amin} is not strictly positive"
        )));
    }
    let n = rows - 1; // intervals
    let h = 1.0 / n as f64;
    let interior = n - 1;
    let idx = |i: usize, j: usize| (i - 1) * interior + (j - 1);

    // interface coefficients by arithmetic mean
    let east = |i: usize, j: usize| 0.5 * (a[[i, j]] + a[[i + 1, j]]);
    let north = |i: usize, j: usize| 0.5 * (a[[i, j]] + a[[i, j + 1]]);

    let apply = |u: &[f64], out: &mut [f64]| {
        for i in 1..n {
            for j in 1..n {
                let c = u[idx(i, j)];
                let ue = if i + 1 < n { u[idx(i + 1, j)] } else { 0.0 };
                let uw = if i > 1 { u[idx(i - 1, j)] } else { 0.0 };
                let un = if j + 1 < n { u[idx(i, j + 1)] } else { 0.0 };
                let us = if j > 1 { u[idx(i, j - 1)] } else { 0.0 };
                let ae = east(i, j);
                let aw = east(i - 1, j);
                let an = north(i, j);
                let a_s = north(i, j - 1);
                out[idx(i, j)] =
                    ((ae + aw + an + a_s) * c - ae * ue - aw * uw - an * un - a_s * us)
                        / (h * h);
            }
        }
    };

    let m = interior * interior;
    let mut rhs = vec![0.0; m];
    for i in 1..n {
        for j in 1..n {
            rhs[idx(i, j)] = f[[i, j]];
        }
    }
    let rhs_norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut u = vec![0.0; m];
    if rhs_norm > 0.0 {
        let mut r = rhs.clone();
        let mut p = r.clone();
        let mut ap = vec![0.0; m];
        let mut rr: f64 = r.iter().map(|v| v * v).sum();
        let max_iters = 20 * m + 100;
        let mut converged = false;
        for _ in 0..max_iters {
            apply(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(x, y)| x * y).sum();
            if pap <= 0.0 {
                return Err(Error::SolverFailure(
                    "conjugate gradients lost positive definiteness".into(),
                ));
            }
            let alpha = rr / pap;
            for i in 0..m {
                u[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_next: f64 = r.iter().map(|v| v * v).sum();
            if rr_next.sqrt() <= rel_tol * rhs_norm {
                converged = true;
                break;
            }
            let beta = rr_next / rr;
            rr = rr_next;
            for i in 0..m {
                p[i] = r[i] + beta * p[i];
            }
        }
        if !converged {
            return Err(Error::SolverFailure(format!(
                "conjugate gradients did not reach {rel_tol:.1e}"
            )));
        }
    }

    let mut out = Array2::zeros((rows, cols));
    for i in 1..n {
        for j in 1..n {
            out[[i, j]] = u[idx(i, j)];
        }
    }
    Ok(out)
}
