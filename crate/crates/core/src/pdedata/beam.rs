//! Euler-Bernoulli beam boundary-value problems: u'''' − ω²u = f with both
//! ends clamped (u = u' = 0), and the third-order variant u''' − ω²u = f
//! with u(0) = u(1) = 0, u'(0) = 0.
//!
//! Dense high-order finite differences on the inclusive grid x_i = i/m.
//! Every stencil is exact for quartics (five-point rows), so manufactured
//! polynomial solutions are reproduced to roundoff.  PDE rows skipped next
//! to the boundary are replaced by the boundary conditions themselves, and
//! the third-order problem gets a backward-biased row at i = m−1 to close
//! the count.

use nalgebra::{DMatrix, DVector};
use ndarray::Array1;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamOrder {
    Third,
    Fourth,
}

impl BeamOrder {
    pub fn derivative(&self) -> usize {
        match self {
            BeamOrder::Third => 3,
            BeamOrder::Fourth => 4,
        }
    }
}

/// Fornberg finite-difference weights for the d-th derivative at 0 from the
/// given integer offsets (times h^{-d} applied by the caller).
pub fn fd_weights(derivative: usize, offsets: &[i64]) -> Vec<f64> {
    let n = offsets.len();
    let m = derivative;
    // B. Fornberg, "Generation of finite difference formulas on arbitrarily
    // spaced grids", Math. Comp. 51 (1988)
    let x0 = 0.0;
    let alpha: Vec<f64> = offsets.iter().map(|&o| o as f64).collect();
    let mut delta = vec![vec![vec![0.0; n]; m + 1]; n];
    delta[0][0][0] = 1.0;
    let mut c1 = 1.0;
    for nn in 1..n {
        let mut c2 = 1.0;
        for v in 0..nn {
            let c3 = alpha[nn] - alpha[v];
            c2 *= c3;
            for mm in 0..=m.min(nn) {
                let prev = delta[nn - 1][mm][v];
                let prev_d = if mm > 0 { delta[nn - 1][mm - 1][v] } else { 0.0 };
                delta[nn][mm][v] = ((alpha[nn] - x0) * prev - mm as f64 * prev_d) / c3;
            }
        }
        for mm in 0..=m.min(nn) {
            let prev_d = if mm > 0 {
                delta[nn - 1][mm - 1][nn - 1]
            } else {
                0.0
            };
            let prev = delta[nn - 1][mm][nn - 1];
            delta[nn][mm][nn] = c1 / c2 * (mm as f64 * prev_d - (alpha[nn - 1] - x0) * prev);
        }
        c1 = c2;
    }
    (0..n).map(|v| delta[n - 1][m][v]).collect()
}

/// Factored beam operator for a fixed grid; forcing samples can be solved
/// repeatedly against the same LU decomposition.  Rows are equilibrated
/// (PDE rows scaled by h^d, slope rows by h) and each solve runs one pass
/// of iterative refinement, which keeps manufactured polynomial solutions
/// at roundoff even on fine grids.
pub struct BeamSolver {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    matrix: DMatrix<f64>,
    order: BeamOrder,
    omega: f64,
    nodes: usize,
    h: f64,
}

impl BeamSolver {
    /// Grid has `intervals` cells, `intervals + 1` inclusive nodes.
    pub fn new(order: BeamOrder, omega: f64, intervals: usize) -> Result<Self> {
        if intervals < 8 {
            return Err(Error::InvalidSpec(
                "beam grid needs at least 8 intervals".into(),
            ));
        }
        let m = intervals;
        let nodes = m + 1;
        let h = 1.0 / m as f64;
        let mut mat = DMatrix::zeros(nodes, nodes);
        let d = order.derivative();
        let hd = h.powi(d as i32);

        // Dirichlet ends
        mat[(0, 0)] = 1.0;
        mat[(m, m)] = 1.0;
        // clamped slope at x = 0 (and x = 1 for the fourth-order problem);
        // rows scaled by h
        let w1 = fd_weights(1, &[0, 1, 2, 3, 4]);
        for (j, &w) in w1.iter().enumerate() {
            mat[(1, j)] = w;
        }
        match order {
            BeamOrder::Fourth => {
                for (j, &w) in w1.iter().enumerate() {
                    mat[(m - 1, m - j)] = -w;
                }
                let centre = fd_weights(4, &[-2, -1, 0, 1, 2]);
                for i in 2..=m - 2 {
                    for (j, &w) in centre.iter().enumerate() {
                        mat[(i, i - 2 + j)] += w;
                    }
                    mat[(i, i)] -= omega * omega * hd;
                }
            }
            BeamOrder::Third => {
                let centre = fd_weights(3, &[-2, -1, 0, 1, 2]);
                for i in 2..=m - 2 {
                    for (j, &w) in centre.iter().enumerate() {
                        mat[(i, i - 2 + j)] += w;
                    }
                    mat[(i, i)] -= omega * omega * hd;
                }
                // close the count with a backward-biased row at i = m−1
                let biased = fd_weights(3, &[-3, -2, -1, 0, 1]);
                for (j, &w) in biased.iter().enumerate() {
                    mat[(m - 1, m - 4 + j)] += w;
                }
                mat[(m - 1, m - 1)] -= omega * omega * hd;
            }
        }
        let lu = mat.clone().lu();
        if lu.determinant().abs() < 1e-300 {
            return Err(Error::Resonance(format!(
                "ω = {omega} sits on an eigenfrequency of the discrete operator"
            )));
        }
        Ok(BeamSolver {
            lu,
            matrix: mat,
            order,
            omega,
            nodes,
            h,
        })
    }

    pub fn order(&self) -> BeamOrder {
        self.order
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn grid_spacing(&self) -> f64 {
        self.h
    }

    /// Solve for the forcing sampled at every node.  Boundary rows carry
    /// homogeneous data regardless of f there.
    pub fn solve(&self, f: &Array1<f64>) -> Result<Array1<f64>> {
        if f.len() != self.nodes {
            return Err(Error::Shape(format!(
                "forcing has {} nodes, solver grid has {}",
                f.len(),
                self.nodes
            )));
        }
        let m = self.nodes - 1;
        let hd = self.h.powi(self.order.derivative() as i32);
        let mut rhs = DVector::zeros(self.nodes);
        for i in 2..=m - 2 {
            rhs[i] = f[i] * hd;
        }
        if self.order == BeamOrder::Third {
            rhs[m - 1] = f[m - 1] * hd;
        }
        let mut sol = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| Error::Resonance("singular beam system".into()))?;
        // one pass of iterative refinement
        let residual = &rhs - &self.matrix * &sol;
        if let Some(correction) = self.lu.solve(&residual) {
            sol += correction;
        }
        Ok(Array1::from_iter(sol.iter().copied()))
    }
}

/// One-shot convenience wrapper: f on the inclusive grid of len m+1.
pub fn solve_beam(f: &Array1<f64>, omega: f64, order: BeamOrder) -> Result<Array1<f64>> {
    let solver = BeamSolver::new(order, omega, f.len() - 1)?;
    solver.solve(f)
}
