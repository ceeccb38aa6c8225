//! Shifted orthogonal polynomial bases on [0, 1] and Gaussian quadrature.
//!
//! Two families are supported, each orthonormal with respect to its weight
//! function on the unit interval:
//!
//! * Legendre: w(x) = 1, basis φ_i(x) = √(2i+1) · P_i(2x−1)
//! * Chebyshev (first kind): w(x) = 1/√(1−(2x−1)²), basis φ_0 = √(2/π),
//!   φ_i = (2/√π) · T_i(2x−1) for i ≥ 1
//!
//! The quadrature rules integrate f against the family weight,
//! ∫₀¹ f(x) w(x) dx ≈ Σ ω_i f(x_i), exactly for polynomials of degree
//! ≤ 2n−1.

mod chebyshev;
mod legendre;
pub(crate) mod poly;

use crate::error::{Error, Result};

pub use chebyshev::chebyshev_nodes;
pub use legendre::{legendre_nodes, legendre_value_deriv};

/// Maximum quadrature order.
pub const MAX_QUAD_ORDER: usize = 64;
/// Maximum polynomial-basis order; filter derivation loses float precision
/// beyond this.
pub const MAX_BASIS_ORDER: usize = 6;

/// Orthogonal polynomial family on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// Uniform weight w(x) = 1.
    Legendre,
    /// Weight w(x) = 1/√(1−(2x−1)²).
    Chebyshev,
}

impl BasisKind {
    pub fn name(&self) -> &'static str {
        match self {
            BasisKind::Legendre => "legendre",
            BasisKind::Chebyshev => "chebyshev",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "legendre" | "leg" => Ok(BasisKind::Legendre),
            "chebyshev" | "chb" | "cheb" => Ok(BasisKind::Chebyshev),
            other => Err(Error::Domain(format!("unknown basis kind `{other}`"))),
        }
    }

    /// ∫₀¹ w(x) dx: total mass of the weight.
    pub fn weight_mass(&self) -> f64 {
        match self {
            BasisKind::Legendre => 1.0,
            BasisKind::Chebyshev => std::f64::consts::PI / 2.0,
        }
    }

    /// Normalization constant of φ_i.
    pub(crate) fn norm_const(&self, i: usize) -> f64 {
        match self {
            BasisKind::Legendre => ((2 * i + 1) as f64).sqrt(),
            BasisKind::Chebyshev => {
                if i == 0 {
                    (2.0 / std::f64::consts::PI).sqrt()
                } else {
                    2.0 / std::f64::consts::PI.sqrt()
                }
            }
        }
    }
}

/// Gaussian quadrature rule for ∫₀¹ f(x) w(x) dx.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub kind: BasisKind,
    /// Strictly increasing nodes in (0, 1).
    pub nodes: Vec<f64>,
    /// Positive weights; Σ weights = ∫₀¹ w(x) dx.
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Σ ω_i f(x_i)
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Build the n-point Gaussian quadrature rule of the given family.
///
/// Legendre nodes are the roots of P_n(2x−1) found by Newton iteration;
/// Chebyshev nodes come from the closed form (cos(π(i−1/2)/n)+1)/2 with
/// constant weights π/(2n).
pub fn make_quadrature(kind: BasisKind, n: usize) -> Result<QuadratureRule> {
    if n < 1 || n > MAX_QUAD_ORDER {
        return Err(Error::UnsupportedOrder(format!(
            "quadrature order {n} outside 1..={MAX_QUAD_ORDER}"
        )));
    }
    let (nodes, weights) = match kind {
        BasisKind::Legendre => legendre::legendre_nodes(n),
        BasisKind::Chebyshev => chebyshev::chebyshev_nodes(n),
    };
    Ok(QuadratureRule {
        kind,
        nodes,
        weights,
    })
}

/// The first k normalized basis polynomials of a family, with their monomial
/// coefficient tables (used for exact piecewise-polynomial bookkeeping;
/// evaluation goes through the three-term recurrence instead).
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    pub kind: BasisKind,
    pub k: usize,
    /// coeffs[i] holds the monomial coefficients (low degree first) of φ_i;
    /// deg(φ_i) = i.
    pub coeffs: Vec<Vec<f64>>,
}

impl OrthoBasis {
    /// [φ_0(x), …, φ_{k−1}(x)] via the three-term recurrence.
    pub fn eval(&self, x: f64) -> Result<Vec<f64>> {
        eval_basis(self, x)
    }
}

/// Build the orthonormal shifted basis of order k (1 ≤ k ≤ 6).
pub fn make_basis(kind: BasisKind, k: usize) -> Result<OrthoBasis> {
    if k < 1 || k > MAX_BASIS_ORDER {
        return Err(Error::UnsupportedOrder(format!(
            "basis order {k} outside 1..={MAX_BASIS_ORDER}"
        )));
    }
    // Shifted recurrence in monomial coefficients: both families satisfy a
    // three-term recurrence in t = 2x−1.
    let t = vec![-1.0, 2.0]; // 2x − 1
    let mut raw: Vec<Vec<f64>> = Vec::with_capacity(k);
    raw.push(vec![1.0]);
    if k > 1 {
        raw.push(t.clone());
    }
    for i in 2..k {
        let prev = &raw[i - 1];
        let prev2 = &raw[i - 2];
        let next = match kind {
            BasisKind::Legendre => {
                let n = i as f64;
                poly::add(
                    &poly::scale(&poly::mul(&t, prev), (2.0 * n - 1.0) / n),
                    &poly::scale(prev2, -(n - 1.0) / n),
                )
            }
            BasisKind::Chebyshev => poly::add(
                &poly::scale(&poly::mul(&t, prev), 2.0),
                &poly::scale(prev2, -1.0),
            ),
        };
        raw.push(next);
    }
    let coeffs = raw
        .into_iter()
        .enumerate()
        .map(|(i, p)| poly::scale(&p, kind.norm_const(i)))
        .collect();
    Ok(OrthoBasis { kind, k, coeffs })
}

/// Evaluate [φ_0(x), …, φ_{k−1}(x)] at x ∈ [0, 1].
///
/// Uses the P_n / T_n three-term recurrences in t = 2x−1 rather than the
/// monomial tables, which lose accuracy for higher orders.
pub fn eval_basis(basis: &OrthoBasis, x: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
    }
    Ok(eval_basis_row(basis.kind, basis.k, x))
}

/// Recurrence evaluation without the domain check; nodes handed in by
/// quadrature rules and cell maps are always inside [0, 1].
pub(crate) fn eval_basis_row(kind: BasisKind, k: usize, x: f64) -> Vec<f64> {
    let t = 2.0 * x - 1.0;
    let mut out = Vec::with_capacity(k);
    let mut p_prev = 1.0f64;
    let mut p_cur = t;
    for i in 0..k {
        let value = match i {
            0 => 1.0,
            1 => t,
            _ => {
                let next = match kind {
                    BasisKind::Legendre => {
                        let n = i as f64;
                        ((2.0 * n - 1.0) * t * p_cur - (n - 1.0) * p_prev) / n
                    }
                    BasisKind::Chebyshev => 2.0 * t * p_cur - p_prev,
                };
                p_prev = p_cur;
                p_cur = next;
                next
            }
        };
        out.push(kind.norm_const(i) * value);
    }
    out
}

#[cfg(test)]
mod tests;
