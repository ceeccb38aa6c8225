//! Gauss-Chebyshev nodes and weights on [0, 1].

/// Roots of T_n(2x−1) with the constant weights π/(2n), nodes increasing.
///
/// x_i = (cos(π(i−1/2)/n) + 1)/2 enumerates the roots in decreasing order,
/// so the result is reversed.
pub fn chebyshev_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes: Vec<f64> = (1..=n)
        .map(|i| ((std::f64::consts::PI * (i as f64 - 0.5) / n as f64).cos() + 1.0) / 2.0)
        .collect();
    nodes.reverse();
    let w = std::f64::consts::PI / (2.0 * n as f64);
    (nodes, vec![w; n])
}
