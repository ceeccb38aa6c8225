//! Gauss-Legendre nodes and weights on [0, 1] by Newton iteration.

/// P_n(t) and P'_n(t) on [−1, 1] by the three-term recurrence.
pub fn legendre_value_deriv(n: usize, t: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = t;
    for i in 1..n {
        let i = i as f64;
        let next = ((2.0 * i + 1.0) * t * p - i * p_prev) / (i + 1.0);
        p_prev = p;
        p = next;
    }
    // (1 − t²) P'_n = n (P_{n−1} − t P_n)
    let deriv = if (1.0 - t * t).abs() > 1e-300 {
        n as f64 * (p_prev - t * p) / (1.0 - t * t)
    } else {
        // endpoints: P'_n(±1) = ±^{n+1} n(n+1)/2
        let s = if t > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 + 1) };
        s * (n * (n + 1)) as f64 / 2.0
    };
    (p, deriv)
}

/// Roots of P_n(2x−1) with weights for ∫₀¹ f dx, nodes increasing.
///
/// Newton iteration seeded with the Chebyshev-node approximation
/// cos(π(4i−1)/(4n+2)), tolerance 1e-15, at most 100 iterations.
pub fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 1..=n {
        let mut t = (std::f64::consts::PI * (4.0 * i as f64 - 1.0) / (4.0 * n as f64 + 2.0)).cos();
        for _ in 0..100 {
            let (value, d) = legendre_value_deriv(n, t);
            let step = value / d;
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (_, deriv) = legendre_value_deriv(n, t);
        // weight on [−1,1] is 2 / ((1−t²) P'²); halves on [0,1]
        let w = 1.0 / ((1.0 - t * t) * deriv * deriv);
        nodes.push((t + 1.0) / 2.0);
        weights.push(w);
    }
    nodes.reverse(); // seeds enumerate roots in decreasing t
    weights.reverse();
    (nodes, weights)
}
