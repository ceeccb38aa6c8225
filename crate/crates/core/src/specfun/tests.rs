use super::*;
use approx::assert_abs_diff_eq;

const PI: f64 = std::f64::consts::PI;

/// Independent oracle: ∫₀¹ x^m w(x) dx.
/// Legendre: 1/(m+1).  Chebyshev: binomial expansion of ((1+t)/2)^m against
/// ∫ t^j/√(1−t²) dt = π (j−1)!!/j!! for even j, 0 for odd j.
fn analytic_moment(kind: BasisKind, m: usize) -> f64 {
    match kind {
        BasisKind::Legendre => 1.0 / (m as f64 + 1.0),
        BasisKind::Chebyshev => {
            let mut total = 0.0;
            for j in (0..=m).step_by(2) {
                let mut binom = 1.0;
                for i in 0..j {
                    binom *= (m - i) as f64 / (i + 1) as f64;
                }
                // (j−1)!!/j!!
                let mut ratio = 1.0;
                let mut i = j;
                while i >= 2 {
                    ratio *= (i - 1) as f64 / i as f64;
                    i -= 2;
                }
                total += binom * PI * ratio;
            }
            total / 2f64.powi(m as i32 + 1)
        }
    }
}

#[test]
fn quadrature_chebyshev_weights_are_constant() {
    let rule = make_quadrature(BasisKind::Chebyshev, 3).unwrap();
    for &w in &rule.weights {
        assert_abs_diff_eq!(w, PI / 6.0, epsilon = 1e-15);
    }
}

#[test]
fn quadrature_legendre_order_one_is_midpoint() {
    let rule = make_quadrature(BasisKind::Legendre, 1).unwrap();
    assert_abs_diff_eq!(rule.nodes[0], 0.5, epsilon = 1e-15);
    assert_abs_diff_eq!(rule.weights[0], 1.0, epsilon = 1e-15);
}

#[test]
fn quadrature_legendre_two_points_integrate_x_squared() {
    let rule = make_quadrature(BasisKind::Legendre, 2).unwrap();
    assert_abs_diff_eq!(rule.integrate(|x| x * x), 1.0 / 3.0, epsilon = 1e-14);
}

#[test]
fn quadrature_rejects_out_of_range_order() {
    assert!(matches!(
        make_quadrature(BasisKind::Legendre, 0),
        Err(Error::UnsupportedOrder(_))
    ));
    assert!(matches!(
        make_quadrature(BasisKind::Chebyshev, 65),
        Err(Error::UnsupportedOrder(_))
    ));
}

#[test]
fn quadrature_exactness_up_to_degree_2n_minus_1() {
    for kind in [BasisKind::Legendre, BasisKind::Chebyshev] {
        for n in 1..=8 {
            let rule = make_quadrature(kind, n).unwrap();
            for m in 0..=(2 * n - 1) {
                let quad = rule.integrate(|x| x.powi(m as i32));
                let exact = analytic_moment(kind, m);
                let tol = 1e-12 * exact.abs().max(1.0);
                assert!(
                    (quad - exact).abs() <= tol,
                    "{kind:?} n={n} m={m}: {quad} vs {exact}"
                );
            }
        }
    }
}

#[test]
fn basis_legendre_phi1_vanishes_at_midpoint() {
    let basis = make_basis(BasisKind::Legendre, 2).unwrap();
    let values = basis.eval(0.5).unwrap();
    assert_abs_diff_eq!(values[1], 0.0, epsilon = 1e-15);
}

#[test]
fn basis_legendre_phi0_is_one() {
    let basis = make_basis(BasisKind::Legendre, 1).unwrap();
    for x in [0.0, 0.25, 0.7, 1.0] {
        assert_abs_diff_eq!(basis.eval(x).unwrap()[0], 1.0, epsilon = 1e-15);
    }
}

#[test]
fn basis_chebyshev_phi2_at_zero() {
    // independent oracle: Horner on (2/√π)(8x² − 8x + 1)
    let horner = |x: f64| 2.0 / PI.sqrt() * ((8.0 * x - 8.0) * x + 1.0);
    let basis = make_basis(BasisKind::Chebyshev, 3).unwrap();
    assert_abs_diff_eq!(basis.eval(0.0).unwrap()[2], horner(0.0), epsilon = 1e-14);
    assert_abs_diff_eq!(basis.eval(0.0).unwrap()[2], 2.0 / PI.sqrt(), epsilon = 1e-14);
}

#[test]
fn basis_rejects_out_of_range_order() {
    assert!(matches!(
        make_basis(BasisKind::Legendre, 0),
        Err(Error::UnsupportedOrder(_))
    ));
    assert!(matches!(
        make_basis(BasisKind::Chebyshev, 7),
        Err(Error::UnsupportedOrder(_))
    ));
}

#[test]
fn basis_gram_matrix_is_identity() {
    for kind in [BasisKind::Legendre, BasisKind::Chebyshev] {
        for k in 1..=6 {
            let basis = make_basis(kind, k).unwrap();
            let rule = make_quadrature(kind, 2 * k).unwrap();
            for i in 0..k {
                for j in 0..k {
                    let gram: f64 = rule
                        .nodes
                        .iter()
                        .zip(&rule.weights)
                        .map(|(&x, &w)| {
                            let row = basis.eval(x).unwrap();
                            w * row[i] * row[j]
                        })
                        .sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (gram - expect).abs() < 1e-10,
                        "{kind:?} k={k} ({i},{j}): {gram}"
                    );
                }
            }
        }
    }
}

#[test]
fn eval_basis_legendre_at_right_endpoint() {
    let basis = make_basis(BasisKind::Legendre, 3).unwrap();
    let values = eval_basis(&basis, 1.0).unwrap();
    assert_abs_diff_eq!(values[0], 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(values[1], 3f64.sqrt(), epsilon = 1e-14);
    assert_abs_diff_eq!(values[2], 5f64.sqrt(), epsilon = 1e-14);
}

#[test]
fn eval_basis_chebyshev_order_one() {
    let basis = make_basis(BasisKind::Chebyshev, 1).unwrap();
    for x in [0.0, 0.3, 1.0] {
        assert_abs_diff_eq!(
            eval_basis(&basis, x).unwrap()[0],
            (2.0 / PI).sqrt(),
            epsilon = 1e-15
        );
    }
}

#[test]
fn eval_basis_rejects_outside_unit_interval() {
    let basis = make_basis(BasisKind::Legendre, 2).unwrap();
    assert!(matches!(eval_basis(&basis, -0.1), Err(Error::Domain(_))));
    assert!(matches!(eval_basis(&basis, 1.1), Err(Error::Domain(_))));
}

#[test]
fn monomial_tables_agree_with_recurrence() {
    for kind in [BasisKind::Legendre, BasisKind::Chebyshev] {
        let basis = make_basis(kind, 6).unwrap();
        for step in 0..=10 {
            let x = step as f64 / 10.0;
            let rec = basis.eval(x).unwrap();
            for i in 0..6 {
                let direct = poly::eval(&basis.coeffs[i], x);
                assert!(
                    (rec[i] - direct).abs() < 1e-11,
                    "{kind:?} i={i} x={x}: {} vs {direct}",
                    rec[i]
                );
            }
        }
    }
}
