//! Measure-aware multiwavelet basis derivation and filter matrices.
//!
//! The scaling basis φ_0..φ_{k−1} spans V_0 (polynomials of degree < k on
//! [0,1]) with respect to the family weight w.  The multiwavelet basis
//! ψ_0..ψ_{k−1} spans the complement W_0 of V_0 inside V_1 (piecewise
//! polynomials with a breakpoint at 1/2), orthonormal w.r.t. the same
//! measure, with the vanishing-moment property ∫ x^i ψ_j dμ₀ = 0 for
//! i, j < k.
//!
//! Everything is expressed in the scale-1 basis
//! {√2 φ_j(2x) on [0,1/2),  √2 φ_j(2x−1) on [1/2,1]}:
//! the rows of [H⁽⁰⁾ | H⁽¹⁾] are the expansion coefficients of φ_i, the rows
//! of [G⁽⁰⁾ | G⁽¹⁾] those of ψ_i, and the correction matrices Σ⁽⁰⁾, Σ⁽¹⁾ are
//! the Gram blocks of the scale-1 basis under μ₀.  The Gram-Schmidt
//! orthogonalization that produces ψ therefore runs in ℝ^{2k} with inner
//! product u·blockdiag(Σ⁽⁰⁾,Σ⁽¹⁾)·v, which keeps the orthogonality
//! constraint
//!
//!   [H;G] · blockdiag(Σ⁽⁰⁾,Σ⁽¹⁾) · [H;G]ᵀ = I
//!
//! at machine precision for every supported order.
//!
//! Inner products use the 2k-point quadrature of the matching family: with
//! an even number of points no node hits the ψ discontinuity at x = 1/2.
//! For Legendre these quadratures are exact and Σ = I; for Chebyshev the
//! half-interval Gram sums define the (discrete) measure the bank is
//! orthonormal against.

use ndarray::{s, Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::specfun::{self, eval_basis_row, make_basis, make_quadrature, BasisKind};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// The multiwavelet functions ψ_0..ψ_{k−1} as monomial coefficients per
/// half-interval (left piece on [0, 1/2), right piece on [1/2, 1]).
#[derive(Debug, Clone)]
pub struct PiecewiseBasis {
    pub kind: BasisKind,
    pub k: usize,
    /// left[i] = monomial coefficients (low degree first) of ψ_i on [0, 1/2)
    pub left: Vec<Vec<f64>>,
    /// right[i] = monomial coefficients of ψ_i on [1/2, 1]
    pub right: Vec<Vec<f64>>,
}

impl PiecewiseBasis {
    /// ψ_i(x); the value at the breakpoint x = 1/2 is taken from the right
    /// piece.
    pub fn eval(&self, i: usize, x: f64) -> f64 {
        let piece = if x < 0.5 { &self.left[i] } else { &self.right[i] };
        specfun::poly::eval(piece, x)
    }
}

/// Decomposition filters H⁽⁰⁾/H⁽¹⁾ (scaling), G⁽⁰⁾/G⁽¹⁾ (wavelet) and the
/// correction matrices Σ⁽⁰⁾/Σ⁽¹⁾ used in reconstruction.
#[derive(Debug, Clone)]
pub struct FilterBank {
    pub kind: BasisKind,
    pub k: usize,
    pub h0: Array2<f64>,
    pub h1: Array2<f64>,
    pub g0: Array2<f64>,
    pub g1: Array2<f64>,
    pub sigma0: Array2<f64>,
    pub sigma1: Array2<f64>,
}

/// Derive the multiwavelet basis by measure-aware Gram-Schmidt.
///
/// Seeds are the left-half scaled basis functions √2 φ_i(2x) extended by
/// zero, orthogonalized first against every φ_j, then against previously
/// built ψ_l, in index order.  After normalization each ψ_i is flipped so
/// its leading (highest-degree, left-piece) coefficient is positive.
pub fn derive_psi(kind: BasisKind, k: usize) -> Result<PiecewiseBasis> {
    let bank = build_filters(kind, k)?;
    psi_from_bank(&bank)
}

/// Compute the full filter bank for the given family and order.
pub fn build_filters(kind: BasisKind, k: usize) -> Result<FilterBank> {
    if k < 1 || k > specfun::MAX_BASIS_ORDER {
        return Err(Error::UnsupportedOrder(format!(
            "filter order {k} outside 1..={}",
            specfun::MAX_BASIS_ORDER
        )));
    }
    let rule = make_quadrature(kind, 2 * k)?;
    let nq = rule.order();

    // Basis rows evaluated on the quadrature grid and on both half-maps.
    let mut p = Array2::zeros((k, nq));
    let mut p_half0 = Array2::zeros((k, nq));
    let mut p_half1 = Array2::zeros((k, nq));
    for (m, &x) in rule.nodes.iter().enumerate() {
        let at = eval_basis_row(kind, k, x);
        let at0 = eval_basis_row(kind, k, x / 2.0);
        let at1 = eval_basis_row(kind, k, (x + 1.0) / 2.0);
        for j in 0..k {
            p[[j, m]] = at[j];
            p_half0[[j, m]] = at0[j];
            p_half1[[j, m]] = at1[j];
        }
    }

    // H⁽⁰⁾_ij = √2 ∫₀^{1/2} φ_i(x) φ_j(2x) w(2x) dx
    //        = (1/√2) ∫₀¹ φ_i(u/2) φ_j(u) w(u) du
    let weighted = |rows: &Array2<f64>| {
        let mut out = rows.clone();
        for (m, &w) in rule.weights.iter().enumerate() {
            out.column_mut(m).mapv_inplace(|v| v * w);
        }
        out
    };
    let h0 = weighted(&p_half0).dot(&p.t()) / SQRT_2;
    let h1 = weighted(&p_half1).dot(&p.t()) / SQRT_2;

    // Correction matrices: Gram blocks of the scale-1 basis under μ₀,
    //   Σ⁽⁰⁾_ij = 2 ∫₀^{1/2} φ_i(2x) φ_j(2x) w(x) dx
    // For Legendre the scale-1 basis stays orthonormal, so Σ = I exactly.
    let (sigma0, sigma1) = match kind {
        BasisKind::Legendre => (Array2::eye(k), Array2::eye(k)),
        BasisKind::Chebyshev => {
            let mut s0 = Array2::zeros((k, k));
            let mut s1 = Array2::zeros((k, k));
            for (m, &x) in rule.nodes.iter().enumerate() {
                let w = rule.weights[m];
                if x < 0.5 {
                    let row = eval_basis_row(kind, k, 2.0 * x);
                    for i in 0..k {
                        for j in 0..k {
                            s0[[i, j]] += 2.0 * w * row[i] * row[j];
                        }
                    }
                } else {
                    let row = eval_basis_row(kind, k, 2.0 * x - 1.0);
                    for i in 0..k {
                        for j in 0..k {
                            s1[[i, j]] += 2.0 * w * row[i] * row[j];
                        }
                    }
                }
            }
            (s0, s1)
        }
    };

    // Gram-Schmidt in scale-1 coordinates under u·blockdiag(Σ⁰,Σ¹)·v.
    let mut gram = Array2::zeros((2 * k, 2 * k));
    gram.slice_mut(s![..k, ..k]).assign(&sigma0);
    gram.slice_mut(s![k.., k..]).assign(&sigma1);
    let mut phi_rows = Array2::zeros((k, 2 * k));
    phi_rows.slice_mut(s![.., ..k]).assign(&h0);
    phi_rows.slice_mut(s![.., k..]).assign(&h1);

    let ip = |u: &Array1<f64>, v: &Array1<f64>| u.dot(&gram.dot(v));
    let mut g = Array2::zeros((k, 2 * k));
    for i in 0..k {
        let mut v: Array1<f64> = Array1::zeros(2 * k);
        v[i] = 1.0; // seed: √2 φ_i(2x) on the left half
        for _ in 0..2 {
            // second sweep re-orthogonalizes against accumulated roundoff
            for j in 0..k {
                let row = phi_rows.row(j).to_owned();
                let c = ip(&v, &row);
                v = v - c * &row;
            }
            for j in 0..i {
                let row = g.row(j).to_owned();
                let c = ip(&v, &row);
                v = v - c * &row;
            }
        }
        let norm = ip(&v, &v).sqrt();
        if norm < 1e-10 {
            return Err(Error::DegenerateBasis(format!(
                "ψ_{i} collapsed during orthogonalization (norm {norm:.3e})"
            )));
        }
        v /= norm;
        // deg(φ_j(2x)) = j, so the leading left coefficient carries the sign
        // of the highest-index nonzero entry in the left block.
        let lead = (0..k)
            .rev()
            .find(|&j| v[j].abs() > 1e-9)
            .map(|j| v[j])
            .or_else(|| (0..k).rev().find(|&j| v[k + j].abs() > 1e-9).map(|j| v[k + j]))
            .unwrap_or(1.0);
        if lead < 0.0 {
            v *= -1.0;
        }
        g.row_mut(i).assign(&v);
    }

    let bank = FilterBank {
        kind,
        k,
        g0: g.slice(s![.., ..k]).to_owned(),
        g1: g.slice(s![.., k..]).to_owned(),
        h0,
        h1,
        sigma0,
        sigma1,
    };
    let residual = validate_filters(&bank);
    if residual > 1e-8 {
        return Err(Error::FilterValidation { residual });
    }
    Ok(bank)
}

/// Max entrywise |[H;G] · blockdiag(Σ⁰,Σ¹) · [H;G]ᵀ − I|.
pub fn validate_filters(bank: &FilterBank) -> f64 {
    let k = bank.k;
    let mut m = Array2::zeros((2 * k, 2 * k));
    m.slice_mut(s![..k, ..k]).assign(&bank.h0);
    m.slice_mut(s![..k, k..]).assign(&bank.h1);
    m.slice_mut(s![k.., ..k]).assign(&bank.g0);
    m.slice_mut(s![k.., k..]).assign(&bank.g1);
    let mut sig = Array2::zeros((2 * k, 2 * k));
    sig.slice_mut(s![..k, ..k]).assign(&bank.sigma0);
    sig.slice_mut(s![k.., k..]).assign(&bank.sigma1);
    let product = m.dot(&sig).dot(&m.t());
    let mut residual = 0.0f64;
    for i in 0..2 * k {
        for j in 0..2 * k {
            let expect = if i == j { 1.0 } else { 0.0 };
            residual = residual.max((product[[i, j]] - expect).abs());
        }
    }
    residual
}

/// Filter bank with H/G entries drawn i.i.d. uniform(−1, 1), each matrix
/// rescaled to unit spectral norm, and Σ = I.  Used as the "random filters"
/// ablation; it violates the orthogonality constraint by construction.
pub fn random_filters(k: usize, seed: u64) -> Result<FilterBank> {
    if k < 1 || k > specfun::MAX_BASIS_ORDER {
        return Err(Error::UnsupportedOrder(format!(
            "filter order {k} outside 1..={}",
            specfun::MAX_BASIS_ORDER
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let m = Array2::from_shape_fn((k, k), |_| rng.gen_range(-1.0..1.0));
        let norm = spectral_norm(&m);
        m / norm
    };
    Ok(FilterBank {
        kind: BasisKind::Legendre,
        k,
        h0: draw(&mut rng),
        h1: draw(&mut rng),
        g0: draw(&mut rng),
        g1: draw(&mut rng),
        sigma0: Array2::eye(k),
        sigma1: Array2::eye(k),
    })
}

/// μ₀ inner product ⟨f, g⟩ evaluated with the 2k-point quadrature of the
/// family, the same rule the bank is derived with.
///
/// For Legendre the rule is mapped onto each half-interval, which integrates
/// the piecewise polynomials arising here exactly.  For Chebyshev the nodes
/// of the full-interval rule define the discrete measure the bank is
/// orthonormal against (no node falls on the ψ breakpoint at 1/2 because the
/// point count is even).
pub fn mu0_inner<F, G>(kind: BasisKind, k: usize, f: F, g: G) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let rule = make_quadrature(kind, 2 * k)?;
    let total = match kind {
        BasisKind::Legendre => {
            let mut acc = 0.0;
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let xl = x / 2.0;
                let xr = (x + 1.0) / 2.0;
                acc += 0.5 * w * (f(xl) * g(xl) + f(xr) * g(xr));
            }
            acc
        }
        BasisKind::Chebyshev => rule.integrate(|x| f(x) * g(x)),
    };
    Ok(total)
}

/// Largest singular value by power iteration on MᵀM.
fn spectral_norm(m: &Array2<f64>) -> f64 {
    let mtm = m.t().dot(m);
    let n = mtm.nrows();
    let mut v = Array1::from_elem(n, 1.0 / (n as f64).sqrt());
    for _ in 0..200 {
        let next = mtm.dot(&v);
        let norm = next.dot(&next).sqrt();
        if norm == 0.0 {
            return 1.0;
        }
        v = next / norm;
    }
    v.dot(&mtm.dot(&v)).sqrt()
}

/// Recover ψ piecewise monomial coefficients from the G rows:
/// ψ_i = Σ_j G⁽⁰⁾_ij √2 φ_j(2x) + Σ_j G⁽¹⁾_ij √2 φ_j(2x−1).
fn psi_from_bank(bank: &FilterBank) -> Result<PiecewiseBasis> {
    use specfun::poly;
    let basis = make_basis(bank.kind, bank.k)?;
    let k = bank.k;
    let mut left = Vec::with_capacity(k);
    let mut right = Vec::with_capacity(k);
    for i in 0..k {
        let mut l = vec![0.0];
        let mut r = vec![0.0];
        for j in 0..k {
            let phi2x = poly::compose_affine(&basis.coeffs[j], 2.0, 0.0);
            let phi2xm1 = poly::compose_affine(&basis.coeffs[j], 2.0, -1.0);
            l = poly::add(&l, &poly::scale(&phi2x, SQRT_2 * bank.g0[[i, j]]));
            r = poly::add(&r, &poly::scale(&phi2xm1, SQRT_2 * bank.g1[[i, j]]));
        }
        left.push(l);
        right.push(r);
    }
    Ok(PiecewiseBasis {
        kind: bank.kind,
        k,
        left,
        right,
    })
}
