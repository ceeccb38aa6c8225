//! Multiscale decomposition / reconstruction of coefficient arrays in one
//! and two dimensions.
//!
//! Coefficient layout is scale-major, then translation l, then polynomial
//! index j.  A 1-D coefficient array at scale n has shape (k, 2ⁿ); columns
//! are translations.  Decomposition maps scale n+1 to n by
//!
//!   s_l^n = H⁽⁰⁾ s_{2l}^{n+1} + H⁽¹⁾ s_{2l+1}^{n+1}
//!   d_l^n = G⁽⁰⁾ s_{2l}^{n+1} + G⁽¹⁾ s_{2l+1}^{n+1}
//!
//! and reconstruction inverts it through the correction matrices:
//!
//!   s_{2l}^{n+1}   = Σ⁽⁰⁾ (H⁽⁰⁾ᵀ s_l^n + G⁽⁰⁾ᵀ d_l^n)
//!   s_{2l+1}^{n+1} = Σ⁽¹⁾ (H⁽¹⁾ᵀ s_l^n + G⁽¹⁾ᵀ d_l^n)
//!
//! Two dimensions use the Kronecker lift of the same bank: four child
//! blocks per cell and three detail families per scale.

pub mod kernel;

use ndarray::{s, Array2, Array3};

use crate::error::{Error, Result};
use crate::filterbank::FilterBank;

pub use kernel::{project_kernel, KernelProjection, NamedKernel};

/// Per-scale multiscale (s) and multiwavelet (d) coefficients of a 1-D
/// signal.
#[derive(Debug, Clone)]
pub struct MultiresCoeffs {
    pub k: usize,
    /// finest scale N; the input array has 2^N translations
    pub finest: usize,
    /// coarsest scale L kept in `s[0]`
    pub coarsest: usize,
    /// s[m] has shape (k, 2^{L+m}) for m = 0..=N−L
    pub s: Vec<Array2<f64>>,
    /// d[m] has shape (k, 2^{L+m}) for m = 0..N−L
    pub d: Vec<Array2<f64>>,
}

fn check_signal(bank: &FilterBank, fine: &Array2<f64>) -> Result<usize> {
    if fine.nrows() != bank.k {
        return Err(Error::Shape(format!(
            "signal has {} channels, filter bank expects k = {}",
            fine.nrows(),
            bank.k
        )));
    }
    let len = fine.ncols();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Shape(format!(
            "signal length {len} is not a power of two"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

/// One decomposition step: (k, 2m) -> s, d of shape (k, m).
pub fn decompose_step(bank: &FilterBank, fine: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
    let even = fine.slice(s![.., ..;2]);
    let odd = fine.slice(s![.., 1..;2]);
    let s_coarse = bank.h0.dot(&even) + bank.h1.dot(&odd);
    let d_coarse = bank.g0.dot(&even) + bank.g1.dot(&odd);
    (s_coarse, d_coarse)
}

/// One reconstruction step: s, d of shape (k, m) -> (k, 2m).
pub fn reconstruct_step(
    bank: &FilterBank,
    s_coarse: &Array2<f64>,
    d_coarse: &Array2<f64>,
) -> Array2<f64> {
    let even = bank
        .sigma0
        .dot(&(bank.h0.t().dot(s_coarse) + bank.g0.t().dot(d_coarse)));
    let odd = bank
        .sigma1
        .dot(&(bank.h1.t().dot(s_coarse) + bank.g1.t().dot(d_coarse)));
    let (k, m) = (s_coarse.nrows(), s_coarse.ncols());
    let mut out = Array2::zeros((k, 2 * m));
    out.slice_mut(s![.., ..;2]).assign(&even);
    out.slice_mut(s![.., 1..;2]).assign(&odd);
    out
}

/// Full decomposition of a finest-scale array down to scale `coarsest`.
pub fn decompose(
    bank: &FilterBank,
    fine: &Array2<f64>,
    coarsest: usize,
) -> Result<MultiresCoeffs> {
    let finest = check_signal(bank, fine)?;
    if coarsest >= finest {
        return Err(Error::Scale(format!(
            "coarsest scale {coarsest} must be below finest scale {finest}"
        )));
    }
    let mut s_arrays = vec![fine.to_owned()];
    let mut d_arrays = Vec::new();
    for _ in (coarsest..finest).rev() {
        let (s_next, d_next) = decompose_step(bank, s_arrays.last().unwrap());
        s_arrays.push(s_next);
        d_arrays.push(d_next);
    }
    s_arrays.reverse();
    d_arrays.reverse();
    Ok(MultiresCoeffs {
        k: bank.k,
        finest,
        coarsest,
        s: s_arrays,
        d: d_arrays,
    })
}

/// Rebuild the finest-scale array from the coarsest s and all d arrays.
pub fn reconstruct(bank: &FilterBank, coeffs: &MultiresCoeffs) -> Result<Array2<f64>> {
    if coeffs.k != bank.k {
        return Err(Error::Shape(format!(
            "coefficients have k = {}, bank has k = {}",
            coeffs.k, bank.k
        )));
    }
    let levels = coeffs.finest - coeffs.coarsest;
    if coeffs.d.len() != levels || coeffs.s.is_empty() {
        return Err(Error::Shape(format!(
            "expected {} detail arrays, found {}",
            levels,
            coeffs.d.len()
        )));
    }
    let mut current = coeffs.s[0].clone();
    for (m, d) in coeffs.d.iter().enumerate() {
        let width = 1usize << (coeffs.coarsest + m);
        if current.dim() != (bank.k, width) || d.dim() != (bank.k, width) {
            return Err(Error::Shape(format!(
                "scale {} arrays have inconsistent shapes",
                coeffs.coarsest + m
            )));
        }
        current = reconstruct_step(bank, &current, d);
    }
    Ok(current)
}

/// The 2-D filter bank obtained from Kronecker products of a 1-D bank.
///
/// `hh[e1][e2] = H^{(e1)} ⊗ H^{(e2)}` maps the child block with parity
/// (e1, e2) into the coarse s-space; `gh`, `hg`, `gg` produce the three
/// detail families, and `sig[e1][e2] = Σ^{(e1)} ⊗ Σ^{(e2)}` corrects the
/// reconstruction.  All matrices are k²×k².
#[derive(Debug, Clone)]
pub struct KronBank {
    pub k: usize,
    pub hh: [[Array2<f64>; 2]; 2],
    pub gh: [[Array2<f64>; 2]; 2],
    pub hg: [[Array2<f64>; 2]; 2],
    pub gg: [[Array2<f64>; 2]; 2],
    pub sig: [[Array2<f64>; 2]; 2],
}

/// Kronecker product, channel flattening (j1, j2) -> j1·k + j2.
pub fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i1 in 0..ra {
        for j1 in 0..ca {
            let v = a[[i1, j1]];
            if v == 0.0 {
                continue;
            }
            for i2 in 0..rb {
                for j2 in 0..cb {
                    out[[i1 * rb + i2, j1 * cb + j2]] = v * b[[i2, j2]];
                }
            }
        }
    }
    out
}

/// Lift a 1-D bank to 2-D via Kronecker products.
pub fn kron_bank(bank: &FilterBank) -> KronBank {
    let h = [&bank.h0, &bank.h1];
    let g = [&bank.g0, &bank.g1];
    let sg = [&bank.sigma0, &bank.sigma1];
    let build = |a: [&Array2<f64>; 2], b: [&Array2<f64>; 2]| {
        [
            [kron(a[0], b[0]), kron(a[0], b[1])],
            [kron(a[1], b[0]), kron(a[1], b[1])],
        ]
    };
    KronBank {
        k: bank.k,
        hh: build(h, h),
        gh: build(g, h),
        hg: build(h, g),
        gg: build(g, g),
        sig: build(sg, sg),
    }
}

/// 2-D multiscale coefficients.  Channel dimension is k² (pair (j1, j2)
/// flattened); each scale has three detail families ordered
/// [G⊗H, H⊗G, G⊗G].
#[derive(Debug, Clone)]
pub struct MultiresCoeffs2d {
    pub k: usize,
    pub finest: usize,
    pub coarsest: usize,
    /// s[m]: (k², 2^{L+m}, 2^{L+m})
    pub s: Vec<Array3<f64>>,
    /// d[m]: three arrays of shape (k², 2^{L+m}, 2^{L+m})
    pub d: Vec<[Array3<f64>; 3]>,
}

fn check_field(kb: &KronBank, field: &Array3<f64>) -> Result<usize> {
    let k2 = kb.k * kb.k;
    let (c, h, w) = field.dim();
    if c != k2 {
        return Err(Error::Shape(format!(
            "field has {c} channels, expected k² = {k2}"
        )));
    }
    if h != w || h == 0 || !h.is_power_of_two() {
        return Err(Error::Shape(format!(
            "field is {h}×{w}; a square power-of-two grid is required"
        )));
    }
    Ok(h.trailing_zeros() as usize)
}

/// channel-wise matrix multiply: out[c, i, j] = Σ_c' m[c, c'] x[c', i, j]
fn channel_mul(m: &Array2<f64>, x: &Array3<f64>) -> Array3<f64> {
    let (c_out, _) = m.dim();
    let (_, h, w) = x.dim();
    let flat = x
        .to_shape((x.dim().0, h * w))
        .expect("contiguous channel reshape")
        .to_owned();
    let out = m.dot(&flat);
    out.into_shape_with_order((c_out, h, w)).unwrap()
}

/// One 2-D decomposition step: (k², 2m, 2m) -> s plus three detail arrays of
/// shape (k², m, m).
pub fn decompose_step_2d(
    kb: &KronBank,
    fine: &Array3<f64>,
) -> (Array3<f64>, [Array3<f64>; 3]) {
    let (k2, h, _) = fine.dim();
    let m = h / 2;
    let mut s_out = Array3::zeros((k2, m, m));
    let mut dgh = Array3::zeros((k2, m, m));
    let mut dhg = Array3::zeros((k2, m, m));
    let mut dgg = Array3::zeros((k2, m, m));
    for e1 in 0..2 {
        for e2 in 0..2 {
            let child = fine.slice(s![.., e1..;2, e2..;2]).to_owned();
            s_out = s_out + channel_mul(&kb.hh[e1][e2], &child);
            dgh = dgh + channel_mul(&kb.gh[e1][e2], &child);
            dhg = dhg + channel_mul(&kb.hg[e1][e2], &child);
            dgg = dgg + channel_mul(&kb.gg[e1][e2], &child);
        }
    }
    (s_out, [dgh, dhg, dgg])
}

/// One 2-D reconstruction step.
pub fn reconstruct_step_2d(
    kb: &KronBank,
    s_coarse: &Array3<f64>,
    d_coarse: &[Array3<f64>; 3],
) -> Array3<f64> {
    let (k2, m, _) = s_coarse.dim();
    let mut out = Array3::zeros((k2, 2 * m, 2 * m));
    for e1 in 0..2 {
        for e2 in 0..2 {
            let mut acc = channel_mul(&kb.hh[e1][e2].t().to_owned(), s_coarse);
            acc = acc + channel_mul(&kb.gh[e1][e2].t().to_owned(), &d_coarse[0]);
            acc = acc + channel_mul(&kb.hg[e1][e2].t().to_owned(), &d_coarse[1]);
            acc = acc + channel_mul(&kb.gg[e1][e2].t().to_owned(), &d_coarse[2]);
            let child = channel_mul(&kb.sig[e1][e2], &acc);
            out.slice_mut(s![.., e1..;2, e2..;2]).assign(&child);
        }
    }
    out
}

/// Full 2-D decomposition down to scale `coarsest`.
pub fn decompose_2d(
    kb: &KronBank,
    fine: &Array3<f64>,
    coarsest: usize,
) -> Result<MultiresCoeffs2d> {
    let finest = check_field(kb, fine)?;
    if coarsest >= finest {
        return Err(Error::Scale(format!(
            "coarsest scale {coarsest} must be below finest scale {finest}"
        )));
    }
    let mut s_arrays = vec![fine.to_owned()];
    let mut d_arrays = Vec::new();
    for _ in (coarsest..finest).rev() {
        let (s_next, d_next) = decompose_step_2d(kb, s_arrays.last().unwrap());
        s_arrays.push(s_next);
        d_arrays.push(d_next);
    }
    s_arrays.reverse();
    d_arrays.reverse();
    Ok(MultiresCoeffs2d {
        k: kb.k,
        finest,
        coarsest,
        s: s_arrays,
        d: d_arrays,
    })
}

/// Rebuild the finest 2-D array.
pub fn reconstruct_2d(kb: &KronBank, coeffs: &MultiresCoeffs2d) -> Result<Array3<f64>> {
    if coeffs.k != kb.k {
        return Err(Error::Shape("bank order mismatch".into()));
    }
    if coeffs.d.len() != coeffs.finest - coeffs.coarsest {
        return Err(Error::Shape("detail array count mismatch".into()));
    }
    let mut current = coeffs.s[0].clone();
    for d in &coeffs.d {
        current = reconstruct_step_2d(kb, &current, d);
    }
    Ok(current)
}
