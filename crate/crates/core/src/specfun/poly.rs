//! Dense monomial-coefficient helpers (low degree first).
//!
//! Only used for bookkeeping of piecewise polynomials at small orders;
//! evaluation on hot paths goes through the orthogonal-polynomial
//! recurrences.

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (o, &c) in out.iter_mut().zip(a) {
        *o += c;
    }
    for (o, &c) in out.iter_mut().zip(b) {
        *o += c;
    }
    out
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|c| c * s).collect()
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ca) in a.iter().enumerate() {
        for (j, &cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    out
}

/// Coefficients of p(α x + β).
pub fn compose_affine(p: &[f64], alpha: f64, beta: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    for &c in p.iter().rev() {
        // out <- out * (αx + β) + c
        let mut next = vec![0.0; out.len() + 1];
        for (m, &o) in out.iter().enumerate() {
            next[m] += o * beta;
            next[m + 1] += o * alpha;
        }
        next[0] += c;
        out = next;
    }
    while out.len() > 1 && out[out.len() - 1] == 0.0 {
        out.pop();
    }
    out
}

/// Horner evaluation.
pub fn eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}
