//! Differentiable layer primitives with explicit reverse-mode rules.
//!
//! Each forward has a matching backward that accumulates parameter gradients
//! into caller-provided slices and returns the input gradient.  Weight
//! layouts are row-major: conv1d (out, in, tap), conv2d (out, in, ty, tx),
//! pointwise linear (out, in), spectral (out, in, mode) split into real and
//! imaginary parts.

use ndarray::{Array2, Array3};
use rustfft::num_complex::Complex64;

use crate::fft;

/// y[o, l] = b[o] + Σ_{i,t} w[o,i,t] x[i, (l + t − width/2) mod m]
pub fn conv1d_forward(
    w: &[f64],
    b: &[f64],
    out_ch: usize,
    in_ch: usize,
    width: usize,
    x: &Array2<f64>,
) -> Array2<f64> {
    let m = x.ncols();
    let off = (width / 2) as isize;
    let mut y = Array2::zeros((out_ch, m));
    for o in 0..out_ch {
        for i in 0..in_ch {
            let taps = &w[(o * in_ch + i) * width..(o * in_ch + i + 1) * width];
            for l in 0..m {
                let mut acc = 0.0;
                for (t, &wt) in taps.iter().enumerate() {
                    let src = (l as isize + t as isize - off).rem_euclid(m as isize) as usize;
                    acc += wt * x[[i, src]];
                }
                y[[o, l]] += acc;
            }
        }
        for l in 0..m {
            y[[o, l]] += b[o];
        }
    }
    y
}

pub fn conv1d_backward(
    w: &[f64],
    out_ch: usize,
    in_ch: usize,
    width: usize,
    x: &Array2<f64>,
    dy: &Array2<f64>,
    dw: &mut [f64],
    db: &mut [f64],
) -> Array2<f64> {
    let m = x.ncols();
    let off = (width / 2) as isize;
    let mut dx = Array2::zeros((in_ch, m));
    for o in 0..out_ch {
        for l in 0..m {
            db[o] += dy[[o, l]];
        }
        for i in 0..in_ch {
            let taps = &w[(o * in_ch + i) * width..(o * in_ch + i + 1) * width];
            let dtaps = &mut dw[(o * in_ch + i) * width..(o * in_ch + i + 1) * width];
            for l in 0..m {
                let g = dy[[o, l]];
                for t in 0..width {
                    let src = (l as isize + t as isize - off).rem_euclid(m as isize) as usize;
                    dtaps[t] += g * x[[i, src]];
                    dx[[i, src]] += g * taps[t];
                }
            }
        }
    }
    dx
}

/// y[o, p, q] = b[o] + Σ w[o,i,s,t] x[i, (p+s−off) mod m, (q+t−off) mod m]
pub fn conv2d_forward(
    w: &[f64],
    b: &[f64],
    out_ch: usize,
    in_ch: usize,
    width: usize,
    x: &Array3<f64>,
) -> Array3<f64> {
    let (_, h, wd) = x.dim();
    let off = (width / 2) as isize;
    let mut y = Array3::zeros((out_ch, h, wd));
    for o in 0..out_ch {
        for i in 0..in_ch {
            let base = (o * in_ch + i) * width * width;
            for p in 0..h {
                for q in 0..wd {
                    let mut acc = 0.0;
                    for s in 0..width {
                        let sp = (p as isize + s as isize - off).rem_euclid(h as isize) as usize;
                        for t in 0..width {
                            let sq =
                                (q as isize + t as isize - off).rem_euclid(wd as isize) as usize;
                            acc += w[base + s * width + t] * x[[i, sp, sq]];
                        }
                    }
                    y[[o, p, q]] += acc;
                }
            }
        }
        for p in 0..h {
            for q in 0..wd {
                y[[o, p, q]] += b[o];
            }
        }
    }
    y
}

pub fn conv2d_backward(
    w: &[f64],
    out_ch: usize,
    in_ch: usize,
    width: usize,
    x: &Array3<f64>,
    dy: &Array3<f64>,
    dw: &mut [f64],
    db: &mut [f64],
) -> Array3<f64> {
    let (_, h, wd) = x.dim();
    let off = (width / 2) as isize;
    let mut dx = Array3::zeros((in_ch, h, wd));
    for o in 0..out_ch {
        for p in 0..h {
            for q in 0..wd {
                db[o] += dy[[o, p, q]];
            }
        }
        for i in 0..in_ch {
            let base = (o * in_ch + i) * width * width;
            for p in 0..h {
                for q in 0..wd {
                    let g = dy[[o, p, q]];
                    for s in 0..width {
                        let sp = (p as isize + s as isize - off).rem_euclid(h as isize) as usize;
                        for t in 0..width {
                            let sq =
                                (q as isize + t as isize - off).rem_euclid(wd as isize) as usize;
                            dw[base + s * width + t] += g * x[[i, sp, sq]];
                            dx[[i, sp, sq]] += g * w[base + s * width + t];
                        }
                    }
                }
            }
        }
    }
    dx
}

/// y = W x + b, applied at every position (columns of a (ch, m) array).
pub fn linear_forward(
    w: &[f64],
    b: &[f64],
    out_ch: usize,
    in_ch: usize,
    x: &Array2<f64>,
) -> Array2<f64> {
    let m = x.ncols();
    let wmat =
        ndarray::ArrayView2::from_shape((out_ch, in_ch), w).expect("linear weight shape");
    let mut y = wmat.dot(x);
    for o in 0..out_ch {
        for l in 0..m {
            y[[o, l]] += b[o];
        }
    }
    y
}

pub fn linear_backward(
    w: &[f64],
    out_ch: usize,
    in_ch: usize,
    x: &Array2<f64>,
    dy: &Array2<f64>,
    dw: &mut [f64],
    db: &mut [f64],
) -> Array2<f64> {
    let wmat =
        ndarray::ArrayView2::from_shape((out_ch, in_ch), w).expect("linear weight shape");
    let dwmat = dy.dot(&x.t());
    for o in 0..out_ch {
        for i in 0..in_ch {
            dw[o * in_ch + i] += dwmat[[o, i]];
        }
        db[o] += dy.row(o).sum();
    }
    wmat.t().dot(dy)
}

/// Spectral convolution: multiply the lowest `modes` Fourier modes by a
/// learned complex matrix per mode, mirror for conjugate symmetry, inverse
/// transform.  Frequencies at or above m/2 are never touched.
pub fn spectral_forward(
    wre: &[f64],
    wim: &[f64],
    out_ch: usize,
    in_ch: usize,
    modes: usize,
    x: &Array2<f64>,
) -> (Array2<f64>, Vec<Vec<Complex64>>) {
    let m = x.ncols();
    let eff = modes.min(m / 2);
    let spectra: Vec<Vec<Complex64>> = (0..in_ch)
        .map(|i| fft::fft_of_real(x.row(i).as_slice().expect("contiguous row")))
        .collect();
    let mut y = Array2::zeros((out_ch, m));
    for o in 0..out_ch {
        let mut yhat = vec![Complex64::new(0.0, 0.0); m];
        for mode in 0..eff {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..in_ch {
                let idx = (o * in_ch + i) * modes + mode;
                acc += Complex64::new(wre[idx], wim[idx]) * spectra[i][mode];
            }
            yhat[mode] = acc;
            if mode > 0 {
                yhat[m - mode] = acc.conj();
            }
        }
        let row = fft::real_inverse(&yhat);
        for l in 0..m {
            y[[o, l]] = row[l];
        }
    }
    (y, spectra)
}

pub fn spectral_backward(
    wre: &[f64],
    wim: &[f64],
    out_ch: usize,
    in_ch: usize,
    modes: usize,
    spectra: &[Vec<Complex64>],
    dy: &Array2<f64>,
    dwre: &mut [f64],
    dwim: &mut [f64],
) -> Array2<f64> {
    let m = dy.ncols();
    let eff = modes.min(m / 2);
    let scale = 1.0 / m as f64;
    let mut dx = Array2::zeros((in_ch, m));
    let mut dxhat = vec![vec![Complex64::new(0.0, 0.0); m]; in_ch];
    for o in 0..out_ch {
        let dhat = fft::fft_of_real(dy.row(o).as_slice().expect("contiguous row"));
        for mode in 0..eff {
            // direct slot plus conjugate mirror double every positive mode
            let mult = if mode == 0 { 1.0 } else { 2.0 };
            let dyhat = dhat[mode] * (mult * scale);
            for i in 0..in_ch {
                let idx = (o * in_ch + i) * modes + mode;
                let grad_w = dyhat * spectra[i][mode].conj();
                dwre[idx] += grad_w.re;
                dwim[idx] += grad_w.im;
                dxhat[i][mode] += Complex64::new(wre[idx], wim[idx]).conj() * dyhat;
            }
        }
    }
    for i in 0..in_ch {
        let mut buf = std::mem::take(&mut dxhat[i]);
        fft::fft_inverse(&mut buf);
        for l in 0..m {
            dx[[i, l]] = buf[l].re;
        }
    }
    dx
}

pub fn relu_forward_2(x: &Array2<f64>) -> Array2<f64> {
    x.mapv(|v| v.max(0.0))
}

pub fn relu_backward_2(x: &Array2<f64>, dy: &Array2<f64>) -> Array2<f64> {
    let mut dx = dy.clone();
    dx.zip_mut_with(x, |g, &v| {
        if v <= 0.0 {
            *g = 0.0;
        }
    });
    dx
}

pub fn relu_forward_3(x: &Array3<f64>) -> Array3<f64> {
    x.mapv(|v| v.max(0.0))
}

pub fn relu_backward_3(x: &Array3<f64>, dy: &Array3<f64>) -> Array3<f64> {
    let mut dx = dy.clone();
    dx.zip_mut_with(x, |g, &v| {
        if v <= 0.0 {
            *g = 0.0;
        }
    });
    dx
}

/// channel-space linear map for (ch, h, w) fields
pub fn linear_forward_3(
    w: &[f64],
    b: &[f64],
    out_ch: usize,
    in_ch: usize,
    x: &Array3<f64>,
) -> Array3<f64> {
    let (_, h, wd) = x.dim();
    let flat = x.to_shape((in_ch, h * wd)).expect("contiguous").to_owned();
    let y = linear_forward(w, b, out_ch, in_ch, &flat);
    y.into_shape_with_order((out_ch, h, wd)).unwrap()
}

pub fn linear_backward_3(
    w: &[f64],
    out_ch: usize,
    in_ch: usize,
    x: &Array3<f64>,
    dy: &Array3<f64>,
    dw: &mut [f64],
    db: &mut [f64],
) -> Array3<f64> {
    let (_, h, wd) = x.dim();
    let flat_x = x.to_shape((in_ch, h * wd)).expect("contiguous").to_owned();
    let flat_dy = dy.to_shape((out_ch, h * wd)).expect("contiguous").to_owned();
    let dx = linear_backward(w, out_ch, in_ch, &flat_x, &flat_dy, dw, db);
    dx.into_shape_with_order((in_ch, h, wd)).unwrap()
}
