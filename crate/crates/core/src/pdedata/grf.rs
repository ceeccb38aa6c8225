//! Random input samplers: spectral Gaussian random fields, the periodic
//! squared-exponential kernel, and band-limited smooth random functions.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;

/// Covariance σ²(−Δ + τ²I)^{−α} on the unit interval/square.
#[derive(Debug, Clone, Copy)]
pub struct GrfSpec {
    pub sigma_sq: f64,
    pub tau: f64,
    pub alpha: f64,
    /// 1 or 2
    pub dims: usize,
    pub periodic: bool,
}

impl GrfSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sigma_sq <= 0.0 || self.tau <= 0.0 {
            return Err(Error::InvalidSpec(
                "GRF scale and inverse length must be positive".into(),
            ));
        }
        if self.alpha <= self.dims as f64 / 2.0 {
            return Err(Error::InvalidSpec(format!(
                "GRF regularity α = {} must exceed dims/2 = {}",
                self.alpha,
                self.dims as f64 / 2.0
            )));
        }
        if self.dims != 1 && self.dims != 2 {
            return Err(Error::InvalidSpec("GRF dims must be 1 or 2".into()));
        }
        Ok(())
    }

    /// mode standard deviation σ (λ_m + τ²)^{−α/2} for Laplacian eigenvalue λ_m
    fn mode_std(&self, eigenvalue: f64) -> f64 {
        self.sigma_sq.sqrt() * (eigenvalue + self.tau * self.tau).powf(-self.alpha / 2.0)
    }
}

fn check_power_of_two(resolution: usize) -> Result<()> {
    if resolution == 0 || !resolution.is_power_of_two() {
        return Err(Error::InvalidSpec(format!(
            "resolution {resolution} is not a power of two"
        )));
    }
    Ok(())
}

/// Periodic 1-D sample on x_j = j/r: i.i.d. normal Fourier coefficients with
/// conjugate symmetry, mode m scaled by σ(4π²m²/ℓ² + τ²)^{−α/2} for domain
/// length ℓ.
pub fn sample_grf_1d_on(
    spec: &GrfSpec,
    resolution: usize,
    domain_len: f64,
    seed: u64,
) -> Result<Array1<f64>> {
    spec.validate()?;
    check_power_of_two(resolution)?;
    if spec.dims != 1 || !spec.periodic {
        return Err(Error::InvalidSpec(
            "sample_grf_1d needs a periodic 1-D spec".into(),
        ));
    }
    let r = resolution;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum = vec![Complex64::new(0.0, 0.0); r];
    let normal = |rng: &mut ChaCha8Rng| -> f64 {
        // Box-Muller
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    for m in 0..=r / 2 {
        let kappa = 2.0 * std::f64::consts::PI * m as f64 / domain_len;
        let std = spec.mode_std(kappa * kappa);
        if m == 0 || m == r / 2 {
            spectrum[m] = Complex64::new(std * normal(&mut rng), 0.0);
        } else {
            let re = normal(&mut rng);
            let im = normal(&mut rng);
            let c = Complex64::new(re, im) * (std / 2f64.sqrt());
            spectrum[m] = c;
            spectrum[r - m] = c.conj();
        }
    }
    let mut buf = spectrum;
    fft::fft_inverse(&mut buf);
    Ok(Array1::from_iter(buf.iter().map(|c| c.re)))
}

/// Periodic 1-D sample on the unit interval.
pub fn sample_grf_1d(spec: &GrfSpec, resolution: usize, seed: u64) -> Result<Array1<f64>> {
    sample_grf_1d_on(spec, resolution, 1.0, seed)
}

/// 2-D sample on the unit square: periodic spectral sampling, or a Neumann
/// field realized by even reflection (cosine modes) when `periodic` is
/// false.  The Neumann variant returns values on the inclusive grid
/// x_j = j/r, j = 0..=r (so (r+1)² values).
pub fn sample_grf_2d(spec: &GrfSpec, resolution: usize, seed: u64) -> Result<Array2<f64>> {
    spec.validate()?;
    check_power_of_two(resolution)?;
    if spec.dims != 2 {
        return Err(Error::InvalidSpec("sample_grf_2d needs dims = 2".into()));
    }
    if spec.periodic {
        periodic_2d(spec, resolution, seed)
    } else {
        neumann_2d(spec, resolution, seed)
    }
}

fn periodic_2d(spec: &GrfSpec, r: usize, seed: u64) -> Result<Array2<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau_pi = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    let mut raw = vec![Complex64::new(0.0, 0.0); r * r];
    let normal = |rng: &mut ChaCha8Rng| -> f64 {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    for m1 in 0..r {
        for m2 in 0..r {
            let f1 = fft::signed_freq(m1, r) as f64;
            let f2 = fft::signed_freq(m2, r) as f64;
            let std = spec.mode_std(tau_pi * (f1 * f1 + f2 * f2));
            let re = normal(&mut rng);
            let im = normal(&mut rng);
            raw[m1 * r + m2] = Complex64::new(re, im) * (std / 2f64.sqrt());
        }
    }
    // symmetrize: ĉ[m] <- (raw[m] + conj(raw[−m]))/√2 keeps per-mode variance
    let mut spec2d = vec![Complex64::new(0.0, 0.0); r * r];
    for m1 in 0..r {
        for m2 in 0..r {
            let n1 = (r - m1) % r;
            let n2 = (r - m2) % r;
            spec2d[m1 * r + m2] =
                (raw[m1 * r + m2] + raw[n1 * r + n2].conj()) / 2f64.sqrt();
        }
    }
    // inverse transform rows then columns
    let field = ifft2(&mut spec2d, r);
    Ok(field)
}

fn ifft2(data: &mut [Complex64], r: usize) -> Array2<f64> {
    for row in 0..r {
        fft::fft_inverse(&mut data[row * r..(row + 1) * r]);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); r];
    for c in 0..r {
        for row in 0..r {
            col[row] = data[row * r + c];
        }
        fft::fft_inverse(&mut col);
        for row in 0..r {
            data[row * r + c] = col[row];
        }
    }
    Array2::from_shape_fn((r, r), |(i, j)| data[i * r + j].re)
}

fn neumann_2d(spec: &GrfSpec, r: usize, seed: u64) -> Result<Array2<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_r = 2 * r;
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let normal = |rng: &mut ChaCha8Rng| -> f64 {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut spectrum = vec![Complex64::new(0.0, 0.0); two_r * two_r];
    // cosine expansion: a = Σ ξ_m σ(π²|m|²+τ²)^{−α/2} φ_{m1}(x) φ_{m2}(y)
    // with the orthonormal Neumann basis φ_0 = 1, φ_m = √2 cos(πmx); each
    // cosine splits into two exponentials on the doubled periodic grid
    for m1 in 0..r {
        for m2 in 0..r {
            let std = spec.mode_std(pi2 * ((m1 * m1 + m2 * m2) as f64));
            let norm1 = if m1 == 0 { 1.0 } else { 2f64.sqrt() };
            let norm2 = if m2 == 0 { 1.0 } else { 2f64.sqrt() };
            let amp = std * norm1 * norm2 * normal(&mut rng) / 4.0;
            for s1 in [m1, (two_r - m1) % two_r] {
                for s2 in [m2, (two_r - m2) % two_r] {
                    spectrum[s1 * two_r + s2] += Complex64::new(amp, 0.0);
                }
            }
        }
    }
    for row in 0..two_r {
        fft::fft_inverse(&mut spectrum[row * two_r..(row + 1) * two_r]);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); two_r];
    for c in 0..=r {
        for row in 0..two_r {
            col[row] = spectrum[row * two_r + c];
        }
        fft::fft_inverse(&mut col);
        for row in 0..two_r {
            spectrum[row * two_r + c] = col[row];
        }
    }
    Ok(Array2::from_shape_fn((r + 1, r + 1), |(i, j)| {
        spectrum[i * two_r + j].re
    }))
}

/// Draw from N(0, K) for the periodic squared-exponential kernel
/// k(x, x') = exp(−2 sin²(π(x−x')/P)/L²) on the grid x_i = iP/r, via
/// symmetric eigendecomposition with eigenvalue clipping at zero.
pub fn sample_sqexp_periodic(
    smoothing: f64,
    period: f64,
    resolution: usize,
    seed: u64,
) -> Result<Array1<f64>> {
    if smoothing <= 0.0 || period <= 0.0 {
        return Err(Error::InvalidSpec(
            "squared-exponential kernel needs L > 0 and P > 0".into(),
        ));
    }
    check_power_of_two(resolution)?;
    let r = resolution;
    let gram = sqexp_gram(smoothing, period, r);
    let eig = nalgebra::SymmetricEigen::new(gram);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = |rng: &mut ChaCha8Rng| -> f64 {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let xi = DVector::from_fn(r, |_, _| normal(&mut rng));
    let mut scaled = xi;
    for i in 0..r {
        let lam = eig.eigenvalues[i].max(0.0);
        scaled[i] *= lam.sqrt();
    }
    let sample = &eig.eigenvectors * scaled;
    Ok(Array1::from_iter(sample.iter().copied()))
}

/// Kernel Gram matrix on the uniform periodic grid.
pub fn sqexp_gram(smoothing: f64, period: f64, resolution: usize) -> DMatrix<f64> {
    let r = resolution;
    DMatrix::from_fn(r, r, |i, j| {
        let dx = (i as f64 - j as f64) * period / r as f64;
        let s = (std::f64::consts::PI * dx / period).sin();
        (-2.0 * s * s / (smoothing * smoothing)).exp()
    })
}

/// Band-limited periodic random function: i.i.d. normal Fourier
/// coefficients for |m| ≤ ceil(1/λ), zero beyond, normalized to unit
/// empirical standard deviation.  Small λ means fast fluctuations.
pub fn sample_smooth_random(lambda: f64, resolution: usize, seed: u64) -> Result<Array1<f64>> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidSpec(format!(
            "fluctuation parameter λ = {lambda} outside (0, 1]"
        )));
    }
    check_power_of_two(resolution)?;
    let r = resolution;
    let cutoff = (1.0 / lambda).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = |rng: &mut ChaCha8Rng| -> f64 {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut spectrum = vec![Complex64::new(0.0, 0.0); r];
    for m in 0..=cutoff.min(r / 2 - 1).max(0) {
        if m == 0 {
            spectrum[0] = Complex64::new(normal(&mut rng), 0.0);
        } else {
            let c = Complex64::new(normal(&mut rng), normal(&mut rng)) / 2f64.sqrt();
            spectrum[m] = c;
            spectrum[r - m] = c.conj();
        }
    }
    let mut buf = spectrum;
    fft::fft_inverse(&mut buf);
    let field: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let mean = field.iter().sum::<f64>() / r as f64;
    let var = field.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / r as f64;
    let std = var.sqrt();
    if std == 0.0 {
        return Err(Error::Covariance("degenerate smooth random sample".into()));
    }
    Ok(Array1::from_iter(field.iter().map(|v| v / std)))
}
