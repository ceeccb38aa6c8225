//! The multiwavelet neural operator: a lifting layer, a cascade of
//! multiwavelet layers, and a pointwise projection.
//!
//! Each layer runs the decomposition ladder down to the coarsest scale L,
//! applies the learned maps at every scale,
//!
//!   Ud^n = A(d^n) + B(s^n),   Ûs^n = C(d^n),   Us^L = T̄(s^L),
//!
//! then rebuilds the finest scale with the reconstruction ladder, feeding
//! s ← Us + Ûs at each step.  A, B and C are a circular convolution followed
//! by a pointwise channel mix (optionally a spectral convolution truncated
//! to a fixed number of Fourier modes); T̄ is a dense channel map.  The same
//! parameters serve every scale and every input resolution: only the ladder
//! depth changes with the input length.
//!
//! Gradients are hand-written reverse mode; `backward` replays the forward
//! pass, then walks the ladder in reverse.  All arithmetic is f64.

pub mod adam;
pub mod checkpoint;
pub mod layers;
pub mod train;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filterbank::{build_filters, FilterBank};
use crate::specfun::BasisKind;
use crate::transform::{kron_bank, reconstruct_step, KronBank};

/// First stage of the A/B/C maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvSpec {
    /// circular 1-D/2-D convolution of the given tap width
    Conv { width: usize },
    /// Fourier multiplier on the lowest `modes` frequencies (1-D only)
    Spectral { modes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    None,
    Relu,
}

/// Structural description of an operator model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelConfig {
    pub kind: BasisKind,
    pub k: usize,
    pub layers: usize,
    /// coarsest scale L of the decomposition ladder
    pub coarsest: usize,
    pub conv: ConvSpec,
    pub activation: Activation,
    pub two_d: bool,
}

impl ModelConfig {
    /// channels on the s path
    fn cs(&self) -> usize {
        if self.two_d {
            self.k * self.k
        } else {
            self.k
        }
    }

    /// channels on the d path (three detail families in 2-D)
    fn cd(&self) -> usize {
        if self.two_d {
            3 * self.k * self.k
        } else {
            self.k
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct TensorSpec {
    pub name: String,
    pub offset: usize,
    pub shape: Vec<usize>,
}

impl TensorSpec {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }
}

/// Flat parameter layout: every tensor is a slice of one Vec<f64>.
#[derive(Debug, Clone, Default)]
pub struct Layout {
    pub(crate) tensors: Vec<TensorSpec>,
    pub(crate) total: usize,
}

impl Layout {
    fn push(&mut self, name: String, shape: Vec<usize>) -> usize {
        let len: usize = shape.iter().product();
        self.tensors.push(TensorSpec {
            name,
            offset: self.total,
            shape,
        });
        self.total += len;
        self.tensors.len() - 1
    }

    pub fn parameter_count(&self) -> usize {
        self.total
    }
}

#[derive(Debug, Clone, Copy)]
enum StageIdx {
    Conv { w: usize, b: usize },
    Spectral { re: usize, im: usize },
}

#[derive(Debug, Clone, Copy)]
struct NetIdx {
    stage: StageIdx,
    lin_w: usize,
    lin_b: usize,
    in_ch: usize,
    out_ch: usize,
}

#[derive(Debug, Clone)]
struct LayerIdx {
    a: NetIdx,
    b: NetIdx,
    c: NetIdx,
    tbar_w: usize,
    tbar_b: usize,
}

#[derive(Debug, Clone)]
struct ModelIdx {
    lift_w: usize,
    lift_b: usize,
    layers: Vec<LayerIdx>,
    proj_w: usize,
    proj_b: usize,
}

/// The operator model: fixed filter bank plus trainable parameters.
#[derive(Debug, Clone)]
pub struct OperatorModel {
    pub config: ModelConfig,
    bank: FilterBank,
    kron: Option<KronBank>,
    layout: Layout,
    idx: ModelIdx,
    params: Vec<f64>,
}

impl OperatorModel {
    /// Build a model whose filter bank is derived from (kind, k).
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self> {
        let bank = build_filters(config.kind, config.k)?;
        Self::with_bank(config, bank, seed)
    }

    /// Build a model around an explicit filter bank (e.g. random filters for
    /// the ablation study).
    pub fn with_bank(config: ModelConfig, bank: FilterBank, seed: u64) -> Result<Self> {
        if bank.k != config.k {
            return Err(Error::Incompatible(format!(
                "bank k = {} but config k = {}",
                bank.k, config.k
            )));
        }
        if config.layers == 0 {
            return Err(Error::InvalidSpec("model needs at least one layer".into()));
        }
        if config.two_d && matches!(config.conv, ConvSpec::Spectral { .. }) {
            return Err(Error::Incompatible(
                "spectral convolutions are only wired for 1-D models".into(),
            ));
        }
        if let ConvSpec::Conv { width } = config.conv {
            if width == 0 || width % 2 == 0 {
                return Err(Error::InvalidSpec(format!(
                    "conv width {width} must be odd and positive"
                )));
            }
        }
        let (layout, idx) = build_layout(&config);
        let kron = config.two_d.then(|| kron_bank(&bank));
        let mut model = OperatorModel {
            config,
            bank,
            kron,
            params: vec![0.0; layout.total],
            layout,
            idx,
        };
        model.init_params(seed);
        Ok(model)
    }

    /// uniform(−1/√fan_in, 1/√fan_in) per tensor
    fn init_params(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = if self.config.two_d { 2 } else { 1 };
        for t in 0..self.layout.tensors.len() {
            let spec = self.layout.tensors[t].clone();
            let fan_in = match spec.shape.len() {
                1 => fan_in_for_bias(&spec, &self.layout),
                2 => spec.shape[1],
                3 if dims == 1 => spec.shape[1] * spec.shape[2],
                _ => spec.shape[1..].iter().product(),
            };
            let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
            for v in &mut self.params[spec.offset..spec.offset + spec.len()] {
                *v = rng.gen_range(-bound..bound);
            }
        }
    }

    pub fn bank(&self) -> &FilterBank {
        &self.bank
    }

    pub fn parameter_count(&self) -> usize {
        self.layout.total
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn tensor(&self, idx: usize) -> &[f64] {
        let spec = &self.layout.tensors[idx];
        &self.params[spec.offset..spec.offset + spec.len()]
    }

    fn tensor_spec(&self, idx: usize) -> &TensorSpec {
        &self.layout.tensors[idx]
    }

    /// Mutable view of a named tensor.  Names follow the layout scheme:
    /// `lift.w`, `layer0.a.conv.w`, `layer0.tbar.w`, `proj.b`, …
    pub fn tensor_mut(&mut self, name: &str) -> Option<&mut [f64]> {
        let spec = self
            .layout
            .tensors
            .iter()
            .find(|t| t.name == name)?
            .clone();
        Some(&mut self.params[spec.offset..spec.offset + spec.len()])
    }

    /// Zero every bias tensor; with `Activation::None` this makes the model
    /// exactly linear in its input.
    pub fn zero_biases(&mut self) {
        for spec in self.layout.tensors.clone() {
            if spec.name.ends_with(".b") {
                self.params[spec.offset..spec.offset + spec.len()].fill(0.0);
            }
        }
    }
}

fn fan_in_for_bias(spec: &TensorSpec, layout: &Layout) -> usize {
    // biases follow the fan-in of the weight tensor they accompany; weights
    // are pushed immediately before their bias, so look one tensor back
    let pos = layout
        .tensors
        .iter()
        .position(|t| t.offset == spec.offset)
        .unwrap_or(0);
    if pos == 0 {
        1
    } else {
        let w = &layout.tensors[pos - 1];
        if w.shape.len() >= 2 {
            w.shape[1..].iter().product()
        } else {
            1
        }
    }
}

fn push_net(layout: &mut Layout, name: &str, cfg: &ModelConfig, in_ch: usize, out_ch: usize) -> NetIdx {
    let stage = match cfg.conv {
        ConvSpec::Conv { width } => {
            let dims = if cfg.two_d {
                vec![out_ch, in_ch, width, width]
            } else {
                vec![out_ch, in_ch, width]
            };
            let w = layout.push(format!("{name}.conv.w"), dims);
            let b = layout.push(format!("{name}.conv.b"), vec![out_ch]);
            StageIdx::Conv { w, b }
        }
        ConvSpec::Spectral { modes } => {
            let re = layout.push(format!("{name}.spec.re"), vec![out_ch, in_ch, modes]);
            let im = layout.push(format!("{name}.spec.im"), vec![out_ch, in_ch, modes]);
            StageIdx::Spectral { re, im }
        }
    };
    let lin_w = layout.push(format!("{name}.lin.w"), vec![out_ch, out_ch]);
    let lin_b = layout.push(format!("{name}.lin.b"), vec![out_ch]);
    NetIdx {
        stage,
        lin_w,
        lin_b,
        in_ch,
        out_ch,
    }
}

fn build_layout(cfg: &ModelConfig) -> (Layout, ModelIdx) {
    let mut layout = Layout::default();
    let cs = cfg.cs();
    let cd = cfg.cd();
    let lift_w = layout.push("lift.w".into(), vec![cs, 1]);
    let lift_b = layout.push("lift.b".into(), vec![cs]);
    let mut layers = Vec::with_capacity(cfg.layers);
    for li in 0..cfg.layers {
        let a = push_net(&mut layout, &format!("layer{li}.a"), cfg, cd, cd);
        let b = push_net(&mut layout, &format!("layer{li}.b"), cfg, cs, cd);
        let c = push_net(&mut layout, &format!("layer{li}.c"), cfg, cd, cs);
        let tbar_w = layout.push(format!("layer{li}.tbar.w"), vec![cs, cs]);
        let tbar_b = layout.push(format!("layer{li}.tbar.b"), vec![cs]);
        layers.push(LayerIdx {
            a,
            b,
            c,
            tbar_w,
            tbar_b,
        });
    }
    let proj_w = layout.push("proj.w".into(), vec![1, cs]);
    let proj_b = layout.push("proj.b".into(), vec![1]);
    (
        layout,
        ModelIdx {
            lift_w,
            lift_b,
            layers,
            proj_w,
            proj_b,
        },
    )
}

fn acc(grads: &mut [f64], offset: usize, local: &[f64]) {
    for (g, l) in grads[offset..offset + local.len()].iter_mut().zip(local) {
        *g += l;
    }
}

// ---------------------------------------------------------------- 1-D path

enum StageTrace {
    Conv { x: Array2<f64> },
    Spectral { spectra: Vec<Vec<Complex64>> },
}

struct NetTrace {
    stage: StageTrace,
    z: Array2<f64>,
}

struct LayerTrace {
    s_arrays: Vec<Array2<f64>>,
    d_arrays: Vec<Array2<f64>>,
    a_traces: Vec<NetTrace>,
    b_traces: Vec<NetTrace>,
    c_traces: Vec<NetTrace>,
}

pub(crate) struct Trace1d {
    input: Array1<f64>,
    layer_outputs: Vec<Array2<f64>>,
    layer_traces: Vec<LayerTrace>,
    proj_in: Array2<f64>,
}

impl OperatorModel {
    fn net_forward_1d(&self, net: &NetIdx, x: &Array2<f64>) -> (Array2<f64>, NetTrace) {
        let (z, stage) = match net.stage {
            StageIdx::Conv { w, b } => {
                let width = *self.tensor_spec(w).shape.last().unwrap();
                let z = layers::conv1d_forward(
                    self.tensor(w),
                    self.tensor(b),
                    net.out_ch,
                    net.in_ch,
                    width,
                    x,
                );
                (z, StageTrace::Conv { x: x.clone() })
            }
            StageIdx::Spectral { re, im } => {
                let modes = *self.tensor_spec(re).shape.last().unwrap();
                let (z, spectra) = layers::spectral_forward(
                    self.tensor(re),
                    self.tensor(im),
                    net.out_ch,
                    net.in_ch,
                    modes,
                    x,
                );
                (z, StageTrace::Spectral { spectra })
            }
        };
        let y = layers::linear_forward(
            self.tensor(net.lin_w),
            self.tensor(net.lin_b),
            net.out_ch,
            net.out_ch,
            &z,
        );
        (y, NetTrace { stage, z })
    }

    fn net_backward_1d(
        &self,
        net: &NetIdx,
        trace: &NetTrace,
        dy: &Array2<f64>,
        grads: &mut [f64],
    ) -> Array2<f64> {
        let lin_w_spec = self.tensor_spec(net.lin_w).clone();
        let lin_b_spec = self.tensor_spec(net.lin_b).clone();
        let mut dlw = vec![0.0; lin_w_spec.len()];
        let mut dlb = vec![0.0; lin_b_spec.len()];
        let dz = layers::linear_backward(
            self.tensor(net.lin_w),
            net.out_ch,
            net.out_ch,
            &trace.z,
            dy,
            &mut dlw,
            &mut dlb,
        );
        acc(grads, lin_w_spec.offset, &dlw);
        acc(grads, lin_b_spec.offset, &dlb);
        match (&net.stage, &trace.stage) {
            (StageIdx::Conv { w, b }, StageTrace::Conv { x }) => {
                let w_spec = self.tensor_spec(*w).clone();
                let b_spec = self.tensor_spec(*b).clone();
                let width = *w_spec.shape.last().unwrap();
                let mut dw = vec![0.0; w_spec.len()];
                let mut db = vec![0.0; b_spec.len()];
                let dx = layers::conv1d_backward(
                    self.tensor(*w),
                    net.out_ch,
                    net.in_ch,
                    width,
                    x,
                    &dz,
                    &mut dw,
                    &mut db,
                );
                acc(grads, w_spec.offset, &dw);
                acc(grads, b_spec.offset, &db);
                dx
            }
            (StageIdx::Spectral { re, im }, StageTrace::Spectral { spectra }) => {
                let re_spec = self.tensor_spec(*re).clone();
                let im_spec = self.tensor_spec(*im).clone();
                let modes = *re_spec.shape.last().unwrap();
                let mut dre = vec![0.0; re_spec.len()];
                let mut dim = vec![0.0; im_spec.len()];
                let dx = layers::spectral_backward(
                    self.tensor(*re),
                    self.tensor(*im),
                    net.out_ch,
                    net.in_ch,
                    modes,
                    spectra,
                    &dz,
                    &mut dre,
                    &mut dim,
                );
                acc(grads, re_spec.offset, &dre);
                acc(grads, im_spec.offset, &dim);
                dx
            }
            _ => unreachable!("stage kind mismatch"),
        }
    }

    fn layer_forward_1d(&self, li: usize, x: &Array2<f64>) -> Result<(Array2<f64>, LayerTrace)> {
        let coarsest = self.config.coarsest;
        let m = x.ncols();
        if !m.is_power_of_two() || m < (1 << (coarsest + 1)) {
            return Err(Error::Shape(format!(
                "input length {m} must be a power of two ≥ {}",
                1 << (coarsest + 1)
            )));
        }
        let finest = m.trailing_zeros() as usize;
        let levels = finest - coarsest;
        let layer = &self.idx.layers[li];

        let mut s_arrays = vec![x.clone()];
        let mut d_arrays = Vec::with_capacity(levels);
        for _ in 0..levels {
            let (s_next, d_next) =
                crate::transform::decompose_step(&self.bank, s_arrays.last().unwrap());
            s_arrays.push(s_next);
            d_arrays.push(d_next);
        }
        s_arrays.reverse(); // index m ↔ scale L+m
        d_arrays.reverse();

        let mut a_traces = Vec::with_capacity(levels);
        let mut b_traces = Vec::with_capacity(levels);
        let mut c_traces = Vec::with_capacity(levels);
        let mut ud = Vec::with_capacity(levels);
        let mut us_hat = Vec::with_capacity(levels);
        for lv in 0..levels {
            let (ya, ta) = self.net_forward_1d(&layer.a, &d_arrays[lv]);
            let (yb, tb) = self.net_forward_1d(&layer.b, &s_arrays[lv]);
            let (yc, tc) = self.net_forward_1d(&layer.c, &d_arrays[lv]);
            a_traces.push(ta);
            b_traces.push(tb);
            c_traces.push(tc);
            ud.push(ya + yb);
            us_hat.push(yc);
        }

        let cs = self.config.cs();
        let mut s_hat = layers::linear_forward(
            self.tensor(layer.tbar_w),
            self.tensor(layer.tbar_b),
            cs,
            cs,
            &s_arrays[0],
        );
        for lv in 0..levels {
            let u = s_hat + &us_hat[lv];
            s_hat = reconstruct_step(&self.bank, &u, &ud[lv]);
        }
        Ok((
            s_hat,
            LayerTrace {
                s_arrays,
                d_arrays,
                a_traces,
                b_traces,
                c_traces,
            },
        ))
    }

    fn layer_backward_1d(
        &self,
        li: usize,
        trace: &LayerTrace,
        dy: &Array2<f64>,
        grads: &mut [f64],
    ) -> Array2<f64> {
        let layer = &self.idx.layers[li];
        let levels = trace.d_arrays.len();
        let k = self.config.cs();
        let mut ds: Vec<Array2<f64>> = trace.s_arrays.iter().map(|a| Array2::zeros(a.dim())).collect();
        let mut dd: Vec<Array2<f64>> = trace.d_arrays.iter().map(|a| Array2::zeros(a.dim())).collect();

        // reverse the reconstruction ladder
        let mut d_shat = dy.clone();
        for lv in (0..levels).rev() {
            // forward: u = s_hat + us_hat[lv]; s_hat' = rec_step(u, ud[lv])
            let d_even = d_shat.slice(ndarray::s![.., ..;2]).to_owned();
            let d_odd = d_shat.slice(ndarray::s![.., 1..;2]).to_owned();
            let du = self.bank.h0.dot(&self.bank.sigma0.t().dot(&d_even))
                + self.bank.h1.dot(&self.bank.sigma1.t().dot(&d_odd));
            let dv = self.bank.g0.dot(&self.bank.sigma0.t().dot(&d_even))
                + self.bank.g1.dot(&self.bank.sigma1.t().dot(&d_odd));
            // dv hits Ud = A(d) + B(s); du hits both s_hat and Ûs = C(d)
            let dd_a = self.net_backward_1d(&layer.a, &trace.a_traces[lv], &dv, grads);
            let ds_b = self.net_backward_1d(&layer.b, &trace.b_traces[lv], &dv, grads);
            let dd_c = self.net_backward_1d(&layer.c, &trace.c_traces[lv], &du, grads);
            dd[lv] = &dd[lv] + &dd_a + &dd_c;
            ds[lv] = &ds[lv] + &ds_b;
            d_shat = du;
        }
        // T̄ backward at the coarsest scale
        {
            let w_spec = self.tensor_spec(layer.tbar_w).clone();
            let b_spec = self.tensor_spec(layer.tbar_b).clone();
            let mut dw = vec![0.0; w_spec.len()];
            let mut db = vec![0.0; b_spec.len()];
            let ds0 = layers::linear_backward(
                self.tensor(layer.tbar_w),
                k,
                k,
                &trace.s_arrays[0],
                &d_shat,
                &mut dw,
                &mut db,
            );
            acc(grads, w_spec.offset, &dw);
            acc(grads, b_spec.offset, &db);
            ds[0] = &ds[0] + &ds0;
        }
        // reverse the decomposition ladder
        for lv in 0..levels {
            let fine_dim = trace.s_arrays[lv + 1].dim();
            let even = self.bank.h0.t().dot(&ds[lv]) + self.bank.g0.t().dot(&dd[lv]);
            let odd = self.bank.h1.t().dot(&ds[lv]) + self.bank.g1.t().dot(&dd[lv]);
            let mut up = Array2::zeros(fine_dim);
            up.slice_mut(ndarray::s![.., ..;2]).assign(&even);
            up.slice_mut(ndarray::s![.., 1..;2]).assign(&odd);
            ds[lv + 1] = &ds[lv + 1] + &up;
        }
        ds.pop().unwrap()
    }

    /// Output of the full model on a 1-D sample.
    pub fn forward(&self, input: &Array1<f64>) -> Result<Array1<f64>> {
        self.forward_traced(input).map(|(y, _)| y)
    }

    pub(crate) fn forward_traced(&self, input: &Array1<f64>) -> Result<(Array1<f64>, Trace1d)> {
        if self.config.two_d {
            return Err(Error::Incompatible("model is 2-D; use forward_2d".into()));
        }
        let m = input.len();
        let cs = self.config.cs();
        let lift_w = self.tensor(self.idx.lift_w);
        let lift_b = self.tensor(self.idx.lift_b);
        let mut x = Array2::zeros((cs, m));
        for c in 0..cs {
            for l in 0..m {
                x[[c, l]] = lift_w[c] * input[l] + lift_b[c];
            }
        }
        let mut layer_outputs = Vec::with_capacity(self.config.layers);
        let mut layer_traces = Vec::with_capacity(self.config.layers);
        for li in 0..self.config.layers {
            let (y, trace) = self.layer_forward_1d(li, &x)?;
            layer_traces.push(trace);
            layer_outputs.push(y.clone());
            x = if li + 1 < self.config.layers && self.config.activation == Activation::Relu {
                layers::relu_forward_2(&y)
            } else {
                y
            };
        }
        let proj_in = x;
        let proj_w = self.tensor(self.idx.proj_w);
        let proj_b = self.tensor(self.idx.proj_b)[0];
        let mut out = Array1::zeros(m);
        for l in 0..m {
            let mut accum = proj_b;
            for c in 0..cs {
                accum += proj_w[c] * proj_in[[c, l]];
            }
            out[l] = accum;
        }
        Ok((
            out,
            Trace1d {
                input: input.clone(),
                layer_outputs,
                layer_traces,
                proj_in,
            },
        ))
    }

    pub(crate) fn backward_from_trace(
        &self,
        trace: &Trace1d,
        upstream: &Array1<f64>,
    ) -> (Vec<f64>, Array1<f64>) {
        let cs = self.config.cs();
        let m = trace.input.len();
        let mut grads = vec![0.0; self.layout.total];

        // projection
        let proj_w_spec = self.tensor_spec(self.idx.proj_w).clone();
        let proj_b_spec = self.tensor_spec(self.idx.proj_b).clone();
        let proj_w = self.tensor(self.idx.proj_w).to_vec();
        let mut dx = Array2::zeros((cs, m));
        for l in 0..m {
            let g = upstream[l];
            grads[proj_b_spec.offset] += g;
            for c in 0..cs {
                grads[proj_w_spec.offset + c] += g * trace.proj_in[[c, l]];
                dx[[c, l]] = proj_w[c] * g;
            }
        }

        // layers in reverse, ReLU between them
        for li in (0..self.config.layers).rev() {
            if li + 1 < self.config.layers && self.config.activation == Activation::Relu {
                dx = layers::relu_backward_2(&trace.layer_outputs[li], &dx);
            }
            dx = self.layer_backward_1d(li, &trace.layer_traces[li], &dx, &mut grads);
        }

        // lifting
        let lift_w_spec = self.tensor_spec(self.idx.lift_w).clone();
        let lift_b_spec = self.tensor_spec(self.idx.lift_b).clone();
        let lift_w = self.tensor(self.idx.lift_w).to_vec();
        let mut dinput = Array1::zeros(m);
        for c in 0..cs {
            for l in 0..m {
                let g = dx[[c, l]];
                grads[lift_w_spec.offset + c] += g * trace.input[l];
                grads[lift_b_spec.offset + c] += g;
                dinput[l] += lift_w[c] * g;
            }
        }
        (grads, dinput)
    }

    /// Reverse-mode gradients of ⟨upstream, forward(input)⟩ with respect to
    /// every parameter and to the input.
    pub fn backward(
        &self,
        input: &Array1<f64>,
        upstream: &Array1<f64>,
    ) -> Result<(Vec<f64>, Array1<f64>)> {
        if upstream.len() != input.len() {
            return Err(Error::Shape(format!(
                "upstream length {} does not match input length {}",
                upstream.len(),
                input.len()
            )));
        }
        let (_, trace) = self.forward_traced(input)?;
        Ok(self.backward_from_trace(&trace, upstream))
    }
}

mod two_d;

#[cfg(test)]
mod tests;

pub use train::{relative_l2, train, EpochMetrics, TrainConfig};
