//! 2-D forward/backward path: Kronecker-lifted ladder, three detail
//! families stacked on the channel axis in the order [G⊗H, H⊗G, G⊗G].

use ndarray::{s, Array2, Array3};

use super::layers;
use super::{acc, NetIdx, OperatorModel, StageIdx};
use crate::error::{Error, Result};
use crate::transform::KronBank;

fn stack_details(d: &[Array3<f64>; 3]) -> Array3<f64> {
    let (c, h, w) = d[0].dim();
    let mut out = Array3::zeros((3 * c, h, w));
    for (f, df) in d.iter().enumerate() {
        out.slice_mut(s![f * c..(f + 1) * c, .., ..]).assign(df);
    }
    out
}

fn split_details(d: &Array3<f64>) -> [Array3<f64>; 3] {
    let c = d.dim().0 / 3;
    [
        d.slice(s![..c, .., ..]).to_owned(),
        d.slice(s![c..2 * c, .., ..]).to_owned(),
        d.slice(s![2 * c.., .., ..]).to_owned(),
    ]
}

fn channel_mul(m: &Array2<f64>, x: &Array3<f64>) -> Array3<f64> {
    let (_, h, w) = x.dim();
    let flat = x.to_shape((x.dim().0, h * w)).expect("contiguous").to_owned();
    m.dot(&flat)
        .into_shape_with_order((m.nrows(), h, w))
        .unwrap()
}

/// adjoint of decompose_step_2d
fn dec2d_backward(kb: &KronBank, ds: &Array3<f64>, dd: &[Array3<f64>; 3]) -> Array3<f64> {
    let (c, h, w) = ds.dim();
    let mut out = Array3::zeros((c, 2 * h, 2 * w));
    for e1 in 0..2 {
        for e2 in 0..2 {
            let mut child = channel_mul(&kb.hh[e1][e2].t().to_owned(), ds);
            child = child + channel_mul(&kb.gh[e1][e2].t().to_owned(), &dd[0]);
            child = child + channel_mul(&kb.hg[e1][e2].t().to_owned(), &dd[1]);
            child = child + channel_mul(&kb.gg[e1][e2].t().to_owned(), &dd[2]);
            out.slice_mut(s![.., e1..;2, e2..;2]).assign(&child);
        }
    }
    out
}

/// adjoint of reconstruct_step_2d
fn rec2d_backward(kb: &KronBank, dnext: &Array3<f64>) -> (Array3<f64>, [Array3<f64>; 3]) {
    let (c, h2, w2) = dnext.dim();
    let (h, w) = (h2 / 2, w2 / 2);
    let mut du = Array3::zeros((c, h, w));
    let mut dd = [
        Array3::zeros((c, h, w)),
        Array3::zeros((c, h, w)),
        Array3::zeros((c, h, w)),
    ];
    for e1 in 0..2 {
        for e2 in 0..2 {
            let child = dnext.slice(s![.., e1..;2, e2..;2]).to_owned();
            let tmp = channel_mul(&kb.sig[e1][e2].t().to_owned(), &child);
            du = du + channel_mul(&kb.hh[e1][e2], &tmp);
            dd[0] = &dd[0] + &channel_mul(&kb.gh[e1][e2], &tmp);
            dd[1] = &dd[1] + &channel_mul(&kb.hg[e1][e2], &tmp);
            dd[2] = &dd[2] + &channel_mul(&kb.gg[e1][e2], &tmp);
        }
    }
    (du, dd)
}

struct NetTrace2d {
    x: Array3<f64>,
    z: Array3<f64>,
}

struct LayerTrace2d {
    s_arrays: Vec<Array3<f64>>,
    d_arrays: Vec<Array3<f64>>, // stacked families
    a_traces: Vec<NetTrace2d>,
    b_traces: Vec<NetTrace2d>,
    c_traces: Vec<NetTrace2d>,
}

pub(crate) struct Trace2d {
    input: Array2<f64>,
    layer_outputs: Vec<Array3<f64>>,
    layer_traces: Vec<LayerTrace2d>,
    proj_in: Array3<f64>,
}

impl OperatorModel {
    fn net_forward_2d(&self, net: &NetIdx, x: &Array3<f64>) -> (Array3<f64>, NetTrace2d) {
        let (w_idx, b_idx) = match net.stage {
            StageIdx::Conv { w, b } => (w, b),
            StageIdx::Spectral { .. } => unreachable!("2-D models reject spectral stages"),
        };
        let width = *self.tensor_spec(w_idx).shape.last().unwrap();
        let z = layers::conv2d_forward(
            self.tensor(w_idx),
            self.tensor(b_idx),
            net.out_ch,
            net.in_ch,
            width,
            x,
        );
        let y = layers::linear_forward_3(
            self.tensor(net.lin_w),
            self.tensor(net.lin_b),
            net.out_ch,
            net.out_ch,
            &z,
        );
        (y, NetTrace2d { x: x.clone(), z })
    }

    fn net_backward_2d(
        &self,
        net: &NetIdx,
        trace: &NetTrace2d,
        dy: &Array3<f64>,
        grads: &mut [f64],
    ) -> Array3<f64> {
        let lin_w_spec = self.tensor_spec(net.lin_w).clone();
        let lin_b_spec = self.tensor_spec(net.lin_b).clone();
        let mut dlw = vec![0.0; lin_w_spec.len()];
        let mut dlb = vec![0.0; lin_b_spec.len()];
        let dz = layers::linear_backward_3(
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
        let (w_idx, b_idx) = match net.stage {
            StageIdx::Conv { w, b } => (w, b),
            StageIdx::Spectral { .. } => unreachable!(),
        };
        let w_spec = self.tensor_spec(w_idx).clone();
        let b_spec = self.tensor_spec(b_idx).clone();
        let width = *w_spec.shape.last().unwrap();
        let mut dw = vec![0.0; w_spec.len()];
        let mut db = vec![0.0; b_spec.len()];
        let dx = layers::conv2d_backward(
            self.tensor(w_idx),
            net.out_ch,
            net.in_ch,
            width,
            &trace.x,
            &dz,
            &mut dw,
            &mut db,
        );
        acc(grads, w_spec.offset, &dw);
        acc(grads, b_spec.offset, &db);
        dx
    }

    fn layer_forward_2d(&self, li: usize, x: &Array3<f64>) -> Result<(Array3<f64>, LayerTrace2d)> {
        let kb = self.kron.as_ref().expect("2-D model carries a kron bank");
        let coarsest = self.config.coarsest;
        let (_, h, w) = x.dim();
        if h != w || !h.is_power_of_two() || h < (1 << (coarsest + 1)) {
            return Err(Error::Shape(format!(
                "field is {h}×{w}; need a square power-of-two grid ≥ {}",
                1 << (coarsest + 1)
            )));
        }
        let finest = h.trailing_zeros() as usize;
        let levels = finest - coarsest;
        let layer = &self.idx.layers[li];

        let mut s_arrays = vec![x.clone()];
        let mut d_arrays = Vec::with_capacity(levels);
        for _ in 0..levels {
            let (s_next, d_next) =
                crate::transform::decompose_step_2d(kb, s_arrays.last().unwrap());
            s_arrays.push(s_next);
            d_arrays.push(stack_details(&d_next));
        }
        s_arrays.reverse();
        d_arrays.reverse();

        let mut a_traces = Vec::new();
        let mut b_traces = Vec::new();
        let mut c_traces = Vec::new();
        let mut ud = Vec::new();
        let mut us_hat = Vec::new();
        for lv in 0..levels {
            let (ya, ta) = self.net_forward_2d(&layer.a, &d_arrays[lv]);
            let (yb, tb) = self.net_forward_2d(&layer.b, &s_arrays[lv]);
            let (yc, tc) = self.net_forward_2d(&layer.c, &d_arrays[lv]);
            a_traces.push(ta);
            b_traces.push(tb);
            c_traces.push(tc);
            ud.push(ya + yb);
            us_hat.push(yc);
        }

        let cs = self.config.cs();
        let mut s_hat = layers::linear_forward_3(
            self.tensor(layer.tbar_w),
            self.tensor(layer.tbar_b),
            cs,
            cs,
            &s_arrays[0],
        );
        for lv in 0..levels {
            let u = s_hat + &us_hat[lv];
            s_hat = crate::transform::reconstruct_step_2d(kb, &u, &split_details(&ud[lv]));
        }
        Ok((
            s_hat,
            LayerTrace2d {
                s_arrays,
                d_arrays,
                a_traces,
                b_traces,
                c_traces,
            },
        ))
    }

    fn layer_backward_2d(
        &self,
        li: usize,
        trace: &LayerTrace2d,
        dy: &Array3<f64>,
        grads: &mut [f64],
    ) -> Array3<f64> {
        let kb = self.kron.as_ref().expect("2-D model carries a kron bank");
        let layer = &self.idx.layers[li];
        let levels = trace.d_arrays.len();
        let cs = self.config.cs();
        let mut ds: Vec<Array3<f64>> =
            trace.s_arrays.iter().map(|a| Array3::zeros(a.dim())).collect();
        let mut dd: Vec<Array3<f64>> =
            trace.d_arrays.iter().map(|a| Array3::zeros(a.dim())).collect();

        let mut d_shat = dy.clone();
        for lv in (0..levels).rev() {
            let (du, dud_fams) = rec2d_backward(kb, &d_shat);
            let dud = stack_details(&dud_fams);
            let dd_a = self.net_backward_2d(&layer.a, &trace.a_traces[lv], &dud, grads);
            let ds_b = self.net_backward_2d(&layer.b, &trace.b_traces[lv], &dud, grads);
            let dd_c = self.net_backward_2d(&layer.c, &trace.c_traces[lv], &du, grads);
            dd[lv] = &dd[lv] + &dd_a + &dd_c;
            ds[lv] = &ds[lv] + &ds_b;
            d_shat = du;
        }
        {
            let w_spec = self.tensor_spec(layer.tbar_w).clone();
            let b_spec = self.tensor_spec(layer.tbar_b).clone();
            let mut dw = vec![0.0; w_spec.len()];
            let mut db = vec![0.0; b_spec.len()];
            let ds0 = layers::linear_backward_3(
                self.tensor(layer.tbar_w),
                cs,
                cs,
                &trace.s_arrays[0],
                &d_shat,
                &mut dw,
                &mut db,
            );
            acc(grads, w_spec.offset, &dw);
            acc(grads, b_spec.offset, &db);
            ds[0] = &ds[0] + &ds0;
        }
        for lv in 0..levels {
            let up = dec2d_backward(kb, &ds[lv], &split_details(&dd[lv]));
            ds[lv + 1] = &ds[lv + 1] + &up;
        }
        ds.pop().unwrap()
    }

    /// Output of the model on a square 2-D field.
    pub fn forward_2d(&self, input: &Array2<f64>) -> Result<Array2<f64>> {
        self.forward_traced_2d(input).map(|(y, _)| y)
    }

    pub(crate) fn forward_traced_2d(&self, input: &Array2<f64>) -> Result<(Array2<f64>, Trace2d)> {
        if !self.config.two_d {
            return Err(Error::Incompatible("model is 1-D; use forward".into()));
        }
        let (h, w) = input.dim();
        if h != w {
            return Err(Error::Shape(format!("field is {h}×{w}; must be square")));
        }
        let cs = self.config.cs();
        let lift_w = self.tensor(self.idx.lift_w);
        let lift_b = self.tensor(self.idx.lift_b);
        let mut x = Array3::zeros((cs, h, w));
        for c in 0..cs {
            for p in 0..h {
                for q in 0..w {
                    x[[c, p, q]] = lift_w[c] * input[[p, q]] + lift_b[c];
                }
            }
        }
        let mut layer_outputs = Vec::new();
        let mut layer_traces = Vec::new();
        for li in 0..self.config.layers {
            let (y, trace) = self.layer_forward_2d(li, &x)?;
            layer_traces.push(trace);
            layer_outputs.push(y.clone());
            x = if li + 1 < self.config.layers
                && self.config.activation == super::Activation::Relu
            {
                layers::relu_forward_3(&y)
            } else {
                y
            };
        }
        let proj_in = x;
        let proj_w = self.tensor(self.idx.proj_w);
        let proj_b = self.tensor(self.idx.proj_b)[0];
        let mut out = Array2::zeros((h, w));
        for p in 0..h {
            for q in 0..w {
                let mut accum = proj_b;
                for c in 0..cs {
                    accum += proj_w[c] * proj_in[[c, p, q]];
                }
                out[[p, q]] = accum;
            }
        }
        Ok((
            out,
            Trace2d {
                input: input.clone(),
                layer_outputs,
                layer_traces,
                proj_in,
            },
        ))
    }

    pub(crate) fn backward_from_trace_2d(
        &self,
        trace: &Trace2d,
        upstream: &Array2<f64>,
    ) -> (Vec<f64>, Array2<f64>) {
        let cs = self.config.cs();
        let (h, w) = trace.input.dim();
        let mut grads = vec![0.0; self.layout.total];

        let proj_w_spec = self.tensor_spec(self.idx.proj_w).clone();
        let proj_b_spec = self.tensor_spec(self.idx.proj_b).clone();
        let proj_w = self.tensor(self.idx.proj_w).to_vec();
        let mut dx = Array3::zeros((cs, h, w));
        for p in 0..h {
            for q in 0..w {
                let g = upstream[[p, q]];
                grads[proj_b_spec.offset] += g;
                for c in 0..cs {
                    grads[proj_w_spec.offset + c] += g * trace.proj_in[[c, p, q]];
                    dx[[c, p, q]] = proj_w[c] * g;
                }
            }
        }
        for li in (0..self.config.layers).rev() {
            if li + 1 < self.config.layers && self.config.activation == super::Activation::Relu {
                dx = layers::relu_backward_3(&trace.layer_outputs[li], &dx);
            }
            dx = self.layer_backward_2d(li, &trace.layer_traces[li], &dx, &mut grads);
        }
        let lift_w_spec = self.tensor_spec(self.idx.lift_w).clone();
        let lift_b_spec = self.tensor_spec(self.idx.lift_b).clone();
        let lift_w = self.tensor(self.idx.lift_w).to_vec();
        let mut dinput = Array2::zeros((h, w));
        for c in 0..cs {
            for p in 0..h {
                for q in 0..w {
                    let g = dx[[c, p, q]];
                    grads[lift_w_spec.offset + c] += g * trace.input[[p, q]];
                    grads[lift_b_spec.offset + c] += g;
                    dinput[[p, q]] += lift_w[c] * g;
                }
            }
        }
        (grads, dinput)
    }

    /// Reverse-mode gradients for a 2-D sample.
    pub fn backward_2d(
        &self,
        input: &Array2<f64>,
        upstream: &Array2<f64>,
    ) -> Result<(Vec<f64>, Array2<f64>)> {
        if upstream.dim() != input.dim() {
            return Err(Error::Shape("upstream shape mismatch".into()));
        }
        let (_, trace) = self.forward_traced_2d(input)?;
        Ok(self.backward_from_trace_2d(&trace, upstream))
    }
}
