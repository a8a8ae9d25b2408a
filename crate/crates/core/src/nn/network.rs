use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::scalar::{gemm, Mat, Scalar};
use super::NnError;
use crate::encoder::CHANNELS;
use crate::engine::{Action, BOARD_SIZE};
use crate::rng;

const KSIZE: usize = 3;
const KAREA: usize = KSIZE * KSIZE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvSpec {
    pub filters: usize,
    /// 2x2 max pool (ceil mode) after the activation.
    pub pool: bool,
}

/// Layer stack: 3x3 "same" convolutions with ReLU (each optionally pooled
/// and followed by dropout), a ReLU dense layer, and a linear output layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetSpec {
    pub in_channels: usize,
    pub size: usize,
    pub convs: Vec<ConvSpec>,
    pub hidden: usize,
    pub outputs: usize,
    /// Drop probability after each pooled conv block, used in train mode.
    pub dropout: f32,
}

impl NetSpec {
    /// conv 32 -> pool -> conv 64 -> pool -> conv 64 -> dense 128 -> 6.
    pub fn policy() -> Self {
        Self {
            in_channels: CHANNELS,
            size: BOARD_SIZE,
            convs: vec![
                ConvSpec {
                    filters: 32,
                    pool: true,
                },
                ConvSpec {
                    filters: 64,
                    pool: true,
                },
                ConvSpec {
                    filters: 64,
                    pool: false,
                },
            ],
            hidden: 128,
            outputs: Action::COUNT,
            dropout: 0.2,
        }
    }

    /// Same trunk with a single linear output.
    pub fn value_twin(&self) -> Self {
        Self {
            outputs: 1,
            ..self.clone()
        }
    }

    /// Same layer pattern with every width replaced.
    pub fn with_widths(&self, filters: &[usize], hidden: usize) -> Self {
        let mut out = self.clone();
        for (c, &f) in out.convs.iter_mut().zip(filters) {
            c.filters = f;
        }
        out.hidden = hidden;
        out
    }

    pub fn input_len(&self) -> usize {
        self.in_channels * self.size * self.size
    }

    pub fn param_count(&self) -> usize {
        Layout::of(self).total
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Train,
    Eval,
}

#[derive(Clone, Copy, Debug)]
struct ConvGeom {
    cin: usize,
    cout: usize,
    h: usize,
    w: usize,
    pool: bool,
    ph: usize,
    pw: usize,
    w_off: usize,
    b_off: usize,
}

impl ConvGeom {
    fn k(&self) -> usize {
        self.cin * KAREA
    }
    fn hw(&self) -> usize {
        self.h * self.w
    }
    fn out_len(&self) -> usize {
        self.cout * self.ph * self.pw
    }
}

#[derive(Clone, Copy, Debug)]
struct DenseGeom {
    inp: usize,
    out: usize,
    w_off: usize,
    b_off: usize,
}

#[derive(Clone, Debug)]
struct Layout {
    convs: Vec<ConvGeom>,
    hidden: DenseGeom,
    output: DenseGeom,
    total: usize,
}

impl Layout {
    fn of(spec: &NetSpec) -> Self {
        let mut off = 0;
        let (mut c, mut h, mut w) = (spec.in_channels, spec.size, spec.size);
        let mut convs = Vec::with_capacity(spec.convs.len());
        for cs in &spec.convs {
            let (ph, pw) = if cs.pool {
                (h.div_ceil(2), w.div_ceil(2))
            } else {
                (h, w)
            };
            let g = ConvGeom {
                cin: c,
                cout: cs.filters,
                h,
                w,
                pool: cs.pool,
                ph,
                pw,
                w_off: off,
                b_off: off + cs.filters * c * KAREA,
            };
            off = g.b_off + cs.filters;
            convs.push(g);
            c = cs.filters;
            h = ph;
            w = pw;
        }
        let flat = c * h * w;
        let hidden = DenseGeom {
            inp: flat,
            out: spec.hidden,
            w_off: off,
            b_off: off + flat * spec.hidden,
        };
        off = hidden.b_off + spec.hidden;
        let output = DenseGeom {
            inp: spec.hidden,
            out: spec.outputs,
            w_off: off,
            b_off: off + spec.hidden * spec.outputs,
        };
        off = output.b_off + spec.outputs;
        Layout {
            convs,
            hidden,
            output,
            total: off,
        }
    }
}

/// Network parameters in one flat, layer-ordered store.
#[derive(Clone, Debug, PartialEq)]
pub struct Network<F: Scalar> {
    spec: NetSpec,
    layout_total: usize,
    pub params: Vec<F>,
    pub mode: Mode,
}

/// Gradient store shaped like a network's parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients<F> {
    pub values: Vec<F>,
    /// Samples accumulated since the last reset.
    pub count: usize,
}

impl<F: Scalar> Gradients<F> {
    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![F::zero(); len],
            count: 0,
        }
    }

    pub fn reset(&mut self) {
        self.values.fill(F::zero());
        self.count = 0;
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Per-sample activations kept for the backward pass, plus scratch space.
#[derive(Clone, Debug)]
pub struct Trace<F> {
    cols: Vec<Vec<F>>,
    acts: Vec<Vec<F>>,
    outs: Vec<Vec<F>>,
    argmax: Vec<Vec<u32>>,
    drop: Vec<Vec<F>>,
    hidden: Vec<F>,
    pub output: Vec<F>,
    d_out: Vec<F>,
    d_act: Vec<F>,
    d_col: Vec<F>,
    d_hidden: Vec<F>,
}

impl<F: Scalar> Trace<F> {
    /// Digest of every ReLU on/off state and pooling choice made by the last
    /// forward pass. Equal digests mean the network was in the same linear
    /// piece.
    pub fn pattern_digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut mix = |v: u64| {
            h ^= v;
            h = h.wrapping_mul(0x0100_0000_01b3);
        };
        for a in self.acts.iter().flatten().chain(&self.hidden) {
            mix((*a > F::zero()) as u64);
        }
        for &i in self.argmax.iter().flatten() {
            mix(i as u64);
        }
        h
    }
}

impl<F: Scalar> Network<F> {
    /// All-zero parameters.
    pub fn zeros(spec: NetSpec) -> Self {
        let total = Layout::of(&spec).total;
        Self {
            spec,
            layout_total: total,
            params: vec![F::zero(); total],
            mode: Mode::Eval,
        }
    }

    /// Fan-in scaled uniform weights, zero biases.
    pub fn new(spec: NetSpec, seed: u64) -> Self {
        let mut net = Self::zeros(spec);
        let layout = Layout::of(&net.spec);
        let mut rng = rng::seeded(seed);
        let mut fill = |params: &mut [F], off: usize, len: usize, fan_in: usize, gain: f64| {
            let limit = num_traits::Float::sqrt(gain / fan_in as f64);
            for p in &mut params[off..off + len] {
                *p = F::of(rng.gen_range(-limit..limit));
            }
        };
        for g in &layout.convs {
            fill(&mut net.params, g.w_off, g.cout * g.k(), g.k(), 6.0);
        }
        let h = layout.hidden;
        fill(&mut net.params, h.w_off, h.inp * h.out, h.inp, 6.0);
        let o = layout.output;
        fill(&mut net.params, o.w_off, o.inp * o.out, o.inp, 1.0);
        net
    }

    pub fn from_params(spec: NetSpec, params: Vec<F>, mode: Mode) -> Result<Self, NnError> {
        let total = Layout::of(&spec).total;
        if params.len() != total {
            return Err(NnError::ShapeMismatch {
                expected: total,
                got: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(NnError::NonFinite("parameters"));
        }
        Ok(Self {
            spec,
            layout_total: total,
            params,
            mode,
        })
    }

    pub fn spec(&self) -> &NetSpec {
        &self.spec
    }

    pub fn param_count(&self) -> usize {
        self.layout_total
    }

    /// Converts every parameter to another float width.
    pub fn cast<G: Scalar>(&self) -> Network<G> {
        Network {
            spec: self.spec.clone(),
            layout_total: self.layout_total,
            params: self.params.iter().map(|p| G::of(p.as_f64())).collect(),
            mode: self.mode,
        }
    }

    pub fn new_trace(&self) -> Trace<F> {
        let layout = Layout::of(&self.spec);
        let z = |n: usize| vec![F::zero(); n];
        let max_k_hw = layout
            .convs
            .iter()
            .map(|g| g.k() * g.hw())
            .max()
            .unwrap_or(0);
        let max_act = layout
            .convs
            .iter()
            .map(|g| g.cout * g.hw())
            .max()
            .unwrap_or(0);
        let max_out = layout
            .convs
            .iter()
            .map(|g| g.out_len().max(g.cin * g.hw()))
            .max()
            .unwrap_or(0)
            .max(layout.hidden.inp);
        Trace {
            cols: layout.convs.iter().map(|g| z(g.k() * g.hw())).collect(),
            acts: layout.convs.iter().map(|g| z(g.cout * g.hw())).collect(),
            outs: layout.convs.iter().map(|g| z(g.out_len())).collect(),
            argmax: layout
                .convs
                .iter()
                .map(|g| {
                    if g.pool {
                        vec![0; g.out_len()]
                    } else {
                        Vec::new()
                    }
                })
                .collect(),
            drop: layout.convs.iter().map(|_| Vec::new()).collect(),
            hidden: z(layout.hidden.out),
            output: z(layout.output.out),
            d_out: z(max_out),
            d_act: z(max_act),
            d_col: z(max_k_hw),
            d_hidden: z(layout.hidden.out),
        }
    }

    fn check_input(&self, x: &[F]) -> Result<(), NnError> {
        let want = self.spec.input_len();
        if x.len() != want {
            return Err(NnError::ShapeMismatch {
                expected: want,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Raw outputs (logits, or the value) without dropout.
    pub fn forward(&self, x: &[F]) -> Result<Vec<F>, NnError> {
        let mut trace = self.new_trace();
        self.forward_trace(x, &mut trace, None)?;
        Ok(trace.output)
    }

    /// Forward pass recording what backward needs. Dropout is applied only
    /// in train mode with an rng supplied.
    pub fn forward_trace(
        &self,
        x: &[F],
        t: &mut Trace<F>,
        mut dropout_rng: Option<&mut (dyn RngCore + '_)>,
    ) -> Result<(), NnError> {
        self.check_input(x)?;
        let layout = Layout::of(&self.spec);
        let p = &self.params;
        let drop_p = if self.mode == Mode::Train {
            self.spec.dropout
        } else {
            0.0
        };
        for (l, g) in layout.convs.iter().enumerate() {
            let (k, hw) = (g.k(), g.hw());
            {
                let input: &[F] = if l == 0 { x } else { &t.outs[l - 1] };
                im2col(input, g.cin, g.h, g.w, &mut t.cols[l]);
            }
            let act = &mut t.acts[l];
            let w = &p[g.w_off..g.w_off + g.cout * k];
            gemm(
                Mat::new(w, g.cout, k),
                Mat::new(&t.cols[l], k, hw),
                F::zero(),
                act,
            );
            for o in 0..g.cout {
                let b = p[g.b_off + o];
                for v in &mut act[o * hw..(o + 1) * hw] {
                    let z = *v + b;
                    *v = if z > F::zero() { z } else { F::zero() };
                }
            }
            let out = &mut t.outs[l];
            if g.pool {
                max_pool(act, g.cout, g.h, g.w, out, &mut t.argmax[l]);
            } else {
                out.copy_from_slice(act);
            }
            t.drop[l].clear();
            if g.pool && drop_p > 0.0 {
                if let Some(rng) = dropout_rng.as_deref_mut() {
                    let keep = F::of(1.0 / (1.0 - drop_p as f64));
                    t.drop[l].reserve(out.len());
                    for v in out.iter_mut() {
                        let m = if rng.gen::<f32>() < drop_p {
                            F::zero()
                        } else {
                            keep
                        };
                        t.drop[l].push(m);
                        *v = *v * m;
                    }
                }
            }
        }
        let flat: &[F] = match layout.convs.len() {
            0 => x,
            n => &t.outs[n - 1],
        };
        let h = layout.hidden;
        dense(p, h, flat, &mut t.hidden);
        for v in &mut t.hidden {
            if *v < F::zero() {
                *v = F::zero();
            }
        }
        dense(p, layout.output, &t.hidden, &mut t.output);
        Ok(())
    }

    /// Accumulates parameter gradients for one traced sample given the
    /// gradient of the loss with respect to the raw outputs.
    pub fn backward_trace(
        &self,
        x: &[F],
        t: &mut Trace<F>,
        d_output: &[F],
        grads: &mut Gradients<F>,
    ) {
        let layout = Layout::of(&self.spec);
        let p = &self.params;
        let g = &mut grads.values;
        grads.count += 1;

        // output layer
        let o = layout.output;
        for j in 0..o.out {
            let d = d_output[j];
            g[o.b_off + j] = g[o.b_off + j] + d;
            let row = &mut g[o.w_off + j * o.inp..o.w_off + (j + 1) * o.inp];
            for (gw, &hv) in row.iter_mut().zip(&t.hidden) {
                *gw = *gw + d * hv;
            }
        }
        for i in 0..o.inp {
            let mut acc = F::zero();
            for j in 0..o.out {
                acc = acc + p[o.w_off + j * o.inp + i] * d_output[j];
            }
            t.d_hidden[i] = if t.hidden[i] > F::zero() {
                acc
            } else {
                F::zero()
            };
        }

        // hidden layer
        let h = layout.hidden;
        let n_conv = layout.convs.len();
        let flat: &[F] = if n_conv == 0 { x } else { &t.outs[n_conv - 1] };
        for j in 0..h.out {
            let d = t.d_hidden[j];
            if d == F::zero() {
                continue;
            }
            g[h.b_off + j] = g[h.b_off + j] + d;
            let row = &mut g[h.w_off + j * h.inp..h.w_off + (j + 1) * h.inp];
            for (gw, &xv) in row.iter_mut().zip(flat) {
                *gw = *gw + d * xv;
            }
        }
        if n_conv == 0 {
            return;
        }
        let d_flat = &mut t.d_out[..h.inp];
        d_flat.fill(F::zero());
        for j in 0..h.out {
            let d = t.d_hidden[j];
            if d == F::zero() {
                continue;
            }
            let row = &p[h.w_off + j * h.inp..h.w_off + (j + 1) * h.inp];
            for (df, &w) in d_flat.iter_mut().zip(row) {
                *df = *df + d * w;
            }
        }

        // conv stack, d_out holds the gradient w.r.t. layer l's output
        for l in (0..n_conv).rev() {
            let gm = layout.convs[l];
            let (k, hw) = (gm.k(), gm.hw());
            let out_len = gm.out_len();
            if !t.drop[l].is_empty() {
                for (d, &m) in t.d_out[..out_len].iter_mut().zip(&t.drop[l]) {
                    *d = *d * m;
                }
            }
            let d_act = &mut t.d_act[..gm.cout * hw];
            if gm.pool {
                d_act.fill(F::zero());
                for (i, &src) in t.argmax[l].iter().enumerate() {
                    d_act[src as usize] = d_act[src as usize] + t.d_out[i];
                }
            } else {
                d_act.copy_from_slice(&t.d_out[..out_len]);
            }
            for (d, &a) in d_act.iter_mut().zip(&t.acts[l]) {
                if a <= F::zero() {
                    *d = F::zero();
                }
            }
            for oc in 0..gm.cout {
                let s: F = d_act[oc * hw..(oc + 1) * hw].iter().copied().sum();
                g[gm.b_off + oc] = g[gm.b_off + oc] + s;
            }
            gemm(
                Mat::new(d_act, gm.cout, hw),
                Mat::t(&t.cols[l], k, hw),
                F::one(),
                &mut g[gm.w_off..gm.w_off + gm.cout * k],
            );
            if l > 0 {
                let w = &p[gm.w_off..gm.w_off + gm.cout * k];
                let d_col = &mut t.d_col[..k * hw];
                gemm(
                    Mat::t(w, gm.cout, k),
                    Mat::new(d_act, gm.cout, hw),
                    F::zero(),
                    d_col,
                );
                let d_in = &mut t.d_out[..gm.cin * hw];
                col2im(d_col, gm.cin, gm.h, gm.w, d_in);
            }
        }
    }
}

fn dense<F: Scalar>(p: &[F], g: DenseGeom, x: &[F], out: &mut [F]) {
    for (j, o) in out.iter_mut().enumerate().take(g.out) {
        let row = &p[g.w_off + j * g.inp..g.w_off + (j + 1) * g.inp];
        let mut acc = p[g.b_off + j];
        for (&w, &xv) in row.iter().zip(x) {
            acc = acc + w * xv;
        }
        *o = acc;
    }
}

/// `[c][h][w]` -> `[c*9][h*w]` with zero padding of one cell.
fn im2col<F: Scalar>(input: &[F], c: usize, h: usize, w: usize, col: &mut [F]) {
    let hw = h * w;
    for ch in 0..c {
        let plane = &input[ch * hw..(ch + 1) * hw];
        for ky in 0..KSIZE {
            for kx in 0..KSIZE {
                let row = &mut col[((ch * KAREA) + ky * KSIZE + kx) * hw..][..hw];
                for y in 0..h {
                    let sy = y as isize + ky as isize - 1;
                    let dst = &mut row[y * w..(y + 1) * w];
                    if sy < 0 || sy >= h as isize {
                        dst.fill(F::zero());
                        continue;
                    }
                    let src = &plane[sy as usize * w..(sy as usize + 1) * w];
                    match kx {
                        0 => {
                            dst[0] = F::zero();
                            dst[1..].copy_from_slice(&src[..w - 1]);
                        }
                        1 => dst.copy_from_slice(src),
                        _ => {
                            dst[..w - 1].copy_from_slice(&src[1..]);
                            dst[w - 1] = F::zero();
                        }
                    }
                }
            }
        }
    }
}

/// Adjoint of [`im2col`]: scatters column gradients back onto the input.
fn col2im<F: Scalar>(col: &[F], c: usize, h: usize, w: usize, out: &mut [F]) {
    let hw = h * w;
    out[..c * hw].fill(F::zero());
    for ch in 0..c {
        let plane = &mut out[ch * hw..(ch + 1) * hw];
        for ky in 0..KSIZE {
            for kx in 0..KSIZE {
                let row = &col[((ch * KAREA) + ky * KSIZE + kx) * hw..][..hw];
                for y in 0..h {
                    let sy = y as isize + ky as isize - 1;
                    if sy < 0 || sy >= h as isize {
                        continue;
                    }
                    let src = &row[y * w..(y + 1) * w];
                    let dst = &mut plane[sy as usize * w..(sy as usize + 1) * w];
                    match kx {
                        0 => {
                            for x in 1..w {
                                dst[x - 1] = dst[x - 1] + src[x];
                            }
                        }
                        1 => {
                            for x in 0..w {
                                dst[x] = dst[x] + src[x];
                            }
                        }
                        _ => {
                            for x in 0..w - 1 {
                                dst[x + 1] = dst[x + 1] + src[x];
                            }
                        }
                    }
                }
            }
        }
    }
}

/// 2x2 stride-2 max pool; odd edges pool over the cells that exist.
fn max_pool<F: Scalar>(
    input: &[F],
    c: usize,
    h: usize,
    w: usize,
    out: &mut [F],
    argmax: &mut [u32],
) {
    let (ph, pw) = (h.div_ceil(2), w.div_ceil(2));
    for ch in 0..c {
        let base = ch * h * w;
        for py in 0..ph {
            for px in 0..pw {
                let mut best = base + 2 * py * w + 2 * px;
                for (dy, dx) in [(0, 1), (1, 0), (1, 1)] {
                    let (y, x) = (2 * py + dy, 2 * px + dx);
                    if y < h && x < w {
                        let i = base + y * w + x;
                        if input[i] > input[best] {
                            best = i;
                        }
                    }
                }
                let o = ch * ph * pw + py * pw + px;
                out[o] = input[best];
                argmax[o] = best as u32;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> NetSpec {
        NetSpec {
            in_channels: 2,
            size: 5,
            convs: vec![
                ConvSpec {
                    filters: 2,
                    pool: true,
                },
                ConvSpec {
                    filters: 3,
                    pool: false,
                },
            ],
            hidden: 4,
            outputs: 3,
            dropout: 0.0,
        }
    }

    #[test]
    fn param_count_follows_spec() {
        // conv1 2*2*9+2, conv2 3*2*9+3, dense (3*3*3)*4+4, out 4*3+3
        assert_eq!(tiny().param_count(), 38 + 57 + 112 + 15);
        let p = NetSpec::policy();
        let expected = (32 * 19 * 9 + 32)
            + (64 * 32 * 9 + 64)
            + (64 * 64 * 9 + 64)
            + (64 * 3 * 3 * 128 + 128)
            + (128 * 6 + 6);
        assert_eq!(p.param_count(), expected);
        assert_eq!(Network::<f32>::new(p.clone(), 1).params.len(), expected);
    }

    /// Direct 3x3 convolution as an independent reference for im2col + gemm.
    fn naive_conv(x: &[f64], w: &[f64], b: &[f64], cin: usize, cout: usize, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; cout * n * n];
        for o in 0..cout {
            for y in 0..n {
                for xx in 0..n {
                    let mut acc = b[o];
                    for c in 0..cin {
                        for ky in 0..3 {
                            for kx in 0..3 {
                                let sy = y as isize + ky as isize - 1;
                                let sx = xx as isize + kx as isize - 1;
                                if sy >= 0 && sx >= 0 && (sy as usize) < n && (sx as usize) < n {
                                    acc += w[((o * cin + c) * 3 + ky) * 3 + kx]
                                        * x[c * n * n + sy as usize * n + sx as usize];
                                }
                            }
                        }
                    }
                    out[o * n * n + y * n + xx] = acc.max(0.0);
                }
            }
        }
        out
    }

    #[test]
    fn conv_matches_direct_convolution() {
        let spec = NetSpec {
            in_channels: 2,
            size: 5,
            convs: vec![ConvSpec {
                filters: 3,
                pool: false,
            }],
            hidden: 1,
            outputs: 1,
            dropout: 0.0,
        };
        let net = Network::<f64>::new(spec, 3);
        let mut r = rng::seeded(9);
        let x: Vec<f64> = (0..50).map(|_| r.gen_range(-1.0..1.0)).collect();
        let mut t = net.new_trace();
        net.forward_trace(&x, &mut t, None).unwrap();
        let w = &net.params[0..54];
        let b = &net.params[54..57];
        let expected = naive_conv(&x, w, b, 2, 3, 5);
        for (a, e) in t.outs[0].iter().zip(&expected) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn ceil_pool_keeps_last_row() {
        let input: Vec<f64> = (0..9).map(|v| v as f64).collect();
        let mut out = vec![0.0; 4];
        let mut arg = vec![0; 4];
        max_pool(&input, 1, 3, 3, &mut out, &mut arg);
        assert_eq!(out, vec![4.0, 5.0, 7.0, 8.0]);
    }

    #[test]
    fn im2col_col2im_are_adjoint() {
        let mut r = rng::seeded(4);
        let (c, h, w) = (2, 4, 5);
        let x: Vec<f64> = (0..c * h * w).map(|_| r.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..c * 9 * h * w).map(|_| r.gen_range(-1.0..1.0)).collect();
        let mut col = vec![0.0; c * 9 * h * w];
        im2col(&x, c, h, w, &mut col);
        let mut back = vec![0.0; c * h * w];
        col2im(&y, c, h, w, &mut back);
        let lhs: f64 = col.iter().zip(&y).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(&back).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let net = Network::<f32>::new(tiny(), 0);
        assert!(matches!(
            net.forward(&[0.0; 3]),
            Err(NnError::ShapeMismatch {
                expected: 50,
                got: 3
            })
        ));
    }
}
