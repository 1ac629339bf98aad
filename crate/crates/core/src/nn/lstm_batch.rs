//! The LSTM recurrence over a batch of equal-length sequences at once,
//! samples as matrix columns, so the weight products become
//! matrix-matrix products. Same arithmetic as
//! [`LstmParams::forward_into`] / [`LstmParams::backward_acc`] up to
//! summation order.

use nalgebra::DMatrix;

use super::{sigmoid, LstmParams, Matrix, Peephole};

type M = DMatrix<f64>;

fn dense(m: &Matrix) -> M {
    M::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn add_into(target: &mut Matrix, src: &M) {
    for (r, row) in target.as_mut_slice().chunks_exact_mut(src.ncols().max(1)).enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v += src[(r, c)];
        }
    }
}

fn add_bias(target: &mut [f64], src: &M) {
    for (r, b) in target.iter_mut().enumerate() {
        *b += src.row(r).sum();
    }
}

fn with_bias(bias: &[f64], cols: usize) -> M {
    M::from_fn(bias.len(), cols, |r, _| bias[r])
}

/// `acc += a · bᵀ`
fn gemm_nt(acc: &mut M, a: &M, b: &M) {
    acc.gemm(1.0, a, &b.transpose(), 1.0);
}

/// Weights of one parameter set as column-major matrices.
struct Dense {
    w_ix: M,
    w_im: M,
    w_ic: M,
    w_fx: M,
    w_fm: M,
    w_fc: M,
    w_cx: M,
    w_cm: M,
    w_ox: M,
    w_om: M,
    w_oc: M,
    w_ym: M,
    /// Transposes used by the backward pass.
    t: Transposed,
}

struct Transposed {
    w_im: M,
    w_ic: M,
    w_fm: M,
    w_fc: M,
    w_cm: M,
    w_om: M,
    w_oc: M,
    w_ym: M,
}

impl Dense {
    fn new(p: &LstmParams) -> Self {
        Self {
            w_ix: dense(&p.w_ix),
            w_im: dense(&p.w_im),
            w_ic: dense(&p.w_ic),
            w_fx: dense(&p.w_fx),
            w_fm: dense(&p.w_fm),
            w_fc: dense(&p.w_fc),
            w_cx: dense(&p.w_cx),
            w_cm: dense(&p.w_cm),
            w_ox: dense(&p.w_ox),
            w_om: dense(&p.w_om),
            w_oc: dense(&p.w_oc),
            w_ym: dense(&p.w_ym),
            t: Transposed {
                w_im: dense(&p.w_im).transpose(),
                w_ic: dense(&p.w_ic).transpose(),
                w_fm: dense(&p.w_fm).transpose(),
                w_fc: dense(&p.w_fc).transpose(),
                w_cm: dense(&p.w_cm).transpose(),
                w_om: dense(&p.w_om).transpose(),
                w_oc: dense(&p.w_oc).transpose(),
                w_ym: dense(&p.w_ym).transpose(),
            },
        }
    }
}

/// Activations of a batched forward pass from the zero state; every
/// per-step matrix has one column per sample.
pub struct LstmBatch {
    weights: Dense,
    x: Vec<M>,
    i: Vec<M>,
    f: Vec<M>,
    g: Vec<M>,
    c: Vec<M>,
    o: Vec<M>,
    tanh_c: Vec<M>,
    m: Vec<M>,
    y: Vec<M>,
}

impl LstmBatch {
    pub fn steps(&self) -> usize {
        self.x.len()
    }

    pub fn batch_size(&self) -> usize {
        self.x.first().map_or(0, M::ncols)
    }

    /// `y_n` of sample `b`.
    pub fn output(&self, n: usize, b: usize) -> Vec<f64> {
        self.y[n].column(b).iter().copied().collect()
    }
}

impl LstmParams {
    /// Runs every sequence in `xs` (each `steps × D`, row-major) from the
    /// zero state.
    pub fn forward_batch(&self, xs: &[&[f64]]) -> LstmBatch {
        let (d, h) = (self.input_size(), self.hidden_size());
        let b = xs.len();
        let steps = xs.first().map_or(0, |x| x.len() / d.max(1));
        let w = Dense::new(self);
        let mut out = LstmBatch {
            weights: w,
            x: Vec::with_capacity(steps),
            i: Vec::with_capacity(steps),
            f: Vec::with_capacity(steps),
            g: Vec::with_capacity(steps),
            c: Vec::with_capacity(steps),
            o: Vec::with_capacity(steps),
            tanh_c: Vec::with_capacity(steps),
            m: Vec::with_capacity(steps),
            y: Vec::with_capacity(steps),
        };
        let zeros = M::zeros(h, b);
        for n in 0..steps {
            let x = M::from_fn(d, b, |r, s| xs[s][n * d + r]);
            let (m_prev, c_prev) = if n == 0 {
                (&zeros, &zeros)
            } else {
                (&out.m[n - 1], &out.c[n - 1])
            };
            let w = &out.weights;

            let mut ai = with_bias(&self.b_i, b);
            ai.gemm(1.0, &w.w_ix, &x, 1.0);
            ai.gemm(1.0, &w.w_im, m_prev, 1.0);
            ai.gemm(1.0, &w.w_ic, c_prev, 1.0);
            let mut af = with_bias(&self.b_f, b);
            af.gemm(1.0, &w.w_fx, &x, 1.0);
            af.gemm(1.0, &w.w_fm, m_prev, 1.0);
            af.gemm(1.0, &w.w_fc, c_prev, 1.0);
            let mut ag = with_bias(&self.b_c, b);
            ag.gemm(1.0, &w.w_cx, &x, 1.0);
            ag.gemm(1.0, &w.w_cm, m_prev, 1.0);

            ai.apply(|v| *v = sigmoid(*v));
            af.apply(|v| *v = sigmoid(*v));
            ag.apply(|v| *v = v.tanh());
            let c = af.component_mul(c_prev) + ai.component_mul(&ag);

            let mut ao = with_bias(&self.b_o, b);
            ao.gemm(1.0, &w.w_ox, &x, 1.0);
            ao.gemm(1.0, &w.w_om, m_prev, 1.0);
            ao.gemm(1.0, &w.w_oc, &c, 1.0);
            ao.apply(|v| *v = sigmoid(*v));
            let tc = c.map(f64::tanh);
            let m = ao.component_mul(&tc);
            let mut y = with_bias(&self.b_y, b);
            y.gemm(1.0, &w.w_ym, &m, 1.0);

            out.x.push(x);
            out.i.push(ai);
            out.f.push(af);
            out.g.push(ag);
            out.c.push(c);
            out.o.push(ao);
            out.tanh_c.push(tc);
            out.m.push(m);
            out.y.push(y);
        }
        out
    }

    /// Accumulates parameter gradients for output gradients `dys[n]`
    /// (`O × B`, `None` meaning zero) at every step.
    pub fn backward_batch(&self, batch: &LstmBatch, dys: &[Option<M>], grad: &mut LstmParams) {
        let (d, h, o) = (self.input_size(), self.hidden_size(), self.output_size());
        let b = batch.batch_size();
        let w = &batch.weights;
        let zeros = M::zeros(h, b);
        let mut g_ix = M::zeros(h, d);
        let mut g_im = M::zeros(h, h);
        let mut g_ic = M::zeros(h, h);
        let mut g_fx = M::zeros(h, d);
        let mut g_fm = M::zeros(h, h);
        let mut g_fc = M::zeros(h, h);
        let mut g_cx = M::zeros(h, d);
        let mut g_cm = M::zeros(h, h);
        let mut g_ox = M::zeros(h, d);
        let mut g_om = M::zeros(h, h);
        let mut g_oc = M::zeros(h, h);
        let mut g_ym = M::zeros(o, h);
        let (mut g_bi, mut g_bf, mut g_bc, mut g_bo, mut g_by) =
            (vec![0.0; h], vec![0.0; h], vec![0.0; h], vec![0.0; h], vec![0.0; o]);

        let mut dm_next = M::zeros(h, b);
        let mut dc_next = M::zeros(h, b);
        for n in (0..batch.steps()).rev() {
            let (m_prev, c_prev) = if n == 0 {
                (&zeros, &zeros)
            } else {
                (&batch.m[n - 1], &batch.c[n - 1])
            };
            let (i, f, g, c) = (&batch.i[n], &batch.f[n], &batch.g[n], &batch.c[n]);
            let (og, tc, m, x) = (&batch.o[n], &batch.tanh_c[n], &batch.m[n], &batch.x[n]);

            let mut dm = dm_next.clone();
            if let Some(dy) = dys.get(n).and_then(Option::as_ref) {
                dm.gemm(1.0, &w.t.w_ym, dy, 1.0);
                gemm_nt(&mut g_ym, dy, m);
                add_bias(&mut g_by, dy);
            }

            let da_o = M::from_fn(h, b, |r, s| {
                let ov = og[(r, s)];
                dm[(r, s)] * tc[(r, s)] * ov * (1.0 - ov)
            });
            let mut dc = M::from_fn(h, b, |r, s| {
                let (ov, t) = (og[(r, s)], tc[(r, s)]);
                dc_next[(r, s)] + dm[(r, s)] * ov * (1.0 - t * t)
            });
            dc.gemm(1.0, &w.t.w_oc, &da_o, 1.0);
            let da_i = M::from_fn(h, b, |r, s| {
                let iv = i[(r, s)];
                dc[(r, s)] * g[(r, s)] * iv * (1.0 - iv)
            });
            let da_g = M::from_fn(h, b, |r, s| {
                let gv = g[(r, s)];
                dc[(r, s)] * i[(r, s)] * (1.0 - gv * gv)
            });
            let da_f = M::from_fn(h, b, |r, s| {
                let fv = f[(r, s)];
                dc[(r, s)] * c_prev[(r, s)] * fv * (1.0 - fv)
            });

            gemm_nt(&mut g_ix, &da_i, x);
            gemm_nt(&mut g_im, &da_i, m_prev);
            gemm_nt(&mut g_ic, &da_i, c_prev);
            gemm_nt(&mut g_fx, &da_f, x);
            gemm_nt(&mut g_fm, &da_f, m_prev);
            gemm_nt(&mut g_fc, &da_f, c_prev);
            gemm_nt(&mut g_cx, &da_g, x);
            gemm_nt(&mut g_cm, &da_g, m_prev);
            gemm_nt(&mut g_ox, &da_o, x);
            gemm_nt(&mut g_om, &da_o, m_prev);
            gemm_nt(&mut g_oc, &da_o, c);
            add_bias(&mut g_bi, &da_i);
            add_bias(&mut g_bf, &da_f);
            add_bias(&mut g_bc, &da_g);
            add_bias(&mut g_bo, &da_o);

            dc_next = dc.component_mul(f);
            dc_next.gemm(1.0, &w.t.w_ic, &da_i, 1.0);
            dc_next.gemm(1.0, &w.t.w_fc, &da_f, 1.0);
            dm_next.fill(0.0);
            dm_next.gemm(1.0, &w.t.w_im, &da_i, 1.0);
            dm_next.gemm(1.0, &w.t.w_fm, &da_f, 1.0);
            dm_next.gemm(1.0, &w.t.w_cm, &da_g, 1.0);
            dm_next.gemm(1.0, &w.t.w_om, &da_o, 1.0);
        }

        for (target, src) in [
            (&mut grad.w_ix, &g_ix),
            (&mut grad.w_im, &g_im),
            (&mut grad.w_ic, &g_ic),
            (&mut grad.w_fx, &g_fx),
            (&mut grad.w_fm, &g_fm),
            (&mut grad.w_fc, &g_fc),
            (&mut grad.w_cx, &g_cx),
            (&mut grad.w_cm, &g_cm),
            (&mut grad.w_ox, &g_ox),
            (&mut grad.w_om, &g_om),
            (&mut grad.w_oc, &g_oc),
            (&mut grad.w_ym, &g_ym),
        ] {
            add_into(target, src);
        }
        for (target, src) in [
            (&mut grad.b_i, &g_bi),
            (&mut grad.b_f, &g_bf),
            (&mut grad.b_c, &g_bc),
            (&mut grad.b_o, &g_bo),
            (&mut grad.b_y, &g_by),
        ] {
            target.iter_mut().zip(src).for_each(|(t, s)| *t += s);
        }
        if grad.peephole == Peephole::Diagonal {
            grad.w_ic.keep_diagonal();
            grad.w_fc.keep_diagonal();
            grad.w_oc.keep_diagonal();
        }
    }
}
