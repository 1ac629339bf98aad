//! Peephole LSTM cell.
//!
//! One step, with `σ` the logistic function and `⊙` the elementwise product:
//!
//! ```text
//! i_n = σ(W_ix x_n + W_im m_{n-1} + W_ic c_{n-1} + b_i)
//! f_n = σ(W_fx x_n + W_fm m_{n-1} + W_fc c_{n-1} + b_f)
//! c_n = f_n ⊙ c_{n-1} + i_n ⊙ tanh(W_cx x_n + W_cm m_{n-1} + b_c)
//! o_n = σ(W_ox x_n + W_om m_{n-1} + W_oc c_n + b_o)
//! m_n = o_n ⊙ tanh(c_n)
//! y_n = W_ym m_n + b_y
//! ```
//!
//! The peephole matrices `W_ic`, `W_fc`, `W_oc` are full `H × H` matrices
//! unless [`Peephole::Diagonal`] is selected, in which case their
//! off-diagonal entries stay zero (they are initialized to zero and their
//! gradients are projected onto the diagonal).

use serde::{Deserialize, Serialize};

use super::{sigmoid, Matrix, ParamSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Peephole {
    #[default]
    Full,
    Diagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LstmParams {
    pub w_ix: Matrix,
    pub w_im: Matrix,
    pub w_ic: Matrix,
    pub b_i: Vec<f64>,
    pub w_fx: Matrix,
    pub w_fm: Matrix,
    pub w_fc: Matrix,
    pub b_f: Vec<f64>,
    pub w_cx: Matrix,
    pub w_cm: Matrix,
    pub b_c: Vec<f64>,
    pub w_ox: Matrix,
    pub w_om: Matrix,
    pub w_oc: Matrix,
    pub b_o: Vec<f64>,
    pub w_ym: Matrix,
    pub b_y: Vec<f64>,
    pub peephole: Peephole,
}

impl LstmParams {
    /// All-zero parameters for input size `d`, hidden size `h`, output size `o`.
    pub fn zeros(d: usize, h: usize, o: usize, peephole: Peephole) -> Self {
        let hx = || Matrix::zeros(h, d);
        let hh = || Matrix::zeros(h, h);
        Self {
            w_ix: hx(),
            w_im: hh(),
            w_ic: hh(),
            b_i: vec![0.0; h],
            w_fx: hx(),
            w_fm: hh(),
            w_fc: hh(),
            b_f: vec![0.0; h],
            w_cx: hx(),
            w_cm: hh(),
            b_c: vec![0.0; h],
            w_ox: hx(),
            w_om: hh(),
            w_oc: hh(),
            b_o: vec![0.0; h],
            w_ym: Matrix::zeros(o, h),
            b_y: vec![0.0; o],
            peephole,
        }
    }

    pub fn input_size(&self) -> usize {
        self.w_ix.cols()
    }

    pub fn hidden_size(&self) -> usize {
        self.w_ix.rows()
    }

    pub fn output_size(&self) -> usize {
        self.w_ym.rows()
    }

    pub fn check(&self) -> Result<()> {
        let (d, h, o) = (self.input_size(), self.hidden_size(), self.output_size());
        let expect = [
            (&self.w_ix, (h, d), "w_ix"),
            (&self.w_im, (h, h), "w_im"),
            (&self.w_ic, (h, h), "w_ic"),
            (&self.w_fx, (h, d), "w_fx"),
            (&self.w_fm, (h, h), "w_fm"),
            (&self.w_fc, (h, h), "w_fc"),
            (&self.w_cx, (h, d), "w_cx"),
            (&self.w_cm, (h, h), "w_cm"),
            (&self.w_ox, (h, d), "w_ox"),
            (&self.w_om, (h, h), "w_om"),
            (&self.w_oc, (h, h), "w_oc"),
            (&self.w_ym, (o, h), "w_ym"),
        ];
        for (m, shape, name) in expect {
            if m.shape() != shape {
                return Err(Error::ModelShape(format!("{name} is {:?}, expected {shape:?}", m.shape())));
            }
        }
        for (b, len, name) in [
            (&self.b_i, h, "b_i"),
            (&self.b_f, h, "b_f"),
            (&self.b_c, h, "b_c"),
            (&self.b_o, h, "b_o"),
            (&self.b_y, o, "b_y"),
        ] {
            if b.len() != len {
                return Err(Error::ModelShape(format!("{name} has {} entries, expected {len}", b.len())));
            }
        }
        if !self.is_finite() {
            return Err(Error::ModelShape("lstm parameters contain non-finite values".into()));
        }
        Ok(())
    }

    fn project_peepholes(&mut self) {
        if self.peephole == Peephole::Diagonal {
            self.w_ic.keep_diagonal();
            self.w_fc.keep_diagonal();
            self.w_oc.keep_diagonal();
        }
    }

    /// Runs the sequence `xs` (`steps × D`, row-major) from `initial`,
    /// recording everything the backward pass needs.
    pub fn forward_into(&self, xs: &[f64], initial: Option<&LstmState>, cache: &mut LstmCache) {
        let (d, h, o) = (self.input_size(), self.hidden_size(), self.output_size());
        let steps = xs.len() / d.max(1);
        cache.reset(steps, d, h, o);
        cache.xs.copy_from_slice(xs);
        if let Some(s) = initial {
            cache.m0.copy_from_slice(&s.m);
            cache.c0.copy_from_slice(&s.c);
        }

        for n in 0..steps {
            let x = &xs[n * d..(n + 1) * d];
            let row = n * h..(n + 1) * h;
            let (m_prev, c_prev) = if n == 0 {
                (&cache.m0[..], &cache.c0[..])
            } else {
                let prev = (n - 1) * h..n * h;
                (&cache.m[prev.clone()], &cache.c[prev])
            };

            let mut ai = self.b_i.clone();
            self.w_ix.mul_vec_acc(x, &mut ai);
            self.w_im.mul_vec_acc(m_prev, &mut ai);
            self.w_ic.mul_vec_acc(c_prev, &mut ai);

            let mut af = self.b_f.clone();
            self.w_fx.mul_vec_acc(x, &mut af);
            self.w_fm.mul_vec_acc(m_prev, &mut af);
            self.w_fc.mul_vec_acc(c_prev, &mut af);

            let mut ag = self.b_c.clone();
            self.w_cx.mul_vec_acc(x, &mut ag);
            self.w_cm.mul_vec_acc(m_prev, &mut ag);

            let mut cn = vec![0.0; h];
            for k in 0..h {
                let (i, f, g) = (sigmoid(ai[k]), sigmoid(af[k]), ag[k].tanh());
                ai[k] = i;
                af[k] = f;
                ag[k] = g;
                cn[k] = f * c_prev[k] + i * g;
            }

            let mut ao = self.b_o.clone();
            self.w_ox.mul_vec_acc(x, &mut ao);
            self.w_om.mul_vec_acc(m_prev, &mut ao);
            self.w_oc.mul_vec_acc(&cn, &mut ao);

            cache.i[row.clone()].copy_from_slice(&ai);
            cache.f[row.clone()].copy_from_slice(&af);
            cache.g[row.clone()].copy_from_slice(&ag);
            cache.c[row.clone()].copy_from_slice(&cn);
            for k in 0..h {
                let o_gate = sigmoid(ao[k]);
                let tc = cn[k].tanh();
                cache.o[n * h + k] = o_gate;
                cache.tanh_c[n * h + k] = tc;
                cache.m[n * h + k] = o_gate * tc;
            }

            let y = &mut cache.y[n * o..(n + 1) * o];
            y.copy_from_slice(&self.b_y);
            self.w_ym.mul_vec_acc(&cache.m[row], y);
        }
    }

    /// Backpropagation through time. `dys` holds `∂loss/∂y_n` for every
    /// step (`steps × O`); gradients are accumulated into `grad`, and
    /// `dxs` (`steps × D`) receives `∂loss/∂x_n` when provided.
    pub fn backward_acc(
        &self,
        cache: &LstmCache,
        dys: &[f64],
        grad: &mut LstmParams,
        ws: &mut LstmWorkspace,
        mut dxs: Option<&mut [f64]>,
    ) {
        let (d, h, o) = (cache.d, cache.h, cache.out);
        ws.reset(h);
        if let Some(dx) = dxs.as_deref_mut() {
            dx.fill(0.0);
        }

        for n in (0..cache.steps).rev() {
            let row = n * h..(n + 1) * h;
            let x = &cache.xs[n * d..(n + 1) * d];
            let (m_prev, c_prev) = if n == 0 {
                (&cache.m0[..], &cache.c0[..])
            } else {
                let prev = (n - 1) * h..n * h;
                (&cache.m[prev.clone()], &cache.c[prev])
            };
            let (i, f, g) = (&cache.i[row.clone()], &cache.f[row.clone()], &cache.g[row.clone()]);
            let (c, og, tc, m) = (
                &cache.c[row.clone()],
                &cache.o[row.clone()],
                &cache.tanh_c[row.clone()],
                &cache.m[row.clone()],
            );

            // output projection
            let dy = &dys[n * o..(n + 1) * o];
            ws.dm.copy_from_slice(&ws.dm_next);
            self.w_ym.mul_t_vec_acc(dy, &mut ws.dm);
            grad.w_ym.add_outer(dy, m);
            for (b, &v) in grad.b_y.iter_mut().zip(dy) {
                *b += v;
            }

            for k in 0..h {
                ws.da_o[k] = ws.dm[k] * tc[k] * og[k] * (1.0 - og[k]);
                ws.dc[k] = ws.dc_next[k] + ws.dm[k] * og[k] * (1.0 - tc[k] * tc[k]);
            }
            // o_n peeks at c_n
            self.w_oc.mul_t_vec_acc(&ws.da_o, &mut ws.dc);
            for k in 0..h {
                ws.da_i[k] = ws.dc[k] * g[k] * i[k] * (1.0 - i[k]);
                ws.da_g[k] = ws.dc[k] * i[k] * (1.0 - g[k] * g[k]);
                ws.da_f[k] = ws.dc[k] * c_prev[k] * f[k] * (1.0 - f[k]);
            }

            grad.w_ix.add_outer(&ws.da_i, x);
            grad.w_im.add_outer(&ws.da_i, m_prev);
            grad.w_ic.add_outer(&ws.da_i, c_prev);
            grad.w_fx.add_outer(&ws.da_f, x);
            grad.w_fm.add_outer(&ws.da_f, m_prev);
            grad.w_fc.add_outer(&ws.da_f, c_prev);
            grad.w_cx.add_outer(&ws.da_g, x);
            grad.w_cm.add_outer(&ws.da_g, m_prev);
            grad.w_ox.add_outer(&ws.da_o, x);
            grad.w_om.add_outer(&ws.da_o, m_prev);
            grad.w_oc.add_outer(&ws.da_o, c);
            for k in 0..h {
                grad.b_i[k] += ws.da_i[k];
                grad.b_f[k] += ws.da_f[k];
                grad.b_c[k] += ws.da_g[k];
                grad.b_o[k] += ws.da_o[k];
            }

            // carry to step n - 1
            for k in 0..h {
                ws.dc_next[k] = ws.dc[k] * f[k];
            }
            self.w_ic.mul_t_vec_acc(&ws.da_i, &mut ws.dc_next);
            self.w_fc.mul_t_vec_acc(&ws.da_f, &mut ws.dc_next);
            ws.dm_next.fill(0.0);
            self.w_im.mul_t_vec_acc(&ws.da_i, &mut ws.dm_next);
            self.w_fm.mul_t_vec_acc(&ws.da_f, &mut ws.dm_next);
            self.w_cm.mul_t_vec_acc(&ws.da_g, &mut ws.dm_next);
            self.w_om.mul_t_vec_acc(&ws.da_o, &mut ws.dm_next);

            if let Some(dx) = dxs.as_deref_mut() {
                let dx = &mut dx[n * d..(n + 1) * d];
                self.w_ix.mul_t_vec_acc(&ws.da_i, dx);
                self.w_fx.mul_t_vec_acc(&ws.da_f, dx);
                self.w_cx.mul_t_vec_acc(&ws.da_g, dx);
                self.w_ox.mul_t_vec_acc(&ws.da_o, dx);
            }
        }
        grad.project_peepholes();
    }
}

impl ParamSet for LstmParams {
    fn tensors(&self) -> Vec<&[f64]> {
        vec![
            self.w_ix.as_slice(),
            self.w_im.as_slice(),
            self.w_ic.as_slice(),
            &self.b_i,
            self.w_fx.as_slice(),
            self.w_fm.as_slice(),
            self.w_fc.as_slice(),
            &self.b_f,
            self.w_cx.as_slice(),
            self.w_cm.as_slice(),
            &self.b_c,
            self.w_ox.as_slice(),
            self.w_om.as_slice(),
            self.w_oc.as_slice(),
            &self.b_o,
            self.w_ym.as_slice(),
            &self.b_y,
        ]
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.w_ix.as_mut_slice(),
            self.w_im.as_mut_slice(),
            self.w_ic.as_mut_slice(),
            &mut self.b_i,
            self.w_fx.as_mut_slice(),
            self.w_fm.as_mut_slice(),
            self.w_fc.as_mut_slice(),
            &mut self.b_f,
            self.w_cx.as_mut_slice(),
            self.w_cm.as_mut_slice(),
            &mut self.b_c,
            self.w_ox.as_mut_slice(),
            self.w_om.as_mut_slice(),
            self.w_oc.as_mut_slice(),
            &mut self.b_o,
            self.w_ym.as_mut_slice(),
            &mut self.b_y,
        ]
    }
}

/// Hidden output `m` and memory cell `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub m: Vec<f64>,
    pub c: Vec<f64>,
}

impl LstmState {
    pub fn zeros(h: usize) -> Self {
        Self {
            m: vec![0.0; h],
            c: vec![0.0; h],
        }
    }
}

/// Per-step activations of a forward pass, stored step-major.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LstmCache {
    steps: usize,
    d: usize,
    h: usize,
    out: usize,
    xs: Vec<f64>,
    m0: Vec<f64>,
    c0: Vec<f64>,
    i: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    c: Vec<f64>,
    o: Vec<f64>,
    tanh_c: Vec<f64>,
    m: Vec<f64>,
    y: Vec<f64>,
}

impl LstmCache {
    fn reset(&mut self, steps: usize, d: usize, h: usize, o: usize) {
        self.steps = steps;
        self.d = d;
        self.h = h;
        self.out = o;
        let resize = |v: &mut Vec<f64>, n: usize| {
            v.clear();
            v.resize(n, 0.0);
        };
        resize(&mut self.xs, steps * d);
        resize(&mut self.m0, h);
        resize(&mut self.c0, h);
        for v in [
            &mut self.i,
            &mut self.f,
            &mut self.g,
            &mut self.c,
            &mut self.o,
            &mut self.tanh_c,
            &mut self.m,
        ] {
            resize(v, steps * h);
        }
        resize(&mut self.y, steps * o);
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn input_gate(&self, n: usize) -> &[f64] {
        &self.i[n * self.h..(n + 1) * self.h]
    }

    pub fn forget_gate(&self, n: usize) -> &[f64] {
        &self.f[n * self.h..(n + 1) * self.h]
    }

    pub fn output_gate(&self, n: usize) -> &[f64] {
        &self.o[n * self.h..(n + 1) * self.h]
    }

    pub fn candidate(&self, n: usize) -> &[f64] {
        &self.g[n * self.h..(n + 1) * self.h]
    }

    pub fn cell(&self, n: usize) -> &[f64] {
        &self.c[n * self.h..(n + 1) * self.h]
    }

    pub fn hidden(&self, n: usize) -> &[f64] {
        &self.m[n * self.h..(n + 1) * self.h]
    }

    pub fn output(&self, n: usize) -> &[f64] {
        &self.y[n * self.out..(n + 1) * self.out]
    }

    pub fn final_state(&self) -> LstmState {
        match self.steps {
            0 => LstmState {
                m: self.m0.clone(),
                c: self.c0.clone(),
            },
            n => LstmState {
                m: self.hidden(n - 1).to_vec(),
                c: self.cell(n - 1).to_vec(),
            },
        }
    }

    fn matches(&self, p: &LstmParams) -> bool {
        self.d == p.input_size() && self.h == p.hidden_size() && self.out == p.output_size()
    }
}

/// Scratch vectors reused across backward calls.
#[derive(Debug, Clone, Default)]
pub struct LstmWorkspace {
    dm: Vec<f64>,
    dc: Vec<f64>,
    dm_next: Vec<f64>,
    dc_next: Vec<f64>,
    da_i: Vec<f64>,
    da_f: Vec<f64>,
    da_g: Vec<f64>,
    da_o: Vec<f64>,
}

impl LstmWorkspace {
    fn reset(&mut self, h: usize) {
        for v in [
            &mut self.dm,
            &mut self.dc,
            &mut self.dm_next,
            &mut self.dc_next,
            &mut self.da_i,
            &mut self.da_f,
            &mut self.da_g,
            &mut self.da_o,
        ] {
            v.clear();
            v.resize(h, 0.0);
        }
    }
}

fn check_input(p: &LstmParams, x: &[f64]) -> Result<()> {
    if x.len() == p.input_size() {
        Ok(())
    } else {
        Err(Error::shape(p.input_size(), x.len()))
    }
}

/// One step from `prev`; returns the new state and `y_n`.
pub fn lstm_step(p: &LstmParams, x: &[f64], prev: &LstmState) -> Result<(LstmState, Vec<f64>)> {
    check_input(p, x)?;
    if prev.m.len() != p.hidden_size() || prev.c.len() != p.hidden_size() {
        return Err(Error::shape(p.hidden_size(), prev.m.len().max(prev.c.len())));
    }
    let mut cache = LstmCache::default();
    p.forward_into(x, Some(prev), &mut cache);
    Ok((cache.final_state(), cache.output(0).to_vec()))
}

#[derive(Debug, Clone)]
pub struct LstmForward {
    pub outputs: Vec<Vec<f64>>,
    pub final_state: LstmState,
    pub cache: LstmCache,
}

/// Iterates the cell over `xs` from the zero state.
pub fn lstm_forward(p: &LstmParams, xs: &[Vec<f64>]) -> Result<LstmForward> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("input sequence is empty".into()));
    }
    for x in xs {
        check_input(p, x)?;
    }
    let mut cache = LstmCache::default();
    p.forward_into(&xs.concat(), None, &mut cache);
    let outputs = (0..cache.steps()).map(|n| cache.output(n).to_vec()).collect();
    Ok(LstmForward {
        outputs,
        final_state: cache.final_state(),
        cache,
    })
}

#[derive(Debug, Clone)]
pub struct LstmGrads {
    pub params: LstmParams,
    pub inputs: Vec<Vec<f64>>,
}

/// Gradients of a loss whose derivative w.r.t. each `y_n` is `dys[n]`.
pub fn backward_lstm(p: &LstmParams, cache: &LstmCache, dys: &[Vec<f64>]) -> Result<LstmGrads> {
    if !cache.matches(p) {
        return Err(Error::InvalidState(format!(
            "cache was recorded for sizes ({}, {}, {}), parameters are ({}, {}, {})",
            cache.d,
            cache.h,
            cache.out,
            p.input_size(),
            p.hidden_size(),
            p.output_size()
        )));
    }
    if dys.len() != cache.steps() {
        return Err(Error::InvalidState(format!(
            "{} output gradients for a {}-step cache",
            dys.len(),
            cache.steps()
        )));
    }
    if let Some(bad) = dys.iter().find(|dy| dy.len() != p.output_size()) {
        return Err(Error::shape(p.output_size(), bad.len()));
    }
    let mut grad = p.zeroed();
    let mut ws = LstmWorkspace::default();
    let mut dxs = vec![0.0; cache.steps() * p.input_size()];
    p.backward_acc(cache, &dys.concat(), &mut grad, &mut ws, Some(&mut dxs));
    let d = p.input_size().max(1);
    Ok(LstmGrads {
        params: grad,
        inputs: dxs.chunks(d).map(<[f64]>::to_vec).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::init_lstm;
    use crate::nn::LstmShape;

    #[test]
    fn zero_params_from_zero_state() {
        let p = LstmParams::zeros(3, 4, 2, Peephole::Full);
        let fwd = lstm_forward(&p, &[vec![1.0, -2.0, 0.5]]).unwrap();
        let cache = &fwd.cache;
        assert!(cache.input_gate(0).iter().all(|&v| v == 0.5));
        assert!(cache.forget_gate(0).iter().all(|&v| v == 0.5));
        assert!(cache.output_gate(0).iter().all(|&v| v == 0.5));
        assert!(fwd.final_state.c.iter().all(|&v| v == 0.0));
        assert!(fwd.final_state.m.iter().all(|&v| v == 0.0));
        assert_eq!(fwd.outputs[0], vec![0.0, 0.0]);
    }

    #[test]
    fn zero_params_zero_outputs_over_sequence() {
        let p = LstmParams::zeros(2, 3, 2, Peephole::Full);
        let xs: Vec<Vec<f64>> = (0..6).map(|n| vec![n as f64, -(n as f64)]).collect();
        let fwd = lstm_forward(&p, &xs).unwrap();
        assert!(fwd.outputs.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn saturated_forget_gate_keeps_cell() {
        // oracle: σ(20) = 1 - 2.06e-9, σ(-20) = 2.06e-9
        let mut p = LstmParams::zeros(2, 3, 1, Peephole::Full);
        p.b_f = vec![20.0; 3];
        p.b_i = vec![-20.0; 3];
        let prev = LstmState {
            m: vec![0.0; 3],
            c: vec![0.7, -1.3, 2.0],
        };
        let (next, _) = lstm_step(&p, &[0.4, -0.9], &prev).unwrap();
        for (a, b) in next.c.iter().zip(&prev.c) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn gates_strictly_inside_unit_interval() {
        let p = init_lstm(LstmShape::new(3, 5, 2), 9);
        let xs: Vec<Vec<f64>> = (0..8).map(|n| vec![n as f64 * 0.5, -1.0, 4.0]).collect();
        let fwd = lstm_forward(&p, &xs).unwrap();
        for n in 0..8 {
            for gate in [fwd.cache.input_gate(n), fwd.cache.forget_gate(n), fwd.cache.output_gate(n)] {
                assert!(gate.iter().all(|&v| v > 0.0 && v < 1.0));
            }
            assert!(fwd.cache.candidate(n).iter().all(|v| v.abs() < 1.0));
        }
    }

    #[test]
    fn single_step_sequence_matches_step() {
        let p = init_lstm(LstmShape::new(2, 3, 2), 1);
        let x = vec![0.3, -0.8];
        let fwd = lstm_forward(&p, &[x.clone()]).unwrap();
        let (state, y) = lstm_step(&p, &x, &LstmState::zeros(3)).unwrap();
        assert_eq!(fwd.outputs[0], y);
        assert_eq!(fwd.final_state, state);
    }

    #[test]
    fn order_matters() {
        let p = init_lstm(LstmShape::new(1, 4, 1), 2);
        let xs: Vec<Vec<f64>> = [0.1, 0.9, -0.4, 0.6].iter().map(|&v| vec![v]).collect();
        let rev: Vec<Vec<f64>> = xs.iter().rev().cloned().collect();
        let a = lstm_forward(&p, &xs).unwrap();
        let b = lstm_forward(&p, &rev).unwrap();
        assert_ne!(a.outputs.last(), b.outputs.last());
    }

    #[test]
    fn shape_errors() {
        let p = LstmParams::zeros(2, 3, 1, Peephole::Full);
        assert!(matches!(lstm_forward(&p, &[vec![1.0]]), Err(Error::ShapeMismatch { .. })));
        assert!(lstm_forward(&p, &[]).is_err());
        assert!(lstm_step(&p, &[1.0, 2.0], &LstmState::zeros(2)).is_err());
    }

    #[test]
    fn zero_output_gradient_gives_zero_grads() {
        let p = init_lstm(LstmShape::new(2, 3, 2), 4);
        let xs = vec![vec![0.5, 0.1], vec![-0.3, 0.2]];
        let fwd = lstm_forward(&p, &xs).unwrap();
        let g = backward_lstm(&p, &fwd.cache, &[vec![0.0; 2], vec![0.0; 2]]).unwrap();
        assert!(g.params.flatten().iter().all(|&v| v == 0.0));
        assert!(g.inputs.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn mismatched_cache_is_invalid_state() {
        let p = init_lstm(LstmShape::new(2, 3, 2), 4);
        let other = init_lstm(LstmShape::new(2, 4, 2), 4);
        let fwd = lstm_forward(&other, &[vec![0.1, 0.2]]).unwrap();
        assert!(matches!(backward_lstm(&p, &fwd.cache, &[vec![1.0, 1.0]]), Err(Error::InvalidState(_))));
        let fwd = lstm_forward(&p, &[vec![0.1, 0.2]]).unwrap();
        assert!(matches!(
            backward_lstm(&p, &fwd.cache, &[vec![1.0, 1.0], vec![1.0, 1.0]]),
            Err(Error::InvalidState(_))
        ));
    }
}
