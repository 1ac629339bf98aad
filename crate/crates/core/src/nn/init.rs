use super::{Activation, DenseParams, LstmParams, Matrix, Peephole};
use crate::rng::SeededRng;

/// Uniform in `±sqrt(6 / (fan_in + fan_out))`, drawn row-major.
fn glorot(rows: usize, cols: usize, rng: &mut SeededRng) -> Matrix {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    Matrix::from_fn(rows, cols, |_, _| rng.uniform_in(-bound, bound))
}

/// Glorot-uniform weights and zero biases.
pub fn init_dense(inputs: usize, outputs: usize, activation: Activation, seed: u64) -> DenseParams {
    let mut rng = SeededRng::new(seed);
    DenseParams {
        weights: glorot(outputs, inputs, &mut rng),
        bias: vec![0.0; outputs],
        activation,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LstmShape {
    pub input: usize,
    pub hidden: usize,
    pub output: usize,
    pub peephole: Peephole,
}

impl LstmShape {
    pub fn new(input: usize, hidden: usize, output: usize) -> Self {
        Self {
            input,
            hidden,
            output,
            peephole: Peephole::Full,
        }
    }

    pub fn with_peephole(mut self, peephole: Peephole) -> Self {
        self.peephole = peephole;
        self
    }
}

/// Glorot-uniform matrices (each with its own fan), zero biases, and the
/// forget-gate bias set to 1. Matrices are drawn in declaration order.
pub fn init_lstm(shape: LstmShape, seed: u64) -> LstmParams {
    let LstmShape {
        input: d,
        hidden: h,
        output: o,
        peephole,
    } = shape;
    let mut rng = SeededRng::new(seed);
    let mut p = LstmParams::zeros(d, h, o, peephole);
    p.w_ix = glorot(h, d, &mut rng);
    p.w_im = glorot(h, h, &mut rng);
    p.w_ic = glorot(h, h, &mut rng);
    p.w_fx = glorot(h, d, &mut rng);
    p.w_fm = glorot(h, h, &mut rng);
    p.w_fc = glorot(h, h, &mut rng);
    p.w_cx = glorot(h, d, &mut rng);
    p.w_cm = glorot(h, h, &mut rng);
    p.w_ox = glorot(h, d, &mut rng);
    p.w_om = glorot(h, h, &mut rng);
    p.w_oc = glorot(h, h, &mut rng);
    p.w_ym = glorot(o, h, &mut rng);
    p.b_f = vec![1.0; h];
    if peephole == Peephole::Diagonal {
        p.w_ic.keep_diagonal();
        p.w_fc.keep_diagonal();
        p.w_oc.keep_diagonal();
    }
    p
}
