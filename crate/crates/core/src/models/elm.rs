use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{sigmoid, Matrix};
use crate::rng::SeededRng;

/// Extreme learning machine: a frozen random sigmoid layer followed by
/// linear output weights fitted in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElmParams {
    /// `hidden × features`, uniform in `[-1, 1]`.
    pub hidden_weights: Matrix,
    pub hidden_bias: Vec<f64>,
    /// `hidden × outputs`.
    pub output_weights: Matrix,
    pub ridge: f64,
}

impl ElmParams {
    pub fn features(&self) -> usize {
        self.hidden_weights.cols()
    }

    pub fn hidden(&self) -> usize {
        self.hidden_weights.rows()
    }

    pub fn outputs(&self) -> usize {
        self.output_weights.cols()
    }

    pub fn check(&self) -> Result<()> {
        let h = self.hidden();
        if self.hidden_bias.len() != h || self.output_weights.rows() != h {
            return Err(Error::ModelShape(format!(
                "elm hidden size {h} disagrees with bias {} or output weights {:?}",
                self.hidden_bias.len(),
                self.output_weights.shape()
            )));
        }
        let finite = self
            .hidden_weights
            .as_slice()
            .iter()
            .chain(&self.hidden_bias)
            .chain(self.output_weights.as_slice())
            .all(|v| v.is_finite());
        if !finite || !(self.ridge >= 0.0) {
            return Err(Error::ModelShape("elm parameters contain invalid values".into()));
        }
        Ok(())
    }

    pub fn hidden_activations(&self, x: &[f64]) -> Vec<f64> {
        let mut h = self.hidden_bias.clone();
        self.hidden_weights.mul_vec_acc(x, &mut h);
        h.iter_mut().for_each(|v| *v = sigmoid(*v));
        h
    }

    pub fn predict(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.outputs()];
        self.output_weights.mul_t_vec_acc(&self.hidden_activations(x), &mut out);
        out
    }

    fn design(&self, inputs: &[Vec<f64>]) -> DMatrix<f64> {
        let rows: Vec<Vec<f64>> = inputs.iter().map(|x| self.hidden_activations(x)).collect();
        DMatrix::from_fn(rows.len(), self.hidden(), |r, c| rows[r][c])
    }

    /// `‖(HᵀH + λI)W − HᵀT‖_F / ‖HᵀT‖_F` on the given training set.
    pub fn normal_equation_residual(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> f64 {
        let h = self.design(inputs);
        let t = DMatrix::from_fn(targets.len(), self.outputs(), |r, c| targets[r][c]);
        let w = DMatrix::from_row_slice(self.hidden(), self.outputs(), self.output_weights.as_slice());
        let mut a = h.transpose() * &h;
        for k in 0..self.hidden() {
            a[(k, k)] += self.ridge;
        }
        let rhs = h.transpose() * t;
        (a * w - &rhs).norm() / rhs.norm()
    }
}

/// Draws the hidden layer from `seed` and solves the ridge system by
/// Cholesky factorization, with one step of iterative refinement.
pub fn fit_elm(inputs: &[Vec<f64>], targets: &[Vec<f64>], hidden: usize, ridge: f64, seed: u64) -> Result<ElmParams> {
    let (Some(x0), Some(t0)) = (inputs.first(), targets.first()) else {
        return Err(Error::InvalidArgument("elm needs at least one training sample".into()));
    };
    if inputs.len() != targets.len() {
        return Err(Error::shape(inputs.len(), targets.len()));
    }
    if hidden == 0 || !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::Config(format!("elm needs hidden >= 1 and ridge >= 0, got {hidden} and {ridge}")));
    }
    let (d, o) = (x0.len(), t0.len());
    if let Some(bad) = inputs.iter().find(|x| x.len() != d) {
        return Err(Error::shape(d, bad.len()));
    }
    if let Some(bad) = targets.iter().find(|t| t.len() != o) {
        return Err(Error::shape(o, bad.len()));
    }

    let mut rng = SeededRng::new(seed);
    let hidden_weights = Matrix::from_fn(hidden, d, |_, _| rng.uniform_in(-1.0, 1.0));
    let hidden_bias = (0..hidden).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
    let mut model = ElmParams {
        hidden_weights,
        hidden_bias,
        output_weights: Matrix::zeros(hidden, o),
        ridge,
    };

    let h = model.design(inputs);
    let t = DMatrix::from_fn(targets.len(), o, |r, c| targets[r][c]);
    let mut a = h.transpose() * &h;
    for k in 0..hidden {
        a[(k, k)] += ridge;
    }
    let rhs = h.transpose() * t;
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NumericFailure("ridge system is not positive definite".into()))?;
    let mut w = chol.solve(&rhs);
    let correction = chol.solve(&(&rhs - &a * &w));
    w += correction;
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericFailure("ridge solution is not finite".into()));
    }
    model.output_weights = Matrix::from_fn(hidden, o, |r, c| w[(r, c)]);
    Ok(model)
}
