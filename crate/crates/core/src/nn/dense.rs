use serde::{Deserialize, Serialize};

use super::{sigmoid, Matrix, ParamSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Sigmoid,
    Tanh,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Sigmoid => sigmoid(x),
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activated value `y`.
    #[inline]
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }
}

/// `y = activation(W x + b)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenseParams {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl DenseParams {
    pub fn new(weights: Matrix, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        let p = Self { weights, bias, activation };
        p.check()?;
        Ok(p)
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    pub fn check(&self) -> Result<()> {
        if self.bias.len() != self.weights.rows() {
            return Err(Error::ModelShape(format!(
                "dense bias has {} entries for {} outputs",
                self.bias.len(),
                self.weights.rows()
            )));
        }
        if !self.is_finite() {
            return Err(Error::ModelShape("dense parameters contain non-finite values".into()));
        }
        Ok(())
    }

    /// Writes the activated output into `out`.
    pub fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.bias);
        self.weights.mul_vec_acc(x, out);
        if self.activation != Activation::Identity {
            for v in out.iter_mut() {
                *v = self.activation.apply(*v);
            }
        }
    }

    /// Accumulates parameter gradients into `grad` given the layer input,
    /// its activated output and `dy = ∂loss/∂y`. `dz` is scratch for the
    /// pre-activation gradient; `dx`, when given, receives `∂loss/∂x`
    /// (accumulated).
    pub fn backward_acc(
        &self,
        x: &[f64],
        y: &[f64],
        dy: &[f64],
        dz: &mut [f64],
        grad: &mut DenseParams,
        dx: Option<&mut [f64]>,
    ) {
        for ((d, &g), &yv) in dz.iter_mut().zip(dy).zip(y) {
            *d = g * self.activation.derivative_from_output(yv);
        }
        grad.weights.add_outer(dz, x);
        for (b, &d) in grad.bias.iter_mut().zip(dz.iter()) {
            *b += d;
        }
        if let Some(dx) = dx {
            self.weights.mul_t_vec_acc(dz, dx);
        }
    }
}

impl ParamSet for DenseParams {
    fn tensors(&self) -> Vec<&[f64]> {
        vec![self.weights.as_slice(), &self.bias]
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![self.weights.as_mut_slice(), &mut self.bias]
    }
}

/// Inputs and outputs retained from a forward call.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseCache {
    pub input: Vec<f64>,
    pub output: Vec<f64>,
}

pub fn dense_forward(p: &DenseParams, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != p.inputs() {
        return Err(Error::shape(p.inputs(), x.len()));
    }
    let mut out = vec![0.0; p.outputs()];
    p.forward_into(x, &mut out);
    Ok(out)
}

/// Forward pass that keeps what the backward pass needs.
pub fn dense_forward_cached(p: &DenseParams, x: &[f64]) -> Result<DenseCache> {
    let output = dense_forward(p, x)?;
    Ok(DenseCache {
        input: x.to_vec(),
        output,
    })
}

/// Parameter gradients and the input gradient for one sample.
pub fn backward_dense(p: &DenseParams, cache: &DenseCache, dy: &[f64]) -> Result<(DenseParams, Vec<f64>)> {
    if cache.input.len() != p.inputs() || cache.output.len() != p.outputs() {
        return Err(Error::InvalidState(format!(
            "cache holds a {}->{} pass but the layer is {}->{}",
            cache.input.len(),
            cache.output.len(),
            p.inputs(),
            p.outputs()
        )));
    }
    if dy.len() != p.outputs() {
        return Err(Error::shape(p.outputs(), dy.len()));
    }
    let mut grad = p.zeroed();
    let mut dz = vec![0.0; p.outputs()];
    let mut dx = vec![0.0; p.inputs()];
    p.backward_acc(&cache.input, &cache.output, dy, &mut dz, &mut grad, Some(&mut dx));
    Ok((grad, dx))
}
