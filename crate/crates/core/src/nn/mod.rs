//! Numerical kernels: dense layers, the peephole LSTM cell with
//! hand-derived backpropagation through time, losses, parameter
//! initialization, the adaptive-moment optimizer and finite-difference
//! gradient checking. Everything is `f64`.

mod dense;
pub mod gradcheck;
mod init;
mod loss;
mod lstm;
mod lstm_batch;
mod matrix;
mod optim;

pub use dense::{backward_dense, dense_forward, dense_forward_cached, Activation, DenseCache, DenseParams};
pub use init::{init_dense, init_lstm, LstmShape};
pub use loss::{reconstruction_loss, reconstruction_loss_grad, sparsity_grad, sparsity_penalty, LossConfig};
pub use lstm::{
    backward_lstm, lstm_forward, lstm_step, LstmCache, LstmForward, LstmGrads, LstmParams, LstmState,
    LstmWorkspace, Peephole,
};
pub use lstm_batch::LstmBatch;
pub use matrix::{axpy, dot, Matrix};
pub use optim::{optimizer_step, AdamConfig, OptimizerState};

/// A fixed collection of parameter tensors, visited in a stable order.
/// Gradients are carried in a value of the same type.
pub trait ParamSet: Clone {
    fn tensors(&self) -> Vec<&[f64]>;
    fn tensors_mut(&mut self) -> Vec<&mut [f64]>;

    fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    fn zeroed(&self) -> Self {
        let mut z = self.clone();
        z.tensors_mut().into_iter().for_each(|t| t.fill(0.0));
        z
    }

    fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    /// Flattened copy of every parameter in visiting order.
    fn flatten(&self) -> Vec<f64> {
        self.tensors().concat()
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
