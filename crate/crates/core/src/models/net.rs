//! The two trainable architectures and the minibatch training loop.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{
    init_dense, init_lstm, optimizer_step, reconstruction_loss_grad, sparsity_grad, sparsity_penalty, Activation,
    AdamConfig, DenseParams, LossConfig, LstmCache, LstmParams, LstmShape, OptimizerState, ParamSet,
};
use crate::rng::{derive_seed, SeededRng};

/// A network trained by minibatch gradient descent on
/// `(input, target)` vector pairs.
pub trait Trainable: ParamSet {
    fn input_size(&self) -> usize;
    fn output_size(&self) -> usize;

    /// Mean batch loss; gradients of that loss are accumulated into `grad`.
    fn batch_loss_grad(&self, inputs: &[&[f64]], targets: &[&[f64]], loss: &LossConfig, grad: &mut Self) -> f64;

    fn predict(&self, input: &[f64]) -> Vec<f64>;

    fn batch_loss(&self, inputs: &[&[f64]], targets: &[&[f64]], loss: &LossConfig) -> f64 {
        let mut scratch = self.zeroed();
        self.batch_loss_grad(inputs, targets, loss, &mut scratch)
    }
}

/// Sigmoid encoder, identity decoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenseAutoencoder {
    pub encoder: DenseParams,
    pub decoder: DenseParams,
}

impl DenseAutoencoder {
    pub fn init(inputs: usize, hidden: usize, seed: u64) -> Self {
        Self {
            encoder: init_dense(inputs, hidden, Activation::Sigmoid, derive_seed(seed, b"encoder")),
            decoder: init_dense(hidden, inputs, Activation::Identity, derive_seed(seed, b"decoder")),
        }
    }

    pub fn check(&self) -> Result<()> {
        self.encoder.check()?;
        self.decoder.check()?;
        if self.encoder.outputs() != self.decoder.inputs() || self.decoder.outputs() != self.encoder.inputs() {
            return Err(Error::ModelShape(format!(
                "encoder {}->{} does not chain with decoder {}->{}",
                self.encoder.inputs(),
                self.encoder.outputs(),
                self.decoder.inputs(),
                self.decoder.outputs()
            )));
        }
        Ok(())
    }
}

impl ParamSet for DenseAutoencoder {
    fn tensors(&self) -> Vec<&[f64]> {
        let mut t = self.encoder.tensors();
        t.extend(self.decoder.tensors());
        t
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut t = self.encoder.tensors_mut();
        t.extend(self.decoder.tensors_mut());
        t
    }
}

impl Trainable for DenseAutoencoder {
    fn input_size(&self) -> usize {
        self.encoder.inputs()
    }

    fn output_size(&self) -> usize {
        self.decoder.outputs()
    }

    fn batch_loss_grad(&self, inputs: &[&[f64]], targets: &[&[f64]], loss: &LossConfig, grad: &mut Self) -> f64 {
        let b = inputs.len();
        let (h, n) = (self.encoder.outputs(), self.decoder.outputs());
        let mut hidden = vec![vec![0.0; h]; b];
        let mut outputs = vec![vec![0.0; n]; b];
        let mut total = 0.0;
        for k in 0..b {
            self.encoder.forward_into(inputs[k], &mut hidden[k]);
            self.decoder.forward_into(&hidden[k], &mut outputs[k]);
            total += squared_error(targets[k], &outputs[k]) / n as f64;
        }
        let penalty = sparsity_penalty(&hidden, loss);
        let unit_grad = sparsity_grad(&hidden, loss);

        let (mut dz, mut dz_h, mut dh) = (vec![0.0; n], vec![0.0; n], vec![0.0; h]);
        let mut da = vec![0.0; h];
        for k in 0..b {
            dz.fill(0.0);
            reconstruction_loss_grad(targets[k], &outputs[k], 1.0 / b as f64, &mut dz);
            dh.copy_from_slice(&unit_grad);
            self.decoder
                .backward_acc(&hidden[k], &outputs[k], &dz, &mut dz_h, &mut grad.decoder, Some(&mut dh));
            self.encoder
                .backward_acc(inputs[k], &hidden[k], &dh, &mut da, &mut grad.encoder, None);
        }
        total / b as f64 + penalty
    }

    fn predict(&self, input: &[f64]) -> Vec<f64> {
        let mut hidden = vec![0.0; self.encoder.outputs()];
        let mut out = vec![0.0; self.decoder.outputs()];
        self.encoder.forward_into(input, &mut hidden);
        self.decoder.forward_into(&hidden, &mut out);
        out
    }
}

/// Peephole LSTM over the window rows followed by an identity dense
/// layer from the last step's output to the whole window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LstmAutoencoder {
    pub lstm: LstmParams,
    pub decoder: DenseParams,
}

impl LstmAutoencoder {
    pub fn init(shape: LstmShape, steps: usize, seed: u64) -> Self {
        Self {
            lstm: init_lstm(shape, derive_seed(seed, b"lstm")),
            decoder: init_dense(
                shape.output,
                steps * shape.input,
                Activation::Identity,
                derive_seed(seed, b"decoder"),
            ),
        }
    }

    /// Sequence length, i.e. rows per window.
    pub fn steps(&self) -> usize {
        self.decoder.outputs() / self.lstm.input_size().max(1)
    }

    pub fn check(&self) -> Result<()> {
        self.lstm.check()?;
        self.decoder.check()?;
        let d = self.lstm.input_size();
        if d == 0 || self.decoder.outputs() % d != 0 || self.decoder.inputs() != self.lstm.output_size() {
            return Err(Error::ModelShape(format!(
                "decoder {}->{} does not fit an lstm with input {} and output {}",
                self.decoder.inputs(),
                self.decoder.outputs(),
                d,
                self.lstm.output_size()
            )));
        }
        Ok(())
    }
}

impl ParamSet for LstmAutoencoder {
    fn tensors(&self) -> Vec<&[f64]> {
        let mut t = self.lstm.tensors();
        t.extend(self.decoder.tensors());
        t
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut t = self.lstm.tensors_mut();
        t.extend(self.decoder.tensors_mut());
        t
    }
}

impl Trainable for LstmAutoencoder {
    fn input_size(&self) -> usize {
        self.decoder.outputs()
    }

    fn output_size(&self) -> usize {
        self.decoder.outputs()
    }

    fn batch_loss_grad(&self, inputs: &[&[f64]], targets: &[&[f64]], _loss: &LossConfig, grad: &mut Self) -> f64 {
        let b = inputs.len();
        let (steps, o, n) = (self.steps(), self.lstm.output_size(), self.decoder.outputs());
        let batch = self.lstm.forward_batch(inputs);
        let mut out = vec![0.0; n];
        let (mut dz, mut scratch) = (vec![0.0; n], vec![0.0; n]);
        let mut dlast = DMatrix::zeros(o, b);
        let mut total = 0.0;
        for k in 0..b {
            let last = batch.output(steps - 1, k);
            self.decoder.forward_into(&last, &mut out);
            total += squared_error(targets[k], &out) / n as f64;

            dz.fill(0.0);
            reconstruction_loss_grad(targets[k], &out, 1.0 / b as f64, &mut dz);
            let mut dy = vec![0.0; o];
            self.decoder
                .backward_acc(&last, &out, &dz, &mut scratch, &mut grad.decoder, Some(&mut dy));
            dlast.set_column(k, &DVector::from_vec(dy));
        }
        let mut dys = vec![None; steps];
        dys[steps - 1] = Some(dlast);
        self.lstm.backward_batch(&batch, &dys, &mut grad.lstm);
        total / b as f64
    }

    fn predict(&self, input: &[f64]) -> Vec<f64> {
        let mut cache = LstmCache::default();
        self.lstm.forward_into(input, None, &mut cache);
        let mut out = vec![0.0; self.decoder.outputs()];
        self.decoder.forward_into(cache.output(self.steps() - 1), &mut out);
        out
    }
}

fn squared_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Input/target pairs for one epoch.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LoopSettings {
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: AdamConfig,
    pub loss: LossConfig,
    pub seed: u64,
}

/// Minibatch training. `epoch_data(e)` supplies the pairs for epoch `e`,
/// visited in a freshly shuffled order. Returns the mean batch loss of
/// the last epoch.
pub(crate) fn train_loop<N: Trainable>(
    net: &mut N,
    settings: LoopSettings,
    mut epoch_data: impl FnMut(usize) -> Result<Dataset>,
) -> Result<f64> {
    let mut state = OptimizerState::new(net, settings.optimizer);
    let mut rng = SeededRng::new(derive_seed(settings.seed, b"shuffle"));
    let mut grad = net.zeroed();
    let mut order = Vec::new();
    let mut last = f64::NAN;
    for epoch in 0..settings.epochs {
        let data = epoch_data(epoch)?;
        if data.inputs.is_empty() {
            return Err(Error::InvalidArgument("no training samples".into()));
        }
        order.clear();
        order.extend(0..data.inputs.len());
        rng.shuffle(&mut order);
        let (mut sum, mut batches) = (0.0, 0usize);
        for chunk in order.chunks(settings.batch_size) {
            let xs: Vec<&[f64]> = chunk.iter().map(|&i| data.inputs[i].as_slice()).collect();
            let ts: Vec<&[f64]> = chunk.iter().map(|&i| data.targets[i].as_slice()).collect();
            grad.tensors_mut().into_iter().for_each(|t| t.fill(0.0));
            let loss = net.batch_loss_grad(&xs, &ts, &settings.loss, &mut grad);
            if !loss.is_finite() {
                return Err(Error::NumericFailure(format!("training loss became {loss} in epoch {epoch}")));
            }
            optimizer_step(&mut state, net, &grad)?;
            sum += loss;
            batches += 1;
        }
        last = sum / batches as f64;
    }
    if !net.is_finite() {
        return Err(Error::NumericFailure("trained parameters are not finite".into()));
    }
    Ok(last)
}
