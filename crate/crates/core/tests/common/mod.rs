//! Reference forward passes and gradient checks shared by the test
//! targets. Everything here is recomputed from the gate and layer
//! equations, without the library's forward code.
#![allow(dead_code)]

use edae::models::{DenseAutoencoder, ElmParams, LstmAutoencoder, Trainable};
use edae::nn::gradcheck::{max_relative_error, numerical_gradient};
use edae::nn::{backward_lstm, init_lstm, lstm_forward, LossConfig, LstmParams, LstmShape, Matrix, ParamSet, Peephole};
use edae::rng::SeededRng;

pub const TOL: f64 = 1e-5;
pub const STEP: f64 = 1e-5;
pub const FLOOR: f64 = 1e-7;

pub fn sig(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn matvec(w: &Matrix, x: &[f64]) -> Vec<f64> {
    (0..w.rows())
        .map(|r| (0..w.cols()).map(|c| w.get(r, c) * x[c]).sum())
        .collect()
}

pub fn add(vs: &[&[f64]]) -> Vec<f64> {
    (0..vs[0].len()).map(|i| vs.iter().map(|v| v[i]).sum()).collect()
}

/// Reference cell recurrence, written straight from the gate equations.
pub fn reference_outputs(p: &LstmParams, xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let h = p.b_i.len();
    let (mut m, mut c) = (vec![0.0; h], vec![0.0; h]);
    let mut ys = Vec::new();
    for x in xs {
        let i: Vec<f64> = add(&[&matvec(&p.w_ix, x), &matvec(&p.w_im, &m), &matvec(&p.w_ic, &c), &p.b_i])
            .into_iter()
            .map(sig)
            .collect();
        let f: Vec<f64> = add(&[&matvec(&p.w_fx, x), &matvec(&p.w_fm, &m), &matvec(&p.w_fc, &c), &p.b_f])
            .into_iter()
            .map(sig)
            .collect();
        let g: Vec<f64> = add(&[&matvec(&p.w_cx, x), &matvec(&p.w_cm, &m), &p.b_c])
            .into_iter()
            .map(f64::tanh)
            .collect();
        let c_new: Vec<f64> = (0..h).map(|k| f[k] * c[k] + i[k] * g[k]).collect();
        let o: Vec<f64> = add(&[&matvec(&p.w_ox, x), &matvec(&p.w_om, &m), &matvec(&p.w_oc, &c_new), &p.b_o])
            .into_iter()
            .map(sig)
            .collect();
        m = (0..h).map(|k| o[k] * c_new[k].tanh()).collect();
        c = c_new;
        ys.push(add(&[&matvec(&p.w_ym, &m), &p.b_y]));
    }
    ys
}

pub fn random_seq(steps: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = SeededRng::new(seed);
    (0..steps).map(|_| (0..d).map(|_| rng.uniform_in(-1.0, 1.0)).collect()).collect()
}

/// Zeroes the off-diagonal entries of the peephole gradients, the only
/// entries a diagonal cell may move.
pub fn project_diagonal(p: &mut LstmParams) {
    for m in [&mut p.w_ic, &mut p.w_fc, &mut p.w_oc] {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if r != c {
                    m.set(r, c, 0.0);
                }
            }
        }
    }
}

pub fn kl(rho: f64, mean: f64) -> f64 {
    rho * (rho / mean).ln() + (1.0 - rho) * ((1.0 - rho) / (1.0 - mean)).ln()
}

/// Mean per-sample MSE plus β Σ_j KL(ρ_s ‖ mean_b h_bj).
pub fn dense_reference_loss(net: &DenseAutoencoder, inputs: &[Vec<f64>], targets: &[Vec<f64>], cfg: &LossConfig) -> f64 {
    let enc = &net.encoder;
    let dec = &net.decoder;
    let mut hidden = Vec::new();
    let mut mse = 0.0;
    for (x, t) in inputs.iter().zip(targets) {
        let h: Vec<f64> = add(&[&matvec(&enc.weights, x), &enc.bias]).into_iter().map(sig).collect();
        let z = add(&[&matvec(&dec.weights, &h), &dec.bias]);
        mse += z.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / z.len() as f64;
        hidden.push(h);
    }
    let b = inputs.len() as f64;
    let units = hidden[0].len();
    let penalty: f64 = (0..units)
        .map(|j| kl(cfg.sparsity_target, hidden.iter().map(|h| h[j]).sum::<f64>() / b))
        .sum();
    mse / b + cfg.sparsity_weight * penalty
}

pub fn lstm_autoencoder_reference_loss(net: &LstmAutoencoder, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> f64 {
    let d = net.lstm.input_size();
    let mut total = 0.0;
    for (x, t) in inputs.iter().zip(targets) {
        let rows: Vec<Vec<f64>> = x.chunks(d).map(<[f64]>::to_vec).collect();
        let last = reference_outputs(&net.lstm, &rows).pop().unwrap();
        let z = add(&[&matvec(&net.decoder.weights, &last), &net.decoder.bias]);
        total += z.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / z.len() as f64;
    }
    total / inputs.len() as f64
}

/// Worst relative error of the cell gradients, D=3, H=4, O=2, 5 steps.
pub fn lstm_gradient_error(peephole: Peephole) -> f64 {
    let p = init_lstm(LstmShape::new(3, 4, 2).with_peephole(peephole), 11);
    assert!(p.flatten().len() <= 200);
    let xs = random_seq(5, 3, 3);
    let targets = random_seq(5, 2, 4);

    // Loss: ½ Σ_n ‖y_n − t_n‖², so dL/dy_n = y_n − t_n.
    let loss = |q: &LstmParams| -> f64 {
        reference_outputs(q, &xs)
            .iter()
            .zip(&targets)
            .map(|(y, t)| y.iter().zip(t).map(|(a, b)| 0.5 * (a - b) * (a - b)).sum::<f64>())
            .sum()
    };
    let fwd = lstm_forward(&p, &xs).unwrap();
    for (a, b) in fwd.outputs.iter().zip(reference_outputs(&p, &xs)) {
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
    }
    let dys: Vec<Vec<f64>> = fwd
        .outputs
        .iter()
        .zip(&targets)
        .map(|(y, t)| y.iter().zip(t).map(|(a, b)| a - b).collect())
        .collect();
    let analytic = backward_lstm(&p, &fwd.cache, &dys).unwrap().params;
    let mut numeric = numerical_gradient(&p, STEP, loss);
    if peephole == Peephole::Diagonal {
        project_diagonal(&mut numeric);
    }
    max_relative_error(&analytic, &numeric, FLOOR)
}

/// Worst relative error of the dense autoencoder gradients, sparsity included.
pub fn dense_gradient_error() -> f64 {
    let net = DenseAutoencoder::init(6, 5, 2);
    assert!(net.flatten().len() <= 200);
    let inputs = random_seq(7, 6, 8);
    let targets = random_seq(7, 6, 9);
    // A large weight makes the penalty gradient visible next to the MSE.
    let cfg = LossConfig {
        sparsity_weight: 0.5,
        sparsity_target: 0.05,
    };
    let xs: Vec<&[f64]> = inputs.iter().map(Vec::as_slice).collect();
    let ts: Vec<&[f64]> = targets.iter().map(Vec::as_slice).collect();
    let mut analytic = net.zeroed();
    let loss = net.batch_loss_grad(&xs, &ts, &cfg, &mut analytic);
    let reference = dense_reference_loss(&net, &inputs, &targets, &cfg);
    assert!((loss - reference).abs() < 1e-12 * reference.abs().max(1.0));
    let numeric = numerical_gradient(&net, STEP, |q| dense_reference_loss(q, &inputs, &targets, &cfg));
    max_relative_error(&analytic, &numeric, FLOOR)
}

/// Worst relative error of the LSTM autoencoder gradients.
pub fn lstm_autoencoder_gradient_error(peephole: Peephole) -> f64 {
    let net = LstmAutoencoder::init(LstmShape::new(1, 3, 2).with_peephole(peephole), 5, 3);
    assert!(net.flatten().len() <= 200);
    let inputs = random_seq(4, 5, 12);
    let targets = random_seq(4, 5, 13);
    let xs: Vec<&[f64]> = inputs.iter().map(Vec::as_slice).collect();
    let ts: Vec<&[f64]> = targets.iter().map(Vec::as_slice).collect();
    let mut analytic = net.zeroed();
    let loss = net.batch_loss_grad(&xs, &ts, &LossConfig::default(), &mut analytic);
    assert!((loss - lstm_autoencoder_reference_loss(&net, &inputs, &targets)).abs() < 1e-12);
    let mut numeric = numerical_gradient(&net, STEP, |q| lstm_autoencoder_reference_loss(q, &inputs, &targets));
    if peephole == Peephole::Diagonal {
        project_diagonal(&mut numeric.lstm);
    }
    max_relative_error(&analytic, &numeric, FLOOR)
}

/// `‖(HᵀH + λI)W − HᵀT‖_F / ‖HᵀT‖_F`, with `H` rebuilt from the stored
/// hidden layer.
pub fn ridge_residual(elm: &ElmParams, x: &[Vec<f64>], t: &[Vec<f64>]) -> f64 {
    let (w_in, bias, w_out, ridge) = (
        elm.hidden_weights.to_rows(),
        &elm.hidden_bias,
        elm.output_weights.to_rows(),
        elm.ridge,
    );
    let hidden = bias.len();
    let outs = w_out[0].len();
    let h: Vec<Vec<f64>> = x
        .iter()
        .map(|xi| {
            (0..hidden)
                .map(|j| {
                    let a: f64 = bias[j] + w_in[j].iter().zip(xi).map(|(w, v)| w * v).sum::<f64>();
                    1.0 / (1.0 + (-a).exp())
                })
                .collect()
        })
        .collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..hidden {
        for o in 0..outs {
            let rhs: f64 = h.iter().zip(t).map(|(hi, ti)| hi[j] * ti[o]).sum();
            let mut lhs = ridge * w_out[j][o];
            for k in 0..hidden {
                let g: f64 = h.iter().map(|hi| hi[j] * hi[k]).sum();
                lhs += g * w_out[k][o];
            }
            num += (lhs - rhs) * (lhs - rhs);
            den += rhs * rhs;
        }
    }
    (num / den).sqrt()
}
