//! Forward and backward passes.
//!
//! A batch is a stack of teacher-forced input rows from several sequences,
//! `lengths[b]` consecutive rows per sequence. The two MLPs and their batch
//! norms act on all rows jointly; the GRU restarts from a zero state at
//! every sequence boundary.

use ndarray::{Array1, Array2, Axis};

use super::params::{BatchNorm, GruLayer, ModelParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    /// Batch statistics; gradients flow through them.
    Train,
    /// Running statistics.
    Eval,
}

#[derive(Debug, Clone)]
struct NormCache {
    xhat: Array2<f64>,
    inv_std: Array1<f64>,
    mean: Array1<f64>,
    var: Array1<f64>,
}

#[derive(Debug, Clone)]
struct GruCache {
    input: Array2<f64>,
    h_prev: Array2<f64>,
    r: Array2<f64>,
    z: Array2<f64>,
    n: Array2<f64>,
    /// `W_hn h + b_hn`, needed for the reset-gate gradient.
    ghn: Array2<f64>,
}

/// Output of [`ModelParams::forward`] plus what the backward pass needs.
#[derive(Debug, Clone)]
pub struct Forward {
    pub logits: Array2<f64>,
    mode: NormMode,
    lengths: Vec<usize>,
    x: Array2<f64>,
    in_norm: NormCache,
    a1: Array2<f64>,
    gru: Vec<GruCache>,
    top: Array2<f64>,
    out_norm: NormCache,
    a3: Array2<f64>,
}

impl Forward {
    /// Rows the batch norms were computed over.
    pub fn rows(&self) -> usize {
        self.x.nrows()
    }
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `−log p(y | σ(ℓ))`, stable for large `|ℓ|`.
#[inline]
pub(crate) fn bce_entry(logit: f64, target: f64) -> f64 {
    logit.max(0.0) - logit * target + (-logit.abs()).exp().ln_1p()
}

/// Mean binary cross entropy with logits over every entry.
pub fn loss_bce(logits: &Array2<f64>, targets: &Array2<f64>) -> f64 {
    assert_eq!(logits.dim(), targets.dim());
    let total: f64 = logits.iter().zip(targets).map(|(&l, &y)| bce_entry(l, y)).sum();
    total / logits.len() as f64
}

/// Gradient of [`loss_bce`] with respect to the logits.
pub fn loss_bce_grad(logits: &Array2<f64>, targets: &Array2<f64>) -> Array2<f64> {
    let scale = 1.0 / logits.len() as f64;
    let mut g = logits.mapv(sigmoid);
    g -= targets;
    g *= scale;
    g
}

fn relu(x: &Array2<f64>) -> Array2<f64> {
    x.mapv(|v| v.max(0.0))
}

fn norm_forward(bn: &BatchNorm, z: &Array2<f64>, mode: NormMode) -> (Array2<f64>, NormCache) {
    let (mean, var) = match mode {
        NormMode::Train => {
            let mean = z.mean_axis(Axis(0)).expect("batch has rows");
            let centered = z - &mean;
            let var = (&centered * &centered).mean_axis(Axis(0)).expect("batch has rows");
            (mean, var)
        }
        NormMode::Eval => (bn.running_mean.clone(), bn.running_var.clone()),
    };
    let inv_std = var.mapv(|v| 1.0 / (v + BatchNorm::EPS).sqrt());
    let xhat = (z - &mean) * &inv_std;
    let y = &xhat * &bn.gamma + &bn.beta;
    (y, NormCache { xhat, inv_std, mean, var })
}

/// Train-mode batch-norm backward; accumulates into `grad` and returns the
/// gradient with respect to the pre-norm input.
fn norm_backward(bn: &BatchNorm, cache: &NormCache, dy: &Array2<f64>, grad: &mut BatchNorm) -> Array2<f64> {
    let n = dy.nrows() as f64;
    grad.gamma += &(dy * &cache.xhat).sum_axis(Axis(0));
    grad.beta += &dy.sum_axis(Axis(0));
    let dxhat = dy * &bn.gamma;
    let sum_dxhat = dxhat.sum_axis(Axis(0));
    let sum_dxhat_xhat = (&dxhat * &cache.xhat).sum_axis(Axis(0));
    let mut dz = &dxhat * n - &sum_dxhat - &cache.xhat * &sum_dxhat_xhat;
    dz *= &(&cache.inv_std / n);
    dz
}

/// One GRU step. `gi` is the input projection `W_ih x + b_ih`; `gh` is
/// scratch of length `3h` and ends up holding `W_hh h + b_hh`. Writes the
/// new state into `next` and returns nothing else; gate values are written
/// into `gates` (r, z, n) when given.
fn gru_cell(
    layer: &GruLayer,
    gi: &[f64],
    state: &[f64],
    gh: &mut [f64],
    next: &mut [f64],
    mut gates: Option<(&mut [f64], &mut [f64], &mut [f64])>,
) {
    let h = state.len();
    let whh = layer.w_hh.as_slice().expect("contiguous");
    let bhh = layer.b_hh.as_slice().expect("contiguous");
    for (k, g) in gh.iter_mut().enumerate() {
        let row = &whh[k * h..(k + 1) * h];
        *g = bhh[k] + row.iter().zip(state).map(|(w, s)| w * s).sum::<f64>();
    }
    for j in 0..h {
        let r = sigmoid(gi[j] + gh[j]);
        let z = sigmoid(gi[h + j] + gh[h + j]);
        let n = (gi[2 * h + j] + r * gh[2 * h + j]).tanh();
        next[j] = (1.0 - z) * n + z * state[j];
        if let Some((gr, gz, gn)) = gates.as_mut() {
            gr[j] = r;
            gz[j] = z;
            gn[j] = n;
        }
    }
}

fn gru_forward(layer: &GruLayer, input: &Array2<f64>, lengths: &[usize]) -> (Array2<f64>, GruCache) {
    let h = layer.hidden();
    let rows = input.nrows();
    let gi = input.dot(&layer.w_ih.t()) + &layer.b_ih;
    let mut out = Array2::zeros((rows, h));
    let mut h_prev = Array2::zeros((rows, h));
    let mut r = Array2::zeros((rows, h));
    let mut z = Array2::zeros((rows, h));
    let mut n = Array2::zeros((rows, h));
    let mut ghn = Array2::zeros((rows, h));
    let mut gh = vec![0.0; 3 * h];
    let mut state = vec![0.0; h];
    let mut next = vec![0.0; h];
    let mut start = 0;
    for &len in lengths {
        state.fill(0.0);
        for t in start..start + len {
            h_prev.row_mut(t).as_slice_mut().expect("contiguous").copy_from_slice(&state);
            let gates = (
                r.row_mut(t).into_slice().expect("contiguous"),
                z.row_mut(t).into_slice().expect("contiguous"),
                n.row_mut(t).into_slice().expect("contiguous"),
            );
            gru_cell(layer, gi.row(t).as_slice().expect("contiguous"), &state, &mut gh, &mut next, Some(gates));
            ghn.row_mut(t).as_slice_mut().expect("contiguous").copy_from_slice(&gh[2 * h..]);
            std::mem::swap(&mut state, &mut next);
            out.row_mut(t).as_slice_mut().expect("contiguous").copy_from_slice(&state);
        }
        start += len;
    }
    (out, GruCache { input: input.clone(), h_prev, r, z, n, ghn })
}

/// Backpropagation through time for one layer. Accumulates parameter
/// gradients into `grad` and returns the gradient for the layer input.
fn gru_backward(layer: &GruLayer, cache: &GruCache, d_out: &Array2<f64>, lengths: &[usize], grad: &mut GruLayer) -> Array2<f64> {
    let h = layer.hidden();
    let rows = d_out.nrows();
    let whh = layer.w_hh.as_slice().expect("contiguous");
    let mut dgi = Array2::zeros((rows, 3 * h));
    let mut dgh = Array2::zeros((rows, 3 * h));
    let mut dh = vec![0.0; h];
    let mut dh_next = vec![0.0; h];
    let mut start = 0;
    for &len in lengths {
        dh_next.fill(0.0);
        for t in (start..start + len).rev() {
            for j in 0..h {
                dh[j] = d_out[[t, j]] + dh_next[j];
            }
            for j in 0..h {
                let (r, z, n) = (cache.r[[t, j]], cache.z[[t, j]], cache.n[[t, j]]);
                let hp = cache.h_prev[[t, j]];
                let dn = dh[j] * (1.0 - z);
                let dz = dh[j] * (hp - n);
                let dan = dn * (1.0 - n * n);
                let dar = dan * cache.ghn[[t, j]] * r * (1.0 - r);
                let daz = dz * z * (1.0 - z);
                dgi[[t, j]] = dar;
                dgi[[t, h + j]] = daz;
                dgi[[t, 2 * h + j]] = dan;
                dgh[[t, j]] = dar;
                dgh[[t, h + j]] = daz;
                dgh[[t, 2 * h + j]] = dan * r;
                dh_next[j] = dh[j] * z;
            }
            for k in 0..3 * h {
                let g = dgh[[t, k]];
                if g != 0.0 {
                    let row = &whh[k * h..(k + 1) * h];
                    for j in 0..h {
                        dh_next[j] += g * row[j];
                    }
                }
            }
        }
        start += len;
    }
    grad.w_ih += &dgi.t().dot(&cache.input);
    grad.b_ih += &dgi.sum_axis(Axis(0));
    grad.w_hh += &dgh.t().dot(&cache.h_prev);
    grad.b_hh += &dgh.sum_axis(Axis(0));
    dgi.dot(&layer.w_ih)
}

impl ModelParams {
    /// Teacher-forced pass: row `t` of `x` yields the logits for row `t + 1`
    /// of its sequence.
    pub fn forward(&self, x: &Array2<f64>, lengths: &[usize], mode: NormMode) -> Result<Forward> {
        if x.ncols() != self.row_width() {
            return Err(Error::Input(format!(
                "input rows have {} columns, model expects {}",
                x.ncols(),
                self.row_width()
            )));
        }
        if lengths.iter().sum::<usize>() != x.nrows() || x.nrows() == 0 {
            return Err(Error::Input("sequence lengths do not cover the input rows".into()));
        }
        let z1 = self.in1.forward(x);
        let (y1, in_norm) = norm_forward(&self.in_bn, &z1, mode);
        let a1 = relu(&y1);
        let mut seq = self.in2.forward(&a1);
        let mut gru = Vec::with_capacity(self.gru.len());
        for layer in &self.gru {
            let (out, cache) = gru_forward(layer, &seq, lengths);
            gru.push(cache);
            seq = out;
        }
        let z3 = self.out1.forward(&seq);
        let (y3, out_norm) = norm_forward(&self.out_bn, &z3, mode);
        let a3 = relu(&y3);
        let logits = self.out2.forward(&a3);
        Ok(Forward {
            logits,
            mode,
            lengths: lengths.to_vec(),
            x: x.clone(),
            in_norm,
            a1,
            gru,
            top: seq,
            out_norm,
            a3,
        })
    }

    /// Gradients of a loss with respect to every trainable tensor, given the
    /// loss gradient at the logits. Only valid for train-mode passes.
    pub fn backward(&self, fwd: &Forward, d_logits: &Array2<f64>) -> ModelParams {
        assert_eq!(fwd.mode, NormMode::Train, "backward needs a train-mode forward pass");
        let mut g = self.zeros_like();
        g.out2.weight += &d_logits.t().dot(&fwd.a3);
        g.out2.bias += &d_logits.sum_axis(Axis(0));
        let mut d = d_logits.dot(&self.out2.weight);
        d.zip_mut_with(&fwd.a3, |dv, &a| if a <= 0.0 { *dv = 0.0 });
        let d = norm_backward(&self.out_bn, &fwd.out_norm, &d, &mut g.out_bn);
        g.out1.weight += &d.t().dot(&fwd.top);
        g.out1.bias += &d.sum_axis(Axis(0));
        let mut d = d.dot(&self.out1.weight);
        for (l, layer) in self.gru.iter().enumerate().rev() {
            d = gru_backward(layer, &fwd.gru[l], &d, &fwd.lengths, &mut g.gru[l]);
        }
        g.in2.weight += &d.t().dot(&fwd.a1);
        g.in2.bias += &d.sum_axis(Axis(0));
        let mut d = d.dot(&self.in2.weight);
        d.zip_mut_with(&fwd.a1, |dv, &a| if a <= 0.0 { *dv = 0.0 });
        let d = norm_backward(&self.in_bn, &fwd.in_norm, &d, &mut g.in_bn);
        g.in1.weight += &d.t().dot(&fwd.x);
        g.in1.bias += &d.sum_axis(Axis(0));
        g
    }

    /// Moves the running norm statistics toward the batch statistics of a
    /// train-mode pass.
    pub fn update_norm_stats(&mut self, fwd: &Forward) {
        if fwd.mode != NormMode::Train {
            return;
        }
        let rows = fwd.rows();
        self.in_bn.update_running(&fwd.in_norm.mean, &fwd.in_norm.var, rows);
        self.out_bn.update_running(&fwd.out_norm.mean, &fwd.out_norm.var, rows);
    }

    pub fn initial_state(&self) -> Vec<Vec<f64>> {
        vec![vec![0.0; self.hidden()]; self.gru.len()]
    }

    /// Eval-mode single step for autoregressive decoding: consumes one row,
    /// advances `state`, returns the logits for the next row.
    pub fn step(&self, row: &[f64], state: &mut [Vec<f64>]) -> Vec<f64> {
        let x = Array2::from_shape_vec((1, row.len()), row.to_vec()).expect("one row");
        let (y1, _) = norm_forward(&self.in_bn, &self.in1.forward(&x), NormMode::Eval);
        let mut v = self.in2.forward(&relu(&y1)).into_raw_vec_and_offset().0;
        let h = self.hidden();
        let mut gh = vec![0.0; 3 * h];
        let mut next = vec![0.0; h];
        for (layer, s) in self.gru.iter().zip(state.iter_mut()) {
            let vin = Array1::from(v);
            let gi = layer.w_ih.dot(&vin) + &layer.b_ih;
            gru_cell(layer, gi.as_slice().expect("contiguous"), s, &mut gh, &mut next, None);
            s.copy_from_slice(&next);
            v = s.clone();
        }
        let top = Array2::from_shape_vec((1, h), v).expect("one row");
        let (y3, _) = norm_forward(&self.out_bn, &self.out1.forward(&top), NormMode::Eval);
        self.out2.forward(&relu(&y3)).into_raw_vec_and_offset().0
    }
}

/// Finite-difference comparison for one trainable tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    pub name: String,
    pub max_abs_diff: f64,
    /// Largest magnitude among analytic and numeric entries.
    pub scale: f64,
    /// `max_abs_diff / max(scale, GRAD_CHECK_FLOOR)`.
    pub rel_error: f64,
}

/// Gradient magnitudes below this are indistinguishable from differencing
/// noise (biases feeding a batch norm have an exactly zero gradient).
pub const GRAD_CHECK_FLOOR: f64 = 1e-6;

/// Compares the analytic gradient of the train-mode BCE loss with central
/// differences of step `eps` on every entry of every trainable tensor.
pub fn gradient_check(
    params: &ModelParams,
    x: &Array2<f64>,
    targets: &Array2<f64>,
    lengths: &[usize],
    eps: f64,
) -> Result<Vec<GradCheck>> {
    let loss = |q: &ModelParams| -> Result<f64> { Ok(loss_bce(&q.forward(x, lengths, NormMode::Train)?.logits, targets)) };
    let f = params.forward(x, lengths, NormMode::Train)?;
    let mut grads = params.backward(&f, &loss_bce_grad(&f.logits, targets));
    let analytic: Vec<Vec<f64>> = grads.slices_mut().iter().map(|s| s.to_vec()).collect();
    let names: Vec<String> = params.named().into_iter().map(|t| t.name).collect();
    let mut out = Vec::with_capacity(names.len());
    for (ti, (a, name)) in analytic.iter().zip(names).enumerate() {
        let mut numeric = vec![0.0; a.len()];
        for (k, slot) in numeric.iter_mut().enumerate() {
            let mut plus = params.clone();
            plus.slices_mut()[ti][k] += eps;
            let mut minus = params.clone();
            minus.slices_mut()[ti][k] -= eps;
            *slot = (loss(&plus)? - loss(&minus)?) / (2.0 * eps);
        }
        let max_abs_diff = a.iter().zip(&numeric).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let scale = a.iter().chain(&numeric).map(|x| x.abs()).fold(0.0, f64::max);
        out.push(GradCheck { name, max_abs_diff, scale, rel_error: max_abs_diff / scale.max(GRAD_CHECK_FLOOR) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng as _;

    fn random_batch(d: usize, lengths: &[usize], seed: u64) -> (Array2<f64>, Array2<f64>) {
        let mut r = rng::seeded(seed);
        let rows: usize = lengths.iter().sum();
        let x = Array2::from_shape_fn((rows, d), |_| (r.random::<f64>() < 0.4) as u8 as f64);
        let y = Array2::from_shape_fn((rows, d), |_| (r.random::<f64>() < 0.4) as u8 as f64);
        (x, y)
    }

    #[test]
    fn bce_examples() {
        let zeros = Array2::zeros((3, 4));
        let targets = Array2::from_shape_fn((3, 4), |(i, j)| ((i + j) % 2) as f64);
        assert!((loss_bce(&zeros, &targets) - 2f64.ln()).abs() < 1e-15);
        let big = Array2::from_elem((2, 2), 1e9);
        assert!(loss_bce(&big, &Array2::ones((2, 2))) < 1e-12);
    }

    #[test]
    fn bce_matches_naive_sum() {
        let mut r = rng::seeded(5);
        let l: Array2<f64> = Array2::from_shape_fn((5, 3), |_| r.random_range(-4.0..4.0));
        let y = Array2::from_shape_fn((5, 3), |_| (r.random::<f64>() < 0.5) as u8 as f64);
        let mut total = 0.0;
        for (&li, &yi) in l.iter().zip(&y) {
            let p: f64 = 1.0 / (1.0 + (-li).exp());
            total -= yi * p.ln() + (1.0 - yi) * (1.0 - p).ln();
        }
        assert!((loss_bce(&l, &y) - total / 15.0).abs() < 1e-12);
    }

    #[test]
    fn zero_params_give_half_probabilities() {
        let p = ModelParams::init(4, 6, 5, 2, 0).zeros_like();
        let (x, _) = random_batch(4, &[3, 2], 1);
        for mode in [NormMode::Train, NormMode::Eval] {
            let f = p.forward(&x, &[3, 2], mode).unwrap();
            assert!(f.logits.iter().all(|&l| l == 0.0));
        }
    }

    #[test]
    fn eval_mode_is_batch_size_invariant() {
        let p = ModelParams::init(4, 6, 5, 2, 2);
        let (x, _) = random_batch(4, &[3, 4, 2], 3);
        let all = p.forward(&x, &[3, 4, 2], NormMode::Eval).unwrap();
        let mid = x.slice(ndarray::s![3..7, ..]).to_owned();
        let single = p.forward(&mid, &[4], NormMode::Eval).unwrap();
        for (a, b) in all.logits.slice(ndarray::s![3..7, ..]).iter().zip(&single.logits) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn step_matches_teacher_forced_pass() {
        let p = ModelParams::init(5, 6, 4, 2, 7);
        let (x, _) = random_batch(5, &[6], 8);
        let full = p.forward(&x, &[6], NormMode::Eval).unwrap();
        let mut state = p.initial_state();
        for t in 0..6 {
            let l = p.step(x.row(t).as_slice().unwrap(), &mut state);
            for (a, b) in l.iter().zip(full.logits.row(t)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        for (layers, seed) in [(1, 11u64), (2, 12)] {
            let p = ModelParams::init(3, 5, 4, layers, seed);
            let lengths = [4, 3];
            let (x, y) = random_batch(3, &lengths, seed + 100);
            for c in gradient_check(&p, &x, &y, &lengths, 1e-5).unwrap() {
                assert!(c.rel_error < 1e-4, "layers {layers}: {c:?}");
                if c.scale > GRAD_CHECK_FLOOR {
                    assert!(c.rel_error < 1e-6, "layers {layers}: {c:?}");
                }
            }
        }
    }
}
