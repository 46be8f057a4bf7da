use std::f64::consts::PI;

use super::params::ModelParams;

/// Cosine-annealed rate for step `t` of `total`: `lr` at the first step, 0 at
/// the last.
pub fn cosine_lr(lr: f64, t: usize, total: usize) -> f64 {
    if total <= 1 {
        return lr;
    }
    lr * 0.5 * (1.0 + (PI * t as f64 / (total - 1) as f64).cos())
}

/// Adam with decoupled weight decay.
#[derive(Debug, Clone)]
pub struct AdamW {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl AdamW {
    pub fn new(params: &ModelParams, weight_decay: f64) -> Self {
        let zeros: Vec<Vec<f64>> = params.named().iter().map(|t| vec![0.0; t.data.len()]).collect();
        AdamW { beta1: 0.9, beta2: 0.999, eps: 1e-8, weight_decay, step: 0, m: zeros.clone(), v: zeros }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, params: &mut ModelParams, grads: &mut ModelParams, lr: f64) {
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        let (b1, b2) = (self.beta1, self.beta2);
        for (((p, g), m), v) in params.slices_mut().into_iter().zip(grads.slices_mut()).zip(&mut self.m).zip(&mut self.v) {
            for i in 0..p.len() {
                p[i] -= lr * self.weight_decay * p[i];
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let mhat = m[i] / bc1;
                let vhat = v[i] / bc2;
                p[i] -= lr * mhat / (vhat.sqrt() + self.eps);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_endpoints() {
        assert_eq!(cosine_lr(0.01, 0, 100), 0.01);
        assert!(cosine_lr(0.01, 99, 100) <= 0.01 * 1e-3);
        assert!((cosine_lr(0.01, 50, 101) - 0.005).abs() < 1e-15);
        assert_eq!(cosine_lr(0.01, 0, 1), 0.01);
    }

    #[test]
    fn first_step_moves_by_lr_times_sign() {
        // with bias correction the first Adam step is lr·g/(|g| + ε)
        let mut p = ModelParams::init(3, 4, 4, 1, 0);
        let before = p.clone();
        let mut g = p.zeros_like();
        g.out2.bias.fill(2.0);
        let mut opt = AdamW::new(&p, 0.0);
        opt.step(&mut p, &mut g, 0.1);
        for (a, b) in p.out2.bias.iter().zip(&before.out2.bias) {
            assert!((b - a - 0.1 * 2.0 / (2.0 + 1e-8)).abs() < 1e-12);
        }
        assert_eq!(p.in1, before.in1);
    }

    #[test]
    fn decay_is_decoupled() {
        let mut p = ModelParams::init(3, 4, 4, 1, 0);
        let before = p.clone();
        let mut g = p.zeros_like();
        let mut opt = AdamW::new(&p, 0.5);
        opt.step(&mut p, &mut g, 0.1);
        for (a, b) in p.in1.weight.iter().zip(&before.in1.weight) {
            assert!((a - b * 0.95).abs() < 1e-15);
        }
    }
}
