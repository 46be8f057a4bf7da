use ndarray::{Array1, Array2};
use rand::Rng as _;

use crate::rng::{self, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    /// `(out, in)`.
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Linear {
    fn init(out: usize, inp: usize, rng: &mut Rng) -> Self {
        let bound = 1.0 / (inp as f64).sqrt();
        Linear {
            weight: Array2::from_shape_fn((out, inp), |_| rng.random_range(-bound..bound)),
            bias: Array1::from_shape_fn(out, |_| rng.random_range(-bound..bound)),
        }
    }

    fn zeros(out: usize, inp: usize) -> Self {
        Linear { weight: Array2::zeros((out, inp)), bias: Array1::zeros(out) }
    }

    pub fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        x.dot(&self.weight.t()) + &self.bias
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchNorm {
    pub gamma: Array1<f64>,
    pub beta: Array1<f64>,
    pub running_mean: Array1<f64>,
    pub running_var: Array1<f64>,
}

impl BatchNorm {
    pub const EPS: f64 = 1e-5;
    pub const MOMENTUM: f64 = 0.1;

    fn new(dim: usize) -> Self {
        BatchNorm {
            gamma: Array1::ones(dim),
            beta: Array1::zeros(dim),
            running_mean: Array1::zeros(dim),
            running_var: Array1::ones(dim),
        }
    }

    /// Folds batch statistics (biased variance over `count` rows) into the
    /// running averages; the running variance is unbiased.
    pub fn update_running(&mut self, mean: &Array1<f64>, var: &Array1<f64>, count: usize) {
        let m = Self::MOMENTUM;
        let unbias = if count > 1 { count as f64 / (count - 1) as f64 } else { 1.0 };
        self.running_mean = &self.running_mean * (1.0 - m) + mean * m;
        self.running_var = &self.running_var * (1.0 - m) + var * (m * unbias);
    }
}

/// One GRU layer, gates stacked as reset, update, candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct GruLayer {
    /// `(3h, in)`.
    pub w_ih: Array2<f64>,
    /// `(3h, h)`.
    pub w_hh: Array2<f64>,
    pub b_ih: Array1<f64>,
    pub b_hh: Array1<f64>,
}

impl GruLayer {
    fn init(inp: usize, h: usize, rng: &mut Rng) -> Self {
        let bound = 1.0 / (h as f64).sqrt();
        let mut u = |_| rng.random_range(-bound..bound);
        GruLayer {
            w_ih: Array2::from_shape_fn((3 * h, inp), |_| u(())),
            w_hh: Array2::from_shape_fn((3 * h, h), |_| u(())),
            b_ih: Array1::from_shape_fn(3 * h, |_| u(())),
            b_hh: Array1::from_shape_fn(3 * h, |_| u(())),
        }
    }

    fn zeros(inp: usize, h: usize) -> Self {
        GruLayer {
            w_ih: Array2::zeros((3 * h, inp)),
            w_hh: Array2::zeros((3 * h, h)),
            b_ih: Array1::zeros(3 * h),
            b_hh: Array1::zeros(3 * h),
        }
    }

    pub fn hidden(&self) -> usize {
        self.w_hh.ncols()
    }
}

/// `Linear(d→m) → BatchNorm → ReLU → Linear(m→h) → GRU^L → Linear(h→m) →
/// BatchNorm → ReLU → Linear(m→d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub in1: Linear,
    pub in_bn: BatchNorm,
    pub in2: Linear,
    pub gru: Vec<GruLayer>,
    pub out1: Linear,
    pub out_bn: BatchNorm,
    pub out2: Linear,
}

/// A trainable tensor viewed by name.
#[derive(Debug, Clone, PartialEq)]
pub struct Named<'a> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: &'a [f64],
}

fn flat1(a: &Array1<f64>) -> &[f64] {
    a.as_slice().expect("parameter arrays are contiguous")
}

fn flat2(a: &Array2<f64>) -> &[f64] {
    a.as_slice().expect("parameter arrays are contiguous")
}

impl ModelParams {
    pub fn init(d: usize, mlp: usize, hidden: usize, layers: usize, seed: u64) -> Self {
        let mut rng = rng::seeded(seed);
        let in1 = Linear::init(mlp, d, &mut rng);
        let in2 = Linear::init(hidden, mlp, &mut rng);
        let gru = (0..layers).map(|_| GruLayer::init(hidden, hidden, &mut rng)).collect();
        let out1 = Linear::init(mlp, hidden, &mut rng);
        let out2 = Linear::init(d, mlp, &mut rng);
        ModelParams { in1, in_bn: BatchNorm::new(mlp), in2, gru, out1, out_bn: BatchNorm::new(mlp), out2 }
    }

    /// Same shapes, every trainable entry zero and norm stats at their
    /// initial values.
    pub fn zeros_like(&self) -> Self {
        let (d, mlp, h) = (self.row_width(), self.mlp_hidden(), self.hidden());
        let mut z = ModelParams {
            in1: Linear::zeros(mlp, d),
            in_bn: BatchNorm::new(mlp),
            in2: Linear::zeros(h, mlp),
            gru: self.gru.iter().map(|_| GruLayer::zeros(h, h)).collect(),
            out1: Linear::zeros(mlp, h),
            out_bn: BatchNorm::new(mlp),
            out2: Linear::zeros(d, mlp),
        };
        z.in_bn.gamma.fill(0.0);
        z.out_bn.gamma.fill(0.0);
        z
    }

    pub fn row_width(&self) -> usize {
        self.in1.weight.ncols()
    }

    pub fn mlp_hidden(&self) -> usize {
        self.in1.weight.nrows()
    }

    pub fn hidden(&self) -> usize {
        self.in2.weight.nrows()
    }

    /// Trainable tensors in a fixed order.
    pub fn named(&self) -> Vec<Named<'_>> {
        fn push2(name: String, a: &Array2<f64>) -> Named<'_> {
            Named { name, shape: a.shape().to_vec(), data: flat2(a) }
        }
        fn push1(name: String, a: &Array1<f64>) -> Named<'_> {
            Named { name, shape: a.shape().to_vec(), data: flat1(a) }
        }
        let mut items = vec![
            push2("input.0.weight".into(), &self.in1.weight),
            push1("input.0.bias".into(), &self.in1.bias),
            push1("input.bn.gamma".into(), &self.in_bn.gamma),
            push1("input.bn.beta".into(), &self.in_bn.beta),
            push2("input.1.weight".into(), &self.in2.weight),
            push1("input.1.bias".into(), &self.in2.bias),
        ];
        for (l, g) in self.gru.iter().enumerate() {
            items.push(push2(format!("gru.{l}.w_ih"), &g.w_ih));
            items.push(push2(format!("gru.{l}.w_hh"), &g.w_hh));
            items.push(push1(format!("gru.{l}.b_ih"), &g.b_ih));
            items.push(push1(format!("gru.{l}.b_hh"), &g.b_hh));
        }
        items.extend([
            push2("output.0.weight".into(), &self.out1.weight),
            push1("output.0.bias".into(), &self.out1.bias),
            push1("output.bn.gamma".into(), &self.out_bn.gamma),
            push1("output.bn.beta".into(), &self.out_bn.beta),
            push2("output.1.weight".into(), &self.out2.weight),
            push1("output.1.bias".into(), &self.out2.bias),
        ]);
        items
    }

    /// Trainable tensors as mutable flat slices, in the order of [`Self::named`].
    pub fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        fn s1(a: &mut Array1<f64>) -> &mut [f64] {
            a.as_slice_mut().expect("parameter arrays are contiguous")
        }
        fn s2(a: &mut Array2<f64>) -> &mut [f64] {
            a.as_slice_mut().expect("parameter arrays are contiguous")
        }
        let mut out: Vec<&mut [f64]> = vec![
            s2(&mut self.in1.weight),
            s1(&mut self.in1.bias),
            s1(&mut self.in_bn.gamma),
            s1(&mut self.in_bn.beta),
            s2(&mut self.in2.weight),
            s1(&mut self.in2.bias),
        ];
        for g in &mut self.gru {
            out.push(s2(&mut g.w_ih));
            out.push(s2(&mut g.w_hh));
            out.push(s1(&mut g.b_ih));
            out.push(s1(&mut g.b_hh));
        }
        out.extend([
            s2(&mut self.out1.weight),
            s1(&mut self.out1.bias),
            s1(&mut self.out_bn.gamma),
            s1(&mut self.out_bn.beta),
            s2(&mut self.out2.weight),
            s1(&mut self.out2.bias),
        ]);
        out
    }

    /// Batch-norm running statistics by name.
    pub fn norm_stats(&self) -> Vec<(String, &[f64])> {
        vec![
            ("input.bn.running_mean".into(), flat1(&self.in_bn.running_mean)),
            ("input.bn.running_var".into(), flat1(&self.in_bn.running_var)),
            ("output.bn.running_mean".into(), flat1(&self.out_bn.running_mean)),
            ("output.bn.running_var".into(), flat1(&self.out_bn.running_var)),
        ]
    }

    pub fn norm_stats_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.in_bn.running_mean.as_slice_mut().expect("contiguous"),
            self.in_bn.running_var.as_slice_mut().expect("contiguous"),
            self.out_bn.running_mean.as_slice_mut().expect("contiguous"),
            self.out_bn.running_var.as_slice_mut().expect("contiguous"),
        ]
    }

    pub fn parameter_count(&self) -> usize {
        self.named().iter().map(|t| t.data.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.named().iter().all(|t| t.data.iter().all(|x| x.is_finite()))
            && self.norm_stats().iter().all(|(_, s)| s.iter().all(|x| x.is_finite()))
    }
}
