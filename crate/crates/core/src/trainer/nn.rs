//! A small fully connected network over a flat parameter slice, with tanh
//! hidden layers and a linear output, plus the Adam optimizer.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Layer widths, input first. Weights are stored row-major (`out x in`),
/// each followed by its bias.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mlp {
    pub sizes: Vec<usize>,
}

/// Activations of one forward pass: the input, every hidden layer after
/// tanh, and the raw output.
#[derive(Debug, Clone, Default)]
pub struct Cache {
    acts: Vec<Vec<f64>>,
}

impl Cache {
    pub fn output(&self) -> &[f64] {
        self.acts.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

impl Mlp {
    pub fn new(sizes: Vec<usize>) -> Self {
        assert!(sizes.len() >= 2 && sizes.iter().all(|&s| s > 0), "bad layer sizes {sizes:?}");
        Mlp { sizes }
    }

    pub fn layers(&self) -> usize {
        self.sizes.len() - 1
    }

    /// (weight offset, bias offset, fan in, fan out) of layer `l`.
    fn layer(&self, l: usize) -> (usize, usize, usize, usize) {
        let mut off = 0;
        for i in 0..l {
            off += self.sizes[i + 1] * (self.sizes[i] + 1);
        }
        let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
        (off, off + n_in * n_out, n_in, n_out)
    }

    pub fn param_count(&self) -> usize {
        (0..self.layers()).map(|l| self.sizes[l + 1] * (self.sizes[l] + 1)).sum()
    }

    /// Orthogonal weights with gain sqrt(2) on hidden layers and
    /// `output_gain` on the last one; zero biases.
    pub fn init(&self, params: &mut [f64], output_gain: f64, rng: &mut impl Rng) {
        for l in 0..self.layers() {
            let (w, b, n_in, n_out) = self.layer(l);
            let gain = if l + 1 == self.layers() { output_gain } else { 2f64.sqrt() };
            let q = orthogonal(n_out, n_in, rng);
            for (p, v) in params[w..b].iter_mut().zip(q) {
                *p = gain * v;
            }
            params[b..b + n_out].fill(0.0);
        }
    }

    pub fn forward(&self, params: &[f64], x: &[f64], cache: &mut Cache) {
        debug_assert_eq!(x.len(), self.sizes[0]);
        cache.acts.resize(self.sizes.len(), Vec::new());
        cache.acts[0].clear();
        cache.acts[0].extend_from_slice(x);
        for l in 0..self.layers() {
            let (w, b, n_in, n_out) = self.layer(l);
            let (before, after) = cache.acts.split_at_mut(l + 1);
            let input = &before[l];
            let out = &mut after[0];
            out.clear();
            for o in 0..n_out {
                let row = &params[w + o * n_in..w + (o + 1) * n_in];
                let z = params[b + o] + row.iter().zip(input).map(|(a, c)| a * c).sum::<f64>();
                out.push(if l + 1 < self.layers() { z.tanh() } else { z });
            }
        }
    }

    /// Adds d(loss)/d(params) to `grad`, given d(loss)/d(output).
    pub fn backward(&self, params: &[f64], cache: &Cache, d_out: &[f64], grad: &mut [f64]) {
        let mut delta = d_out.to_vec();
        for l in (0..self.layers()).rev() {
            let (w, b, n_in, n_out) = self.layer(l);
            let input = &cache.acts[l];
            for o in 0..n_out {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                grad[b + o] += d;
                let g = &mut grad[w + o * n_in..w + (o + 1) * n_in];
                for (gi, a) in g.iter_mut().zip(input) {
                    *gi += d * a;
                }
            }
            if l > 0 {
                let mut prev = vec![0.0; n_in];
                for (o, d) in delta.iter().enumerate() {
                    let row = &params[w + o * n_in..w + (o + 1) * n_in];
                    for (p, r) in prev.iter_mut().zip(row) {
                        *p += d * r;
                    }
                }
                for (p, a) in prev.iter_mut().zip(input) {
                    *p *= 1.0 - a * a;
                }
                delta = prev;
            }
        }
    }
}

/// A `rows x cols` matrix (row-major) with orthonormal rows or columns,
/// whichever is fewer.
fn orthogonal(rows: usize, cols: usize, rng: &mut impl Rng) -> Vec<f64> {
    let (k, n) = if rows <= cols { (rows, cols) } else { (cols, rows) };
    // k orthonormal vectors of length n by Gram-Schmidt.
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        for u in &basis {
            let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= d * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut m = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            m[r * cols + c] = if rows <= cols { basis[r][c] } else { basis[c][r] };
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(n: usize, eps: f64) -> Self {
        Adam { beta1: 0.9, beta2: 0.999, eps, m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orthogonal_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = orthogonal(3, 5, &mut rng);
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = (0..5).map(|c| m[i * 5 + c] * m[j * 5 + c]).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn backward_matches_finite_differences() {
        let net = Mlp::new(vec![3, 4, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut p = vec![0.0; net.param_count()];
        net.init(&mut p, 1.0, &mut rng);
        for x in p.iter_mut() {
            *x += rng.random_range(-0.1..0.1);
        }
        let x = [0.3, -0.7, 0.2];
        // loss = 1.5 * out0 - 0.5 * out1
        let loss = |p: &[f64]| {
            let mut c = Cache::default();
            net.forward(p, &x, &mut c);
            1.5 * c.output()[0] - 0.5 * c.output()[1]
        };
        let mut c = Cache::default();
        net.forward(&p, &x, &mut c);
        let mut g = vec![0.0; p.len()];
        net.backward(&p, &c, &[1.5, -0.5], &mut g);
        for i in 0..p.len() {
            let h = 1e-6;
            let (mut a, mut b) = (p.clone(), p.clone());
            a[i] += h;
            b[i] -= h;
            let fd = (loss(&a) - loss(&b)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-7, "param {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn adam_first_step_moves_by_lr() {
        let mut adam = Adam::new(2, 1e-8);
        let mut p = vec![1.0, 1.0];
        adam.step(&mut p, &[3.0, -0.5], 0.1);
        assert!((p[0] - 0.9).abs() < 1e-6 && (p[1] - 1.1).abs() < 1e-6);
    }
}
