use alloc::vec::Vec;

use libm::sqrt;

/// Anything that exposes its parameters as flat slices in a fixed order.
/// Gradients use the same type as the parameters they belong to.
pub trait Params: Clone {
    fn slices(&self) -> Vec<&[f64]>;
    fn slices_mut(&mut self) -> Vec<&mut [f64]>;
}

/// Copy of `p` with every entry set to zero.
pub fn zeros_like<P: Params>(p: &P) -> P {
    let mut z = p.clone();
    for s in z.slices_mut() {
        s.fill(0.0);
    }
    z
}

pub fn global_norm<P: Params>(p: &P) -> f64 {
    sqrt(p.slices().iter().flat_map(|s| s.iter()).map(|v| v * v).sum())
}

pub fn scale_all<P: Params>(p: &mut P, factor: f64) {
    for s in p.slices_mut() {
        for v in s.iter_mut() {
            *v *= factor;
        }
    }
}

/// `dst += alpha · src`.
pub fn add_scaled<P: Params>(dst: &mut P, src: &P, alpha: f64) {
    for (d, s) in dst.slices_mut().into_iter().zip(src.slices()) {
        for (a, b) in d.iter_mut().zip(s) {
            *a += alpha * b;
        }
    }
}

/// Adam on a parameter record, used for the supervised pre-training stages.
#[derive(Debug, Clone)]
pub struct Adam<P: Params> {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: P,
    v: P,
    t: i32,
}

impl<P: Params> Adam<P> {
    pub fn new(like: &P, lr: f64) -> Self {
        Self { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, m: zeros_like(like), v: zeros_like(like), t: 0 }
    }

    /// Descent step along `grad`.
    pub fn step(&mut self, params: &mut P, grad: &P) {
        self.t += 1;
        let c1 = 1.0 - pow(self.beta1, self.t);
        let c2 = 1.0 - pow(self.beta2, self.t);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        let slices = params.slices_mut().into_iter().zip(grad.slices()).zip(self.m.slices_mut()).zip(self.v.slices_mut());
        for (((p, g), m), v) in slices {
            for i in 0..p.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                p[i] -= lr * (m[i] / c1) / (sqrt(v[i] / c2) + eps);
            }
        }
    }
}

fn pow(base: f64, n: i32) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::MlpParams;

    #[test]
    fn norm_and_scale() {
        let mut p = MlpParams::zeros(&[1, 1]).unwrap();
        p.weights[0][0] = 3.0;
        p.biases[0][0] = 4.0;
        assert_eq!(global_norm(&p), 5.0);
        scale_all(&mut p, 0.5);
        assert_eq!(global_norm(&p), 2.5);
        let z = zeros_like(&p);
        assert_eq!(global_norm(&z), 0.0);
    }

    #[test]
    fn adam_minimises_quadratic() {
        let mut p = MlpParams::zeros(&[1, 1]).unwrap();
        p.weights[0][0] = 2.0;
        let mut opt = Adam::new(&p, 0.05);
        for _ in 0..500 {
            let mut g = zeros_like(&p);
            g.weights[0][0] = 2.0 * (p.weights[0][0] - 0.5);
            opt.step(&mut p, &g);
        }
        assert!((p.weights[0][0] - 0.5).abs() < 1e-3);
    }
}
