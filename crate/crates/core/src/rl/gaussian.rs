use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub const MIN_VARIANCE: f64 = 0.1;
pub const MAX_VARIANCE: f64 = 1.0;

/// Unconstrained head outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianHeadParams {
    pub raw_mean: Vec<f64>,
    pub raw_var: Vec<f64>,
}

/// Diagonal Gaussian with mean in (-1, 1) and variance in [0.1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Gaussian {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn gaussian_head(params: &GaussianHeadParams) -> Gaussian {
    assert_eq!(params.raw_mean.len(), params.raw_var.len(), "head dimensions differ");
    Gaussian {
        mean: params.raw_mean.iter().map(|m| m.tanh()).collect(),
        variance: params
            .raw_var
            .iter()
            .map(|v| MIN_VARIANCE + (MAX_VARIANCE - MIN_VARIANCE) * sigmoid(*v))
            .collect(),
    }
}

pub fn gaussian_logp(g: &Gaussian, action: &[f64]) -> f64 {
    assert_eq!(g.mean.len(), action.len(), "action dimension");
    g.mean
        .iter()
        .zip(&g.variance)
        .zip(action)
        .map(|((m, v), a)| -0.5 * ((2.0 * PI * v).ln() + (a - m) * (a - m) / v))
        .sum()
}

/// Gradient of the log-probability with respect to the raw head outputs:
/// (d/d raw_mean, d/d raw_var).
pub fn gaussian_logp_grad(params: &GaussianHeadParams, action: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let g = gaussian_head(params);
    let mut dm = Vec::with_capacity(action.len());
    let mut dv = Vec::with_capacity(action.len());
    for i in 0..action.len() {
        let (m, v, a) = (g.mean[i], g.variance[i], action[i]);
        let d_mean = (a - m) / v;
        let d_var = -0.5 / v + 0.5 * (a - m) * (a - m) / (v * v);
        let s = sigmoid(params.raw_var[i]);
        dm.push(d_mean * (1.0 - m * m));
        dv.push(d_var * (MAX_VARIANCE - MIN_VARIANCE) * s * (1.0 - s));
    }
    (dm, dv)
}

pub fn gaussian_sample<R: Rng + ?Sized>(g: &Gaussian, rng: &mut R) -> Vec<f64> {
    g.mean
        .iter()
        .zip(&g.variance)
        .map(|(m, v)| {
            let z: f64 = StandardNormal.sample(rng);
            m + v.sqrt() * z
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn head_squashing() {
        let g = gaussian_head(&GaussianHeadParams { raw_mean: vec![0.0, 50.0], raw_var: vec![0.0, -50.0] });
        assert_eq!(g.mean[0], 0.0);
        assert!((g.variance[0] - 0.55).abs() < 1e-15);
        assert!(g.mean[1] <= 1.0 && g.variance[1] >= MIN_VARIANCE);
    }

    #[test]
    fn logp_standard_case() {
        let g = Gaussian { mean: vec![0.0], variance: vec![1.0] };
        let want = -0.5 * (2.0 * PI).ln();
        assert!((gaussian_logp(&g, &[0.0]) - want).abs() < 1e-15);
    }
}
