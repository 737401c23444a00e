use super::gaussian::{gaussian_head, gaussian_logp_grad, Gaussian, GaussianHeadParams};
use super::RlError;

/// Linear maps from features to the policy head and both value heads.
/// Weight matrices are row-major, one row per action dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearParams {
    pub input_dim: usize,
    pub action_dim: usize,
    pub w_mean: Vec<f64>,
    pub w_var: Vec<f64>,
    pub w_value_env: Vec<f64>,
    pub w_value_abs: Vec<f64>,
}

impl LinearParams {
    /// Zero weights; the variance head's bias feature (index 0) starts at
    /// `raw_var_bias`.
    pub fn zeros(input_dim: usize, action_dim: usize, raw_var_bias: f64) -> Self {
        let mut w_var = vec![0.0; input_dim * action_dim];
        for a in 0..action_dim {
            w_var[a * input_dim] = raw_var_bias;
        }
        Self {
            input_dim,
            action_dim,
            w_mean: vec![0.0; input_dim * action_dim],
            w_var,
            w_value_env: vec![0.0; input_dim],
            w_value_abs: vec![0.0; input_dim],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentOutput {
    pub head: GaussianHeadParams,
    pub policy: Gaussian,
    pub value_env: f64,
    pub value_abs: f64,
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

pub fn linear_reference_agent(features: &[f64], params: &LinearParams) -> Result<AgentOutput, RlError> {
    if features.len() != params.input_dim {
        return Err(RlError::Length(format!("{} features, expected {}", features.len(), params.input_dim)));
    }
    let n = params.input_dim;
    let row = |w: &[f64], a: usize| dot(&w[a * n..(a + 1) * n], features);
    let head = GaussianHeadParams {
        raw_mean: (0..params.action_dim).map(|a| row(&params.w_mean, a)).collect(),
        raw_var: (0..params.action_dim).map(|a| row(&params.w_var, a)).collect(),
    };
    Ok(AgentOutput {
        policy: gaussian_head(&head),
        head,
        value_env: dot(&params.w_value_env, features),
        value_abs: dot(&params.w_value_abs, features),
    })
}

/// One step of experience prepared for an update.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub action: Vec<f64>,
    /// Summed policy-gradient coefficient of both objectives.
    pub pg_coefficient: f64,
    pub target_env: f64,
    pub target_abs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub value_weight_env: f64,
    pub value_weight_abs: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { learning_rate: 0.01, value_weight_env: 0.5, value_weight_abs: 0.5 }
    }
}

/// Summed value loss of both streams: 0.5 * weight * (target - V)^2 each.
pub fn value_loss(params: &LinearParams, sample: &Sample, config: &TrainConfig) -> Result<f64, RlError> {
    let out = linear_reference_agent(&sample.features, params)?;
    let e_env = sample.target_env - out.value_env;
    let e_abs = sample.target_abs - out.value_abs;
    Ok(0.5 * config.value_weight_env * e_env * e_env + 0.5 * config.value_weight_abs * e_abs * e_abs)
}

/// Gradient of [`value_loss`] with respect to (w_value_env, w_value_abs).
pub fn value_loss_grad(
    params: &LinearParams,
    sample: &Sample,
    config: &TrainConfig,
) -> Result<(Vec<f64>, Vec<f64>), RlError> {
    let out = linear_reference_agent(&sample.features, params)?;
    let e_env = config.value_weight_env * (sample.target_env - out.value_env);
    let e_abs = config.value_weight_abs * (sample.target_abs - out.value_abs);
    Ok((
        sample.features.iter().map(|x| -e_env * x).collect(),
        sample.features.iter().map(|x| -e_abs * x).collect(),
    ))
}

/// Gradient ascent on the summed policy-gradient objective plus descent on
/// both value regressions, averaged over `batch`.
pub fn sgd_update(params: &LinearParams, batch: &[Sample], config: &TrainConfig) -> Result<LinearParams, RlError> {
    let mut next = params.clone();
    if batch.is_empty() || config.learning_rate == 0.0 {
        return Ok(next);
    }
    let scale = config.learning_rate / batch.len() as f64;
    let n = params.input_dim;
    for s in batch {
        if s.action.len() != params.action_dim {
            return Err(RlError::Length(format!("action has {} entries, expected {}", s.action.len(), params.action_dim)));
        }
        let out = linear_reference_agent(&s.features, params)?;
        let (dm, dv) = gaussian_logp_grad(&out.head, &s.action);
        for a in 0..params.action_dim {
            for (i, x) in s.features.iter().enumerate() {
                next.w_mean[a * n + i] += scale * s.pg_coefficient * dm[a] * x;
                next.w_var[a * n + i] += scale * s.pg_coefficient * dv[a] * x;
            }
        }
        let (g_env, g_abs) = value_loss_grad(params, s, config)?;
        for i in 0..n {
            next.w_value_env[i] -= scale * g_env[i];
            next.w_value_abs[i] -= scale * g_abs[i];
        }
    }
    Ok(next)
}
