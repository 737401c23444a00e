use super::RlError;

/// One unroll of experience with both reward streams.
///
/// `values_*` hold one entry per step plus the bootstrap value. `done_*[s]`
/// marks that the episode (or aux episode) ended with step `s`, so nothing
/// after `s` is bootstrapped into it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub rewards_env: Vec<f64>,
    pub rewards_abs: Vec<f64>,
    pub behavior_logp: Vec<f64>,
    pub target_logp: Vec<f64>,
    pub values_env: Vec<f64>,
    pub values_abs: Vec<f64>,
    pub done_env: Vec<bool>,
    pub done_abs: Vec<bool>,
    pub gamma_env: f64,
    pub gamma_abs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Env,
    Abs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VtraceOutput {
    /// Value targets v_s, one per step.
    pub vs: Vec<f64>,
    /// rho_s (r_s + gamma v_{s+1} - V_s), with v_n the bootstrap value.
    pub advantages: Vec<f64>,
    pub rhos: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.rewards_env.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards_env.is_empty()
    }

    fn stream(&self, s: Stream) -> (&[f64], &[f64], &[bool], f64) {
        match s {
            Stream::Env => (&self.rewards_env, &self.values_env, &self.done_env, self.gamma_env),
            Stream::Abs => (&self.rewards_abs, &self.values_abs, &self.done_abs, self.gamma_abs),
        }
    }

    pub fn validate(&self) -> Result<(), RlError> {
        let n = self.len();
        let lens = [
            ("rewards_abs", self.rewards_abs.len(), n),
            ("behavior_logp", self.behavior_logp.len(), n),
            ("target_logp", self.target_logp.len(), n),
            ("done_env", self.done_env.len(), n),
            ("done_abs", self.done_abs.len(), n),
            ("values_env", self.values_env.len(), n + 1),
            ("values_abs", self.values_abs.len(), n + 1),
        ];
        for (name, got, want) in lens {
            if got != want {
                return Err(RlError::Length(format!("{name} has {got} entries, expected {want}")));
            }
        }
        let finite = [
            ("rewards_env", &self.rewards_env),
            ("rewards_abs", &self.rewards_abs),
            ("behavior_logp", &self.behavior_logp),
            ("target_logp", &self.target_logp),
            ("values_env", &self.values_env),
            ("values_abs", &self.values_abs),
        ];
        for (name, v) in finite {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(RlError::NonFinite(name));
            }
        }
        for g in [self.gamma_env, self.gamma_abs] {
            if !(0.0..1.0).contains(&g) {
                return Err(RlError::Discount(g));
            }
        }
        Ok(())
    }
}

/// V-trace targets and policy-gradient advantages for one reward stream.
pub fn vtrace_targets(traj: &Trajectory, stream: Stream, rho_bar: f64, c_bar: f64) -> Result<VtraceOutput, RlError> {
    if !(c_bar > 0.0 && rho_bar >= c_bar && rho_bar.is_finite()) {
        return Err(RlError::Truncation { rho_bar, c_bar });
    }
    traj.validate()?;
    let (r, v, done, gamma) = traj.stream(stream);
    let n = traj.len();
    let ratios: Vec<f64> = (0..n).map(|s| (traj.target_logp[s] - traj.behavior_logp[s]).exp()).collect();
    let rhos: Vec<f64> = ratios.iter().map(|&x| x.min(rho_bar)).collect();
    let mut vs = vec![0.0; n];
    // acc = v_{s+1} - V_{s+1}
    let mut acc = 0.0;
    for s in (0..n).rev() {
        let cont = if done[s] { 0.0 } else { gamma };
        let delta = rhos[s] * (r[s] + cont * v[s + 1] - v[s]);
        let c = ratios[s].min(c_bar);
        acc = delta + cont * c * acc;
        vs[s] = v[s] + acc;
    }
    let advantages = (0..n)
        .map(|s| {
            let next = if s + 1 < n { vs[s + 1] } else { v[n] };
            let cont = if done[s] { 0.0 } else { gamma };
            rhos[s] * (r[s] + cont * next - v[s])
        })
        .collect();
    Ok(VtraceOutput { vs, advantages, rhos })
}

/// Per-step policy-gradient coefficients of the two objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCoefficients {
    pub w_env: Vec<f64>,
    pub w_abs: Vec<f64>,
    pub vs_env: Vec<f64>,
    pub vs_abs: Vec<f64>,
}

impl DualCoefficients {
    /// Coefficient on grad log pi(a_s|x_s) once both contributions are added.
    pub fn total(&self) -> Vec<f64> {
        self.w_env.iter().zip(&self.w_abs).map(|(a, b)| a + b).collect()
    }
}

pub fn dual_pg_coefficients(traj: &Trajectory, rho_bar: f64, c_bar: f64) -> Result<DualCoefficients, RlError> {
    let env = vtrace_targets(traj, Stream::Env, rho_bar, c_bar)?;
    let abs = vtrace_targets(traj, Stream::Abs, rho_bar, c_bar)?;
    Ok(DualCoefficients { w_env: env.advantages, w_abs: abs.advantages, vs_env: env.vs, vs_abs: abs.vs })
}
