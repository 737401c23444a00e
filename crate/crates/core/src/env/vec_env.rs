use rayon::prelude::*;

use super::{EnvConfig, EnvError, Environment, Observation, StepResult};

/// Independent environments stepped in parallel; results keep instance order.
pub struct VecEnv {
    envs: Vec<Environment>,
}

impl VecEnv {
    pub fn new(config: &EnvConfig, n: usize) -> Result<Self, EnvError> {
        let envs = (0..n)
            .map(|i| {
                let mut c = config.clone();
                c.seed = super::derive_seed(config.seed, i as u64 + 1);
                Environment::new(c)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { envs })
    }

    pub fn len(&self) -> usize {
        self.envs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envs.is_empty()
    }

    pub fn envs(&self) -> &[Environment] {
        &self.envs
    }

    pub fn reset(&mut self, seeds: &[u64]) -> Result<Vec<Observation>, EnvError> {
        assert_eq!(seeds.len(), self.envs.len(), "one seed per environment");
        self.envs.par_iter_mut().zip(seeds).map(|(e, &s)| e.reset(s)).collect()
    }

    pub fn step(&mut self, actions: &[Vec<f64>]) -> Vec<Result<StepResult, EnvError>> {
        assert_eq!(actions.len(), self.envs.len(), "one action per environment");
        self.envs.par_iter_mut().zip(actions).map(|(e, a)| e.step(a)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Game;

    #[test]
    fn parallel_matches_sequential() {
        let mut cfg = EnvConfig::for_game(Game::Mujoban);
        cfg.difficulty = Some(1);
        let mut v = VecEnv::new(&cfg, 4).unwrap();
        let seeds = [1, 2, 3, 4];
        let obs = v.reset(&seeds).unwrap();
        let stepped = v.step(&vec![vec![0.5, -0.2]; 4]);
        for (k, &s) in seeds.iter().enumerate() {
            let mut e = Environment::new(cfg.clone()).unwrap();
            assert_eq!(e.reset(s).unwrap(), obs[k]);
            assert_eq!(&e.step(&[0.5, -0.2]).unwrap(), stepped[k].as_ref().unwrap());
        }
    }
}
