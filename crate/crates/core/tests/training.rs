use embodied::rl::{
    gaussian_logp, linear_reference_agent, sgd_update, value_loss, value_loss_grad, LinearParams, Sample, TrainConfig,
};
use embodied::train::{train_demo, TrainDemoConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_params(rng: &mut ChaCha8Rng, n: usize, a: usize) -> LinearParams {
    let mut p = LinearParams::zeros(n, a, 0.0);
    for w in [&mut p.w_mean, &mut p.w_var, &mut p.w_value_env, &mut p.w_value_abs] {
        for x in w.iter_mut() {
            *x = rng.random_range(-0.5..0.5);
        }
    }
    p
}

fn random_sample(rng: &mut ChaCha8Rng, n: usize, a: usize) -> Sample {
    Sample {
        features: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        action: (0..a).map(|_| rng.random_range(-1.0..1.0)).collect(),
        pg_coefficient: rng.random_range(-2.0..2.0),
        target_env: rng.random_range(-3.0..3.0),
        target_abs: rng.random_range(-3.0..3.0),
    }
}

#[test]
fn value_loss_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cfg = TrainConfig::default();
    let h = 1e-6;
    for _ in 0..200 {
        let p = random_params(&mut rng, 5, 2);
        let s = random_sample(&mut rng, 5, 2);
        let (g_env, g_abs) = value_loss_grad(&p, &s, &cfg).unwrap();
        for i in 0..5 {
            for (which, analytic) in [(0, g_env[i]), (1, g_abs[i])] {
                let (mut plus, mut minus) = (p.clone(), p.clone());
                if which == 0 {
                    plus.w_value_env[i] += h;
                    minus.w_value_env[i] -= h;
                } else {
                    plus.w_value_abs[i] += h;
                    minus.w_value_abs[i] -= h;
                }
                let fd = (value_loss(&plus, &s, &cfg).unwrap() - value_loss(&minus, &s, &cfg).unwrap()) / (2.0 * h);
                let rel = (fd - analytic).abs() / fd.abs().max(analytic.abs()).max(1e-3);
                assert!(rel < 1e-5, "analytic {analytic}, fd {fd}");
            }
        }
    }
}

#[test]
fn policy_step_follows_weighted_log_likelihood() {
    // With value weights at zero the update is lr * coefficient * d logp / dW.
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let cfg = TrainConfig { learning_rate: 1e-3, value_weight_env: 0.0, value_weight_abs: 0.0 };
    let h = 1e-6;
    for _ in 0..50 {
        let p = random_params(&mut rng, 4, 2);
        let s = random_sample(&mut rng, 4, 2);
        let next = sgd_update(&p, std::slice::from_ref(&s), &cfg).unwrap();
        let objective = |q: &LinearParams| {
            s.pg_coefficient * gaussian_logp(&linear_reference_agent(&s.features, q).unwrap().policy, &s.action)
        };
        for i in 0..p.w_mean.len() {
            let (mut plus, mut minus) = (p.clone(), p.clone());
            plus.w_mean[i] += h;
            minus.w_mean[i] -= h;
            let fd = (objective(&plus) - objective(&minus)) / (2.0 * h);
            let step = (next.w_mean[i] - p.w_mean[i]) / cfg.learning_rate;
            assert!((fd - step).abs() <= 1e-5 * fd.abs().max(1.0), "mean weight {i}: {step} vs {fd}");
        }
        assert_eq!(next.w_value_env, p.w_value_env);
    }
}

#[test]
fn short_training_run_is_deterministic() {
    let cfg = TrainDemoConfig {
        iterations: 2,
        episodes_per_iteration: 4,
        eval_every: 1,
        eval_episodes: 4,
        max_seconds: None,
        ..TrainDemoConfig::default()
    };
    let a = train_demo(&cfg, |_| {}).unwrap();
    let b = train_demo(&cfg, |_| {}).unwrap();
    let key = |r: &embodied::train::TrainReport| {
        r.evaluations.iter().map(|p| (p.iteration, p.env_steps, p.solve_rate, p.mean_return_env.to_bits())).collect::<Vec<_>>()
    };
    assert_eq!(a.evaluations.len(), 3);
    assert_eq!(key(&a), key(&b));
    assert!(a.initial.solve_rate < 0.5);
}
