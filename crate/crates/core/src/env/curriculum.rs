use rand::Rng;

use super::EnvError;

const RATIO_TOLERANCE: f64 = 1e-9;

pub(super) fn check_ratios(ratios: &[f64]) -> Result<(), EnvError> {
    if ratios.is_empty() {
        return Err(EnvError::Config("curriculum is empty".into()));
    }
    if let Some(r) = ratios.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(EnvError::Config(format!("curriculum ratio {r} is negative or not finite")));
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > RATIO_TOLERANCE {
        return Err(EnvError::Config(format!("curriculum ratios sum to {sum}, not 1")));
    }
    Ok(())
}

/// Draws a difficulty (1-based) with probabilities `ratios`.
pub fn curriculum_sample<R: Rng + ?Sized>(ratios: &[f64], rng: &mut R) -> Result<u8, EnvError> {
    check_ratios(ratios)?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let last = ratios.iter().rposition(|&r| r > 0.0).expect("ratios sum to one");
    for (i, &r) in ratios.iter().enumerate() {
        acc += r;
        if u < acc || i == last {
            return Ok(i as u8 + 1);
        }
    }
    unreachable!("loop returns by the last positive ratio")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(curriculum_sample(&[1.0, 0.0, 0.0, 0.0, 0.0], &mut rng).unwrap(), 1);
            assert_eq!(curriculum_sample(&[0.0, 0.0, 0.0, 0.0, 1.0], &mut rng).unwrap(), 5);
        }
    }

    #[test]
    fn rejects_bad_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(curriculum_sample(&[0.5, 0.6], &mut rng).is_err());
        assert!(curriculum_sample(&[1.5, -0.5], &mut rng).is_err());
        assert!(curriculum_sample(&[], &mut rng).is_err());
    }
}
