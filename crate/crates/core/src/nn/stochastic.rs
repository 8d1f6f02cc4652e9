//! Softmax policy head and categorical sampling.

use rand::Rng;

/// Max-subtracted softmax; outputs are non-negative and sum to 1.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

/// log softmax(logits), numerically stable.
pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum: f64 = logits.iter().map(|&z| (z - max).exp()).sum::<f64>().ln();
    logits.iter().map(|&z| z - max - log_sum).collect()
}

/// -sum p ln p, in [0, ln(len)].
pub fn entropy(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// Draws an index from a categorical distribution; consumes exactly one
/// uniform draw, so the sample is a pure function of (probs, that draw).
pub fn sample_categorical<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equal_logits_give_the_uniform_distribution() {
        let p = softmax(&[2.5; 9]);
        for &v in &p {
            assert!((v - 1.0 / 9.0).abs() < 1e-12);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn huge_logits_do_not_overflow() {
        let p = softmax(&[1000.0, 0.0, 0.0]);
        assert!(p[0] > 0.999_999);
        assert!(p.iter().all(|v| v.is_finite()));
        let lp = log_softmax(&[1000.0, 0.0, 0.0]);
        assert!(lp.iter().all(|v| v.is_finite()));
        assert!(lp[0] > -1e-6);
    }

    #[test]
    fn uniform_nine_way_entropy_is_ln_nine() {
        let p = softmax(&[0.0; 9]);
        assert!((entropy(&p) - 9f64.ln()).abs() < 1e-12);
        assert!((entropy(&p) - 2.1972).abs() < 1e-4);
    }

    #[test]
    fn one_hot_always_samples_that_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let probs = [0.0, 0.0, 1.0, 0.0];
        for _ in 0..100 {
            assert_eq!(sample_categorical(&probs, &mut rng), 2);
        }
    }

    #[test]
    fn uniform_sampling_hits_every_index_evenly() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let probs = [1.0 / 9.0; 9];
        let mut counts = [0u32; 9];
        for _ in 0..90_000 {
            counts[sample_categorical(&probs, &mut rng)] += 1;
        }
        for &c in &counts {
            // each index within 3% of 10,000
            assert!((c as f64 - 10_000.0).abs() < 300.0, "count {c}");
        }
    }

    #[test]
    fn sampling_is_reproducible_under_a_fixed_seed() {
        let probs = [0.2, 0.3, 0.5];
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20).map(|_| sample_categorical(&probs, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
    }

    #[test]
    fn log_softmax_matches_log_of_softmax() {
        let logits = [0.3, -1.2, 2.0, 0.0];
        let p = softmax(&logits);
        let lp = log_softmax(&logits);
        for (a, b) in p.iter().zip(&lp) {
            assert!((a.ln() - b).abs() < 1e-12);
        }
    }
}
