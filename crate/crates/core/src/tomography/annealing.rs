//! Simulated annealing with geometric cooling and an adaptive step size.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy)]
pub struct AnnealingOptions {
    /// Initial proposal step and probe scale.
    pub scale: f64,
    /// Number of random probes used to set the initial temperature.
    pub probes: usize,
    /// Temperature multiplier per level.
    pub cooling: f64,
    pub steps_per_level: usize,
    /// Stop once the temperature drops below this fraction of the initial one.
    pub floor: f64,
}

#[derive(Debug, Clone)]
pub struct AnnealingResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub initial_temperature: f64,
}

pub fn minimize<R: Rng>(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    opts: &AnnealingOptions,
    rng: &mut R,
) -> AnnealingResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64]| {
        evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut current = x0.to_vec();
    let mut f_current = eval(&current);

    let probes: Vec<f64> = (0..opts.probes.max(2))
        .map(|_| {
            let p: Vec<f64> = current
                .iter()
                .map(|x| x + opts.scale * rng.sample::<f64, _>(StandardNormal))
                .collect();
            eval(&p)
        })
        .filter(|v| v.is_finite())
        .collect();
    let t0 = std_dev(&probes).max(f64::MIN_POSITIVE);

    let mut best = current.clone();
    let mut f_best = f_current;
    let mut step = opts.scale;
    let mut temperature = t0;
    let mut proposal = vec![0.0; n];

    while temperature >= opts.floor * t0 {
        let mut accepted = 0usize;
        for _ in 0..opts.steps_per_level {
            // Perturb one coordinate at a time so acceptance stays meaningful
            // in all sixteen directions.
            let i = rng.random_range(0..n);
            proposal.copy_from_slice(&current);
            let z: f64 = StandardNormal.sample(rng);
            proposal[i] += step * z;
            let fp = eval(&proposal);
            let delta = fp - f_current;
            if delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp() {
                std::mem::swap(&mut current, &mut proposal);
                f_current = fp;
                accepted += 1;
                if f_current < f_best {
                    f_best = f_current;
                    best.copy_from_slice(&current);
                }
            }
        }
        let rate = accepted as f64 / opts.steps_per_level as f64;
        if rate > 0.5 {
            step *= 1.5;
        } else if rate < 0.2 {
            step *= 0.6;
        }
        temperature *= opts.cooling;
    }

    AnnealingResult {
        x: best,
        f: f_best,
        evaluations: evals,
        initial_temperature: t0,
    }
}

fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const OPTS: AnnealingOptions = AnnealingOptions {
        scale: 0.05,
        probes: 50,
        cooling: 0.9,
        steps_per_level: 200,
        floor: 1e-6,
    };

    #[test]
    fn finds_bowl_minimum() {
        let f = |x: &[f64]| x.iter().map(|v| (v - 0.3).powi(2)).sum::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = minimize(f, &[0.0; 4], &OPTS, &mut rng);
        for v in &r.x {
            assert!((v - 0.3).abs() < 1e-3, "{v}");
        }
        assert!(r.initial_temperature > 0.0);
    }

    #[test]
    fn escapes_shallow_local_minimum() {
        // Double well with the global minimum at x = 2.
        let f = |x: &[f64]| (x[0] * x[0] - 4.0).powi(2) / 4.0 - 0.5 * x[0];
        let opts = AnnealingOptions { scale: 1.0, ..OPTS };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = minimize(f, &[-2.0], &opts, &mut rng);
        assert!(r.x[0] > 1.5, "{}", r.x[0]);
    }

    #[test]
    fn deterministic_for_seed() {
        let f = |x: &[f64]| x.iter().map(|v| v.cos()).sum::<f64>();
        let a = minimize(f, &[0.1, 0.2], &OPTS, &mut ChaCha8Rng::seed_from_u64(5));
        let b = minimize(f, &[0.1, 0.2], &OPTS, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a.x, b.x);
        assert_eq!(a.f, b.f);
    }
}
