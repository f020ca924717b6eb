use std::collections::HashMap;

use qecbound::montecarlo::{
    failure_rate_sweep, sample_error, BaseCode, Experiment, SamplingMode, TrialConfig,
};
use qecbound::stabilizer::Pauli;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn sampler_cells_are_uniform() {
    // (located position, unlocated position, unlocated letter): 5 * 4 * 3 cells.
    let samples = 100_000u64;
    let mut counts: HashMap<(usize, usize, Pauli), u64> = HashMap::new();
    let mut located_letters = [0u64; 4];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..samples {
        let e = sample_error(5, 1, 1, &mut rng).unwrap();
        let loc = e.located.indices()[0];
        located_letters[e.assignment[loc].index()] += 1;
        let (unloc, letter) = e
            .assignment
            .iter()
            .enumerate()
            .find(|&(i, p)| i != loc && !p.is_identity())
            .map(|(i, &p)| (i, p))
            .unwrap();
        *counts.entry((loc, unloc, letter)).or_default() += 1;
    }
    assert_eq!(counts.len(), 60);
    let p = 1.0 / 60.0;
    let mean = samples as f64 * p;
    let sigma = (samples as f64 * p * (1.0 - p)).sqrt();
    let mut chi2 = 0.0;
    for &c in counts.values() {
        assert!((c as f64 - mean).abs() < 5.0 * sigma, "{c} vs {mean}");
        chi2 += (c as f64 - mean).powi(2) / mean;
    }
    // 59 degrees of freedom; 99.9th percentile is about 99.
    assert!(chi2 < 99.0, "chi2 = {chi2}");
    let mean4 = samples as f64 / 4.0;
    let sigma4 = (samples as f64 * 0.25 * 0.75).sqrt();
    for c in located_letters {
        assert!((c as f64 - mean4).abs() < 5.0 * sigma4);
    }
}

#[test]
fn located_subsets_are_uniform() {
    let samples = 40_000u64;
    let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..samples {
        let e = sample_error(6, 2, 3, &mut rng).unwrap();
        *counts.entry(e.located.indices().to_vec()).or_default() += 1;
    }
    assert_eq!(counts.len(), 20);
    let mean = samples as f64 / 20.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - mean).powi(2) / mean).sum();
    // 19 degrees of freedom; 99.9th percentile is about 43.8.
    assert!(chi2 < 43.8, "chi2 = {chi2}");
}

fn config(levels: u32, mode: SamplingMode, trials: u64, seed: u64) -> TrialConfig {
    TrialConfig { code: BaseCode::Five, levels, mode, trials, seed, p_dec: None, large_scale: false }
}

#[test]
fn scatter_is_identical_across_thread_counts() {
    let exp = Experiment::new(config(3, SamplingMode::DEFAULT_RECTANGLE, 400, 77)).unwrap();
    let serial = exp.scatter_serial().unwrap();
    for threads in [1, 2, 5] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        assert_eq!(pool.install(|| exp.scatter()).unwrap(), serial);
    }
    let again = Experiment::new(config(3, SamplingMode::DEFAULT_RECTANGLE, 400, 77)).unwrap();
    assert_eq!(again.scatter().unwrap(), serial);
    let other_seed = Experiment::new(config(3, SamplingMode::DEFAULT_RECTANGLE, 400, 78)).unwrap();
    assert_ne!(other_seed.scatter().unwrap(), serial);
}

#[test]
fn steane_concatenation_runs() {
    let exp = Experiment::new(TrialConfig {
        code: BaseCode::Steane,
        ..config(2, SamplingMode::Fixed { t_u: 1, t_l: 0 }, 50, 1)
    })
    .unwrap();
    assert_eq!(exp.n(), 49);
    assert!(exp.scatter().unwrap().iter().all(|r| r.success));
}

#[test]
fn sweep_failure_rate_grows_with_weights() {
    // n = 625. Corners of a square in (t_u, t_l) straddling the boundary.
    let points = [(40, 150), (90, 150), (40, 300), (90, 300)];
    let rows = failure_rate_sweep(BaseCode::Five, 4, &points, 200, 5, None, false).unwrap();
    let by_point: HashMap<(usize, usize), _> = rows.iter().map(|r| ((r.t_u, r.t_l), *r)).collect();
    for &(a_u, a_l) in &points {
        for &(b_u, b_l) in &points {
            if b_u >= a_u && b_l >= a_l {
                let a = by_point[&(a_u, a_l)];
                let b = by_point[&(b_u, b_l)];
                assert!(a.ci_lo <= b.ci_hi, "{a:?} vs {b:?}");
            }
        }
    }
    assert!(by_point[&(40, 150)].rate < by_point[&(90, 300)].rate);
    let again = failure_rate_sweep(BaseCode::Five, 4, &points, 200, 5, None, false).unwrap();
    assert_eq!(rows, again);
}
