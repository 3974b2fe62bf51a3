//! Empirical frequencies of sampled configs against the preset's declared probabilities.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::BTreeMap;
use synthvid_core::sampler::{sample_batch, ChoiceDist, PresetLibrary};
use synthvid_core::scene_config::MovementType;
use synthvid_core::seed::stream;

const N: usize = 20_000;

/// Upper-tail p-value of Pearson's statistic.
fn chi_square_p(observed: &[usize], probs: &[f64]) -> f64 {
    let total: usize = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dist = ChiSquared::new((observed.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

#[test]
fn categorical_draws_follow_their_weights() {
    let dist = ChoiceDist::Categorical(vec![('a', 1.0), ('b', 2.0), ('c', 3.0), ('d', 4.0)]);
    let mut rng = stream(5, 0);
    let mut counts = [0usize; 4];
    for _ in 0..N {
        counts[(dist.draw(&mut rng) as u8 - b'a') as usize] += 1;
    }
    let probs: Vec<f64> = dist.probabilities().into_iter().map(|(_, p)| p).collect();
    let p = chi_square_p(&counts, &probs);
    assert!(p > 1e-3, "p = {p}, counts {counts:?}");
}

#[test]
fn following_share_matches_the_preset() {
    let lib = PresetLibrary::builtin();
    let preset = lib.get("forward_following").unwrap();
    let configs = sample_batch(preset, 9, N).unwrap();
    let mut counts: BTreeMap<MovementType, usize> = BTreeMap::new();
    for c in &configs {
        *counts.entry(c.camera.movement_type).or_default() += 1;
    }
    let probs = preset.movement_type.probabilities();
    let observed: Vec<usize> = probs.iter().map(|(m, _)| counts.get(m).copied().unwrap_or(0)).collect();
    let expected: Vec<f64> = probs.iter().map(|(_, p)| *p).collect();
    assert_eq!(observed.iter().sum::<usize>(), N, "only declared movements appear");
    let p = chi_square_p(&observed, &expected);
    assert!(p > 1e-3, "p = {p}, counts {observed:?}");
}
