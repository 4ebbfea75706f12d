//! Inputs for the learner benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pride_core::faircv::{self, build_scenario};
use pride_core::{BiasMode, Demographic, GenConfig, Scenario, Schema, Transition, Variable};

/// `n` transitions over `features` variables with domain `0..=max`; the
/// single target is a noisy threshold of the feature sum.
pub fn random_transitions(n: usize, features: usize, max: u32, seed: u64) -> (Schema, Vec<Transition>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars = (0..features).map(|i| Variable::range(format!("x{i}"), max)).collect();
    let schema = Schema::new(vars, vec![Variable::range("y", 3)]).unwrap();
    let top = (features as u32 * max).max(1);
    let ts = (0..n)
        .map(|_| {
            let s: Vec<u32> = (0..features).map(|_| rng.random_range(0..=max)).collect();
            let y = (s.iter().sum::<u32>() * 4 / (top + 1) + u32::from(rng.random_bool(0.05))).min(3);
            Transition::new(s, vec![y])
        })
        .collect();
    (schema, ts)
}

/// Observed gender-biased `s11` transitions of a generated dataset.
pub fn s11_transitions(n: usize, seed: u64) -> (Schema, Vec<Transition>) {
    let cfg = GenConfig { n_records: n, seed, ..Default::default() };
    let ds = faircv::generate(&cfg).expect("valid generator config");
    let sc = Scenario::new(11, Demographic::Gender).unwrap();
    build_scenario(&ds, &sc, BiasMode::Gender)
}
