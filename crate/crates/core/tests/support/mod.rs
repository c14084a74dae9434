#![allow(dead_code)]

pub mod lp_grammar;

use kpc_core::gen::SplitMix64;
use kpc_core::Instance;

pub fn six_items() -> Instance {
    Instance::new(
        "six_items",
        vec![6, 9, 9, 3, 7, 2],
        vec![7, 9, 4, 3, 6, 1],
        20,
        vec![(0, 1), (0, 4), (2, 3), (2, 4)],
    )
    .unwrap()
}

/// Random instance with profits and weights in `[1, 100]`, each pair in
/// conflict with probability `density_tenths / 10`, and capacity drawn
/// between a fifth and a half of the total weight.
pub fn random_instance(
    rng: &mut SplitMix64,
    n: usize,
    density_tenths: u64,
    name: String,
) -> Instance {
    let profits: Vec<u64> = (0..n).map(|_| rng.uniform(1, 100)).collect();
    let weights: Vec<u64> = (0..n).map(|_| rng.uniform(1, 100)).collect();
    let total: u64 = weights.iter().sum();
    let capacity = rng.uniform(total / 5, total / 2);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.below(10) < density_tenths {
                edges.push((i, j));
            }
        }
    }
    Instance::new(name, profits, weights, capacity, edges).unwrap()
}

/// The shared oracle suite: 500 instances, n in [8, 18], densities
/// 0.0, 0.1, ..., 0.9 in rotation.
pub fn oracle_suite() -> Vec<Instance> {
    let mut rng = SplitMix64::new(0x5eed_c1e5);
    (0..500)
        .map(|k| {
            let n = 8 + (k % 11) as usize;
            let density = (k / 11 % 10) as u64;
            random_instance(&mut rng, n, density, format!("suite{k}_n{n}_d{density}"))
        })
        .collect()
}
