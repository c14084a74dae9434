mod support;

use kpc_core::gen::SplitMix64;
use kpc_core::{
    clique_partition_ub, fractional_knapsack_ub, greedy_clique_partition, BoundContext, Instance,
    ItemSet, KpcError,
};
use support::{random_instance, six_items};

/// Best profit reachable from `free` within `residual`, by enumeration.
fn best_completion(inst: &Instance, free: &[usize], residual: u64) -> u64 {
    let k = free.len();
    let mut best = 0;
    'masks: for mask in 0u32..(1 << k) {
        let chosen: Vec<usize> = (0..k)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| free[b])
            .collect();
        let weight: u64 = chosen.iter().map(|&i| inst.weight(i)).sum();
        if weight > residual {
            continue;
        }
        for (a, &i) in chosen.iter().enumerate() {
            if chosen[a + 1..].iter().any(|&j| inst.conflicts(i, j)) {
                continue 'masks;
            }
        }
        best = best.max(chosen.iter().map(|&i| inst.profit(i)).sum());
    }
    best
}

/// Floor of the optimum of the LP dual
/// `min_{l >= 0} l * c + sum_B max(0, max_{i in B} p_i - l * w_i)`
/// over blocks `B` (singletons give the plain fractional knapsack).
/// The objective is convex and piecewise linear in `l`, so its minimum sits at
/// `l = 0` or at a breakpoint `l = a / b`; every candidate is evaluated exactly.
fn lp_dual_floor(inst: &Instance, blocks: &[Vec<usize>], capacity: u64) -> u64 {
    let blocks: Vec<Vec<usize>> = blocks
        .iter()
        .map(|b| {
            b.iter()
                .copied()
                .filter(|&i| inst.weight(i) <= capacity)
                .collect::<Vec<_>>()
        })
        .filter(|b: &Vec<usize>| !b.is_empty())
        .collect();
    let mut candidates: Vec<(i128, i128)> = vec![(0, 1)];
    for block in &blocks {
        for (x, &i) in block.iter().enumerate() {
            let (pi, wi) = (inst.profit(i) as i128, inst.weight(i) as i128);
            candidates.push((pi, wi));
            for &j in &block[x + 1..] {
                let (pj, wj) = (inst.profit(j) as i128, inst.weight(j) as i128);
                let (num, den) = (pi - pj, wi - wj);
                if den != 0 && (num > 0) == (den > 0) && num != 0 {
                    candidates.push((num.abs(), den.abs()));
                }
            }
        }
    }
    candidates
        .into_iter()
        .map(|(a, b)| {
            // b * value = a * c + sum_B max(0, max_i p_i * b - a * w_i)
            let mut scaled = a * capacity as i128;
            for block in &blocks {
                let best = block
                    .iter()
                    .map(|&i| inst.profit(i) as i128 * b - a * inst.weight(i) as i128)
                    .max()
                    .unwrap();
                scaled += best.max(0);
            }
            (scaled / b) as u64
        })
        .min()
        .unwrap()
}

/// A random node: some items fixed in, their neighbours and a few others
/// fixed out, residual capacity what is left.
fn random_context(rng: &mut SplitMix64, inst: &Instance) -> BoundContext {
    let n = inst.len();
    let mut free = ItemSet::full(n);
    let mut residual = inst.capacity();
    let mut fixed_profit = 0;
    for i in 0..n {
        if !free.contains(i) {
            continue;
        }
        match rng.below(6) {
            0 if inst.weight(i) <= residual => {
                free.remove(i);
                residual -= inst.weight(i);
                fixed_profit += inst.profit(i);
                for &j in inst.neighbors(i) {
                    free.remove(j);
                }
            }
            1 => free.remove(i),
            _ => {}
        }
    }
    BoundContext {
        ratio_order: inst.ratio_order(),
        free,
        residual_capacity: residual,
        fixed_profit,
    }
}

fn contexts(count: usize, seed: u64) -> Vec<(Instance, BoundContext)> {
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|k| {
            let n = 4 + (k % 11);
            let inst = random_instance(&mut rng, n, (k % 10) as u64, format!("ctx{k}"));
            let ctx = random_context(&mut rng, &inst);
            (inst, ctx)
        })
        .collect()
}

#[test]
fn six_items_root_bounds() {
    let inst = six_items();
    let ctx = BoundContext::root(&inst);
    assert_eq!(ctx.ratio_order, vec![2, 5, 4, 1, 3, 0]);
    assert_eq!(fractional_knapsack_ub(&ctx, &inst), 27);
    let partition = vec![vec![0, 1], vec![2, 4], vec![3], vec![5]];
    assert_eq!(clique_partition_ub(&ctx, &inst, &partition).unwrap(), 23);
}

#[test]
fn dantzig_matches_lp_dual() {
    for (inst, ctx) in contexts(600, 11) {
        let singletons: Vec<Vec<usize>> = ctx.free.iter().map(|i| vec![i]).collect();
        let expected = ctx.fixed_profit + lp_dual_floor(&inst, &singletons, ctx.residual_capacity);
        assert_eq!(
            fractional_knapsack_ub(&ctx, &inst),
            expected,
            "{}",
            inst.name()
        );
    }
}

#[test]
fn clique_bound_matches_lp_dual() {
    for (inst, ctx) in contexts(600, 12) {
        let partition = greedy_clique_partition(&inst, &ctx.free);
        let expected = ctx.fixed_profit + lp_dual_floor(&inst, &partition, ctx.residual_capacity);
        let got = clique_partition_ub(&ctx, &inst, &partition).unwrap();
        assert_eq!(got, expected, "{} {:?}", inst.name(), partition);
    }
}

#[test]
fn bounds_are_sound_and_ordered() {
    for (inst, ctx) in contexts(600, 13) {
        let free: Vec<usize> = ctx.free.iter().collect();
        let exact = ctx.fixed_profit + best_completion(&inst, &free, ctx.residual_capacity);
        let dantzig = fractional_knapsack_ub(&ctx, &inst);
        let partition = greedy_clique_partition(&inst, &ctx.free);
        let clique = clique_partition_ub(&ctx, &inst, &partition).unwrap();
        assert!(
            exact <= clique,
            "{}: {exact} > clique {clique}",
            inst.name()
        );
        assert!(
            clique <= dantzig,
            "{}: clique {clique} > dantzig {dantzig}",
            inst.name()
        );
        let singletons: Vec<Vec<usize>> = free.iter().map(|&i| vec![i]).collect();
        assert_eq!(
            clique_partition_ub(&ctx, &inst, &singletons).unwrap(),
            dantzig
        );
    }
}

#[test]
fn dantzig_is_monotone() {
    let mut rng = SplitMix64::new(14);
    for (inst, ctx) in contexts(300, 15) {
        let base = fractional_knapsack_ub(&ctx, &inst);
        let mut fewer = ctx.clone();
        if let Some(i) = ctx
            .free
            .iter()
            .nth(rng.below(ctx.free.count().max(1) as u64) as usize)
        {
            fewer.free.remove(i);
            assert!(fractional_knapsack_ub(&fewer, &inst) <= base);
        }
        let mut tighter = ctx.clone();
        tighter.residual_capacity = rng.uniform(0, ctx.residual_capacity);
        assert!(fractional_knapsack_ub(&tighter, &inst) <= base);
    }
}

#[test]
fn greedy_partition_is_a_clique_cover() {
    let mut rng = SplitMix64::new(16);
    for k in 0..200 {
        let inst = random_instance(&mut rng, 5 + k % 20, (k % 10) as u64, format!("p{k}"));
        let items = ItemSet::from_indices(inst.len(), (0..inst.len()).filter(|_| rng.below(3) > 0));
        let blocks = greedy_clique_partition(&inst, &items);
        let mut covered = ItemSet::new(inst.len());
        for block in &blocks {
            assert!(!block.is_empty());
            for (a, &i) in block.iter().enumerate() {
                assert!(items.contains(i) && !covered.contains(i));
                covered.insert(i);
                assert!(block[..a].iter().all(|&j| inst.conflicts(i, j)));
            }
        }
        assert_eq!(covered, items);
    }
}

#[test]
fn invalid_partitions_are_rejected() {
    let inst = six_items();
    let ctx = BoundContext::root(&inst);
    let cases: Vec<Vec<Vec<usize>>> = vec![
        vec![vec![0, 1], vec![2, 4], vec![3]], // 5 uncovered
        vec![vec![0, 1], vec![2, 4], vec![3], vec![5], vec![1]], // 1 twice
        vec![vec![0, 2], vec![1], vec![4], vec![3], vec![5]], // 0-2 not an edge
        vec![vec![0, 1], vec![2, 4], vec![3], vec![5, 9]], // 9 out of range
    ];
    for partition in cases {
        assert!(matches!(
            clique_partition_ub(&ctx, &inst, &partition),
            Err(KpcError::PartitionInvalid(_))
        ));
    }
    let mut node = ctx.clone();
    node.free.remove(5);
    let with_fixed = vec![vec![0, 1], vec![2, 4], vec![3], vec![5]];
    assert!(clique_partition_ub(&node, &inst, &with_fixed).is_err());
}
