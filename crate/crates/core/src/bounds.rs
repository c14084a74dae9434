//! Upper bounds on the best completion of a partial selection.
//!
//! Both bounds are relaxations of the integer model: the fractional
//! (Dantzig) bound drops the conflict rows entirely, the clique bound keeps
//! one "at most one of these" row per clique of a partition of the free
//! items and solves the resulting multiple-choice knapsack LP greedily.
//! All data is integral, so both bounds are floored.

use crate::error::{KpcError, Result};
use crate::instance::{cmp_ratio, Instance};
use crate::itemset::ItemSet;

/// Node-local view handed to the bound procedures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundContext {
    /// Items by decreasing profit/weight ratio, ties to the lower index.
    pub ratio_order: Vec<usize>,
    /// Undecided items.
    pub free: ItemSet,
    pub residual_capacity: u64,
    /// Profit of the items already included.
    pub fixed_profit: u64,
}

impl BoundContext {
    /// All items free, full capacity, nothing included.
    pub fn root(inst: &Instance) -> Self {
        BoundContext {
            ratio_order: inst.ratio_order(),
            free: ItemSet::full(inst.len()),
            residual_capacity: inst.capacity(),
            fixed_profit: 0,
        }
    }
}

/// `fixed_profit` plus the floored Dantzig bound over the free items that fit.
pub fn fractional_knapsack_ub(ctx: &BoundContext, inst: &Instance) -> u64 {
    ctx.fixed_profit
        + dantzig(
            &ctx.ratio_order,
            &ctx.free,
            ctx.residual_capacity,
            inst.profits(),
            inst.weights(),
        )
}

/// Dantzig bound over `free` items with `w_i <= residual`, without fixed profit.
pub(crate) fn dantzig(
    order: &[usize],
    free: &ItemSet,
    residual: u64,
    profits: &[u64],
    weights: &[u64],
) -> u64 {
    let mut room = residual;
    let mut total = 0u64;
    for &i in order {
        if !free.contains(i) || weights[i] > residual {
            continue;
        }
        let w = weights[i];
        if w <= room {
            room -= w;
            total += profits[i];
            if room == 0 {
                break;
            }
        } else {
            total += (profits[i] as u128 * room as u128 / w as u128) as u64;
            break;
        }
    }
    total
}

/// Clique bound for a caller-supplied partition of the free items.
///
/// Every block must be a clique of the conflict graph and the blocks must
/// cover the free items exactly once. The result never exceeds
/// [`fractional_knapsack_ub`] for the same context.
pub fn clique_partition_ub(
    ctx: &BoundContext,
    inst: &Instance,
    cliques: &[Vec<usize>],
) -> Result<u64> {
    let n = inst.len();
    let mut seen = ItemSet::new(n);
    for block in cliques {
        for (k, &i) in block.iter().enumerate() {
            if i >= n {
                return Err(KpcError::PartitionInvalid(format!("item {i} out of range")));
            }
            if !ctx.free.contains(i) {
                return Err(KpcError::PartitionInvalid(format!("item {i} is not free")));
            }
            if seen.contains(i) {
                return Err(KpcError::PartitionInvalid(format!(
                    "item {i} appears in more than one block"
                )));
            }
            seen.insert(i);
            if let Some(&j) = block[..k].iter().find(|&&j| !inst.conflicts(i, j)) {
                return Err(KpcError::PartitionInvalid(format!(
                    "items {j} and {i} share a block but do not conflict"
                )));
            }
        }
    }
    if seen != ctx.free {
        let missing = ctx.free.iter().find(|&i| !seen.contains(i)).unwrap_or(0);
        return Err(KpcError::PartitionInvalid(format!(
            "free item {missing} is not covered"
        )));
    }
    let mut scratch = CliqueScratch::default();
    Ok(ctx.fixed_profit
        + scratch.bound(
            cliques.iter().map(|b| b.as_slice()),
            &ctx.free,
            ctx.residual_capacity,
            inst.profits(),
            inst.weights(),
        ))
}

/// Partitions `items` into cliques of the conflict graph by sequential greedy
/// assignment, visiting vertices by decreasing degree (ties to the lower index).
///
/// This is a greedy colouring of the complement graph: each vertex joins the
/// first block whose members are all its neighbours.
pub fn greedy_clique_partition(inst: &Instance, items: &ItemSet) -> Vec<Vec<usize>> {
    let adjacency = inst.adjacency_sets();
    let mut order: Vec<usize> = items.iter().collect();
    order.sort_by(|&a, &b| {
        inst.neighbors(b)
            .len()
            .cmp(&inst.neighbors(a).len())
            .then(a.cmp(&b))
    });
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    // intersection of the members' neighbourhoods, i.e. who may still join
    let mut joinable: Vec<ItemSet> = Vec::new();
    for v in order {
        match joinable.iter().position(|common| common.contains(v)) {
            Some(b) => {
                blocks[b].push(v);
                joinable[b].intersect_with(&adjacency[v]);
            }
            None => {
                blocks.push(vec![v]);
                joinable.push(adjacency[v].clone());
            }
        }
    }
    for block in &mut blocks {
        block.sort_unstable();
    }
    blocks
}

/// A hull segment of one block: taking it moves from one member to a better one.
#[derive(Debug, Clone, Copy)]
struct Segment {
    profit: u64,
    weight: u64,
}

/// Reusable buffers for the multiple-choice knapsack LP bound.
#[derive(Debug, Default)]
pub(crate) struct CliqueScratch {
    points: Vec<(u64, u64)>,
    hull: Vec<(u64, u64)>,
    segments: Vec<Segment>,
}

impl CliqueScratch {
    /// Floored LP optimum of: at most one item per block, total weight
    /// within `residual`, using only free items that fit on their own.
    pub(crate) fn bound<'a>(
        &mut self,
        blocks: impl IntoIterator<Item = &'a [usize]>,
        free: &ItemSet,
        residual: u64,
        profits: &[u64],
        weights: &[u64],
    ) -> u64 {
        self.segments.clear();
        for block in blocks {
            self.points.clear();
            self.points.extend(
                block
                    .iter()
                    .filter(|&&i| free.contains(i) && weights[i] <= residual)
                    .map(|&i| (weights[i], profits[i])),
            );
            self.push_block_hull();
        }
        self.fill(residual)
    }

    /// Upper concave hull of the block's (weight, profit) points through the
    /// origin, emitted as segments of strictly decreasing slope.
    fn push_block_hull(&mut self) {
        match self.points.len() {
            0 => return,
            1 => {
                let (w, p) = self.points[0];
                self.segments.push(Segment {
                    profit: p,
                    weight: w,
                });
                return;
            }
            _ => {}
        }
        self.points
            .sort_unstable_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        self.hull.clear();
        self.hull.push((0, 0));
        for &(w, p) in &self.points {
            let &(_, last_p) = self.hull.last().unwrap();
            if p <= last_p {
                continue;
            }
            while self.hull.len() >= 2 {
                let (w1, p1) = self.hull[self.hull.len() - 2];
                let (w2, p2) = self.hull[self.hull.len() - 1];
                // drop (w2, p2) unless slope(1->2) > slope(2->new)
                let left = (p2 - p1) as u128 * (w - w2) as u128;
                let right = (p - p2) as u128 * (w2 - w1) as u128;
                if left <= right {
                    self.hull.pop();
                } else {
                    break;
                }
            }
            self.hull.push((w, p));
        }
        for pair in self.hull.windows(2) {
            self.segments.push(Segment {
                profit: pair[1].1 - pair[0].1,
                weight: pair[1].0 - pair[0].0,
            });
        }
    }

    fn fill(&mut self, residual: u64) -> u64 {
        self.segments
            .sort_unstable_by(|a, b| cmp_ratio(a.profit, a.weight, b.profit, b.weight));
        let mut room = residual;
        let mut total = 0u64;
        for seg in &self.segments {
            if seg.weight <= room {
                room -= seg.weight;
                total += seg.profit;
            } else {
                total += (seg.profit as u128 * room as u128 / seg.weight as u128) as u64;
                break;
            }
        }
        total
    }
}
