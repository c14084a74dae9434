//! Construction and improvement heuristics.

use crate::error::{KpcError, Result};
use crate::instance::{evaluate, Instance, Solution};
use crate::itemset::ItemSet;

/// Scans items by decreasing profit/weight ratio and keeps every item that
/// fits the remaining capacity and conflicts with nothing kept so far.
pub fn greedy_construct(inst: &Instance) -> Solution {
    let order = inst.ratio_order();
    let mut blocked = vec![false; inst.len()];
    let mut room = inst.capacity();
    let mut selected = Vec::new();
    let mut profit = 0;
    for i in order {
        if blocked[i] || inst.weight(i) > room {
            continue;
        }
        room -= inst.weight(i);
        profit += inst.profit(i);
        selected.push(i);
        for &j in inst.neighbors(i) {
            blocked[j] = true;
        }
    }
    selected.sort_unstable();
    Solution {
        selected,
        profit,
        weight: inst.capacity() - room,
        feasible: true,
    }
}

/// The move applied by one local search step.
#[derive(Debug, Clone, Copy)]
enum Move {
    Add(usize),
    /// Exchange `out` for `into`, then refill greedily by ratio.
    Swap {
        out: usize,
        into: usize,
    },
}

/// Best-improvement local search over add and swap-with-refill moves.
///
/// A swap removes one selected item, inserts one unselected item and then
/// re-runs the greedy scan over the freed capacity (never re-inserting the
/// removed item). Drop moves are part of the neighbourhood in principle but
/// can never raise profit since every profit is positive, so they are not
/// enumerated. Ties between equal gains go to adds, then to the
/// lexicographically smallest `(out, into)` swap. Every accepted move
/// strictly increases profit, which bounds the number of iterations.
pub fn local_search(inst: &Instance, start: &Solution) -> Result<Solution> {
    let start = evaluate(inst, start.selected.iter().copied())?;
    if !start.feasible {
        return Err(KpcError::InfeasibleStart);
    }
    let mut state = LocalState::new(inst, &start.selected);
    while let Some((mv, _gain)) = state.best_move() {
        state.apply(mv);
    }
    let selected: Vec<usize> = (0..inst.len()).filter(|&i| state.selected[i]).collect();
    let sol = evaluate(inst, selected)?;
    debug_assert!(sol.feasible && sol.profit >= start.profit);
    Ok(sol)
}

struct LocalState<'a> {
    inst: &'a Instance,
    order: Vec<usize>,
    adjacency: Vec<ItemSet>,
    selected: Vec<bool>,
    /// number of selected neighbours of each item
    conflicts: Vec<u32>,
    weight: u64,
    /// fill-time marker: `stamp[k] == epoch` means k is blocked in this trial
    stamp: Vec<u64>,
    epoch: u64,
    min_weight: u64,
    /// max p/w over all items as (p, w)
    best_ratio: (u64, u64),
}

impl<'a> LocalState<'a> {
    fn new(inst: &'a Instance, selected: &[usize]) -> Self {
        let n = inst.len();
        let order = inst.ratio_order();
        let best_ratio = order
            .first()
            .map(|&i| (inst.profit(i), inst.weight(i)))
            .unwrap_or((0, 1));
        let mut state = LocalState {
            inst,
            adjacency: inst.adjacency_sets(),
            order,
            selected: vec![false; n],
            conflicts: vec![0; n],
            weight: 0,
            stamp: vec![0; n],
            epoch: 0,
            min_weight: inst.weights().iter().copied().min().unwrap_or(u64::MAX),
            best_ratio,
        };
        for &i in selected {
            state.insert(i);
        }
        state
    }

    fn insert(&mut self, i: usize) {
        self.selected[i] = true;
        self.weight += self.inst.weight(i);
        for &j in self.inst.neighbors(i) {
            self.conflicts[j] += 1;
        }
    }

    fn erase(&mut self, i: usize) {
        self.selected[i] = false;
        self.weight -= self.inst.weight(i);
        for &j in self.inst.neighbors(i) {
            self.conflicts[j] -= 1;
        }
    }

    fn best_move(&mut self) -> Option<(Move, u64)> {
        let inst = self.inst;
        let cap = inst.capacity();
        let mut best: Option<(Move, u64)> = None;
        let mut best_gain = 0u64;

        for j in 0..inst.len() {
            if !self.selected[j]
                && self.conflicts[j] == 0
                && self.weight + inst.weight(j) <= cap
                && inst.profit(j) > best_gain
            {
                best_gain = inst.profit(j);
                best = Some((Move::Add(j), best_gain));
            }
        }

        let members: Vec<usize> = (0..inst.len()).filter(|&i| self.selected[i]).collect();
        for &out in &members {
            let base = self.weight - inst.weight(out);
            for into in 0..inst.len() {
                if self.selected[into] {
                    continue;
                }
                let own = self.conflicts[into] - self.adjacency[out].contains(into) as u32;
                if own != 0 || base + inst.weight(into) > cap {
                    continue;
                }
                let room = cap - base - inst.weight(into);
                let fill_cap =
                    (self.best_ratio.0 as u128 * room as u128 / self.best_ratio.1 as u128) as u64;
                let optimistic = (inst.profit(into) + fill_cap) as i128 - inst.profit(out) as i128;
                if optimistic <= best_gain as i128 {
                    continue;
                }
                let fill = self.refill_profit(out, into, room);
                let gain = (inst.profit(into) + fill) as i128 - inst.profit(out) as i128;
                if gain > best_gain as i128 {
                    best_gain = gain as u64;
                    best = Some((Move::Swap { out, into }, best_gain));
                }
            }
        }
        best
    }

    /// Profit the greedy refill would add after swapping `out` for `into`.
    fn refill_profit(&mut self, out: usize, into: usize, room: u64) -> u64 {
        self.refill(out, into, room, |_| {})
    }

    fn refill(
        &mut self,
        out: usize,
        into: usize,
        mut room: u64,
        mut take: impl FnMut(usize),
    ) -> u64 {
        let inst = self.inst;
        self.epoch += 1;
        let epoch = self.epoch;
        self.stamp[out] = epoch;
        self.stamp[into] = epoch;
        for &k in inst.neighbors(into) {
            self.stamp[k] = epoch;
        }
        let mut gained = 0;
        for &k in &self.order {
            if room < self.min_weight {
                break;
            }
            if self.selected[k] || self.stamp[k] == epoch || inst.weight(k) > room {
                continue;
            }
            let own = self.conflicts[k] - self.adjacency[out].contains(k) as u32;
            if own != 0 {
                continue;
            }
            room -= inst.weight(k);
            gained += inst.profit(k);
            self.stamp[k] = epoch;
            for &x in inst.neighbors(k) {
                self.stamp[x] = epoch;
            }
            take(k);
        }
        gained
    }

    fn apply(&mut self, mv: Move) {
        match mv {
            Move::Add(j) => self.insert(j),
            Move::Swap { out, into } => {
                let room = self.inst.capacity()
                    - (self.weight - self.inst.weight(out))
                    - self.inst.weight(into);
                let mut taken = Vec::new();
                self.refill(out, into, room, |k| taken.push(k));
                self.erase(out);
                self.insert(into);
                for k in taken {
                    self.insert(k);
                }
            }
        }
    }
}
