//! Exact solving: depth-first branch-and-bound and an exhaustive oracle.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::bounds::{greedy_clique_partition, CliqueScratch};
use crate::error::{KpcError, Result};
use crate::heur::{greedy_construct, local_search};
use crate::instance::{evaluate, Instance, Solution};
use crate::itemset::ItemSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Feasible,
    /// Never produced for this problem (the empty selection is always feasible).
    Infeasible,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "Optimal",
            Status::Feasible => "Feasible",
            Status::Infeasible => "Infeasible",
            Status::Unknown => "Unknown",
        })
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "Optimal" => Ok(Status::Optimal),
            "Feasible" => Ok(Status::Feasible),
            "Infeasible" => Ok(Status::Infeasible),
            "Unknown" => Ok(Status::Unknown),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    pub best: Option<Solution>,
    /// Valid upper bound on the optimum at termination.
    pub upper_bound: u64,
    pub gap_percent: f64,
    pub nodes: u64,
    /// Seconds spent in the solve call, preprocessing and warm start included.
    pub wall_time: f64,
}

impl SolveResult {
    pub fn profit(&self) -> u64 {
        self.best.as_ref().map_or(0, |s| s.profit)
    }
}

/// `100 * (ub - lb) / ub`, or 0 when `ub == 0`.
pub fn gap_percent(lower: u64, upper: u64) -> f64 {
    if upper == 0 {
        0.0
    } else {
        100.0 * upper.saturating_sub(lower) as f64 / upper as f64
    }
}

/// Search limits; `None` disables a limit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Limits {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
}

impl Limits {
    pub fn time(seconds: f64) -> Result<Self> {
        if !(seconds.is_finite() && seconds > 0.0) {
            return Err(KpcError::LimitsInvalid(format!(
                "time limit must be positive, got {seconds}"
            )));
        }
        Ok(Limits {
            time_limit: Some(Duration::from_secs_f64(seconds)),
            node_limit: None,
        })
    }

    pub fn nodes(count: u64) -> Self {
        Limits {
            time_limit: None,
            node_limit: Some(count),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.time_limit == Some(Duration::ZERO) {
            return Err(KpcError::LimitsInvalid(
                "time limit must be positive".into(),
            ));
        }
        if self.node_limit == Some(0) {
            return Err(KpcError::LimitsInvalid(
                "node limit must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Relaxation evaluated at every search node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundKind {
    /// Fractional knapsack bound; ignores conflicts.
    Dantzig,
    /// Clique bound over a partition computed once at the root.
    CliqueRoot,
    /// Clique bound over a partition of the free items rebuilt at every node.
    #[default]
    CliqueDynamic,
}

impl FromStr for BoundKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "dantzig" => Ok(BoundKind::Dantzig),
            "clique-root" => Ok(BoundKind::CliqueRoot),
            "clique" | "clique-dynamic" => Ok(BoundKind::CliqueDynamic),
            other => Err(format!("unknown bound `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub limits: Limits,
    pub bound: BoundKind,
    /// Seed the incumbent with greedy construction plus local search.
    pub warm_start: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            limits: Limits::default(),
            bound: BoundKind::default(),
            warm_start: true,
        }
    }
}

impl SolverOptions {
    pub fn with_limits(limits: Limits) -> Self {
        SolverOptions {
            limits,
            ..Default::default()
        }
    }
}

/// Drops items heavier than the capacity.
///
/// Returns the reduced instance and, for each reduced index, the original index.
pub fn preprocess(inst: &Instance) -> (Instance, Vec<usize>) {
    let keep: Vec<usize> = (0..inst.len())
        .filter(|&i| inst.weight(i) <= inst.capacity())
        .collect();
    if keep.len() == inst.len() {
        return (inst.clone(), keep);
    }
    let mut new_index = vec![usize::MAX; inst.len()];
    for (k, &i) in keep.iter().enumerate() {
        new_index[i] = k;
    }
    let edges = inst
        .edges()
        .iter()
        .filter(|&&(i, j)| new_index[i] != usize::MAX && new_index[j] != usize::MAX)
        .map(|&(i, j)| (new_index[i], new_index[j]))
        .collect();
    let reduced = Instance::new(
        inst.name(),
        keep.iter().map(|&i| inst.profit(i)).collect(),
        keep.iter().map(|&i| inst.weight(i)).collect(),
        inst.capacity(),
        edges,
    )
    .expect("re-indexing a valid instance keeps it valid");
    (reduced, keep)
}

pub fn solve_bb(inst: &Instance, limits: Limits) -> Result<SolveResult> {
    solve_bb_with(inst, &SolverOptions::with_limits(limits))
}

pub fn solve_bb_with(inst: &Instance, options: &SolverOptions) -> Result<SolveResult> {
    options.limits.validate()?;
    let started = Instant::now();

    let incumbent = if options.warm_start {
        local_search(inst, &greedy_construct(inst))?
    } else {
        Solution {
            feasible: true,
            ..Solution::default()
        }
    };

    let (reduced, to_original) = preprocess(inst);
    let mut search = Search::new(&reduced, options, started, incumbent.profit);
    let outcome = search.run();

    let best = match outcome.improved {
        Some(ranks) => {
            let selected = ranks.iter().map(|&r| to_original[search.rank_to_item[r]]);
            evaluate(inst, selected)?
        }
        None => incumbent,
    };
    debug_assert!(best.feasible);

    let (status, upper_bound) = match outcome.abandoned_bound {
        None => (Status::Optimal, best.profit),
        Some(open) => {
            let ub = open.min(outcome.root_bound).max(best.profit);
            if ub == best.profit {
                (Status::Optimal, ub)
            } else {
                (Status::Feasible, ub)
            }
        }
    };
    Ok(SolveResult {
        status,
        gap_percent: gap_percent(best.profit, upper_bound),
        best: Some(best),
        upper_bound,
        nodes: search.nodes,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

struct Outcome {
    /// Best selection found by the search (ranks), if it beat the warm start.
    improved: Option<Vec<usize>>,
    /// Largest bound among subtrees left unexplored, if the search stopped early.
    abandoned_bound: Option<u64>,
    root_bound: u64,
}

const TIME_CHECK_INTERVAL: u64 = 1024;

/// Search state over items renumbered by ratio rank, so "first free item in
/// ratio order" is the lowest set bit and the Dantzig scan walks bits in order.
struct Search<'a> {
    options: &'a SolverOptions,
    started: Instant,
    capacity: u64,
    profits: Vec<u64>,
    weights: Vec<u64>,
    adjacency: Vec<ItemSet>,
    rank_to_item: Vec<usize>,
    root_blocks: Vec<Vec<usize>>,
    scratch: CliqueScratch,
    blocks: Vec<Vec<usize>>,
    joinable: Vec<ItemSet>,
    included: Vec<usize>,
    best_profit: u64,
    best: Option<Vec<usize>>,
    nodes: u64,
    abandoned: Option<u64>,
    stop: bool,
}

impl<'a> Search<'a> {
    fn new(inst: &Instance, options: &'a SolverOptions, started: Instant, incumbent: u64) -> Self {
        let n = inst.len();
        let rank_to_item = inst.ratio_order();
        let mut rank_of = vec![0; n];
        for (r, &i) in rank_to_item.iter().enumerate() {
            rank_of[i] = r;
        }
        let adjacency = rank_to_item
            .iter()
            .map(|&i| ItemSet::from_indices(n, inst.neighbors(i).iter().map(|&j| rank_of[j])))
            .collect();
        let root_blocks = if options.bound == BoundKind::CliqueRoot {
            greedy_clique_partition(inst, &ItemSet::full(n))
                .into_iter()
                .map(|b| b.into_iter().map(|i| rank_of[i]).collect())
                .collect()
        } else {
            Vec::new()
        };
        Search {
            options,
            started,
            capacity: inst.capacity(),
            profits: rank_to_item.iter().map(|&i| inst.profit(i)).collect(),
            weights: rank_to_item.iter().map(|&i| inst.weight(i)).collect(),
            adjacency,
            rank_to_item,
            root_blocks,
            scratch: CliqueScratch::default(),
            blocks: Vec::new(),
            joinable: Vec::new(),
            included: Vec::new(),
            best_profit: incumbent,
            best: None,
            nodes: 0,
            abandoned: None,
            stop: false,
        }
    }

    fn run(&mut self) -> Outcome {
        // preprocessing guarantees every item fits on its own
        let free = ItemSet::full(self.profits.len());
        let root_bound = self.relax(&free, self.capacity);
        self.dfs(&free, self.capacity, 0);
        Outcome {
            improved: self.best.take(),
            abandoned_bound: self.abandoned,
            root_bound,
        }
    }

    /// Bound on the profit obtainable from `free` within `residual`.
    fn relax(&mut self, free: &ItemSet, residual: u64) -> u64 {
        match self.options.bound {
            BoundKind::Dantzig => dantzig_ranked(free, residual, &self.profits, &self.weights),
            BoundKind::CliqueRoot => self.scratch.bound(
                self.root_blocks.iter().map(|b| b.as_slice()),
                free,
                residual,
                &self.profits,
                &self.weights,
            ),
            BoundKind::CliqueDynamic => {
                self.partition_free(free);
                self.scratch.bound(
                    self.blocks.iter().map(|b| b.as_slice()),
                    free,
                    residual,
                    &self.profits,
                    &self.weights,
                )
            }
        }
    }

    /// Greedy clique partition of `free`, visiting items by ratio rank.
    fn partition_free(&mut self, free: &ItemSet) {
        let mut used = 0;
        for v in free.iter() {
            match self.joinable[..used].iter().position(|c| c.contains(v)) {
                Some(b) => {
                    self.blocks[b].push(v);
                    self.joinable[b].intersect_with(&self.adjacency[v]);
                }
                None => {
                    if used == self.blocks.len() {
                        self.blocks.push(Vec::new());
                        self.joinable.push(ItemSet::new(free.universe()));
                    }
                    self.blocks[used].clear();
                    self.blocks[used].push(v);
                    self.joinable[used].clone_from(&self.adjacency[v]);
                    self.joinable[used].intersect_with(free);
                    used += 1;
                }
            }
        }
        self.blocks.truncate(used);
        self.joinable.truncate(used);
    }

    fn limit_reached(&mut self) -> bool {
        if self.stop {
            return true;
        }
        let limits = &self.options.limits;
        if limits.node_limit.is_some_and(|max| self.nodes >= max) {
            self.stop = true;
        } else if let Some(max) = limits.time_limit {
            if self.nodes.is_multiple_of(TIME_CHECK_INTERVAL) && self.started.elapsed() >= max {
                self.stop = true;
            }
        }
        self.stop
    }

    fn abandon(&mut self, bound: u64) {
        self.abandoned = Some(self.abandoned.map_or(bound, |b| b.max(bound)));
    }

    fn dfs(&mut self, free: &ItemSet, residual: u64, profit: u64) {
        if self
            .options
            .limits
            .node_limit
            .is_some_and(|max| self.nodes >= max)
        {
            // budget spent by a pruned or leaf sibling: keep this subtree's bound
            self.stop = true;
            let bound = profit + self.relax(free, residual);
            if bound > self.best_profit {
                self.abandon(bound);
            }
            return;
        }
        self.nodes += 1;
        if profit > self.best_profit {
            self.best_profit = profit;
            self.best = Some(self.included.clone());
        }
        let Some(branch) = free.iter().next() else {
            return;
        };
        let bound = profit + self.relax(free, residual);
        if bound <= self.best_profit {
            return;
        }
        if self.limit_reached() {
            self.abandon(bound);
            return;
        }

        let mut rest = free.clone();
        rest.remove(branch);

        // include: conflicts of `branch` and items that no longer fit leave the free set
        let room = residual - self.weights[branch];
        let mut child = rest.clone();
        child.difference_with(&self.adjacency[branch]);
        let too_heavy: Vec<usize> = child.iter().filter(|&i| self.weights[i] > room).collect();
        for i in too_heavy {
            child.remove(i);
        }
        debug_assert!(self
            .included
            .iter()
            .all(|&i| !self.adjacency[branch].contains(i)));
        self.included.push(branch);
        self.dfs(&child, room, profit + self.profits[branch]);
        self.included.pop();

        if self.stop {
            let bound = profit + self.relax(&rest, residual);
            if bound > self.best_profit {
                self.abandon(bound);
            }
            return;
        }
        self.dfs(&rest, residual, profit);
    }
}

/// Dantzig bound when items are already numbered by ratio rank.
fn dantzig_ranked(free: &ItemSet, residual: u64, profits: &[u64], weights: &[u64]) -> u64 {
    let mut room = residual;
    let mut total = 0u64;
    for i in free.iter() {
        let w = weights[i];
        if w > residual {
            continue;
        }
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

/// Exhaustive include/exclude enumeration; prunes only on capacity and
/// conflicts, never on bounds.
pub fn solve_oracle(inst: &Instance) -> Result<SolveResult> {
    const MAX_ITEMS: usize = 30;
    let n = inst.len();
    if n > MAX_ITEMS {
        return Err(KpcError::TooLargeForOracle(n));
    }
    let started = Instant::now();
    let conflict_masks: Vec<u32> = (0..n)
        .map(|i| inst.neighbors(i).iter().fold(0u32, |m, &j| m | 1 << j))
        .collect();

    struct Enumerator<'a> {
        inst: &'a Instance,
        masks: &'a [u32],
        best_profit: u64,
        best_mask: u32,
        nodes: u64,
    }

    impl Enumerator<'_> {
        fn visit(&mut self, item: usize, chosen: u32, weight: u64, profit: u64) {
            self.nodes += 1;
            if item == self.inst.len() {
                if profit > self.best_profit {
                    self.best_profit = profit;
                    self.best_mask = chosen;
                }
                return;
            }
            let w = weight + self.inst.weight(item);
            if w <= self.inst.capacity() && self.masks[item] & chosen == 0 {
                self.visit(
                    item + 1,
                    chosen | 1 << item,
                    w,
                    profit + self.inst.profit(item),
                );
            }
            self.visit(item + 1, chosen, weight, profit);
        }
    }

    let mut e = Enumerator {
        inst,
        masks: &conflict_masks,
        best_profit: 0,
        best_mask: 0,
        nodes: 0,
    };
    e.visit(0, 0, 0, 0);
    let best = evaluate(inst, (0..n).filter(|&i| e.best_mask >> i & 1 == 1))?;
    Ok(SolveResult {
        status: Status::Optimal,
        upper_bound: best.profit,
        gap_percent: 0.0,
        best: Some(best),
        nodes: e.nodes,
        wall_time: started.elapsed().as_secs_f64(),
    })
}
