//! Problem data, validation and solution evaluation.
//!
//! An [`Instance`] is a set of items with integral profits and weights, a
//! knapsack capacity and an undirected conflict graph over the items. Item
//! indices are 0-based everywhere, including the on-disk format.

use std::cmp::Ordering;

use crate::error::{KpcError, Result};
use crate::itemset::ItemSet;

/// Unvalidated instance data as it comes out of a parser or generator.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawInstance {
    pub name: String,
    pub profits: Vec<i64>,
    pub weights: Vec<i64>,
    pub capacity: i64,
    pub edges: Vec<(usize, usize)>,
}

/// Non-fatal findings reported by [`validate_instance_with_warnings`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationWarning {
    /// The edge appeared more than once (possibly in both orientations) and was merged.
    DuplicateEdgeMerged(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    name: String,
    profits: Vec<u64>,
    weights: Vec<u64>,
    capacity: u64,
    /// Sorted, `i < j`, no duplicates.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds and validates an instance from unsigned data.
    pub fn new(
        name: impl Into<String>,
        profits: Vec<u64>,
        weights: Vec<u64>,
        capacity: u64,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let to_i64 = |v: Vec<u64>| {
            v.into_iter()
                .map(|x| x.min(i64::MAX as u64) as i64)
                .collect()
        };
        validate_instance(RawInstance {
            name: name.into(),
            profits: to_i64(profits),
            weights: to_i64(weights),
            capacity: capacity.min(i64::MAX as u64) as i64,
            edges,
        })
    }

    /// The instance with no items and zero capacity.
    pub fn empty() -> Self {
        Instance {
            name: String::new(),
            profits: Vec::new(),
            weights: Vec::new(),
            capacity: 0,
            edges: Vec::new(),
            adjacency: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Number of items.
    #[inline]
    pub fn len(&self) -> usize {
        self.profits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.profits.is_empty()
    }

    #[inline]
    pub fn profits(&self) -> &[u64] {
        &self.profits
    }

    #[inline]
    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    #[inline]
    pub fn profit(&self, i: usize) -> u64 {
        self.profits[i]
    }

    #[inline]
    pub fn weight(&self, i: usize) -> u64 {
        self.weights[i]
    }

    #[inline]
    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    /// Conflict edges, canonical `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted conflict neighbours of item `i`.
    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn conflicts(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Conflict neighbourhoods as bit sets.
    pub fn adjacency_sets(&self) -> Vec<ItemSet> {
        self.adjacency
            .iter()
            .map(|nb| ItemSet::from_indices(self.len(), nb.iter().copied()))
            .collect()
    }

    /// Items sorted by profit/weight ratio, best first; ties go to the lower index.
    pub fn ratio_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.cmp_ratio(a, b).then(a.cmp(&b)));
        order
    }

    /// Orders `a` before `b` when `a` has the strictly larger profit/weight ratio.
    #[inline]
    pub fn cmp_ratio(&self, a: usize, b: usize) -> Ordering {
        cmp_ratio(
            self.profits[a],
            self.weights[a],
            self.profits[b],
            self.weights[b],
        )
    }
}

/// Compares `pa/wa` against `pb/wb` by cross-multiplication, larger ratio first.
#[inline]
pub fn cmp_ratio(pa: u64, wa: u64, pb: u64, wb: u64) -> Ordering {
    let lhs = pa as u128 * wb as u128;
    let rhs = pb as u128 * wa as u128;
    rhs.cmp(&lhs)
}

pub fn validate_instance(raw: RawInstance) -> Result<Instance> {
    validate_instance_with_warnings(raw).map(|(inst, _)| inst)
}

/// Validates and normalises raw data: edges become `(min, max)`, sorted and deduplicated.
pub fn validate_instance_with_warnings(
    raw: RawInstance,
) -> Result<(Instance, Vec<ValidationWarning>)> {
    let n = raw.profits.len();
    if raw.weights.len() != n {
        return Err(KpcError::IndexOutOfRange {
            index: raw.weights.len().min(n),
            n: raw.weights.len().max(n),
        });
    }
    if raw.capacity < 0 {
        return Err(KpcError::CapacityNegative(raw.capacity));
    }
    let check = |values: &[i64], field: &'static str| -> Result<Vec<u64>> {
        values
            .iter()
            .enumerate()
            .map(|(item, &value)| {
                if value < 1 {
                    Err(KpcError::NegativeOrZeroValue { item, field, value })
                } else {
                    Ok(value as u64)
                }
            })
            .collect()
    };
    let profits = check(&raw.profits, "profit")?;
    let weights = check(&raw.weights, "weight")?;

    let mut edges = Vec::with_capacity(raw.edges.len());
    for &(a, b) in &raw.edges {
        for index in [a, b] {
            if index >= n {
                return Err(KpcError::IndexOutOfRange { index, n });
            }
        }
        if a == b {
            return Err(KpcError::SelfLoop(a));
        }
        edges.push((a.min(b), a.max(b)));
    }
    edges.sort_unstable();
    let mut warnings = Vec::new();
    edges.dedup_by(|later, kept| {
        let dup = later == kept;
        if dup {
            warnings.push(ValidationWarning::DuplicateEdgeMerged(later.0, later.1));
        }
        dup
    });
    if !warnings.is_empty() {
        log::debug!("{}: merged {} duplicate edges", raw.name, warnings.len());
    }

    let mut adjacency = vec![Vec::new(); n];
    for &(i, j) in &edges {
        adjacency[i].push(j);
        adjacency[j].push(i);
    }
    for nb in &mut adjacency {
        nb.sort_unstable();
    }

    Ok((
        Instance {
            name: raw.name,
            profits,
            weights,
            capacity: raw.capacity as u64,
            edges,
            adjacency,
        },
        warnings,
    ))
}

/// A selected subset of items together with its evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    /// Sorted, duplicate-free.
    pub selected: Vec<usize>,
    pub profit: u64,
    pub weight: u64,
    pub feasible: bool,
}

impl Solution {
    pub fn contains(&self, i: usize) -> bool {
        self.selected.binary_search(&i).is_ok()
    }
}

/// Computes profit, weight and feasibility of `selected` against `inst`.
pub fn evaluate(inst: &Instance, selected: impl IntoIterator<Item = usize>) -> Result<Solution> {
    let n = inst.len();
    let mut items: Vec<usize> = selected.into_iter().collect();
    items.sort_unstable();
    items.dedup();
    if let Some(&index) = items.iter().find(|&&i| i >= n) {
        return Err(KpcError::IndexOutOfRange { index, n });
    }
    let profit = items.iter().map(|&i| inst.profit(i)).sum();
    let weight: u64 = items.iter().map(|&i| inst.weight(i)).sum();
    let conflict_free = items.iter().all(|&i| {
        inst.neighbors(i)
            .iter()
            .all(|j| items.binary_search(j).is_err())
    });
    Ok(Solution {
        feasible: weight <= inst.capacity() && conflict_free,
        selected: items,
        profit,
        weight,
    })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Six items, capacity 20, four conflicts; optimum 21 with items {1, 3, 4, 5}.
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
}
