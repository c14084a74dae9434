//! Batch solving and table-style aggregation.
//!
//! A campaign solves every instance of a list, one worker per job, and
//! produces one [`InstanceRecord`] per instance. Records are sorted by
//! instance name before they are written or aggregated, so output does not
//! depend on scheduling.
//!
//! Aggregation follows the layout of the usual result tables: set1 grouped
//! by (variant, class) and by (variant, density), set2 grouped by
//! (items/capacity, density) separately for correlated and random profits.
//! "Sec" averages over instances proven optimal only; "Gap %" averages over
//! every instance of the group.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{KpcError, Result};
use crate::exact::{
    solve_bb_with, solve_oracle, BoundKind, Limits, SolveResult, SolverOptions, Status,
};
use crate::format::read_instance;
use crate::gen::{generate, Density, Family, GeneratorSpec, ProfitType};
use crate::instance::Instance;

pub const CSV_HEADER: [&str; 7] = [
    "instance",
    "status",
    "profit",
    "upper_bound",
    "gap_percent",
    "nodes",
    "seconds",
];

pub const DEFAULT_TIME_LIMIT: f64 = 600.0;

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRecord {
    pub instance: String,
    pub status: Status,
    pub profit: u64,
    pub upper_bound: u64,
    pub gap_percent: f64,
    pub nodes: u64,
    pub seconds: f64,
}

/// Rounds to the 6 decimals written to CSV so records survive a round trip.
fn micro(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

impl InstanceRecord {
    pub fn from_result(instance: impl Into<String>, result: &SolveResult) -> Self {
        InstanceRecord {
            instance: instance.into(),
            status: result.status,
            profit: result.profit(),
            upper_bound: result.upper_bound,
            gap_percent: micro(result.gap_percent),
            nodes: result.nodes,
            seconds: micro(result.wall_time),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

pub fn write_csv<W: Write>(records: &[InstanceRecord], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for r in records {
        writer.write_record([
            r.instance.clone(),
            r.status.to_string(),
            r.profit.to_string(),
            r.upper_bound.to_string(),
            format!("{:.6}", r.gap_percent),
            r.nodes.to_string(),
            format!("{:.6}", r.seconds),
        ])?;
    }
    writer.flush().map_err(|e| KpcError::Csv(e.into()))?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<InstanceRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(KpcError::Campaign(format!(
            "unexpected CSV header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut records = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        let field = |k: usize| rec.get(k).unwrap_or_default();
        let bad = |k: usize| KpcError::parse(line, format!("bad {} `{}`", CSV_HEADER[k], field(k)));
        records.push(InstanceRecord {
            instance: field(0).to_string(),
            status: Status::from_str(field(1)).map_err(|_| bad(1))?,
            profit: field(2).parse().map_err(|_| bad(2))?,
            upper_bound: field(3).parse().map_err(|_| bad(3))?,
            gap_percent: field(4).parse().map_err(|_| bad(4))?,
            nodes: field(5).parse().map_err(|_| bad(5))?,
            seconds: field(6).parse().map_err(|_| bad(6))?,
        });
    }
    Ok(records)
}

/// Where a campaign gets an instance from.
#[derive(Debug, Clone)]
pub enum InstanceSource {
    File(PathBuf),
    Generated(GeneratorSpec),
    Inline(Instance),
}

impl InstanceSource {
    pub fn label(&self) -> String {
        match self {
            InstanceSource::File(p) => p.display().to_string(),
            InstanceSource::Generated(spec) => spec.instance_name(),
            InstanceSource::Inline(inst) => inst.name().to_string(),
        }
    }

    pub fn load(&self) -> Result<Instance> {
        match self {
            InstanceSource::File(p) => read_instance(p),
            InstanceSource::Generated(spec) => generate(spec),
            InstanceSource::Inline(inst) => Ok(inst.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    BranchAndBound,
    Oracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    /// Seconds per instance.
    pub time_limit: f64,
    pub node_limit: Option<u64>,
    pub solver: SolverKind,
    pub bound: BoundKind,
    pub jobs: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            time_limit: DEFAULT_TIME_LIMIT,
            node_limit: None,
            solver: SolverKind::default(),
            bound: BoundKind::default(),
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.jobs == 0 {
            return Err(KpcError::Campaign("jobs must be at least 1".into()));
        }
        self.limits().map(|_| ())
    }

    pub fn limits(&self) -> Result<Limits> {
        let mut limits = Limits::time(self.time_limit)?;
        limits.node_limit = self.node_limit;
        limits.validate()?;
        Ok(limits)
    }

    pub fn solve(&self, inst: &Instance) -> Result<SolveResult> {
        match self.solver {
            SolverKind::BranchAndBound => solve_bb_with(
                inst,
                &SolverOptions {
                    limits: self.limits()?,
                    bound: self.bound,
                    warm_start: true,
                },
            ),
            SolverKind::Oracle => solve_oracle(inst),
        }
    }
}

/// Per-instance records plus the sources that could not be loaded or solved.
#[derive(Debug, Clone)]
pub struct CampaignRun {
    pub records: Vec<InstanceRecord>,
    pub skipped: Vec<(String, String)>,
}

pub fn run_campaign(sources: &[InstanceSource], config: &CampaignConfig) -> Result<CampaignRun> {
    config.validate()?;
    if sources.is_empty() {
        return Err(KpcError::Campaign("no instances to run".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| KpcError::Campaign(e.to_string()))?;
    let outcomes: Vec<std::result::Result<InstanceRecord, (String, String)>> = pool.install(|| {
        sources
            .par_iter()
            .map(|src| {
                let inst = src.load().map_err(|e| (src.label(), e.to_string()))?;
                let result = config
                    .solve(&inst)
                    .map_err(|e| (src.label(), e.to_string()))?;
                log::debug!("{}: {} {}", inst.name(), result.status, result.profit());
                Ok(InstanceRecord::from_result(inst.name(), &result))
            })
            .collect()
    });
    let mut records = Vec::with_capacity(outcomes.len());
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err((label, msg)) => {
                log::warn!("skipping {label}: {msg}");
                skipped.push((label, msg));
            }
        }
    }
    if records.is_empty() {
        return Err(KpcError::Campaign(format!(
            "all {} instances failed to load or solve",
            sources.len()
        )));
    }
    records.sort_by(|a, b| a.instance.cmp(&b.instance));
    Ok(CampaignRun { records, skipped })
}

/// Which table a group belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TableKind {
    Set1ByClassType,
    Set1ByClassDensity,
    Set2Correlated,
    Set2Random,
    /// Instances whose names do not identify a generated benchmark.
    Other,
}

impl TableKind {
    pub fn title(self) -> &'static str {
        match self {
            TableKind::Set1ByClassType => "Set 1 by class and type",
            TableKind::Set1ByClassDensity => "Set 1 by class and density",
            TableKind::Set2Correlated => "Set 2, correlated profits, by items/capacity and density",
            TableKind::Set2Random => "Set 2, random profits, by items/capacity and density",
            TableKind::Other => "Other instances",
        }
    }

    fn key_headers(self) -> [&'static str; 2] {
        match self {
            TableKind::Set1ByClassType => ["Class", "T"],
            TableKind::Set1ByClassDensity => ["Class", "D"],
            TableKind::Set2Correlated | TableKind::Set2Random => ["Items/Cap", "Density"],
            TableKind::Other => ["Group", ""],
        }
    }
}

/// Row key within a table; the derived order is the printed row order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupKey {
    ClassType {
        profit_type: ProfitType,
        multiplier: u64,
        class_id: u8,
    },
    ClassDensity {
        profit_type: ProfitType,
        multiplier: u64,
        density: Density,
    },
    ItemsCapDensity {
        n_items: usize,
        capacity: u64,
        density: Density,
    },
    All,
}

impl GroupKey {
    /// The two label cells printed for this row.
    pub fn labels(&self) -> [String; 2] {
        let variant = |p: &ProfitType, m: &u64| format!("{}{}", p.letter(), m);
        match self {
            GroupKey::ClassType {
                profit_type,
                multiplier,
                class_id,
            } => [variant(profit_type, multiplier), class_id.to_string()],
            GroupKey::ClassDensity {
                profit_type,
                multiplier,
                density,
            } => [variant(profit_type, multiplier), density.format(3)],
            GroupKey::ItemsCapDensity {
                n_items,
                capacity,
                density,
            } => [format!("{n_items}/{capacity}"), density.format(4)],
            GroupKey::All => ["all".into(), String::new()],
        }
    }
}

/// The table rows an instance contributes to.
pub fn group_keys(instance: &str) -> Vec<(TableKind, GroupKey)> {
    let Some(spec) = GeneratorSpec::from_instance_name(instance, 0) else {
        return vec![(TableKind::Other, GroupKey::All)];
    };
    match spec.family {
        Family::Set1 => vec![
            (
                TableKind::Set1ByClassType,
                GroupKey::ClassType {
                    profit_type: spec.profit_type,
                    multiplier: spec.capacity_multiplier,
                    class_id: spec.class_id,
                },
            ),
            (
                TableKind::Set1ByClassDensity,
                GroupKey::ClassDensity {
                    profit_type: spec.profit_type,
                    multiplier: spec.capacity_multiplier,
                    density: spec.density,
                },
            ),
        ],
        Family::Set2 => {
            let table = match spec.profit_type {
                ProfitType::Correlated => TableKind::Set2Correlated,
                ProfitType::Random => TableKind::Set2Random,
            };
            vec![(
                table,
                GroupKey::ItemsCapDensity {
                    n_items: spec.n_items,
                    capacity: spec.base_capacity,
                    density: spec.density,
                },
            )]
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupReport {
    pub key: GroupKey,
    pub size: usize,
    pub opt_count: usize,
    /// `None` when no instance of the group was solved to optimality.
    pub mean_seconds_over_solved: Option<f64>,
    pub mean_gap_percent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableReport {
    pub kind: TableKind,
    pub groups: Vec<GroupReport>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CampaignReport {
    pub tables: Vec<TableReport>,
}

impl CampaignReport {
    pub fn table(&self, kind: TableKind) -> Option<&TableReport> {
        self.tables.iter().find(|t| t.kind == kind)
    }
}

#[derive(Default)]
struct Accumulator {
    size: usize,
    opt_count: usize,
    solved_seconds: f64,
    gap_sum: f64,
}

pub fn aggregate(records: &[InstanceRecord]) -> CampaignReport {
    let mut tables: BTreeMap<TableKind, BTreeMap<GroupKey, Accumulator>> = BTreeMap::new();
    for r in records {
        for (kind, key) in group_keys(&r.instance) {
            let acc = tables.entry(kind).or_default().entry(key).or_default();
            acc.size += 1;
            acc.gap_sum += r.gap_percent;
            if r.is_optimal() {
                acc.opt_count += 1;
                acc.solved_seconds += r.seconds;
            }
        }
    }
    CampaignReport {
        tables: tables
            .into_iter()
            .map(|(kind, groups)| TableReport {
                kind,
                groups: groups
                    .into_iter()
                    .map(|(key, acc)| GroupReport {
                        key,
                        size: acc.size,
                        opt_count: acc.opt_count,
                        mean_seconds_over_solved: (acc.opt_count > 0)
                            .then(|| acc.solved_seconds / acc.opt_count as f64),
                        mean_gap_percent: if acc.opt_count == acc.size {
                            0.0
                        } else {
                            acc.gap_sum / acc.size as f64
                        },
                    })
                    .collect(),
            })
            .collect(),
    }
}

pub fn render_markdown(report: &CampaignReport) -> String {
    let mut out = String::new();
    for table in &report.tables {
        let [k1, k2] = table.kind.key_headers();
        let _ = writeln!(out, "### {}\n", table.kind.title());
        let _ = writeln!(out, "| {k1} | {k2} | N | Opt | Sec | Gap % |");
        let _ = writeln!(out, "|---|---|---:|---:|---:|---:|");
        let mut previous_first = String::new();
        for g in &table.groups {
            let [a, b] = g.key.labels();
            let first = if a == previous_first {
                String::new()
            } else {
                a.clone()
            };
            previous_first = a;
            let sec = g
                .mean_seconds_over_solved
                .map_or_else(|| "-".to_string(), |s| format!("{s:.1}"));
            let _ = writeln!(
                out,
                "| {first} | {b} | {} | {} | {sec} | {:.2} |",
                g.size, g.opt_count, g.mean_gap_percent
            );
        }
        let rows = table.groups.len().max(1) as f64;
        let mean_opt = table.groups.iter().map(|g| g.opt_count as f64).sum::<f64>() / rows;
        let secs: Vec<f64> = table
            .groups
            .iter()
            .filter_map(|g| g.mean_seconds_over_solved)
            .collect();
        let mean_sec = if secs.is_empty() {
            "-".to_string()
        } else {
            format!("{:.1}", secs.iter().sum::<f64>() / secs.len() as f64)
        };
        let mean_gap = table.groups.iter().map(|g| g.mean_gap_percent).sum::<f64>() / rows;
        let _ = writeln!(
            out,
            "| Average | | | {mean_opt:.1} | {mean_sec} | {mean_gap:.2} |\n"
        );
    }
    out
}
