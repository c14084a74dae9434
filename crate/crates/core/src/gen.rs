//! Deterministic benchmark generation.
//!
//! Two families are produced. `set1` has eight classes of bin-packing style
//! weights (classes 1-4: weights in `[20, 100]`, capacity 150, 120/250/500/1000
//! items; classes 5-8: weights in `[250, 500]`, capacity 1000, 60/120/349/501
//! items), six variants `{C,R} x {1,3,10}` (profit type times capacity
//! multiplier), conflict densities 0.1..=0.9 and ten replicates, 4320
//! instances in total. `set2` has 500 or 1000 items, capacity 1000 or 2000,
//! densities `{0.001, 0.002, 0.005, 0.01, 0.02, 0.05}`, both profit types and
//! ten replicates, 480 instances.
//!
//! Every instance is a pure function of its [`GeneratorSpec`]:
//!
//! 1. seed = FNV-1a-64(canonical string) XOR master seed, see [`derive_seed`];
//! 2. one splitmix64 stream yields `n` weights, then `n` profits for type R
//!    (type C sets `p = w + 10` without drawing);
//! 3. exactly `m = round_half_up(d * n(n-1)/2)` distinct edges come from a
//!    partial Fisher-Yates shuffle of all pairs `(i, j)`, `i < j`, listed in
//!    lexicographic order.
//!
//! Uniform integers use modulo reduction `lo + x % (hi - lo + 1)`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{KpcError, Result};
use crate::instance::{Instance, RawInstance};

/// The splitmix64 generator (Steele, Lea and Flood).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[lo, hi]` by modulo reduction.
    #[inline]
    pub fn uniform(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.next_u64() % (hi - lo + 1)
    }

    /// Uniform in `[0, bound)` by modulo reduction.
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    bytes
        .iter()
        .fold(OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(PRIME))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Set1,
    Set2,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Set1 => "set1",
            Family::Set2 => "set2",
        })
    }
}

impl FromStr for Family {
    type Err = KpcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "set1" => Ok(Family::Set1),
            "set2" => Ok(Family::Set2),
            other => Err(KpcError::SpecInvalid(format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProfitType {
    /// `p_i = w_i + 10`
    Correlated,
    /// `p_i` uniform in `[1, 100]`
    Random,
}

impl ProfitType {
    pub fn letter(self) -> char {
        match self {
            ProfitType::Correlated => 'C',
            ProfitType::Random => 'R',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c {
            'C' => Some(ProfitType::Correlated),
            'R' => Some(ProfitType::Random),
            _ => None,
        }
    }
}

/// Conflict density stored exactly, in units of 1/10000.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Density(u32);

impl Density {
    pub const SCALE: u32 = 10_000;

    pub const fn from_ten_thousandths(units: u32) -> Self {
        Density(units)
    }

    pub fn ten_thousandths(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / Self::SCALE as f64
    }

    /// `round_half_up(d * n(n-1)/2)` in exact integer arithmetic.
    pub fn edge_count(self, n: usize) -> usize {
        let pairs = pair_count(n) as u128;
        ((2 * self.0 as u128 * pairs + Self::SCALE as u128) / (2 * Self::SCALE as u128)) as usize
    }

    /// Fixed-point rendering with `decimals` digits (3 or 4).
    pub fn format(self, decimals: usize) -> String {
        let whole = self.0 / Self::SCALE;
        let frac = self.0 % Self::SCALE;
        match decimals {
            4 => format!("{whole}.{frac:04}"),
            3 => format!("{whole}.{:03}", frac / 10),
            _ => unreachable!("densities render with 3 or 4 decimals"),
        }
    }

    /// Parses a decimal with at most four fractional digits.
    pub fn parse(text: &str) -> Option<Self> {
        let (whole, frac) = text.split_once('.').unwrap_or((text, ""));
        if frac.len() > 4 || whole.is_empty() {
            return None;
        }
        let whole: u32 = whole.parse().ok()?;
        let mut units = 0;
        for (k, c) in frac.chars().enumerate() {
            units += c.to_digit(10)? * 10u32.pow(3 - k as u32);
        }
        Some(Density(whole.checked_mul(Self::SCALE)? + units))
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(4))
    }
}

pub const SET1_DENSITIES: [Density; 9] = [
    Density(1000),
    Density(2000),
    Density(3000),
    Density(4000),
    Density(5000),
    Density(6000),
    Density(7000),
    Density(8000),
    Density(9000),
];

pub const SET2_DENSITIES: [Density; 6] = [
    Density(10),
    Density(20),
    Density(50),
    Density(100),
    Density(200),
    Density(500),
];

pub const SET1_VARIANTS: [(ProfitType, u64); 6] = [
    (ProfitType::Correlated, 1),
    (ProfitType::Correlated, 3),
    (ProfitType::Correlated, 10),
    (ProfitType::Random, 1),
    (ProfitType::Random, 3),
    (ProfitType::Random, 10),
];

pub const SET2_ITEMS: [usize; 2] = [500, 1000];
pub const SET2_CAPACITIES: [u64; 2] = [1000, 2000];
pub const REPLICATES: u32 = 10;

/// Item count, weight range and base capacity of a set1 class.
pub fn set1_class(class_id: u8) -> Option<(usize, (u64, u64), u64)> {
    let n = match class_id {
        1 => 120,
        2 => 250,
        3 => 500,
        4 => 1000,
        5 => 60,
        6 => 120,
        7 => 349,
        8 => 501,
        _ => return None,
    };
    if class_id <= 4 {
        Some((n, (20, 100), 150))
    } else {
        Some((n, (250, 500), 1000))
    }
}

const SET2_WEIGHTS: (u64, u64) = (20, 100);
const RANDOM_PROFITS: (u64, u64) = (1, 100);
const CORRELATION_OFFSET: u64 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    pub family: Family,
    /// 1..=8 for set1, 0 for set2.
    pub class_id: u8,
    pub n_items: usize,
    pub weight_range: (u64, u64),
    pub base_capacity: u64,
    pub capacity_multiplier: u64,
    pub profit_type: ProfitType,
    pub density: Density,
    pub replicate: u32,
    pub master_seed: u64,
}

impl GeneratorSpec {
    pub fn set1(
        class_id: u8,
        profit_type: ProfitType,
        capacity_multiplier: u64,
        density: Density,
        replicate: u32,
        master_seed: u64,
    ) -> Result<Self> {
        let (n_items, weight_range, base_capacity) = set1_class(class_id)
            .ok_or_else(|| KpcError::SpecInvalid(format!("set1 class {class_id} not in 1..=8")))?;
        let spec = GeneratorSpec {
            family: Family::Set1,
            class_id,
            n_items,
            weight_range,
            base_capacity,
            capacity_multiplier,
            profit_type,
            density,
            replicate,
            master_seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn set2(
        n_items: usize,
        base_capacity: u64,
        profit_type: ProfitType,
        density: Density,
        replicate: u32,
        master_seed: u64,
    ) -> Result<Self> {
        let spec = GeneratorSpec {
            family: Family::Set2,
            class_id: 0,
            n_items,
            weight_range: SET2_WEIGHTS,
            base_capacity,
            capacity_multiplier: 1,
            profit_type,
            density,
            replicate,
            master_seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(KpcError::SpecInvalid(msg));
        let d = self.density.ten_thousandths();
        if d == 0 || d >= Density::SCALE {
            return bad(format!("density {} outside (0, 1)", self.density));
        }
        if self.replicate >= REPLICATES {
            return bad(format!(
                "replicate {} not in 0..{REPLICATES}",
                self.replicate
            ));
        }
        match self.family {
            Family::Set1 => {
                let Some((n, range, cap)) = set1_class(self.class_id) else {
                    return bad(format!("set1 class {} not in 1..=8", self.class_id));
                };
                if (self.n_items, self.weight_range, self.base_capacity) != (n, range, cap) {
                    return bad(format!(
                        "set1 class {} requires n={n}, weights {range:?}, capacity {cap}",
                        self.class_id
                    ));
                }
                if ![1, 3, 10].contains(&self.capacity_multiplier) {
                    return bad(format!(
                        "capacity multiplier {} not in {{1, 3, 10}}",
                        self.capacity_multiplier
                    ));
                }
                if !d.is_multiple_of(10) {
                    return bad(format!(
                        "set1 density {} has more than 3 decimals",
                        self.density
                    ));
                }
            }
            Family::Set2 => {
                if self.class_id != 0 {
                    return bad("set2 has no classes".into());
                }
                if !SET2_ITEMS.contains(&self.n_items) {
                    return bad(format!(
                        "set2 item count {} not in {SET2_ITEMS:?}",
                        self.n_items
                    ));
                }
                if !SET2_CAPACITIES.contains(&self.base_capacity) {
                    return bad(format!(
                        "set2 capacity {} not in {SET2_CAPACITIES:?}",
                        self.base_capacity
                    ));
                }
                if self.capacity_multiplier != 1 || self.weight_range != SET2_WEIGHTS {
                    return bad("set2 uses multiplier 1 and weights [20, 100]".into());
                }
            }
        }
        Ok(())
    }

    pub fn capacity(&self) -> u64 {
        self.base_capacity * self.capacity_multiplier
    }

    /// Variant label: `C1`, `R10`, ... for set1; `C` or `R` for set2.
    pub fn variant(&self) -> String {
        match self.family {
            Family::Set1 => format!("{}{}", self.profit_type.letter(), self.capacity_multiplier),
            Family::Set2 => self.profit_type.letter().to_string(),
        }
    }

    fn density_text(&self) -> String {
        match self.family {
            Family::Set1 => self.density.format(3),
            Family::Set2 => self.density.format(4),
        }
    }

    /// `family/class/n/mult/type/density/rep`; set2 has no class and puts
    /// its base capacity in that slot so both capacities get distinct seeds.
    pub fn canonical_string(&self) -> String {
        let class_slot = match self.family {
            Family::Set1 => self.class_id as u64,
            Family::Set2 => self.base_capacity,
        };
        format!(
            "{}/{}/{}/{}/{}/{}/{}",
            self.family,
            class_slot,
            self.n_items,
            self.capacity_multiplier,
            self.profit_type.letter(),
            self.density_text(),
            self.replicate
        )
    }

    /// Stable instance name; also the relative output path without extension.
    pub fn instance_name(&self) -> String {
        match self.family {
            Family::Set1 => format!(
                "set1/class{}/{}/d{}/inst{}",
                self.class_id,
                self.variant(),
                self.density_text(),
                self.replicate
            ),
            Family::Set2 => format!(
                "set2/n{}_c{}/{}/d{}/inst{}",
                self.n_items,
                self.base_capacity,
                self.variant(),
                self.density_text(),
                self.replicate
            ),
        }
    }

    pub fn relative_path(&self) -> PathBuf {
        PathBuf::from(format!("{}.kpc", self.instance_name()))
    }

    /// Inverse of [`GeneratorSpec::instance_name`].
    pub fn from_instance_name(name: &str, master_seed: u64) -> Option<Self> {
        let parts: Vec<&str> = name.split('/').collect();
        let [family, group, variant, density, rep] = parts.as_slice() else {
            return None;
        };
        let density = Density::parse(density.strip_prefix('d')?)?;
        let replicate: u32 = rep.strip_prefix("inst")?.parse().ok()?;
        let mut letters = variant.chars();
        let profit_type = ProfitType::from_letter(letters.next()?)?;
        let spec = match *family {
            "set1" => {
                let class_id: u8 = group.strip_prefix("class")?.parse().ok()?;
                let mult: u64 = letters.as_str().parse().ok()?;
                GeneratorSpec::set1(class_id, profit_type, mult, density, replicate, master_seed)
            }
            "set2" => {
                if !letters.as_str().is_empty() {
                    return None;
                }
                let (n, cap) = group.strip_prefix('n')?.split_once("_c")?;
                GeneratorSpec::set2(
                    n.parse().ok()?,
                    cap.parse().ok()?,
                    profit_type,
                    density,
                    replicate,
                    master_seed,
                )
            }
            _ => return None,
        };
        spec.ok().filter(|s| s.instance_name() == name)
    }
}

pub fn derive_seed(spec: &GeneratorSpec) -> u64 {
    fnv1a64(spec.canonical_string().as_bytes()) ^ spec.master_seed
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// `m` distinct pairs `(i, j)`, `i < j`, from a partial Fisher-Yates shuffle
/// of all pairs in lexicographic order. Returned in shuffle order.
pub fn random_conflict_edges(rng: &mut SplitMix64, n: usize, m: usize) -> Vec<(usize, usize)> {
    let total = pair_count(n);
    assert!(m <= total, "{m} edges requested from {total} pairs");
    let mut pairs: Vec<u32> = (0..total as u32).collect();
    for k in 0..m {
        let j = k + rng.below((total - k) as u64) as usize;
        pairs.swap(k, j);
    }
    // row i starts at offset(i) = i*(2n-i-1)/2
    let offsets: Vec<usize> = (0..n).map(|i| i * (2 * n - i - 1) / 2).collect();
    pairs[..m]
        .iter()
        .map(|&idx| {
            let idx = idx as usize;
            let i = offsets.partition_point(|&o| o <= idx) - 1;
            (i, i + 1 + idx - offsets[i])
        })
        .collect()
}

pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = SplitMix64::new(derive_seed(spec));
    let n = spec.n_items;
    let (lo, hi) = spec.weight_range;
    let weights: Vec<u64> = (0..n).map(|_| rng.uniform(lo, hi)).collect();
    let profits: Vec<u64> = match spec.profit_type {
        ProfitType::Random => (0..n)
            .map(|_| rng.uniform(RANDOM_PROFITS.0, RANDOM_PROFITS.1))
            .collect(),
        ProfitType::Correlated => weights.iter().map(|w| w + CORRELATION_OFFSET).collect(),
    };
    let m = spec.density.edge_count(n);
    let edges = random_conflict_edges(&mut rng, n, m);
    crate::instance::validate_instance(RawInstance {
        name: spec.instance_name(),
        profits: profits.into_iter().map(|p| p as i64).collect(),
        weights: weights.into_iter().map(|w| w as i64).collect(),
        capacity: spec.capacity() as i64,
        edges,
    })
}

/// Every spec of a family in its fixed enumeration order.
///
/// set1: class, variant (`C1 C3 C10 R1 R3 R10`), density, replicate.
/// set2: items, capacity, profit type (C then R), density, replicate.
pub fn family_specs(family: Family, master_seed: u64) -> Vec<GeneratorSpec> {
    let mut specs = Vec::new();
    match family {
        Family::Set1 => {
            for class_id in 1..=8 {
                for (ptype, mult) in SET1_VARIANTS {
                    for density in SET1_DENSITIES {
                        for rep in 0..REPLICATES {
                            specs.push(
                                GeneratorSpec::set1(
                                    class_id,
                                    ptype,
                                    mult,
                                    density,
                                    rep,
                                    master_seed,
                                )
                                .expect("grid specs are valid"),
                            );
                        }
                    }
                }
            }
        }
        Family::Set2 => {
            for n in SET2_ITEMS {
                for cap in SET2_CAPACITIES {
                    for ptype in [ProfitType::Correlated, ProfitType::Random] {
                        for density in SET2_DENSITIES {
                            for rep in 0..REPLICATES {
                                specs.push(
                                    GeneratorSpec::set2(n, cap, ptype, density, rep, master_seed)
                                        .expect("grid specs are valid"),
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    specs
}

/// Lazily generated family, in [`family_specs`] order.
pub fn generate_family(family: Family, master_seed: u64) -> impl Iterator<Item = Result<Instance>> {
    family_specs(family, master_seed)
        .into_iter()
        .map(|spec| generate(&spec))
}
