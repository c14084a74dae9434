//! The `.kpc` text format.
//!
//! ```text
//! # name: six_items
//! 6 4 20
//! 6 7
//! ...
//! 0 1
//! ...
//! ```
//!
//! The header holds the item count `n`, edge count `m` and capacity `c`,
//! followed by `n` lines `profit weight` and `m` lines `i j` (0-based,
//! `i < j` on output). Lines starting with `#` are comments; a leading
//! `# name: ` comment carries the instance name. The writer emits single
//! spaces and `\n` line endings only, so rewriting a parsed file is
//! byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{KpcError, Result};
use crate::instance::{validate_instance, Instance, RawInstance};

const NAME_PREFIX: &str = "# name: ";

pub fn to_kpc_string(inst: &Instance) -> String {
    let mut out = String::with_capacity(16 * (inst.len() + inst.edges().len()) + 64);
    if !inst.name().is_empty() {
        let name = inst.name().replace(['\n', '\r'], " ");
        let _ = writeln!(out, "{NAME_PREFIX}{}", name.trim_end());
    }
    let _ = writeln!(
        out,
        "{} {} {}",
        inst.len(),
        inst.edges().len(),
        inst.capacity()
    );
    for (p, w) in inst.profits().iter().zip(inst.weights()) {
        let _ = writeln!(out, "{p} {w}");
    }
    for (i, j) in inst.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

pub fn write_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_kpc_string(inst)).map_err(|e| KpcError::io(path, e))
}

/// Reads an instance; without a name comment the file stem becomes the name.
pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| KpcError::io(path, e))?;
    let inst = parse_kpc(&text)?;
    if inst.name().is_empty() {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        return Ok(inst.with_name(stem));
    }
    Ok(inst)
}

pub fn parse_kpc(text: &str) -> Result<Instance> {
    let mut name = String::new();
    let mut data = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.starts_with('#') {
            if idx == 0 {
                if let Some(n) = line.strip_prefix(NAME_PREFIX) {
                    name = n.to_string();
                }
            }
            continue;
        }
        if !line.trim().is_empty() {
            data.push((idx + 1, line));
        }
    }
    let mut lines = data.into_iter();
    let last_line = text.lines().count();

    let (line_no, header) = lines
        .next()
        .ok_or_else(|| KpcError::parse(last_line + 1, "missing header line `n m c`"))?;
    let [n, m, capacity] = parse_fields::<3>(line_no, header, "header `n m c`")?;
    let n = to_count(line_no, n, "item count")?;
    let m = to_count(line_no, m, "edge count")?;

    let mut profits = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        let (line_no, line) = lines.next().ok_or_else(|| {
            KpcError::parse(
                last_line + 1,
                format!("truncated item section: expected {n} item lines, found {k}"),
            )
        })?;
        let [p, w] = parse_fields::<2>(line_no, line, "item line `profit weight`")?;
        profits.push(p);
        weights.push(w);
    }

    let mut edges = Vec::with_capacity(m);
    for k in 0..m {
        let (line_no, line) = lines.next().ok_or_else(|| {
            KpcError::parse(
                last_line + 1,
                format!("truncated edge section: expected {m} edge lines, found {k}"),
            )
        })?;
        let [i, j] = parse_fields::<2>(line_no, line, "edge line `i j`")?;
        let i = to_count(line_no, i, "edge endpoint")?;
        let j = to_count(line_no, j, "edge endpoint")?;
        edges.push((i, j));
    }

    if let Some((line_no, _)) = lines.next() {
        return Err(KpcError::parse(
            line_no,
            "unexpected content after the edge section",
        ));
    }

    validate_instance(RawInstance {
        name,
        profits,
        weights,
        capacity,
        edges,
    })
}

fn parse_fields<const N: usize>(line_no: usize, line: &str, what: &str) -> Result<[i64; N]> {
    let mut out = [0i64; N];
    let mut tokens = line.split_ascii_whitespace();
    for slot in out.iter_mut() {
        let tok = tokens
            .next()
            .ok_or_else(|| KpcError::parse(line_no, format!("expected {what}")))?;
        *slot = tok.parse().map_err(|_| {
            KpcError::parse(
                line_no,
                format!("expected an integer in {what}, got `{tok}`"),
            )
        })?;
    }
    if tokens.next().is_some() {
        return Err(KpcError::parse(
            line_no,
            format!("too many fields in {what}"),
        ));
    }
    Ok(out)
}

fn to_count(line_no: usize, value: i64, what: &str) -> Result<usize> {
    usize::try_from(value)
        .map_err(|_| KpcError::parse(line_no, format!("{what} must be non-negative, got {value}")))
}
