//! A small grammar-level reader for the CPLEX LP subset used by binary
//! programs: an objective, linear rows with a sense and a constant right-hand
//! side, and a Binaries section.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub terms: BTreeMap<String, i64>,
    pub sense: String,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpModel {
    pub maximize: bool,
    pub objective_name: String,
    pub objective: BTreeMap<String, i64>,
    pub rows: Vec<Row>,
    pub binaries: BTreeSet<String>,
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Binaries,
    End,
}

fn is_identifier(tok: &str) -> bool {
    let mut chars = tok.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

fn section_keyword(line: &str) -> Option<Section> {
    match line.trim().to_ascii_lowercase().as_str() {
        "maximize" | "maximum" | "max" | "minimize" | "minimum" | "min" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
        "binaries" | "binary" | "bin" => Some(Section::Binaries),
        "end" => Some(Section::End),
        _ => None,
    }
}

/// Parses `[name:] expr` returning the name and the terms.
fn parse_expression(
    tokens: &[&str],
    what: &str,
) -> Result<(String, BTreeMap<String, i64>), String> {
    let mut k = 0;
    let mut name = String::new();
    if let Some(first) = tokens.first() {
        if let Some(n) = first.strip_suffix(':') {
            if !is_identifier(n) {
                return Err(format!("{what}: bad row name `{n}`"));
            }
            name = n.to_string();
            k = 1;
        }
    }
    let mut terms = BTreeMap::new();
    let mut expect_term = true;
    let mut saw_op = false;
    let mut sign = 1i64;
    let mut coef: Option<i64> = None;
    while k < tokens.len() {
        let tok = tokens[k];
        match tok {
            "+" | "-" => {
                if coef.is_some() || saw_op {
                    return Err(format!("{what}: misplaced `{tok}`"));
                }
                if tok == "-" {
                    sign = -1;
                }
                expect_term = true;
                saw_op = true;
            }
            _ if tok.parse::<i64>().is_ok() => {
                if coef.is_some() || !expect_term {
                    return Err(format!("{what}: unexpected number `{tok}`"));
                }
                coef = Some(tok.parse().unwrap());
            }
            _ if is_identifier(tok) => {
                if !expect_term {
                    return Err(format!("{what}: missing operator before `{tok}`"));
                }
                let c = sign * coef.take().unwrap_or(1);
                if terms.insert(tok.to_string(), c).is_some() {
                    return Err(format!("{what}: variable `{tok}` repeated"));
                }
                sign = 1;
                expect_term = false;
                saw_op = false;
            }
            _ => return Err(format!("{what}: unexpected token `{tok}`")),
        }
        k += 1;
    }
    if saw_op {
        return Err(format!("{what}: expression ends with an operator"));
    }
    if let Some(c) = coef {
        // a lone constant objective such as `obj: 0`
        if c != 0 || !terms.is_empty() {
            return Err(format!("{what}: dangling constant"));
        }
    }
    Ok((name, terms))
}

pub fn parse_lp(text: &str) -> Result<LpModel, String> {
    let mut model = LpModel::default();
    let mut section = Section::Preamble;
    let mut objective_tokens: Vec<String> = Vec::new();
    let mut row_tokens: Vec<String> = Vec::new();
    let mut saw_sense = false;
    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        if raw.len() > 510 {
            return Err(format!("line {line_no}: longer than 510 characters"));
        }
        let line = raw.split('\\').next().unwrap();
        if line.trim().is_empty() {
            continue;
        }
        if let Some(next) = section_keyword(line) {
            let lower = line.trim().to_ascii_lowercase();
            match (section, next) {
                (Section::Preamble, Section::Objective) => {
                    model.maximize = lower.starts_with("max");
                    saw_sense = true;
                }
                (Section::Objective, Section::Constraints) => {}
                (Section::Objective | Section::Constraints, Section::Binaries) => {}
                (Section::Objective | Section::Constraints | Section::Binaries, Section::End) => {}
                (from, to) => return Err(format!("line {line_no}: section {to:?} after {from:?}")),
            }
            section = next;
            continue;
        }
        let tokens = line.split_whitespace().map(str::to_string);
        match section {
            Section::Preamble => {
                return Err(format!("line {line_no}: content before objective sense"))
            }
            Section::Objective => objective_tokens.extend(tokens),
            Section::Constraints => row_tokens.extend(tokens),
            Section::Binaries => {
                for t in tokens {
                    if !is_identifier(&t) {
                        return Err(format!("line {line_no}: bad binary `{t}`"));
                    }
                    if !model.binaries.insert(t.clone()) {
                        return Err(format!("line {line_no}: binary `{t}` repeated"));
                    }
                }
            }
            Section::End => return Err(format!("line {line_no}: content after End")),
        }
    }
    if !saw_sense {
        return Err("missing objective sense".into());
    }
    if section != Section::End {
        return Err("missing End".into());
    }
    let obj: Vec<&str> = objective_tokens.iter().map(String::as_str).collect();
    let (name, terms) = parse_expression(&obj, "objective")?;
    model.objective_name = name;
    model.objective = terms;

    // split the constraint stream at sense operators: each row is `... sense rhs`
    let mut current: Vec<&str> = Vec::new();
    let mut iter = row_tokens.iter().map(String::as_str);
    while let Some(tok) = iter.next() {
        if matches!(tok, "<=" | ">=" | "=" | "<" | ">" | "=<" | "=>") {
            let rhs_tok = iter.next().ok_or("row without right-hand side")?;
            let rhs: i64 = rhs_tok
                .parse()
                .map_err(|_| format!("bad right-hand side `{rhs_tok}`"))?;
            let (name, terms) = parse_expression(&current, "row")?;
            if terms.is_empty() {
                return Err(format!("row `{name}` has no variables"));
            }
            if model
                .rows
                .iter()
                .any(|r| !name.is_empty() && r.name == name)
            {
                return Err(format!("row name `{name}` repeated"));
            }
            model.rows.push(Row {
                name,
                terms,
                sense: tok.to_string(),
                rhs,
            });
            current.clear();
        } else {
            current.push(tok);
        }
    }
    if !current.is_empty() {
        return Err(format!("incomplete row `{}`", current.join(" ")));
    }
    let declared: BTreeSet<&String> = model
        .objective
        .keys()
        .chain(model.rows.iter().flat_map(|r| r.terms.keys()))
        .collect();
    for v in declared {
        if !model.binaries.contains(v) {
            return Err(format!("variable `{v}` is not declared binary"));
        }
    }
    Ok(model)
}

/// Checks that `model` is exactly the binary program of the instance:
/// objective = profits, first row = capacity, remaining rows = conflict edges.
pub fn matches_instance(model: &LpModel, inst: &kpc_core::Instance) -> Result<(), String> {
    let var = |i: usize| format!("x{i}");
    let n = inst.len();
    if !model.maximize {
        return Err("objective is not maximized".into());
    }
    if model.binaries.len() != n || !(0..n).all(|i| model.binaries.contains(&var(i))) {
        return Err("binaries differ from x0..x{n-1}".into());
    }
    if model.objective.len() != n
        || !(0..n).all(|i| model.objective.get(&var(i)) == Some(&(inst.profit(i) as i64)))
    {
        return Err("objective coefficients differ from profits".into());
    }
    let mut rows = model.rows.iter();
    if n > 0 {
        let cap = rows.next().ok_or("missing capacity row")?;
        let weights_ok = cap.terms.len() == n
            && (0..n).all(|i| cap.terms.get(&var(i)) == Some(&(inst.weight(i) as i64)));
        if cap.sense != "<=" || cap.rhs != inst.capacity() as i64 || !weights_ok {
            return Err(format!("capacity row differs: {cap:?}"));
        }
    }
    let mut conflicts = Vec::new();
    for r in rows {
        if r.sense != "<=" || r.rhs != 1 || r.terms.len() != 2 || r.terms.values().any(|&c| c != 1)
        {
            return Err(format!("row {} is not a conflict row", r.name));
        }
        let ends: Vec<usize> = r
            .terms
            .keys()
            .map(|v| {
                v.strip_prefix('x')
                    .and_then(|k| k.parse().ok())
                    .ok_or(format!("bad variable {v}"))
            })
            .collect::<Result<_, _>>()?;
        conflicts.push((ends[0].min(ends[1]), ends[0].max(ends[1])));
    }
    conflicts.sort_unstable();
    let mut expected = inst.edges().to_vec();
    expected.sort_unstable();
    if conflicts != expected {
        return Err(format!(
            "{} conflict rows for {} edges, or endpoints differ",
            conflicts.len(),
            expected.len()
        ));
    }
    Ok(())
}
