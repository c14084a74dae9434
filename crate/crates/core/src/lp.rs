//! Export of the binary program in CPLEX LP format.
//!
//! ```text
//! \ six_items
//! Maximize
//!  obj: 6 x0 + 9 x1 + 9 x2 + 3 x3 + 7 x4 + 2 x5
//! Subject To
//!  capacity: 7 x0 + 9 x1 + 4 x2 + 3 x3 + 6 x4 + 1 x5 <= 20
//!  conflict_0_1: x0 + x1 <= 1
//!  ...
//! Binaries
//!  x0 x1 x2 x3 x4 x5
//! End
//! ```
//!
//! Rows come in a fixed order: capacity first, then one row per conflict
//! edge sorted by `(i, j)`. Long rows are continued on lines that start with
//! a space, keeping every line under [`MAX_LINE`] bytes.

use std::fs;
use std::path::Path;

use crate::error::{KpcError, Result};
use crate::instance::Instance;

pub const MAX_LINE: usize = 255;

/// Accumulates whitespace-separated tokens into wrapped lines.
struct Wrapped<'a> {
    out: &'a mut String,
    line_len: usize,
}

impl<'a> Wrapped<'a> {
    fn start(out: &'a mut String, head: &str) -> Self {
        out.push(' ');
        out.push_str(head);
        let line_len = head.len() + 1;
        Wrapped { out, line_len }
    }

    /// Appends `token`, keeping it on one line.
    fn push(&mut self, token: &str) {
        if self.line_len + 1 + token.len() > MAX_LINE {
            self.out.push('\n');
            self.line_len = 0;
        }
        self.out.push(' ');
        self.out.push_str(token);
        self.line_len += 1 + token.len();
    }

    fn finish(self) {
        self.out.push('\n');
    }
}

fn linear_terms(w: &mut Wrapped<'_>, coefficients: &[u64]) {
    if coefficients.is_empty() {
        w.push("0");
        return;
    }
    for (i, c) in coefficients.iter().enumerate() {
        let term = if i == 0 {
            format!("{c} x{i}")
        } else {
            format!("+ {c} x{i}")
        };
        w.push(&term);
    }
}

pub fn to_lp_string(inst: &Instance) -> String {
    let mut out = String::new();
    if !inst.name().is_empty() {
        out.push_str("\\ ");
        out.push_str(&inst.name().replace(['\n', '\r'], " "));
        out.push('\n');
    }

    out.push_str("Maximize\n");
    let mut obj = Wrapped::start(&mut out, "obj:");
    linear_terms(&mut obj, inst.profits());
    obj.finish();

    out.push_str("Subject To\n");
    if !inst.is_empty() {
        let mut row = Wrapped::start(&mut out, "capacity:");
        linear_terms(&mut row, inst.weights());
        row.push("<=");
        row.push(&inst.capacity().to_string());
        row.finish();
    }
    for &(i, j) in inst.edges() {
        out.push_str(&format!(" conflict_{i}_{j}: x{i} + x{j} <= 1\n"));
    }

    if !inst.is_empty() {
        out.push_str("Binaries\n");
        let mut vars = Wrapped::start(&mut out, "x0");
        for i in 1..inst.len() {
            vars.push(&format!("x{i}"));
        }
        vars.finish();
    }
    out.push_str("End\n");
    out
}

pub fn write_lp(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_lp_string(inst)).map_err(|e| KpcError::io(path, e))
}
