//! CPLEX LP text export.
//!
//! Variables are named `w_<i>_<j>`, `p_<i>` and `z_<i>`; constraints carry a
//! prefix for their block and a running index (`stat_0`, `qual_3`, ...).
//! Flow and demand variables keep the LP-format default bounds `[0, +inf)`;
//! auxiliary variables are declared `free`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::model::{ConstraintKind, LpModel, Relation, VarRole};

const MAX_LINE: usize = 200;

fn var_name(role: VarRole) -> String {
    match role {
        VarRole::Flow { from, to } => format!("w_{from}_{to}"),
        VarRole::Demand(i) => format!("p_{i}"),
        VarRole::Aux(i) => format!("z_{i}"),
    }
}

fn prefix(kind: ConstraintKind) -> &'static str {
    match kind {
        ConstraintKind::Stationarity => "stat",
        ConstraintKind::Quality => "qual",
        ConstraintKind::Budget => "budget",
        ConstraintKind::NoSelf => "noself",
        ConstraintKind::BoxUpper => "box",
        ConstraintKind::Fairness => "fair",
        ConstraintKind::TangentCut => "cut",
    }
}

fn number(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Writes `terms` after `head`, wrapping lines at a fixed width.
fn push_expression(out: &mut String, head: &str, terms: &[(String, f64)]) {
    let mut line = String::from(head);
    if terms.is_empty() {
        line.push_str(" 0");
    }
    for (pos, (name, c)) in terms.iter().enumerate() {
        let sign = if *c < 0.0 { "-" } else if pos == 0 { "" } else { "+" };
        let mag = c.abs();
        let coeff = if mag == 1.0 { String::new() } else { format!("{} ", number(mag)) };
        let term = if sign.is_empty() {
            format!(" {coeff}{name}")
        } else {
            format!(" {sign} {coeff}{name}")
        };
        if line.len() + term.len() > MAX_LINE {
            out.push_str(&line);
            out.push('\n');
            line = String::from("   ");
        }
        line.push_str(&term);
    }
    out.push_str(&line);
}

pub fn to_lp_string(model: &LpModel) -> String {
    let names: Vec<String> = model.variables.iter().map(|v| var_name(v.role)).collect();
    let terms = |coeffs: &[(super::model::VarId, f64)]| -> Vec<(String, f64)> {
        coeffs.iter().map(|&(v, c)| (names[v.0].clone(), c)).collect()
    };
    let mut out = String::new();
    out.push_str("\\ fair network-friendly recommendation LP\n");
    out.push_str("Maximize\n");
    push_expression(&mut out, " obj:", &terms(&model.objective));
    out.push_str("\nSubject To\n");
    let mut counters = std::collections::HashMap::new();
    for con in &model.constraints {
        let idx = counters.entry(con.kind).or_insert(0usize);
        let head = format!(" {}_{}:", prefix(con.kind), idx);
        *idx += 1;
        push_expression(&mut out, &head, &terms(&con.coeffs));
        let rel = match con.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        let _ = writeln!(out, " {rel} {}", number(con.rhs));
    }
    out.push_str("Bounds\n");
    for (name, var) in names.iter().zip(&model.variables) {
        match (var.lower, var.upper) {
            (lo, hi) if lo == 0.0 && hi == f64::INFINITY => {}
            (lo, hi) if lo == f64::NEG_INFINITY && hi == f64::INFINITY => {
                let _ = writeln!(out, " {name} free");
            }
            (lo, hi) if lo == f64::NEG_INFINITY => {
                let _ = writeln!(out, " -inf <= {name} <= {}", number(hi));
            }
            (lo, hi) if hi == f64::INFINITY => {
                let _ = writeln!(out, " {name} >= {}", number(lo));
            }
            (lo, hi) => {
                let _ = writeln!(out, " {} <= {name} <= {}", number(lo), number(hi));
            }
        }
    }
    out.push_str("End\n");
    out
}

pub fn write_lp(model: &LpModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(to_lp_string(model).as_bytes())
        .map_err(|e| Error::io(path, e))
}
