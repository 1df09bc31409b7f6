//! Canonical text rendering of expressions and operators.
//!
//! Printing is deterministic: declarations sorted, monomials in the
//! kernel's canonical order with the leading monomial first. `parse`
//! of a printed operator reproduces it entry for entry.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::expr::{Atom, Expr, Poly};
use crate::operator::{FieldSpace, OperatorSpec};

fn atom_text(atom: &Atom, space: &FieldSpace) -> String {
    match atom {
        Atom::FieldVar(i) => space.field_names()[i.0 as usize].clone(),
        Atom::JetVar(k, d) => format!(
            "{}_{}",
            space.field_names()[k.0 as usize],
            space.dim_names()[d.0 as usize]
        ),
        Atom::Param(name) => name.to_string(),
        Atom::FuncDeriv { name, args, deriv } => {
            if deriv.is_empty() {
                let args: Vec<String> = args
                    .iter()
                    .map(|f| space.field_names()[f.0 as usize].clone())
                    .collect();
                format!("{}({})", name, args.join(", "))
            } else {
                let suffix: String = deriv
                    .iter()
                    .map(|f| space.field_names()[f.0 as usize].clone())
                    .collect();
                format!("{name}_{suffix}")
            }
        }
    }
}

fn coeff_text(c: &BigRational) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Render a polynomial; multi-term results are the caller's to
/// parenthesize.
fn poly_text(p: &Poly, space: &FieldSpace) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    // leading monomial first
    for (ix, (m, c)) in p.terms().rev().enumerate() {
        let abs = c.abs();
        let mut parts: Vec<String> = Vec::new();
        if !abs.is_one() || m.is_one() {
            parts.push(coeff_text(&abs));
        }
        for (a, e) in m.atoms() {
            let t = atom_text(a, space);
            if *e == 1 {
                parts.push(t);
            } else {
                parts.push(format!("{t}^{e}"));
            }
        }
        let term = parts.join("*");
        if ix == 0 {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&term);
    }
    out
}

fn needs_parens(p: &Poly) -> bool {
    p.num_terms() > 1
        || p.terms()
            .next()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false)
}

/// Render an expression in the surface syntax.
pub fn expr_text(e: &Expr, space: &FieldSpace) -> String {
    let num = e.numerator();
    let num_str = poly_text(num, space);
    if !e.has_denominator() {
        return num_str;
    }
    let mut den_parts: Vec<String> = Vec::new();
    if !e.den_monomial().is_one() {
        for (a, exp) in e.den_monomial().atoms() {
            let t = atom_text(a, space);
            den_parts.push(if *exp == 1 { t } else { format!("{t}^{exp}") });
        }
    }
    for (f, k) in e.den_factors() {
        let inner = poly_text(f, space);
        let base = format!("({inner})");
        den_parts.push(if *k == 1 { base } else { format!("{base}^{k}") });
    }
    let den_str = den_parts.join("*");
    let den_grouped = if den_parts.len() > 1 {
        format!("({den_str})")
    } else {
        den_str
    };
    let num_grouped = if needs_parens(num) {
        format!("({num_str})")
    } else {
        num_str
    };
    format!("{num_grouped}/{den_grouped}")
}

/// Canonical `.hop` text of an operator (declarations, leading matrices,
/// tail, omega, rewrite rules).
pub fn print(spec: &OperatorSpec) -> String {
    let space = &spec.space;
    let mut params: Vec<String> = Vec::new();
    let mut funcs: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut visit = |e: &Expr| {
        e.for_each_atom(|a| match a {
            Atom::Param(name) => {
                if !params.iter().any(|p| p == &**name) {
                    params.push(name.to_string());
                }
            }
            Atom::FuncDeriv { name, args, .. } => {
                funcs
                    .entry(name.to_string())
                    .or_insert_with(|| args.iter().map(|f| f.0 as usize).collect());
            }
            _ => {}
        });
    };
    for m in spec.g.iter().chain(std::iter::once(&spec.omega)) {
        for e in m.entries() {
            visit(e);
        }
    }
    let tail = spec.tail();
    for e in tail.entries() {
        visit(e);
    }
    for (key, rhs) in spec.rewrites.rules() {
        visit(&Expr::atom(key.clone()));
        visit(rhs);
    }
    params.sort();

    let mut out = String::new();
    out.push_str(&format!("fields {}\n", space.field_names().join(" ")));
    out.push_str(&format!("dims {}\n", space.dim_names().join(" ")));
    if !params.is_empty() {
        out.push_str(&format!("param {}\n", params.join(" ")));
    }
    for (name, args) in &funcs {
        let args: Vec<String> = args
            .iter()
            .map(|&i| space.field_names()[i].clone())
            .collect();
        out.push_str(&format!("func {}({})\n", name, args.join(", ")));
    }
    let mat_text = |m: &crate::operator::Mat| -> String {
        let n = m.n();
        let rows: Vec<String> = (0..n)
            .map(|i| {
                let cells: Vec<String> = (0..n).map(|j| expr_text(m.at(i, j), space)).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(",\n     "))
    };
    for (d, name) in space.dim_names().iter().enumerate() {
        if !spec.g[d].is_zero() {
            out.push_str(&format!("g{} = {}\n", name, mat_text(&spec.g[d])));
        }
    }
    if !tail.is_zero() {
        out.push_str(&format!("tail = {}\n", mat_text(&tail)));
    }
    if !spec.omega.is_zero() {
        out.push_str(&format!("omega = {}\n", mat_text(&spec.omega)));
    }
    for (key, rhs) in spec.rewrites.rules() {
        out.push_str(&format!(
            "rewrite {} = {}\n",
            atom_text(key, space),
            expr_text(rhs, space)
        ));
    }
    out
}
