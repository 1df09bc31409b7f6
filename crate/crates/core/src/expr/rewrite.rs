//! Definitional rewrite rules for derivatives of abstract functions.
//!
//! A rule binds a specific derivative atom, say `g_w`, to an expression.
//! During differentiation any derivative atom extending the rule key (such
//! as `g_vw`) resolves to the corresponding derivative of the rule image, so
//! mixed partials stay consistent whichever order they are taken in.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::One;

use super::atom::{Atom, FieldIx};
use super::poly::{Monomial, Poly};
use super::{Expr, ExprError};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RewriteTable {
    rules: Vec<(Atom, Expr)>,
}

impl RewriteTable {
    pub fn empty() -> RewriteTable {
        RewriteTable { rules: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> &[(Atom, Expr)] {
        &self.rules
    }

    /// Build a table, rejecting rule sets whose function-name dependency
    /// graph has a cycle (that is the one way repeated application could
    /// fail to terminate).
    pub fn new(rules: Vec<(Atom, Expr)>) -> Result<RewriteTable, ExprError> {
        for (key, _) in &rules {
            assert!(key.is_func_deriv(), "rewrite keys must be function atoms");
        }
        let names: Vec<String> = rules
            .iter()
            .map(|(k, _)| match k {
                Atom::FuncDeriv { name, .. } => name.to_string(),
                _ => unreachable!(),
            })
            .collect();
        // name -> names of functions occurring in its rule image
        let mut deps: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (i, (_, rhs)) in rules.iter().enumerate() {
            let entry = deps.entry(names[i].clone()).or_default();
            rhs.for_each_atom(|a| {
                if let Atom::FuncDeriv { name, .. } = a {
                    entry.insert(name.to_string());
                }
            });
        }
        // depth-first cycle check restricted to names that carry rules
        let ruled: BTreeSet<String> = names.iter().cloned().collect();
        fn visit(
            n: &str,
            deps: &BTreeMap<String, BTreeSet<String>>,
            ruled: &BTreeSet<String>,
            stack: &mut Vec<String>,
            done: &mut BTreeSet<String>,
        ) -> Result<(), ExprError> {
            if done.contains(n) {
                return Ok(());
            }
            if stack.iter().any(|s| s == n) {
                return Err(ExprError::RewriteDepth);
            }
            stack.push(n.to_string());
            if let Some(next) = deps.get(n) {
                for m in next {
                    if ruled.contains(m) {
                        visit(m, deps, ruled, stack, done)?;
                    }
                }
            }
            stack.pop();
            done.insert(n.to_string());
            Ok(())
        }
        let mut done = BTreeSet::new();
        for n in &ruled {
            visit(n, &deps, &ruled, &mut Vec::new(), &mut done)?;
        }
        let mut table = RewriteTable { rules };
        table.rules.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(table)
    }

    pub fn rule(key: Atom, image: Expr) -> Result<RewriteTable, ExprError> {
        RewriteTable::new(vec![(key, image)])
    }

    /// Resolve a single atom: the rule with the most specific key whose
    /// derivative multiset is contained in the atom's, differentiated by the
    /// leftover indices. Plain atom if no rule applies.
    pub(crate) fn image_of(&self, atom: &Atom) -> Expr {
        match self.resolve(atom) {
            Some(e) => e,
            None => Expr::atom(atom.clone()),
        }
    }

    pub(crate) fn resolve(&self, atom: &Atom) -> Option<Expr> {
        let (name, args, deriv) = match atom {
            Atom::FuncDeriv { name, args, deriv } => (name, args, deriv),
            _ => return None,
        };
        let mut best: Option<(&Vec<FieldIx>, &Expr)> = None;
        for (key, rhs) in &self.rules {
            if let Atom::FuncDeriv {
                name: kn,
                args: ka,
                deriv: kd,
            } = key
            {
                if kn == name && ka == args && multiset_contains(deriv, kd) {
                    if best.map(|(d, _)| kd.len() > d.len()).unwrap_or(true) {
                        best = Some((kd, rhs));
                    }
                }
            }
        }
        let (kd, rhs) = best?;
        let extra = multiset_difference(deriv, kd);
        let mut image = rhs.clone();
        for ix in extra {
            image = image.diff(ix.0 as usize, self);
        }
        Some(self.apply(&image))
    }

    /// Apply the table exhaustively to an expression.
    pub fn apply(&self, e: &Expr) -> Expr {
        if self.rules.is_empty() {
            return e.clone();
        }
        let mut dirty = false;
        e.for_each_atom(|a| {
            if !dirty && self.matches(a) {
                dirty = true;
            }
        });
        if !dirty {
            return e.clone();
        }
        eval_expr_with(e, &mut |a| self.resolve(a)).expect("den factors entered nonzero")
    }

    fn matches(&self, atom: &Atom) -> bool {
        if let Atom::FuncDeriv { name, args, deriv } = atom {
            self.rules.iter().any(|(key, _)| match key {
                Atom::FuncDeriv {
                    name: kn,
                    args: ka,
                    deriv: kd,
                } => kn == name && ka == args && multiset_contains(deriv, kd),
                _ => false,
            })
        } else {
            false
        }
    }
}

pub(crate) fn multiset_contains(big: &[FieldIx], small: &[FieldIx]) -> bool {
    let mut i = 0;
    for x in small {
        loop {
            if i >= big.len() {
                return false;
            }
            if big[i] == *x {
                i += 1;
                break;
            }
            if big[i] > *x {
                return false;
            }
            i += 1;
        }
    }
    true
}

pub(crate) fn multiset_difference(big: &[FieldIx], small: &[FieldIx]) -> Vec<FieldIx> {
    let mut out = Vec::new();
    let mut j = 0;
    for x in big {
        if j < small.len() && small[j] == *x {
            j += 1;
        } else {
            out.push(*x);
        }
    }
    out
}

/// Evaluate a polynomial under an atom resolver, using expression arithmetic.
pub(crate) fn eval_poly_with(
    p: &Poly,
    resolve: &mut dyn FnMut(&Atom) -> Option<Expr>,
) -> Result<Expr, ExprError> {
    let mut out = Expr::zero();
    for (m, c) in p.terms() {
        let mut term = Expr::from_poly(Poly::constant(c.clone()));
        let mut plain = Monomial::one();
        for (a, e) in m.atoms() {
            match resolve(a) {
                Some(img) => term = term.mul(&img.int_pow(*e as i64)?),
                None => plain = plain.mul(&Monomial::atom(a.clone()).pow(*e)),
            }
        }
        if !plain.is_one() {
            term = term.mul(&Expr::from_poly(Poly::monomial(plain, BigRational::one())));
        }
        out = out.add(&term);
    }
    Ok(out)
}

/// Evaluate a whole expression under an atom resolver.
pub(crate) fn eval_expr_with(
    e: &Expr,
    resolve: &mut dyn FnMut(&Atom) -> Option<Expr>,
) -> Result<Expr, ExprError> {
    let num = eval_poly_with(e.numerator(), resolve)?;
    let mut den = eval_poly_with(
        &Poly::monomial(e.den_monomial().clone(), BigRational::one()),
        resolve,
    )?;
    for (f, k) in e.den_factors() {
        den = den.mul(&eval_poly_with(f, resolve)?.int_pow(*k as i64)?);
    }
    num.div(&den)
}
