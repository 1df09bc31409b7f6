//! Consistent substitution of atoms by expressions.

use std::collections::BTreeMap;

use super::atom::Atom;
use super::rewrite::{eval_expr_with, multiset_contains, multiset_difference, RewriteTable};
use super::{Expr, ExprError};

/// Substitute atoms of `e` according to `bindings`.
///
/// Binding an abstract-function base atom also remaps every derivative atom
/// of that function by differentiating the image. A derivative atom may be
/// bound directly; if its base function is bound as well the two must agree,
/// otherwise the substitution is rejected.
pub fn substitute(
    e: &Expr,
    bindings: &BTreeMap<Atom, Expr>,
    rewrites: &RewriteTable,
) -> Result<Expr, ExprError> {
    // consistency of explicit derivative bindings with base bindings
    for (key, image) in bindings {
        if let Atom::FuncDeriv { name, args, deriv } = key {
            if deriv.is_empty() {
                continue;
            }
            let base = Atom::FuncDeriv {
                name: name.clone(),
                args: args.clone(),
                deriv: Vec::new(),
            };
            if let Some(base_image) = bindings.get(&base) {
                let mut expected = base_image.clone();
                for ix in deriv {
                    expected = expected.diff(ix.0 as usize, rewrites);
                }
                if !expected.alg_eq(image) {
                    return Err(ExprError::InconsistentBinding(name.to_string()));
                }
            }
        }
    }
    let mut resolve = |a: &Atom| resolve_atom(a, bindings, rewrites);
    eval_expr_with(e, &mut resolve)
}

fn resolve_atom(
    atom: &Atom,
    bindings: &BTreeMap<Atom, Expr>,
    rewrites: &RewriteTable,
) -> Option<Expr> {
    if let Some(img) = bindings.get(atom) {
        return Some(rewrites.apply(img));
    }
    if let Atom::FuncDeriv { name, args, deriv } = atom {
        // most specific bound prefix of the derivative multiset
        let mut best: Option<(&Vec<super::atom::FieldIx>, &Expr)> = None;
        for (key, image) in bindings {
            if let Atom::FuncDeriv {
                name: kn,
                args: ka,
                deriv: kd,
            } = key
            {
                if kn == name && ka == args && multiset_contains(deriv, kd) {
                    if best.map(|(d, _)| kd.len() > d.len()).unwrap_or(true) {
                        best = Some((kd, image));
                    }
                }
            }
        }
        let (kd, image) = best?;
        let mut out = image.clone();
        for ix in multiset_difference(deriv, kd) {
            out = out.diff(ix.0 as usize, rewrites);
        }
        return Some(rewrites.apply(&out));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_rules() -> RewriteTable {
        RewriteTable::empty()
    }

    #[test]
    fn base_binding_remaps_derivatives() {
        // F(v) + F_v with F -> v^2 gives v^2 + 2v.
        let v = Expr::field(1);
        let e = Expr::func("F", &[1]).add(&Expr::func_deriv("F", &[1], &[1]));
        let mut b = BTreeMap::new();
        b.insert(Atom::func("F", &[1]), v.int_pow(2).unwrap());
        let got = substitute(&e, &b, &no_rules()).unwrap();
        let expect = v.int_pow(2).unwrap().add(&v.mul_int(2));
        assert!(got.alg_eq(&expect));
    }

    #[test]
    fn plain_function_binding() {
        let e = Expr::func("f", &[0, 1]);
        let mut b = BTreeMap::new();
        b.insert(Atom::func("f", &[0, 1]), Expr::field(0));
        let got = substitute(&e, &b, &no_rules()).unwrap();
        assert!(got.alg_eq(&Expr::field(0)));
    }

    #[test]
    fn inconsistent_derivative_binding_is_rejected() {
        let e = Expr::func("F", &[1]);
        let mut b = BTreeMap::new();
        b.insert(Atom::func("F", &[1]), Expr::field(1));
        b.insert(Atom::func_deriv("F", &[1], &[1]), Expr::int(7));
        assert!(matches!(
            substitute(&e, &b, &no_rules()),
            Err(ExprError::InconsistentBinding(_))
        ));
    }

    #[test]
    fn consistent_derivative_binding_is_accepted() {
        let e = Expr::func_deriv("F", &[1], &[1]);
        let mut b = BTreeMap::new();
        b.insert(Atom::func("F", &[1]), Expr::field(1).int_pow(2).unwrap());
        b.insert(Atom::func_deriv("F", &[1], &[1]), Expr::field(1).mul_int(2));
        let got = substitute(&e, &b, &no_rules()).unwrap();
        assert!(got.alg_eq(&Expr::field(1).mul_int(2)));
    }

    #[test]
    fn substituting_into_denominator_checks_for_zero() {
        let e = Expr::one().div(&Expr::func("F", &[1])).unwrap();
        let mut b = BTreeMap::new();
        b.insert(Atom::func("F", &[1]), Expr::zero());
        assert_eq!(
            substitute(&e, &b, &no_rules()),
            Err(ExprError::ZeroDenominator)
        );
    }
}
