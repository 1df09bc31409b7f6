//! Atomic symbols of the expression kernel.
//!
//! Every expression is a rational function in a set of algebraically
//! independent atoms: dependent field variables `u^i`, first-order jet
//! variables `u^i_alpha`, scalar parameters, and abstract functions of a
//! declared argument list together with their partial derivatives.

use std::fmt;
use std::sync::Arc;

/// Index of a dependent field variable (0-based).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FieldIx(pub u8);

/// Index of a spatial dimension (0-based).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DimIx(pub u8);

impl fmt::Display for FieldIx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 + 1)
    }
}

impl fmt::Display for DimIx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 + 1)
    }
}

/// An atomic symbol.
///
/// The variant order defines the canonical atom order used for monomial
/// normalization: field variables, then jets, then parameters, then
/// abstract-function derivatives; ties broken by indices/names.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    /// Dependent variable `u^i`.
    FieldVar(FieldIx),
    /// First-order jet `u^k_alpha`, treated as an independent coordinate.
    JetVar(FieldIx, DimIx),
    /// A scalar constant such as `c`, `lambda`, `eps`.
    Param(Arc<str>),
    /// An abstract function of the listed field arguments, differentiated by
    /// the multiset `deriv`. Mixed partials commute, so `deriv` is kept
    /// sorted; every entry must occur in `args`.
    FuncDeriv {
        name: Arc<str>,
        args: Arc<[FieldIx]>,
        deriv: Vec<FieldIx>,
    },
}

impl Atom {
    pub fn field(i: usize) -> Atom {
        Atom::FieldVar(FieldIx(i as u8))
    }

    pub fn jet(k: usize, alpha: usize) -> Atom {
        Atom::JetVar(FieldIx(k as u8), DimIx(alpha as u8))
    }

    pub fn param(name: &str) -> Atom {
        Atom::Param(Arc::from(name))
    }

    /// Base (underived) abstract-function atom.
    pub fn func(name: &str, args: &[usize]) -> Atom {
        Atom::FuncDeriv {
            name: Arc::from(name),
            args: args.iter().map(|&i| FieldIx(i as u8)).collect(),
            deriv: Vec::new(),
        }
    }

    /// Derivative atom of an abstract function; `deriv` entries must be
    /// arguments of the function. Panics otherwise (catalog and parser
    /// construct these from validated declarations).
    pub fn func_deriv(name: &str, args: &[usize], deriv: &[usize]) -> Atom {
        let args: Arc<[FieldIx]> = args.iter().map(|&i| FieldIx(i as u8)).collect();
        let mut d: Vec<FieldIx> = deriv.iter().map(|&i| FieldIx(i as u8)).collect();
        for ix in &d {
            assert!(args.contains(ix), "derivative index not an argument");
        }
        d.sort();
        Atom::FuncDeriv {
            name: Arc::from(name),
            args,
            deriv: d,
        }
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Atom::JetVar(..))
    }

    pub fn is_func_deriv(&self) -> bool {
        matches!(self, Atom::FuncDeriv { .. })
    }

    /// Derivative of this atom with respect to the field variable `i`.
    ///
    /// Returns `None` for zero (jets, params, functions not depending on
    /// `u^i`), `Some(Ok(()))`-like marker is not needed: the only nonzero
    /// non-unit case is a `FuncDeriv`, which extends the multi-index.
    pub(crate) fn diff_field(&self, i: FieldIx) -> AtomDiff {
        match self {
            Atom::FieldVar(j) => {
                if *j == i {
                    AtomDiff::One
                } else {
                    AtomDiff::Zero
                }
            }
            Atom::JetVar(..) | Atom::Param(..) => AtomDiff::Zero,
            Atom::FuncDeriv { name, args, deriv } => {
                if args.contains(&i) {
                    let mut d = deriv.clone();
                    let pos = d.partition_point(|x| *x <= i);
                    d.insert(pos, i);
                    AtomDiff::Atom(Atom::FuncDeriv {
                        name: name.clone(),
                        args: args.clone(),
                        deriv: d,
                    })
                } else {
                    AtomDiff::Zero
                }
            }
        }
    }
}

pub(crate) enum AtomDiff {
    Zero,
    One,
    Atom(Atom),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_order_ranks_variants() {
        let u = Atom::field(0);
        let ux = Atom::jet(0, 0);
        let c = Atom::param("c");
        let f = Atom::func("f", &[1, 2]);
        assert!(u < ux && ux < c && c < f);
    }

    #[test]
    fn mixed_partials_commute() {
        let a = Atom::func_deriv("h", &[1, 2], &[1, 2]);
        let b = Atom::func_deriv("h", &[1, 2], &[2, 1]);
        assert_eq!(a, b);
    }

    #[test]
    fn diff_non_argument_is_zero() {
        let f = Atom::func("f", &[1, 2]);
        assert!(matches!(f.diff_field(FieldIx(0)), AtomDiff::Zero));
        assert!(matches!(f.diff_field(FieldIx(1)), AtomDiff::Atom(_)));
    }
}
