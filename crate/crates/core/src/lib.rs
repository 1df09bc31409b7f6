//! Symbolic verification of non-homogeneous hydrodynamic-type operators.
//!
//! The crate decides, by exact computer algebra, whether an operator
//! `P + omega` — a first-order multidimensional Dubrovin–Novikov operator
//! plus an ultralocal Poisson tensor — is Hamiltonian, and ships a catalog
//! of canonical two- and three-component operators in two spatial dimensions
//! together with their admissible ultralocal families.
//!
//! Layers, bottom up:
//!
//! * [`expr`] — exact multivariate rational expressions over field
//!   variables, jets, parameters and abstract functions, with a decidable
//!   zero test, differentiation, substitution and rewrite rules;
//! * [`operator`] — the typed operator `g^{ij a} d/dx^a + b_k^{ij a} u^k_a
//!   + omega^{ij}`, built from displayed tail matrices;
//! * [`conditions`] — the per-family Hamiltonianity residuals (W for the
//!   ultralocal part, M for the first-order part, C for their
//!   compatibility);
//! * [`schouten`] — an independent first-principles Jacobi test on the
//!   super-jet space, used to referee the condition generators;
//! * [`catalog`] — the classified canonical forms P1–P24 and the
//!   three-wave examples, with necessity fixtures;
//! * [`ansatz`] — constraint extraction, forced-vanishing detection and
//!   perturbation refutation;
//! * [`dsl`] / [`report`] — the `.hop` surface syntax and the JSON report.

pub mod ansatz;
pub mod catalog;
pub mod conditions;
pub mod dsl;
pub mod expr;
pub mod operator;
pub mod report;
pub mod schouten;

pub use expr::subst::substitute;
pub use expr::{Atom, DimIx, Expr, ExprError, FieldIx, Monomial, Poly, RewriteTable};
