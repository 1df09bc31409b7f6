//! Ultralocal (order-zero) Hamiltonianity: W1 skew-symmetry and W2, the
//! Jacobi identity for the Poisson tensor `omega` on the target manifold.

use super::{fx, CheckOptions, ConditionId, Family, Residual};
use crate::expr::Expr;
use crate::operator::OperatorSpec;

pub fn residuals(spec: &OperatorSpec, opts: &CheckOptions) -> Vec<Residual> {
    let n = spec.n_fields();
    let rw = &spec.rewrites;
    let mut out = Vec::new();

    // W1: omega^{ij} + omega^{ji} (the printed statement is skew-symmetry;
    // the literal sign typo in the source would force omega = 0, which its
    // own examples contradict).
    for i in 0..n {
        for j in 0..n {
            if !opts.full_range && j < i {
                continue;
            }
            let r = spec.omega.at(i, j).add(spec.omega.at(j, i));
            out.push(Residual {
                id: ConditionId::new(Family::W1, vec![("i", fx(i)), ("j", fx(j))]),
                expr: r,
            });
        }
    }

    // W2: omega^{is} d_s omega^{jk} + omega^{js} d_s omega^{ki}
    //     + omega^{ks} d_s omega^{ij}, summed over s.
    // The expression is totally antisymmetric in (i,j,k) for skew omega, so
    // i<j<k covers everything; for n = 2 the set is empty.
    let mut domega: Vec<Vec<Vec<Expr>>> = Vec::new();
    for s in 0..n {
        let mut m = Vec::new();
        for j in 0..n {
            let mut row = Vec::new();
            for k in 0..n {
                row.push(spec.omega.at(j, k).diff(s, rw));
            }
            m.push(row);
        }
        domega.push(m);
    }
    let w2 = |i: usize, j: usize, k: usize| -> Expr {
        let mut acc = Expr::zero();
        for s in 0..n {
            acc = acc
                .add(&spec.omega.at(i, s).mul(&domega[s][j][k]))
                .add(&spec.omega.at(j, s).mul(&domega[s][k][i]))
                .add(&spec.omega.at(k, s).mul(&domega[s][i][j]));
        }
        acc
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !opts.full_range && !(i < j && j < k) {
                    continue;
                }
                out.push(Residual {
                    id: ConditionId::new(
                        Family::W2,
                        vec![("i", fx(i)), ("j", fx(j)), ("k", fx(k))],
                    ),
                    expr: w2(i, j, k),
                });
            }
        }
    }
    out
}
