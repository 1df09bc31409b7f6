//! Exact fit of the M6 bilinear terms against the catalog.
//!
//! Ansatz: M6(i,j,k,r,a,b) = sum_l [ g^{li b} db_r^{jk a}/du^l
//!                                   - g^{lj a} db_r^{ik b}/du^l ]
//!                           + sum_s c_s * shape_s
//! over all 48 contraction shapes b_l^{AB g1} b_r^{CD g2} (l occupying one
//! of the four upper slots, (i,j,k) filling the rest, (g1,g2) either dim
//! order). Every catalog operator and its field relabelings must satisfy
//! the identity, giving exact linear constraints on the c_s.

use num_rational::BigRational;
use num_traits::Zero;

use hamcheck_core::catalog;
use hamcheck_core::expr::{Atom, Expr, FieldIx};
use hamcheck_core::operator::OperatorSpec;

fn perms3() -> Vec<Vec<usize>> {
    vec![
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
    ]
}

/// Relabel fields of an operator by `perm` (new index i carries old
/// perm[i]).
fn permute_fields(op: &OperatorSpec, perm: &[usize]) -> OperatorSpec {
    let n = op.n_fields();
    let inv: Vec<usize> = {
        let mut v = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            v[old] = new;
        }
        v
    };
    let relabel = |a: &Atom| -> Atom {
        match a {
            Atom::FieldVar(FieldIx(m)) => Atom::field(inv[*m as usize]),
            Atom::JetVar(FieldIx(m), d) => Atom::jet(inv[*m as usize], d.0 as usize),
            Atom::Param(_) => a.clone(),
            Atom::FuncDeriv { name, args, deriv } => {
                let new_args: Vec<usize> = args.iter().map(|f| inv[f.0 as usize]).collect();
                let new_deriv: Vec<usize> = deriv.iter().map(|f| inv[f.0 as usize]).collect();
                Atom::func_deriv(name, &new_args, &new_deriv)
            }
        }
    };
    let mut out = op.clone();
    for alpha in 0..op.n_dims() {
        for i in 0..n {
            for j in 0..n {
                out.g[alpha].set(i, j, op.g[alpha].at(perm[i], perm[j]).map_atoms(&relabel));
                for k in 0..n {
                    out.b[alpha].set(
                        i,
                        j,
                        k,
                        op.b[alpha]
                            .at(perm[i], perm[j], perm[k])
                            .map_atoms(&relabel),
                    );
                }
            }
        }
    }
    out
}

struct Fit {
    ncols: usize,
    /// reduced rows: (pivot column, coefficients)
    rows: Vec<(usize, Vec<BigRational>)>,
    inconsistent: bool,
}

impl Fit {
    fn new(ncols: usize) -> Fit {
        Fit {
            ncols,
            rows: Vec::new(),
            inconsistent: false,
        }
    }

    fn insert(&mut self, mut row: Vec<BigRational>) {
        for (piv, basis) in &self.rows {
            if !row[*piv].is_zero() {
                let f = row[*piv].clone();
                for (x, b) in row.iter_mut().zip(basis.iter()) {
                    *x = &*x - &(&f * b);
                }
            }
        }
        if let Some(piv) = row.iter().take(self.ncols).position(|x| !x.is_zero()) {
            let lead = row[piv].clone();
            for x in row.iter_mut() {
                *x = &*x / &lead;
            }
            self.rows.push((piv, row));
            self.rows.sort_by_key(|(p, _)| *p);
        } else if !row[self.ncols].is_zero() {
            self.inconsistent = true;
        }
    }
}

#[test]
fn fit_m6_bilinears() {
    let shapes: Vec<(usize, Vec<usize>, usize)> = {
        let mut v = Vec::new();
        for lpos in 0..4 {
            for p in perms3() {
                for dims in 0..2 {
                    v.push((lpos, p.clone(), dims));
                }
            }
        }
        v
    };
    let ncols = shapes.len();
    let mut fit = Fit::new(ncols);
    let mut ops: Vec<OperatorSpec> = Vec::new();
    for entry in catalog::all() {
        if entry.op.n_fields() == 3 {
            for p in perms3() {
                ops.push(permute_fields(&entry.op, &p));
            }
        } else {
            ops.push(entry.op.clone());
        }
    }
    println!("constraint operators: {}", ops.len());

    for op in &ops {
        let n = op.n_fields();
        let nd = op.n_dims();
        let rw = &op.rewrites;
        // db[alpha][l][(i,j,r)]
        let mut db = vec![vec![Vec::new(); n]; nd];
        for alpha in 0..nd {
            for l in 0..n {
                let mut flat = Vec::with_capacity(n * n * n);
                for i in 0..n {
                    for j in 0..n {
                        for r in 0..n {
                            flat.push(op.b[alpha].at(i, j, r).diff(l, rw));
                        }
                    }
                }
                db[alpha][l] = flat;
            }
        }
        let dbat = |alpha: usize, l: usize, i: usize, j: usize, r: usize| -> &Expr {
            &db[alpha][l][(i * n + j) * n + r]
        };
        for a in 0..nd {
            for bb in 0..nd {
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            for r in 0..n {
                                // fixed g-part as printed
                                let mut gp = Expr::zero();
                                for l in 0..n {
                                    gp = gp
                                        .add(&op.g[bb].at(l, i).mul(dbat(a, l, j, k, r)))
                                        .sub(&op.g[a].at(l, j).mul(dbat(bb, l, i, k, r)));
                                }
                                let mut total = gp;
                                for (s, (lpos, p, dims)) in shapes.iter().enumerate() {
                                    let (g1, g2) = if *dims == 0 { (a, bb) } else { (bb, a) };
                                    let mut val = Expr::zero();
                                    let free = [i, j, k];
                                    for l in 0..n {
                                        let mut slots = [0usize; 4];
                                        let mut fi = 0;
                                        for (pos, slot) in slots.iter_mut().enumerate() {
                                            if pos == *lpos {
                                                *slot = l;
                                            } else {
                                                *slot = free[p[fi]];
                                                fi += 1;
                                            }
                                        }
                                        val = val.add(
                                            &op.b[g1]
                                                .at(slots[0], slots[1], l)
                                                .mul(op.b[g2].at(slots[2], slots[3], r)),
                                        );
                                    }
                                    total = total.add(&val.mul(&Expr::param(&format!("c{s}$"))));
                                }
                                // rows: group numerator monomials by non-c part
                                let mut groups: std::collections::BTreeMap<
                                    Vec<(Atom, u32)>,
                                    Vec<BigRational>,
                                > = std::collections::BTreeMap::new();
                                for (m, coeff) in total.numerator().terms() {
                                    let mut cix: Option<usize> = None;
                                    let mut rest: Vec<(Atom, u32)> = Vec::new();
                                    for (atom, e) in m.atoms() {
                                        match atom {
                                            Atom::Param(name)
                                                if name.starts_with('c') && name.ends_with('$') =>
                                            {
                                                assert_eq!(*e, 1);
                                                cix =
                                                    Some(name[1..name.len() - 1].parse().unwrap());
                                            }
                                            _ => rest.push((atom.clone(), *e)),
                                        }
                                    }
                                    let row = groups
                                        .entry(rest)
                                        .or_insert_with(|| vec![BigRational::zero(); ncols + 1]);
                                    match cix {
                                        Some(s) => row[s] = &row[s] + coeff,
                                        None => row[ncols] = &row[ncols] + coeff,
                                    }
                                }
                                for (_, row) in groups {
                                    fit.insert(row);
                                }
                            }
                        }
                    }
                }
            }
        }
        if fit.inconsistent {
            break;
        }
    }

    println!("inconsistent: {}", fit.inconsistent);
    println!("rank: {} of {} unknowns", fit.rows.len(), ncols);
    assert!(!fit.inconsistent, "no bilinear completion exists");

    // particular solution: free variables set to zero
    let mut sol = vec![BigRational::zero(); ncols];
    for (piv, row) in fit.rows.iter().rev() {
        let mut val = -row[ncols].clone();
        for c in (piv + 1)..ncols {
            if !row[c].is_zero() {
                val = val - &row[c] * &sol[c];
            }
        }
        sol[*piv] = val;
    }
    let mut support = Vec::new();
    for (s, c) in sol.iter().enumerate() {
        if !c.is_zero() {
            let (lpos, p, dims) = &shapes[s];
            println!("c[{s}] = {c}  shape: lpos={lpos} perm={p:?} dims={dims}");
            support.push((s, c.clone()));
        }
    }
    // frozen outcome backing M6Variant::Corrected:
    //   -1 * b_l^{ij b} b_r^{lk a}   (shape 25)
    //   +1 * b_l^{ik b} b_r^{lj a}   (shape 27)
    //   +1 * b_l^{ji a} b_r^{lk b}   (shape 28)
    //   -1 * b_l^{jk a} b_r^{li b}   (shape 30)
    let minus = -BigRational::from_integer(1.into());
    let plus = BigRational::from_integer(1.into());
    assert_eq!(
        support,
        vec![
            (25, minus.clone()),
            (27, plus.clone()),
            (28, plus),
            (30, minus),
        ]
    );
}
