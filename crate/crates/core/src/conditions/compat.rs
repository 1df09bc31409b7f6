//! Compatibility conditions between the first-order part and the ultralocal
//! part, built on the tensor
//! `T^{ijk a} = g^{il a} d_l omega^{jk} - b_l^{ij a} omega^{lk}
//!              - b_l^{ik a} omega^{jl}`.
//!
//! C1 demands the cyclic symmetry `T^{ijk a} = T^{kij a}` over the full
//! index range, repeated indices included (at repeated indices it forces
//! diagonal components of `T` to vanish, which is where the two-component
//! constraints live).
//!
//! C2 has two selectable forms. `AsPrinted` is the pointwise identity
//! displayed in the source. `Antisymmetrized` is the identity the Jacobi
//! obstruction actually produces on the super-jet space: with
//! `R^{abc}_{s a} = b_s^{la a} d_l omega^{bc}
//!                  + omega^{la} (d_l b_s^{bc a} - d_s b_l^{bc a})`,
//! the alternating sum of `R` over the three distinct field labels must
//! match the derivative of `T`:
//! `sum_{sigma} sgn(sigma) R^{sigma(abc)}_{s a}
//!    = (2/3) d_s (T^{cab a} + T^{abc a} + T^{bca a})`.
//! The pointwise form fails on classified operators (see the gate suite),
//! so the antisymmetrized form is the compiled default; both remain
//! available for the transcription report.

use super::{dim_name, fx, CheckOptions, ConditionId, Family, Residual};
use crate::expr::Expr;
use crate::operator::OperatorSpec;

/// Form of the C2 family.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum C2Variant {
    /// Pointwise identity as displayed in the source.
    AsPrinted,
    /// Alternating form derived from the Schouten obstruction; the default.
    #[default]
    Antisymmetrized,
}

/// The compatibility tensor with its first derivatives.
pub struct Ttensor {
    n: usize,
    nd: usize,
    /// t[alpha][(i,j,k)]
    t: Vec<Vec<Expr>>,
    /// dt[alpha][s][(i,j,k)]
    dt: Vec<Vec<Vec<Expr>>>,
}

impl Ttensor {
    pub fn new(spec: &OperatorSpec) -> Ttensor {
        let n = spec.n_fields();
        let nd = spec.n_dims();
        let rw = &spec.rewrites;
        let mut domega = Vec::new();
        for l in 0..n {
            let mut m = Vec::new();
            for j in 0..n {
                let mut row = Vec::new();
                for k in 0..n {
                    row.push(spec.omega.at(j, k).diff(l, rw));
                }
                m.push(row);
            }
            domega.push(m);
        }
        let mut t = Vec::new();
        for alpha in 0..nd {
            let mut ta = Vec::with_capacity(n * n * n);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut acc = Expr::zero();
                        for l in 0..n {
                            acc = acc
                                .add(&spec.g[alpha].at(i, l).mul(&domega[l][j][k]))
                                .sub(&spec.b[alpha].at(i, j, l).mul(spec.omega.at(l, k)))
                                .sub(&spec.b[alpha].at(i, k, l).mul(spec.omega.at(j, l)));
                        }
                        ta.push(acc);
                    }
                }
            }
            t.push(ta);
        }
        let mut dt = Vec::new();
        for ta in &t {
            let mut per_s = Vec::new();
            for s in 0..n {
                per_s.push(ta.iter().map(|e| e.diff(s, rw)).collect());
            }
            dt.push(per_s);
        }
        Ttensor { n, nd, t, dt }
    }

    pub fn at(&self, alpha: usize, i: usize, j: usize, k: usize) -> &Expr {
        &self.t[alpha][(i * self.n + j) * self.n + k]
    }

    pub fn d_at(&self, alpha: usize, s: usize, i: usize, j: usize, k: usize) -> &Expr {
        &self.dt[alpha][s][(i * self.n + j) * self.n + k]
    }

    pub fn jet_free(&self) -> bool {
        self.t.iter().flatten().all(|e| !e.contains_jet())
    }

    pub fn n_dims(&self) -> usize {
        self.nd
    }
}

/// `R^{abc}_{s alpha}` of the antisymmetrized C2 form.
fn r_term(
    spec: &OperatorSpec,
    domega: &[Vec<Vec<Expr>>],
    db: &[Vec<Vec<Expr>>],
    a: usize,
    b: usize,
    c: usize,
    s: usize,
    alpha: usize,
) -> Expr {
    let n = spec.n_fields();
    let mut acc = Expr::zero();
    for l in 0..n {
        acc = acc.add(&spec.b[alpha].at(l, a, s).mul(&domega[l][b][c]));
        let curl = db[alpha][l][(b * n + c) * n + s].sub(&db[alpha][s][(b * n + c) * n + l]);
        acc = acc.add(&spec.omega.at(l, a).mul(&curl));
    }
    acc
}

pub fn residuals(spec: &OperatorSpec, opts: &CheckOptions) -> Vec<Residual> {
    let n = spec.n_fields();
    let nd = spec.n_dims();
    let rw = &spec.rewrites;
    let tt = Ttensor::new(spec);
    let dn = |a: usize| dim_name(spec, a);
    let mut out = Vec::new();

    // C1: T^{ijk a} - T^{kij a}, all tuples.
    for alpha in 0..nd {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.push(Residual {
                        id: ConditionId::new(
                            Family::C1,
                            vec![("i", fx(i)), ("j", fx(j)), ("k", fx(k)), ("a", dn(alpha))],
                        ),
                        expr: tt.at(alpha, i, j, k).sub(tt.at(alpha, k, i, j)),
                    });
                }
            }
        }
    }

    // shared derivative tables
    let mut domega = Vec::new();
    for l in 0..n {
        let mut m = Vec::new();
        for j in 0..n {
            let mut row = Vec::new();
            for k in 0..n {
                row.push(spec.omega.at(j, k).diff(l, rw));
            }
            m.push(row);
        }
        domega.push(m);
    }
    let mut db = Vec::new();
    for alpha in 0..nd {
        let mut per_l = Vec::new();
        for l in 0..n {
            let mut flat = Vec::with_capacity(n * n * n);
            for i in 0..n {
                for j in 0..n {
                    for r in 0..n {
                        flat.push(spec.b[alpha].at(i, j, r).diff(l, rw));
                    }
                }
            }
            per_l.push(flat);
        }
        db.push(per_l);
    }

    match opts.c2 {
        C2Variant::AsPrinted => {
            for alpha in 0..nd {
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            for s in 0..n {
                                let mut rhs = Expr::zero();
                                for l in 0..n {
                                    rhs = rhs.add(&spec.b[alpha].at(l, k, s).mul(&domega[l][i][j]));
                                    let curl = db[alpha][l][(k * n + i) * n + s]
                                        .sub(&db[alpha][s][(k * n + i) * n + l]);
                                    rhs = rhs.add(&curl.mul(spec.omega.at(l, j)));
                                }
                                out.push(Residual {
                                    id: ConditionId::new(
                                        Family::C2,
                                        vec![
                                            ("i", fx(i)),
                                            ("j", fx(j)),
                                            ("k", fx(k)),
                                            ("s", fx(s)),
                                            ("a", dn(alpha)),
                                        ],
                                    ),
                                    expr: tt.d_at(alpha, s, i, j, k).sub(&rhs),
                                });
                            }
                        }
                    }
                }
            }
        }
        C2Variant::Antisymmetrized => {
            // one essential residual per (s, alpha) and unordered distinct
            // triple; permuted triples are emitted only in full range.
            let perms: [([usize; 3], i64); 6] = [
                ([0, 1, 2], 1),
                ([1, 2, 0], 1),
                ([2, 0, 1], 1),
                ([1, 0, 2], -1),
                ([0, 2, 1], -1),
                ([2, 1, 0], -1),
            ];
            let mut triples: Vec<[usize; 3]> = Vec::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    for c in (b + 1)..n {
                        triples.push([a, b, c]);
                    }
                }
            }
            if opts.full_range {
                let base = triples.clone();
                triples = Vec::new();
                for t in base {
                    for (p, _) in &perms {
                        triples.push([t[p[0]], t[p[1]], t[p[2]]]);
                    }
                }
            }
            for tri in triples {
                let [a, b, c] = tri;
                for alpha in 0..nd {
                    for s in 0..n {
                        let mut alt = Expr::zero();
                        for (p, sign) in &perms {
                            let (pa, pb, pc) = (tri[p[0]], tri[p[1]], tri[p[2]]);
                            let r = r_term(spec, &domega, &db, pa, pb, pc, s, alpha);
                            alt = alt.add(&r.mul_int(*sign));
                        }
                        let tsum = tt
                            .d_at(alpha, s, c, a, b)
                            .add(tt.d_at(alpha, s, a, b, c))
                            .add(tt.d_at(alpha, s, b, c, a));
                        let expr = alt.sub(&tsum.mul(&Expr::rational(2, 3)));
                        out.push(Residual {
                            id: ConditionId::new(
                                Family::C2,
                                vec![
                                    ("i", fx(a)),
                                    ("j", fx(b)),
                                    ("k", fx(c)),
                                    ("s", fx(s)),
                                    ("a", dn(alpha)),
                                ],
                            ),
                            expr,
                        });
                    }
                }
            }
        }
    }
    out
}
