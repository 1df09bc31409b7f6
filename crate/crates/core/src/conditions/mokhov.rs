//! The Mokhov conditions M1–M7 on the first-order hydrodynamic part.
//!
//! M1 and M2 are the skew-adjointness of the operator; M3–M7 express its
//! Jacobi identity. M6 and M7 carry selectable term variants: the source
//! transcription of these two families is gated against the catalog of
//! known Hamiltonian operators and against the direct Schouten test, and
//! the variant passing that gate is the compiled default (see the
//! `oracle_gate` suite).

use super::{dim_name, fx, CheckOptions, ConditionId, Family, Residual};
use crate::expr::Expr;
use crate::operator::OperatorSpec;

/// Term arrangement for the M6 family.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum M6Variant {
    /// Exactly as displayed in the source: bilinears
    /// `- b_l^{ij b} b_r^{lk a} - b_l^{ik a} b_r^{lj b}
    ///  + b_l^{ji a} b_r^{lk b} + b_l^{jk a} b_r^{il b}`.
    AsPrinted,
    /// Last bilinear contracted as `+ b_l^{jk a} b_r^{li b}`.
    LastFactorLi,
    /// The `LastFactorLi` term set, summed cyclically over `(i,j,k)`.
    CyclicLastFactorLi,
    /// The printed term set, summed cyclically over `(i,j,k)`.
    CyclicAsPrinted,
    /// The corrected arrangement recovered by exact fitting against the
    /// catalog (unique sparse solution; see the gate suite):
    /// `- b_l^{ij b} b_r^{lk a} + b_l^{ik b} b_r^{lj a}
    ///  + b_l^{ji a} b_r^{lk b} - b_l^{jk a} b_r^{li b}`,
    /// i.e. the whole condition is antisymmetric under `(i,a) <-> (j,b)`.
    #[default]
    Corrected,
}

/// Term arrangement for the M7 family.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum M7Variant {
    /// Exactly as displayed in the source.
    #[default]
    AsPrinted,
    /// Cyclic blocks with the first factor contracted as `b_r^{il b}`.
    CyclicFactorIl,
}

pub(super) struct Pre<'a> {
    spec: &'a OperatorSpec,
    n: usize,
    nd: usize,
    /// dg[alpha][k](i,j) = d g^{ij alpha} / d u^k
    dg: Vec<Vec<Vec<Expr>>>,
    /// db[alpha][k](i,j,r) = d b_r^{ij alpha} / d u^k
    db: Vec<Vec<Vec<Expr>>>,
}

impl<'a> Pre<'a> {
    pub(super) fn new(spec: &'a OperatorSpec) -> Pre<'a> {
        let n = spec.n_fields();
        let nd = spec.n_dims();
        let rw = &spec.rewrites;
        let mut dg = Vec::new();
        let mut db = Vec::new();
        for alpha in 0..nd {
            let mut dg_a = Vec::new();
            let mut db_a = Vec::new();
            for k in 0..n {
                let mut gm = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        gm.push(spec.g[alpha].at(i, j).diff(k, rw));
                    }
                }
                dg_a.push(gm);
                let mut bm = Vec::with_capacity(n * n * n);
                for i in 0..n {
                    for j in 0..n {
                        for r in 0..n {
                            bm.push(spec.b[alpha].at(i, j, r).diff(k, rw));
                        }
                    }
                }
                db_a.push(bm);
            }
            dg.push(dg_a);
            db.push(db_a);
        }
        Pre {
            spec,
            n,
            nd,
            dg,
            db,
        }
    }

    fn g(&self, alpha: usize, i: usize, j: usize) -> &Expr {
        self.spec.g[alpha].at(i, j)
    }

    fn b(&self, alpha: usize, i: usize, j: usize, k: usize) -> &Expr {
        self.spec.b[alpha].at(i, j, k)
    }

    fn dg(&self, alpha: usize, k: usize, i: usize, j: usize) -> &Expr {
        &self.dg[alpha][k][i * self.n + j]
    }

    /// d b_r^{ij alpha} / d u^k
    fn db(&self, alpha: usize, k: usize, i: usize, j: usize, r: usize) -> &Expr {
        &self.db[alpha][k][(i * self.n + j) * self.n + r]
    }

    /// The M3/M4 bilinear `sum_l g^{li a} b_l^{jk b} - g^{lj b} b_l^{ik a}`.
    fn gb(&self, a: usize, bb: usize, i: usize, j: usize, k: usize) -> Expr {
        let mut acc = Expr::zero();
        for l in 0..self.n {
            acc = acc
                .add(&self.g(a, l, i).mul(self.b(bb, j, k, l)))
                .sub(&self.g(bb, l, j).mul(self.b(a, i, k, l)));
        }
        acc
    }

    /// The M5/M7 bracket
    /// `sum_l g^{li a} (d_r b_l^{jk b} - d_l b_r^{jk b})
    ///        + b_l^{ij a} b_r^{lk b} - b_l^{ik a} b_r^{lj b}`.
    fn bracket(&self, a: usize, bb: usize, i: usize, j: usize, k: usize, r: usize) -> Expr {
        let mut acc = Expr::zero();
        for l in 0..self.n {
            let curl = self.db(bb, r, j, k, l).sub(self.db(bb, l, j, k, r));
            acc = acc
                .add(&self.g(a, l, i).mul(&curl))
                .add(&self.b(a, i, j, l).mul(self.b(bb, l, k, r)))
                .sub(&self.b(a, i, k, l).mul(self.b(bb, l, j, r)));
        }
        acc
    }

    /// One M6 term set at a fixed index tuple.
    fn m6_terms(
        &self,
        variant: M6Variant,
        a: usize,
        bb: usize,
        i: usize,
        j: usize,
        k: usize,
        r: usize,
    ) -> Expr {
        let mut acc = Expr::zero();
        for l in 0..self.n {
            acc = acc
                .add(&self.g(bb, l, i).mul(self.db(a, l, j, k, r)))
                .sub(&self.g(a, l, j).mul(self.db(bb, l, i, k, r)))
                .sub(&self.b(bb, i, j, l).mul(self.b(a, l, k, r)))
                .add(&self.b(a, j, i, l).mul(self.b(bb, l, k, r)));
            match variant {
                M6Variant::Corrected => {
                    acc = acc
                        .add(&self.b(bb, i, k, l).mul(self.b(a, l, j, r)))
                        .sub(&self.b(a, j, k, l).mul(self.b(bb, l, i, r)));
                }
                M6Variant::LastFactorLi | M6Variant::CyclicLastFactorLi => {
                    acc = acc
                        .sub(&self.b(a, i, k, l).mul(self.b(bb, l, j, r)))
                        .add(&self.b(a, j, k, l).mul(self.b(bb, l, i, r)));
                }
                M6Variant::AsPrinted | M6Variant::CyclicAsPrinted => {
                    acc = acc
                        .sub(&self.b(a, i, k, l).mul(self.b(bb, l, j, r)))
                        .add(&self.b(a, j, k, l).mul(self.b(bb, i, l, r)));
                }
            }
        }
        acc
    }

    fn m6(
        &self,
        variant: M6Variant,
        a: usize,
        bb: usize,
        i: usize,
        j: usize,
        k: usize,
        r: usize,
    ) -> Expr {
        match variant {
            M6Variant::AsPrinted | M6Variant::LastFactorLi | M6Variant::Corrected => {
                self.m6_terms(variant, a, bb, i, j, k, r)
            }
            M6Variant::CyclicAsPrinted | M6Variant::CyclicLastFactorLi => self
                .m6_terms(variant, a, bb, i, j, k, r)
                .add(&self.m6_terms(variant, a, bb, j, k, i, r))
                .add(&self.m6_terms(variant, a, bb, k, i, j, r)),
        }
    }

    fn m7(
        &self,
        variant: M7Variant,
        a: usize,
        bb: usize,
        i: usize,
        j: usize,
        k: usize,
        r: usize,
        s: usize,
    ) -> Expr {
        let rw = &self.spec.rewrites;
        let mut acc = self
            .bracket(a, bb, i, j, k, r)
            .diff(s, rw)
            .add(&self.bracket(bb, a, i, j, k, s).diff(r, rw));
        // two cyclic blocks over (i,j,k)
        let cyc = [(i, j, k), (j, k, i), (k, i, j)];
        for &(ci, cj, ck) in &cyc {
            for l in 0..self.n {
                let first = match variant {
                    M7Variant::AsPrinted => self.b(bb, l, ci, r),
                    M7Variant::CyclicFactorIl => self.b(bb, ci, l, r),
                };
                let inner = self.db(a, l, cj, ck, s).sub(self.db(a, s, cj, ck, l));
                acc = acc.add(&first.mul(&inner));
            }
            for l in 0..self.n {
                let first = match variant {
                    M7Variant::AsPrinted => self.b(a, l, ci, s),
                    M7Variant::CyclicFactorIl => self.b(a, ci, l, s),
                };
                let inner = self.db(bb, l, cj, ck, r).sub(self.db(bb, r, cj, ck, l));
                acc = acc.add(&first.mul(&inner));
            }
        }
        acc
    }
}

pub fn residuals(spec: &OperatorSpec, opts: &CheckOptions) -> Vec<Residual> {
    let pre = Pre::new(spec);
    let n = pre.n;
    let nd = pre.nd;
    let mut out = Vec::new();
    let dn = |a: usize| dim_name(spec, a);

    // M1: g^{ij a} = g^{ji a}
    for a in 0..nd {
        for i in 0..n {
            for j in 0..n {
                if !opts.full_range && j < i {
                    continue;
                }
                out.push(Residual {
                    id: ConditionId::new(
                        Family::M1,
                        vec![("i", fx(i)), ("j", fx(j)), ("a", dn(a))],
                    ),
                    expr: pre.g(a, i, j).sub(pre.g(a, j, i)),
                });
            }
        }
    }

    // M2: d g^{ij a}/d u^k = b_k^{ij a} + b_k^{ji a}
    for a in 0..nd {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.push(Residual {
                        id: ConditionId::new(
                            Family::M2,
                            vec![("i", fx(i)), ("j", fx(j)), ("k", fx(k)), ("a", dn(a))],
                        ),
                        expr: pre
                            .dg(a, k, i, j)
                            .sub(pre.b(a, i, j, k))
                            .sub(pre.b(a, j, i, k)),
                    });
                }
            }
        }
    }

    // M3: exchange sum over (a,b) of the g-b bilinear
    for a in 0..nd {
        for bb in 0..nd {
            if !opts.full_range && bb < a {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        out.push(Residual {
                            id: ConditionId::new(
                                Family::M3,
                                vec![
                                    ("i", fx(i)),
                                    ("j", fx(j)),
                                    ("k", fx(k)),
                                    ("a", dn(a)),
                                    ("b", dn(bb)),
                                ],
                            ),
                            expr: pre.gb(a, bb, i, j, k).add(&pre.gb(bb, a, i, j, k)),
                        });
                    }
                }
            }
        }
    }

    // M4: cyclic sum over (i,j,k) of the same bilinear
    for a in 0..nd {
        for bb in 0..nd {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        out.push(Residual {
                            id: ConditionId::new(
                                Family::M4,
                                vec![
                                    ("i", fx(i)),
                                    ("j", fx(j)),
                                    ("k", fx(k)),
                                    ("a", dn(a)),
                                    ("b", dn(bb)),
                                ],
                            ),
                            expr: pre
                                .gb(a, bb, i, j, k)
                                .add(&pre.gb(a, bb, j, k, i))
                                .add(&pre.gb(a, bb, k, i, j)),
                        });
                    }
                }
            }
        }
    }

    // M5: exchange sum over (a,b) of the curvature bracket
    for a in 0..nd {
        for bb in 0..nd {
            if !opts.full_range && bb < a {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for r in 0..n {
                            out.push(Residual {
                                id: ConditionId::new(
                                    Family::M5,
                                    vec![
                                        ("i", fx(i)),
                                        ("j", fx(j)),
                                        ("k", fx(k)),
                                        ("r", fx(r)),
                                        ("a", dn(a)),
                                        ("b", dn(bb)),
                                    ],
                                ),
                                expr: pre
                                    .bracket(a, bb, i, j, k, r)
                                    .add(&pre.bracket(bb, a, i, j, k, r)),
                            });
                        }
                    }
                }
            }
        }
    }

    // M6
    for a in 0..nd {
        for bb in 0..nd {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for r in 0..n {
                            out.push(Residual {
                                id: ConditionId::new(
                                    Family::M6,
                                    vec![
                                        ("i", fx(i)),
                                        ("j", fx(j)),
                                        ("k", fx(k)),
                                        ("r", fx(r)),
                                        ("a", dn(a)),
                                        ("b", dn(bb)),
                                    ],
                                ),
                                expr: pre.m6(opts.m6, a, bb, i, j, k, r),
                            });
                        }
                    }
                }
            }
        }
    }

    // M7
    for a in 0..nd {
        for bb in 0..nd {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for r in 0..n {
                            for s in 0..n {
                                out.push(Residual {
                                    id: ConditionId::new(
                                        Family::M7,
                                        vec![
                                            ("i", fx(i)),
                                            ("j", fx(j)),
                                            ("k", fx(k)),
                                            ("r", fx(r)),
                                            ("s", fx(s)),
                                            ("a", dn(a)),
                                            ("b", dn(bb)),
                                        ],
                                    ),
                                    expr: pre.m7(opts.m7, a, bb, i, j, k, r, s),
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    out
}
