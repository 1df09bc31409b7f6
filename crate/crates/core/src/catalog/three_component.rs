//! Three-component canonical forms: the non-degenerate pair P3, P4 and the
//! degenerate forms P5–P24 classified by the rank of the metric pencil.

use super::*;
use crate::operator::FieldSpace;

fn space3() -> FieldSpace {
    FieldSpace::uvw_xy()
}

fn build3(gx: Mat, gy: Mat, tail: Mat) -> OperatorSpec {
    OperatorSpec::from_parts(
        space3(),
        vec![gx, gy],
        tail,
        Mat::zero(3),
        RewriteTable::empty(),
    )
    .expect("catalog operator is well-formed")
}

fn eps() -> Expr {
    Expr::param("eps")
}

fn ansatz3() -> (Vec<(String, Vec<usize>)>, Mat) {
    let unknowns = vec![
        ("f1".to_string(), vec![0, 1, 2]),
        ("f2".to_string(), vec![0, 1, 2]),
        ("f3".to_string(), vec![0, 1, 2]),
    ];
    let m = forma3(
        Expr::func("f1", &[0, 1, 2]),
        Expr::func("f2", &[0, 1, 2]),
        Expr::func("f3", &[0, 1, 2]),
    );
    (unknowns, m)
}

fn f1_atom() -> Atom {
    Atom::func("f1", &[0, 1, 2])
}
fn f2_atom() -> Atom {
    Atom::func("f2", &[0, 1, 2])
}
fn f3_atom() -> Atom {
    Atom::func("f3", &[0, 1, 2])
}

/// Derivative atoms `name_field` of the generic three-component ansatz.
fn first_derivs(list: &[(&str, usize)]) -> Vec<Atom> {
    list.iter()
        .map(|(name, field)| Atom::func_deriv(name, &[0, 1, 2], &[*field]))
        .collect()
}

/// E11 metric `[[1,0,0],[0,0,0],[0,0,0]]` scaled by `c`.
fn e11(c: Expr) -> Mat {
    mat3([[c, e(0), e(0)], [e(0), e(0), e(0)], [e(0), e(0), e(0)]])
}

fn perturb(label: &str, case: FamilyCase) -> Perturbation {
    Perturbation {
        label: label.to_string(),
        case,
    }
}

fn entry(
    name: &str,
    section: &str,
    rank_class: &str,
    op: OperatorSpec,
    cases: Vec<FamilyCase>,
    notes: Vec<String>,
    necessity: Necessity,
    literal_variants: Vec<(String, OperatorSpec)>,
) -> CatalogEntry {
    let (unknowns, ansatz) = ansatz3();
    // fuzz policy defaults: perturb the first case; every slot rigid
    let (fuzz_case, fuzz_free) = match name {
        "P1" => (0, vec![vec![1]]),
        "P5" | "P6" => (0, vec![vec![0, 1, 2], vec![], vec![]]),
        "P7" | "P8" => (0, vec![vec![], vec![1, 2], vec![]]),
        "P9" => (0, vec![vec![1, 2], vec![], vec![]]),
        "P13" => (0, vec![vec![], vec![2], vec![]]),
        "P15" => (3, vec![vec![2], vec![], vec![]]),
        "P16" => (2, vec![vec![2], vec![], vec![]]),
        "P17" | "P18" | "P19" => (0, vec![vec![2], vec![], vec![]]),
        _ => (0, vec![vec![], vec![], vec![]]),
    };
    CatalogEntry {
        name: name.into(),
        section: section.into(),
        rank_class: rank_class.into(),
        op,
        ansatz_unknowns: unknowns,
        ansatz,
        cases,
        notes,
        necessity,
        literal_variants,
        fuzz_case,
        fuzz_free,
    }
}

pub(super) fn entries() -> Vec<CatalogEntry> {
    vec![
        p3(),
        p4(),
        p5(),
        p6(),
        p7(),
        p8(),
        p9(),
        p10(),
        p11(),
        p12(),
        p13(),
        p14(),
        p15(),
        p16(),
        p17(),
        p18(),
        p19(),
        p20(),
        p21(),
        p22(),
        p23(),
        p24(),
    ]
}

/// Antidiagonal unit metric of the non-degenerate forms.
fn nondeg_gx() -> Mat {
    mat3([[e(0), e(0), e(1)], [e(0), e(1), e(0)], [e(1), e(0), e(0)]])
}

fn p3() -> CatalogEntry {
    let lam = Expr::param("lambda");
    let gy = mat3([
        [v().mul_int(-2), w(), lam.clone()],
        [w(), lam.clone(), e(0)],
        [lam, e(0), e(0)],
    ]);
    let tail = mat3([
        [vy().neg(), wy().mul_int(2), e(0)],
        [wy().neg(), e(0), e(0)],
        [e(0), e(0), e(0)],
    ]);
    let op = build3(nondeg_gx(), gy, tail);
    let (c, c1) = (Expr::param("c"), Expr::param("c1"));
    let fam =
        |f1: Expr, f2: Expr, f3: Expr, label: &str| FamilyCase::new(label, forma3(f1, f2, f3));
    let family = fam(
        c.mul(&u()).add(&c1),
        c.mul(&v()).neg(),
        c.mul(&w()),
        "f1 = c*u + c1, f2 = -c*v, f3 = c*w",
    );
    let necessity = Necessity {
        expected_forced: first_derivs(&[
            ("f1", 1),
            ("f1", 2),
            ("f2", 0),
            ("f2", 2),
            ("f3", 0),
            ("f3", 1),
        ]),
        perturbations: vec![
            perturb(
                "f1 nonlinear",
                fam(
                    c.mul(&u())
                        .add(&c1)
                        .add(&eps().mul(&u().int_pow(2).unwrap())),
                    c.mul(&v()).neg(),
                    c.mul(&w()),
                    "f1 += eps*u^2",
                ),
            ),
            perturb(
                "f2 off-form",
                fam(
                    c.mul(&u()).add(&c1),
                    c.mul(&v()).neg().add(&eps().mul(&u())),
                    c.mul(&w()),
                    "f2 += eps*u",
                ),
            ),
            perturb(
                "f3 off-form",
                fam(
                    c.mul(&u()).add(&c1),
                    c.mul(&v()).neg(),
                    c.mul(&w()).add(&eps().mul(&v())),
                    "f3 += eps*v",
                ),
            ),
        ],
    };
    entry(
        "P3",
        "three-component non-degenerate",
        "non-degenerate",
        op,
        vec![family],
        vec![],
        necessity,
        vec![],
    )
}

fn p4() -> CatalogEntry {
    let gy = mat3([
        [u().mul_int(-2), v().mul(&Expr::rational(-1, 2)), w()],
        [v().mul(&Expr::rational(-1, 2)), w(), e(0)],
        [w(), e(0), e(0)],
    ]);
    let tail = mat3([
        [uy().neg(), vy().mul(&half()), wy().mul_int(2)],
        [vy().neg(), wy().mul(&half()), e(0)],
        [wy().neg(), e(0), e(0)],
    ]);
    let op = build3(nondeg_gx(), gy, tail);
    let family = FamilyCase::new("f1 = f2 = f3 = 0", Mat::zero(3));
    let necessity = Necessity {
        expected_forced: first_derivs(&[
            ("f1", 1),
            ("f1", 2),
            ("f2", 0),
            ("f2", 2),
            ("f3", 0),
            ("f3", 1),
        ]),
        perturbations: vec![
            perturb(
                "f1 = 1",
                FamilyCase::new("f1 = 1", forma3(e(1), e(0), e(0))),
            ),
            perturb(
                "f1 = eps*u",
                FamilyCase::new("f1 = eps*u", forma3(eps().mul(&u()), e(0), e(0))),
            ),
            perturb(
                "f2 = eps",
                FamilyCase::new("f2 = eps", forma3(e(0), eps(), e(0))),
            ),
            perturb(
                "f3 = eps*w",
                FamilyCase::new("f3 = eps*w", forma3(e(0), e(0), eps().mul(&w()))),
            ),
        ],
    };
    entry(
        "P4",
        "three-component non-degenerate",
        "non-degenerate",
        op,
        vec![family],
        vec![],
        necessity,
        vec![],
    )
}

fn rank0(name: &str, coeff: Expr) -> CatalogEntry {
    let cell = wx().add(&coeff.mul(&wy()));
    let tail = mat3([
        [e(0), cell.clone(), e(0)],
        [cell.neg(), e(0), e(0)],
        [e(0), e(0), e(0)],
    ]);
    let op = build3(Mat::zero(3), Mat::zero(3), tail);
    let f1_free = Expr::func("F1", &[0, 1, 2]);
    let family = FamilyCase::new(
        "f2 = f3 = 0, f1 arbitrary",
        forma3(f1_free.clone(), e(0), e(0)),
    );
    let necessity = Necessity {
        expected_forced: vec![f2_atom(), f3_atom()],
        perturbations: vec![
            perturb(
                "f2 = eps*u",
                FamilyCase::new("f2 = eps*u", forma3(f1_free.clone(), eps().mul(&u()), e(0))),
            ),
            perturb(
                "f3 = eps*v",
                FamilyCase::new("f3 = eps*v", forma3(f1_free, e(0), eps().mul(&v()))),
            ),
        ],
    };
    entry(
        name,
        "three-component degenerate, rank 0",
        "rank 0",
        op,
        vec![family],
        vec![],
        necessity,
        vec![],
    )
}

fn p5() -> CatalogEntry {
    rank0("P5", u())
}

fn p6() -> CatalogEntry {
    rank0("P6", w())
}

fn h_vw() -> Expr {
    Expr::func("h", &[1, 2])
}

fn h_atom() -> Atom {
    Atom::func("h", &[1, 2])
}

fn cap(name: &str, args: &[usize]) -> Expr {
    Expr::func(name, args)
}

/// The rewrite rule and omega of the integral case shared by the P7 gate:
/// `G_w = d/dv (F1/F3)` and `f2 = -(G + F4(v)) F3`.
fn integral_case(label: &str) -> FamilyCase {
    let f1 = cap("F1", &[1, 2]);
    let f3 = cap("F3", &[1, 2]);
    let g_rule = f1.div(&f3).unwrap().diff(1, &RewriteTable::empty());
    let rw =
        RewriteTable::rule(Atom::func_deriv("G", &[1, 2], &[2]), g_rule).expect("acyclic rule");
    let f2 = cap("G", &[1, 2]).add(&cap("F4", &[1])).neg().mul(&f3);
    FamilyCase::new(label, forma3(f1, f2, f3))
        .bind(h_atom(), e(0))
        .with_rewrites(rw)
        .note("G(v,w) carries the rule G_w = d/dv(F1/F3); F4(v) is free")
}

fn p7() -> CatalogEntry {
    let tail_cell = h_vw().mul(&vy());
    let tail = mat3([
        [e(0), e(0), tail_cell.clone()],
        [e(0), e(0), e(0)],
        [tail_cell.neg(), e(0), e(0)],
    ]);
    let op = build3(e11(e(1)), Mat::zero(3), tail);
    let cases = vec![
        FamilyCase::new(
            "1: h arbitrary, f1 = f3 = 0, f2 = F2(v,w)",
            forma3(e(0), cap("F2", &[1, 2]), e(0)),
        ),
        FamilyCase::new(
            "2: h = 0, f1 = F1(v,w), f2 = F2(v,w), f3 = 0",
            forma3(cap("F1", &[1, 2]), cap("F2", &[1, 2]), e(0)),
        )
        .bind(h_atom(), e(0)),
        integral_case("3: h = 0, f2 = -(G + F4(v)) F3"),
    ];
    let necessity = Necessity {
        expected_forced: vec![f1_atom(), f3_atom()],
        perturbations: vec![
            perturb(
                "h generic with f1 nonzero",
                FamilyCase::new(
                    "f1 = F1(v,w), h generic",
                    forma3(cap("F1", &[1, 2]), e(0), e(0)),
                ),
            ),
            perturb(
                "integral relation dropped",
                FamilyCase::new("h = 0, f1 = v, f3 = w, f2 = 0", forma3(v(), e(0), w()))
                    .bind(h_atom(), e(0)),
            ),
            perturb(
                "u-dependent f2",
                FamilyCase::new("f2 = u, h generic", forma3(e(0), u(), e(0))),
            ),
        ],
    };
    entry(
        "P7",
        "three-component degenerate, rank 1",
        "rank 1",
        op,
        cases,
        vec![],
        necessity,
        vec![],
    )
}

fn p8() -> CatalogEntry {
    let tail_cell = h_vw().mul(&vy());
    let tail = mat3([
        [vy().mul(&half()), e(0), tail_cell.clone()],
        [e(0), e(0), e(0)],
        [tail_cell.neg(), e(0), e(0)],
    ]);
    let op = build3(e11(e(1)), e11(v()), tail);
    let cases = vec![
        FamilyCase::new(
            "1: h arbitrary, f1 = f3 = 0, f2 = F2(v,w)",
            forma3(e(0), cap("F2", &[1, 2]), e(0)),
        ),
        FamilyCase::new(
            "2: h = 0, f1 = F1(v,w), f2 = F2(v,w), f3 = 0",
            forma3(cap("F1", &[1, 2]), cap("F2", &[1, 2]), e(0)),
        )
        .bind(h_atom(), e(0)),
    ];
    let necessity = Necessity {
        expected_forced: vec![f1_atom(), f3_atom()],
        perturbations: vec![
            perturb(
                "h generic with f1 nonzero",
                FamilyCase::new(
                    "f1 = F1(v,w), h generic",
                    forma3(cap("F1", &[1, 2]), e(0), e(0)),
                ),
            ),
            perturb(
                "integral case is absent here",
                integral_case("P7-style integral case"),
            ),
            perturb(
                "u-dependent f2",
                FamilyCase::new("f2 = u, h = 0", forma3(e(0), u(), e(0))).bind(h_atom(), e(0)),
            ),
        ],
    };
    entry(
        "P8",
        "three-component degenerate, rank 1",
        "rank 1",
        op,
        cases,
        vec![],
        necessity,
        vec![],
    )
}

fn f_vw() -> Expr {
    Expr::func("f", &[1, 2])
}

fn p9_tail() -> Mat {
    let fv = Expr::func_deriv("f", &[1, 2], &[1]);
    let fw = Expr::func_deriv("f", &[1, 2], &[2]);
    let diag = fv.mul(&vy()).add(&fw.mul(&wy())).mul(&half());
    let cell = wx().add(&h_vw().mul(&wy()));
    mat3([
        [diag, cell.clone(), e(0)],
        [cell.neg(), e(0), e(0)],
        [e(0), e(0), e(0)],
    ])
}

fn p9() -> CatalogEntry {
    let op = build3(e11(e(1)), e11(f_vw()), p9_tail());
    let family = FamilyCase::new(
        "f2 = f3 = 0, f1 = F1(v,w)",
        forma3(cap("F1", &[1, 2]), e(0), e(0)),
    );
    let literal = OperatorSpec::from_parts(
        space3(),
        vec![e11(f_vw().add(&e(1))), Mat::zero(3)],
        p9_tail(),
        Mat::zero(3),
        RewriteTable::empty(),
    )
    .expect("literal variant is well-formed");
    let necessity = Necessity {
        expected_forced: {
            let mut v = first_derivs(&[("f2", 0)]);
            v.push(f3_atom());
            v
        },
        perturbations: vec![
            perturb(
                "u-dependent f1",
                FamilyCase::new("f1 = u", forma3(u(), e(0), e(0))),
            ),
            perturb(
                "f2 nonzero",
                FamilyCase::new("f2 = F2(v,w)", forma3(e(0), cap("F2", &[1, 2]), e(0))),
            ),
            perturb(
                "f3 = eps",
                FamilyCase::new("f3 = eps", forma3(e(0), e(0), eps())),
            ),
        ],
    };
    entry(
        "P9",
        "three-component degenerate, rank 1",
        "rank 1",
        op,
        vec![family],
        vec![
            "the display shows two d/dx summands; by analogy with P8 and the \
             rank-1 pencil the second is read as d/dy (the literal reading \
             fails skew-adjointness)"
                .into(),
        ],
        necessity,
        vec![("second summand read literally as d/dx".into(), literal)],
    )
}

fn p10_tail() -> Mat {
    let fv = Expr::func_deriv("f", &[1, 2], &[1]);
    let fw = Expr::func_deriv("f", &[1, 2], &[2]);
    // negated display: the source prints -P10 = ...
    let diag = fv.mul(&vy()).add(&fw.mul(&wy())).mul(&half()).neg();
    let cell = wx()
        .add(&f_vw().mul(&wy()))
        .sub(&h_vw().mul(&vy()))
        .div(&u())
        .unwrap();
    mat3([
        [diag, e(0), cell.clone()],
        [e(0), e(0), e(0)],
        [cell.neg(), e(0), e(0)],
    ])
}

fn p10() -> CatalogEntry {
    let op = build3(e11(e(-1)), e11(f_vw().neg()), p10_tail());
    let family = FamilyCase::new(
        "f1 = f3 = 0, f2 = F2(v,w)/u",
        forma3(e(0), cap("F2", &[1, 2]).div(&u()).unwrap(), e(0)),
    );
    let literal = OperatorSpec::from_parts(
        space3(),
        vec![e11(f_vw().add(&e(1)).neg()), Mat::zero(3)],
        p10_tail(),
        Mat::zero(3),
        RewriteTable::empty(),
    )
    .expect("literal variant is well-formed");
    let necessity = Necessity {
        expected_forced: vec![f1_atom(), f3_atom()],
        perturbations: vec![
            perturb(
                "1/u factor dropped",
                FamilyCase::new("f2 = F2(v,w)", forma3(e(0), cap("F2", &[1, 2]), e(0))),
            ),
            perturb(
                "f1 = eps*v",
                FamilyCase::new(
                    "f1 = eps*v",
                    forma3(eps().mul(&v()), cap("F2", &[1, 2]).div(&u()).unwrap(), e(0)),
                ),
            ),
            perturb(
                "f2 off-form",
                FamilyCase::new(
                    "f2 = F2/u + eps*v",
                    forma3(
                        e(0),
                        cap("F2", &[1, 2]).div(&u()).unwrap().add(&eps().mul(&v())),
                        e(0),
                    ),
                ),
            ),
        ],
    };
    entry(
        "P10",
        "three-component degenerate, rank 1",
        "rank 1",
        op,
        vec![family],
        vec![
            "the display shows two d/dx summands; the second is read as d/dy".into(),
            "the source displays -P10; the entry stores the negated right-hand \
             side (Jacobi and compatibility are insensitive to the overall sign)"
                .into(),
        ],
        necessity,
        vec![("second summand read literally as d/dx".into(), literal)],
    )
}

fn p11() -> CatalogEntry {
    let cell_v = vx().add(&v().mul(&vy())).div(&u()).unwrap();
    let cell_w = wx().add(&v().mul(&wy())).div(&u()).unwrap();
    let tail = mat3([
        [vy().mul(&half()), cell_v.neg(), cell_w.neg()],
        [cell_v, e(0), e(0)],
        [cell_w, e(0), e(0)],
    ]);
    let op = build3(e11(e(1)), e11(v()), tail);
    let family = FamilyCase::new(
        "f3 = 0, f1 = F1(v,w)/u, f2 = F2(v,w)/u",
        forma3(
            cap("F1", &[1, 2]).div(&u()).unwrap(),
            cap("F2", &[1, 2]).div(&u()).unwrap(),
            e(0),
        ),
    );
    let necessity = Necessity {
        expected_forced: vec![],
        perturbations: vec![
            perturb(
                "1/u factor dropped from f1",
                FamilyCase::new(
                    "f1 = F1(v,w)",
                    forma3(
                        cap("F1", &[1, 2]),
                        cap("F2", &[1, 2]).div(&u()).unwrap(),
                        e(0),
                    ),
                ),
            ),
            perturb(
                "f3 = eps",
                FamilyCase::new(
                    "f3 = eps",
                    forma3(
                        cap("F1", &[1, 2]).div(&u()).unwrap(),
                        cap("F2", &[1, 2]).div(&u()).unwrap(),
                        eps(),
                    ),
                ),
            ),
            perturb(
                "f2 off-form",
                FamilyCase::new(
                    "f2 = F2/u + eps*w",
                    forma3(
                        cap("F1", &[1, 2]).div(&u()).unwrap(),
                        cap("F2", &[1, 2]).div(&u()).unwrap().add(&eps().mul(&w())),
                        e(0),
                    ),
                ),
            ),
        ],
    };
    entry(
        "P11",
        "three-component degenerate, rank 1",
        "rank 1",
        op,
        vec![family],
        vec![],
        necessity,
        vec![],
    )
}

fn p12_gy() -> Mat {
    mat3([
        [u().mul_int(-2), v(), e(0)],
        [v(), e(0), e(0)],
        [e(0), e(0), e(0)],
    ])
}

fn p12() -> CatalogEntry {
    let tail = mat3([
        [uy().neg(), vy().mul_int(2), e(0)],
        [vy().neg(), e(0), e(0)],
        [e(0), e(0), e(0)],
    ]);
    let op = build3(rank2_gx(), p12_gy(), tail);
    let family = FamilyCase::new("f1 = f2 = f3 = 0", Mat::zero(3));
    let necessity = Necessity {
        expected_forced: vec![f1_atom(), f2_atom(), f3_atom()],
        perturbations: vec![
            perturb(
                "f1 = eps",
                FamilyCase::new("f1 = eps", forma3(eps(), e(0), e(0))),
            ),
            perturb(
                "f2 = eps",
                FamilyCase::new("f2 = eps", forma3(e(0), eps(), e(0))),
            ),
            perturb(
                "f3 = eps*w",
                FamilyCase::new("f3 = eps*w", forma3(e(0), e(0), eps().mul(&w()))),
            ),
        ],
    };
    entry(
        "P12",
        "three-component degenerate, rank 2",
        "rank 2",
        op,
        vec![family],
        vec![],
        necessity,
        vec![],
    )
}

fn p13() -> CatalogEntry {
    let tail = mat3([
        [uy().neg(), vy().mul_int(2), wy()],
        [vy().neg(), e(0), e(0)],
        [wy().neg(), e(0), e(0)],
    ]);
    let op = build3(rank2_gx(), p12_gy(), tail);
    let family = FamilyCase::new(
        "f1 = f3 = 0, f2 = F2(w)",
        forma3(e(0), cap("F2", &[2]), e(0)),
    );
    let necessity = Necessity {
        expected_forced: vec![f1_atom(), f3_atom()],
        perturbations: vec![
            perturb(
                "f2 gains u-dependence",
                FamilyCase::new(
                    "f2 = F2(w) + eps*u",
                    forma3(e(0), cap("F2", &[2]).add(&eps().mul(&u())), e(0)),
                ),
            ),
            perturb(
                "f1 = eps",
                FamilyCase::new("f1 = eps", forma3(eps(), cap("F2", &[2]), e(0))),
            ),
            perturb(
                "f3 = eps",
                FamilyCase::new("f3 = eps", forma3(e(0), cap("F2", &[2]), eps())),
            ),
        ],
    };
    entry(
        "P13",
        "three-component degenerate, rank 2",
        "rank 2",
        op,
        vec![family],
        vec![],
        necessity,
        vec![],
    )
}

fn p14() -> CatalogEntry {
    let gy = mat3([[e(0), e(0), e(1)], [e(0), e(0), e(0)], [e(1), e(0), e(0)]]);
    let op = build3(rank2_gx(), gy, Mat::zero(3));
    let family = FamilyCase::new(
        "f1, f2, f3 constants",
        forma3(Expr::param("k1"), Expr::param("k2"), Expr::param("k3")),
    );
    let necessity = Necessity {
        expected_forced: first_derivs(&[
            ("f1", 0),
            ("f1", 1),
            ("f1", 2),
            ("f2", 0),
            ("f2", 1),
            ("f2", 2),
            ("f3", 0),
            ("f3", 1),
            ("f3", 2),
        ]),
        perturbations: vec![
            perturb("f1 = u", FamilyCase::new("f1 = u", forma3(u(), e(0), e(0)))),
            perturb("f2 = v", FamilyCase::new("f2 = v", forma3(e(0), v(), e(0)))),
            perturb("f3 = w", FamilyCase::new("f3 = w", forma3(e(0), e(0), w()))),
        ],
    };
    entry(
        "P14",
        "three-component degenerate, rank 2",
        "rank 2",
        op,
        vec![family],
        vec![],
        necessity,
        vec![],
    )
}

fn pqr_gy() -> Mat {
    mat3([
        [cap("p", &[2]), cap("q", &[2]), e(0)],
        [cap("q", &[2]), cap("r", &[2]), e(0)],
        [e(0), e(0), e(0)],
    ])
}

fn d_w(name: &str) -> Expr {
    Expr::func_deriv(name, &[2], &[2])
}

fn p_atom() -> Atom {
    Atom::func("p", &[2])
}
fn q_atom() -> Atom {
    Atom::func("q", &[2])
}
fn r_atom() -> Atom {
    Atom::func("r", &[2])
}

fn p15() -> CatalogEntry {
    let tail = mat3([
        [d_w("p").mul(&half()).mul(&wy()), e(0), e(0)],
        [d_w("q").mul(&wy()), d_w("r").mul(&half()).mul(&wy()), e(0)],
        [e(0), e(0), e(0)],
    ]);
    let op = build3(rank2_gx(), pqr_gy(), tail);
    let (c, c1, c2) = (Expr::param("c"), Expr::param("c1"), Expr::param("c2"));
    let cases = vec![
        FamilyCase::new(
            "1: p = c1, r = 2c q + c2; f3 = c f2",
            forma3(cap("F1", &[2]), cap("F2", &[2]), c.mul(&cap("F2", &[2]))),
        )
        .bind(p_atom(), c1.clone())
        .bind(r_atom(), c.mul_int(2).mul(&cap("q", &[2])).add(&c2))
        .note("the display punctuates the constant list as \"c. c1\"; read as \"c, c1\""),
        FamilyCase::new(
            "2: p, q constants, r arbitrary; f2 = 0",
            forma3(cap("F1", &[2]), e(0), cap("F3", &[2])),
        )
        .bind(p_atom(), c1.clone())
        .bind(q_atom(), c2.clone()),
        FamilyCase::new(
            "3: p, q arbitrary, r constant; f3 = 0",
            forma3(cap("F1", &[2]), cap("F2", &[2]), e(0)),
        )
        .bind(r_atom(), c1.clone()),
        FamilyCase::new(
            "4: p, q, r arbitrary; f2 = f3 = 0",
            forma3(cap("F1", &[2]), e(0), e(0)),
        ),
    ];
    let necessity = Necessity {
        expected_forced: vec![f2_atom(), f3_atom()],
        perturbations: vec![
            perturb(
                "case 1 with f3 detached from c f2",
                FamilyCase::new(
                    "f3 = c F2 + eps",
                    forma3(
                        cap("F1", &[2]),
                        cap("F2", &[2]),
                        c.mul(&cap("F2", &[2])).add(&eps()),
                    ),
                )
                .bind(p_atom(), c1.clone())
                .bind(r_atom(), c.mul_int(2).mul(&cap("q", &[2])).add(&c2)),
            ),
            perturb(
                "case 2 with f2 nonzero",
                FamilyCase::new("f2 = eps", forma3(cap("F1", &[2]), eps(), cap("F3", &[2])))
                    .bind(p_atom(), c1.clone())
                    .bind(q_atom(), c2.clone()),
            ),
            perturb(
                "generic p,q,r with f2 nonzero",
                FamilyCase::new("f2 = eps", forma3(cap("F1", &[2]), eps(), e(0))),
            ),
            perturb(
                "f1 leaves functions of w",
                FamilyCase::new("f1 = u", forma3(u(), e(0), e(0))),
            ),
        ],
    };
    entry(
        "P15",
        "three-component degenerate, rank 2",
        "rank 2",
        op,
        cases,
        vec!["case 1 prints \"c. c1\" between constants; read as the list \"c, c1\"".into()],
        necessity,
        vec![],
    )
}

fn p16() -> CatalogEntry {
    let tail = mat3([
        [d_w("p").mul(&half()).mul(&wy()), wy(), e(0)],
        [
            d_w("q").sub(&e(1)).mul(&wy()),
            d_w("r").mul(&half()).mul(&wy()),
            e(0),
        ],
        [e(0), e(0), e(0)],
    ]);
    let op = build3(rank2_gx(), pqr_gy(), tail);
    let (c, c1, c2) = (Expr::param("c"), Expr::param("c1"), Expr::param("c2"));
    let case1_p = w().mul_int(2).div(&c).unwrap().add(&c1);
    let case1_r = c.mul_int(2).mul(&cap("q", &[2]).sub(&w())).add(&c2);
    let cases = vec![
        FamilyCase::new(
            "1: p = 2w/c + c1, r = 2c(q - w) + c2; f3 = c f2",
            forma3(cap("F1", &[2]), cap("F2", &[2]), c.mul(&cap("F2", &[2]))),
        )
        .bind(p_atom(), case1_p.clone())
        .bind(r_atom(), case1_r.clone()),
        FamilyCase::new(
            "2: p constant, q = c + w, r arbitrary; f2 = 0",
            forma3(cap("F1", &[2]), e(0), cap("F3", &[2])),
        )
        .bind(p_atom(), c1.clone())
        .bind(q_atom(), c2.add(&w())),
        FamilyCase::new(
            "3: p, q, r arbitrary; f2 = f3 = 0",
            forma3(cap("F1", &[2]), e(0), e(0)),
        ),
    ];
    let necessity = Necessity {
        expected_forced: first_derivs(&[
            ("f1", 0),
            ("f1", 1),
            ("f2", 0),
            ("f2", 1),
            ("f3", 0),
            ("f3", 1),
        ]),
        perturbations: vec![
            perturb(
                "case 1 with f3 detached from c f2",
                FamilyCase::new(
                    "f3 = c F2 + eps",
                    forma3(
                        cap("F1", &[2]),
                        cap("F2", &[2]),
                        c.mul(&cap("F2", &[2])).add(&eps()),
                    ),
                )
                .bind(p_atom(), case1_p)
                .bind(r_atom(), case1_r),
            ),
            perturb(
                "generic p,q,r with f2 nonzero",
                FamilyCase::new("f2 = eps", forma3(cap("F1", &[2]), eps(), e(0))),
            ),
            perturb(
                "case 2 with q off the line c + w",
                FamilyCase::new(
                    "q = c2 + w + eps*w^2",
                    forma3(cap("F1", &[2]), e(0), cap("F3", &[2])),
                )
                .bind(p_atom(), c1)
                .bind(
                    q_atom(),
                    c2.add(&w()).add(&eps().mul(&w().int_pow(2).unwrap())),
                ),
            ),
            perturb(
                "generic p,q,r with f3 nonzero",
                FamilyCase::new("f3 = eps", forma3(cap("F1", &[2]), e(0), eps())),
            ),
            perturb(
                "f1 leaves functions of w",
                FamilyCase::new("f1 = u", forma3(u(), e(0), e(0))),
            ),
        ],
    };
    entry(
        "P16",
        "three-component degenerate, rank 2",
        "rank 2",
        op,
        cases,
        vec![],
        necessity,
        vec![],
    )
}

/// Shared shape of P17–P19: off-diagonal `-(cell)/v` tail at (1,3).
fn corner_tail(cell: Expr, extra_21: Expr) -> Mat {
    mat3([
        [e(0), e(0), cell.neg()],
        [extra_21, e(0), e(0)],
        [cell, e(0), e(0)],
    ])
}

fn f2_over_v_family() -> FamilyCase {
    FamilyCase::new(
        "f3 = 0, f1 = F1(w), f2 = F2(w)/v",
        forma3(cap("F1", &[2]), cap("F2", &[2]).div(&v()).unwrap(), e(0)),
    )
}

fn f2_over_v_perturbations() -> Vec<Perturbation> {
    vec![
        perturb(
            "f1 leaves functions of w",
            FamilyCase::new(
                "f1 = v",
                forma3(v(), cap("F2", &[2]).div(&v()).unwrap(), e(0)),
            ),
        ),
        perturb(
            "1/v factor dropped",
            FamilyCase::new("f2 = F2(w)", forma3(cap("F1", &[2]), cap("F2", &[2]), e(0))),
        ),
        perturb(
            "f3 = eps",
            FamilyCase::new(
                "f3 = eps",
                forma3(cap("F1", &[2]), cap("F2", &[2]).div(&v()).unwrap(), eps()),
            ),
        ),
    ]
}

fn p17() -> CatalogEntry {
    let gy = e11(e(1));
    let cell = wx().div(&v()).unwrap();
    let op = build3(rank2_gx(), gy, corner_tail(cell, e(0)));
    let necessity = Necessity {
        expected_forced: {
            let mut v = first_derivs(&[("f1", 0), ("f1", 1), ("f2", 0)]);
            v.push(f3_atom());
            v
        },
        perturbations: f2_over_v_perturbations(),
    };
    entry(
        "P17",
        "three-component degenerate, rank 2",
        "rank 2",
        op,
        vec![f2_over_v_family()],
        vec![],
        necessity,
        vec![],
    )
}

fn p18() -> CatalogEntry {
    let gy = mat3([[e(0), w(), e(0)], [w(), e(0), e(0)], [e(0), e(0), e(0)]]);
    let cell = wx().add(&w().mul(&wy())).div(&v()).unwrap();
    let op = build3(rank2_gx(), gy, corner_tail(cell, wy()));
    let necessity = Necessity {
        expected_forced: {
            let mut v = first_derivs(&[("f2", 0)]);
            v.push(f3_atom());
            v
        },
        perturbations: f2_over_v_perturbations(),
    };
    entry(
        "P18",
        "three-component degenerate, rank 2",
        "rank 2",
        op,
        vec![f2_over_v_family()],
        vec![],
        necessity,
        vec![],
    )
}

fn p19() -> CatalogEntry {
    let gy = mat3([[e(1), w(), e(0)], [w(), e(0), e(0)], [e(0), e(0), e(0)]]);
    let cell = wx().add(&w().mul(&wy())).div(&v()).unwrap();
    let op = build3(rank2_gx(), gy, corner_tail(cell, wy()));
    let necessity = Necessity {
        expected_forced: {
            let mut v = first_derivs(&[("f2", 0)]);
            v.push(f3_atom());
            v
        },
        perturbations: f2_over_v_perturbations(),
    };
    entry(
        "P19",
        "three-component degenerate, rank 2",
        "rank 2",
        op,
        vec![f2_over_v_family()],
        vec![],
        necessity,
        vec![],
    )
}

fn p20() -> CatalogEntry {
    let gy = mat3([[e(0), e(0), e(0)], [e(0), e(0), e(1)], [e(0), e(1), e(0)]]);
    let cell = wx().sub(&uy()).div(&v()).unwrap();
    let op = build3(rank2_gx(), gy, corner_tail(cell, e(0)));
    let c = Expr::param("c");
    let family = FamilyCase::new(
        "f1 = f3 = 0, f2 = c/v",
        forma3(e(0), c.div(&v()).unwrap(), e(0)),
    );
    let necessity = Necessity {
        expected_forced: first_derivs(&[
            ("f1", 0),
            ("f1", 1),
            ("f1", 2),
            ("f3", 0),
            ("f3", 1),
            ("f3", 2),
        ]),
        perturbations: vec![
            perturb(
                "f3 = eps",
                FamilyCase::new("f3 = eps", forma3(e(0), c.div(&v()).unwrap(), eps())),
            ),
            perturb(
                "f2 = u/v",
                FamilyCase::new("f2 = u/v", forma3(e(0), u().div(&v()).unwrap(), e(0))),
            ),
            perturb(
                "f2 = w/v",
                FamilyCase::new("f2 = w/v", forma3(e(0), w().div(&v()).unwrap(), e(0))),
            ),
            perturb(
                "f1 = eps",
                FamilyCase::new("f1 = eps", forma3(eps(), c.div(&v()).unwrap(), e(0))),
            ),
        ],
    };
    entry(
        "P20",
        "three-component degenerate, rank 2",
        "rank 2",
        op,
        vec![family],
        vec![],
        necessity,
        vec![],
    )
}

fn p21() -> CatalogEntry {
    let gy = mat3([[e(0), e(0), e(1)], [e(0), e(0), e(0)], [e(1), e(0), e(0)]]);
    let cell = wx().sub(&vy()).div(&v()).unwrap();
    let op = build3(rank2_gx(), gy, corner_tail(cell, e(0)));
    let (c, c1) = (Expr::param("c"), Expr::param("c1"));
    let f2 = c.mul(&w()).add(&c1).div(&v()).unwrap();
    let family = FamilyCase::new(
        "f1 = c, f3 = 0, f2 = (c w + c1)/v",
        forma3(c.clone(), f2.clone(), e(0)),
    );
    let off_f2 = c.add(&eps()).mul(&w()).add(&c1).div(&v()).unwrap();
    let necessity = Necessity {
        expected_forced: first_derivs(&[
            ("f1", 0),
            ("f1", 1),
            ("f1", 2),
            ("f3", 0),
            ("f3", 1),
            ("f3", 2),
        ]),
        perturbations: vec![
            perturb(
                "f1 not constant",
                FamilyCase::new("f1 = w", forma3(w(), f2.clone(), e(0))),
            ),
            perturb(
                "f2 slope detached from f1",
                FamilyCase::new("f2 = ((c+eps)w + c1)/v", forma3(c.clone(), off_f2, e(0))),
            ),
            perturb(
                "f3 = eps",
                FamilyCase::new("f3 = eps", forma3(c, f2, eps())),
            ),
        ],
    };
    entry(
        "P21",
        "three-component degenerate, rank 2",
        "rank 2",
        op,
        vec![family],
        vec![],
        necessity,
        vec![],
    )
}

fn p22() -> CatalogEntry {
    let gy = mat3([
        [u(), v().mul(&Expr::rational(-1, 2)), e(0)],
        [v().mul(&Expr::rational(-1, 2)), e(0), e(0)],
        [e(0), e(0), e(0)],
    ]);
    let corner = wx().div(&v()).unwrap();
    let tail = mat3([
        [uy().mul(&half()), vy().neg(), corner.neg()],
        [vy().mul(&half()), e(0), e(0)],
        [corner, e(0), e(0)],
    ]);
    let op = build3(rank2_gx(), gy, tail);
    let family = FamilyCase::new(
        "f1 = f3 = 0, f2 = F2(w)/v",
        forma3(e(0), cap("F2", &[2]).div(&v()).unwrap(), e(0)),
    );
    let necessity = Necessity {
        expected_forced: vec![f1_atom(), f3_atom()],
        perturbations: vec![
            perturb(
                "1/v factor dropped",
                FamilyCase::new("f2 = F2(w)", forma3(e(0), cap("F2", &[2]), e(0))),
            ),
            perturb(
                "f1 = eps",
                FamilyCase::new(
                    "f1 = eps",
                    forma3(eps(), cap("F2", &[2]).div(&v()).unwrap(), e(0)),
                ),
            ),
            perturb(
                "f3 = eps*w",
                FamilyCase::new(
                    "f3 = eps*w",
                    forma3(e(0), cap("F2", &[2]).div(&v()).unwrap(), eps().mul(&w())),
                ),
            ),
        ],
    };
    entry(
        "P22",
        "three-component degenerate, rank 2",
        "rank 2",
        op,
        vec![family],
        vec![],
        necessity,
        vec![],
    )
}

/// Denominator `w u - v` of the last two rank-2 forms.
fn wu_minus_v() -> Expr {
    w().mul(&u()).sub(&v())
}

fn p23() -> CatalogEntry {
    let gy = mat3([
        [e(1), w().neg(), e(0)],
        [w().neg(), w().int_pow(2).unwrap(), e(0)],
        [e(0), e(0), e(0)],
    ]);
    let den = wu_minus_v();
    let c13 = wx().sub(&w().mul(&wy()).mul_int(2)).div(&den).unwrap();
    let c23 = w()
        .mul(&wx())
        .sub(&w().int_pow(2).unwrap().mul(&wy()).mul_int(2))
        .div(&den)
        .unwrap();
    let tail = mat3([
        [e(0), e(0), c13.clone()],
        [wy().neg(), w().mul(&wy()), c23.neg()],
        [c13.neg(), c23, e(0)],
    ]);
    let op = build3(rank2_gx(), gy, tail);
    let f1 = cap("F1", &[2]);
    let f2 = w().mul(&f1).mul_int(-2).div(&den).unwrap();
    let f3 = w()
        .int_pow(2)
        .unwrap()
        .mul(&f1)
        .mul_int(2)
        .div(&den)
        .unwrap();
    let family = FamilyCase::new(
        "f1 = F1(w), f2 = -2w F1/(wu-v), f3 = 2w^2 F1/(wu-v)",
        forma3(f1.clone(), f2.clone(), f3.clone()),
    );
    let necessity = Necessity {
        expected_forced: first_derivs(&[("f1", 0), ("f1", 1)]),
        perturbations: vec![
            perturb(
                "f1 gains u-dependence",
                FamilyCase::new(
                    "f1 = F1(w) + eps*u",
                    forma3(f1.add(&eps().mul(&u())), f2.clone(), f3.clone()),
                ),
            ),
            perturb(
                "f2 off-form",
                FamilyCase::new(
                    "f2 += eps*w",
                    forma3(f1.clone(), f2.add(&eps().mul(&w())), f3.clone()),
                ),
            ),
            perturb(
                "f3 off-form",
                FamilyCase::new("f3 += eps", forma3(f1, f2, f3.add(&eps()))),
            ),
        ],
    };
    entry(
        "P23",
        "three-component degenerate, rank 2",
        "rank 2",
        op,
        vec![family],
        vec![],
        necessity,
        vec![],
    )
}

fn p24_corners() -> (Expr, Expr) {
    let k = Expr::param("k");
    let den = wu_minus_v();
    let c13 = wx().sub(&k.mul(&wy()).mul_int(2)).div(&den).unwrap();
    let c23 = w()
        .mul(&wx())
        .sub(&k.mul(&w()).mul(&wy()).mul_int(2))
        .div(&den)
        .unwrap();
    (c13, c23)
}

fn p24_tail(t11: Expr, t22: Expr) -> Mat {
    let k = Expr::param("k");
    let (c13, c23) = p24_corners();
    let t12 = k.mul(&wy()).div(&w().mul_int(2)).unwrap();
    mat3([
        [t11, t12.clone(), c13.clone()],
        [t12.neg(), t22, c23.neg()],
        [c13.neg(), c23, e(0)],
    ])
}

fn p24() -> CatalogEntry {
    let k = Expr::param("k");
    // Corrected reading. The printed metric/tail pair fails skew-adjointness
    // (dg = b + b~). Leaving g^{11y}, tail(1,1) and tail(2,2) free and
    // solving the Schouten obstruction forces, up to one constant merged
    // into k: g^{11y} = k/w, tail(1,1) = -k w_y/(2w^2), tail(2,2) = k w_y/2,
    // in agreement with every other printed entry of the operator.
    let gy = mat3([
        [k.div(&w()).unwrap(), k.neg(), e(0)],
        [k.neg(), k.mul(&w()), e(0)],
        [e(0), e(0), e(0)],
    ]);
    let t11 = k
        .mul(&wy())
        .neg()
        .div(&w().int_pow(2).unwrap().mul_int(2))
        .unwrap();
    let t22 = k.mul(&wy()).mul(&half());
    let op = build3(rank2_gx(), gy, p24_tail(t11, t22));
    let literal_gy = mat3([
        [e(1), k.neg(), e(0)],
        [k.neg(), k.mul(&w()), e(0)],
        [e(0), e(0), e(0)],
    ]);
    let literal_t11 = k.mul(&wy()).neg().div(&w().int_pow(2).unwrap()).unwrap();
    let literal = build3(
        rank2_gx(),
        literal_gy,
        p24_tail(literal_t11, wy().mul(&half())),
    );
    let family = FamilyCase::new("f1 = f2 = f3 = 0", Mat::zero(3));
    let necessity = Necessity {
        expected_forced: first_derivs(&[("f1", 0), ("f1", 1)]),
        perturbations: vec![
            perturb(
                "f1 = eps*w",
                FamilyCase::new("f1 = eps*w", forma3(eps().mul(&w()), e(0), e(0))),
            ),
            perturb(
                "f2 = eps/w",
                FamilyCase::new("f2 = eps/w", forma3(e(0), eps().div(&w()).unwrap(), e(0))),
            ),
            perturb(
                "f3 = eps*v",
                FamilyCase::new("f3 = eps*v", forma3(e(0), e(0), eps().mul(&v()))),
            ),
        ],
    };
    entry(
        "P24",
        "three-component degenerate, rank 2",
        "rank 2",
        op,
        vec![family],
        vec!["the printed g^{11y} = 1, tail(1,1) = -k w_y/w^2 and \
             tail(2,2) = w_y/2 are inconsistent with skew-adjointness and the \
             Jacobi identity; solving the obstruction with those three \
             entries free forces g^{11y} = k/w, tail(1,1) = -k w_y/(2w^2), \
             tail(2,2) = k w_y/2 (the literal reading is recorded and fails)"
            .into()],
        necessity,
        vec![("as printed".into(), literal)],
    )
}
