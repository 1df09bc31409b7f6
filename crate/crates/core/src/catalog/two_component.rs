//! Two-component degenerate canonical forms P1 and P2.

use super::*;
use crate::operator::FieldSpace;

fn f_uv() -> Expr {
    Expr::func("f", &[0, 1])
}

fn cap_f() -> Expr {
    Expr::func("F", &[1])
}

pub(super) fn entries() -> Vec<CatalogEntry> {
    vec![p1(), p2()]
}

fn base(tail: Mat) -> OperatorSpec {
    let gx = mat2([[e(1), e(0)], [e(0), e(0)]]);
    let gy = mat2([[v(), e(0)], [e(0), e(0)]]);
    OperatorSpec::from_parts(
        FieldSpace::uv_xy(),
        vec![gx, gy],
        tail,
        Mat::zero(2),
        RewriteTable::empty(),
    )
    .expect("catalog operator is well-formed")
}

fn p1() -> CatalogEntry {
    let tail = mat2([[vy().mul(&half()), e(0)], [e(0), e(0)]]);
    let op = base(tail);
    let family = FamilyCase::new("f = F(v)", forma2(cap_f()));
    let perturb = Perturbation {
        label: "f = u".into(),
        case: FamilyCase::new("f = u", forma2(u())),
    };
    CatalogEntry {
        name: "P1".into(),
        section: "two-component classification".into(),
        rank_class: "two-component degenerate".into(),
        op,
        ansatz_unknowns: vec![("f".into(), vec![0, 1])],
        ansatz: forma2(f_uv()),
        cases: vec![family],
        notes: vec![],
        necessity: Necessity {
            expected_forced: vec![Atom::func_deriv("f", &[0, 1], &[0])],
            perturbations: vec![perturb],
        },
        literal_variants: vec![],
        fuzz_case: 0,
        fuzz_free: vec![vec![1]],
    }
}

fn p2() -> CatalogEntry {
    let off = vx().add(&v().mul(&vy())).div(&u()).unwrap();
    let tail = mat2([[vy().mul(&half()), off.neg()], [off, e(0)]]);
    let op = base(tail);
    let fam_omega = forma2(cap_f().div(&u()).unwrap());
    let family = FamilyCase::new("f = F(v)/u", fam_omega);
    let perturbed = cap_f()
        .div(&u())
        .unwrap()
        .add(&Expr::param("eps").mul(&v()));
    let perturb = Perturbation {
        label: "f = F(v)/u + eps*v".into(),
        case: FamilyCase::new("f = F(v)/u + eps*v", forma2(perturbed)),
    };
    CatalogEntry {
        name: "P2".into(),
        section: "two-component classification".into(),
        rank_class: "two-component degenerate".into(),
        op,
        ansatz_unknowns: vec![("f".into(), vec![0, 1])],
        ansatz: forma2(f_uv()),
        cases: vec![family],
        notes: vec![],
        necessity: Necessity {
            expected_forced: vec![],
            perturbations: vec![perturb],
        },
        literal_variants: vec![],
        fuzz_case: 0,
        fuzz_free: vec![vec![]],
    }
}
