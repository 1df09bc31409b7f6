//! The two three-wave examples: the classical 1D operator and its 2D
//! extension with free constants.

use super::*;
use crate::operator::FieldSpace;

pub(super) fn entries() -> Vec<CatalogEntry> {
    vec![three_wave_1d(), three_wave_2d()]
}

fn three_wave_1d() -> CatalogEntry {
    let gx = mat3([[e(1), e(0), e(0)], [e(0), e(-1), e(0)], [e(0), e(0), e(-1)]]);
    let op = OperatorSpec::from_parts(
        FieldSpace::uvw_x(),
        vec![gx],
        Mat::zero(3),
        Mat::zero(3),
        RewriteTable::empty(),
    )
    .expect("catalog operator is well-formed");
    let omega = forma3(w().mul_int(-2), v().mul_int(2), u().mul_int(2));
    let family = FamilyCase::new("three-wave omega", omega);
    let perturbed = forma3(
        w().mul_int(-2).add(&Expr::param("eps").mul(&u())),
        v().mul_int(2),
        u().mul_int(2),
    );
    CatalogEntry {
        name: "ThreeWave1D".into(),
        section: "introduction examples".into(),
        rank_class: "three-wave example".into(),
        op,
        ansatz_unknowns: vec![],
        ansatz: Mat::zero(3),
        cases: vec![family],
        notes: vec![],
        necessity: Necessity {
            expected_forced: vec![],
            perturbations: vec![Perturbation {
                label: "omega12 -> -2w + eps*u".into(),
                case: FamilyCase::new("omega12 -> -2w + eps*u", perturbed),
            }],
        },
        literal_variants: vec![],
        fuzz_case: 0,
        fuzz_free: vec![vec![], vec![], vec![]],
    }
}

fn three_wave_2d() -> CatalogEntry {
    let s = Expr::param("S");
    let (a, b) = (Expr::param("a"), Expr::param("b"));
    let (d, ee) = (Expr::param("d"), Expr::param("e"));
    // g^y = (d - e)/(a - b) * S on the diagonal
    let ratio = d.sub(&ee).div(&a.sub(&b)).unwrap();
    let sy = ratio.mul(&s);
    let gx = mat3([
        [s.clone(), e(0), e(0)],
        [e(0), s.clone(), e(0)],
        [e(0), e(0), s.clone()],
    ]);
    let gy = mat3([
        [sy.clone(), e(0), e(0)],
        [e(0), sy.clone(), e(0)],
        [e(0), e(0), sy.clone()],
    ]);
    let op = OperatorSpec::from_parts(
        FieldSpace::uvw_xy(),
        vec![gx, gy],
        Mat::zero(3),
        Mat::zero(3),
        RewriteTable::empty(),
    )
    .expect("catalog operator is well-formed");
    let omega = forma3(s.mul(&w()), s.mul(&v()).neg(), s.mul(&u()));
    let family = FamilyCase::new("three-wave omega, S free", omega);
    let perturbed = forma3(
        s.mul(&w()).add(&Expr::param("eps").mul(&u())),
        s.mul(&v()).neg(),
        s.mul(&u()),
    );
    CatalogEntry {
        name: "ThreeWave2D".into(),
        section: "introduction examples".into(),
        rank_class: "three-wave example".into(),
        op,
        ansatz_unknowns: vec![],
        ansatz: Mat::zero(3),
        cases: vec![family],
        notes: vec![
            "the system coefficient f = (d(c-b)+e(a-c))/(a-b) is a property \
             of the three-wave system, not of the operator; substituting it \
             leaves the operator unchanged"
                .into(),
        ],
        necessity: Necessity {
            expected_forced: vec![],
            perturbations: vec![Perturbation {
                label: "omega12 -> S*w + eps*u".into(),
                case: FamilyCase::new("omega12 -> S*w + eps*u", perturbed),
            }],
        },
        literal_variants: vec![],
        fuzz_case: 0,
        fuzz_free: vec![vec![], vec![], vec![]],
    }
}
