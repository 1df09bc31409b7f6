//! Kernel property suites: the zero-test oracle equivalence and the
//! differentiation laws, on randomly generated expressions with exact
//! equality throughout. Deterministic seeds keep the suites reproducible.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hamcheck_core::expr::{Atom, Expr, RewriteTable};

fn atom_pool() -> Vec<Expr> {
    vec![
        Expr::field(0),
        Expr::field(1),
        Expr::field(2),
        Expr::jet(1, 1),
        Expr::jet(2, 0),
        Expr::param("a"),
        Expr::param("b"),
        Expr::func("F", &[1]),
        Expr::func("h", &[1, 2]),
        Expr::func("f", &[0, 1, 2]),
        Expr::func_deriv("h", &[1, 2], &[2]),
    ]
}

/// Nonzero-by-construction divisor: a single atom plus a nonzero integer
/// (atoms are algebraically independent, so this cannot vanish).
fn divisor(rng: &mut StdRng, pool: &[Expr]) -> Expr {
    let a = pool[rng.gen_range(0..pool.len())].clone();
    a.add(&Expr::int(rng.gen_range(1..5)))
}

fn random_expr(rng: &mut StdRng, pool: &[Expr], depth: usize) -> Expr {
    if depth == 0 {
        return match rng.gen_range(0..5) {
            0 => Expr::int(rng.gen_range(-4..5)),
            1 => Expr::rational(rng.gen_range(-3..4), rng.gen_range(1..4)),
            _ => pool[rng.gen_range(0..pool.len())].clone(),
        };
    }
    let l = random_expr(rng, pool, depth - 1);
    let r = random_expr(rng, pool, depth - 1);
    match rng.gen_range(0..6) {
        0 => l.add(&r),
        1 => l.sub(&r),
        2 => l.mul(&r),
        3 => l.div(&divisor(rng, pool)).unwrap(),
        4 => l.int_pow(rng.gen_range(0..3)).unwrap(),
        _ => l.neg(),
    }
}

/// A rational identity that is zero by construction.
fn zero_identity(rng: &mut StdRng, pool: &[Expr]) -> Expr {
    let a = random_expr(rng, pool, 2);
    let b = random_expr(rng, pool, 2);
    let c = random_expr(rng, pool, 1);
    match rng.gen_range(0..6) {
        // distributivity
        0 => a.add(&b).mul(&c).sub(&a.mul(&c)).sub(&b.mul(&c)),
        // commutativity of multiplication
        1 => a.mul(&b).sub(&b.mul(&a)),
        // associativity
        2 => a.mul(&b).mul(&c).sub(&a.mul(&b.mul(&c))),
        // difference of squares
        3 => {
            let sq = a.sub(&b).mul(&a.add(&b));
            sq.sub(&a.mul(&a)).add(&b.mul(&b))
        }
        // division round-trip
        4 => {
            let d = divisor(rng, pool);
            a.div(&d).unwrap().mul(&d).sub(&a)
        }
        // additive inverse
        _ => a.add(&b).sub(&b).sub(&a),
    }
}

#[test]
fn zero_test_agrees_with_construction_oracle() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let pool = atom_pool();
    let fresh = Expr::param("fresh$marker");
    let cases = 10_000;
    for i in 0..cases {
        let z = zero_identity(&mut rng, &pool);
        assert!(z.is_zero(), "case {i}: constructed zero not recognized");
        // salt with a monomial in an atom no identity can produce: nonzero
        let q = Expr::rational(rng.gen_range(1..7), rng.gen_range(1..5));
        let nz = z.add(&q.mul(&fresh));
        assert!(!nz.is_zero(), "case {i}: constructed nonzero reported zero");
    }
}

#[test]
fn differentiation_laws_hold_exactly() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let pool = atom_pool();
    let rw = RewriteTable::empty();
    for _ in 0..1_000 {
        let a = random_expr(&mut rng, &pool, 2);
        let b = random_expr(&mut rng, &pool, 2);
        let i = rng.gen_range(0..3);
        let j = rng.gen_range(0..3);
        // mixed partials commute
        let dij = a.diff(i, &rw).diff(j, &rw);
        let dji = a.diff(j, &rw).diff(i, &rw);
        assert!(dij.sub(&dji).is_zero());
        // linearity
        let lin = a
            .add(&b)
            .diff(i, &rw)
            .sub(&a.diff(i, &rw))
            .sub(&b.diff(i, &rw));
        assert!(lin.is_zero());
        // product rule
        let prod = a.mul(&b).diff(i, &rw);
        let expect = a.diff(i, &rw).mul(&b).add(&a.mul(&b.diff(i, &rw)));
        assert!(prod.sub(&expect).is_zero());
        // quotient rule
        let d = divisor(&mut rng, &pool);
        let q = a.div(&d).unwrap();
        let dq = q.diff(i, &rw);
        let expect = a
            .diff(i, &rw)
            .mul(&d)
            .sub(&a.mul(&d.diff(i, &rw)))
            .div(&d.mul(&d))
            .unwrap();
        assert!(dq.sub(&expect).is_zero());
    }
}

#[test]
fn normalization_is_stable() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let pool = atom_pool();
    for _ in 0..2_000 {
        let a = random_expr(&mut rng, &pool, 2);
        // identity operations must reproduce the representation bit-exactly
        assert_eq!(a, a.add(&Expr::zero()));
        assert_eq!(a, a.mul(&Expr::one()));
        assert_eq!(a, a.map_atoms(&|at: &Atom| at.clone()));
        assert_eq!(a.neg().neg(), a);
    }
}

#[test]
fn zero_equivalence_is_a_congruence() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    let pool = atom_pool();
    for _ in 0..500 {
        let a = random_expr(&mut rng, &pool, 2);
        let b = a.add(&zero_identity(&mut rng, &pool));
        assert!(a.alg_eq(&b));
        let c = random_expr(&mut rng, &pool, 2);
        assert!(a.add(&c).alg_eq(&b.add(&c)));
        assert!(a.mul(&c).alg_eq(&b.mul(&c)));
        let d = divisor(&mut rng, &pool);
        assert!(a.div(&d).unwrap().alg_eq(&b.div(&d).unwrap()));
        let i = rng.gen_range(0..3);
        let rw = RewriteTable::empty();
        assert!(a.diff(i, &rw).alg_eq(&b.diff(i, &rw)));
    }
}

#[test]
fn field_axioms_on_random_expressions() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let pool = atom_pool();
    for _ in 0..500 {
        let a = random_expr(&mut rng, &pool, 2);
        let b = random_expr(&mut rng, &pool, 2);
        let c = random_expr(&mut rng, &pool, 2);
        assert!(a.add(&b).alg_eq(&b.add(&a)));
        assert!(a.add(&b).add(&c).alg_eq(&a.add(&b.add(&c))));
        assert!(a.mul(&b).mul(&c).alg_eq(&a.mul(&b.mul(&c))));
        assert!(a.mul(&b.add(&c)).alg_eq(&a.mul(&b).add(&a.mul(&c))));
        assert!(a.add(&a.neg()).is_zero());
        if !a.is_zero() {
            assert!(a.mul(&a.inverse().unwrap()).is_one());
        }
    }
}
