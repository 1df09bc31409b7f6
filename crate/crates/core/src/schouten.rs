//! Direct Schouten-torsion test for `P + omega`.
//!
//! Independent of the per-family condition generators, this module computes
//! the Jacobi obstruction of the bracket from first principles. The operator
//! is encoded as the odd bivector density
//!
//! `h = 1/2 [ theta_i g^{ij a} theta_{j,a} + b_k^{ij a} u^k_a theta_i theta_j
//!            + omega^{ij} theta_i theta_j ]`
//!
//! on the super-jet space with odd fibre coordinates `theta`, and the
//! vanishing of `[H, H]` is equivalent to the density
//! `J = sum_l (dH/dtheta_l)(dH/du^l)` being a total divergence, i.e. to all
//! of its Euler operators (with respect to the `u`s and the `theta`s)
//! vanishing identically.
//!
//! The test presumes the operator is already skew-adjoint (`g` symmetric,
//! `dg = b + b~`, `omega` skew): the bivector only sees the skew part. Those
//! order-zero symmetry checks are elementary and made separately.
//!
//! This is testing infrastructure for the condition generators, not part of
//! the public verification interface.

use std::collections::BTreeMap;

use crate::expr::{Atom, Expr, RewriteTable};
use crate::operator::OperatorSpec;

/// Odd fibre coordinate `theta_{field, deriv}` with derivative multi-index
/// over dimensions (order at most 2 arises here).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ThetaAtom {
    pub field: u8,
    pub deriv: Vec<u8>,
}

impl ThetaAtom {
    fn plain(field: usize) -> ThetaAtom {
        ThetaAtom {
            field: field as u8,
            deriv: Vec::new(),
        }
    }

    fn d1(field: usize, a: usize) -> ThetaAtom {
        ThetaAtom {
            field: field as u8,
            deriv: vec![a as u8],
        }
    }

    fn raised(&self, a: usize) -> ThetaAtom {
        let mut d = self.deriv.clone();
        d.push(a as u8);
        d.sort();
        ThetaAtom {
            field: self.field,
            deriv: d,
        }
    }
}

/// Strictly increasing product of odd coordinates; the parity bookkeeping
/// lives in the coefficient.
pub type ThetaMono = Vec<ThetaAtom>;

/// Polynomial in odd coordinates with `Expr` coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuperExpr(pub BTreeMap<ThetaMono, Expr>);

/// Second-order jet `u^k_{ab}`, encoded as a reserved parameter atom (the
/// `$` namespace cannot be produced by the surface syntax).
fn jet2(k: usize, a: usize, b: usize) -> Atom {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    Atom::param(&format!("jet2${k}${a}{b}"))
}

impl SuperExpr {
    pub fn zero() -> SuperExpr {
        SuperExpr(BTreeMap::new())
    }

    fn insert_add(&mut self, m: ThetaMono, c: Expr) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &SuperExpr) -> SuperExpr {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }

    pub fn term(coeff: Expr, mono: &[ThetaAtom]) -> SuperExpr {
        let mut sorted = mono.to_vec();
        // sort with sign; equal atoms square to zero
        let mut sign = 1i64;
        for i in 0..sorted.len() {
            for j in (i + 1..sorted.len()).rev() {
                if sorted[j - 1] > sorted[j] {
                    sorted.swap(j - 1, j);
                    sign = -sign;
                }
            }
        }
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return SuperExpr::zero();
            }
        }
        let mut out = SuperExpr::zero();
        out.insert_add(sorted, coeff.mul_int(sign));
        out
    }

    pub fn mul(&self, other: &SuperExpr) -> SuperExpr {
        let mut out = SuperExpr::zero();
        for (m1, c1) in &self.0 {
            'terms: for (m2, c2) in &other.0 {
                // merge with inversion parity
                let mut merged = Vec::with_capacity(m1.len() + m2.len());
                let (mut i, mut j) = (0, 0);
                let mut sign = 1i64;
                while i < m1.len() && j < m2.len() {
                    if m1[i] == m2[j] {
                        continue 'terms;
                    }
                    if m1[i] < m2[j] {
                        merged.push(m1[i].clone());
                        i += 1;
                    } else {
                        // m2[j] moves past the remaining elements of m1
                        if (m1.len() - i) % 2 == 1 {
                            sign = -sign;
                        }
                        merged.push(m2[j].clone());
                        j += 1;
                    }
                }
                merged.extend_from_slice(&m1[i..]);
                merged.extend_from_slice(&m2[j..]);
                out.insert_add(merged, c1.mul(c2).mul_int(sign));
            }
        }
        out
    }

    /// Left derivative with respect to one odd coordinate.
    fn theta_deriv(&self, t: &ThetaAtom) -> SuperExpr {
        let mut out = SuperExpr::zero();
        for (m, c) in &self.0 {
            if let Some(p) = m.iter().position(|x| x == t) {
                let mut reduced = m.clone();
                reduced.remove(p);
                let sign = if p % 2 == 0 { 1 } else { -1 };
                out.insert_add(reduced, c.mul_int(sign));
            }
        }
        out
    }

    /// Total spatial derivative `d_a`.
    fn total_deriv(&self, a: usize, ctx: &Ctx) -> SuperExpr {
        let mut out = SuperExpr::zero();
        for (m, c) in &self.0 {
            out.insert_add(m.clone(), total_deriv_coeff(c, a, ctx));
            for (p, t) in m.iter().enumerate() {
                assert!(t.deriv.len() < 2, "jet order overflow in oracle");
                let mut raised = m.clone();
                raised[p] = t.raised(a);
                out = out.add(&SuperExpr::term(c.clone(), &raised));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

struct Ctx {
    n: usize,
    nd: usize,
    rewrites: RewriteTable,
}

/// `d_a` on an even coefficient: chain rule through the fields plus the
/// promotion of first jets to second jets.
fn total_deriv_coeff(c: &Expr, a: usize, ctx: &Ctx) -> Expr {
    let mut out = Expr::zero();
    for k in 0..ctx.n {
        let dk = c.diff(k, &ctx.rewrites);
        if !dk.is_zero() {
            out = out.add(&dk.mul(&Expr::jet(k, a)));
        }
    }
    for k in 0..ctx.n {
        for al in 0..ctx.nd {
            let d = c.diff_atom_syntactic(&Atom::jet(k, al));
            if !d.is_zero() {
                out = out.add(&d.mul(&Expr::atom(jet2(k, al, a))));
            }
        }
    }
    out
}

/// Euler operator with respect to the field `u^k`.
fn euler_u(j: &SuperExpr, k: usize, ctx: &Ctx) -> SuperExpr {
    let mut out = SuperExpr::zero();
    for (m, c) in &j.0 {
        out.insert_add(m.clone(), c.diff(k, &ctx.rewrites));
    }
    for a in 0..ctx.nd {
        let mut djda = SuperExpr::zero();
        for (m, c) in &j.0 {
            djda.insert_add(m.clone(), c.diff_atom_syntactic(&Atom::jet(k, a)));
        }
        let mut d = djda.total_deriv(a, ctx);
        for v in d.0.values_mut() {
            *v = v.neg();
        }
        out = out.add(&d);
    }
    out
}

/// Euler operator with respect to the odd field `theta_a`.
fn euler_theta(j: &SuperExpr, a: usize, ctx: &Ctx) -> SuperExpr {
    let mut out = j.theta_deriv(&ThetaAtom::plain(a));
    for al in 0..ctx.nd {
        let mut d = j.theta_deriv(&ThetaAtom::d1(a, al)).total_deriv(al, ctx);
        for v in d.0.values_mut() {
            *v = v.neg();
        }
        out = out.add(&d);
    }
    out
}

/// The Jacobi obstruction density residuals of `P + omega`: the nonzero
/// coefficients of all Euler derivatives of `J`. Empty iff the (skew part
/// of the) operator satisfies the Jacobi identity.
pub fn jacobi_obstruction(spec: &OperatorSpec) -> Vec<Expr> {
    let ctx = Ctx {
        n: spec.n_fields(),
        nd: spec.n_dims(),
        rewrites: spec.rewrites.clone(),
    };
    let n = ctx.n;
    let half = Expr::rational(1, 2);

    // h = 1/2 (theta_i g^{ij a} theta_{j,a} + b u' theta theta + omega theta theta)
    let mut h = SuperExpr::zero();
    for i in 0..n {
        for j in 0..n {
            for al in 0..ctx.nd {
                let g = spec.g[al].at(i, j);
                if !g.is_zero() {
                    h = h.add(&SuperExpr::term(
                        g.mul(&half),
                        &[ThetaAtom::plain(i), ThetaAtom::d1(j, al)],
                    ));
                }
                for k in 0..n {
                    let b = spec.b[al].at(i, j, k);
                    if !b.is_zero() {
                        h = h.add(&SuperExpr::term(
                            b.mul(&half).mul(&Expr::jet(k, al)),
                            &[ThetaAtom::plain(i), ThetaAtom::plain(j)],
                        ));
                    }
                }
            }
            let w = spec.omega.at(i, j);
            if !w.is_zero() {
                h = h.add(&SuperExpr::term(
                    w.mul(&half),
                    &[ThetaAtom::plain(i), ThetaAtom::plain(j)],
                ));
            }
        }
    }

    // J = sum_l (dh/dtheta_l)(dh/du^l)
    let mut j = SuperExpr::zero();
    for l in 0..n {
        let e = euler_theta(&h, l, &ctx);
        let f = euler_u(&h, l, &ctx);
        j = j.add(&e.mul(&f));
    }

    let mut residuals = Vec::new();
    for k in 0..n {
        for (_, c) in euler_u(&j, k, &ctx).0 {
            residuals.push(c);
        }
    }
    for a in 0..n {
        for (_, c) in euler_theta(&j, a, &ctx).0 {
            residuals.push(c);
        }
    }
    residuals
}

/// Convenience verdict.
pub fn jacobi_holds(spec: &OperatorSpec) -> bool {
    jacobi_obstruction(spec).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::operator::{FieldSpace, Mat, OperatorSpec};

    fn e(n: i64) -> Expr {
        Expr::int(n)
    }

    fn p1_with_omega(f: Expr) -> OperatorSpec {
        let space = FieldSpace::uv_xy();
        let gx = Mat::from_rows(vec![vec![e(1), e(0)], vec![e(0), e(0)]]);
        let gy = Mat::from_rows(vec![vec![Expr::field(1), e(0)], vec![e(0), e(0)]]);
        let tail = Mat::from_rows(vec![
            vec![Expr::jet(1, 1).mul(&Expr::rational(1, 2)), e(0)],
            vec![e(0), e(0)],
        ]);
        let omega = Mat::from_rows(vec![vec![e(0), f.clone()], vec![f.neg(), e(0)]]);
        OperatorSpec::from_parts(space, vec![gx, gy], tail, omega, RewriteTable::empty()).unwrap()
    }

    #[test]
    fn p1_with_admissible_omega_passes() {
        let op = p1_with_omega(Expr::func("F", &[1]));
        assert!(jacobi_holds(&op));
    }

    #[test]
    fn p1_with_u_dependent_omega_fails() {
        let op = p1_with_omega(Expr::func("f", &[0, 1]));
        assert!(!jacobi_holds(&op));
    }

    #[test]
    fn three_wave_1d_passes() {
        let space = FieldSpace::uvw_x();
        let gx = Mat::from_rows(vec![
            vec![e(1), e(0), e(0)],
            vec![e(0), e(-1), e(0)],
            vec![e(0), e(0), e(-1)],
        ]);
        let (u, v, w) = (Expr::field(0), Expr::field(1), Expr::field(2));
        let omega = Mat::from_rows(vec![
            vec![e(0), w.mul_int(-2), v.mul_int(2)],
            vec![w.mul_int(2), e(0), u.mul_int(2)],
            vec![v.mul_int(-2), u.mul_int(-2), e(0)],
        ]);
        let op =
            OperatorSpec::from_parts(space, vec![gx], Mat::zero(3), omega, RewriteTable::empty())
                .unwrap();
        assert!(jacobi_holds(&op));
    }

    fn forma3(f1: Expr, f2: Expr, f3: Expr) -> Mat {
        Mat::from_rows(vec![
            vec![e(0), f1.clone(), f2.clone()],
            vec![f1.neg(), e(0), f3.clone()],
            vec![f2.neg(), f3.neg(), e(0)],
        ])
    }

    #[test]
    fn p2_classification_matches() {
        let space = FieldSpace::uv_xy();
        let gx = Mat::from_rows(vec![vec![e(1), e(0)], vec![e(0), e(0)]]);
        let gy = Mat::from_rows(vec![vec![Expr::field(1), e(0)], vec![e(0), e(0)]]);
        let jet_part = Expr::jet(1, 0).add(&Expr::field(1).mul(&Expr::jet(1, 1)));
        let off = jet_part.div(&Expr::field(0)).unwrap();
        let tail = Mat::from_rows(vec![
            vec![Expr::jet(1, 1).mul(&Expr::rational(1, 2)), off.neg()],
            vec![off, e(0)],
        ]);
        let build = |f: Expr| {
            let omega = Mat::from_rows(vec![vec![e(0), f.clone()], vec![f.neg(), e(0)]]);
            OperatorSpec::from_parts(
                space.clone(),
                vec![gx.clone(), gy.clone()],
                tail.clone(),
                omega,
                RewriteTable::empty(),
            )
            .unwrap()
        };
        let good = Expr::func("F", &[1]).div(&Expr::field(0)).unwrap();
        assert!(jacobi_holds(&build(good)));
        assert!(!jacobi_holds(&build(Expr::func("F", &[1]))));
    }

    #[test]
    fn p13_arbitrary_f2_of_w_passes() {
        let space = FieldSpace::uvw_xy();
        let gx = Mat::from_rows(vec![
            vec![e(0), e(1), e(0)],
            vec![e(1), e(0), e(0)],
            vec![e(0), e(0), e(0)],
        ]);
        let (u, v) = (Expr::field(0), Expr::field(1));
        let gy = Mat::from_rows(vec![
            vec![u.mul_int(-2), v.clone(), e(0)],
            vec![v.clone(), e(0), e(0)],
            vec![e(0), e(0), e(0)],
        ]);
        let (uy, vy, wy) = (Expr::jet(0, 1), Expr::jet(1, 1), Expr::jet(2, 1));
        let tail = Mat::from_rows(vec![
            vec![uy.neg(), vy.mul_int(2), wy.clone()],
            vec![vy.neg(), e(0), e(0)],
            vec![wy.neg(), e(0), e(0)],
        ]);
        let omega = forma3(e(0), Expr::func("f2", &[2]), e(0));
        let op = OperatorSpec::from_parts(space, vec![gx, gy], tail, omega, RewriteTable::empty())
            .unwrap();
        assert!(jacobi_holds(&op));
    }

    #[test]
    fn p20_constant_over_v_only() {
        let space = FieldSpace::uvw_xy();
        let gx = Mat::from_rows(vec![
            vec![e(0), e(1), e(0)],
            vec![e(1), e(0), e(0)],
            vec![e(0), e(0), e(0)],
        ]);
        let gy = Mat::from_rows(vec![
            vec![e(0), e(0), e(0)],
            vec![e(0), e(0), e(1)],
            vec![e(0), e(1), e(0)],
        ]);
        let v = Expr::field(1);
        let cell = Expr::jet(2, 0).sub(&Expr::jet(0, 1)).div(&v).unwrap();
        let tail = Mat::from_rows(vec![
            vec![e(0), e(0), cell.neg()],
            vec![e(0), e(0), e(0)],
            vec![cell, e(0), e(0)],
        ]);
        let build = |f2: Expr| {
            OperatorSpec::from_parts(
                space.clone(),
                vec![gx.clone(), gy.clone()],
                tail.clone(),
                forma3(e(0), f2, e(0)),
                RewriteTable::empty(),
            )
            .unwrap()
        };
        assert!(jacobi_holds(&build(Expr::param("c").div(&v).unwrap())));
        assert!(!jacobi_holds(&build(Expr::field(0).div(&v).unwrap())));
    }

    #[test]
    fn broken_three_wave_fails() {
        let space = FieldSpace::uvw_x();
        let gx = Mat::from_rows(vec![
            vec![e(1), e(0), e(0)],
            vec![e(0), e(-1), e(0)],
            vec![e(0), e(0), e(-1)],
        ]);
        let (u, v, w) = (Expr::field(0), Expr::field(1), Expr::field(2));
        // sign of one omega pair flipped
        let omega = Mat::from_rows(vec![
            vec![e(0), w.mul_int(2), v.mul_int(2)],
            vec![w.mul_int(-2), e(0), u.mul_int(2)],
            vec![v.mul_int(-2), u.mul_int(-2), e(0)],
        ]);
        let op =
            OperatorSpec::from_parts(space, vec![gx], Mat::zero(3), omega, RewriteTable::empty())
                .unwrap();
        assert!(!jacobi_holds(&op));
    }
}
