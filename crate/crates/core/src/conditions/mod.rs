//! Hamiltonianity conditions for `P + omega`.
//!
//! Three families of exact residuals: the ultralocal conditions (W), the
//! Mokhov conditions on the first-order part (M), and the compatibility
//! conditions coupling the two summands (C). The operator is Hamiltonian
//! exactly when every residual is zero.

mod compat;
mod mokhov;
mod ultralocal;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::expr::Expr;
use crate::operator::OperatorSpec;

pub use compat::{C2Variant, Ttensor};
pub use mokhov::{M6Variant, M7Variant};

/// Condition family identifiers, in report order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum Family {
    W1,
    W2,
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
    M7,
    C1,
    C2,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::W1,
        Family::W2,
        Family::M1,
        Family::M2,
        Family::M3,
        Family::M4,
        Family::M5,
        Family::M6,
        Family::M7,
        Family::C1,
        Family::C2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::W1 => "W1",
            Family::W2 => "W2",
            Family::M1 => "M1",
            Family::M2 => "M2",
            Family::M3 => "M3",
            Family::M4 => "M4",
            Family::M5 => "M5",
            Family::M6 => "M6",
            Family::M7 => "M7",
            Family::C1 => "C1",
            Family::C2 => "C2",
        }
    }

    /// W / M / C group letter.
    pub fn group(&self) -> char {
        match self {
            Family::W1 | Family::W2 => 'W',
            Family::C1 | Family::C2 => 'C',
            _ => 'M',
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A condition instance: family plus the tuple of free indices.
/// Field indices are 1-based in display; dimensions print by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct ConditionId {
    pub family: Family,
    pub indices: Vec<(&'static str, String)>,
}

impl ConditionId {
    pub fn new(family: Family, indices: Vec<(&'static str, String)>) -> ConditionId {
        ConditionId { family, indices }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.family)?;
        for (i, (name, val)) in self.indices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}={}", name, val)?;
        }
        write!(f, "]")
    }
}

/// One generated residual.
#[derive(Clone, Debug)]
pub struct Residual {
    pub id: ConditionId,
    pub expr: Expr,
}

/// Options controlling residual generation.
#[derive(Clone, Debug)]
pub struct CheckOptions {
    /// Generate the full index range instead of symmetry-reduced tuples.
    pub full_range: bool,
    /// Restrict to condition groups ('W', 'M', 'C'); empty means all.
    pub groups: Vec<char>,
    pub m6: M6Variant,
    pub m7: M7Variant,
    pub c2: C2Variant,
}

impl Default for CheckOptions {
    fn default() -> CheckOptions {
        CheckOptions {
            full_range: false,
            groups: Vec::new(),
            m6: M6Variant::default(),
            m7: M7Variant::default(),
            c2: C2Variant::default(),
        }
    }
}

impl CheckOptions {
    pub fn group_enabled(&self, g: char) -> bool {
        self.groups.is_empty() || self.groups.contains(&g)
    }
}

/// Verification outcome: every nonzero residual, per-family counts, and the
/// summary flags. `hamiltonian` holds exactly when the residual map is
/// empty.
#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub target: String,
    pub residuals: Vec<Residual>,
    pub checked: BTreeMap<Family, usize>,
    pub ultralocal_ok: bool,
    pub leading_ok: bool,
    pub compatibility_ok: bool,
    pub hamiltonian: bool,
}

impl ConditionReport {
    pub fn failing_families(&self) -> Vec<Family> {
        let mut fams: Vec<Family> = self.residuals.iter().map(|r| r.id.family).collect();
        fams.sort();
        fams.dedup();
        fams
    }
}

/// Ultralocal conditions W1 (skew-symmetry) and W2 (Jacobi for `omega`).
pub fn check_ultralocal(spec: &OperatorSpec, opts: &CheckOptions) -> Vec<Residual> {
    ultralocal::residuals(spec, opts)
}

/// Mokhov conditions M1–M7 on the first-order part.
pub fn check_mokhov(spec: &OperatorSpec, opts: &CheckOptions) -> Vec<Residual> {
    mokhov::residuals(spec, opts)
}

/// Compatibility conditions C1 and C2 coupling `P` and `omega`.
pub fn check_compatibility(spec: &OperatorSpec, opts: &CheckOptions) -> Vec<Residual> {
    compat::residuals(spec, opts)
}

/// Run every condition family and assemble the report.
pub fn verify(spec: &OperatorSpec, opts: &CheckOptions) -> ConditionReport {
    verify_named(spec, opts, "operator")
}

pub fn verify_named(spec: &OperatorSpec, opts: &CheckOptions, target: &str) -> ConditionReport {
    let mut all: Vec<Residual> = Vec::new();
    let mut checked: BTreeMap<Family, usize> = BTreeMap::new();
    if opts.group_enabled('W') {
        all.extend(check_ultralocal(spec, opts));
    }
    if opts.group_enabled('M') {
        all.extend(check_mokhov(spec, opts));
    }
    if opts.group_enabled('C') {
        all.extend(check_compatibility(spec, opts));
    }
    for r in &all {
        *checked.entry(r.id.family).or_insert(0) += 1;
    }
    let mut nonzero: Vec<Residual> = all.into_iter().filter(|r| !r.expr.is_zero()).collect();
    nonzero.sort_by(|a, b| a.id.cmp(&b.id));
    let ultralocal_ok = !nonzero.iter().any(|r| r.id.family.group() == 'W');
    let leading_ok = !nonzero.iter().any(|r| r.id.family.group() == 'M');
    let compatibility_ok = !nonzero.iter().any(|r| r.id.family.group() == 'C');
    let hamiltonian = ultralocal_ok && leading_ok && compatibility_ok;
    ConditionReport {
        target: target.to_string(),
        residuals: nonzero,
        checked,
        ultralocal_ok,
        leading_ok,
        compatibility_ok,
        hamiltonian,
    }
}

pub(crate) fn dim_name(spec: &OperatorSpec, alpha: usize) -> String {
    spec.space.dim_names()[alpha].clone()
}

pub(crate) fn fx(i: usize) -> String {
    (i + 1).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::RewriteTable;
    use crate::operator::{FieldSpace, Mat};

    fn e(n: i64) -> Expr {
        Expr::int(n)
    }

    fn skew3(f1: Expr, f2: Expr, f3: Expr) -> Mat {
        Mat::from_rows(vec![
            vec![e(0), f1.clone(), f2.clone()],
            vec![f1.neg(), e(0), f3.clone()],
            vec![f2.neg(), f3.neg(), e(0)],
        ])
    }

    fn ultralocal_only(omega: Mat) -> OperatorSpec {
        let n = omega.n();
        let dims = if n == 2 {
            FieldSpace::uv_xy()
        } else {
            FieldSpace::uvw_xy()
        };
        OperatorSpec::from_parts(
            dims,
            vec![Mat::zero(n), Mat::zero(n)],
            Mat::zero(n),
            omega,
            RewriteTable::empty(),
        )
        .unwrap()
    }

    /// Independent brute-force expansion of the six W2 terms.
    fn w2_by_hand(omega: &Mat, i: usize, j: usize, k: usize) -> Expr {
        let rw = RewriteTable::empty();
        let mut acc = Expr::zero();
        for s in 0..omega.n() {
            acc = acc
                .add(&omega.at(i, s).mul(&omega.at(j, k).diff(s, &rw)))
                .add(&omega.at(j, s).mul(&omega.at(k, i).diff(s, &rw)))
                .add(&omega.at(k, s).mul(&omega.at(i, j).diff(s, &rw)));
        }
        acc
    }

    #[test]
    fn w2_matches_brute_force_and_is_nonzero_off_family() {
        // f1 = v, f2 = u, f3 = w is not a Poisson tensor: the expansion
        // gives u + v - w (computed with the independent oracle above)
        let (u, v, w) = (Expr::field(0), Expr::field(1), Expr::field(2));
        let omega = skew3(v.clone(), u.clone(), w.clone());
        let spec = ultralocal_only(omega.clone());
        let rs = check_ultralocal(&spec, &CheckOptions::default());
        let w2 = rs
            .iter()
            .find(|r| r.id.family == Family::W2)
            .expect("single W2 residual at n = 3");
        let oracle = w2_by_hand(&omega, 0, 1, 2);
        assert!(w2.expr.alg_eq(&oracle));
        let expect = u.add(&v).sub(&w);
        assert!(w2.expr.alg_eq(&expect));
        assert!(!w2.expr.is_zero());
    }

    #[test]
    fn w2_zero_for_linear_lie_poisson_omega() {
        // f1 = u, f2 = v, f3 = w closes as a Lie algebra, so its W2
        // residual vanishes (a solvable Lie-Poisson structure)
        let (u, v, w) = (Expr::field(0), Expr::field(1), Expr::field(2));
        let spec = ultralocal_only(skew3(u, v, w));
        assert!(check_ultralocal(&spec, &CheckOptions::default())
            .iter()
            .all(|r| r.expr.is_zero()));
    }

    #[test]
    fn w_residuals_vanish_for_zero_omega() {
        let spec = ultralocal_only(Mat::zero(3));
        let rs = check_ultralocal(&spec, &CheckOptions::default());
        assert!(rs.iter().all(|r| r.expr.is_zero()));
        // n = 2: the W2 set is empty
        let spec2 = ultralocal_only(Mat::zero(2));
        assert!(check_ultralocal(&spec2, &CheckOptions::default())
            .iter()
            .all(|r| r.id.family == Family::W1));
    }

    #[test]
    fn w1_detects_broken_skew_symmetry() {
        let mut omega = Mat::zero(2);
        omega.set(0, 1, Expr::field(0));
        omega.set(1, 0, Expr::field(0)); // same sign: not skew
        let spec = ultralocal_only(omega);
        let rs = check_ultralocal(&spec, &CheckOptions::default());
        assert!(rs
            .iter()
            .any(|r| r.id.family == Family::W1 && !r.expr.is_zero()));
    }

    #[test]
    fn m2_fires_on_a_single_corrupted_entry() {
        // P1 with g^{11 y} changed from v to u: the only M2 failure is at
        // (i=1, j=1, k=2, a=y) with residual dg/dv - 1 = -1
        let gx = Mat::from_rows(vec![vec![e(1), e(0)], vec![e(0), e(0)]]);
        let gy = Mat::from_rows(vec![vec![Expr::field(0), e(0)], vec![e(0), e(0)]]);
        let tail = Mat::from_rows(vec![
            vec![Expr::jet(1, 1).mul(&Expr::rational(1, 2)), e(0)],
            vec![e(0), e(0)],
        ]);
        let spec = OperatorSpec::from_parts(
            FieldSpace::uv_xy(),
            vec![gx, gy],
            tail,
            Mat::zero(2),
            RewriteTable::empty(),
        )
        .unwrap();
        let bad: Vec<_> = check_mokhov(&spec, &CheckOptions::default())
            .into_iter()
            .filter(|r| r.id.family == Family::M2 && !r.expr.is_zero())
            .collect();
        assert_eq!(bad.len(), 2, "dg^{{11y}}/du and dg^{{11y}}/dv both break");
        let at_v = bad
            .iter()
            .find(|r| r.id.to_string() == "M2[i=1,j=1,k=2,a=y]")
            .unwrap();
        assert!(at_v.expr.alg_eq(&e(-1)));
    }

    #[test]
    fn t_tensor_entries_are_jet_free() {
        let entry = crate::catalog::get("P23").unwrap();
        let spec = entry.cases[0].instantiate(&entry.op);
        let tt = Ttensor::new(&spec);
        assert!(tt.jet_free());
        assert_eq!(tt.n_dims(), 2);
    }

    #[test]
    fn zero_operator_verifies() {
        let spec = ultralocal_only(Mat::zero(3));
        let report = verify(&spec, &CheckOptions::default());
        assert!(report.hamiltonian);
        assert!(report.residuals.is_empty());
    }

    #[test]
    fn report_flags_reflect_groups() {
        let mut omega = Mat::zero(2);
        omega.set(0, 1, Expr::field(0));
        omega.set(1, 0, Expr::field(0));
        let spec = ultralocal_only(omega);
        let report = verify(&spec, &CheckOptions::default());
        assert!(!report.ultralocal_ok);
        assert!(report.leading_ok);
        assert!(!report.hamiltonian);
        assert_eq!(report.failing_families(), vec![Family::W1]);
    }
}
