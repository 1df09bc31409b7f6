//! Necessity-side tooling: constraint extraction from a generic ultralocal
//! ansatz, detection of forced vanishing, and perturbation refutation.
//!
//! Extraction leaves the ansatz functions abstract and keeps every nonzero
//! W2/C1/C2 residual. An unknown atom `A` is *forced* when some residual
//! normalizes to `q * A` with `q` nonzero and free of unknowns: on the open
//! set where `q` does not vanish, Hamiltonianity requires `A = 0`. The
//! detector iterates — substituting detected atoms to zero and rescanning —
//! which is sound but deliberately not complete; the recorded perturbation
//! fixtures cover the constraints this cannot see.

use std::collections::BTreeMap;

use crate::conditions::{
    check_compatibility, check_ultralocal, verify_named, CheckOptions, ConditionId, Family,
    Residual,
};
use crate::expr::{subst::substitute, Atom, Expr};
use crate::operator::{Mat, OperatorSpec};

/// Residuals of a generic ansatz against a fixed first-order part.
#[derive(Clone, Debug)]
pub struct AnsatzConstraintSet {
    pub target: String,
    pub unknowns: Vec<(String, Vec<usize>)>,
    /// Nonzero residuals, unknowns symbolic, sorted by condition id.
    pub residuals: Vec<Residual>,
}

/// A detected forced-vanishing: `witness` normalizes to `cofactor * atom`.
#[derive(Clone, Debug)]
pub struct ForcedZero {
    pub atom: Atom,
    pub witness: ConditionId,
    pub cofactor: Expr,
}

/// Generate all W2, C1, C2 residuals for `op` with the skew ansatz `omega`
/// (W1 holds by construction of the ansatz).
pub fn extract(
    op: &OperatorSpec,
    unknowns: &[(String, Vec<usize>)],
    omega: &Mat,
    target: &str,
) -> AnsatzConstraintSet {
    let spec = op.with_omega(omega.clone());
    let opts = CheckOptions::default();
    let mut residuals: Vec<Residual> = Vec::new();
    residuals.extend(
        check_ultralocal(&spec, &opts)
            .into_iter()
            .filter(|r| r.id.family == Family::W2),
    );
    residuals.extend(check_compatibility(&spec, &opts));
    let mut residuals: Vec<Residual> = residuals
        .into_iter()
        .filter(|r| !r.expr.is_zero())
        .collect();
    residuals.sort_by(|a, b| a.id.cmp(&b.id));
    AnsatzConstraintSet {
        target: target.to_string(),
        unknowns: unknowns.to_vec(),
        residuals,
    }
}

fn is_unknown_atom(atom: &Atom, unknowns: &[(String, Vec<usize>)]) -> bool {
    match atom {
        Atom::FuncDeriv { name, .. } => unknowns.iter().any(|(n, _)| n.as_str() == &**name),
        _ => false,
    }
}

/// Scan one residual for the `q * A` shape.
fn forced_in(residual: &Residual, unknowns: &[(String, Vec<usize>)]) -> Option<ForcedZero> {
    let expr = &residual.expr;
    if expr.is_zero() {
        return None;
    }
    // cofactor must be free of unknowns, so the denominator must be too
    let mut den_has_unknown = false;
    for (a, _) in expr.den_monomial().atoms() {
        den_has_unknown |= is_unknown_atom(a, unknowns);
    }
    for (f, _) in expr.den_factors() {
        f.for_each_atom(|a| den_has_unknown |= is_unknown_atom(a, unknowns));
    }
    if den_has_unknown {
        return None;
    }
    let num = expr.numerator();
    let mut candidate: Option<Atom> = None;
    for (m, _) in num.terms() {
        let mut in_this: Option<Atom> = None;
        for (a, e) in m.atoms() {
            if is_unknown_atom(a, unknowns) {
                if *e != 1 || in_this.is_some() {
                    return None; // nonlinear or mixed in one monomial
                }
                in_this = Some(a.clone());
            }
        }
        match (in_this, &candidate) {
            (None, _) => return None, // unknown-free monomial spoils q*A
            (Some(a), None) => candidate = Some(a),
            (Some(a), Some(c)) if &a == c => {}
            _ => return None, // two different unknown atoms
        }
    }
    let atom = candidate?;
    let q = expr
        .div(&Expr::atom(atom.clone()))
        .expect("atom is nonzero");
    Some(ForcedZero {
        atom,
        witness: residual.id.clone(),
        cofactor: q,
    })
}

/// Iterated forced-vanishing detection.
pub fn detect_forced_zero(set: &AnsatzConstraintSet, op: &OperatorSpec) -> Vec<ForcedZero> {
    let mut found: Vec<ForcedZero> = Vec::new();
    let mut residuals: Vec<Residual> = set.residuals.clone();
    loop {
        let mut new_atoms: Vec<ForcedZero> = Vec::new();
        for r in &residuals {
            if let Some(f) = forced_in(r, &set.unknowns) {
                if !found.iter().any(|g| g.atom == f.atom)
                    && !new_atoms.iter().any(|g| g.atom == f.atom)
                {
                    new_atoms.push(f);
                }
            }
        }
        if new_atoms.is_empty() {
            return found;
        }
        let mut bindings: BTreeMap<Atom, Expr> = BTreeMap::new();
        for f in found.iter().chain(new_atoms.iter()) {
            bindings.insert(f.atom.clone(), Expr::zero());
        }
        residuals = residuals
            .into_iter()
            .filter_map(|r| {
                let expr = substitute(&r.expr, &bindings, &op.rewrites).ok()?;
                if expr.is_zero() {
                    None
                } else {
                    Some(Residual { id: r.id, expr })
                }
            })
            .collect();
        found.extend(new_atoms);
    }
}

/// Outcome of a perturbation fixture.
#[derive(Clone, Debug)]
pub enum Refutation {
    /// The perturbed operator fails verification at this condition.
    Refuted(ConditionId),
    /// The perturbed operator still verifies (an acceptance failure for
    /// directions drawn from the classification's forbidden set).
    NotRefuted,
}

/// Verify a perturbed operator and report the first failing condition.
pub fn perturb_and_refute(spec: &OperatorSpec, target: &str) -> Refutation {
    let report = verify_named(spec, &CheckOptions::default(), target);
    match report.residuals.first() {
        Some(r) => Refutation::Refuted(r.id.clone()),
        None => Refutation::NotRefuted,
    }
}

/// Deterministic xorshift generator for the fuzz mode (the fixture suite
/// itself uses only recorded directions).
pub struct FuzzRng(u64);

impl FuzzRng {
    pub fn new(seed: u64) -> FuzzRng {
        FuzzRng(seed.max(1))
    }

    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

/// A randomly drawn off-family monomial direction for one ultralocal slot.
#[derive(Clone, Debug)]
pub struct FuzzDirection {
    pub label: String,
    /// Slot as an upper matrix position `(i, j)`, `i < j`.
    pub slot: (usize, usize),
    /// The monomial added as `eps * m` to that slot (skew-completed).
    pub direction: Expr,
}

/// Draw `count` out-of-family monomial directions for an entry, honoring
/// its per-slot freedom sets.
pub fn fuzz_directions(
    n_fields: usize,
    field_names: &[String],
    fuzz_free: &[Vec<usize>],
    seed: u64,
    count: usize,
) -> Vec<FuzzDirection> {
    let slots: Vec<(usize, usize)> = (0..n_fields)
        .flat_map(|i| ((i + 1)..n_fields).map(move |j| (i, j)))
        .collect();
    let mut rng = FuzzRng::new(seed);
    let mut out = Vec::new();
    let mut guard = 0;
    while out.len() < count && guard < count * 200 {
        guard += 1;
        let slot_ix = rng.below(slots.len());
        let degree = 1 + rng.below(2);
        let mut vars: Vec<usize> = (0..degree).map(|_| rng.below(n_fields)).collect();
        vars.sort();
        let free = &fuzz_free[slot_ix];
        if vars.iter().all(|v| free.contains(v)) {
            continue; // stays inside the family; not a refutation direction
        }
        let mut m = Expr::one();
        for v in &vars {
            m = m.mul(&Expr::field(*v));
        }
        let names: Vec<&str> = vars.iter().map(|v| field_names[*v].as_str()).collect();
        out.push(FuzzDirection {
            label: format!(
                "slot ({},{}) += eps*{}",
                slots[slot_ix].0 + 1,
                slots[slot_ix].1 + 1,
                names.join("*")
            ),
            slot: slots[slot_ix],
            direction: m,
        });
    }
    out
}

/// Apply a fuzz direction to an ultralocal matrix, keeping it skew.
pub fn apply_direction(omega: &Mat, dir: &FuzzDirection) -> Mat {
    let mut m = omega.clone();
    let eps = Expr::param("eps");
    let (i, j) = dir.slot;
    m.set(i, j, omega.at(i, j).add(&eps.mul(&dir.direction)));
    m.set(j, i, omega.at(j, i).sub(&eps.mul(&dir.direction)));
    m
}
