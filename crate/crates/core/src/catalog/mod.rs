//! Built-in library of the classified canonical operators.
//!
//! Twenty-four canonical forms P1–P24 (two-component degenerate,
//! three-component non-degenerate, and three-component degenerate of pencil
//! rank 0, 1, 2) plus the two three-wave examples. Every entry stores the
//! first-order part as displayed, the ultralocal families of its
//! classification theorem, transcription notes where the display needed a
//! corrected reading, and recorded necessity fixtures.

mod three_component;
mod three_wave;
mod two_component;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::conditions::{verify_named, CheckOptions, ConditionReport};
use crate::expr::{Atom, Expr, RewriteTable};
use crate::operator::{Mat, OperatorSpec};

/// One admissible ultralocal family (a case of the entry's classification
/// theorem), together with the side conditions it imposes on the
/// first-order part.
#[derive(Clone, Debug)]
pub struct FamilyCase {
    pub label: String,
    /// Specializations of abstract functions/parameters on the P side.
    pub p_bindings: BTreeMap<Atom, Expr>,
    /// The ultralocal matrix of this case (abstract functions left free).
    pub omega: Mat,
    /// Extra definitional rules needed by this case.
    pub rewrites: RewriteTable,
    /// Human-readable side conditions.
    pub side_conditions: Vec<String>,
}

impl FamilyCase {
    pub fn new(label: &str, omega: Mat) -> FamilyCase {
        FamilyCase {
            label: label.to_string(),
            p_bindings: BTreeMap::new(),
            omega,
            rewrites: RewriteTable::empty(),
            side_conditions: Vec::new(),
        }
    }

    pub fn bind(mut self, atom: Atom, image: Expr) -> FamilyCase {
        self.p_bindings.insert(atom, image);
        self
    }

    pub fn with_rewrites(mut self, rw: RewriteTable) -> FamilyCase {
        self.rewrites = rw;
        self
    }

    pub fn note(mut self, s: &str) -> FamilyCase {
        self.side_conditions.push(s.to_string());
        self
    }

    /// Instantiate this case over the entry's operator.
    pub fn instantiate(&self, op: &OperatorSpec) -> OperatorSpec {
        let mut spec = op.clone();
        if !self.rewrites.is_empty() {
            let mut rules: Vec<(Atom, Expr)> = spec.rewrites.rules().to_vec();
            rules.extend(self.rewrites.rules().iter().cloned());
            spec = spec.with_rewrites(RewriteTable::new(rules).expect("case rules acyclic"));
        }
        if !self.p_bindings.is_empty() {
            spec = spec
                .substitute(&self.p_bindings)
                .expect("case bindings well-formed");
        }
        spec.with_omega(self.omega.clone())
    }
}

/// A recorded perturbation fixture: a deterministic off-family direction
/// that verification must refute.
#[derive(Clone, Debug)]
pub struct Perturbation {
    pub label: String,
    pub case: FamilyCase,
}

/// Necessity-side data for an entry.
#[derive(Clone, Debug, Default)]
pub struct Necessity {
    /// Ansatz atoms the classification forces to vanish at generic points
    /// (base function atoms, or single derivative atoms such as `f_u`).
    pub expected_forced: Vec<Atom>,
    pub perturbations: Vec<Perturbation>,
}

/// A catalog entry.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub section: String,
    pub rank_class: String,
    /// The first-order part, `omega = 0`.
    pub op: OperatorSpec,
    /// Generic ultralocal ansatz unknowns `(name, argument fields)`.
    pub ansatz_unknowns: Vec<(String, Vec<usize>)>,
    /// The generic skew ansatz matrix.
    pub ansatz: Mat,
    pub cases: Vec<FamilyCase>,
    pub notes: Vec<String>,
    pub necessity: Necessity,
    /// Literal readings recorded for flagged entries; each must fail.
    pub literal_variants: Vec<(String, OperatorSpec)>,
    /// Which case random fuzz directions perturb.
    pub fuzz_case: usize,
    /// Per ultralocal slot ((1,2), (1,3), (2,3) upper entries), the fields a
    /// monomial direction may involve while staying inside the family; any
    /// direction outside these sets must be refuted.
    pub fuzz_free: Vec<Vec<usize>>,
}

impl CatalogEntry {
    /// Verify one family case; the report target carries entry and case.
    pub fn verify_case(&self, case: &FamilyCase, opts: &CheckOptions) -> ConditionReport {
        let spec = case.instantiate(&self.op);
        verify_named(&spec, opts, &format!("{}/{}", self.name, case.label))
    }

    /// Verify every case; true when all pass.
    pub fn verify_all_cases(&self, opts: &CheckOptions) -> Vec<ConditionReport> {
        self.cases
            .iter()
            .map(|c| self.verify_case(c, opts))
            .collect()
    }
}

fn build_all() -> Vec<CatalogEntry> {
    let mut v = Vec::new();
    v.extend(two_component::entries());
    v.extend(three_component::entries());
    v.extend(three_wave::entries());
    v
}

static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();

/// Every entry, in catalog order (P1..P24, then the three-wave examples).
pub fn all() -> &'static [CatalogEntry] {
    CATALOG.get_or_init(build_all)
}

/// Entry names in catalog order.
pub fn names() -> Vec<&'static str> {
    all().iter().map(|e| e.name.as_str()).collect()
}

/// Look up one entry.
pub fn get(name: &str) -> Option<&'static CatalogEntry> {
    all().iter().find(|e| e.name.eq_ignore_ascii_case(name))
}

/// The enumerated family cases of an entry.
pub fn enumerate_cases(name: &str) -> Option<&'static [FamilyCase]> {
    get(name).map(|e| e.cases.as_slice())
}

// ---- shared builders -------------------------------------------------

pub(crate) fn e(n: i64) -> Expr {
    Expr::int(n)
}

pub(crate) fn half() -> Expr {
    Expr::rational(1, 2)
}

pub(crate) fn u() -> Expr {
    Expr::field(0)
}
pub(crate) fn v() -> Expr {
    Expr::field(1)
}
pub(crate) fn w() -> Expr {
    Expr::field(2)
}
pub(crate) fn uy() -> Expr {
    Expr::jet(0, 1)
}
pub(crate) fn vx() -> Expr {
    Expr::jet(1, 0)
}
pub(crate) fn vy() -> Expr {
    Expr::jet(1, 1)
}
pub(crate) fn wx() -> Expr {
    Expr::jet(2, 0)
}
pub(crate) fn wy() -> Expr {
    Expr::jet(2, 1)
}

pub(crate) fn mat2(rows: [[Expr; 2]; 2]) -> Mat {
    Mat::from_rows(rows.into_iter().map(|r| r.into_iter().collect()).collect())
}

pub(crate) fn mat3(rows: [[Expr; 3]; 3]) -> Mat {
    Mat::from_rows(rows.into_iter().map(|r| r.into_iter().collect()).collect())
}

/// Skew 2x2 ultralocal matrix `[[0, f], [-f, 0]]`.
pub(crate) fn forma2(f: Expr) -> Mat {
    mat2([[e(0), f.clone()], [f.neg(), e(0)]])
}

/// Skew 3x3 ultralocal matrix with upper entries `f1, f2, f3`.
pub(crate) fn forma3(f1: Expr, f2: Expr, f3: Expr) -> Mat {
    mat3([
        [e(0), f1.clone(), f2.clone()],
        [f1.neg(), e(0), f3.clone()],
        [f2.neg(), f3.neg(), e(0)],
    ])
}

/// The antidiagonal x-metric `[[0,1,0],[1,0,0],[0,0,0]]` shared by the
/// rank-2 forms.
pub(crate) fn rank2_gx() -> Mat {
    mat3([[e(0), e(1), e(0)], [e(1), e(0), e(0)], [e(0), e(0), e(0)]])
}
