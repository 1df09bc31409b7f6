//! Typed representation of operators `P + omega`.
//!
//! `P^{ij} = g^{ij a} d/dx^a + b_k^{ij a} u^k_a` is stored through its
//! leading coefficients `g` (one symmetric-by-convention matrix per spatial
//! dimension) and the explicit array `b`, recovered from the displayed tail
//! matrix by reading off jet coefficients. The ultralocal part `omega` is an
//! order-zero matrix. Index convention throughout: `b[alpha][i][j][k]` is
//! `b_k^{ij alpha}`.

use thiserror::Error;

use crate::expr::{Atom, Expr, ExprError, RewriteTable};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OperatorError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("jet variables are not allowed in {0}")]
    JetsNotAllowed(&'static str),
    #[error("tail cell ({0},{1}): {2}")]
    TailCell(usize, usize, ExprError),
    #[error("tail cell ({0},{1}) has a jet-free remainder; order-zero terms belong in omega")]
    TailRemainder(usize, usize),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Names of the dependent fields and spatial dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpace {
    fields: Vec<String>,
    dims: Vec<String>,
}

impl FieldSpace {
    pub fn new(fields: &[&str], dims: &[&str]) -> FieldSpace {
        assert!(!fields.is_empty() && !dims.is_empty());
        let f: Vec<String> = fields.iter().map(|s| s.to_string()).collect();
        let d: Vec<String> = dims.iter().map(|s| s.to_string()).collect();
        let mut names = f.clone();
        names.extend(d.clone());
        names.sort();
        names.dedup();
        assert_eq!(names.len(), f.len() + d.len(), "names must be unique");
        FieldSpace { fields: f, dims: d }
    }

    /// Two fields u, v over dimensions x, y.
    pub fn uv_xy() -> FieldSpace {
        FieldSpace::new(&["u", "v"], &["x", "y"])
    }

    /// Three fields u, v, w over dimensions x, y.
    pub fn uvw_xy() -> FieldSpace {
        FieldSpace::new(&["u", "v", "w"], &["x", "y"])
    }

    /// Three fields u, v, w over the single dimension x.
    pub fn uvw_x() -> FieldSpace {
        FieldSpace::new(&["u", "v", "w"], &["x"])
    }

    pub fn n_fields(&self) -> usize {
        self.fields.len()
    }

    pub fn n_dims(&self) -> usize {
        self.dims.len()
    }

    pub fn field_names(&self) -> &[String] {
        &self.fields
    }

    pub fn dim_names(&self) -> &[String] {
        &self.dims
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f == name)
    }

    pub fn dim_index(&self, name: &str) -> Option<usize> {
        self.dims.iter().position(|d| d == name)
    }
}

/// Square matrix of expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<Expr>,
}

impl Mat {
    pub fn zero(n: usize) -> Mat {
        Mat {
            n,
            data: vec![Expr::zero(); n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Expr>>) -> Mat {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Mat {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> &Expr {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Expr) {
        self.data[i * self.n + j] = e;
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Mat {
        Mat {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&Expr) -> Result<Expr, ExprError>) -> Result<Mat, ExprError> {
        Ok(Mat {
            n: self.n,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Expr::is_zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = &Expr> {
        self.data.iter()
    }

    /// Determinant by cofactor expansion (matrices here are at most 3x3).
    pub fn det(&self) -> Expr {
        match self.n {
            0 => Expr::one(),
            1 => self.at(0, 0).clone(),
            _ => {
                let mut acc = Expr::zero();
                for j in 0..self.n {
                    let mut minor = Vec::new();
                    for r in 1..self.n {
                        let mut row = Vec::new();
                        for c in 0..self.n {
                            if c != j {
                                row.push(self.at(r, c).clone());
                            }
                        }
                        minor.push(row);
                    }
                    let cof = Mat::from_rows(minor).det().mul(self.at(0, j));
                    acc = if j % 2 == 0 {
                        acc.add(&cof)
                    } else {
                        acc.sub(&cof)
                    };
                }
                acc
            }
        }
    }
}

/// Rank-3 coefficient array `b[i][j][k]` for a fixed dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct BTen {
    n: usize,
    data: Vec<Expr>,
}

impl BTen {
    pub fn zero(n: usize) -> BTen {
        BTen {
            n,
            data: vec![Expr::zero(); n * n * n],
        }
    }

    pub fn at(&self, i: usize, j: usize, k: usize) -> &Expr {
        &self.data[(i * self.n + j) * self.n + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, e: Expr) {
        self.data[(i * self.n + j) * self.n + k] = e;
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> BTen {
        BTen {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&Expr) -> Result<Expr, ExprError>) -> Result<BTen, ExprError> {
        Ok(BTen {
            n: self.n,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }
}

/// The operator `P + omega` over a field space.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    pub space: FieldSpace,
    /// Leading coefficients, one matrix per dimension.
    pub g: Vec<Mat>,
    /// `b[alpha][i][j][k] = b_k^{ij alpha}`, derived from the tail.
    pub b: Vec<BTen>,
    /// Ultralocal part.
    pub omega: Mat,
    /// Definitional rewrite rules carried by the operator.
    pub rewrites: RewriteTable,
}

impl OperatorSpec {
    /// Assemble an operator from leading matrices, the displayed tail matrix
    /// (each cell linear in jets with no order-zero remainder) and the
    /// ultralocal matrix.
    pub fn from_parts(
        space: FieldSpace,
        g: Vec<Mat>,
        tail: Mat,
        omega: Mat,
        rewrites: RewriteTable,
    ) -> Result<OperatorSpec, OperatorError> {
        let n = space.n_fields();
        let nd = space.n_dims();
        if g.len() != nd {
            return Err(OperatorError::DimensionMismatch(format!(
                "expected {} leading matrices, got {}",
                nd,
                g.len()
            )));
        }
        for m in g
            .iter()
            .chain(std::iter::once(&omega))
            .chain(std::iter::once(&tail))
        {
            if m.n() != n {
                return Err(OperatorError::DimensionMismatch(format!(
                    "matrix size {} does not match {} fields",
                    m.n(),
                    n
                )));
            }
        }
        let g: Vec<Mat> = g.iter().map(|m| m.map(|e| rewrites.apply(e))).collect();
        let omega = omega.map(|e| rewrites.apply(e));
        let tail = tail.map(|e| rewrites.apply(e));
        for m in &g {
            if m.entries().any(Expr::contains_jet) {
                return Err(OperatorError::JetsNotAllowed("leading coefficients"));
            }
        }
        if omega.entries().any(Expr::contains_jet) {
            return Err(OperatorError::JetsNotAllowed("omega"));
        }
        let mut b = vec![BTen::zero(n); nd];
        for i in 0..n {
            for j in 0..n {
                let cell = tail.at(i, j);
                let rem = cell
                    .jet_free_part()
                    .map_err(|e| OperatorError::TailCell(i, j, e))?;
                if !rem.is_zero() {
                    return Err(OperatorError::TailRemainder(i, j));
                }
                for (alpha, bt) in b.iter_mut().enumerate() {
                    for k in 0..n {
                        let c = cell
                            .coeff_of_jet(k, alpha)
                            .map_err(|e| OperatorError::TailCell(i, j, e))?;
                        bt.set(i, j, k, c);
                    }
                }
            }
        }
        Ok(OperatorSpec {
            space,
            g,
            b,
            omega,
            rewrites,
        })
    }

    pub fn n_fields(&self) -> usize {
        self.space.n_fields()
    }

    pub fn n_dims(&self) -> usize {
        self.space.n_dims()
    }

    /// Reassemble the tail matrix `sum_{k,alpha} b_k^{ij alpha} u^k_alpha`.
    pub fn tail(&self) -> Mat {
        let n = self.n_fields();
        let mut t = Mat::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut cell = Expr::zero();
                for (alpha, bt) in self.b.iter().enumerate() {
                    for k in 0..n {
                        cell = cell.add(&bt.at(i, j, k).mul(&Expr::jet(k, alpha)));
                    }
                }
                t.set(i, j, cell);
            }
        }
        t
    }

    pub fn with_omega(&self, omega: Mat) -> OperatorSpec {
        let mut s = self.clone();
        s.omega = omega.map(|e| s.rewrites.apply(e));
        s
    }

    pub fn with_rewrites(&self, rewrites: RewriteTable) -> OperatorSpec {
        let mut s = self.clone();
        s.g = s.g.iter().map(|m| m.map(|e| rewrites.apply(e))).collect();
        s.b = s.b.iter().map(|t| t.map(|e| rewrites.apply(e))).collect();
        s.omega = s.omega.map(|e| rewrites.apply(e));
        s.rewrites = rewrites;
        s
    }

    /// Substitute atoms in every coefficient of the operator.
    pub fn substitute(
        &self,
        bindings: &std::collections::BTreeMap<Atom, Expr>,
    ) -> Result<OperatorSpec, ExprError> {
        let sub = |e: &Expr| crate::expr::subst::substitute(e, bindings, &self.rewrites);
        Ok(OperatorSpec {
            space: self.space.clone(),
            g: self
                .g
                .iter()
                .map(|m| m.try_map(sub))
                .collect::<Result<_, _>>()?,
            b: self
                .b
                .iter()
                .map(|t| t.try_map(sub))
                .collect::<Result<_, _>>()?,
            omega: self.omega.try_map(sub)?,
            rewrites: self.rewrites.clone(),
        })
    }
}

/// Degeneracy data: symbolic determinant tests and the generic rank of the
/// metric pencil `g^1 - lambda g^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Degeneracy {
    /// For each dimension, whether `det(g^alpha)` vanishes identically.
    pub det_zero: Vec<bool>,
    /// Generic rank of the pencil (rank of `g^1` when there is only one
    /// dimension).
    pub pencil_rank: usize,
}

/// Reserved parameter name for the pencil variable; the `$` suffix cannot be
/// produced by the surface syntax, so it never collides with user atoms.
pub const PENCIL_PARAM: &str = "lambda$";

pub fn degeneracy(spec: &OperatorSpec) -> Degeneracy {
    let det_zero = spec.g.iter().map(|m| m.det().is_zero()).collect();
    let pencil = if spec.n_dims() >= 2 {
        let lam = Expr::param(PENCIL_PARAM);
        let mut p = Mat::zero(spec.n_fields());
        for i in 0..spec.n_fields() {
            for j in 0..spec.n_fields() {
                p.set(i, j, spec.g[0].at(i, j).sub(&lam.mul(spec.g[1].at(i, j))));
            }
        }
        p
    } else {
        spec.g[0].clone()
    };
    Degeneracy {
        det_zero,
        pencil_rank: generic_rank(&pencil),
    }
}

/// Largest minor size with a not-identically-zero determinant.
fn generic_rank(m: &Mat) -> usize {
    let n = m.n();
    for size in (1..=n).rev() {
        for rows in subsets(n, size) {
            for cols in subsets(n, size) {
                let sub = Mat::from_rows(
                    rows.iter()
                        .map(|&r| cols.iter().map(|&c| m.at(r, c).clone()).collect())
                        .collect(),
                );
                if !sub.det().is_zero() {
                    return size;
                }
            }
        }
    }
    0
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        start: usize,
        n: usize,
        size: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, size, current, out);
            current.pop();
        }
    }
    rec(0, n, size, &mut current, &mut out);
    out
}
