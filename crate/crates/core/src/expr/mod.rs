//! Exact rational-expression kernel.
//!
//! An [`Expr`] is a quotient of sparse polynomials over the atom alphabet of
//! [`atom::Atom`]. Denominators are kept factored as a power product times a
//! set of primitive polynomial factors recorded as entered; normalization
//! cancels monomial content and any factor that exactly divides the
//! numerator. Atoms are algebraically independent, so an expression is zero
//! exactly when its numerator normalizes to the zero polynomial — `is_zero`
//! is a decision procedure for this class.

pub mod atom;
pub mod poly;
mod rewrite;
pub mod subst;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use atom::{Atom, DimIx, FieldIx};
pub use poly::{Monomial, Poly};
pub use rewrite::RewriteTable;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("tail not linear in jet variables")]
    TailNotLinear,
    #[error("binding for derivative atom {0} is inconsistent with its base function binding")]
    InconsistentBinding(String),
    #[error("rewrite rules exceeded depth limit (cycle?)")]
    RewriteDepth,
}

/// Normalized rational expression `num / (den_mono * prod factors^k)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Expr {
    num: Poly,
    den_mono: Monomial,
    den_factors: Vec<(Poly, u32)>,
}

impl Expr {
    pub fn zero() -> Expr {
        Expr {
            num: Poly::zero(),
            den_mono: Monomial::one(),
            den_factors: Vec::new(),
        }
    }

    pub fn one() -> Expr {
        Expr::from_poly(Poly::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::from_poly(Poly::from_int(n))
    }

    pub fn rational(n: i64, d: i64) -> Expr {
        assert!(d != 0);
        Expr::from_poly(Poly::constant(BigRational::new(n.into(), d.into())))
    }

    pub fn atom(a: Atom) -> Expr {
        Expr::from_poly(Poly::atom(a))
    }

    pub fn field(i: usize) -> Expr {
        Expr::atom(Atom::field(i))
    }

    pub fn jet(k: usize, alpha: usize) -> Expr {
        Expr::atom(Atom::jet(k, alpha))
    }

    pub fn param(name: &str) -> Expr {
        Expr::atom(Atom::param(name))
    }

    pub fn func(name: &str, args: &[usize]) -> Expr {
        Expr::atom(Atom::func(name, args))
    }

    pub fn func_deriv(name: &str, args: &[usize], deriv: &[usize]) -> Expr {
        Expr::atom(Atom::func_deriv(name, args, deriv))
    }

    pub fn from_poly(num: Poly) -> Expr {
        Expr::make(num, Monomial::one(), Vec::new())
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn den_monomial(&self) -> &Monomial {
        &self.den_mono
    }

    pub fn den_factors(&self) -> &[(Poly, u32)] {
        &self.den_factors
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den_mono.is_one() && self.den_factors.is_empty() && self.num.is_one()
    }

    pub fn has_denominator(&self) -> bool {
        !self.den_mono.is_one() || !self.den_factors.is_empty()
    }

    /// Denominator expanded to a single polynomial.
    pub fn den_poly(&self) -> Poly {
        let mut p = Poly::monomial(self.den_mono.clone(), BigRational::one());
        for (f, k) in &self.den_factors {
            for _ in 0..*k {
                p = p.mul(f);
            }
        }
        p
    }

    /// Canonical constructor: cancels monomial content and exact factors.
    fn make(num: Poly, mut den_mono: Monomial, den_factors: Vec<(Poly, u32)>) -> Expr {
        if num.is_zero() {
            return Expr::zero();
        }
        let mut num = num;
        let g = num.monomial_content().gcd(&den_mono);
        if !g.is_one() {
            num = num.div_monomial(&g);
            den_mono = den_mono.div(&g).expect("gcd divides");
        }
        let mut factors: Vec<(Poly, u32)> = Vec::with_capacity(den_factors.len());
        for (f, mut k) in den_factors {
            while k > 0 {
                match num.exact_div(&f) {
                    Some(q) => {
                        num = q;
                        k -= 1;
                    }
                    None => break,
                }
            }
            if k > 0 {
                match factors.iter_mut().find(|(g, _)| *g == f) {
                    Some((_, e)) => *e += k,
                    None => factors.push((f, k)),
                }
            }
        }
        factors.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        // Factor cancellation may expose fresh monomial content.
        let g = num.monomial_content().gcd(&den_mono);
        if !g.is_one() {
            num = num.div_monomial(&g);
            den_mono = den_mono.div(&g).expect("gcd divides");
        }
        Expr {
            num,
            den_mono,
            den_factors: factors,
        }
    }

    fn den_cofactor(&self, lcm_mono: &Monomial, union: &[(Poly, u32)]) -> Poly {
        let mut p = Poly::monomial(
            lcm_mono.div(&self.den_mono).expect("lcm divides"),
            BigRational::one(),
        );
        for (f, k) in union {
            let have = self
                .den_factors
                .iter()
                .find(|(g, _)| g == f)
                .map(|(_, e)| *e)
                .unwrap_or(0);
            for _ in have..*k {
                p = p.mul(f);
            }
        }
        p
    }

    pub fn add(&self, other: &Expr) -> Expr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den_mono == other.den_mono && self.den_factors == other.den_factors {
            return Expr::make(
                self.num.add(&other.num),
                self.den_mono.clone(),
                self.den_factors.clone(),
            );
        }
        let mono = self.den_mono.lcm(&other.den_mono);
        let mut union: Vec<(Poly, u32)> = self.den_factors.clone();
        for (f, k) in &other.den_factors {
            match union.iter_mut().find(|(g, _)| g == f) {
                Some((_, e)) => *e = (*e).max(*k),
                None => union.push((f.clone(), *k)),
            }
        }
        let ca = self.den_cofactor(&mono, &union);
        let cb = other.den_cofactor(&mono, &union);
        let num = self.num.mul(&ca).add(&other.num.mul(&cb));
        Expr::make(num, mono, union)
    }

    pub fn neg(&self) -> Expr {
        Expr {
            num: self.num.neg(),
            den_mono: self.den_mono.clone(),
            den_factors: self.den_factors.clone(),
        }
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        let mut factors = self.den_factors.clone();
        for (f, k) in &other.den_factors {
            match factors.iter_mut().find(|(g, _)| g == f) {
                Some((_, e)) => *e += *k,
                None => factors.push((f.clone(), *k)),
            }
        }
        Expr::make(
            self.num.mul(&other.num),
            self.den_mono.mul(&other.den_mono),
            factors,
        )
    }

    pub fn mul_scalar(&self, c: &BigRational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            num: self.num.mul_scalar(c),
            den_mono: self.den_mono.clone(),
            den_factors: self.den_factors.clone(),
        }
    }

    pub fn mul_int(&self, n: i64) -> Expr {
        self.mul_scalar(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Multiplicative inverse. The old numerator becomes a tracked
    /// denominator factor (after stripping rational and monomial content),
    /// which keeps denominators entered as simple products in factored form.
    pub fn inverse(&self) -> Result<Expr, ExprError> {
        if self.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        let mut new_num = Poly::monomial(self.den_mono.clone(), BigRational::one());
        for (f, k) in &self.den_factors {
            for _ in 0..*k {
                new_num = new_num.mul(f);
            }
        }
        let mono = self.num.monomial_content();
        let stripped = self.num.div_monomial(&mono);
        let (c, prim) = stripped.primitive_part();
        new_num = new_num.mul_scalar(&c.recip());
        let factors = if prim.is_one() {
            Vec::new()
        } else {
            vec![(prim, 1)]
        };
        Ok(Expr::make(new_num, mono, factors))
    }

    pub fn div(&self, other: &Expr) -> Result<Expr, ExprError> {
        Ok(self.mul(&other.inverse()?))
    }

    pub fn int_pow(&self, m: i64) -> Result<Expr, ExprError> {
        if m < 0 {
            return self.inverse()?.int_pow(-m);
        }
        let mut acc = Expr::one();
        for _ in 0..m {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    /// Mathematical equality (structural equality can be finer in principle).
    pub fn alg_eq(&self, other: &Expr) -> bool {
        self.sub(other).is_zero()
    }

    pub fn contains_jet(&self) -> bool {
        self.num.contains_atom_where(Atom::is_jet)
            || self.den_mono.atoms().any(|(a, _)| a.is_jet())
            || self
                .den_factors
                .iter()
                .any(|(f, _)| f.contains_atom_where(Atom::is_jet))
    }

    pub fn for_each_atom(&self, mut f: impl FnMut(&Atom)) {
        self.num.for_each_atom(&mut f);
        for (a, _) in self.den_mono.atoms() {
            f(a);
        }
        for (p, _) in &self.den_factors {
            p.for_each_atom(&mut f);
        }
    }

    /// Exact partial derivative with respect to the field variable `u^i`.
    ///
    /// Jets and parameters are independent coordinates; abstract functions
    /// follow the chain rule, with `rewrites` applied to any derivative atom
    /// the chain rule produces.
    pub fn diff(&self, i: usize, rewrites: &RewriteTable) -> Expr {
        let i = FieldIx(i as u8);
        if self.is_zero() {
            return Expr::zero();
        }
        // d(N/D) = dN/D - sum_parts N/D * dP/P over den parts P.
        let base_den = Expr {
            num: Poly::one(),
            den_mono: self.den_mono.clone(),
            den_factors: self.den_factors.clone(),
        };
        let mut out = diff_poly(&self.num, i, rewrites).mul(&base_den);
        for (f, k) in &self.den_factors {
            let df = diff_poly(f, i, rewrites);
            if df.is_zero() {
                continue;
            }
            let f_expr = Expr::from_poly(f.clone());
            let term = self
                .mul(&df)
                .div(&f_expr)
                .expect("den factor nonzero")
                .mul_int(*k as i64);
            out = out.sub(&term);
        }
        for (a, e) in self.den_mono.atoms() {
            let da = match a.diff_field(i) {
                atom::AtomDiff::Zero => continue,
                atom::AtomDiff::One => Expr::one(),
                atom::AtomDiff::Atom(b) => rewrites.image_of(&b),
            };
            let term = self
                .mul(&da)
                .div(&Expr::atom(a.clone()))
                .expect("atom nonzero")
                .mul_int(*e as i64);
            out = out.sub(&term);
        }
        out
    }

    /// Syntactic partial derivative with respect to a single atom, every
    /// atom treated as an independent coordinate (no chain rule).
    pub fn diff_atom_syntactic(&self, a: &Atom) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        let base_den = Expr {
            num: Poly::one(),
            den_mono: self.den_mono.clone(),
            den_factors: self.den_factors.clone(),
        };
        let mut out = Expr::from_poly(self.num.diff_atom(a)).mul(&base_den);
        for (f, k) in &self.den_factors {
            let df = f.diff_atom(a);
            if df.is_zero() {
                continue;
            }
            let term = self
                .mul(&Expr::from_poly(df))
                .div(&Expr::from_poly(f.clone()))
                .expect("den factor nonzero")
                .mul_int(*k as i64);
            out = out.sub(&term);
        }
        let e = self.den_mono.exponent(a);
        if e > 0 {
            let term = self
                .div(&Expr::atom(a.clone()))
                .expect("atom nonzero")
                .mul_int(e as i64);
            out = out.sub(&term);
        }
        out
    }

    /// Total degree in jet atoms of the numerator; errors if the denominator
    /// involves jets.
    pub fn jet_degree(&self) -> Result<u64, ExprError> {
        let den_has_jets = self.den_mono.atoms().any(|(a, _)| a.is_jet())
            || self
                .den_factors
                .iter()
                .any(|(f, _)| f.contains_atom_where(Atom::is_jet));
        if den_has_jets {
            return Err(ExprError::TailNotLinear);
        }
        Ok(self.num.max_degree_where(Atom::is_jet))
    }

    /// Coefficient of the jet `u^k_alpha` in an expression that is at most
    /// linear in jets.
    pub fn coeff_of_jet(&self, k: usize, alpha: usize) -> Result<Expr, ExprError> {
        if self.jet_degree()? > 1 {
            return Err(ExprError::TailNotLinear);
        }
        let jet = Atom::jet(k, alpha);
        let mut picked = Poly::zero();
        for (m, c) in self.num.terms() {
            if m.exponent(&jet) == 1 {
                let reduced = m.div(&Monomial::atom(jet.clone())).expect("exponent 1");
                picked = picked.add(&Poly::monomial(reduced, c.clone()));
            }
        }
        Ok(Expr::make(
            picked,
            self.den_mono.clone(),
            self.den_factors.clone(),
        ))
    }

    /// Jet-free part of an at-most-linear-in-jets expression.
    pub fn jet_free_part(&self) -> Result<Expr, ExprError> {
        if self.jet_degree()? > 1 {
            return Err(ExprError::TailNotLinear);
        }
        let mut picked = Poly::zero();
        for (m, c) in self.num.terms() {
            if m.degree_where(Atom::is_jet) == 0 {
                picked = picked.add(&Poly::monomial(m.clone(), c.clone()));
            }
        }
        Ok(Expr::make(
            picked,
            self.den_mono.clone(),
            self.den_factors.clone(),
        ))
    }

    /// Rename atoms structurally (no images, no chain rule). Intended for
    /// relabelings such as field permutations; the result is renormalized.
    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> Expr {
        let map_poly = |p: &Poly| -> Poly {
            let mut out = Poly::zero();
            for (m, c) in p.terms() {
                let mut mm = Monomial::one();
                for (a, e) in m.atoms() {
                    mm = mm.mul(&Monomial::atom(f(a)).pow(*e));
                }
                out = out.add(&Poly::monomial(mm, c.clone()));
            }
            out
        };
        let num = map_poly(&self.num);
        let mut den_mono = Monomial::one();
        for (a, e) in self.den_mono.atoms() {
            den_mono = den_mono.mul(&Monomial::atom(f(a)).pow(*e));
        }
        let mut factors = Vec::new();
        let mut num_scale = BigRational::one();
        for (fac, k) in &self.den_factors {
            let (c, prim) = map_poly(fac).primitive_part();
            for _ in 0..*k {
                num_scale = &num_scale / &c;
            }
            factors.push((prim, *k));
        }
        Expr::make(num.mul_scalar(&num_scale), den_mono, factors)
    }

    /// Deterministic order on expressions (normal-form comparison).
    pub fn cmp_normal(&self, other: &Expr) -> Ordering {
        self.num
            .cmp(&other.num)
            .then_with(|| self.den_mono.cmp(&other.den_mono))
            .then_with(|| self.den_factors.cmp(&other.den_factors))
    }
}

/// Derivative of a polynomial with respect to field `i`, chain rule on
/// abstract-function atoms, producing an expression because rewrite images
/// may be rational.
fn diff_poly(p: &Poly, i: FieldIx, rewrites: &RewriteTable) -> Expr {
    let mut out = Expr::zero();
    for (m, c) in p.terms() {
        for (a, e) in m.atoms() {
            let da = match a.diff_field(i) {
                atom::AtomDiff::Zero => continue,
                atom::AtomDiff::One => Expr::one(),
                atom::AtomDiff::Atom(b) => rewrites.image_of(&b),
            };
            let rest = m.div(&Monomial::atom(a.clone())).expect("exponent > 0");
            let coeff = c * BigRational::from_integer((*e).into());
            let term = Expr::from_poly(Poly::monomial(rest, coeff)).mul(&da);
            out = out.add(&term);
        }
    }
    out
}

impl std::ops::Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> Expr {
        Expr::field(0)
    }
    fn v() -> Expr {
        Expr::field(1)
    }
    fn no_rules() -> RewriteTable {
        RewriteTable::empty()
    }

    #[test]
    fn commutativity_cancels() {
        let e = u().mul(&v()).sub(&v().mul(&u()));
        assert!(e.is_zero());
    }

    #[test]
    fn inverse_round_trip() {
        let e = Expr::one().div(&u()).unwrap().mul(&u());
        assert!(e.is_one());
    }

    #[test]
    fn binomial_identity() {
        let a = Expr::param("a");
        let b = Expr::param("b");
        let lhs = a.add(&b).int_pow(2).unwrap();
        let rhs = a
            .int_pow(2)
            .unwrap()
            .add(&a.mul(&b).mul_int(2))
            .add(&b.int_pow(2).unwrap());
        assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn negative_powers_invert() {
        let e = u().add(&v()).int_pow(-2).unwrap();
        let back = e.mul(&u().add(&v()).int_pow(2).unwrap());
        assert!(back.is_one());
        assert_eq!(Expr::zero().int_pow(-1), Err(ExprError::ZeroDenominator));
    }

    #[test]
    fn division_by_zero_is_reported() {
        assert_eq!(u().div(&Expr::zero()), Err(ExprError::ZeroDenominator));
    }

    #[test]
    fn tracked_factor_cancels() {
        // (w*u - v) / (w*u - v) = 1 through a tracked non-monomial factor.
        let w = Expr::field(2);
        let f = w.mul(&u()).sub(&v());
        let e = f.div(&f).unwrap();
        assert!(e.is_one());
    }

    #[test]
    fn denominators_stay_factored() {
        let w = Expr::field(2);
        let f = w.mul(&u()).sub(&v());
        let e = Expr::one().div(&f).unwrap().div(&u()).unwrap();
        assert_eq!(e.den_factors().len(), 1);
        assert!(!e.den_monomial().is_one());
    }

    #[test]
    fn product_rule() {
        let f = Expr::func("F", &[1]);
        let fv = Expr::func_deriv("F", &[1], &[1]);
        let e = v().mul(&f);
        let d = e.diff(1, &no_rules());
        let expect = f.add(&v().mul(&fv));
        assert!(d.alg_eq(&expect));
    }

    #[test]
    fn quotient_rule() {
        let f = Expr::func("F", &[1]);
        let e = f.div(&u()).unwrap();
        let d = e.diff(0, &no_rules());
        let expect = f.neg().div(&u().int_pow(2).unwrap()).unwrap();
        assert!(d.alg_eq(&expect));
    }

    #[test]
    fn mixed_partials_commute_via_sorted_index() {
        let h = Expr::func("h", &[1, 2]);
        let a = h.diff(1, &no_rules()).diff(2, &no_rules());
        let b = h.diff(2, &no_rules()).diff(1, &no_rules());
        assert!(a.sub(&b).is_zero());
    }

    #[test]
    fn derivative_without_field_dependence_is_zero() {
        let e = Expr::param("c")
            .mul(&Expr::jet(1, 1))
            .add(&Expr::rational(3, 7));
        assert!(e.diff(0, &no_rules()).is_zero());
        assert!(e.diff(1, &no_rules()).is_zero());
    }

    #[test]
    fn coeff_of_jet_examples() {
        // (1/2) v_y -> coefficient 1/2 at (k=1, alpha=1)
        let e = Expr::jet(1, 1).mul(&Expr::rational(1, 2));
        assert!(e.coeff_of_jet(1, 1).unwrap().alg_eq(&Expr::rational(1, 2)));
        // -(v_x + v v_y)/u -> coefficient of v_x is -1/u
        let tail = Expr::jet(1, 0)
            .add(&v().mul(&Expr::jet(1, 1)))
            .neg()
            .div(&u())
            .unwrap();
        let c = tail.coeff_of_jet(1, 0).unwrap();
        assert!(c.alg_eq(&Expr::int(-1).div(&u()).unwrap()));
        // no jets -> 0
        assert!(u().mul(&v()).coeff_of_jet(0, 0).unwrap().is_zero());
    }

    #[test]
    fn nonlinear_tail_is_an_error() {
        let e = Expr::jet(0, 0).mul(&Expr::jet(1, 1));
        assert_eq!(e.coeff_of_jet(0, 0), Err(ExprError::TailNotLinear));
        let f = Expr::one().div(&Expr::jet(0, 0)).unwrap();
        assert_eq!(f.jet_degree(), Err(ExprError::TailNotLinear));
    }
}
