//! Sparse multivariate polynomials over exact rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::atom::Atom;

/// A power product of atoms with positive integer exponents, kept sorted by
/// the canonical atom order. The empty monomial is 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(pub(crate) Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Monomial {
        Monomial(vec![(a, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        self.0
            .iter()
            .find(|(b, _)| b == a)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &(Atom, u32)> {
        self.0.iter()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|(_, e)| *e as u64).sum()
    }

    pub fn degree_where(&self, pred: impl Fn(&Atom) -> bool) -> u64 {
        self.0
            .iter()
            .filter(|(a, _)| pred(a))
            .map(|(_, e)| *e as u64)
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Componentwise minimum (gcd of power products).
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1.min(other.0[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    /// Componentwise maximum (lcm of power products).
    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1.max(other.0[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Exact quotient; `None` if some exponent of `other` exceeds ours.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (a, e) in &self.0 {
            let mut e = *e;
            while j < other.0.len() && other.0[j].0 < *a {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *a {
                if other.0[j].1 > e {
                    return None;
                }
                e -= other.0[j].1;
                j += 1;
            }
            if e > 0 {
                out.push((a.clone(), e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn pow(&self, k: u32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|(a, e)| (a.clone(), e * k)).collect())
    }
}

/// Lexicographic order: compare exponents of the smallest atom first.
/// This is a monomial order (compatible with multiplication, 1 minimal),
/// which exact division relies on.
impl Ord for Monomial {
    fn cmp(&self, other: &Monomial) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((a, e)), Some((b, f))) => match a.cmp(b) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if e != f {
                            return e.cmp(f);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Monomial) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial: monomial -> nonzero rational coefficient.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Poly(pub(crate) BTreeMap<Monomial, BigRational>);

impl Poly {
    pub fn zero() -> Poly {
        Poly(BTreeMap::new())
    }

    pub fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Poly {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Monomial::one(), c);
        }
        Poly(m)
    }

    pub fn from_int(n: i64) -> Poly {
        Poly::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn atom(a: Atom) -> Poly {
        let mut m = BTreeMap::new();
        m.insert(Monomial::atom(a), BigRational::one());
        Poly(m)
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Poly {
        let mut map = BTreeMap::new();
        if !c.is_zero() {
            map.insert(m, c);
        }
        Poly(map)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1
            && self
                .0
                .get(&Monomial::one())
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1 && self.0.keys().all(|m| m.is_one())
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.0.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.0.len()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.0.iter().next_back()
    }

    fn insert_add(map: &mut BTreeMap<Monomial, BigRational>, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match map.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.0.clone();
        for (m, c) in &other.0 {
            Poly::insert_add(&mut out, m.clone(), c.clone());
        }
        Poly(out)
    }

    pub fn neg(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = BTreeMap::new();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                Poly::insert_add(&mut out, m1.mul(m2), c1 * c2);
            }
        }
        Poly(out)
    }

    pub fn mul_scalar(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, k)| (m.clone(), k * c)).collect())
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly(self.0.iter().map(|(k, c)| (k.mul(m), c.clone())).collect())
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// gcd of all power products appearing in the polynomial.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.0.keys();
        let first = match it.next() {
            Some(m) => m.clone(),
            None => return Monomial::one(),
        };
        it.fold(first, |acc, m| acc.gcd(m))
    }

    /// Divide every monomial by `m` (must divide exactly).
    pub fn div_monomial(&self, m: &Monomial) -> Poly {
        Poly(
            self.0
                .iter()
                .map(|(k, c)| (k.div(m).expect("monomial division"), c.clone()))
                .collect(),
        )
    }

    /// Positive rational `c` such that `self / c` has integer coefficients
    /// with gcd 1. Zero polynomial yields 1.
    pub fn rational_content(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.0.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        BigRational::new(num_gcd, den_lcm)
    }

    /// Write `self = c * p` with `p` primitive (integer coefficients, content
    /// one, positive leading coefficient). Returns `(c, p)`; zero maps to
    /// `(1, 0)`.
    pub fn primitive_part(&self) -> (BigRational, Poly) {
        if self.is_zero() {
            return (BigRational::one(), Poly::zero());
        }
        let mut c = self.rational_content();
        let mut p = self.mul_scalar(&c.recip());
        if p.leading().map(|(_, lc)| lc.is_negative()).unwrap_or(false) {
            c = -c;
            p = p.neg();
        }
        (c, p)
    }

    /// Exact polynomial division: `Some(q)` with `self = q * d`, else `None`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let (dm, dc) = d.leading().expect("nonzero divisor");
        let mut rem = self.clone();
        let mut q = BTreeMap::new();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(dm)?;
            let qc = rc / dc;
            Poly::insert_add(&mut q, qm.clone(), qc.clone());
            let piece = d.mul(&Poly::monomial(qm, qc));
            rem = rem.sub(&piece);
        }
        Some(Poly(q))
    }

    /// Largest exponent of `a` over all monomials.
    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.0.keys().map(|m| m.exponent(a)).max().unwrap_or(0)
    }

    /// Largest total degree in atoms selected by `pred`.
    pub fn max_degree_where(&self, pred: impl Fn(&Atom) -> bool + Copy) -> u64 {
        self.0
            .keys()
            .map(|m| m.degree_where(pred))
            .max()
            .unwrap_or(0)
    }

    pub fn contains_atom_where(&self, pred: impl Fn(&Atom) -> bool + Copy) -> bool {
        self.0.keys().any(|m| m.atoms().any(|(a, _)| pred(a)))
    }

    pub fn for_each_atom(&self, mut f: impl FnMut(&Atom)) {
        for m in self.0.keys() {
            for (a, _) in m.atoms() {
                f(a);
            }
        }
    }

    /// Syntactic partial derivative with respect to a single atom, all atoms
    /// treated as independent coordinates.
    pub fn diff_atom(&self, a: &Atom) -> Poly {
        let mut out = BTreeMap::new();
        for (m, c) in &self.0 {
            let e = m.exponent(a);
            if e == 0 {
                continue;
            }
            let reduced = m.div(&Monomial::atom(a.clone())).expect("exponent > 0");
            Poly::insert_add(&mut out, reduced, c * BigRational::from_integer(e.into()));
        }
        Poly(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> Poly {
        Poly::atom(Atom::field(0))
    }
    fn v() -> Poly {
        Poly::atom(Atom::field(1))
    }

    #[test]
    fn monomial_order_is_multiplicative() {
        let mu = Monomial::atom(Atom::field(0));
        let mv = Monomial::atom(Atom::field(1));
        assert!(mu > mv);
        assert!(mu.mul(&mv) > mv.mul(&mv));
        assert!(Monomial::one() < mv);
    }

    #[test]
    fn arithmetic_basics() {
        let p = u().add(&v());
        let q = u().sub(&v());
        let prod = p.mul(&q);
        let expect = u().mul(&u()).sub(&v().mul(&v()));
        assert_eq!(prod, expect);
    }

    #[test]
    fn exact_division_round_trip() {
        let p = u().add(&v());
        let q = u().mul(&u()).add(&v().mul(&Poly::from_int(3)));
        let prod = p.mul(&q);
        assert_eq!(prod.exact_div(&p).unwrap(), q);
        assert!(q.exact_div(&p).is_none());
    }

    #[test]
    fn primitive_part_normalizes_sign_and_content() {
        let p = u().mul_scalar(&BigRational::new((-2).into(), 3.into()));
        let (c, prim) = p.primitive_part();
        assert_eq!(prim, u());
        assert_eq!(c, BigRational::new((-2).into(), 3.into()));
    }

    #[test]
    fn diff_atom_power_rule() {
        let p = u().mul(&u()).mul(&v());
        let d = p.diff_atom(&Atom::field(0));
        assert_eq!(
            d,
            u().mul(&v())
                .mul_scalar(&BigRational::from_integer(2.into()))
        );
    }
}
