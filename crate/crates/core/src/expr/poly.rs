//! Sparse multivariate polynomials over ℚ in graded-lexicographic order.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::Rational;

/// Ordered list of variable names shared by the polynomials of one chart.
///
/// The order fixes the term order: earlier variables rank higher in the
/// lexicographic tie-break of the graded order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarList(Arc<[String]>);

impl VarList {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        VarList(names.into_iter().map(Into::into).collect::<Vec<_>>().into())
    }

    pub fn empty() -> Self {
        VarList(Arc::from(Vec::<String>::new()))
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    fn same(&self, other: &VarList) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }

    /// `self` followed by the names of `other` not already present.
    fn union(&self, other: &VarList) -> VarList {
        let mut names: Vec<String> = self.0.to_vec();
        for n in other.0.iter() {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
        VarList(names.into())
    }
}

/// Exponent vector, one entry per variable of the owning [`VarList`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial with exact rational coefficients. No stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    vars: VarList,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(vars: &VarList) -> Self {
        Polynomial {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &VarList, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    /// The polynomial `vars[idx]`.
    pub fn var(vars: &VarList, idx: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(Monomial(e.into_boxed_slice()), Rational::one());
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, summing duplicates.
    pub fn from_terms<I>(vars: &VarList, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            p.add_term(Monomial(e.into_boxed_slice()), c);
        }
        p
    }

    pub fn vars(&self) -> &VarList {
        &self.vars
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            Some(Rational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Whether variable `idx` occurs with a positive exponent.
    pub fn depends_on_index(&self, idx: usize) -> bool {
        self.terms.keys().any(|m| m.0[idx] > 0)
    }

    pub fn depends_on(&self, name: &str) -> bool {
        self.vars
            .index_of(name)
            .is_some_and(|i| self.depends_on_index(i))
    }

    /// Names of variables that actually occur.
    pub fn used_vars(&self) -> Vec<&str> {
        (0..self.vars.len())
            .filter(|&i| self.depends_on_index(i))
            .map(|i| self.vars.0[i].as_str())
            .collect()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Re-express over `target`, which must contain every used variable.
    pub fn remap(&self, target: &VarList) -> Option<Polynomial> {
        if self.vars.same(target) {
            return Some(self.clone());
        }
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, n) in self.vars.0.iter().enumerate() {
            match target.index_of(n) {
                Some(j) => map.push(Some(j)),
                None if !self.depends_on_index(i) => map.push(None),
                None => return None,
            }
        }
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &x) in m.0.iter().enumerate() {
                if let Some(j) = map[i] {
                    e[j] = x;
                }
            }
            out.terms.insert(Monomial(e.into_boxed_slice()), c.clone());
        }
        Some(out)
    }

    /// Renames variables in place of order; names not in `map` are kept.
    pub fn rename(&self, map: &dyn Fn(&str) -> String) -> Polynomial {
        Polynomial {
            vars: VarList::new(self.vars.0.iter().map(|n| map(n))),
            terms: self.terms.clone(),
        }
    }

    fn align<'a>(a: &'a Polynomial, b: &'a Polynomial) -> (Cow<'a, Polynomial>, Cow<'a, Polynomial>) {
        if a.vars.same(&b.vars) {
            return (Cow::Borrowed(a), Cow::Borrowed(b));
        }
        // constants adopt the other side's variables without remapping work
        if a.vars.is_empty() || (a.is_constant() && !b.vars.is_empty()) {
            return (Cow::Owned(a.remap_constant(&b.vars)), Cow::Borrowed(b));
        }
        if b.vars.is_empty() || b.is_constant() {
            return (Cow::Borrowed(a), Cow::Owned(b.remap_constant(&a.vars)));
        }
        let u = a.vars.union(&b.vars);
        (
            Cow::Owned(a.remap(&u).expect("union contains all variables")),
            Cow::Owned(b.remap(&u).expect("union contains all variables")),
        )
    }

    fn remap_constant(&self, target: &VarList) -> Polynomial {
        Polynomial::constant(target, self.constant_value().expect("constant"))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        if other.is_zero() && self.vars.len() >= other.vars.len() {
            return self.clone();
        }
        let (a, b) = Self::align(self, other);
        let mut out = a.into_owned();
        for (m, c) in &b.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let (a, b) = Self::align(self, other);
        let mut out = a.into_owned();
        for (m, c) in &b.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let (a, b) = Self::align(self, other);
        let mut out = Polynomial::zero(&a.vars);
        if a.is_zero() || b.is_zero() {
            return out;
        }
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::constant(&self.vars, Rational::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative with respect to variable `idx` of this polynomial's list.
    pub fn diff_index(&self, idx: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let k = m.0[idx];
            if k == 0 {
                continue;
            }
            let mut e = m.0.clone();
            e[idx] -= 1;
            out.add_term(Monomial(e), c * Rational::from_integer(k.into()));
        }
        out
    }

    /// Partial derivative by name; zero when the variable does not occur.
    pub fn diff(&self, name: &str) -> Polynomial {
        match self.vars.index_of(name) {
            Some(i) => self.diff_index(i),
            None => Polynomial::zero(&self.vars),
        }
    }

    /// Evaluates with `values[i]` assigned to the i-th variable.
    pub fn eval(&self, values: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    t *= num_traits::pow(values[i].clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    ///
    /// With a single divisor the division algorithm leaves remainder zero
    /// exactly when the division is exact, so the first leading term that
    /// `lt(d)` fails to divide proves non-divisibility.
    pub fn exact_div(&self, d: &Polynomial) -> Option<Polynomial> {
        assert!(!d.is_zero(), "exact_div by zero polynomial");
        let (a, b) = Self::align(self, d);
        let (lm, lc) = b.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = a.into_owned();
        let mut quo = Polynomial::zero(&rem.vars);
        let bound = lm.degree();
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            if rm.degree() < bound || !lm.divides(&rm) {
                return None;
            }
            let qm = rm.div(&lm);
            let qc = rc / &lc;
            for (m, c) in &b.terms {
                rem.add_term(m.mul(&qm), -(c * &qc));
            }
            quo.add_term(qm, qc);
        }
        Some(quo)
    }

    /// Largest monomial dividing every term, as an exponent vector.
    pub fn monomial_content(&self) -> Vec<u32> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.vars.len()];
        };
        let mut g = first.0.to_vec();
        for m in it {
            for (x, &y) in g.iter_mut().zip(m.0.iter()) {
                *x = (*x).min(y);
            }
        }
        g
    }

    pub fn divide_monomial(&self, e: &[u32]) -> Polynomial {
        let d = Monomial(e.to_vec().into_boxed_slice());
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.div(&d), c.clone())).collect(),
        }
    }

    /// Equality up to variable-list differences.
    pub fn same_as(&self, other: &Polynomial) -> bool {
        if self.vars.same(&other.vars) {
            return self.terms == other.terms;
        }
        let (a, b) = Self::align(self, other);
        a.terms == b.terms
    }
}

pub(crate) fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars.0[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars.0[i], e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> VarList {
        VarList::new(["x", "y"])
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn grlex_order_and_printing() {
        let v = xy();
        let x = Polynomial::var(&v, 0);
        let y = Polynomial::var(&v, 1);
        let p = x.mul(&y).add(&y.pow(2)).add(&x.pow(2)).sub(&Polynomial::constant(&v, r(3)));
        assert_eq!(p.to_string(), "x^2 + x*y + y^2 - 3");
    }

    #[test]
    fn exact_division() {
        let v = xy();
        let x = Polynomial::var(&v, 0);
        let one = Polynomial::constant(&v, r(1));
        let p = x.pow(2).sub(&one);
        let q = p.exact_div(&x.sub(&one)).unwrap();
        assert!(q.same_as(&x.add(&one)));
        assert!(p.exact_div(&x).is_none());
    }

    #[test]
    fn align_across_lists() {
        let a = Polynomial::var(&VarList::new(["x"]), 0);
        let b = Polynomial::var(&VarList::new(["y"]), 0);
        let s = a.add(&b);
        assert_eq!(s.vars().names(), &["x".to_string(), "y".to_string()]);
        let t = b.add(&a);
        assert!(s.same_as(&t));
    }

    #[test]
    fn derivative_of_absent_variable_is_zero() {
        let p = Polynomial::var(&xy(), 0).pow(2);
        assert!(p.diff("y").is_zero());
        assert!(p.diff("v").is_zero());
    }
}
