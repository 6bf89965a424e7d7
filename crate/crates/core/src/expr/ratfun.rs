//! Rational functions `num / den` with exact zero testing.
//!
//! The denominator is kept as a product of monic, non-constant polynomial
//! factors with positive exponents. Multiplying, adding and differentiating
//! then only need trial division by known factors to cancel common parts,
//! which replaces a general multivariate gcd. The zero test never depends on
//! that cancellation: an expression is zero iff its numerator has no terms.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::{Polynomial, VarList};
use super::{ExprError, Rational};

#[derive(Clone, Debug)]
pub struct RationalExpr {
    num: Polynomial,
    den: Vec<(Polynomial, u32)>,
}

impl RationalExpr {
    pub fn zero(vars: &VarList) -> Self {
        RationalExpr {
            num: Polynomial::zero(vars),
            den: Vec::new(),
        }
    }

    pub fn one(vars: &VarList) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &VarList, c: Rational) -> Self {
        RationalExpr {
            num: Polynomial::constant(vars, c),
            den: Vec::new(),
        }
    }

    pub fn integer(vars: &VarList, n: i64) -> Self {
        Self::constant(vars, Rational::from_integer(n.into()))
    }

    /// The variable `name`, which must be in `vars`.
    pub fn var(vars: &VarList, name: &str) -> Result<Self, ExprError> {
        let idx = vars
            .index_of(name)
            .ok_or_else(|| ExprError::UnknownVariable(name.to_string()))?;
        Ok(Self::from_poly(Polynomial::var(vars, idx)))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalExpr {
            num: p,
            den: Vec::new(),
        }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    /// Denominator factors `(f, e)`, each `f` monic and non-constant.
    pub fn denominator_factors(&self) -> &[(Polynomial, u32)] {
        &self.den
    }

    /// Expanded denominator (monic, so its leading coefficient is 1).
    pub fn denominator(&self) -> Polynomial {
        let mut acc = Polynomial::constant(self.num.vars(), Rational::one());
        for (f, e) in &self.den {
            acc = acc.mul(&f.pow(*e));
        }
        acc
    }

    pub fn vars(&self) -> &VarList {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_empty() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.is_empty() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn depends_on(&self, name: &str) -> bool {
        self.num.depends_on(name) || self.den.iter().any(|(f, _)| f.depends_on(name))
    }

    /// Names of every variable occurring in numerator or denominator, in first-seen order.
    pub fn used_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in std::iter::once(&self.num).chain(self.den.iter().map(|(f, _)| f)) {
            for v in p.used_vars() {
                if !out.iter().any(|o| o == v) {
                    out.push(v.to_string());
                }
            }
        }
        out
    }

    /// Cancels denominator factors dividing the numerator.
    fn reduced(mut num: Polynomial, mut den: Vec<(Polynomial, u32)>) -> Self {
        if num.is_zero() {
            return RationalExpr { num, den: Vec::new() };
        }
        for (f, e) in den.iter_mut() {
            while *e > 0 {
                match num.exact_div(f) {
                    Some(q) => {
                        num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        den.retain(|(_, e)| *e > 0);
        RationalExpr { num, den }
    }

    pub fn add_expr(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if same_factors(&self.den, &other.den) {
            return Self::reduced(self.num.add(&other.num), self.den.clone());
        }
        let fb = FactorBase::of(&[&self.den, &other.den]);
        let lcm: Vec<u32> = (0..fb.base.len())
            .map(|j| fb.exps[0][j].max(fb.exps[1][j]))
            .collect();
        let cofactor = |side: usize| {
            let mut acc = Polynomial::constant(self.num.vars(), Rational::one());
            for (j, f) in fb.base.iter().enumerate() {
                let k = lcm[j] - fb.exps[side][j];
                if k > 0 {
                    acc = acc.mul(&f.pow(k));
                }
            }
            acc
        };
        let num = self.num.mul(&cofactor(0)).add(&other.num.mul(&cofactor(1)));
        Self::reduced(num, fb.with_exponents(lcm))
    }

    pub fn neg_expr(&self) -> Self {
        RationalExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub_expr(&self, other: &Self) -> Self {
        self.add_expr(&other.neg_expr())
    }

    pub fn mul_expr(&self, other: &Self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        if other.is_zero() {
            return other.clone();
        }
        let (na, db) = cancel_against(&self.num, &other.den);
        let (nb, da) = cancel_against(&other.num, &self.den);
        let fb = FactorBase::of(&[&da, &db]);
        let sum = (0..fb.base.len()).map(|j| fb.exps[0][j] + fb.exps[1][j]).collect();
        let den = fb.with_exponents(sum);
        RationalExpr {
            num: na.mul(&nb),
            den,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars());
        }
        RationalExpr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Multiplicative inverse; errors with "zero denominator" on zero.
    pub fn recip(&self) -> Result<Self, ExprError> {
        if self.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        let mut num = Polynomial::constant(self.num.vars(), Rational::one());
        for (f, e) in &self.den {
            num = num.mul(&f.pow(*e));
        }
        let (content, factors) = split_factors(&self.num);
        let fb = FactorBase::of(&[&factors]);
        let exps = fb.exps[0].clone();
        let den = fb.with_exponents(exps);
        Ok(RationalExpr {
            num: num.scale(&content.recip()),
            den,
        })
    }

    pub fn div_expr(&self, other: &Self) -> Result<Self, ExprError> {
        Ok(self.mul_expr(&other.recip()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        RationalExpr {
            num: self.num.pow(e),
            den: self.den.iter().map(|(f, k)| (f.clone(), k * e)).collect(),
        }
    }

    /// Partial derivative with respect to a variable of this expression's list.
    pub fn derive(&self, name: &str) -> Result<Self, ExprError> {
        let known = self.vars().index_of(name).is_some()
            || self.den.iter().any(|(f, _)| f.vars().index_of(name).is_some());
        if !known {
            return Err(ExprError::UnknownVariable(name.to_string()));
        }
        Ok(self.diff(name))
    }

    /// Partial derivative; zero when `name` does not occur.
    pub fn diff(&self, name: &str) -> Self {
        let dn = self.num.diff(name);
        let dfs: Vec<Polynomial> = self.den.iter().map(|(f, _)| f.diff(name)).collect();
        if dfs.iter().all(Polynomial::is_zero) {
            return Self::reduced(dn, self.den.clone());
        }
        // d(N / Π f^e) = (N' P − N Σ e f' P/f) / (Π f^e · P), P = Π over factors with f' ≠ 0
        let vars = self.num.vars();
        let one = Polynomial::constant(vars, Rational::one());
        let active: Vec<usize> = (0..self.den.len()).filter(|&k| !dfs[k].is_zero()).collect();
        let p_all = active.iter().fold(one.clone(), |acc, &k| acc.mul(&self.den[k].0));
        let mut sum = Polynomial::zero(vars);
        for &k in &active {
            let others = active
                .iter()
                .filter(|&&j| j != k)
                .fold(one.clone(), |acc, &j| acc.mul(&self.den[j].0));
            let e = Rational::from_integer(self.den[k].1.into());
            sum = sum.add(&dfs[k].mul(&others).scale(&e));
        }
        let num = dn.mul(&p_all).sub(&self.num.mul(&sum));
        let mut den = self.den.clone();
        for &k in &active {
            den[k].1 += 1;
        }
        Self::reduced(num, den)
    }

    /// Exact value at a point given by name.
    pub fn eval_point(&self, point: &BTreeMap<String, Rational>) -> Result<Rational, ExprError> {
        let d = self.eval_den_with(point)?;
        if d.is_zero() {
            return Err(ExprError::Pole);
        }
        Ok(eval_poly_named(&self.num, point)? / d)
    }

    fn eval_den_with(&self, point: &BTreeMap<String, Rational>) -> Result<Rational, ExprError> {
        let mut acc = Rational::one();
        for (f, e) in &self.den {
            acc *= num_traits::pow(eval_poly_named(f, point)?, *e as usize);
        }
        Ok(acc)
    }

    /// Re-express every polynomial over `target`.
    pub fn remap(&self, target: &VarList) -> Option<Self> {
        Some(RationalExpr {
            num: self.num.remap(target)?,
            den: self
                .den
                .iter()
                .map(|(f, e)| f.remap(target).map(|g| (g, *e)))
                .collect::<Option<_>>()?,
        })
    }

    pub fn rename(&self, map: &dyn Fn(&str) -> String) -> Self {
        RationalExpr {
            num: self.num.rename(map),
            den: self.den.iter().map(|(f, e)| (f.rename(map), *e)).collect(),
        }
    }

    /// Mathematical equality (cross-multiplied), independent of representation.
    pub fn equals(&self, other: &Self) -> bool {
        if same_factors(&self.den, &other.den) {
            return self.num.same_as(&other.num);
        }
        self.num
            .mul(&other.denominator())
            .same_as(&other.num.mul(&self.denominator()))
    }

    /// Renormalizes from the expanded numerator and denominator.
    pub fn normalized(&self) -> Self {
        let inv = Self::from_poly(self.denominator())
            .recip()
            .expect("denominator is nonzero");
        Self::from_poly(self.num.clone()).mul_expr(&inv)
    }
}

fn eval_poly_named(p: &Polynomial, point: &BTreeMap<String, Rational>) -> Result<Rational, ExprError> {
    let names = p.vars().names();
    let mut vals = Vec::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        match point.get(n) {
            Some(v) => vals.push(v.clone()),
            None if !p.depends_on_index(i) => vals.push(Rational::zero()),
            None => return Err(ExprError::Unassigned(n.clone())),
        }
    }
    Ok(p.eval(&vals))
}

fn same_factors(a: &[(Polynomial, u32)], b: &[(Polynomial, u32)]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|((f, e), (g, k))| e == k && f.same_as(g))
}

fn sort_factors(den: &mut [(Polynomial, u32)]) {
    if den.len() > 1 {
        den.sort_by_cached_key(|(f, _)| (f.degree(), f.num_terms(), f.to_string()));
    }
}

/// Divides `num` by factors of `den` where possible; returns both remainders.
fn cancel_against(num: &Polynomial, den: &[(Polynomial, u32)]) -> (Polynomial, Vec<(Polynomial, u32)>) {
    let mut num = num.clone();
    let mut out = Vec::with_capacity(den.len());
    for (f, e) in den {
        let mut e = *e;
        while e > 0 {
            match num.exact_div(f) {
                Some(q) => {
                    num = q;
                    e -= 1;
                }
                None => break,
            }
        }
        if e > 0 {
            out.push((f.clone(), e));
        }
    }
    (num, out)
}

/// Splits a nonzero polynomial into rational content and monic factors:
/// single-variable monomial factors first, then the monic remainder.
fn split_factors(p: &Polynomial) -> (Rational, Vec<(Polynomial, u32)>) {
    let vars = p.vars().clone();
    let mono = p.monomial_content();
    let mut out = Vec::new();
    for (i, &k) in mono.iter().enumerate() {
        if k > 0 {
            out.push((Polynomial::var(&vars, i), k));
        }
    }
    let rest = p.divide_monomial(&mono);
    let lc = rest.leading().map(|(_, c)| c.clone()).expect("nonzero");
    let monic = rest.scale(&lc.recip());
    if !monic.is_constant() {
        out.push((monic, 1));
    }
    (lc, out)
}

/// Several factor lists rewritten over one common set of monic factors.
///
/// A factor that divides another is split out of it, so that powers of the
/// same polynomial (expanded or not) end up on a single base element.
struct FactorBase {
    base: Vec<Polynomial>,
    // exps[list][base index]
    exps: Vec<Vec<u32>>,
}

impl FactorBase {
    fn of(lists: &[&[(Polynomial, u32)]]) -> Self {
        let mut fb = FactorBase {
            base: Vec::new(),
            exps: vec![Vec::new(); lists.len()],
        };
        for (i, list) in lists.iter().enumerate() {
            for (g, e) in list.iter() {
                fb.insert(i, g.clone(), *e);
            }
        }
        fb
    }

    /// Pairs the base with `exps`, dropping zero exponents, in canonical order.
    fn with_exponents(self, exps: Vec<u32>) -> Vec<(Polynomial, u32)> {
        let mut den: Vec<(Polynomial, u32)> = self
            .base
            .into_iter()
            .zip(exps)
            .filter(|(_, e)| *e > 0)
            .collect();
        sort_factors(&mut den);
        den
    }

    fn push(&mut self, f: Polynomial) -> usize {
        self.base.push(f);
        for row in self.exps.iter_mut() {
            row.push(0);
        }
        self.base.len() - 1
    }

    fn insert(&mut self, list: usize, mut g: Polynomial, e: u32) {
        if let Some(j) = self.base.iter().position(|f| f.same_as(&g)) {
            self.exps[list][j] += e;
            return;
        }
        for j in 0..self.base.len() {
            while let Some(q) = g.exact_div(&self.base[j]) {
                g = q;
                self.exps[list][j] += e;
                if g.is_constant() {
                    return;
                }
            }
        }
        // g may divide existing base elements f = g h: keep h in place of f
        let new = self.push(g.clone());
        for j in 0..new {
            if let Some(h) = self.base[j].exact_div(&g) {
                self.base[j] = h;
                for row in self.exps.iter_mut() {
                    row[new] += row[j];
                }
            }
        }
        self.exps[list][new] += e;
    }
}

impl PartialEq for RationalExpr {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() == 1 && self.num.is_constant() {
            write!(f, "{}", self.num)?;
        } else {
            write!(f, "({})", self.num)?;
        }
        let parts: Vec<String> = self
            .den
            .iter()
            .map(|(g, e)| {
                let base = if g.num_terms() == 1 && g.to_string().chars().all(|c| c.is_alphanumeric() || c == '_') {
                    g.to_string()
                } else {
                    format!("({g})")
                };
                if *e == 1 {
                    base
                } else {
                    format!("{base}^{e}")
                }
            })
            .collect();
        for part in parts {
            write!(f, "/{part}")?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&RationalExpr> for &RationalExpr {
            type Output = RationalExpr;
            fn $m(self, rhs: &RationalExpr) -> RationalExpr {
                $body(self, rhs)
            }
        }
        impl $tr<RationalExpr> for RationalExpr {
            type Output = RationalExpr;
            fn $m(self, rhs: RationalExpr) -> RationalExpr {
                $body(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, RationalExpr::add_expr);
forward_binop!(Sub, sub, RationalExpr::sub_expr);
forward_binop!(Mul, mul, RationalExpr::mul_expr);
forward_binop!(Div, div, |a: &RationalExpr, b: &RationalExpr| a
    .div_expr(b)
    .expect("zero denominator"));

impl Neg for &RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        self.neg_expr()
    }
}

impl Neg for RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        self.neg_expr()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn vars() -> VarList {
        VarList::new(["x", "y"])
    }

    fn p(s: &str) -> RationalExpr {
        parse_expr(s, &vars()).unwrap()
    }

    #[test]
    fn cancellation_on_division() {
        let q = p("x^2 - 1").div_expr(&p("x - 1")).unwrap();
        assert!(q.denominator_factors().is_empty());
        assert_eq!(q.to_string(), "x + 1");
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let z = p("x - x");
        assert!(matches!(p("x").div_expr(&z), Err(ExprError::ZeroDenominator)));
    }

    #[test]
    fn powers_of_a_factor_merge() {
        let s = p("1 + x^2 + y^2");
        let a = p("1").div_expr(&s).unwrap();
        let b = p("x").div_expr(&s.pow(2)).unwrap();
        let sum = a.add_expr(&b);
        assert_eq!(sum.denominator_factors().len(), 1);
        assert_eq!(sum.denominator_factors()[0].1, 2);
        // (s + x)/s^2 − 1/s − x/s^2 = 0
        assert!(sum.sub_expr(&a).sub_expr(&b).is_zero());
    }

    #[test]
    fn expanded_power_is_recognised_as_factor_power() {
        let s = p("1 + y^2");
        let inv = RationalExpr::from_poly(s.pow(2).numerator().clone())
            .recip()
            .unwrap();
        let y_over_s = p("y").div_expr(&s).unwrap();
        let prod = inv.mul_expr(&s);
        assert!(prod.equals(&p("1").div_expr(&s).unwrap()));
        assert!(!y_over_s.is_zero());
    }

    #[test]
    fn normalization_idempotent() {
        let e = p("(x^2 - 1)/(x - 1) + y/(1 + y^2)^2");
        let n1 = e.normalized();
        let n2 = n1.normalized();
        assert_eq!(n1.to_string(), n2.to_string());
        assert!(n1.equals(&e));
    }

    #[test]
    fn derive_requires_known_variable() {
        assert!(matches!(p("x^2").derive("q"), Err(ExprError::UnknownVariable(_))));
        assert!(p("x^2").derive("y").unwrap().is_zero());
    }

    #[test]
    fn pole_detection() {
        let e = parse_expr("4/(1 - y^2)^2", &VarList::new(["y"])).unwrap();
        let mut pt = BTreeMap::new();
        pt.insert("y".to_string(), Rational::one());
        assert!(matches!(e.eval_point(&pt), Err(ExprError::Pole)));
    }
}
