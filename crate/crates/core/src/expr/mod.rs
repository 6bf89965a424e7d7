//! Exact arithmetic: rationals, sparse multivariate polynomials and rational
//! functions with sound zero testing and partial differentiation.

mod numeric;
mod parse;
mod poly;
mod ratfun;

use num_bigint::BigInt;
use thiserror::Error;

pub use numeric::CompiledExpr;
pub use parse::{parse_expr, parse_expr_free};
pub use poly::{Monomial, Polynomial, VarList};
pub use ratfun::RationalExpr;

/// Arbitrary-precision rational; always stored in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("pole at point")]
    Pole,
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("variable '{0}' has no value")]
    Unassigned(String),
    #[error("column {column}: {message}")]
    Parse { column: usize, message: String },
}

/// `n/d` as a [`Rational`]. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Round-to-nearest conversion to binary64.
pub fn rational_to_f64(r: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}
