use super::poly::Polynomial;
use super::ratfun::RationalExpr;
use super::{rational_to_f64, ExprError};

#[derive(Clone, Debug)]
struct CompiledPoly {
    // (coefficient, [(slot, exponent)])
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    fn new(p: &Polynomial, order: &[String]) -> Result<Self, ExprError> {
        let names = p.vars().names();
        let mut slots = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            match order.iter().position(|o| o == n) {
                Some(j) => slots.push(Some(j)),
                None if !p.depends_on_index(i) => slots.push(None),
                None => return Err(ExprError::Unassigned(n.clone())),
            }
        }
        let terms = p
            .terms()
            .map(|(m, c)| {
                let powers = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| (slots[i].expect("used variable has a slot"), k as i32))
                    .collect();
                (rational_to_f64(c), powers)
            })
            .collect();
        Ok(CompiledPoly { terms })
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, ps)| ps.iter().fold(*c, |acc, &(i, k)| acc * x[i].powi(k)))
            .sum()
    }
}

/// A [`RationalExpr`] with coefficients converted once to binary64, for
/// repeated numeric evaluation at points given in a fixed coordinate order.
#[derive(Clone, Debug)]
pub struct CompiledExpr {
    num: CompiledPoly,
    den: Vec<(CompiledPoly, i32)>,
    zero: bool,
}

impl CompiledExpr {
    pub fn new(e: &RationalExpr, order: &[String]) -> Result<Self, ExprError> {
        Ok(CompiledExpr {
            num: CompiledPoly::new(e.numerator(), order)?,
            den: e
                .denominator_factors()
                .iter()
                .map(|(f, k)| Ok((CompiledPoly::new(f, order)?, *k as i32)))
                .collect::<Result<_, ExprError>>()?,
            zero: e.is_zero(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, ExprError> {
        if self.zero {
            return Ok(0.0);
        }
        let mut d = 1.0;
        for (f, k) in &self.den {
            let v = f.eval(x);
            if v == 0.0 || !v.is_finite() {
                return Err(ExprError::Pole);
            }
            d *= v.powi(*k);
        }
        Ok(self.num.eval(x) / d)
    }

    /// Values of the denominator factors at `x`.
    pub fn denominator_values(&self, x: &[f64]) -> Vec<f64> {
        self.den.iter().map(|(f, _)| f.eval(x)).collect()
    }
}
