use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::expr::{Monomial, Rational, RationalExpr};
use crate::tensor::{christoffel, covariant_derivative, MetricField, TensorField};

use super::{detect_brinkmann, raw_witness, ChecksError, Witness};

/// `∂_i` as a list of components.
pub fn coordinate_vector(m: &MetricField, i: usize) -> Vec<RationalExpr> {
    let vars = m.chart().vars();
    (0..m.dim())
        .map(|a| if a == i { RationalExpr::one(vars) } else { RationalExpr::zero(vars) })
        .collect()
}

#[derive(Clone, Debug)]
pub struct CcnvResult {
    pub covariantly_constant: bool,
    pub null: bool,
    pub nonzero: bool,
    pub holds: bool,
    pub witness: Option<Witness>,
    /// `g(X, X)` as computed.
    pub norm: RationalExpr,
}

/// Checks `∇X = 0`, `g(X, X) = 0` and `X ≠ 0`. Without an explicit field,
/// `∂_v` of the detected Brinkmann chart is used.
pub fn check_ccnv(m: &MetricField, x: Option<&[RationalExpr]>) -> Result<CcnvResult, ChecksError> {
    let owned;
    let x = match x {
        Some(x) => x,
        None => {
            let bc = detect_brinkmann(m).ok_or_else(|| {
                ChecksError::NotBrinkmann("no default null vector; pass one explicitly".into())
            })?;
            owned = coordinate_vector(m, bc.v);
            &owned
        }
    };
    if x.len() != m.dim() {
        return Err(ChecksError::VectorLength {
            expected: m.dim(),
            found: x.len(),
        });
    }
    let vars = m.chart().vars();
    let mut field = TensorField::zero(m.chart(), 1, 0);
    for (a, c) in x.iter().enumerate() {
        let c = c
            .remap(vars)
            .ok_or_else(|| crate::tensor::TensorError::UnknownVariable(c.used_vars().join(",")))?;
        field.set(vec![a], c);
    }
    let dx = covariant_derivative(&field, m)?;
    let mut norm = RationalExpr::zero(vars);
    for (i, xi) in field.nonzero() {
        for (j, xj) in field.nonzero() {
            let g = m.component(i[0], j[0]);
            if !g.is_zero() {
                norm = norm.add_expr(&g.mul_expr(xi).mul_expr(xj));
            }
        }
    }
    let covariantly_constant = dx.is_zero();
    let null = norm.is_zero();
    let nonzero = !field.is_zero();
    Ok(CcnvResult {
        covariantly_constant,
        null,
        nonzero,
        holds: covariantly_constant && null && nonzero,
        witness: raw_witness(&dx),
        norm,
    })
}

/// Parallel vector fields with constant components in the given chart.
#[derive(Clone, Debug)]
pub struct ParallelSearch {
    /// Basis of the solution space of `Γ^a_{σe} c^e = 0`.
    pub basis: Vec<Vec<Rational>>,
    /// Basis vectors that are null.
    pub null_vectors: Vec<Vec<Rational>>,
}

/// Solves `Γ^a_{σe} c^e ≡ 0` for constant `c` by collecting monomial
/// coefficients over a common denominator.
pub fn find_constant_parallel_fields(m: &MetricField) -> ParallelSearch {
    let n = m.dim();
    let gamma = christoffel(m);
    let mut groups: BTreeMap<(usize, usize), Vec<(usize, &RationalExpr)>> = BTreeMap::new();
    for (idx, v) in gamma.nonzero() {
        groups.entry((idx[0], idx[1])).or_default().push((idx[2], v));
    }
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for entries in groups.values() {
        let vars = m.chart().vars();
        let mut common = RationalExpr::one(vars);
        for (_, v) in entries {
            common = common.mul_expr(&RationalExpr::from_poly(v.denominator()));
        }
        let mut eqs: BTreeMap<Monomial, Vec<Rational>> = BTreeMap::new();
        for &(e, v) in entries {
            let cleared = v.mul_expr(&common);
            debug_assert!(cleared.denominator_factors().is_empty());
            for (mono, c) in cleared.numerator().terms() {
                eqs.entry(mono.clone()).or_insert_with(|| vec![Rational::zero(); n])[e] += c;
            }
        }
        rows.extend(eqs.into_values());
    }
    let basis = nullspace(rows, n);
    let null_vectors = basis
        .iter()
        .filter(|c| {
            let mut acc = RationalExpr::zero(m.chart().vars());
            for i in 0..n {
                for j in 0..n {
                    let w = &c[i] * &c[j];
                    if !w.is_zero() {
                        acc = acc.add_expr(&m.component(i, j).scale(&w));
                    }
                }
            }
            acc.is_zero()
        })
        .cloned()
        .collect();
    ParallelSearch { basis, null_vectors }
}

/// Reduced row echelon form, then one basis vector per free column.
fn nullspace(mut rows: Vec<Vec<Rational>>, n: usize) -> Vec<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][col];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..n {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= d;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); n];
            v[free] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -rows[i][free].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    #[test]
    fn nullspace_of_rank_one() {
        let rows = vec![vec![rat(1, 1), rat(2, 1), rat(0, 1)]];
        let ns = nullspace(rows, 3);
        assert_eq!(ns, vec![vec![rat(-2, 1), rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(0, 1), rat(1, 1)]]);
    }
}
