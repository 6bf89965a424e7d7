//! Decision procedures for the symmetry hierarchy
//! flat ⇒ locally symmetric ⇒ 2nd symmetric ⇒ … and for the structure of
//! Brinkmann metrics (parallel null vector, leaf geometry, curvature pattern).
//!
//! Every verdict is an exact zero test on rational-function components.

mod ccnv;
mod leaf;
mod pattern;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::RationalExpr;
use crate::tensor::{covariant_derivative, riemann, Index, MetricField, TensorError, TensorField};

pub use ccnv::{check_ccnv, coordinate_vector, find_constant_parallel_fields, CcnvResult, ParallelSearch};
pub use leaf::{detect_brinkmann, leaf_local_symmetry, BrinkmannChart, LeafGeometry, LeafReport};
pub use pattern::{curvature_pattern_report, PatternEntry, PatternReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChecksError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("not in Brinkmann form: {0}")]
    NotBrinkmann(String),
    #[error("derivative order must be at least 1")]
    InvalidOrder,
    #[error("vector has {found} components, chart has {expected}")]
    VectorLength { expected: usize, found: usize },
}

/// A nonzero component certifying that a vanishing test failed.
#[derive(Clone, Debug)]
pub struct Witness {
    pub index: Index,
    /// Coordinate names, derivative indices before `;`.
    pub label: String,
    pub value: RationalExpr,
}

/// `∇^k R` as a valence-(1, 3 + k) tensor, component order `(a; ρ_1 … ρ_k, b, c, d)`.
pub fn nabla_k_riemann(m: &MetricField, k: usize) -> Result<TensorField, TensorError> {
    let mut t = riemann(m).clone();
    for _ in 0..k {
        if t.is_zero() {
            return Ok(TensorField::zero(m.chart(), 1, t.valence().1 + 1));
        }
        t = covariant_derivative(&t, m)?;
    }
    Ok(t)
}

/// Reports the first nonzero component of `∇^k R` with its first index
/// lowered, labelled `(ρ_1,…,ρ_k; a,b,c,d)` for `∇_{ρ_1…ρ_k} R_{abcd}`.
fn lowered_witness(m: &MetricField, t: &TensorField, k: usize) -> Option<Witness> {
    let (first, _) = t.nonzero().next()?;
    let rest = &first[1..];
    let names = m.chart().coords();
    for a in 0..m.dim() {
        let mut acc = RationalExpr::zero(m.chart().vars());
        for b in 0..m.dim() {
            let g = m.component(a, b);
            if g.is_zero() {
                continue;
            }
            let mut idx = vec![b];
            idx.extend_from_slice(rest);
            if let Some(v) = t.get_ref(&idx) {
                acc = acc.add_expr(&g.mul_expr(v));
            }
        }
        if !acc.is_zero() {
            let derivs: Vec<&str> = rest[..k].iter().map(|&i| names[i].as_str()).collect();
            let mut slots = vec![names[a].as_str()];
            slots.extend(rest[k..].iter().map(|&i| names[i].as_str()));
            let mut index = rest[..k].to_vec();
            index.push(a);
            index.extend_from_slice(&rest[k..]);
            return Some(Witness {
                index,
                label: if k == 0 {
                    slots.join(",")
                } else {
                    format!("{}; {}", derivs.join(","), slots.join(","))
                },
                value: acc,
            });
        }
    }
    None
}

fn raw_witness(t: &TensorField) -> Option<Witness> {
    t.nonzero().next().map(|(i, v)| Witness {
        index: i.clone(),
        label: t.index_label(i),
        value: v.clone(),
    })
}

#[derive(Clone, Debug)]
pub struct KthSymmetry {
    pub k: usize,
    pub vanishes: bool,
    pub witness: Option<Witness>,
}

/// Decides `∇^k R = 0` exactly.
pub fn check_kth_symmetry(m: &MetricField, k: usize) -> Result<KthSymmetry, ChecksError> {
    if k == 0 {
        return Err(ChecksError::InvalidOrder);
    }
    let t = nabla_k_riemann(m, k)?;
    Ok(KthSymmetry {
        k,
        vanishes: t.is_zero(),
        witness: lowered_witness(m, &t, k),
    })
}

/// Outcome of the symmetry decision procedure.
#[derive(Clone, Debug)]
pub struct SymmetryVerdict {
    pub flat: bool,
    pub locally_symmetric: bool,
    pub semi_symmetric: bool,
    /// Smallest `k ≤ cap` with `∇^k R = 0`; `None` when the cap is exceeded.
    pub order: Option<usize>,
    pub cap: usize,
    /// `order = k ≥ 1` with `∇^{k−1} R ≠ 0`.
    pub proper: bool,
    /// Keyed by the failed test: `R`, `nabla^1 R`, …, `semi_symmetry`.
    pub witnesses: BTreeMap<String, Witness>,
}

fn level_name(k: usize) -> String {
    if k == 0 {
        "R".to_string()
    } else {
        format!("nabla^{k} R")
    }
}

/// Computes `R, ∇R, …` until one vanishes or `cap` derivatives have been taken.
pub fn find_symmetry_order(m: &MetricField, cap: usize) -> Result<SymmetryVerdict, ChecksError> {
    if cap == 0 {
        return Err(ChecksError::InvalidOrder);
    }
    let mut witnesses = BTreeMap::new();
    let mut t = riemann(m).clone();
    let mut order = None;
    let mut second = None;
    for k in 0..=cap {
        if k > 0 {
            t = covariant_derivative(&t, m)?;
        }
        if k == 2 {
            second = Some(t.clone());
        }
        if t.is_zero() {
            order = Some(k);
            break;
        }
        if let Some(w) = lowered_witness(m, &t, k) {
            witnesses.insert(level_name(k), w);
        }
    }
    let vanished_by = |j: usize| order.is_some_and(|k| k <= j);
    let semi = match second {
        _ if vanished_by(2) => SemiSymmetry { holds: true, witness: None },
        Some(t2) => semi_symmetry_of(&t2)?,
        None => check_semi_symmetry(m)?,
    };
    if let Some(w) = semi.witness.clone() {
        witnesses.insert("semi_symmetry".into(), w);
    }
    Ok(SymmetryVerdict {
        flat: vanished_by(0),
        locally_symmetric: vanished_by(1),
        semi_symmetric: semi.holds,
        order,
        cap,
        proper: order.is_some_and(|k| k >= 1),
        witnesses,
    })
}

#[derive(Clone, Debug)]
pub struct SemiSymmetry {
    pub holds: bool,
    pub witness: Option<Witness>,
}

/// `∇_ρ∇_σ R − ∇_σ∇_ρ R = 0` on the two derivative slots of `∇∇R`.
pub fn check_semi_symmetry(m: &MetricField) -> Result<SemiSymmetry, ChecksError> {
    semi_symmetry_of(&nabla_k_riemann(m, 2)?)
}

fn semi_symmetry_of(second: &TensorField) -> Result<SemiSymmetry, ChecksError> {
    let anti = second.sub(&second.swap_lower(0, 1)?)?;
    Ok(SemiSymmetry {
        holds: anti.is_zero(),
        witness: raw_witness(&anti),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, rat};
    use crate::spaces::{make_brinkmann, BrinkmannData};

    fn wave(h: &str) -> MetricField {
        let mut d = BrinkmannData::flat(vec!["x".into()], vec![]);
        d.h = parse_expr(h, &d.vars()).unwrap();
        make_brinkmann(&d).unwrap()
    }

    #[test]
    fn order_zero_cap_is_rejected() {
        assert!(matches!(find_symmetry_order(&wave("x^2"), 0), Err(ChecksError::InvalidOrder)));
        assert!(matches!(check_kth_symmetry(&wave("x^2"), 0), Err(ChecksError::InvalidOrder)));
    }

    #[test]
    fn witness_is_lowered_and_labelled() {
        // H = u x², so R_{xuxu} = 2u and ∇_u R_{uxux} = 2
        let r = check_kth_symmetry(&wave("u*x^2"), 1).unwrap();
        assert!(!r.vanishes);
        let w = r.witness.unwrap();
        assert_eq!(w.label, "u; u,x,u,x");
        assert_eq!(w.value.constant_value(), Some(rat(2, 1)));
    }

    #[test]
    fn flat_wave_has_order_zero() {
        let v = find_symmetry_order(&wave("0"), 3).unwrap();
        assert!(v.flat && v.locally_symmetric && v.semi_symmetric);
        assert_eq!(v.order, Some(0));
        assert!(!v.proper);
    }
}
