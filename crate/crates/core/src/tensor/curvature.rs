use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::expr::{rat, RationalExpr};

use super::field::accumulate;
use super::{Index, MetricField, TensorError, TensorField};

/// Levi-Civita connection coefficients `Γ^a_{bc}`, valence (1, 2).
pub fn christoffel(m: &MetricField) -> &TensorField {
    m.christoffel_cache().get_or_init(|| compute_christoffel(m))
}

fn compute_christoffel(m: &MetricField) -> TensorField {
    let chart = m.chart();
    let n = chart.dim();
    let coords = chart.coords();
    // dg[k][i*n + j] = ∂_k g_ij
    let dg: Vec<Vec<RationalExpr>> = (0..n)
        .map(|k| {
            (0..n * n)
                .map(|ij| m.component(ij / n, ij % n).diff(&coords[k]))
                .collect()
        })
        .collect();
    let half = rat(1, 2);
    let inv = m.inverse();
    let rows: Vec<Vec<(Index, RationalExpr)>> = (0..n)
        .into_par_iter()
        .map(|b| {
            let mut out = Vec::new();
            for c in b..n {
                // lowered Γ_{dbc} for each d
                let low: Vec<RationalExpr> = (0..n)
                    .map(|d| {
                        dg[b][d * n + c]
                            .add_expr(&dg[c][b * n + d])
                            .sub_expr(&dg[d][b * n + c])
                            .scale(&half)
                    })
                    .collect();
                if low.iter().all(RationalExpr::is_zero) {
                    continue;
                }
                for a in 0..n {
                    let mut acc = RationalExpr::zero(chart.vars());
                    for (d, l) in low.iter().enumerate() {
                        if l.is_zero() {
                            continue;
                        }
                        if let Some(h) = inv.get_ref(&[a, d]) {
                            acc = acc.add_expr(&h.mul_expr(l));
                        }
                    }
                    if !acc.is_zero() {
                        if b != c {
                            out.push((vec![a, c, b], acc.clone()));
                        }
                        out.push((vec![a, b, c], acc));
                    }
                }
            }
            out
        })
        .collect();
    let comps: BTreeMap<Index, RationalExpr> = rows.into_iter().flatten().collect();
    TensorField::from_map(chart, 1, 2, comps)
}

/// Riemann tensor `R^a_{bcd}`, valence (1, 3).
pub fn riemann(m: &MetricField) -> &TensorField {
    m.riemann_cache().get_or_init(|| compute_riemann(m))
}

fn compute_riemann(m: &MetricField) -> TensorField {
    let chart = m.chart();
    let n = chart.dim();
    let coords = chart.coords();
    let gamma = christoffel(m);
    let vars = chart.vars();
    let zero = RationalExpr::zero(vars);
    let g = |a: usize, b: usize, c: usize| gamma.get_ref(&[a, b, c]);
    let rows: Vec<Vec<(Index, RationalExpr)>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::new();
            for b in 0..n {
                for c in 0..n {
                    for d in (c + 1)..n {
                        let mut acc = g(a, d, b).map_or_else(|| zero.clone(), |x| x.diff(&coords[c]));
                        if let Some(x) = g(a, c, b) {
                            acc = acc.sub_expr(&x.diff(&coords[d]));
                        }
                        for e in 0..n {
                            if let (Some(x), Some(y)) = (g(a, c, e), g(e, d, b)) {
                                acc = acc.add_expr(&x.mul_expr(y));
                            }
                            if let (Some(x), Some(y)) = (g(a, d, e), g(e, c, b)) {
                                acc = acc.sub_expr(&x.mul_expr(y));
                            }
                        }
                        if !acc.is_zero() {
                            out.push((vec![a, b, d, c], acc.neg_expr()));
                            out.push((vec![a, b, c, d], acc));
                        }
                    }
                }
            }
            out
        })
        .collect();
    TensorField::from_map(chart, 1, 3, rows.into_iter().flatten().collect())
}

/// Fully covariant `R_{abcd} = g_{ae} R^e_{bcd}`.
pub fn riemann_lowered(m: &MetricField) -> Result<TensorField, TensorError> {
    riemann(m).lower_index(m, 0)
}

/// `R_{bd} = R^a_{bad}`.
pub fn ricci(m: &MetricField) -> Result<TensorField, TensorError> {
    riemann(m).contract(0, 1)
}

pub fn scalar_curvature(m: &MetricField) -> Result<RationalExpr, TensorError> {
    let ric = ricci(m)?;
    let inv = m.inverse();
    let mut acc = RationalExpr::zero(m.chart().vars());
    for (idx, r) in ric.nonzero() {
        if let Some(h) = inv.get_ref(idx) {
            acc = acc.add_expr(&h.mul_expr(r));
        }
    }
    Ok(acc)
}

/// Levi-Civita covariant derivative. The derivative index is inserted as the
/// first covariant slot: `(∇t)^{a..}_{σ b..} = ∇_σ t^{a..}_{b..}`.
pub fn covariant_derivative(t: &TensorField, m: &MetricField) -> Result<TensorField, TensorError> {
    if t.chart() != m.chart() {
        return Err(TensorError::ChartMismatch);
    }
    let chart = m.chart();
    let n = chart.dim();
    let (r, s) = t.valence();
    let gamma = christoffel(m);
    // up[σ][e]: (a, Γ^a_{σe}); down[σ][e]: (b, Γ^e_{σb})
    let mut up: Vec<Vec<Vec<(usize, &RationalExpr)>>> = vec![vec![Vec::new(); n]; n];
    let mut down: Vec<Vec<Vec<(usize, &RationalExpr)>>> = vec![vec![Vec::new(); n]; n];
    for (idx, v) in gamma.nonzero() {
        let (a, sg, e) = (idx[0], idx[1], idx[2]);
        up[sg][e].push((a, v));
        down[sg][a].push((e, v));
    }
    let coords = chart.coords();
    let parts: Vec<BTreeMap<Index, RationalExpr>> = (0..n)
        .into_par_iter()
        .map(|sg| {
            let key = |j: &[usize]| -> Index {
                let mut k = Vec::with_capacity(j.len() + 1);
                k.extend_from_slice(&j[..r]);
                k.push(sg);
                k.extend_from_slice(&j[r..]);
                k
            };
            let mut acc: BTreeMap<Index, RationalExpr> = BTreeMap::new();
            for (idx, v) in t.nonzero() {
                if v.depends_on(&coords[sg]) {
                    accumulate(&mut acc, key(idx), v.diff(&coords[sg]));
                }
                for p in 0..r {
                    for &(a, gm) in &up[sg][idx[p]] {
                        let mut j = idx.clone();
                        j[p] = a;
                        accumulate(&mut acc, key(&j), gm.mul_expr(v));
                    }
                }
                for q in r..r + s {
                    for &(b, gm) in &down[sg][idx[q]] {
                        let mut j = idx.clone();
                        j[q] = b;
                        accumulate(&mut acc, key(&j), gm.mul_expr(v).neg_expr());
                    }
                }
            }
            acc
        })
        .collect();
    let comps = parts.into_iter().flatten().collect();
    Ok(TensorField::from_map(chart, r, s + 1, comps))
}
