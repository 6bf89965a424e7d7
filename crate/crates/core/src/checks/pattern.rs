use std::collections::BTreeMap;

use crate::expr::RationalExpr;
use crate::tensor::{covariant_derivative, riemann_lowered, Index, MetricField, TensorField};

use super::ChecksError;

#[derive(Clone, Debug)]
pub struct PatternEntry {
    pub index: Index,
    pub label: String,
    pub value: RationalExpr,
    /// Number of nonzero components represented by this entry.
    pub orbit_size: usize,
}

/// Nonzero components of `R_{abcd}` and `∇_σ R_{abcd}`. Each orbit under the
/// pair symmetries is listed once by its lexicographically smallest member,
/// unless the report is raw.
#[derive(Clone, Debug)]
pub struct PatternReport {
    pub raw: bool,
    pub riemann: Vec<PatternEntry>,
    pub nabla_riemann: Vec<PatternEntry>,
}

/// The eight images of `(a, b, c, d)` under antisymmetry in each pair and
/// pair exchange, with their signs.
fn orbit(q: [usize; 4]) -> [([usize; 4], bool); 8] {
    let [a, b, c, d] = q;
    [
        ([a, b, c, d], false),
        ([b, a, c, d], true),
        ([a, b, d, c], true),
        ([b, a, d, c], false),
        ([c, d, a, b], false),
        ([d, c, a, b], true),
        ([c, d, b, a], true),
        ([d, c, b, a], false),
    ]
}

fn entries(t: &TensorField, raw: bool) -> Vec<PatternEntry> {
    let label = |i: &[usize]| {
        let coords = t.chart().coords();
        let names: Vec<&str> = i.iter().map(|&k| coords[k].as_str()).collect();
        if i.len() == 5 {
            format!("{}; {}", names[0], names[1..].join(","))
        } else {
            names.join(",")
        }
    };
    if raw {
        return t
            .nonzero()
            .map(|(i, v)| PatternEntry {
                index: i.clone(),
                label: label(i),
                value: v.clone(),
                orbit_size: 1,
            })
            .collect();
    }
    let mut reps: BTreeMap<Index, (RationalExpr, usize)> = BTreeMap::new();
    for (i, v) in t.nonzero() {
        let split = i.len() - 4;
        let tail = [i[split], i[split + 1], i[split + 2], i[split + 3]];
        let (rep, flip) = orbit(tail).into_iter().min_by_key(|(q, _)| *q).unwrap();
        let mut key = i[..split].to_vec();
        key.extend_from_slice(&rep);
        let value = if flip { v.neg_expr() } else { v.clone() };
        reps.entry(key).or_insert((value, 0)).1 += 1;
    }
    reps.into_iter()
        .map(|(index, (value, orbit_size))| PatternEntry {
            label: label(&index),
            index,
            value,
            orbit_size,
        })
        .collect()
}

pub fn curvature_pattern_report(m: &MetricField, raw: bool) -> Result<PatternReport, ChecksError> {
    let r = riemann_lowered(m)?;
    let dr = covariant_derivative(&r, m)?;
    Ok(PatternReport {
        raw,
        riemann: entries(&r, raw),
        nabla_riemann: entries(&dr, raw),
    })
}

impl PatternReport {
    /// True when every nonzero `∇_σ R_{abcd}` lies in the orbit of
    /// `∇_u R_{x^i u x^j u}` with `x^i, x^j` drawn from `transverse`.
    pub fn nabla_confined_to_profile(&self, u: usize, transverse: &[usize]) -> bool {
        self.nabla_riemann.iter().all(|e| {
            let i = &e.index;
            let tail = [i[1], i[2], i[3], i[4]];
            i[0] == u
                && orbit(tail).iter().any(|([a, b, c, d], _)| {
                    *b == u && *d == u && transverse.contains(a) && transverse.contains(c)
                })
        })
    }
}
