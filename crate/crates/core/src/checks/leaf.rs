use crate::expr::RationalExpr;
use crate::tensor::{covariant_derivative, ricci, riemann, scalar_curvature, Chart, MetricField, Signature, TensorField};

use super::{raw_witness, ChecksError, Witness};

/// Positions of `u`, `v` and the transverse coordinates in a Brinkmann chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrinkmannChart {
    pub u: usize,
    pub v: usize,
    pub transverse: Vec<usize>,
}

/// Syntactic Brinkmann detection: a coordinate `v` that no component
/// mentions, with `g_vv = 0` and a single nonzero `g_vu = −1`.
pub fn detect_brinkmann(m: &MetricField) -> Option<BrinkmannChart> {
    let n = m.dim();
    let coords = m.chart().coords();
    'candidates: for v in 0..n {
        for i in 0..n {
            for j in i..n {
                if m.component(i, j).depends_on(&coords[v]) {
                    continue 'candidates;
                }
            }
        }
        if !m.component(v, v).is_zero() {
            continue;
        }
        let partners: Vec<usize> = (0..n).filter(|&j| j != v && !m.component(v, j).is_zero()).collect();
        let [u] = partners[..] else { continue };
        let minus_one = m.component(v, u).constant_value();
        if minus_one != Some(crate::expr::rat(-1, 1)) {
            continue;
        }
        return Some(BrinkmannChart {
            u,
            v,
            transverse: (0..n).filter(|&i| i != u && i != v).collect(),
        });
    }
    None
}

/// Induced geometry of the `u, v = const` leaves, `u` acting as a parameter.
#[derive(Clone, Debug)]
pub struct LeafGeometry {
    pub metric: MetricField,
    pub riemann: TensorField,
    pub ricci: TensorField,
    pub scalar: RationalExpr,
}

#[derive(Clone, Debug)]
pub struct LeafReport {
    pub geometry: LeafGeometry,
    /// Leaf covariant derivative of the leaf curvature vanishes.
    pub holds: bool,
    pub witness: Option<Witness>,
}

pub fn leaf_local_symmetry(m: &MetricField) -> Result<LeafReport, ChecksError> {
    let bc = detect_brinkmann(m).ok_or_else(|| {
        ChecksError::NotBrinkmann("no coordinate v with g_uv = -1 and v-independent components".into())
    })?;
    let coords = m.chart().coords();
    let leaf_coords: Vec<String> = bc.transverse.iter().map(|&i| coords[i].clone()).collect();
    let params: Vec<String> = std::iter::once(coords[bc.u].clone())
        .chain(m.chart().params().iter().cloned())
        .collect();
    let chart = Chart::new(leaf_coords, params)?;
    let rows = bc
        .transverse
        .iter()
        .map(|&i| {
            bc.transverse
                .iter()
                .map(|&j| {
                    m.component(i, j)
                        .remap(chart.vars())
                        .expect("transverse block does not mention v")
                })
                .collect()
        })
        .collect();
    let base = bc.transverse.iter().map(|&i| m.base_point()[i].clone()).collect();
    let leaf = MetricField::new(chart, rows, Signature::Riemannian, Some(base))?;
    let r = riemann(&leaf).clone();
    let dr = covariant_derivative(&r, &leaf)?;
    let geometry = LeafGeometry {
        ricci: ricci(&leaf)?,
        scalar: scalar_curvature(&leaf)?,
        riemann: r,
        metric: leaf,
    };
    Ok(LeafReport {
        holds: dr.is_zero(),
        witness: raw_witness(&dr),
        geometry,
    })
}
