use std::collections::BTreeMap;
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::expr::{rational_to_f64, Rational, RationalExpr};

use super::{Chart, TensorError, TensorField};

/// Number of negative eigenvalues expected at the base point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Riemannian,
    Lorentzian,
}

impl Signature {
    pub fn negative_count(self) -> usize {
        match self {
            Signature::Riemannian => 0,
            Signature::Lorentzian => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Signature::Riemannian => "riemannian",
            Signature::Lorentzian => "lorentzian",
        }
    }
}

/// A symmetric, nondegenerate metric with rational-function components.
///
/// The inverse is computed at construction; Christoffel symbols and the
/// Riemann tensor are computed on first use and cached.
#[derive(Debug)]
pub struct MetricField {
    chart: Chart,
    g: Vec<RationalExpr>,
    signature: Signature,
    base_point: Vec<Rational>,
    det: RationalExpr,
    inverse: TensorField,
    christoffel: OnceLock<TensorField>,
    riemann: OnceLock<TensorField>,
}

impl Clone for MetricField {
    fn clone(&self) -> Self {
        MetricField {
            chart: self.chart.clone(),
            g: self.g.clone(),
            signature: self.signature,
            base_point: self.base_point.clone(),
            det: self.det.clone(),
            inverse: self.inverse.clone(),
            christoffel: self.christoffel.clone(),
            riemann: self.riemann.clone(),
        }
    }
}

impl MetricField {
    /// Validates and builds a metric. `base_point` defaults to the origin.
    pub fn new(
        chart: Chart,
        rows: Vec<Vec<RationalExpr>>,
        signature: Signature,
        base_point: Option<Vec<Rational>>,
    ) -> Result<Self, TensorError> {
        let n = chart.dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(TensorError::Dimension(format!("metric must be {n}x{n}")));
        }
        let mut g = Vec::with_capacity(n * n);
        for row in rows {
            for e in row {
                g.push(to_chart(&chart, &e)?);
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if !g[i * n + j].equals(&g[j * n + i]) {
                    return Err(TensorError::NotSymmetric(i, j));
                }
            }
        }
        let (det, inv) = invert(&chart, &g).ok_or(TensorError::Degenerate)?;
        let base_point = base_point.unwrap_or_else(|| vec![Rational::from_integer(0.into()); n]);
        if base_point.len() != n {
            return Err(TensorError::Dimension("base point length".into()));
        }
        let m = MetricField {
            inverse: TensorField::from_fn(&chart, 2, 0, |idx| inv[idx[0] * n + idx[1]].clone()),
            chart,
            g,
            signature,
            base_point,
            det,
            christoffel: OnceLock::new(),
            riemann: OnceLock::new(),
        };
        m.check_base_point()?;
        Ok(m)
    }

    fn check_base_point(&self) -> Result<(), TensorError> {
        let n = self.dim();
        let pt = self.base_assignment();
        match self.det.eval_point(&pt) {
            Ok(d) if d != Rational::from_integer(0.into()) => {}
            _ => return Err(TensorError::DegenerateAtBase),
        }
        let mut vals = Vec::with_capacity(n * n);
        for e in &self.g {
            let v = e.eval_point(&pt).map_err(|_| TensorError::DegenerateAtBase)?;
            vals.push(rational_to_f64(&v));
        }
        let eig = DMatrix::from_row_slice(n, n, &vals).symmetric_eigenvalues();
        let found = eig.iter().filter(|&&x| x < 0.0).count();
        let expected = self.signature.negative_count();
        if found != expected {
            return Err(TensorError::Signature { expected, found });
        }
        Ok(())
    }

    /// Base point coordinates by name; parameters are set to 1 for the
    /// base-point determinant and signature checks.
    pub fn base_assignment(&self) -> BTreeMap<String, Rational> {
        self.chart
            .coords()
            .iter()
            .cloned()
            .zip(self.base_point.iter().cloned())
            .chain(self.chart.params().iter().map(|p| (p.clone(), Rational::from_integer(1.into()))))
            .collect()
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn base_point(&self) -> &[Rational] {
        &self.base_point
    }

    pub fn component(&self, i: usize, j: usize) -> &RationalExpr {
        &self.g[i * self.dim() + j]
    }

    pub fn rows(&self) -> Vec<Vec<RationalExpr>> {
        let n = self.dim();
        (0..n).map(|i| self.g[i * n..(i + 1) * n].to_vec()).collect()
    }

    pub fn determinant(&self) -> &RationalExpr {
        &self.det
    }

    /// The metric as a valence-(0, 2) tensor.
    pub fn as_tensor(&self) -> TensorField {
        let n = self.dim();
        TensorField::from_fn(&self.chart, 0, 2, |idx| self.g[idx[0] * n + idx[1]].clone())
    }

    /// `g^{ab}`, valence (2, 0).
    pub fn inverse(&self) -> &TensorField {
        &self.inverse
    }

    pub(crate) fn christoffel_cache(&self) -> &OnceLock<TensorField> {
        &self.christoffel
    }

    pub(crate) fn riemann_cache(&self) -> &OnceLock<TensorField> {
        &self.riemann
    }
}

fn to_chart(chart: &Chart, e: &RationalExpr) -> Result<RationalExpr, TensorError> {
    e.remap(chart.vars()).ok_or_else(|| {
        let bad = e
            .used_vars()
            .into_iter()
            .find(|v| chart.vars().index_of(v).is_none())
            .unwrap_or_default();
        TensorError::UnknownVariable(bad)
    })
}

/// Gauss-Jordan elimination over the field of rational functions.
/// Returns the determinant and the row-major inverse, or `None` when singular.
fn invert(chart: &Chart, g: &[RationalExpr]) -> Option<(RationalExpr, Vec<RationalExpr>)> {
    let n = chart.dim();
    let vars = chart.vars();
    let mut a: Vec<Vec<RationalExpr>> = (0..n).map(|i| g[i * n..(i + 1) * n].to_vec()).collect();
    let mut inv: Vec<Vec<RationalExpr>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { RationalExpr::one(vars) } else { RationalExpr::zero(vars) })
                .collect()
        })
        .collect();
    let mut det = RationalExpr::one(vars);
    for k in 0..n {
        // prefer constant pivots, they keep the entries small
        let pivot = (k..n)
            .find(|&r| a[r][k].is_constant() && !a[r][k].is_zero())
            .or_else(|| (k..n).find(|&r| !a[r][k].is_zero()))?;
        if pivot != k {
            a.swap(pivot, k);
            inv.swap(pivot, k);
            det = det.neg_expr();
        }
        let p = a[k][k].clone();
        det = det.mul_expr(&p);
        let pinv = p.recip().ok()?;
        if !pinv.is_one() {
            for j in 0..n {
                if !a[k][j].is_zero() {
                    a[k][j] = a[k][j].mul_expr(&pinv);
                }
                if !inv[k][j].is_zero() {
                    inv[k][j] = inv[k][j].mul_expr(&pinv);
                }
            }
        }
        for r in 0..n {
            if r == k || a[r][k].is_zero() {
                continue;
            }
            let f = a[r][k].clone();
            for j in 0..n {
                if !a[k][j].is_zero() {
                    a[r][j] = a[r][j].sub_expr(&f.mul_expr(&a[k][j]));
                }
                if !inv[k][j].is_zero() {
                    inv[r][j] = inv[r][j].sub_expr(&f.mul_expr(&inv[k][j]));
                }
            }
        }
    }
    Some((det, inv.into_iter().flatten().collect()))
}
