//! Constructors for the metric families: Brinkmann charts, generalized
//! Cahen-Wallach spaces of order r, constant-curvature factors in rational
//! charts, products, and the order-2 normal form
//! `CW(p(u) = α u + β) × (non-flat symmetric factors)`.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::expr::{rat, Rational, RationalExpr, VarList};
use crate::tensor::{Chart, MetricField, Signature, TensorError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("not a Brinkmann chart: {0}")]
    NotBrinkmann(String),
    #[error("matrix {0} is not symmetric")]
    Asymmetric(String),
    #[error("order not attained: leading coefficient matrix is zero")]
    OrderNotAttained,
    #[error("not proper: Σ(α_ij)² = 0")]
    NotProper,
    #[error("invalid symmetric factor: {0}")]
    InvalidFactor(String),
    #[error("name collision after renaming: '{0}'")]
    NameCollision(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Data of `ds² = −2du(dv + H du + W_i dx^i) + g_ij dx^i dx^j`.
///
/// Expressions may use the transverse names, `u` and the parameters.
#[derive(Clone, Debug)]
pub struct BrinkmannData {
    pub transverse: Vec<String>,
    pub params: Vec<String>,
    pub h: RationalExpr,
    pub w: Vec<RationalExpr>,
    pub g_perp: Vec<Vec<RationalExpr>>,
}

/// `x` for a single transverse direction, otherwise `x1 … xd`.
pub fn transverse_names(d: usize) -> Vec<String> {
    if d == 1 {
        vec!["x".into()]
    } else {
        (1..=d).map(|i| format!("x{i}")).collect()
    }
}

impl BrinkmannData {
    /// Flat data (`H = 0`, `W = 0`, `g_perp = δ`) over the given transverse names.
    pub fn flat(transverse: Vec<String>, params: Vec<String>) -> Self {
        let vars = Self::vars_for(&transverse, &params);
        let d = transverse.len();
        BrinkmannData {
            h: RationalExpr::zero(&vars),
            w: vec![RationalExpr::zero(&vars); d],
            g_perp: (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| if i == j { RationalExpr::one(&vars) } else { RationalExpr::zero(&vars) })
                        .collect()
                })
                .collect(),
            transverse,
            params,
        }
    }

    fn vars_for(transverse: &[String], params: &[String]) -> VarList {
        VarList::new(
            ["u", "v"]
                .iter()
                .map(|s| s.to_string())
                .chain(transverse.iter().cloned())
                .chain(params.iter().cloned()),
        )
    }

    /// Variable list of the resulting chart, for building component expressions.
    pub fn vars(&self) -> VarList {
        Self::vars_for(&self.transverse, &self.params)
    }

    pub fn chart(&self) -> Result<Chart, TensorError> {
        Chart::new(
            ["u", "v"]
                .iter()
                .map(|s| s.to_string())
                .chain(self.transverse.iter().cloned()),
            self.params.clone(),
        )
    }
}

pub fn make_brinkmann(data: &BrinkmannData) -> Result<MetricField, SpaceError> {
    let d = data.transverse.len();
    if data.w.len() != d || data.g_perp.len() != d || data.g_perp.iter().any(|r| r.len() != d) {
        return Err(SpaceError::Dimension(format!("transverse dimension {d}")));
    }
    let all = std::iter::once(&data.h)
        .chain(data.w.iter())
        .chain(data.g_perp.iter().flatten());
    for e in all {
        if e.depends_on("v") {
            return Err(SpaceError::NotBrinkmann("component depends on v".into()));
        }
    }
    let chart = data.chart()?;
    let vars = chart.vars().clone();
    let n = d + 2;
    let zero = RationalExpr::zero(&vars);
    let mut rows = vec![vec![zero; n]; n];
    rows[0][0] = data.h.scale(&rat(-2, 1));
    rows[0][1] = RationalExpr::integer(&vars, -1);
    rows[1][0] = RationalExpr::integer(&vars, -1);
    for i in 0..d {
        rows[0][i + 2] = data.w[i].neg_expr();
        rows[i + 2][0] = data.w[i].neg_expr();
        for j in 0..d {
            rows[i + 2][j + 2] = data.g_perp[i][j].clone();
        }
    }
    Ok(MetricField::new(chart, rows, Signature::Lorentzian, None)?)
}

/// Generalized Cahen-Wallach data: `A(u) = Σ_l A^(l) u^l`, `l < order`.
#[derive(Clone, Debug, PartialEq)]
pub struct CwSpec {
    pub total_dim: usize,
    /// `A^(0) … A^(r−1)`, each `(N−2)×(N−2)` symmetric.
    pub coeffs: Vec<Vec<Vec<Rational>>>,
}

impl CwSpec {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }
}

fn check_symmetric(name: &str, m: &[Vec<Rational>], d: usize) -> Result<(), SpaceError> {
    if m.len() != d || m.iter().any(|r| r.len() != d) {
        return Err(SpaceError::Dimension(format!("{name} must be {d}x{d}")));
    }
    for i in 0..d {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return Err(SpaceError::Asymmetric(name.into()));
            }
        }
    }
    Ok(())
}

pub fn make_cw(spec: &CwSpec) -> Result<MetricField, SpaceError> {
    if spec.total_dim < 3 {
        return Err(SpaceError::Dimension("Cahen-Wallach spaces need N ≥ 3".into()));
    }
    if spec.coeffs.is_empty() {
        return Err(SpaceError::Dimension("order must be at least 1".into()));
    }
    let d = spec.total_dim - 2;
    for (l, a) in spec.coeffs.iter().enumerate() {
        check_symmetric(&format!("A^({l})"), a, d)?;
    }
    if spec.coeffs.last().expect("nonempty").iter().flatten().all(Zero::is_zero) {
        return Err(SpaceError::OrderNotAttained);
    }
    let mut data = BrinkmannData::flat(transverse_names(d), Vec::new());
    let vars = data.vars();
    let u = RationalExpr::var(&vars, "u").expect("u in chart");
    let x: Vec<RationalExpr> = data
        .transverse
        .iter()
        .map(|n| RationalExpr::var(&vars, n).expect("transverse in chart"))
        .collect();
    let mut h = RationalExpr::zero(&vars);
    for i in 0..d {
        for j in 0..d {
            let mut aij = RationalExpr::zero(&vars);
            for (l, a) in spec.coeffs.iter().enumerate() {
                if !a[i][j].is_zero() {
                    aij = aij.add_expr(&u.pow(l as u32).scale(&a[i][j]));
                }
            }
            if !aij.is_zero() {
                h = h.add_expr(&aij.mul_expr(&x[i]).mul_expr(&x[j]));
            }
        }
    }
    data.h = h;
    make_brinkmann(&data)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    Sphere,
    Hyperbolic,
    Euclidean,
}

impl FactorKind {
    pub fn name(self) -> &'static str {
        match self {
            FactorKind::Sphere => "sphere",
            FactorKind::Hyperbolic => "hyperbolic",
            FactorKind::Euclidean => "euclidean",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricFactorSpec {
    pub kind: FactorKind,
    pub dim: usize,
    pub curvature: Rational,
}

impl SymmetricFactorSpec {
    pub fn non_flat(&self) -> bool {
        self.kind != FactorKind::Euclidean
    }

    fn validate(&self) -> Result<(), SpaceError> {
        if self.dim == 0 {
            return Err(SpaceError::InvalidFactor("dimension must be at least 1".into()));
        }
        let ok = match self.kind {
            FactorKind::Sphere => self.curvature.is_positive(),
            FactorKind::Hyperbolic => self.curvature.is_negative(),
            FactorKind::Euclidean => self.curvature.is_zero(),
        };
        if !ok {
            return Err(SpaceError::InvalidFactor(format!(
                "curvature {} inconsistent with {}",
                self.curvature,
                self.kind.name()
            )));
        }
        Ok(())
    }
}

/// `4 δ / (1 + K|y|²)²` on `y1 … yk` (flat `δ` for the Euclidean kind).
pub fn make_symmetric_factor(spec: &SymmetricFactorSpec) -> Result<MetricField, SpaceError> {
    spec.validate()?;
    let k = spec.dim;
    let names: Vec<String> = (1..=k).map(|i| format!("y{i}")).collect();
    let chart = Chart::new(names.clone(), Vec::<String>::new())?;
    let vars = chart.vars().clone();
    let conformal = if spec.kind == FactorKind::Euclidean {
        RationalExpr::one(&vars)
    } else {
        let mut s = RationalExpr::one(&vars);
        for n in &names {
            let y = RationalExpr::var(&vars, n).expect("coordinate");
            s = s.add_expr(&y.pow(2).scale(&spec.curvature));
        }
        let inv = s.recip().expect("1 + K|y|² is nonzero");
        inv.pow(2).scale(&rat(4, 1))
    };
    let rows = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { conformal.clone() } else { RationalExpr::zero(&vars) })
                .collect()
        })
        .collect();
    Ok(MetricField::new(chart, rows, Signature::Riemannian, None)?)
}

/// Block-diagonal product. Coordinates are renamed `p<i>_<name>`; parameters
/// are shared by name. A single part is returned unchanged.
pub fn product_metric(parts: &[MetricField]) -> Result<MetricField, SpaceError> {
    match parts {
        [] => return Err(SpaceError::Dimension("empty product".into())),
        [one] => return Ok(one.clone()),
        _ => {}
    }
    let mut coords = Vec::new();
    let mut params: Vec<String> = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        coords.extend(p.chart().coords().iter().map(|c| format!("p{i}_{c}")));
        for q in p.chart().params() {
            if !params.contains(q) {
                params.push(q.clone());
            }
        }
    }
    for c in &coords {
        if params.contains(c) || coords.iter().filter(|d| *d == c).count() > 1 {
            return Err(SpaceError::NameCollision(c.clone()));
        }
    }
    let chart = Chart::new(coords, params)?;
    let vars = chart.vars().clone();
    let n = chart.dim();
    let mut rows = vec![vec![RationalExpr::zero(&vars); n]; n];
    let mut base = Vec::with_capacity(n);
    let mut negatives = 0;
    let mut offset = 0;
    for (i, p) in parts.iter().enumerate() {
        let own: Vec<String> = p.chart().coords().to_vec();
        let rename = |name: &str| -> String {
            if own.iter().any(|c| c == name) {
                format!("p{i}_{name}")
            } else {
                name.to_string()
            }
        };
        let k = p.dim();
        for a in 0..k {
            for b in 0..k {
                let e = p.component(a, b);
                if e.is_zero() {
                    continue;
                }
                rows[offset + a][offset + b] = e
                    .rename(&rename)
                    .remap(&vars)
                    .ok_or_else(|| SpaceError::NameCollision(format!("component of part {i}")))?;
            }
        }
        base.extend(p.base_point().iter().cloned());
        negatives += p.signature().negative_count();
        offset += k;
    }
    let signature = match negatives {
        0 => Signature::Riemannian,
        1 => Signature::Lorentzian,
        k => return Err(SpaceError::Dimension(format!("product has {k} timelike directions"))),
    };
    Ok(MetricField::new(chart, rows, signature, Some(base))?)
}

/// Order-2 normal form: `p_ij(u) = α_ij u + β_ij` on `ℝ^{d+2}` times symmetric factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Spec {
    pub d: usize,
    pub alpha: Vec<Vec<Rational>>,
    pub beta: Vec<Vec<Rational>>,
    pub factors: Vec<SymmetricFactorSpec>,
}

impl Theorem1Spec {
    /// The same data with `α` set to zero (an order-1 profile).
    pub fn with_zero_alpha(&self) -> Self {
        let mut s = self.clone();
        for row in s.alpha.iter_mut() {
            for a in row.iter_mut() {
                *a = Rational::zero();
            }
        }
        s
    }

    /// `CW(A(u) = α u + β)` alone, allowing `α = 0`.
    pub fn cw_spec(&self) -> CwSpec {
        let alpha_zero = self.alpha.iter().flatten().all(Zero::is_zero);
        let coeffs = if alpha_zero {
            vec![self.beta.clone()]
        } else {
            vec![self.beta.clone(), self.alpha.clone()]
        };
        CwSpec {
            total_dim: self.d + 2,
            coeffs,
        }
    }
}

pub fn make_theorem1(spec: &Theorem1Spec) -> Result<MetricField, SpaceError> {
    if spec.d == 0 {
        return Err(SpaceError::Dimension("d must be at least 1".into()));
    }
    check_symmetric("alpha", &spec.alpha, spec.d)?;
    check_symmetric("beta", &spec.beta, spec.d)?;
    let sum_sq: Rational = spec.alpha.iter().flatten().map(|a| a * a).sum();
    if sum_sq.is_zero() {
        return Err(SpaceError::NotProper);
    }
    for f in &spec.factors {
        if !f.non_flat() {
            return Err(SpaceError::InvalidFactor("factors must be non-flat".into()));
        }
    }
    product_with_factors(&spec.cw_spec(), &spec.factors)
}

/// `CW(spec) × factors`, with no properness requirement.
pub fn product_with_factors(cw: &CwSpec, factors: &[SymmetricFactorSpec]) -> Result<MetricField, SpaceError> {
    let mut parts = vec![make_cw(cw)?];
    for f in factors {
        parts.push(make_symmetric_factor(f)?);
    }
    product_metric(&parts)
}
