//! Shared fixtures: the metric suite, random normal-form specs and a
//! finite-difference oracle that only evaluates metric components.
#![allow(dead_code)]

use std::collections::BTreeMap;

use gcw::expr::{parse_expr, rat, rational_to_f64, CompiledExpr, Rational, RationalExpr};
use gcw::spaces::{
    make_brinkmann, make_cw, make_symmetric_factor, make_theorem1, product_metric, BrinkmannData, CwSpec, FactorKind,
    SymmetricFactorSpec, Theorem1Spec,
};
use gcw::tensor::{Chart, MetricField, Signature, TensorField};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Rational {
    rat(n, d)
}

pub fn diag(vals: &[Rational]) -> Vec<Vec<Rational>> {
    let d = vals.len();
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { vals[i].clone() } else { q(0, 1) }).collect())
        .collect()
}

pub fn minkowski(n: usize) -> MetricField {
    let coords: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let chart = Chart::new(coords, Vec::<String>::new()).unwrap();
    let vars = chart.vars().clone();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i, j) {
                    (0, 0) => RationalExpr::integer(&vars, -1),
                    _ if i == j => RationalExpr::one(&vars),
                    _ => RationalExpr::zero(&vars),
                })
                .collect()
        })
        .collect();
    MetricField::new(chart, rows, Signature::Lorentzian, None).unwrap()
}

/// `−2du dv − 2H du² + dx²` with `H` given as text over `u, v, x`.
pub fn plane_wave(h: &str) -> MetricField {
    let mut d = BrinkmannData::flat(vec!["x".into()], vec![]);
    d.h = parse_expr(h, &d.vars()).unwrap();
    make_brinkmann(&d).unwrap()
}

pub fn factor(kind: FactorKind, dim: usize, k: Rational) -> MetricField {
    make_symmetric_factor(&SymmetricFactorSpec { kind, dim, curvature: k }).unwrap()
}

/// Order-r CW with `A(u) = A u^{r−1}`.
pub fn cw_pure(n: usize, r: usize, a: Vec<Vec<Rational>>) -> MetricField {
    let d = n - 2;
    let mut coeffs = vec![diag(&vec![q(0, 1); d]); r - 1];
    coeffs.push(a);
    make_cw(&CwSpec { total_dim: n, coeffs }).unwrap()
}

/// A general Brinkmann metric with `W` and a non-flat transverse block.
pub fn twisted_brinkmann() -> MetricField {
    let mut d = BrinkmannData::flat(vec!["x1".into(), "x2".into()], vec![]);
    let vars = d.vars();
    d.h = parse_expr("u*x1^2 - x1*x2 + 1/2*x2^2", &vars).unwrap();
    d.w = vec![parse_expr("u*x2", &vars).unwrap(), parse_expr("0", &vars).unwrap()];
    d.g_perp[0][0] = parse_expr("1 + x2^2", &vars).unwrap();
    make_brinkmann(&d).unwrap()
}

pub struct Suite {
    pub name: String,
    pub metric: MetricField,
    /// Built in Brinkmann form with `∂_v` parallel.
    pub brinkmann: bool,
    /// Expected symmetry order when known.
    pub order: Option<usize>,
}

impl Suite {
    /// Order cap for decision runs; metrics without a finite order get a
    /// small cap, their derivatives swell quickly.
    pub fn cap(&self, default: usize) -> usize {
        self.order.map_or(3, |_| default)
    }
}

fn entry(name: &str, metric: MetricField, brinkmann: bool, order: Option<usize>) -> Suite {
    Suite {
        name: name.into(),
        metric,
        brinkmann,
        order,
    }
}

/// Small-rational entry from `{−2, −1, −1/2, 1/2, 1, 2}` or zero.
fn small(rng: &mut ChaCha8Rng, allow_zero: bool) -> Rational {
    const VALS: [(i64, i64); 6] = [(-2, 1), (-1, 1), (-1, 2), (1, 2), (1, 1), (2, 1)];
    if allow_zero && rng.random_bool(0.4) {
        return q(0, 1);
    }
    let (n, d) = VALS[rng.random_range(0..VALS.len())];
    q(n, d)
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, d: usize, nonzero: bool) -> Vec<Vec<Rational>> {
    loop {
        let mut m = vec![vec![q(0, 1); d]; d];
        for i in 0..d {
            for j in i..d {
                let v = small(rng, true);
                m[i][j] = v.clone();
                m[j][i] = v;
            }
        }
        if !nonzero || m.iter().flatten().any(|x| *x != q(0, 1)) {
            return m;
        }
    }
}

/// `d ∈ {1,2,3}`, symmetric `α ≠ 0` and `β`, 0–2 sphere or hyperbolic
/// factors of dimension 2 or 3.
pub fn random_theorem1(rng: &mut ChaCha8Rng) -> Theorem1Spec {
    let d = rng.random_range(1..=3);
    let nf = rng.random_range(0..=2);
    let factors = (0..nf)
        .map(|_| {
            let kind = if rng.random_bool(0.5) { FactorKind::Sphere } else { FactorKind::Hyperbolic };
            let k = [q(1, 1), q(2, 1), q(1, 2)][rng.random_range(0..3)].clone();
            SymmetricFactorSpec {
                kind,
                dim: rng.random_range(2..=3),
                curvature: if kind == FactorKind::Sphere { k } else { -k },
            }
        })
        .collect();
    Theorem1Spec {
        d,
        alpha: random_symmetric(rng, d, true),
        beta: random_symmetric(rng, d, false),
        factors,
    }
}

pub fn theorem1_specs(seed: u64, count: usize) -> Vec<Theorem1Spec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_theorem1(&mut rng)).collect()
}

/// Every metric the suite-wide invariants are checked on.
pub fn suite() -> Vec<Suite> {
    let mut out = vec![
        entry("minkowski3", minkowski(3), false, Some(0)),
        entry("flat wave", plane_wave("0"), true, Some(0)),
        entry("wave x^2", plane_wave("1/2*x^2"), true, Some(1)),
        entry("wave u x^2", plane_wave("u*x^2"), true, Some(2)),
        entry("wave u^2 x^2", plane_wave("u^2*x^2"), true, Some(3)),
        entry("pp-wave x^3", plane_wave("x^3"), true, None),
        entry("twisted", twisted_brinkmann(), true, None),
        entry("sphere2", factor(FactorKind::Sphere, 2, q(1, 1)), false, Some(1)),
        entry("sphere3", factor(FactorKind::Sphere, 3, q(1, 2)), false, Some(1)),
        entry("hyperbolic2", factor(FactorKind::Hyperbolic, 2, q(-1, 1)), false, Some(1)),
        entry("hyperbolic3", factor(FactorKind::Hyperbolic, 3, q(-2, 1)), false, Some(1)),
    ];
    for r in 1..=4 {
        for n in [3, 4] {
            let a = if n == 3 { diag(&[q(1, 1)]) } else { vec![vec![q(1, 1), q(1, 2)], vec![q(1, 2), q(-1, 1)]] };
            out.push(entry(&format!("cw n{n} r{r}"), cw_pure(n, r, a), true, Some(r)));
        }
    }
    let s2 = factor(FactorKind::Sphere, 2, q(1, 1));
    out.push(entry(
        "cw r2 x sphere2",
        product_metric(&[cw_pure(3, 2, diag(&[q(1, 1)])), s2]).unwrap(),
        true,
        Some(2),
    ));
    for (i, spec) in theorem1_specs(7, 4).iter().enumerate() {
        out.push(entry(&format!("theorem1 #{i}"), make_theorem1(spec).unwrap(), true, Some(2)));
    }
    out
}

// ---- finite-difference oracle ----

/// Numeric metric components only; all derivatives are finite differences.
pub struct FdOracle {
    n: usize,
    g: Vec<CompiledExpr>,
    h: f64,
}

impl FdOracle {
    pub fn new(m: &MetricField) -> Self {
        let n = m.dim();
        let order = m.chart().vars().names().to_vec();
        FdOracle {
            n,
            g: (0..n * n)
                .map(|k| CompiledExpr::new(m.component(k / n, k % n), &order).unwrap())
                .collect(),
            h: 1e-3,
        }
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.g[i * self.n + j].eval(x).unwrap())
    }

    /// Five-point central difference of `f` along coordinate `k`.
    fn d<T: Fn(&[f64]) -> Vec<f64>>(&self, f: &T, x: &[f64], k: usize) -> Vec<f64> {
        let at = |t: f64| {
            let mut y = x.to_vec();
            y[k] += t;
            f(&y)
        };
        let h = self.h;
        let (a, b, c, e) = (at(2.0 * h), at(h), at(-h), at(-2.0 * h));
        (0..a.len())
            .map(|i| (-a[i] + 8.0 * b[i] - 8.0 * c[i] + e[i]) / (12.0 * h))
            .collect()
    }

    /// `Γ^a_{bc}` flattened as `a·n² + b·n + c`.
    pub fn christoffel(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let flat = |y: &[f64]| self.metric(y).as_slice().to_vec();
        // column-major: entry (i, j) at j*n + i; g is symmetric
        let dg: Vec<Vec<f64>> = (0..n).map(|k| self.d(&flat, x, k)).collect();
        let ginv = self.metric(x).try_inverse().unwrap();
        let mut out = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = 0.0;
                    for e in 0..n {
                        s += ginv[(a, e)] * (dg[b][e * n + c] + dg[c][b * n + e] - dg[e][b * n + c]);
                    }
                    out[a * n * n + b * n + c] = 0.5 * s;
                }
            }
        }
        out
    }

    /// `R^a_{bcd}` flattened as `((a·n + b)·n + c)·n + d`.
    pub fn riemann(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let gam = |y: &[f64]| self.christoffel(y);
        let dgam: Vec<Vec<f64>> = (0..n).map(|k| self.d(&gam, x, k)).collect();
        let g0 = self.christoffel(x);
        let gi = |a: usize, b: usize, c: usize| a * n * n + b * n + c;
        let mut out = vec![0.0; n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut s = dgam[c][gi(a, d, b)] - dgam[d][gi(a, c, b)];
                        for e in 0..n {
                            s += g0[gi(a, c, e)] * g0[gi(e, d, b)] - g0[gi(a, d, e)] * g0[gi(e, c, b)];
                        }
                        out[((a * n + b) * n + c) * n + d] = s;
                    }
                }
            }
        }
        out
    }
}

/// Exact values of a tensor at a rational point, flattened in index order.
pub fn eval_dense(t: &TensorField, point: &BTreeMap<String, Rational>) -> Option<Vec<f64>> {
    let n = t.chart().dim();
    let rank = t.rank();
    let mut out = vec![0.0; n.pow(rank as u32)];
    for (idx, v) in t.nonzero() {
        let flat = idx.iter().fold(0, |acc, &i| acc * n + i);
        out[flat] = rational_to_f64(&v.eval_point(point).ok()?);
    }
    Some(out)
}

/// Random rational point with coordinates in `[−1/2, 1/2]` (step 1/16), at
/// which every given tensor and the metric are pole-free.
pub fn random_point(
    m: &MetricField,
    tensors: &[&TensorField],
    rng: &mut ChaCha8Rng,
) -> BTreeMap<String, Rational> {
    loop {
        let mut p = m.base_assignment();
        for c in m.chart().coords() {
            p.insert(c.clone(), q(rng.random_range(-8..=8), 16));
        }
        let ok = (0..m.dim())
            .all(|i| (0..m.dim()).all(|j| m.component(i, j).eval_point(&p).is_ok()))
            && tensors.iter().all(|t| t.nonzero().all(|(_, v)| v.eval_point(&p).is_ok()));
        // keep finite-difference stencils away from poles
        let margin = (0..m.dim()).all(|i| {
            (0..m.dim()).all(|j| {
                m.component(i, j)
                    .denominator_factors()
                    .iter()
                    .all(|(f, _)| {
                        let vals: Vec<Rational> = f.vars().names().iter().map(|n| p[n].clone()).collect();
                        rational_to_f64(&f.eval(&vals)).abs() >= 0.25
                    })
            })
        });
        let det = m.determinant().eval_point(&p);
        if ok && margin && matches!(det, Ok(d) if d != q(0, 1)) {
            return p;
        }
    }
}

pub fn point_f64(m: &MetricField, p: &BTreeMap<String, Rational>) -> Vec<f64> {
    m.chart()
        .vars()
        .names()
        .iter()
        .map(|n| rational_to_f64(&p[n]))
        .collect()
}

/// `max |a − b| ≤ tol · max(1, max |b|)`.
pub fn close(a: &[f64], b: &[f64], tol: f64) -> Result<(), String> {
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        if (x - y).abs() > tol * scale {
            return Err(format!("component {i}: {x} vs {y} (scale {scale})"));
        }
    }
    Ok(())
}
