//! Numeric geodesics: fixed-step RK4 on `ẋ = p, ṗ^a = −Γ^a_{bc} p^b p^c`,
//! the closed-form solution on constant-profile Cahen-Wallach spaces, and
//! randomized completeness probes.
//!
//! Completeness is only probed here. A probe that reaches its horizon is
//! evidence, not proof.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{rational_to_f64, CompiledExpr};
use crate::tensor::{christoffel, MetricField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeodesicError {
    #[error("left chart domain")]
    LeftChart,
    #[error("profile matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid integrator config: {0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub affine_param: f64,
}

#[derive(Clone, Debug)]
pub struct IntegratorConfig {
    pub step: f64,
    /// Integration runs from the initial parameter to here, backwards if smaller.
    pub max_param: f64,
    pub blowup_threshold: f64,
    /// A denominator factor exceeding this multiple of its base-point size
    /// ends the run as "left chart": rational charts such as the
    /// stereographic one reach their removed point at infinity this way.
    pub chart_bound: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            step: 1e-3,
            max_param: 10.0,
            blowup_threshold: 1e12,
            chart_bound: 1e2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Termination {
    #[serde(rename = "completed")]
    Completed,
    #[serde(rename = "blowup")]
    Blowup,
    #[serde(rename = "left chart")]
    LeftChart,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::Blowup => "blowup",
            Termination::LeftChart => "left chart",
        }
    }
}

/// Metric and connection compiled to binary64. Parameters are fixed to 1,
/// the same assignment used for base-point checks.
pub struct NumericMetric {
    n: usize,
    params: Vec<f64>,
    g: Vec<CompiledExpr>,
    gamma: Vec<(usize, usize, usize, CompiledExpr)>,
    /// Every denominator factor at the base point, per compiled expression.
    base_dens: Vec<Vec<f64>>,
}

impl NumericMetric {
    pub fn new(m: &MetricField) -> Self {
        let n = m.dim();
        let order: Vec<String> = m.chart().vars().names().to_vec();
        let compile = |e| CompiledExpr::new(e, &order).expect("chart variables cover every expression");
        let g = (0..n * n).map(|k| compile(m.component(k / n, k % n))).collect();
        let gamma = christoffel(m)
            .nonzero()
            .map(|(i, v)| (i[0], i[1], i[2], compile(v)))
            .collect();
        let mut nm = NumericMetric {
            n,
            params: vec![1.0; m.chart().params().len()],
            g,
            gamma,
            base_dens: Vec::new(),
        };
        let base: Vec<f64> = m.base_point().iter().map(rational_to_f64).collect();
        let full = nm.full(&base);
        nm.base_dens = nm.exprs().map(|e| e.denominator_values(&full)).collect();
        nm
    }

    fn exprs(&self) -> impl Iterator<Item = &CompiledExpr> {
        self.g.iter().chain(self.gamma.iter().map(|t| &t.3))
    }

    fn full(&self, x: &[f64]) -> Vec<f64> {
        let mut v = x.to_vec();
        v.extend_from_slice(&self.params);
        v
    }

    /// The chart domain is the region around the base point where no
    /// denominator factor has vanished or changed sign.
    pub fn in_domain(&self, x: &[f64]) -> bool {
        self.within(x, f64::INFINITY)
    }

    /// Inside the domain with every denominator factor at most `bound`
    /// times its base value (or `bound` when that is smaller than 1).
    pub fn within(&self, x: &[f64], bound: f64) -> bool {
        let full = self.full(x);
        self.exprs().zip(&self.base_dens).all(|(e, base)| {
            e.denominator_values(&full).iter().zip(base).all(|(v, b)| {
                v.is_finite() && *v != 0.0 && v.signum() == b.signum() && v.abs() <= bound * b.abs().max(1.0)
            })
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Γ^a_{bc}` at `a·n² + b·n + c`.
    pub fn christoffel(&self, x: &[f64]) -> Result<Vec<f64>, GeodesicError> {
        if !self.in_domain(x) {
            return Err(GeodesicError::LeftChart);
        }
        let full = self.full(x);
        let n = self.n;
        let mut out = vec![0.0; n * n * n];
        for (a, b, c, e) in &self.gamma {
            out[a * n * n + b * n + c] = e.eval(&full).map_err(|_| GeodesicError::LeftChart)?;
        }
        Ok(out)
    }

    /// `g(p, p)` and `Σ |g_ab p^a p^b|`, the scale used for relative drift.
    pub fn norm(&self, x: &[f64], p: &[f64]) -> (f64, f64) {
        let full = self.full(x);
        let (mut s, mut scale) = (0.0, 0.0);
        for a in 0..self.n {
            for b in 0..self.n {
                let t = self.g[a * self.n + b].eval(&full).unwrap_or(f64::NAN) * p[a] * p[b];
                s += t;
                scale += t.abs();
            }
        }
        (s, scale)
    }

    fn accel(&self, x: &[f64], p: &[f64]) -> Result<Vec<f64>, GeodesicError> {
        if !self.in_domain(x) {
            return Err(GeodesicError::LeftChart);
        }
        let full = self.full(x);
        let mut out = vec![0.0; self.n];
        for (a, b, c, e) in &self.gamma {
            let v = e.eval(&full).map_err(|_| GeodesicError::LeftChart)?;
            out[*a] -= v * p[*b] * p[*c];
        }
        Ok(out)
    }
}

pub fn christoffel_numeric(m: &MetricField, point: &[f64]) -> Result<Vec<f64>, GeodesicError> {
    if point.len() != m.dim() {
        return Err(GeodesicError::Dimension(format!("point has {} entries, chart has {}", point.len(), m.dim())));
    }
    NumericMetric::new(m).christoffel(point)
}

#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    #[serde(flatten)]
    pub state: GeodesicState,
    pub norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
    /// `max |g(p,p) − g(p,p)₀|`.
    pub max_drift: f64,
    /// The same drift divided by `max(1, Σ|g_ab p^a p^b|)` at each sample.
    pub max_relative_drift: f64,
}

pub fn integrate_geodesic(
    m: &MetricField,
    init: &GeodesicState,
    config: &IntegratorConfig,
) -> Result<Trajectory, GeodesicError> {
    integrate_with(&NumericMetric::new(m), init, config)
}

pub fn integrate_with(
    nm: &NumericMetric,
    init: &GeodesicState,
    config: &IntegratorConfig,
) -> Result<Trajectory, GeodesicError> {
    let n = nm.dim();
    if init.position.len() != n || init.velocity.len() != n {
        return Err(GeodesicError::Dimension(format!("initial state must have {n} positions and velocities")));
    }
    if !(config.step > 0.0 && config.step.is_finite()) {
        return Err(GeodesicError::Config("step must be positive".into()));
    }
    if !nm.within(&init.position, config.chart_bound) {
        return Err(GeodesicError::LeftChart);
    }
    let span = config.max_param - init.affine_param;
    let steps = (span.abs() / config.step - 1e-9).ceil().max(0.0) as usize;
    let (n0, _) = nm.norm(&init.position, &init.velocity);
    let mut x = init.position.clone();
    let mut p = init.velocity.clone();
    let mut s = init.affine_param;
    let mut samples = vec![Sample {
        state: init.clone(),
        norm: n0,
    }];
    let (mut max_drift, mut max_rel) = (0.0f64, 0.0f64);
    let mut termination = Termination::Completed;
    for k in 0..steps {
        let target = if k + 1 == steps {
            config.max_param
        } else {
            init.affine_param + span.signum() * config.step * (k + 1) as f64
        };
        let h = target - s;
        match rk4_step(nm, &x, &p, h) {
            Ok((nx, np)) => {
                if nx.iter().chain(&np).any(|v| !v.is_finite() || v.abs() > config.blowup_threshold) {
                    termination = Termination::Blowup;
                    break;
                }
                if !nm.within(&nx, config.chart_bound) {
                    termination = Termination::LeftChart;
                    break;
                }
                x = nx;
                p = np;
                s = target;
            }
            Err(_) => {
                termination = Termination::LeftChart;
                break;
            }
        }
        let (norm, scale) = nm.norm(&x, &p);
        let drift = (norm - n0).abs();
        max_drift = max_drift.max(drift);
        max_rel = max_rel.max(drift / scale.max(1.0));
        samples.push(Sample {
            state: GeodesicState {
                position: x.clone(),
                velocity: p.clone(),
                affine_param: s,
            },
            norm,
        });
    }
    Ok(Trajectory {
        samples,
        termination,
        max_drift,
        max_relative_drift: max_rel,
    })
}

fn rk4_step(nm: &NumericMetric, x: &[f64], p: &[f64], h: f64) -> Result<(Vec<f64>, Vec<f64>), GeodesicError> {
    let axpy = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(u, v)| u + t * v).collect() };
    let k1x = p.to_vec();
    let k1p = nm.accel(x, p)?;
    let (x2, p2) = (axpy(x, &k1x, h / 2.0), axpy(p, &k1p, h / 2.0));
    let k2x = p2.clone();
    let k2p = nm.accel(&x2, &p2)?;
    let (x3, p3) = (axpy(x, &k2x, h / 2.0), axpy(p, &k2p, h / 2.0));
    let k3x = p3.clone();
    let k3p = nm.accel(&x3, &p3)?;
    let (x4, p4) = (axpy(x, &k3x, h), axpy(p, &k3p, h));
    let k4x = p4.clone();
    let k4p = nm.accel(&x4, &p4)?;
    let comb = |y: &[f64], k1: &[f64], k2: &[f64], k3: &[f64], k4: &[f64]| -> Vec<f64> {
        (0..y.len())
            .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    };
    Ok((comb(x, &k1x, &k2x, &k3x, &k4x), comb(p, &k1p, &k2p, &k3p, &k4p)))
}

/// Exact geodesic of `−2du dv − 2 A_ij x^i x^j du² + δ_ij dx^i dx^j` for
/// constant symmetric `A`, in chart order `(u, v, x^1 … x^d)`.
///
/// `u̇ = c` is constant and the transverse system `ẍ = −2c²Ax` decouples
/// along the eigenvectors of `A`. `v` follows from `g(p, p)` being
/// conserved, integrated by Simpson's rule over each step.
pub fn closed_form_cw_geodesic(
    a: &[Vec<f64>],
    init: &GeodesicState,
    range: f64,
    step: f64,
) -> Result<Vec<GeodesicState>, GeodesicError> {
    let d = a.len();
    if a.iter().any(|row| row.len() != d) || init.position.len() != d + 2 || init.velocity.len() != d + 2 {
        return Err(GeodesicError::Dimension(format!("expected {d}x{d} profile and {} coordinates", d + 2)));
    }
    if (0..d).any(|i| (0..d).any(|j| a[i][j] != a[j][i])) {
        return Err(GeodesicError::NotSymmetric);
    }
    if !(step > 0.0) {
        return Err(GeodesicError::Config("step must be positive".into()));
    }
    let am = DMatrix::from_fn(d, d, |i, j| a[i][j]);
    let eig = SymmetricEigen::new(am.clone());
    let q = &eig.eigenvectors;
    let c = init.velocity[0];
    let x0 = nalgebra::DVector::from_fn(d, |i, _| init.position[i + 2]);
    let xd0 = nalgebra::DVector::from_fn(d, |i, _| init.velocity[i + 2]);
    let y0 = q.transpose() * &x0;
    let yd0 = q.transpose() * &xd0;
    let h_of = |x: &nalgebra::DVector<f64>| x.dot(&(&am * x));
    let n0 = -2.0 * h_of(&x0) * c * c - 2.0 * c * init.velocity[1] + xd0.dot(&xd0);

    // transverse position and velocity at parameter offset t
    let transverse = |t: f64| -> (nalgebra::DVector<f64>, nalgebra::DVector<f64>) {
        let mut y = nalgebra::DVector::zeros(d);
        let mut yd = nalgebra::DVector::zeros(d);
        for k in 0..d {
            let w2 = 2.0 * c * c * eig.eigenvalues[k];
            let (a0, b0) = (y0[k], yd0[k]);
            if w2 > 0.0 {
                let w = w2.sqrt();
                y[k] = a0 * (w * t).cos() + b0 / w * (w * t).sin();
                yd[k] = -a0 * w * (w * t).sin() + b0 * (w * t).cos();
            } else if w2 < 0.0 {
                let w = (-w2).sqrt();
                y[k] = a0 * (w * t).cosh() + b0 / w * (w * t).sinh();
                yd[k] = a0 * w * (w * t).sinh() + b0 * (w * t).cosh();
            } else {
                y[k] = a0 + b0 * t;
                yd[k] = b0;
            }
        }
        (q * y, q * yd)
    };
    // v̇ from −2H c² − 2c v̇ + |ẋ|² = n0; for c = 0, v̇ stays at its initial value
    let vdot = |t: f64| -> f64 {
        if c == 0.0 {
            return init.velocity[1];
        }
        let (x, xd) = transverse(t);
        (xd.dot(&xd) - 2.0 * h_of(&x) * c * c - n0) / (2.0 * c)
    };
    let steps = (range.abs() / step - 1e-9).ceil().max(0.0) as usize;
    let dir = range.signum();
    let mut out = Vec::with_capacity(steps + 1);
    let mut v = init.position[1];
    let mut prev = 0.0;
    for k in 0..=steps {
        let t = if k == steps { range } else { dir * step * k as f64 };
        if k > 0 {
            let h = t - prev;
            v += h / 6.0 * (vdot(prev) + 4.0 * vdot(prev + h / 2.0) + vdot(t));
        }
        prev = t;
        let (x, xd) = transverse(t);
        let mut position = vec![init.position[0] + c * t, v];
        position.extend(x.iter());
        let mut velocity = vec![c, vdot(t)];
        velocity.extend(xd.iter());
        out.push(GeodesicState {
            position,
            velocity,
            affine_param: init.affine_param + t,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeSample {
    pub index: usize,
    pub initial_velocity: Vec<f64>,
    pub forward: Termination,
    pub backward: Termination,
    pub max_drift: f64,
    pub max_relative_drift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub sample_count: usize,
    pub horizon: f64,
    pub step: f64,
    pub seed: u64,
    pub samples: Vec<ProbeSample>,
    pub escapes: usize,
    pub chart_exits: usize,
    pub max_drift: f64,
    pub max_relative_drift: f64,
    pub no_escape_observed: bool,
    pub summary: String,
}

/// Blowup level used by probes. Complete geodesics of plane waves can grow
/// like `e^{c s}` and still be finite; a true escape at finite parameter
/// overflows under fixed-step RK4 almost immediately, so only the latter
/// crosses this.
pub const PROBE_BLOWUP_THRESHOLD: f64 = 1e100;

/// Integrates `sample_count` geodesics from the base point to `±horizon`
/// with initial velocity components uniform in `[−1/2, 1/2]`.
/// Leaving the chart is reported separately and does not count as an escape.
pub fn completeness_probe(m: &MetricField, sample_count: usize, horizon: f64, step: f64, seed: u64) -> ProbeReport {
    let nm = NumericMetric::new(m);
    let n = m.dim();
    let base: Vec<f64> = m.base_point().iter().map(rational_to_f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs: Vec<Vec<f64>> = (0..sample_count)
        .map(|_| (0..n).map(|_| rng.random_range(-0.5..=0.5)).collect())
        .collect();
    let samples: Vec<ProbeSample> = dirs
        .into_par_iter()
        .enumerate()
        .map(|(index, vel)| {
            let init = GeodesicState {
                position: base.clone(),
                velocity: vel.clone(),
                affine_param: 0.0,
            };
            let run = |end: f64| {
                let cfg = IntegratorConfig {
                    step,
                    max_param: end,
                    blowup_threshold: PROBE_BLOWUP_THRESHOLD,
                    ..IntegratorConfig::default()
                };
                integrate_with(&nm, &init, &cfg).expect("base point lies in the chart")
            };
            let (f, b) = (run(horizon), run(-horizon));
            ProbeSample {
                index,
                initial_velocity: vel,
                forward: f.termination,
                backward: b.termination,
                max_drift: f.max_drift.max(b.max_drift),
                max_relative_drift: f.max_relative_drift.max(b.max_relative_drift),
            }
        })
        .collect();
    let count = |t: Termination| {
        samples
            .iter()
            .map(|s| (s.forward == t) as usize + (s.backward == t) as usize)
            .sum::<usize>()
    };
    let escapes = count(Termination::Blowup);
    let chart_exits = count(Termination::LeftChart);
    let no_escape_observed = escapes == 0;
    ProbeReport {
        sample_count,
        horizon,
        step,
        seed,
        max_drift: samples.iter().map(|s| s.max_drift).fold(0.0, f64::max),
        max_relative_drift: samples.iter().map(|s| s.max_relative_drift).fold(0.0, f64::max),
        summary: if no_escape_observed {
            "no finite-parameter escape observed".into()
        } else {
            format!("finite-parameter escape observed in {escapes} of {} runs", 2 * sample_count)
        },
        samples,
        escapes,
        chart_exits,
        no_escape_observed,
    }
}
