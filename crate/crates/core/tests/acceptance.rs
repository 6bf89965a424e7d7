//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use gcw::checks::{
    check_ccnv, check_kth_symmetry, check_semi_symmetry, curvature_pattern_report, find_symmetry_order,
    leaf_local_symmetry,
};
use gcw::dsl::{build_report, emit_metric, emit_metric_file, parse_metric_file, report_json, CheckOptions, MetricDocument};
use gcw::geodesic::{closed_form_cw_geodesic, completeness_probe, integrate_geodesic, GeodesicState, IntegratorConfig};
use gcw::spaces::{
    make_brinkmann, make_cw, make_symmetric_factor, make_theorem1, product_metric, product_with_factors,
    transverse_names, BrinkmannData, CwSpec, Theorem1Spec,
};
use gcw::tensor::{christoffel, riemann, MetricField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const SPEC_SEED: u64 = 20;

fn specs() -> Vec<Theorem1Spec> {
    theorem1_specs(SPEC_SEED, 20)
}

fn describe(s: &Theorem1Spec) -> String {
    let f: Vec<String> = s.factors.iter().map(|f| format!("{}:{}:{}", f.kind.name(), f.dim, f.curvature)).collect();
    format!("d={} factors=[{}]", s.d, f.join(" "))
}

fn normal_form_order_two() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_small = 0.0f64;
    for (i, s) in specs().iter().enumerate() {
        let t = Instant::now();
        let m = make_theorem1(s).map_err(|e| format!("case {i}: {e}"))?;
        let v = find_symmetry_order(&m, 2).map_err(|e| e.to_string())?;
        ensure!(v.order == Some(2) && v.proper, "case {i} ({}): order {:?}", describe(s), v.order);
        let w = v.witnesses.get("nabla^1 R").ok_or(format!("case {i}: no ∇R witness"))?;
        ensure!(!w.value.is_zero(), "case {i}: zero witness");
        let secs = t.elapsed().as_secs_f64();
        worst = worst.max(secs);
        if m.dim() <= 7 {
            worst_small = worst_small.max(secs);
        }
    }
    ensure!(worst_small < 10.0, "slowest case of dimension ≤ 7 took {worst_small:.2}s");
    Ok(format!("20/20 cases, slowest {worst:.2}s (≤7 dims: {worst_small:.2}s)"))
}

fn zero_alpha_is_first_order() -> Outcome {
    let mut flat = 0;
    for (i, s) in specs().iter().enumerate() {
        let z = s.with_zero_alpha();
        // with β = 0 too the wave part is flat and no CW profile exists
        let m = if z.beta.iter().flatten().all(|b| *b == q(0, 1)) {
            let wave = make_brinkmann(&BrinkmannData::flat(transverse_names(z.d), vec![])).unwrap();
            let mut parts = vec![wave];
            parts.extend(z.factors.iter().map(|f| make_symmetric_factor(f).unwrap()));
            product_metric(&parts).map_err(|e| e.to_string())?
        } else {
            product_with_factors(&z.cw_spec(), &z.factors).map_err(|e| e.to_string())?
        };
        let v = find_symmetry_order(&m, 2).map_err(|e| e.to_string())?;
        // β = 0 with no factors leaves Minkowski space, which is order 0
        let trivial = z.beta.iter().flatten().all(|b| *b == q(0, 1)) && z.factors.is_empty();
        if trivial {
            ensure!(v.flat, "case {i}: expected flat");
            flat += 1;
        } else {
            ensure!(v.order == Some(1) && v.locally_symmetric, "case {i} ({}): order {:?}", describe(s), v.order);
        }
    }
    Ok(format!("20/20 cases locally symmetric ({} order 1, {flat} flat)", 20 - flat))
}

fn cw_order_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut n_cases = 0;
    for r in 1..=4 {
        for n in [3usize, 4] {
            let d = n - 2;
            let mut coeffs: Vec<_> = (0..r - 1).map(|_| random_symmetric(&mut rng, d, false)).collect();
            coeffs.push(random_symmetric(&mut rng, d, true));
            let m = make_cw(&CwSpec { total_dim: n, coeffs }).map_err(|e| e.to_string())?;
            let v = find_symmetry_order(&m, 5).map_err(|e| e.to_string())?;
            ensure!(v.order == Some(r) && v.proper, "N={n} r={r}: order {:?}", v.order);
            n_cases += 1;
        }
    }
    Ok(format!("{n_cases}/{n_cases} cases, order equals r"))
}

fn hierarchy() -> Outcome {
    let all = suite();
    for s in &all {
        let v = find_symmetry_order(&s.metric, s.cap(4)).map_err(|e| e.to_string())?;
        let second = check_kth_symmetry(&s.metric, 2).map_err(|e| e.to_string())?.vanishes;
        let semi = check_semi_symmetry(&s.metric).map_err(|e| e.to_string())?.holds;
        ensure!(!v.flat || v.locally_symmetric, "{}: flat but ∇R ≠ 0", s.name);
        ensure!(!v.locally_symmetric || second, "{}: ∇R = 0 but ∇∇R ≠ 0", s.name);
        ensure!(!second || semi, "{}: ∇∇R = 0 but not semi-symmetric", s.name);
    }
    Ok(format!("{} suite metrics", all.len()))
}

fn brinkmann_metrics() -> Vec<(String, MetricField)> {
    let mut out: Vec<_> = suite().into_iter().filter(|s| s.brinkmann).map(|s| (s.name, s.metric)).collect();
    for (i, s) in specs().iter().enumerate() {
        out.push((format!("spec {i}"), make_theorem1(s).unwrap()));
    }
    out
}

fn ccnv() -> Outcome {
    let ms = brinkmann_metrics();
    for (name, m) in &ms {
        let r = check_ccnv(m, None).map_err(|e| format!("{name}: {e}"))?;
        ensure!(r.holds && r.norm.is_zero(), "{name}: ∂_v fails");
    }
    Ok(format!("{}/{} Brinkmann metrics", ms.len(), ms.len()))
}

fn leaves() -> Outcome {
    let mut count = 0;
    let mut ms: Vec<(String, MetricField)> =
        suite().into_iter().filter(|s| s.brinkmann && s.order == Some(2)).map(|s| (s.name, s.metric)).collect();
    for (i, s) in specs().iter().enumerate() {
        ms.push((format!("spec {i}"), make_theorem1(s).unwrap()));
    }
    for (name, m) in &ms {
        let v = find_symmetry_order(m, 2).map_err(|e| e.to_string())?;
        ensure!(v.order == Some(2), "{name}: not of order 2");
        let l = leaf_local_symmetry(m).map_err(|e| format!("{name}: {e}"))?;
        ensure!(l.holds, "{name}: leaf not locally symmetric");
        count += 1;
    }
    Ok(format!("{count}/{count} order-2 metrics"))
}

fn pattern() -> Outcome {
    for (i, s) in specs().iter().enumerate() {
        let m = make_theorem1(s).unwrap();
        let p = curvature_pattern_report(&m, false).map_err(|e| e.to_string())?;
        let transverse: Vec<usize> = (2..2 + s.d).collect();
        ensure!(!p.nabla_riemann.is_empty(), "case {i}: ∇R vanishes");
        ensure!(p.nabla_confined_to_profile(0, &transverse), "case {i}: component outside the family");
        for e in &p.nabla_riemann {
            let (a, b) = (e.index[2] - 2, e.index[4] - 2);
            ensure!(
                e.value.constant_value() == Some(&s.alpha[a][b] * q(2, 1)),
                "case {i}: {} = {} is not 2α",
                e.label,
                e.value
            );
        }
    }
    Ok("20/20 cases reduce to ∇_u R_{u x^i u x^j} = 2α_ij".into())
}

fn finite_differences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let all = suite();
    for s in &all {
        let m = &s.metric;
        let (g, r) = (christoffel(m), riemann(m));
        let fd = FdOracle::new(m);
        for _ in 0..3 {
            let p = random_point(m, &[g, r], &mut rng);
            let x = point_f64(m, &p);
            let ge = eval_dense(g, &p).ok_or(format!("{}: pole", s.name))?;
            let re = eval_dense(r, &p).ok_or(format!("{}: pole", s.name))?;
            close(&ge, &fd.christoffel(&x), 1e-6).map_err(|e| format!("{} Γ: {e}", s.name))?;
            close(&re, &fd.riemann(&x), 1e-6).map_err(|e| format!("{} R: {e}", s.name))?;
        }
    }
    Ok(format!("{} metrics x 3 points within 1e-6", all.len()))
}

fn null_init(a: &[Vec<f64>], x: &[f64], xd: &[f64]) -> GeodesicState {
    let d = x.len();
    let h: f64 = (0..d).map(|i| (0..d).map(|j| a[i][j] * x[i] * x[j]).sum::<f64>()).sum();
    let kin: f64 = xd.iter().map(|v| v * v).sum();
    let mut position = vec![0.0, 0.0];
    position.extend_from_slice(x);
    let mut velocity = vec![1.0, (kin - 2.0 * h) / 2.0];
    velocity.extend_from_slice(xd);
    GeodesicState {
        position,
        velocity,
        affine_param: 0.0,
    }
}

fn geodesics() -> Outcome {
    let cfg = |step, max_param| IntegratorConfig {
        step,
        max_param,
        ..IntegratorConfig::default()
    };
    // closed form against RK4
    let cases: Vec<(Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> = vec![
        (vec![vec![0.5]], vec![1.0], vec![0.0]),
        (vec![vec![0.5, 0.0], vec![0.0, -0.5]], vec![1.0, 0.5], vec![0.0, -0.25]),
        (vec![vec![0.5, 0.125], vec![0.125, -0.125]], vec![0.5, -0.5], vec![0.25, 0.0]),
    ];
    let mut worst = 0.0f64;
    for (a, x, xd) in &cases {
        let exact_a: Vec<Vec<_>> = a.iter().map(|r| r.iter().map(|v| rat_of(*v)).collect()).collect();
        let m = make_cw(&CwSpec {
            total_dim: a.len() + 2,
            coeffs: vec![exact_a],
        })
        .unwrap();
        let init = null_init(a, x, xd);
        let rk = integrate_geodesic(&m, &init, &cfg(1e-3, 10.0)).map_err(|e| e.to_string())?;
        let ex = closed_form_cw_geodesic(a, &init, 10.0, 1e-3).map_err(|e| e.to_string())?;
        ensure!(
            rk.samples.len() == ex.len(),
            "sample grids differ: {} vs {} ({})",
            rk.samples.len(),
            ex.len(),
            rk.termination.as_str()
        );
        for (s, e) in rk.samples.iter().zip(&ex) {
            for i in 0..a.len() + 2 {
                let scale = e.position[i].abs().max(1.0);
                worst = worst.max((s.state.position[i] - e.position[i]).abs() / scale);
            }
        }
    }
    ensure!(worst < 1e-6, "closed form deviation {worst:e}");
    // step halving
    let a = vec![vec![0.5]];
    let m = make_cw(&CwSpec {
        total_dim: 3,
        coeffs: vec![diag(&[q(1, 2)])],
    })
    .unwrap();
    let init = null_init(&a, &[1.0], &[0.0]);
    let err = |h: f64| -> Result<f64, String> {
        let tr = integrate_geodesic(&m, &init, &cfg(h, 10.0)).map_err(|e| e.to_string())?;
        Ok((tr.samples.last().unwrap().state.position[2] - 10f64.cos()).abs())
    };
    let ratio = err(0.1)? / err(0.05)?;
    ensure!((12.0..=20.0).contains(&ratio), "step-halving ratio {ratio:.2}");
    // probes
    let mut probed: Vec<(String, MetricField)> = Vec::new();
    for r in 1..=4 {
        probed.push((format!("cw r{r}"), cw_pure(4, r, vec![vec![q(1, 1), q(1, 2)], vec![q(1, 2), q(-1, 1)]])));
    }
    for (i, s) in specs().iter().enumerate() {
        probed.push((format!("spec {i}"), make_theorem1(s).unwrap()));
    }
    let (mut escapes, mut exits, mut drift) = (0, 0, 0.0f64);
    for (name, m) in &probed {
        let p = completeness_probe(m, 8, 10.0, 1e-3, 1);
        ensure!(p.escapes == 0, "{name}: {}", p.summary);
        ensure!(p.max_relative_drift < 1e-6, "{name}: drift {:e}", p.max_relative_drift);
        escapes += p.escapes;
        exits += p.chart_exits;
        drift = drift.max(p.max_relative_drift);
    }
    Ok(format!(
        "closed form {worst:.1e}, ratio {ratio:.2}, {} probes: {escapes} escapes, {exits} chart exits, drift {drift:.1e}",
        probed.len() * 8
    ))
}

fn rat_of(v: f64) -> gcw::expr::Rational {
    gcw::expr::Rational::from_float(v).unwrap()
}

fn strip_wall_time(json: &str) -> String {
    json.lines().filter(|l| !l.contains("\"wall_time_ms\"")).collect::<Vec<_>>().join("\n")
}

fn tooling() -> Outcome {
    let mut all: Vec<(String, MetricField, usize)> =
        suite().into_iter().map(|s| (s.name.clone(), s.metric.clone(), s.cap(4))).collect();
    for (i, s) in specs().iter().enumerate() {
        all.push((format!("spec {i}"), make_theorem1(s).unwrap(), 3));
    }
    for (name, m, cap) in &all {
        let text = emit_metric(m);
        let doc = parse_metric_file(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure!(doc == MetricDocument::from_metric(m), "{name}: round trip changed the metric");
        ensure!(emit_metric_file(&doc) == text, "{name}: emit is not canonical");
        let opts = CheckOptions {
            order_cap: *cap,
            ..CheckOptions::default()
        };
        let a = report_json(&build_report(m, &opts).map_err(|e| e.to_string())?);
        let b = report_json(&build_report(m, &opts).map_err(|e| e.to_string())?);
        ensure!(strip_wall_time(&a) == strip_wall_time(&b), "{name}: JSON differs between runs");
    }
    Ok(format!("{} metrics round-trip, reports byte-identical", all.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("normal form is proper 2nd symmetric", normal_form_order_two),
        ("zero alpha is locally symmetric", zero_alpha_is_first_order),
        ("CW order equals r", cw_order_law),
        ("symmetry hierarchy", hierarchy),
        ("d/dv is a CCNV", ccnv),
        ("leaves are locally symmetric", leaves),
        ("nabla R pattern", pattern),
        ("finite-difference cross-check", finite_differences),
        ("geodesics", geodesics),
        ("round trip and deterministic JSON", tooling),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
