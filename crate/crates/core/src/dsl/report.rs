use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::checks::{
    check_ccnv, curvature_pattern_report, detect_brinkmann, find_symmetry_order, leaf_local_symmetry, ChecksError,
    PatternEntry, Witness,
};
use crate::geodesic::{completeness_probe, ProbeReport, Trajectory};
use crate::tensor::MetricField;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub order_cap: usize,
    pub raw_pattern: bool,
    /// Number of probe geodesics; no probe when `None`.
    pub probe: Option<usize>,
    pub probe_horizon: f64,
    pub probe_step: f64,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            order_cap: 4,
            raw_pattern: false,
            probe: None,
            probe_horizon: 10.0,
            probe_step: 1e-3,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Engine {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BrinkmannSummary {
    pub u: String,
    pub v: String,
    pub transverse: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricSummary {
    pub dim: usize,
    pub coords: Vec<String>,
    pub params: Vec<String>,
    pub signature: String,
    pub base_point: Vec<String>,
    pub brinkmann: Option<BrinkmannSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessJson {
    pub label: String,
    pub index: Vec<String>,
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetrySummary {
    pub flat: bool,
    pub locally_symmetric: bool,
    pub semi_symmetric: bool,
    pub order: Option<usize>,
    pub order_cap: usize,
    pub proper: bool,
    pub witnesses: BTreeMap<String, WitnessJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CcnvSummary {
    pub vector: String,
    pub covariantly_constant: bool,
    pub null: bool,
    pub nonzero: bool,
    pub holds: bool,
    pub norm: String,
    pub witness: Option<WitnessJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentJson {
    pub label: String,
    pub value: String,
    pub orbit_size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeafSummary {
    pub coords: Vec<String>,
    pub locally_symmetric: bool,
    pub scalar_curvature: String,
    pub ricci: Vec<ComponentJson>,
    pub witness: Option<WitnessJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PatternSummary {
    pub raw: bool,
    pub riemann: Vec<ComponentJson>,
    pub nabla_riemann: Vec<ComponentJson>,
}

/// Everything `gcw check` reports. Field order is the JSON key order;
/// `wall_time_ms` is last and the only nondeterministic field.
#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub engine: Engine,
    pub metric: MetricSummary,
    pub symmetry: SymmetrySummary,
    pub ccnv: Option<CcnvSummary>,
    pub leaf: Option<LeafSummary>,
    pub pattern: PatternSummary,
    pub probe: Option<ProbeReport>,
    pub notes: Vec<String>,
    pub wall_time_ms: u64,
}

fn witness_json(m: &MetricField, w: &Witness) -> WitnessJson {
    let coords = m.chart().coords();
    WitnessJson {
        label: w.label.clone(),
        index: w.index.iter().map(|&i| coords[i].clone()).collect(),
        value: w.value.to_string(),
    }
}

fn components(entries: &[PatternEntry]) -> Vec<ComponentJson> {
    entries
        .iter()
        .map(|e| ComponentJson {
            label: e.label.clone(),
            value: e.value.to_string(),
            orbit_size: e.orbit_size,
        })
        .collect()
}

pub fn build_report(m: &MetricField, opts: &CheckOptions) -> Result<ReportDocument, ChecksError> {
    let start = Instant::now();
    let coords = m.chart().coords();
    let bc = detect_brinkmann(m);
    let verdict = find_symmetry_order(m, opts.order_cap)?;
    let mut notes = Vec::new();
    let (ccnv, leaf) = match &bc {
        Some(b) => {
            let c = check_ccnv(m, None)?;
            let l = leaf_local_symmetry(m)?;
            let lm = &l.geometry.metric;
            let ricci = l
                .geometry
                .ricci
                .nonzero()
                .map(|(i, v)| ComponentJson {
                    label: l.geometry.ricci.index_label(i),
                    value: v.to_string(),
                    orbit_size: 1,
                })
                .collect();
            (
                Some(CcnvSummary {
                    vector: format!("d/d{}", coords[b.v]),
                    covariantly_constant: c.covariantly_constant,
                    null: c.null,
                    nonzero: c.nonzero,
                    holds: c.holds,
                    norm: c.norm.to_string(),
                    witness: c.witness.as_ref().map(|w| witness_json(m, w)),
                }),
                Some(LeafSummary {
                    coords: lm.chart().coords().to_vec(),
                    locally_symmetric: l.holds,
                    scalar_curvature: l.geometry.scalar.to_string(),
                    ricci,
                    witness: l.witness.as_ref().map(|w| witness_json(lm, w)),
                }),
            )
        }
        None => {
            notes.push("not in Brinkmann form: parallel null vector and leaf checks skipped".into());
            (None, None)
        }
    };
    let pattern = curvature_pattern_report(m, opts.raw_pattern)?;
    let probe = opts
        .probe
        .map(|n| completeness_probe(m, n, opts.probe_horizon, opts.probe_step, opts.seed));
    Ok(ReportDocument {
        schema_version: SCHEMA_VERSION,
        engine: Engine {
            name: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
        },
        metric: MetricSummary {
            dim: m.dim(),
            coords: coords.to_vec(),
            params: m.chart().params().to_vec(),
            signature: m.signature().name().into(),
            base_point: m.base_point().iter().map(|r| r.to_string()).collect(),
            brinkmann: bc.map(|b| BrinkmannSummary {
                u: coords[b.u].clone(),
                v: coords[b.v].clone(),
                transverse: b.transverse.iter().map(|&i| coords[i].clone()).collect(),
            }),
        },
        symmetry: SymmetrySummary {
            flat: verdict.flat,
            locally_symmetric: verdict.locally_symmetric,
            semi_symmetric: verdict.semi_symmetric,
            order: verdict.order,
            order_cap: verdict.cap,
            proper: verdict.proper,
            witnesses: verdict
                .witnesses
                .iter()
                .map(|(k, w)| (k.clone(), witness_json(m, w)))
                .collect(),
        },
        ccnv,
        leaf,
        pattern: PatternSummary {
            raw: pattern.raw,
            riemann: components(&pattern.riemann),
            nabla_riemann: components(&pattern.nabla_riemann),
        },
        probe,
        notes,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

pub fn report_json(doc: &ReportDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
    s.push('\n');
    s
}

/// Columns `param, <coords>, d<coords>, norm`.
pub fn write_trajectory_csv<W: Write>(out: W, coords: &[String], tr: &Trajectory) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["param".to_string()];
    header.extend(coords.iter().cloned());
    header.extend(coords.iter().map(|c| format!("d{c}")));
    header.push("norm".into());
    w.write_record(&header)?;
    for s in &tr.samples {
        let mut row = vec![s.state.affine_param.to_string()];
        row.extend(s.state.position.iter().map(f64::to_string));
        row.extend(s.state.velocity.iter().map(f64::to_string));
        row.push(s.norm.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
