use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::checks::{curvature_pattern_report, ChecksError};
use crate::expr::{parse_rational, Rational};
use crate::geodesic::{integrate_geodesic, GeodesicError, GeodesicState, IntegratorConfig};
use crate::spaces::{
    make_cw, make_symmetric_factor, make_theorem1, CwSpec, FactorKind, SpaceError, SymmetricFactorSpec, Theorem1Spec,
};
use crate::tensor::{christoffel, ricci, scalar_curvature, MetricField, TensorError};

use super::{build_report, emit_metric, parse_metric_file, report_json, write_trajectory_csv, CheckOptions, DslError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Parser)]
#[command(name = "gcw", version, about = "Exact curvature checks for Brinkmann and Cahen-Wallach metrics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Symmetry order, semi-symmetry, parallel null vector, leaf and pattern checks
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        order_cap: usize,
        /// Write the JSON report here (`-` for stdout)
        #[arg(long)]
        json: Option<PathBuf>,
        /// Run a completeness probe with this many random geodesics
        #[arg(long)]
        probe: Option<usize>,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// List every nonzero component instead of one per symmetry orbit
        #[arg(long)]
        raw: bool,
    },
    /// Write a metric file for one of the built-in families
    Generate {
        #[command(subcommand)]
        what: Gen,
    },
    /// Integrate one geodesic with RK4
    Geodesic {
        file: PathBuf,
        /// Positions then velocities, comma separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        init: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        horizon: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Human-readable curvature summary
    Report {
        file: PathBuf,
        #[arg(long)]
        raw: bool,
    },
}

#[derive(Subcommand)]
enum Gen {
    /// Cahen-Wallach space; one matrix sets the leading coefficient, r matrices give A^(0) … A^(r-1)
    Cw {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        order: usize,
        #[arg(long = "A", required = true, allow_hyphen_values = true)]
        a: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CW(α u + β) times sphere or hyperbolic factors
    Theorem1 {
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        /// `sphere:k:K` or `hyperbolic:k:K`, repeatable
        #[arg(long)]
        factor: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A single constant-curvature factor, `kind:k:K`
    Factor {
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<DslError> for Failure {
    fn from(e: DslError) -> Self {
        Failure::new(EXIT_USAGE, format!("error[{}]: {e}", e.code()))
    }
}

impl From<TensorError> for Failure {
    fn from(e: TensorError) -> Self {
        let code = match e {
            TensorError::Degenerate | TensorError::DegenerateAtBase => EXIT_DEGENERATE,
            _ => EXIT_FAILURE,
        };
        Failure::new(code, format!("error: {e}"))
    }
}

impl From<SpaceError> for Failure {
    fn from(e: SpaceError) -> Self {
        match e {
            SpaceError::Tensor(t) => t.into(),
            e => Failure::new(EXIT_FAILURE, format!("error: {e}")),
        }
    }
}

impl From<ChecksError> for Failure {
    fn from(e: ChecksError) -> Self {
        match e {
            ChecksError::Tensor(t) => t.into(),
            e => Failure::new(EXIT_FAILURE, format!("error: {e}")),
        }
    }
}

impl From<GeodesicError> for Failure {
    fn from(e: GeodesicError) -> Self {
        Failure::new(EXIT_FAILURE, format!("error: {e}"))
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(EXIT_FAILURE, format!("error: {}: {e}", path.display()))
}

/// Row-major `"a,b;c,d"` with rational entries.
pub fn parse_matrix(s: &str) -> Result<Vec<Vec<Rational>>, String> {
    let rows: Vec<Vec<Rational>> = s
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| parse_rational(x).ok_or_else(|| format!("invalid matrix entry '{}'", x.trim())))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(format!("matrix '{s}' is not square"));
    }
    Ok(rows)
}

fn parse_factor(s: &str) -> Result<SymmetricFactorSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [kind, k, curv] = parts[..] else {
        return Err(format!("factor '{s}' must be kind:k:K"));
    };
    let kind = match kind {
        "sphere" => FactorKind::Sphere,
        "hyperbolic" => FactorKind::Hyperbolic,
        "euclidean" => FactorKind::Euclidean,
        _ => return Err(format!("unknown factor kind '{kind}'")),
    };
    Ok(SymmetricFactorSpec {
        kind,
        dim: k.parse().map_err(|_| format!("invalid factor dimension '{k}'"))?,
        curvature: parse_rational(curv).ok_or_else(|| format!("invalid curvature '{curv}'"))?,
    })
}

fn load(path: &Path) -> Result<MetricField, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let doc = parse_metric_file(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })?;
    Ok(doc.to_metric()?)
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) if p != Path::new("-") => fs::write(p, text).map_err(|e| io_err(p, e)),
        _ => {
            print!("{text}");
            Ok(())
        }
    }
}

fn usage(msg: String) -> Failure {
    Failure::new(EXIT_USAGE, format!("error: {msg}"))
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Check {
            file,
            order_cap,
            json,
            probe,
            horizon,
            seed,
            raw,
        } => {
            let m = load(&file)?;
            let opts = CheckOptions {
                order_cap,
                raw_pattern: raw,
                probe,
                probe_horizon: horizon,
                seed,
                ..CheckOptions::default()
            };
            let rep = build_report(&m, &opts)?;
            let to_stdout = json.as_deref() == Some(Path::new("-"));
            if !to_stdout {
                print!("{}", check_summary(&rep));
            }
            if let Some(j) = json {
                write_out(Some(&j), &report_json(&rep))?;
            }
            Ok(())
        }
        Cmd::Generate { what } => {
            let (m, out) = match what {
                Gen::Cw { dim, order, a, out } => {
                    let mats = a.iter().map(|s| parse_matrix(s)).collect::<Result<Vec<_>, _>>().map_err(usage)?;
                    let coeffs = if mats.len() == order {
                        mats
                    } else if mats.len() == 1 && order >= 1 {
                        let d = mats[0].len();
                        let zero = vec![vec![Rational::from_integer(0.into()); d]; d];
                        let mut c = vec![zero; order - 1];
                        c.push(mats[0].clone());
                        c
                    } else {
                        return Err(usage(format!("--A given {} times for order {order}", mats.len())));
                    };
                    (make_cw(&CwSpec { total_dim: dim, coeffs })?, out)
                }
                Gen::Theorem1 {
                    d,
                    alpha,
                    beta,
                    factor,
                    out,
                } => {
                    let spec = Theorem1Spec {
                        d,
                        alpha: parse_matrix(&alpha).map_err(usage)?,
                        beta: parse_matrix(&beta).map_err(usage)?,
                        factors: factor.iter().map(|f| parse_factor(f)).collect::<Result<_, _>>().map_err(usage)?,
                    };
                    (make_theorem1(&spec)?, out)
                }
                Gen::Factor { spec, out } => (make_symmetric_factor(&parse_factor(&spec).map_err(usage)?)?, out),
            };
            write_out(out.as_deref(), &emit_metric(&m))
        }
        Cmd::Geodesic {
            file,
            init,
            horizon,
            step,
            csv,
        } => {
            let m = load(&file)?;
            let n = m.dim();
            if init.len() != 2 * n {
                return Err(usage(format!("--init needs {} values (positions then velocities)", 2 * n)));
            }
            let state = GeodesicState {
                position: init[..n].to_vec(),
                velocity: init[n..].to_vec(),
                affine_param: 0.0,
            };
            let cfg = IntegratorConfig {
                step,
                max_param: horizon,
                ..IntegratorConfig::default()
            };
            let tr = integrate_geodesic(&m, &state, &cfg)?;
            let last = tr.samples.last().expect("initial sample");
            println!("termination: {}", tr.termination.as_str());
            println!("final param: {}", last.state.affine_param);
            println!("final position: {:?}", last.state.position);
            println!("final velocity: {:?}", last.state.velocity);
            println!("max norm drift: {:e}", tr.max_drift);
            if let Some(p) = csv {
                let f = fs::File::create(&p).map_err(|e| io_err(&p, e))?;
                write_trajectory_csv(f, m.chart().coords(), &tr)
                    .map_err(|e| Failure::new(EXIT_FAILURE, format!("error: {}: {e}", p.display())))?;
            }
            Ok(())
        }
        Cmd::Report { file, raw } => {
            let m = load(&file)?;
            print!("{}", curvature_summary(&m, raw)?);
            Ok(())
        }
    }
}

fn check_summary(r: &super::ReportDocument) -> String {
    let mut s = String::new();
    let md = &r.metric;
    let _ = writeln!(s, "metric: dim {}, coords {} ({})", md.dim, md.coords.join(" "), md.signature);
    if let Some(b) = &md.brinkmann {
        let _ = writeln!(s, "brinkmann: u={} v={} transverse {}", b.u, b.v, b.transverse.join(" "));
    }
    let sy = &r.symmetry;
    let _ = writeln!(s, "flat: {}", sy.flat);
    let _ = writeln!(s, "locally symmetric: {}", sy.locally_symmetric);
    let _ = writeln!(s, "semi-symmetric: {}", sy.semi_symmetric);
    match sy.order {
        Some(k) => {
            let _ = writeln!(s, "order: {k}, proper: {}", sy.proper);
        }
        None => {
            let _ = writeln!(s, "order: > {} (cap reached)", sy.order_cap);
        }
    }
    for (k, w) in &sy.witnesses {
        let _ = writeln!(s, "  witness {k}: ({}) = {}", w.label, w.value);
    }
    if let Some(c) = &r.ccnv {
        let _ = writeln!(s, "parallel null {}: {}", c.vector, if c.holds { "holds" } else { "fails" });
    }
    if let Some(l) = &r.leaf {
        let _ = writeln!(
            s,
            "leaves: {}, scalar curvature {}",
            if l.locally_symmetric { "locally symmetric" } else { "not locally symmetric" },
            l.scalar_curvature
        );
    }
    let _ = writeln!(
        s,
        "pattern: {} R entries, {} nabla R entries",
        r.pattern.riemann.len(),
        r.pattern.nabla_riemann.len()
    );
    if let Some(p) = &r.probe {
        let _ = writeln!(s, "probe: {} ({} chart exits, max drift {:e})", p.summary, p.chart_exits, p.max_drift);
    }
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

fn curvature_summary(m: &MetricField, raw: bool) -> Result<String, Failure> {
    let mut s = String::new();
    let _ = writeln!(s, "dim {}  coords {}  {}", m.dim(), m.chart().coords().join(" "), m.signature().name());
    let gamma = christoffel(m);
    let _ = writeln!(s, "Christoffel symbols ({} nonzero):", gamma.nnz());
    for (i, v) in gamma.nonzero() {
        let _ = writeln!(s, "  G[{}] = {v}", gamma.index_label(i));
    }
    let p = curvature_pattern_report(m, raw)?;
    let _ = writeln!(s, "Riemann R_abcd ({} entries):", p.riemann.len());
    for e in &p.riemann {
        let _ = writeln!(s, "  R[{}] = {}", e.label, e.value);
    }
    let _ = writeln!(s, "nabla R ({} entries):", p.nabla_riemann.len());
    for e in &p.nabla_riemann {
        let _ = writeln!(s, "  DR[{}] = {}", e.label, e.value);
    }
    let ric = ricci(m)?;
    let _ = writeln!(s, "Ricci ({} nonzero):", ric.nnz());
    for (i, v) in ric.nonzero() {
        let _ = writeln!(s, "  Ric[{}] = {v}", ric.index_label(i));
    }
    let _ = writeln!(s, "scalar curvature: {}", scalar_curvature(m)?);
    Ok(s)
}

/// Runs the CLI and returns the process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.cmd) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("{}", f.message);
            f.code
        }
    }
}
