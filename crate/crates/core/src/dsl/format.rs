use std::collections::BTreeMap;

use crate::expr::{parse_expr, parse_rational, ExprError, Rational, RationalExpr, VarList};
use crate::tensor::{Chart, MetricField, Signature, TensorError};

use super::DslError;

#[derive(Clone, Debug)]
pub struct MetricEntry {
    /// `i ≤ j`, 0-based.
    pub i: usize,
    pub j: usize,
    pub text: String,
    pub expr: RationalExpr,
}

/// Parsed metric file. Entries not listed are zero.
#[derive(Clone, Debug)]
pub struct MetricDocument {
    pub dim: usize,
    pub coords: Vec<String>,
    pub params: Vec<String>,
    pub entries: Vec<MetricEntry>,
    pub basepoint: Option<Vec<Rational>>,
    pub signature: Option<Signature>,
}

impl PartialEq for MetricDocument {
    /// Equal declarations and semantically equal expressions; the text of
    /// an entry is not compared.
    fn eq(&self, other: &Self) -> bool {
        let table = |d: &MetricDocument| -> BTreeMap<(usize, usize), RationalExpr> {
            d.entries.iter().filter(|e| !e.expr.is_zero()).map(|e| ((e.i, e.j), e.expr.clone())).collect()
        };
        let (a, b) = (table(self), table(other));
        self.dim == other.dim
            && self.coords == other.coords
            && self.params == other.params
            && self.basepoint == other.basepoint
            && self.signature.unwrap_or(Signature::Lorentzian) == other.signature.unwrap_or(Signature::Lorentzian)
            && a.len() == b.len()
            && a.iter().zip(&b).all(|((ka, ea), (kb, eb))| ka == kb && ea.equals(eb))
    }
}

/// Whitespace-separated words with their 1-based columns.
fn words(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (col, (byte, c)) in line.char_indices().enumerate() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some((col + 1, byte)),
            (true, Some((sc, sb))) => {
                out.push((sc, &line[sb..byte]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((sc, sb)) = start {
        out.push((sc, &line[sb..]));
    }
    out
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_alphabetic() || c == '_') && cs.all(|c| c.is_alphanumeric() || c == '_')
}

const KEYWORDS: [&str; 6] = ["dim", "coords", "params", "g", "basepoint", "signature"];

pub fn parse_metric_file(text: &str) -> Result<MetricDocument, DslError> {
    let mut dim: Option<(usize, usize)> = None;
    let mut coords: Option<(usize, Vec<String>)> = None;
    let mut params: Option<Vec<String>> = None;
    let mut basepoint: Option<(usize, Vec<Rational>)> = None;
    let mut signature = None;
    let mut entries: Vec<MetricEntry> = Vec::new();
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        let ws = words(line);
        let Some(&(kcol, kw)) = ws.first() else { continue };
        let syntax = |column: usize, message: String| DslError::Syntax {
            line: line_no,
            column,
            message,
        };
        let once = |present: bool, what: &str| {
            if present {
                Err(DslError::Duplicate {
                    line: line_no,
                    what: format!("'{what}' declaration"),
                })
            } else {
                Ok(())
            }
        };
        match kw {
            "dim" => {
                once(dim.is_some(), "dim")?;
                let [_, (c, n)] = ws[..] else {
                    return Err(syntax(kcol, "expected 'dim <n>'".into()));
                };
                let n: usize = n.parse().map_err(|_| syntax(c, format!("invalid dimension '{n}'")))?;
                if n == 0 {
                    return Err(syntax(c, "dimension must be positive".into()));
                }
                dim = Some((n, line_no));
            }
            "coords" | "params" => {
                if kw == "coords" {
                    once(coords.is_some(), "coords")?;
                } else {
                    once(params.is_some(), "params")?;
                }
                let mut names: Vec<String> = Vec::new();
                for &(c, w) in &ws[1..] {
                    if !is_ident(w) || KEYWORDS.contains(&w) {
                        return Err(syntax(c, format!("invalid name '{w}'")));
                    }
                    let clash = names.iter().any(|n| n == w)
                        || (kw == "params" && coords.as_ref().is_some_and(|(_, cs)| cs.iter().any(|n| n == w)))
                        || (kw == "coords" && params.as_ref().is_some_and(|ps| ps.iter().any(|n| n == w)));
                    if clash {
                        return Err(DslError::Duplicate {
                            line: line_no,
                            what: format!("name '{w}'"),
                        });
                    }
                    names.push(w.to_string());
                }
                if kw == "coords" {
                    if names.is_empty() {
                        return Err(syntax(kcol, "expected at least one coordinate".into()));
                    }
                    coords = Some((line_no, names));
                } else {
                    params = Some(names);
                }
            }
            "basepoint" => {
                once(basepoint.is_some(), "basepoint")?;
                let mut vals = Vec::new();
                for &(c, w) in &ws[1..] {
                    vals.push(parse_rational(w).ok_or_else(|| syntax(c, format!("invalid rational '{w}'")))?);
                }
                basepoint = Some((line_no, vals));
            }
            "signature" => {
                once(signature.is_some(), "signature")?;
                let [_, (c, s)] = ws[..] else {
                    return Err(syntax(kcol, "expected 'signature lorentzian|riemannian'".into()));
                };
                signature = Some(match s {
                    "lorentzian" => Signature::Lorentzian,
                    "riemannian" => Signature::Riemannian,
                    _ => return Err(syntax(c, format!("unknown signature '{s}'"))),
                });
            }
            "g" => {
                let Some((_, cs)) = &coords else {
                    return Err(DslError::Missing {
                        line: line_no,
                        what: "'coords' must precede metric entries".into(),
                    });
                };
                if ws.len() < 4 || ws[3].1 != "=" && !ws[3].1.starts_with('=') {
                    return Err(syntax(
                        ws.get(3).map_or(line.chars().count() + 1, |w| w.0),
                        "expected 'g <i> <j> = <expr>'".into(),
                    ));
                }
                let index = |(c, w): (usize, &str)| -> Result<usize, DslError> {
                    let found = match w.parse::<usize>() {
                        Ok(k) if k < cs.len() => Some(k),
                        Ok(_) => None,
                        Err(_) => cs.iter().position(|n| n == w),
                    };
                    found.ok_or_else(|| DslError::UnknownCoordinate {
                        line: line_no,
                        column: c,
                        name: w.to_string(),
                    })
                };
                let (a, b) = (index(ws[1])?, index(ws[2])?);
                let (i, j) = (a.min(b), a.max(b));
                if let Some(prev) = seen.insert((i, j), line_no) {
                    return Err(DslError::Duplicate {
                        line: line_no,
                        what: format!("entry g {} {} (first given on line {prev})", cs[i], cs[j]),
                    });
                }
                let eq_col = ws[3].0;
                let eq_byte = line.char_indices().nth(eq_col - 1).map(|(b, _)| b).expect("column in line");
                let expr_text = &line[eq_byte + 1..];
                let vars = VarList::new(cs.iter().chain(params.iter().flatten()).cloned());
                let expr = parse_expr(expr_text, &vars).map_err(|e| match e {
                    ExprError::Parse { column, message } => syntax(eq_col + column, message),
                    other => syntax(eq_col + 1, other.to_string()),
                })?;
                entries.push(MetricEntry {
                    i,
                    j,
                    text: expr_text.trim().to_string(),
                    expr,
                });
            }
            _ => return Err(syntax(kcol, format!("unknown keyword '{kw}'"))),
        }
    }

    let (dim, _) = dim.ok_or(DslError::Missing {
        line: 0,
        what: "'dim' declaration".into(),
    })?;
    let (cline, coords) = coords.ok_or(DslError::Missing {
        line: 0,
        what: "'coords' declaration".into(),
    })?;
    if coords.len() != dim {
        return Err(DslError::DimensionMismatch {
            line: cline,
            message: format!("dim {dim} but {} coordinates", coords.len()),
        });
    }
    if let Some((bline, b)) = &basepoint {
        if b.len() != dim {
            return Err(DslError::DimensionMismatch {
                line: *bline,
                message: format!("dim {dim} but {} basepoint values", b.len()),
            });
        }
    }
    entries.sort_by_key(|e| (e.i, e.j));
    Ok(MetricDocument {
        dim,
        coords,
        params: params.unwrap_or_default(),
        entries,
        basepoint: basepoint.map(|(_, b)| b),
        signature,
    })
}

impl MetricDocument {
    pub fn from_metric(m: &MetricField) -> Self {
        let n = m.dim();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i..n {
                let e = m.component(i, j);
                if !e.is_zero() {
                    entries.push(MetricEntry {
                        i,
                        j,
                        text: e.to_string(),
                        expr: e.clone(),
                    });
                }
            }
        }
        MetricDocument {
            dim: n,
            coords: m.chart().coords().to_vec(),
            params: m.chart().params().to_vec(),
            entries,
            basepoint: Some(m.base_point().to_vec()),
            signature: Some(m.signature()),
        }
    }

    /// Builds the metric; the signature defaults to Lorentzian.
    pub fn to_metric(&self) -> Result<MetricField, TensorError> {
        let chart = Chart::new(self.coords.clone(), self.params.clone())?;
        let vars = chart.vars();
        let mut rows = vec![vec![RationalExpr::zero(vars); self.dim]; self.dim];
        for e in &self.entries {
            rows[e.i][e.j] = e.expr.clone();
            rows[e.j][e.i] = e.expr.clone();
        }
        MetricField::new(
            chart,
            rows,
            self.signature.unwrap_or(Signature::Lorentzian),
            self.basepoint.clone(),
        )
    }
}

/// Canonical text: declarations in fixed order, entries by index with
/// coordinate names, expressions in graded-lex normal form.
pub fn emit_metric_file(doc: &MetricDocument) -> String {
    let mut out = format!("dim {}\ncoords {}\n", doc.dim, doc.coords.join(" "));
    if !doc.params.is_empty() {
        out += &format!("params {}\n", doc.params.join(" "));
    }
    if let Some(s) = doc.signature {
        out += &format!("signature {}\n", s.name());
    }
    if let Some(b) = &doc.basepoint {
        let vals: Vec<String> = b.iter().map(|r| r.to_string()).collect();
        out += &format!("basepoint {}\n", vals.join(" "));
    }
    let mut entries: Vec<&MetricEntry> = doc.entries.iter().filter(|e| !e.expr.is_zero()).collect();
    entries.sort_by_key(|e| (e.i, e.j));
    for e in entries {
        out += &format!("g {} {} = {}\n", doc.coords[e.i], doc.coords[e.j], e.expr);
    }
    out
}

pub fn emit_metric(m: &MetricField) -> String {
    emit_metric_file(&MetricDocument::from_metric(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    const WAVE: &str = "dim 3\ncoords u v x\ng u u = -2*(1*u+0)*x^2\ng u v = -1\ng x x = 1\n";

    #[test]
    fn parses_and_mirrors() {
        let doc = parse_metric_file(WAVE).unwrap();
        let m = doc.to_metric().unwrap();
        assert_eq!(m.component(1, 0).to_string(), "-1");
        assert_eq!(m.component(0, 0).to_string(), "-2*u*x^2");
    }

    #[test]
    fn dangling_operator_column() {
        let err = parse_metric_file("dim 3\ncoords u v x\ng u u = -2*\n").unwrap_err();
        assert_eq!(err.code(), "E101");
        match err {
            DslError::Syntax { line, column, .. } => assert_eq!((line, column), (3, 11)),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn index_errors_are_distinct() {
        let dup = parse_metric_file("dim 2\ncoords t x\ng 0 1 = 1\ng x t = 2\n").unwrap_err();
        assert_eq!(dup.code(), "E102");
        let unk = parse_metric_file("dim 2\ncoords t x\ng t y = 1\n").unwrap_err();
        assert_eq!(unk.code(), "E103");
        let mis = parse_metric_file("dim 3\ncoords t x\n").unwrap_err();
        assert_eq!(mis.code(), "E104");
    }

    #[test]
    fn comments_and_numeric_indices() {
        let doc = parse_metric_file("# header\ndim 2 # trailing\ncoords t x\ng 0 0 = -1\ng 1 1 = 1\n").unwrap();
        assert_eq!(doc.entries.len(), 2);
    }
}
