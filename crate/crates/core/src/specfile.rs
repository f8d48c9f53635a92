//! Plain-text manifold descriptions: a line-oriented, diffable format with
//! INI-like sections for the chart, its fields, and optional contact-pair
//! wiring. Parsing reports the offending line number; serialization is
//! deterministic so identical inputs produce identical files.
//!
//! Sections:
//! `[manifold]` (name, dim) — `[coords]` (`i = label`) — `[box]`
//! (`i = lo hi`) — `[metric]` (`i j = expr`, symmetric completion, missing
//! entries are zero) — `[form <name>]` / `[vector <name>]` (`i = expr`) —
//! `[endo <name>]` (`i j = expr`, i the output index) — `[pair]`
//! (alpha1, alpha2, Z1, Z2, phi, p, q).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::contact::ContactPairStructure;
use crate::expr::Expr;
use crate::geometry::{ChartedManifold, GeomError};
use crate::tensors::Subject;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },

    #[error("{0}")]
    Structure(String),
}

fn err(line: usize, message: impl Into<String>) -> SpecError {
    SpecError::Line {
        line,
        message: message.into(),
    }
}

/// The `[pair]` section: field names plus type numbers.
#[derive(Debug, Clone, Default)]
pub struct PairNames {
    pub alpha1: String,
    pub alpha2: String,
    pub z1: String,
    pub z2: String,
    pub phi: String,
    pub p: usize,
    pub q: usize,
}

#[derive(Debug, Clone)]
pub struct ParsedSpec {
    pub chart: ChartedManifold,
    pub pair: Option<PairNames>,
}

impl ParsedSpec {
    /// Assemble the runtime subject, wiring the pair structure when the
    /// file declares one.
    pub fn into_subject(self) -> Result<Subject, GeomError> {
        self.chart.validate()?;
        match self.pair {
            Some(p) => Ok(Subject::Pair(Box::new(ContactPairStructure::new(
                self.chart, &p.alpha1, &p.alpha2, &p.z1, &p.z2, &p.phi, p.p, p.q,
            )?))),
            None => Ok(Subject::Plain(Box::new(self.chart))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Section {
    None,
    Manifold,
    Coords,
    Box,
    Metric,
    Form(String),
    Vector(String),
    Endo(String),
    Pair,
}

struct Builder {
    name: Option<String>,
    dim: Option<usize>,
    coord_names: BTreeMap<usize, String>,
    sample_box: BTreeMap<usize, (f64, f64)>,
    metric: BTreeMap<(usize, usize), Expr>,
    forms: BTreeMap<String, BTreeMap<usize, Expr>>,
    vectors: BTreeMap<String, BTreeMap<usize, Expr>>,
    endos: BTreeMap<String, BTreeMap<(usize, usize), Expr>>,
    pair: Option<PairNames>,
    pair_seen: BTreeMap<String, bool>,
}

impl Builder {
    fn dim(&self, line: usize) -> Result<usize, SpecError> {
        self.dim
            .ok_or_else(|| err(line, "dim must be declared in [manifold] before this entry"))
    }

    fn index(&self, token: &str, line: usize) -> Result<usize, SpecError> {
        let idx: usize = token
            .parse()
            .map_err(|_| err(line, format!("expected a coordinate index, got `{token}`")))?;
        let dim = self.dim(line)?;
        if idx >= dim {
            return Err(err(
                line,
                format!("coordinate index {idx} out of range for dim {dim}"),
            ));
        }
        Ok(idx)
    }

    fn expr(&self, src: &str, line: usize) -> Result<Expr, SpecError> {
        let dim = self.dim(line)?;
        Expr::parse(src, dim).map_err(|e| err(line, format!("bad expression `{src}`: {e}")))
    }
}

/// Parse a manifold description. Errors carry the 1-based line number.
pub fn parse(text: &str) -> Result<ParsedSpec, SpecError> {
    let mut b = Builder {
        name: None,
        dim: None,
        coord_names: BTreeMap::new(),
        sample_box: BTreeMap::new(),
        metric: BTreeMap::new(),
        forms: BTreeMap::new(),
        vectors: BTreeMap::new(),
        endos: BTreeMap::new(),
        pair: None,
        pair_seen: BTreeMap::new(),
    };
    let mut section = Section::None;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let Some(header) = header.strip_suffix(']') else {
                return Err(err(lineno, "unterminated section header"));
            };
            section = parse_header(header.trim(), lineno, &mut b)?;
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(lineno, "expected `key = value`"));
        };
        let key = key.trim();
        let value = value.trim();
        match &section {
            Section::None => {
                return Err(err(lineno, "entry before the first section header"));
            }
            Section::Manifold => match key {
                "name" => {
                    if value.is_empty() {
                        return Err(err(lineno, "manifold name must not be empty"));
                    }
                    b.name = Some(value.to_string());
                }
                "dim" => {
                    let d: usize = value
                        .parse()
                        .map_err(|_| err(lineno, format!("bad dim `{value}`")))?;
                    if d == 0 {
                        return Err(err(lineno, "dim must be positive"));
                    }
                    b.dim = Some(d);
                }
                other => {
                    return Err(err(lineno, format!("unknown [manifold] key `{other}`")));
                }
            },
            Section::Coords => {
                let idx = b.index(key, lineno)?;
                if b.coord_names.insert(idx, value.to_string()).is_some() {
                    return Err(err(lineno, format!("duplicate coordinate name for {idx}")));
                }
            }
            Section::Box => {
                let idx = b.index(key, lineno)?;
                let mut parts = value.split_whitespace();
                let (Some(lo), Some(hi), None) = (parts.next(), parts.next(), parts.next())
                else {
                    return Err(err(lineno, "box entry must be `i = lo hi`"));
                };
                let lo: f64 = lo
                    .parse()
                    .map_err(|_| err(lineno, format!("bad number `{lo}`")))?;
                let hi: f64 = hi
                    .parse()
                    .map_err(|_| err(lineno, format!("bad number `{hi}`")))?;
                if !(lo < hi) {
                    return Err(err(lineno, "box interval must satisfy lo < hi"));
                }
                if b.sample_box.insert(idx, (lo, hi)).is_some() {
                    return Err(err(lineno, format!("duplicate box interval for {idx}")));
                }
            }
            Section::Metric => {
                let (i, j) = index_pair(&b, key, lineno)?;
                let key_sym = (i.min(j), i.max(j));
                let e = b.expr(value, lineno)?;
                if b.metric.insert(key_sym, e).is_some() {
                    return Err(err(
                        lineno,
                        format!("duplicate metric entry {} {}", key_sym.0, key_sym.1),
                    ));
                }
            }
            Section::Form(name) | Section::Vector(name) => {
                let idx = b.index(key, lineno)?;
                let e = b.expr(value, lineno)?;
                let store = if matches!(section, Section::Form(_)) {
                    b.forms.entry(name.clone()).or_default()
                } else {
                    b.vectors.entry(name.clone()).or_default()
                };
                if store.insert(idx, e).is_some() {
                    return Err(err(lineno, format!("duplicate component {idx}")));
                }
            }
            Section::Endo(name) => {
                let (i, j) = index_pair(&b, key, lineno)?;
                let e = b.expr(value, lineno)?;
                if b.endos.entry(name.clone()).or_default().insert((i, j), e).is_some() {
                    return Err(err(lineno, format!("duplicate entry {i} {j}")));
                }
            }
            Section::Pair => {
                if b.pair_seen.insert(key.to_string(), true).is_some() {
                    return Err(err(lineno, format!("duplicate [pair] key `{key}`")));
                }
                let pair = b.pair.get_or_insert_with(PairNames::default);
                match key {
                    "alpha1" => pair.alpha1 = value.to_string(),
                    "alpha2" => pair.alpha2 = value.to_string(),
                    "Z1" => pair.z1 = value.to_string(),
                    "Z2" => pair.z2 = value.to_string(),
                    "phi" => pair.phi = value.to_string(),
                    "p" => {
                        pair.p = value
                            .parse()
                            .map_err(|_| err(lineno, format!("bad p `{value}`")))?;
                    }
                    "q" => {
                        pair.q = value
                            .parse()
                            .map_err(|_| err(lineno, format!("bad q `{value}`")))?;
                    }
                    other => {
                        return Err(err(lineno, format!("unknown [pair] key `{other}`")));
                    }
                }
            }
        }
    }

    finish(b)
}

fn parse_header(header: &str, lineno: usize, b: &mut Builder) -> Result<Section, SpecError> {
    let mut parts = header.split_whitespace();
    let kind = parts.next().unwrap_or("");
    let name = parts.next();
    if parts.next().is_some() {
        return Err(err(lineno, format!("malformed section header `[{header}]`")));
    }
    match (kind, name) {
        ("manifold", None) => Ok(Section::Manifold),
        ("coords", None) => Ok(Section::Coords),
        ("box", None) => Ok(Section::Box),
        ("metric", None) => Ok(Section::Metric),
        ("form", Some(n)) => {
            if b.forms.contains_key(n) {
                return Err(err(lineno, format!("duplicate form `{n}`")));
            }
            b.forms.insert(n.to_string(), BTreeMap::new());
            Ok(Section::Form(n.to_string()))
        }
        ("vector", Some(n)) => {
            if b.vectors.contains_key(n) {
                return Err(err(lineno, format!("duplicate vector `{n}`")));
            }
            b.vectors.insert(n.to_string(), BTreeMap::new());
            Ok(Section::Vector(n.to_string()))
        }
        ("endo", Some(n)) => {
            if b.endos.contains_key(n) {
                return Err(err(lineno, format!("duplicate endo `{n}`")));
            }
            b.endos.insert(n.to_string(), BTreeMap::new());
            Ok(Section::Endo(n.to_string()))
        }
        ("pair", None) => Ok(Section::Pair),
        _ => Err(err(lineno, format!("unknown section `[{header}]`"))),
    }
}

fn index_pair(b: &Builder, key: &str, lineno: usize) -> Result<(usize, usize), SpecError> {
    let mut parts = key.split_whitespace();
    let (Some(i), Some(j), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(err(lineno, "expected `i j = expr`"));
    };
    Ok((b.index(i, lineno)?, b.index(j, lineno)?))
}

fn finish(b: Builder) -> Result<ParsedSpec, SpecError> {
    let name = b
        .name
        .ok_or_else(|| SpecError::Structure("missing [manifold] name".into()))?;
    let dim = b
        .dim
        .ok_or_else(|| SpecError::Structure("missing [manifold] dim".into()))?;

    let mut sample_box = Vec::with_capacity(dim);
    for i in 0..dim {
        match b.sample_box.get(&i) {
            Some(interval) => sample_box.push(*interval),
            None => {
                return Err(SpecError::Structure(format!(
                    "missing [box] interval for coordinate {i}"
                )));
            }
        }
    }

    let coord_names = (0..dim)
        .map(|i| b.coord_names.get(&i).cloned().unwrap_or_else(|| format!("x{i}")))
        .collect();

    let zero = || Expr::constant(dim, 0.0);
    let mut metric: Vec<Vec<Expr>> = (0..dim).map(|_| (0..dim).map(|_| zero()).collect()).collect();
    for ((i, j), e) in b.metric {
        metric[i][j] = e.clone();
        metric[j][i] = e;
    }

    let densify_form = |entries: BTreeMap<usize, Expr>| -> Vec<Expr> {
        let mut v: Vec<Expr> = (0..dim).map(|_| zero()).collect();
        for (i, e) in entries {
            v[i] = e;
        }
        v
    };
    let one_forms: BTreeMap<String, Vec<Expr>> = b
        .forms
        .into_iter()
        .map(|(n, entries)| (n, densify_form(entries)))
        .collect();
    let vector_fields: BTreeMap<String, Vec<Expr>> = b
        .vectors
        .into_iter()
        .map(|(n, entries)| (n, densify_form(entries)))
        .collect();
    let endomorphisms: BTreeMap<String, Vec<Vec<Expr>>> = b
        .endos
        .into_iter()
        .map(|(n, entries)| {
            let mut m: Vec<Vec<Expr>> =
                (0..dim).map(|_| (0..dim).map(|_| zero()).collect()).collect();
            for ((i, j), e) in entries {
                m[i][j] = e;
            }
            (n, m)
        })
        .collect();

    if let Some(pair) = &b.pair {
        for (label, value) in [
            ("alpha1", &pair.alpha1),
            ("alpha2", &pair.alpha2),
            ("Z1", &pair.z1),
            ("Z2", &pair.z2),
            ("phi", &pair.phi),
        ] {
            if value.is_empty() {
                return Err(SpecError::Structure(format!(
                    "[pair] section is missing `{label}`"
                )));
            }
        }
    }

    Ok(ParsedSpec {
        chart: ChartedManifold {
            name,
            dim,
            coord_names,
            metric,
            sample_box,
            vector_fields,
            one_forms,
            endomorphisms,
        },
        pair: b.pair,
    })
}

fn is_zero_literal(e: &Expr) -> bool {
    e.to_string() == "0"
}

/// Serialize a subject to the text format. Zero components are omitted;
/// ordering is fixed, so equal subjects produce byte-identical files.
pub fn serialize(subject: &Subject) -> String {
    let chart = subject.chart();
    let n = chart.dim;
    let mut out = String::new();
    let _ = writeln!(out, "[manifold]");
    let _ = writeln!(out, "name = {}", chart.name);
    let _ = writeln!(out, "dim = {n}");
    let _ = writeln!(out);
    let _ = writeln!(out, "[coords]");
    for (i, name) in chart.coord_names.iter().enumerate() {
        let _ = writeln!(out, "{i} = {name}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[box]");
    for (i, (lo, hi)) in chart.sample_box.iter().enumerate() {
        let _ = writeln!(out, "{i} = {lo} {hi}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[metric]");
    for i in 0..n {
        for j in i..n {
            let e = &chart.metric[i][j];
            if !is_zero_literal(e) {
                let _ = writeln!(out, "{i} {j} = {e}");
            }
        }
    }
    for (name, comps) in &chart.one_forms {
        let _ = writeln!(out);
        let _ = writeln!(out, "[form {name}]");
        for (i, e) in comps.iter().enumerate() {
            if !is_zero_literal(e) {
                let _ = writeln!(out, "{i} = {e}");
            }
        }
    }
    for (name, comps) in &chart.vector_fields {
        let _ = writeln!(out);
        let _ = writeln!(out, "[vector {name}]");
        for (i, e) in comps.iter().enumerate() {
            if !is_zero_literal(e) {
                let _ = writeln!(out, "{i} = {e}");
            }
        }
    }
    for (name, m) in &chart.endomorphisms {
        let _ = writeln!(out);
        let _ = writeln!(out, "[endo {name}]");
        for (i, row) in m.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if !is_zero_literal(e) {
                    let _ = writeln!(out, "{i} {j} = {e}");
                }
            }
        }
    }
    if let Subject::Pair(s) = subject {
        let _ = writeln!(out);
        let _ = writeln!(out, "[pair]");
        let _ = writeln!(out, "alpha1 = {}", s.alpha1);
        let _ = writeln!(out, "alpha2 = {}", s.alpha2);
        let _ = writeln!(out, "Z1 = {}", s.z1);
        let _ = writeln!(out, "Z2 = {}", s.z2);
        let _ = writeln!(out, "phi = {}", s.phi);
        let _ = writeln!(out, "p = {}", s.p);
        let _ = writeln!(out, "q = {}", s.q);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    #[test]
    fn every_builtin_round_trips_byte_identically() {
        for name in zoo::BUILTIN_NAMES {
            let entry = zoo::builtin(name).unwrap();
            let first = serialize(&entry.subject);
            let parsed = parse(&first).unwrap_or_else(|e| panic!("{name}: {e}"));
            let subject = parsed.into_subject().unwrap_or_else(|e| panic!("{name}: {e}"));
            let second = serialize(&subject);
            assert_eq!(first, second, "{name} round trip changed the file");
        }
    }

    #[test]
    fn reparsed_chart_evaluates_identically() {
        let entry = zoo::builtin("s3_x_s1").unwrap();
        let text = serialize(&entry.subject);
        let subject = parse(&text).unwrap().into_subject().unwrap();
        let x = [0.7, 1.3, 2.9, 0.2];
        let b1 = entry.subject.chart().curvature_at(&x).unwrap();
        let b2 = subject.chart().curvature_at(&x).unwrap();
        assert_eq!(b1.scal, b2.scal);
        assert_eq!(b1.riemann_dddd, b2.riemann_dddd);
    }

    #[test]
    fn malformed_expression_reports_its_line() {
        let text = "[manifold]\nname = t\ndim = 2\n\n[box]\n0 = -1 1\n1 = -1 1\n\n[metric]\n0 0 = 1\n1 1 = sin(x9)\n";
        match parse(text) {
            Err(SpecError::Line { line, .. }) => assert_eq!(line, 11),
            other => panic!("expected line error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_section_is_rejected_with_line() {
        let text = "[manifold]\nname = t\ndim = 1\n[wavefunction]\n";
        match parse(text) {
            Err(SpecError::Line { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("unknown section"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_metric_entry_is_rejected() {
        let text =
            "[manifold]\nname = t\ndim = 2\n[box]\n0 = -1 1\n1 = -1 1\n[metric]\n0 1 = 1\n1 0 = 1\n";
        match parse(text) {
            Err(SpecError::Line { line, message }) => {
                assert_eq!(line, 9);
                assert!(message.contains("duplicate"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_box_interval_is_rejected() {
        let text = "[manifold]\nname = t\ndim = 2\n[box]\n0 = -1 1\n[metric]\n0 0 = 1\n1 1 = 1\n";
        match parse(text) {
            Err(SpecError::Structure(msg)) => assert!(msg.contains("coordinate 1")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# chart\n[manifold]\nname = t\n\ndim = 1\n# interval\n[box]\n0 = 0 1\n[metric]\n0 0 = 1\n";
        let parsed = parse(text).unwrap();
        assert_eq!(parsed.chart.name, "t");
        assert_eq!(parsed.chart.dim, 1);
    }

    #[test]
    fn pair_referencing_missing_field_fails_subject_assembly() {
        let text = "[manifold]\nname = t\ndim = 2\n[box]\n0 = -1 1\n1 = -1 1\n[metric]\n0 0 = 1\n1 1 = 1\n[pair]\nalpha1 = a\nalpha2 = b\nZ1 = u\nZ2 = v\nphi = f\np = 0\nq = 0\n";
        let parsed = parse(text).unwrap();
        assert!(parsed.into_subject().is_err());
    }

    #[test]
    fn entry_before_any_section_is_rejected() {
        match parse("name = t\n") {
            Err(SpecError::Line { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }
}
